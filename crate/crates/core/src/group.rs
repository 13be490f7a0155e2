//! Abelian group carriers, Haar normalization conventions, elementwise
//! arithmetic, integer-matrix homomorphisms, and finite sumset arithmetic.
//!
//! Haar normalizations are fixed once per kind: counting measure for finite
//! products of cyclic groups, Lebesgue measure for `R^n`, the uniform
//! probability measure for the circle, and `dx/x` (resp. `dz/|z|^2`) for the
//! multiplicative kinds, pulled back to Lebesgue via the log-isomorphism.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const TAU: f64 = 2.0 * std::f64::consts::PI;

/// Wraparound tolerance for circle-element equality.
pub const CIRCLE_EQ_TOL: f64 = 1e-12;

/// An abelian group carrier with a fixed Haar normalization.
///
/// Finite groups are entered in structure-theorem form, as products of cyclic
/// groups `Z_{m_1} x ... x Z_{m_k}`. The multiplicative kinds are handled
/// exclusively through their log-isomorphisms onto additive `R` (and
/// `R x Circle` for the nonzero complex numbers); there is no direct
/// multiplicative arithmetic.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GroupSpec {
    FiniteProduct { moduli: Vec<u64> },
    RealVector { dim: usize },
    Circle,
    MultiplicativePositive,
    MultiplicativeComplex,
}

/// An element of a finite product of cyclic groups, one residue per factor.
pub type FiniteElem = Vec<u64>;

impl GroupSpec {
    pub fn cyclic(m: u64) -> Self {
        GroupSpec::FiniteProduct { moduli: vec![m] }
    }

    pub fn product(moduli: &[u64]) -> Self {
        GroupSpec::FiniteProduct {
            moduli: moduli.to_vec(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            GroupSpec::FiniteProduct { moduli } => {
                if moduli.is_empty() || moduli.iter().any(|&m| m < 2) {
                    return Err(Error::InvalidGroup(format!(
                        "all moduli must be >= 2, got {moduli:?}"
                    )));
                }
                Ok(())
            }
            GroupSpec::RealVector { dim } => {
                if *dim == 0 {
                    return Err(Error::InvalidGroup("dimension must be >= 1".into()));
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, GroupSpec::FiniteProduct { .. })
    }

    pub fn moduli(&self) -> Result<&[u64]> {
        match self {
            GroupSpec::FiniteProduct { moduli } => Ok(moduli),
            other => Err(Error::InvalidGroup(format!(
                "expected a finite group, got {other:?}"
            ))),
        }
    }

    /// Number of elements of a finite group.
    pub fn order(&self) -> Result<usize> {
        Ok(self.moduli()?.iter().product::<u64>() as usize)
    }

    fn check_elem(&self, x: &[u64]) -> Result<()> {
        let moduli = self.moduli()?;
        if x.len() != moduli.len() {
            return Err(Error::DomainError(format!(
                "element has {} components, group has {} factors",
                x.len(),
                moduli.len()
            )));
        }
        for (xi, &m) in x.iter().zip(moduli) {
            if *xi >= m {
                return Err(Error::DomainError(format!(
                    "component {xi} outside Z_{m}"
                )));
            }
        }
        Ok(())
    }

    /// Componentwise modular addition.
    pub fn add(&self, x: &[u64], y: &[u64]) -> Result<FiniteElem> {
        self.check_elem(x)?;
        self.check_elem(y)?;
        let moduli = self.moduli()?;
        Ok(x.iter()
            .zip(y)
            .zip(moduli)
            .map(|((&a, &b), &m)| (a + b) % m)
            .collect())
    }

    pub fn neg(&self, x: &[u64]) -> Result<FiniteElem> {
        self.check_elem(x)?;
        let moduli = self.moduli()?;
        Ok(x.iter().zip(moduli).map(|(&a, &m)| (m - a) % m).collect())
    }

    pub fn zero(&self) -> Result<FiniteElem> {
        Ok(vec![0; self.moduli()?.len()])
    }

    /// `a`-fold sum of `x`; negative `a` means repeated inverse.
    pub fn scalar_mul(&self, a: i64, x: &[u64]) -> Result<FiniteElem> {
        self.check_elem(x)?;
        let moduli = self.moduli()?;
        Ok(x.iter()
            .zip(moduli)
            .map(|(&xi, &m)| {
                let r = (a as i128 * xi as i128).rem_euclid(m as i128);
                r as u64
            })
            .collect())
    }

    /// Mixed-radix index of an element (first factor slowest).
    pub fn index_of(&self, x: &[u64]) -> Result<usize> {
        self.check_elem(x)?;
        let moduli = self.moduli()?;
        let mut idx = 0usize;
        for (&xi, &m) in x.iter().zip(moduli) {
            idx = idx * m as usize + xi as usize;
        }
        Ok(idx)
    }

    pub fn elem_at(&self, mut idx: usize) -> Result<FiniteElem> {
        let moduli = self.moduli()?;
        let mut out = vec![0u64; moduli.len()];
        for (slot, &m) in out.iter_mut().zip(moduli).rev() {
            *slot = (idx % m as usize) as u64;
            idx /= m as usize;
        }
        if idx != 0 {
            return Err(Error::DomainError("index outside carrier".into()));
        }
        Ok(out)
    }

    /// All elements of a finite group in index order.
    pub fn elements(&self) -> Result<Vec<FiniteElem>> {
        let n = self.order()?;
        (0..n).map(|i| self.elem_at(i)).collect()
    }
}

/// Angle addition mod 2*pi on the circle.
pub fn circle_add(a: f64, b: f64) -> f64 {
    (a + b).rem_euclid(TAU)
}

pub fn circle_eq(a: f64, b: f64) -> bool {
    let d = (a - b).rem_euclid(TAU);
    d < CIRCLE_EQ_TOL || TAU - d < CIRCLE_EQ_TOL
}

/// An integer matrix acting as a group homomorphism on `G^n`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IntegerMatrix {
    pub rows: usize,
    pub cols: usize,
    /// Row-major entries.
    pub entries: Vec<i64>,
}

impl IntegerMatrix {
    pub fn new(rows: usize, cols: usize, entries: Vec<i64>) -> Result<Self> {
        if rows == 0 || cols == 0 || entries.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!(
                "{rows}x{cols} matrix needs {} entries, got {}",
                rows * cols,
                entries.len()
            )));
        }
        Ok(IntegerMatrix {
            rows,
            cols,
            entries,
        })
    }

    pub fn identity(n: usize) -> Self {
        let mut entries = vec![0i64; n * n];
        for i in 0..n {
            entries[i * n + i] = 1;
        }
        IntegerMatrix {
            rows: n,
            cols: n,
            entries,
        }
    }

    pub fn get(&self, i: usize, j: usize) -> i64 {
        self.entries[i * self.cols + j]
    }

    /// Exact integer determinant by cofactor expansion in i128.
    ///
    /// Intended for the small matrices (n <= 4 in practice) used as group
    /// homomorphisms; overflow panics rather than wrapping.
    pub fn det(&self) -> Result<i128> {
        if self.rows != self.cols {
            return Err(Error::DimensionMismatch("determinant of non-square matrix".into()));
        }
        let n = self.rows;
        let m: Vec<i128> = self.entries.iter().map(|&e| e as i128).collect();
        Ok(det_rec(&m, n))
    }

    pub fn is_unimodular(&self) -> Result<bool> {
        Ok(matches!(self.det()?, 1 | -1))
    }

    /// Exact inverse of a unimodular matrix (adjugate divided by det).
    pub fn inverse_unimodular(&self) -> Result<IntegerMatrix> {
        let d = self.det()?;
        if d != 1 && d != -1 {
            return Err(Error::Precondition {
                check: "inverse_unimodular",
                reason: format!("determinant {d} is not +/-1"),
            });
        }
        let n = self.rows;
        let mut inv = vec![0i64; n * n];
        for i in 0..n {
            for j in 0..n {
                // cofactor C_ji for the (i,j) entry of the inverse
                let minor = minor_matrix(&self.entries, n, j, i);
                let sign = if (i + j) % 2 == 0 { 1i128 } else { -1i128 };
                let c = sign * det_rec(&minor, n - 1);
                inv[i * n + j] = (c / d) as i64;
            }
        }
        IntegerMatrix::new(n, n, inv)
    }

    pub fn matmul(&self, other: &IntegerMatrix) -> Result<IntegerMatrix> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch("matmul shape".into()));
        }
        let mut out = vec![0i64; self.rows * other.cols];
        for i in 0..self.rows {
            for j in 0..other.cols {
                let mut acc = 0i128;
                for k in 0..self.cols {
                    acc += self.get(i, k) as i128 * other.get(k, j) as i128;
                }
                out[i * other.cols + j] = acc as i64;
            }
        }
        IntegerMatrix::new(self.rows, other.cols, out)
    }

    /// Apply the induced homomorphism to a tuple `x` in `G^n`:
    /// component `i` is `sum_j a_ij x_j`.
    pub fn apply(&self, g: &GroupSpec, x: &[FiniteElem]) -> Result<Vec<FiniteElem>> {
        if x.len() != self.cols {
            return Err(Error::DimensionMismatch(format!(
                "matrix has {} columns, tuple has {} components",
                self.cols,
                x.len()
            )));
        }
        let mut out = Vec::with_capacity(self.rows);
        for i in 0..self.rows {
            let mut acc = g.zero()?;
            for (j, xj) in x.iter().enumerate() {
                let term = g.scalar_mul(self.get(i, j), xj)?;
                acc = g.add(&acc, &term)?;
            }
            out.push(acc);
        }
        Ok(out)
    }
}

fn minor_matrix(m: &[i64], n: usize, drop_row: usize, drop_col: usize) -> Vec<i128> {
    let mut out = Vec::with_capacity((n - 1) * (n - 1));
    for i in 0..n {
        if i == drop_row {
            continue;
        }
        for j in 0..n {
            if j == drop_col {
                continue;
            }
            out.push(m[i * n + j] as i128);
        }
    }
    out
}

fn det_rec(m: &[i128], n: usize) -> i128 {
    match n {
        0 => 1,
        1 => m[0],
        2 => m[0] * m[3] - m[1] * m[2],
        _ => {
            let mut acc = 0i128;
            for j in 0..n {
                if m[j] == 0 {
                    continue;
                }
                let mut minor = Vec::with_capacity((n - 1) * (n - 1));
                for i in 1..n {
                    for k in 0..n {
                        if k != j {
                            minor.push(m[i * n + k]);
                        }
                    }
                }
                let sign = if j % 2 == 0 { 1 } else { -1 };
                acc += sign * m[j] * det_rec(&minor, n - 1);
            }
            acc
        }
    }
}

/// A finite subset of a finite group's carrier.
pub type FiniteSet = BTreeSet<FiniteElem>;

pub fn sumset(a: &FiniteSet, b: &FiniteSet, g: &GroupSpec) -> Result<FiniteSet> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::EmptySet("sumset"));
    }
    let mut out = FiniteSet::new();
    for x in a {
        for y in b {
            out.insert(g.add(x, y)?);
        }
    }
    Ok(out)
}

pub fn difference_set(a: &FiniteSet, b: &FiniteSet, g: &GroupSpec) -> Result<FiniteSet> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::EmptySet("difference_set"));
    }
    let mut out = FiniteSet::new();
    for x in a {
        for y in b {
            out.insert(g.add(x, &g.neg(y)?)?);
        }
    }
    Ok(out)
}

/// Restricted sumset `{a+b : (a,b) in E}` for `E` a subset of `A x B`.
pub fn restricted_sumset(
    e: &BTreeSet<(FiniteElem, FiniteElem)>,
    g: &GroupSpec,
) -> Result<FiniteSet> {
    if e.is_empty() {
        return Err(Error::EmptySet("restricted_sumset"));
    }
    let mut out = FiniteSet::new();
    for (x, y) in e {
        out.insert(g.add(x, y)?);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(g: &GroupSpec, xs: &[u64]) -> FiniteSet {
        xs.iter().map(|&x| vec![x % g.moduli().unwrap()[0]]).collect()
    }

    #[test]
    fn add_examples() {
        let z4 = GroupSpec::cyclic(4);
        assert_eq!(z4.add(&[3], &[2]).unwrap(), vec![1]);
        let z2z3 = GroupSpec::product(&[2, 3]);
        assert_eq!(z2z3.add(&[1, 2], &[1, 2]).unwrap(), vec![0, 1]);
        let sum = circle_add(3.0 * std::f64::consts::FRAC_PI_2, std::f64::consts::PI);
        assert!(circle_eq(sum, std::f64::consts::FRAC_PI_2));
    }

    #[test]
    fn scalar_mul_examples() {
        let z5 = GroupSpec::cyclic(5);
        assert_eq!(z5.scalar_mul(3, &[2]).unwrap(), vec![1]);
        let z4 = GroupSpec::cyclic(4);
        assert_eq!(z4.scalar_mul(-1, &[3]).unwrap(), vec![1]);
        let z6 = GroupSpec::cyclic(6);
        assert_eq!(z6.scalar_mul(0, &[5]).unwrap(), vec![0]);
    }

    #[test]
    fn elem_outside_carrier_is_domain_error() {
        let z4 = GroupSpec::cyclic(4);
        assert!(matches!(z4.add(&[4], &[0]), Err(Error::DomainError(_))));
        assert!(matches!(z4.add(&[1, 1], &[0]), Err(Error::DomainError(_))));
    }

    #[test]
    fn apply_integer_matrix_examples() {
        let z5 = GroupSpec::cyclic(5);
        let a = IntegerMatrix::new(2, 2, vec![1, 0, 1, -1]).unwrap();
        // (y, z) -> (y, y - z)
        let out = a.apply(&z5, &[vec![3], vec![4]]).unwrap();
        assert_eq!(out, vec![vec![3], vec![4]]); // 3 - 4 = -1 = 4 mod 5

        let id = IntegerMatrix::identity(2);
        let x = vec![vec![2], vec![1]];
        assert_eq!(id.apply(&z5, &x).unwrap(), x);

        let z3 = GroupSpec::cyclic(3);
        let b = IntegerMatrix::new(2, 2, vec![2, 1, 1, 1]).unwrap();
        let out = b.apply(&z3, &[vec![1], vec![0]]).unwrap();
        assert_eq!(out, vec![vec![2], vec![1]]);
    }

    #[test]
    fn unimodular_examples() {
        let a = IntegerMatrix::new(2, 2, vec![1, 0, 1, -1]).unwrap();
        assert_eq!(a.det().unwrap(), -1);
        assert!(a.is_unimodular().unwrap());
        let b = IntegerMatrix::new(2, 2, vec![2, 0, 0, 1]).unwrap();
        assert!(!b.is_unimodular().unwrap());
        assert!(IntegerMatrix::identity(3).is_unimodular().unwrap());
    }

    #[test]
    fn unimodular_inverse_roundtrip() {
        let a = IntegerMatrix::new(2, 2, vec![2, 1, 1, 1]).unwrap();
        let inv = a.inverse_unimodular().unwrap();
        assert_eq!(a.matmul(&inv).unwrap(), IntegerMatrix::identity(2));
    }

    #[test]
    fn sumset_examples() {
        let z4 = GroupSpec::cyclic(4);
        let a = set(&z4, &[0, 1]);
        let s = sumset(&a, &a, &z4).unwrap();
        assert_eq!(s, set(&z4, &[0, 1, 2]));
        let d = difference_set(&a, &a, &z4).unwrap();
        assert_eq!(d, set(&z4, &[0, 1, 3]));
    }

    #[test]
    fn restricted_sumset_full_e_equals_sumset() {
        let z5 = GroupSpec::cyclic(5);
        let a = set(&z5, &[0, 1, 3]);
        let b = set(&z5, &[0, 2]);
        let e: BTreeSet<_> = a
            .iter()
            .flat_map(|x| b.iter().map(move |y| (x.clone(), y.clone())))
            .collect();
        assert_eq!(
            restricted_sumset(&e, &z5).unwrap(),
            sumset(&a, &b, &z5).unwrap()
        );
    }

    #[test]
    fn sumset_triangle_z5_example() {
        let z5 = GroupSpec::cyclic(5);
        let a = set(&z5, &[0, 1]);
        let b = set(&z5, &[0, 2]);
        let c = set(&z5, &[0, 1]);
        let lhs = difference_set(&a, &c, &z5).unwrap().len() * b.len();
        let rhs =
            difference_set(&a, &b, &z5).unwrap().len() * difference_set(&b, &c, &z5).unwrap().len();
        assert_eq!(lhs, 6);
        assert_eq!(rhs, 16);
        assert!(lhs <= rhs);
    }

    #[test]
    fn group_axioms_exhaustive_small() {
        for g in [
            GroupSpec::cyclic(5),
            GroupSpec::product(&[2, 3]),
            GroupSpec::product(&[4, 4, 4]),
        ] {
            let elems = g.elements().unwrap();
            assert!(elems.len() <= 64);
            let zero = g.zero().unwrap();
            for x in &elems {
                assert_eq!(g.add(x, &zero).unwrap(), *x);
                assert_eq!(g.add(x, &g.neg(x).unwrap()).unwrap(), zero);
                for y in &elems {
                    assert_eq!(g.add(x, y).unwrap(), g.add(y, x).unwrap());
                    for z in &elems {
                        let xy_z = g.add(&g.add(x, y).unwrap(), z).unwrap();
                        let x_yz = g.add(x, &g.add(y, z).unwrap()).unwrap();
                        assert_eq!(xy_z, x_yz);
                    }
                }
            }
        }
    }

    #[test]
    fn unimodular_matrix_is_bijection_on_g2() {
        use std::collections::HashSet;
        for m in [2u64, 3, 4] {
            let g = GroupSpec::cyclic(m);
            let a = IntegerMatrix::new(2, 2, vec![1, 2, 1, 1]).unwrap();
            assert!(a.is_unimodular().unwrap());
            let mut seen = HashSet::new();
            for x in g.elements().unwrap() {
                for y in g.elements().unwrap() {
                    let img = a.apply(&g, &[x.clone(), y.clone()]).unwrap();
                    seen.insert(img);
                }
            }
            assert_eq!(seen.len(), (m * m) as usize);
        }
    }

    #[test]
    fn index_roundtrip() {
        let g = GroupSpec::product(&[3, 4, 2]);
        for i in 0..g.order().unwrap() {
            let e = g.elem_at(i).unwrap();
            assert_eq!(g.index_of(&e).unwrap(), i);
        }
    }

    #[test]
    fn group_spec_serializes_with_kind_tag() {
        let g = GroupSpec::product(&[2, 3]);
        let j = serde_json::to_value(&g).unwrap();
        assert_eq!(j["kind"], "finite_product");
        assert_eq!(j["moduli"], serde_json::json!([2, 3]));
        let back: GroupSpec = serde_json::from_value(j).unwrap();
        assert_eq!(back, g);
    }
}
