//! Distribution representations on each group kind: finite PMFs, grid
//! densities on `R^n`, parametric families, joint distributions with Markov
//! structure, circle densities, random generators (including log-concave
//! ensembles), and density file I/O.

use nalgebra::DMatrix;
use rand::Rng;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Exp, Gamma, LogNormal, Normal};

use crate::error::{Error, Result};
use crate::group::{FiniteElem, GroupSpec, IntegerMatrix, TAU};

pub const PMF_NORM_TOL: f64 = 1e-12;
pub const GRID_NORM_TOL: f64 = 1e-10;
/// Mass allowed in each truncated tail when discretizing a parametric family.
pub const TAIL_TRUNCATION: f64 = 1e-9;
/// Default hard cap on total grid cells produced by any operation.
pub const MAX_GRID_CELLS: usize = 1 << 22;

// ---------------------------------------------------------------------------
// FinitePMF
// ---------------------------------------------------------------------------

/// A probability mass function on a finite product of cyclic groups,
/// indexed in the group's mixed-radix element order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FinitePmf {
    pub group: GroupSpec,
    pub probs: Vec<f64>,
}

impl FinitePmf {
    pub fn new(group: GroupSpec, probs: Vec<f64>) -> Result<Self> {
        group.validate()?;
        let n = group.order()?;
        if probs.len() != n {
            return Err(Error::InvalidDensity(format!(
                "group has {n} elements but {} probabilities given",
                probs.len()
            )));
        }
        for (i, &p) in probs.iter().enumerate() {
            if p < 0.0 {
                return Err(Error::NegativeMass { index: i, mass: p });
            }
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > PMF_NORM_TOL {
            return Err(Error::Normalization(total));
        }
        Ok(FinitePmf { group, probs })
    }

    pub fn uniform(group: GroupSpec) -> Result<Self> {
        let n = group.order()?;
        FinitePmf::new(group, vec![1.0 / n as f64; n])
    }

    pub fn point_mass(group: GroupSpec, at: &[u64]) -> Result<Self> {
        let n = group.order()?;
        let mut probs = vec![0.0; n];
        probs[group.index_of(at)?] = 1.0;
        FinitePmf::new(group, probs)
    }

    pub fn prob(&self, x: &[u64]) -> Result<f64> {
        Ok(self.probs[self.group.index_of(x)?])
    }

    /// Law of `a*X` (pushforward under scalar multiplication).
    pub fn pushforward_scalar(&self, a: i64) -> Result<FinitePmf> {
        let mut out = vec![0.0; self.probs.len()];
        for (i, &p) in self.probs.iter().enumerate() {
            if p == 0.0 {
                continue;
            }
            let x = self.group.elem_at(i)?;
            let y = self.group.scalar_mul(a, &x)?;
            out[self.group.index_of(&y)?] += p;
        }
        FinitePmf::new(self.group.clone(), out)
    }

    /// Law of `-X`.
    pub fn reflect(&self) -> Result<FinitePmf> {
        self.pushforward_scalar(-1)
    }

    /// Law of `X + c`.
    pub fn shift(&self, c: &[u64]) -> Result<FinitePmf> {
        let mut out = vec![0.0; self.probs.len()];
        for (i, &p) in self.probs.iter().enumerate() {
            let x = self.group.elem_at(i)?;
            out[self.group.index_of(&self.group.add(&x, c)?)?] += p;
        }
        FinitePmf::new(self.group.clone(), out)
    }
}

// ---------------------------------------------------------------------------
// JointPMF
// ---------------------------------------------------------------------------

/// A joint distribution over a tuple of finite-group variables.
///
/// Axis `a` ranges over `groups[a]`'s carrier; the tensor is stored row-major
/// with axis 0 slowest.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JointPmf {
    pub groups: Vec<GroupSpec>,
    pub tensor: Vec<f64>,
}

impl JointPmf {
    pub fn new(groups: Vec<GroupSpec>, tensor: Vec<f64>) -> Result<Self> {
        let mut size = 1usize;
        for g in &groups {
            g.validate()?;
            size *= g.order()?;
        }
        if tensor.len() != size {
            return Err(Error::InvalidDensity(format!(
                "tensor has {} entries, carrier has {size}",
                tensor.len()
            )));
        }
        for (i, &p) in tensor.iter().enumerate() {
            if p < 0.0 {
                return Err(Error::NegativeMass { index: i, mass: p });
            }
        }
        let total: f64 = tensor.iter().sum();
        if (total - 1.0).abs() > PMF_NORM_TOL {
            return Err(Error::Normalization(total));
        }
        Ok(JointPmf { groups, tensor })
    }

    pub fn axis_sizes(&self) -> Vec<usize> {
        self.groups.iter().map(|g| g.order().unwrap()).collect()
    }

    pub fn num_axes(&self) -> usize {
        self.groups.len()
    }

    /// Product of independent marginals.
    pub fn product(pmfs: &[FinitePmf]) -> Result<JointPmf> {
        let groups: Vec<_> = pmfs.iter().map(|p| p.group.clone()).collect();
        let mut tensor = vec![1.0];
        for p in pmfs {
            let mut next = Vec::with_capacity(tensor.len() * p.probs.len());
            for &t in &tensor {
                for &q in &p.probs {
                    next.push(t * q);
                }
            }
            tensor = next;
        }
        JointPmf::new(groups, tensor)
    }

    fn strides(&self) -> Vec<usize> {
        let sizes = self.axis_sizes();
        let mut strides = vec![1usize; sizes.len()];
        for a in (0..sizes.len().saturating_sub(1)).rev() {
            strides[a] = strides[a + 1] * sizes[a + 1];
        }
        strides
    }

    fn unravel(&self, mut idx: usize) -> Vec<usize> {
        let sizes = self.axis_sizes();
        let mut out = vec![0usize; sizes.len()];
        for a in (0..sizes.len()).rev() {
            out[a] = idx % sizes[a];
            idx /= sizes[a];
        }
        out
    }

    /// Marginal over the given axes (in the given order).
    pub fn marginal(&self, axes: &[usize]) -> Result<JointPmf> {
        if axes.is_empty() {
            return Err(Error::EmptySet("marginal axes"));
        }
        for &a in axes {
            if a >= self.num_axes() {
                return Err(Error::DimensionMismatch(format!("axis {a} out of range")));
            }
        }
        let groups: Vec<_> = axes.iter().map(|&a| self.groups[a].clone()).collect();
        let sizes: Vec<usize> = groups.iter().map(|g| g.order().unwrap()).collect();
        let out_len: usize = sizes.iter().product();
        let mut out = vec![0.0; out_len];
        for (idx, &p) in self.tensor.iter().enumerate() {
            if p == 0.0 {
                continue;
            }
            let coords = self.unravel(idx);
            let mut oi = 0usize;
            for (&a, &s) in axes.iter().zip(&sizes) {
                oi = oi * s + coords[a];
            }
            out[oi] += p;
        }
        // Summation can accumulate rounding; renormalize within tolerance.
        JointPmf::new(groups, renormalize(out)?)
    }

    pub fn marginal_single(&self, axis: usize) -> Result<FinitePmf> {
        let m = self.marginal(&[axis])?;
        FinitePmf::new(m.groups[0].clone(), m.tensor)
    }

    /// Law of `sum_a c_a X_a` for integer coefficients; all axes must share a
    /// common group.
    pub fn law_of_combination(&self, coeffs: &[i64]) -> Result<FinitePmf> {
        if coeffs.len() != self.num_axes() {
            return Err(Error::DimensionMismatch("one coefficient per axis".into()));
        }
        let g = self.groups[0].clone();
        for other in &self.groups {
            if *other != g {
                return Err(Error::GroupMismatch(
                    "law_of_combination needs a common group on all axes".into(),
                ));
            }
        }
        let mut out = vec![0.0; g.order()?];
        for (idx, &p) in self.tensor.iter().enumerate() {
            if p == 0.0 {
                continue;
            }
            let coords = self.unravel(idx);
            let mut acc = g.zero()?;
            for (&c, &xi) in coeffs.iter().zip(&coords) {
                let x = g.elem_at(xi)?;
                acc = g.add(&acc, &g.scalar_mul(c, &x)?)?;
            }
            out[g.index_of(&acc)?] += p;
        }
        FinitePmf::new(g, renormalize(out)?)
    }

    /// Pushforward of a joint over `G^n` under the homomorphism induced by an
    /// integer matrix.
    pub fn pushforward_matrix(&self, a: &IntegerMatrix) -> Result<JointPmf> {
        let g = self.groups[0].clone();
        for other in &self.groups {
            if *other != g {
                return Err(Error::GroupMismatch(
                    "matrix pushforward needs a common group on all axes".into(),
                ));
            }
        }
        if a.cols != self.num_axes() || a.rows != self.num_axes() {
            return Err(Error::DimensionMismatch("matrix shape vs axes".into()));
        }
        let mut out = vec![0.0; self.tensor.len()];
        let strides = self.strides();
        for (idx, &p) in self.tensor.iter().enumerate() {
            if p == 0.0 {
                continue;
            }
            let coords = self.unravel(idx);
            let x: Vec<FiniteElem> = coords
                .iter()
                .map(|&c| g.elem_at(c))
                .collect::<Result<_>>()?;
            let y = a.apply(&g, &x)?;
            let mut oi = 0usize;
            for (yi, s) in y.iter().zip(&strides) {
                oi += g.index_of(yi)? * s;
            }
            out[oi] += p;
        }
        JointPmf::new(self.groups.clone(), out)
    }

    /// Build `(X1, Y, X2)` with `X1` and `X2` conditionally i.i.d. given `Y`,
    /// each with the conditional law of `X` given `Y` under `self = (X, Y)`.
    pub fn markov_triple(&self) -> Result<JointPmf> {
        if self.num_axes() != 2 {
            return Err(Error::DimensionMismatch("markov_triple needs a pair".into()));
        }
        let gx = self.groups[0].clone();
        let gy = self.groups[1].clone();
        let nx = gx.order()?;
        let ny = gy.order()?;
        let py = self.marginal_single(1)?;
        let mut tensor = vec![0.0; nx * ny * nx];
        for y in 0..ny {
            let pyv = py.probs[y];
            if pyv == 0.0 {
                continue;
            }
            for x1 in 0..nx {
                let c1 = self.tensor[x1 * ny + y] / pyv;
                if c1 == 0.0 {
                    continue;
                }
                for x2 in 0..nx {
                    let c2 = self.tensor[x2 * ny + y] / pyv;
                    tensor[(x1 * ny + y) * nx + x2] = c1 * pyv * c2;
                }
            }
        }
        JointPmf::new(vec![gx.clone(), gy, gx], renormalize(tensor)?)
    }

    /// Build the 4-chain `(X2, Y1, X1, Y2)` as
    /// `p(y1) p(x2|y1) p(x1|y1) p(y2|x1)`, whose pair marginals
    /// `(X2,Y1)`, `(X1,Y1)`, `(X1,Y2)` all equal `self = (X, Y)`.
    pub fn markov_chain4(&self) -> Result<JointPmf> {
        if self.num_axes() != 2 {
            return Err(Error::DimensionMismatch("markov_chain4 needs a pair".into()));
        }
        let gx = self.groups[0].clone();
        let gy = self.groups[1].clone();
        let nx = gx.order()?;
        let ny = gy.order()?;
        let px = self.marginal_single(0)?;
        let py = self.marginal_single(1)?;
        let mut tensor = vec![0.0; nx * ny * nx * ny];
        for y1 in 0..ny {
            let py1 = py.probs[y1];
            if py1 == 0.0 {
                continue;
            }
            for x2 in 0..nx {
                let cx2 = self.tensor[x2 * ny + y1] / py1;
                if cx2 == 0.0 {
                    continue;
                }
                for x1 in 0..nx {
                    let cx1 = self.tensor[x1 * ny + y1] / py1;
                    if cx1 == 0.0 {
                        continue;
                    }
                    let px1 = px.probs[x1];
                    for y2 in 0..ny {
                        let cy2 = if px1 > 0.0 {
                            self.tensor[x1 * ny + y2] / px1
                        } else {
                            0.0
                        };
                        tensor[((x2 * ny + y1) * nx + x1) * ny + y2] = py1 * cx2 * cx1 * cy2;
                    }
                }
            }
        }
        let out = JointPmf::new(vec![gx.clone(), gy.clone(), gx, gy], renormalize(tensor)?)?;
        // Pair-marginal verification.
        for (pair, name) in [([0usize, 1], "(X2,Y1)"), ([2, 1], "(X1,Y1)"), ([2, 3], "(X1,Y2)")] {
            let m = out.marginal(&pair)?;
            let max_dev = m
                .tensor
                .iter()
                .zip(&self.tensor)
                .map(|(a, b)| (a - b).abs())
                .fold(0.0f64, f64::max);
            if max_dev > 1e-12 {
                return Err(Error::InvalidDensity(format!(
                    "markov_chain4 pair marginal {name} deviates by {max_dev}"
                )));
            }
        }
        Ok(out)
    }
}

fn renormalize(mut v: Vec<f64>) -> Result<Vec<f64>> {
    let total: f64 = v.iter().sum();
    if (total - 1.0).abs() > 1e-9 {
        return Err(Error::Normalization(total));
    }
    for x in &mut v {
        *x /= total;
    }
    Ok(v)
}

// ---------------------------------------------------------------------------
// GridDensity
// ---------------------------------------------------------------------------

/// A piecewise-constant density on `R^n`: cell `i` carries mass `masses[i]`,
/// so the density there is `masses[i] / cell_volume`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridDensity {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
    pub cells: Vec<usize>,
    pub masses: Vec<f64>,
    /// Mass removed by tail truncation during discretization (metadata).
    #[serde(default)]
    pub truncated_mass: f64,
}

impl GridDensity {
    pub fn new(lo: Vec<f64>, hi: Vec<f64>, cells: Vec<usize>, masses: Vec<f64>) -> Result<Self> {
        if lo.len() != hi.len() || lo.len() != cells.len() || lo.is_empty() {
            return Err(Error::DimensionMismatch("grid box/cells shape".into()));
        }
        let total_cells: usize = cells.iter().product();
        if total_cells == 0 || total_cells != masses.len() {
            return Err(Error::InvalidDensity(format!(
                "expected {total_cells} masses, got {}",
                masses.len()
            )));
        }
        if total_cells > MAX_GRID_CELLS {
            return Err(Error::Resolution(format!(
                "{total_cells} cells exceeds cap {MAX_GRID_CELLS}; coarsen the inputs"
            )));
        }
        for (l, h) in lo.iter().zip(&hi) {
            if !(h > l) {
                return Err(Error::InvalidDensity("box must have hi > lo".into()));
            }
        }
        for (i, &m) in masses.iter().enumerate() {
            if m < 0.0 {
                return Err(Error::NegativeMass { index: i, mass: m });
            }
        }
        let total: f64 = masses.iter().sum();
        if (total - 1.0).abs() > GRID_NORM_TOL {
            return Err(Error::Normalization(total));
        }
        Ok(GridDensity {
            lo,
            hi,
            cells,
            masses,
            truncated_mass: 0.0,
        })
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn spacing(&self) -> Vec<f64> {
        self.lo
            .iter()
            .zip(&self.hi)
            .zip(&self.cells)
            .map(|((l, h), &c)| (h - l) / c as f64)
            .collect()
    }

    pub fn cell_volume(&self) -> f64 {
        self.spacing().iter().product()
    }

    /// 1-D cell midpoint.
    pub fn midpoint(&self, i: usize) -> f64 {
        debug_assert_eq!(self.dim(), 1);
        let dx = (self.hi[0] - self.lo[0]) / self.cells[0] as f64;
        self.lo[0] + (i as f64 + 0.5) * dx
    }

    /// Mean and variance from cell midpoints (1-D).
    pub fn mean_variance(&self) -> Result<(f64, f64)> {
        if self.dim() != 1 {
            return Err(Error::DimensionMismatch("mean_variance is 1-D only".into()));
        }
        let mean: f64 = self
            .masses
            .iter()
            .enumerate()
            .map(|(i, &m)| m * self.midpoint(i))
            .sum();
        let var: f64 = self
            .masses
            .iter()
            .enumerate()
            .map(|(i, &m)| m * (self.midpoint(i) - mean).powi(2))
            .sum();
        Ok((mean, var))
    }

    /// Expectation of `f(x)` over cell midpoints (1-D).
    pub fn expect_midpoint(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.masses
            .iter()
            .enumerate()
            .map(|(i, &m)| if m > 0.0 { m * f(self.midpoint(i)) } else { 0.0 })
            .sum()
    }

    /// Law of `c*X` for `c != 0`: the box scales, the cell masses are fixed.
    pub fn scale(&self, c: f64) -> Result<GridDensity> {
        if c == 0.0 {
            return Err(Error::InvalidDensity("scale factor must be nonzero".into()));
        }
        let (lo, hi): (Vec<f64>, Vec<f64>) = if c > 0.0 {
            (
                self.lo.iter().map(|l| l * c).collect(),
                self.hi.iter().map(|h| h * c).collect(),
            )
        } else {
            (
                self.hi.iter().map(|h| h * c).collect(),
                self.lo.iter().map(|l| l * c).collect(),
            )
        };
        let masses = if c > 0.0 {
            self.masses.clone()
        } else {
            let mut m = self.masses.clone();
            m.reverse();
            m
        };
        let mut g = GridDensity::new(lo, hi, self.cells.clone(), masses)?;
        g.truncated_mass = self.truncated_mass;
        Ok(g)
    }

    /// Law of `-X`.
    pub fn reflect(&self) -> Result<GridDensity> {
        self.scale(-1.0)
    }

    /// Split every cell into `k` equal parts (exact for piecewise-constant
    /// densities); used to match spacings before convolution.
    pub fn refine(&self, k: usize) -> Result<GridDensity> {
        if self.dim() != 1 {
            return Err(Error::DimensionMismatch("refine is 1-D only".into()));
        }
        if k == 0 {
            return Err(Error::Resolution("refine factor must be >= 1".into()));
        }
        let mut masses = Vec::with_capacity(self.masses.len() * k);
        for &m in &self.masses {
            for _ in 0..k {
                masses.push(m / k as f64);
            }
        }
        let mut g = GridDensity::new(
            self.lo.clone(),
            self.hi.clone(),
            vec![self.cells[0] * k],
            masses,
        )?;
        g.truncated_mass = self.truncated_mass;
        Ok(g)
    }

    pub fn is_point_mass(&self) -> bool {
        self.masses.iter().filter(|&&m| m > 0.0).count() <= 1
    }
}

/// Discrete log-concavity: the positive masses form one contiguous block and
/// the second differences of their logs are `<= tol`.
pub fn is_discrete_logconcave(masses: &[f64], tol: f64) -> bool {
    let first = masses.iter().position(|&m| m > 0.0);
    let last = masses.iter().rposition(|&m| m > 0.0);
    let (first, last) = match (first, last) {
        (Some(f), Some(l)) => (f, l),
        _ => return false,
    };
    if masses[first..=last].iter().any(|&m| m <= 0.0) {
        return false;
    }
    let logs: Vec<f64> = masses[first..=last].iter().map(|&m| m.ln()).collect();
    logs.windows(3)
        .all(|w| w[2] - 2.0 * w[1] + w[0] <= tol)
}

// ---------------------------------------------------------------------------
// ParametricDensity
// ---------------------------------------------------------------------------

/// Closed-form densities on `R^n` (or `(0, infinity)` for the log-normal).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum ParametricDensity {
    Gaussian { mean: Vec<f64>, cov: Vec<Vec<f64>> },
    Exponential { rate: f64 },
    Uniform { lo: Vec<f64>, hi: Vec<f64> },
    Laplace { location: f64, scale: f64 },
    LogNormal { mu: f64, sigma: f64 },
}

impl ParametricDensity {
    pub fn std_gaussian(dim: usize) -> Self {
        ParametricDensity::Gaussian {
            mean: vec![0.0; dim],
            cov: (0..dim)
                .map(|i| (0..dim).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
                .collect(),
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            ParametricDensity::Gaussian { mean, .. } => mean.len(),
            ParametricDensity::Uniform { lo, .. } => lo.len(),
            _ => 1,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            ParametricDensity::Gaussian { mean, cov } => {
                let n = mean.len();
                if cov.len() != n || cov.iter().any(|row| row.len() != n) {
                    return Err(Error::DimensionMismatch("covariance shape".into()));
                }
                let m = DMatrix::from_fn(n, n, |i, j| cov[i][j]);
                for i in 0..n {
                    for j in 0..n {
                        if (m[(i, j)] - m[(j, i)]).abs() > 1e-12 {
                            return Err(Error::NotPositiveDefinite("asymmetric covariance".into()));
                        }
                    }
                }
                if m.cholesky().is_none() {
                    return Err(Error::NotPositiveDefinite("Cholesky failed".into()));
                }
                Ok(())
            }
            ParametricDensity::Exponential { rate } => {
                if *rate > 0.0 {
                    Ok(())
                } else {
                    Err(Error::InvalidDensity("rate must be positive".into()))
                }
            }
            ParametricDensity::Uniform { lo, hi } => {
                if lo.len() == hi.len() && !lo.is_empty() && lo.iter().zip(hi).all(|(l, h)| h > l) {
                    Ok(())
                } else {
                    Err(Error::InvalidDensity("uniform box must have hi > lo".into()))
                }
            }
            ParametricDensity::Laplace { scale, .. } => {
                if *scale > 0.0 {
                    Ok(())
                } else {
                    Err(Error::InvalidDensity("scale must be positive".into()))
                }
            }
            ParametricDensity::LogNormal { sigma, .. } => {
                if *sigma > 0.0 {
                    Ok(())
                } else {
                    Err(Error::InvalidDensity("sigma must be positive".into()))
                }
            }
        }
    }

    /// CDF for the 1-D families.
    pub fn cdf(&self, x: f64) -> Result<f64> {
        match self {
            ParametricDensity::Gaussian { mean, cov } => {
                if mean.len() != 1 {
                    return Err(Error::DimensionMismatch("cdf is 1-D only".into()));
                }
                let n = Normal::new(mean[0], cov[0][0].sqrt()).unwrap();
                Ok(n.cdf(x))
            }
            ParametricDensity::Exponential { rate } => Ok(Exp::new(*rate).unwrap().cdf(x)),
            ParametricDensity::Uniform { lo, hi } => {
                if lo.len() != 1 {
                    return Err(Error::DimensionMismatch("cdf is 1-D only".into()));
                }
                Ok(((x - lo[0]) / (hi[0] - lo[0])).clamp(0.0, 1.0))
            }
            ParametricDensity::Laplace { location, scale } => {
                let z = (x - location) / scale;
                Ok(if z < 0.0 {
                    0.5 * z.exp()
                } else {
                    1.0 - 0.5 * (-z).exp()
                })
            }
            ParametricDensity::LogNormal { mu, sigma } => {
                Ok(LogNormal::new(*mu, *sigma).unwrap().cdf(x))
            }
        }
    }

    /// Quantile for the 1-D families.
    pub fn quantile(&self, p: f64) -> Result<f64> {
        match self {
            ParametricDensity::Gaussian { mean, cov } => {
                if mean.len() != 1 {
                    return Err(Error::DimensionMismatch("quantile is 1-D only".into()));
                }
                let n = Normal::new(mean[0], cov[0][0].sqrt()).unwrap();
                Ok(n.inverse_cdf(p))
            }
            ParametricDensity::Exponential { rate } => {
                Ok(Exp::new(*rate).unwrap().inverse_cdf(p))
            }
            ParametricDensity::Uniform { lo, hi } => {
                if lo.len() != 1 {
                    return Err(Error::DimensionMismatch("quantile is 1-D only".into()));
                }
                Ok(lo[0] + p * (hi[0] - lo[0]))
            }
            ParametricDensity::Laplace { location, scale } => Ok(if p < 0.5 {
                location + scale * (2.0 * p).ln()
            } else {
                location - scale * (2.0 * (1.0 - p)).ln()
            }),
            ParametricDensity::LogNormal { mu, sigma } => {
                Ok(LogNormal::new(*mu, *sigma).unwrap().inverse_cdf(p))
            }
        }
    }

    /// Discretize a 1-D family onto a grid via CDF differences, truncating at
    /// most `TAIL_TRUNCATION` mass in each tail and renormalizing; the removed
    /// mass is recorded on the result.
    pub fn to_grid(&self, cells: usize) -> Result<GridDensity> {
        self.validate()?;
        if self.dim() != 1 {
            return Err(Error::DimensionMismatch(
                "grid discretization is 1-D only".into(),
            ));
        }
        let (lo, hi) = match self {
            ParametricDensity::Uniform { lo, hi } => (lo[0], hi[0]),
            _ => (self.quantile(TAIL_TRUNCATION)?, self.quantile(1.0 - TAIL_TRUNCATION)?),
        };
        self.to_grid_on(lo, hi, cells)
    }

    /// Discretize on an explicit box.
    pub fn to_grid_on(&self, lo: f64, hi: f64, cells: usize) -> Result<GridDensity> {
        if cells == 0 {
            return Err(Error::Resolution("need at least one cell".into()));
        }
        let dx = (hi - lo) / cells as f64;
        let mut masses = Vec::with_capacity(cells);
        let mut prev = self.cdf(lo)?;
        for i in 1..=cells {
            let next = self.cdf(lo + i as f64 * dx)?;
            masses.push((next - prev).max(0.0));
            prev = next;
        }
        let captured: f64 = masses.iter().sum();
        let truncated = 1.0 - captured;
        if truncated > 1e-6 {
            return Err(Error::Resolution(format!(
                "box [{lo}, {hi}] truncates {truncated:.3e} mass"
            )));
        }
        for m in &mut masses {
            *m /= captured;
        }
        let mut g = GridDensity::new(vec![lo], vec![hi], vec![cells], masses)?;
        g.truncated_mass = truncated.max(0.0);
        Ok(g)
    }
}

/// Discretize the law of `log X` for a density on `(0, infinity)` via
/// `F_{log X}(t) = F_X(e^t)`.
pub fn discretize_log_transform(d: &ParametricDensity, cells: usize) -> Result<GridDensity> {
    let lo = d.quantile(TAIL_TRUNCATION)?;
    let hi = d.quantile(1.0 - TAIL_TRUNCATION)?;
    if lo <= 0.0 {
        return Err(Error::InvalidDensity(
            "support touches 0; log-transform undefined".into(),
        ));
    }
    let (llo, lhi) = (lo.ln(), hi.ln());
    let dx = (lhi - llo) / cells as f64;
    let mut masses = Vec::with_capacity(cells);
    let mut prev = d.cdf(llo.exp())?;
    for i in 1..=cells {
        let next = d.cdf((llo + i as f64 * dx).exp())?;
        masses.push((next - prev).max(0.0));
        prev = next;
    }
    let captured: f64 = masses.iter().sum();
    for m in &mut masses {
        *m /= captured;
    }
    let mut g = GridDensity::new(vec![llo], vec![lhi], vec![cells], masses)?;
    g.truncated_mass = (1.0 - captured).max(0.0);
    Ok(g)
}

// ---------------------------------------------------------------------------
// Circle densities
// ---------------------------------------------------------------------------

/// A piecewise-constant density on the circle, relative to the uniform
/// probability measure: `masses[i]` is the probability of the `i`-th of
/// `cells` equal arcs of `[0, 2*pi)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CirclePmf {
    pub masses: Vec<f64>,
}

impl CirclePmf {
    pub fn new(masses: Vec<f64>) -> Result<Self> {
        for (i, &m) in masses.iter().enumerate() {
            if m < 0.0 {
                return Err(Error::NegativeMass { index: i, mass: m });
            }
        }
        let total: f64 = masses.iter().sum();
        if (total - 1.0).abs() > GRID_NORM_TOL {
            return Err(Error::Normalization(total));
        }
        Ok(CirclePmf { masses })
    }

    pub fn uniform(cells: usize) -> Self {
        CirclePmf {
            masses: vec![1.0 / cells as f64; cells],
        }
    }

    /// Wrapped Gaussian with standard deviation `sigma` (radians), centered at
    /// `mean`, discretized onto `cells` arcs.
    pub fn wrapped_gaussian(mean: f64, sigma: f64, cells: usize) -> Result<Self> {
        let n = Normal::new(0.0, sigma).unwrap();
        let dx = TAU / cells as f64;
        let mut masses = vec![0.0; cells];
        // Sum enough branches of the wrap for the tails to be negligible.
        let wraps = ((8.0 * sigma / TAU).ceil() as i64).max(1) + 1;
        for (i, slot) in masses.iter_mut().enumerate() {
            let a = i as f64 * dx - mean;
            for k in -wraps..=wraps {
                let lo = a + k as f64 * TAU;
                *slot += n.cdf(lo + dx) - n.cdf(lo);
            }
        }
        let total: f64 = masses.iter().sum();
        for m in &mut masses {
            *m /= total;
        }
        CirclePmf::new(masses)
    }

    pub fn reflect(&self) -> CirclePmf {
        let n = self.masses.len();
        let mut out = vec![0.0; n];
        for (i, &m) in self.masses.iter().enumerate() {
            out[(n - i) % n] = m;
        }
        CirclePmf { masses: out }
    }
}

/// A distribution on the nonzero complex numbers with independent modulus and
/// argument, stored through the log-isomorphism `z -> (log|z|, arg z)`.
///
/// Under this map multiplication of independent complex variables becomes
/// convolution on `R x (R / 2*pi*Z)` componentwise.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComplexDensity {
    pub log_modulus: GridDensity,
    pub angle: CirclePmf,
}

impl ComplexDensity {
    pub fn new(log_modulus: GridDensity, angle: CirclePmf) -> Result<Self> {
        if log_modulus.dim() != 1 {
            return Err(Error::DimensionMismatch("log-modulus must be 1-D".into()));
        }
        Ok(ComplexDensity { log_modulus, angle })
    }

    /// Law of `1/Z` (negate the log-modulus, reflect the angle).
    pub fn invert(&self) -> Result<ComplexDensity> {
        ComplexDensity::new(self.log_modulus.reflect()?, self.angle.reflect())
    }
}

// ---------------------------------------------------------------------------
// Random generators
// ---------------------------------------------------------------------------

/// Dirichlet(concentration) draw over the group carrier.
pub fn random_pmf<R: Rng>(g: &GroupSpec, concentration: f64, rng: &mut R) -> Result<FinitePmf> {
    let n = g.order()?;
    let gamma = Gamma::new(concentration, 1.0)
        .map_err(|e| Error::InvalidDensity(format!("bad concentration: {e}")))?;
    let mut probs: Vec<f64> = (0..n)
        .map(|_| rand::distributions::Distribution::sample(&gamma, rng))
        .collect();
    let mut total: f64 = probs.iter().sum();
    if total <= 0.0 {
        // Degenerate draw (all zeros can occur for tiny concentration).
        probs[rng.gen_range(0..n)] = 1.0;
        total = 1.0;
    }
    for p in &mut probs {
        *p /= total;
    }
    FinitePmf::new(g.clone(), probs)
}

/// Random joint over `G_x x G_y` (Dirichlet over the product carrier).
pub fn random_joint<R: Rng>(
    gx: &GroupSpec,
    gy: &GroupSpec,
    concentration: f64,
    rng: &mut R,
) -> Result<JointPmf> {
    let product = GroupSpec::FiniteProduct {
        moduli: [gx.moduli()?, gy.moduli()?].concat(),
    };
    let p = random_pmf(&product, concentration, rng)?;
    JointPmf::new(vec![gx.clone(), gy.clone()], p.probs)
}

/// Random concave log-mass sequence on `Z_m` viewed as an interval: draw
/// random first differences, sort them decreasing, integrate, exponentiate.
pub fn random_logconcave_masses<R: Rng>(m: usize, rng: &mut R) -> Vec<f64> {
    assert!(m >= 3);
    let mut diffs: Vec<f64> = (0..m - 1).map(|_| rng.gen_range(-1.5..1.5)).collect();
    diffs.sort_by(|a, b| b.partial_cmp(a).unwrap());
    let mut logs = vec![0.0f64];
    for d in diffs {
        logs.push(logs.last().unwrap() + d);
    }
    let max = logs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let mut masses: Vec<f64> = logs.iter().map(|l| (l - max).exp()).collect();
    let total: f64 = masses.iter().sum();
    for v in &mut masses {
        *v /= total;
    }
    masses
}

pub fn random_logconcave_pmf<R: Rng>(m: usize, rng: &mut R) -> Result<FinitePmf> {
    FinitePmf::new(GroupSpec::cyclic(m as u64), random_logconcave_masses(m, rng))
}

/// Random 1-D log-concave grid density on `[0, 1)`.
pub fn random_logconcave_grid<R: Rng>(cells: usize, rng: &mut R) -> Result<GridDensity> {
    GridDensity::new(
        vec![0.0],
        vec![1.0],
        vec![cells],
        random_logconcave_masses(cells, rng),
    )
}

// ---------------------------------------------------------------------------
// File I/O
// ---------------------------------------------------------------------------

/// On-disk density schema, version 1.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum DensityFile {
    Finite {
        version: u32,
        group: GroupSpec,
        probs: Vec<f64>,
    },
    Grid {
        version: u32,
        lo: Vec<f64>,
        hi: Vec<f64>,
        cells: Vec<usize>,
        masses: Vec<f64>,
    },
    Parametric {
        version: u32,
        params: ParametricDensity,
    },
}

/// Any of the three distribution representations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "repr", rename_all = "snake_case")]
pub enum Density {
    Finite(FinitePmf),
    Grid(GridDensity),
    Parametric(ParametricDensity),
}

pub fn write_density(path: &std::path::Path, d: &Density) -> Result<()> {
    let file = match d {
        Density::Finite(p) => DensityFile::Finite {
            version: 1,
            group: p.group.clone(),
            probs: p.probs.clone(),
        },
        Density::Grid(g) => DensityFile::Grid {
            version: 1,
            lo: g.lo.clone(),
            hi: g.hi.clone(),
            cells: g.cells.clone(),
            masses: g.masses.clone(),
        },
        Density::Parametric(p) => DensityFile::Parametric {
            version: 1,
            params: p.clone(),
        },
    };
    std::fs::write(path, serde_json::to_string_pretty(&file)?)?;
    Ok(())
}

pub fn read_density(path: &std::path::Path) -> Result<Density> {
    let text = std::fs::read_to_string(path)?;
    let file: DensityFile = serde_json::from_str(&text).map_err(|e| Error::MalformedFile {
        path: path.display().to_string(),
        reason: e.to_string(),
    })?;
    let wrap = |e: Error| Error::MalformedFile {
        path: path.display().to_string(),
        reason: e.to_string(),
    };
    match file {
        DensityFile::Finite { group, probs, .. } => Ok(Density::Finite(
            FinitePmf::new(group, probs).map_err(wrap)?,
        )),
        DensityFile::Grid {
            lo,
            hi,
            cells,
            masses,
            ..
        } => Ok(Density::Grid(
            GridDensity::new(lo, hi, cells, masses).map_err(wrap)?,
        )),
        DensityFile::Parametric { params, .. } => {
            params.validate().map_err(wrap)?;
            Ok(Density::Parametric(params))
        }
    }
}

/// CSV export of masses for plotting: `index,coordinate,mass`.
pub fn write_masses_csv(path: &std::path::Path, d: &Density) -> Result<()> {
    let mut out = String::from("index,coordinate,mass\n");
    match d {
        Density::Finite(p) => {
            for (i, &m) in p.probs.iter().enumerate() {
                out.push_str(&format!("{i},{i},{m}\n"));
            }
        }
        Density::Grid(g) => {
            if g.dim() == 1 {
                for (i, &m) in g.masses.iter().enumerate() {
                    out.push_str(&format!("{i},{},{m}\n", g.midpoint(i)));
                }
            } else {
                for (i, &m) in g.masses.iter().enumerate() {
                    out.push_str(&format!("{i},{i},{m}\n"));
                }
            }
        }
        Density::Parametric(p) => {
            let g = p.to_grid(512)?;
            for (i, &m) in g.masses.iter().enumerate() {
                out.push_str(&format!("{i},{},{m}\n", g.midpoint(i)));
            }
        }
    }
    std::fs::write(path, out)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn pmf_rejects_bad_mass() {
        let g = GroupSpec::cyclic(2);
        assert!(matches!(
            FinitePmf::new(g.clone(), vec![0.5, 0.4]),
            Err(Error::Normalization(_))
        ));
        assert!(matches!(
            FinitePmf::new(g, vec![1.2, -0.2]),
            Err(Error::NegativeMass { .. })
        ));
    }

    #[test]
    fn marginal_of_product_is_factor() {
        let g = GroupSpec::cyclic(3);
        let p = FinitePmf::new(g.clone(), vec![0.5, 0.3, 0.2]).unwrap();
        let q = FinitePmf::uniform(g).unwrap();
        let j = JointPmf::product(&[p.clone(), q]).unwrap();
        let m = j.marginal_single(0).unwrap();
        for (a, b) in m.probs.iter().zip(&p.probs) {
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn marginal_diagonal_example() {
        let g = GroupSpec::cyclic(2);
        let j = JointPmf::new(vec![g.clone(), g], vec![0.5, 0.0, 0.0, 0.5]).unwrap();
        let m = j.marginal_single(0).unwrap();
        assert_eq!(m.probs, vec![0.5, 0.5]);
    }

    #[test]
    fn markov_triple_product_case() {
        let g = GroupSpec::cyclic(2);
        let p = FinitePmf::new(g.clone(), vec![0.7, 0.3]).unwrap();
        let q = FinitePmf::new(g.clone(), vec![0.4, 0.6]).unwrap();
        let j = JointPmf::product(&[p.clone(), q.clone()]).unwrap();
        let t = j.markov_triple().unwrap();
        let expected = JointPmf::product(&[p.clone(), q, p]).unwrap();
        for (a, b) in t.tensor.iter().zip(&expected.tensor) {
            assert!((a - b).abs() < 1e-14);
        }
    }

    #[test]
    fn markov_triple_deterministic_case() {
        let g = GroupSpec::cyclic(2);
        // X = Y uniform
        let j = JointPmf::new(vec![g.clone(), g], vec![0.5, 0.0, 0.0, 0.5]).unwrap();
        let t = j.markov_triple().unwrap();
        // Supported on the diagonal x1 = y = x2.
        for (idx, &p) in t.tensor.iter().enumerate() {
            let c = t.unravel(idx);
            if c[0] == c[1] && c[1] == c[2] {
                assert!((p - 0.5).abs() < 1e-14);
            } else {
                assert_eq!(p, 0.0);
            }
        }
    }

    #[test]
    fn markov_triple_conditional_arithmetic() {
        let g = GroupSpec::cyclic(2);
        let j = JointPmf::new(vec![g.clone(), g], vec![0.4, 0.1, 0.1, 0.4]).unwrap();
        let t = j.markov_triple().unwrap();
        // p(x1|y) p(y) p(x2|y) with p(y)=0.5, p(x|y)=0.8/0.2
        let expect = |x1: usize, y: usize, x2: usize| {
            let c1 = if x1 == y { 0.8 } else { 0.2 };
            let c2 = if x2 == y { 0.8 } else { 0.2 };
            c1 * 0.5 * c2
        };
        for x1 in 0..2 {
            for y in 0..2 {
                for x2 in 0..2 {
                    let idx = (x1 * 2 + y) * 2 + x2;
                    assert!((t.tensor[idx] - expect(x1, y, x2)).abs() < 1e-14);
                }
            }
        }
    }

    #[test]
    fn markov_chain4_pair_marginals() {
        let g = GroupSpec::cyclic(2);
        let j = JointPmf::new(vec![g.clone(), g], vec![0.4, 0.1, 0.1, 0.4]).unwrap();
        let c = j.markov_chain4().unwrap();
        let m = c.marginal(&[2, 3]).unwrap();
        for (a, b) in m.tensor.iter().zip(&j.tensor) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn markov_chain4_perfectly_correlated() {
        let g = GroupSpec::cyclic(2);
        let j = JointPmf::new(vec![g.clone(), g], vec![0.5, 0.0, 0.0, 0.5]).unwrap();
        let c = j.markov_chain4().unwrap();
        for (idx, &p) in c.tensor.iter().enumerate() {
            let coords = c.unravel(idx);
            if coords.windows(2).all(|w| w[0] == w[1]) {
                assert!((p - 0.5).abs() < 1e-14);
            } else {
                assert_eq!(p, 0.0);
            }
        }
    }

    #[test]
    fn logconcave_generator_passes_validator() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..500 {
            let m = rng.gen_range(3..40);
            let masses = random_logconcave_masses(m, &mut rng);
            assert!(is_discrete_logconcave(&masses, 1e-9));
        }
    }

    #[test]
    fn discretized_gaussian_masses_are_logconcave() {
        let masses: Vec<f64> = (-10..=10).map(|k| (-(k * k) as f64 / 2.0).exp()).collect();
        let total: f64 = masses.iter().sum();
        let masses: Vec<f64> = masses.iter().map(|m| m / total).collect();
        assert!(is_discrete_logconcave(&masses, 1e-9));
        // A point mass is vacuously log-concave.
        assert!(is_discrete_logconcave(&[0.0, 1.0, 0.0], 1e-9));
    }

    #[test]
    fn density_file_roundtrip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("p.json");
        let g = GroupSpec::cyclic(4);
        let p = FinitePmf::new(g, vec![0.1, 0.2, 0.3, 0.4]).unwrap();
        write_density(&path, &Density::Finite(p.clone())).unwrap();
        match read_density(&path).unwrap() {
            Density::Finite(q) => assert_eq!(q.probs, p.probs),
            _ => panic!("wrong variant"),
        }
    }

    #[test]
    fn density_file_rejects_bad_normalization() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.json");
        std::fs::write(
            &path,
            r#"{"type":"finite","version":1,"group":{"kind":"finite_product","moduli":[2]},"probs":[0.5,0.4]}"#,
        )
        .unwrap();
        assert!(matches!(
            read_density(&path),
            Err(Error::MalformedFile { .. })
        ));
        std::fs::write(
            &path,
            r#"{"type":"finite","version":1,"group":{"kind":"finite_product","moduli":[2]},"probs":[1.2,-0.2]}"#,
        )
        .unwrap();
        assert!(matches!(
            read_density(&path),
            Err(Error::MalformedFile { .. })
        ));
    }

    #[test]
    fn grid_scale_and_refine() {
        let g = GridDensity::new(vec![0.0], vec![1.0], vec![4], vec![0.25; 4]).unwrap();
        let s = g.scale(2.0).unwrap();
        assert_eq!(s.hi[0], 2.0);
        let r = g.refine(3).unwrap();
        assert_eq!(r.cells[0], 12);
        let total: f64 = r.masses.iter().sum();
        assert!((total - 1.0).abs() < 1e-12);
    }

    #[test]
    fn parametric_to_grid_captures_mass() {
        let g = ParametricDensity::Exponential { rate: 1.0 }.to_grid(1024).unwrap();
        assert!(g.truncated_mass <= 2.5e-9);
        let total: f64 = g.masses.iter().sum();
        assert!((total - 1.0).abs() < 1e-12);
    }

    #[test]
    fn gaussian_validation_requires_spd() {
        let bad = ParametricDensity::Gaussian {
            mean: vec![0.0, 0.0],
            cov: vec![vec![1.0, 2.0], vec![2.0, 1.0]],
        };
        assert!(bad.validate().is_err());
    }
}
