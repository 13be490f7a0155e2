//! Symmetric positive-definite matrices for the determinant-inequality checks
//! and for Gaussian covariance bookkeeping.

use nalgebra::DMatrix;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A validated symmetric positive-definite matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PdMatrix {
    entries: Vec<Vec<f64>>,
}

impl PdMatrix {
    pub fn new(entries: Vec<Vec<f64>>) -> Result<Self> {
        let n = entries.len();
        if n == 0 || entries.iter().any(|r| r.len() != n) {
            return Err(Error::DimensionMismatch("matrix must be square".into()));
        }
        let scale = entries
            .iter()
            .flatten()
            .map(|x| x.abs())
            .fold(0.0f64, f64::max)
            .max(1.0);
        for i in 0..n {
            for j in 0..i {
                if (entries[i][j] - entries[j][i]).abs() > 1e-12 * scale {
                    return Err(Error::NotPositiveDefinite(format!(
                        "asymmetry at ({i}, {j})"
                    )));
                }
            }
        }
        let m = PdMatrix { entries };
        if m.as_dmatrix().cholesky().is_none() {
            return Err(Error::NotPositiveDefinite(
                "Cholesky factorization failed".into(),
            ));
        }
        Ok(m)
    }

    pub fn identity(n: usize) -> Self {
        PdMatrix {
            entries: (0..n)
                .map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
                .collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.entries.len()
    }

    pub fn entries(&self) -> &[Vec<f64>] {
        &self.entries
    }

    pub fn as_dmatrix(&self) -> DMatrix<f64> {
        let n = self.dim();
        DMatrix::from_fn(n, n, |i, j| self.entries[i][j])
    }

    /// Determinant via Cholesky (guaranteed positive).
    pub fn det(&self) -> f64 {
        self.as_dmatrix().cholesky().unwrap().determinant()
    }

    pub fn log_det(&self) -> f64 {
        // Sum of log-squared Cholesky diagonal; stabler than det().ln() in
        // high dimension.
        let chol = self.as_dmatrix().cholesky().unwrap();
        let l = chol.l();
        (0..self.dim()).map(|i| 2.0 * l[(i, i)].ln()).sum()
    }

    pub fn add(&self, other: &PdMatrix) -> Result<PdMatrix> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch("matrix dimensions differ".into()));
        }
        PdMatrix::new(
            self.entries
                .iter()
                .zip(&other.entries)
                .map(|(r1, r2)| r1.iter().zip(r2).map(|(a, b)| a + b).collect())
                .collect(),
        )
    }

    pub fn scale(&self, c: f64) -> Result<PdMatrix> {
        if c <= 0.0 {
            return Err(Error::NotPositiveDefinite(
                "scaling factor must be positive".into(),
            ));
        }
        PdMatrix::new(
            self.entries
                .iter()
                .map(|r| r.iter().map(|a| a * c).collect())
                .collect(),
        )
    }
}

/// Random SPD matrix: `A A^T / n + eps I` with standard-normal-ish entries,
/// so the spectrum is bounded away from zero.
pub fn random_pd<R: Rng>(n: usize, rng: &mut R) -> PdMatrix {
    let a = DMatrix::from_fn(n, n, |_, _| rng.gen_range(-1.0..1.0f64));
    let m = (&a * a.transpose()) / n as f64 + DMatrix::identity(n, n) * 0.05;
    PdMatrix::new(
        (0..n)
            .map(|i| (0..n).map(|j| m[(i, j)]).collect())
            .collect(),
    )
    .expect("construction is SPD")
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn rejects_asymmetric_and_indefinite() {
        assert!(PdMatrix::new(vec![vec![1.0, 2.0], vec![0.0, 1.0]]).is_err());
        assert!(PdMatrix::new(vec![vec![1.0, 2.0], vec![2.0, 1.0]]).is_err());
        assert!(PdMatrix::new(vec![vec![-1.0]]).is_err());
    }

    #[test]
    fn determinant_of_diagonal() {
        let m = PdMatrix::new(vec![vec![2.0, 0.0], vec![0.0, 3.0]]).unwrap();
        assert_abs_diff_eq!(m.det(), 6.0, epsilon = 1e-12);
        assert_abs_diff_eq!(m.log_det(), 6.0f64.ln(), epsilon = 1e-12);
    }

    #[test]
    fn random_matrices_are_valid_and_sum_stays_pd() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..50 {
            let n = rng.gen_range(1..6);
            let a = random_pd(n, &mut rng);
            let b = random_pd(n, &mut rng);
            let s = a.add(&b).unwrap();
            assert!(s.det() > 0.0);
        }
    }
}
