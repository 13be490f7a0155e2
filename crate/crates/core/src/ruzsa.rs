//! Ruzsa divergence, its conditional version, the Ruzsa difference for
//! dependent pairs, and the doubling and difference constants.
//!
//! For independent copies `X'`, `Y'` of `X`, `Y`:
//!   `d_R(X || Y) = h(X' - Y') - h(X') = I(X' - Y'; Y') >= 0`.
//! The difference and doubling constants of `X` on `R^n` are
//!   `sigma_minus = N(X - X') / 2 N(X) = exp(2 d_R(X || X) / n) / 2`,
//!   `sigma_plus  = N(X + X') / 2 N(X) = exp(2 d_R(X || -X) / n) / 2`,
//! both at least 1 with equality exactly for Gaussians.

use crate::convolve::{convolve_grid, difference_finite, difference_grid};
use crate::density::{CirclePmf, ComplexDensity, FinitePmf, GridDensity, JointPmf, ParametricDensity};
use crate::entropy::{
    circle_entropy, complex_multiplicative_entropy, conditional_entropy, exp_sum_entropy,
    finite_entropy, grid_entropy, joint_entropy, mutual_information, parametric_entropy,
};
use crate::error::{Error, Result};
use crate::group::IntegerMatrix;

/// `d_R(X || Y)` for independent variables on a common finite group.
pub fn ruzsa_divergence_finite(px: &FinitePmf, py: &FinitePmf) -> Result<f64> {
    let diff = difference_finite(px, py)?;
    Ok(finite_entropy(&diff) - finite_entropy(px))
}

/// Same quantity through the information identity `I(X - Y; Y)`; used as a
/// consistency oracle for the convolution path.
pub fn ruzsa_divergence_finite_mi(px: &FinitePmf, py: &FinitePmf) -> Result<f64> {
    let j = JointPmf::product(&[px.clone(), py.clone()])?;
    // (X, Y) -> (X - Y, Y)
    let a = IntegerMatrix::new(2, 2, vec![1, -1, 0, 1])?;
    let t = j.pushforward_matrix(&a)?;
    mutual_information(&t, &[0], &[1])
}

/// `d_R(X1 || X2 | Y) = h(X1 - X2 | Y) - h(X1 | Y)` for a triple
/// `(X1, Y, X2)` with `X1` and `X2` conditionally independent given `Y`.
pub fn conditional_ruzsa_divergence(triple: &JointPmf) -> Result<f64> {
    if triple.num_axes() != 3 {
        return Err(Error::DimensionMismatch(
            "conditional divergence needs a (X1, Y, X2) triple".into(),
        ));
    }
    let dy = difference_given(triple)?;
    let h_d_given_y = conditional_entropy(&dy, &[0], &[1])?;
    let h_x1_given_y = conditional_entropy(triple, &[0], &[1])?;
    Ok(h_d_given_y - h_x1_given_y)
}

/// Joint law of `(X1 - X2, Y)` from a `(X1, Y, X2)` triple.
fn difference_given(triple: &JointPmf) -> Result<JointPmf> {
    let gx = triple.groups[0].clone();
    if triple.groups[2] != gx {
        return Err(Error::GroupMismatch("X1 and X2 must share a group".into()));
    }
    let gy = triple.groups[1].clone();
    let nx = gx.order()?;
    let ny = gy.order()?;
    let mut tensor = vec![0.0; nx * ny];
    for x1 in 0..nx {
        for y in 0..ny {
            for x2 in 0..nx {
                let p = triple.tensor[(x1 * ny + y) * nx + x2];
                if p == 0.0 {
                    continue;
                }
                let d = gx.add(&gx.elem_at(x1)?, &gx.neg(&gx.elem_at(x2)?)?)?;
                tensor[gx.index_of(&d)? * ny + y] += p;
            }
        }
    }
    JointPmf::new(vec![gx, gy], tensor)
}

/// Ruzsa difference `d~_R(X || Y) = h(X - Y) - h(X)` for a *dependent* pair
/// `(X, Y)` on a common group; can be negative.
pub fn ruzsa_difference(pair: &JointPmf) -> Result<f64> {
    if pair.num_axes() != 2 {
        return Err(Error::DimensionMismatch("ruzsa_difference needs a pair".into()));
    }
    let diff = pair.law_of_combination(&[1, -1])?;
    let h_x = joint_entropy(&pair.marginal(&[0])?);
    Ok(finite_entropy(&diff) - h_x)
}

/// `d_R(X || Y)` for independent 1-D grid variables.
pub fn ruzsa_divergence_grid(fx: &GridDensity, fy: &GridDensity) -> Result<f64> {
    let diff = difference_grid(fx, fy)?;
    Ok(grid_entropy(&diff) - grid_entropy(fx))
}

/// `d_R(Theta || Phi)` on the circle (the Haar normalization cancels).
pub fn ruzsa_divergence_circle(p: &CirclePmf, q: &CirclePmf) -> Result<f64> {
    let diff = crate::convolve::difference_circle(p, q)?;
    Ok(circle_entropy(&diff) - circle_entropy(p))
}

/// Multiplicative `d_R(Z || W) = h_mult(Z / W') - h_mult(Z)` on the nonzero
/// complex numbers.
pub fn ruzsa_divergence_complex(z: &ComplexDensity, w: &ComplexDensity) -> Result<f64> {
    let ratio = crate::convolve::divide_complex(z, w)?;
    Ok(complex_multiplicative_entropy(&ratio)? - complex_multiplicative_entropy(z)?)
}

/// Difference constant `sigma_minus(X)` for a 1-D grid density.
pub fn sigma_minus_grid(f: &GridDensity) -> Result<f64> {
    if f.is_point_mass() {
        return Err(Error::NegInfiniteEntropy("point mass has no entropy power".into()));
    }
    Ok(0.5 * (2.0 * ruzsa_divergence_grid(f, f)?).exp())
}

/// Doubling constant `sigma_plus(X)` for a 1-D grid density.
pub fn sigma_plus_grid(f: &GridDensity) -> Result<f64> {
    if f.is_point_mass() {
        return Err(Error::NegInfiniteEntropy("point mass has no entropy power".into()));
    }
    let sum = convolve_grid(f, f)?;
    Ok(0.5 * (2.0 * (grid_entropy(&sum) - grid_entropy(f))).exp())
}

/// Default grid resolution for parametric fallbacks.
pub const PARAMETRIC_CELLS: usize = 4096;

/// `(sigma_minus, sigma_plus)` with closed forms where available:
/// Gaussians give `(1, 1)`; `Exp` gives `(2, exp(2 gamma) / 2)` via the
/// Gamma(2) entropy `1 + gamma - log rate`; `Uniform` gives `(e/2, e/2)` from
/// the triangle density. Other families are discretized.
pub fn sigma_pair_parametric(d: &ParametricDensity) -> Result<(f64, f64)> {
    d.validate()?;
    match d {
        ParametricDensity::Gaussian { .. } => Ok((1.0, 1.0)),
        ParametricDensity::Exponential { rate } => {
            let h = parametric_entropy(d)?;
            let h_sum = exp_sum_entropy(*rate);
            let h_diff = 1.0 + (2.0 / rate).ln(); // Laplace(0, 1/rate)
            Ok((
                0.5 * (2.0 * (h_diff - h)).exp(),
                0.5 * (2.0 * (h_sum - h)).exp(),
            ))
        }
        ParametricDensity::Uniform { lo, .. } if lo.len() == 1 => {
            // Triangle density: h(X +/- X') - h(X) = 1/2, so sigma = e/2.
            let sigma = 0.5 * std::f64::consts::E;
            Ok((sigma, sigma))
        }
        _ => {
            let g = d.to_grid(PARAMETRIC_CELLS)?;
            Ok((sigma_minus_grid(&g)?, sigma_plus_grid(&g)?))
        }
    }
}

/// Gaussian-pair closed form:
/// `d_R(X || Y) = (1/2) log(det(K_X + K_Y) / det K_X)`.
pub fn gaussian_ruzsa_divergence(
    kx: &crate::pdmatrix::PdMatrix,
    ky: &crate::pdmatrix::PdMatrix,
) -> Result<f64> {
    let sum = kx.add(ky)?;
    Ok(0.5 * (sum.log_det() - kx.log_det()))
}
