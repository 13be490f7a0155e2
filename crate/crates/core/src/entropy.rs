//! Entropy functionals: discrete, differential (piecewise-constant and
//! closed-form), conditional, mutual information, entropy power, and the
//! Haar-measure entropies for the circle and multiplicative groups.
//!
//! Everything is in nats.

use std::f64::consts::PI;

use crate::density::{CirclePmf, ComplexDensity, FinitePmf, GridDensity, JointPmf, ParametricDensity};
use crate::error::{Error, Result};
use crate::group::TAU;

/// `-sum p log p` with `0 log 0 = 0`.
pub fn discrete_entropy(probs: &[f64]) -> f64 {
    -probs
        .iter()
        .filter(|&&p| p > 0.0)
        .map(|&p| p * p.ln())
        .sum::<f64>()
}

pub fn finite_entropy(p: &FinitePmf) -> f64 {
    discrete_entropy(&p.probs)
}

/// Differential entropy of a piecewise-constant density:
/// `-sum m_i log(m_i / vol)`, exact for this density class.
pub fn grid_entropy(g: &GridDensity) -> f64 {
    let vol = g.cell_volume();
    -g.masses
        .iter()
        .filter(|&&m| m > 0.0)
        .map(|&m| m * (m / vol).ln())
        .sum::<f64>()
}

/// `h` of a Gaussian on `R^n` with covariance determinant `det_k`.
pub fn gaussian_entropy(n: usize, det_k: f64) -> Result<f64> {
    if det_k <= 0.0 {
        return Err(Error::NotPositiveDefinite(format!(
            "determinant {det_k} not positive"
        )));
    }
    Ok(0.5 * (n as f64 * (2.0 * PI * std::f64::consts::E).ln() + det_k.ln()))
}

/// Closed-form differential entropies.
pub fn parametric_entropy(d: &ParametricDensity) -> Result<f64> {
    d.validate()?;
    Ok(match d {
        ParametricDensity::Gaussian { mean, cov } => {
            let n = mean.len();
            let m = nalgebra::DMatrix::from_fn(n, n, |i, j| cov[i][j]);
            let det = m
                .cholesky()
                .ok_or_else(|| Error::NotPositiveDefinite("covariance".into()))?
                .determinant();
            0.5 * ((2.0 * PI * std::f64::consts::E).powi(n as i32) * det).ln()
        }
        ParametricDensity::Exponential { rate } => 1.0 - rate.ln(),
        ParametricDensity::Uniform { lo, hi } => lo
            .iter()
            .zip(hi)
            .map(|(l, h)| (h - l).ln())
            .sum::<f64>(),
        ParametricDensity::Laplace { scale, .. } => 1.0 + (2.0 * scale).ln(),
        ParametricDensity::LogNormal { mu, sigma } => {
            mu + 0.5 + 0.5 * (2.0 * PI * sigma * sigma).ln()
        }
    })
}

/// `h` of a Gamma(shape, rate) density; shape 2 arises as the sum of two
/// i.i.d. exponentials.
pub fn gamma_entropy(shape: f64, rate: f64) -> f64 {
    // h = shape - ln(rate) + ln Gamma(shape) + (1 - shape) psi(shape)
    let lgamma = statrs::function::gamma::ln_gamma(shape);
    let psi = statrs::function::gamma::digamma(shape);
    shape - rate.ln() + lgamma + (1.0 - shape) * psi
}

/// Entropy of the sum of two i.i.d. Exp(rate) variables: Gamma(2, rate), with
/// `psi(2) = 1 - gamma` this is `2 - ln rate - (1 - gamma) = 1 + gamma - ln rate`
/// for rate 1.
pub fn exp_sum_entropy(rate: f64) -> f64 {
    gamma_entropy(2.0, rate)
}

pub fn joint_entropy(j: &JointPmf) -> f64 {
    discrete_entropy(&j.tensor)
}

/// `H(A | B) = H(A, B) - H(B)` where `a_axes` and `b_axes` index the joint.
pub fn conditional_entropy(j: &JointPmf, a_axes: &[usize], b_axes: &[usize]) -> Result<f64> {
    let ab: Vec<usize> = a_axes.iter().chain(b_axes).copied().collect();
    let hab = joint_entropy(&j.marginal(&ab)?);
    let hb = joint_entropy(&j.marginal(b_axes)?);
    Ok(hab - hb)
}

/// `I(A; B) = H(A) + H(B) - H(A, B)`.
pub fn mutual_information(j: &JointPmf, a_axes: &[usize], b_axes: &[usize]) -> Result<f64> {
    let ha = joint_entropy(&j.marginal(a_axes)?);
    let hb = joint_entropy(&j.marginal(b_axes)?);
    let ab: Vec<usize> = a_axes.iter().chain(b_axes).copied().collect();
    let hab = joint_entropy(&j.marginal(&ab)?);
    Ok(ha + hb - hab)
}

/// `I(A; B | C) = H(A,C) + H(B,C) - H(A,B,C) - H(C)`.
pub fn conditional_mutual_information(
    j: &JointPmf,
    a_axes: &[usize],
    b_axes: &[usize],
    c_axes: &[usize],
) -> Result<f64> {
    let ac: Vec<usize> = a_axes.iter().chain(c_axes).copied().collect();
    let bc: Vec<usize> = b_axes.iter().chain(c_axes).copied().collect();
    let abc: Vec<usize> = a_axes.iter().chain(b_axes).chain(c_axes).copied().collect();
    Ok(joint_entropy(&j.marginal(&ac)?) + joint_entropy(&j.marginal(&bc)?)
        - joint_entropy(&j.marginal(&abc)?)
        - joint_entropy(&j.marginal(c_axes)?))
}

/// Entropy power `N(X) = exp(2 h / n)`.
pub fn entropy_power(h: f64, n: usize) -> f64 {
    (2.0 * h / n as f64).exp()
}

/// Relative entropy from the Gaussian with the same (midpoint) mean and
/// variance: `D(X) = h(Gaussian) - h(X) >= 0` up to discretization error.
pub fn gaussian_relative_entropy(g: &GridDensity) -> Result<f64> {
    let (_, var) = g.mean_variance()?;
    if var <= 0.0 {
        return Err(Error::InvalidDensity("zero-variance density".into()));
    }
    Ok(0.5 * (2.0 * PI * std::f64::consts::E * var).ln() - grid_entropy(g))
}

/// Circle entropy relative to the uniform *probability* Haar measure:
/// `h(Theta) = -D(Theta || U) <= 0`, with equality iff uniform.
pub fn circle_entropy(p: &CirclePmf) -> f64 {
    let m = p.masses.len() as f64;
    -p.masses
        .iter()
        .filter(|&&q| q > 0.0)
        .map(|&q| q * (q * m).ln())
        .sum::<f64>()
}

/// Circle entropy relative to Lebesgue measure on `[0, 2*pi)`; differs from
/// the Haar-probability version by `log(2*pi)`.
pub fn circle_entropy_lebesgue(p: &CirclePmf) -> f64 {
    circle_entropy(p) + TAU.ln()
}

/// Multiplicative entropy on `(0, infinity)` relative to Haar `dx/x`: equals
/// the Lebesgue entropy of `log X`, here represented directly by the grid
/// density of `log X`.
pub fn multiplicative_entropy(log_density: &GridDensity) -> Result<f64> {
    if log_density.dim() != 1 {
        return Err(Error::DimensionMismatch("log-density must be 1-D".into()));
    }
    Ok(grid_entropy(log_density))
}

/// Lebesgue entropy of `X` on `(0, infinity)` from the grid density of
/// `G = log X`: `h(X) = h(G) + E[G]`.
pub fn lebesgue_entropy_from_log(log_density: &GridDensity) -> Result<f64> {
    if log_density.dim() != 1 {
        return Err(Error::DimensionMismatch("log-density must be 1-D".into()));
    }
    Ok(grid_entropy(log_density) + log_density.expect_midpoint(|g| g))
}

/// Multiplicative entropy on the nonzero complex numbers relative to Haar
/// `dz / |z|^2`: additive over the independent `(log|Z|, arg Z)` pair, with
/// the angle measured against Lebesgue on `[0, 2*pi)`.
pub fn complex_multiplicative_entropy(z: &ComplexDensity) -> Result<f64> {
    Ok(grid_entropy(&z.log_modulus) + circle_entropy_lebesgue(&z.angle))
}

/// Two-dimensional Lebesgue entropy of `Z` from the multiplicative
/// representation: `h(Z) = h_mult(Z) + 2 E[log|Z|]`.
pub fn complex_lebesgue_entropy(z: &ComplexDensity) -> Result<f64> {
    Ok(complex_multiplicative_entropy(z)? + 2.0 * z.log_modulus.expect_midpoint(|g| g))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::density::{random_joint, FinitePmf, JointPmf, ParametricDensity};
    use crate::group::GroupSpec;
    use crate::EULER_GAMMA;
    use approx::assert_abs_diff_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn uniform_entropy_is_log_order() {
        for m in [2u64, 5, 12] {
            let p = FinitePmf::uniform(GroupSpec::cyclic(m)).unwrap();
            assert_abs_diff_eq!(finite_entropy(&p), (m as f64).ln(), epsilon = 1e-12);
        }
        let p = FinitePmf::point_mass(GroupSpec::cyclic(7), &[3]).unwrap();
        assert_eq!(finite_entropy(&p), 0.0);
    }

    #[test]
    fn fair_coin_entropy() {
        let p = FinitePmf::new(GroupSpec::cyclic(2), vec![0.5, 0.5]).unwrap();
        assert_abs_diff_eq!(finite_entropy(&p), 2.0f64.ln(), epsilon = 1e-15);
    }

    #[test]
    fn grid_uniform_entropy_is_log_volume() {
        let g = GridDensity::new(vec![0.0], vec![1.0], vec![8], vec![0.125; 8]).unwrap();
        assert_abs_diff_eq!(grid_entropy(&g), 0.0, epsilon = 1e-14);
        let g2 = GridDensity::new(vec![0.0], vec![4.0], vec![8], vec![0.125; 8]).unwrap();
        assert_abs_diff_eq!(grid_entropy(&g2), 4.0f64.ln(), epsilon = 1e-14);
    }

    #[test]
    fn scaling_shifts_entropy_by_log_factor() {
        let d = ParametricDensity::Gaussian {
            mean: vec![0.0],
            cov: vec![vec![1.0]],
        };
        let g = d.to_grid(512).unwrap();
        let s = g.scale(3.0).unwrap();
        assert_abs_diff_eq!(grid_entropy(&s), grid_entropy(&g) + 3.0f64.ln(), epsilon = 1e-12);
    }

    #[test]
    fn closed_form_entropies() {
        // N(0,1): (1/2) log(2 pi e) = 1.4189385332...
        let h = parametric_entropy(&ParametricDensity::std_gaussian(1)).unwrap();
        assert_abs_diff_eq!(h, 1.418_938_533_204_672_7, epsilon = 1e-12);
        // Exp(1): 1
        let h = parametric_entropy(&ParametricDensity::Exponential { rate: 1.0 }).unwrap();
        assert_abs_diff_eq!(h, 1.0, epsilon = 1e-15);
        // Laplace(0,1): 1 + log 2
        let h = parametric_entropy(&ParametricDensity::Laplace {
            location: 0.0,
            scale: 1.0,
        })
        .unwrap();
        assert_abs_diff_eq!(h, 1.0 + 2.0f64.ln(), epsilon = 1e-15);
        // Uniform[0,1]: 0
        let h = parametric_entropy(&ParametricDensity::Uniform {
            lo: vec![0.0],
            hi: vec![1.0],
        })
        .unwrap();
        assert_abs_diff_eq!(h, 0.0, epsilon = 1e-15);
        // LogNormal(0,1): 1/2 + (1/2) log(2 pi)
        let h = parametric_entropy(&ParametricDensity::LogNormal { mu: 0.0, sigma: 1.0 }).unwrap();
        assert_abs_diff_eq!(h, 0.5 + 0.5 * (2.0 * PI).ln(), epsilon = 1e-15);
    }

    #[test]
    fn gamma_two_entropy_matches_digamma_form() {
        // Gamma(2,1): h = 2 + ln Gamma(2) - psi(2) = 2 - (1 - gamma) = 1 + gamma
        assert_abs_diff_eq!(exp_sum_entropy(1.0), 1.0 + EULER_GAMMA, epsilon = 1e-12);
    }

    #[test]
    fn discretized_entropy_matches_closed_form() {
        for d in [
            ParametricDensity::std_gaussian(1),
            ParametricDensity::Exponential { rate: 1.0 },
            ParametricDensity::Laplace {
                location: 0.0,
                scale: 1.0,
            },
        ] {
            let exact = parametric_entropy(&d).unwrap();
            let g = d.to_grid(4096).unwrap();
            assert_abs_diff_eq!(grid_entropy(&g), exact, epsilon = 1e-4);
        }
    }

    #[test]
    fn chain_rule_and_information_identities() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let gx = GroupSpec::cyclic(4);
        let gy = GroupSpec::cyclic(3);
        for _ in 0..50 {
            let j = random_joint(&gx, &gy, 1.0, &mut rng).unwrap();
            let h_xy = joint_entropy(&j);
            let h_y = joint_entropy(&j.marginal(&[1]).unwrap());
            let h_x_given_y = conditional_entropy(&j, &[0], &[1]).unwrap();
            assert_abs_diff_eq!(h_xy, h_y + h_x_given_y, epsilon = 1e-10);
            let i = mutual_information(&j, &[0], &[1]).unwrap();
            assert!(i >= -1e-10);
            // I(X;Y) = H(X) - H(X|Y)
            let h_x = joint_entropy(&j.marginal(&[0]).unwrap());
            assert_abs_diff_eq!(i, h_x - h_x_given_y, epsilon = 1e-10);
        }
    }

    #[test]
    fn independent_variables_have_zero_information() {
        let g = GroupSpec::cyclic(3);
        let p = FinitePmf::new(g.clone(), vec![0.2, 0.3, 0.5]).unwrap();
        let q = FinitePmf::uniform(g).unwrap();
        let j = JointPmf::product(&[p, q]).unwrap();
        assert_abs_diff_eq!(
            mutual_information(&j, &[0], &[1]).unwrap(),
            0.0,
            epsilon = 1e-12
        );
    }

    #[test]
    fn conditional_information_on_markov_triple_vanishes_given_middle() {
        // For (X1, Y, X2) conditionally independent given Y: I(X1; X2 | Y) = 0.
        let g = GroupSpec::cyclic(3);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            let j = random_joint(&g, &g, 0.8, &mut rng).unwrap();
            let t = j.markov_triple().unwrap();
            let cmi = conditional_mutual_information(&t, &[0], &[2], &[1]).unwrap();
            assert!(cmi.abs() < 1e-10, "cmi = {cmi}");
        }
    }

    #[test]
    fn entropy_power_gaussian_is_variance_factor() {
        // N(X) = 2 pi e Var for a 1-D Gaussian.
        let h = parametric_entropy(&ParametricDensity::std_gaussian(1)).unwrap();
        assert_abs_diff_eq!(entropy_power(h, 1), 2.0 * PI * std::f64::consts::E, epsilon = 1e-10);
    }

    #[test]
    fn relative_entropy_to_gaussian_nonneg_and_zero_for_gaussian() {
        let g = ParametricDensity::std_gaussian(1).to_grid(4096).unwrap();
        let d = gaussian_relative_entropy(&g).unwrap();
        assert!(d.abs() < 1e-3, "D = {d}");
        let e = ParametricDensity::Exponential { rate: 1.0 }
            .to_grid(4096)
            .unwrap();
        let de = gaussian_relative_entropy(&e).unwrap();
        // D(Exp(1)) = log sqrt(2 pi e) - 1 + ... ; just check positivity and
        // the closed form (1/2) log(2 pi e) - 1 = 0.4189385...
        assert_abs_diff_eq!(de, 0.5 * (2.0 * PI * std::f64::consts::E).ln() - 1.0, epsilon = 1e-3);
    }

    #[test]
    fn circle_entropy_max_at_uniform() {
        let u = CirclePmf::uniform(64);
        assert_abs_diff_eq!(circle_entropy(&u), 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(circle_entropy_lebesgue(&u), TAU.ln(), epsilon = 1e-12);
        let w = CirclePmf::wrapped_gaussian(1.0, 0.5, 256).unwrap();
        assert!(circle_entropy(&w) < -1e-3);
    }

    #[test]
    fn lognormal_entropies_through_log_transform() {
        // log X ~ N(0,1): multiplicative entropy = (1/2) log(2 pi e),
        // Lebesgue entropy = that + E[log X] = same (mean 0).
        let d = ParametricDensity::LogNormal { mu: 0.0, sigma: 1.0 };
        let g = crate::density::discretize_log_transform(&d, 4096).unwrap();
        let hm = multiplicative_entropy(&g).unwrap();
        assert_abs_diff_eq!(hm, 0.5 * (2.0 * PI * std::f64::consts::E).ln(), epsilon = 1e-4);
        let hl = lebesgue_entropy_from_log(&g).unwrap();
        assert_abs_diff_eq!(hl, parametric_entropy(&d).unwrap(), epsilon = 1e-4);
    }
}
