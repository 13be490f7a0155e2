//! Laws of sums and differences of independent variables: cyclic convolution
//! on finite product groups (naive and FFT paths), support-enlarging linear
//! convolution for 1-D grid densities, circle convolution, multiplicative
//! convolution for complex densities, and the closed-form parametric cases.

use rustfft::num_complex::Complex64;
use rustfft::FftPlanner;

use crate::density::{CirclePmf, ComplexDensity, FinitePmf, GridDensity, ParametricDensity};
use crate::error::{Error, Result};

/// Order above which the finite convolution switches from the quadratic path
/// to the FFT path.
const FFT_THRESHOLD: usize = 64;

// ---------------------------------------------------------------------------
// Finite groups
// ---------------------------------------------------------------------------

/// Law of `X + Y` for independent variables on the same finite group; direct
/// quadratic accumulation.
pub fn convolve_finite_naive(p: &FinitePmf, q: &FinitePmf) -> Result<FinitePmf> {
    if p.group != q.group {
        return Err(Error::GroupMismatch("convolution needs a common group".into()));
    }
    let g = &p.group;
    let n = g.order()?;
    let mut out = vec![0.0; n];
    for i in 0..n {
        if p.probs[i] == 0.0 {
            continue;
        }
        let x = g.elem_at(i)?;
        for j in 0..n {
            if q.probs[j] == 0.0 {
                continue;
            }
            let y = g.elem_at(j)?;
            out[g.index_of(&g.add(&x, &y)?)?] += p.probs[i] * q.probs[j];
        }
    }
    FinitePmf::new(g.clone(), normalize_clamped(out))
}

/// FFT path: the carrier of a finite product group is a multi-dimensional
/// cyclic tensor, so the sum law is a componentwise cyclic convolution,
/// computed by a DFT along each axis.
pub fn convolve_finite_fft(p: &FinitePmf, q: &FinitePmf) -> Result<FinitePmf> {
    if p.group != q.group {
        return Err(Error::GroupMismatch("convolution needs a common group".into()));
    }
    let moduli = p.group.moduli()?;
    let sizes: Vec<usize> = moduli.iter().map(|&m| m as usize).collect();
    let n: usize = sizes.iter().product();
    let mut a: Vec<Complex64> = p.probs.iter().map(|&x| Complex64::new(x, 0.0)).collect();
    let mut b: Vec<Complex64> = q.probs.iter().map(|&x| Complex64::new(x, 0.0)).collect();
    let mut planner = FftPlanner::new();
    for axis in 0..sizes.len() {
        fft_axis(&mut planner, &mut a, &sizes, axis, false);
        fft_axis(&mut planner, &mut b, &sizes, axis, false);
    }
    for (x, y) in a.iter_mut().zip(&b) {
        *x *= *y;
    }
    for axis in 0..sizes.len() {
        fft_axis(&mut planner, &mut a, &sizes, axis, true);
    }
    let scale = 1.0 / n as f64;
    let out: Vec<f64> = a.iter().map(|c| (c.re * scale).max(0.0)).collect();
    FinitePmf::new(p.group.clone(), normalize_clamped(out))
}

fn fft_axis(
    planner: &mut FftPlanner<f64>,
    data: &mut [Complex64],
    sizes: &[usize],
    axis: usize,
    inverse: bool,
) {
    let len = sizes[axis];
    if len == 1 {
        return;
    }
    let stride: usize = sizes[axis + 1..].iter().product();
    let block = stride * len;
    let fft = if inverse {
        planner.plan_fft_inverse(len)
    } else {
        planner.plan_fft_forward(len)
    };
    let mut line = vec![Complex64::new(0.0, 0.0); len];
    let total = data.len();
    let mut start = 0;
    while start < total {
        for offset in 0..stride {
            let base = start + offset;
            for (k, slot) in line.iter_mut().enumerate() {
                *slot = data[base + k * stride];
            }
            fft.process(&mut line);
            for (k, &v) in line.iter().enumerate() {
                data[base + k * stride] = v;
            }
        }
        start += block;
    }
}

/// Law of `X + Y`, picking the faster path by group order.
pub fn convolve_finite(p: &FinitePmf, q: &FinitePmf) -> Result<FinitePmf> {
    if p.group.order()? >= FFT_THRESHOLD {
        convolve_finite_fft(p, q)
    } else {
        convolve_finite_naive(p, q)
    }
}

/// Law of `X - Y` for independent variables.
pub fn difference_finite(p: &FinitePmf, q: &FinitePmf) -> Result<FinitePmf> {
    convolve_finite(p, &q.reflect()?)
}

/// Law of `a X + b Y` for independent variables and integer weights.
pub fn weighted_sum_finite(p: &FinitePmf, q: &FinitePmf, a: i64, b: i64) -> Result<FinitePmf> {
    convolve_finite(&p.pushforward_scalar(a)?, &q.pushforward_scalar(b)?)
}

/// Law of `X_1 + ... + X_k` for i.i.d. copies.
pub fn self_convolve_finite(p: &FinitePmf, k: usize) -> Result<FinitePmf> {
    if k == 0 {
        return Err(Error::EmptySet("self-convolution of zero terms"));
    }
    let mut acc = p.clone();
    for _ in 1..k {
        acc = convolve_finite(&acc, p)?;
    }
    Ok(acc)
}

fn normalize_clamped(mut v: Vec<f64>) -> Vec<f64> {
    let total: f64 = v.iter().sum();
    for x in &mut v {
        *x /= total;
    }
    v
}

// ---------------------------------------------------------------------------
// Grid densities
// ---------------------------------------------------------------------------

/// Match two 1-D grids to a common spacing by refining the coarser one; the
/// spacing ratio must be an integer.
fn match_spacing(f: &GridDensity, g: &GridDensity) -> Result<(GridDensity, GridDensity)> {
    let (df, dg) = (f.spacing()[0], g.spacing()[0]);
    let rel = |a: f64, b: f64| (a - b).abs() / b.max(a);
    if rel(df, dg) < 1e-12 {
        return Ok((f.clone(), g.clone()));
    }
    let (coarse, fine, cd, fd, swap) = if df > dg {
        (f, g, df, dg, false)
    } else {
        (g, f, dg, df, true)
    };
    let ratio = cd / fd;
    let k = ratio.round();
    if (ratio - k).abs() > 1e-9 * ratio || k < 1.0 {
        return Err(Error::Resolution(format!(
            "grid spacings {df} and {dg} are not integer-ratio compatible"
        )));
    }
    let refined = coarse.refine(k as usize)?;
    Ok(if swap {
        (fine.clone(), refined)
    } else {
        (refined, fine.clone())
    })
}

/// Law of `X + Y` for independent 1-D grid variables: the cell masses undergo
/// a linear convolution on the Minkowski-sum box. The result assigns each
/// output cell the mass of the corresponding midpoint sum, which averages the
/// true density over cells and therefore never *decreases* entropy.
pub fn convolve_grid(f: &GridDensity, g: &GridDensity) -> Result<GridDensity> {
    if f.dim() != 1 || g.dim() != 1 {
        return Err(Error::DimensionMismatch("grid convolution is 1-D only".into()));
    }
    let (f, g) = match_spacing(f, g)?;
    let dx = f.spacing()[0];
    let (n1, n2) = (f.cells[0], g.cells[0]);
    let out_cells = n1 + n2 - 1;
    if out_cells > crate::density::MAX_GRID_CELLS {
        return Err(Error::Resolution(format!(
            "convolution output of {out_cells} cells exceeds cap"
        )));
    }
    let masses = linear_convolve(&f.masses, &g.masses);
    // Align the output box so cell midpoints are exact midpoint sums.
    let lo = f.lo[0] + g.lo[0] + 0.5 * dx;
    let hi = lo + out_cells as f64 * dx;
    let mut out = GridDensity::new(vec![lo], vec![hi], vec![out_cells], normalize_clamped(masses))?;
    out.truncated_mass = f.truncated_mass + g.truncated_mass;
    Ok(out)
}

/// Zero-padded FFT linear convolution with a quadratic fallback for short
/// inputs.
fn linear_convolve(a: &[f64], b: &[f64]) -> Vec<f64> {
    let out_len = a.len() + b.len() - 1;
    if out_len <= 256 {
        let mut out = vec![0.0; out_len];
        for (i, &x) in a.iter().enumerate() {
            if x == 0.0 {
                continue;
            }
            for (j, &y) in b.iter().enumerate() {
                out[i + j] += x * y;
            }
        }
        return out;
    }
    let size = out_len.next_power_of_two();
    let mut fa = vec![Complex64::new(0.0, 0.0); size];
    let mut fb = vec![Complex64::new(0.0, 0.0); size];
    for (slot, &x) in fa.iter_mut().zip(a) {
        slot.re = x;
    }
    for (slot, &x) in fb.iter_mut().zip(b) {
        slot.re = x;
    }
    let mut planner = FftPlanner::new();
    let fwd = planner.plan_fft_forward(size);
    let inv = planner.plan_fft_inverse(size);
    fwd.process(&mut fa);
    fwd.process(&mut fb);
    for (x, y) in fa.iter_mut().zip(&fb) {
        *x *= *y;
    }
    inv.process(&mut fa);
    let scale = 1.0 / size as f64;
    fa[..out_len].iter().map(|c| (c.re * scale).max(0.0)).collect()
}

/// Law of `X - Y` for independent 1-D grid variables.
pub fn difference_grid(f: &GridDensity, g: &GridDensity) -> Result<GridDensity> {
    convolve_grid(f, &g.reflect()?)
}

/// Law of `a X + b Y` for independent 1-D grid variables and nonzero real
/// weights.
pub fn weighted_sum_grid(f: &GridDensity, g: &GridDensity, a: f64, b: f64) -> Result<GridDensity> {
    convolve_grid(&f.scale(a)?, &g.scale(b)?)
}

/// Law of `X_1 + ... + X_k` for i.i.d. 1-D grid copies.
pub fn self_convolve_grid(f: &GridDensity, k: usize) -> Result<GridDensity> {
    if k == 0 {
        return Err(Error::EmptySet("self-convolution of zero terms"));
    }
    let mut acc = f.clone();
    for _ in 1..k {
        acc = convolve_grid(&acc, f)?;
    }
    Ok(acc)
}

// ---------------------------------------------------------------------------
// Circle
// ---------------------------------------------------------------------------

/// Law of `Theta + Phi` on the circle: cyclic convolution of arc masses.
pub fn convolve_circle(p: &CirclePmf, q: &CirclePmf) -> Result<CirclePmf> {
    let n = p.masses.len();
    if q.masses.len() != n {
        return Err(Error::Resolution(
            "circle densities must share a common arc count".into(),
        ));
    }
    let mut out = vec![0.0; n];
    if n <= FFT_THRESHOLD {
        for i in 0..n {
            if p.masses[i] == 0.0 {
                continue;
            }
            for j in 0..n {
                out[(i + j) % n] += p.masses[i] * q.masses[j];
            }
        }
    } else {
        let mut fa: Vec<Complex64> = p.masses.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        let mut fb: Vec<Complex64> = q.masses.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        let mut planner = FftPlanner::new();
        let fwd = planner.plan_fft_forward(n);
        let inv = planner.plan_fft_inverse(n);
        fwd.process(&mut fa);
        fwd.process(&mut fb);
        for (x, y) in fa.iter_mut().zip(&fb) {
            *x *= *y;
        }
        inv.process(&mut fa);
        let scale = 1.0 / n as f64;
        for (slot, c) in out.iter_mut().zip(&fa) {
            *slot = (c.re * scale).max(0.0);
        }
    }
    CirclePmf::new(normalize_clamped(out))
}

/// Law of `Theta - Phi` on the circle.
pub fn difference_circle(p: &CirclePmf, q: &CirclePmf) -> Result<CirclePmf> {
    convolve_circle(p, &q.reflect())
}

// ---------------------------------------------------------------------------
// Complex multiplicative group
// ---------------------------------------------------------------------------

/// Law of `Z * W` for independent complex variables in the multiplicative
/// representation: moduli multiply (log-moduli add) and angles add.
pub fn multiply_complex(z: &ComplexDensity, w: &ComplexDensity) -> Result<ComplexDensity> {
    ComplexDensity::new(
        convolve_grid(&z.log_modulus, &w.log_modulus)?,
        convolve_circle(&z.angle, &w.angle)?,
    )
}

/// Law of `Z / W` for independent complex variables.
pub fn divide_complex(z: &ComplexDensity, w: &ComplexDensity) -> Result<ComplexDensity> {
    multiply_complex(z, &w.invert()?)
}

// ---------------------------------------------------------------------------
// Parametric closed forms
// ---------------------------------------------------------------------------

/// Closed-form sum law where one exists (currently Gaussian + Gaussian).
pub fn sum_parametric(a: &ParametricDensity, b: &ParametricDensity) -> Option<ParametricDensity> {
    match (a, b) {
        (
            ParametricDensity::Gaussian { mean: m1, cov: k1 },
            ParametricDensity::Gaussian { mean: m2, cov: k2 },
        ) if m1.len() == m2.len() => {
            let mean = m1.iter().zip(m2).map(|(x, y)| x + y).collect();
            let cov = k1
                .iter()
                .zip(k2)
                .map(|(r1, r2)| r1.iter().zip(r2).map(|(x, y)| x + y).collect())
                .collect();
            Some(ParametricDensity::Gaussian { mean, cov })
        }
        _ => None,
    }
}

/// The difference of two i.i.d. Exp(rate) variables is Laplace(0, 1/rate).
pub fn exp_difference_law(rate: f64) -> ParametricDensity {
    ParametricDensity::Laplace {
        location: 0.0,
        scale: 1.0 / rate,
    }
}
