//! The model Bargmann--Fock reproducing kernel, the quantization of a linear
//! symplectic map (closed form and Gaussian-integral form), and its lift to
//! the reduced Heisenberg group `S^1 x C^k`.
//!
//! Conventions. The base kernel is
//! `Pi_H(z, w) = (2 pi)^{-k} exp(-|z|^2/2 - |w|^2/2 + z . wbar)`.
//! With this prefactor the reproducing identity against plain Lebesgue
//! measure on `C^k` holds only after multiplying the measure by `2^k`: the
//! 1-D Gaussian integral `int_C exp(-|v|^2 + z vbar + v wbar) dv = pi e^{z wbar}`
//! forces `c (2 pi)^{-2k} pi^k = (2 pi)^{-k}`, i.e. `c = 2^k`. The constant
//! is both derived here and fitted numerically in [`fit_measure_constant`].
//!
//! For a symplectic map with complexified blocks `(P, Q)` the quantized
//! kernel in closed form is
//! `Pi_{H,M}(z, w) = (2 pi)^{-k} (det P)^{-1/2}
//!    exp{ (z Qbar P^{-1} z + 2 wbar P^{-1} z - wbar P^{-1} Q wbar) / 2 }
//!    exp(-|z|^2/2 - |w|^2/2)`.
//! The Gaussian-integral route composes `Pi_H(z, M v) Pi_H(v, w)` over
//! `v in C^k`; that integral carries an extra factor `pi^k / |det P|` from
//! the `v`-Gaussian (e.g. `M = diag(e^t, e^{-t})` gives exactly
//! `pi / cosh t`), so reproducing the closed form requires the prefactor
//! `(det P)^{+1/2}` on the integral, and the two routes then agree in
//! modulus; their phases differ by the argument of `det P`, which the
//! double-cover sign ambiguity absorbs.

use crate::numerics::{DomainTag, QuadratureRule};
use crate::symplectic::{apply_complexified, complexify, CMat, ComplexSymplecticBlocks, SymplecticMatrix};
use crate::{Error, Result};
use num_complex::Complex64;

const TWO_PI: f64 = 2.0 * std::f64::consts::PI;

/// A point of the reduced Heisenberg group `S^1 x C^k`.
#[derive(Debug, Clone)]
pub struct BFPoint {
    /// Circle coordinate, radians.
    pub theta: f64,
    pub z: Vec<Complex64>,
}

/// Branch choice for `(det P)^{-1/2}`.
///
/// `Principal` takes the principal square root. `Continued` corrects the
/// principal value by `(-1)^{half_turns}` where `half_turns` counts how many
/// times the continuously tracked argument of `det P` wrapped along a matrix
/// path; see [`half_turns_along`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    Principal,
    Continued { half_turns: i32 },
}

/// A metaplectic kernel value together with the branch it was taken on.
/// The modulus is branch-independent.
#[derive(Debug, Clone, Copy)]
pub struct MetaplecticKernelValue {
    pub value: Complex64,
    pub sign_branch: Branch,
}

fn dot_conj(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x * y.conj()).sum()
}

fn norm_sqr(a: &[Complex64]) -> f64 {
    a.iter().map(|x| x.norm_sqr()).sum()
}

/// The Bargmann--Fock reproducing kernel
/// `(2 pi)^{-k} exp(-|z|^2/2 - |w|^2/2 + z . wbar)`.
pub fn bf_kernel(z: &[Complex64], w: &[Complex64]) -> Result<Complex64> {
    if z.len() != w.len() || z.is_empty() {
        return Err(Error::DimensionMismatch { expected: z.len().max(1), got: w.len() });
    }
    let k = z.len();
    let exponent = Complex64::new(-0.5 * (norm_sqr(z) + norm_sqr(w)), 0.0) + dot_conj(z, w);
    Ok(exponent.exp() * TWO_PI.powi(-(k as i32)))
}

/// The measure constant making `Pi_H` reproducing against `c * Lebesgue`,
/// derived from the 1-D complex Gaussian integral
/// `int_C exp(-|v|^2 + z vbar + v wbar) dv = pi e^{z wbar}`.
pub fn measure_constant(k: usize) -> f64 {
    2.0_f64.powi(k as i32)
}

/// Tensor Gauss--Hermite integration of `f` over `C^k` against plain
/// Lebesgue measure; `f` must contain its own `e^{-|v|^2}`-type decay.
/// `log_extra(v)` is added to the exponent before exponentiating, with the
/// node weight applied outside; here we pass the exponent through whole to
/// avoid overflow, so `f` supplies the full exponent and an optional
/// prefactor.
fn integrate_ck(
    rule: &QuadratureRule,
    k: usize,
    mut exponent: impl FnMut(&[Complex64]) -> Complex64,
) -> Complex64 {
    // Iterate the tensor grid of 2k Gauss-Hermite axes. The GH rule absorbs
    // e^{-x^2} per axis, so the effective exponent gets +|v|^2 added back.
    let n = rule.len();
    let dims = 2 * k;
    let mut idx = vec![0usize; dims];
    let mut total = Complex64::new(0.0, 0.0);
    let mut v = vec![Complex64::new(0.0, 0.0); k];
    loop {
        let mut logw = 0.0;
        let mut vsq = 0.0;
        for d in 0..k {
            let x = rule.nodes[idx[2 * d]];
            let y = rule.nodes[idx[2 * d + 1]];
            v[d] = Complex64::new(x, y);
            logw += rule.weights[idx[2 * d]].ln() + rule.weights[idx[2 * d + 1]].ln();
            vsq += x * x + y * y;
        }
        let e = exponent(&v) + Complex64::new(vsq + logw, 0.0);
        total += e.exp();
        // Advance the mixed-radix counter.
        let mut d = 0;
        loop {
            if d == dims {
                return total;
            }
            idx[d] += 1;
            if idx[d] < n {
                break;
            }
            idx[d] = 0;
            d += 1;
        }
    }
}

/// Fit the constant `c` with `c int Pi_H(z, v) Pi_H(v, w) dv = Pi_H(z, w)`
/// over a grid of `(z, w)` and assert it matches the derived value
/// [`measure_constant`] to 1e-10 relative.
pub fn fit_measure_constant(k: usize) -> Result<f64> {
    if k == 0 || k > 3 {
        return Err(Error::InvalidArgument("measure fit supports 1 <= k <= 3".into()));
    }
    let order = match k {
        1 => 40,
        2 => 24,
        _ => 16,
    };
    let rule = crate::numerics::gauss_hermite(order)?;
    let samples: [(f64, f64); 4] = [(0.0, 0.0), (0.7, -0.3), (-0.5, 0.9), (1.0, 0.4)];
    let mut fits = Vec::new();
    for (i, &(zr, zi)) in samples.iter().enumerate() {
        for &(wr, wi) in samples.iter().skip(i % 2) {
            let z: Vec<Complex64> = (0..k)
                .map(|d| Complex64::new(zr / (d + 1) as f64, zi))
                .collect();
            let w: Vec<Complex64> = (0..k)
                .map(|d| Complex64::new(wr, wi / (d + 1) as f64))
                .collect();
            let target = bf_kernel(&z, &w)?;
            let integral = integrate_ck(&rule, k, |v| {
                Complex64::new(-0.5 * (norm_sqr(&z) + norm_sqr(&w)) - norm_sqr(v), 0.0)
                    + dot_conj(&z, v)
                    + dot_conj(v, &w)
            }) * TWO_PI.powi(-2 * k as i32);
            fits.push((target / integral).re);
        }
    }
    let mean = fits.iter().sum::<f64>() / fits.len() as f64;
    let spread = fits.iter().map(|c| (c - mean).abs()).fold(0.0, f64::max);
    if spread > 1e-8 * mean.abs() {
        return Err(Error::NormalizationInconsistency(format!(
            "no single measure constant fits the grid (spread {spread:.3e})"
        )));
    }
    let derived = measure_constant(k);
    if (mean - derived).abs() > 1e-10 * derived {
        return Err(Error::NormalizationInconsistency(format!(
            "fitted constant {mean} disagrees with derived {derived}"
        )));
    }
    Ok(mean)
}

fn det_p_rsqrt(blocks: &ComplexSymplecticBlocks, branch: Branch) -> Result<Complex64> {
    let det = blocks.p.det();
    if det.norm() <= 1e-12 {
        return Err(Error::NearSingularBlock { det_abs: det.norm() });
    }
    // Principal (det P)^{-1/2}.
    let principal = (Complex64::new(-0.5, 0.0) * det.ln()).exp();
    Ok(match branch {
        Branch::Principal => principal,
        Branch::Continued { half_turns } => {
            if half_turns.rem_euclid(2) == 0 {
                principal
            } else {
                -principal
            }
        }
    })
}

/// Count the half turns of `arg det P` along a sampled matrix path, for use
/// with [`Branch::Continued`]. The samples must be dense enough that
/// consecutive determinants turn by less than `pi`.
pub fn half_turns_along(dets: &[Complex64]) -> i32 {
    if dets.len() < 2 {
        return 0;
    }
    let mut total = dets[0].arg();
    for pair in dets.windows(2) {
        total += (pair[1] / pair[0]).arg();
    }
    let wraps = (total - dets[dets.len() - 1].arg()) / TWO_PI;
    wraps.round() as i32
}

fn closed_from_blocks(
    blocks: &ComplexSymplecticBlocks,
    z: &[Complex64],
    w: &[Complex64],
    branch: Branch,
) -> Result<MetaplecticKernelValue> {
    let k = blocks.k();
    if z.len() != k || w.len() != k {
        return Err(Error::DimensionMismatch { expected: k, got: z.len().min(w.len()) });
    }
    let rsqrt = det_p_rsqrt(blocks, branch)?;
    let p_inv = blocks.p.inverse()?;
    let qbar_pinv = blocks.q.conj().mul(&p_inv);
    let pinv_q = p_inv.mul(&blocks.q);
    let wbar: Vec<Complex64> = w.iter().map(|x| x.conj()).collect();

    // Bilinear contractions a^T M b (no conjugation).
    let bilinear = |m: &CMat, a: &[Complex64], b: &[Complex64]| -> Complex64 {
        let mb = m.matvec(b);
        a.iter().zip(&mb).map(|(x, y)| x * y).sum()
    };
    let quad = bilinear(&qbar_pinv, z, z) + 2.0 * bilinear(&p_inv, &wbar, z)
        - bilinear(&pinv_q, &wbar, &wbar);
    let exponent = 0.5 * quad + Complex64::new(-0.5 * (norm_sqr(z) + norm_sqr(w)), 0.0);
    let value = rsqrt * exponent.exp() * TWO_PI.powi(-(k as i32));
    Ok(MetaplecticKernelValue { value, sign_branch: branch })
}

/// Closed-form metaplectic kernel `Pi_{H,M}(z, w)`. Reduces exactly to
/// [`bf_kernel`] at `M = I`.
pub fn metaplectic_kernel_closed(
    m: &SymplecticMatrix,
    z: &[Complex64],
    w: &[Complex64],
    branch: Branch,
) -> Result<MetaplecticKernelValue> {
    closed_from_blocks(&complexify(m)?, z, w, branch)
}

/// Same as [`metaplectic_kernel_closed`] for precomputed blocks.
pub fn metaplectic_kernel_closed_from_blocks(
    blocks: &ComplexSymplecticBlocks,
    z: &[Complex64],
    w: &[Complex64],
    branch: Branch,
) -> Result<MetaplecticKernelValue> {
    closed_from_blocks(blocks, z, w, branch)
}

/// Gaussian-integral form of the metaplectic kernel:
/// `(det P)^{1/2} c_k int Pi_H(z, M v) Pi_H(v, w) dv` evaluated by tensor
/// Gauss--Hermite quadrature with the fitted measure constant
/// `c_k = 2^k`. Agrees with [`metaplectic_kernel_closed`] in modulus.
pub fn metaplectic_kernel_quadrature(
    m: &SymplecticMatrix,
    z: &[Complex64],
    w: &[Complex64],
    rule: &QuadratureRule,
) -> Result<Complex64> {
    let k = m.k();
    if k > 2 {
        return Err(Error::InvalidArgument(
            "quadrature form is limited to k <= 2 (tensor-grid cost)".into(),
        ));
    }
    if z.len() != k || w.len() != k {
        return Err(Error::DimensionMismatch { expected: k, got: z.len().min(w.len()) });
    }
    if rule.domain != DomainTag::GaussHermiteLine {
        return Err(Error::InvalidArgument("need a Gauss-Hermite rule".into()));
    }
    let blocks = complexify(m)?;
    let det = blocks.p.det();
    if det.norm() <= 1e-12 {
        return Err(Error::NearSingularBlock { det_abs: det.norm() });
    }
    let sqrt_det = (Complex64::new(0.5, 0.0) * det.ln()).exp();
    let zn = norm_sqr(z);
    let wn = norm_sqr(w);
    let integral = integrate_ck(rule, k, |v| {
        let mv = apply_complexified(&blocks, v).expect("dimension checked");
        Complex64::new(-0.5 * (zn + wn + norm_sqr(&mv) + norm_sqr(v)), 0.0)
            + dot_conj(z, &mv)
            + dot_conj(v, w)
    });
    Ok(sqrt_det * measure_constant(k) * TWO_PI.powi(-2 * k as i32) * integral)
}

/// Lift to the reduced Heisenberg group:
/// `e^{i(theta_a - theta_b)} Pi_{H,M}(a.z, b.z)`.
pub fn lifted_kernel(
    m: &SymplecticMatrix,
    a: &BFPoint,
    b: &BFPoint,
    branch: Branch,
) -> Result<Complex64> {
    let base = metaplectic_kernel_closed(m, &a.z, &b.z, branch)?;
    Ok(Complex64::from_polar(1.0, a.theta - b.theta) * base.value)
}
