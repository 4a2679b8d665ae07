//! Analytically continued spherical harmonics on the tube boundary.
//!
//! A tube point determines complexified spherical angles
//! `Theta = theta + i xi_theta`, `Phi = phi + i xi_phi` through
//! `zeta = (sin Phi cos Theta, sin Phi sin Theta, cos Phi)`; the continued
//! harmonic is the same Legendre-times-exponential formula evaluated at the
//! complex angles. Values grow like `e^{N tau}`, so everything is carried in
//! [`LogComplex`] form. The highest-weight mode has the closed form
//! `c_N sin^N(Phi) e^{i N Theta}` with
//! `c_N = ((-1)^N / 2^N N!) sqrt((2N+1)!/(4 pi))`, which anchors the
//! recurrence path in tests.

pub mod legendre;
pub mod log_complex;

pub use log_complex::{LogComplex, RealLogSum, ScaledComplexSum};

use crate::numerics::ln_gamma;
use crate::sphere_tube::{LiouvilleRule, TubePoint};
use crate::{Error, Result};
use legendre::normalized_legendre_log_into;
use num_complex::Complex64;
use rayon::prelude::*;

/// Hard cap on the degree; the recurrence and norm quadratures are
/// validated up to here.
pub const MAX_DEGREE: u32 = 300;

/// Laplace frequency `sqrt(N (N + 1))` of degree `N`.
pub fn mu(n: u32) -> f64 {
    let nf = n as f64;
    (nf * (nf + 1.0)).sqrt()
}

/// Log magnitude of the highest-weight constant `c_N`.
pub fn c_n_log(n: u32) -> f64 {
    let nf = n as f64;
    -nf * 2.0_f64.ln() - ln_gamma(nf + 1.0)
        + 0.5 * (ln_gamma(2.0 * nf + 2.0) - (4.0 * std::f64::consts::PI).ln())
}

/// A degree/order pair with its frequency and computed tube norm.
#[derive(Debug, Clone, Copy)]
pub struct HarmonicMode {
    pub n: u32,
    pub m: i32,
    pub mu: f64,
    /// `ln || Y_{n,m}^C ||_{L^2(boundary)}`.
    pub log_l2_norm: f64,
}

/// Complexified spherical angles of a tube point.
#[derive(Debug, Clone, Copy)]
pub struct ComplexAngles {
    pub theta: Complex64,
    pub phi: Complex64,
    pub cos_phi: Complex64,
    pub sin_phi: Complex64,
}

/// Recover `(Theta, Phi)` from the quadric embedding. The branch has
/// `Re Phi in (0, pi)` and `Re Theta in (-pi, pi]`; points within 1e-12 of
/// the chart degeneracy `sin Phi = 0` are rejected.
pub fn complex_angles(p: &TubePoint) -> Result<ComplexAngles> {
    let phi = p.zeta[2].acos();
    let sin_phi = phi.sin();
    if sin_phi.norm() < 1e-12 {
        return Err(Error::ChartDegenerate { sin_abs: sin_phi.norm() });
    }
    let q = (p.zeta[0] + Complex64::i() * p.zeta[1]) / sin_phi;
    let theta = Complex64::new(q.arg(), -q.norm().ln());
    Ok(ComplexAngles { theta, phi, cos_phi: p.zeta[2], sin_phi })
}

/// Index of mode `(l, m)` in a flat table of all modes with degree
/// `<= n_max`: `l^2 + l + m`.
pub fn mode_index(l: u32, m: i32) -> usize {
    debug_assert!(m.unsigned_abs() <= l);
    (l as usize) * (l as usize) + (l as i64 + m as i64) as usize
}

/// All continued harmonics of degree `<= n_max` at one point, log-scaled.
#[derive(Debug, Clone)]
pub struct ModeValues {
    pub n_max: u32,
    values: Vec<LogComplex>,
}

impl ModeValues {
    pub fn value(&self, l: u32, m: i32) -> LogComplex {
        self.values[mode_index(l, m)]
    }
}

fn apply_theta_factor(lc: LogComplex, m: i32, theta: Complex64) -> LogComplex {
    // e^{i m Theta} has log magnitude -m xi_theta and phase m theta.
    let mf = m as f64;
    let mut out = LogComplex::new(lc.log_mag - mf * theta.im, lc.phase + mf * theta.re);
    if m < 0 && m % 2 != 0 {
        out = out.neg();
    }
    out
}

/// Evaluate every continued harmonic of degree `<= n_max` at `p`.
///
/// Negative orders use `Y_l^{-m} = (-1)^m nlm(cos Phi) e^{-i m Theta}`.
pub fn eval_modes(p: &TubePoint, n_max: u32) -> Result<ModeValues> {
    if n_max > MAX_DEGREE {
        return Err(Error::InvalidArgument(format!(
            "degree {n_max} exceeds the validated cap {MAX_DEGREE}"
        )));
    }
    let ang = complex_angles(p)?;
    let total = (n_max as usize + 1) * (n_max as usize + 1);
    let mut values = vec![LogComplex::ZERO; total];
    let mut col = Vec::new();
    for m in 0..=n_max {
        normalized_legendre_log_into(m, n_max, ang.cos_phi, ang.sin_phi, &mut col);
        for (i, &lc) in col.iter().enumerate() {
            let l = m + i as u32;
            values[mode_index(l, m as i32)] = apply_theta_factor(lc, m as i32, ang.theta);
            if m > 0 {
                values[mode_index(l, -(m as i32))] =
                    apply_theta_factor(lc, -(m as i32), ang.theta);
            }
        }
    }
    Ok(ModeValues { n_max, values })
}

/// Evaluate every mode dressed by `e^{dress[mode_index]}` directly in
/// linear scale. The dressing must keep values inside `f64` range (Husimi
/// normalization or tempered damping both do); phases of `e^{i m Theta}`
/// are tracked by incremental rotation, so the hot path carries no
/// per-mode trigonometry.
pub fn eval_modes_dressed(p: &TubePoint, n_max: u32, dress: &[f64]) -> Result<Vec<Complex64>> {
    if n_max > MAX_DEGREE {
        return Err(Error::InvalidArgument(format!(
            "degree {n_max} exceeds the validated cap {MAX_DEGREE}"
        )));
    }
    let total = (n_max as usize + 1) * (n_max as usize + 1);
    if dress.len() != total {
        return Err(Error::DimensionMismatch { expected: total, got: dress.len() });
    }
    let ang = complex_angles(p)?;
    let xi_theta = ang.theta.im;
    let rot = Complex64::from_polar(1.0, ang.theta.re);
    let mut phase = Complex64::new(1.0, 0.0);
    let mut out = vec![Complex64::new(0.0, 0.0); total];
    let mut col = vec![Complex64::new(0.0, 0.0); n_max as usize + 1];
    for m in 0..=n_max {
        let mf = m as f64;
        legendre::normalized_legendre_dressed_into(
            m,
            n_max,
            ang.cos_phi,
            ang.sin_phi,
            |l| dress[mode_index(l, m as i32)] - mf * xi_theta,
            &mut col,
        );
        for l in m..=n_max {
            out[mode_index(l, m as i32)] = col[(l - m) as usize] * phase;
        }
        if m > 0 {
            legendre::normalized_legendre_dressed_into(
                m,
                n_max,
                ang.cos_phi,
                ang.sin_phi,
                |l| dress[mode_index(l, -(m as i32))] + mf * xi_theta,
                &mut col,
            );
            let neg_phase =
                if m % 2 == 1 { -phase.conj() } else { phase.conj() };
            for l in m..=n_max {
                out[mode_index(l, -(m as i32))] = col[(l - m) as usize] * neg_phase;
            }
        }
        phase *= rot;
    }
    Ok(out)
}

/// Evaluate a single continued harmonic `Y_{n,m}^C` at `p`.
pub fn eval_harmonic(n: u32, m: i32, p: &TubePoint) -> Result<LogComplex> {
    if m.unsigned_abs() > n {
        return Err(Error::InvalidArgument(format!("|m| = {} exceeds n = {n}", m.abs())));
    }
    if n > MAX_DEGREE {
        return Err(Error::InvalidArgument(format!(
            "degree {n} exceeds the validated cap {MAX_DEGREE}"
        )));
    }
    let ang = complex_angles(p)?;
    let ma = m.unsigned_abs();
    let mut col = Vec::new();
    normalized_legendre_log_into(ma, n, ang.cos_phi, ang.sin_phi, &mut col);
    Ok(apply_theta_factor(*col.last().unwrap(), m, ang.theta))
}

/// `L^2` tube norms of every mode of degree `<= n_max`, computed once per
/// Liouville rule and reused by the spectral kernels.
#[derive(Debug, Clone)]
pub struct NormTable {
    pub n_max: u32,
    pub tau: f64,
    log_l2: Vec<f64>,
}

impl NormTable {
    /// Accumulate `||Y_{l,m}^C||^2 = 2 pi sum_f w_f |Y_{l,m}^C(f)|^2` over
    /// the fiber of the rule (the theta integral is exact by phase
    /// invariance). Deterministic: chunked in parallel, merged in order.
    pub fn compute(rule: &LiouvilleRule, n_max: u32) -> Result<NormTable> {
        if n_max > MAX_DEGREE {
            return Err(Error::InvalidArgument(format!(
                "degree {n_max} exceeds the validated cap {MAX_DEGREE}"
            )));
        }
        let total = (n_max as usize + 1) * (n_max as usize + 1);
        let chunk = 64.max(rule.fiber.len() / (8 * rayon::current_num_threads().max(1)));
        let partials: Vec<Vec<RealLogSum>> = rule
            .fiber
            .par_chunks(chunk)
            .map(|nodes| {
                let mut acc = vec![RealLogSum::new(); total];
                let mut col = Vec::new();
                for node in nodes {
                    let ang = complex_angles(&node.point).expect("rule avoids the poles");
                    let log_w = node.weight.ln();
                    let xi_theta = ang.theta.im;
                    for m in 0..=n_max {
                        legendre::normalized_legendre_log_mags_into(
                            m,
                            n_max,
                            ang.cos_phi,
                            ang.sin_phi,
                            &mut col,
                        );
                        let mf = m as f64;
                        for (i, &lm) in col.iter().enumerate() {
                            let l = m + i as u32;
                            let base = 2.0 * lm + log_w;
                            acc[mode_index(l, m as i32)].add_log(base - 2.0 * mf * xi_theta);
                            if m > 0 {
                                acc[mode_index(l, -(m as i32))]
                                    .add_log(base + 2.0 * mf * xi_theta);
                            }
                        }
                    }
                }
                acc
            })
            .collect();
        let mut merged = vec![RealLogSum::new(); total];
        for part in &partials {
            for (m, p) in merged.iter_mut().zip(part) {
                m.merge(p);
            }
        }
        let log_2pi = (2.0 * std::f64::consts::PI).ln();
        let log_l2 = merged.iter().map(|a| 0.5 * (a.value_log() + log_2pi)).collect();
        Ok(NormTable { n_max, tau: rule.tau, log_l2 })
    }

    pub fn log_l2(&self, l: u32, m: i32) -> f64 {
        self.log_l2[mode_index(l, m)]
    }

    pub fn mode(&self, n: u32, m: i32) -> HarmonicMode {
        HarmonicMode { n, m, mu: mu(n), log_l2_norm: self.log_l2(n, m) }
    }
}

/// `L^p` exponent: a finite `p >= 1` or the sup norm.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Lp {
    Finite(f64),
    Infinity,
}

/// Log of the `L^p(boundary)` norm of `Y_{n,m}^C` under the rule's
/// Liouville measure. The integrand's modulus is independent of the torus
/// angle, so only the fiber is summed.
pub fn tube_lp_norm(n: u32, m: i32, p_exp: Lp, rule: &LiouvilleRule) -> Result<f64> {
    if let Lp::Finite(p) = p_exp {
        if !(p >= 1.0) {
            return Err(Error::InvalidArgument("need p >= 1".into()));
        }
    }
    if m.unsigned_abs() > n || n > MAX_DEGREE {
        return Err(Error::InvalidArgument("invalid mode".into()));
    }
    let ma = m.unsigned_abs();
    let mf = m as f64;
    let log_mags: Vec<f64> = rule
        .fiber
        .par_iter()
        .map(|node| {
            let ang = complex_angles(&node.point).expect("rule avoids the poles");
            let mut col = Vec::new();
            legendre::normalized_legendre_log_mags_into(ma, n, ang.cos_phi, ang.sin_phi, &mut col);
            *col.last().unwrap() - mf * ang.theta.im
        })
        .collect();
    match p_exp {
        Lp::Infinity => Ok(log_mags.iter().copied().fold(f64::NEG_INFINITY, f64::max)),
        Lp::Finite(p) => {
            let mut acc = RealLogSum::new();
            for (lm, node) in log_mags.iter().zip(&rule.fiber) {
                acc.add_log(p * lm + node.weight.ln());
            }
            Ok((acc.value_log() + (2.0 * std::f64::consts::PI).ln()) / p)
        }
    }
}

/// [`tube_lp_norm`] with an under-resolution check: the value must move by
/// less than `1e-4` in log when the fiber resolution doubles.
pub fn tube_lp_norm_checked(
    n: u32,
    m: i32,
    p_exp: Lp,
    rule: &LiouvilleRule,
) -> Result<f64> {
    let coarse = tube_lp_norm(n, m, p_exp, rule)?;
    let fine = crate::sphere_tube::liouville_quadrature(
        rule.tau,
        rule.n_theta,
        2 * rule.n_phi,
        2 * rule.n_alpha,
    )?;
    let refined = tube_lp_norm(n, m, p_exp, &fine)?;
    if (coarse - refined).abs() > 1e-4 {
        return Err(Error::ResolutionError(format!(
            "L^p norm of mode ({n}, {m}) moved by {:.3e} under refinement",
            (coarse - refined).abs()
        )));
    }
    Ok(refined)
}

/// The Husimi-normalized mode value `Y_{n,m}^C(p) / ||Y_{n,m}^C||_{L^2}`.
pub fn husimi_value(n: u32, m: i32, p: &TubePoint, norms: &NormTable) -> Result<LogComplex> {
    Ok(eval_harmonic(n, m, p)?.scaled(-norms.log_l2(n, m)))
}
