//! Quadrature rules, log-log slope fitting, seeded random symplectic
//! matrices, a log-gamma routine, and the exact stationary-phase matrix
//! checks. Everything here is deterministic given its inputs.

pub mod mat;
pub mod rational;

use crate::symplectic::SymplecticMatrix;
use crate::{Error, Result};
use mat::Mat;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rational::{RatMat4, Ratio};

/// Which measure a 1-D rule integrates against.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DomainTag {
    /// `[-1, 1]` with unit weight (Gauss--Legendre).
    Interval,
    /// `[0, 2pi)` with unit weight (equispaced trapezoid, exact for
    /// trigonometric polynomials below the node count).
    PeriodicCircle,
    /// The real line against `e^{-x^2}` (Gauss--Hermite).
    GaussHermiteLine,
}

/// A 1-D quadrature rule: nodes, positive weights and the measure tag.
#[derive(Debug, Clone)]
pub struct QuadratureRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    pub domain: DomainTag,
}

impl QuadratureRule {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// `sum_i w_i f(x_i)`.
    pub fn integrate(&self, mut f: impl FnMut(f64) -> f64) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(&x, &w)| w * f(x)).sum()
    }
}

/// Gauss--Hermite rule of the given order for `int f(x) e^{-x^2} dx`.
///
/// Exact for polynomials of degree `2 * order - 1`. Nodes are found by
/// Newton iteration on the orthonormal Hermite recurrence, weights from the
/// derivative values.
pub fn gauss_hermite(order: usize) -> Result<QuadratureRule> {
    if order == 0 {
        return Err(Error::InvalidArgument("Gauss-Hermite order must be >= 1".into()));
    }
    let n = order;
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = (n + 1) / 2;
    let mut z = 0.0_f64;
    for i in 0..m {
        // Initial guesses for roots in decreasing order, then Newton.
        z = match i {
            0 => {
                let a = (2 * n + 1) as f64;
                a.sqrt() - 1.85575 * a.powf(-1.0 / 6.0)
            }
            1 => z - 1.14 * (n as f64).powf(0.426) / z,
            2 => 1.86 * z - 0.86 * nodes[0],
            3 => 1.91 * z - 0.91 * nodes[1],
            _ => 2.0 * z - nodes[i - 2],
        };
        let mut pp = 0.0;
        for _ in 0..100 {
            // Orthonormal recurrence: p_{j+1} = x sqrt(2/(j+1)) p_j - sqrt(j/(j+1)) p_{j-1}.
            let mut p1 = std::f64::consts::PI.powf(-0.25);
            let mut p2 = 0.0;
            for j in 0..n {
                let p3 = p2;
                p2 = p1;
                let jf = j as f64;
                p1 = z * (2.0 / (jf + 1.0)).sqrt() * p2 - (jf / (jf + 1.0)).sqrt() * p3;
            }
            pp = (2.0 * n as f64).sqrt() * p2;
            let dz = p1 / pp;
            z -= dz;
            if dz.abs() < 1e-15 {
                break;
            }
        }
        nodes[i] = z;
        nodes[n - 1 - i] = -z;
        weights[i] = 2.0 / (pp * pp);
        weights[n - 1 - i] = weights[i];
    }
    // Store in increasing order.
    nodes.reverse();
    weights.reverse();
    Ok(QuadratureRule { nodes, weights, domain: DomainTag::GaussHermiteLine })
}

/// Gauss--Legendre rule of the given order on `[-1, 1]`.
pub fn gauss_legendre(order: usize) -> Result<QuadratureRule> {
    if order == 0 {
        return Err(Error::InvalidArgument("Gauss-Legendre order must be >= 1".into()));
    }
    let n = order;
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = (n + 1) / 2;
    for i in 0..m {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut pp = 0.0;
        for _ in 0..100 {
            let mut p1 = 1.0;
            let mut p2 = 0.0;
            for j in 0..n {
                let p3 = p2;
                p2 = p1;
                let jf = j as f64;
                p1 = ((2.0 * jf + 1.0) * z * p2 - jf * p3) / (jf + 1.0);
            }
            pp = n as f64 * (z * p1 - p2) / (z * z - 1.0);
            let dz = p1 / pp;
            z -= dz;
            if dz.abs() < 1e-15 {
                break;
            }
        }
        nodes[i] = -z;
        nodes[n - 1 - i] = z;
        let w = 2.0 / ((1.0 - z * z) * pp * pp);
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    Ok(QuadratureRule { nodes, weights, domain: DomainTag::Interval })
}

/// Equispaced rule on `[0, 2pi)` with weights `2pi / n`; integrates
/// `e^{i m theta}` to zero exactly for `0 < |m| < n`.
pub fn periodic_rule(n: usize) -> Result<QuadratureRule> {
    if n == 0 {
        return Err(Error::InvalidArgument("periodic rule needs >= 1 node".into()));
    }
    let h = 2.0 * std::f64::consts::PI / n as f64;
    Ok(QuadratureRule {
        nodes: (0..n).map(|i| i as f64 * h).collect(),
        weights: vec![h; n],
        domain: DomainTag::PeriodicCircle,
    })
}

/// Result of a least-squares line through `(log x, log y)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogLogFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
}

/// Fit `log y = slope * log x + intercept` by unweighted least squares.
///
/// Needs at least three points with distinct positive `x` and positive `y`.
pub fn fit_loglog(series: &[(f64, f64)]) -> Result<LogLogFit> {
    if series.len() < 3 {
        return Err(Error::InsufficientData(format!(
            "log-log fit needs >= 3 points, got {}",
            series.len()
        )));
    }
    for &(x, y) in series {
        if !(x > 0.0) || !(y > 0.0) || !x.is_finite() || !y.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "log-log fit needs positive finite data, got ({x}, {y})"
            )));
        }
    }
    let logs: Vec<(f64, f64)> = series.iter().map(|&(x, y)| (x.ln(), y.ln())).collect();
    let n = logs.len() as f64;
    let mean_x = logs.iter().map(|p| p.0).sum::<f64>() / n;
    let mean_y = logs.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = logs.iter().map(|p| (p.0 - mean_x).powi(2)).sum();
    let sxy: f64 = logs.iter().map(|p| (p.0 - mean_x) * (p.1 - mean_y)).sum();
    if sxx == 0.0 {
        return Err(Error::InsufficientData("all x values coincide".into()));
    }
    let distinct = {
        let mut xs: Vec<f64> = logs.iter().map(|p| p.0).collect();
        xs.sort_by(f64::total_cmp);
        xs.windows(2).filter(|w| w[1] > w[0]).count() + 1
    };
    if distinct < 3 {
        return Err(Error::InsufficientData("log-log fit needs >= 3 distinct x".into()));
    }
    let slope = sxy / sxx;
    let intercept = mean_y - slope * mean_x;
    let ss_tot: f64 = logs.iter().map(|p| (p.1 - mean_y).powi(2)).sum();
    let ss_res: f64 = logs
        .iter()
        .map(|p| (p.1 - (slope * p.0 + intercept)).powi(2))
        .sum();
    let r_squared = if ss_tot == 0.0 {
        1.0
    } else {
        (1.0 - ss_res / ss_tot).clamp(0.0, 1.0)
    };
    Ok(LogLogFit { slope, intercept, r_squared })
}

/// Unweighted least-squares line `y = slope * x + intercept` in linear
/// scale; companion to [`fit_loglog`] for profiles that are exponents of a
/// known abscissa rather than power laws.
pub fn fit_linear(series: &[(f64, f64)]) -> Result<LogLogFit> {
    if series.len() < 2 {
        return Err(Error::InsufficientData(format!(
            "linear fit needs >= 2 points, got {}",
            series.len()
        )));
    }
    let n = series.len() as f64;
    let mean_x = series.iter().map(|p| p.0).sum::<f64>() / n;
    let mean_y = series.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = series.iter().map(|p| (p.0 - mean_x).powi(2)).sum();
    let sxy: f64 = series.iter().map(|p| (p.0 - mean_x) * (p.1 - mean_y)).sum();
    if sxx == 0.0 {
        return Err(Error::InsufficientData("all x values coincide".into()));
    }
    let slope = sxy / sxx;
    let intercept = mean_y - slope * mean_x;
    let ss_tot: f64 = series.iter().map(|p| (p.1 - mean_y).powi(2)).sum();
    let ss_res: f64 = series
        .iter()
        .map(|p| (p.1 - (slope * p.0 + intercept)).powi(2))
        .sum();
    let r_squared = if ss_tot == 0.0 {
        1.0
    } else {
        (1.0 - ss_res / ss_tot).clamp(0.0, 1.0)
    };
    Ok(LogLogFit { slope, intercept, r_squared })
}

/// Seeded random symplectic matrix `exp(J S)` with `S` symmetric and entries
/// uniform in `[-scale, scale]`. Membership in the group is exact up to the
/// floating error of the exponential.
pub fn random_symplectic(k: usize, seed: u64, scale: f64) -> Result<SymplecticMatrix> {
    if k == 0 {
        return Err(Error::InvalidArgument("need k >= 1 degrees of freedom".into()));
    }
    if !(scale >= 0.0) {
        return Err(Error::InvalidArgument("scale must be nonnegative".into()));
    }
    let n = 2 * k;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut s = Mat::zeros(n);
    for i in 0..n {
        for j in i..n {
            let v = if scale == 0.0 { 0.0 } else { rng.gen_range(-scale..=scale) };
            s[(i, j)] = v;
            s[(j, i)] = v;
        }
    }
    let j = Mat::symplectic_form(k);
    SymplecticMatrix::new(k, j.mul(&s).exp())
}

/// Natural log of the gamma function (Lanczos, g = 7), good to about
/// 1e-13 relative for positive arguments.
pub fn ln_gamma(x: f64) -> f64 {
    const COEF: [f64; 9] = [
        0.999_999_999_999_809_93,
        676.520_368_121_885_1,
        -1_259.139_216_722_402_8,
        771.323_428_777_653_13,
        -176.615_029_162_140_59,
        12.507_343_278_686_905,
        -0.138_571_095_265_720_12,
        9.984_369_578_019_571_6e-6,
        1.505_632_735_149_311_6e-7,
    ];
    assert!(x > 0.0, "ln_gamma needs a positive argument");
    if x < 0.5 {
        // Reflection: gamma(x) gamma(1-x) = pi / sin(pi x).
        let pi = std::f64::consts::PI;
        return (pi / (pi * x).sin()).ln() - ln_gamma(1.0 - x);
    }
    let x = x - 1.0;
    let t = x + 7.5;
    let mut a = COEF[0];
    for (i, &c) in COEF.iter().enumerate().skip(1) {
        a += c / (x + i as f64);
    }
    0.5 * (2.0 * std::f64::consts::PI).ln() + (x + 0.5) * t.ln() - t + a.ln()
}

/// The stationary-phase data at the critical point
/// `(Re w0, r, sigma1, sigma2) = (0, 0, 1/tau, 1/tau)` of the reduced phase
/// `psi = -r - (sigma2/2) Re w0 + (sigma1/2)(Re w0 + 2 tau r)`.
///
/// Matrix rows and columns are ordered `(r, sigma1, sigma2, Re w0)`.
#[derive(Debug, Clone)]
pub struct PhaseCriticalData {
    pub hessian: Mat,
    pub hessian_inverse: Mat,
    /// `(Re w0, r, sigma1, sigma2)`.
    pub critical_point: [f64; 4],
    pub tau: f64,
}

fn phase_gradient(tau: f64, r: f64, sigma1: f64, sigma2: f64, re_w0: f64) -> [f64; 4] {
    [
        -1.0 + tau * sigma1,
        0.5 * (re_w0 + 2.0 * tau * r),
        -0.5 * re_w0,
        0.5 * (sigma1 - sigma2),
    ]
}

fn phase_hessian_entries(tau: f64) -> (Mat, Mat) {
    let h = Mat::from_rows(&[
        &[0.0, tau, 0.0, 0.0],
        &[tau, 0.0, 0.0, 0.5],
        &[0.0, 0.0, 0.0, -0.5],
        &[0.0, 0.5, -0.5, 0.0],
    ]);
    let ti = 1.0 / tau;
    let hinv = Mat::from_rows(&[
        &[0.0, ti, ti, 0.0],
        &[ti, 0.0, 0.0, 0.0],
        &[ti, 0.0, 0.0, -2.0],
        &[0.0, 0.0, -2.0, 0.0],
    ]);
    (h, hinv)
}

/// Build the phase Hessian and its inverse, confirm the product is the
/// identity and that the critical point kills the gradient.
pub fn verify_phase_hessian(tau: f64) -> Result<PhaseCriticalData> {
    if !(tau > 0.0) {
        return Err(Error::InvalidArgument("tau must be positive".into()));
    }
    let (h, hinv) = phase_hessian_entries(tau);
    let prod = h.mul(&hinv);
    let defect = prod.max_abs_diff(&Mat::identity(4));
    if defect > 1e-12 {
        return Err(Error::InternalConsistency(format!(
            "Hessian times inverse deviates from identity by {defect:.3e}"
        )));
    }
    let grad = phase_gradient(tau, 0.0, 1.0 / tau, 1.0 / tau, 0.0);
    let gmax = grad.iter().map(|g| g.abs()).fold(0.0, f64::max);
    if gmax > 1e-12 {
        return Err(Error::InternalConsistency(format!(
            "gradient at the critical point has magnitude {gmax:.3e}"
        )));
    }
    Ok(PhaseCriticalData {
        hessian: h,
        hessian_inverse: hinv,
        critical_point: [0.0, 0.0, 1.0 / tau, 1.0 / tau],
        tau,
    })
}

/// Exact-rational counterpart of [`verify_phase_hessian`].
#[derive(Debug, Clone)]
pub struct PhaseCriticalDataExact {
    pub hessian: RatMat4,
    pub hessian_inverse: RatMat4,
    pub tau: Ratio,
}

/// Same checks as [`verify_phase_hessian`] but in exact rational arithmetic;
/// the product identity and the vanishing gradient hold with no rounding.
pub fn phase_hessian_exact(tau: Ratio) -> Result<PhaseCriticalDataExact> {
    if tau.num <= 0 {
        return Err(Error::InvalidArgument("tau must be positive".into()));
    }
    let half = Ratio::new(1, 2);
    let z = Ratio::zero();
    let h = RatMat4([
        [z, tau, z, z],
        [tau, z, z, half],
        [z, z, z, -half],
        [z, half, -half, z],
    ]);
    let ti = tau.recip();
    let two = Ratio::new(2, 1);
    let hinv = RatMat4([
        [z, ti, ti, z],
        [ti, z, z, z],
        [ti, z, z, -two],
        [z, z, -two, z],
    ]);
    if h.mul(&hinv) != RatMat4::identity() {
        return Err(Error::InternalConsistency(
            "exact Hessian product is not the identity".into(),
        ));
    }
    if !h.is_symmetric() {
        return Err(Error::InternalConsistency("exact Hessian is not symmetric".into()));
    }
    // Gradient at (r, sigma1, sigma2, Re w0) = (0, 1/tau, 1/tau, 0).
    let grad = [
        -Ratio::one() + tau * ti,
        z, // (Re w0 + 2 tau r) / 2 with both zero
        z, // -Re w0 / 2
        (ti - ti) * half,
    ];
    if grad.iter().any(|g| !g.is_zero()) {
        return Err(Error::InternalConsistency(
            "exact gradient does not vanish at the critical point".into(),
        ));
    }
    Ok(PhaseCriticalDataExact { hessian: h, hessian_inverse: hinv, tau })
}
