//! Spectral localization kernels as finite shell sums over continued
//! spherical harmonics.
//!
//! Three kernels share one evaluator: the smoothed projector with shell
//! weights `chi(lambda - mu_N)` over Husimi-normalized modes, the tempered
//! sum with weights `chi(mu - mu_N) e^{-2 tau mu_N}` over unnormalized
//! continuations, and the sharp short-window sum with indicator weights.
//! Shell weights with polynomial window tails cannot be cut at machine
//! precision (the on-diagonal shell density grows linearly in the degree),
//! so every kernel value carries its truncation diagnostics instead of
//! silently pretending the tail is empty.

use super::window::SpectralWindow;
use crate::harmonics::{
    eval_modes, mode_index, mu, LogComplex, NormTable, RealLogSum, ScaledComplexSum,
};
use crate::sphere_tube::{liouville_quadrature, LiouvilleRule, TubePoint};
use crate::{Error, Result};
use num_complex::Complex64;
use rayon::prelude::*;

/// Default number of shells kept beyond the window center.
pub const DEFAULT_TAIL_WIDTH: u32 = 140;

/// Precomputed evaluation context: Liouville rule plus the norm table of
/// every mode up to `n_max`.
#[derive(Debug, Clone)]
pub struct TubeBasis {
    pub tau: f64,
    pub n_max: u32,
    pub rule: LiouvilleRule,
    pub norms: NormTable,
}

impl TubeBasis {
    pub fn new(tau: f64, n_max: u32, n_theta: usize, n_phi: usize, n_alpha: usize) -> Result<Self> {
        let rule = liouville_quadrature(tau, n_theta, n_phi, n_alpha)?;
        let norms = NormTable::compute(&rule, n_max)?;
        Ok(TubeBasis { tau, n_max, rule, norms })
    }

    /// Resolution scaled as `8 sqrt(n_max)` per angle, floored at 32.
    pub fn standard(tau: f64, n_max: u32) -> Result<Self> {
        let n = 32.max((8.0 * (n_max as f64).sqrt()).ceil() as usize);
        Self::new(tau, n_max, n, n, n)
    }

    /// Liouville volume of the boundary.
    pub fn volume(&self) -> f64 {
        8.0 * std::f64::consts::PI.powi(2) * self.tau
    }
}

/// Shell weights of one localization kernel.
#[derive(Debug, Clone)]
pub struct ShellWeights {
    /// `ln` of the weight of shell `N`, `NEG_INFINITY` when the shell is
    /// dropped; index `N` runs from 0 to the truncation degree.
    pub weights_log: Vec<f64>,
    /// Husimi-normalized modes if true; unnormalized continuations dressed
    /// by `e^{-tau mu_N}` per factor if false.
    pub normalized: bool,
    /// `chi` at the truncation edge, for tail diagnostics.
    pub tail_chi: f64,
    /// Set when a sharp window contains no shell.
    pub empty_window: bool,
}

impl ShellWeights {
    /// Smoothed projector weights `chi(lambda - mu_N)`.
    pub fn projector(window: &SpectralWindow, n_max: u32) -> Self {
        let weights_log: Vec<f64> = (0..=n_max)
            .map(|n| window.chi(window.lambda - mu(n)).ln())
            .collect();
        ShellWeights {
            weights_log,
            normalized: true,
            tail_chi: window.chi(window.lambda - mu(n_max)),
            empty_window: false,
        }
    }

    /// Squared-window weights `chi(lambda - mu_N)^2`, the shell weights of
    /// the composed projector.
    pub fn projector_squared(window: &SpectralWindow, n_max: u32) -> Self {
        let weights_log: Vec<f64> = (0..=n_max)
            .map(|n| 2.0 * window.chi(window.lambda - mu(n)).ln())
            .collect();
        ShellWeights {
            weights_log,
            normalized: true,
            tail_chi: window.chi(window.lambda - mu(n_max)).powi(2),
            empty_window: false,
        }
    }

    /// Tempered weights `chi(mu - mu_N)`; the damping `e^{-2 tau mu_N}` is
    /// folded into the mode dressing.
    pub fn tempered(window: &SpectralWindow, n_max: u32) -> Self {
        let mut w = ShellWeights::projector(window, n_max);
        w.normalized = false;
        w
    }

    /// Sharp indicator of `mu_N in [lambda, lambda + 1]`.
    pub fn short_window(lambda: f64, n_max: u32) -> Self {
        let weights_log: Vec<f64> = (0..=n_max)
            .map(|n| {
                let m = mu(n);
                if m >= lambda && m <= lambda + 1.0 {
                    0.0
                } else {
                    f64::NEG_INFINITY
                }
            })
            .collect();
        let empty = weights_log.iter().all(|&w| w == f64::NEG_INFINITY);
        ShellWeights { weights_log, normalized: true, tail_chi: 0.0, empty_window: empty }
    }

    pub fn truncation_degree(&self) -> u32 {
        self.weights_log.len() as u32 - 1
    }
}

/// Degree at which a window centered at `lambda` is truncated.
pub fn truncation_degree(lambda: f64, tail_width: u32, cap: u32) -> u32 {
    ((lambda.ceil() as u32).saturating_add(tail_width)).min(cap)
}

/// A kernel value with its truncation diagnostics.
#[derive(Debug, Clone, Copy)]
pub struct KernelValue {
    pub value: LogComplex,
    /// Window value at the truncation edge; compare against the cutoff
    /// threshold the caller wants to enforce.
    pub tail_chi: f64,
    pub empty_window: bool,
}

fn dress_log(basis: &TubeBasis, sw: &ShellWeights, n: u32, m: i32) -> f64 {
    if sw.normalized {
        -basis.norms.log_l2(n, m)
    } else {
        -basis.tau * mu(n)
    }
}

/// Evaluate the kernel `sum_N w_N sum_m f_{N,m}(a) conj(f_{N,m}(b))` in
/// log-scaled arithmetic. Hermitian by construction.
pub fn kernel_value(
    basis: &TubeBasis,
    sw: &ShellWeights,
    a: &TubePoint,
    b: &TubePoint,
) -> Result<KernelValue> {
    let n_max = sw.truncation_degree();
    if n_max > basis.n_max {
        return Err(Error::InvalidArgument(format!(
            "kernel truncated at degree {n_max} exceeds the basis cap {}",
            basis.n_max
        )));
    }
    let ma = eval_modes(a, n_max)?;
    let mb = eval_modes(b, n_max)?;
    let mut acc = ScaledComplexSum::new();
    for n in 0..=n_max {
        let w = sw.weights_log[n as usize];
        if w == f64::NEG_INFINITY {
            continue;
        }
        for m in -(n as i32)..=(n as i32) {
            let dress = dress_log(basis, sw, n, m);
            let term = ma.value(n, m).mul(mb.value(n, m).conj());
            acc.add(term.scaled(w + 2.0 * dress));
        }
    }
    Ok(KernelValue {
        value: acc.to_log_complex(),
        tail_chi: sw.tail_chi,
        empty_window: sw.empty_window,
    })
}

/// On-diagonal fast path: `ln K(a, a)` (real and positive).
pub fn kernel_diagonal(basis: &TubeBasis, sw: &ShellWeights, a: &TubePoint) -> Result<f64> {
    let n_max = sw.truncation_degree();
    if n_max > basis.n_max {
        return Err(Error::InvalidArgument("truncation beyond basis cap".into()));
    }
    let ma = eval_modes(a, n_max)?;
    let mut acc = RealLogSum::new();
    for n in 0..=n_max {
        let w = sw.weights_log[n as usize];
        if w == f64::NEG_INFINITY {
            continue;
        }
        for m in -(n as i32)..=(n as i32) {
            let dress = dress_log(basis, sw, n, m);
            acc.add_log(w + 2.0 * (ma.value(n, m).log_mag + dress));
        }
    }
    Ok(acc.value_log())
}

/// `L^r` exponent for the row integrals.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RowExponent {
    Finite(f64),
    Sup,
}

fn dress_table(basis: &TubeBasis, normalized: bool, n_max: u32) -> Vec<f64> {
    let total = (n_max as usize + 1) * (n_max as usize + 1);
    let mut out = vec![0.0; total];
    for n in 0..=n_max {
        for m in -(n as i32)..=(n as i32) {
            out[mode_index(n, m)] = if normalized {
                -basis.norms.log_l2(n, m)
            } else {
                -basis.tau * mu(n)
            };
        }
    }
    out
}

/// Row integrals of several kernels sharing one source point:
/// `[spec][exponent] -> ln int |K_spec(z, w)|^r dmu(w)` over the full 3-D
/// rule (or `ln sup_w |K|` for [`RowExponent::Sup`]).
///
/// All specs must dress modes the same way. The torus direction is handled
/// by the exact Fourier structure `K(z, w(theta)) = sum_m C_m e^{-i m theta}`,
/// so the sweep over the fiber does the heavy mode evaluations once per
/// node. Deterministic: chunked in parallel, merged in chunk order.
pub fn kernel_row_integrals(
    basis: &TubeBasis,
    specs: &[ShellWeights],
    exponents: &[RowExponent],
    z: &TubePoint,
) -> Result<Vec<Vec<f64>>> {
    if specs.is_empty() || exponents.is_empty() {
        return Err(Error::InvalidArgument("need at least one spec and exponent".into()));
    }
    let normalized = specs[0].normalized;
    if specs.iter().any(|s| s.normalized != normalized) {
        return Err(Error::InvalidArgument("row integrals need uniform mode dressing".into()));
    }
    let n_max = specs.iter().map(|s| s.truncation_degree()).max().unwrap();
    if n_max > basis.n_max {
        return Err(Error::InvalidArgument("truncation beyond basis cap".into()));
    }
    for ex in exponents {
        if let RowExponent::Finite(r) = ex {
            if !(*r >= 1.0) {
                return Err(Error::InvalidArgument("row exponent must be >= 1".into()));
            }
        }
    }
    let n_modes = (n_max as usize + 1) * (n_max as usize + 1);
    let m_span = 2 * n_max as usize + 1;

    // Linear shell weights, padded to the common degree.
    let lin_weights: Vec<Vec<f64>> = specs
        .iter()
        .map(|s| {
            let mut w: Vec<f64> = s.weights_log.iter().map(|&l| l.exp()).collect();
            w.resize(n_max as usize + 1, 0.0);
            w
        })
        .collect();

    let dress = dress_table(basis, normalized, n_max);
    let dz = crate::harmonics::eval_modes_dressed(z, n_max, &dress)?;

    let theta_angles: Vec<f64> = basis.rule.theta_angles().collect();
    let dtheta = basis.rule.theta_mass() / theta_angles.len() as f64;

    struct Partial {
        sums: Vec<Vec<f64>>, // [spec][exp] linear integrals
        sups: Vec<f64>,      // [spec] max |K|
    }

    let chunk = 16.max(basis.rule.fiber.len() / (8 * rayon::current_num_threads().max(1)));
    let partials: Vec<Partial> = basis
        .rule
        .fiber
        .par_chunks(chunk)
        .map(|nodes| {
            let mut sums = vec![vec![0.0; exponents.len()]; specs.len()];
            let mut sups = vec![0.0_f64; specs.len()];
            let mut prod = vec![Complex64::new(0.0, 0.0); n_modes];
            let mut coeffs = vec![Complex64::new(0.0, 0.0); m_span];
            for node in nodes {
                let df = crate::harmonics::eval_modes_dressed(&node.point, n_max, &dress)
                    .expect("rule avoids the poles");
                for i in 0..n_modes {
                    prod[i] = dz[i] * df[i].conj();
                }
                for (si, w) in lin_weights.iter().enumerate() {
                    // C_m = sum_N w_N prod[N, m].
                    for c in coeffs.iter_mut() {
                        *c = Complex64::new(0.0, 0.0);
                    }
                    for n in 0..=n_max {
                        let wn = w[n as usize];
                        if wn == 0.0 {
                            continue;
                        }
                        let base = (n as usize) * (n as usize);
                        for (j, c) in coeffs[(n_max - n) as usize..=(n_max + n) as usize]
                            .iter_mut()
                            .enumerate()
                        {
                            *c += wn * prod[base + j];
                        }
                    }
                    // The Fourier band of the localized kernel is narrow:
                    // restrict the theta evaluation to coefficients above
                    // 1e-13 of the peak.
                    let peak = coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
                    let floor = peak * 1e-13;
                    let mut lo = 0usize;
                    while lo + 1 < m_span && coeffs[lo].norm() < floor {
                        lo += 1;
                    }
                    let mut hi = m_span - 1;
                    while hi > lo && coeffs[hi].norm() < floor {
                        hi -= 1;
                    }
                    let band = &coeffs[lo..=hi];
                    let w3 = node.weight * dtheta;
                    for &theta in &theta_angles {
                        let e = Complex64::from_polar(1.0, -theta);
                        // Horner over the band; the dropped prefactor
                        // e^{-i m_lo theta} is unimodular and only the
                        // magnitude is consumed below.
                        let mut acc = Complex64::new(0.0, 0.0);
                        for c in band.iter().rev() {
                            acc = acc * e + c;
                        }
                        let mag = acc.norm();
                        sups[si] = sups[si].max(mag);
                        for (ei, ex) in exponents.iter().enumerate() {
                            if let RowExponent::Finite(r) = ex {
                                sums[si][ei] += w3 * mag.powf(*r);
                            }
                        }
                    }
                }
            }
            Partial { sums, sups }
        })
        .collect();

    let mut sums = vec![vec![0.0; exponents.len()]; specs.len()];
    let mut sups = vec![0.0_f64; specs.len()];
    for p in &partials {
        for si in 0..specs.len() {
            sups[si] = sups[si].max(p.sups[si]);
            for ei in 0..exponents.len() {
                sums[si][ei] += p.sums[si][ei];
            }
        }
    }
    Ok(specs
        .iter()
        .enumerate()
        .map(|(si, _)| {
            exponents
                .iter()
                .enumerate()
                .map(|(ei, ex)| match ex {
                    RowExponent::Finite(_) => sums[si][ei].ln(),
                    RowExponent::Sup => sups[si].ln(),
                })
                .collect()
        })
        .collect())
}

/// Inner products `<h_{n2, m}, h_{n1, m}>` of Husimi modes with a common
/// order, by fiber quadrature (the torus integral is exact). Returns the
/// column over `n2 in [m, n_limit]`.
pub fn husimi_gram_column(
    basis: &TubeBasis,
    m: u32,
    n1: u32,
    n_limit: u32,
) -> Result<Vec<Complex64>> {
    if n_limit > basis.n_max || n1 < m || n1 > n_limit {
        return Err(Error::InvalidArgument("gram column out of range".into()));
    }
    let cols: Vec<Vec<LogComplex>> = basis
        .rule
        .fiber
        .par_iter()
        .map(|node| {
            let ang = crate::harmonics::complex_angles(&node.point).expect("no poles");
            let mut col = Vec::new();
            crate::harmonics::legendre::normalized_legendre_log_into(
                m,
                n_limit,
                ang.cos_phi,
                ang.sin_phi,
                &mut col,
            );
            // Dress with e^{i m Theta} magnitude and the node weight; the
            // phase of e^{i m Theta} cancels between the pair below, but the
            // magnitude does not.
            let mf = m as f64;
            col.iter()
                .map(|lc| {
                    LogComplex::new(
                        lc.log_mag - mf * ang.theta.im + 0.5 * node.weight.ln(),
                        lc.phase,
                    )
                })
                .collect()
        })
        .collect();
    let log_2pi = (2.0 * std::f64::consts::PI).ln();
    let out: Vec<Complex64> = (m..=n_limit)
        .map(|n2| {
            let mut acc = ScaledComplexSum::new();
            for col in &cols {
                let a = col[(n2 - m) as usize];
                let b = col[(n1 - m) as usize];
                acc.add(a.mul(b.conj()));
            }
            acc.to_log_complex()
                .scaled(
                    log_2pi
                        - basis.norms.log_l2(n2, m as i32)
                        - basis.norms.log_l2(n1, m as i32),
                )
                .to_complex()
        })
        .collect();
    Ok(out)
}
