//! Experiment procedures: each one sweeps a kernel over a parameter grid,
//! compares against the model prediction where there is one, and returns
//! tagged series with fits. All procedures are deterministic functions of
//! their inputs.

use super::kernel::{
    kernel_diagonal, kernel_row_integrals, kernel_value, truncation_degree, RowExponent,
    ShellWeights, TubeBasis,
};
use super::window::{SpectralWindow, WindowKind};
use super::KernelSeries;
use crate::bargmann_fock::{metaplectic_kernel_closed_from_blocks, Branch};
use crate::harmonics::{c_n_log, mu, RealLogSum};
use crate::numerics::{fit_linear, LogLogFit};
use crate::sphere_tube::{displace, geodesic_flow, jacobi_linearization, TubePoint};
use crate::symplectic::{complexify, ComplexSymplecticBlocks};
use crate::{Error, Result};
use num_complex::Complex64;

/// Window shorthand used by every experiment.
#[derive(Debug, Clone, Copy)]
pub struct WindowConfig {
    pub epsilon: f64,
    pub kind: WindowKind,
    /// Shells kept past the window center before truncation.
    pub tail_width: u32,
}

impl WindowConfig {
    pub fn new(epsilon: f64, kind: WindowKind) -> Self {
        WindowConfig { epsilon, kind, tail_width: super::kernel::DEFAULT_TAIL_WIDTH }
    }

    fn window(&self, lambda: f64) -> Result<SpectralWindow> {
        SpectralWindow::new(self.epsilon, self.kind, lambda)
    }

    fn projector_shells(
        &self,
        basis: &TubeBasis,
        lambda: f64,
    ) -> Result<(SpectralWindow, ShellWeights)> {
        let w = self.window(lambda)?;
        let deg = truncation_degree(lambda, self.tail_width, basis.n_max);
        Ok((w, ShellWeights::projector(&w, deg)))
    }
}

/// A Heisenberg offset `(theta, u, phi, v)` for the scaling experiment.
#[derive(Debug, Clone, Copy)]
pub struct ScalingOffset {
    pub theta: f64,
    pub u: Complex64,
    pub phi: f64,
    pub v: Complex64,
}

/// Output of [`scaling_experiment`].
#[derive(Debug, Clone)]
pub struct ScalingResult {
    /// `lambda -> Pi_{chi,lambda}(p, p)`, with its log-log fit (the
    /// on-diagonal growth law).
    pub on_diagonal: KernelSeries,
    /// `lambda -> max_offsets | |R| - R_model | / R_model`.
    pub deviation: KernelSeries,
    /// Per-offset detail at the largest lambda: `(|R|, R_model)` pairs.
    pub ratios_at_top: Vec<(f64, f64)>,
}

/// On-shell scaling test: normalized kernel ratios at Heisenberg offsets of
/// `(p, flow_s(p))` against the model metaplectic kernel with the rotation
/// `M_s`, moduli only.
pub fn scaling_experiment(
    basis: &TubeBasis,
    cfg: &WindowConfig,
    s: f64,
    lambda_grid: &[f64],
    offsets: &[ScalingOffset],
    p: &TubePoint,
) -> Result<ScalingResult> {
    if s.abs() >= cfg.epsilon {
        return Err(Error::InvalidArgument(format!(
            "flow time s = {s} outside the window support (epsilon = {})",
            cfg.epsilon
        )));
    }
    let blocks = complexify(&jacobi_linearization(s))?;
    let sqrt_tau = basis.tau.sqrt();
    let model_ratio = |u: Complex64, v: Complex64| -> Result<f64> {
        let zero = [Complex64::new(0.0, 0.0)];
        let num = metaplectic_kernel_closed_from_blocks(
            &blocks,
            &[u / sqrt_tau],
            &[v / sqrt_tau],
            Branch::Principal,
        )?;
        let den =
            metaplectic_kernel_closed_from_blocks(&blocks, &zero, &zero, Branch::Principal)?;
        Ok(num.value.norm() / den.value.norm())
    };

    let mut on_diagonal = KernelSeries::new("scaling.on_diagonal")
        .with_param("s", s)
        .with_param("tau", basis.tau);
    let mut deviation = KernelSeries::new("scaling.deviation").with_param("s", s);
    let mut ratios_at_top = Vec::new();

    for (li, &lambda) in lambda_grid.iter().enumerate() {
        let (_, shells) = cfg.projector_shells(basis, lambda)?;
        let diag = kernel_diagonal(basis, &shells, p)?;
        on_diagonal.push_real(lambda, diag.exp());

        let q = geodesic_flow(p, s);
        let reference = kernel_value(basis, &shells, p, &q)?.value.log_mag;
        let mut worst = 0.0_f64;
        for off in offsets {
            let a = displace(p, off.theta, off.u, lambda)?;
            let b = displace(&q, off.phi, off.v, lambda)?;
            let ratio =
                (kernel_value(basis, &shells, &a, &b)?.value.log_mag - reference).exp();
            let model = model_ratio(off.u, off.v)?;
            let dev = (ratio - model).abs() / model;
            worst = worst.max(dev);
            if li + 1 == lambda_grid.len() {
                ratios_at_top.push((ratio, model));
            }
        }
        deviation.push_real(lambda, worst);
    }
    on_diagonal.fit_loglog();
    deviation.fit_loglog();
    Ok(ScalingResult { on_diagonal, deviation, ratios_at_top })
}

/// Output of [`decay_experiment`].
#[derive(Debug, Clone)]
pub struct DecayResult {
    /// `x = lambda d^2 / (2 tau)  ->  y = -log(|K(p, w_d)| / K(p, p))` over
    /// the in-regime points; `fit` holds the plain linear fit.
    pub transverse: KernelSeries,
    /// `lambda -> |K(p, flow_t(p))| / K(p, p)` at a fixed along-orbit time;
    /// `fit` holds the log-log flatness slope.
    pub along_orbit: KernelSeries,
    /// Points excluded by the `d <= lambda^{-1/3}` regime.
    pub excluded: usize,
    pub transverse_fit: LogLogFit,
    pub orbit_flat_slope: f64,
}

/// Gaussian decay test transverse to the orbit, with the along-orbit
/// comparison series.
pub fn decay_experiment(
    basis: &TubeBasis,
    cfg: &WindowConfig,
    p: &TubePoint,
    lambda_grid: &[f64],
    distance_grid: &[f64],
    orbit_time: f64,
) -> Result<DecayResult> {
    let mut transverse = KernelSeries::new("decay.transverse").with_param("tau", basis.tau);
    let mut along_orbit = KernelSeries::new("decay.along_orbit").with_param("t", orbit_time);
    let mut pairs = Vec::new();
    let mut excluded = 0usize;
    for &lambda in lambda_grid {
        let (_, shells) = cfg.projector_shells(basis, lambda)?;
        let diag = kernel_diagonal(basis, &shells, p)?;
        for &d in distance_grid {
            if d <= 0.0 {
                continue;
            }
            let in_regime = d <= lambda.powf(-1.0 / 3.0);
            let u = Complex64::new(d * lambda.sqrt(), 0.0);
            let w = displace(p, 0.0, u, lambda)?;
            let y = diag - kernel_value(basis, &shells, p, &w)?.value.log_mag;
            let x = lambda * d * d / (2.0 * basis.tau);
            if in_regime {
                transverse.push_real(x, y);
                pairs.push((x, y));
            } else {
                excluded += 1;
            }
        }
        let q = geodesic_flow(p, orbit_time);
        let ratio = (kernel_value(basis, &shells, p, &q)?.value.log_mag - diag).exp();
        along_orbit.push_real(lambda, ratio);
    }
    if pairs.len() < 2 {
        return Err(Error::InsufficientData(
            "decay experiment needs >= 2 in-regime points".into(),
        ));
    }
    let transverse_fit = fit_linear(&pairs)?;
    transverse.fit = Some(transverse_fit);
    along_orbit.fit_loglog();
    let orbit_flat_slope = along_orbit.fit.map(|f| f.slope).unwrap_or(f64::NAN);
    Ok(DecayResult { transverse, along_orbit, excluded, transverse_fit, orbit_flat_slope })
}

/// Output of [`opnorm_experiment`].
#[derive(Debug, Clone)]
pub struct OpnormResult {
    /// `lambda -> [sup_z int |K(z, w)|^r dw]^{1/r}` (Schur--Young majorant).
    pub majorant: KernelSeries,
    /// `lambda -> ||K_{chi^2}(., w)||_q / ||K_chi(., w)||_p` (sharpness
    /// witness).
    pub witness: KernelSeries,
}

/// Several `L^p -> L^q` pairs sharing one fiber sweep: the specs (the
/// `chi` and `chi^2` kernels per `lambda`) and the union of exponents are
/// computed together, then each pair reads off its columns. The row
/// integral is the same at every source point by rotation invariance, so
/// one generic point realizes the sup.
pub fn opnorm_experiment_multi(
    basis: &TubeBasis,
    cfg: &WindowConfig,
    pairs: &[(f64, f64)],
    lambda_grid: &[f64],
    z: &TubePoint,
) -> Result<Vec<OpnormResult>> {
    let inv = |x: f64| if x.is_infinite() { 0.0 } else { 1.0 / x };
    let mut exponents: Vec<RowExponent> = Vec::new();
    let col_of = |e: RowExponent, exps: &mut Vec<RowExponent>| -> usize {
        if let Some(i) = exps.iter().position(|x| *x == e) {
            i
        } else {
            exps.push(e);
            exps.len() - 1
        }
    };
    struct PairCols {
        r: f64,
        r_col: usize,
        q_col: usize,
        p_col: usize,
        p_exp: f64,
        q_exp: f64,
    }
    let mut cols = Vec::new();
    for &(p_exp, q_exp) in pairs {
        if !(2.0 <= p_exp) || !(p_exp <= q_exp) {
            return Err(Error::InvalidArgument("need 2 <= p <= q <= infinity".into()));
        }
        if p_exp.is_infinite() {
            return Err(Error::InvalidArgument("p = infinity is not in scope".into()));
        }
        let r = 1.0 / (1.0 - inv(p_exp) + inv(q_exp));
        let r_col = col_of(RowExponent::Finite(r), &mut exponents);
        let q_col = if q_exp.is_infinite() {
            col_of(RowExponent::Sup, &mut exponents)
        } else {
            col_of(RowExponent::Finite(q_exp), &mut exponents)
        };
        let p_col = col_of(RowExponent::Finite(p_exp), &mut exponents);
        cols.push(PairCols { r, r_col, q_col, p_col, p_exp, q_exp });
    }

    let mut specs = Vec::new();
    for &lambda in lambda_grid {
        let w = cfg.window(lambda)?;
        let deg = truncation_degree(lambda, cfg.tail_width, basis.n_max);
        specs.push(ShellWeights::projector(&w, deg));
        specs.push(ShellWeights::projector_squared(&w, deg));
    }
    let table = kernel_row_integrals(basis, &specs, &exponents, z)?;

    let mut out = Vec::new();
    for pc in &cols {
        let mut majorant = KernelSeries::new("opnorm.majorant")
            .with_param("p", pc.p_exp)
            .with_param("q", pc.q_exp)
            .with_param("r", pc.r);
        let mut witness = KernelSeries::new("opnorm.witness")
            .with_param("p", pc.p_exp)
            .with_param("q", pc.q_exp);
        for (i, &lambda) in lambda_grid.iter().enumerate() {
            let chi_row = &table[2 * i];
            let chi2_row = &table[2 * i + 1];
            majorant.push_real(lambda, (chi_row[pc.r_col] / pc.r).exp());
            let num = if pc.q_exp.is_infinite() {
                chi2_row[pc.q_col]
            } else {
                chi2_row[pc.q_col] / pc.q_exp
            };
            let den = chi_row[pc.p_col] / pc.p_exp;
            witness.push_real(lambda, (num - den).exp());
        }
        majorant.fit_loglog();
        witness.fit_loglog();
        out.push(OpnormResult { majorant, witness });
    }
    Ok(out)
}

/// Single-pair wrapper around [`opnorm_experiment_multi`].
pub fn opnorm_experiment(
    basis: &TubeBasis,
    cfg: &WindowConfig,
    p_exp: f64,
    q_exp: f64,
    lambda_grid: &[f64],
    z: &TubePoint,
) -> Result<OpnormResult> {
    Ok(opnorm_experiment_multi(basis, cfg, &[(p_exp, q_exp)], lambda_grid, z)?
        .into_iter()
        .next()
        .expect("one pair requested"))
}

/// Output of [`husimi_residual_experiment`].
#[derive(Debug, Clone)]
pub struct HusimiResidualResult {
    /// `N -> r_N = || Pi_{chi, mu_N} h_{N,N} - h_{N,N} ||_{L^2}`.
    pub residuals: KernelSeries,
    pub max_gram_offdiag: f64,
    /// Set when the measured Gram off-diagonal exceeds 1e-3.
    pub gram_alert: bool,
}

/// Residuals of the smoothed projector applied to Husimi beams, through the
/// eigenfunction expansion with the measured same-order Gram column.
pub fn husimi_residual_experiment(
    basis: &TubeBasis,
    cfg: &WindowConfig,
    n_grid: &[u32],
) -> Result<HusimiResidualResult> {
    let mut residuals = KernelSeries::new("husimi.residual").with_param("tau", basis.tau);
    let mut max_off = 0.0_f64;
    for &n in n_grid {
        let lambda = mu(n);
        let window = cfg.window(lambda)?;
        let n_limit = truncation_degree(lambda, cfg.tail_width, basis.n_max);
        if n > n_limit {
            return Err(Error::InvalidArgument(format!(
                "residual degree {n} beyond the basis cap"
            )));
        }
        let gram = super::kernel::husimi_gram_column(basis, n, n, n_limit)?;
        // Pi h - h = sum_{N'} (chi(mu_N - mu_{N'}) g_{N'} - delta) h_{N'};
        // under the near-identity Gram its norm is the l2 norm of the
        // coefficient vector.
        let mut r_sq = 0.0;
        for (j, &g) in gram.iter().enumerate() {
            let n2 = n + j as u32;
            if n2 != n {
                max_off = max_off.max(g.norm());
            } else {
                max_off = max_off.max((g.norm() - 1.0).abs());
            }
            let delta = if n2 == n { Complex64::new(1.0, 0.0) } else { Complex64::new(0.0, 0.0) };
            let coeff = window.chi(lambda - mu(n2)) * g - delta;
            r_sq += coeff.norm_sqr();
        }
        residuals.push_real(n as f64, r_sq.sqrt());
    }
    residuals.fit_loglog();
    Ok(HusimiResidualResult {
        residuals,
        max_gram_offdiag: max_off,
        gram_alert: max_off > 1e-3,
    })
}

/// Output of [`lp_norm_experiment`].
#[derive(Debug, Clone)]
pub struct LpNormResult {
    /// One series per requested exponent: `N -> ||Y_NN||_p / ||Y_NN||_2`
    /// (`p = infinity` allowed), each with its log-log fit.
    pub ratios: Vec<(f64, KernelSeries)>,
    /// `N -> N^{1/4} e^{-N tau} ||Y_NN||_2`, flat when the universal L2
    /// asymptotics hold.
    pub l2_flatness: KernelSeries,
}

/// Highest-weight (Gaussian beam) `L^p` sharpness sweep. Uses the closed
/// form of the beam, so the per-degree cost is one pass over the fiber.
pub fn lp_norm_experiment(
    basis: &TubeBasis,
    n_grid: &[u32],
    p_list: &[f64],
) -> Result<LpNormResult> {
    // Per-node ingredients of log |Y_NN| = c_N + N (log|sin Phi| - xi_theta).
    let node_data: Vec<(f64, f64)> = basis
        .rule
        .fiber
        .iter()
        .map(|node| {
            let ang = crate::harmonics::complex_angles(&node.point).expect("no poles");
            (
                crate::harmonics::LogComplex::from_complex(ang.sin_phi).log_mag - ang.theta.im,
                node.weight.ln(),
            )
        })
        .collect();
    let log_2pi = (2.0 * std::f64::consts::PI).ln();
    let norm_of = |n: u32, p: f64| -> f64 {
        let nf = n as f64;
        let cn = c_n_log(n);
        if p.is_infinite() {
            node_data
                .iter()
                .map(|&(g, _)| cn + nf * g)
                .fold(f64::NEG_INFINITY, f64::max)
        } else {
            let mut acc = RealLogSum::new();
            for &(g, lw) in &node_data {
                acc.add_log(p * (cn + nf * g) + lw);
            }
            (acc.value_log() + log_2pi) / p
        }
    };

    let mut ratios = Vec::new();
    for &p in p_list {
        let mut series = KernelSeries::new("lp.ratio").with_param("p", p);
        for &n in n_grid {
            let l2 = norm_of(n, 2.0);
            series.push_real(n as f64, (norm_of(n, p) - l2).exp());
        }
        series.fit_loglog();
        ratios.push((p, series));
    }
    let mut l2_flatness = KernelSeries::new("lp.l2_flatness").with_param("tau", basis.tau);
    for &n in n_grid {
        let nf = n as f64;
        let val = 0.25 * nf.ln() - nf * basis.tau + norm_of(n, 2.0);
        l2_flatness.push_real(nf, val.exp());
    }
    Ok(LpNormResult { ratios, l2_flatness })
}

/// Output of [`short_window_experiment`].
#[derive(Debug, Clone)]
pub struct ShortWindowResult {
    /// `lambda -> Pi_{[lambda, lambda+1]}(p, p)`, empty windows skipped.
    pub on_diagonal: KernelSeries,
    pub empty_windows: usize,
}

/// Sharp-window on-diagonal growth.
pub fn short_window_experiment(
    basis: &TubeBasis,
    lambda_grid: &[f64],
    p: &TubePoint,
) -> Result<ShortWindowResult> {
    let mut on_diagonal = KernelSeries::new("short_window.on_diagonal");
    let mut empty = 0usize;
    for &lambda in lambda_grid {
        let deg = truncation_degree(lambda + 1.0, 2, basis.n_max);
        let sw = ShellWeights::short_window(lambda, deg);
        if sw.empty_window {
            empty += 1;
            continue;
        }
        on_diagonal.push_real(lambda, kernel_diagonal(basis, &sw, p)?.exp());
    }
    on_diagonal.fit_loglog();
    Ok(ShortWindowResult { on_diagonal, empty_windows: empty })
}

/// Output of [`tempered_experiment`].
#[derive(Debug, Clone)]
pub struct TemperedResult {
    /// `mu -> P_{chi, mu}(p, p)`.
    pub on_diagonal: KernelSeries,
}

/// Tempered-sum on-diagonal growth (half the projector exponent).
pub fn tempered_experiment(
    basis: &TubeBasis,
    cfg: &WindowConfig,
    mu_grid: &[f64],
    p: &TubePoint,
) -> Result<TemperedResult> {
    let mut on_diagonal =
        KernelSeries::new("tempered.on_diagonal").with_param("tau", basis.tau);
    for &m in mu_grid {
        let w = cfg.window(m)?;
        let deg = truncation_degree(m, cfg.tail_width, basis.n_max);
        let sw = ShellWeights::tempered(&w, deg);
        on_diagonal.push_real(m, kernel_diagonal(basis, &sw, p)?.exp());
    }
    on_diagonal.fit_loglog();
    Ok(TemperedResult { on_diagonal })
}

/// Metaplectic quantization cross-checks: closed form against the Gaussian
/// integral (moduli), unitarity, and projective composition. Returns the
/// worst relative errors `(closed_vs_quadrature, unitarity, composition)`.
pub fn metaplectic_verify(
    seeds: &[u64],
    scale: f64,
    grid: &[Complex64],
    gh_order: usize,
) -> Result<(f64, f64, f64)> {
    use crate::bargmann_fock::{
        bf_kernel, measure_constant, metaplectic_kernel_closed, metaplectic_kernel_quadrature,
    };
    use crate::numerics::{gauss_hermite, random_symplectic};
    let rule = gauss_hermite(gh_order)?;
    let mut worst_match = 0.0_f64;
    for &seed in seeds {
        let m = random_symplectic(1, seed, scale)?;
        for &z in grid {
            for &w in grid {
                let quad = metaplectic_kernel_quadrature(&m, &[z], &[w], &rule)?;
                let closed = metaplectic_kernel_closed(&m, &[z], &[w], Branch::Principal)?;
                let rel = (quad.norm() - closed.value.norm()).abs() / closed.value.norm();
                worst_match = worst_match.max(rel);
            }
        }
    }

    // Unitarity and composition in modulus, k = 1.
    let mut worst_unitarity = 0.0_f64;
    let mut worst_composition = 0.0_f64;
    let pair_seeds: Vec<u64> = seeds.iter().copied().take(10).collect();
    let test_points = [
        Complex64::new(0.0, 0.0),
        Complex64::new(0.8, 0.4),
        Complex64::new(-0.5, 1.0),
    ];
    for &seed in &pair_seeds {
        let m1 = random_symplectic(1, seed, scale)?;
        let m2 = random_symplectic(1, seed + 7919, scale)?;
        let b1: ComplexSymplecticBlocks = complexify(&m1)?;
        let b2: ComplexSymplecticBlocks = complexify(&m2)?;
        let m12 = m1.mul(&m2)?;
        for &z in &test_points {
            for &w in &test_points {
                let mut uni = Complex64::new(0.0, 0.0);
                let mut comp = Complex64::new(0.0, 0.0);
                for (ix, &x) in rule.nodes.iter().enumerate() {
                    for (iy, &y) in rule.nodes.iter().enumerate() {
                        let v = [Complex64::new(x, y)];
                        let weight =
                            rule.weights[ix] * rule.weights[iy] * (x * x + y * y).exp();
                        let a = metaplectic_kernel_closed_from_blocks(
                            &b1,
                            &[z],
                            &v,
                            Branch::Principal,
                        )?;
                        let bz = metaplectic_kernel_closed_from_blocks(
                            &b1,
                            &[w],
                            &v,
                            Branch::Principal,
                        )?;
                        uni += a.value * bz.value.conj() * weight;
                        let c = metaplectic_kernel_closed_from_blocks(
                            &b2,
                            &v,
                            &[w],
                            Branch::Principal,
                        )?;
                        comp += a.value * c.value * weight;
                    }
                }
                let c1 = measure_constant(1);
                let uni_want = bf_kernel(&[z], &[w])?.norm();
                worst_unitarity =
                    worst_unitarity.max(((c1 * uni).norm() - uni_want).abs() / uni_want);
                let comp_want = metaplectic_kernel_closed(&m12, &[z], &[w], Branch::Principal)?
                    .value
                    .norm();
                worst_composition =
                    worst_composition.max(((c1 * comp).norm() - comp_want).abs() / comp_want);
            }
        }
    }
    Ok((worst_match, worst_unitarity, worst_composition))
}
