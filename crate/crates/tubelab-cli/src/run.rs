//! Experiment dispatch: configuration parsing and validation, execution,
//! threshold checks, and the result document.

use crate::output::{fmt_f64, JsonValue};
use clap::{Args, ValueEnum};
use num_complex::Complex64;
use std::path::PathBuf;
use std::time::Instant;
use tubelab::numerics::rational::Ratio;
use tubelab::numerics::LogLogFit;
use tubelab::spectral::{
    decay_experiment, husimi_residual_experiment, lp_norm_experiment, make_grid,
    metaplectic_verify, opnorm_experiment, scaling_experiment, short_window_experiment,
    tempered_experiment, GridSpacing, KernelSeries, ScalingOffset, SeriesValue, TubeBasis,
    WindowConfig, WindowKind,
};
use tubelab::sphere_tube::seeded_base_point;
use tubelab::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ExperimentKind {
    MetaplecticVerify,
    PhaseHessian,
    Scaling,
    Decay,
    Opnorm,
    LpNorms,
    HusimiResidual,
    ShortWindow,
    Tempered,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum WindowArg {
    Fejer,
    FejerSquared,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SpacingArg {
    Linear,
    Geometric,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FormatArg {
    Json,
    Csv,
}

#[derive(Args, Debug, Clone)]
pub struct RunArgs {
    /// Which experiment to run.
    #[arg(value_enum)]
    pub experiment: ExperimentKind,

    /// Tube radius, in (0, 1].
    #[arg(long, default_value_t = 1.0)]
    pub tau: f64,

    /// Half-support of the window transform, in (0, 0.5].
    #[arg(long, default_value_t = 0.2)]
    pub epsilon: f64,

    /// Localization window kind.
    #[arg(long, value_enum, default_value_t = WindowArg::FejerSquared)]
    pub window: WindowArg,

    /// Lower end of the frequency grid (lambda or mu).
    #[arg(long)]
    pub lambda_min: Option<f64>,

    /// Upper end of the frequency grid.
    #[arg(long)]
    pub lambda_max: Option<f64>,

    /// Lower end of a degree grid (lp-norms, husimi-residual).
    #[arg(long)]
    pub n_min: Option<u32>,

    /// Upper end of a degree grid.
    #[arg(long)]
    pub n_max: Option<u32>,

    /// Number of grid points (>= 3).
    #[arg(long, default_value_t = 6)]
    pub count: usize,

    /// Grid spacing.
    #[arg(long, value_enum, default_value_t = SpacingArg::Geometric)]
    pub spacing: SpacingArg,

    /// Flow time for the scaling experiment (|s| < epsilon).
    #[arg(long, default_value_t = 0.0)]
    pub s: f64,

    /// L^p exponents; repeat for several (lp-norms), single for opnorm.
    /// "inf" is accepted.
    #[arg(long = "p")]
    pub p_exps: Vec<String>,

    /// Target exponent q for opnorm; "inf" is accepted.
    #[arg(long)]
    pub q: Option<String>,

    /// Seed for base-point selection and random symplectic draws.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,

    /// Torus-angle resolution override.
    #[arg(long)]
    pub n_theta: Option<usize>,

    /// Polar resolution override.
    #[arg(long)]
    pub n_phi: Option<usize>,

    /// Fiber-angle resolution override.
    #[arg(long)]
    pub n_alpha: Option<usize>,

    /// Highest harmonic degree kept in kernels.
    #[arg(long)]
    pub degree_cap: Option<u32>,

    /// Shells kept past the window center.
    #[arg(long, default_value_t = 140)]
    pub tail_width: u32,

    /// Gauss-Hermite order for the metaplectic integrals.
    #[arg(long, default_value_t = 60)]
    pub gh_order: usize,

    /// Output path; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,

    /// Output format.
    #[arg(long, value_enum, default_value_t = FormatArg::Json)]
    pub format: FormatArg,
}

struct Threshold {
    name: String,
    value: f64,
    target: f64,
    tolerance: f64,
    passed: bool,
}

impl Threshold {
    /// |value - target| <= tolerance.
    fn near(name: &str, value: f64, target: f64, tolerance: f64) -> Self {
        Threshold {
            name: name.into(),
            value,
            target,
            tolerance,
            passed: value.is_finite() && (value - target).abs() <= tolerance,
        }
    }

    /// value <= bound.
    fn below(name: &str, value: f64, bound: f64) -> Self {
        Threshold {
            name: name.into(),
            value,
            target: bound,
            tolerance: 0.0,
            passed: value.is_finite() && value <= bound,
        }
    }
}

struct RunOutput {
    series: Vec<KernelSeries>,
    primary_fit: Option<LogLogFit>,
    thresholds: Vec<Threshold>,
}

fn parse_exponent(text: &str) -> Result<f64, String> {
    let t = text.trim().to_ascii_lowercase();
    if t == "inf" || t == "infinity" {
        return Ok(f64::INFINITY);
    }
    t.parse::<f64>().map_err(|e| format!("bad exponent {text:?}: {e}"))
}

fn validate(args: &RunArgs) -> Result<(), String> {
    if !(args.tau > 0.0 && args.tau <= 1.0) {
        return Err("tau must lie in (0, 1]".into());
    }
    if !(args.epsilon > 0.0 && args.epsilon <= 0.5) {
        return Err("epsilon must lie in (0, 0.5]".into());
    }
    if args.count < 3 {
        return Err("grid count must be >= 3".into());
    }
    if let (Some(a), Some(b)) = (args.lambda_min, args.lambda_max) {
        if !(a > 0.0 && b >= a) {
            return Err("need 0 < lambda-min <= lambda-max".into());
        }
    }
    if let (Some(a), Some(b)) = (args.n_min, args.n_max) {
        if b < a {
            return Err("need n-min <= n-max".into());
        }
    }
    Ok(())
}

fn window_kind(arg: WindowArg) -> WindowKind {
    match arg {
        WindowArg::Fejer => WindowKind::Fejer,
        WindowArg::FejerSquared => WindowKind::FejerSquared,
    }
}

fn spacing(arg: SpacingArg) -> GridSpacing {
    match arg {
        SpacingArg::Linear => GridSpacing::Linear,
        SpacingArg::Geometric => GridSpacing::Geometric,
    }
}

fn lambda_grid(args: &RunArgs, default_min: f64, default_max: f64) -> Vec<f64> {
    make_grid(
        args.lambda_min.unwrap_or(default_min),
        args.lambda_max.unwrap_or(default_max),
        args.count,
        spacing(args.spacing),
    )
}

fn degree_grid(args: &RunArgs, default_min: u32, default_max: u32) -> Vec<u32> {
    let lo = args.n_min.unwrap_or(default_min);
    let hi = args.n_max.unwrap_or(default_max).max(lo);
    let mut grid: Vec<u32> = make_grid(lo as f64, hi as f64, args.count, spacing(args.spacing))
        .into_iter()
        .map(|x| x.round() as u32)
        .collect();
    grid.dedup();
    grid
}

fn build_basis(args: &RunArgs, lambda_max: f64) -> Result<TubeBasis, Error> {
    let cap = args
        .degree_cap
        .unwrap_or_else(|| ((lambda_max.ceil() as u32) + args.tail_width).min(300));
    let res = 32.max((8.0 * (cap as f64).sqrt()).ceil() as usize);
    TubeBasis::new(
        args.tau,
        cap,
        args.n_theta.unwrap_or(res),
        args.n_phi.unwrap_or(res),
        args.n_alpha.unwrap_or(res),
    )
}

fn default_offsets() -> Vec<ScalingOffset> {
    vec![
        ScalingOffset {
            theta: 0.0,
            u: Complex64::new(0.8, 0.0),
            phi: 0.0,
            v: Complex64::new(0.8, 0.0),
        },
        ScalingOffset {
            theta: 0.0,
            u: Complex64::new(0.5, 0.3),
            phi: 0.0,
            v: Complex64::new(-0.2, 0.6),
        },
        ScalingOffset {
            theta: 0.4,
            u: Complex64::new(0.0, -0.7),
            phi: -0.3,
            v: Complex64::new(0.4, 0.0),
        },
    ]
}

fn run_experiment(args: &RunArgs) -> Result<RunOutput, Error> {
    let kind = window_kind(args.window);
    let mut cfg = WindowConfig::new(args.epsilon, kind);
    cfg.tail_width = args.tail_width;
    match args.experiment {
        ExperimentKind::PhaseHessian => {
            let data = tubelab::numerics::verify_phase_hessian(args.tau)?;
            let mut series = KernelSeries::new("phase_hessian.matrices")
                .with_param("tau", args.tau)
                .with_param("order", "r,sigma1,sigma2,re_w0");
            for i in 0..4 {
                for j in 0..4 {
                    series.push_real((i * 4 + j) as f64, data.hessian[(i, j)]);
                }
            }
            let mut inv_series = KernelSeries::new("phase_hessian.inverse");
            for i in 0..4 {
                for j in 0..4 {
                    inv_series.push_real((i * 4 + j) as f64, data.hessian_inverse[(i, j)]);
                }
            }
            let product_defect = data
                .hessian
                .mul(&data.hessian_inverse)
                .max_abs_diff(&tubelab::numerics::mat::Mat::identity(4));
            // Exact rational verification when tau is a small fraction.
            let mut exact_ok = f64::NAN;
            for den in 1..=64i128 {
                let num = (args.tau * den as f64).round() as i128;
                if num > 0 && (args.tau - num as f64 / den as f64).abs() < 1e-12 {
                    exact_ok = match tubelab::numerics::phase_hessian_exact(Ratio::new(num, den)) {
                        Ok(_) => 0.0,
                        Err(_) => 1.0,
                    };
                    break;
                }
            }
            let mut thresholds = vec![Threshold::below(
                "hessian_product_identity_defect",
                product_defect,
                1e-14,
            )];
            if !exact_ok.is_nan() {
                thresholds.push(Threshold::below("exact_rational_identity", exact_ok, 0.0));
            }
            Ok(RunOutput { series: vec![series, inv_series], primary_fit: None, thresholds })
        }
        ExperimentKind::MetaplecticVerify => {
            let seeds: Vec<u64> = (0..20).map(|i| args.seed.wrapping_add(i)).collect();
            let grid = [
                Complex64::new(0.0, 0.0),
                Complex64::new(1.0, 0.0),
                Complex64::new(0.0, 2.0),
                Complex64::new(1.0, 1.0),
                Complex64::new(-1.5, 0.0),
            ];
            let (matched, unitarity, composition) =
                metaplectic_verify(&seeds, 0.8, &grid, args.gh_order)?;
            let mut series = KernelSeries::new("metaplectic.worst_errors");
            series.push_real(1.0, matched);
            series.push_real(2.0, unitarity);
            series.push_real(3.0, composition);
            let thresholds = vec![
                Threshold::below("closed_vs_quadrature_modulus", matched, 1e-6),
                Threshold::below("unitarity_modulus", unitarity, 1e-6),
                Threshold::below("projective_composition_modulus", composition, 1e-6),
            ];
            Ok(RunOutput { series: vec![series], primary_fit: None, thresholds })
        }
        ExperimentKind::Scaling => {
            let grid = lambda_grid(args, 40.0, 160.0);
            let basis = build_basis(args, *grid.last().unwrap())?;
            let p = seeded_base_point(args.tau, args.seed)?;
            let res = scaling_experiment(&basis, &cfg, args.s, &grid, &default_offsets(), &p)?;
            let slope = res.on_diagonal.fit.map(|f| f.slope).unwrap_or(f64::NAN);
            let devs: Vec<f64> = res
                .deviation
                .points
                .iter()
                .filter_map(|(_, v)| v.as_real())
                .collect();
            let mut thresholds =
                vec![Threshold::near("on_diagonal_slope", slope, 1.0, 0.1)];
            if args.s != 0.0 {
                thresholds.push(Threshold::below(
                    "model_deviation_at_top",
                    *devs.last().unwrap_or(&f64::NAN),
                    0.15,
                ));
                thresholds.push(Threshold::below(
                    "deviation_decreasing",
                    devs.last().unwrap_or(&f64::NAN) - devs.first().unwrap_or(&f64::NAN),
                    0.0,
                ));
            }
            Ok(RunOutput {
                series: vec![res.on_diagonal.clone(), res.deviation],
                primary_fit: res.on_diagonal.fit,
                thresholds,
            })
        }
        ExperimentKind::Decay => {
            let grid = lambda_grid(args, 60.0, 160.0);
            let basis = build_basis(args, *grid.last().unwrap())?;
            let p = seeded_base_point(args.tau, args.seed)?;
            let distances = [0.04, 0.08, 0.12, 0.16, 0.2];
            let res = decay_experiment(&basis, &cfg, &p, &grid, &distances, args.epsilon * 0.4)?;
            let thresholds = vec![
                Threshold::near("transverse_slope", res.transverse_fit.slope, 1.0, 0.15),
                Threshold::near("orbit_flat_slope", res.orbit_flat_slope, 0.0, 0.3),
            ];
            Ok(RunOutput {
                series: vec![res.transverse.clone(), res.along_orbit],
                primary_fit: Some(res.transverse_fit),
                thresholds,
            })
        }
        ExperimentKind::Opnorm => {
            let p_exp = match args.p_exps.first() {
                Some(t) => parse_exponent(t).map_err(Error::InvalidArgument)?,
                None => 2.0,
            };
            let q_exp = match &args.q {
                Some(t) => parse_exponent(t).map_err(Error::InvalidArgument)?,
                None => 4.0,
            };
            let grid = lambda_grid(args, 80.0, 160.0);
            let basis = build_basis(args, *grid.last().unwrap())?;
            let z = seeded_base_point(args.tau, args.seed)?;
            let res = opnorm_experiment(&basis, &cfg, p_exp, q_exp, &grid, &z)?;
            let inv = |x: f64| if x.is_infinite() { 0.0 } else { 1.0 / x };
            let target = inv(p_exp) - inv(q_exp);
            let maj = res.majorant.fit.map(|f| f.slope).unwrap_or(f64::NAN);
            let wit = res.witness.fit.map(|f| f.slope).unwrap_or(f64::NAN);
            let thresholds = vec![
                Threshold::near("majorant_slope", maj, target, 0.07),
                Threshold::near("witness_slope", wit, target, 0.07),
            ];
            Ok(RunOutput {
                series: vec![res.majorant.clone(), res.witness],
                primary_fit: res.majorant.fit,
                thresholds,
            })
        }
        ExperimentKind::LpNorms => {
            let grid = degree_grid(args, 40, 140);
            let cap = (*grid.last().unwrap()).max(40);
            let mut basis_args = args.clone();
            basis_args.degree_cap = Some(args.degree_cap.unwrap_or(cap));
            let basis = build_basis(&basis_args, cap as f64)?;
            let p_list: Vec<f64> = if args.p_exps.is_empty() {
                vec![4.0, 8.0, f64::INFINITY]
            } else {
                args.p_exps
                    .iter()
                    .map(|t| parse_exponent(t).map_err(Error::InvalidArgument))
                    .collect::<Result<_, _>>()?
            };
            let res = lp_norm_experiment(&basis, &grid, &p_list)?;
            let mut series = Vec::new();
            let mut thresholds = Vec::new();
            let mut primary = None;
            for (p, s) in &res.ratios {
                let target = if p.is_infinite() { 0.5 } else { 0.5 - 1.0 / p };
                let slope = s.fit.map(|f| f.slope).unwrap_or(f64::NAN);
                let tag = if p.is_infinite() { "inf".to_string() } else { format!("{p}") };
                thresholds.push(Threshold::near(
                    &format!("ratio_slope_p_{tag}"),
                    slope,
                    target,
                    0.05,
                ));
                if primary.is_none() {
                    primary = s.fit;
                }
                series.push(s.clone());
            }
            let flat: Vec<f64> = res
                .l2_flatness
                .points
                .iter()
                .filter_map(|(_, v)| v.as_real())
                .collect();
            let spread = flat.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
                / flat.iter().cloned().fold(f64::INFINITY, f64::min);
            thresholds.push(Threshold::below("l2_flatness_max_over_min", spread, 1.1));
            series.push(res.l2_flatness);
            Ok(RunOutput { series, primary_fit: primary, thresholds })
        }
        ExperimentKind::HusimiResidual => {
            let grid = degree_grid(args, 20, 120);
            let cap = (grid.last().unwrap() + args.tail_width).min(300);
            let mut basis_args = args.clone();
            basis_args.degree_cap = Some(args.degree_cap.unwrap_or(cap));
            let basis = build_basis(&basis_args, *grid.last().unwrap() as f64)?;
            let res = husimi_residual_experiment(&basis, &cfg, &grid)?;
            let vals: Vec<f64> = res
                .residuals
                .points
                .iter()
                .filter_map(|(_, v)| v.as_real())
                .collect();
            let max_r = vals.iter().cloned().fold(0.0, f64::max);
            let trend = res.residuals.fit.map(|f| f.slope).unwrap_or(f64::NAN);
            let thresholds = vec![
                Threshold::below("residual_bounded", max_r, 2.0),
                Threshold::near("residual_trend_slope", trend, 0.0, 0.05),
                Threshold::below("gram_offdiagonal", res.max_gram_offdiag, 1e-3),
            ];
            Ok(RunOutput {
                series: vec![res.residuals.clone()],
                primary_fit: res.residuals.fit,
                thresholds,
            })
        }
        ExperimentKind::ShortWindow => {
            let grid = lambda_grid(args, 40.0, 160.0);
            let basis = build_basis(args, *grid.last().unwrap() + 1.0)?;
            let p = seeded_base_point(args.tau, args.seed)?;
            let res = short_window_experiment(&basis, &grid, &p)?;
            let slope = res.on_diagonal.fit.map(|f| f.slope).unwrap_or(f64::NAN);
            let thresholds = vec![Threshold::near("on_diagonal_slope", slope, 1.0, 0.15)];
            Ok(RunOutput {
                series: vec![res.on_diagonal.clone()],
                primary_fit: res.on_diagonal.fit,
                thresholds,
            })
        }
        ExperimentKind::Tempered => {
            let grid = lambda_grid(args, 40.0, 160.0);
            let basis = build_basis(args, *grid.last().unwrap())?;
            let p = seeded_base_point(args.tau, args.seed)?;
            let res = tempered_experiment(&basis, &cfg, &grid, &p)?;
            let slope = res.on_diagonal.fit.map(|f| f.slope).unwrap_or(f64::NAN);
            let thresholds = vec![Threshold::near("on_diagonal_slope", slope, 0.5, 0.1)];
            Ok(RunOutput {
                series: vec![res.on_diagonal.clone()],
                primary_fit: res.on_diagonal.fit,
                thresholds,
            })
        }
    }
}

fn series_json(s: &KernelSeries) -> JsonValue {
    let points: Vec<JsonValue> = s
        .points
        .iter()
        .map(|&(x, v)| match v {
            SeriesValue::Real(y) => JsonValue::Arr(vec![JsonValue::Num(x), JsonValue::Num(y)]),
            SeriesValue::Complex(c) => JsonValue::Arr(vec![
                JsonValue::Num(x),
                JsonValue::Num(c.re),
                JsonValue::Num(c.im),
            ]),
        })
        .collect();
    JsonValue::object(vec![
        ("tag", JsonValue::Str(s.experiment_tag.clone())),
        (
            "params",
            JsonValue::Obj(
                s.params
                    .iter()
                    .map(|(k, v)| (k.clone(), JsonValue::Str(v.clone())))
                    .collect(),
            ),
        ),
        ("points", JsonValue::Arr(points)),
        ("fit", fit_json(&s.fit)),
    ])
}

fn fit_json(fit: &Option<LogLogFit>) -> JsonValue {
    match fit {
        None => JsonValue::Null,
        Some(f) => JsonValue::object(vec![
            ("slope", JsonValue::Num(f.slope)),
            ("intercept", JsonValue::Num(f.intercept)),
            ("r_squared", JsonValue::Num(f.r_squared)),
        ]),
    }
}

fn kebab<T: ValueEnum>(v: &T) -> String {
    v.to_possible_value().map(|p| p.get_name().to_string()).unwrap_or_default()
}

fn config_json(args: &RunArgs) -> JsonValue {
    JsonValue::object(vec![
        ("experiment", JsonValue::Str(kebab(&args.experiment))),
        ("tau", JsonValue::Num(args.tau)),
        ("epsilon", JsonValue::Num(args.epsilon)),
        ("window", JsonValue::Str(kebab(&args.window))),
        (
            "lambda_min",
            args.lambda_min.map(JsonValue::Num).unwrap_or(JsonValue::Null),
        ),
        (
            "lambda_max",
            args.lambda_max.map(JsonValue::Num).unwrap_or(JsonValue::Null),
        ),
        (
            "n_min",
            args.n_min.map(|v| JsonValue::Int(v as i64)).unwrap_or(JsonValue::Null),
        ),
        (
            "n_max",
            args.n_max.map(|v| JsonValue::Int(v as i64)).unwrap_or(JsonValue::Null),
        ),
        ("count", JsonValue::Int(args.count as i64)),
        ("spacing", JsonValue::Str(kebab(&args.spacing))),
        ("s", JsonValue::Num(args.s)),
        (
            "p",
            JsonValue::Arr(args.p_exps.iter().map(|t| JsonValue::Str(t.clone())).collect()),
        ),
        (
            "q",
            args.q.clone().map(JsonValue::Str).unwrap_or(JsonValue::Null),
        ),
        ("seed", JsonValue::Int(args.seed as i64)),
        ("tail_width", JsonValue::Int(args.tail_width as i64)),
        ("gh_order", JsonValue::Int(args.gh_order as i64)),
        (
            "degree_cap",
            args.degree_cap.map(|v| JsonValue::Int(v as i64)).unwrap_or(JsonValue::Null),
        ),
    ])
}

fn render_csv(series: &[KernelSeries]) -> String {
    let mut out = String::from("series,params,x,value_re,value_im\n");
    for s in series {
        let params: Vec<String> = s.params.iter().map(|(k, v)| format!("{k}={v}")).collect();
        let params = params.join(";");
        for &(x, v) in &s.points {
            let (re, im) = match v {
                SeriesValue::Real(y) => (y, 0.0),
                SeriesValue::Complex(c) => (c.re, c.im),
            };
            out.push_str(&format!(
                "{},{},{},{},{}\n",
                s.experiment_tag,
                params,
                fmt_f64(x),
                fmt_f64(re),
                fmt_f64(im)
            ));
        }
    }
    out
}

pub fn execute(args: RunArgs) -> i32 {
    if let Err(msg) = validate(&args) {
        eprintln!("tubelab: invalid configuration: {msg}");
        return 2;
    }
    let start = Instant::now();
    let result = run_experiment(&args);
    let out = match result {
        Ok(out) => out,
        Err(Error::InvalidArgument(msg)) => {
            eprintln!("tubelab: invalid configuration: {msg}");
            return 2;
        }
        Err(e @ Error::ResolutionError(_)) | Err(e @ Error::InsufficientData(_)) => {
            eprintln!("tubelab: {:?} failed: {e}", args.experiment);
            return 3;
        }
        Err(e) => {
            eprintln!("tubelab: {:?} failed: {e}", args.experiment);
            return 3;
        }
    };
    let passed = out.thresholds.iter().all(|t| t.passed);
    let runtime = start.elapsed().as_secs_f64();

    let document = match args.format {
        FormatArg::Json => {
            let thresholds: Vec<JsonValue> = out
                .thresholds
                .iter()
                .map(|t| {
                    JsonValue::object(vec![
                        ("name", JsonValue::Str(t.name.clone())),
                        ("value", JsonValue::Num(t.value)),
                        ("target", JsonValue::Num(t.target)),
                        ("tolerance", JsonValue::Num(t.tolerance)),
                        ("passed", JsonValue::Bool(t.passed)),
                    ])
                })
                .collect();
            JsonValue::object(vec![
                ("config", config_json(&args)),
                (
                    "series",
                    JsonValue::Arr(out.series.iter().map(series_json).collect()),
                ),
                ("fit", fit_json(&out.primary_fit)),
                ("thresholds", JsonValue::Arr(thresholds)),
                ("passed", JsonValue::Bool(passed)),
                ("runtime_seconds", JsonValue::Num(runtime)),
            ])
            .render()
        }
        FormatArg::Csv => render_csv(&out.series),
    };

    match &args.out {
        Some(path) => {
            if let Err(e) = std::fs::write(path, document) {
                eprintln!("tubelab: could not write {}: {e}", path.display());
                return 3;
            }
        }
        None => print!("{document}"),
    }
    for t in &out.thresholds {
        eprintln!(
            "{} {}: value {} target {} +- {}",
            if t.passed { "PASS" } else { "FAIL" },
            t.name,
            fmt_f64(t.value),
            fmt_f64(t.target),
            fmt_f64(t.tolerance)
        );
    }
    if passed {
        0
    } else {
        1
    }
}
