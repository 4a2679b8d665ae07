//! Spectral localization kernels on the tube boundary and the experiment
//! procedures that verify their asymptotic laws at desk scale.

pub mod experiments;
pub mod kernel;
pub mod window;

pub use experiments::*;
pub use kernel::{
    kernel_diagonal, kernel_row_integrals, kernel_value, truncation_degree, KernelValue,
    RowExponent, ShellWeights, TubeBasis, DEFAULT_TAIL_WIDTH,
};
pub use window::{SpectralWindow, WindowKind};

use crate::numerics::LogLogFit;
use num_complex::Complex64;

/// One sampled experiment value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SeriesValue {
    Real(f64),
    Complex(Complex64),
}

impl SeriesValue {
    pub fn as_real(&self) -> Option<f64> {
        match self {
            SeriesValue::Real(x) => Some(*x),
            SeriesValue::Complex(_) => None,
        }
    }
}

/// A tagged series of `(parameter, value)` pairs with an optional log-log
/// fit; the unit of experiment output.
#[derive(Debug, Clone)]
pub struct KernelSeries {
    pub experiment_tag: String,
    pub params: Vec<(String, String)>,
    pub points: Vec<(f64, SeriesValue)>,
    pub fit: Option<LogLogFit>,
}

impl KernelSeries {
    pub fn new(tag: impl Into<String>) -> Self {
        KernelSeries {
            experiment_tag: tag.into(),
            params: Vec::new(),
            points: Vec::new(),
            fit: None,
        }
    }

    pub fn with_param(mut self, key: &str, value: impl ToString) -> Self {
        self.params.push((key.to_string(), value.to_string()));
        self
    }

    pub fn push_real(&mut self, x: f64, y: f64) {
        self.points.push((x, SeriesValue::Real(y)));
    }

    /// Fit the positive real points in log-log scale; leaves `fit` empty
    /// if any value is nonpositive or there are too few points.
    pub fn fit_loglog(&mut self) {
        let data: Vec<(f64, f64)> = self
            .points
            .iter()
            .filter_map(|&(x, v)| v.as_real().map(|y| (x, y)))
            .collect();
        if data.len() >= 3 && data.iter().all(|&(x, y)| x > 0.0 && y > 0.0) {
            self.fit = crate::numerics::fit_loglog(&data).ok();
        }
    }
}

/// Geometric or linear grid specification shared by the experiments.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GridSpacing {
    Linear,
    Geometric,
}

/// Build a parameter grid with at least one point.
pub fn make_grid(min: f64, max: f64, count: usize, spacing: GridSpacing) -> Vec<f64> {
    assert!(count >= 1 && min > 0.0 && max >= min);
    if count == 1 {
        return vec![min];
    }
    (0..count)
        .map(|i| {
            let t = i as f64 / (count - 1) as f64;
            match spacing {
                GridSpacing::Linear => min + t * (max - min),
                GridSpacing::Geometric => min * (max / min).powf(t),
            }
        })
        .collect()
}
