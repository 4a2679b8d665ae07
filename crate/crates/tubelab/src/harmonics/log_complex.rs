//! Log-scaled complex values for quantities of size `e^{N tau}` that would
//! overflow `f64` once raised to `L^p` powers.
//!
//! A value is stored as `exp(log_mag) * exp(i phase)` with the phase kept in
//! `(-pi, pi]`. Multiplication adds the fields; addition goes through a
//! rescaled mantissa. Round trips through `Complex64` are exact for
//! `log_mag <= 700`.

use num_complex::Complex64;

const PI: f64 = std::f64::consts::PI;

fn wrap_phase(p: f64) -> f64 {
    if p > PI || p <= -PI {
        let w = p.rem_euclid(2.0 * PI);
        if w > PI {
            w - 2.0 * PI
        } else {
            w
        }
    } else {
        p
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogComplex {
    pub log_mag: f64,
    pub phase: f64,
}

impl LogComplex {
    pub const ZERO: LogComplex = LogComplex { log_mag: f64::NEG_INFINITY, phase: 0.0 };

    pub fn new(log_mag: f64, phase: f64) -> Self {
        LogComplex { log_mag, phase: wrap_phase(phase) }
    }

    pub fn one() -> Self {
        LogComplex { log_mag: 0.0, phase: 0.0 }
    }

    pub fn from_complex(z: Complex64) -> Self {
        if z.norm_sqr() == 0.0 {
            return LogComplex::ZERO;
        }
        LogComplex { log_mag: z.norm().ln(), phase: z.arg() }
    }

    /// Positive real value given by its natural log.
    pub fn from_log_mag(log_mag: f64) -> Self {
        LogComplex { log_mag, phase: 0.0 }
    }

    pub fn to_complex(self) -> Complex64 {
        if self.is_zero() {
            return Complex64::new(0.0, 0.0);
        }
        Complex64::from_polar(self.log_mag.exp(), self.phase)
    }

    pub fn is_zero(self) -> bool {
        self.log_mag == f64::NEG_INFINITY
    }

    pub fn mul(self, other: LogComplex) -> LogComplex {
        if self.is_zero() || other.is_zero() {
            return LogComplex::ZERO;
        }
        LogComplex::new(self.log_mag + other.log_mag, self.phase + other.phase)
    }

    pub fn div(self, other: LogComplex) -> LogComplex {
        assert!(!other.is_zero(), "division by log-zero");
        if self.is_zero() {
            return LogComplex::ZERO;
        }
        LogComplex::new(self.log_mag - other.log_mag, self.phase - other.phase)
    }

    pub fn conj(self) -> LogComplex {
        LogComplex::new(self.log_mag, -self.phase)
    }

    pub fn neg(self) -> LogComplex {
        if self.is_zero() {
            return self;
        }
        LogComplex::new(self.log_mag, self.phase + PI)
    }

    /// Multiply by `exp(log_mag_shift)` (a positive real in log form).
    pub fn scaled(self, log_mag_shift: f64) -> LogComplex {
        if self.is_zero() {
            return self;
        }
        LogComplex { log_mag: self.log_mag + log_mag_shift, phase: self.phase }
    }

    /// Integer power; adds `n` copies of the phase (branch-free).
    pub fn powi(self, n: i32) -> LogComplex {
        if self.is_zero() {
            return if n == 0 { LogComplex::one() } else { LogComplex::ZERO };
        }
        LogComplex::new(self.log_mag * n as f64, self.phase * n as f64)
    }

    pub fn add(self, other: LogComplex) -> LogComplex {
        let mut acc = ScaledComplexSum::new();
        acc.add(self);
        acc.add(other);
        acc.to_log_complex()
    }
}

/// Streaming sum of [`LogComplex`] terms with a floating exponent offset:
/// the running total is `sum * exp(scale)`.
#[derive(Debug, Clone, Copy)]
pub struct ScaledComplexSum {
    scale: f64,
    sum: Complex64,
}

impl ScaledComplexSum {
    pub fn new() -> Self {
        ScaledComplexSum { scale: f64::NEG_INFINITY, sum: Complex64::new(0.0, 0.0) }
    }

    pub fn add(&mut self, term: LogComplex) {
        if term.is_zero() {
            return;
        }
        if self.sum.norm_sqr() == 0.0 {
            self.scale = term.log_mag;
            self.sum = Complex64::from_polar(1.0, term.phase);
            return;
        }
        let d = term.log_mag - self.scale;
        if d > 40.0 {
            // New term dominates: rebase the accumulator.
            self.sum = self.sum * (-d).exp() + Complex64::from_polar(1.0, term.phase);
            self.scale = term.log_mag;
        } else {
            self.sum += Complex64::from_polar(d.exp(), term.phase);
        }
        let mag = self.sum.norm();
        if mag > 1e100 || (mag > 0.0 && mag < 1e-100) {
            self.scale += mag.ln();
            self.sum /= mag;
        }
    }

    pub fn to_log_complex(&self) -> LogComplex {
        if self.sum.norm_sqr() == 0.0 {
            return LogComplex::ZERO;
        }
        LogComplex::new(self.scale + self.sum.norm().ln(), self.sum.arg())
    }
}

impl Default for ScaledComplexSum {
    fn default() -> Self {
        Self::new()
    }
}

/// Streaming log-sum-exp for nonnegative terms given as logs.
#[derive(Debug, Clone, Copy)]
pub struct RealLogSum {
    max: f64,
    sum: f64,
}

impl RealLogSum {
    pub fn new() -> Self {
        RealLogSum { max: f64::NEG_INFINITY, sum: 0.0 }
    }

    /// Add `exp(log_term)`.
    pub fn add_log(&mut self, log_term: f64) {
        if log_term == f64::NEG_INFINITY {
            return;
        }
        if self.sum == 0.0 {
            self.max = log_term;
            self.sum = 1.0;
        } else if log_term <= self.max {
            self.sum += (log_term - self.max).exp();
        } else {
            self.sum = self.sum * (self.max - log_term).exp() + 1.0;
            self.max = log_term;
        }
    }

    pub fn merge(&mut self, other: &RealLogSum) {
        if other.sum == 0.0 {
            return;
        }
        if self.sum == 0.0 {
            *self = *other;
        } else if other.max <= self.max {
            self.sum += other.sum * (other.max - self.max).exp();
        } else {
            self.sum = self.sum * (self.max - other.max).exp() + other.sum;
            self.max = other.max;
        }
    }

    /// Log of the accumulated sum.
    pub fn value_log(&self) -> f64 {
        if self.sum == 0.0 {
            f64::NEG_INFINITY
        } else {
            self.max + self.sum.ln()
        }
    }
}

impl Default for RealLogSum {
    fn default() -> Self {
        Self::new()
    }
}
