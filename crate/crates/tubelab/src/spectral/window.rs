//! Spectral localization windows: positive, even, with compactly supported
//! Fourier transform normalized to `chi_hat(0) = 1` under the convention
//! `chi_hat(t) = int chi(s) e^{-i s t} ds`.
//!
//! Two kinds are provided. `Fejer` is `(eps/2pi) sinc^2(eps s / 2)` with the
//! triangle transform on `[-eps, eps]`; its tails decay like `1/s^2`.
//! `FejerSquared` is the normalized square of the half-support Fejer window,
//! `(3 eps / 8 pi) sinc^4(eps s / 4)`; its transform is the cubic B-spline
//! (triangle convolved with itself) on `[-eps, eps]` and the tails decay
//! like `1/s^4`, which is what keeps shell-sum truncations affordable.

use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WindowKind {
    Fejer,
    FejerSquared,
}

/// The localization function `chi` with half-support `epsilon` of
/// `chi_hat` and center `lambda`.
#[derive(Debug, Clone, Copy)]
pub struct SpectralWindow {
    pub epsilon: f64,
    pub kind: WindowKind,
    pub lambda: f64,
}

fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-6 {
        1.0 - x * x / 6.0
    } else {
        x.sin() / x
    }
}

impl SpectralWindow {
    pub fn new(epsilon: f64, kind: WindowKind, lambda: f64) -> Result<Self> {
        if !(epsilon > 0.0) {
            return Err(Error::InvalidArgument("window needs epsilon > 0".into()));
        }
        if !(lambda >= 0.0) {
            return Err(Error::InvalidArgument("window center must be >= 0".into()));
        }
        Ok(SpectralWindow { epsilon, kind, lambda })
    }

    /// `chi(s)`, nonnegative and even.
    pub fn chi(&self, s: f64) -> f64 {
        let eps = self.epsilon;
        match self.kind {
            WindowKind::Fejer => {
                let v = sinc(eps * s / 2.0);
                eps / (2.0 * std::f64::consts::PI) * v * v
            }
            WindowKind::FejerSquared => {
                let v = sinc(eps * s / 4.0);
                3.0 * eps / (8.0 * std::f64::consts::PI) * v.powi(4)
            }
        }
    }

    /// Closed form of `chi_hat(t)`; supported in `[-eps, eps]`.
    pub fn chi_hat(&self, t: f64) -> f64 {
        let eps = self.epsilon;
        match self.kind {
            WindowKind::Fejer => (1.0 - t.abs() / eps).max(0.0),
            WindowKind::FejerSquared => {
                let x = 2.0 * t.abs() / eps;
                if x <= 1.0 {
                    1.0 - 1.5 * x * x + 0.75 * x * x * x
                } else if x <= 2.0 {
                    0.25 * (2.0 - x).powi(3)
                } else {
                    0.0
                }
            }
        }
    }

    /// Upper envelope of the far tail of `chi`, used for truncation
    /// estimates.
    pub fn tail_envelope(&self, s: f64) -> f64 {
        let eps = self.epsilon;
        let s = s.abs().max(1e-300);
        match self.kind {
            WindowKind::Fejer => 2.0 / (std::f64::consts::PI * eps * s * s),
            WindowKind::FejerSquared => {
                96.0 / (std::f64::consts::PI * eps.powi(3) * s.powi(4))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn numerical_chi_hat(w: &SpectralWindow, t: f64, s_max: f64, n: usize) -> f64 {
        // Trapezoid over [-s_max, s_max] of chi(s) cos(s t) (chi is even).
        let h = 2.0 * s_max / n as f64;
        let mut sum = 0.0;
        for i in 0..=n {
            let s = -s_max + i as f64 * h;
            let f = w.chi(s) * (s * t).cos();
            sum += if i == 0 || i == n { 0.5 * f } else { f };
        }
        sum * h
    }

    #[test]
    fn fejer_value_at_zero() {
        let w = SpectralWindow::new(0.2, WindowKind::Fejer, 0.0).unwrap();
        assert!((w.chi(0.0) - 0.2 / (2.0 * std::f64::consts::PI)).abs() < 1e-15);
    }

    #[test]
    fn windows_are_even_and_nonnegative() {
        for kind in [WindowKind::Fejer, WindowKind::FejerSquared] {
            let w = SpectralWindow::new(0.3, kind, 0.0).unwrap();
            for i in 0..500 {
                let s = i as f64 * 0.37;
                assert!(w.chi(s) >= 0.0);
                assert!((w.chi(s) - w.chi(-s)).abs() < 1e-16);
            }
        }
    }

    #[test]
    fn chi_hat_normalization() {
        // chi_hat(0) = int chi = 1 for both kinds.
        for kind in [WindowKind::Fejer, WindowKind::FejerSquared] {
            let w = SpectralWindow::new(0.5, kind, 0.0).unwrap();
            let got = numerical_chi_hat(&w, 0.0, 40000.0, 4_000_000);
            assert!((got - 1.0).abs() < 2e-3, "{kind:?}: {got}");
            assert_eq!(w.chi_hat(0.0), 1.0);
        }
    }

    #[test]
    fn chi_hat_closed_form_matches_fourier_integral() {
        let w = SpectralWindow::new(0.5, WindowKind::FejerSquared, 0.0).unwrap();
        for t in [0.05, 0.2, 0.3, 0.45] {
            let got = numerical_chi_hat(&w, t, 30000.0, 3_000_000);
            let want = w.chi_hat(t);
            assert!((got - want).abs() < 1e-5, "t={t}: {got} vs {want}");
        }
        let wf = SpectralWindow::new(0.5, WindowKind::Fejer, 0.0).unwrap();
        for t in [0.1, 0.35] {
            let got = numerical_chi_hat(&wf, t, 30000.0, 3_000_000);
            assert!((got - wf.chi_hat(t)).abs() < 1e-3, "t={t}");
        }
    }

    #[test]
    fn chi_hat_vanishes_outside_support() {
        // Compact support: numerically zero beyond eps up to the truncation
        // floor of the Fourier integral (1/s^4 tails for FejerSquared push
        // it to 1e-8; the Fejer floor is 1e-3).
        let wsq = SpectralWindow::new(0.5, WindowKind::FejerSquared, 0.0).unwrap();
        for t in [0.55, 0.8, 1.5] {
            assert_eq!(wsq.chi_hat(t), 0.0);
            let got = numerical_chi_hat(&wsq, t, 60000.0, 6_000_000);
            assert!(got.abs() < 1e-8, "t={t}: {got}");
        }
        let wf = SpectralWindow::new(0.5, WindowKind::Fejer, 0.0).unwrap();
        for t in [0.6, 1.2] {
            assert_eq!(wf.chi_hat(t), 0.0);
            let got = numerical_chi_hat(&wf, t, 60000.0, 6_000_000);
            assert!(got.abs() < 1e-3, "t={t}: {got}");
        }
    }

    #[test]
    fn chi_hat_continuous_at_knots() {
        let w = SpectralWindow::new(0.4, WindowKind::FejerSquared, 0.0).unwrap();
        let eps = 1e-9;
        let knot = 0.2; // x = 1
        assert!((w.chi_hat(knot - eps) - w.chi_hat(knot + eps)).abs() < 1e-7);
        assert!((w.chi_hat(knot) - 0.25).abs() < 1e-12);
    }

    #[test]
    fn tail_envelope_bounds_chi() {
        for kind in [WindowKind::Fejer, WindowKind::FejerSquared] {
            let w = SpectralWindow::new(0.25, kind, 0.0).unwrap();
            for i in 1..200 {
                let s = 10.0 + i as f64 * 3.3;
                assert!(w.chi(s) <= w.tail_envelope(s) * (1.0 + 1e-12), "{kind:?} s={s}");
            }
        }
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(SpectralWindow::new(0.0, WindowKind::Fejer, 0.0).is_err());
        assert!(SpectralWindow::new(0.2, WindowKind::Fejer, -1.0).is_err());
    }
}
