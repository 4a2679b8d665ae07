//! Fully normalized associated Legendre functions with complex argument,
//! evaluated upward in degree at fixed order.
//!
//! `nlm(cos Phi)` is normalized so that `Y_l^m = nlm(cos phi) e^{i m theta}`
//! is orthonormal on the real sphere; the Condon--Shortley sign lives in the
//! seed. For complex `Phi` the square root `(1 - cos^2 Phi)^{1/2}` is pinned
//! to `sin Phi`, which the caller supplies. Values grow like `e^{l xi}` for
//! complexified angles, so the recurrence runs on a rescaled mantissa and
//! reports log-scaled values. Raw `P_l^m` would overflow near `l = 150`;
//! this path is stable through `l = 300` and beyond.

use super::log_complex::LogComplex;
use crate::numerics::ln_gamma;
use num_complex::Complex64;

/// Log of the seed magnitude: `|nmm| = sqrt((2m+1)/(4 pi)) *
/// sqrt((2m-1)!!/(2m)!!)`, the `sin^m` factor excluded.
fn seed_log_prefactor(m: u32) -> f64 {
    let m = m as f64;
    let double_factorial_ratio = ln_gamma(2.0 * m + 1.0) - 2.0 * m * 2.0_f64.ln() - 2.0 * ln_gamma(m + 1.0);
    0.5 * ((2.0 * m + 1.0).ln() - (4.0 * std::f64::consts::PI).ln()) + 0.5 * double_factorial_ratio
}

/// All `nlm(cos Phi)` for `l = m ..= n_max` as log-scaled complex values.
pub fn normalized_legendre_log(
    m: u32,
    n_max: u32,
    cos_phi: Complex64,
    sin_phi: Complex64,
) -> Vec<LogComplex> {
    let mut out = Vec::new();
    normalized_legendre_log_into(m, n_max, cos_phi, sin_phi, &mut out);
    out
}

/// [`normalized_legendre_log`] writing into a reused buffer.
pub fn normalized_legendre_log_into(
    m: u32,
    n_max: u32,
    cos_phi: Complex64,
    sin_phi: Complex64,
    out: &mut Vec<LogComplex>,
) {
    assert!(n_max >= m);
    let count = (n_max - m + 1) as usize;
    out.clear();
    out.reserve(count);

    // Seed (-1)^m * prefactor * sin(Phi)^m, carried as mantissa + exponent.
    let sin_lc = LogComplex::from_complex(sin_phi);
    let mut offset = seed_log_prefactor(m) + m as f64 * sin_lc.log_mag;
    let seed_phase = m as f64 * sin_lc.phase + if m % 2 == 1 { std::f64::consts::PI } else { 0.0 };
    let mut prev = Complex64::from_polar(1.0, seed_phase);
    out.push(LogComplex::new(offset + prev.norm().ln(), prev.arg()));

    if n_max == m {
        return;
    }

    // First step: n(m+1, m) = sqrt(2m + 3) cos(Phi) nmm.
    let mf = m as f64;
    let mut curr = (2.0 * mf + 3.0).sqrt() * cos_phi * prev;
    out.push(LogComplex::new(offset + curr.norm().ln(), curr.arg()));

    for l in (m + 2)..=n_max {
        let lf = l as f64;
        let a = ((2.0 * lf + 1.0) * (2.0 * lf - 1.0) / ((lf - mf) * (lf + mf))).sqrt();
        let b = ((2.0 * lf + 1.0) * (lf - 1.0 - mf) * (lf - 1.0 + mf)
            / ((2.0 * lf - 3.0) * (lf - mf) * (lf + mf)))
            .sqrt();
        let next = a * cos_phi * curr - b * prev;
        prev = curr;
        curr = next;
        let mag = curr.norm().max(prev.norm());
        if mag > 1e250 {
            let shift = mag.ln();
            let f = (-shift).exp();
            curr *= f;
            prev *= f;
            offset += shift;
        } else if mag > 0.0 && mag < 1e-250 {
            let shift = mag.ln();
            let f = (-shift).exp();
            curr *= f;
            prev *= f;
            offset += shift;
        }
        out.push(if curr.norm_sqr() == 0.0 {
            LogComplex::ZERO
        } else {
            LogComplex::new(offset + curr.norm().ln(), curr.arg())
        });
    }
}

/// Log magnitudes only, `ln |nlm(cos Phi)|` for `l = m ..= n_max`; the
/// cheaper path for norm accumulation where phases cancel.
pub fn normalized_legendre_log_mags_into(
    m: u32,
    n_max: u32,
    cos_phi: Complex64,
    sin_phi: Complex64,
    out: &mut Vec<f64>,
) {
    assert!(n_max >= m);
    out.clear();
    out.reserve((n_max - m + 1) as usize);
    let mf = m as f64;
    let mut offset = seed_log_prefactor(m) + mf * sin_phi.norm().ln();
    let mut prev = Complex64::from_polar(1.0, mf * sin_phi.arg());
    out.push(offset);
    if n_max == m {
        return;
    }
    let mut curr = (2.0 * mf + 3.0).sqrt() * cos_phi * prev;
    out.push(offset + curr.norm().ln());
    for l in (m + 2)..=n_max {
        let lf = l as f64;
        let a = ((2.0 * lf + 1.0) * (2.0 * lf - 1.0) / ((lf - mf) * (lf + mf))).sqrt();
        let b = ((2.0 * lf + 1.0) * (lf - 1.0 - mf) * (lf - 1.0 + mf)
            / ((2.0 * lf - 3.0) * (lf - mf) * (lf + mf)))
            .sqrt();
        let next = a * cos_phi * curr - b * prev;
        prev = curr;
        curr = next;
        let mag = curr.norm().max(prev.norm());
        if !(1e-250..=1e250).contains(&mag) && mag > 0.0 {
            let shift = mag.ln();
            let f = (-shift).exp();
            curr *= f;
            prev *= f;
            offset += shift;
        }
        out.push(if curr.norm_sqr() == 0.0 {
            f64::NEG_INFINITY
        } else {
            offset + curr.norm().ln()
        });
    }
}

/// Linear-scale evaluation `nlm(cos Phi) * e^{extra_log(l)}` for
/// `l = m ..= n_max`, written into `out[l - m]`. The per-degree `extra_log`
/// must keep the dressed value within `f64` range; the hot kernel sweeps
/// use this to skip the log/atan round trip entirely.
pub fn normalized_legendre_dressed_into(
    m: u32,
    n_max: u32,
    cos_phi: Complex64,
    sin_phi: Complex64,
    extra_log: impl Fn(u32) -> f64,
    out: &mut [Complex64],
) {
    assert!(n_max >= m && out.len() >= (n_max - m + 1) as usize);
    let mf = m as f64;
    let mut offset = seed_log_prefactor(m) + mf * sin_phi.norm().ln();
    let mut prev = Complex64::from_polar(1.0, mf * sin_phi.arg());
    if m % 2 == 1 {
        prev = -prev;
    }
    out[0] = prev * (offset + extra_log(m)).exp();
    if n_max == m {
        return;
    }
    let mut curr = (2.0 * mf + 3.0).sqrt() * cos_phi * prev;
    out[1] = curr * (offset + extra_log(m + 1)).exp();
    for l in (m + 2)..=n_max {
        let lf = l as f64;
        let a = ((2.0 * lf + 1.0) * (2.0 * lf - 1.0) / ((lf - mf) * (lf + mf))).sqrt();
        let b = ((2.0 * lf + 1.0) * (lf - 1.0 - mf) * (lf - 1.0 + mf)
            / ((2.0 * lf - 3.0) * (lf - mf) * (lf + mf)))
            .sqrt();
        let next = a * cos_phi * curr - b * prev;
        prev = curr;
        curr = next;
        let mag = curr.norm().max(prev.norm());
        if !(1e-250..=1e250).contains(&mag) && mag > 0.0 {
            let shift = mag.ln();
            let f = (-shift).exp();
            curr *= f;
            prev *= f;
            offset += shift;
        }
        out[(l - m) as usize] = curr * (offset + extra_log(l)).exp();
    }
}

/// Plain `f64` evaluation at a real argument for small degrees; test oracle
/// and real-sphere checks only.
pub fn real_normalized_legendre(m: u32, n_max: u32, x: f64) -> Vec<f64> {
    assert!(n_max >= m && x.abs() <= 1.0);
    let s = (1.0 - x * x).max(0.0).sqrt();
    let mf = m as f64;
    let mut seed = seed_log_prefactor(m).exp() * s.powi(m as i32);
    if m % 2 == 1 {
        seed = -seed;
    }
    let mut out = vec![seed];
    if n_max == m {
        return out;
    }
    let mut prev = seed;
    let mut curr = (2.0 * mf + 3.0).sqrt() * x * prev;
    out.push(curr);
    for l in (m + 2)..=n_max {
        let lf = l as f64;
        let a = ((2.0 * lf + 1.0) * (2.0 * lf - 1.0) / ((lf - mf) * (lf + mf))).sqrt();
        let b = ((2.0 * lf + 1.0) * (lf - 1.0 - mf) * (lf - 1.0 + mf)
            / ((2.0 * lf - 3.0) * (lf - mf) * (lf + mf)))
            .sqrt();
        let next = a * x * curr - b * prev;
        prev = curr;
        curr = next;
        out.push(curr);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    const FOUR_PI: f64 = 4.0 * std::f64::consts::PI;

    #[test]
    fn real_low_degree_values() {
        // n00 = sqrt(1/4pi), n10 = sqrt(3/4pi) x, n11 = -sqrt(3/8pi) s.
        let x = 0.31_f64;
        let s = (1.0 - x * x).sqrt();
        let m0 = real_normalized_legendre(0, 2, x);
        assert!((m0[0] - (1.0 / FOUR_PI).sqrt()).abs() < 1e-14);
        assert!((m0[1] - (3.0 / FOUR_PI).sqrt() * x).abs() < 1e-14);
        assert!((m0[2] - (5.0 / FOUR_PI).sqrt() * 0.5 * (3.0 * x * x - 1.0)).abs() < 1e-13);
        let m1 = real_normalized_legendre(1, 1, x);
        assert!((m1[0] + (3.0 / (2.0 * FOUR_PI)).sqrt() * s).abs() < 1e-14);
    }

    #[test]
    fn complex_path_matches_real_path_on_real_axis() {
        let x = -0.42_f64;
        let s = (1.0 - x * x).sqrt();
        for m in [0u32, 1, 3, 7] {
            let real = real_normalized_legendre(m, 40, x);
            let cplx = normalized_legendre_log(
                m,
                40,
                Complex64::new(x, 0.0),
                Complex64::new(s, 0.0),
            );
            for (r, c) in real.iter().zip(&cplx) {
                let z = c.to_complex();
                assert!((z.re - r).abs() < 1e-12 * r.abs().max(1e-3), "{z} vs {r}");
                assert!(z.im.abs() < 1e-12);
            }
        }
    }

    #[test]
    fn orthonormality_on_real_sphere() {
        // int nlm(x) nl'm(x) dx over [-1,1] equals delta / (2 pi).
        let rule = crate::numerics::gauss_legendre(64).unwrap();
        for m in [0u32, 2] {
            let vals: Vec<Vec<f64>> = rule
                .nodes
                .iter()
                .map(|&x| real_normalized_legendre(m, m + 4, x))
                .collect();
            for i in 0..=4usize {
                for j in 0..=4usize {
                    let int: f64 = rule
                        .weights
                        .iter()
                        .enumerate()
                        .map(|(k, &w)| w * vals[k][i] * vals[k][j])
                        .sum();
                    let expected = if i == j { 1.0 / (2.0 * std::f64::consts::PI) } else { 0.0 };
                    assert!((int - expected).abs() < 1e-12, "m={m} i={i} j={j}: {int}");
                }
            }
        }
    }

    #[test]
    fn no_overflow_at_degree_300_complex_argument() {
        // cos(phi + i) has |Im| ~ 1, so values reach e^{300}-scale.
        let phi = Complex64::new(1.1, 1.0);
        let vals = normalized_legendre_log(0, 300, phi.cos(), phi.sin());
        let last = vals.last().unwrap();
        assert!(last.log_mag.is_finite());
        assert!(last.log_mag > 200.0, "expected exponential growth, got {}", last.log_mag);
    }

    #[test]
    fn highest_weight_seed_matches_formula() {
        // n_NN = (-1)^N / (2^N N!) sqrt((2N+1)!/4pi) sin^N.
        for n in [1u32, 5, 40] {
            let vals = normalized_legendre_log(
                n,
                n,
                Complex64::new(0.2, 0.1).cos(),
                Complex64::new(0.2, 0.1).sin(),
            );
            let sin_lc = LogComplex::from_complex(Complex64::new(0.2, 0.1).sin());
            let nf = n as f64;
            let log_cn = -nf * 2.0_f64.ln() - ln_gamma(nf + 1.0)
                + 0.5 * (ln_gamma(2.0 * nf + 2.0) - FOUR_PI.ln());
            let expected_mag = log_cn + nf * sin_lc.log_mag;
            assert!((vals[0].log_mag - expected_mag).abs() < 1e-10, "n={n}");
        }
    }
}
