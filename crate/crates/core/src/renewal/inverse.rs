use crate::error::{domain, Error, Result};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::{LN_2, PI};

/// Numerical Laplace inversion scheme.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InversionMethod {
    /// Gaver–Stehfest, order 16, real s only.
    GaverStehfest,
    /// Fixed Talbot contour, needs F at complex s.
    Talbot,
}

const GS_ORDER: usize = 16;
const GS_CHECK_ORDER: usize = 18;
const TALBOT_M: usize = 24;
const TALBOT_CHECK_M: usize = 32;
const OSC_REL: f64 = 1e-4;
const OSC_ABS: f64 = 1e-10;

fn factorial(n: usize) -> f64 {
    (1..=n).fold(1.0, |acc, i| acc * i as f64)
}

fn stehfest_weights(n: usize) -> Vec<f64> {
    let h = n / 2;
    (1..=n)
        .map(|k| {
            let mut v = 0.0;
            for j in k.div_ceil(2)..=k.min(h) {
                v += (j as f64).powi(h as i32) * factorial(2 * j)
                    / (factorial(h - j)
                        * factorial(j)
                        * factorial(j - 1)
                        * factorial(k - j)
                        * factorial(2 * j - k));
            }
            if (k + h).is_multiple_of(2) {
                v
            } else {
                -v
            }
        })
        .collect()
}

fn gaver_stehfest<F: FnMut(f64) -> f64>(f: &mut F, t: f64, n: usize) -> f64 {
    let a = LN_2 / t;
    stehfest_weights(n)
        .iter()
        .enumerate()
        .map(|(i, w)| w * f((i + 1) as f64 * a))
        .sum::<f64>()
        * a
}

fn talbot<F: FnMut(Complex64) -> Complex64>(f: &mut F, t: f64, m: usize) -> f64 {
    let r = 2.0 * m as f64 / (5.0 * t);
    let mut sum = 0.5 * (f(Complex64::new(r, 0.0)) * (r * t).exp()).re;
    for k in 1..m {
        let th = k as f64 * PI / m as f64;
        let cot = th.cos() / th.sin();
        let s = Complex64::new(r * th * cot, r * th);
        let sigma = th + (th * cot - 1.0) * cot;
        sum += ((s * t).exp() * f(s) * Complex64::new(1.0, sigma)).re;
    }
    r / m as f64 * sum
}

fn oscillation_check(a: f64, b: f64) -> Result<f64> {
    if (a - b).abs() > OSC_REL * a.abs().max(b.abs()) + OSC_ABS || !a.is_finite() {
        return Err(Error::Oscillation {
            first: a,
            second: b,
        });
    }
    Ok(a)
}

/// Invert a transform given at complex s.
///
/// Gaver–Stehfest only evaluates on the positive real axis.
pub fn inverse_laplace<F>(mut f: F, t: f64, method: InversionMethod) -> Result<f64>
where
    F: FnMut(Complex64) -> Complex64,
{
    if !(t > 0.0) {
        return Err(domain("inverse_laplace", t, "T > 0"));
    }
    match method {
        InversionMethod::Talbot => {
            let a = talbot(&mut f, t, TALBOT_M);
            let b = talbot(&mut f, t, TALBOT_CHECK_M);
            oscillation_check(b, a)
        }
        InversionMethod::GaverStehfest => {
            let mut g = |s: f64| f(Complex64::new(s, 0.0)).re;
            let a = gaver_stehfest(&mut g, t, GS_ORDER);
            let b = gaver_stehfest(&mut g, t, GS_CHECK_ORDER);
            oscillation_check(a, b)
        }
    }
}

/// Gaver–Stehfest inversion of a transform known only on the real axis.
pub fn inverse_laplace_real<F: FnMut(f64) -> f64>(mut f: F, t: f64) -> Result<f64> {
    if !(t > 0.0) {
        return Err(domain("inverse_laplace_real", t, "T > 0"));
    }
    let a = gaver_stehfest(&mut f, t, GS_ORDER);
    let b = gaver_stehfest(&mut f, t, GS_CHECK_ORDER);
    oscillation_check(a, b)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stehfest_weights_sum_to_zero() {
        let w = stehfest_weights(16);
        assert!(w.iter().sum::<f64>().abs() < 1e-6);
    }

    #[test]
    fn unit_step() {
        for m in [InversionMethod::Talbot, InversionMethod::GaverStehfest] {
            let v = inverse_laplace(|s| 1.0 / s, 3.0, m).unwrap();
            let tol = if m == InversionMethod::Talbot {
                1e-12
            } else {
                1e-6
            };
            assert!((v - 1.0).abs() < tol, "{m:?} {v}");
        }
    }

    #[test]
    fn exponential_round_trip_talbot() {
        for c in [0.5, 1.0, 5.0] {
            for t in [0.1, 1.0, 10.0] {
                let v = inverse_laplace(|s| 1.0 / (s + c), t, InversionMethod::Talbot).unwrap();
                assert!((v - (-c * t).exp()).abs() < 1e-8, "c={c} t={t}");
            }
        }
    }

    #[test]
    fn exponential_round_trip_stehfest() {
        for c in [0.5, 1.0] {
            for t in [0.1, 1.0, 3.0] {
                let v = inverse_laplace_real(|s| 1.0 / (s + c), t).unwrap();
                let e = (-c * t).exp();
                // order 16 in double precision: about 1e-5 absolute at best
                assert!((v - e).abs() < 1e-5, "c={c} t={t} {v} {e}");
            }
        }
    }

    #[test]
    fn area_second_moment_transform() {
        let r = 1.0;
        let f = |s: Complex64| 2.0 / (s * s * (s + r) * (s + r));
        for m in [InversionMethod::Talbot, InversionMethod::GaverStehfest] {
            let v = inverse_laplace(f, 1.0, m).unwrap();
            let tol = if m == InversionMethod::Talbot {
                1e-10
            } else {
                1e-6
            };
            assert!((v - 0.207_276_647_028_654_2).abs() < tol * 0.2, "{m:?} {v}");
        }
    }

    #[test]
    fn oscillating_transform_is_flagged() {
        // sin(ωt) with large ω defeats both schemes
        let w = 40.0;
        let r = inverse_laplace(|s| w / (s * s + w * w), 5.0, InversionMethod::GaverStehfest);
        assert!(matches!(r, Err(Error::Oscillation { .. })));
    }

    #[test]
    fn rejects_nonpositive_time() {
        assert!(inverse_laplace(|s| 1.0 / s, 0.0, InversionMethod::Talbot).is_err());
    }
}
