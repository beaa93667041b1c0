use crate::error::{domain, Result};
use crate::specfun::{bessel_i0, hyp1f2};
use crate::RateValue;
use serde::Serialize;
use std::f64::consts::PI;

/// Below this argument W is replaced by its two leading terms 1/(πx) + 1.
const W_SMALL: f64 = 1e-8;

fn ln_w_terms(x: f64) -> Vec<f64> {
    // ln t_j with t_j = x^{j-1}/Γ((j+1)/2)², built by the two-step recurrence
    let lx = x.ln();
    let mut even = -lx - PI.ln();
    let mut odd = 0.0;
    let mut terms = vec![even, odd];
    let mut j = 0usize;
    let mut max = even.max(odd);
    loop {
        let jf = j as f64;
        even += 2.0 * lx - 2.0 * (0.5 * (jf + 1.0)).ln();
        odd += 2.0 * lx - 2.0 * (0.5 * (jf + 2.0)).ln();
        terms.push(even);
        terms.push(odd);
        max = max.max(even).max(odd);
        j += 2;
        if jf > 2.0 * x + 4.0 && even.max(odd) < max - 16.0 * std::f64::consts::LN_10 {
            break;
        }
    }
    terms
}

/// ln W(x), for use where W itself overflows.
pub fn ln_scaling_w(x: f64) -> Result<f64> {
    if !(x > 0.0) {
        return Err(domain("scaling_w", x, "x > 0"));
    }
    if x < W_SMALL {
        return Ok((1.0 / (PI * x) + 1.0).ln());
    }
    let terms = ln_w_terms(x);
    let max = terms.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let s: f64 = terms.iter().map(|t| (t - max).exp()).sum();
    Ok(max + s.ln())
}

/// Scaling function W(x) = (1/x) Σ_j x^j / Γ((j+1)/2)², series form.
pub fn scaling_w(x: f64) -> Result<f64> {
    ln_scaling_w(x).map(f64::exp)
}

/// W(x) = I0(2x) + 1F2(1; 1/2, 1/2; x²)/(πx), used as an independent check.
pub fn scaling_w_dual(x: f64) -> Result<f64> {
    if !(x > 0.0) {
        return Err(domain("scaling_w_dual", x, "x > 0"));
    }
    Ok(bessel_i0(2.0 * x)? + hyp1f2(1.0, 0.5, 0.5, x * x)? / (x * PI))
}

/// Density of the occupation time A_T of [0, ∞) under resetting at rate r.
pub fn occupation_density(a: f64, t: f64, r: f64) -> Result<f64> {
    if !(t > 0.0) {
        return Err(domain("occupation_density", t, "T > 0"));
    }
    if !(r > 0.0) {
        return Err(domain(
            "occupation_density",
            r,
            "r > 0 (use occupation_density_free)",
        ));
    }
    if !(a > 0.0 && a < t) {
        return Err(domain("occupation_density", a, "0 < a < T"));
    }
    let x = r * (a * (t - a)).sqrt();
    Ok((r.ln() - r * t + ln_scaling_w(x)?).exp())
}

/// Arcsine density 1/(π√(a(T-a))) of the occupation time without resetting.
pub fn occupation_density_free(a: f64, t: f64) -> Result<f64> {
    if !(a > 0.0 && a < t) {
        return Err(domain("occupation_density_free", a, "0 < a < T"));
    }
    Ok(1.0 / (PI * (a * (t - a)).sqrt()))
}

/// Large-T approximation to the density of A_T/T.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AsymptoticDensity {
    pub value: f64,
    /// Set when rT < 10, where the approximation is not meant to be used.
    pub low_rt_warning: bool,
}

/// Large-T form of the density of the fraction A_T/T at `a_frac`:
/// √(rT) e^{-rT(1-2√(a(1-a)))} / (√π (a(1-a))^{1/4}).
pub fn occupation_density_asymptotic(a_frac: f64, t: f64, r: f64) -> Result<AsymptoticDensity> {
    if !(a_frac > 0.0 && a_frac < 1.0) {
        return Err(domain("occupation_density_asymptotic", a_frac, "0 < a < 1"));
    }
    if !(t > 0.0 && r > 0.0) {
        return Err(domain("occupation_density_asymptotic", r * t, "r, T > 0"));
    }
    let q = a_frac * (1.0 - a_frac);
    let rt = r * t;
    let value = rt.sqrt() * (-rt * (1.0 - 2.0 * q.sqrt())).exp() / (PI.sqrt() * q.powf(0.25));
    Ok(AsymptoticDensity {
        value,
        low_rt_warning: rt < 10.0,
    })
}

/// Rate function r(1 - 2√(a(1-a))) of the occupation fraction; +∞ off [0, 1].
pub fn chi_a(a: f64, r: f64) -> RateValue {
    if !(0.0..=1.0).contains(&a) {
        return RateValue::Infinite;
    }
    RateValue::Finite(r * (1.0 - 2.0 * (a * (1.0 - a)).sqrt()))
}

/// SCGF of the occupation time, ½(k - 2r + √(k² + 4r²)).
pub fn scgf_a(k: f64, r: f64) -> f64 {
    let root = (k * k + 4.0 * r * r).sqrt();
    if k < 0.0 {
        // k + root = 4r²/(root - k) avoids cancellation for k → -∞
        0.5 * (4.0 * r * r / (root - k) - 2.0 * r)
    } else {
        0.5 * (k - 2.0 * r + root)
    }
}

/// Derivative of [`scgf_a`] in k.
pub fn scgf_a_derivative(k: f64, r: f64) -> f64 {
    0.5 * (1.0 + k / (k * k + 4.0 * r * r).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quad::integrate_adaptive;

    #[test]
    fn w_small_argument() {
        // 50-digit reference value
        let w = scaling_w(0.01).unwrap();
        assert!((w - 32.843_821_582_219_74).abs() < 1e-12 * w);
        let lead = 1.0 / (PI * 0.01) + 1.0 + 0.04 / PI;
        assert!((w - lead).abs() < 1e-3);
    }

    #[test]
    fn w_dual_form_agrees() {
        for x in [0.1, 0.5, 1.0, 2.0, 5.0, 10.0, 20.0] {
            let s = scaling_w(x).unwrap();
            let d = scaling_w_dual(x).unwrap();
            assert!(((s - d) / s).abs() < 1e-10, "x={x}");
        }
        assert!((scaling_w(1.0).unwrap() - 4.535_328_946_511_304).abs() < 1e-13);
    }

    #[test]
    fn w_large_argument_behaviour() {
        let x = 20.0;
        let ratio = scaling_w(x).unwrap() / ((2.0 * x).exp() / (PI * x).sqrt());
        assert!((ratio - 1.0).abs() < 0.02, "{ratio}");
    }

    #[test]
    fn w_rejects_nonpositive() {
        assert!(scaling_w(0.0).is_err());
        assert!(scaling_w_dual(-1.0).is_err());
    }

    fn normalization(r: f64, t: f64) -> f64 {
        // a = T sin²θ removes both endpoint singularities
        integrate_adaptive(
            |th| {
                let s = th.sin();
                let a = t * s * s;
                let da = 2.0 * t * s * th.cos();
                if a <= 0.0 || a >= t {
                    0.0
                } else {
                    occupation_density(a, t, r).unwrap() * da
                }
            },
            0.0,
            std::f64::consts::FRAC_PI_2,
            1e-13,
            1e-13,
        )
        .unwrap()
        .value
    }

    #[test]
    fn occupation_density_normalized() {
        for (r, t) in [(1.0, 5.0), (2.0, 3.0), (0.5, 8.0)] {
            let v = normalization(r, t);
            assert!((v - 1.0).abs() < 1e-6, "r={r} T={t} v={v}");
        }
    }

    #[test]
    fn occupation_density_symmetric() {
        for a in [0.3, 1.1, 2.2] {
            let p = occupation_density(a, 5.0, 1.0).unwrap();
            let q = occupation_density(5.0 - a, 5.0, 1.0).unwrap();
            assert!((p - q).abs() < 1e-15 * p);
        }
        assert!(occupation_density(0.0, 5.0, 1.0).is_err());
        assert!(occupation_density(5.0, 5.0, 1.0).is_err());
        assert!(occupation_density(1.0, 5.0, 0.0).is_err());
    }

    #[test]
    fn occupation_density_near_arcsine() {
        let p = occupation_density(0.5, 1.0, 1e-3).unwrap();
        let q = occupation_density_free(0.5, 1.0).unwrap();
        assert!(((p - q) / q).abs() < 0.01);
        assert!((q - 2.0 / PI).abs() < 1e-15);
        let q25 = occupation_density_free(0.25, 1.0).unwrap();
        assert!((q25 - 0.7351).abs() < 1e-4);
        assert_eq!(q25, occupation_density_free(0.75, 1.0).unwrap());
    }

    #[test]
    fn asymptotic_density() {
        let t = 40.0;
        let exact = t * occupation_density(0.3 * t, t, 1.0).unwrap();
        let approx = occupation_density_asymptotic(0.3, t, 1.0).unwrap();
        assert!(!approx.low_rt_warning);
        assert!((exact / approx.value - 1.0).abs() < 0.05);
        let half = occupation_density_asymptotic(0.5, 20.0, 1.0).unwrap().value;
        assert!((half - 20f64.sqrt() / (PI.sqrt() * 0.25f64.powf(0.25))).abs() < 1e-12);
        assert!(
            occupation_density_asymptotic(0.5, 5.0, 1.0)
                .unwrap()
                .low_rt_warning
        );
        assert!(
            occupation_density_asymptotic(0.45, 20.0, 1.0)
                .unwrap()
                .value
                < half
        );
    }

    #[test]
    fn rate_function_values() {
        assert_eq!(chi_a(0.5, 3.0), RateValue::Finite(0.0));
        assert_eq!(chi_a(1.0, 1.0), RateValue::Finite(1.0));
        assert_eq!(chi_a(0.0, 2.0), RateValue::Finite(2.0));
        assert!((chi_a(0.9, 1.0).to_f64() - 0.4).abs() < 1e-15);
        assert_eq!(chi_a(1.1, 1.0), RateValue::Infinite);
        assert_eq!(chi_a(-0.1, 1.0), RateValue::Infinite);
    }

    #[test]
    fn scgf_values() {
        assert_eq!(scgf_a(0.0, 1.7), 0.0);
        assert!((scgf_a(-3.0, 2.0) + 1.0).abs() < 1e-15);
        assert_eq!(scgf_a_derivative(0.0, 1.0), 0.5);
        // k → -∞: λ → -r
        assert!((scgf_a(-1e9, 1.0) + 1.0).abs() < 1e-8);
    }

    #[test]
    fn chi_bounded_by_rate() {
        for i in 0..=100 {
            let a = i as f64 / 100.0;
            assert!(chi_a(a, 1.5).to_f64() <= 1.5 + 1e-15);
        }
    }
}
