use super::EvalResult;
use crate::error::{domain, Error, Result};

const I0_SERIES_LIMIT: f64 = 15.0;
const HYP_TERM_CAP: usize = 100_000;

/// Modified Bessel function I0 for x >= 0.
pub fn bessel_i0(x: f64) -> Result<f64> {
    bessel_i0_verbose(x).map(|r| r.value)
}

pub fn bessel_i0_verbose(x: f64) -> Result<EvalResult> {
    if !(x >= 0.0) {
        return Err(domain("bessel_i0", x, "x >= 0"));
    }
    if x <= I0_SERIES_LIMIT {
        Ok(i0_series(x))
    } else {
        Ok(i0_asymptotic(x))
    }
}

pub(crate) fn i0_series(x: f64) -> EvalResult {
    let q = 0.25 * x * x;
    let mut term = 1.0;
    let mut sum = 1.0;
    let mut m = 0usize;
    loop {
        m += 1;
        term *= q / (m * m) as f64;
        sum += term;
        if term < 1e-17 * sum {
            break;
        }
    }
    EvalResult {
        value: sum,
        est_abs_error: term,
        terms_used: m + 1,
    }
}

pub(crate) fn i0_asymptotic(x: f64) -> EvalResult {
    // e^x/√(2πx) Σ a_k x^{-k}, a_k = a_{k-1} (2k-1)²/(8k)
    let mut term = 1.0_f64;
    let mut sum = 1.0_f64;
    let mut k = 0usize;
    loop {
        let kf = (k + 1) as f64;
        let next = term * (2.0 * kf - 1.0).powi(2) / (8.0 * kf * x);
        if next.abs() >= term.abs() || next.abs() < 1e-17 * sum.abs() {
            term = next;
            break;
        }
        term = next;
        sum += term;
        k += 1;
    }
    let scale = x.exp() / (2.0 * std::f64::consts::PI * x).sqrt();
    EvalResult {
        value: scale * sum,
        est_abs_error: scale * term.abs(),
        terms_used: k + 1,
    }
}

/// e^{-x} I0(x) for x >= 0, free of overflow.
pub fn bessel_i0_scaled(x: f64) -> Result<f64> {
    if !(x >= 0.0) {
        return Err(domain("bessel_i0_scaled", x, "x >= 0"));
    }
    if x <= I0_SERIES_LIMIT {
        Ok(i0_series(x).value * (-x).exp())
    } else {
        Ok(scaled_asymptotic(x, 0.0))
    }
}

/// e^{-x} I1(x) for x >= 0.
pub fn bessel_i1_scaled(x: f64) -> Result<f64> {
    if !(x >= 0.0) {
        return Err(domain("bessel_i1_scaled", x, "x >= 0"));
    }
    if x <= I0_SERIES_LIMIT {
        // Σ (x/2)^{2m+1} / (m!(m+1)!)
        let q = 0.25 * x * x;
        let mut term = 0.5 * x;
        let mut sum = term;
        let mut m = 0usize;
        while term > 1e-17 * sum {
            m += 1;
            term *= q / (m * (m + 1)) as f64;
            sum += term;
        }
        Ok(sum * (-x).exp())
    } else {
        Ok(scaled_asymptotic(x, 1.0))
    }
}

/// e^{-x} I_ν(x) ~ (2πx)^{-1/2} Σ c_k x^{-k}, c_k = -c_{k-1}(4ν² - (2k-1)²)/(8k).
fn scaled_asymptotic(x: f64, nu: f64) -> f64 {
    let mu = 4.0 * nu * nu;
    let mut term = 1.0_f64;
    let mut sum = 1.0_f64;
    for k in 1..60 {
        let kf = k as f64;
        let next = -term * (mu - (2.0 * kf - 1.0).powi(2)) / (8.0 * kf * x);
        if next.abs() >= term.abs() || next.abs() < 1e-17 * sum.abs() {
            break;
        }
        term = next;
        sum += term;
    }
    sum / (2.0 * std::f64::consts::PI * x).sqrt()
}

fn is_nonpositive_integer(b: f64) -> bool {
    b <= 0.0 && b.fract() == 0.0
}

/// Generalized hypergeometric function 1F2(a; b1, b2; x).
pub fn hyp1f2(a: f64, b1: f64, b2: f64, x: f64) -> Result<f64> {
    hyp1f2_verbose(a, b1, b2, x).map(|r| r.value)
}

pub fn hyp1f2_verbose(a: f64, b1: f64, b2: f64, x: f64) -> Result<EvalResult> {
    if is_nonpositive_integer(b1) {
        return Err(domain("hyp1f2", b1, "b1 not a nonpositive integer"));
    }
    if is_nonpositive_integer(b2) {
        return Err(domain("hyp1f2", b2, "b2 not a nonpositive integer"));
    }
    let mut term = 1.0;
    let mut sum = 1.0;
    for m in 0..HYP_TERM_CAP {
        let mf = m as f64;
        term *= (a + mf) * x / ((b1 + mf) * (b2 + mf) * (mf + 1.0));
        sum += term;
        if term == 0.0 || term.abs() < 1e-16 * sum.abs() {
            return Ok(EvalResult {
                value: sum,
                est_abs_error: term.abs(),
                terms_used: m + 2,
            });
        }
    }
    Err(Error::NonConvergence {
        op: "hyp1f2",
        iterations: HYP_TERM_CAP,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn i0_known_values() {
        assert_eq!(bessel_i0(0.0).unwrap(), 1.0);
        assert!((bessel_i0(1.0).unwrap() - 1.2660658777520082).abs() < 1e-15);
        assert!((bessel_i0(2.0).unwrap() - 2.2795853023360673).abs() < 1e-14);
        assert!(bessel_i0(-0.1).is_err());
    }

    #[test]
    fn i0_branches_agree_at_switch() {
        for x in [14.0, 15.0, 16.0, 20.0] {
            let s = i0_series(x).value;
            let a = i0_asymptotic(x).value;
            assert!(((s - a) / s).abs() < 1e-12, "x={x} s={s} a={a}");
        }
    }

    #[test]
    fn scaled_bessel_values() {
        // mpmath references
        assert!((bessel_i0_scaled(1.0).unwrap() - 0.465_759_607_593_640_6).abs() < 1e-15);
        assert!((bessel_i1_scaled(1.0).unwrap() - 0.207_910_415_349_708_4).abs() < 1e-15);
        assert!((bessel_i1_scaled(30.0).unwrap() - 0.071_916_330_598_647_55).abs() < 1e-15);
        assert!((bessel_i0_scaled(500.0).unwrap() - 0.017_845_706_500_153_17).abs() < 1e-15);
        assert_eq!(bessel_i1_scaled(0.0).unwrap(), 0.0);
        for x in [14.0, 15.0, 16.0] {
            let ser = i0_series(x).value * (-x).exp();
            assert!((ser - scaled_asymptotic(x, 0.0)).abs() < 1e-13 * ser);
        }
    }

    #[test]
    fn i1_branches_agree_at_switch() {
        let below = bessel_i1_scaled(15.0).unwrap();
        let above = scaled_asymptotic(15.0, 1.0);
        assert!((below - above).abs() < 1e-12 * below);
    }

    #[test]
    fn i0_large_argument() {
        // mpmath: besseli(0, 40)
        let v = bessel_i0(40.0).unwrap();
        assert!(((v - 1.489_477_479_341_99e16) / v).abs() < 1e-12);
    }

    fn hyp_oracle(x: f64) -> f64 {
        // 60-term direct summation with Pochhammer symbols
        let mut sum = 0.0;
        for m in 0..60 {
            let mut num = 1.0;
            let mut den = 1.0;
            for j in 0..m {
                let jf = j as f64;
                num *= (1.0 + jf) * x;
                den *= (0.5 + jf) * (0.5 + jf) * (jf + 1.0);
            }
            sum += num / den;
        }
        sum
    }

    #[test]
    fn hyp1f2_matches_direct_sum() {
        assert_eq!(hyp1f2(1.0, 0.5, 0.5, 0.0).unwrap(), 1.0);
        for x in [1.0, 0.25] {
            let o = hyp_oracle(x);
            let v = hyp1f2(1.0, 0.5, 0.5, x).unwrap();
            assert!(((v - o) / o).abs() < 1e-14, "x={x}");
        }
    }

    #[test]
    fn hyp1f2_rejects_pole_parameters() {
        assert!(hyp1f2(1.0, 0.0, 0.5, 1.0).is_err());
        assert!(hyp1f2(1.0, 0.5, -2.0, 1.0).is_err());
        assert!(hyp1f2(1.0, -0.5, 0.5, 1.0).is_ok());
    }

    #[test]
    fn hyp1f2_verbose_reports_terms() {
        let r = hyp1f2_verbose(1.0, 0.5, 0.5, 100.0).unwrap();
        assert!(r.terms_used > 10 && r.terms_used < HYP_TERM_CAP);
        assert!(r.est_abs_error <= 1e-16 * r.value);
    }
}
