use crate::error::{domain, Result};
use crate::specfun::{airy_prime_first_zero, erf};
use std::f64::consts::PI;

/// E_0[D] for D = ∫_0^1 |W_t| dt.
pub const ABSAREA_FREE_MEAN: f64 = 0.531_923_040_535_243_6;
/// E_0[D²].
pub const ABSAREA_FREE_SECOND_MOMENT: f64 = 0.375;

const SERIES_BELOW: f64 = 0.5;
const ALGEBRAIC_ABOVE: f64 = 40.0;

fn inv_sqrt_2pi() -> f64 {
    1.0 / (2.0 * PI).sqrt()
}

/// Scaled mean f1(ρ), E_r[C_T] = T^{3/2} f1(rT).
pub fn f1(rho: f64) -> Result<f64> {
    if !(rho >= 0.0) {
        return Err(domain("f1", rho, "rho >= 0"));
    }
    if rho < SERIES_BELOW {
        // c_n = 2e_n - e_{n+1} + (-1)^{n+1}/(n+1)!,  e_m = (-1)^m/(m!(2m+1))
        let e = |m: usize, inv_fact: f64| {
            let s = if m.is_multiple_of(2) { 1.0 } else { -1.0 };
            s * inv_fact / (2 * m + 1) as f64
        };
        let mut inv_fact_n = 1.0; // 1/n!
        let mut sum = 0.0;
        let mut pw = 1.0;
        for n in 0..40usize {
            let inv_fact_n1 = inv_fact_n / (n + 1) as f64;
            let s = if n % 2 == 0 { -1.0 } else { 1.0 };
            let c = 2.0 * e(n, inv_fact_n) - e(n + 1, inv_fact_n1) + s * inv_fact_n1;
            let term = c * pw;
            sum += term;
            if n > 2 && term.abs() < 1e-18 * sum.abs() {
                break;
            }
            pw *= rho;
            inv_fact_n = inv_fact_n1;
        }
        return Ok(inv_sqrt_2pi() * sum);
    }
    let sr = rho.sqrt();
    Ok(inv_sqrt_2pi()
        * ((-rho).exp() / rho + PI.sqrt() / (2.0 * rho * sr) * (2.0 * rho - 1.0) * erf(sr)))
}

/// Scaled second moment f3(ρ), E_r[C_T²] = T³ f3(rT).
pub fn f3(rho: f64) -> Result<f64> {
    if !(rho >= 0.0) {
        return Err(domain("f3", rho, "rho >= 0"));
    }
    if rho < SERIES_BELOW {
        // bracket coefficient of ρ^n (n ≥ 3): 6(-1)^n/n! + 5(-1)^{n-1}/(n-1)!
        let mut inv_fact_nm1 = 0.5; // 1/(n-1)! at n = 3
        let mut sum = 0.0;
        let mut pw = 1.0;
        for n in 3..40usize {
            let inv_fact_n = inv_fact_nm1 / n as f64;
            let s = if n % 2 == 0 { 1.0 } else { -1.0 };
            let c = 6.0 * s * inv_fact_n - 5.0 * s * inv_fact_nm1;
            let term = c * pw;
            sum += term;
            if n > 4 && term.abs() < 1e-18 * sum.abs() {
                break;
            }
            pw *= rho;
            inv_fact_nm1 = inv_fact_n;
        }
        return Ok(0.25 * sum);
    }
    let e = (-rho).exp();
    Ok((2.0 * rho * rho + rho - 6.0 + (5.0 * rho + 6.0) * e) / (4.0 * rho.powi(3)))
}

/// Scaled variance f2(ρ) = f3(ρ) - f1(ρ)², Var_r[C_T] = T³ f2(rT).
pub fn f2(rho: f64) -> Result<f64> {
    if !(rho >= 0.0) {
        return Err(domain("f2", rho, "rho >= 0"));
    }
    if rho > ALGEBRAIC_ABOVE {
        // e^{-ρ} and erfc(√ρ) are below 1e-17 relative: exact algebraic remainder
        return Ok((6.0 * rho - 13.0) / (8.0 * rho.powi(3)));
    }
    let m = f1(rho)?;
    Ok((f3(rho)? - m * m).max(0.0))
}

fn check(op: &'static str, t: f64, r: f64) -> Result<()> {
    if !(t > 0.0) {
        return Err(domain(op, t, "T > 0"));
    }
    if !(r > 0.0) {
        return Err(domain(op, r, "r > 0"));
    }
    Ok(())
}

/// E_r[C_T] = T^{3/2} f1(rT).
pub fn absarea_mean(t: f64, r: f64) -> Result<f64> {
    check("absarea_mean", t, r)?;
    Ok(t.powf(1.5) * f1(r * t)?)
}

/// Var_r[C_T] = T³ f2(rT).
pub fn absarea_variance(t: f64, r: f64) -> Result<f64> {
    check("absarea_variance", t, r)?;
    Ok(t.powi(3) * f2(r * t)?)
}

/// E_r[C_T²] = T³ f3(rT).
pub fn absarea_second_moment(t: f64, r: f64) -> Result<f64> {
    check("absarea_second_moment", t, r)?;
    Ok(t.powi(3) * f3(r * t)?)
}

/// Long-time mean rate c*_r = 1/√(2r).
pub fn absarea_mean_rate(r: f64) -> Result<f64> {
    if !(r > 0.0) {
        return Err(domain("absarea_mean_rate", r, "r > 0"));
    }
    Ok(1.0 / (2.0 * r).sqrt())
}

/// Long-time variance rate 3/(4r²).
pub fn absarea_var_rate(r: f64) -> Result<f64> {
    if !(r > 0.0) {
        return Err(domain("absarea_var_rate", r, "r > 0"));
    }
    Ok(0.75 / (r * r))
}

/// Rate function of C_T/T without resetting, 2|ζ'_0|³/(27c²).
pub fn chi_c_free(c: f64) -> Result<f64> {
    if !(c > 0.0) {
        return Err(domain("chi_c_free", c, "c > 0"));
    }
    let z = airy_prime_first_zero()?;
    Ok(2.0 * z.abs().powi(3) / (27.0 * c * c))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f1_closed(rho: f64) -> f64 {
        let sr = rho.sqrt();
        inv_sqrt_2pi()
            * ((-rho).exp() / rho + PI.sqrt() / (2.0 * rho * sr) * (2.0 * rho - 1.0) * erf(sr))
    }

    #[test]
    fn free_mean_constant() {
        assert!((ABSAREA_FREE_MEAN - 4.0 / (3.0 * (2.0 * PI).sqrt())).abs() < 1e-16);
    }

    #[test]
    fn f1_limits() {
        assert!((f1(1e-6).unwrap() - ABSAREA_FREE_MEAN).abs() < 1e-6);
        assert!((f1(0.0).unwrap() - ABSAREA_FREE_MEAN).abs() < 1e-16);
        let rho = 1e4_f64;
        let v = rho.sqrt() * f1(rho).unwrap();
        assert!((v - 1.0 / 2f64.sqrt()).abs() < 0.01 / 2f64.sqrt());
    }

    #[test]
    fn series_branches_match_closed_forms_at_switch() {
        for rho in [0.45_f64, 0.5, 0.55] {
            let s = f1(rho).unwrap();
            assert!(((s - f1_closed(rho)) / s).abs() < 1e-13, "f1 rho={rho}");
            let c = (2.0 * rho * rho + rho - 6.0 + (5.0 * rho + 6.0) * (-rho).exp())
                / (4.0 * rho.powi(3));
            assert!(((f3(rho).unwrap() - c) / c).abs() < 1e-11, "f3 rho={rho}");
        }
    }

    #[test]
    fn f2_limits() {
        let free = 0.375 - ABSAREA_FREE_MEAN * ABSAREA_FREE_MEAN;
        assert!((f2(1e-6).unwrap() - free).abs() < 1e-6);
        assert!((free - 0.0920576).abs() < 1e-6);
        // algebraic branch continuous with the direct difference
        let a = (6.0 * 40.0 - 13.0) / (8.0 * 40f64.powi(3));
        let d = f3(40.0).unwrap() - f1(40.0).unwrap().powi(2);
        assert!(((a - d) / a).abs() < 1e-11);
        // T³ f2(ρ)/T → 3/(4r²)
        let rho = 1e6;
        assert!((rho * rho * f2(rho).unwrap() - 0.75).abs() < 1e-5);
    }

    #[test]
    fn printed_variance_form_agrees() {
        for rho in [0.7_f64, 2.0, 10.0] {
            let sr = rho.sqrt();
            let e = (-rho).exp();
            let inner = 2.0 * sr * e + PI.sqrt() * (2.0 * rho - 1.0) * erf(sr);
            let printed = (2.0 * PI * (2.0 * rho * rho + rho - 6.0 + (5.0 * rho + 6.0) * e)
                - inner * inner)
                / (8.0 * PI * rho.powi(3));
            assert!(
                ((f2(rho).unwrap() - printed) / printed).abs() < 1e-10,
                "rho={rho}"
            );
        }
    }

    #[test]
    fn f1_decreasing() {
        let v: Vec<f64> = [0.01, 0.1, 1.0, 10.0, 100.0]
            .iter()
            .map(|r| f1(*r).unwrap())
            .collect();
        assert!(v.windows(2).all(|w| w[1] < w[0]));
    }

    #[test]
    fn f2_nonnegative() {
        let mut rho = 1e-4;
        while rho < 1e5 {
            assert!(f2(rho).unwrap() >= 0.0);
            rho *= 1.3;
        }
    }

    #[test]
    fn rates() {
        assert!((absarea_mean_rate(1.0).unwrap() - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-15);
        assert_eq!(absarea_mean_rate(2.0).unwrap(), 0.5);
        assert_eq!(absarea_var_rate(1.0).unwrap(), 0.75);
    }

    #[test]
    fn free_rate_function() {
        let z = 1.018_792_971_6_f64;
        let c1 = chi_c_free(1.0).unwrap();
        assert!((c1 - 2.0 * z.powi(3) / 27.0).abs() < 1e-9);
        assert!((c1 - 0.0783).abs() < 1e-4);
        assert!((c1 - 0.078_329_265_149_253_64).abs() < 1e-14);
        assert!((chi_c_free(2.0).unwrap() - c1 / 4.0).abs() < 1e-16);
        assert!(chi_c_free(1e6).unwrap() < 1e-12);
        assert!(chi_c_free(0.0).is_err());
    }
}
