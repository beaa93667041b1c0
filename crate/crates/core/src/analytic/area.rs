use crate::error::{domain, Result};

/// Rate function of the area B_T/T: identically zero (weak LDP, no solver).
pub const CHI_B: f64 = 0.0;

const SECOND_SERIES_BELOW: f64 = 0.5;
const FOURTH_SERIES_BELOW: f64 = 2.0;

fn check(op: &'static str, t: f64, r: f64) -> Result<()> {
    if !(t > 0.0) {
        return Err(domain(op, t, "T > 0"));
    }
    if !(r > 0.0) {
        return Err(domain(op, r, "r > 0"));
    }
    Ok(())
}

/// E_r[B_T²] = (2/r³)(rT - 2 + e^{-rT}(2 + rT)).
pub fn area_second_moment(t: f64, r: f64) -> Result<f64> {
    check("area_second_moment", t, r)?;
    let rho = r * t;
    if rho < SECOND_SERIES_BELOW {
        // 2T³ Σ_{n≥3} (-1)^{n+1} (n-2) ρ^{n-3} / n!
        let mut sum = 0.0;
        let mut p = 1.0 / 6.0; // ρ^{n-3}/n! at n = 3
        for n in 3..60 {
            let sign = if n % 2 == 1 { 1.0 } else { -1.0 };
            let term = sign * (n as f64 - 2.0) * p;
            sum += term;
            if term.abs() < 1e-18 * sum.abs() {
                break;
            }
            p *= rho / (n as f64 + 1.0);
        }
        return Ok(2.0 * t.powi(3) * sum);
    }
    Ok(2.0 / r.powi(3) * (rho - 2.0 + (-rho).exp() * (2.0 + rho)))
}

/// E_r[B_T⁴] = (12ρ² + 120ρ - 840 + e^{-ρ}(9ρ⁴ + 68ρ³ + 288ρ² + 720ρ + 840)) / r⁶.
pub fn area_fourth_moment(t: f64, r: f64) -> Result<f64> {
    check("area_fourth_moment", t, r)?;
    let rho = r * t;
    if rho < FOURTH_SERIES_BELOW {
        // coefficients of ρ^n vanish for n < 6; T⁶ Σ_{n≥6} c_n ρ^{n-6}
        let poly = [840.0, 720.0, 288.0, 68.0, 9.0];
        let mut inv_fact = vec![1.0_f64; 80];
        for i in 1..80 {
            inv_fact[i] = inv_fact[i - 1] / i as f64;
        }
        let mut sum = 0.0;
        let mut pw = 1.0;
        for n in 6..75usize {
            let mut c = 0.0;
            for (j, pj) in poly.iter().enumerate() {
                let m = n - j;
                let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
                c += pj * sign * inv_fact[m];
            }
            let term = c * pw;
            sum += term;
            if term.abs() < 1e-18 * sum.abs() && n > 10 {
                break;
            }
            pw *= rho;
        }
        return Ok(t.powi(6) * sum);
    }
    let rho2 = rho * rho;
    let e = (-rho).exp();
    let p = 9.0 * rho2 * rho2 + 68.0 * rho2 * rho + 288.0 * rho2 + 720.0 * rho + 840.0;
    Ok((12.0 * rho2 + 120.0 * rho - 840.0 + e * p) / r.powi(6))
}

/// Time √6/r at which T³/3 and 2T/r² meet.
pub fn area_crossover_time(r: f64) -> Result<f64> {
    if !(r > 0.0) {
        return Err(domain("area_crossover_time", r, "r > 0"));
    }
    Ok(6f64.sqrt() / r)
}

/// Limiting variance 2/r² of B_T/√T.
pub fn clt_variance(r: f64) -> Result<f64> {
    if !(r > 0.0) {
        return Err(domain("clt_variance", r, "r > 0"));
    }
    Ok(2.0 / (r * r))
}
