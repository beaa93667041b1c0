use super::EvalResult;
use crate::error::{domain, Error, Result};
use crate::quad::{integrate_adaptive, GaussLaguerre, GaussLegendre};
use std::f64::consts::PI;
use std::sync::OnceLock;

/// Ai(0) = 1/(3^{2/3} Γ(2/3)).
const AI0: f64 = 0.355_028_053_887_817_2;
/// Ai'(0) = -1/(3^{1/3} Γ(1/3)).
const AIP0: f64 = -0.258_819_403_792_806_8;

/// First zero of Ai'. [`airy_prime_first_zero`] recomputes it from the
/// implementation; this constant is the cached reference.
pub const AIRY_PRIME_FIRST_ZERO: f64 = -1.018_792_971_647_471;

const LOWER_LIMIT: f64 = -5.0;
const MACLAURIN_UPPER: f64 = 1.0;
const ASYMPTOTIC_FROM: f64 = 8.0;
const AI_INT_CUTOFF: f64 = 40.0;
const SCALED_INT_FROM: f64 = 2.0;

fn zeta(x: f64) -> f64 {
    2.0 / 3.0 * x * x.sqrt()
}

fn check(op: &'static str, x: f64) -> Result<()> {
    if x >= LOWER_LIMIT {
        Ok(())
    } else {
        Err(domain(op, x, "x >= -5"))
    }
}

/// Ai and Ai' from the two Maclaurin branches f, g.
fn maclaurin(x: f64) -> (f64, f64) {
    let x3 = x * x * x;
    let mut f = 1.0;
    let mut g = x;
    let mut fp = 0.0;
    let mut gp = 1.0;
    let (mut tf, mut tg, mut tfp, mut tgp) = (1.0, x, 0.5 * x * x, 1.0);
    fp += tfp;
    for k in 0..200 {
        let kf = k as f64;
        tf *= x3 / ((3.0 * kf + 2.0) * (3.0 * kf + 3.0));
        tg *= x3 / ((3.0 * kf + 3.0) * (3.0 * kf + 4.0));
        tgp *= x3 / ((3.0 * kf + 1.0) * (3.0 * kf + 3.0));
        f += tf;
        g += tg;
        gp += tgp;
        if k >= 1 {
            tfp *= x3 / ((3.0 * kf) * (3.0 * kf + 2.0));
            fp += tfp;
        }
        let small = 1e-18;
        if tf.abs() < small && tg.abs() < small && tgp.abs() < small && tfp.abs() < small && k > 2 {
            break;
        }
    }
    (AI0 * f + AIP0 * g, AI0 * fp + AIP0 * gp)
}

fn legendre20() -> &'static GaussLegendre {
    static RULE: OnceLock<GaussLegendre> = OnceLock::new();
    RULE.get_or_init(|| GaussLegendre::new(20))
}

/// Scaled Ai, Ai' (times e^{ζ}) from the damped integral along the steepest
/// descent direction, for 1 <= x <= 8.
fn integral_scaled(x: f64) -> (f64, f64) {
    let c = 1.0 / (3.0 * x.powf(0.75));
    let gl = legendre20();
    let panels = 24;
    let h = 6.5 / panels as f64;
    let mut j0 = 0.0;
    let mut j2 = 0.0;
    for p in 0..panels {
        let mid = (p as f64 + 0.5) * h;
        for (node, w) in gl.nodes.iter().zip(&gl.weights) {
            let u = mid + 0.5 * h * node;
            let u2 = u * u;
            let v = (-u2).exp() * (c * u2 * u).cos() * w * 0.5 * h;
            j0 += v;
            j2 += u2 * v;
        }
    }
    let ai = x.powf(-0.25) * j0 / PI;
    let aip = -x.sqrt() * ai - j2 / (2.0 * PI * x.powf(1.25));
    (ai, aip)
}

/// Scaled asymptotic expansion for x > 8.
fn asymptotic_scaled(x: f64) -> (f64, f64) {
    let z = zeta(x);
    let mut u = 1.0;
    let mut su = 1.0;
    let mut sv = 1.0;
    let mut zp = 1.0;
    let mut last = f64::INFINITY;
    for k in 1..40 {
        let kf = k as f64;
        u *= (6.0 * kf - 5.0) * (6.0 * kf - 3.0) * (6.0 * kf - 1.0)
            / (216.0 * (2.0 * kf - 1.0) * kf);
        let v = -(6.0 * kf + 1.0) / (6.0 * kf - 1.0) * u;
        zp *= -1.0 / z;
        let tu = u * zp;
        if tu.abs() > last || tu.abs() < 1e-18 {
            break;
        }
        last = tu.abs();
        su += tu;
        sv += v * zp;
    }
    let x14 = x.powf(0.25);
    let ai = su / (2.0 * PI.sqrt() * x14);
    let aip = -x14 * sv / (2.0 * PI.sqrt());
    (ai, aip)
}

/// (e^{ζ} Ai(x), e^{ζ} Ai'(x)) for x >= 0.
fn scaled_pair(x: f64) -> (f64, f64) {
    if x < MACLAURIN_UPPER {
        let (a, ap) = maclaurin(x);
        let e = zeta(x).exp();
        (a * e, ap * e)
    } else if x <= ASYMPTOTIC_FROM {
        integral_scaled(x)
    } else {
        asymptotic_scaled(x)
    }
}

fn pair(x: f64) -> (f64, f64) {
    if x < MACLAURIN_UPPER {
        maclaurin(x)
    } else {
        let (a, ap) = scaled_pair(x);
        let e = (-zeta(x)).exp();
        (a * e, ap * e)
    }
}

/// Airy function Ai(x) for x >= -5.
pub fn airy_ai(x: f64) -> Result<f64> {
    check("airy_ai", x)?;
    Ok(pair(x).0)
}

/// Derivative Ai'(x) for x >= -5.
pub fn airy_ai_prime(x: f64) -> Result<f64> {
    check("airy_ai_prime", x)?;
    Ok(pair(x).1)
}

/// e^{2x^{3/2}/3} Ai(x) for x >= 0.
pub fn airy_ai_scaled(x: f64) -> Result<f64> {
    if !(x >= 0.0) {
        return Err(domain("airy_ai_scaled", x, "x >= 0"));
    }
    Ok(scaled_pair(x).0)
}

/// e^{2x^{3/2}/3} Ai'(x) for x >= 0.
pub fn airy_ai_prime_scaled(x: f64) -> Result<f64> {
    if !(x >= 0.0) {
        return Err(domain("airy_ai_prime_scaled", x, "x >= 0"));
    }
    Ok(scaled_pair(x).1)
}

fn laguerre48() -> &'static GaussLaguerre {
    static RULE: OnceLock<GaussLaguerre> = OnceLock::new();
    RULE.get_or_init(|| GaussLaguerre::new(48).expect("48-node Laguerre rule"))
}

fn ai_int_scaled_laguerre(x: f64) -> f64 {
    // AI(x) = e^{-ζ(x)} ∫_0^∞ e^{-u} Ai_s(t(u)) / √t(u) du, ζ(t(u)) = ζ(x) + u
    let z = zeta(x);
    laguerre48().integrate(|u| {
        let t = (1.5 * (z + u)).powf(2.0 / 3.0);
        scaled_pair(t).0 / t.sqrt()
    })
}

fn ai_int_quadrature(x: f64) -> Result<EvalResult> {
    let (lo, hi, sign) = if x >= 0.0 {
        (0.0, x, -1.0)
    } else {
        (x, 0.0, 1.0)
    };
    if lo == hi {
        return Ok(EvalResult {
            value: 1.0 / 3.0,
            est_abs_error: 0.0,
            terms_used: 0,
        });
    }
    let r = integrate_adaptive(|t| pair(t).0, lo, hi, 1e-14, 1e-14)?;
    Ok(EvalResult {
        value: 1.0 / 3.0 + sign * r.value,
        est_abs_error: r.abs_error,
        terms_used: r.evaluations,
    })
}

/// Integral Airy function AI(x) = ∫_x^∞ Ai(t) dt for x >= -5.
pub fn airy_ai_int(x: f64) -> Result<f64> {
    check("airy_ai_int", x)?;
    if x >= AI_INT_CUTOFF {
        return Ok(0.0);
    }
    if x >= SCALED_INT_FROM {
        return Ok(ai_int_scaled_laguerre(x) * (-zeta(x)).exp());
    }
    Ok(ai_int_quadrature(x)?.value)
}

/// e^{2x^{3/2}/3} AI(x) for x >= 0.
pub fn airy_ai_int_scaled(x: f64) -> Result<f64> {
    if !(x >= 0.0) {
        return Err(domain("airy_ai_int_scaled", x, "x >= 0"));
    }
    if x >= SCALED_INT_FROM {
        Ok(ai_int_scaled_laguerre(x))
    } else {
        Ok(ai_int_quadrature(x)?.value * zeta(x).exp())
    }
}

/// H(x) = -2^{1/3} AI(x) / Ai'(x), defined for x above the first zero of Ai'.
pub fn airy_h(x: f64) -> Result<f64> {
    airy_h_verbose(x).map(|r| r.value)
}

pub fn airy_h_verbose(x: f64) -> Result<EvalResult> {
    if !(x > AIRY_PRIME_FIRST_ZERO) {
        return Err(domain("airy_h", x, "x > first zero of Ai'"));
    }
    let c = 2f64.cbrt();
    if x >= SCALED_INT_FROM {
        let num = ai_int_scaled_laguerre(x);
        let den = scaled_pair(x).1;
        Ok(EvalResult {
            value: -c * num / den,
            est_abs_error: 1e-14 * (c * num / den).abs(),
            terms_used: laguerre48().len(),
        })
    } else {
        let q = ai_int_quadrature(x)?;
        let den = pair(x).1;
        Ok(EvalResult {
            value: -c * q.value / den,
            est_abs_error: c * q.est_abs_error / den.abs(),
            terms_used: q.terms_used,
        })
    }
}

/// First (largest) zero of Ai', by bisection on [-1.2, -0.9] and secant polish.
pub fn airy_prime_first_zero() -> Result<f64> {
    static ZERO: OnceLock<Result<f64>> = OnceLock::new();
    ZERO.get_or_init(find_first_zero).clone()
}

fn find_first_zero() -> Result<f64> {
    let f = |x: f64| maclaurin(x).1;
    let (mut a, mut b) = (-1.2, -0.9);
    let (mut fa, fb) = (f(a), f(b));
    if fa.signum() == fb.signum() {
        return Err(Error::Bracket {
            op: "airy_prime_first_zero",
            lo: a,
            hi: b,
        });
    }
    while b - a > 1e-6 {
        let m = 0.5 * (a + b);
        let fm = f(m);
        if fm.signum() == fa.signum() {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    let (mut x0, mut x1) = (a, b);
    let (mut f0, mut f1) = (f(x0), f(x1));
    for _ in 0..50 {
        if f1.abs() <= 1e-15 || f1 == f0 {
            break;
        }
        let x2 = x1 - f1 * (x1 - x0) / (f1 - f0);
        x0 = x1;
        f0 = f1;
        x1 = x2;
        f1 = f(x1);
    }
    if f1.abs() > 1e-12 {
        return Err(Error::NonConvergence {
            op: "airy_prime_first_zero",
            iterations: 50,
        });
    }
    Ok(x1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::specfun::gamma;

    #[test]
    fn values_at_origin_match_gamma_oracle() {
        let ai0 = 1.0 / (3f64.powf(2.0 / 3.0) * gamma(2.0 / 3.0).unwrap());
        let aip0 = -1.0 / (3f64.cbrt() * gamma(1.0 / 3.0).unwrap());
        assert!((airy_ai(0.0).unwrap() - ai0).abs() < 1e-15);
        assert!((airy_ai_prime(0.0).unwrap() - aip0).abs() < 1e-15);
        assert!((ai0 - 0.3550280539).abs() < 1e-10);
    }

    #[test]
    fn reference_values() {
        // 30-digit reference values
        let cases = [
            (5.0, 1.083_444_281_360_744_2e-4, -2.474_138_908_684_625e-4),
            (8.0, 4.692_207_616_099_231_6e-8, -1.341_439_297_906_786_6e-7),
            (-2.0, 0.227_407_428_201_685_6, 0.618_259_020_741_691_1),
            (-5.0, 0.350_761_009_024_114_2, 0.327_192_818_554_443_6),
            (1.0, 0.135_292_416_312_881_4, -0.159_147_441_296_793_3),
            (2.5, 0.015_725_923_380_470_49, -0.026_250_881_035_903_23),
        ];
        for (x, ai, aip) in cases {
            assert!((airy_ai(x).unwrap() - ai).abs() < 1e-12, "Ai({x})");
            assert!((airy_ai_prime(x).unwrap() - aip).abs() < 1e-12, "Ai'({x})");
        }
    }

    #[test]
    fn branches_overlap_at_switch_points() {
        for x in [7.5, 8.0, 8.5] {
            let (a, ap) = integral_scaled(x);
            let (b, bp) = asymptotic_scaled(x);
            assert!((a - b).abs() < 1e-12 * a.abs(), "x={x}");
            assert!((ap - bp).abs() < 1e-12 * ap.abs(), "x={x}");
        }
        for x in [0.9, 1.0, 1.1] {
            let (a, ap) = maclaurin(x);
            let e = (-zeta(x)).exp();
            let (b, bp) = integral_scaled(x);
            assert!((a - b * e).abs() < 1e-13, "x={x}");
            assert!((ap - bp * e).abs() < 1e-13, "x={x}");
        }
    }

    #[test]
    fn central_difference_matches_derivative() {
        let h = 1e-5;
        let mut x = -2.0;
        while x <= 5.0 {
            let d = (airy_ai(x + h).unwrap() - airy_ai(x - h).unwrap()) / (2.0 * h);
            assert!((d - airy_ai_prime(x).unwrap()).abs() < 1e-8, "x={x}");
            x += 0.05;
        }
    }

    #[test]
    fn domain_is_enforced() {
        assert!(airy_ai(-5.1).is_err());
        assert!(airy_ai_prime(-6.0).is_err());
        assert!(airy_ai_int(-5.5).is_err());
        assert!(airy_h(-1.1).is_err());
    }

    #[test]
    fn integral_airy_values() {
        assert!((airy_ai_int(0.0).unwrap() - 1.0 / 3.0).abs() < 1e-15);
        assert_eq!(airy_ai_int(40.0).unwrap(), 0.0);
        assert!((airy_ai_int(1.0).unwrap() - 0.097_015_991_416_223_55).abs() < 1e-11);
        assert!((airy_ai_int(5.0).unwrap() - 4.574_302_741_545_384_7e-5).abs() < 1e-11);
        // both evaluation routes agree around the switch
        let q = ai_int_quadrature(2.5).unwrap().value;
        let l = ai_int_scaled_laguerre(2.5) * (-zeta(2.5)).exp();
        assert!((q - l).abs() < 1e-13);
    }

    #[test]
    fn integral_airy_is_decreasing() {
        // AI' = -Ai, so AI decreases exactly where Ai > 0: above its first zero -2.338
        let mut prev = airy_ai_int(-2.33).unwrap();
        let mut x = -2.3;
        while x < 39.0 {
            let v = airy_ai_int(x).unwrap();
            assert!(v < prev, "x={x}");
            prev = v;
            x += 0.1;
        }
    }

    #[test]
    fn first_zero_of_derivative() {
        let z = airy_prime_first_zero().unwrap();
        assert!((z - AIRY_PRIME_FIRST_ZERO).abs() < 1e-12);
        assert!(airy_ai_prime(z).unwrap().abs() <= 1e-12);
        assert!(airy_ai_prime(-1.2).unwrap().signum() != airy_ai_prime(-0.9).unwrap().signum());
    }

    #[test]
    fn scaled_h_matches_unscaled() {
        for x in [2.0, 3.0] {
            let c = 2f64.cbrt();
            let direct = -c * airy_ai_int(x).unwrap() / airy_ai_prime(x).unwrap();
            assert!((airy_h(x).unwrap() - direct).abs() < 1e-12 * direct);
        }
    }
}
