//! SCGF of the absolute area with resetting, k < 0.
//!
//! λ_r(k) is the largest real root in s of r G̃_0(k, s + r) = 1 with
//! G̃_0(k, s) = (-k)^{-2/3} H(2^{1/3} s/(-k)^{2/3}). Writing
//! x = 2^{1/3}(s + r)/(-k)^{2/3} the condition reads H(x) = (-k)^{2/3}/r, and
//! H decreases from +∞ at the first zero of Ai' to 0 at +∞.

use crate::error::{domain, Error, Result};
use crate::renewal::free_gf_absarea;
use crate::roots::brent;
use crate::specfun::{airy_h, airy_prime_first_zero};

fn cbrt2() -> f64 {
    2f64.cbrt()
}

/// λ_r(k) for k < 0.
pub fn scgf_c(k: f64, r: f64) -> Result<f64> {
    if !(k < 0.0) {
        return Err(domain("scgf_c", k, "k < 0"));
    }
    if !(r > 0.0) {
        return Err(domain("scgf_c", r, "r > 0"));
    }
    let scale = (-k).powf(2.0 / 3.0);
    let target = scale / r;
    let f = |x: f64| airy_h(x).map(|h| h - target).unwrap_or(f64::NAN);
    let zeta = airy_prime_first_zero()?;
    let mut lo = zeta + 1e-6;
    if !(f(lo) > 0.0) {
        lo = zeta + 1e-12 * zeta.abs();
        if !(f(lo) > 0.0) {
            return Err(Error::Bracket {
                op: "scgf_c",
                lo,
                hi: lo,
            });
        }
    }
    // H(x) ~ 2^{1/3}/x for large x
    let mut hi = (2.0 * cbrt2() / target).max(1.0);
    let mut expansions = 0;
    while !(f(hi) < 0.0) {
        hi *= 2.0;
        expansions += 1;
        if expansions > 200 {
            return Err(Error::Bracket {
                op: "scgf_c",
                lo,
                hi,
            });
        }
    }
    let x = brent("scgf_c", f, lo, hi, 1e-15 * hi.abs().max(1.0), 500)?;
    Ok(x * scale / cbrt2() - r)
}

/// r G̃_0(k, λ + r) - 1 at a candidate λ.
pub fn scgf_c_residual(k: f64, r: f64, lambda: f64) -> Result<f64> {
    free_gf_absarea()
        .eval(k, lambda + r)
        .map(|g| r * g - 1.0)
        .ok_or(Error::Domain {
            op: "scgf_c_residual",
            value: lambda,
            expected: "lambda + r above the singularity",
        })
}

/// Reset-free power law (1/2)^{1/3} (-k)^{2/3} ζ'_0.
pub fn scgf_c_free(k: f64) -> Result<f64> {
    if !(k <= 0.0) {
        return Err(domain("scgf_c_free", k, "k <= 0"));
    }
    Ok(0.5f64.cbrt() * (-k).powf(2.0 / 3.0) * airy_prime_first_zero()?)
}
