//! Special functions needed by the densities and generating functions.
//!
//! Everything here is a pure function of its arguments. Arguments outside the
//! supported range are reported as [`Error::Domain`] instead of producing NaN.

mod airy;
mod bessel;

pub use airy::{
    airy_ai, airy_ai_int, airy_ai_int_scaled, airy_ai_prime, airy_ai_prime_scaled, airy_ai_scaled,
    airy_h, airy_h_verbose, airy_prime_first_zero, AIRY_PRIME_FIRST_ZERO,
};
pub use bessel::{
    bessel_i0, bessel_i0_scaled, bessel_i0_verbose, bessel_i1_scaled, hyp1f2, hyp1f2_verbose,
};

use crate::error::{domain, Result};
use serde::Serialize;

/// Value of a series or quadrature evaluation together with its diagnostics.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EvalResult {
    pub value: f64,
    /// Upper bound on the truncation error (last-term bound for series).
    pub est_abs_error: f64,
    pub terms_used: usize,
}

/// Gamma function for positive arguments.
pub fn gamma(x: f64) -> Result<f64> {
    if !(x > 0.0) {
        return Err(domain("gamma", x, "x > 0"));
    }
    Ok(libm::tgamma(x))
}

/// Natural log of the gamma function for positive arguments.
pub fn ln_gamma(x: f64) -> Result<f64> {
    if !(x > 0.0) {
        return Err(domain("ln_gamma", x, "x > 0"));
    }
    Ok(libm::lgamma(x))
}

/// Error function. Odd by construction; exactly ±1 beyond |x| = 6.
pub fn erf(x: f64) -> f64 {
    let ax = x.abs();
    let v = if ax > 6.0 { 1.0 } else { libm::erf(ax) };
    if x.is_sign_negative() {
        -v
    } else {
        v
    }
}
