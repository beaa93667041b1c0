//! Closed-form densities, moments, scaling functions and rate functions.

mod absarea;
mod area;
mod occupation;

pub use absarea::{
    absarea_mean, absarea_mean_rate, absarea_second_moment, absarea_var_rate, absarea_variance,
    chi_c_free, f1, f2, f3, ABSAREA_FREE_MEAN, ABSAREA_FREE_SECOND_MOMENT,
};
pub use area::{area_crossover_time, area_fourth_moment, area_second_moment, clt_variance, CHI_B};
pub use occupation::{
    chi_a, ln_scaling_w, occupation_density, occupation_density_asymptotic,
    occupation_density_free, scaling_w, scaling_w_dual, scgf_a, scgf_a_derivative,
    AsymptoticDensity,
};

use serde::Serialize;

/// Diffusion constant of the underlying Brownian motion, fixed to 1.
pub const SIGMA: f64 = 1.0;

/// A density value at a location.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DensityPoint {
    pub location: f64,
    pub density: f64,
}

/// Stationary density of the reset process, √(r/2) e^{-√(2r)|x|}.
pub fn stationary_density(x: f64, r: f64) -> crate::Result<f64> {
    if !(r > 0.0) {
        return Err(crate::error::domain("stationary_density", r, "r > 0"));
    }
    Ok((0.5 * r).sqrt() * (-(2.0 * r).sqrt() * x.abs()).exp())
}

/// Distribution function of the stationary law.
pub fn stationary_cdf(x: f64, r: f64) -> crate::Result<f64> {
    if !(r > 0.0) {
        return Err(crate::error::domain("stationary_cdf", r, "r > 0"));
    }
    let tail = 0.5 * (-(2.0 * r).sqrt() * x.abs()).exp();
    Ok(if x < 0.0 { tail } else { 1.0 - tail })
}
