//! Renewal algebra in the Laplace domain.
//!
//! A reset-free generating function G̃_0(k, s) is turned into the reset one by
//! G̃_r(k, s) = G̃_0(k, r+s) / (1 - r G̃_0(k, r+s)). The same composition is
//! available on truncated power series in k, whose coefficients are then
//! inverted numerically to obtain moments in the time domain.

mod gf;
mod inverse;
mod series;

pub use gf::{free_gf_absarea, free_gf_occupation, largest_pole, renewal_map, LaplaceGF};
pub use inverse::{inverse_laplace, inverse_laplace_real, InversionMethod};
pub use series::{
    free_series, free_series_absarea, free_series_area, free_series_occupation,
    moments_via_renewal, renewal_series, PowerSeriesLT, ABSAREA_ORDER_CAP, AREA_ORDER_CAP,
    OCCUPATION_ORDER_CAP,
};

pub use num_complex::Complex64;
