//! Large-deviation machinery: component rate functions, the variational
//! rate of a renewal-reward decomposition, SCGF root finding for the absolute
//! area and Legendre transforms with flat branches.
//!
//! The area B_T has no solver here: its rate function is identically zero
//! (see [`crate::analytic::CHI_B`]).

mod cgf;
pub mod feynman_kac;
mod legendre;
mod quadratic;
mod rates;
mod scgf;
mod variational;

pub use cgf::{
    m_tau_empirical, m_tau_occupation, provider_for, AbsAreaCgf, CgfProvider, EmpiricalCgf,
    OccupationCgf,
};
pub use legendre::{
    absarea_k_grid, absarea_rate_curve, chi_c, legendre, legendre_discrete, legendre_with_slope,
    log_k_grid, RateFunctionCurve,
};
pub use quadratic::{k1_second_derivative, quadratic_coefficient, quadratic_feasible_bound};
pub use rates::{cell_masses, i_rate, j_rate, k_rate, DiscreteMeasure, KRate};
pub use scgf::{scgf_c, scgf_c_free, scgf_c_residual};
pub use variational::{
    variational_rate, Formulation, VariationalProblem, VariationalSolution, DEFAULT_NODES,
};
