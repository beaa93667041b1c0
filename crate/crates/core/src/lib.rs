#![allow(clippy::neg_cmp_op_on_partial_ord)] // `!(x > 0.0)` also rejects NaN

pub mod analytic;
pub mod error;
pub mod extended;
mod functional;
pub mod ldp;
pub mod quad;
pub mod renewal;
pub mod roots;
pub mod sim;
pub mod specfun;
pub mod validation;

pub use error::{Error, Result};
pub use extended::RateValue;
pub use functional::Functional;
