use thiserror::Error;

/// Failure modes shared by every module of the crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("{op}: argument {value} outside the domain ({expected})")]
    Domain {
        op: &'static str,
        value: f64,
        expected: &'static str,
    },

    #[error("{op}: no convergence after {iterations} iterations")]
    NonConvergence { op: &'static str, iterations: usize },

    #[error("{op}: root not bracketed on [{lo}, {hi}]")]
    Bracket { op: &'static str, lo: f64, hi: f64 },

    #[error("degenerate sample: {0}")]
    DegenerateSample(&'static str),

    #[error("{outside} of {total} samples fall outside the histogram edges")]
    Coverage { outside: usize, total: usize },

    #[error("requested order {requested} exceeds the cap {cap}")]
    OrderCap { requested: usize, cap: usize },

    #[error("inverse Laplace oscillation: successive orders give {first} and {second}")]
    Oscillation { first: f64, second: f64 },

    #[error("convexity violated at index {index}: second difference {second_difference}")]
    Convexity {
        index: usize,
        second_difference: f64,
    },

    #[error("singular system: {0}")]
    Singular(&'static str),

    #[error("ensemble needs {requested_bytes} bytes, above the cap of {cap_bytes}")]
    Resource {
        requested_bytes: usize,
        cap_bytes: usize,
    },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(op: &'static str, value: f64, expected: &'static str) -> Error {
    Error::Domain {
        op,
        value,
        expected,
    }
}
