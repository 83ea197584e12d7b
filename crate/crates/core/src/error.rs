use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch in {context}: expected {expected}, found {found}")]
    DimensionMismatch {
        context: &'static str,
        expected: usize,
        found: usize,
    },

    #[error("result would hold {entries} matrix entries, above the cap of {cap}")]
    DimensionOverflow { entries: usize, cap: usize },

    #[error("invalid {name} = {value}: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error("state is not normalized (norm {norm})")]
    NotNormalized { norm: f64 },

    #[error("operator is not unitary (max deviation {deviation:e})")]
    NotUnitary { deviation: f64 },

    #[error("not a density operator: {reason} (deviation {deviation:e})")]
    InvalidDensity { reason: &'static str, deviation: f64 },

    #[error("fixed-point iteration did not converge after {iterations} iterations (last step {residual:e})")]
    NotConverged { iterations: usize, residual: f64 },

    #[error("eigen-decomposition failed: {0}")]
    Decomposition(&'static str),

    /// Every history of the input interferes destructively under the
    /// postselected prescription.
    #[error("forbidden initial data: post-selection norm {norm_sq:e} vanishes")]
    ForbiddenInitialData { norm_sq: f64 },
}
