//! Error type shared by all covest-core modules.

use alloc::string::String;
use thiserror::Error;

/// Crate-wide result alias.
pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix dimension must be at least 1")]
    EmptyMatrix,

    #[error("expected {expected} entries for a {dim}x{dim} matrix, got {actual}")]
    EntryCount {
        dim: usize,
        expected: usize,
        actual: usize,
    },

    #[error("entry ({i},{j}) is {a} but ({j},{i}) is {b}; matrix is not symmetric")]
    NotSymmetric { i: usize, j: usize, a: f64, b: f64 },

    #[error("non-finite value at entry ({i},{j})")]
    NonFinite { i: usize, j: usize },

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("invalid specification: {reason}")]
    InvalidSpec { reason: String },

    #[error("delta must lie in (0, 1], got {value}")]
    InvalidDelta { value: f64 },

    #[error("lambda must be nonnegative and finite, got {value}")]
    InvalidLambda { value: f64 },

    #[error("matrix is not positive semidefinite (smallest eigenvalue {min_eigenvalue:e})")]
    NotPsd { min_eigenvalue: f64 },

    #[error("operation undefined for the zero matrix")]
    ZeroMatrix,

    #[error("mask contains no observed entries (estimated delta = 0)")]
    EmptyMask,

    #[error(
        "debiased covariance has negative trace ({trace:e}); \
         more samples are needed before the data-driven lambda rule can be used"
    )]
    NegativeTrace { trace: f64 },

    #[error(
        "eigensolver did not converge: off-diagonal residual {residual:e} after {sweeps} sweeps"
    )]
    NoConvergence { residual: f64, sweeps: usize },

    #[error(
        "projected gradient did not converge: step residual {residual:e} after {iters} iterations"
    )]
    PgdNoConvergence { residual: f64, iters: usize },

    #[error("projected gradient objective increased from {previous} to {current}")]
    PgdObjectiveIncrease { previous: f64, current: f64 },

    #[error("truncation rank {rank} exceeds dimension {dim}")]
    RankExceedsDim { rank: usize, dim: usize },

    #[error("log-log fit needs at least 3 points, got {got}")]
    TooFewPoints { got: usize },

    #[error("log-log fit requires strictly positive, distinct inputs")]
    DegenerateFit,

    #[error(
        "calibration failed: best coverage {best_coverage} (at constant {at_constant}) \
         is below target {target}"
    )]
    CalibrationFailed {
        best_coverage: f64,
        at_constant: f64,
        target: f64,
    },

    #[error(
        "grid point {grid_index} (n={n}, delta={delta}) had {failures} failed replicates \
         out of {replicates} (more than 1%)"
    )]
    ExcessiveFailures {
        grid_index: usize,
        n: usize,
        delta: f64,
        failures: usize,
        replicates: usize,
    },
}
