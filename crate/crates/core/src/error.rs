use thiserror::Error;

/// Errors raised by the operator, model and solver layers.
///
/// Numeric payloads are carried as `f64` regardless of the scalar type the
/// computation ran in.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimMismatch { expected: usize, found: usize },

    #[error("matrix has non-finite entries")]
    NonFinite,

    #[error("matrix is not Hermitian (asymmetry {asymmetry:.3e})")]
    NotHermitian { asymmetry: f64 },

    #[error("Jacobi eigensolver did not converge after {sweeps} sweeps (off-diagonal norm {residual:.3e})")]
    NotConverged { sweeps: usize, residual: f64 },

    #[error("POVM element {element} is not positive (smallest eigenvalue {min_eigenvalue:.6e})")]
    NotPositive { element: usize, min_eigenvalue: f64 },

    #[error("POVM elements do not sum to the identity (max deviation {residual:.3e})")]
    NotComplete { residual: f64 },

    #[error("empty {0}")]
    Empty(&'static str),

    #[error("invalid priors: {0}")]
    InvalidPriors(String),

    #[error("invalid state {index}: {reason}")]
    InvalidState { index: usize, reason: String },

    #[error("invalid cost matrix: {0}")]
    InvalidCost(String),

    #[error("grouping label {label} out of range for {labels} labels")]
    LabelOutOfRange { label: usize, labels: usize },

    #[error("enumeration of {base}^{exponent} = {count:.6e} assignments exceeds the cap of {cap}; reduce the number of messages or outcomes")]
    CapExceeded {
        base: usize,
        exponent: usize,
        count: f64,
        cap: u64,
    },

    #[error("prior grid with {cells} cells exceeds the cap of {cap}; use a coarser resolution")]
    GridTooFine { cells: u64, cap: u64 },

    #[error("no grouping admits unambiguous discrimination: only the trivial inconclusive POVM {{E? = I}} remains")]
    Infeasible,

    #[error("POVM elements {i} and {j} do not commute (commutator norm {norm:.3e})")]
    NotCommuting { i: usize, j: usize, norm: f64 },

    #[error("group action is not a covariance of the POVM: {0}")]
    NotCovariant(String),

    #[error("group action is reducible: fixed-point space has dimension {fixed_dim}")]
    NotIrreducible { fixed_dim: usize },

    #[error("value out of range: {0}")]
    OutOfRange(String),

    #[error("channel row {row} is not a probability vector (sum {sum:.6e})")]
    ChannelRow { row: usize, sum: f64 },

    #[error("file format: {0}")]
    Format(String),
}

pub type Result<T> = std::result::Result<T, Error>;
