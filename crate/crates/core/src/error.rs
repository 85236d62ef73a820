use thiserror::Error;

/// Everything that can go wrong in the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("unknown lattice `{0}` (expected one of E8, BW16, E6)")]
    UnknownLattice(String),

    #[error("norm {norm} is not a valid shell norm for {lattice}: {reason}")]
    InvalidNorm {
        lattice: String,
        norm: u64,
        reason: String,
    },

    #[error("node budget of {budget} exhausted while enumerating {lattice} norm {norm}")]
    BudgetExceeded {
        lattice: String,
        norm: u64,
        budget: u64,
    },

    #[error("integer overflow in {0}")]
    Overflow(&'static str),

    #[error("Gram matrix is not positive definite (pivot {index} = {pivot})")]
    NotPositiveDefinite { index: usize, pivot: String },

    #[error("zero vector has no state")]
    ZeroVector,

    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("shell cache {path}: {reason}")]
    Cache { path: String, reason: String },

    #[error("invariant violated: {0}")]
    Invariant(String),

    #[error("Clifford closure exceeded {limit} elements")]
    ClosureTooLarge { limit: usize },

    #[error("state {state} leaves the set under the Clifford action")]
    OrbitEscape { state: String },

    #[error("stabiliser group generated by {0} contains a nontrivial scalar")]
    ScalarInGroup(String),

    #[error("root finding failed: {0}")]
    RootFinding(String),

    #[error("density matrix check failed: {0}")]
    Density(String),

    #[error("Heron radicand {0:e} is negative beyond tolerance")]
    NegativeRadicand(f64),

    #[error("I/O error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
