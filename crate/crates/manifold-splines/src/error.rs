use thiserror::Error;

/// Errors produced by the library.
#[derive(Error, Debug)]
pub enum Error {
    /// A precondition on an argument was violated.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// The collocation matrix of the auxiliary basis on the centers is
    /// rank deficient, so the saddle-point system is singular.
    #[error("centers not unisolvent: rank {rank} < basis dimension {dim}")]
    RankDefect { rank: usize, dim: usize },

    /// A kernel spectrum check failed: Q(λ_ℓ) ≤ 0 outside the declared
    /// exceptional set.
    #[error(
        "spectrum violation: Q(lambda_{ell}) = {value} <= 0 outside J (J_degree = {j_degree})"
    )]
    SpectrumViolation {
        ell: usize,
        value: f64,
        j_degree: usize,
    },

    /// The native-space quadratic form came out significantly negative,
    /// contradicting conditional positive definiteness.
    #[error("CPD violation: quadratic form a^T K a = {0} is negative")]
    CpdViolation(f64),

    /// A factorization or solve failed.
    #[error("numerical failure: {0}")]
    Numerical(String),

    /// Too few populated bins for a decay fit.
    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),

    #[error("JSON error: {0}")]
    Json(#[from] serde_json::Error),
}
