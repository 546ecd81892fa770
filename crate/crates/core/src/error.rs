use thiserror::Error;

/// Errors produced by the measurement-scheme library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix is not square: {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix contains a non-finite entry")]
    NonFiniteEntry,

    #[error("dimension mismatch: {expected} vs {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("not Hermitian (defect {defect:.3e} exceeds tolerance {tol:.3e})")]
    NotHermitian { defect: f64, tol: f64 },

    #[error("not positive semidefinite (min eigenvalue {min_eigenvalue:.3e})")]
    NotPositiveSemidefinite { min_eigenvalue: f64 },

    #[error("trace is {trace:.12} instead of 1")]
    TraceNotOne { trace: f64 },

    #[error("numeric rank {rank} exceeds declared rank {declared}")]
    RankExceedsDeclared { rank: usize, declared: usize },

    #[error("state vector has norm {norm:.3e}, expected 1")]
    NotNormalized { norm: f64 },

    #[error("POVM effect {index} is not PSD (min eigenvalue {min_eigenvalue:.3e})")]
    EffectNotPsd { index: usize, min_eigenvalue: f64 },

    #[error("POVM effects sum to identity with residual {residual:.3e}")]
    EffectsSumNotIdentity { residual: f64 },

    #[error("POVM must have at least one effect")]
    EmptyPovm,

    #[error("observable set must be nonempty")]
    EmptyObservableSet,

    #[error("subspace is not an operator system (contains identity: {contains_identity}, adjoint-closed: {adjoint_closed})")]
    NotOperatorSystem {
        contains_identity: bool,
        adjoint_closed: bool,
    },

    #[error("subspace is not adjoint-closed")]
    NotAdjointClosed,

    #[error("rank bound {rank} out of range for dimension {dim}")]
    RankOutOfRange { rank: usize, dim: usize },

    #[error("dimension {dim} exceeds supported maximum {max}")]
    DimensionTooLarge { dim: usize, max: usize },

    #[error("Vandermonde nodes must be strictly increasing and positive")]
    AlphasNotIncreasing,

    #[error("gamma index {gamma} out of range 2..={max} for dimension {dim}")]
    GammaOutOfRange { gamma: usize, dim: usize, max: usize },

    #[error("expected {expected} expectation values, got {got}")]
    WrongExpectationCount { expected: usize, got: usize },

    #[error("expectations are not realizable by a pure state (residual {residual:.3e})")]
    InconsistentExpectations { residual: f64 },

    #[error("operator has numeric rank {rank}, expected {expected}")]
    UnexpectedRank { rank: usize, expected: usize },

    #[error("operator is not traceless (trace {trace:.3e})")]
    NotTraceless { trace: f64 },

    #[error("operator is singular but an invertible one is required")]
    SingularInput,

    #[error("eigenvalue signature is not one positive / rest negative")]
    WrongEigenvalueSignature,

    #[error("no singular combination found in the operator pencil")]
    NoSingularCombination,

    #[error("operation requires dimension 3, got {dim}")]
    QutritOnly { dim: usize },

    #[error("invalid premise: {0}")]
    InvalidPremise(String),

    #[error("infeasible probability vector: {0}")]
    InfeasibleProbabilities(String),

    #[error("measurement span has rank {rank}, need {needed} for linear inversion")]
    RankDeficientSpan { rank: usize, needed: usize },

    #[error("{0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
