//! Construction, verification and inversion of measurement schemes that are
//! informationally complete with respect to prior-constrained sets of
//! quantum states: rank-bounded states, pure states and real-amplitude pure
//! states, plus the closed-form bound tables for the minimal number of
//! observables.
//!
//! All numerics are dense double-precision; every randomized routine takes
//! an explicit seed and is bit-reproducible per seed.

pub mod bounds;
pub mod error;
pub mod matrix;
pub mod opsys;
pub mod pure;
pub mod rankcon;
pub mod recon;
pub mod subspace;
pub mod verify;

pub use error::{Error, Result};
pub use matrix::{
    hs_inner, numeric_rank, spectral_decompose, split_positive, split_selfadjoint, ComplexMatrix,
    DensityState, HermitianOperator, C64, DEFAULT_TOL, RANK_TOL,
};
pub use opsys::{
    observables_from_povm, povm_from_observables, povm_from_operator_system, span_of_povm,
    ExpectationVector, ObservableSet, OperatorSystem, Povm, Scheme,
};
pub use subspace::OperatorSubspace;
