//! Minimum-error discrimination of symmetric mixed quantum states.
//!
//! A transmitter encodes one of `N` equiprobable signals into density
//! matrices `ρ_k = R^k ρ_0 R^{†k}` generated by a unitary symmetry operator
//! `R` with `R^N = ±1` and nondegenerate spectrum. Provided `ρ_0` can be
//! written with real nonnegative matrix elements in a phase-fixed eigenbasis
//! of `R`, the measurement that minimizes the probability of decoding error
//! has a closed form. This crate constructs that measurement, evaluates the
//! minimum error probability, and certifies optimality three independent
//! ways: the operator optimality conditions, a brute-force grid search over
//! the symmetric measurement ansatz, and Monte Carlo outcome sampling.
//!
//! Modules:
//!
//! - [`cxmat`] — dense complex matrices with a cyclic Jacobi Hermitian
//!   eigensolver and PSD tests (self-contained, dimensions up to 64),
//! - [`symstates`] — symmetry operators, spectral projectors, the
//!   phase-fixed eigenbasis, and ensemble generation,
//! - [`optmeas`] — the optimal measurement construction, error probability,
//!   and the optimality condition checks,
//! - [`oracle`] — independent verification: ansatz grid search, Bloch-vector
//!   search for qubit triples, and a deterministic measurement simulator,
//! - [`gallery`] — built-in example ensembles used as regression fixtures,
//! - [`schema`] — JSON problem and report files consumed by the CLI.

pub mod cxmat;
pub mod gallery;
pub mod optmeas;
pub mod oracle;
pub mod rng;
pub mod schema;
pub mod symstates;

pub use cxmat::{ComplexMatrix, HermitianEigenResult};
pub use symstates::{DirectSumProblem, SymmetricFamily, SymmetryOperator};

use thiserror::Error;

/// Maximum supported matrix dimension. Larger inputs are rejected so that
/// the dense Jacobi eigensolver stays in its comfortable cost range.
pub const MAX_DIM: usize = 64;

/// Fixed numerical tolerances. These are frozen constants, not knobs: the
/// certification semantics depend on them, so they are published in the CLI
/// help text instead of being configurable per run.
pub mod tol {
    /// Structural identities: unitarity, completeness, Hermiticity checks.
    pub const STRUCTURAL: f64 = 1e-9;
    /// Optimality condition residuals (pairwise zero-product and global
    /// eigenvalue floor).
    pub const CONDITION: f64 = 1e-8;
    /// Eigenvalue floor when testing measurement element positivity.
    pub const PSD_FLOOR: f64 = 1e-10;
    /// Largest tolerated imaginary part of a rephased ensemble entry.
    pub const PHASE_IM: f64 = 1e-9;
    /// Most negative tolerated real part of a rephased ensemble entry;
    /// entries above this floor but below zero are clamped to zero.
    pub const ENTRY_FLOOR: f64 = 1e-10;
    /// A spectral projector below this Frobenius norm is treated as absent.
    pub const PROJECTOR_KEEP: f64 = 1e-8;
    /// Nondegeneracy: each surviving spectral projector must have unit trace
    /// within this bound.
    pub const PROJECTOR_TRACE: f64 = 1e-8;
    /// Smallest usable overlap between a seed vector and an eigenvector.
    pub const OVERLAP_MIN: f64 = 1e-8;
    /// Jacobi sweep convergence: off-diagonal norm relative to the input.
    pub const EIG_OFFDIAG: f64 = 1e-13;
    /// Grid-resolution allowance when comparing the closed form against the
    /// brute-force oracle at the default 201 grid steps.
    pub const ORACLE_GAP: f64 = 2e-3;
}

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("matrix dimension {0} exceeds the supported maximum {max}", max = MAX_DIM)]
    DimensionTooLarge(usize),
    #[error("matrix must have positive dimensions")]
    EmptyMatrix,
    #[error("non-finite matrix entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },
    #[error("matrix is not Hermitian (relative residual {residual:.3e})")]
    NotHermitian { residual: f64 },
    #[error("eigensolver did not converge after {sweeps} sweeps")]
    NoConvergence { sweeps: usize },
    #[error("matrix is singular beyond tolerance (eigenvalue {value:.3e})")]
    Singular { value: f64 },
    #[error("validation failed ({invariant}): {detail}")]
    Validation {
        /// Short name of the first violated invariant, e.g. "unitarity".
        invariant: &'static str,
        detail: String,
    },
    #[error("phase inconsistency: {0}")]
    PhaseInconsistency(String),
    #[error("negative entry: {0}")]
    NegativeEntry(String),
    #[error("seed vector invalid: {0}")]
    InvalidSeedVector(String),
    #[error("construction failed: {0}")]
    Construction(String),
    #[error("outcome distribution invalid: {0}")]
    OutcomeDistribution(String),
}

pub type Result<T> = std::result::Result<T, Error>;
