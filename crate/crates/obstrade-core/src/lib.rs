//! Error-tradeoff bounds for approximating several incompatible observables
//! with a single quantum measurement.
//!
//! The crate is organized in layers:
//!
//! * [`linalg`] — dense complex Hermitian matrix primitives (eigendecomposition,
//!   PSD square roots, norms, Kronecker products).
//! * [`quantum`] — the quantum data model: states, observable sets, POVMs,
//!   outcome value assignments, and direct evaluation of approximation errors.
//! * [`bounds`] — closed-form lower bounds on the weighted approximation error
//!   (the multi-observable Frobenius bound, Ozawa, Branciard, the pure-state
//!   two-observable bound, and the mixed-state bound built from a pure-state
//!   decomposition).
//! * [`sdp`] — a small dense semidefinite-programming solver with a block-LMI
//!   modeling layer.
//! * [`e0`] — the SDP lower bound `E_0`, construction of bound-saturating
//!   measurements on pure states, and a derivative-free brute-force oracle.
//! * [`metrology`] — symmetric logarithmic derivatives, Fisher information
//!   matrices, and the multiparameter-estimation tradeoff bounds.
//! * [`experiment`] — multinomial shot sampling and the 3-state protocol for
//!   reconstructing approximation errors from measured counts.
//! * [`io`] — JSON schemas for matrices, problem files and reports.

pub mod bounds;
pub mod e0;
pub mod experiment;
pub mod io;
pub mod linalg;
pub mod metrology;
mod neldermead;
pub mod quantum;
pub mod sdp;

pub use linalg::{CMat, CVec, HermitianMatrix};
pub use quantum::{
    ApproxMeasurement, BasisChoice, MomentData, ObservableSet, Povm, State, ValueAssignment,
    WeightMatrix,
};

/// Errors shared by the quantum data model and the bound evaluators.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("matrix is not Hermitian: max deviation {0:.3e} relative to largest entry")]
    NotHermitian(f64),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimMismatch { expected: usize, got: usize },
    #[error("state trace is {0}, expected 1")]
    BadTrace(f64),
    #[error("matrix has negative eigenvalue {0:.3e}")]
    NotPsd(f64),
    #[error("POVM outcomes do not sum to identity: max deviation {0:.3e}")]
    PovmIncomplete(f64),
    #[error("basis vectors do not resolve the identity: max deviation {0:.3e}")]
    BasisIncomplete(f64),
    #[error("observables are linearly dependent (indices with large null-space weight: {0:?})")]
    DependentObservables(Vec<usize>),
    #[error("state is not pure: second-largest eigenvalue {0:.3e}")]
    NotPure(f64),
    #[error("value assignment has {got} columns but the POVM has {expected} outcomes")]
    AssignmentShape { expected: usize, got: usize },
    #[error("{0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;
