//! Hilbert's projective metric on operator cones.
//!
//! The crate computes sup/inf ratios and Hilbert distances over the
//! positive semidefinite cone, the PPT cone, their intersection and the
//! convex hull of their union, together with base norms, distinguishability
//! norms, projective diameters of quantum channels and the contraction
//! bounds that follow from them. It also synthesizes completely positive
//! maps that send one pair of states to another whenever the Hilbert
//! distance does not increase.
//!
//! Everything is dense and sized for small systems (dimension up to ~100).

pub mod channels;
pub mod cones;
pub mod inequalities;
pub mod linalg;
pub mod norms;
pub mod qubit;
pub mod random;
pub mod report;
pub mod sdp;
pub mod suites;
pub mod synthesis;

pub use cones::{BipartiteShape, ConeSpec, Deformation, ExtendedReal};
pub use linalg::{CMatrix, EigenSystem, HermitianMatrix, C64};
pub use report::{CheckReport, CheckStatus};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("matrix is not Hermitian (deviation {0:e})")]
    NotHermitian(f64),
    #[error("matrix has non-finite entries")]
    NonFinite,
    #[error("{routine} did not converge (residual {residual:e})")]
    NoConvergence { routine: &'static str, residual: f64 },
    #[error("argument outside the cone: {0}")]
    OutsideCone(String),
    #[error("solver indeterminate after {iterations} iterations (residual {residual:e})")]
    Indeterminate { iterations: usize, residual: f64 },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("not applicable: {0}")]
    NotApplicable(String),
}

pub type Result<T> = std::result::Result<T, Error>;

/// Numerical tolerances shared across the crate.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Tolerances {
    /// Eigenvalues below `rank_tol * lambda_max` are treated as zero.
    pub rank_tol: f64,
    /// Band used by membership tests.
    pub member_tol: f64,
    /// Feasibility tolerance of the iterative conic solvers.
    pub solver_tol: f64,
    /// Relative bisection width.
    pub bisection_tol: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            rank_tol: 1e-9,
            member_tol: 1e-9,
            solver_tol: 1e-7,
            bisection_tol: 1e-6,
        }
    }
}
