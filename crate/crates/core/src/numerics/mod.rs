//! Dense numerical kernels used by the ADMM iteration.

pub mod kkt;
pub mod qp;
pub mod quintic;
pub mod spectral;

use thiserror::Error;

pub use kkt::{solve_kkt, KktSolution, KktSystem, Ldlt};
pub use qp::{kkt_report, solve_qp, KktReport, QpOptions, QpSolution};
pub use quintic::{companion_eigenvalues, quintic_real_roots, QuinticCoefficients};
pub use spectral::spectral_norm;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum NumericsError {
    #[error(
        "equality constraint matrix is rank deficient (rank {rank} < {rows} rows); \
         remove duplicated equality rows or use the relaxed variant"
    )]
    RankDeficient { rank: usize, rows: usize },
    #[error("singular pivot {pivot:e} at position {index}")]
    Singular { index: usize, pivot: f64 },
    #[error("inequality constraints are infeasible (violation {violation:e})")]
    Infeasible { violation: f64 },
    #[error("QP solver did not converge within {iterations} iterations")]
    NonConvergence { iterations: usize },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
}
