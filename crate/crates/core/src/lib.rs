//! Local minimization of multivariate polynomial optimization problems with
//! an ADMM splitting over a bilinearly constrained quadratic reformulation.
//!
//! The pipeline is
//!
//! 1. [`poly`]: parse and evaluate the polynomial problem,
//! 2. [`reduction`]: rewrite it as a QOP with linear constraints and
//!    bilinear couplings `x_i·x_j = x_k`,
//! 3. [`admm`]: iterate the x-update (convex QP / KKT solve), the
//!    decoupled projection onto the bilinear set, and the dual update,
//! 4. [`bench`]: reference oracles and the two benchmark experiments.

pub mod admm;
pub mod bench;
pub mod cli;
pub mod numerics;
pub mod poly;
pub mod reduction;

pub use admm::{AdmmConfig, AdmmError, SolveReport, SolveStatus, Variant};
pub use poly::{Monomial, PolyError, Polynomial, PopProblem};
pub use reduction::{reduce_to_qop, QopProblem, Triple};
