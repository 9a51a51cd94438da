//! Certified interval arithmetic, real-root isolation for rational
//! polynomials, and damped Newton for small polynomial systems.

mod interval;
mod mpoly;
mod newton;
mod poly;

pub use interval::Interval;
pub use mpoly::{MultiPoly, PolySystem};
pub use newton::{newton_solve, newton_solve_with, NewtonOptions};
pub use poly::{isolate_roots, refine_root, Polynomial, RootBracket};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum NumericsError {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("invalid interval: {0}")]
    InvalidInterval(String),
    #[error("polynomial is not squarefree and could not be deflated")]
    NotSquarefree,
    #[error("Newton iteration did not converge after {iterations} iterations (residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },
    #[error("singular Jacobian")]
    SingularJacobian,
    #[error("parse error: {0}")]
    Parse(String),
}
