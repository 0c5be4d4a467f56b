//! Numerical kernels used by the marginal-likelihood computations.

mod brent;
mod hessian;
mod nelder_mead;
mod special;

pub use brent::brent_root;
pub use hessian::hessian_central;
pub use nelder_mead::{nelder_mead, NelderMeadOptions, Optimum};
pub use special::{log_gamma, log_sum_exp};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum NumericsError {
    #[error("objective is not finite at the starting point")]
    BadStart,
    #[error("no sign change on [{lo}, {hi}]")]
    BracketFailure { lo: f64, hi: f64 },
    #[error("non-finite function value on the finite-difference stencil")]
    StencilFailure,
    #[error("argument {0} outside the function domain")]
    DomainError(f64),
}
