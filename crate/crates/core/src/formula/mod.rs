//! Model formulas, design matrices and least-squares fits.

mod design;
mod ols;
mod parse;

pub use design::{build_design, DesignMatrix, ALIAS_TOL};
pub use ols::{ols_fit, RegressionSummary};
pub use parse::{parse_formula, Term, TermList, GROUP};

use thiserror::Error;

use crate::tabular::TabularError;

#[derive(Debug, Error)]
pub enum FormulaError {
    #[error("cannot parse formula '{text}': {reason}")]
    ParseFailure { text: String, reason: String },
    #[error("formula uses `group` but no grouping scheme was supplied")]
    GroupWithoutScheme,
    #[error("formula response '{formula}' differs from the data response '{data}'")]
    ResponseMismatch { formula: String, data: String },
    #[error("degenerate design: {0}")]
    DegenerateDesign(String),
    #[error("{n} observations cannot support {p} coefficients")]
    InsufficientData { n: usize, p: usize },
    #[error(transparent)]
    Tabular(#[from] TabularError),
}
