use thiserror::Error;

use crate::formula::FormulaError;
use crate::marginal::MarginalError;
use crate::numerics::NumericsError;
use crate::scheme::SchemeError;
use crate::tabular::TabularError;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Any failure surfaced by the analysis pipeline.
#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Tabular(#[from] TabularError),
    #[error(transparent)]
    Formula(#[from] FormulaError),
    #[error(transparent)]
    Scheme(#[from] SchemeError),
    #[error(transparent)]
    Numerics(#[from] NumericsError),
    #[error(transparent)]
    Marginal(#[from] MarginalError),
}
