//! Bayesian model selection for linear models whose categorical predictors may
//! hide a two-group structure in their levels.
//!
//! The pipeline is:
//!
//! 1. [`tabular`] loads a CSV into an immutable [`Dataset`].
//! 2. [`scheme`] enumerates every two-group partition of the latent grouping
//!    factor(s) and expands the user's formulas into a [`ModelSpace`].
//! 3. [`formula`] builds (possibly group-substituted) design matrices with
//!    aliasing detection and fits them by least squares.
//! 4. [`marginal`] computes the log fractional marginal likelihood of every
//!    candidate, raising the training size `m0` until all are stable.
//! 5. [`posterior`] turns those into model, scheme and parameter summaries.
//!
//! [`analyze`] runs all of the above in one call.

pub mod error;
pub mod formula;
pub mod marginal;
pub mod numerics;
pub mod posterior;
pub mod scheme;
pub mod tabular;

mod pipeline;

pub use error::{Error, Result};
pub use formula::{DesignMatrix, RegressionSummary, Term, TermList};
pub use marginal::{FbfConfig, MarginalEvaluation, PriorKind, VarianceStructure};
pub use pipeline::{analyze, AnalysisConfig};
pub use posterior::SelectionReport;
pub use scheme::{CandidateModel, GroupingScheme, ModelClass, ModelSpace, SpaceConfig};
pub use tabular::{Column, ColumnKind, Dataset};
