//! Log fractional marginal likelihoods `log q^b(Y | m)` for every candidate
//! model, and the training-size search that makes all of them finite.
//!
//! Four computation paths exist, chosen by prior and variance structure:
//!
//! | prior         | one variance               | two group variances            |
//! |---------------|----------------------------|--------------------------------|
//! | flat          | closed form                | 2-D Laplace over log-precisions|
//! | Zellner–Siow  | 1-D Laplace over `log g`   | 3-D Laplace (`γ₁, γ₂, log g`)  |

mod flat;
mod laplace;
mod moments;
mod zs;

pub use flat::{flat_het_log_integrand, logq_flat_het, logq_flat_hom};
pub use zs::{logq_zs_het, logq_zs_hom, zs_het_log_integrand, zs_hom_mode, zs_hom_stationarity};

use rayon::prelude::*;
use thiserror::Error;

use crate::formula::{build_design, ols_fit, DesignMatrix, FormulaError, RegressionSummary};
use crate::numerics::NumericsError;
use crate::scheme::{CandidateModel, ModelSpace};
use crate::tabular::{Dataset, TabularError};

#[derive(Debug, Error)]
pub enum MarginalError {
    #[error("numerically unstable: {0}")]
    Unstable(String),
    #[error("degenerate fit: {0}")]
    DegenerateFit(String),
    #[error(
        "the training sample size reached N = {n} before every model had a finite fractional marginal \
         likelihood (last failure: model {model}: {reason}); specify a different set of models"
    )]
    TrainingFractionExhausted { n: usize, model: usize, reason: String },
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("model {index} ({formula}): {source}")]
    Model {
        index: usize,
        formula: String,
        #[source]
        source: Box<MarginalError>,
    },
    #[error(transparent)]
    Formula(#[from] FormulaError),
    #[error(transparent)]
    Tabular(#[from] TabularError),
}

impl MarginalError {
    pub(crate) fn unstable(msg: impl Into<String>) -> Self {
        MarginalError::Unstable(msg.into())
    }

    pub fn is_unstable(&self) -> bool {
        match self {
            MarginalError::Unstable(_) => true,
            MarginalError::Model { source, .. } => source.is_unstable(),
            _ => false,
        }
    }
}

impl From<NumericsError> for MarginalError {
    fn from(e: NumericsError) -> Self {
        MarginalError::Unstable(e.to_string())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PriorKind {
    Flat,
    ZellnerSiow,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FbfConfig {
    /// Minimal training sample size; the fraction is `b = m0 / n`.
    pub m0: usize,
    pub prior: PriorKind,
    pub n: usize,
}

impl FbfConfig {
    pub fn b(&self) -> f64 {
        self.m0 as f64 / self.n as f64
    }
}

/// Error-variance structure of one candidate.
#[derive(Debug, Clone, PartialEq)]
pub enum VarianceStructure {
    Homoscedastic,
    /// Row membership: `true` for the group not holding the first level.
    GroupBased(Vec<bool>),
}

impl VarianceStructure {
    /// Group sizes `(reference, other)`.
    pub fn group_sizes(&self) -> Option<(usize, usize)> {
        match self {
            VarianceStructure::Homoscedastic => None,
            VarianceStructure::GroupBased(g) => {
                let n2 = g.iter().filter(|&&x| x).count();
                Some((g.len() - n2, n2))
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MarginalEvaluation {
    pub log_qb: f64,
    /// Modes of the full and the `b`-powered integrands on the transformed
    /// scale (log-precisions, then `log g`).
    pub modes: Option<(Vec<f64>, Vec<f64>)>,
    /// `log|−H|` at those modes.
    pub hessian_logdets: Option<(f64, f64)>,
    /// One variance, or one per group (reference group first).
    pub map_variances: Vec<f64>,
    pub map_g: Option<f64>,
}

pub(crate) fn check_b(b: f64) -> Result<(), MarginalError> {
    if b > 0.0 && b <= 1.0 {
        Ok(())
    } else {
        Err(MarginalError::InvalidInput(format!("fraction b = {b} must lie in (0, 1]")))
    }
}

/// Starting log-precisions from per-group mean squared OLS residuals.
pub(crate) fn group_start(design: &DesignMatrix, y: &[f64], groups: &[bool]) -> Result<Vec<f64>, MarginalError> {
    let fit = ols_fit(design, y)?;
    let floor = (fit.ss_total / fit.n as f64).max(f64::MIN_POSITIVE) * 1e-10;
    let mut out = Vec::with_capacity(2);
    for which in [false, true] {
        let (ss, k) = fit
            .residuals
            .iter()
            .zip(groups)
            .filter(|(_, &g)| g == which)
            .fold((0.0, 0usize), |(s, k), (r, _)| (s + r * r, k + 1));
        let v = if k == 0 { floor } else { (ss / k as f64).max(floor) };
        out.push(-v.ln());
    }
    Ok(out)
}

/// Dispatches to the path matching `prior` and `variance`.
pub fn evaluate_model(
    design: &DesignMatrix,
    fit: &RegressionSummary,
    y: &[f64],
    variance: &VarianceStructure,
    prior: PriorKind,
    b: f64,
) -> Result<MarginalEvaluation, MarginalError> {
    match (prior, variance) {
        (PriorKind::Flat, VarianceStructure::Homoscedastic) => logq_flat_hom(fit, b),
        (PriorKind::Flat, VarianceStructure::GroupBased(g)) => logq_flat_het(design, y, g, b),
        (PriorKind::ZellnerSiow, VarianceStructure::Homoscedastic) => logq_zs_hom(fit, b),
        (PriorKind::ZellnerSiow, VarianceStructure::GroupBased(g)) => logq_zs_het(design, y, g, b),
    }
}

/// A model's design, fit and variance structure, independent of `b`.
#[derive(Debug, Clone)]
pub struct PreparedModel {
    pub design: DesignMatrix,
    pub fit: RegressionSummary,
    pub variance: VarianceStructure,
}

/// Builds designs and least-squares fits for every candidate.
pub fn prepare_models(space: &ModelSpace, data: &Dataset) -> Result<Vec<PreparedModel>, MarginalError> {
    space.models.par_iter().map(|m| prepare_one(space, m, data).map_err(|e| wrap(space, m, e))).collect()
}

fn prepare_one(space: &ModelSpace, m: &CandidateModel, data: &Dataset) -> Result<PreparedModel, MarginalError> {
    let class = space.class(m);
    let design = build_design(data, &class.formula, m.scheme_beta.as_ref())?;
    let fit = ols_fit(&design, data.response())?;
    let variance = match &m.scheme_sigma {
        None => VarianceStructure::Homoscedastic,
        Some(s) => VarianceStructure::GroupBased(s.membership(data.factor(s.factor())?.codes())),
    };
    Ok(PreparedModel { design, fit, variance })
}

fn wrap(space: &ModelSpace, m: &CandidateModel, e: MarginalError) -> MarginalError {
    MarginalError::Model { index: m.model_index, formula: space.class(m).formula_text.clone(), source: Box::new(e) }
}

#[derive(Debug, Clone)]
pub struct FbfRun {
    pub evaluations: Vec<MarginalEvaluation>,
    pub prepared: Vec<PreparedModel>,
    /// Training size and fraction actually used.
    pub m0: usize,
    pub b: f64,
}

/// Evaluates every model at a shared `b`, raising `m0` by one and starting
/// over whenever any model is unstable.
pub fn evaluate_all(space: &ModelSpace, data: &Dataset, cfg: &FbfConfig) -> Result<FbfRun, MarginalError> {
    let n = data.n_rows();
    if cfg.m0 == 0 || cfg.n != n {
        return Err(MarginalError::InvalidInput(format!(
            "training size must be at least 1 and N must match the data (m0 = {}, N = {}, rows = {n})",
            cfg.m0, cfg.n
        )));
    }
    let prepared = prepare_models(space, data)?;
    let y = data.response();
    let mut m0 = cfg.m0;
    let mut last = (0, String::from("training size not below N"));
    while m0 < n {
        let b = m0 as f64 / n as f64;
        let results: Vec<Result<MarginalEvaluation, MarginalError>> = prepared
            .par_iter()
            .zip(&space.models)
            .map(|(p, m)| {
                evaluate_model(&p.design, &p.fit, y, &p.variance, cfg.prior, b).map_err(|e| wrap(space, m, e))
            })
            .collect();
        let mut evaluations = Vec::with_capacity(results.len());
        let mut unstable = None;
        for (r, m) in results.into_iter().zip(&space.models) {
            match r {
                Ok(e) => evaluations.push(e),
                Err(e) if e.is_unstable() => {
                    unstable.get_or_insert((m.model_index, e.to_string()));
                }
                Err(e) => return Err(e),
            }
        }
        match unstable {
            None => return Ok(FbfRun { evaluations, prepared, m0, b }),
            Some(u) => {
                last = u;
                m0 += 1;
            }
        }
    }
    Err(MarginalError::TrainingFractionExhausted { n, model: last.0, reason: last.1 })
}
