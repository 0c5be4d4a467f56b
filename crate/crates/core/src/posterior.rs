//! Posterior model probabilities, scheme probabilities and MAP estimates.

use crate::formula::RegressionSummary;
use crate::marginal::{FbfRun, MarginalEvaluation};
use crate::scheme::{CandidateModel, ModelSpace};

#[derive(Debug, Clone, PartialEq)]
pub struct RankedModel {
    pub model_index: usize,
    pub formula: String,
    pub heteroscedastic: bool,
    /// Displayed scheme, `None` for models without that grouping.
    pub scheme_beta: Option<String>,
    pub scheme_sigma: Option<String>,
    pub log_marginal: f64,
    pub prior: f64,
    pub posterior: f64,
    pub cumulative: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SchemeProbability {
    pub scheme: Option<String>,
    pub probability: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModelEstimates {
    pub model_index: usize,
    /// `None` marks an aliased coefficient.
    pub coefficients: Vec<(String, Option<f64>)>,
    /// Labeled by group for two-variance models.
    pub variances: Vec<(String, f64)>,
    pub g: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SelectionReport {
    /// Descending posterior probability.
    pub models: Vec<RankedModel>,
    pub scheme_probabilities_beta: Vec<SchemeProbability>,
    pub scheme_probabilities_sigma: Vec<SchemeProbability>,
    /// One entry per model, in model-index order.
    pub estimates: Vec<ModelEstimates>,
    pub m0: usize,
    pub b: f64,
}

impl SelectionReport {
    pub fn estimates_for(&self, model_index: usize) -> Option<&ModelEstimates> {
        self.estimates.iter().find(|e| e.model_index == model_index)
    }

    pub fn model(&self, model_index: usize) -> Option<&RankedModel> {
        self.models.iter().find(|m| m.model_index == model_index)
    }
}

/// Normalized `exp(log_q − max) · prior`.
pub fn posterior_probabilities(log_q: &[f64], priors: &[f64]) -> Vec<f64> {
    let max = log_q.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let weights: Vec<f64> = log_q.iter().zip(priors).map(|(l, p)| (l - max).exp() * p).collect();
    let total: f64 = weights.iter().sum();
    weights.iter().map(|w| w / total).collect()
}

/// Sums posterior mass per displayed scheme (`None` collects ungrouped
/// models), sorted descending with ties in order of first appearance.
pub fn aggregate_scheme_probabilities(schemes: &[Option<String>], posterior: &[f64]) -> Vec<SchemeProbability> {
    let mut out: Vec<SchemeProbability> = Vec::new();
    for (s, p) in schemes.iter().zip(posterior) {
        match out.iter_mut().find(|e| &e.scheme == s) {
            Some(e) => e.probability += p,
            None => out.push(SchemeProbability { scheme: s.clone(), probability: *p }),
        }
    }
    out.sort_by(|a, b| b.probability.total_cmp(&a.probability));
    out
}

/// OLS coefficients plus variances and `g` from the unpowered mode.
pub fn map_estimates(model: &CandidateModel, eval: &MarginalEvaluation, fit: &RegressionSummary) -> ModelEstimates {
    let coefficients = fit.labels.iter().cloned().zip(fit.coefficients.iter().copied()).collect();
    let variances = match (&model.scheme_sigma, eval.map_variances.as_slice()) {
        (Some(s), [reference, other]) => vec![(s.other_label(), *other), (s.reference_label(), *reference)],
        (_, vs) => vs.iter().map(|v| ("sigma2".to_string(), *v)).collect(),
    };
    ModelEstimates { model_index: model.model_index, coefficients, variances, g: eval.map_g }
}

/// Assembles the full report from evaluated models.
pub fn compute_posteriors(space: &ModelSpace, run: &FbfRun) -> SelectionReport {
    let log_q: Vec<f64> = run.evaluations.iter().map(|e| e.log_qb).collect();
    let priors: Vec<f64> = space.models.iter().map(|m| m.prior).collect();
    let post = posterior_probabilities(&log_q, &priors);

    let mut order: Vec<usize> = (0..space.models.len()).collect();
    order.sort_by(|&a, &b| post[b].total_cmp(&post[a]).then(a.cmp(&b)));
    let mut cumulative = 0.0;
    let models = order
        .iter()
        .map(|&i| {
            let m = &space.models[i];
            let class = space.class(m);
            cumulative += post[i];
            RankedModel {
                model_index: m.model_index,
                formula: class.formula_text.clone(),
                heteroscedastic: class.heteroscedastic,
                scheme_beta: m.scheme_beta.as_ref().map(ToString::to_string),
                scheme_sigma: m.scheme_sigma.as_ref().map(ToString::to_string),
                log_marginal: log_q[i],
                prior: m.prior,
                posterior: post[i],
                cumulative,
            }
        })
        .collect();

    let beta: Vec<Option<String>> =
        space.models.iter().map(|m| m.scheme_beta.as_ref().map(ToString::to_string)).collect();
    let sigma: Vec<Option<String>> =
        space.models.iter().map(|m| m.scheme_sigma.as_ref().map(ToString::to_string)).collect();
    let estimates = space
        .models
        .iter()
        .zip(&run.evaluations)
        .zip(&run.prepared)
        .map(|((m, e), p)| map_estimates(m, e, &p.fit))
        .collect();

    SelectionReport {
        models,
        scheme_probabilities_beta: aggregate_scheme_probabilities(&beta, &post),
        scheme_probabilities_sigma: aggregate_scheme_probabilities(&sigma, &post),
        estimates,
        m0: run.m0,
        b: run.b,
    }
}
