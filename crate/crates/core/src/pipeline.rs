use crate::error::Result;
use crate::marginal::{evaluate_all, FbfConfig, PriorKind};
use crate::posterior::{compute_posteriors, SelectionReport};
use crate::scheme::{build_model_space, ModelSpace, SpaceConfig};
use crate::tabular::Dataset;

#[derive(Debug, Clone, PartialEq)]
pub struct AnalysisConfig {
    pub space: SpaceConfig,
    pub prior: PriorKind,
    pub m0: usize,
}

/// Builds the model space, evaluates every model and summarizes the posterior.
pub fn analyze(data: &Dataset, cfg: &AnalysisConfig) -> Result<(ModelSpace, SelectionReport)> {
    let space = build_model_space(&cfg.space, data)?;
    let fbf = FbfConfig { m0: cfg.m0, prior: cfg.prior, n: data.n_rows() };
    let run = evaluate_all(&space, data, &fbf)?;
    let report = compute_posteriors(&space, &run);
    Ok((space, report))
}
