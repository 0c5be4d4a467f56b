//! Two-group partitions of factor levels and the candidate model space built
//! from them.

use std::fmt;

use thiserror::Error;

use crate::formula::{parse_formula, FormulaError, TermList};
use crate::tabular::{Dataset, TabularError};

#[derive(Debug, Error)]
pub enum SchemeError {
    #[error("minimum group size {min} is invalid for a factor with {k} levels (must be between 1 and {max})", max = .k / 2)]
    InvalidMinLevels { min: usize, k: usize },
    #[error("{0}")]
    ConfigError(String),
    #[error(transparent)]
    Formula(#[from] FormulaError),
    #[error(transparent)]
    Tabular(#[from] TabularError),
}

/// Unordered split of a factor's levels into two nonempty groups.
///
/// Stored canonically: `reference` is the group holding level 0, so two
/// schemes are equal exactly when they describe the same partition.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GroupingScheme {
    factor: String,
    levels: Vec<String>,
    reference: Vec<usize>,
    other: Vec<usize>,
}

impl GroupingScheme {
    /// Builds a scheme from one side of the split (either side is accepted).
    pub fn new(factor: impl Into<String>, levels: Vec<String>, side: &[usize]) -> Result<Self, SchemeError> {
        let k = levels.len();
        let mut in_side = vec![false; k];
        for &i in side {
            if i >= k {
                return Err(SchemeError::ConfigError(format!("level index {i} out of range for {k} levels")));
            }
            in_side[i] = true;
        }
        let flip = !in_side[0];
        let reference: Vec<usize> = (0..k).filter(|&i| in_side[i] != flip).collect();
        let other: Vec<usize> = (0..k).filter(|&i| in_side[i] == flip).collect();
        if other.is_empty() {
            return Err(SchemeError::ConfigError("a grouping scheme needs two nonempty groups".into()));
        }
        Ok(GroupingScheme { factor: factor.into(), levels, reference, other })
    }

    pub fn factor(&self) -> &str {
        &self.factor
    }

    pub fn levels(&self) -> &[String] {
        &self.levels
    }

    /// Level indices of the group containing the first level.
    pub fn reference_group(&self) -> &[usize] {
        &self.reference
    }

    pub fn other_group(&self) -> &[usize] {
        &self.other
    }

    /// `true` if level `idx` falls in the non-reference group.
    pub fn in_other(&self, idx: usize) -> bool {
        self.other.binary_search(&idx).is_ok()
    }

    fn label(&self, idx: &[usize]) -> String {
        let names: Vec<&str> = idx.iter().map(|&i| self.levels[i].as_str()).collect();
        format!("{{{}}}", names.join(","))
    }

    pub fn reference_label(&self) -> String {
        self.label(&self.reference)
    }

    pub fn other_label(&self) -> String {
        self.label(&self.other)
    }

    /// Per-row membership for a factor's level codes (`true` = other group).
    pub fn membership(&self, codes: &[usize]) -> Vec<bool> {
        codes.iter().map(|&c| self.in_other(c)).collect()
    }
}

impl fmt::Display for GroupingScheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.other_label(), self.reference_label())
    }
}

/// All two-group partitions of `levels` with both groups of size at least
/// `min_levels`, ordered by the sorted index list of the group holding level 0.
pub fn enumerate_schemes(
    factor: &str,
    levels: &[String],
    min_levels: usize,
) -> Result<Vec<GroupingScheme>, SchemeError> {
    let k = levels.len();
    if k < 2 || min_levels < 1 || min_levels > k / 2 {
        return Err(SchemeError::InvalidMinLevels { min: min_levels, k });
    }
    let mut sides: Vec<Vec<usize>> = Vec::new();
    // Level 0 is always in the reference group; iterate over subsets of the rest.
    for mask in 0u64..(1u64 << (k - 1)) {
        let reference: Vec<usize> = std::iter::once(0).chain((1..k).filter(|&i| mask & (1 << (i - 1)) != 0)).collect();
        let size = reference.len();
        if size >= min_levels && k - size >= min_levels {
            sides.push(reference);
        }
    }
    sides.sort();
    sides.into_iter().map(|side| GroupingScheme::new(factor, levels.to_vec(), &side)).collect()
}

/// A formula paired with a variance structure.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelClass {
    pub class_id: usize,
    pub formula_text: String,
    pub formula: TermList,
    pub heteroscedastic: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CandidateModel {
    /// 1-based position in the model space.
    pub model_index: usize,
    pub class_id: usize,
    pub scheme_beta: Option<GroupingScheme>,
    pub scheme_sigma: Option<GroupingScheme>,
    pub prior: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpaceConfig {
    /// `(formula, heteroscedastic)` pairs in user order.
    pub models: Vec<(String, bool)>,
    pub lgf_beta: Option<String>,
    pub lgf_sigma: Option<String>,
    pub same_scheme: bool,
    pub min_levels_beta: usize,
    pub min_levels_sigma: usize,
}

impl Default for SpaceConfig {
    fn default() -> Self {
        SpaceConfig {
            models: Vec::new(),
            lgf_beta: None,
            lgf_sigma: None,
            same_scheme: false,
            min_levels_beta: 1,
            min_levels_sigma: 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModelSpace {
    pub classes: Vec<ModelClass>,
    pub models: Vec<CandidateModel>,
    pub config: SpaceConfig,
}

impl ModelSpace {
    pub fn class(&self, model: &CandidateModel) -> &ModelClass {
        &self.classes[model.class_id]
    }

    pub fn len(&self) -> usize {
        self.models.len()
    }

    pub fn is_empty(&self) -> bool {
        self.models.is_empty()
    }
}

/// Expands formulas, variance structures and schemes into the full model space.
///
/// Classes follow the formulas in user order, each homoscedastic variant
/// directly followed by its heteroscedastic one when flagged. In a cross
/// product the beta scheme varies fastest. Each class receives prior mass
/// `1 / classes`, shared equally by its models.
pub fn build_model_space(cfg: &SpaceConfig, data: &Dataset) -> Result<ModelSpace, SchemeError> {
    if cfg.models.is_empty() {
        return Err(SchemeError::ConfigError("at least one model formula is required".into()));
    }
    let parsed: Vec<(String, TermList)> = cfg
        .models
        .iter()
        .map(|(text, _)| Ok((text.trim().to_string(), parse_formula(text)?)))
        .collect::<Result<_, SchemeError>>()?;

    let needs_beta = parsed.iter().any(|(_, t)| t.uses_group);
    let needs_sigma = cfg.models.iter().any(|(_, het)| *het);
    if needs_beta && cfg.lgf_beta.is_none() {
        return Err(SchemeError::ConfigError(
            "a formula uses `group` but no latent grouping factor for the effects was given (--lgf-beta)".into(),
        ));
    }
    if needs_sigma && cfg.lgf_sigma.is_none() {
        return Err(SchemeError::ConfigError(
            "a heteroscedastic model was requested but no latent grouping factor for the variances was given (--lgf-sigma)"
                .into(),
        ));
    }
    if cfg.same_scheme && cfg.lgf_beta != cfg.lgf_sigma {
        return Err(SchemeError::ConfigError(format!(
            "--same-scheme requires --lgf-beta and --lgf-sigma to name the same factor (got {:?} and {:?})",
            cfg.lgf_beta.as_deref().unwrap_or("none"),
            cfg.lgf_sigma.as_deref().unwrap_or("none"),
        )));
    }

    let schemes_for = |name: &Option<String>, min: usize| -> Result<Vec<GroupingScheme>, SchemeError> {
        match name {
            Some(name) => {
                let f = data.factor(name)?;
                enumerate_schemes(name, f.levels(), min)
            }
            None => Ok(Vec::new()),
        }
    };
    let beta_schemes =
        if needs_beta || cfg.same_scheme { schemes_for(&cfg.lgf_beta, cfg.min_levels_beta)? } else { Vec::new() };
    let sigma_schemes = if needs_sigma { schemes_for(&cfg.lgf_sigma, cfg.min_levels_sigma)? } else { Vec::new() };
    let shared: Vec<GroupingScheme> = if cfg.same_scheme && cfg.lgf_beta.is_some() {
        let name = cfg.lgf_beta.as_deref().unwrap();
        let f = data.factor(name)?;
        enumerate_schemes(name, f.levels(), cfg.min_levels_beta.max(cfg.min_levels_sigma))?
    } else {
        Vec::new()
    };

    let mut classes = Vec::new();
    for ((text, terms), (_, flagged)) in parsed.iter().zip(&cfg.models) {
        for het in [false, true] {
            if het && !flagged {
                continue;
            }
            let dup = classes.iter().any(|c: &ModelClass| c.heteroscedastic == het && c.formula.same_structure(terms));
            if dup {
                return Err(SchemeError::ConfigError(format!("model '{text}' is listed more than once")));
            }
            classes.push(ModelClass {
                class_id: classes.len(),
                formula_text: text.clone(),
                formula: terms.clone(),
                heteroscedastic: het,
            });
        }
    }

    let class_prior = 1.0 / classes.len() as f64;
    let mut models = Vec::new();
    for class in &classes {
        let pairs: Vec<(Option<GroupingScheme>, Option<GroupingScheme>)> =
            match (class.formula.uses_group, class.heteroscedastic) {
                (false, false) => vec![(None, None)],
                (true, false) => beta_schemes.iter().map(|s| (Some(s.clone()), None)).collect(),
                (false, true) => sigma_schemes.iter().map(|s| (None, Some(s.clone()))).collect(),
                (true, true) if cfg.same_scheme => shared.iter().map(|s| (Some(s.clone()), Some(s.clone()))).collect(),
                (true, true) => sigma_schemes
                    .iter()
                    .flat_map(|s| beta_schemes.iter().map(move |b| (Some(b.clone()), Some(s.clone()))))
                    .collect(),
            };
        let prior = class_prior / pairs.len() as f64;
        for (scheme_beta, scheme_sigma) in pairs {
            models.push(CandidateModel {
                model_index: models.len() + 1,
                class_id: class.class_id,
                scheme_beta,
                scheme_sigma,
                prior,
            });
        }
    }

    Ok(ModelSpace { classes, models, config: cfg.clone() })
}
