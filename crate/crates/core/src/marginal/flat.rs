use std::f64::consts::PI;

use super::laplace::laplace;
use super::moments::GroupMoments;
use super::{check_b, group_start, MarginalError, MarginalEvaluation};
use crate::formula::{DesignMatrix, RegressionSummary};
use crate::numerics::log_gamma;

/// Residual sums of squares at or below this fraction of the total are exact fits.
pub(crate) const DEGENERATE_RSS: f64 = 1e-14;

pub(crate) fn check_fit(fit: &RegressionSummary) -> Result<(), MarginalError> {
    if fit.ss_resid.is_nan() || fit.ss_resid <= DEGENERATE_RSS * fit.ss_total || fit.ss_total <= 0.0 {
        return Err(MarginalError::DegenerateFit(format!(
            "residual sum of squares {:.3e} leaves no error variance to estimate",
            fit.ss_resid
        )));
    }
    Ok(())
}

/// Closed form for homoscedastic errors under the flat prior on `(β, log σ²)`.
pub fn logq_flat_hom(fit: &RegressionSummary, b: f64) -> Result<MarginalEvaluation, MarginalError> {
    check_b(b)?;
    check_fit(fit)?;
    let (n, p) = (fit.n as f64, fit.rank as f64);
    if n * b <= p {
        return Err(MarginalError::unstable(format!("N·b = {:.3} does not exceed P = {p}", n * b)));
    }
    let log_q = -n * (1.0 - b) / 2.0 * (PI.ln() + fit.ss_resid.ln()) + n * b / 2.0 * b.ln() + log_gamma((n - p) / 2.0)?
        - log_gamma((n * b - p) / 2.0)?;
    if !log_q.is_finite() {
        return Err(MarginalError::unstable("non-finite log marginal"));
    }
    Ok(MarginalEvaluation {
        log_qb: log_q,
        modes: None,
        hessian_logdets: None,
        map_variances: vec![fit.ss_resid / (n - p)],
        map_g: None,
    })
}

/// Log of the flat-prior integrand over `γ = (log φ₁, log φ₂)` after the
/// coefficients have been integrated out, with the likelihood raised to `b`.
pub fn flat_het_log_integrand(design: &DesignMatrix, y: &[f64], groups: &[bool], b: f64, gamma: &[f64]) -> f64 {
    FlatHet::new(design, y, groups).log_integrand(b, gamma)
}

struct FlatHet {
    m: GroupMoments,
    /// Total kept columns including the intercept.
    p: usize,
}

impl FlatHet {
    fn new(design: &DesignMatrix, y: &[f64], groups: &[bool]) -> Self {
        FlatHet { m: GroupMoments::new(design, y, groups), p: design.rank() }
    }

    fn log_integrand(&self, b: f64, gamma: &[f64]) -> f64 {
        let wt = self.m.weighted([gamma[0].exp(), gamma[1].exp()]);
        let Some((logdet_a, quad)) = wt.logdet_and_quad() else {
            return f64::NAN;
        };
        let n = (self.m.n[0] + self.m.n[1]) as f64;
        let p = self.p as f64;
        // |XᵀΦX| = w·|A| once the intercept is profiled out.
        let logdet = wt.w.ln() + logdet_a;
        let resid = wt.s - quad;
        -n * b / 2.0 * (2.0 * PI).ln()
            + p / 2.0 * (2.0 * PI / b).ln()
            + b * (self.m.n[0] as f64 * gamma[0] + self.m.n[1] as f64 * gamma[1]) / 2.0
            - 0.5 * logdet
            - b / 2.0 * resid
    }
}

/// Rank of the kept design columns restricted to the rows where `groups == which`.
pub(crate) fn rank_within(design: &DesignMatrix, groups: &[bool], which: bool) -> usize {
    let rows: Vec<usize> = (0..groups.len()).filter(|&i| groups[i] == which).collect();
    if rows.is_empty() {
        return 0;
    }
    let sub = design.kept_matrix().select_rows(&rows);
    DesignMatrix::from_matrix(sub, vec![String::new(); design.rank()]).rank()
}

/// Two-variance model under the flat prior: Laplace approximations over the
/// log-precisions for the full and the `b`-powered integrand.
pub fn logq_flat_het(
    design: &DesignMatrix,
    y: &[f64],
    groups: &[bool],
    b: f64,
) -> Result<MarginalEvaluation, MarginalError> {
    check_b(b)?;
    let model = FlatHet::new(design, y, groups);
    let n = model.m.n;
    if n[0] == 0 || n[1] == 0 {
        return Err(MarginalError::InvalidInput("both variance groups need observations".into()));
    }
    let p = model.p as f64;
    let total = (n[0] + n[1]) as f64;
    if total * b <= p {
        return Err(MarginalError::unstable(format!("N·b = {:.3} does not exceed P = {p}", total * b)));
    }
    // As one precision vanishes the other group must still pin down enough of β.
    for (g, which) in [(0, true), (1, false)] {
        let deficit = model.p - rank_within(design, groups, which);
        if n[g] as f64 * b <= deficit as f64 {
            return Err(MarginalError::unstable(format!(
                "group of size {} carries too little weight (n·b = {:.3} ≤ {deficit})",
                n[g],
                n[g] as f64 * b
            )));
        }
    }

    let start = group_start(design, y, groups)?;
    let full = laplace(|g| model.log_integrand(1.0, g), &start)?;
    let frac = laplace(|g| model.log_integrand(b, g), &start)?;
    let log_q = full.log_integral - frac.log_integral;
    if !log_q.is_finite() {
        return Err(MarginalError::unstable("non-finite log marginal"));
    }
    Ok(MarginalEvaluation {
        log_qb: log_q,
        map_variances: vec![(-full.mode[0]).exp(), (-full.mode[1]).exp()],
        modes: Some((full.mode, frac.mode)),
        hessian_logdets: Some((full.logdet, frac.logdet)),
        map_g: None,
    })
}
