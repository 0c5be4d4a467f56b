use std::f64::consts::PI;

use super::flat::check_fit;
use super::laplace::laplace;
use super::moments::GroupMoments;
use super::{check_b, group_start, MarginalError, MarginalEvaluation};
use crate::formula::{DesignMatrix, RegressionSummary};
use crate::numerics::{brent_root, log_gamma};

const G_LO: f64 = 1e-8;
const G_HI: f64 = 1e12;
const ROOT_TOL: f64 = 1e-12;

/// `log InvGamma(g; ½, N/2)`.
fn log_inv_gamma_half(g: f64, n: f64) -> f64 {
    0.5 * (n / 2.0).ln() - 0.5 * PI.ln() - 1.5 * g.ln() - n / (2.0 * g)
}

/// Homoscedastic Zellner–Siow pieces for one fraction `b`.
struct ZsHom {
    n: f64,
    /// Non-intercept columns.
    p: f64,
    r2: f64,
    sst: f64,
}

impl ZsHom {
    /// Everything outside the `g` integral: intercept, coefficients and
    /// precision integrated analytically.
    fn constant(&self, b: f64) -> Result<f64, MarginalError> {
        let nb1 = self.n * b - 1.0;
        Ok(-nb1 / 2.0 * (PI.ln() + self.sst.ln()) - self.n * b / 2.0 * b.ln() - 0.5 * self.n.ln()
            + log_gamma(nb1 / 2.0)?)
    }

    /// Log integrand in `τ = log g`, Jacobian included.
    fn log_k(&self, b: f64, tau: f64) -> f64 {
        let g = tau.exp();
        let nb1 = self.n * b - 1.0;
        (nb1 - self.p) / 2.0 * (b * g).ln_1p() - nb1 / 2.0 * (b * g * (1.0 - self.r2)).ln_1p()
            + log_inv_gamma_half(g, self.n)
            + tau
    }

    /// `d log_k / dτ` written as a function of `g`.
    fn stationarity(&self, b: f64, g: f64) -> f64 {
        let nb1 = self.n * b - 1.0;
        let u = 1.0 - self.r2;
        (nb1 - self.p) / 2.0 * b * g / (1.0 + b * g) - nb1 / 2.0 * b * g * u / (1.0 + b * g * u) - 0.5
            + self.n / (2.0 * g)
    }

    /// `d² log_k / dτ²` at `g`.
    fn curvature(&self, b: f64, g: f64) -> f64 {
        let nb1 = self.n * b - 1.0;
        let u = 1.0 - self.r2;
        let d = (nb1 - self.p) / 2.0 * b / (1.0 + b * g).powi(2)
            - nb1 / 2.0 * b * u / (1.0 + b * g * u).powi(2)
            - self.n / (2.0 * g * g);
        g * d
    }

    /// `(log ∫ k_b, τ*, −curvature)` by Laplace in `τ`.
    fn g_integral(&self, b: f64) -> Result<(f64, f64, f64), MarginalError> {
        if self.p == 0.0 {
            // The integrand reduces to the mixing density, whose mode in τ is g = N.
            return Ok((0.0, self.n.ln(), 0.5));
        }
        let g = brent_root(|g| self.stationarity(b, g), G_LO, G_HI, ROOT_TOL)
            .map_err(|e| MarginalError::unstable(format!("g equation: {e}")))?;
        let tau = g.ln();
        let neg_h = -self.curvature(b, g);
        if neg_h.is_nan() || neg_h <= 0.0 {
            return Err(MarginalError::unstable("g curvature is not negative at the root"));
        }
        Ok((self.log_k(b, tau) + 0.5 * (2.0 * PI / neg_h).ln(), tau, neg_h))
    }
}

/// Root of the homoscedastic Zellner–Siow stationarity equation for fraction `b`.
pub fn zs_hom_mode(fit: &RegressionSummary, b: f64) -> Result<f64, MarginalError> {
    check_fit(fit)?;
    let zs = zs_hom_model(fit);
    Ok(zs.g_integral(b)?.1.exp())
}

/// The stationarity function whose root is the mode of the `g` integrand.
pub fn zs_hom_stationarity(fit: &RegressionSummary, b: f64, g: f64) -> f64 {
    zs_hom_model(fit).stationarity(b, g)
}

fn zs_hom_model(fit: &RegressionSummary) -> ZsHom {
    ZsHom { n: fit.n as f64, p: (fit.rank - 1) as f64, r2: fit.r2, sst: fit.ss_total }
}

/// Homoscedastic model under the Zellner–Siow prior. Only the `g` integral
/// is approximated.
pub fn logq_zs_hom(fit: &RegressionSummary, b: f64) -> Result<MarginalEvaluation, MarginalError> {
    check_b(b)?;
    check_fit(fit)?;
    let zs = zs_hom_model(fit);
    if zs.n * b <= 1.0 {
        return Err(MarginalError::unstable(format!("N·b = {:.3} must exceed 1", zs.n * b)));
    }
    let (int_full, tau_full, h_full) = zs.g_integral(1.0)?;
    let (int_frac, tau_frac, h_frac) = zs.g_integral(b)?;
    let log_q = zs.constant(1.0)? - zs.constant(b)? + int_full - int_frac;
    if !log_q.is_finite() {
        return Err(MarginalError::unstable("non-finite log marginal"));
    }
    let g = tau_full.exp();
    let sigma2 = zs.sst * (1.0 + g * (1.0 - zs.r2)) / ((1.0 + g) * (zs.n - 1.0));
    Ok(MarginalEvaluation {
        log_qb: log_q,
        modes: Some((vec![tau_full], vec![tau_frac])),
        hessian_logdets: Some((h_full.ln(), h_frac.ln())),
        map_variances: vec![sigma2],
        map_g: Some(g),
    })
}

struct ZsHet {
    m: GroupMoments,
    n_total: f64,
}

impl ZsHet {
    /// Log integrand over `(γ₁, γ₂, τ)` with intercept and coefficients
    /// integrated analytically under the group-precision g-prior.
    fn log_integrand(&self, b: f64, theta: &[f64]) -> f64 {
        let (g1, g2, tau) = (theta[0], theta[1], theta.get(2).copied());
        let wt = self.m.weighted([g1.exp(), g2.exp()]);
        let Some((_, quad)) = wt.logdet_and_quad() else {
            return f64::NAN;
        };
        let n = self.n_total;
        let base = -n * b / 2.0 * (2.0 * PI).ln()
            + b * (self.m.n[0] as f64 * g1 + self.m.n[1] as f64 * g2) / 2.0
            + 0.5 * (2.0 * PI).ln()
            - 0.5 * b.ln()
            - 0.5 * wt.w.ln();
        match tau {
            None => base - b / 2.0 * wt.s,
            Some(tau) => {
                let g = tau.exp();
                let shrink = b * g / (1.0 + b * g);
                base - self.m.p as f64 / 2.0 * (b * g).ln_1p() - b / 2.0 * (wt.s - shrink * quad)
                    + log_inv_gamma_half(g, n)
                    + tau
            }
        }
    }
}

/// Log of the Zellner–Siow heteroscedastic integrand at `θ = (γ₁, γ₂, log g)`.
/// With no non-intercept columns `θ` has only the two log-precisions.
pub fn zs_het_log_integrand(design: &DesignMatrix, y: &[f64], groups: &[bool], b: f64, theta: &[f64]) -> f64 {
    let m = GroupMoments::new(design, y, groups);
    ZsHet { m, n_total: y.len() as f64 }.log_integrand(b, theta)
}

/// Two-variance model under the Zellner–Siow prior: three-dimensional Laplace
/// approximation over the log-precisions and `log g`.
pub fn logq_zs_het(
    design: &DesignMatrix,
    y: &[f64],
    groups: &[bool],
    b: f64,
) -> Result<MarginalEvaluation, MarginalError> {
    check_b(b)?;
    if design.kept.first() != Some(&0) {
        return Err(MarginalError::InvalidInput("the Zellner–Siow prior needs an intercept column".into()));
    }
    let model = ZsHet { m: GroupMoments::new(design, y, groups), n_total: y.len() as f64 };
    if model.m.n[0] == 0 || model.m.n[1] == 0 {
        return Err(MarginalError::InvalidInput("both variance groups need observations".into()));
    }
    if model.n_total * b <= 1.0 {
        return Err(MarginalError::unstable(format!("N·b = {:.3} must exceed 1", model.n_total * b)));
    }
    let mut start = group_start(design, y, groups)?;
    if model.m.p > 0 {
        start.push(model.n_total.ln());
    }
    let full = laplace(|t| model.log_integrand(1.0, t), &start)?;
    let frac = laplace(|t| model.log_integrand(b, t), &start)?;
    let log_q = full.log_integral - frac.log_integral;
    if !log_q.is_finite() {
        return Err(MarginalError::unstable("non-finite log marginal"));
    }
    Ok(MarginalEvaluation {
        log_qb: log_q,
        map_variances: vec![(-full.mode[0]).exp(), (-full.mode[1]).exp()],
        map_g: full.mode.get(2).map(|t| t.exp()),
        modes: Some((full.mode, frac.mode)),
        hessian_logdets: Some((full.logdet, frac.logdet)),
    })
}
