use std::f64::consts::PI;

use super::MarginalError;
use crate::numerics::{hessian_central, nelder_mead, NelderMeadOptions};

/// Initial simplex edge on the log-precision / log-g scales.
const SIMPLEX_STEP: f64 = 0.5;

pub(crate) struct Laplace {
    pub mode: Vec<f64>,
    /// `log ∫ exp(h)` approximated as `h(θ*) + d/2·log 2π − ½·log|−H|`.
    pub log_integral: f64,
    /// `log|−H|` at the mode.
    pub logdet: f64,
}

/// Laplace approximation of `∫ exp(h(θ)) dθ` with the mode found by
/// Nelder–Mead and the curvature by central differences.
pub(crate) fn laplace<F>(h: F, start: &[f64]) -> Result<Laplace, MarginalError>
where
    F: Fn(&[f64]) -> f64,
{
    let d = start.len();
    let opts = NelderMeadOptions::for_dim(d).with_step(SIMPLEX_STEP);
    let opt = nelder_mead(|x| -h(x), start, &opts).map_err(|e| MarginalError::unstable(e.to_string()))?;
    if !opt.converged {
        return Err(MarginalError::unstable("optimizer did not converge"));
    }
    let hess = hessian_central(&h, &opt.location).map_err(|e| MarginalError::unstable(e.to_string()))?;
    let neg = -hess;
    let chol = neg.cholesky().ok_or_else(|| MarginalError::unstable("Hessian at the mode is not negative definite"))?;
    let logdet = 2.0 * chol.l_dirty().diagonal().iter().map(|v| v.ln()).sum::<f64>();
    let log_integral = -opt.value + 0.5 * d as f64 * (2.0 * PI).ln() - 0.5 * logdet;
    if !log_integral.is_finite() {
        return Err(MarginalError::unstable("non-finite Laplace approximation"));
    }
    Ok(Laplace { mode: opt.location, log_integral, logdet })
}
