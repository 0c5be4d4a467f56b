use super::NumericsError;

/// Natural log of the gamma function for `x > 0`.
pub fn log_gamma(x: f64) -> Result<f64, NumericsError> {
    if x <= 0.0 || !x.is_finite() {
        return Err(NumericsError::DomainError(x));
    }
    Ok(statrs::function::gamma::ln_gamma(x))
}

/// `log(sum(exp(v)))` computed after subtracting the maximum.
pub fn log_sum_exp(v: &[f64]) -> f64 {
    let max = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !max.is_finite() {
        return max;
    }
    max + v.iter().map(|x| (x - max).exp()).sum::<f64>().ln()
}
