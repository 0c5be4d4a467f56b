use nalgebra::DMatrix;

use super::NumericsError;

/// Central-difference Hessian with one Richardson refinement.
///
/// Per-coordinate step is `eps^(1/4) * max(1, |x_i|)`; differences at `h` and
/// `2h` are combined as `(4 D(h) - D(2h)) / 3` and the result is symmetrized.
pub fn hessian_central<F>(f: F, x: &[f64]) -> Result<DMatrix<f64>, NumericsError>
where
    F: Fn(&[f64]) -> f64,
{
    let n = x.len();
    let base_step: Vec<f64> = x.iter().map(|xi| f64::EPSILON.powf(0.25) * xi.abs().max(1.0)).collect();
    let f0 = f(x);
    if !f0.is_finite() {
        return Err(NumericsError::StencilFailure);
    }

    let mut point = x.to_vec();
    let mut eval = |shifts: &[(usize, f64)]| -> Result<f64, NumericsError> {
        point.copy_from_slice(x);
        for &(i, d) in shifts {
            point[i] += d;
        }
        let v = f(&point);
        if v.is_finite() {
            Ok(v)
        } else {
            Err(NumericsError::StencilFailure)
        }
    };

    let mut estimate = |scale: f64| -> Result<DMatrix<f64>, NumericsError> {
        let h: Vec<f64> = base_step.iter().map(|s| s * scale).collect();
        let mut m = DMatrix::zeros(n, n);
        for i in 0..n {
            let fp = eval(&[(i, h[i])])?;
            let fm = eval(&[(i, -h[i])])?;
            m[(i, i)] = (fp - 2.0 * f0 + fm) / (h[i] * h[i]);
            for j in 0..i {
                let fpp = eval(&[(i, h[i]), (j, h[j])])?;
                let fpm = eval(&[(i, h[i]), (j, -h[j])])?;
                let fmp = eval(&[(i, -h[i]), (j, h[j])])?;
                let fmm = eval(&[(i, -h[i]), (j, -h[j])])?;
                let v = (fpp - fpm - fmp + fmm) / (4.0 * h[i] * h[j]);
                m[(i, j)] = v;
                m[(j, i)] = v;
            }
        }
        Ok(m)
    };

    let fine = estimate(1.0)?;
    let coarse = estimate(2.0)?;
    let refined = (fine * 4.0 - coarse) / 3.0;
    Ok((&refined + refined.transpose()) * 0.5)
}
