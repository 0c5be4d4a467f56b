use nalgebra::DVector;

use super::{DesignMatrix, FormulaError};

#[derive(Debug, Clone, PartialEq)]
pub struct RegressionSummary {
    pub labels: Vec<String>,
    /// `None` marks an aliased column.
    pub coefficients: Vec<Option<f64>>,
    pub fitted: Vec<f64>,
    pub residuals: Vec<f64>,
    pub ss_resid: f64,
    pub ss_total: f64,
    pub r2: f64,
    pub n: usize,
    /// Number of estimable coefficients.
    pub rank: usize,
}

impl RegressionSummary {
    pub fn coefficient(&self, label: &str) -> Option<Option<f64>> {
        self.labels.iter().position(|l| l == label).map(|i| self.coefficients[i])
    }
}

/// Least squares on the kept columns of `design`.
pub fn ols_fit(design: &DesignMatrix, y: &[f64]) -> Result<RegressionSummary, FormulaError> {
    let n = design.n_rows();
    let p = design.rank();
    if y.len() != n {
        return Err(FormulaError::DegenerateDesign(format!("response has {} rows, design has {n}", y.len())));
    }
    if n < p || p == 0 {
        return Err(FormulaError::InsufficientData { n, p });
    }
    let x = design.kept_matrix();
    let yv = DVector::from_column_slice(y);
    let qr = x.clone().qr();
    let qty = qr.q().transpose() * &yv;
    let beta = qr
        .r()
        .solve_upper_triangular(&qty)
        .ok_or_else(|| FormulaError::DegenerateDesign("singular triangular factor".into()))?;
    let fitted = &x * &beta;
    let residuals = &yv - &fitted;

    let mean = y.iter().sum::<f64>() / n as f64;
    let ss_total: f64 = y.iter().map(|v| (v - mean).powi(2)).sum();
    let ss_resid = residuals.norm_squared();
    let r2 = if ss_total > 0.0 { (1.0 - ss_resid / ss_total).clamp(0.0, 1.0) } else { 0.0 };

    let mut coefficients = vec![None; design.labels.len()];
    for (k, &j) in design.kept.iter().enumerate() {
        coefficients[j] = Some(beta[k]);
    }
    Ok(RegressionSummary {
        labels: design.labels.clone(),
        coefficients,
        fitted: fitted.iter().copied().collect(),
        residuals: residuals.iter().copied().collect(),
        ss_resid,
        ss_total,
        r2,
        n,
        rank: p,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::DMatrix;

    #[test]
    fn simple_line() {
        let x = DMatrix::from_row_slice(4, 2, &[1.0, 0.0, 1.0, 1.0, 1.0, 2.0, 1.0, 3.0]);
        let d = DesignMatrix::from_matrix(x, vec!["(Intercept)".into(), "x".into()]);
        let f = ols_fit(&d, &[1.0, 3.0, 5.0, 7.0]).unwrap();
        assert!((f.coefficients[0].unwrap() - 1.0).abs() < 1e-12);
        assert!((f.coefficients[1].unwrap() - 2.0).abs() < 1e-12);
        assert!(f.ss_resid < 1e-20);
        assert!((f.r2 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn saturated_interpolates() {
        let n = 5;
        let mut x = DMatrix::identity(n, n);
        x.column_mut(0).fill(1.0);
        let d = DesignMatrix::from_matrix(x, (0..n).map(|i| format!("c{i}")).collect());
        let y = [2.0, -1.0, 0.5, 3.0, 7.0];
        let f = ols_fit(&d, &y).unwrap();
        for (a, b) in f.fitted.iter().zip(&y) {
            assert!((a - b).abs() < 1e-12);
        }
        assert!(f.ss_resid < 1e-20);
    }

    #[test]
    fn aliased_reported_as_none() {
        let x = DMatrix::from_row_slice(4, 3, &[1.0, 1.0, 0.0, 1.0, 1.0, 0.0, 1.0, 0.0, 1.0, 1.0, 0.0, 1.0]);
        let d = DesignMatrix::from_matrix(x, vec!["(Intercept)".into(), "a".into(), "b".into()]);
        let f = ols_fit(&d, &[1.0, 2.0, 4.0, 5.0]).unwrap();
        assert_eq!(f.coefficients[2], None);
        assert_eq!(f.coefficient("b"), Some(None));
        assert!((f.coefficients[1].unwrap() - (-3.0)).abs() < 1e-12);
        assert_eq!(f.rank, 2);
    }
}
