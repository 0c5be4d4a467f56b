use nalgebra::{DMatrix, DVector};

use crate::formula::DesignMatrix;

/// Per-group sufficient statistics of the non-intercept design columns and the
/// response, both centered by their unweighted means.
///
/// Weighting the two groups by precisions `φ₁, φ₂` then only needs `p×p` work.
#[derive(Debug, Clone)]
pub(crate) struct GroupMoments {
    pub n: [usize; 2],
    /// Number of non-intercept columns.
    pub p: usize,
    xx: [DMatrix<f64>; 2],
    x_sum: [DVector<f64>; 2],
    xy: [DVector<f64>; 2],
    y_sum: [f64; 2],
    yy: [f64; 2],
}

/// Precision-weighted, weighted-mean-centered statistics.
pub(crate) struct Weighted {
    /// `Σ φᵢ`
    pub w: f64,
    /// `X_cᵀ Φ X_c`
    pub a: DMatrix<f64>,
    /// `X_cᵀ Φ (y − ȳ_w)`
    pub c: DVector<f64>,
    /// `Σ φᵢ (yᵢ − ȳ_w)²`
    pub s: f64,
}

impl GroupMoments {
    /// `groups[i]` is `true` for rows in the second group. The intercept must
    /// be the first kept column.
    pub fn new(design: &DesignMatrix, y: &[f64], groups: &[bool]) -> Self {
        let n_rows = y.len();
        let cols: Vec<usize> = design.kept.iter().copied().filter(|&j| j != 0).collect();
        let p = cols.len();
        let mut x = design.x.select_columns(&cols);
        for mut col in x.column_iter_mut() {
            let m = col.mean();
            col.add_scalar_mut(-m);
        }
        let y_mean = y.iter().sum::<f64>() / n_rows as f64;

        let mut n = [0usize; 2];
        let mut xx = [DMatrix::zeros(p, p), DMatrix::zeros(p, p)];
        let mut x_sum = [DVector::zeros(p), DVector::zeros(p)];
        let mut xy = [DVector::zeros(p), DVector::zeros(p)];
        let mut y_sum = [0.0; 2];
        let mut yy = [0.0; 2];
        for i in 0..n_rows {
            let g = usize::from(groups[i]);
            let row = x.row(i).transpose();
            let yi = y[i] - y_mean;
            n[g] += 1;
            xx[g].ger(1.0, &row, &row, 1.0);
            x_sum[g] += &row;
            xy[g].axpy(yi, &row, 1.0);
            y_sum[g] += yi;
            yy[g] += yi * yi;
        }
        GroupMoments { n, p, xx, x_sum, xy, y_sum, yy }
    }

    pub fn weighted(&self, phi: [f64; 2]) -> Weighted {
        let w = phi[0] * self.n[0] as f64 + phi[1] * self.n[1] as f64;
        let mx = &self.x_sum[0] * phi[0] + &self.x_sum[1] * phi[1];
        let my = phi[0] * self.y_sum[0] + phi[1] * self.y_sum[1];
        let a = &self.xx[0] * phi[0] + &self.xx[1] * phi[1] - (&mx * mx.transpose()) / w;
        let c = &self.xy[0] * phi[0] + &self.xy[1] * phi[1] - &mx * (my / w);
        let s = phi[0] * self.yy[0] + phi[1] * self.yy[1] - my * my / w;
        Weighted { w, a, c, s }
    }
}

impl Weighted {
    /// `(log|A|, cᵀA⁻¹c)`, or `None` when `A` is not positive definite.
    pub fn logdet_and_quad(&self) -> Option<(f64, f64)> {
        if self.a.nrows() == 0 {
            return Some((0.0, 0.0));
        }
        let chol = self.a.clone().cholesky()?;
        let logdet = 2.0 * chol.l_dirty().diagonal().iter().map(|d| d.ln()).sum::<f64>();
        let z = chol.l().solve_lower_triangular(&self.c)?;
        Some((logdet, z.norm_squared()))
    }
}
