//! Brute-force references for the fractional marginal likelihoods.
//!
//! Every integrand here is assembled from `N×N` or full `P×P` linear algebra,
//! deliberately avoiding the centered/profiled forms used by the library, and
//! integrated by tensor-grid trapezoid sums.

#![allow(dead_code)]

use std::f64::consts::PI;

use latent_groups::formula::DesignMatrix;
use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

pub struct Synthetic {
    /// Intercept first.
    pub x: DMatrix<f64>,
    pub y: Vec<f64>,
    /// `true` for the second group.
    pub groups: Vec<bool>,
}

impl Synthetic {
    pub fn n(&self) -> usize {
        self.y.len()
    }

    pub fn design(&self) -> DesignMatrix {
        let labels = (0..self.x.ncols()).map(|j| format!("c{j}")).collect();
        DesignMatrix::from_matrix(self.x.clone(), labels)
    }

    pub fn swapped_groups(&self) -> Vec<bool> {
        self.groups.iter().map(|g| !g).collect()
    }
}

/// `n` rows, the last `n_other` in the second group; `p` columns including the
/// intercept; error SD 1 in the first group and 2 in the second.
pub fn synthetic(seed: u64, n: usize, n_other: usize, p: usize) -> Synthetic {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let x = DMatrix::from_fn(n, p, |_, j| if j == 0 { 1.0 } else { rng.sample(StandardNormal) });
    let groups: Vec<bool> = (0..n).map(|i| i >= n - n_other).collect();
    let y = (0..n)
        .map(|i| {
            let signal: f64 = 1.0 + (1..p).map(|j| 0.5 * x[(i, j)]).sum::<f64>();
            let sd = if groups[i] { 2.0 } else { 1.0 };
            let e: f64 = rng.sample(StandardNormal);
            signal + sd * e
        })
        .collect();
    Synthetic { x, y, groups }
}

pub fn axis(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect()
}

/// `log Σ w·exp(v)·Πh` for log-integrand values on a tensor grid, where `w`
/// is the product of trapezoid end weights.
pub fn log_trapezoid(values: &[(f64, f64)], cell: f64) -> f64 {
    let max = values.iter().map(|v| v.1).fold(f64::NEG_INFINITY, f64::max);
    let sum: f64 = values.iter().map(|(w, v)| w * (v - max).exp()).sum();
    max + (sum * cell).ln()
}

fn end_weight(i: usize, n: usize) -> f64 {
    if i == 0 || i + 1 == n {
        0.5
    } else {
        1.0
    }
}

fn log_integrate_1d(ax: &[f64], f: impl Fn(f64) -> f64) -> f64 {
    let vals: Vec<(f64, f64)> = ax.iter().enumerate().map(|(i, &t)| (end_weight(i, ax.len()), f(t))).collect();
    log_trapezoid(&vals, ax[1] - ax[0])
}

fn log_integrate_2d(a: &[f64], b: &[f64], f: impl Fn(f64, f64) -> f64) -> f64 {
    let mut vals = Vec::with_capacity(a.len() * b.len());
    for (i, &s) in a.iter().enumerate() {
        for (j, &t) in b.iter().enumerate() {
            vals.push((end_weight(i, a.len()) * end_weight(j, b.len()), f(s, t)));
        }
    }
    log_trapezoid(&vals, (a[1] - a[0]) * (b[1] - b[0]))
}

fn ssr(x: &DMatrix<f64>, y: &[f64]) -> f64 {
    let yv = DVector::from_column_slice(y);
    let xtx = x.transpose() * x;
    let beta = xtx.cholesky().expect("full rank").solve(&(x.transpose() * &yv));
    (&yv - x * beta).norm_squared()
}

/// Flat prior, one variance: coefficients integrated as a Gaussian integral,
/// `γ = log φ` by trapezoid.
pub fn flat_hom_log_integrand(x: &DMatrix<f64>, y: &[f64], b: f64, gamma: f64) -> f64 {
    let (n, p) = (y.len() as f64, x.ncols() as f64);
    let phi = gamma.exp();
    let logdet_xtx = (x.transpose() * x).determinant().ln();
    -n * b / 2.0 * (2.0 * PI).ln() + n * b / 2.0 * gamma - b * phi * ssr(x, y) / 2.0
        + p / 2.0 * (2.0 * PI / (b * phi)).ln()
        - 0.5 * logdet_xtx
}

pub fn flat_hom_oracle(x: &DMatrix<f64>, y: &[f64], b: f64) -> f64 {
    let c = (y.len() as f64 / ssr(x, y)).ln();
    let ax = axis(c - 250.0, c + 12.0, 52_401);
    let s = ssr(x, y);
    let (n, p) = (y.len() as f64, x.ncols() as f64);
    let logdet_xtx = (x.transpose() * x).determinant().ln();
    // Same integrand as `flat_hom_log_integrand` with the matrix work hoisted.
    let f = |b: f64, g: f64| {
        -n * b / 2.0 * (2.0 * PI).ln() + n * b / 2.0 * g - b * g.exp() * s / 2.0
            + p / 2.0 * (2.0 * PI / (b * g.exp())).ln()
            - 0.5 * logdet_xtx
    };
    log_integrate_1d(&ax, |g| f(1.0, g)) - log_integrate_1d(&ax, |g| f(b, g))
}

/// Flat prior, two variances, via the full weighted normal equations.
pub fn flat_het_log_integrand(x: &DMatrix<f64>, y: &[f64], groups: &[bool], b: f64, g: &[f64]) -> f64 {
    let n = y.len();
    let p = x.ncols() as f64;
    let phi: Vec<f64> = groups.iter().map(|&o| if o { g[1] } else { g[0] }.exp()).collect();
    let phi_d = DMatrix::from_diagonal(&DVector::from_vec(phi.clone()));
    let yv = DVector::from_column_slice(y);
    let a = x.transpose() * &phi_d * x;
    let t = x.transpose() * &phi_d * &yv;
    let lu = a.clone().lu();
    let s = (yv.transpose() * &phi_d * &yv)[0] - t.dot(&lu.solve(&t).unwrap());
    let log_phi_sum: f64 = phi.iter().map(|v| v.ln()).sum();
    -(n as f64) * b / 2.0 * (2.0 * PI).ln() + p / 2.0 * (2.0 * PI / b).ln() + b / 2.0 * log_phi_sum
        - 0.5 * a.determinant().ln()
        - b / 2.0 * s
}

/// 200×200 trapezoid grid over `[−20, 20]²`.
pub fn flat_het_oracle(x: &DMatrix<f64>, y: &[f64], groups: &[bool], b: f64) -> f64 {
    let ax = axis(-20.0, 20.0, 200);
    let full = log_integrate_2d(&ax, &ax, |s, t| flat_het_log_integrand(x, y, groups, 1.0, &[s, t]));
    let frac = log_integrate_2d(&ax, &ax, |s, t| flat_het_log_integrand(x, y, groups, b, &[s, t]));
    full - frac
}

/// Marginal density of `y` given per-row precisions `φ` and `g`, with the
/// intercept flat and the other coefficients `N(0, g·(X_cᵀΦX_c)⁻¹)`, under
/// the likelihood raised to `b`. Built once per `φ`; cheap in `g`.
pub struct ZsSlice {
    n: usize,
    log_d: f64,
    lam: Vec<f64>,
    u1: Vec<f64>,
    uy: Vec<f64>,
    log_phi_sum: f64,
    b: f64,
}

impl ZsSlice {
    pub fn new(x: &DMatrix<f64>, y: &[f64], phi: &[f64], b: f64) -> Self {
        let n = y.len();
        let w: f64 = phi.iter().sum();
        let xs = x.columns(1, x.ncols() - 1).into_owned();
        let p = xs.ncols();
        let means: Vec<f64> = (0..p).map(|j| (0..n).map(|i| phi[i] * xs[(i, j)]).sum::<f64>() / w).collect();
        let xc = DMatrix::from_fn(n, p, |i, j| xs[(i, j)] - means[j]);
        let phi_d = DMatrix::from_diagonal(&DVector::from_column_slice(phi));
        // Row scaling by sqrt(bφ) turns C = D + g·M into D^½ (I + g·S) D^½.
        let scale: Vec<f64> = phi.iter().map(|f| (b * f).sqrt()).collect();
        let s = if p == 0 {
            DMatrix::zeros(n, n)
        } else {
            let a = xc.transpose() * &phi_d * &xc;
            let m = &xc * a.try_inverse().expect("invertible") * xc.transpose();
            DMatrix::from_fn(n, n, |i, j| scale[i] * m[(i, j)] * scale[j])
        };
        let eig = SymmetricEigen::new(s);
        let ones = DVector::from_iterator(n, scale.iter().copied());
        let ys = DVector::from_iterator(n, y.iter().zip(&scale).map(|(v, s)| v * s));
        let u1 = (eig.eigenvectors.transpose() * ones).iter().copied().collect();
        let uy = (eig.eigenvectors.transpose() * ys).iter().copied().collect();
        ZsSlice {
            n,
            log_d: phi.iter().map(|f| -(b * f).ln()).sum(),
            lam: eig.eigenvalues.iter().copied().collect(),
            u1,
            uy,
            log_phi_sum: phi.iter().map(|f| f.ln()).sum(),
            b,
        }
    }

    /// Log integrand at `τ = log g`, including the inverse-gamma(½, N/2)
    /// density on `g` and the `dg = g dτ` Jacobian.
    pub fn log_integrand(&self, tau: f64) -> f64 {
        let g = tau.exp();
        let n = self.n as f64;
        let (mut a, mut r, mut q, mut logdet) = (0.0, 0.0, 0.0, self.log_d);
        for i in 0..self.n {
            let d = 1.0 + g * self.lam[i].max(0.0);
            a += self.u1[i] * self.u1[i] / d;
            r += self.u1[i] * self.uy[i] / d;
            q += self.uy[i] * self.uy[i] / d;
            logdet += d.ln();
        }
        let log_marg = -(n - 1.0) / 2.0 * (2.0 * PI).ln() - 0.5 * logdet - 0.5 * a.ln() - 0.5 * (q - r * r / a);
        let b = self.b;
        let power = n * (1.0 - b) / 2.0 * (2.0 * PI).ln() + (b - 1.0) / 2.0 * self.log_phi_sum - n / 2.0 * b.ln();
        log_marg + power + log_inv_gamma(g, n) + tau
    }

    /// Same as [`ZsSlice::log_integrand`] with the `g` integral done exactly;
    /// valid only when there are no non-intercept columns.
    pub fn log_integrand_no_g(&self) -> f64 {
        self.log_integrand(0.0) - log_inv_gamma(1.0, self.n as f64)
    }
}

pub fn log_inv_gamma(g: f64, n: f64) -> f64 {
    0.5 * (n / 2.0).ln() - 0.5 * PI.ln() - 1.5 * g.ln() - n / (2.0 * g)
}

fn row_phi(groups: &[bool], g: [f64; 2]) -> Vec<f64> {
    groups.iter().map(|&o| if o { g[1] } else { g[0] }.exp()).collect()
}

/// Zellner–Siow, two variances: integrand at `θ = (γ₁, γ₂, τ)`.
pub fn zs_het_log_integrand(x: &DMatrix<f64>, y: &[f64], groups: &[bool], b: f64, theta: &[f64]) -> f64 {
    let slice = ZsSlice::new(x, y, &row_phi(groups, [theta[0], theta[1]]), b);
    if x.ncols() == 1 {
        slice.log_integrand_no_g()
    } else {
        slice.log_integrand(theta[2])
    }
}

/// Zellner–Siow, one variance: grid over `(log φ, log g)`.
pub fn zs_hom_oracle(x: &DMatrix<f64>, y: &[f64], b: f64) -> f64 {
    let n = y.len();
    let c = (n as f64 / ssr(x, y)).ln();
    let gam = axis(c - 70.0, c + 12.0, 1641);
    let tau = axis(-8.0, 60.0, 681);
    let one = |b: f64| -> f64 {
        let slices: Vec<ZsSlice> = gam.iter().map(|&g| ZsSlice::new(x, y, &vec![g.exp(); n], b)).collect();
        if x.ncols() == 1 {
            return log_integrate_1d(&gam, |g| {
                let i = gam.iter().position(|v| *v == g).unwrap();
                slices[i].log_integrand_no_g()
            });
        }
        let mut vals = Vec::with_capacity(gam.len() * tau.len());
        for (i, s) in slices.iter().enumerate() {
            for (j, &t) in tau.iter().enumerate() {
                vals.push((end_weight(i, gam.len()) * end_weight(j, tau.len()), s.log_integrand(t)));
            }
        }
        log_trapezoid(&vals, (gam[1] - gam[0]) * (tau[1] - tau[0]))
    };
    one(1.0) - one(b)
}

/// Zellner–Siow, two variances: tensor grid of half-width `half` around
/// `center_full` / `center_frac` (one per integrand).
pub fn zs_het_oracle(
    x: &DMatrix<f64>,
    y: &[f64],
    groups: &[bool],
    b: f64,
    center_full: &[f64],
    center_frac: &[f64],
) -> f64 {
    let one = |b: f64, c: &[f64]| -> f64 {
        let (half, pts) = (16.0, 97);
        let a0 = axis(c[0] - half, c[0] + half, pts);
        let a1 = axis(c[1] - half, c[1] + half, pts);
        let h = a0[1] - a0[0];
        let mut vals = Vec::new();
        if x.ncols() == 1 {
            for (i, &s) in a0.iter().enumerate() {
                for (j, &t) in a1.iter().enumerate() {
                    let slice = ZsSlice::new(x, y, &row_phi(groups, [s, t]), b);
                    vals.push((end_weight(i, pts) * end_weight(j, pts), slice.log_integrand_no_g()));
                }
            }
            return log_trapezoid(&vals, h * h);
        }
        let a2 = axis(c[2] - half, c[2] + 2.0 * half, 145);
        let h2 = a2[1] - a2[0];
        for (i, &s) in a0.iter().enumerate() {
            for (j, &t) in a1.iter().enumerate() {
                let slice = ZsSlice::new(x, y, &row_phi(groups, [s, t]), b);
                for (k, &u) in a2.iter().enumerate() {
                    let w = end_weight(i, pts) * end_weight(j, pts) * end_weight(k, a2.len());
                    vals.push((w, slice.log_integrand(u)));
                }
            }
        }
        log_trapezoid(&vals, h * h * h2)
    };
    one(1.0, center_full) - one(b, center_frac)
}
