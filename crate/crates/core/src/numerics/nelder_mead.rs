use super::NumericsError;

#[derive(Debug, Clone, PartialEq)]
pub struct Optimum {
    pub location: Vec<f64>,
    pub value: f64,
    pub converged: bool,
    pub iterations: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NelderMeadOptions {
    /// Convergence threshold on the spread of simplex values.
    pub tol: f64,
    pub max_iter: usize,
    /// Initial simplex edge. `None` uses 5% of each coordinate (0.00025 at zero).
    pub step: Option<f64>,
    /// Restart once from the best vertex after a first convergence.
    pub restart: bool,
}

impl NelderMeadOptions {
    pub fn new(tol: f64, max_iter: usize) -> Self {
        Self { tol, max_iter, step: None, restart: true }
    }

    pub fn for_dim(dim: usize) -> Self {
        Self::new(1e-10, 5000 * dim.max(1))
    }

    pub fn with_step(mut self, step: f64) -> Self {
        self.step = Some(step);
        self
    }
}

/// Minimizes `f` from `start` with the standard simplex coefficients
/// (reflection 1, expansion 2, contraction 0.5, shrink 0.5).
///
/// Non-finite values away from the start are treated as `+inf`.
pub fn nelder_mead<F>(f: F, start: &[f64], opts: &NelderMeadOptions) -> Result<Optimum, NumericsError>
where
    F: Fn(&[f64]) -> f64,
{
    let f0 = f(start);
    if !f0.is_finite() || start.is_empty() {
        return Err(NumericsError::BadStart);
    }
    let eval = |x: &[f64]| {
        let v = f(x);
        if v.is_nan() {
            f64::INFINITY
        } else {
            v
        }
    };

    let mut first = run(&eval, start, f0, opts, opts.max_iter);
    if first.converged && opts.restart {
        let budget = opts.max_iter.saturating_sub(first.iterations).max(1);
        let second = run(&eval, &first.location, first.value, opts, budget);
        let iterations = first.iterations + second.iterations;
        if second.value <= first.value {
            first = second;
        } else {
            first.converged = second.converged;
        }
        first.iterations = iterations;
    }
    Ok(first)
}

fn run<F>(f: &F, start: &[f64], f_start: f64, opts: &NelderMeadOptions, max_iter: usize) -> Optimum
where
    F: Fn(&[f64]) -> f64,
{
    let n = start.len();
    let mut simplex: Vec<Vec<f64>> = Vec::with_capacity(n + 1);
    let mut values: Vec<f64> = Vec::with_capacity(n + 1);
    simplex.push(start.to_vec());
    values.push(f_start);
    for i in 0..n {
        let mut v = start.to_vec();
        let step = match opts.step {
            Some(s) => s,
            None if v[i] != 0.0 => 0.05 * v[i].abs(),
            None => 0.00025,
        };
        v[i] += step;
        values.push(f(&v));
        simplex.push(v);
    }

    let mut order: Vec<usize> = (0..=n).collect();
    let mut iterations = 0;
    let mut converged = false;
    let mut centroid = vec![0.0; n];

    while iterations < max_iter {
        order.sort_by(|&a, &b| values[a].total_cmp(&values[b]).then(a.cmp(&b)));
        let (best, worst, second_worst) = (order[0], order[n], order[n - 1]);
        let spread = values[worst] - values[best];
        let diameter = simplex
            .iter()
            .map(|v| v.iter().zip(&simplex[best]).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max))
            .fold(0.0, f64::max);
        let scale = simplex[best].iter().fold(1.0f64, |m, x| m.max(x.abs()));
        if spread.is_finite() && spread <= opts.tol && diameter <= 1e-6 * scale {
            converged = true;
            break;
        }
        iterations += 1;

        centroid.iter_mut().for_each(|c| *c = 0.0);
        for &idx in &order[..n] {
            for (c, x) in centroid.iter_mut().zip(&simplex[idx]) {
                *c += x / n as f64;
            }
        }
        let along =
            |t: f64| -> Vec<f64> { centroid.iter().zip(&simplex[worst]).map(|(c, w)| c + t * (w - c)).collect() };

        let xr = along(-1.0);
        let fr = f(&xr);
        if fr < values[best] {
            let xe = along(-2.0);
            let fe = f(&xe);
            if fe < fr {
                simplex[worst] = xe;
                values[worst] = fe;
            } else {
                simplex[worst] = xr;
                values[worst] = fr;
            }
            continue;
        }
        if fr < values[second_worst] {
            simplex[worst] = xr;
            values[worst] = fr;
            continue;
        }
        let xc = if fr < values[worst] { along(-0.5) } else { along(0.5) };
        let fc = f(&xc);
        if fc < values[worst].min(fr) {
            simplex[worst] = xc;
            values[worst] = fc;
            continue;
        }
        let anchor = simplex[best].clone();
        for &idx in &order[1..] {
            for (x, a) in simplex[idx].iter_mut().zip(&anchor) {
                *x = a + 0.5 * (*x - a);
            }
            values[idx] = f(&simplex[idx]);
        }
    }

    let best = (0..=n).min_by(|&a, &b| values[a].total_cmp(&values[b]).then(a.cmp(&b))).unwrap_or(0);
    Optimum { location: simplex[best].clone(), value: values[best], converged, iterations }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn quadratic_bowl() {
        for dim in 1..=4 {
            let f = |x: &[f64]| x.iter().map(|v| (v - 3.0).powi(2)).sum::<f64>();
            let opt = nelder_mead(f, &vec![0.0; dim], &NelderMeadOptions::for_dim(dim)).unwrap();
            assert!(opt.converged);
            for v in &opt.location {
                assert!((v - 3.0).abs() < 1e-5, "dim {dim}: {:?}", opt.location);
            }
        }
    }

    #[test]
    fn rosenbrock() {
        let f = |x: &[f64]| 100.0 * (x[1] - x[0] * x[0]).powi(2) + (1.0 - x[0]).powi(2);
        let opt = nelder_mead(f, &[-1.2, 1.0], &NelderMeadOptions::for_dim(2)).unwrap();
        assert!(opt.converged);
        assert!((opt.location[0] - 1.0).abs() < 1e-3, "{:?}", opt.location);
        assert!((opt.location[1] - 1.0).abs() < 1e-3, "{:?}", opt.location);
    }

    #[test]
    fn already_at_minimum() {
        let opt = nelder_mead(|x| x[0].abs() + 1.0, &[0.0], &NelderMeadOptions::for_dim(1)).unwrap();
        assert_eq!(opt.location, vec![0.0]);
        assert_eq!(opt.value, 1.0);
    }

    #[test]
    fn bad_start() {
        let r = nelder_mead(|x| x[0].ln(), &[-1.0], &NelderMeadOptions::for_dim(1));
        assert_eq!(r.unwrap_err(), NumericsError::BadStart);
    }

    #[test]
    fn infeasible_region_is_avoided() {
        let f = |x: &[f64]| if x[0] <= 0.0 { f64::NAN } else { x[0] - x[0].ln() };
        let opt = nelder_mead(f, &[5.0], &NelderMeadOptions::for_dim(1)).unwrap();
        assert!((opt.location[0] - 1.0).abs() < 1e-4);
    }

    #[test]
    fn iteration_cap_reports_not_converged() {
        let f = |x: &[f64]| 100.0 * (x[1] - x[0] * x[0]).powi(2) + (1.0 - x[0]).powi(2);
        let opt = nelder_mead(f, &[-1.2, 1.0], &NelderMeadOptions::new(1e-10, 5)).unwrap();
        assert!(!opt.converged);
        assert_eq!(opt.value, f(&opt.location));
    }

    #[test]
    fn deterministic() {
        let f = |x: &[f64]| (x[0] - 1.0).powi(2) + 3.0 * (x[1] + 2.0).powi(2) + x[0] * x[1];
        let a = nelder_mead(f, &[0.3, 0.1], &NelderMeadOptions::for_dim(2)).unwrap();
        let b = nelder_mead(f, &[0.3, 0.1], &NelderMeadOptions::for_dim(2)).unwrap();
        assert_eq!(a, b);
    }

    fn convex_quadratic(dim: usize) -> impl Strategy<Value = (Vec<f64>, Vec<f64>, Vec<f64>)> {
        (
            proptest::collection::vec(-2.0f64..2.0, dim * dim),
            proptest::collection::vec(-5.0f64..5.0, dim),
            proptest::collection::vec(-1.0f64..1.0, dim),
        )
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]
        #[test]
        fn convex_quadratic_minimizer((dim, (l, target, start)) in (1usize..=4).prop_flat_map(|d| (Just(d), convex_quadratic(d)))) {
            // A = L Lᵀ + I is strictly positive definite.
            let lm = nalgebra::DMatrix::from_row_slice(dim, dim, &l);
            let a = &lm * lm.transpose() + nalgebra::DMatrix::identity(dim, dim);
            let t = nalgebra::DVector::from_column_slice(&target);
            let f = |x: &[f64]| {
                let d = nalgebra::DVector::from_column_slice(x) - &t;
                (d.transpose() * &a * &d)[0]
            };
            let opt = nelder_mead(f, &start, &NelderMeadOptions::for_dim(dim)).unwrap();
            for (x, t) in opt.location.iter().zip(&target) {
                prop_assert!((x - t).abs() < 1e-4, "{:?} vs {:?}", opt.location, target);
            }
            prop_assert_eq!(opt.value, f(&opt.location));
        }
    }
}
