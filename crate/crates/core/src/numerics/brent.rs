use super::NumericsError;

/// Brent's method (bisection, secant and inverse quadratic interpolation).
///
/// Stops once the bracket half-width drops below `tol * max(1, |x|)` or an
/// exact zero is hit.
pub fn brent_root<F>(mut f: F, lo: f64, hi: f64, tol: f64) -> Result<f64, NumericsError>
where
    F: FnMut(f64) -> f64,
{
    let (mut a, mut b) = (lo, hi);
    let (mut fa, mut fb) = (f(a), f(b));
    if !(fa.is_finite() && fb.is_finite()) || fa * fb > 0.0 {
        return Err(NumericsError::BracketFailure { lo, hi });
    }
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    let (mut c, mut fc) = (b, fb);
    let (mut d, mut e) = (b - a, b - a);

    for _ in 0..500 {
        if (fb > 0.0) == (fc > 0.0) {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if fc.abs() < fb.abs() {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        let tol1 = 2.0 * f64::EPSILON * b.abs() + 0.5 * tol * b.abs().max(1.0);
        let xm = 0.5 * (c - b);
        if xm.abs() <= tol1 || fb == 0.0 {
            return Ok(b);
        }
        if e.abs() >= tol1 && fa.abs() > fb.abs() {
            let s = fb / fa;
            let (mut p, mut q);
            if a == c {
                p = 2.0 * xm * s;
                q = 1.0 - s;
            } else {
                let qa = fa / fc;
                let r = fb / fc;
                p = s * (2.0 * xm * qa * (qa - r) - (b - a) * (r - 1.0));
                q = (qa - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if p > 0.0 {
                q = -q;
            }
            p = p.abs();
            let min1 = 3.0 * xm * q - (tol1 * q).abs();
            let min2 = (e * q).abs();
            if 2.0 * p < min1.min(min2) {
                e = d;
                d = p / q;
            } else {
                d = xm;
                e = d;
            }
        } else {
            d = xm;
            e = d;
        }
        a = b;
        fa = fb;
        b += if d.abs() > tol1 { d } else { tol1.copysign(xm) };
        fb = f(b);
        if !fb.is_finite() {
            return Err(NumericsError::BracketFailure { lo, hi });
        }
    }
    Ok(b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn sqrt_two() {
        let r = brent_root(|x| x * x - 2.0, 0.0, 2.0, 1e-12).unwrap();
        assert!((r - 2f64.sqrt()).abs() < 1e-6);
        assert!((r - 2f64.sqrt()).abs() < 1e-11);
    }

    #[test]
    fn linear_root_at_zero() {
        let r = brent_root(|x| x, -1.0, 1.0, 1e-12).unwrap();
        assert!(r.abs() < 1e-12);
    }

    #[test]
    fn tiny_root_near_lower_end() {
        let root = 1e-8;
        let r = brent_root(|x| (x - root) * 1e3, 0.0, 10.0, 1e-12).unwrap();
        assert!((r - root).abs() < 1e-12, "{r}");
        let r = brent_root(|x: f64| x.ln() - root.ln(), 1e-12, 1e12, 1e-12).unwrap();
        assert!((r - root).abs() < 1e-12, "{r}");
    }

    #[test]
    fn no_sign_change() {
        assert_eq!(
            brent_root(|x| x * x + 1.0, -1.0, 1.0, 1e-12),
            Err(NumericsError::BracketFailure { lo: -1.0, hi: 1.0 })
        );
    }

    proptest! {
        #[test]
        fn result_brackets_a_sign_change(root in -50.0f64..50.0, k in 0.1f64..10.0, cubic in proptest::bool::ANY) {
            let f = |x: f64| if cubic { (x - root).powi(3) * k } else { (x - root) * k + 0.1 * (x - root).powi(3) };
            let tol = 1e-10;
            let r = brent_root(f, -100.0, 100.0, tol).unwrap();
            let h = tol * r.abs().max(1.0);
            prop_assert!(f(r).abs() < 1e-10 || f(r - h).signum() != f(r + h).signum());
        }
    }
}
