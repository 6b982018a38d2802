/// Outcome of a bounded scalar minimization.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Minimum {
    pub x: f64,
    pub fx: f64,
    pub evaluations: usize,
    pub iterations: usize,
    pub converged: bool,
}

const GOLDEN: f64 = 0.381_966_011_250_105_1;

/// Brent's method on [lo, hi]: golden-section steps with parabolic
/// interpolation, stopping when the bracket is narrower than `xtol`.
pub fn minimize<F>(
    mut f: F,
    lo: f64,
    hi: f64,
    xtol: f64,
    max_iterations: usize,
) -> Result<Minimum, crate::Error>
where
    F: FnMut(f64) -> Result<f64, crate::Error>,
{
    let (mut a, mut b) = (lo.min(hi), lo.max(hi));
    let mut x = a + GOLDEN * (b - a);
    let (mut w, mut v) = (x, x);
    let mut fx = f(x)?;
    let (mut fw, mut fv) = (fx, fx);
    let mut evaluations = 1;
    let (mut d, mut e) = (0.0_f64, 0.0_f64);
    let tol = 0.25 * xtol;

    for iteration in 1..=max_iterations {
        let xm = 0.5 * (a + b);
        let tol1 = tol + 1e-12 * x.abs();
        let tol2 = 2.0 * tol1;
        if (x - xm).abs() <= tol2 - 0.5 * (b - a) {
            return Ok(Minimum {
                x,
                fx,
                evaluations,
                iterations: iteration - 1,
                converged: true,
            });
        }
        let mut golden = true;
        if e.abs() > tol1 {
            let r = (x - w) * (fx - fv);
            let mut q = (x - v) * (fx - fw);
            let mut p = (x - v) * q - (x - w) * r;
            q = 2.0 * (q - r);
            if q > 0.0 {
                p = -p;
            }
            q = q.abs();
            let e_prev = e;
            if p.abs() < (0.5 * q * e_prev).abs() && p > q * (a - x) && p < q * (b - x) {
                e = d;
                d = p / q;
                let u = x + d;
                if u - a < tol2 || b - u < tol2 {
                    d = if xm >= x { tol1 } else { -tol1 };
                }
                golden = false;
            }
        }
        if golden {
            e = if x >= xm { a - x } else { b - x };
            d = GOLDEN * e;
        }
        let u = if d.abs() >= tol1 {
            x + d
        } else {
            x + tol1.copysign(d)
        };
        let fu = f(u)?;
        evaluations += 1;
        if fu <= fx {
            if u >= x {
                a = x;
            } else {
                b = x;
            }
            (v, fv) = (w, fw);
            (w, fw) = (x, fx);
            (x, fx) = (u, fu);
        } else {
            if u < x {
                a = u;
            } else {
                b = u;
            }
            if fu <= fw || w == x {
                (v, fv) = (w, fw);
                (w, fw) = (u, fu);
            } else if fu <= fv || v == x || v == w {
                (v, fv) = (u, fu);
            }
        }
    }
    Ok(Minimum {
        x,
        fx,
        evaluations,
        iterations: max_iterations,
        converged: false,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quadratic_interior_minimum() {
        let m = minimize(|x| Ok((x - 0.3).powi(2) + 1.0), 0.0, 1.0, 1e-8, 100).unwrap();
        assert!(m.converged);
        assert!((m.x - 0.3).abs() < 1e-8);
        assert!((m.fx - 1.0).abs() < 1e-15);
    }

    #[test]
    fn boundary_minimum() {
        let m = minimize(|x| Ok(x * x), 0.0, 0.2, 2e-5, 100).unwrap();
        assert!(m.converged);
        assert!(m.x < 2e-5);
    }

    #[test]
    fn nonsmooth_minimum() {
        let m = minimize(|x| Ok((x - 0.7).abs()), 0.0, 1.0, 1e-6, 200).unwrap();
        assert!((m.x - 0.7).abs() < 1e-6);
    }

    #[test]
    fn budget_exhaustion_is_reported() {
        let m = minimize(|x| Ok((x - 0.3).powi(2)), 0.0, 1.0, 1e-12, 3).unwrap();
        assert!(!m.converged);
        assert_eq!(m.iterations, 3);
    }

    #[test]
    fn errors_propagate() {
        let r = minimize(
            |_| Err(crate::Error::Data("boom".into())),
            0.0,
            1.0,
            1e-6,
            10,
        );
        assert!(r.is_err());
    }
}
