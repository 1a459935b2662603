//! Root finders: damped complex secant and bracketed real Brent.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::Real;

#[derive(Debug, Clone, Copy)]
pub struct SecantOptions {
    /// Convergence requires `|f| <= residual_tol` once the step stalls.
    pub residual_tol: f64,
    /// Relative step size regarded as stalled.
    pub step_tol: f64,
    pub max_iter: usize,
    /// Number of step halvings tried when the residual does not decrease.
    pub max_damping: usize,
}

impl Default for SecantOptions {
    fn default() -> Self {
        Self {
            residual_tol: 1e-10,
            step_tol: 1e-14,
            max_iter: 200,
            max_damping: 30,
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct ComplexRoot<T: Real> {
    pub root: Complex<T>,
    pub residual: T,
    pub iterations: usize,
}

/// Secant iteration with step damping and residual-decrease acceptance.
///
/// `f` may fail (e.g. a branch violation); such points are treated like a
/// residual increase and the step is shortened.
pub fn secant<T, F>(mut f: F, x0: Complex<T>, x1: Complex<T>, opts: SecantOptions) -> Result<ComplexRoot<T>>
where
    T: Real,
    F: FnMut(Complex<T>) -> Result<Complex<T>>,
{
    let residual_tol = T::lit(opts.residual_tol);
    let step_tol = T::lit(opts.step_tol);
    let mut xa = x0;
    let mut fa = f(xa)?;
    let mut xb = x1;
    let mut fb = f(xb)?;
    if fa.norm() < fb.norm() {
        std::mem::swap(&mut xa, &mut xb);
        std::mem::swap(&mut fa, &mut fb);
    }
    for it in 1..=opts.max_iter {
        let denom = fb - fa;
        if denom.norm() == T::zero() {
            break;
        }
        let step = -fb * (xb - xa) / denom;
        let mut accepted = None;
        let mut s = step;
        for _ in 0..=opts.max_damping {
            let xc = xb + s;
            if let Ok(fc) = f(xc) {
                if fc.norm().is_finite() && fc.norm() < fb.norm() {
                    accepted = Some((xc, fc));
                    break;
                }
            }
            s = s * T::lit(0.5);
        }
        let Some((xc, fc)) = accepted else {
            // no decrease along the secant direction: converged to rounding
            // or stuck
            break;
        };
        xa = xb;
        fa = fb;
        xb = xc;
        fb = fc;
        if ((xb - xa).norm() <= step_tol * xb.norm() || fb.norm() == T::zero()) && fb.norm() <= residual_tol {
            return Ok(ComplexRoot { root: xb, residual: fb.norm(), iterations: it });
        }
    }
    if fb.norm() <= residual_tol {
        return Ok(ComplexRoot { root: xb, residual: fb.norm(), iterations: opts.max_iter });
    }
    Err(Error::NonConvergence {
        what: "complex secant",
        iterations: opts.max_iter,
        residual: fb.norm().to_f64().unwrap_or(f64::NAN),
    })
}

/// Brent's method on a sign-changing bracket `[a, b]`.
pub fn brent<T, F>(mut f: F, a: T, b: T, xtol: T) -> Result<T>
where
    T: Real,
    F: FnMut(T) -> T,
{
    let (mut a, mut b) = (a, b);
    let mut fa = f(a);
    let mut fb = f(b);
    if fa == T::zero() {
        return Ok(a);
    }
    if fb == T::zero() {
        return Ok(b);
    }
    if fa.signum() == fb.signum() {
        return Err(Error::NoRoot(format!(
            "bracket [{a:?}, {b:?}] does not change sign"
        )));
    }
    let two = T::lit(2.0);
    let (mut c, mut fc) = (a, fa);
    let mut d = b - a;
    let mut e = d;
    for _ in 0..300 {
        if fb.signum() == fc.signum() {
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
        let tol = two * T::epsilon() * b.abs() + xtol * T::lit(0.5);
        let m = (c - b) * T::lit(0.5);
        if m.abs() <= tol || fb == T::zero() {
            return Ok(b);
        }
        if e.abs() >= tol && fa.abs() > fb.abs() {
            let s = fb / fa;
            let (mut p, mut q);
            if a == c {
                p = two * m * s;
                q = T::one() - s;
            } else {
                let qa = fa / fc;
                let r = fb / fc;
                p = s * (two * m * qa * (qa - r) - (b - a) * (r - T::one()));
                q = (qa - T::one()) * (r - T::one()) * (s - T::one());
            }
            if p > T::zero() {
                q = -q;
            } else {
                p = -p;
            }
            if two * p < (T::lit(3.0) * m * q - (tol * q).abs()).min((e * q).abs()) {
                e = d;
                d = p / q;
            } else {
                d = m;
                e = m;
            }
        } else {
            d = m;
            e = m;
        }
        a = b;
        fa = fb;
        b = if d.abs() > tol { b + d } else { b + tol * m.signum() };
        fb = f(b);
    }
    Err(Error::NonConvergence {
        what: "brent",
        iterations: 300,
        residual: fb.abs().to_f64().unwrap_or(f64::NAN),
    })
}

/// Sign changes of `f` on a grid over `[a, b]` (`n` intervals); returns the
/// bracketing intervals in order.
pub fn sign_changes<T, F>(mut f: F, a: T, b: T, n: usize) -> Vec<(T, T)>
where
    T: Real,
    F: FnMut(T) -> T,
{
    let mut out = Vec::new();
    let h = (b - a) / T::from_usize_lossy(n);
    let mut x_prev = a;
    let mut f_prev = f(a);
    for i in 1..=n {
        let x = a + h * T::from_usize_lossy(i);
        let fx = f(x);
        if f_prev.is_finite() && fx.is_finite() && f_prev.signum() != fx.signum() {
            out.push((x_prev, x));
        }
        x_prev = x;
        f_prev = fx;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    type C = Complex<f64>;

    #[test]
    fn secant_finds_complex_root() {
        let r = secant(|z: C| Ok(z * z + 1.0), C::new(0.2, 0.7), C::new(0.1, 0.8), SecantOptions::default()).unwrap();
        assert!((r.root - C::new(0.0, 1.0)).norm() < 1e-12);
    }

    #[test]
    fn secant_reports_failure() {
        let r = secant(|z: C| Ok(z * 0.0 + 1.0), C::new(0.0, 0.0), C::new(0.1, 0.0), SecantOptions::default());
        assert!(matches!(r, Err(Error::NonConvergence { .. })));
    }

    #[test]
    fn brent_cubic() {
        let x = brent(|x: f64| x * x * x - 2.0, 0.0, 2.0, 1e-15).unwrap();
        assert!((x - 2f64.cbrt()).abs() < 1e-14);
        assert!(brent(|x: f64| x * x + 1.0, -1.0, 1.0, 1e-12).is_err());
    }

    #[test]
    fn sign_changes_of_sine() {
        let br = sign_changes(|x: f64| x.sin(), 0.5, 10.0, 100);
        assert_eq!(br.len(), 3);
    }
}
