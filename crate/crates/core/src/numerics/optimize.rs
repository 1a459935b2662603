//! Derivative-free minimisation: golden-section search in one dimension and
//! Nelder-Mead simplex in several.

use crate::scalar::Real;

#[derive(Debug, Clone, Copy)]
pub struct Golden<T> {
    pub x: T,
    pub value: T,
    pub evaluations: usize,
}

/// Minimise a unimodal `f` on `[a, b]` until the bracket is narrower than
/// `rel_tol * |x| + abs_tol`. The better endpoint is returned if it beats the
/// interior optimum.
pub fn golden_section_min<T, F>(mut f: F, a: T, b: T, rel_tol: T, abs_tol: T) -> Golden<T>
where
    T: Real,
    F: FnMut(T) -> T,
{
    let inv_phi = (T::lit(5.0).sqrt() - T::one()) * T::lit(0.5);
    let (mut lo, mut hi) = if a < b { (a, b) } else { (b, a) };
    let mut x1 = hi - inv_phi * (hi - lo);
    let mut x2 = lo + inv_phi * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    let mut evaluations = 2;
    while (hi - lo) > rel_tol * (x1.abs() + x2.abs()) * T::lit(0.5) + abs_tol && evaluations < 500 {
        if f1 < f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_phi * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_phi * (hi - lo);
            f2 = f(x2);
        }
        evaluations += 1;
    }
    let (mut x, mut value) = if f1 < f2 { (x1, f1) } else { (x2, f2) };
    for end in [a, b] {
        let fe = f(end);
        evaluations += 1;
        if fe < value {
            x = end;
            value = fe;
        }
    }
    Golden { x, value, evaluations }
}

#[derive(Debug, Clone, Copy)]
pub struct NelderMeadOptions {
    pub max_iter: usize,
    /// Stop when the spread of simplex values falls below this.
    pub f_tol: f64,
    /// ... and the simplex diameter below this.
    pub x_tol: f64,
}

impl Default for NelderMeadOptions {
    fn default() -> Self {
        Self {
            max_iter: 2000,
            f_tol: 1e-12,
            x_tol: 1e-9,
        }
    }
}

#[derive(Debug, Clone)]
pub struct NelderMead<T> {
    pub x: Vec<T>,
    pub value: T,
    pub iterations: usize,
    pub converged: bool,
}

/// Standard Nelder-Mead (reflection 1, expansion 2, contraction 1/2,
/// shrink 1/2) started from `x0` with per-coordinate initial steps `step`.
pub fn nelder_mead<T, F>(mut f: F, x0: &[T], step: &[T], opts: NelderMeadOptions) -> NelderMead<T>
where
    T: Real,
    F: FnMut(&[T]) -> T,
{
    let n = x0.len();
    let half = T::lit(0.5);
    let two = T::lit(2.0);
    let mut simplex: Vec<Vec<T>> = Vec::with_capacity(n + 1);
    simplex.push(x0.to_vec());
    for i in 0..n {
        let mut v = x0.to_vec();
        v[i] = v[i] + step[i];
        simplex.push(v);
    }
    let eval = |f: &mut F, x: &[T]| {
        let v = f(x);
        if v.is_nan() {
            T::infinity()
        } else {
            v
        }
    };
    let mut values: Vec<T> = simplex.iter().map(|x| eval(&mut f, x)).collect();
    let f_tol = T::lit(opts.f_tol);
    let x_tol = T::lit(opts.x_tol);
    let mut iterations = 0;
    let mut converged = false;
    while iterations < opts.max_iter {
        iterations += 1;
        let mut order: Vec<usize> = (0..=n).collect();
        order.sort_by(|&a, &b| values[a].partial_cmp(&values[b]).unwrap_or(std::cmp::Ordering::Equal));
        simplex = order.iter().map(|&i| simplex[i].clone()).collect();
        values = order.iter().map(|&i| values[i]).collect();

        let spread = (values[n] - values[0]).abs();
        let diameter = simplex[1..]
            .iter()
            .map(|v| {
                v.iter()
                    .zip(&simplex[0])
                    .fold(T::zero(), |m, (a, b)| m.max((*a - *b).abs()))
            })
            .fold(T::zero(), |m, d| m.max(d));
        if spread <= f_tol * (values[0].abs() + f_tol) && diameter <= x_tol {
            converged = true;
            break;
        }

        let centroid: Vec<T> = (0..n)
            .map(|j| simplex[..n].iter().fold(T::zero(), |s, v| s + v[j]) / T::from_usize_lossy(n))
            .collect();
        let along = |t: T| -> Vec<T> {
            centroid
                .iter()
                .zip(&simplex[n])
                .map(|(c, w)| *c + t * (*c - *w))
                .collect()
        };
        let xr = along(T::one());
        let fr = eval(&mut f, &xr);
        if fr < values[0] {
            let xe = along(two);
            let fe = eval(&mut f, &xe);
            if fe < fr {
                simplex[n] = xe;
                values[n] = fe;
            } else {
                simplex[n] = xr;
                values[n] = fr;
            }
        } else if fr < values[n - 1] {
            simplex[n] = xr;
            values[n] = fr;
        } else {
            let (xc, fc) = if fr < values[n] {
                let xc = along(half);
                let fc = eval(&mut f, &xc);
                (xc, fc)
            } else {
                let xc = along(-half);
                let fc = eval(&mut f, &xc);
                (xc, fc)
            };
            if fc < values[n].min(fr) {
                simplex[n] = xc;
                values[n] = fc;
            } else {
                let best = simplex[0].clone();
                for i in 1..=n {
                    simplex[i] = simplex[i]
                        .iter()
                        .zip(&best)
                        .map(|(x, b)| *b + half * (*x - *b))
                        .collect();
                    values[i] = eval(&mut f, &simplex[i]);
                }
            }
        }
    }
    let best = (0..=n)
        .min_by(|&a, &b| values[a].partial_cmp(&values[b]).unwrap_or(std::cmp::Ordering::Equal))
        .unwrap_or(0);
    NelderMead {
        x: simplex[best].clone(),
        value: values[best],
        iterations,
        converged,
    }
}
