//! Adaptive Gauss-Kronrod (7/15) quadrature on finite, semi-infinite and
//! complex-contour domains, plus trapezoidal contour integrals on circles.

use std::collections::BinaryHeap;
use std::cmp::Ordering;

use num_complex::Complex;

use super::Field;
use crate::error::{Error, Result};
use crate::scalar::{imag_unit, Real};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// Tolerances and limits for the adaptive integrators.
#[derive(Debug, Clone, Copy)]
pub struct QuadOptions {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_intervals: usize,
}

impl Default for QuadOptions {
    fn default() -> Self {
        Self {
            abs_tol: 0.0,
            rel_tol: 1e-10,
            max_intervals: 2000,
        }
    }
}

impl QuadOptions {
    pub fn rel(rel_tol: f64) -> Self {
        Self {
            rel_tol,
            ..Self::default()
        }
    }
}

/// Result of an adaptive integration.
#[derive(Debug, Clone, Copy)]
pub struct Quadrature<V> {
    pub value: V,
    pub error: f64,
    pub evaluations: usize,
}

/// One 15-point Kronrod rule on `[a, b]` with its embedded 7-point Gauss estimate.
pub fn gk15<T, V, F>(f: &mut F, a: T, b: T) -> (V, T)
where
    T: Real,
    V: Field<T>,
    F: FnMut(T) -> V,
{
    let center = (a + b) * T::lit(0.5);
    let half = (b - a) * T::lit(0.5);
    let fc = f(center);
    let mut kronrod = fc * T::lit(WGK[7]);
    let mut gauss = fc * T::lit(WG[3]);
    for j in 0..7 {
        let dx = half * T::lit(XGK[j]);
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        let pair = f1 + f2;
        kronrod = kronrod + pair * T::lit(WGK[j]);
        if j % 2 == 1 {
            gauss = gauss + pair * T::lit(WG[j / 2]);
        }
    }
    let value = kronrod * half;
    let err = (kronrod - gauss).magnitude() * half.abs();
    (value, err)
}

struct Piece<T, V> {
    a: T,
    b: T,
    value: V,
    err: T,
}

impl<T: Real, V> PartialEq for Piece<T, V> {
    fn eq(&self, other: &Self) -> bool {
        self.err == other.err
    }
}
impl<T: Real, V> Eq for Piece<T, V> {}
impl<T: Real, V> PartialOrd for Piece<T, V> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl<T: Real, V> Ord for Piece<T, V> {
    fn cmp(&self, other: &Self) -> Ordering {
        self.err.partial_cmp(&other.err).unwrap_or(Ordering::Equal)
    }
}

/// Globally adaptive integration of `f` over `[a, b]`, optionally split at
/// interior `breaks` first.
pub fn integrate<T, V, F>(mut f: F, a: T, b: T, breaks: &[T], opts: QuadOptions) -> Result<Quadrature<V>>
where
    T: Real,
    V: Field<T>,
    F: FnMut(T) -> V,
{
    let mut edges = vec![a];
    edges.extend(breaks.iter().copied().filter(|&x| (x - a) * (x - b) < T::zero()));
    edges.push(b);
    if a < b {
        edges.sort_by(|x, y| x.partial_cmp(y).unwrap_or(Ordering::Equal));
    } else {
        edges.sort_by(|x, y| y.partial_cmp(x).unwrap_or(Ordering::Equal));
    }

    let mut heap = BinaryHeap::new();
    let mut total = V::zero();
    let mut total_err = T::zero();
    let mut evaluations = 0;
    for w in edges.windows(2) {
        let (v, e) = gk15(&mut f, w[0], w[1]);
        evaluations += 15;
        total = total + v;
        total_err = total_err + e;
        heap.push(Piece { a: w[0], b: w[1], value: v, err: e });
    }
    let abs_tol = T::lit(opts.abs_tol);
    let rel_tol = T::lit(opts.rel_tol);
    while total_err > abs_tol.max(rel_tol * total.magnitude()) {
        if heap.len() >= opts.max_intervals {
            return Err(Error::Quadrature {
                estimate: total_err.to_f64().unwrap_or(f64::NAN),
            });
        }
        let worst = heap.pop().expect("heap holds at least one interval");
        let mid = (worst.a + worst.b) * T::lit(0.5);
        if mid == worst.a || mid == worst.b {
            // interval exhausted at machine precision
            return Err(Error::Quadrature {
                estimate: total_err.to_f64().unwrap_or(f64::NAN),
            });
        }
        let (v1, e1) = gk15(&mut f, worst.a, mid);
        let (v2, e2) = gk15(&mut f, mid, worst.b);
        evaluations += 30;
        total = total - worst.value + v1 + v2;
        total_err = total_err - worst.err + e1 + e2;
        heap.push(Piece { a: worst.a, b: mid, value: v1, err: e1 });
        heap.push(Piece { a: mid, b: worst.b, value: v2, err: e2 });
        // re-sum periodically to avoid drift from repeated subtraction
        if heap.len() % 64 == 0 {
            total = heap.iter().fold(V::zero(), |acc, p| acc + p.value);
            total_err = heap.iter().fold(T::zero(), |acc, p| acc + p.err);
        }
    }
    Ok(Quadrature {
        value: total,
        error: total_err.to_f64().unwrap_or(f64::NAN),
        evaluations,
    })
}

/// Integral over `[a, inf)` via the map `x = a + t / (1 - t)`.
pub fn integrate_to_infinity<T, V, F>(mut f: F, a: T, opts: QuadOptions) -> Result<Quadrature<V>>
where
    T: Real,
    V: Field<T>,
    F: FnMut(T) -> V,
{
    let g = move |t: T| {
        let one_minus = T::one() - t;
        if one_minus <= T::zero() {
            return V::zero();
        }
        let x = a + t / one_minus;
        let jac = (one_minus * one_minus).recip();
        let v = f(x);
        if v.magnitude().is_finite() {
            v * jac
        } else {
            V::zero()
        }
    };
    integrate(g, T::zero(), T::one(), &[], opts)
}

/// Contour integral of `f(z) dz` along the straight segments joining `path`.
pub fn integrate_path<T, F>(mut f: F, path: &[Complex<T>], opts: QuadOptions) -> Result<Quadrature<Complex<T>>>
where
    T: Real,
    F: FnMut(Complex<T>) -> Complex<T>,
{
    let mut value = Complex::new(T::zero(), T::zero());
    let mut error = 0.0;
    let mut evaluations = 0;
    for w in path.windows(2) {
        let (z0, z1) = (w[0], w[1]);
        let dz = z1 - z0;
        let q = integrate(|s: T| f(z0 + dz * s) * dz, T::zero(), T::one(), &[], opts)?;
        value = value + q.value;
        error += q.error;
        evaluations += q.evaluations;
    }
    Ok(Quadrature { value, error, evaluations })
}

/// `(1 / 2 pi i) * oint f(z) dz` on the circle `|z - center| = radius`
/// with the `n`-point trapezoidal rule (spectrally accurate for analytic `f`).
pub fn circle_mean<T, F>(mut f: F, center: Complex<T>, radius: T, n: usize) -> Complex<T>
where
    T: Real,
    F: FnMut(Complex<T>) -> Complex<T>,
{
    let i = imag_unit::<T>();
    let mut acc = Complex::new(T::zero(), T::zero());
    let nf = T::from_usize_lossy(n);
    for j in 0..n {
        let theta = T::TAU() * T::from_usize_lossy(j) / nf;
        let e = (i * theta).exp();
        acc = acc + f(center + e * radius) * e;
    }
    acc * radius / nf
}
