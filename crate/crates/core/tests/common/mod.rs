//! Independent reference implementations shared by the integration tests.
#![allow(dead_code)]

pub mod contour;
pub mod dd;
pub mod quad;

use num_complex::Complex64 as C;

/// `I_m(z)` from the power series in double-double arithmetic.
pub fn oracle_i(m: u32, z: C) -> C {
    dd::series_i(m, z)
}

/// `J_m(z)` from its power series in double-double arithmetic.
pub fn oracle_j(m: u32, z: C) -> C {
    dd::series_j(m, z)
}

/// `K_m(z)` from `int_0^inf exp(-z cosh t) cosh(m t) dt`, valid for
/// `|arg z| < pi/2`; the trapezoid rule converges geometrically here.
pub fn oracle_k(m: u32, z: C) -> C {
    let h: f64 = 0.02;
    let mut sum = C::new(0.5, 0.0) * (-z).exp();
    let mut t = h;
    loop {
        let term = (-z * t.cosh()).exp() * (m as f64 * t).cosh();
        sum += term;
        if term.norm() < 1e-300 || term.norm() < 1e-22 * sum.norm() {
            break;
        }
        t += h;
    }
    sum * h
}

/// Real Bessel `J_m` from the series, with a bisection helper for zeros.
pub fn bisect(mut f: impl FnMut(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
    let mut fa = f(a);
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        let fm = f(m);
        if fm == 0.0 {
            return m;
        }
        if fm.signum() == fa.signum() {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
        if (b - a).abs() < 1e-16 * m.abs() {
            break;
        }
    }
    0.5 * (a + b)
}

pub fn rel_err(a: C, b: C) -> f64 {
    (a - b).norm() / b.norm()
}

/// Explicit Dormand-Prince 5(4) integrator with step control, used for
/// coupled-mode equations.
pub fn rk45<const N: usize>(
    f: impl Fn(f64, &[C; N]) -> [C; N],
    y0: [C; N],
    t_end: f64,
    tol: f64,
) -> [C; N] {
    const A: [[f64; 6]; 6] = [
        [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
        [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
        [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
        [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
        [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
        [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
    ];
    const C_: [f64; 7] = [0.0, 0.2, 0.3, 0.8, 8.0 / 9.0, 1.0, 1.0];
    const B5: [f64; 7] = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0];
    const B4: [f64; 7] = [
        5179.0 / 57600.0, 0.0, 7571.0 / 16695.0, 393.0 / 640.0, -92097.0 / 339200.0, 187.0 / 2100.0, 1.0 / 40.0,
    ];
    let mut t = 0.0;
    let mut y = y0;
    let mut h = t_end / 100.0;
    while t < t_end {
        if t + h > t_end {
            h = t_end - t;
        }
        let mut k = [[C::new(0.0, 0.0); N]; 7];
        k[0] = f(t, &y);
        for s in 1..7 {
            let mut ys = y;
            for (j, kj) in k.iter().enumerate().take(s) {
                for i in 0..N {
                    ys[i] += kj[i] * (h * A[s - 1][j]);
                }
            }
            k[s] = f(t + C_[s] * h, &ys);
        }
        let mut y5 = y;
        let mut err: f64 = 0.0;
        for i in 0..N {
            let mut d5 = C::new(0.0, 0.0);
            let mut d4 = C::new(0.0, 0.0);
            for s in 0..7 {
                d5 += k[s][i] * B5[s];
                d4 += k[s][i] * B4[s];
            }
            y5[i] += d5 * h;
            err = err.max(((d5 - d4) * h).norm() / (1.0 + y[i].norm()));
        }
        if err <= tol {
            t += h;
            y = y5;
        }
        let factor = if err == 0.0 { 5.0 } else { (0.9 * (tol / err).powf(0.2)).clamp(0.2, 5.0) };
        h *= factor;
    }
    y
}
