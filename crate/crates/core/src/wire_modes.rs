//! Guided plasmon modes of a metal nanowire of radius `R` in a host `eps1`.
//!
//! The fundamental TM0 mode is found as a complex root of the exact boundary
//! condition; hybrid `m >= 1` modes come from the 4x4 field-matching
//! determinant. All wavevectors are in units of `k0`.

use num_complex::Complex64 as C;

use crate::error::{Error, Result};
use crate::numerics::roots::{brent, secant, SecantOptions};
use crate::specfun::{bessel_i_seq_scaled, bessel_k_seq_scaled, log_derivatives};

pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WireGeometry {
    pub k0r: f64,
    pub eps1: C,
    pub eps2: C,
}

impl WireGeometry {
    pub fn new(k0r: f64, eps1: C, eps2: C) -> Result<Self> {
        if !(k0r > 0.0) || !k0r.is_finite() {
            return Err(Error::InvalidParameter(format!("wire radius k0R must be positive, got {k0r}")));
        }
        if !(eps2.re < 0.0) {
            return Err(Error::InvalidParameter(format!(
                "wire must be a conductor (Re eps2 < 0), got eps2 = {eps2}"
            )));
        }
        if !(eps1.re > 0.0) {
            return Err(Error::InvalidParameter(format!("host must be a dielectric, got eps1 = {eps1}")));
        }
        Ok(Self { k0r, eps1, eps2 })
    }

    /// Silver wire (`-50 + 0.6i`) in a host of permittivity 2.
    pub fn silver(k0r: f64) -> Self {
        Self { k0r, eps1: C::new(2.0, 0.0), eps2: C::new(-50.0, 0.6) }
    }

    pub fn with_radius(self, k0r: f64) -> Self {
        Self { k0r, ..self }
    }

    /// Same geometry with the imaginary parts of both media dropped.
    pub fn lossless(self) -> Self {
        Self { eps1: C::new(self.eps1.re, 0.0), eps2: C::new(self.eps2.re, 0.0), ..self }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeSolution {
    pub m: u32,
    pub k_par: C,
    /// exterior decay constant, `eps1 = k_par^2 - kappa1^2`
    pub kappa1: C,
    /// interior constant, `eps2 = k_par^2 - kappa2^2`
    pub kappa2: C,
    pub residual: f64,
    pub iterations: usize,
}

impl ModeSolution {
    fn new(m: u32, k_par: C, geom: &WireGeometry, residual: f64, iterations: usize) -> Self {
        Self {
            m,
            k_par,
            kappa1: transverse(k_par, geom.eps1),
            kappa2: transverse(k_par, geom.eps2),
            residual,
            iterations,
        }
    }
}

/// `sqrt(k^2 - eps)` on the principal branch.
pub fn transverse(k_par: C, eps: C) -> C {
    (k_par * k_par - eps).sqrt()
}

fn exterior_kappa(k_par: C, geom: &WireGeometry) -> Result<C> {
    let k1 = transverse(k_par, geom.eps1);
    if !(k1.re > 0.0) {
        return Err(Error::BranchViolation { re_kappa1: k1.re });
    }
    Ok(k1)
}

/// TM0 boundary condition
/// `eps2 I0'(k2 R)/(k2 I0(k2 R)) - eps1 K0'(k1 R)/(k1 K0(k1 R))`.
pub fn mode_residual_m0(k_par: C, geom: &WireGeometry) -> Result<C> {
    let k1 = exterior_kappa(k_par, geom)?;
    let k2 = transverse(k_par, geom.eps2);
    let (li, _) = log_derivatives(0, k2 * geom.k0r)?;
    let (_, lk) = log_derivatives(0, k1 * geom.k0r)?;
    Ok(geom.eps2 * li / k2 - geom.eps1 * lk / k1)
}

/// Smallest-|C| root of `C^2 (gamma - ln 2 + ln C) = 2 eps1/eps2`, the
/// small-radius constant in `k_par ~ C/R`.
pub fn quasistatic_constant(eps1: C, eps2: C) -> Result<C> {
    let ratio = eps2 / eps1;
    if !(ratio.re < 0.0) {
        return Err(Error::InvalidParameter(format!(
            "quasi-static constant needs Re(eps2/eps1) < 0, got {ratio}"
        )));
    }
    let target = C::new(2.0, 0.0) / ratio;
    let a = EULER_GAMMA - std::f64::consts::LN_2;
    let g = |c: C| c * c * (c.ln() + a) - target;
    let dg = |c: C| c * (c.ln() * 2.0 + 2.0 * a + 1.0);

    // real-axis scan on the real part of the target locates the smaller root
    let n = 4000;
    let grid = |i: usize| 1.1 * i as f64 / n as f64;
    let mut seed = None;
    let mut prev = g(C::new(grid(1), 0.0)).re;
    for i in 2..=n {
        let cur = g(C::new(grid(i), 0.0)).re;
        if prev.signum() != cur.signum() {
            let r = brent(|x: f64| g(C::new(x, 0.0)).re, grid(i - 1), grid(i), 1e-15)?;
            seed = Some(C::new(r, 0.0));
            break;
        }
        prev = cur;
    }
    // no real crossing: start from the minimiser of |g| on the axis
    let mut c = seed.unwrap_or_else(|| {
        (1..=n)
            .map(|i| C::new(grid(i), 0.0))
            .min_by(|x, y| g(*x).norm().total_cmp(&g(*y).norm()))
            .unwrap_or(C::new(0.2, 0.0))
    });
    for _ in 0..100 {
        let step = g(c) / dg(c);
        c -= step;
        if step.norm() <= 1e-16 * c.norm() {
            break;
        }
    }
    let res = g(c).norm();
    if !(res < 1e-10) || !(c.re > 0.0 && c.re <= 1.1) {
        return Err(Error::NoRoot(format!(
            "quasi-static constant for eps2/eps1 = {ratio}: best candidate {c} residual {res:e}"
        )));
    }
    Ok(c)
}

/// Residual of [`quasistatic_constant`]'s defining equation, expressed as the
/// permittivity ratio it implies minus the requested one.
pub fn quasistatic_ratio(c: C) -> C {
    let a = EULER_GAMMA - std::f64::consts::LN_2;
    C::new(2.0, 0.0) / ((c.ln() + a) * c * c)
}

fn refine(
    seed: C,
    geom: &WireGeometry,
    residual: &dyn Fn(C, &WireGeometry) -> Result<C>,
) -> Result<crate::numerics::roots::ComplexRoot<f64>> {
    let opts = SecantOptions::default();
    // iterates that run far from the seed land where the Bessel ratio
    // recurrences get slow; refuse them
    let reach = 20.0 * seed.norm() + 10.0;
    let guarded = |k: C| {
        if (k - seed).norm() > reach {
            return Err(Error::SeedOutsideBasin { seed_re: seed.re, seed_im: seed.im, detail: format!("iterate {k} ran away") });
        }
        residual(k, geom)
    };
    secant(guarded, seed, seed * (1.0 + 1e-4), opts)
}

/// Seed that keeps `kappa1 R` fixed when moving from radius `from` to `to`.
fn rescale_seed(k: C, eps1: C, from: f64, to: f64) -> C {
    let k1r = transverse(k, eps1) * from;
    (eps1 + (k1r / to) * (k1r / to)).sqrt()
}

fn accept(root: crate::numerics::roots::ComplexRoot<f64>, geom: &WireGeometry) -> Result<ModeSolution> {
    let sol = ModeSolution::new(0, root.root, geom, root.residual, root.iterations);
    if !(sol.kappa1.re > 0.0) {
        return Err(Error::BranchViolation { re_kappa1: sol.kappa1.re });
    }
    Ok(sol)
}

/// Fundamental TM0 plasmon. Seeded from the quasi-static constant; if that
/// seed does not converge the root is continued from a radius where it does.
pub fn solve_fundamental(geom: &WireGeometry) -> Result<ModeSolution> {
    let c = quasistatic_constant(geom.eps1, geom.eps2)?;
    let seed = rescale_seed(c / 1e-6, geom.eps1, 1e-6, geom.k0r);
    let first = refine(seed, geom, &mode_residual_m0).and_then(|r| accept(r, geom));
    if first.is_ok() {
        return first;
    }
    // continuation in radius from a small wire, where the seed is accurate
    let mut r = geom.k0r.min(1e-3);
    let mut g = geom.with_radius(r);
    let mut k = refine(rescale_seed(c / 1e-6, g.eps1, 1e-6, r), &g, &mode_residual_m0)
        .and_then(|x| accept(x, &g))
        .map_err(|e| seed_error(seed, &e))?
        .k_par;
    while r < geom.k0r {
        let next = (r * 1.2).min(geom.k0r);
        let s = rescale_seed(k, g.eps1, r, next);
        g = geom.with_radius(next);
        k = refine(s, &g, &mode_residual_m0)
            .and_then(|x| accept(x, &g))
            .map_err(|e| seed_error(seed, &e))?
            .k_par;
        r = next;
    }
    let root = refine(k, geom, &mode_residual_m0)?;
    accept(root, geom)
}

fn seed_error(seed: C, e: &Error) -> Error {
    Error::SeedOutsideBasin { seed_re: seed.re, seed_im: seed.im, detail: e.to_string() }
}

/// `Re k_par / Im k_par`, the number of plasmon wavelengths per e-folding of
/// the amplitude up to a factor `2 pi`. Lossless modes give `+inf`.
pub fn propagation_figure(mode: &ModeSolution) -> f64 {
    if mode.k_par.im <= 0.0 {
        f64::INFINITY
    } else {
        mode.k_par.re / mode.k_par.im
    }
}

/// Logarithmic derivatives `F'(x)/F(x)` of `I_m` and `K_m` at one argument.
fn q_pair(m: u32, z: C) -> Result<(C, C)> {
    log_derivatives(m, z)
}

/// Determinant of the field-matching system for the hybrid mode of order
/// `m`. Rows: `Ez`, `hz`, `Ephi`, `hphi` continuity (`h = Z0 H`); columns:
/// interior and exterior amplitudes of `Ez` and `hz`. For `m = 0` it factors
/// into the TM0 residual times the TE0 condition.
pub fn higher_mode_residual(m: u32, k_par: C, geom: &WireGeometry) -> Result<C> {
    let k1 = exterior_kappa(k_par, geom)?;
    let k2 = transverse(k_par, geom.eps2);
    let r = geom.k0r;
    let (q2, _) = q_pair(m, k2 * r)?;
    let (_, q1) = q_pair(m, k1 * r)?;
    let mf = m as f64;
    let side = |kap: C, q: C, eps: C| {
        let cross = k_par * mf / (kap * kap * r);
        // rows Ez, i hz, Ephi, i hphi for columns (A, B~)
        [[C::new(1.0, 0.0), C::new(0.0, 0.0)], [C::new(0.0, 0.0), C::new(1.0, 0.0)], [cross, q / kap], [eps * q / kap, cross]]
    };
    let inner = side(k2, q2, geom.eps2);
    let outer = side(k1, q1, geom.eps1);
    let mut a = [[C::new(0.0, 0.0); 4]; 4];
    for row in 0..4 {
        a[row][0] = inner[row][0];
        a[row][1] = inner[row][1];
        a[row][2] = -outer[row][0];
        a[row][3] = -outer[row][1];
    }
    Ok(det4(a))
}

fn det4(mut a: [[C; 4]; 4]) -> C {
    let mut det = C::new(1.0, 0.0);
    for col in 0..4 {
        let piv = (col..4).max_by(|&i, &j| a[i][col].norm().total_cmp(&a[j][col].norm())).unwrap_or(col);
        if a[piv][col].norm() == 0.0 {
            return C::new(0.0, 0.0);
        }
        if piv != col {
            a.swap(piv, col);
            det = -det;
        }
        det *= a[col][col];
        for row in col + 1..4 {
            let f = a[row][col] / a[col][col];
            let pivot_row = a[col];
            for (x, &v) in a[row].iter_mut().zip(&pivot_row).skip(col) {
                *x -= f * v;
            }
        }
    }
    det
}

/// Bound hybrid modes of order `m >= 1`. Roots are bracketed on the real
/// axis for the lossless counterpart of `geom` (where the determinant is
/// real) by scanning `kappa1` from the light line outwards, then continued to
/// the lossy media with the complex secant.
pub fn bound_higher_modes(m: u32, geom: &WireGeometry) -> Result<Vec<ModeSolution>> {
    if m == 0 {
        return Err(Error::InvalidParameter("hybrid-mode scan needs m >= 1".into()));
    }
    let lossless = geom.lossless();
    let eps1 = lossless.eps1.re;
    let det_at = |kap1: f64| -> f64 {
        let k = C::new((eps1 + kap1 * kap1).sqrt(), 0.0);
        higher_mode_residual(m, k, &lossless).map(|d| d.re).unwrap_or(f64::NAN)
    };
    let n = 800;
    let (lo, hi): (f64, f64) = (1e-6 / geom.k0r.max(1e-6), 40.0 / geom.k0r.max(0.05));
    let nodes: Vec<f64> = (0..=n).map(|i| lo * (hi / lo).powf(i as f64 / n as f64)).collect();
    let vals: Vec<f64> = nodes.iter().map(|&x| det_at(x)).collect();
    let mut out = Vec::new();
    for i in 0..n {
        let (fa, fb) = (vals[i], vals[i + 1]);
        if !(fa.is_finite() && fb.is_finite()) || fa.signum() == fb.signum() {
            continue;
        }
        let kap = brent(det_at, nodes[i], nodes[i + 1], 1e-14 * nodes[i + 1])?;
        // a sign change through a pole of the determinant leaves |det| large
        if !(det_at(kap).abs() <= 1e-6 * fa.abs().max(fb.abs())) {
            continue;
        }
        let k_real = C::new((eps1 + kap * kap).sqrt(), 0.0);
        let sol = if lossless == *geom {
            let d = higher_mode_residual(m, k_real, geom)?;
            ModeSolution::new(m, k_real, geom, d.norm(), 0)
        } else {
            // the loss only perturbs the lossless root; a wandering iterate
            // means the continuation failed and the mode is dropped
            let window = 0.1 * (k_real.re - eps1.sqrt()).max(1e-3 * k_real.re);
            let root = secant(
                |k| {
                    if (k - k_real).norm() > window {
                        return Err(Error::SeedOutsideBasin {
                            seed_re: k_real.re,
                            seed_im: 0.0,
                            detail: format!("hybrid continuation left the window at {k}"),
                        });
                    }
                    higher_mode_residual(m, k, geom)
                },
                k_real,
                k_real * (1.0 + 1e-6),
                SecantOptions { residual_tol: f64::INFINITY, ..SecantOptions::default() },
            );
            let Ok(root) = root else { continue };
            ModeSolution::new(m, root.root, geom, root.residual, root.iterations)
        };
        if sol.kappa1.re > 0.0 {
            out.push(sol);
        }
    }
    Ok(out)
}

/// Interior and exterior TM0 field amplitudes: `Ez = K0(kappa1 rho)` outside
/// and `c I0(kappa2 rho)` inside with `c = K0(kappa1 R)/I0(kappa2 R)`.
/// Returned as a scaled pair to stay finite for thick wires.
pub(crate) fn tm0_interior_ratio(mode: &ModeSolution, geom: &WireGeometry) -> Result<C> {
    let zk = mode.kappa1 * geom.k0r;
    let zi = mode.kappa2 * geom.k0r;
    let k = bessel_k_seq_scaled(0, zk)?[0];
    let i = bessel_i_seq_scaled(0, zi)[0];
    // K0(zk)/I0(zi) = k e^{-Re zk} / (i e^{|Re zi|})
    Ok(k / i * (-zk.re - zi.re.abs()).exp())
}
