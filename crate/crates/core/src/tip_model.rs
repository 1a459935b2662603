//! Paraboloidal nanotip `rho(z) = sqrt(v z)`: on-axis dipole decay rates,
//! eikonal loss of the launched plasmon up to a final radius, and the
//! optimized error probability.

use std::collections::HashMap;
use std::sync::{Arc, OnceLock, RwLock};

use num_complex::Complex64 as C;

use crate::emitter_coupling::{image_factor, DecayRates};
use crate::error::{Error, Result};
use crate::numerics::interp::CubicSpline;
use crate::numerics::optimize::{golden_section_min, nelder_mead, NelderMeadOptions};
use crate::numerics::quadrature::{integrate, QuadOptions};
use crate::specfun::bessel_k;
use crate::wire_modes::{quasistatic_constant, solve_fundamental, WireGeometry};

/// Optimized tip Purcell factor used to fix the plasmon prefactor.
pub const TIP_PURCELL_ANCHOR: f64 = 2.5e3;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TipGeometry {
    pub k0v: f64,
    pub k0r_final: f64,
}

impl TipGeometry {
    pub fn new(k0v: f64, k0r_final: f64) -> Result<Self> {
        if !(k0v > 0.0) || !(k0r_final >= 0.0) || !k0v.is_finite() || !k0r_final.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "tip needs k0v > 0 and k0R_final >= 0, got {k0v}, {k0r_final}"
            )));
        }
        Ok(Self { k0v, k0r_final })
    }

    /// Axial length from the apex to the final radius, `R^2 / v`.
    pub fn length(&self) -> f64 {
        self.k0r_final * self.k0r_final / self.k0v
    }
}

#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct TipCalibration {
    pub target_purcell: f64,
    /// `d / v` at which the small-`v` Purcell factor peaks
    pub optimal_d_over_v: f64,
    /// unscaled peak, i.e. the Purcell factor for unit prefactor
    pub unit_peak: f64,
    pub quasistatic_c: [f64; 2],
    pub eps1: [f64; 2],
    pub eps2: [f64; 2],
    pub method: &'static str,
}

#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct TipCouplingConstant {
    pub alpha_pl_tip: f64,
    pub calibration: TipCalibration,
}

pub fn tip_rate_rad(k0d: f64, k0v: f64, eps1: C, eps2: C) -> Result<f64> {
    check_dv(k0d, k0v)?;
    let f = C::new(1.0, 0.0) + (eps2 / eps1 - 1.0) / (1.0 + 4.0 * k0d / k0v);
    Ok(f.norm_sqr())
}

pub fn tip_rate_nonrad(k0d: f64, eps1: C, eps2: C) -> Result<f64> {
    if !(k0d > 0.0) {
        return Err(Error::InvalidParameter(format!("emitter distance must be positive, got {k0d}")));
    }
    let f = image_factor(eps1, eps2)?;
    Ok(3.0 * f.im / (8.0 * eps1.re.powf(1.5) * k0d.powi(3)))
}

/// `|K1(C sqrt(1 + 4s))|^2 / (1 + 4s)`, the shape of the plasmon rate at
/// `s = d/v` without the `alpha' / v^3` prefactor.
fn plasmon_shape(s: f64, c: C) -> Result<f64> {
    let q = 1.0 + 4.0 * s;
    let z = c * q.sqrt();
    let k = if z.re > 600.0 { C::new(0.0, 0.0) } else { bessel_k(1, z)? };
    Ok(k.norm_sqr() / q)
}

pub fn tip_rate_plasmon(k0d: f64, k0v: f64, cpl: &TipCouplingConstant, c: C) -> Result<f64> {
    check_dv(k0d, k0v)?;
    Ok(cpl.alpha_pl_tip * plasmon_shape(k0d / k0v, c)? / k0v.powi(3))
}

fn check_dv(k0d: f64, k0v: f64) -> Result<()> {
    if !(k0d > 0.0) || !(k0v > 0.0) {
        return Err(Error::InvalidParameter(format!("tip needs k0d, k0v > 0, got {k0d}, {k0v}")));
    }
    Ok(())
}

/// Fix `alpha'` so that the small-`v` Purcell factor, maximized over
/// `s = d/v`, equals `target`. In that limit the radiative rate is negligible
/// and `pl/nonrad = alpha' * 8 eps1^{3/2} s^3 shape(s) / (3 Im f)`, independent
/// of `v`.
pub fn calibrate_tip(eps1: C, eps2: C, target: f64) -> Result<TipCouplingConstant> {
    let c = quasistatic_constant(eps1, eps2)?;
    let f = image_factor(eps1, eps2)?;
    if !(f.im > 0.0) {
        return Err(Error::InvalidParameter(
            "tip calibration needs an absorbing metal (Im eps2 > 0)".into(),
        ));
    }
    let unit = |ln_s: f64| -> f64 {
        let s = ln_s.exp();
        plasmon_shape(s, c).map(|k| k * s.powi(3) * 8.0 * eps1.re.powf(1.5) / (3.0 * f.im)).unwrap_or(0.0)
    };
    let g = golden_section_min(|t| -unit(t), (1e-3f64).ln(), (1e3f64).ln(), 1e-12, 1e-10);
    let unit_peak = -g.value;
    Ok(TipCouplingConstant {
        alpha_pl_tip: target / unit_peak,
        calibration: TipCalibration {
            target_purcell: target,
            optimal_d_over_v: g.x.exp(),
            unit_peak,
            quasistatic_c: [c.re, c.im],
            eps1: [eps1.re, eps1.im],
            eps2: [eps2.re, eps2.im],
            method: "peak small-v tip Purcell factor over d/v set to target",
        },
    })
}

pub fn tip_rates(k0d: f64, k0v: f64, eps1: C, eps2: C, cpl: &TipCouplingConstant) -> Result<DecayRates> {
    let c = quasistatic_constant(eps1, eps2)?;
    Ok(DecayRates {
        rad: tip_rate_rad(k0d, k0v, eps1, eps2)?,
        nonrad: tip_rate_nonrad(k0d, eps1, eps2)?,
        pl: tip_rate_plasmon(k0d, k0v, cpl, c)?,
    })
}

/// `rho * Im k_par(rho)` of the fundamental wire mode tabulated on a log grid
/// (40 points per decade) and interpolated with a cubic spline in `ln rho`.
/// Below the grid the thin-wire law `Im k_par ~ c / rho` is used.
#[derive(Debug, Clone)]
pub struct WireDispersion {
    spline: CubicSpline<f64>,
    rho_min: f64,
    rho_max: f64,
    lossless: bool,
}

impl WireDispersion {
    pub const POINTS_PER_DECADE: usize = 40;

    pub fn build(eps1: C, eps2: C, rho_min: f64, rho_max: f64) -> Result<Self> {
        if !(rho_min > 0.0 && rho_max > rho_min) {
            return Err(Error::InvalidParameter("dispersion grid needs 0 < rho_min < rho_max".into()));
        }
        let decades = (rho_max / rho_min).log10();
        let n = ((decades * Self::POINTS_PER_DECADE as f64).ceil() as usize).max(3);
        let mut xs = Vec::with_capacity(n + 1);
        let mut ys = Vec::with_capacity(n + 1);
        for i in 0..=n {
            let rho = rho_min * (rho_max / rho_min).powf(i as f64 / n as f64);
            let mode = solve_fundamental(&WireGeometry { k0r: rho, eps1, eps2 })?;
            xs.push(rho.ln());
            ys.push(rho * mode.k_par.im);
        }
        let lossless = ys.iter().all(|&y| y == 0.0);
        Ok(Self { spline: CubicSpline::new(xs, ys)?, rho_min, rho_max, lossless })
    }

    /// Shared instance for the given media on `[1e-4, 2]`.
    pub fn cached(eps1: C, eps2: C) -> Result<Arc<Self>> {
        type Key = [u64; 4];
        static CACHE: OnceLock<RwLock<HashMap<Key, Arc<WireDispersion>>>> = OnceLock::new();
        let cache = CACHE.get_or_init(|| RwLock::new(HashMap::new()));
        let key = [eps1.re.to_bits(), eps1.im.to_bits(), eps2.re.to_bits(), eps2.im.to_bits()];
        if let Some(d) = cache.read().ok().and_then(|m| m.get(&key).cloned()) {
            return Ok(d);
        }
        let d = Arc::new(Self::build(eps1, eps2, 1e-4, 2.0)?);
        if let Ok(mut m) = cache.write() {
            m.entry(key).or_insert_with(|| d.clone());
        }
        Ok(d)
    }

    pub fn rho_max(&self) -> f64 {
        self.rho_max
    }

    /// `rho * Im k_par(rho)`
    pub fn rho_im_k(&self, rho: f64) -> f64 {
        if self.lossless {
            return 0.0;
        }
        if rho <= self.rho_min {
            self.spline.eval(self.rho_min.ln())
        } else {
            self.spline.eval(rho.ln())
        }
    }

    pub fn im_k(&self, rho: f64) -> f64 {
        self.rho_im_k(rho) / rho
    }
}

/// `exp(-2 int_0^{R^2/v} Im k_par(sqrt(v z)) dz)`. With `z = rho^2/v` the
/// exponent is `(4/v) int_0^R rho Im k_par(rho) d rho`, whose integrand is
/// finite at the apex.
pub fn eikonal_attenuation(tip: &TipGeometry, im_k: &dyn Fn(f64) -> f64) -> Result<f64> {
    eikonal_attenuation_tol(tip, im_k, 1e-8)
}

pub fn eikonal_attenuation_tol(tip: &TipGeometry, im_k: &dyn Fn(f64) -> f64, rel_tol: f64) -> Result<f64> {
    let j = propagation_integral(tip.k0r_final, im_k, rel_tol)?;
    Ok((-2.0 * j / tip.k0v).exp())
}

/// `J(R) = int_0^R 2 rho Im k_par(rho) d rho`, so that the attenuation is
/// `exp(-2 J / v)`.
pub fn propagation_integral(k0r: f64, im_k: &dyn Fn(f64) -> f64, rel_tol: f64) -> Result<f64> {
    if k0r == 0.0 {
        return Ok(0.0);
    }
    let q = integrate(
        |rho: f64| 2.0 * rho * im_k(rho),
        0.0,
        k0r,
        &[],
        QuadOptions { abs_tol: 1e-300, rel_tol, max_intervals: 4000 },
    )?;
    if q.value < 0.0 {
        return Err(Error::InvalidParameter(format!("dispersion has negative loss (J = {})", q.value)));
    }
    Ok(q.value)
}

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct TipErrorPoint {
    pub k0r_final: f64,
    pub pe: f64,
    pub k0d: f64,
    pub k0v: f64,
    pub attenuation: f64,
    pub rates: DecayRates,
    /// false when no restart met the simplex tolerance; the best point found
    /// is still reported
    pub converged: bool,
}

#[derive(Debug, Clone, Copy)]
pub struct TipSearch {
    /// seeds per axis of the log grid in (d, v)
    pub seed_grid: usize,
    /// Nelder-Mead runs, started from the best seeds
    pub restarts: usize,
    pub nm: NelderMeadOptions,
}

impl Default for TipSearch {
    fn default() -> Self {
        Self {
            seed_grid: 4,
            restarts: 8,
            nm: NelderMeadOptions { max_iter: 4000, f_tol: 1e-12, x_tol: 1e-8 },
        }
    }
}

/// Minimizes `1 - attenuation * pl / (rad + nonrad + pl)` jointly over the
/// emitter distance and the tip curvature.
pub fn tip_error_probability(
    k0r_final: f64,
    eps1: C,
    eps2: C,
    cpl: &TipCouplingConstant,
    dispersion: &WireDispersion,
    search: &TipSearch,
) -> Result<TipErrorPoint> {
    if !(k0r_final > 0.0) {
        return Err(Error::InvalidParameter(format!("final radius must be positive, got {k0r_final}")));
    }
    if k0r_final > dispersion.rho_max() {
        return Err(Error::InvalidParameter(format!(
            "final radius {k0r_final} beyond the tabulated dispersion (max {})",
            dispersion.rho_max()
        )));
    }
    let j = propagation_integral(k0r_final, &|r| dispersion.im_k(r), 1e-10)?;
    let c = quasistatic_constant(eps1, eps2)?;
    let fimg = image_factor(eps1, eps2)?;
    let objective = |x: &[f64]| -> f64 {
        let (ld, lv) = (x[0].clamp(-30.0, 10.0), x[1].clamp(-30.0, 10.0));
        let (d, v) = (ld.exp(), lv.exp());
        let rad = (C::new(1.0, 0.0) + (eps2 / eps1 - 1.0) / (1.0 + 4.0 * d / v)).norm_sqr();
        let nonrad = 3.0 * fimg.im / (8.0 * eps1.re.powf(1.5) * d.powi(3));
        let pl = match plasmon_shape(d / v, c) {
            Ok(s) => cpl.alpha_pl_tip * s / v.powi(3),
            Err(_) => return 1.0,
        };
        let val = 1.0 - (-2.0 * j / v).exp() * pl / (rad + nonrad + pl);
        if val.is_finite() {
            val
        } else {
            1.0
        }
    };
    let n = search.seed_grid.max(1);
    let axis = |i: usize| {
        if n == 1 {
            (1e-2f64).ln()
        } else {
            (1e-4f64).ln() + (1e4f64).ln() * i as f64 / (n - 1) as f64
        }
    };
    let mut seeds: Vec<(f64, [f64; 2])> = Vec::with_capacity(n * n);
    for i in 0..n {
        for k in 0..n {
            let x = [axis(i), axis(k)];
            seeds.push((objective(&x), x));
        }
    }
    seeds.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut best: Option<(f64, Vec<f64>, bool)> = None;
    for (_, x0) in seeds.iter().take(search.restarts.max(1)) {
        let r = nelder_mead(objective, x0, &[1.0, 1.0], search.nm);
        if best.as_ref().is_none_or(|b| r.value < b.0) {
            best = Some((r.value, r.x, r.converged));
        }
    }
    let (pe, x, converged) = best.expect("at least one restart");
    let (k0d, k0v) = (x[0].exp(), x[1].exp());
    let rates = tip_rates(k0d, k0v, eps1, eps2, cpl)?;
    Ok(TipErrorPoint {
        k0r_final,
        pe,
        k0d,
        k0v,
        attenuation: (-2.0 * j / k0v).exp(),
        rates,
        converged,
    })
}

/// Error without propagation loss at fixed curvature, minimized over the
/// emitter distance in `[1e-4 v, 1e2 v]`.
pub fn tip_pre_propagation_error(k0v: f64, eps1: C, eps2: C, cpl: &TipCouplingConstant) -> Result<(f64, f64)> {
    let err = |ln_d: f64| {
        tip_rates(ln_d.exp(), k0v, eps1, eps2, cpl).map(|r| r.error()).unwrap_or(1.0)
    };
    let g = golden_section_min(err, (1e-4 * k0v).ln(), (1e2 * k0v).ln(), 0.0, 1e-8);
    Ok((g.value, g.x.exp()))
}
