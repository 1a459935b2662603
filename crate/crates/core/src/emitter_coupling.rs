//! Quasi-static decay channels of a radially oriented dipole next to a metal
//! nanowire: radiative, non-radiative (ohmic) and guided-plasmon rates, all
//! normalized to the rate in the unbounded host.

use std::collections::HashMap;
use std::sync::{OnceLock, RwLock};

use num_complex::Complex64 as C;

use crate::error::{Error, Result};
use crate::numerics::optimize::golden_section_min;
use crate::numerics::quadrature::circle_mean;
use crate::numerics::roots::{secant, SecantOptions};
use crate::specfun::{bessel_i_seq_scaled, bessel_k, bessel_k_seq_scaled, log_derivatives};
use crate::wire_modes::{quasistatic_constant, transverse, ModeSolution, WireGeometry};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Orientation {
    /// along the radius vector of the wire
    Radial,
    /// along the wire or tip axis
    Axial,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DipoleEmitter {
    /// distance from the metal surface, in units of `1/k0`
    pub k0d: f64,
    pub orientation: Orientation,
}

impl DipoleEmitter {
    pub fn radial(k0d: f64) -> Result<Self> {
        if !(k0d > 0.0) || !k0d.is_finite() {
            return Err(Error::InvalidParameter(format!("emitter distance must be positive, got {k0d}")));
        }
        Ok(Self { k0d, orientation: Orientation::Radial })
    }
}

/// Channel rates in units of the homogeneous-host rate.
#[derive(Debug, Clone, Copy, PartialEq, Default, serde::Serialize)]
pub struct DecayRates {
    pub rad: f64,
    pub nonrad: f64,
    pub pl: f64,
}

impl DecayRates {
    pub fn total(&self) -> f64 {
        self.rad + self.nonrad + self.pl
    }

    /// Fraction of emission into the guided plasmon.
    pub fn branching(&self) -> f64 {
        let t = self.total();
        if t > 0.0 {
            self.pl / t
        } else {
            0.0
        }
    }

    /// Probability of emitting into anything but the plasmon.
    pub fn error(&self) -> f64 {
        let t = self.total();
        if t > 0.0 {
            (self.rad + self.nonrad) / t
        } else {
            1.0
        }
    }

    /// `pl / (rad + nonrad)`
    pub fn purcell(&self) -> f64 {
        self.pl / (self.rad + self.nonrad)
    }
}

/// Pole data of the `m = 0` reflection coefficient, in the variable `x = hR`
/// where it depends on the media only.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlasmonCouplingConstant {
    pub alpha_pl: f64,
    /// residue of `alpha_0` in `x`
    pub residue: C,
    /// pole position `x_p = h_p R`
    pub pole: C,
    pub eps1: C,
    pub eps2: C,
}

impl PlasmonCouplingConstant {
    /// Mode whose exterior constant is the pole of `alpha_0`,
    /// `kappa1 = x_p / R`; this is the mode the plasmon rate formula is
    /// derived for.
    pub fn quasistatic_mode(&self, geom: &WireGeometry) -> ModeSolution {
        let kappa1 = self.pole / geom.k0r;
        let k_par = (kappa1 * kappa1 + geom.eps1).sqrt();
        ModeSolution {
            m: 0,
            k_par,
            kappa1,
            kappa2: transverse(k_par, geom.eps2),
            residual: 0.0,
            iterations: 0,
        }
    }
}

fn validate_media(geom: &WireGeometry) -> Result<()> {
    if (geom.eps1 + geom.eps2).norm() <= 1e-12 * geom.eps2.norm() {
        return Err(Error::Resonance);
    }
    Ok(())
}

/// `(eps2 - eps1)/(eps2 + eps1)`
pub fn image_factor(eps1: C, eps2: C) -> Result<C> {
    let s = eps1 + eps2;
    if s.norm() <= 1e-12 * eps2.norm().max(eps1.norm()) {
        return Err(Error::Resonance);
    }
    Ok((eps2 - eps1) / s)
}

/// Reflection coefficient in `x = hR` for complex `x` (analytic
/// continuation), multiplied by `exp(-2 Re x)` when `scaled`.
fn alpha_x(m: u32, x: C, eps1: C, eps2: C, scaled: bool) -> Result<C> {
    let (qi, qk) = log_derivatives(m, x)?;
    let i = bessel_i_seq_scaled(m, x)[m as usize];
    let k = bessel_k_seq_scaled(m, x)?[m as usize];
    // I/K from scaled values: I = i e^{|Re x|}, K = k e^{-Re x}
    let shift = x.re.abs() + x.re;
    let limit = crate::specfun::overflow_threshold::<f64>();
    let ratio = if scaled {
        i / k * (shift - 2.0 * x.re).exp()
    } else if shift > limit {
        return Err(Error::Overflow { re_abs: shift, limit });
    } else {
        i / k * shift.exp()
    };
    Ok((eps2 - eps1) * qi / (eps1 * (eps1 * qk - eps2 * qi)) * ratio)
}

/// Reflection coefficient of the `m`-th cylindrical harmonic at axial
/// wavenumber `h`. The reflected exterior potential of a unit source at
/// `rho'` is `alpha_m K_m(h rho') K_m(h rho)` per harmonic.
pub fn alpha_m(m: u32, h: f64, geom: &WireGeometry) -> Result<C> {
    if !(h > 0.0) {
        return Err(Error::InvalidParameter(format!("axial wavenumber must be positive, got {h}")));
    }
    alpha_x(m, C::new(h * geom.k0r, 0.0), geom.eps1, geom.eps2, false)
}

/// `alpha_m(h) * exp(-2 h R)`, finite for arbitrarily thick wires.
pub fn alpha_m_scaled(m: u32, h: f64, geom: &WireGeometry) -> Result<C> {
    if !(h > 0.0) {
        return Err(Error::InvalidParameter(format!("axial wavenumber must be positive, got {h}")));
    }
    alpha_x(m, C::new(h * geom.k0r, 0.0), geom.eps1, geom.eps2, true)
}

/// `alpha_0` at complex axial wavenumber, for contour work.
pub fn alpha0_complex(h: C, geom: &WireGeometry) -> Result<C> {
    alpha_x(0, h * geom.k0r, geom.eps1, geom.eps2, false)
}

/// Denominator of `alpha_0` divided by `I_0 K_0`.
fn pole_condition(x: C, eps1: C, eps2: C) -> Result<C> {
    let (qi, qk) = log_derivatives(0, x)?;
    Ok(eps1 * qk - eps2 * qi)
}

/// Locates the pole of `alpha_0(h)` near `Re C / R`, extracts its residue with
/// two circular contours (which must agree to 1e-8) and builds the plasmon
/// rate prefactor `alpha_pl = -(3/sqrt(eps1)) Re(res_x x_p^2)`.
pub fn extract_plasmon_residue(geom: &WireGeometry) -> Result<PlasmonCouplingConstant> {
    validate_media(geom)?;
    let r = geom.k0r;
    let c = quasistatic_constant(geom.eps1, geom.eps2)?;
    let seed = c / r;
    let pole_h = secant(
        |h| pole_condition(h * r, geom.eps1, geom.eps2).map(|v| v * r),
        seed,
        seed * (1.0 + 1e-3),
        SecantOptions { residual_tol: 1e-12, ..SecantOptions::default() },
    )
    .map_err(|e| Error::NoRoot(format!("pole of alpha_0 not found from seed {seed}: {e}")))?
    .root;
    let f = |h: C| alpha0_complex(h, geom).unwrap_or(C::new(f64::NAN, f64::NAN));
    let mut radius = 0.1 * pole_h.norm();
    let mut last = None;
    for _ in 0..6 {
        let a = circle_mean(f, pole_h, radius, 128);
        let b = circle_mean(f, pole_h, 0.5 * radius, 128);
        if (a - b).norm() <= 1e-8 * b.norm() && a.norm().is_finite() {
            let res_h = b;
            let x_p = pole_h * r;
            let res_x = res_h * r;
            let alpha_pl = -(3.0 / geom.eps1.re.sqrt()) * (res_x * x_p * x_p).re;
            if !(alpha_pl > 0.0) {
                return Err(Error::NoRoot(format!("pole at x = {x_p} has non-positive weight {alpha_pl}")));
            }
            return Ok(PlasmonCouplingConstant { alpha_pl, residue: res_x, pole: x_p, eps1: geom.eps1, eps2: geom.eps2 });
        }
        last = Some((a.norm(), b.norm()));
        radius *= 0.5;
    }
    let (first, second) = last.unwrap_or((f64::NAN, f64::NAN));
    Err(Error::ContourMismatch { first, second })
}

type MediaKey = [u64; 4];

fn media_key(eps1: C, eps2: C) -> MediaKey {
    [eps1.re.to_bits(), eps1.im.to_bits(), eps2.re.to_bits(), eps2.im.to_bits()]
}

fn memo() -> &'static RwLock<HashMap<MediaKey, PlasmonCouplingConstant>> {
    static MEMO: OnceLock<RwLock<HashMap<MediaKey, PlasmonCouplingConstant>>> = OnceLock::new();
    MEMO.get_or_init(|| RwLock::new(HashMap::new()))
}

/// Memoized [`extract_plasmon_residue`]; the constant depends on the media
/// only, so one extraction (at `k0R = 0.01`) serves every radius.
pub fn plasmon_coupling(eps1: C, eps2: C) -> Result<PlasmonCouplingConstant> {
    let key = media_key(eps1, eps2);
    if let Some(c) = memo().read().ok().and_then(|m| m.get(&key).copied()) {
        return Ok(c);
    }
    let c = extract_plasmon_residue(&WireGeometry { k0r: 0.01, eps1, eps2 })?;
    if let Ok(mut m) = memo().write() {
        m.insert(key, c);
    }
    Ok(c)
}

/// Radiative rate from the dipole induced in the wire:
/// `|1 + (eps2-eps1)/(eps2+eps1) R^2/(R+d)^2|^2`.
pub fn wire_rate_rad(em: &DipoleEmitter, geom: &WireGeometry) -> Result<f64> {
    let f = image_factor(geom.eps1, geom.eps2)?;
    let s = geom.k0r / (geom.k0r + em.k0d);
    Ok((C::new(1.0, 0.0) + f * s * s).norm_sqr())
}

/// Ohmic loss to the metal in the near-field limit,
/// `3 Im[(eps2-eps1)/(eps2+eps1)] / (8 eps1^{3/2} d^3)`.
pub fn wire_rate_nonrad(em: &DipoleEmitter, geom: &WireGeometry) -> Result<f64> {
    let f = image_factor(geom.eps1, geom.eps2)?;
    Ok(3.0 * f.im / (8.0 * geom.eps1.re.powf(1.5) * em.k0d.powi(3)))
}

/// Emission into the fundamental plasmon,
/// `alpha_pl |K1(kappa1 (R+d))|^2 / R^3`.
pub fn wire_rate_plasmon(
    em: &DipoleEmitter,
    geom: &WireGeometry,
    cpl: &PlasmonCouplingConstant,
    mode: &ModeSolution,
) -> Result<f64> {
    let z = mode.kappa1 * (geom.k0r + em.k0d);
    let k1 = if z.re > 600.0 { C::new(0.0, 0.0) } else { bessel_k(1, z)? };
    Ok(cpl.alpha_pl * k1.norm_sqr() / geom.k0r.powi(3))
}

/// All three channels with the memoized coupling constant and the
/// quasi-static mode.
pub fn wire_rates(em: &DipoleEmitter, geom: &WireGeometry) -> Result<DecayRates> {
    let cpl = plasmon_coupling(geom.eps1, geom.eps2)?;
    let mode = cpl.quasistatic_mode(geom);
    Ok(DecayRates {
        rad: wire_rate_rad(em, geom)?,
        nonrad: wire_rate_nonrad(em, geom)?,
        pl: wire_rate_plasmon(em, geom, &cpl, &mode)?,
    })
}

/// Search bracket for the emitter distance, `[min(1e-4, R/100), 10 R]`.
pub fn distance_bracket(geom: &WireGeometry) -> (f64, f64) {
    ((1e-4f64).min(0.01 * geom.k0r), 10.0 * geom.k0r)
}

/// Distance maximizing the plasmon branching ratio, by golden-section search
/// in `ln d` to relative tolerance 1e-6.
pub fn optimal_distance(geom: &WireGeometry) -> Result<(f64, DecayRates)> {
    validate_media(geom)?;
    let (lo, hi) = distance_bracket(geom);
    let beta = |ln_d: f64| -> f64 {
        DipoleEmitter::radial(ln_d.exp())
            .and_then(|em| wire_rates(&em, geom))
            .map(|r| r.branching())
            .unwrap_or(f64::NAN)
    };
    let samples: Vec<f64> = (0..=16).map(|i| beta(lo.ln() + (hi / lo).ln() * i as f64 / 16.0)).collect();
    if let Some(bad) = samples.iter().find(|v| !v.is_finite()) {
        return Err(Error::InvalidParameter(format!("branching ratio not finite ({bad}) inside the bracket")));
    }
    let spread = samples.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
        - samples.iter().cloned().fold(f64::INFINITY, f64::min);
    if spread < 1e-12 {
        return Err(Error::FlatObjective { variation: spread });
    }
    let g = golden_section_min(|t| -beta(t), lo.ln(), hi.ln(), 0.0, 1e-6);
    let d = g.x.exp();
    let rates = wire_rates(&DipoleEmitter::radial(d)?, geom)?;
    Ok((d, rates))
}

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct WireErrorPoint {
    pub k0r: f64,
    pub k0d_opt: f64,
    /// `1 - branching` at the optimal distance
    pub error: f64,
    pub rates: DecayRates,
}

pub fn wire_error_curve(geoms: &[WireGeometry]) -> Result<Vec<WireErrorPoint>> {
    if geoms.is_empty() {
        return Err(Error::InvalidParameter("empty radius list".into()));
    }
    geoms
        .iter()
        .map(|g| {
            optimal_distance(g).map(|(d, rates)| WireErrorPoint {
                k0r: g.k0r,
                k0d_opt: d,
                error: rates.error(),
                rates,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn silver(r: f64) -> WireGeometry {
        WireGeometry::silver(r)
    }

    #[test]
    fn equal_media_do_not_reflect() {
        let g = WireGeometry { k0r: 0.1, eps1: C::new(2.0, 0.0), eps2: C::new(2.0, 0.0) };
        for m in 0..4 {
            for h in [0.1, 3.0, 40.0] {
                assert_eq!(alpha_m(m, h, &g).unwrap().norm(), 0.0);
            }
        }
    }

    #[test]
    fn scaled_alpha_matches_unscaled() {
        let g = silver(0.1);
        for h in [0.5, 5.0, 50.0] {
            let a = alpha_m(2, h, &g).unwrap();
            let s = alpha_m_scaled(2, h, &g).unwrap() * (2.0 * h * g.k0r).exp();
            assert!((a - s).norm() < 1e-13 * a.norm());
        }
    }

    #[test]
    fn dipole_limit_of_first_harmonic() {
        // alpha_1 -> -(x^2 / 2 eps1) (eps2 - eps1)/(eps2 + eps1) as x -> 0
        let g = silver(0.1);
        let h = 1e-4;
        let x = h * g.k0r;
        let a = alpha_m(1, h, &g).unwrap() / (x * x);
        let lim = -image_factor(g.eps1, g.eps2).unwrap() / (2.0 * g.eps1);
        assert!((a - lim).norm() < 1e-6 * lim.norm());
    }

    #[test]
    fn pole_position_pinned() {
        let c = extract_plasmon_residue(&silver(0.01)).unwrap();
        assert!((c.pole.re - 0.212_394_144_404_212).abs() < 1e-9);
    }

    #[test]
    fn pole_within_two_percent_of_quasistatic_constant() {
        // the leading-log constant sits 4.6% from the pole at |eps2/eps1| = 25
        let g = silver(0.01);
        let c = extract_plasmon_residue(&g).unwrap();
        let qs = quasistatic_constant(g.eps1, g.eps2).unwrap();
        let gap = (c.pole - qs).norm() / qs.norm();
        assert!(gap < 0.02, "pole {} vs quasi-static {qs}: {gap:.4}", c.pole);
    }

    #[test]
    fn residue_is_material_only_and_real_when_lossless() {
        let a = extract_plasmon_residue(&silver(0.01)).unwrap();
        let b = extract_plasmon_residue(&silver(0.02)).unwrap();
        assert!((a.alpha_pl - b.alpha_pl).abs() < 1e-6 * a.alpha_pl);
        let lossless = WireGeometry { eps2: C::new(-50.0, 0.0), ..silver(0.05) };
        let c = extract_plasmon_residue(&lossless).unwrap();
        assert!(c.residue.im.abs() < 1e-8 * c.residue.norm());
    }

    #[test]
    fn resonance_is_rejected() {
        let g = WireGeometry { eps2: C::new(-2.0, 0.0), ..silver(0.1) };
        let em = DipoleEmitter::radial(0.1).unwrap();
        assert!(matches!(wire_rate_rad(&em, &g), Err(Error::Resonance)));
        assert!(matches!(wire_rate_nonrad(&em, &g), Err(Error::Resonance)));
    }

    #[test]
    fn radiative_rate_limits() {
        let g = silver(0.1);
        let far = DipoleEmitter::radial(1e9).unwrap();
        assert!((wire_rate_rad(&far, &g).unwrap() - 1.0).abs() < 1e-12);
        let at_r = DipoleEmitter::radial(0.1).unwrap();
        let expect = (C::new(1.0, 0.0) + C::new(-52.0, 0.6) / C::new(-48.0, 0.6) / 4.0).norm_sqr();
        assert!((wire_rate_rad(&at_r, &g).unwrap() - expect).abs() < 1e-14);
        assert!((expect - 1.61).abs() < 1e-2);
    }

    #[test]
    fn nonradiative_rate() {
        let g = silver(0.1);
        let r1 = wire_rate_nonrad(&DipoleEmitter::radial(0.1).unwrap(), &g).unwrap();
        let r2 = wire_rate_nonrad(&DipoleEmitter::radial(0.2).unwrap(), &g).unwrap();
        assert!((r1 / r2 - 8.0).abs() < 1e-12);
        assert!((r1 - 0.1379).abs() < 5e-4);
        let lossless = WireGeometry { eps2: C::new(-50.0, 0.0), ..g };
        assert_eq!(wire_rate_nonrad(&DipoleEmitter::radial(0.1).unwrap(), &lossless).unwrap(), 0.0);
    }

    #[test]
    fn optimum_is_local_maximum_and_several_radii_out() {
        for r in [0.005, 0.02, 0.05] {
            let g = silver(r);
            let (d, rates) = optimal_distance(&g).unwrap();
            for f in [0.95, 1.05] {
                let other = wire_rates(&DipoleEmitter::radial(d * f).unwrap(), &g).unwrap();
                assert!(rates.branching() >= other.branching());
            }
            assert!(d >= 0.5 * r && d <= 20.0 * r);
        }
    }
}
