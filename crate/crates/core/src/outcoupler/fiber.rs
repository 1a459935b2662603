//! Fundamental HE11 mode of a step-index circular fiber.

use num_complex::Complex64 as C;

use crate::error::{Error, Result};
use crate::numerics::quadrature::{integrate, integrate_to_infinity, QuadOptions};
use crate::numerics::roots::brent;
use crate::specfun::{bessel_j_prime_real, bessel_j_real, bessel_k_prime_real, bessel_k_real};

/// First zero of `J_1`; the HE11 core parameter stays below it.
const J1_FIRST_ZERO: f64 = 3.831_705_970_207_512;
/// First zero of `J_0`, the single-mode limit of the normalized frequency.
pub const SINGLE_MODE_V: f64 = 2.404_825_557_695_773;

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct FiberGeometry {
    pub k0a: f64,
    pub eps_core: f64,
    pub eps_clad: f64,
}

impl FiberGeometry {
    pub fn new(k0a: f64, eps_core: f64, eps_clad: f64) -> Result<Self> {
        if !(k0a > 0.0) || !(eps_core > eps_clad) || !(eps_clad > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "fiber needs k0a > 0 and eps_core > eps_clad > 0, got {k0a}, {eps_core}, {eps_clad}"
            )));
        }
        Ok(Self { k0a, eps_core, eps_clad })
    }

    pub fn with_radius(self, k0a: f64) -> Self {
        Self { k0a, ..self }
    }

    /// Normalized frequency `V = k0 a sqrt(eps_core - eps_clad)`.
    pub fn v_number(&self) -> f64 {
        self.k0a * (self.eps_core - self.eps_clad).sqrt()
    }

    pub fn is_single_mode(&self) -> bool {
        self.v_number() < SINGLE_MODE_V
    }
}

impl Default for FiberGeometry {
    fn default() -> Self {
        Self { k0a: 1.0, eps_core: 13.0, eps_clad: 2.0 }
    }
}

/// HE11 mode with `Ez = J1(u r) cos(phi)` in the core (`u`, `w` are the
/// transverse constants in `k0` units) and `hz = b_coeff F(r) sin(phi)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FiberMode {
    pub fiber: FiberGeometry,
    pub k_par: f64,
    pub u: f64,
    pub w: f64,
    pub b_coeff: f64,
    pub residual: f64,
}

/// Characteristic function `(Jr + Kr)(eps_c Jr + eps_cl Kr) - b^2 (1/U^2 + 1/W^2)^2`
/// in terms of `W = a w` (with `U^2 + W^2 = V^2`), multiplied by `W^2` and
/// expanded so that the `1/W^4` terms, which cancel exactly, never appear.
/// Returns the value and a magnitude scale for relative checks.
fn characteristic(fiber: &FiberGeometry, big_w: f64) -> Result<(f64, f64)> {
    let v = fiber.v_number();
    let big_u = (v * v - big_w * big_w).sqrt();
    let (ec, ecl, a) = (fiber.eps_core, fiber.eps_clad, fiber.k0a);
    let jr = bessel_j_prime_real(1, big_u)? / (big_u * bessel_j_real(1, big_u)?);
    // Kr = -1/W^2 + kt
    let kt = -bessel_k_real(0, big_w)? / (big_w * bessel_k_real(1, big_w)?);
    let u2 = big_u * big_u;
    let w2 = big_w * big_w;
    let t0 = [ecl * (jr + 2.0 * kt), ec * jr, 1.0 / (a * a), 2.0 * ecl / u2];
    let t1 = [(jr + kt) * (ec * jr + ecl * kt), -ecl / (u2 * u2), -2.0 / (a * a * u2)];
    let t2 = -w2 * w2 / (a * a * u2 * u2);
    let value = -t0.iter().sum::<f64>() + w2 * t1.iter().sum::<f64>() + t2;
    let scale = t0.iter().map(|x| x.abs()).sum::<f64>() + w2 * t1.iter().map(|x| x.abs()).sum::<f64>() + t2.abs();
    Ok((value, scale))
}

/// Solves the exact hybrid characteristic equation for HE11, the root with
/// the largest `k_par`. Bracketing is done in `ln W` so that very thin
/// fibers, whose `k_par` approaches `sqrt(eps_clad)` exponentially, resolve.
pub fn solve_fiber_he11(fiber: &FiberGeometry) -> Result<FiberMode> {
    FiberGeometry::new(fiber.k0a, fiber.eps_core, fiber.eps_clad)?;
    let v = fiber.v_number();
    let w_hi = v * (1.0 - 1e-12);
    let w_lo_core = if v > J1_FIRST_ZERO { (v * v - J1_FIRST_ZERO * J1_FIRST_ZERO).sqrt() * (1.0 + 1e-12) } else { 0.0 };
    let w_lo = w_lo_core.max(1e-280);
    let f = |t: f64| characteristic(fiber, t.exp()).map(|x| x.0).unwrap_or(f64::NAN);
    // dense near the top (ordinary fibers), sparse over the decades below
    // (thin fibers, where W is exponentially small)
    let (t_lo, t_hi) = (w_lo.ln(), w_hi.ln());
    let t_mid = (t_hi - 8.0).max(t_lo);
    let mut nodes: Vec<f64> = (0..=600).map(|i| t_hi + (t_mid - t_hi) * i as f64 / 600.0).collect();
    if t_mid > t_lo {
        nodes.extend((1..=300).map(|i| t_mid + (t_lo - t_mid) * i as f64 / 300.0));
    }
    let mut bracket = None;
    let mut prev = f(nodes[0]);
    for w in nodes.windows(2) {
        let cur = f(w[1]);
        if prev.is_finite() && cur.is_finite() && prev.signum() != cur.signum() {
            bracket = Some((w[1], w[0]));
            break;
        }
        prev = cur;
    }
    let (a, b) = bracket.ok_or_else(|| Error::NoRoot(format!("HE11 bracket not found for {fiber:?}")))?;
    let t = brent(f, a, b, 1e-15)?;
    let big_w = t.exp();
    let (val, scale) = characteristic(fiber, big_w)?;
    let residual = val.abs() / scale;
    if !(residual < 1e-10) {
        return Err(Error::NonConvergence { what: "HE11 characteristic equation", iterations: 0, residual });
    }
    let w = big_w / fiber.k0a;
    let u = (v * v - big_w * big_w).sqrt() / fiber.k0a;
    let k_par = (fiber.eps_clad + w * w).sqrt();
    let mut mode = FiberMode { fiber: *fiber, k_par, u, w, b_coeff: 0.0, residual };
    mode.b_coeff = mode.match_hz();
    Ok(mode)
}

/// Radial profile `F`, `F'` and the local `gamma^2 = eps - k_par^2`.
struct Profile {
    f: f64,
    fp: f64,
    g2: f64,
    eps: f64,
}

/// Transverse field components at `(r, phi)`: `(E_r, E_phi, E_z, h_r, h_phi, h_z)`
#[derive(Debug, Clone, Copy)]
pub struct CylFields {
    pub e_r: C,
    pub e_phi: C,
    pub e_z: C,
    pub h_r: C,
    pub h_phi: C,
}

impl FiberMode {
    fn profile(&self, r: f64) -> Result<Profile> {
        let a = self.fiber.k0a;
        if r <= a {
            Ok(Profile {
                f: bessel_j_real(1, self.u * r)?,
                fp: self.u * bessel_j_prime_real(1, self.u * r)?,
                g2: self.u * self.u,
                eps: self.fiber.eps_core,
            })
        } else {
            let x = self.w * r;
            let norm = bessel_j_real(1, self.u * a)? / bessel_k_real(1, self.w * a)?;
            let (k, kp) = if x > 600.0 { (0.0, 0.0) } else { (bessel_k_real(1, x)?, bessel_k_prime_real(1, x)?) };
            Ok(Profile { f: norm * k, fp: norm * self.w * kp, g2: -self.w * self.w, eps: self.fiber.eps_clad })
        }
    }

    /// `B` from continuity of `E_phi` at the core boundary (with `A = 1`).
    fn match_hz(&self) -> f64 {
        let a = self.fiber.k0a;
        let core = self.profile(a * (1.0 - 1e-15)).ok();
        let clad = self.profile(a * (1.0 + 1e-15)).ok();
        match (core, clad) {
            (Some(c), Some(o)) => {
                let b = self.k_par;
                // (1/g2)(-b F/a - B F') equal on both sides
                b * c.f / a * (1.0 / c.g2 - 1.0 / o.g2) / (-c.fp / c.g2 + o.fp / o.g2)
            }
            _ => f64::NAN,
        }
    }

    /// Field components at `(r, phi)` for the unnormalized mode.
    pub fn fields(&self, r: f64, phi: f64) -> Result<CylFields> {
        let p = self.profile(r)?;
        let (c, s) = (phi.cos(), phi.sin());
        let b = self.k_par;
        let bb = self.b_coeff;
        let i = C::new(0.0, 1.0 / p.g2);
        let r = r.max(1e-300);
        Ok(CylFields {
            e_r: i * (b * p.fp + bb * p.f / r) * c,
            e_phi: i * (-b * p.f / r - bb * p.fp) * s,
            e_z: C::new(p.f * c, 0.0),
            h_r: i * (b * bb * p.fp + p.eps * p.f / r) * s,
            h_phi: i * (b * bb * p.f / r + p.eps * p.fp) * c,
        })
    }

    /// Cartesian `(E_x, E_y, E_z)` at `(r, phi)` about the fiber axis.
    pub fn e_cartesian(&self, r: f64, phi: f64) -> Result<[C; 3]> {
        let f = self.fields(r, phi)?;
        let (c, s) = (phi.cos(), phi.sin());
        Ok([f.e_r * c - f.e_phi * s, f.e_r * s + f.e_phi * c, f.e_z])
    }

    /// Guided power `(1/2) Re int E x h* . z dA` of the unnormalized fields.
    /// Fails for fibers so thin that the cladding field overflows.
    pub fn power(&self) -> Result<f64> {
        // azimuthal averages of cos^2 and sin^2 are both pi
        let density = |r: f64| -> f64 {
            match (self.fields(r, 0.0), self.fields(r, std::f64::consts::FRAC_PI_2)) {
                (Ok(a), Ok(b)) => r * ((a.e_r * a.h_phi.conj()).re - (b.e_phi * b.h_r.conj()).re),
                _ => f64::NAN,
            }
        };
        let a = self.fiber.k0a;
        let opts = QuadOptions::rel(1e-11);
        let core = integrate(density, 0.0, a, &[], opts)?.value;
        // cladding in x = w r; thin fibers have W = w a far below 1 and a
        // field extending over many decades, handled in ln x
        let w = self.w;
        let big_w = w * a;
        let tail_start = big_w.max(1.0);
        let mut clad = integrate_to_infinity(|x: f64| density(x / w) / w, tail_start, opts)?.value;
        if big_w < 1.0 {
            clad += integrate(|t: f64| density(t.exp() / w) * t.exp() / w, big_w.ln(), 0.0, &[], opts)?.value;
        }
        Ok(0.5 * std::f64::consts::PI * (core + clad))
    }

    /// Residual of `h_phi` continuity at the core boundary, relative to its size.
    pub fn boundary_mismatch(&self) -> Result<f64> {
        let a = self.fiber.k0a;
        let inner = self.fields(a * (1.0 - 1e-13), 0.0)?.h_phi;
        let outer = self.fields(a * (1.0 + 1e-13), 0.0)?.h_phi;
        Ok((inner - outer).norm() / inner.norm())
    }
}

/// Core radius at which the HE11 `k_par` equals `target`.
pub fn radius_for_index(template: &FiberGeometry, target: f64) -> Result<f64> {
    let (lo, hi) = (template.eps_clad.sqrt(), template.eps_core.sqrt());
    if !(target > lo && target < hi) {
        return Err(Error::InvalidParameter(format!("index {target} outside ({lo}, {hi})")));
    }
    let beta = |a: f64| solve_fiber_he11(&template.with_radius(a)).map(|m| m.k_par - target).unwrap_or(f64::NAN);
    let mut a_lo = 0.05;
    while beta(a_lo) > 0.0 && a_lo > 1e-6 {
        a_lo *= 0.5;
    }
    let mut a_hi = 1.0;
    while beta(a_hi) < 0.0 && a_hi < 1e4 {
        a_hi *= 2.0;
    }
    brent(beta, a_lo, a_hi, 1e-13)
}
