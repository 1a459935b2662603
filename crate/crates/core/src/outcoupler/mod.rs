//! Out-coupling of the wire plasmon into a dielectric fiber and the
//! end-to-end single-photon efficiency.
//!
//! The fiber runs parallel to the wire with a surface-to-surface gap. The two
//! guided modes exchange power according to codirectional coupled-mode
//! equations with loss on the plasmon branch only.

pub mod fiber;

use num_complex::Complex64 as C;

use crate::emitter_coupling::{optimal_distance, DecayRates};
use crate::error::{Error, Result};
use crate::numerics::optimize::{golden_section_min, nelder_mead, NelderMeadOptions};
use crate::numerics::quadrature::{integrate, integrate_to_infinity, QuadOptions};
use crate::numerics::roots::brent;
use crate::specfun::{bessel_i, bessel_k};
use crate::tip_model::{tip_error_probability, TipCouplingConstant, TipSearch, WireDispersion};
use crate::wire_modes::{solve_fundamental, tm0_interior_ratio, ModeSolution, WireGeometry};
use fiber::{radius_for_index, solve_fiber_he11, FiberGeometry, FiberMode};

/// Exterior field of the TM0 plasmon with `Ez = K0(kappa1 rho)`.
#[derive(Debug, Clone, Copy)]
pub struct PlasmonField {
    pub mode: ModeSolution,
    pub geom: WireGeometry,
    /// field scale; the guided power goes as its square
    pub amplitude: f64,
    /// guided power `(1/2) Re int E x h* . z dA`
    pub power: f64,
}

impl PlasmonField {
    pub fn new(mode: &ModeSolution, geom: &WireGeometry) -> Result<Self> {
        let power = plasmon_power(mode, geom)?;
        Ok(Self { mode: *mode, geom: *geom, amplitude: 1.0, power })
    }

    pub fn with_amplitude(self, amplitude: f64) -> Self {
        let s = amplitude / self.amplitude;
        Self { amplitude, power: self.power * s * s, ..self }
    }

    /// Cartesian `(E_x, E_y, E_z)` at `(x, y)` measured from the wire axis,
    /// outside the metal.
    pub fn e_cartesian(&self, x: f64, y: f64) -> Result<[C; 3]> {
        let rho = x.hypot(y);
        let k1 = self.mode.kappa1;
        let z = k1 * rho;
        if z.re > 650.0 {
            return Ok([C::new(0.0, 0.0); 3]);
        }
        let e_rho = C::new(0.0, self.amplitude) * self.mode.k_par / k1 * bessel_k(1, z)?;
        Ok([e_rho * (x / rho), e_rho * (y / rho), bessel_k(0, z)? * self.amplitude])
    }
}

/// Power carried by the TM0 plasmon, including the backward flow inside the
/// metal.
pub fn plasmon_power(mode: &ModeSolution, geom: &WireGeometry) -> Result<f64> {
    let r = geom.k0r;
    let (k, k1, k2) = (mode.k_par, mode.kappa1, mode.kappa2);
    let c = tm0_interior_ratio(mode, geom)?;
    let outer = |x: f64| -> f64 {
        let rho = r * x;
        let z = k1 * rho;
        if z.re > 650.0 {
            return 0.0;
        }
        match bessel_k(1, z) {
            Ok(kv) => (k * geom.eps1.conj()).re * kv.norm_sqr() / k1.norm_sqr() * rho * r,
            Err(_) => f64::NAN,
        }
    };
    let inner = |rho: f64| -> f64 {
        match bessel_i(1, k2 * rho) {
            Ok(iv) => (k * geom.eps2.conj()).re * (c * iv).norm_sqr() / k2.norm_sqr() * rho,
            Err(_) => f64::NAN,
        }
    };
    let opts = QuadOptions::rel(1e-11);
    let p_out = integrate_to_infinity(outer, 1.0, opts)?.value;
    let p_in = integrate(inner, 0.0, r, &[], opts)?.value;
    let p = std::f64::consts::PI * (p_out + p_in);
    if !(p > 0.0) {
        return Err(Error::InvalidParameter(format!("plasmon carries non-positive power {p}")));
    }
    Ok(p)
}

/// Core radius whose HE11 index equals `Re k_par` of the plasmon, to 1e-8.
/// A plasmon slower than light in the core cannot be matched; the error then
/// carries the smallest wire radius that could be.
pub fn phase_match(mode: &ModeSolution, geom: &WireGeometry, template: &FiberGeometry) -> Result<f64> {
    let target = mode.k_par.re;
    let max_k = template.eps_core.sqrt();
    if target >= max_k {
        return Err(Error::Unmatchable {
            plasmon_k: target,
            max_k,
            bounding_k0r: matching_bound(geom, max_k),
        });
    }
    if target <= template.eps_clad.sqrt() {
        return Err(Error::InvalidParameter(format!(
            "plasmon index {target} at or below the cladding index {}",
            template.eps_clad.sqrt()
        )));
    }
    let a = radius_for_index(template, target)?;
    let fm = solve_fiber_he11(&template.with_radius(a))?;
    if (fm.k_par - target).abs() > 1e-8 {
        return Err(Error::NonConvergence { what: "phase match", iterations: 0, residual: (fm.k_par - target).abs() });
    }
    Ok(a)
}

/// Radius at which `Re k_par` of the fundamental mode drops to `max_k`.
fn matching_bound(geom: &WireGeometry, max_k: f64) -> f64 {
    let f = |ln_r: f64| {
        solve_fundamental(&geom.with_radius(ln_r.exp())).map(|m| m.k_par.re - max_k).unwrap_or(f64::NAN)
    };
    let lo = geom.k0r.ln();
    brent(f, lo, lo + (20.0f64).ln(), 1e-10).map(f64::exp).unwrap_or(f64::NAN)
}

/// Coupling constant per unit length,
/// `(eps_core - eps1)/4 * int_core E_pl^* . E_fib dA / sqrt(P_pl P_fib)`.
/// The fiber axis sits `R + gap + a` from the wire axis. The returned value is
/// complex; its modulus is the coupling rate.
pub fn coupling_constant(plasmon: &PlasmonField, fiber: &FiberMode, k0_gap: f64) -> Result<C> {
    coupling_overlap(plasmon, fiber, k0_gap, false)
}

/// As [`coupling_constant`] with the conjugate on the fiber field instead.
pub fn coupling_constant_swapped(plasmon: &PlasmonField, fiber: &FiberMode, k0_gap: f64) -> Result<C> {
    coupling_overlap(plasmon, fiber, k0_gap, true)
}

fn coupling_overlap(plasmon: &PlasmonField, fiber: &FiberMode, k0_gap: f64, swap: bool) -> Result<C> {
    if !(k0_gap >= 0.0) {
        return Err(Error::InvalidParameter(format!("gap must be non-negative, got {k0_gap}")));
    }
    let a = fiber.fiber.k0a;
    let sep = plasmon.geom.k0r + k0_gap + a;
    let pf = fiber.power()?;
    let mut failure = None;
    let mut ring = |r: f64| -> C {
        match ring_integral(plasmon, fiber, sep, r, swap) {
            Ok(v) => v * r,
            Err(e) => {
                failure.get_or_insert(e);
                C::new(f64::NAN, f64::NAN)
            }
        }
    };
    let q = integrate(&mut ring, 0.0, a, &[], QuadOptions::rel(1e-8));
    if let Some(e) = failure {
        return Err(e);
    }
    let overlap = q?.value;
    let d_eps = fiber.fiber.eps_core - plasmon.geom.eps1.re;
    Ok(overlap * (0.25 * d_eps / (pf * plasmon.power).sqrt()))
}

/// `int_0^{2 pi} E_pl^* . E_fib d phi` on the circle of radius `r` about the
/// fiber axis, by the trapezoid rule with doubling until it settles.
fn ring_integral(plasmon: &PlasmonField, fiber: &FiberMode, sep: f64, r: f64, swap: bool) -> Result<C> {
    let point = |phi: f64| -> Result<C> {
        let ef = fiber.e_cartesian(r, phi)?;
        let ep = plasmon.e_cartesian(sep + r * phi.cos(), r * phi.sin())?;
        Ok(if swap {
            ep[0] * ef[0].conj() + ep[1] * ef[1].conj() + ep[2] * ef[2].conj()
        } else {
            ep[0].conj() * ef[0] + ep[1].conj() * ef[1] + ep[2].conj() * ef[2]
        })
    };
    let tau = std::f64::consts::TAU;
    let mut n = 32;
    let mut sum = C::new(0.0, 0.0);
    for j in 0..n {
        sum += point(tau * j as f64 / n as f64)?;
    }
    let mut est = sum * (tau / n as f64);
    while n < 1 << 15 {
        let mut add = C::new(0.0, 0.0);
        for j in 0..n {
            add += point(tau * (2 * j + 1) as f64 / (2 * n) as f64)?;
        }
        sum += add;
        n *= 2;
        let next = sum * (tau / n as f64);
        let done = (next - est).norm() <= 1e-10 * next.norm().max(1e-300);
        est = next;
        if done {
            return Ok(est);
        }
    }
    Err(Error::Quadrature { estimate: est.norm() })
}

/// Mode amplitudes `(a, b)` at `z` for
/// `a' = -g a + i kappa b e^{i db z}`, `b' = i kappa a e^{-i db z}`,
/// `a(0) = 1`, `b(0) = 0`, with `g = loss_rate / 2`.
pub fn coupled_amplitudes(kappa: f64, delta_beta: f64, loss_rate: f64, z: f64) -> (C, C) {
    let g = 0.5 * loss_rate;
    let gp = C::new(g, delta_beta);
    let s = (gp * gp * 0.25 - kappa * kappa).sqrt();
    let sinc = sinh_over(s, z);
    let m = -C::new(g, -delta_beta) * 0.5;
    let grow = (m * z).exp();
    let a = grow * ((s * z).cosh() - gp * 0.5 * sinc);
    let b_rot = C::new(0.0, kappa) * grow * sinc;
    (a, b_rot * C::new(0.0, -delta_beta * z).exp())
}

/// `sinh(s z)/s`, continuous through `s = 0`.
fn sinh_over(s: C, z: f64) -> C {
    let sz = s * z;
    if sz.norm() < 1e-6 {
        C::new(z, 0.0) * (C::new(1.0, 0.0) + sz * sz / 6.0)
    } else {
        (sz).sinh() / s
    }
}

/// Power transferred into the fiber mode after length `k0l`,
/// `exp(-g L) |kappa sinh(s L)/s|^2` with `s^2 = (g + i db)^2/4 - kappa^2`.
pub fn transfer_efficiency(kappa: f64, delta_beta: f64, loss_rate: f64, k0l: f64) -> Result<f64> {
    if !(kappa >= 0.0) || !(loss_rate >= 0.0) || !(k0l >= 0.0) || !delta_beta.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "transfer needs kappa, loss and length >= 0, got {kappa}, {loss_rate}, {k0l}"
        )));
    }
    let g = 0.5 * loss_rate;
    let gp = C::new(g, delta_beta);
    let s = (gp * gp * 0.25 - kappa * kappa).sqrt();
    let t = (-g * k0l).exp() * (sinh_over(s, k0l) * kappa).norm_sqr();
    Ok(t.clamp(0.0, 1.0))
}

/// Interaction length maximizing the transfer and the transfer there. The
/// phase-matched case is closed form, `L = atan(2 W / g) / W` with
/// `W^2 = kappa^2 - g^2/4`; otherwise the first maximum is bracketed on a
/// grid and refined.
pub fn optimal_length(kappa: f64, delta_beta: f64, loss_rate: f64) -> Result<(f64, f64)> {
    if kappa == 0.0 {
        return Ok((0.0, 0.0));
    }
    let g = 0.5 * loss_rate;
    if delta_beta == 0.0 && kappa > 0.5 * g {
        let w = (kappa * kappa - 0.25 * g * g).sqrt();
        let l = (2.0 * w).atan2(g) / w;
        return Ok((l, transfer_efficiency(kappa, 0.0, loss_rate, l)?));
    }
    let gp = C::new(g, delta_beta);
    let s = (gp * gp * 0.25 - kappa * kappa).sqrt();
    let mut l_max = 2.0 * std::f64::consts::PI / s.norm().max(1e-12);
    if g > 0.0 {
        l_max = l_max.min(40.0 / g);
    }
    let n = 400;
    let t = |l: f64| transfer_efficiency(kappa, delta_beta, loss_rate, l).unwrap_or(0.0);
    let (mut best_i, mut best) = (0, 0.0);
    for i in 1..=n {
        let v = t(l_max * i as f64 / n as f64);
        if v > best {
            best = v;
            best_i = i;
        }
    }
    let lo = l_max * (best_i.max(1) - 1) as f64 / n as f64;
    let hi = l_max * (best_i + 1).min(n) as f64 / n as f64;
    let gs = golden_section_min(|l| -t(l), lo, hi, 1e-12, 0.0);
    Ok((gs.x, -gs.value))
}

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct CouplerDesign {
    pub fiber: FiberGeometry,
    pub fiber_k_par: f64,
    pub k0_gap: f64,
    pub k0l_ex: f64,
    /// `|kappa|`
    pub kappa: f64,
    /// fiber index minus plasmon `Re k_par`
    pub delta_beta: f64,
    pub transfer: f64,
    /// false when the chosen core admits more than HE11
    pub single_mode: bool,
}

#[derive(Debug, Clone, Copy)]
pub struct CouplerOptions {
    pub template: FiberGeometry,
    /// smallest surface-to-surface gap considered
    pub min_gap: f64,
    pub nm: NelderMeadOptions,
}

impl Default for CouplerOptions {
    fn default() -> Self {
        Self {
            template: FiberGeometry::default(),
            min_gap: 0.05,
            nm: NelderMeadOptions { max_iter: 200, f_tol: 1e-10, x_tol: 1e-6 },
        }
    }
}

/// Design for a given core radius and gap, with the interaction length
/// optimized.
pub fn evaluate_coupler(plasmon: &PlasmonField, k0a: f64, k0_gap: f64, template: &FiberGeometry) -> Result<CouplerDesign> {
    let geom = template.with_radius(k0a);
    let fm = solve_fiber_he11(&geom)?;
    let kappa = coupling_constant(plasmon, &fm, k0_gap)?.norm();
    let delta_beta = fm.k_par - plasmon.mode.k_par.re;
    let (l, t) = optimal_length(kappa, delta_beta, 2.0 * plasmon.mode.k_par.im)?;
    Ok(CouplerDesign {
        fiber: geom,
        fiber_k_par: fm.k_par,
        k0_gap,
        k0l_ex: l,
        kappa,
        delta_beta,
        transfer: t,
        single_mode: geom.is_single_mode(),
    })
}

/// Maximizes the transfer over core radius and gap (Nelder-Mead in
/// `ln a`, `ln gap`, seeded at the phase-matched radius), with the length
/// optimized for every candidate.
pub fn optimize_coupler(mode: &ModeSolution, geom: &WireGeometry, opts: &CouplerOptions) -> Result<CouplerDesign> {
    let a0 = phase_match(mode, geom, &opts.template)?;
    let plasmon = PlasmonField::new(mode, geom)?;
    let eval = |x: &[f64]| -> Option<CouplerDesign> {
        let gap = x[1].exp().max(opts.min_gap);
        evaluate_coupler(&plasmon, x[0].exp(), gap, &opts.template).ok()
    };
    let start = [a0.ln(), (2.0 * opts.min_gap).ln()];
    let nm = nelder_mead(|x| eval(x).map_or(1.0, |d| -d.transfer), &start, &[0.05, 0.5], opts.nm);
    let matched = evaluate_coupler(&plasmon, a0, opts.min_gap, &opts.template)?;
    match eval(&nm.x) {
        Some(d) if d.transfer > matched.transfer => Ok(d),
        _ => Ok(matched),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum FrontEnd {
    Wire,
    Tip,
}

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct EfficiencyPoint {
    pub front_end: FrontEnd,
    pub k0r: f64,
    /// probability that the emitter feeds a collectable plasmon
    pub branching: f64,
    pub transfer: f64,
    pub p: f64,
    pub k0d: f64,
    /// tip curvature (NaN for the wire)
    pub k0v: f64,
    pub rates: DecayRates,
    pub coupler: CouplerDesign,
}

/// Everything the efficiency pipeline needs besides the radius.
#[derive(Debug, Clone)]
pub struct EfficiencyContext {
    pub eps1: C,
    pub eps2: C,
    pub coupler: CouplerOptions,
    pub tip: TipCouplingConstant,
    pub tip_search: TipSearch,
    pub dispersion: std::sync::Arc<WireDispersion>,
    /// collect only one of the two counter-propagating plasmons
    pub single_sided: bool,
}

impl EfficiencyContext {
    fn geom(&self, k0r: f64) -> WireGeometry {
        WireGeometry { k0r, eps1: self.eps1, eps2: self.eps2 }
    }

    fn sided(&self, branching: f64) -> f64 {
        if self.single_sided {
            0.5 * branching
        } else {
            branching
        }
    }
}

/// `P = branching x transfer` for one front end at final radius `k0r`.
pub fn single_photon_efficiency(front_end: FrontEnd, k0r: f64, ctx: &EfficiencyContext) -> Result<EfficiencyPoint> {
    let geom = ctx.geom(k0r);
    let mode = solve_fundamental(&geom)?;
    let coupler = optimize_coupler(&mode, &geom, &ctx.coupler)?;
    front_end_point(front_end, k0r, ctx, coupler)
}

/// Wire and tip points at one radius sharing a single coupler optimization.
pub fn efficiency_pair(k0r: f64, ctx: &EfficiencyContext) -> Result<(EfficiencyPoint, EfficiencyPoint)> {
    let geom = ctx.geom(k0r);
    let mode = solve_fundamental(&geom)?;
    let coupler = optimize_coupler(&mode, &geom, &ctx.coupler)?;
    Ok((
        front_end_point(FrontEnd::Wire, k0r, ctx, coupler)?,
        front_end_point(FrontEnd::Tip, k0r, ctx, coupler)?,
    ))
}

fn front_end_point(front_end: FrontEnd, k0r: f64, ctx: &EfficiencyContext, coupler: CouplerDesign) -> Result<EfficiencyPoint> {
    let (branching, k0d, k0v, rates) = match front_end {
        FrontEnd::Wire => {
            let (d, rates) = optimal_distance(&ctx.geom(k0r))?;
            (rates.branching(), d, f64::NAN, rates)
        }
        FrontEnd::Tip => {
            let tp = tip_error_probability(k0r, ctx.eps1, ctx.eps2, &ctx.tip, &ctx.dispersion, &ctx.tip_search)?;
            (1.0 - tp.pe, tp.k0d, tp.k0v, tp.rates)
        }
    };
    let branching = ctx.sided(branching);
    Ok(EfficiencyPoint {
        front_end,
        k0r,
        branching,
        transfer: coupler.transfer,
        p: branching * coupler.transfer,
        k0d,
        k0v,
        rates,
        coupler,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lossless_matched_transfer_is_sine_squared() {
        let k = 0.3;
        for l in [0.5, 2.0, 5.0] {
            let t = transfer_efficiency(k, 0.0, 0.0, l).unwrap();
            assert!((t - (k * l).sin().powi(2)).abs() < 1e-14);
        }
        let full = transfer_efficiency(k, 0.0, 0.0, std::f64::consts::FRAC_PI_2 / k).unwrap();
        assert!((full - 1.0).abs() < 1e-14);
        assert_eq!(transfer_efficiency(0.0, 0.1, 0.01, 3.0).unwrap(), 0.0);
    }

    #[test]
    fn lossless_amplitudes_conserve_power() {
        for (k, db) in [(0.3, 0.0), (0.2, 0.15), (1.0, -0.4)] {
            for z in [0.3, 4.0, 17.0] {
                let (a, b) = coupled_amplitudes(k, db, 0.0, z);
                assert!((a.norm_sqr() + b.norm_sqr() - 1.0).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn optimal_length_closed_form_and_grid_agree() {
        let (l, t) = optimal_length(0.4, 0.0, 0.02).unwrap();
        let (l2, t2) = optimal_length(0.4, 1e-9, 0.02).unwrap();
        assert!((l - l2).abs() < 1e-5 && (t - t2).abs() < 1e-9);
        assert!((l * 0.4 / std::f64::consts::FRAC_PI_2 - 1.0).abs() < 0.2);
    }
}
