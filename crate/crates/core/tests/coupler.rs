mod common;

use common::{bisect, oracle_j, oracle_k, rk45};
use num_complex::Complex64 as C;
use plasmon_core::error::Error;
use plasmon_core::outcoupler::fiber::*;
use plasmon_core::outcoupler::*;
use plasmon_core::wire_modes::*;

fn re(v: C) -> f64 {
    v.re
}

/// Textbook HE11 equation with the poles of `J1'/J1` cleared:
/// `(J1'/u + J1 K1'/(w K1)) (ec J1'/u + es J1 K1'/(w K1)) - b^2 J1^2 (1/u^2 + 1/w^2)^2`.
fn he11_oracle(b: f64, a: f64, ec: f64, es: f64) -> f64 {
    let u = a * (ec - b * b).sqrt();
    let w = a * (b * b - es).sqrt();
    let j0 = re(oracle_j(0, C::new(u, 0.0)));
    let j1 = re(oracle_j(1, C::new(u, 0.0)));
    let k0 = re(oracle_k(0, C::new(w, 0.0)));
    let k1 = re(oracle_k(1, C::new(w, 0.0)));
    let jp = j0 - j1 / u;
    let kr = (-k0 - k1 / w) / (w * k1);
    let s = 1.0 / (u * u) + 1.0 / (w * w);
    (jp / u + j1 * kr) * (ec * jp / u + es * j1 * kr) - b * b * j1 * j1 * s * s
}

#[test]
fn fiber_index_matches_grid_scan_oracle() {
    let (a, ec, es): (f64, f64, f64) = (0.5, 13.0, 2.0);
    let (lo, hi) = (es.sqrt(), ec.sqrt());
    let n = 4000;
    let node = |i: usize| hi - (hi - lo) * (i as f64 + 0.5) / n as f64;
    let f = |b: f64| he11_oracle(b, a, ec, es);
    let mut prev = f(node(0));
    let mut root = None;
    for i in 1..n {
        let v = f(node(i));
        if v.signum() != prev.signum() {
            root = Some(bisect(f, node(i), node(i - 1)));
            break;
        }
        prev = v;
    }
    let root = root.expect("oracle scan found no sign change");
    let m = solve_fiber_he11(&FiberGeometry::default().with_radius(a)).unwrap();
    assert!((m.k_par - root).abs() < 1e-9, "{} vs {}", m.k_par, root);
    assert!(m.residual < 1e-10);
}

#[test]
fn fiber_sweep_bounds_and_residual() {
    let t = FiberGeometry::default();
    for i in 0..50 {
        let a = 0.25 * (80.0f64).powf(i as f64 / 49.0);
        let m = solve_fiber_he11(&t.with_radius(a)).unwrap();
        assert!(m.k_par > 2f64.sqrt() && m.k_par < 13f64.sqrt(), "a = {a}");
        assert!(m.residual < 1e-10, "a = {a}");
    }
    let thick = solve_fiber_he11(&t.with_radius(20.0)).unwrap();
    assert!((thick.k_par / 13f64.sqrt() - 1.0).abs() < 0.01);
}

#[test]
fn phase_match_hits_target_and_is_monotone() {
    let t = FiberGeometry::default();
    let mut last: Option<(f64, f64)> = None;
    for i in 0..10 {
        let r = 0.08 * (12.5f64).powf(i as f64 / 9.0);
        let g = WireGeometry::silver(r);
        let m = solve_fundamental(&g).unwrap();
        let a = phase_match(&m, &g, &t).unwrap();
        let fm = solve_fiber_he11(&t.with_radius(a)).unwrap();
        assert!((fm.k_par - m.k_par.re).abs() < 1e-8);
        if let Some((k_prev, a_prev)) = last {
            // radius grows, plasmon index falls, matching core shrinks
            assert!(m.k_par.re < k_prev && a < a_prev, "R = {r}");
        }
        last = Some((m.k_par.re, a));
    }
}

#[test]
fn thin_wire_is_unmatchable_with_bound() {
    let g = WireGeometry::silver(0.03);
    let m = solve_fundamental(&g).unwrap();
    match phase_match(&m, &g, &FiberGeometry::default()) {
        Err(Error::Unmatchable { plasmon_k, max_k, bounding_k0r }) => {
            assert!(plasmon_k > max_k);
            let at_bound = solve_fundamental(&g.with_radius(bounding_k0r)).unwrap();
            assert!((at_bound.k_par.re - max_k).abs() < 1e-6);
        }
        other => panic!("expected unmatchable, got {other:?}"),
    }
}

fn matched(r: f64, lossless: bool) -> (PlasmonField, FiberMode) {
    let mut g = WireGeometry::silver(r);
    if lossless {
        g = g.lossless();
    }
    let m = solve_fundamental(&g).unwrap();
    let a = phase_match(&m, &g, &FiberGeometry::default()).unwrap();
    let fm = solve_fiber_he11(&FiberGeometry::default().with_radius(a)).unwrap();
    (PlasmonField::new(&m, &g).unwrap(), fm)
}

#[test]
fn coupling_is_reciprocal_for_lossless_modes() {
    let (p, fm) = matched(0.1585, true);
    let k = coupling_constant(&p, &fm, 0.1).unwrap();
    let ks = coupling_constant_swapped(&p, &fm, 0.1).unwrap();
    assert!(k.im.abs() / k.norm() < 1e-6, "{k}");
    assert!((k.norm() - ks.norm()).abs() < 1e-9 * k.norm());
}

#[test]
fn coupling_is_independent_of_field_normalization() {
    let (p, fm) = matched(0.2, false);
    let k1 = coupling_constant(&p, &fm, 0.05).unwrap();
    let k2 = coupling_constant(&p.with_amplitude(2.0), &fm, 0.05).unwrap();
    assert!((k1 - k2).norm() < 1e-10 * k1.norm());
}

#[test]
fn coupling_decays_with_gap_at_plasmon_rate() {
    let (p, fm) = matched(0.1585, false);
    let gaps: Vec<f64> = (0..5).map(|i| 4.0 + i as f64).collect();
    let logs: Vec<f64> = gaps.iter().map(|&g| coupling_constant(&p, &fm, g).unwrap().norm().ln()).collect();
    // least-squares slope
    let n = gaps.len() as f64;
    let (mx, my) = (gaps.iter().sum::<f64>() / n, logs.iter().sum::<f64>() / n);
    let sxy: f64 = gaps.iter().zip(&logs).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = gaps.iter().map(|x| (x - mx).powi(2)).sum();
    let decay = -sxy / sxx;
    let target = p.mode.kappa1.re;
    assert!((decay / target - 1.0).abs() < 0.1, "decay {decay} vs {target}");
}

#[test]
fn closed_form_transfer_matches_ode() {
    for &(kappa, loss_rate, db, l) in &[(0.4, 0.4, 0.0, 5.0), (0.3, 0.05, 0.12, 9.0), (1.0, 0.0, 0.7, 3.3)] {
        let y = rk45(
            |z, y: &[C; 2]| {
                let ph = C::new(0.0, db * z).exp();
                [-0.5 * loss_rate * y[0] + C::new(0.0, kappa) * y[1] * ph, C::new(0.0, kappa) * y[0] / ph]
            },
            [C::new(1.0, 0.0), C::new(0.0, 0.0)],
            l,
            1e-12,
        );
        let t = transfer_efficiency(kappa, db, loss_rate, l).unwrap();
        assert!((t - y[1].norm_sqr()).abs() < 1e-6, "{t} vs {}", y[1].norm_sqr());
        let (a, b) = coupled_amplitudes(kappa, db, loss_rate, l);
        assert!((a - y[0]).norm() < 1e-6 && (b - y[1]).norm() < 1e-6);
    }
}

#[test]
fn transfer_grows_as_loss_vanishes() {
    let kappa = 0.3;
    let mut prev = 0.0;
    for loss in [0.1, 0.05, 0.02, 0.01, 0.005, 0.0] {
        let (_, t) = optimal_length(kappa, 0.0, loss).unwrap();
        assert!(t > prev, "loss {loss}");
        prev = t;
    }
    assert!((prev - 1.0).abs() < 1e-12);
}

#[test]
fn optimized_coupler_is_a_local_optimum() {
    let g = WireGeometry::silver(0.2);
    let m = solve_fundamental(&g).unwrap();
    let opts = CouplerOptions::default();
    let d = optimize_coupler(&m, &g, &opts).unwrap();
    assert!(d.kappa >= 0.0 && (0.0..=1.0).contains(&d.transfer));
    assert!((d.k0l_ex * d.kappa / std::f64::consts::FRAC_PI_2 - 1.0).abs() < 0.2);
    let p = PlasmonField::new(&m, &g).unwrap();
    for (fa, fg, fl) in [(1.1, 1.0, 1.0), (0.9, 1.0, 1.0), (1.0, 1.1, 1.0), (1.0, 1.0, 1.1), (1.0, 1.0, 0.9)] {
        let a = d.fiber.k0a * fa;
        let gap = d.k0_gap * fg;
        let fm = solve_fiber_he11(&d.fiber.with_radius(a)).unwrap();
        let kappa = coupling_constant(&p, &fm, gap).unwrap().norm();
        let t = transfer_efficiency(kappa, fm.k_par - m.k_par.re, 2.0 * m.k_par.im, d.k0l_ex * fl).unwrap();
        assert!(t <= d.transfer + 1e-9, "perturbation ({fa}, {fg}, {fl}) gives {t} > {}", d.transfer);
    }
}
