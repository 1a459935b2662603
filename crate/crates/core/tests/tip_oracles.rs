mod common;

use common::quad::excised_exponent;
use num_complex::Complex64 as C;
use plasmon_core::emitter_coupling::optimal_distance;
use plasmon_core::tip_model::*;
use plasmon_core::wire_modes::WireGeometry;
use proptest::prelude::*;

const E1: C = C::new(2.0, 0.0);
const E2: C = C::new(-50.0, 0.6);

#[test]
fn substitution_agrees_with_excised_z_quadrature() {
    let (v, r) = (0.1, 0.5);
    let tip = TipGeometry::new(v, r).unwrap();
    // analytic rho Im k = c + a rho: exponent 2 (c * 2 sqrt(Z/v) + a Z)
    let (c, a) = (1.7e-3, 4e-3);
    let analytic = |rho: f64| (c + a * rho) / rho;
    let exact = 2.0 * (2.0 * c * (r * r / v / v).sqrt() + a * r * r / v);
    let lib = -eikonal_attenuation_tol(&tip, &analytic, 1e-10).unwrap().ln();
    let naive = excised_exponent(&analytic, v, r, 1e-6);
    assert!((lib / exact - 1.0).abs() < 1e-9, "{lib} vs {exact}");
    assert!((naive / lib - 1.0).abs() < 1e-6, "{naive} vs {lib}");

    let disp = WireDispersion::cached(E1, E2).unwrap();
    let f = |rho: f64| disp.im_k(rho);
    let lib = -eikonal_attenuation_tol(&tip, &f, 1e-10).unwrap().ln();
    // sqrt(v eps) below the grid start, where rho Im k is constant
    let naive = excised_exponent(&f, v, r, 1e-8);
    assert!((naive / lib - 1.0).abs() < 1e-6, "{naive} vs {lib}");
}

#[test]
fn tightening_quadrature_changes_attenuation_below_1e8() {
    let disp = WireDispersion::cached(E1, E2).unwrap();
    let f = |rho: f64| disp.im_k(rho);
    for (v, r) in [(0.05, 0.3), (0.5, 1.0), (1e-3, 0.05)] {
        let tip = TipGeometry::new(v, r).unwrap();
        let a = eikonal_attenuation_tol(&tip, &f, 1e-8).unwrap();
        let b = eikonal_attenuation_tol(&tip, &f, 1e-12).unwrap();
        assert!((a - b).abs() < 1e-8 * b, "{a} vs {b}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn attenuation_is_a_probability(ln_v in (1e-4f64).ln()..(10.0f64).ln(), r in 0.0f64..2.0) {
        let disp = WireDispersion::cached(E1, E2).unwrap();
        let tip = TipGeometry::new(ln_v.exp(), r).unwrap();
        let a = eikonal_attenuation(&tip, &|rho| disp.im_k(rho)).unwrap();
        prop_assert!(a > 0.0 && a <= 1.0, "{a}");
        prop_assert_eq!(a == 1.0, r == 0.0);
    }
}

fn setup() -> (TipCouplingConstant, std::sync::Arc<WireDispersion>) {
    (calibrate_tip(E1, E2, TIP_PURCELL_ANCHOR).unwrap(), WireDispersion::cached(E1, E2).unwrap())
}

#[test]
fn tip_error_grows_with_final_radius() {
    let (cpl, disp) = setup();
    let search = TipSearch::default();
    let radii: Vec<f64> = (0..10).map(|i| 0.02 * 50f64.powf(i as f64 / 9.0)).collect();
    let pe: Vec<f64> = radii
        .iter()
        .map(|&r| tip_error_probability(r, E1, E2, &cpl, &disp, &search).unwrap().pe)
        .collect();
    for (w, r) in pe.windows(2).zip(&radii[1..]) {
        assert!(w[1] > w[0], "P_E not increasing at k0R = {r}: {pe:?}");
    }
}

#[test]
fn tip_beats_wire_from_moderate_radii() {
    let (cpl, disp) = setup();
    let search = TipSearch::default();
    for r in [0.05, 0.1, 0.2, 0.5, 1.0] {
        let tip = tip_error_probability(r, E1, E2, &cpl, &disp, &search).unwrap().pe;
        let wire = optimal_distance(&WireGeometry::silver(r)).unwrap().1.error();
        assert!(tip < wire, "k0R = {r}: tip {tip} vs wire {wire}");
    }
}

#[test]
fn pre_propagation_error_reaches_calibrated_limit() {
    let (cpl, _) = setup();
    let (pe, _) = tip_pre_propagation_error(1e-6, E1, E2, &cpl).unwrap();
    let expect = 1.0 / (1.0 + TIP_PURCELL_ANCHOR);
    assert!((pe / expect - 1.0).abs() < 0.05, "{pe} vs {expect}");
    assert!((pe - 4e-4).abs() < 0.2e-4);
}

#[test]
fn coupling_constant_does_not_depend_on_emitter_or_curvature() {
    let (cpl, _) = setup();
    let again = calibrate_tip(E1, E2, TIP_PURCELL_ANCHOR).unwrap();
    assert_eq!(cpl.alpha_pl_tip, again.alpha_pl_tip);
    // pl / nonrad at fixed d/v is v-independent once radiation is negligible
    let s = cpl.calibration.optimal_d_over_v;
    let purcell = |v: f64| tip_rates(s * v, v, E1, E2, &cpl).unwrap();
    let (a, b) = (purcell(1e-7), purcell(1e-5));
    assert!((a.pl / a.nonrad / (b.pl / b.nonrad) - 1.0).abs() < 1e-10);
    assert!((a.pl / a.nonrad / TIP_PURCELL_ANCHOR - 1.0).abs() < 1e-3);
}
