use plasmon_core::outcoupler::{coupled_amplitudes, optimal_length, transfer_efficiency};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn transfer_is_a_probability(
        kappa in 0.0f64..2.0,
        db in -2.0f64..2.0,
        loss in 0.0f64..2.0,
        l in 0.0f64..50.0,
    ) {
        // unclamped amplitudes, not the returned value, carry the bound
        let (a, b) = coupled_amplitudes(kappa, db, loss, l);
        let total = a.norm_sqr() + b.norm_sqr();
        prop_assert!(b.norm_sqr() <= 1.0 + 1e-12 && total <= 1.0 + 1e-10, "|b|^2 = {}, total {total}", b.norm_sqr());
        let t = transfer_efficiency(kappa, db, loss, l).unwrap();
        prop_assert!((0.0..=1.0).contains(&t));
        prop_assert!((t - b.norm_sqr()).abs() < 1e-12);
    }

    #[test]
    fn lossless_coupling_conserves_power(kappa in 0.0f64..2.0, db in -2.0f64..2.0, l in 0.0f64..50.0) {
        let (a, b) = coupled_amplitudes(kappa, db, 0.0, l);
        prop_assert!((a.norm_sqr() + b.norm_sqr() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn optimal_length_beats_any_length(kappa in 0.01f64..2.0, db in -0.5f64..0.5, loss in 0.0f64..0.5, l in 0.0f64..1.0) {
        let (l_opt, t_opt) = optimal_length(kappa, db, loss).unwrap();
        prop_assert!((transfer_efficiency(kappa, db, loss, l_opt).unwrap() - t_opt).abs() < 1e-14);
        // first transfer peak lies before pi / kappa
        let t = transfer_efficiency(kappa, db, loss, l * std::f64::consts::PI / kappa).unwrap();
        prop_assert!(t <= t_opt + 1e-9, "L = {l}: {t} > {t_opt}");
    }
}

#[test]
fn uncoupled_modes_exchange_nothing() {
    for l in [0.0, 1.0, 100.0] {
        assert_eq!(transfer_efficiency(0.0, 0.3, 0.1, l).unwrap(), 0.0);
    }
}

#[test]
fn invalid_rates_rejected() {
    assert!(transfer_efficiency(-1.0, 0.0, 0.0, 1.0).is_err());
    assert!(transfer_efficiency(1.0, 0.0, -0.1, 1.0).is_err());
    assert!(transfer_efficiency(1.0, f64::NAN, 0.0, 1.0).is_err());
}
