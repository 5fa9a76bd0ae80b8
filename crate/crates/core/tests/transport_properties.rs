use proptest::prelude::*;
use qubit_heat::dynamics::{self, BuildOptions};
use qubit_heat::lamb::{self, ShiftOptions};
use qubit_heat::transport::{self, Lamb};
use qubit_heat::{eigensystem, BathSpec, Eigensystem, SpectralKind, SystemParams};

fn system(eps2: f64, gap: f64, g: f64) -> Eigensystem {
    eigensystem(&SystemParams::new(eps2 + gap, eps2, g).unwrap()).unwrap()
}

fn kind_strategy() -> impl Strategy<Value = SpectralKind> {
    prop_oneof![
        Just(SpectralKind::Drude),
        Just(SpectralKind::Sharp),
        Just(SpectralKind::Gaussian)
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn heat_flows_from_hot_to_cold(
        eps2 in 1.0..3.0f64,
        gap in 0.0..2.0f64,
        g in 0.1..1.0f64,
        t1 in 0.2..5.0f64,
        dt in 0.01..200.0f64,
        wd in 20.0..200.0f64,
        kind in kind_strategy(),
    ) {
        let eig = system(eps2, gap, g);
        let b1 = BathSpec::new(t1, 0.01, wd, kind).unwrap();
        let baths = [b1, b1.with_temperature(t1 + dt)];
        let opts = ShiftOptions::default();
        for flag in [Lamb::Off, Lamb::On] {
            let j1 = transport::heat_current(&eig, &baths, flag, &opts).unwrap();
            prop_assert!(j1 < 0.0);
            let reversed = transport::heat_current(&eig, &[baths[1], baths[0]], flag, &opts).unwrap();
            prop_assert!(reversed > 0.0);
        }
        let delta = lamb::transition_shifts(&eig, &baths, &opts).unwrap();
        let margin = transport::second_law_margin(&eig, delta).unwrap();
        prop_assert!(margin[0] > 0.0 && margin[1] > 0.0);
    }

    #[test]
    fn no_current_without_gradient(
        eps2 in 1.0..3.0f64,
        gap in 0.0..2.0f64,
        g in 0.1..1.0f64,
        t in 0.2..50.0f64,
        kind in kind_strategy(),
    ) {
        let eig = system(eps2, gap, g);
        let b = BathSpec::new(t, 0.02, 50.0, kind).unwrap();
        let j = transport::heat_current(&eig, &[b, b], Lamb::On, &ShiftOptions::default()).unwrap();
        prop_assert_eq!(j, 0.0);
        let st = transport::steady_state(&eig, &[b, b]).unwrap();
        // equal temperatures: Gibbs populations in the bare energies
        let z: f64 = eig.levels.iter().map(|e| (-e / t).exp()).sum();
        for n in 0..4 {
            let gibbs = (-eig.levels[n] / t).exp() / z;
            prop_assert!((st.populations[n] - gibbs).abs() < 1e-12);
        }
    }

    #[test]
    fn bare_current_stays_below_supremum(
        eps2 in 1.0..3.0f64,
        gap in 0.0..2.0f64,
        g in 0.1..1.0f64,
        t1 in 0.2..5.0f64,
        log_dt in -2.0..5.0f64,
    ) {
        let eig = system(eps2, gap, g);
        let b1 = BathSpec::drude(t1, 0.01, 50.0).unwrap();
        let baths = [b1, b1.with_temperature(t1 + 10f64.powf(log_dt))];
        let j = transport::heat_current(&eig, &baths, Lamb::Off, &ShiftOptions::default()).unwrap();
        prop_assert!(j.abs() < transport::current_supremum(&eig, &b1));
        prop_assert!(transport::current_derivative_dt(&eig, &baths).unwrap() > 0.0);
    }
}

#[test]
fn dynamics_agrees_with_closed_form_for_non_drude_baths() {
    let eig = system(2.0, 1.0, 0.5);
    let shift = ShiftOptions::default();
    for kind in [SpectralKind::Sharp, SpectralKind::Gaussian] {
        let baths = [
            BathSpec::new(1.0, 0.01, 50.0, kind).unwrap(),
            BathSpec::new(30.0, 0.02, 50.0, kind).unwrap(),
        ];
        let levels = lamb::level_shifts(&eig, &baths, &shift).unwrap();
        let l = dynamics::build_liouvillian(&eig, &baths, &BuildOptions::with_lamb(levels)).unwrap();
        let rho = dynamics::steady_state_nullspace(&l).unwrap();
        let [j1, j2] = dynamics::current_from_dissipator(&l, &rho);
        let expected = transport::heat_current(&eig, &baths, Lamb::On, &shift).unwrap();
        assert!((j1 - expected).abs() < 1e-10 * expected.abs(), "{kind}: {j1} vs {expected}");
        assert!((j1 + j2).abs() < 1e-10 * j1.abs());
    }
}

#[test]
fn current_difference_is_linear_in_the_shifts() {
    let eig = system(2.0, 1.0, 0.5);
    let b1 = BathSpec::drude(1.0, 0.01, 50.0).unwrap();
    let baths = [b1, b1.with_temperature(40.0)];
    let a = transport::current_difference_with_shifts(&eig, &baths, [1e-3, 0.0]).unwrap();
    let b = transport::current_difference_with_shifts(&eig, &baths, [0.0, 2e-3]).unwrap();
    let both = transport::current_difference_with_shifts(&eig, &baths, [1e-3, 2e-3]).unwrap();
    assert!((a + b - both).abs() < 1e-15);
    let doubled = transport::current_difference_with_shifts(&eig, &baths, [2e-3, 4e-3]).unwrap();
    assert!((2.0 * both - doubled).abs() < 1e-15);
}

#[test]
fn report_fields_are_consistent() {
    let eig = system(2.0, 1.0, 0.5);
    let b1 = BathSpec::drude(1.0, 0.01, 50.0).unwrap();
    let baths = [b1, b1.with_temperature(200.0)];
    let r = transport::current_report(&eig, &baths, &ShiftOptions::default()).unwrap();
    assert!((r.j1_with_lamb - r.j1_no_lamb - r.dj).abs() < 1e-15);
    assert_eq!(r.j2_with_lamb(), -r.j1_with_lamb);
    assert!((r.dj_magnitude() - (r.j1_with_lamb.abs() - r.j1_no_lamb.abs())).abs() < 1e-15);
    let pq = r.pq.expect("drude baths");
    let delta = pq.reconstruct(199.0, 50.0);
    for mu in 0..2 {
        assert!((delta[mu] - r.delta[mu]).abs() < 1e-10 * r.delta[mu].abs().max(1e-3));
    }
}
