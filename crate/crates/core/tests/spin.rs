use causal_probe_core::quantum::{born_ensemble, post_measurement_expectation, reduced_projector};
use causal_probe_core::spin::{
    alice_rotate, bloch_grid, measured_flag_observable, scheme_s2, scheme_sz,
    semicausality_deviation, spin_b, spin_state, total_s2, Axis, BasisChoice, SpinLabel,
};
use causal_probe_core::{MeasurementScheme, StateVector};
use proptest::prelude::*;
use std::f64::consts::{FRAC_PI_2, PI};

const HBAR: f64 = 1.0;

fn prestates() -> Vec<StateVector> {
    [
        (SpinLabel::Up, SpinLabel::Up),
        (SpinLabel::Down, SpinLabel::Up),
        (SpinLabel::Right, SpinLabel::Up),
        (SpinLabel::Left, SpinLabel::Down),
        (
            SpinLabel::Plus([0.48, 0.6, 0.64]),
            SpinLabel::Plus([0.0, 0.6, -0.8]),
        ),
    ]
    .into_iter()
    .map(|(a, b)| spin_state(a, b).unwrap())
    .collect()
}

fn max_signal(scheme: &MeasurementScheme, axis: [f64; 3], angle: f64) -> f64 {
    let mut worst: f64 = 0.0;
    for psi in prestates() {
        let rotated = alice_rotate(&psi, axis, angle).unwrap();
        for ax in [Axis::X, Axis::Y, Axis::Z] {
            let obs = spin_b(ax, HBAR);
            let a = post_measurement_expectation(&psi, scheme, &obs).unwrap();
            let b = post_measurement_expectation(&rotated, scheme, &obs).unwrap();
            worst = worst.max((a - b).abs());
        }
    }
    worst
}

#[test]
fn causal_schemes_survive_bloch_grid() {
    for scheme in [
        scheme_s2(BasisChoice::Bell),
        scheme_sz(BasisChoice::Standard),
    ] {
        for axis in bloch_grid(20) {
            for angle in [0.3, FRAC_PI_2, 2.1, PI] {
                assert!(max_signal(&scheme, axis, angle) <= 1e-10);
            }
        }
    }
}

fn unit_axis() -> impl Strategy<Value = [f64; 3]> {
    (-1.0f64..1.0, 0.0f64..2.0 * PI).prop_map(|(z, phi)| {
        let r = (1.0 - z * z).sqrt();
        [r * phi.cos(), r * phi.sin(), z]
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn causal_schemes_survive_random_rotations(axis in unit_axis(), angle in 0.0f64..2.0 * PI) {
        prop_assert!(max_signal(&scheme_s2(BasisChoice::Bell), axis, angle) <= 1e-10);
        prop_assert!(max_signal(&scheme_sz(BasisChoice::Standard), axis, angle) <= 1e-10);
    }

    #[test]
    fn s2_is_conserved(axis in unit_axis(), angle in 0.0f64..2.0 * PI) {
        let s2 = total_s2(HBAR);
        for choice in [BasisChoice::Standard, BasisChoice::Bell, BasisChoice::Luders] {
            for psi in prestates() {
                let psi = alice_rotate(&psi, axis, angle).unwrap();
                let r = measured_flag_observable(&scheme_s2(choice), &psi, &s2).unwrap();
                prop_assert!((r.before - r.after).abs() <= 1e-10);
            }
        }
    }
}

#[test]
fn violating_schemes_have_witnesses() {
    let uu = spin_state(SpinLabel::Up, SpinLabel::Up).unwrap();
    let ru = alice_rotate(&uu, [0.0, 1.0, 0.0], FRAC_PI_2).unwrap();
    let szb = spin_b(Axis::Z, HBAR);
    for scheme in [
        scheme_s2(BasisChoice::Standard),
        scheme_sz(BasisChoice::Bell),
    ] {
        let a = post_measurement_expectation(&uu, &scheme, &szb).unwrap();
        let b = post_measurement_expectation(&ru, &scheme, &szb).unwrap();
        assert!((a - b).abs() >= HBAR / 4.0 - 1e-10);
    }
}

#[test]
fn s2_flip_example() {
    let szb = spin_b(Axis::Z, HBAR);
    let scheme = scheme_s2(BasisChoice::Standard);
    let uu = spin_state(SpinLabel::Up, SpinLabel::Up).unwrap();
    let ens = born_ensemble(&scheme, &uu).unwrap();
    let nonzero: Vec<f64> = ens
        .probabilities()
        .into_iter()
        .filter(|p| *p > 1e-14)
        .collect();
    assert_eq!(nonzero.len(), 1);
    assert!((nonzero[0] - 1.0).abs() < 1e-12);
    assert!((post_measurement_expectation(&uu, &scheme, &szb).unwrap() - 0.5).abs() < 1e-12);

    let du = spin_state(SpinLabel::Down, SpinLabel::Up).unwrap();
    let ens = born_ensemble(&scheme, &du).unwrap();
    assert!((ens.entry("S=0:singlet").unwrap().probability - 0.5).abs() < 1e-12);
    assert!((ens.entry("S=1:psi+").unwrap().probability - 0.5).abs() < 1e-12);
    assert!(
        post_measurement_expectation(&du, &scheme, &szb)
            .unwrap()
            .abs()
            < 1e-12
    );
}

#[test]
fn ambiguity_between_bases() {
    let szb = spin_b(Axis::Z, HBAR);
    let ru = spin_state(SpinLabel::Right, SpinLabel::Up).unwrap();
    let std_s2 = scheme_s2(BasisChoice::Standard);
    let probs = born_ensemble(&std_s2, &ru).unwrap().probabilities();
    for (p, e) in probs.iter().zip([0.25, 0.25, 0.5, 0.0]) {
        assert!((p - e).abs() < 1e-12);
    }
    assert!((post_measurement_expectation(&ru, &std_s2, &szb).unwrap() - 0.25).abs() < 1e-12);

    let bell_s2 = scheme_s2(BasisChoice::Bell);
    for p in born_ensemble(&bell_s2, &ru).unwrap().probabilities() {
        assert!((p - 0.25).abs() < 1e-12);
    }
    assert!(
        post_measurement_expectation(&ru, &bell_s2, &szb)
            .unwrap()
            .abs()
            < 1e-12
    );

    let std_sz =
        post_measurement_expectation(&ru, &scheme_sz(BasisChoice::Standard), &szb).unwrap();
    let bell_sz = post_measurement_expectation(&ru, &scheme_sz(BasisChoice::Bell), &szb).unwrap();
    assert!((std_sz - 0.5).abs() < 1e-12);
    assert!((bell_sz - 0.25).abs() < 1e-12);
}

#[test]
fn bell_projectors_reduce_to_half_identity() {
    let scheme = scheme_s2(BasisChoice::Bell);
    for o in scheme.outcomes() {
        let r = reduced_projector(&o.projector.to_operator(vec![2, 2]).unwrap(), 1).unwrap();
        let m = r.matrix();
        assert!((m[(0, 0)].re - 0.5).abs() < 1e-12 && (m[(1, 1)].re - 0.5).abs() < 1e-12);
        assert!(m[(0, 1)].norm() < 1e-12 && m[(1, 0)].norm() < 1e-12);
        assert!(m[(0, 0)].im.abs() < 1e-12 && m[(1, 1)].im.abs() < 1e-12);
    }
    assert!(semicausality_deviation(&scheme).unwrap() < 1e-12);
    assert!(semicausality_deviation(&scheme_s2(BasisChoice::Standard)).unwrap() > 0.1);
}

#[test]
fn luders_matches_standard_on_down_up() {
    let du = spin_state(SpinLabel::Down, SpinLabel::Up).unwrap();
    let lu = born_ensemble(&scheme_s2(BasisChoice::Luders), &du).unwrap();
    let st = born_ensemble(&scheme_s2(BasisChoice::Standard), &du).unwrap();
    let pairs = [("S=0", "S=0:singlet"), ("S=1", "S=1:psi+")];
    for (l, s) in pairs {
        let a = lu.entry(l).unwrap();
        let b = st.entry(s).unwrap();
        assert!((a.probability - b.probability).abs() < 1e-15);
        assert!(a
            .post_state()
            .unwrap()
            .same_ray(b.post_state().unwrap(), 1e-14));
    }
}

#[test]
fn zero_branches_are_flagged() {
    let ru = spin_state(SpinLabel::Right, SpinLabel::Up).unwrap();
    let ens = born_ensemble(&scheme_s2(BasisChoice::Standard), &ru).unwrap();
    let dd = ens.entry("S=1:dd").unwrap();
    assert!(dd.zero_branch);
    assert!(dd.post_state().is_err());
}
