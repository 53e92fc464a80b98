use causal_probe_core::quantum::{
    born_ensemble, embed_local, post_measurement_expectation, qndsv_scheme, validate_scheme,
};
use causal_probe_core::spin::{spin_b, spin_state, Axis, SpinLabel};
use causal_probe_core::{MeasurementScheme, Observable, Operator, SchemeKind, StateVector, C64};
use nalgebra::DMatrix;
use proptest::prelude::*;

fn complex_vec(len: usize) -> impl Strategy<Value = Vec<C64>> {
    prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), len)
        .prop_map(|v| v.into_iter().map(|(a, b)| C64::new(a, b)).collect())
}

fn random_state(dims: Vec<usize>, raw: Vec<C64>) -> Option<StateVector> {
    StateVector::new(dims, raw).ok()?.normalized().ok()
}

fn random_hermitian(dims: &[usize], raw: &[C64]) -> Operator {
    let n: usize = dims.iter().product();
    let m = DMatrix::from_column_slice(n, n, &raw[..n * n]);
    Operator::hermitian(dims.to_vec(), (&m + m.adjoint()) * C64::new(0.5, 0.0)).unwrap()
}

fn random_unitary(n: usize, raw: &[C64]) -> DMatrix<C64> {
    let mut m = DMatrix::from_column_slice(n, n, &raw[..n * n]);
    for i in 0..n {
        m[(i, i)] += C64::new(3.0, 0.0);
    }
    m.qr().q()
}

/// Complete orthogonal family from the columns of a random unitary, split
/// into `cuts`-delimited groups.
fn random_scheme(dims: &[usize], raw: &[C64], groups: usize) -> MeasurementScheme {
    let n: usize = dims.iter().product();
    let u = random_unitary(n, raw);
    let mut subspaces: Vec<(String, Vec<StateVector>)> = (0..groups.min(n))
        .map(|g| (format!("g{g}"), Vec::new()))
        .collect();
    let len = subspaces.len();
    for col in 0..n {
        let s = StateVector::from_dvector(dims.to_vec(), u.column(col).into_owned()).unwrap();
        subspaces[col % len].1.push(s);
    }
    MeasurementScheme::from_subspaces(dims.to_vec(), subspaces, SchemeKind::Luders).unwrap()
}

fn dims_strategy() -> impl Strategy<Value = Vec<usize>> {
    prop_oneof![
        Just(vec![2]),
        Just(vec![5]),
        Just(vec![2, 2]),
        Just(vec![2, 3]),
        Just(vec![3, 3]),
        Just(vec![2, 4]),
        Just(vec![4, 4]),
        Just(vec![2, 2, 2]),
        Just(vec![2, 2, 3]),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn unnormalized_sum_identity(dims in dims_strategy(), raw in complex_vec(16 * 16 * 3), groups in 1usize..6) {
        let n: usize = dims.iter().product();
        let scheme = random_scheme(&dims, &raw[..n * n], groups);
        let obs = random_hermitian(&dims, &raw[256..]);
        let Some(psi) = random_state(dims.clone(), raw[512..512 + n].to_vec()) else { return Ok(()) };
        let fast = post_measurement_expectation(&psi, &scheme, &obs).unwrap();
        let ens = born_ensemble(&scheme, &psi).unwrap();
        let mut slow = 0.0;
        for e in ens.entries() {
            if !e.zero_branch {
                slow += e.probability * e.post_state().unwrap().expectation(&obs).unwrap();
            }
        }
        prop_assert!((fast - slow).abs() <= 1e-10);
        prop_assert!((ens.total_probability() - 1.0).abs() <= 1e-10);
    }

    #[test]
    fn random_schemes_are_complete(dims in dims_strategy(), raw in complex_vec(256), groups in 1usize..6) {
        let n: usize = dims.iter().product();
        let scheme = random_scheme(&dims, &raw[..n * n], groups);
        prop_assert!(validate_scheme(&scheme).is_valid(1e-10));
    }

    #[test]
    fn semicausal_scheme_does_not_signal(raw in complex_vec(256), db in 2usize..4, obs_raw in complex_vec(16)) {
        // projectors of the form P_a ⊗ 1_B reduce to multiples of 1_B
        let da = 2;
        let ua = random_unitary(da, &raw);
        let n = da * db;
        let mut subspaces = Vec::new();
        for a in 0..da {
            let mut states = Vec::new();
            for b in 0..db {
                let mut v = vec![C64::new(0.0, 0.0); n];
                for i in 0..da {
                    v[i * db + b] = ua[(i, a)];
                }
                states.push(StateVector::new(vec![da, db], v).unwrap());
            }
            subspaces.push((format!("a{a}"), states));
        }
        let scheme = MeasurementScheme::from_subspaces(vec![da, db], subspaces, SchemeKind::Luders).unwrap();
        let ob = DMatrix::from_column_slice(db, db, &obs_raw[..db * db]);
        let local = Operator::hermitian(vec![db], (&ob + ob.adjoint()) * C64::new(0.5, 0.0)).unwrap();
        let obs = embed_local(&local, 1, &[da, db]).unwrap();
        let Some(psi) = random_state(vec![da, db], raw[16..16 + n].to_vec()) else { return Ok(()) };
        let base = post_measurement_expectation(&psi, &scheme, &obs).unwrap();
        let w = random_unitary(da, &raw[64..]);
        let wa = embed_local(&Operator::new(vec![da], w).unwrap(), 0, &[da, db]).unwrap();
        let rotated = StateVector::from_dvector(vec![da, db], wa.apply(psi.amplitudes())).unwrap();
        let after = post_measurement_expectation(&rotated, &scheme, &obs).unwrap();
        prop_assert!((base - after).abs() <= 1e-10);
    }
}

#[test]
fn qndsv_counterexample_signals() {
    let target = spin_state(SpinLabel::Up, SpinLabel::Right).unwrap();
    let scheme = qndsv_scheme(&target).unwrap();
    let szb = spin_b(Axis::Z, 1.0);
    let uu = spin_state(SpinLabel::Up, SpinLabel::Up).unwrap();
    let ru = spin_state(SpinLabel::Right, SpinLabel::Up).unwrap();
    let a = post_measurement_expectation(&uu, &scheme, &szb).unwrap();
    let b = post_measurement_expectation(&ru, &scheme, &szb).unwrap();
    assert!(a.abs() < 1e-12);
    assert!((b - 0.25).abs() < 1e-12);
    assert!(((a - b).abs() - 0.25).abs() < 1e-12);
}

#[test]
fn observable_trait_object_matches_dense() {
    let dims = [2usize, 2];
    let op = spin_b(Axis::X, 2.0);
    let psi = spin_state(SpinLabel::Right, SpinLabel::Plus([0.6, 0.0, 0.8])).unwrap();
    let dyn_obs: &dyn Observable = &op;
    let v = psi.amplitudes();
    let dense = (v.adjoint() * op.matrix() * v)[(0, 0)].re;
    assert!((dyn_obs.sandwich(v) - dense).abs() < 1e-14);
    assert_eq!(dyn_obs.dims(), &dims);
}
