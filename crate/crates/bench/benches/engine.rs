use std::hint::black_box;

use causal_probe_bench::{kick, lattice, oscillator, plan, spin_prestate};
use causal_probe_core::field::{
    max_signaling, naive_np_expectations, numeric_oracle, qndsv_expectations, FieldScheme,
    WavePacket,
};
use causal_probe_core::harness::run_scenario;
use causal_probe_core::oscillator::{
    coherent_prestate_pm, local_moments_b_ensemble, naive_nplus_ensemble, phase_moments_fast,
    ModeBasis,
};
use causal_probe_core::quantum::{post_measurement_expectation, qndsv_scheme};
use causal_probe_core::spin::{scheme_s2, spin_b, spin_state, Axis, BasisChoice, SpinLabel};
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

fn spin(c: &mut Criterion) {
    let psi = spin_prestate();
    let obs = spin_b(Axis::Z, 1.0);
    let qndsv = qndsv_scheme(&spin_state(SpinLabel::Up, SpinLabel::Right).unwrap()).unwrap();
    let bell = scheme_s2(BasisChoice::Bell);
    c.bench_function("spin/qndsv", |b| {
        b.iter(|| post_measurement_expectation(black_box(&psi), &qndsv, &obs))
    });
    c.bench_function("spin/s2-bell", |b| {
        b.iter(|| post_measurement_expectation(black_box(&psi), &bell, &obs))
    });
}

fn oscillator_schemes(c: &mut Criterion) {
    let (params, kick) = oscillator();
    c.bench_function("oscillator/naive-trunc40", |b| {
        b.iter(|| {
            let pre = coherent_prestate_pm(params, black_box(kick), 40).unwrap();
            let ens = naive_nplus_ensemble(&pre).unwrap();
            local_moments_b_ensemble(&ens, &params, ModeBasis::PM).unwrap()
        })
    });
    let mut group = c.benchmark_group("oscillator/phase");
    for s_cut in [16usize, 64, 256] {
        group.bench_with_input(BenchmarkId::from_parameter(s_cut), &s_cut, |b, &s| {
            b.iter(|| phase_moments_fast(&params, black_box(kick), s).unwrap())
        });
    }
    group.finish();
}

fn field(c: &mut Criterion) {
    let mut group = c.benchmark_group("field/closed");
    for (d, sites) in [(1usize, 64usize), (2, 32), (3, 16)] {
        let modes = lattice(d, sites);
        let k = kick(d, 0.3);
        let x = vec![0; d];
        let y = vec![1; d];
        let mut p = vec![0i64; d];
        p[0] = 1;
        let packet = WavePacket::single_mode(&modes, &p).unwrap();
        group.bench_function(BenchmarkId::new("naive", format!("d{d}-N{sites}")), |b| {
            b.iter(|| naive_np_expectations(&modes, black_box(&k), &y, &p).unwrap())
        });
        group.bench_function(BenchmarkId::new("qndsv", format!("d{d}-N{sites}")), |b| {
            b.iter(|| qndsv_expectations(&modes, black_box(&k), &y, &packet, 0.0).unwrap())
        });
        group.bench_function(
            BenchmarkId::new("max_signaling", format!("d{d}-N{sites}")),
            |b| b.iter(|| max_signaling(&modes, black_box(&x)).unwrap()),
        );
    }
    group.finish();
    let modes = lattice(1, 4);
    c.bench_function("field/oracle-N4-trunc6", |b| {
        b.iter(|| {
            numeric_oracle(
                &modes,
                &kick(1, 0.3),
                &[2],
                &FieldScheme::Naive { p: vec![1] },
                6,
            )
            .unwrap()
        })
    });
}

fn harness(c: &mut Criterion) {
    let p = plan(
        r#"{"version":1,"system":{"field":{"hbar":1.0,"d":1,"sites":64,"spacing":1.0,"mass":1.0,"x":[0],"y":[2],"p":[1]}},
            "alice":"kick","scheme":"naive","observables":["phi_y","pi_y","phi2_y","pi2_y"],
            "grid":[-0.5,-0.25,0.0,0.25,0.5]}"#,
    );
    c.bench_function("harness/field-naive-run", |b| {
        b.iter(|| run_scenario(black_box(&p)).unwrap())
    });
}

criterion_group!(benches, spin, oscillator_schemes, field, harness);
criterion_main!(benches);
