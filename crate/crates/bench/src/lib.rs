//! Shared fixtures for the engine benchmarks.

use causal_probe_core::field::{build_modes, KickSpec, LatticeSpec, ModeSet};
use causal_probe_core::harness::{Plan, Scenario};
use causal_probe_core::oscillator::{KickParams, OscParams};
use causal_probe_core::spin::{spin_state, SpinLabel};
use causal_probe_core::StateVector;

pub fn spin_prestate() -> StateVector {
    spin_state(SpinLabel::Right, SpinLabel::Up).expect("valid labels")
}

pub fn oscillator() -> (OscParams, KickParams) {
    (
        OscParams::new(1.0, 1.0, 1.0).expect("valid parameters"),
        KickParams::new(0.3, -0.2, 0.5),
    )
}

pub fn lattice(d: usize, sites: usize) -> ModeSet {
    build_modes(&LatticeSpec::new(d, sites, 1.0, 1.0, 1.0).expect("valid lattice")).expect("modes")
}

pub fn kick(d: usize, lambda: f64) -> KickSpec {
    KickSpec::new(vec![0; d], lambda)
}

pub fn plan(json: &str) -> Plan {
    serde_json::from_str::<Scenario>(json)
        .expect("valid scenario")
        .compile()
        .expect("compiles")
}
