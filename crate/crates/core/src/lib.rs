//! Finite-dimensional simulation of projective-measurement prescriptions on
//! bipartite systems (two spins, two oscillators, a lattice scalar field),
//! together with the diagnostics that measure how much a distant observer's
//! local expectation values depend on a spacelike-separated local operation.
//!
//! Layout:
//! - [`quantum`]: states, operators, projectors, measurement schemes and Born-rule ensembles.
//! - [`spin`]: two-spin builders and the total-spin measurement prescriptions.
//! - [`oscillator`]: two oscillators in truncated Fock space, the naive and phase-state `N₊` measurements.
//! - [`field`]: periodic-lattice scalar field, closed-form expectation values and a truncated-Fock oracle.
//! - [`harness`]: scenarios, signaling reports, cutoff sweeps and scheme comparisons.

pub mod error;
pub mod field;
pub mod harness;
pub mod oscillator;
pub mod policy;
pub mod quantum;
pub mod spin;

pub use error::{Error, Result};
pub use policy::NumericPolicy;
pub use quantum::{
    born_ensemble, embed_local, post_measurement_expectation, qndsv_scheme, reduced_projector,
    tensor_state, validate_scheme, MeasurementScheme, Observable, Operator, OutcomeEnsemble,
    Projector, SchemeKind, StateVector, C64,
};
