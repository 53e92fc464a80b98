//! Dense finite-dimensional Hilbert-space engine.
//!
//! States and operators live on a composite space described by a list of
//! subsystem dimensions; amplitudes are stored row-major over the subsystem
//! indices, so slot 0 varies slowest. Every value is immutable after
//! construction.

mod ensemble;
mod ladder;
mod operator;
mod projector;
mod scheme;
mod state;
mod trace;

pub use ensemble::{
    born_ensemble, born_ensemble_with_tail, post_measurement_expectation, OutcomeEnsemble,
    OutcomeEntry,
};
pub use ladder::{lower, Quadrature, QuadratureSquare};
pub use operator::{embed_local, number_operator, Observable, ObservableSum, Operator};
pub use projector::Projector;
pub use scheme::{
    qndsv_scheme, validate_scheme, MeasurementScheme, Outcome, SchemeDiagnostics, SchemeKind,
};
pub use state::{tensor_state, StateVector};
pub use trace::{partial_trace, reduced_projector};

pub type C64 = num_complex::Complex64;

pub(crate) fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub(crate) fn total_dim(dims: &[usize]) -> usize {
    dims.iter().product()
}

/// Row-major strides for `dims` (last slot has stride 1).
pub(crate) fn strides(dims: &[usize]) -> Vec<usize> {
    let mut out = vec![1; dims.len()];
    for i in (0..dims.len().saturating_sub(1)).rev() {
        out[i] = out[i + 1] * dims[i + 1];
    }
    out
}
