use rayon::prelude::*;

use super::{MeasurementScheme, Observable, StateVector};
use crate::{Error, NumericPolicy, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct OutcomeEntry {
    pub label: String,
    pub probability: f64,
    post_state: Option<StateVector>,
    /// Probability below the zero-branch threshold; kept so that
    /// "with probability 0" outcomes stay visible.
    pub zero_branch: bool,
}

impl OutcomeEntry {
    /// Renormalized post-measurement state; fails on a zero branch.
    pub fn post_state(&self) -> Result<&StateVector> {
        self.post_state.as_ref().ok_or_else(|| Error::ZeroBranch {
            label: self.label.clone(),
        })
    }
}

/// Outcomes of one measurement with their Born weights and post-states.
#[derive(Debug, Clone, PartialEq)]
pub struct OutcomeEnsemble {
    entries: Vec<OutcomeEntry>,
    tail_bound: f64,
}

impl OutcomeEnsemble {
    pub fn entries(&self) -> &[OutcomeEntry] {
        &self.entries
    }

    pub fn entry(&self, label: &str) -> Option<&OutcomeEntry> {
        self.entries.iter().find(|e| e.label == label)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Probability weight lost to truncation of the underlying space.
    pub fn tail_bound(&self) -> f64 {
        self.tail_bound
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.entries.iter().map(|e| e.probability).collect()
    }

    pub fn total_probability(&self) -> f64 {
        self.entries.iter().map(|e| e.probability).sum()
    }

    /// `Σ_i p_i ⟨O⟩_i` over renormalized post-states; zero branches add 0.
    pub fn expectation(&self, obs: &dyn Observable) -> Result<f64> {
        let parts = self
            .entries
            .par_iter()
            .map(|e| match &e.post_state {
                Some(s) => Ok(e.probability * s.expectation(obs)?),
                None => Ok(0.0),
            })
            .collect::<Result<Vec<f64>>>()?;
        Ok(parts.iter().sum())
    }
}

fn check_dims(state: &StateVector, scheme: &MeasurementScheme) -> Result<()> {
    if state.dims() != scheme.dims() {
        return Err(Error::DimensionMismatch {
            expected: scheme.dims().to_vec(),
            found: state.dims().to_vec(),
        });
    }
    Ok(())
}

/// Born-rule ensemble of a normalized state.
pub fn born_ensemble(scheme: &MeasurementScheme, state: &StateVector) -> Result<OutcomeEnsemble> {
    born_ensemble_with_tail(scheme, state, 0.0)
}

/// Born-rule ensemble of a state truncated from a larger space, whose norm
/// squared plus `tail_bound` is one.
pub fn born_ensemble_with_tail(
    scheme: &MeasurementScheme,
    state: &StateVector,
    tail_bound: f64,
) -> Result<OutcomeEnsemble> {
    check_dims(state, scheme)?;
    let policy = NumericPolicy::DEFAULT;
    let norm_sq = state.norm() * state.norm();
    if (norm_sq + tail_bound - 1.0).abs() > policy.exact.max(1e-3 * policy.structural) {
        return Err(Error::NotNormalized { norm: state.norm() });
    }
    let entries = scheme
        .outcomes()
        .par_iter()
        .map(|o| {
            let projected = o.projector.apply(state.amplitudes());
            let probability = projected.norm_squared();
            let zero_branch = probability < policy.zero_branch;
            let post_state = if zero_branch {
                None
            } else {
                Some(state.with_amplitudes(projected).normalized()?)
            };
            Ok(OutcomeEntry {
                label: o.label.clone(),
                probability,
                post_state,
                zero_branch,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(OutcomeEnsemble {
        entries,
        tail_bound,
    })
}

/// `Σ_i ⟨ψ|P_i O P_i|ψ⟩`, the outcome-averaged expectation after the
/// measurement, evaluated without renormalizing the branches.
pub fn post_measurement_expectation(
    state: &StateVector,
    scheme: &MeasurementScheme,
    obs: &dyn Observable,
) -> Result<f64> {
    check_dims(state, scheme)?;
    if obs.dims() != scheme.dims() {
        return Err(Error::DimensionMismatch {
            expected: scheme.dims().to_vec(),
            found: obs.dims().to_vec(),
        });
    }
    let parts: Vec<f64> = scheme
        .outcomes()
        .par_iter()
        .map(|o| obs.sandwich(&o.projector.apply(state.amplitudes())))
        .collect();
    Ok(parts.iter().sum())
}
