use nalgebra::DVector;

use super::{c, strides, total_dim, Observable, C64};
use crate::{Error, Result};

/// Pure state on a composite space.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    dims: Vec<usize>,
    amplitudes: DVector<C64>,
    norm: f64,
}

impl StateVector {
    pub fn new(dims: Vec<usize>, amplitudes: Vec<C64>) -> Result<Self> {
        Self::from_dvector(dims, DVector::from_vec(amplitudes))
    }

    pub fn from_dvector(dims: Vec<usize>, amplitudes: DVector<C64>) -> Result<Self> {
        if dims.is_empty() || dims.contains(&0) {
            return Err(Error::InvalidParameter(format!(
                "subsystem dimensions must be positive, got {dims:?}"
            )));
        }
        if amplitudes.len() != total_dim(&dims) {
            return Err(Error::DimensionMismatch {
                expected: dims,
                found: vec![amplitudes.len()],
            });
        }
        let norm = amplitudes.norm();
        Ok(Self {
            dims,
            amplitudes,
            norm,
        })
    }

    pub fn from_real(dims: Vec<usize>, amplitudes: &[f64]) -> Result<Self> {
        Self::new(dims, amplitudes.iter().map(|&x| c(x, 0.0)).collect())
    }

    /// Computational basis state with the given per-slot indices.
    pub fn basis(dims: Vec<usize>, index: &[usize]) -> Result<Self> {
        if index.len() != dims.len() || index.iter().zip(&dims).any(|(&i, &d)| i >= d) {
            return Err(Error::InvalidParameter(format!(
                "basis index {index:?} invalid for dims {dims:?}"
            )));
        }
        let flat: usize = index.iter().zip(strides(&dims)).map(|(i, s)| i * s).sum();
        let mut amps = DVector::zeros(total_dim(&dims));
        amps[flat] = c(1.0, 0.0);
        Self::from_dvector(dims, amps)
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &DVector<C64> {
        &self.amplitudes
    }

    pub fn amplitude(&self, index: &[usize]) -> C64 {
        let flat: usize = index
            .iter()
            .zip(strides(&self.dims))
            .map(|(i, s)| i * s)
            .sum();
        self.amplitudes[flat]
    }

    pub fn norm(&self) -> f64 {
        self.norm
    }

    pub fn is_normalized(&self, tol: f64) -> bool {
        (self.norm - 1.0).abs() <= tol
    }

    pub fn normalized(&self) -> Result<Self> {
        if self.norm == 0.0 || !self.norm.is_finite() {
            return Err(Error::ZeroVector);
        }
        Self::from_dvector(self.dims.clone(), &self.amplitudes / c(self.norm, 0.0))
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &StateVector) -> C64 {
        self.amplitudes.dotc(&other.amplitudes)
    }

    /// Equality up to a global phase: `|⟨a|b⟩| = ‖a‖‖b‖` within `tol`.
    pub fn same_ray(&self, other: &StateVector, tol: f64) -> bool {
        self.dims == other.dims && (self.inner(other).norm() - self.norm * other.norm).abs() <= tol
    }

    /// `⟨ψ|O|ψ⟩` for a normalized state.
    pub fn expectation(&self, obs: &dyn Observable) -> Result<f64> {
        if obs.dims() != self.dims.as_slice() {
            return Err(Error::DimensionMismatch {
                expected: obs.dims().to_vec(),
                found: self.dims.clone(),
            });
        }
        Ok(obs.sandwich(&self.amplitudes))
    }

    pub(crate) fn with_amplitudes(&self, amplitudes: DVector<C64>) -> Self {
        let norm = amplitudes.norm();
        Self {
            dims: self.dims.clone(),
            amplitudes,
            norm,
        }
    }
}

/// Tensor product of normalized factors; dims are concatenated.
pub fn tensor_state(factors: &[StateVector]) -> Result<StateVector> {
    let (first, rest) = factors.split_first().ok_or(Error::EmptyFactors)?;
    for f in factors {
        if !f.is_normalized(1e-12) {
            return Err(Error::NotNormalized { norm: f.norm() });
        }
    }
    let mut dims = first.dims.clone();
    let mut amps = first.amplitudes.clone();
    for f in rest {
        dims.extend_from_slice(&f.dims);
        amps = amps.kronecker(&f.amplitudes);
    }
    StateVector::from_dvector(dims, amps)
}
