use nalgebra::DVector;

use super::{strides, Observable, C64};
use crate::{Error, Result};

/// Applies the truncated lowering operator of subsystem `slot` to `v`.
pub fn lower(dims: &[usize], v: &DVector<C64>, slot: usize) -> DVector<C64> {
    let st = strides(dims);
    let (d, s) = (dims[slot], st[slot]);
    let mut out = DVector::zeros(v.len());
    for flat in 0..v.len() {
        let n = (flat / s) % d;
        if n + 1 < d {
            out[flat] = v[flat + s] * ((n + 1) as f64).sqrt();
        }
    }
    out
}

/// `A = Σ_k u_k b_k` applied to `v`.
fn apply_lowering_sum(dims: &[usize], terms: &[(usize, C64)], v: &DVector<C64>) -> DVector<C64> {
    let mut out = DVector::zeros(v.len());
    for &(slot, u) in terms {
        out += lower(dims, v, slot) * u;
    }
    out
}

/// Hermitian quadrature `X = A + A†` with `A = Σ_k u_k b_k` over bosonic
/// slots of a truncated Fock space.
///
/// Expectations are taken in normal order, so they equal the untruncated
/// operator's values for any state supported inside the truncation.
#[derive(Debug, Clone, PartialEq)]
pub struct Quadrature {
    dims: Vec<usize>,
    terms: Vec<(usize, C64)>,
}

impl Quadrature {
    pub fn new(dims: Vec<usize>, terms: Vec<(usize, C64)>) -> Result<Self> {
        if let Some(&(slot, _)) = terms.iter().find(|(s, _)| *s >= dims.len()) {
            return Err(Error::SlotOutOfRange {
                slot,
                count: dims.len(),
            });
        }
        Ok(Self { dims, terms })
    }

    pub fn terms(&self) -> &[(usize, C64)] {
        &self.terms
    }

    /// `Σ_k |u_k|²`, the commutator `[A, A†]`.
    pub fn commutator(&self) -> f64 {
        self.terms.iter().map(|(_, u)| u.norm_sqr()).sum()
    }

    pub fn square(&self) -> QuadratureSquare {
        QuadratureSquare(self.clone())
    }

    fn lowered(&self, v: &DVector<C64>) -> DVector<C64> {
        apply_lowering_sum(&self.dims, &self.terms, v)
    }
}

impl Observable for Quadrature {
    fn dims(&self) -> &[usize] {
        &self.dims
    }

    fn sandwich(&self, v: &DVector<C64>) -> f64 {
        2.0 * v.dotc(&self.lowered(v)).re
    }
}

/// `X²` for a [`Quadrature`] X, via `⟨X²⟩ = 2Re⟨A²⟩ + 2‖Aψ‖² + [A, A†]‖ψ‖²`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureSquare(Quadrature);

impl Observable for QuadratureSquare {
    fn dims(&self) -> &[usize] {
        &self.0.dims
    }

    fn sandwich(&self, v: &DVector<C64>) -> f64 {
        let av = self.0.lowered(v);
        let aav = self.0.lowered(&av);
        2.0 * v.dotc(&aav).re + 2.0 * av.norm_squared() + self.0.commutator() * v.norm_squared()
    }
}
