use nalgebra::{DMatrix, DVector};

use super::{c, Operator, StateVector, C64};
use crate::{Error, Result};

/// Orthogonal projector on a `dim`-dimensional space.
///
/// The range is kept in factored form (orthonormal columns, their orthogonal
/// complement, or a set of computational basis states) so that rank-1,
/// multi-rank and co-rank-1 projectors on large truncated Fock spaces all
/// share one apply path without materializing `dim × dim` matrices.
#[derive(Debug, Clone, PartialEq)]
pub struct Projector {
    dim: usize,
    range: Range,
}

#[derive(Debug, Clone, PartialEq)]
enum Range {
    /// `V V†` with orthonormal columns `V`.
    Span(DMatrix<C64>),
    /// `1 − V V†`.
    Complement(DMatrix<C64>),
    /// Diagonal 0/1 projector onto these basis indices (sorted, unique).
    Coordinates(Vec<usize>),
}

impl Projector {
    /// Projector onto the span of `vectors` (orthonormalized here).
    pub fn onto(vectors: &[DVector<C64>]) -> Result<Self> {
        let dim = vectors
            .first()
            .map(|v| v.len())
            .ok_or_else(|| Error::InvalidProjector("no spanning vectors".into()))?;
        let mut basis: Vec<DVector<C64>> = Vec::with_capacity(vectors.len());
        for v in vectors {
            if v.len() != dim {
                return Err(Error::InvalidProjector(format!(
                    "spanning vectors of mixed length {dim} and {}",
                    v.len()
                )));
            }
            let scale = v.norm();
            let mut w = v.clone();
            // two Gram-Schmidt passes keep the columns orthonormal to ~1e-15
            for _ in 0..2 {
                for b in &basis {
                    let overlap = b.dotc(&w);
                    w -= b * overlap;
                }
            }
            let n = w.norm();
            if scale == 0.0 || n <= 1e-10 * scale {
                return Err(Error::InvalidProjector(
                    "spanning vectors are linearly dependent or zero".into(),
                ));
            }
            basis.push(w / c(n, 0.0));
        }
        Ok(Self {
            dim,
            range: Range::Span(DMatrix::from_columns(&basis)),
        })
    }

    pub fn onto_state(state: &StateVector) -> Result<Self> {
        Self::onto(std::slice::from_ref(state.amplitudes()))
    }

    /// Projector onto the computational basis states listed in `indices`.
    pub fn coordinates(dim: usize, indices: impl IntoIterator<Item = usize>) -> Result<Self> {
        let mut idx: Vec<usize> = indices.into_iter().collect();
        idx.sort_unstable();
        idx.dedup();
        if idx.last().is_some_and(|&i| i >= dim) {
            return Err(Error::InvalidProjector(format!(
                "basis index out of range for dimension {dim}"
            )));
        }
        Ok(Self {
            dim,
            range: Range::Coordinates(idx),
        })
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            dim,
            range: Range::Coordinates((0..dim).collect()),
        }
    }

    pub fn complement(&self) -> Self {
        let range = match &self.range {
            Range::Span(v) => Range::Complement(v.clone()),
            Range::Complement(v) => Range::Span(v.clone()),
            Range::Coordinates(idx) => {
                let mut keep = vec![true; self.dim];
                for &i in idx {
                    keep[i] = false;
                }
                Range::Coordinates((0..self.dim).filter(|&i| keep[i]).collect())
            }
        };
        Self {
            dim: self.dim,
            range,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rank(&self) -> usize {
        match &self.range {
            Range::Span(v) => v.ncols(),
            Range::Complement(v) => self.dim - v.ncols(),
            Range::Coordinates(idx) => idx.len(),
        }
    }

    pub fn apply(&self, v: &DVector<C64>) -> DVector<C64> {
        match &self.range {
            Range::Span(b) => b * (b.adjoint() * v),
            Range::Complement(b) => v - b * (b.adjoint() * v),
            Range::Coordinates(idx) => {
                let mut out = DVector::zeros(v.len());
                for &i in idx {
                    out[i] = v[i];
                }
                out
            }
        }
    }

    /// `⟨v|P|v⟩` without forming `P v` when the range is factored.
    pub fn weight(&self, v: &DVector<C64>) -> f64 {
        match &self.range {
            Range::Span(b) => (b.adjoint() * v).norm_squared(),
            Range::Complement(b) => v.norm_squared() - (b.adjoint() * v).norm_squared(),
            Range::Coordinates(idx) => idx.iter().map(|&i| v[i].norm_sqr()).sum(),
        }
    }

    pub fn to_dense(&self) -> DMatrix<C64> {
        match &self.range {
            Range::Span(b) => b * b.adjoint(),
            Range::Complement(b) => DMatrix::identity(self.dim, self.dim) - b * b.adjoint(),
            Range::Coordinates(idx) => {
                let mut m = DMatrix::zeros(self.dim, self.dim);
                for &i in idx {
                    m[(i, i)] = c(1.0, 0.0);
                }
                m
            }
        }
    }

    pub fn to_operator(&self, dims: Vec<usize>) -> Result<Operator> {
        Operator::hermitian(dims, self.to_dense())
    }
}
