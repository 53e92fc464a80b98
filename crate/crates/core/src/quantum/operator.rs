use nalgebra::{DMatrix, DVector};

use super::{c, total_dim, C64};
use crate::{Error, Result};

/// Hermitian quantity that can be sandwiched between (unnormalized) vectors.
///
/// `sandwich(v)` returns `⟨v|O|v⟩` without dividing by `⟨v|v⟩`, which is what
/// the unnormalized-sum form of a post-measurement average needs.
pub trait Observable: Send + Sync {
    fn dims(&self) -> &[usize];
    fn sandwich(&self, v: &DVector<C64>) -> f64;
}

/// Dense operator on a composite space.
#[derive(Debug, Clone, PartialEq)]
pub struct Operator {
    dims: Vec<usize>,
    matrix: DMatrix<C64>,
    hermitian: bool,
}

impl Operator {
    pub fn new(dims: Vec<usize>, matrix: DMatrix<C64>) -> Result<Self> {
        let n = total_dim(&dims);
        if matrix.nrows() != n || matrix.ncols() != n {
            return Err(Error::DimensionMismatch {
                expected: dims,
                found: vec![matrix.nrows(), matrix.ncols()],
            });
        }
        Ok(Self {
            dims,
            matrix,
            hermitian: false,
        })
    }

    /// Operator flagged hermitian; fails if `max|M − M†| > 1e-12`.
    pub fn hermitian(dims: Vec<usize>, matrix: DMatrix<C64>) -> Result<Self> {
        let mut op = Self::new(dims, matrix)?;
        let deviation = op.hermiticity_deviation();
        if deviation > 1e-12 {
            return Err(Error::NotHermitian { deviation });
        }
        op.hermitian = true;
        Ok(op)
    }

    pub fn from_real(dims: Vec<usize>, rows: &[&[f64]]) -> Result<Self> {
        let n = rows.len();
        let matrix = DMatrix::from_fn(n, n, |i, j| c(rows[i][j], 0.0));
        Self::new(dims, matrix)
    }

    pub fn identity(dims: Vec<usize>) -> Self {
        let n = total_dim(&dims);
        Self {
            dims,
            matrix: DMatrix::identity(n, n),
            hermitian: true,
        }
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.matrix
    }

    pub fn is_hermitian(&self) -> bool {
        self.hermitian
    }

    pub fn hermiticity_deviation(&self) -> f64 {
        max_abs(&(&self.matrix - self.matrix.adjoint()))
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            dims: self.dims.clone(),
            matrix: &self.matrix * c(factor, 0.0),
            hermitian: self.hermitian,
        }
    }

    pub fn add(&self, other: &Operator) -> Result<Self> {
        if self.dims != other.dims {
            return Err(Error::DimensionMismatch {
                expected: self.dims.clone(),
                found: other.dims.clone(),
            });
        }
        Ok(Self {
            dims: self.dims.clone(),
            matrix: &self.matrix + &other.matrix,
            hermitian: self.hermitian && other.hermitian,
        })
    }

    pub fn compose(&self, other: &Operator) -> Result<Self> {
        if self.dims != other.dims {
            return Err(Error::DimensionMismatch {
                expected: self.dims.clone(),
                found: other.dims.clone(),
            });
        }
        Self::new(self.dims.clone(), &self.matrix * &other.matrix)
    }

    pub fn apply(&self, v: &DVector<C64>) -> DVector<C64> {
        &self.matrix * v
    }
}

impl Observable for Operator {
    fn dims(&self) -> &[usize] {
        &self.dims
    }

    fn sandwich(&self, v: &DVector<C64>) -> f64 {
        v.dotc(&(&self.matrix * v)).re
    }
}

/// Real linear combination of observables on the same space.
pub struct ObservableSum {
    dims: Vec<usize>,
    parts: Vec<(f64, Box<dyn Observable>)>,
}

impl ObservableSum {
    pub fn new(parts: Vec<(f64, Box<dyn Observable>)>) -> Result<Self> {
        let dims = parts
            .first()
            .map(|(_, o)| o.dims().to_vec())
            .ok_or_else(|| Error::InvalidParameter("empty observable sum".into()))?;
        if let Some((_, bad)) = parts.iter().find(|(_, o)| o.dims() != dims.as_slice()) {
            return Err(Error::DimensionMismatch {
                expected: dims,
                found: bad.dims().to_vec(),
            });
        }
        Ok(Self { dims, parts })
    }
}

impl Observable for ObservableSum {
    fn dims(&self) -> &[usize] {
        &self.dims
    }

    fn sandwich(&self, v: &DVector<C64>) -> f64 {
        self.parts.iter().map(|(w, o)| w * o.sandwich(v)).sum()
    }
}

pub(crate) fn max_abs(m: &DMatrix<C64>) -> f64 {
    m.iter().fold(0.0, |acc, z| acc.max(z.norm()))
}

/// Lift a single-subsystem operator to the composite space, acting as the
/// identity on every other slot.
pub fn embed_local(op: &Operator, slot: usize, dims: &[usize]) -> Result<Operator> {
    if slot >= dims.len() {
        return Err(Error::SlotOutOfRange {
            slot,
            count: dims.len(),
        });
    }
    if op.dims() != [dims[slot]] && total_dim(op.dims()) != dims[slot] {
        return Err(Error::DimensionMismatch {
            expected: vec![dims[slot]],
            found: op.dims().to_vec(),
        });
    }
    let before: usize = dims[..slot].iter().product();
    let after: usize = dims[slot + 1..].iter().product();
    let matrix = DMatrix::<C64>::identity(before, before)
        .kronecker(op.matrix())
        .kronecker(&DMatrix::<C64>::identity(after, after));
    Ok(Operator {
        dims: dims.to_vec(),
        matrix,
        hermitian: op.hermitian,
    })
}

/// `a†a` on a single mode truncated to `levels`.
pub fn number_operator(levels: usize) -> Operator {
    let matrix = DMatrix::from_fn(levels, levels, |i, j| {
        if i == j {
            c(i as f64, 0.0)
        } else {
            c(0.0, 0.0)
        }
    });
    Operator {
        dims: vec![levels],
        matrix,
        hermitian: true,
    }
}
