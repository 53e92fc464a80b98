use nalgebra::DMatrix;

use super::{strides, total_dim, Operator, C64};
use crate::{Error, Result};

/// Partial trace of `op` over every slot not listed in `keep`.
pub fn partial_trace(op: &Operator, keep: &[usize]) -> Result<Operator> {
    let dims = op.dims();
    let mut keep: Vec<usize> = keep.to_vec();
    keep.sort_unstable();
    keep.dedup();
    if let Some(&slot) = keep.iter().find(|&&s| s >= dims.len()) {
        return Err(Error::SlotOutOfRange {
            slot,
            count: dims.len(),
        });
    }
    let traced: Vec<usize> = (0..dims.len()).filter(|s| !keep.contains(s)).collect();
    let kept_dims: Vec<usize> = keep.iter().map(|&s| dims[s]).collect();
    let traced_dims: Vec<usize> = traced.iter().map(|&s| dims[s]).collect();
    let st = strides(dims);
    let offsets = |slots: &[usize], sub_dims: &[usize]| -> Vec<usize> {
        let sub_st = strides(sub_dims);
        (0..total_dim(sub_dims))
            .map(|k| {
                slots
                    .iter()
                    .zip(sub_dims.iter().zip(&sub_st))
                    .map(|(&s, (&d, &w))| (k / w % d) * st[s])
                    .sum()
            })
            .collect()
    };
    let kept_off = offsets(&keep, &kept_dims);
    let traced_off = offsets(&traced, &traced_dims);
    let m = op.matrix();
    let nk = kept_off.len();
    let out = DMatrix::<C64>::from_fn(nk, nk, |i, j| {
        traced_off
            .iter()
            .map(|&t| m[(kept_off[i] + t, kept_off[j] + t)])
            .sum()
    });
    if op.is_hermitian() {
        Operator::hermitian(kept_dims, out)
    } else {
        Operator::new(kept_dims, out)
    }
}

/// Reduced projector `Tr_{others}(P)` on subsystem `keep`.
pub fn reduced_projector(proj: &Operator, keep: usize) -> Result<Operator> {
    if proj.dims().len() < 2 {
        return Err(Error::DimensionMismatch {
            expected: vec![0, 0],
            found: proj.dims().to_vec(),
        });
    }
    partial_trace(proj, &[keep])
}
