use nalgebra::{DMatrix, DVector};

use super::{ModeBasis, TwoModeFock};
use crate::quantum::{c, StateVector};
use crate::{Error, Result};

/// Real orthogonal blocks of the 50:50 transform, one per total photon
/// number `N`: column `k` holds `|k, N−k⟩` of the input modes expanded over
/// `|m, N−m⟩` of the output modes.
///
/// Built by applying `a_0† = (b_0† + b_1†)/√2`, `a_1† = (b_0† − b_1†)/√2`
/// one quantum at a time, which stays accurate where the closed-form
/// alternating binomial sums cancel catastrophically. The same blocks map
/// (A, B) to (+, −) and back, so the transform is its own inverse.
fn blocks(n_max: usize) -> Vec<DMatrix<f64>> {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let mut out: Vec<DMatrix<f64>> = vec![DMatrix::from_element(1, 1, 1.0)];
    for n in 1..=n_max {
        let prev = &out[n - 1];
        let mut cur = DMatrix::zeros(n + 1, n + 1);
        for k in 0..=n {
            // |k, n−k⟩ from |k−1, n−k⟩ via a_0†, or |0, n⟩ from |0, n−1⟩ via a_1†
            let (src, sign, norm) = if k > 0 {
                (k - 1, 1.0, (k as f64).sqrt())
            } else {
                (0, -1.0, (n as f64).sqrt())
            };
            for m in 0..n {
                let u = prev[(m, src)];
                if u == 0.0 {
                    continue;
                }
                cur[(m + 1, k)] += h * ((m + 1) as f64).sqrt() * u / norm;
                cur[(m, k)] += sign * h * ((n - m) as f64).sqrt() * u / norm;
            }
        }
        out.push(cur);
    }
    out
}

fn transform(state: &TwoModeFock, from: ModeBasis, to: ModeBasis) -> Result<TwoModeFock> {
    if state.basis() != from {
        return Err(Error::WrongBasis {
            expected: from.name(),
            found: state.basis().name(),
        });
    }
    let [d0, d1] = state.dims();
    let n_max = d0 + d1 - 2;
    let dout = n_max + 1;
    let blocks = blocks(n_max);
    let mut amps = DVector::zeros(dout * dout);
    for (n, u) in blocks.iter().enumerate() {
        let input = DVector::from_fn(n + 1, |k, _| {
            if k < d0 && n - k < d1 {
                state.amplitude(k, n - k)
            } else {
                c(0.0, 0.0)
            }
        });
        for m in 0..=n {
            amps[m * dout + (n - m)] = (0..=n).map(|k| input[k] * u[(m, k)]).sum();
        }
    }
    TwoModeFock::new(
        *state.params(),
        to,
        StateVector::from_dvector(vec![dout, dout], amps)?,
        state.tail_bound(),
    )
}

/// `(A, B) → (+, −)` with `a_± = (a_A ± a_B)/√2`.
///
/// The output keeps every level reachable from the input (per-mode
/// dimension `d_A + d_B − 1`), so no amplitude is lost; use
/// [`TwoModeFock::crop`] to trim.
pub fn ab_to_pm(state: &TwoModeFock) -> Result<TwoModeFock> {
    transform(state, ModeBasis::AB, ModeBasis::PM)
}

/// Inverse of [`ab_to_pm`].
pub fn pm_to_ab(state: &TwoModeFock) -> Result<TwoModeFock> {
    transform(state, ModeBasis::PM, ModeBasis::AB)
}
