use std::f64::consts::PI;

use nalgebra::DVector;

use super::moments::{product_moments_b, ModeStats};
use super::{poisson_tail, KickParams, MomentsB, OscParams};
use crate::quantum::{c, MeasurementScheme, Outcome, Projector, SchemeKind, StateVector, C64};
use crate::{Error, Result};

/// Outcome of the phase-state `N₊` measurement.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PhaseLabel {
    /// `|n⟩₊ ⊗ χ^(b)_{θ_s}`
    Phase { n: usize, b: usize, s: usize },
    /// `|n⟩₊ ⊗ |m⟩₋` for a level `m ≥ 2S+2` the phase states do not reach.
    Overflow { n: usize, m: usize },
}

impl std::fmt::Display for PhaseLabel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            PhaseLabel::Phase { n, b, s } => write!(f, "n={n},b={b},s={s}"),
            PhaseLabel::Overflow { n, m } => write!(f, "n={n},m={m}"),
        }
    }
}

fn theta(s: usize, s_cut: usize) -> f64 {
    2.0 * PI * s as f64 / (s_cut + 1) as f64
}

fn check_phase_args(b: usize, s: usize, s_cut: usize) -> Result<()> {
    if s_cut % 2 == 1 {
        return Err(Error::InvalidParameter(format!(
            "phase-state cutoff must be even, got {s_cut}"
        )));
    }
    if b > 1 {
        return Err(Error::InvalidParameter(format!(
            "parity bit must be 0 or 1, got {b}"
        )));
    }
    if s > s_cut {
        return Err(Error::InvalidParameter(format!(
            "phase index {s} exceeds cutoff {s_cut}"
        )));
    }
    Ok(())
}

fn phase_amplitudes(b: usize, s: usize, s_cut: usize, levels: usize) -> DVector<C64> {
    let th = theta(s, s_cut);
    let norm = 1.0 / ((s_cut + 1) as f64).sqrt();
    let mut v = DVector::zeros(levels);
    for j in 0..=s_cut {
        let k = 2 * j + b;
        v[k] = C64::from_polar(norm, k as f64 * th);
    }
    v
}

/// `χ^(b)_{θ_s} = (S+1)^{−1/2} Σ_{j=0}^{S} e^{i(2j+b)θ_s}|2j+b⟩`,
/// `θ_s = 2πs/(S+1)`, on a single mode with `levels` Fock levels.
///
/// `S` must be even: then `S+1` is odd and the family is exactly
/// orthonormal at finite `S`.
pub fn phase_state(b: usize, s: usize, s_cut: usize, levels: usize) -> Result<StateVector> {
    check_phase_args(b, s, s_cut)?;
    if levels < 2 * s_cut + b + 1 {
        return Err(Error::InvalidParameter(format!(
            "{levels} levels cannot hold a phase state with cutoff {s_cut}"
        )));
    }
    StateVector::from_dvector(vec![levels], phase_amplitudes(b, s, s_cut, levels))
}

/// Complete orthogonal scheme `{|n⟩₊ ⊗ χ^(b)_{θ_s}}` on a (+, −) space of
/// dims `[d₊, d₋]`, plus `|n⟩₊ ⊗ |m⟩₋` for the levels `m ≥ 2S+2` beyond the
/// phase states. Outcome order: `n`, then `b`, then `s`, overflow last.
pub fn phase_scheme_nplus(
    s_cut: usize,
    dims: [usize; 2],
) -> Result<(MeasurementScheme, Vec<PhaseLabel>)> {
    check_phase_args(0, 0, s_cut)?;
    let [dp, dm] = dims;
    if dm < 2 * s_cut + 2 {
        return Err(Error::InvalidParameter(format!(
            "mode − needs at least {} levels for cutoff {s_cut}, got {dm}",
            2 * s_cut + 2
        )));
    }
    if dp == 0 {
        return Err(Error::InvalidParameter(
            "mode + needs at least one level".into(),
        ));
    }
    let total = dp * dm;
    let mut outcomes = Vec::with_capacity(total);
    let mut labels = Vec::with_capacity(total);
    let chis: Vec<Vec<DVector<C64>>> = (0..2)
        .map(|b| {
            (0..=s_cut)
                .map(|s| phase_amplitudes(b, s, s_cut, dm))
                .collect()
        })
        .collect();
    for n in 0..dp {
        for (b, row) in chis.iter().enumerate() {
            for (s, chi) in row.iter().enumerate() {
                let mut v = DVector::zeros(total);
                v.rows_mut(n * dm, dm).copy_from(chi);
                let label = PhaseLabel::Phase { n, b, s };
                outcomes.push(Outcome {
                    label: label.to_string(),
                    projector: Projector::onto(&[v])?,
                });
                labels.push(label);
            }
        }
        for m in 2 * s_cut + 2..dm {
            let label = PhaseLabel::Overflow { n, m };
            outcomes.push(Outcome {
                label: label.to_string(),
                projector: Projector::coordinates(total, [n * dm + m])?,
            });
            labels.push(label);
        }
    }
    let scheme =
        MeasurementScheme::trusted(dims.to_vec(), outcomes, SchemeKind::CompleteOrthogonal)?;
    Ok((scheme, labels))
}

/// `Σ_k zᵏ/√k!` over `k = b, b+2, …, 2S+b`.
fn parity_series(z: C64, b: usize, s_cut: usize) -> C64 {
    let mut term = c(1.0, 0.0);
    let mut sum = c(0.0, 0.0);
    for k in 0..=2 * s_cut + b {
        if k > 0 {
            term *= z / (k as f64).sqrt();
        }
        if k % 2 == b {
            sum += term;
        }
    }
    sum
}

/// Closed-form amplitude of `|n⟩₊ ⊗ χ^(b)_{θ_s}` in the kicked prestate:
///
/// `c = e^{−(Λ₊²+Λ₋²)/2} (iΛ₊)ⁿ/√n! Σ_{j=0}^{S} (iΛ₋e^{−iθ_s})^{2j+b}/√((2j+b)!(S+1))`.
pub fn phase_coefficient(
    n: usize,
    b: usize,
    s: usize,
    s_cut: usize,
    lambda_plus: f64,
    lambda_minus: f64,
) -> Result<C64> {
    check_phase_args(b, s, s_cut)?;
    Ok(plus_amplitude(n, lambda_plus) * minus_phase_amplitude(b, s, s_cut, lambda_minus))
}

fn plus_amplitude(n: usize, lp: f64) -> C64 {
    let mut a = c((-0.5 * lp * lp).exp(), 0.0);
    for k in 1..=n {
        a *= c(0.0, lp) / (k as f64).sqrt();
    }
    a
}

fn minus_phase_amplitude(b: usize, s: usize, s_cut: usize, lm: f64) -> C64 {
    let z = c(0.0, lm) * C64::from_polar(1.0, -theta(s, s_cut));
    (-0.5 * lm * lm).exp() * parity_series(z, b, s_cut) / ((s_cut + 1) as f64).sqrt()
}

/// Moments of B after the phase-state measurement on the kicked prestate,
/// summed outcome by outcome in the untruncated two-mode space.
///
/// Each outcome is a product state, so its B moments follow from the mode
/// moments `⟨a⟩`, `⟨a²⟩`, `⟨a†a⟩` of `|n⟩` and `χ^(b)_{θ_s}`; only the
/// weights depend on λ. The cost is linear in `S`, which makes large
/// cutoffs cheap.
pub fn phase_moments_fast(params: &OscParams, kick: KickParams, s_cut: usize) -> Result<MomentsB> {
    check_phase_args(0, 0, s_cut)?;
    params.validate()?;
    let (lp, lm) = kick.big_lambdas(params);
    let (mu_p, mu_m) = (lp * lp, lm * lm);
    let negligible = 1e-17;

    // mode −: phase outcomes then Fock overflow levels m ≥ 2S+2
    let mut minus: Vec<(f64, ModeStats)> = Vec::new();
    let norm = 1.0 / (s_cut + 1) as f64;
    for b in 0..2 {
        let ladder: f64 = (0..s_cut)
            .map(|j| {
                let k = (2 * j + b) as f64;
                ((k + 1.0) * (k + 2.0)).sqrt()
            })
            .sum();
        for s in 0..=s_cut {
            let w = minus_phase_amplitude(b, s, s_cut, lm).norm_sqr();
            let a2 = C64::from_polar(ladder * norm, 2.0 * theta(s, s_cut));
            minus.push((
                w,
                ModeStats {
                    a: c(0.0, 0.0),
                    a2,
                    n: (s_cut + b) as f64,
                },
            ));
        }
    }
    let mut m = 2 * s_cut + 2;
    let mut pm = if mu_m == 0.0 {
        0.0
    } else {
        poisson_tail(mu_m, m) - poisson_tail(mu_m, m + 1)
    };
    let mut tail_m = poisson_tail(mu_m, m);
    while tail_m > negligible {
        minus.push((pm, ModeStats::fock(m)));
        tail_m -= pm;
        m += 1;
        pm *= mu_m / m as f64;
    }

    let mut acc = [0.0; 5];
    let mut pn = (-mu_p).exp();
    let mut n = 0;
    loop {
        for (w, stats) in &minus {
            let mo = product_moments_b(params, ModeStats::fock(n), *stats);
            for (a, x) in acc.iter_mut().zip(mo) {
                *a += pn * w * x;
            }
        }
        n += 1;
        pn *= mu_p / n as f64;
        if n as f64 > mu_p && poisson_tail(mu_p, n) <= negligible {
            break;
        }
    }
    let tail = poisson_tail(mu_p, n) + tail_m.max(0.0);
    Ok(MomentsB {
        q: acc[0],
        p: acc[1],
        q2: acc[2],
        p2: acc[3],
        energy: acc[4],
        tail_bound: tail,
    })
}
