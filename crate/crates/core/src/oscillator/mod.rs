//! Two harmonic oscillators A and B in truncated Fock space.
//!
//! The centre-of-mass and relative modes are `a_± = (a_A ± a_B)/√2`. A
//! momentum kick `e^{iqQ/ħ}` on a ground state gives the coherent amplitude
//! `α = iq/(√2 ħκ)` with `κ = √(mΩ/ħ)`, so the kicked prestate has mode
//! amplitudes `iΛ_±`, `Λ_± = (p_A ± p_B + λ)/(2ħκ)`.

mod beamsplitter;
mod moments;
mod phase;

pub use beamsplitter::{ab_to_pm, pm_to_ab};
pub use moments::{
    local_moments_b, local_moments_b_after, local_moments_b_ensemble, BObservable, MomentsB,
};
pub use phase::{
    phase_coefficient, phase_moments_fast, phase_scheme_nplus, phase_state, PhaseLabel,
};

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use crate::quantum::{
    born_ensemble_with_tail, c, MeasurementScheme, OutcomeEnsemble, StateVector, C64,
};
use crate::{Error, NumericPolicy, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OscParams {
    pub mass: f64,
    pub omega: f64,
    pub hbar: f64,
}

impl OscParams {
    pub fn new(mass: f64, omega: f64, hbar: f64) -> Result<Self> {
        let p = Self { mass, omega, hbar };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("mass", self.mass),
            ("omega", self.omega),
            ("hbar", self.hbar),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::InvalidParameter(format!(
                    "{name} must be positive, got {v}"
                )));
            }
        }
        Ok(())
    }

    /// `κ = √(mΩ/ħ)`, the inverse oscillator length.
    pub fn kappa(&self) -> f64 {
        (self.mass * self.omega / self.hbar).sqrt()
    }
}

impl Default for OscParams {
    fn default() -> Self {
        Self {
            mass: 1.0,
            omega: 1.0,
            hbar: 1.0,
        }
    }
}

/// Initial momenta and Alice's kick on `Q_A`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KickParams {
    pub p_a: f64,
    pub p_b: f64,
    pub lambda: f64,
}

impl KickParams {
    pub fn new(p_a: f64, p_b: f64, lambda: f64) -> Self {
        Self { p_a, p_b, lambda }
    }

    /// `λ_+ = p_A + p_B + λ`
    pub fn lambda_plus(&self) -> f64 {
        self.p_a + self.p_b + self.lambda
    }

    /// `λ_− = p_A − p_B + λ`
    pub fn lambda_minus(&self) -> f64 {
        self.p_a - self.p_b + self.lambda
    }

    /// `(Λ_+, Λ_−) = λ_±/(2ħκ)`
    pub fn big_lambdas(&self, params: &OscParams) -> (f64, f64) {
        let scale = 2.0 * params.hbar * params.kappa();
        (self.lambda_plus() / scale, self.lambda_minus() / scale)
    }

    /// Coherent amplitudes of modes A and B: `i p/(√2 ħκ)` with the kick on A.
    pub fn ab_amplitudes(&self, params: &OscParams) -> (C64, C64) {
        let scale = std::f64::consts::SQRT_2 * params.hbar * params.kappa();
        (
            c(0.0, (self.p_a + self.lambda) / scale),
            c(0.0, self.p_b / scale),
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ModeBasis {
    /// Slots are the physical oscillators (A, B).
    AB,
    /// Slots are the modes (+, −).
    PM,
}

impl ModeBasis {
    pub fn name(&self) -> &'static str {
        match self {
            ModeBasis::AB => "AB",
            ModeBasis::PM => "PM",
        }
    }
}

/// Truncated two-mode Fock amplitudes, `n_0` slowest.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoModeFock {
    params: OscParams,
    basis: ModeBasis,
    state: StateVector,
    tail_bound: f64,
}

impl TwoModeFock {
    /// Wraps amplitudes whose squared norm plus `tail_bound` is one.
    pub fn new(
        params: OscParams,
        basis: ModeBasis,
        state: StateVector,
        tail_bound: f64,
    ) -> Result<Self> {
        params.validate()?;
        if state.dims().len() != 2 {
            return Err(Error::InvalidParameter(format!(
                "two-mode state needs two slots, got dims {:?}",
                state.dims()
            )));
        }
        let total = state.norm() * state.norm() + tail_bound;
        if (total - 1.0).abs() > NumericPolicy::DEFAULT.structural {
            return Err(Error::NotNormalized { norm: state.norm() });
        }
        Ok(Self {
            params,
            basis,
            state,
            tail_bound,
        })
    }

    pub fn params(&self) -> &OscParams {
        &self.params
    }

    pub fn basis(&self) -> ModeBasis {
        self.basis
    }

    pub fn state(&self) -> &StateVector {
        &self.state
    }

    pub fn dims(&self) -> [usize; 2] {
        [self.state.dims()[0], self.state.dims()[1]]
    }

    /// Norm lost to truncation.
    pub fn tail_bound(&self) -> f64 {
        self.tail_bound
    }

    pub fn amplitude(&self, n0: usize, n1: usize) -> C64 {
        self.state.amplitude(&[n0, n1])
    }

    /// Keeps the levels below `dims`, moving discarded weight into the tail.
    pub fn crop(&self, dims: [usize; 2]) -> Result<Self> {
        let [d0, d1] = self.dims();
        if dims[0] > d0 || dims[1] > d1 || dims.contains(&0) {
            return Err(Error::InvalidParameter(format!(
                "cannot crop dims {:?} to {dims:?}",
                self.dims()
            )));
        }
        let amps = DVector::from_fn(dims[0] * dims[1], |k, _| {
            self.amplitude(k / dims[1], k % dims[1])
        });
        let kept = amps.norm_squared();
        let dropped = (self.state.norm() * self.state.norm() - kept).max(0.0);
        let tail = self.tail_bound + dropped;
        check_tail(tail)?;
        Ok(Self {
            params: self.params,
            basis: self.basis,
            state: StateVector::from_dvector(dims.to_vec(), amps)?,
            tail_bound: tail,
        })
    }

    /// Same state in the (+, −) basis.
    pub fn to_pm(&self) -> Result<Self> {
        match self.basis {
            ModeBasis::PM => Ok(self.clone()),
            ModeBasis::AB => ab_to_pm(self),
        }
    }

    /// Largest Schmidt coefficient beyond the first, relative to the norm.
    pub fn second_schmidt_coefficient(&self) -> f64 {
        let [d0, d1] = self.dims();
        let m = nalgebra::DMatrix::from_fn(d0, d1, |i, j| self.amplitude(i, j));
        let mut sv: Vec<f64> = m.singular_values().iter().copied().collect();
        sv.sort_by(|a, b| b.total_cmp(a));
        sv.get(1).copied().unwrap_or(0.0) / self.state.norm()
    }
}

pub(crate) fn check_tail(tail: f64) -> Result<()> {
    let limit = NumericPolicy::DEFAULT.tail;
    if tail > limit {
        return Err(Error::TruncationInsufficient { tail, limit });
    }
    Ok(())
}

/// Fock amplitudes `e^{−|α|²/2} αⁿ/√n!` for `n < levels`, with the exact
/// Poisson weight of the levels left out.
pub fn coherent_amplitudes(alpha: C64, levels: usize) -> (Vec<C64>, f64) {
    let mu = alpha.norm_sqr();
    let mut amps = Vec::with_capacity(levels);
    let mut a = c((-0.5 * mu).exp(), 0.0);
    for n in 0..levels {
        if n > 0 {
            a *= alpha / (n as f64).sqrt();
        }
        amps.push(a);
    }
    (amps, poisson_tail(mu, levels))
}

/// `Σ_{n ≥ from} e^{−μ} μⁿ/n!`, summed directly.
pub fn poisson_tail(mu: f64, from: usize) -> f64 {
    if mu == 0.0 {
        return if from == 0 { 1.0 } else { 0.0 };
    }
    let mut term = (-mu).exp();
    for n in 1..=from {
        term *= mu / n as f64;
    }
    let mut sum = 0.0;
    let mut n = from;
    loop {
        sum += term;
        n += 1;
        term *= mu / n as f64;
        if n as f64 > mu && term <= sum * 1e-17 {
            break;
        }
    }
    sum
}

fn product_state(
    params: OscParams,
    basis: ModeBasis,
    alphas: (C64, C64),
    trunc: usize,
) -> Result<TwoModeFock> {
    if trunc == 0 {
        return Err(Error::InvalidParameter(
            "truncation must be at least 1".into(),
        ));
    }
    let (a0, t0) = coherent_amplitudes(alphas.0, trunc);
    let (a1, t1) = coherent_amplitudes(alphas.1, trunc);
    let tail = t0 + t1 - t0 * t1;
    check_tail(tail)?;
    let amps = a0
        .iter()
        .flat_map(|x| a1.iter().map(move |y| x * y))
        .collect();
    TwoModeFock::new(
        params,
        basis,
        StateVector::new(vec![trunc, trunc], amps)?,
        tail,
    )
}

/// Kicked prestate as a product of coherent states in the (A, B) basis.
pub fn coherent_prestate(params: OscParams, kick: KickParams, trunc: usize) -> Result<TwoModeFock> {
    params.validate()?;
    product_state(params, ModeBasis::AB, kick.ab_amplitudes(&params), trunc)
}

/// Kicked prestate built directly in the (+, −) basis, mode amplitudes `iΛ_±`.
pub fn coherent_prestate_pm(
    params: OscParams,
    kick: KickParams,
    trunc: usize,
) -> Result<TwoModeFock> {
    params.validate()?;
    let (lp, lm) = kick.big_lambdas(&params);
    product_state(params, ModeBasis::PM, (c(0.0, lp), c(0.0, lm)), trunc)
}

/// Naive `N₊` measurement: only the `+` factor of a separable prestate is
/// projected, outcome `n` leaving `|n⟩₊ ⊗ (unchanged − factor)`.
pub fn naive_nplus_ensemble(prestate: &TwoModeFock) -> Result<OutcomeEnsemble> {
    if prestate.basis != ModeBasis::PM {
        return Err(Error::WrongBasis {
            expected: "PM",
            found: prestate.basis.name(),
        });
    }
    let second = prestate.second_schmidt_coefficient();
    if second > NumericPolicy::DEFAULT.tail {
        return Err(Error::NotSeparable(second));
    }
    let scheme = MeasurementScheme::local_number(prestate.state.dims().to_vec(), &[0])?;
    born_ensemble_with_tail(&scheme, &prestate.state, prestate.tail_bound)
}
