use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{check_tail, ModeBasis, OscParams, TwoModeFock};
use crate::quantum::{
    c, post_measurement_expectation, MeasurementScheme, Observable, ObservableSum, OutcomeEnsemble,
    Quadrature, C64,
};
use crate::{Error, Result};

/// Local observables of oscillator B.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BObservable {
    QB,
    PB,
    QB2,
    PB2,
    EB,
}

impl BObservable {
    pub const ALL: [BObservable; 5] = [Self::QB, Self::PB, Self::QB2, Self::PB2, Self::EB];

    pub fn name(&self) -> &'static str {
        match self {
            Self::QB => "QB",
            Self::PB => "PB",
            Self::QB2 => "QB2",
            Self::PB2 => "PB2",
            Self::EB => "EB",
        }
    }

    /// The observable on a two-mode space of the given basis and dims.
    pub fn build(
        &self,
        params: &OscParams,
        basis: ModeBasis,
        dims: [usize; 2],
    ) -> Box<dyn Observable> {
        let (q, p) = quadratures(params, basis, dims);
        match self {
            Self::QB => Box::new(q),
            Self::PB => Box::new(p),
            Self::QB2 => Box::new(q.square()),
            Self::PB2 => Box::new(p.square()),
            Self::EB => Box::new(
                ObservableSum::new(vec![
                    (0.5 / params.mass, Box::new(p.square())),
                    (
                        0.5 * params.mass * params.omega * params.omega,
                        Box::new(q.square()),
                    ),
                ])
                .expect("quadratures share dims"),
            ),
        }
    }
}

impl FromStr for BObservable {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        Self::ALL
            .into_iter()
            .find(|o| o.name() == s)
            .ok_or_else(|| format!("unknown oscillator observable `{s}` (QB, PB, QB2, PB2, EB)"))
    }
}

/// `Q_B = (a_B + a_B†)/(√2κ)` and `P_B = −iħκ(a_B − a_B†)/√2` as quadratures,
/// with `a_B = (a_+ − a_−)/√2` in the (+, −) basis.
fn quadratures(params: &OscParams, basis: ModeBasis, dims: [usize; 2]) -> (Quadrature, Quadrature) {
    let k = params.kappa();
    let uq = c(1.0 / (std::f64::consts::SQRT_2 * k), 0.0);
    let up = c(0.0, -params.hbar * k / std::f64::consts::SQRT_2);
    let terms = |u: C64| match basis {
        ModeBasis::AB => vec![(1, u)],
        ModeBasis::PM => {
            let h = std::f64::consts::FRAC_1_SQRT_2;
            vec![(0, u * h), (1, -u * h)]
        }
    };
    let q = Quadrature::new(dims.to_vec(), terms(uq)).expect("slots 0 and 1");
    let p = Quadrature::new(dims.to_vec(), terms(up)).expect("slots 0 and 1");
    (q, p)
}

/// Moments of oscillator B with the truncation tail they were computed under.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MomentsB {
    pub q: f64,
    pub p: f64,
    pub q2: f64,
    pub p2: f64,
    pub energy: f64,
    pub tail_bound: f64,
}

impl MomentsB {
    pub fn get(&self, obs: BObservable) -> f64 {
        match obs {
            BObservable::QB => self.q,
            BObservable::PB => self.p,
            BObservable::QB2 => self.q2,
            BObservable::PB2 => self.p2,
            BObservable::EB => self.energy,
        }
    }

    fn collect(tail_bound: f64, mut eval: impl FnMut(BObservable) -> Result<f64>) -> Result<Self> {
        check_tail(tail_bound)?;
        Ok(Self {
            q: eval(BObservable::QB)?,
            p: eval(BObservable::PB)?,
            q2: eval(BObservable::QB2)?,
            p2: eval(BObservable::PB2)?,
            energy: eval(BObservable::EB)?,
            tail_bound,
        })
    }
}

/// Moments of B in a two-mode state (either basis).
pub fn local_moments_b(state: &TwoModeFock) -> Result<MomentsB> {
    MomentsB::collect(state.tail_bound(), |o| {
        state.state().expectation(
            o.build(state.params(), state.basis(), state.dims())
                .as_ref(),
        )
    })
}

/// Outcome-averaged moments of B after measuring `scheme` on `prestate`.
pub fn local_moments_b_after(
    prestate: &TwoModeFock,
    scheme: &MeasurementScheme,
) -> Result<MomentsB> {
    MomentsB::collect(prestate.tail_bound(), |o| {
        let obs = o.build(prestate.params(), prestate.basis(), prestate.dims());
        post_measurement_expectation(prestate.state(), scheme, obs.as_ref())
    })
}

/// Outcome-averaged moments of B over an ensemble of two-mode states.
pub fn local_moments_b_ensemble(
    ensemble: &OutcomeEnsemble,
    params: &OscParams,
    basis: ModeBasis,
) -> Result<MomentsB> {
    let dims = ensemble
        .entries()
        .iter()
        .find_map(|e| e.post_state().ok())
        .map(|s| [s.dims()[0], s.dims()[1]])
        .ok_or_else(|| Error::InvalidParameter("ensemble has no populated outcome".into()))?;
    MomentsB::collect(ensemble.tail_bound(), |o| {
        ensemble.expectation(o.build(params, basis, dims).as_ref())
    })
}

/// First and second ladder moments of one mode: `⟨a⟩`, `⟨a²⟩`, `⟨a†a⟩`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct ModeStats {
    pub a: C64,
    pub a2: C64,
    pub n: f64,
}

impl ModeStats {
    pub fn fock(n: usize) -> Self {
        Self {
            a: c(0.0, 0.0),
            a2: c(0.0, 0.0),
            n: n as f64,
        }
    }
}

/// B moments `[Q, P, Q², P², E]` of the product state `φ₊ ⊗ φ₋`.
pub(crate) fn product_moments_b(params: &OscParams, plus: ModeStats, minus: ModeStats) -> [f64; 5] {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let k = params.kappa();
    let a = (plus.a - minus.a) * h;
    let a2 = (plus.a2 - plus.a * minus.a * 2.0 + minus.a2) * 0.5;
    let n = 0.5 * (plus.n + minus.n - 2.0 * (plus.a.conj() * minus.a).re);
    let q = std::f64::consts::SQRT_2 * a.re / k;
    let p = std::f64::consts::SQRT_2 * params.hbar * k * a.im;
    let q2 = (2.0 * a2.re + 2.0 * n + 1.0) / (2.0 * k * k);
    let p2 = params.hbar * params.hbar * k * k * (2.0 * n + 1.0 - 2.0 * a2.re) / 2.0;
    let e = p2 / (2.0 * params.mass) + 0.5 * params.mass * params.omega * params.omega * q2;
    [q, p, q2, p2, e]
}
