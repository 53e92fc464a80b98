use rayon::prelude::*;
use serde::Serialize;

use super::scenario::{BobObservable, CompiledSystem, FieldObservable, Plan, SchemeId};
use super::sweep::SweepReport;
use crate::field::{
    naive_np_expectations, prestate_expectations, qndsv_expectations, FieldExpectations, KickSpec,
};
use crate::oscillator::{
    coherent_prestate, coherent_prestate_pm, local_moments_b, local_moments_b_ensemble,
    naive_nplus_ensemble, phase_moments_fast, KickParams, ModeBasis, MomentsB,
};
use crate::quantum::post_measurement_expectation;
use crate::spin::{alice_rotate, scheme_s2, scheme_sz};
use crate::{qndsv_scheme, spin::spin_state, Error, MeasurementScheme, Result};

/// Values of one Bob observable over the grid.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ObservableSeries {
    pub observable: String,
    /// Without any measurement.
    pub before: Vec<f64>,
    /// Outcome-averaged, after the scheme.
    pub after: Vec<f64>,
    /// `d⟨O⟩_after/dλ` at `λ = 0`.
    pub derivative: f64,
    /// `max |⟨O⟩_after(λ) − ⟨O⟩_after(0)|` over the grid.
    pub max_deviation: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CompareRow {
    pub scheme: String,
    pub observable: String,
    pub before: f64,
    pub after: f64,
    pub derivative: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SignalingReport {
    pub name: Option<String>,
    pub system: String,
    pub scheme: String,
    pub grid: Vec<f64>,
    pub series: Vec<ObservableSeries>,
    /// Largest `|derivative|` among the declared observables local to B.
    pub signaling_measure: f64,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub comparison: Vec<CompareRow>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepReport>,
}

fn spin_scheme(id: SchemeId) -> Result<Option<MeasurementScheme>> {
    Ok(match id {
        SchemeId::None => None,
        SchemeId::SpinQndsv(a, b) => Some(qndsv_scheme(&spin_state(a, b)?)?),
        SchemeId::S2(b) => Some(scheme_s2(b)),
        SchemeId::Sz(b) => Some(scheme_sz(b)),
        other => {
            return Err(Error::InvalidScenario(format!(
                "scheme `{other}` is not a spin scheme"
            )))
        }
    })
}

fn field_value(e: &FieldExpectations, o: FieldObservable) -> f64 {
    match o {
        FieldObservable::Phi => e.phi,
        FieldObservable::Pi => e.pi,
        FieldObservable::Phi2 => e.phi2,
        FieldObservable::Pi2 => e.pi2,
    }
}

impl Plan {
    /// Bob's expectation values of `observables` after `scheme` at parameter `lambda`.
    pub fn evaluate(
        &self,
        scheme: SchemeId,
        lambda: f64,
        observables: &[BobObservable],
    ) -> Result<Vec<f64>> {
        let wrong = |o: &BobObservable| {
            Error::InvalidScenario(format!("observable `{}` does not fit the system", o.name()))
        };
        match &self.system {
            CompiledSystem::Spin {
                hbar,
                prestate,
                axis,
            } => {
                let psi = alice_rotate(prestate, *axis, lambda)?;
                let ms = spin_scheme(scheme)?;
                observables
                    .iter()
                    .map(|o| {
                        let BobObservable::Spin(s) = o else {
                            return Err(wrong(o));
                        };
                        let op = s.operator(*hbar);
                        match &ms {
                            None => psi.expectation(&op),
                            Some(m) => post_measurement_expectation(&psi, m, &op),
                        }
                    })
                    .collect()
            }
            CompiledSystem::Oscillator {
                params,
                p_a,
                p_b,
                trunc,
                s_cut,
            } => {
                let kick = KickParams::new(*p_a, *p_b, lambda);
                let moments: MomentsB = match scheme {
                    SchemeId::None => local_moments_b(&coherent_prestate(*params, kick, *trunc)?)?,
                    SchemeId::NaiveNplus => {
                        let pre = coherent_prestate_pm(*params, kick, *trunc)?;
                        local_moments_b_ensemble(
                            &naive_nplus_ensemble(&pre)?,
                            params,
                            ModeBasis::PM,
                        )?
                    }
                    SchemeId::PhaseNplus => phase_moments_fast(params, kick, *s_cut)?,
                    other => {
                        return Err(Error::InvalidScenario(format!(
                            "scheme `{other}` is not an oscillator scheme"
                        )))
                    }
                };
                observables
                    .iter()
                    .map(|o| match o {
                        BobObservable::Oscillator(b) => Ok(moments.get(*b)),
                        _ => Err(wrong(o)),
                    })
                    .collect()
            }
            CompiledSystem::Field {
                modes,
                x,
                y,
                p,
                packet,
                t1,
            } => {
                let kick = KickSpec::new(x.clone(), lambda);
                let e = match scheme {
                    SchemeId::None => prestate_expectations(modes, &kick, y)?,
                    SchemeId::FieldNaive => naive_np_expectations(modes, &kick, y, p)?,
                    SchemeId::FieldQndsv => qndsv_expectations(modes, &kick, y, packet, *t1)?,
                    other => {
                        return Err(Error::InvalidScenario(format!(
                            "scheme `{other}` is not a field scheme"
                        )))
                    }
                };
                observables
                    .iter()
                    .map(|o| match o {
                        BobObservable::Field(f) => Ok(field_value(&e, *f)),
                        _ => Err(wrong(o)),
                    })
                    .collect()
            }
        }
    }

    /// Finite-difference step: the relative step times the grid's λ-scale.
    pub fn step(&self) -> f64 {
        let scale = self.grid.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        self.policy.fd_relative_step * if scale > 0.0 { scale } else { 1.0 }
    }

    /// `d⟨O⟩/dλ` at `λ = 0` for each observable.
    pub fn derivatives(&self, scheme: SchemeId, observables: &[BobObservable]) -> Result<Vec<f64>> {
        richardson_derivative(|l| self.evaluate(scheme, l, observables), self.step())
    }

    fn context(&self, e: Error) -> Error {
        match &self.name {
            Some(n) => e.context(format!("scenario `{n}`")),
            None => e,
        }
    }
}

/// Central difference at 0 with one Richardson step:
/// `(4D(h/2) − D(h))/3`, `D(h) = (f(h) − f(−h))/2h`.
pub fn richardson_derivative<F>(f: F, h: f64) -> Result<Vec<f64>>
where
    F: Fn(f64) -> Result<Vec<f64>> + Sync,
{
    let points = [h, -h, 0.5 * h, -0.5 * h];
    let vals = points
        .par_iter()
        .map(|&l| f(l))
        .collect::<Result<Vec<_>>>()?;
    Ok((0..vals[0].len())
        .map(|i| {
            let d1 = (vals[0][i] - vals[1][i]) / (2.0 * h);
            let d2 = (vals[2][i] - vals[3][i]) / h;
            (4.0 * d2 - d1) / 3.0
        })
        .collect())
}

/// Runs the grid, derivatives and any attached comparison.
pub fn run_scenario(plan: &Plan) -> Result<SignalingReport> {
    let obs = &plan.observables;
    let rows = plan
        .grid
        .par_iter()
        .map(|&l| {
            let before = plan.evaluate(SchemeId::None, l, obs)?;
            let after = plan.evaluate(plan.scheme, l, obs)?;
            Ok((before, after))
        })
        .collect::<Result<Vec<_>>>()
        .map_err(|e| plan.context(e))?;
    let at_zero = plan
        .evaluate(plan.scheme, 0.0, obs)
        .map_err(|e| plan.context(e))?;
    let derivative = plan
        .derivatives(plan.scheme, obs)
        .map_err(|e| plan.context(e))?;
    let series: Vec<ObservableSeries> = obs
        .iter()
        .enumerate()
        .map(|(i, o)| {
            let after: Vec<f64> = rows.iter().map(|r| r.1[i]).collect();
            ObservableSeries {
                observable: o.name().to_string(),
                before: rows.iter().map(|r| r.0[i]).collect(),
                max_deviation: after
                    .iter()
                    .fold(0.0, |m, v| f64::max(m, (v - at_zero[i]).abs())),
                after,
                derivative: derivative[i],
            }
        })
        .collect();
    let signaling_measure = series
        .iter()
        .zip(obs)
        .filter(|(_, o)| o.is_local())
        .fold(0.0, |m, (s, _)| f64::max(m, s.derivative.abs()));
    let comparison = if plan.compare.is_empty() {
        Vec::new()
    } else {
        compare_schemes(plan, &plan.compare)?
    };
    Ok(SignalingReport {
        name: plan.name.clone(),
        system: plan.kind.name().to_string(),
        scheme: plan.scheme.to_string(),
        grid: plan.grid.clone(),
        series,
        signaling_measure,
        comparison,
        sweep: None,
    })
}

/// Before/after values at `lambda_ref` and the signaling derivative, per
/// scheme and observable.
pub fn compare_schemes(plan: &Plan, schemes: &[SchemeId]) -> Result<Vec<CompareRow>> {
    if schemes.len() < 2 {
        return Err(Error::InvalidScenario(
            "comparison needs at least two schemes".into(),
        ));
    }
    let obs = &plan.observables;
    let before = plan
        .evaluate(SchemeId::None, plan.lambda_ref, obs)
        .map_err(|e| plan.context(e))?;
    let per_scheme = schemes
        .par_iter()
        .map(|&s| {
            Ok((
                s,
                plan.evaluate(s, plan.lambda_ref, obs)?,
                plan.derivatives(s, obs)?,
            ))
        })
        .collect::<Result<Vec<_>>>()
        .map_err(|e| plan.context(e))?;
    Ok(per_scheme
        .into_iter()
        .flat_map(|(s, after, der)| {
            let before = &before;
            obs.iter().enumerate().map(move |(i, o)| CompareRow {
                scheme: s.to_string(),
                observable: o.name().to_string(),
                before: before[i],
                after: after[i],
                derivative: der[i],
            })
        })
        .collect())
}
