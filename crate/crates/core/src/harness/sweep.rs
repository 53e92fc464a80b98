use rayon::prelude::*;
use serde::Serialize;

use super::scenario::{
    BobObservable, CompiledSystem, Metric, Scenario, SweepAxis, SweepSpec, System,
};
use crate::field::max_signaling;
use crate::{Error, Result};

/// Least-squares line `y = slope·x + intercept` with its `R²`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Fit {
    pub slope: f64,
    pub intercept: f64,
    pub r2: f64,
}

impl Fit {
    pub fn new(xs: &[f64], ys: &[f64]) -> Result<Self> {
        if xs.len() < 3 || xs.len() != ys.len() {
            return Err(Error::TooFewSweepPoints(xs.len().min(ys.len())));
        }
        let n = xs.len() as f64;
        let mx = xs.iter().sum::<f64>() / n;
        let my = ys.iter().sum::<f64>() / n;
        let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
        let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
        let syy: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
        if sxx == 0.0 {
            return Err(Error::InvalidParameter("sweep values are all equal".into()));
        }
        let slope = sxy / sxx;
        let intercept = my - slope * mx;
        let ss_res: f64 = xs
            .iter()
            .zip(ys)
            .map(|(x, y)| (y - slope * x - intercept).powi(2))
            .sum();
        let r2 = if syy == 0.0 { 1.0 } else { 1.0 - ss_res / syy };
        Ok(Self {
            slope,
            intercept,
            r2,
        })
    }

    /// Fit of `ln|y|` against `ln x`; the slope is the scaling exponent.
    /// `None` if some `x` or `y` is zero or `x` is negative.
    pub fn log_log(xs: &[f64], ys: &[f64]) -> Result<Option<Self>> {
        if xs.iter().any(|x| *x <= 0.0) || ys.contains(&0.0) {
            if xs.len() < 3 {
                return Err(Error::TooFewSweepPoints(xs.len()));
            }
            return Ok(None);
        }
        let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
        let ly: Vec<f64> = ys.iter().map(|y| y.abs().ln()).collect();
        Self::new(&lx, &ly).map(Some)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Trend {
    Increasing,
    Decreasing,
    Neither,
}

fn trend(ys: &[f64]) -> Trend {
    if ys.windows(2).all(|w| w[1] > w[0]) {
        Trend::Increasing
    } else if ys.windows(2).all(|w| w[1] < w[0]) {
        Trend::Decreasing
    } else {
        Trend::Neither
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepReport {
    pub axis: String,
    pub metric: String,
    pub observable: Option<String>,
    /// Requested axis values.
    pub values: Vec<f64>,
    /// Abscissa of the fits: volume `(Na)^d`, spacing `a`, or the value itself.
    pub cutoffs: Vec<f64>,
    pub measures: Vec<f64>,
    pub log_log: Option<Fit>,
    pub linear: Fit,
    pub trend: Trend,
}

fn as_count(axis: SweepAxis, v: f64) -> Result<usize> {
    if v >= 1.0 && v.fract() == 0.0 && v < 1e9 {
        Ok(v as usize)
    } else {
        Err(Error::InvalidScenario(format!(
            "{} value {v} must be a positive integer",
            axis.name()
        )))
    }
}

fn scaled_index(v: i64, num: usize, den: usize, what: &str) -> Result<i64> {
    let scaled = v * num as i64;
    if scaled % den as i64 != 0 {
        return Err(Error::InvalidScenario(format!(
            "{what} index {v} does not map onto the resized lattice ({num}/{den})"
        )));
    }
    Ok(scaled / den as i64)
}

/// The scenario with the cutoff set to `value`, and the fit abscissa.
fn apply_axis(base: &Scenario, axis: SweepAxis, value: f64) -> Result<(Scenario, f64)> {
    let mut s = base.clone();
    let unfit = || {
        Error::InvalidScenario(format!(
            "axis `{}` does not apply to this system",
            axis.name()
        ))
    };
    let cutoff = match (&mut s.system, axis) {
        (System::Field(f), SweepAxis::Volume) => {
            let n = as_count(axis, value)?;
            let n0 = f.sites;
            for q in
                f.p.iter_mut()
                    .chain(f.packet.iter_mut().flat_map(|t| t.q.iter_mut()))
            {
                *q = scaled_index(*q, n, n0, "mode")?;
            }
            f.sites = n;
            (n as f64 * f.spacing).powi(f.d as i32)
        }
        (System::Field(f), SweepAxis::Spacing) => {
            if !(value > 0.0 && value.is_finite()) {
                return Err(Error::InvalidScenario("spacing must be positive".into()));
            }
            let ratio = f.spacing / value;
            let n = f.sites as f64 * ratio;
            if (n - n.round()).abs() > 1e-9 * n.max(1.0) || n.round() < 1.0 {
                return Err(Error::InvalidScenario(format!(
                    "spacing {value} does not divide the box length {}",
                    f.sites as f64 * f.spacing
                )));
            }
            let (n0, n) = (f.sites, n.round() as usize);
            for site in f.x.iter_mut().chain(f.y.iter_mut()) {
                *site = scaled_index(*site as i64, n, n0, "site")? as usize;
            }
            f.sites = n;
            f.spacing = value;
            value
        }
        (System::Oscillator(o), SweepAxis::SCut) => {
            o.s_cut = as_count(axis, value)?;
            value
        }
        (System::Oscillator(o), SweepAxis::Trunc) => {
            o.trunc = as_count(axis, value)?;
            value
        }
        _ => return Err(unfit()),
    };
    Ok((s, cutoff))
}

fn measure(scenario: &Scenario, metric: Metric, observable: Option<BobObservable>) -> Result<f64> {
    let plan = scenario.compile()?;
    let need = || {
        observable.ok_or_else(|| {
            Error::InvalidScenario(format!("metric `{}` needs an observable", metric.name()))
        })
    };
    match metric {
        Metric::SignalingDerivative => Ok(plan.derivatives(plan.scheme, &[need()?])?[0]),
        Metric::Expectation => Ok(plan.evaluate(plan.scheme, plan.lambda_ref, &[need()?])?[0]),
        Metric::MaxDeviation => {
            let o = [need()?];
            let zero = plan.evaluate(plan.scheme, 0.0, &o)?[0];
            let vals = plan
                .grid
                .par_iter()
                .map(|&l| Ok(plan.evaluate(plan.scheme, l, &o)?[0]))
                .collect::<Result<Vec<f64>>>()?;
            Ok(vals.iter().fold(0.0, |m, v| f64::max(m, (v - zero).abs())))
        }
        Metric::MaxSignalingAmplitude => match &plan.system {
            CompiledSystem::Field { modes, x, .. } => Ok(max_signaling(modes, x)?.amplitude),
            _ => Err(Error::InvalidScenario(
                "max_signaling_amplitude needs a field system".into(),
            )),
        },
    }
}

/// Evaluates `spec.metric` at every cutoff value and fits its scaling.
pub fn cutoff_sweep(base: &Scenario, spec: &SweepSpec) -> Result<SweepReport> {
    if spec.values.len() < 3 {
        return Err(Error::TooFewSweepPoints(spec.values.len()));
    }
    let kind = base.system.kind();
    let observable = spec
        .observable
        .as_deref()
        .map(|o| BobObservable::parse(kind, o))
        .transpose()?;
    let points = spec
        .values
        .par_iter()
        .map(|&v| {
            let (s, cutoff) = apply_axis(base, spec.axis, v)?;
            let m = measure(&s, spec.metric, observable)
                .map_err(|e| e.context(format!("{} = {v}", spec.axis.name())))?;
            Ok((cutoff, m))
        })
        .collect::<Result<Vec<_>>>()?;
    let cutoffs: Vec<f64> = points.iter().map(|p| p.0).collect();
    let measures: Vec<f64> = points.iter().map(|p| p.1).collect();
    Ok(SweepReport {
        axis: spec.axis.name().to_string(),
        metric: spec.metric.name().to_string(),
        observable: observable.map(|o| o.name().to_string()),
        values: spec.values.clone(),
        log_log: Fit::log_log(&cutoffs, &measures)?,
        linear: Fit::new(&cutoffs, &measures)?,
        trend: trend(&measures),
        cutoffs,
        measures,
    })
}
