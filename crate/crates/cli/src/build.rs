//! Scenario assembly from files and flags.

use std::path::Path;

use causal_probe_core::harness::{
    Alice, FieldSystem, Metric, OscillatorSystem, Scenario, SpinSystem, SweepAxis, SweepSpec,
    System, SCENARIO_VERSION,
};

use crate::args::{Common, FieldArgs, HoArgs, SpinArgs, SweepArgs};
use crate::CliError;

pub fn load_scenario(path: &Path) -> Result<Scenario, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Validation(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text)
        .map_err(|e| CliError::Validation(format!("{}: {e}", path.display())))
}

/// `v1,v2,...` or `start:stop:count`.
pub fn parse_grid(s: &str) -> Result<Vec<f64>, CliError> {
    let bad = || CliError::Usage(format!("invalid grid `{s}`"));
    if s.contains(':') {
        let parts: Vec<&str> = s.split(':').collect();
        let [a, b, n] = parts[..] else {
            return Err(bad());
        };
        let (a, b): (f64, f64) = (
            a.trim().parse().map_err(|_| bad())?,
            b.trim().parse().map_err(|_| bad())?,
        );
        let n: usize = n.trim().parse().map_err(|_| bad())?;
        return match n {
            0 => Err(bad()),
            1 => Ok(vec![a]),
            _ => Ok((0..n)
                .map(|i| a + (b - a) * i as f64 / (n - 1) as f64)
                .collect()),
        };
    }
    s.split(',')
        .map(|v| v.trim().parse().map_err(|_| bad()))
        .collect()
}

fn start(common: &Common, kind: &str) -> Result<Option<Scenario>, CliError> {
    let Some(path) = &common.scenario else {
        return Ok(None);
    };
    let s = load_scenario(path)?;
    if s.system.kind().name() != kind {
        return Err(CliError::Validation(format!(
            "{} describes a {} system, not {kind}",
            path.display(),
            s.system.kind().name()
        )));
    }
    Ok(Some(s))
}

fn apply_common(s: &mut Scenario, common: &Common) -> Result<(), CliError> {
    if !common.obs.is_empty() {
        s.observables = common.obs.clone();
    }
    if let Some(g) = &common.grid {
        s.grid = parse_grid(g)?;
    }
    if let Some(h) = common.hbar {
        *s.system.hbar_mut() = Some(h);
    }
    if common.lambda_ref.is_some() {
        s.lambda_ref = common.lambda_ref;
    }
    if !common.compare.is_empty() {
        s.compare = common.compare.clone();
    }
    Ok(())
}

fn missing(flag: &str) -> CliError {
    CliError::Usage(format!("missing --{flag} (or give --scenario)"))
}

fn single_point(s: &mut Scenario, lambda: f64) {
    s.grid = vec![lambda];
    s.lambda_ref = Some(lambda);
}

fn blank(system: System, alice: Alice, observables: &[&str]) -> Scenario {
    Scenario {
        version: SCENARIO_VERSION,
        name: None,
        system,
        alice,
        scheme: "none".into(),
        observables: observables.iter().map(|o| o.to_string()).collect(),
        grid: vec![0.0],
        lambda_ref: None,
        compare: Vec::new(),
        sweep: None,
    }
}

/// `rotate-y:1.57` → (axis, Some(angle)).
fn parse_rotation(s: &str) -> Result<([f64; 3], Option<f64>), CliError> {
    let bad = || {
        CliError::Usage(format!(
            "invalid --alice `{s}` (rotate-x|y|z[:angle] or rotate:nx;ny;nz[:angle])"
        ))
    };
    let (axis, angle) = if let Some(rest) = s.strip_prefix("rotate-") {
        let (ax, angle) = rest
            .split_once(':')
            .map_or((rest, None), |(a, b)| (a, Some(b)));
        let axis = match ax {
            "x" => [1.0, 0.0, 0.0],
            "y" => [0.0, 1.0, 0.0],
            "z" => [0.0, 0.0, 1.0],
            _ => return Err(bad()),
        };
        (axis, angle)
    } else if let Some(rest) = s.strip_prefix("rotate:") {
        let (ax, angle) = rest
            .split_once(':')
            .map_or((rest, None), |(a, b)| (a, Some(b)));
        let comps: Vec<f64> = ax
            .split(';')
            .map(|v| v.trim().parse().map_err(|_| bad()))
            .collect::<Result<_, _>>()?;
        let [x, y, z] = comps[..] else {
            return Err(bad());
        };
        ([x, y, z], angle)
    } else {
        return Err(bad());
    };
    let angle = angle
        .map(|a| a.trim().parse().map_err(|_| bad()))
        .transpose()?;
    Ok((axis, angle))
}

fn spin_scheme_id(args: &SpinArgs) -> Result<Option<String>, CliError> {
    let Some(s) = &args.scheme else {
        return Ok(None);
    };
    Ok(Some(match s.as_str() {
        "qndsv" => {
            let t = args
                .target
                .as_deref()
                .ok_or_else(|| CliError::Usage("qndsv needs --target a,b".into()))?;
            format!("qndsv:{t}")
        }
        "s2" | "sz" => format!("{s}-{}", args.basis.as_deref().unwrap_or("standard")),
        other => other.to_string(),
    }))
}

pub fn spin(args: &SpinArgs) -> Result<Scenario, CliError> {
    let mut s = match start(&args.common, "spin")? {
        Some(s) => s,
        None => blank(
            System::Spin(SpinSystem {
                hbar: Some(1.0),
                prestate: ["up".into(), "up".into()],
            }),
            Alice::Rotate {
                axis: [0.0, 1.0, 0.0],
            },
            &["sBz", "sBx", "sBy"],
        ),
    };
    if let Some(id) = spin_scheme_id(args)? {
        s.scheme = id;
    }
    if let Some(p) = &args.prestate {
        let (a, b) = p
            .split_once(',')
            .ok_or_else(|| CliError::Usage("--prestate needs `a,b`".into()))?;
        if let System::Spin(sys) = &mut s.system {
            sys.prestate = [a.trim().into(), b.trim().into()];
        }
    }
    if let Some(a) = &args.alice {
        let (axis, angle) = parse_rotation(a)?;
        s.alice = Alice::Rotate { axis };
        if let Some(angle) = angle {
            single_point(&mut s, angle);
        }
    }
    apply_common(&mut s, &args.common)?;
    Ok(s)
}

pub fn ho(args: &HoArgs) -> Result<Scenario, CliError> {
    let mut s = match start(&args.common, "oscillator")? {
        Some(s) => s,
        None => blank(
            System::Oscillator(OscillatorSystem {
                hbar: Some(1.0),
                mass: 1.0,
                omega: 1.0,
                p_a: 0.0,
                p_b: 0.0,
                trunc: 40,
                s_cut: 16,
            }),
            Alice::Kick,
            &["QB", "PB", "QB2", "PB2", "EB"],
        ),
    };
    if let Some(id) = &args.scheme {
        s.scheme = id.clone();
    }
    if let System::Oscillator(o) = &mut s.system {
        o.mass = args.mass.unwrap_or(o.mass);
        o.omega = args.omega.unwrap_or(o.omega);
        o.p_a = args.p_a.unwrap_or(o.p_a);
        o.p_b = args.p_b.unwrap_or(o.p_b);
        o.trunc = args.trunc.unwrap_or(o.trunc);
        o.s_cut = args.s_cut.unwrap_or(o.s_cut);
    }
    if let Some(l) = args.lambda {
        single_point(&mut s, l);
    }
    apply_common(&mut s, &args.common)?;
    Ok(s)
}

pub fn field(args: &FieldArgs) -> Result<Scenario, CliError> {
    let mut s = match start(&args.common, "field")? {
        Some(s) => s,
        None => {
            let sys = FieldSystem {
                hbar: Some(1.0),
                d: args.d.ok_or_else(|| missing("d"))?,
                sites: args.sites.ok_or_else(|| missing("N"))?,
                spacing: args.a.ok_or_else(|| missing("a"))?,
                mass: args.mass.ok_or_else(|| missing("mass"))?,
                dispersion: None,
                regulator: None,
                x: if args.x.is_empty() {
                    return Err(missing("x"));
                } else {
                    args.x.clone()
                },
                y: if args.y.is_empty() {
                    return Err(missing("y"));
                } else {
                    args.y.clone()
                },
                p: if args.p_index.is_empty() {
                    return Err(missing("p-index"));
                } else {
                    args.p_index.clone()
                },
                packet: Vec::new(),
                t1: 0.0,
            };
            blank(
                System::Field(sys),
                Alice::Kick,
                &["phi_y", "pi_y", "phi2_y", "pi2_y"],
            )
        }
    };
    if let Some(id) = &args.scheme {
        s.scheme = id.clone();
    }
    if let System::Field(f) = &mut s.system {
        f.d = args.d.unwrap_or(f.d);
        f.sites = args.sites.unwrap_or(f.sites);
        f.spacing = args.a.unwrap_or(f.spacing);
        f.mass = args.mass.unwrap_or(f.mass);
        if let Some(d) = &args.dispersion {
            f.dispersion = Some(d.parse().map_err(CliError::Usage)?);
        }
        if args.regulator.is_some() {
            f.regulator = args.regulator;
        }
        if !args.x.is_empty() {
            f.x = args.x.clone();
        }
        if !args.y.is_empty() {
            f.y = args.y.clone();
        }
        if !args.p_index.is_empty() {
            f.p = args.p_index.clone();
        }
        f.t1 = args.t1.unwrap_or(f.t1);
    }
    if let Some(l) = args.lambda {
        single_point(&mut s, l);
    }
    apply_common(&mut s, &args.common)?;
    Ok(s)
}

/// The scenario with its sweep specification overridden by flags.
pub fn sweep(args: &SweepArgs) -> Result<(Scenario, SweepSpec), CliError> {
    let mut s = load_scenario(&args.scenario)?;
    let base = s.sweep.take();
    let axis: Option<SweepAxis> = args
        .axis
        .as_deref()
        .map(str::parse)
        .transpose()
        .map_err(CliError::Usage)?;
    let metric: Option<Metric> = args
        .metric
        .as_deref()
        .map(str::parse)
        .transpose()
        .map_err(CliError::Usage)?;
    let spec = match base {
        Some(mut b) => {
            b.axis = axis.unwrap_or(b.axis);
            b.metric = metric.unwrap_or(b.metric);
            if !args.values.is_empty() {
                b.values = args.values.clone();
            }
            if args.observable.is_some() {
                b.observable = args.observable.clone();
            }
            b
        }
        None => SweepSpec {
            axis: axis
                .ok_or_else(|| CliError::Usage("scenario has no sweep; give --axis".into()))?,
            values: args.values.clone(),
            metric: metric
                .ok_or_else(|| CliError::Usage("scenario has no sweep; give --metric".into()))?,
            observable: args.observable.clone(),
        },
    };
    s.sweep = Some(spec.clone());
    Ok((s, spec))
}
