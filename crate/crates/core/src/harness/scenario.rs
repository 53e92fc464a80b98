use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::field::{build_modes, Dispersion, LatticeSpec, ModeSet, WavePacket};
use crate::oscillator::{BObservable, OscParams};
use crate::quantum::C64;
use crate::spin::{spin_state, BasisChoice, SpinLabel, SpinObservable};
use crate::{Error, NumericPolicy, Result, StateVector};

pub const SCENARIO_VERSION: u32 = 1;

/// A signaling experiment: system, Alice's one-parameter family, Bob's
/// measurement prescription and observables, and the parameter grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub version: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub system: System,
    pub alice: Alice,
    pub scheme: String,
    pub observables: Vec<String>,
    pub grid: Vec<f64>,
    /// Parameter value for single-point evaluations (comparisons, sweeps).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda_ref: Option<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub compare: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepSpec>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum System {
    Spin(SpinSystem),
    Oscillator(OscillatorSystem),
    Field(FieldSystem),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpinSystem {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hbar: Option<f64>,
    /// Labels of the A and B spins.
    pub prestate: [String; 2],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OscillatorSystem {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hbar: Option<f64>,
    pub mass: f64,
    pub omega: f64,
    #[serde(default)]
    pub p_a: f64,
    #[serde(default)]
    pub p_b: f64,
    #[serde(default = "default_trunc")]
    pub trunc: usize,
    #[serde(default = "default_s_cut")]
    pub s_cut: usize,
}

fn default_trunc() -> usize {
    40
}

fn default_s_cut() -> usize {
    16
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldSystem {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hbar: Option<f64>,
    pub d: usize,
    pub sites: usize,
    pub spacing: f64,
    pub mass: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dispersion: Option<Dispersion>,
    /// Zero-mode mass for massless fields; defaults to `1e-3/a`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub regulator: Option<f64>,
    /// Alice's kick site.
    pub x: Vec<usize>,
    /// Bob's site.
    pub y: Vec<usize>,
    /// Verified mode (integer wave-vector index).
    pub p: Vec<i64>,
    /// Wave-packet weights for the verification; empty means the single mode `p`.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub packet: Vec<PacketTerm>,
    #[serde(default)]
    pub t1: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PacketTerm {
    pub q: Vec<i64>,
    #[serde(default)]
    pub re: f64,
    #[serde(default)]
    pub im: f64,
}

/// Alice's local operation; the scenario grid supplies its parameter.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", deny_unknown_fields)]
pub enum Alice {
    /// Spin rotation by angle `λ` about `axis`.
    Rotate { axis: [f64; 3] },
    /// Momentum kick of strength `λ`.
    Kick,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub axis: SweepAxis,
    pub values: Vec<f64>,
    pub metric: Metric,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub observable: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepAxis {
    /// Sites per axis at fixed spacing; physical wave vectors are held fixed.
    Volume,
    /// Lattice spacing at fixed volume; physical positions are held fixed.
    Spacing,
    SCut,
    Trunc,
}

impl SweepAxis {
    pub fn name(&self) -> &'static str {
        match self {
            Self::Volume => "volume",
            Self::Spacing => "spacing",
            Self::SCut => "s_cut",
            Self::Trunc => "trunc",
        }
    }
}

impl FromStr for SweepAxis {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "volume" => Ok(Self::Volume),
            "spacing" => Ok(Self::Spacing),
            "s_cut" => Ok(Self::SCut),
            "trunc" => Ok(Self::Trunc),
            _ => Err(format!(
                "unknown sweep axis `{s}` (volume, spacing, s_cut, trunc)"
            )),
        }
    }
}

/// Scalar extracted from each sweep point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    /// `d⟨O⟩/dλ` at `λ = 0`.
    SignalingDerivative,
    /// `max |⟨O⟩(λ) − ⟨O⟩(0)|` over the grid.
    MaxDeviation,
    /// `⟨O⟩` after the measurement at `lambda_ref`.
    Expectation,
    /// `√(ħ/(e g⁻¹_xx))` (field only).
    MaxSignalingAmplitude,
}

impl Metric {
    pub fn name(&self) -> &'static str {
        match self {
            Self::SignalingDerivative => "signaling_derivative",
            Self::MaxDeviation => "max_deviation",
            Self::Expectation => "expectation",
            Self::MaxSignalingAmplitude => "max_signaling_amplitude",
        }
    }
}

impl FromStr for Metric {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "signaling_derivative" => Ok(Self::SignalingDerivative),
            "max_deviation" => Ok(Self::MaxDeviation),
            "expectation" => Ok(Self::Expectation),
            "max_signaling_amplitude" => Ok(Self::MaxSignalingAmplitude),
            _ => Err(format!(
                "unknown metric `{s}` (signaling_derivative, max_deviation, expectation, max_signaling_amplitude)"
            )),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SystemKind {
    Spin,
    Oscillator,
    Field,
}

impl SystemKind {
    pub fn name(&self) -> &'static str {
        match self {
            Self::Spin => "spin",
            Self::Oscillator => "oscillator",
            Self::Field => "field",
        }
    }
}

/// Measurement prescription, parsed against the system it applies to.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SchemeId {
    None,
    SpinQndsv(SpinLabel, SpinLabel),
    S2(BasisChoice),
    Sz(BasisChoice),
    NaiveNplus,
    PhaseNplus,
    FieldNaive,
    FieldQndsv,
}

impl SchemeId {
    pub fn parse(kind: SystemKind, s: &str) -> Result<Self> {
        let bad = |why: String| {
            Error::InvalidScenario(format!("scheme `{s}` for {}: {why}", kind.name()))
        };
        if s == "none" {
            return Ok(Self::None);
        }
        match kind {
            SystemKind::Spin => {
                if let Some(t) = s.strip_prefix("qndsv:") {
                    let (a, b) = t
                        .split_once(',')
                        .ok_or_else(|| bad("target needs two labels `a,b`".into()))?;
                    Ok(Self::SpinQndsv(
                        a.parse().map_err(bad)?,
                        b.parse().map_err(bad)?,
                    ))
                } else if let Some(b) = s.strip_prefix("s2-") {
                    Ok(Self::S2(b.parse().map_err(bad)?))
                } else if let Some(b) = s.strip_prefix("sz-") {
                    Ok(Self::Sz(b.parse().map_err(bad)?))
                } else {
                    Err(bad(
                        "expected none, qndsv:<a>,<b>, s2-<basis> or sz-<basis>".into(),
                    ))
                }
            }
            SystemKind::Oscillator => match s {
                "naive" => Ok(Self::NaiveNplus),
                "phase" => Ok(Self::PhaseNplus),
                _ => Err(bad("expected none, naive or phase".into())),
            },
            SystemKind::Field => match s {
                "naive" => Ok(Self::FieldNaive),
                "qndsv" => Ok(Self::FieldQndsv),
                _ => Err(bad("expected none, naive or qndsv".into())),
            },
        }
    }
}

fn basis_name(b: BasisChoice) -> &'static str {
    match b {
        BasisChoice::Standard => "standard",
        BasisChoice::Bell => "bell",
        BasisChoice::Luders => "luders",
    }
}

impl fmt::Display for SchemeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::None => f.write_str("none"),
            Self::SpinQndsv(a, b) => write!(f, "qndsv:{a},{b}"),
            Self::S2(b) => write!(f, "s2-{}", basis_name(*b)),
            Self::Sz(b) => write!(f, "sz-{}", basis_name(*b)),
            Self::NaiveNplus | Self::FieldNaive => f.write_str("naive"),
            Self::PhaseNplus => f.write_str("phase"),
            Self::FieldQndsv => f.write_str("qndsv"),
        }
    }
}

/// Local field observables at Bob's site.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FieldObservable {
    Phi,
    Pi,
    Phi2,
    Pi2,
}

impl FieldObservable {
    pub const ALL: [FieldObservable; 4] = [Self::Phi, Self::Pi, Self::Phi2, Self::Pi2];

    pub fn name(&self) -> &'static str {
        match self {
            Self::Phi => "phi_y",
            Self::Pi => "pi_y",
            Self::Phi2 => "phi2_y",
            Self::Pi2 => "pi2_y",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BobObservable {
    Spin(SpinObservable),
    Oscillator(BObservable),
    Field(FieldObservable),
}

impl BobObservable {
    pub fn parse(kind: SystemKind, s: &str) -> Result<Self> {
        let parsed = match kind {
            SystemKind::Spin => s.parse().map(Self::Spin),
            SystemKind::Oscillator => s.parse().map(Self::Oscillator),
            SystemKind::Field => FieldObservable::ALL
                .into_iter()
                .find(|o| o.name() == s)
                .map(Self::Field)
                .ok_or_else(|| {
                    format!("unknown field observable `{s}` (phi_y, pi_y, phi2_y, pi2_y)")
                }),
        };
        parsed.map_err(Error::InvalidScenario)
    }

    /// True for observables of Bob's subsystem alone; total-spin quantities
    /// are not.
    pub fn is_local(&self) -> bool {
        !matches!(
            self,
            Self::Spin(SpinObservable::S2) | Self::Spin(SpinObservable::Sz)
        )
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::Spin(o) => o.name(),
            Self::Oscillator(o) => o.name(),
            Self::Field(o) => o.name(),
        }
    }
}

/// Validated, ready-to-evaluate system.
#[derive(Debug, Clone)]
pub enum CompiledSystem {
    Spin {
        hbar: f64,
        prestate: StateVector,
        axis: [f64; 3],
    },
    Oscillator {
        params: OscParams,
        p_a: f64,
        p_b: f64,
        trunc: usize,
        s_cut: usize,
    },
    Field {
        modes: ModeSet,
        x: Vec<usize>,
        y: Vec<usize>,
        p: Vec<i64>,
        packet: WavePacket,
        t1: f64,
    },
}

/// A validated scenario.
#[derive(Debug, Clone)]
pub struct Plan {
    pub name: Option<String>,
    pub kind: SystemKind,
    pub system: CompiledSystem,
    pub scheme: SchemeId,
    pub observables: Vec<BobObservable>,
    pub grid: Vec<f64>,
    pub lambda_ref: f64,
    pub compare: Vec<SchemeId>,
    pub policy: NumericPolicy,
}

impl System {
    pub fn kind(&self) -> SystemKind {
        match self {
            System::Spin(_) => SystemKind::Spin,
            System::Oscillator(_) => SystemKind::Oscillator,
            System::Field(_) => SystemKind::Field,
        }
    }

    pub fn hbar_mut(&mut self) -> &mut Option<f64> {
        match self {
            System::Spin(s) => &mut s.hbar,
            System::Oscillator(s) => &mut s.hbar,
            System::Field(s) => &mut s.hbar,
        }
    }
}

fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidScenario(msg.into())
}

fn finite(name: &str, v: f64) -> Result<f64> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(invalid(format!("{name} must be finite")))
    }
}

impl Scenario {
    /// Sets `ħ = 1` on the system.
    pub fn set_natural_units(&mut self) {
        *self.system.hbar_mut() = Some(1.0);
    }

    /// Checks every field and resolves names into typed values.
    pub fn compile(&self) -> Result<Plan> {
        let ctx = |e: Error| match &self.name {
            Some(n) => e.context(format!("scenario `{n}`")),
            None => e,
        };
        self.compile_inner().map_err(ctx)
    }

    fn compile_inner(&self) -> Result<Plan> {
        if self.version != SCENARIO_VERSION {
            return Err(invalid(format!(
                "unsupported version {} (expected {SCENARIO_VERSION})",
                self.version
            )));
        }
        let kind = self.system.kind();
        let hbar = match &self.system {
            System::Spin(s) => s.hbar,
            System::Oscillator(s) => s.hbar,
            System::Field(s) => s.hbar,
        }
        .ok_or_else(|| invalid("hbar is not set (give it explicitly or use natural units)"))?;
        if !(hbar.is_finite() && hbar > 0.0) {
            return Err(invalid("hbar must be positive"));
        }
        let system = match (&self.system, &self.alice) {
            (System::Spin(s), Alice::Rotate { axis }) => {
                let a: SpinLabel = s.prestate[0].parse().map_err(invalid)?;
                let b: SpinLabel = s.prestate[1].parse().map_err(invalid)?;
                crate::spin::rotation(*axis, 0.0)?;
                CompiledSystem::Spin {
                    hbar,
                    prestate: spin_state(a, b)?,
                    axis: *axis,
                }
            }
            (System::Oscillator(s), Alice::Kick) => {
                let params = OscParams::new(s.mass, s.omega, hbar)?;
                finite("p_a", s.p_a)?;
                finite("p_b", s.p_b)?;
                if s.trunc < 2 {
                    return Err(invalid("trunc must be at least 2"));
                }
                if s.s_cut == 0 || s.s_cut % 2 != 0 {
                    return Err(invalid("s_cut must be a positive even number"));
                }
                CompiledSystem::Oscillator {
                    params,
                    p_a: s.p_a,
                    p_b: s.p_b,
                    trunc: s.trunc,
                    s_cut: s.s_cut,
                }
            }
            (System::Field(s), Alice::Kick) => {
                let mut spec = LatticeSpec::new(s.d, s.sites, s.spacing, s.mass, hbar)?;
                if let Some(d) = s.dispersion {
                    spec = spec.with_dispersion(d);
                }
                if let Some(r) = s.regulator {
                    spec = spec.with_regulator(Some(r));
                }
                let modes = build_modes(&spec)?;
                spec.check_site(&s.x)?;
                spec.check_site(&s.y)?;
                modes.find_paired(&s.p)?;
                finite("t1", s.t1)?;
                let packet = if s.packet.is_empty() {
                    WavePacket::single_mode(&modes, &s.p)?
                } else {
                    let w: Vec<(Vec<i64>, C64)> = s
                        .packet
                        .iter()
                        .map(|t| (t.q.clone(), C64::new(t.re, t.im)))
                        .collect();
                    WavePacket::from_weights(&modes, &w)?
                };
                CompiledSystem::Field {
                    modes,
                    x: s.x.clone(),
                    y: s.y.clone(),
                    p: s.p.clone(),
                    packet,
                    t1: s.t1,
                }
            }
            (_, alice) => {
                return Err(invalid(format!(
                    "alice operation {alice:?} does not apply to a {} system",
                    kind.name()
                )))
            }
        };
        if self.observables.is_empty() {
            return Err(invalid("no observables"));
        }
        let observables = self
            .observables
            .iter()
            .map(|o| BobObservable::parse(kind, o))
            .collect::<Result<Vec<_>>>()?;
        if self.grid.is_empty() {
            return Err(invalid("empty grid"));
        }
        for v in &self.grid {
            finite("grid value", *v)?;
        }
        if self.grid.windows(2).any(|w| w[1] <= w[0]) {
            return Err(invalid("grid must be strictly increasing"));
        }
        let lambda_ref = finite("lambda_ref", self.lambda_ref.unwrap_or(0.0))?;
        let compare = self
            .compare
            .iter()
            .map(|c| SchemeId::parse(kind, c))
            .collect::<Result<Vec<_>>>()?;
        if let Some(sw) = &self.sweep {
            if let Some(o) = &sw.observable {
                BobObservable::parse(kind, o)?;
            }
        }
        Ok(Plan {
            name: self.name.clone(),
            kind,
            system,
            scheme: SchemeId::parse(kind, &self.scheme)?,
            observables,
            grid: self.grid.clone(),
            lambda_ref,
            compare,
            policy: NumericPolicy::DEFAULT,
        })
    }
}
