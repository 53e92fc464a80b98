//! Two spin-1/2 particles A (slot 0) and B (slot 1), basis order `|↑⟩, |↓⟩`.
//!
//! ħ is an explicit parameter so that values such as ħ/4 come out as
//! `hbar * 0.25` rather than depending on a unit convention.

use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::quantum::{
    c, embed_local, post_measurement_expectation, reduced_projector, MeasurementScheme, Observable,
    Operator, SchemeKind, StateVector, C64,
};
use crate::{Error, NumericPolicy, Result};

pub const SPIN_DIMS: [usize; 2] = [2, 2];

/// Single-particle spin state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SpinLabel {
    Up,
    Down,
    /// `(|↑⟩ + |↓⟩)/√2`
    Right,
    /// `(|↑⟩ − |↓⟩)/√2`
    Left,
    /// +1 eigenstate of `n·σ`.
    Plus([f64; 3]),
    /// −1 eigenstate of `n·σ`.
    Minus([f64; 3]),
}

impl SpinLabel {
    /// Two-component ket.
    pub fn ket(&self) -> Result<[C64; 2]> {
        let h = FRAC_1_SQRT_2;
        Ok(match *self {
            SpinLabel::Up => [c(1.0, 0.0), c(0.0, 0.0)],
            SpinLabel::Down => [c(0.0, 0.0), c(1.0, 0.0)],
            SpinLabel::Right => [c(h, 0.0), c(h, 0.0)],
            SpinLabel::Left => [c(h, 0.0), c(-h, 0.0)],
            SpinLabel::Plus(n) => bloch_ket(check_axis(n)?, false),
            SpinLabel::Minus(n) => bloch_ket(check_axis(n)?, true),
        })
    }

    pub fn state(&self) -> Result<StateVector> {
        StateVector::new(vec![2], self.ket()?.to_vec())
    }
}

/// `(cos θ/2, e^{iφ} sin θ/2)` for the +n eigenstate, or the orthogonal
/// `(sin θ/2, −e^{iφ} cos θ/2)` for −n.
fn bloch_ket(n: [f64; 3], minus: bool) -> [C64; 2] {
    let theta = n[2].clamp(-1.0, 1.0).acos();
    let phase = C64::from_polar(1.0, n[1].atan2(n[0]));
    let (s, co) = (0.5 * theta).sin_cos();
    if minus {
        [c(s, 0.0), -phase * co]
    } else {
        [c(co, 0.0), phase * s]
    }
}

fn check_axis(n: [f64; 3]) -> Result<[f64; 3]> {
    let norm = n.iter().map(|x| x * x).sum::<f64>().sqrt();
    if (norm - 1.0).abs() > NumericPolicy::DEFAULT.exact {
        return Err(Error::InvalidParameter(format!(
            "axis {n:?} is not a unit vector (norm {norm})"
        )));
    }
    Ok(n)
}

fn parse_axis(s: &str) -> std::result::Result<[f64; 3], String> {
    match s {
        "x" => Ok([1.0, 0.0, 0.0]),
        "y" => Ok([0.0, 1.0, 0.0]),
        "z" => Ok([0.0, 0.0, 1.0]),
        _ => {
            let parts: Vec<f64> = s
                .split(';')
                .map(|p| {
                    p.trim()
                        .parse::<f64>()
                        .map_err(|e| format!("axis `{s}`: {e}"))
                })
                .collect::<std::result::Result<_, _>>()?;
            <[f64; 3]>::try_from(parts).map_err(|_| format!("axis `{s}` needs three components"))
        }
    }
}

impl FromStr for SpinLabel {
    type Err = String;

    /// `up`, `down`, `right`, `left`, `plus:<axis>` or `minus:<axis>`, where
    /// `<axis>` is `x`, `y`, `z` or `nx;ny;nz`.
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let s = s.trim();
        match s {
            "up" => Ok(SpinLabel::Up),
            "down" => Ok(SpinLabel::Down),
            "right" => Ok(SpinLabel::Right),
            "left" => Ok(SpinLabel::Left),
            _ => {
                if let Some(ax) = s.strip_prefix("plus:") {
                    Ok(SpinLabel::Plus(parse_axis(ax)?))
                } else if let Some(ax) = s.strip_prefix("minus:") {
                    Ok(SpinLabel::Minus(parse_axis(ax)?))
                } else {
                    Err(format!("unknown spin label `{s}`"))
                }
            }
        }
    }
}

impl fmt::Display for SpinLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SpinLabel::Up => f.write_str("up"),
            SpinLabel::Down => f.write_str("down"),
            SpinLabel::Right => f.write_str("right"),
            SpinLabel::Left => f.write_str("left"),
            SpinLabel::Plus(n) => write!(f, "plus:{};{};{}", n[0], n[1], n[2]),
            SpinLabel::Minus(n) => write!(f, "minus:{};{};{}", n[0], n[1], n[2]),
        }
    }
}

/// Basis chosen inside degenerate eigenspaces.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BasisChoice {
    /// Product-like states.
    Standard,
    /// Maximally entangled states.
    Bell,
    /// Whole eigenspaces (no basis choice).
    Luders,
}

impl FromStr for BasisChoice {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "standard" => Ok(BasisChoice::Standard),
            "bell" => Ok(BasisChoice::Bell),
            "luders" => Ok(BasisChoice::Luders),
            _ => Err(format!("unknown basis `{s}` (standard, bell, luders)")),
        }
    }
}

/// Normalized product state `|a⟩_A ⊗ |b⟩_B`.
pub fn spin_state(a: SpinLabel, b: SpinLabel) -> Result<StateVector> {
    let (ka, kb) = (a.ket()?, b.ket()?);
    let amps = ka
        .iter()
        .flat_map(|x| kb.iter().map(move |y| x * y))
        .collect();
    StateVector::new(SPIN_DIMS.to_vec(), amps)
}

/// `exp(−i θ n·σ/2)` on a single spin.
pub fn rotation(axis: [f64; 3], angle: f64) -> Result<Operator> {
    let n = check_axis(axis)?;
    let (s, co) = (0.5 * angle).sin_cos();
    let m = DMatrix::from_row_slice(
        2,
        2,
        &[
            c(co, -s * n[2]),
            c(-s * n[1], -s * n[0]),
            c(s * n[1], -s * n[0]),
            c(co, s * n[2]),
        ],
    );
    Operator::new(vec![2], m)
}

/// Alice's local rotation `exp(−i θ n·σ_A/2) ⊗ 1_B`.
pub fn alice_rotate(state: &StateVector, axis: [f64; 3], angle: f64) -> Result<StateVector> {
    apply_local(state, &rotation(axis, angle)?, 0)
}

/// Applies a single-spin operator on `slot` of a two-spin state.
pub fn apply_local(state: &StateVector, op: &Operator, slot: usize) -> Result<StateVector> {
    if state.dims() != SPIN_DIMS {
        return Err(Error::DimensionMismatch {
            expected: SPIN_DIMS.to_vec(),
            found: state.dims().to_vec(),
        });
    }
    let full = embed_local(op, slot, &SPIN_DIMS)?;
    StateVector::from_dvector(SPIN_DIMS.to_vec(), full.apply(state.amplitudes()))
}

/// Cartesian spin component.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    X,
    Y,
    Z,
}

/// `(ħ/2) σ_axis` on a single spin.
pub fn spin_component(axis: Axis, hbar: f64) -> Operator {
    let h = 0.5 * hbar;
    let z = c(0.0, 0.0);
    let m = match axis {
        Axis::X => [z, c(h, 0.0), c(h, 0.0), z],
        Axis::Y => [z, c(0.0, -h), c(0.0, h), z],
        Axis::Z => [c(h, 0.0), z, z, c(-h, 0.0)],
    };
    Operator::hermitian(vec![2], DMatrix::from_row_slice(2, 2, &m))
        .expect("spin components are hermitian")
}

/// Local spin component of particle B.
pub fn spin_b(axis: Axis, hbar: f64) -> Operator {
    embed_local(&spin_component(axis, hbar), 1, &SPIN_DIMS).expect("slot 1 of two spins")
}

/// Local spin component of particle A.
pub fn spin_a(axis: Axis, hbar: f64) -> Operator {
    embed_local(&spin_component(axis, hbar), 0, &SPIN_DIMS).expect("slot 0 of two spins")
}

/// Total `S_z = s_Az + s_Bz`.
pub fn total_sz(hbar: f64) -> Operator {
    spin_a(Axis::Z, hbar)
        .add(&spin_b(Axis::Z, hbar))
        .expect("same dims")
}

/// Total `S² = (s_A + s_B)²`, eigenvalues `ħ² S(S+1)`.
pub fn total_s2(hbar: f64) -> Operator {
    [Axis::X, Axis::Y, Axis::Z]
        .into_iter()
        .map(|ax| {
            let s = spin_a(ax, hbar).add(&spin_b(ax, hbar)).expect("same dims");
            s.compose(&s).expect("same dims")
        })
        .reduce(|acc, t| acc.add(&t).expect("same dims"))
        .expect("three components")
}

/// Named two-spin observable.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SpinObservable {
    #[serde(rename = "sBz")]
    SBz,
    #[serde(rename = "sBx")]
    SBx,
    #[serde(rename = "sBy")]
    SBy,
    #[serde(rename = "S2")]
    S2,
    #[serde(rename = "Sz")]
    Sz,
}

impl SpinObservable {
    pub const ALL: [SpinObservable; 5] = [Self::SBz, Self::SBx, Self::SBy, Self::S2, Self::Sz];

    pub fn name(&self) -> &'static str {
        match self {
            Self::SBz => "sBz",
            Self::SBx => "sBx",
            Self::SBy => "sBy",
            Self::S2 => "S2",
            Self::Sz => "Sz",
        }
    }

    pub fn operator(&self, hbar: f64) -> Operator {
        match self {
            Self::SBz => spin_b(Axis::Z, hbar),
            Self::SBx => spin_b(Axis::X, hbar),
            Self::SBy => spin_b(Axis::Y, hbar),
            Self::S2 => total_s2(hbar),
            Self::Sz => total_sz(hbar),
        }
    }
}

impl FromStr for SpinObservable {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        Self::ALL
            .into_iter()
            .find(|o| o.name() == s)
            .ok_or_else(|| format!("unknown spin observable `{s}` (sBz, sBx, sBy, S2, Sz)"))
    }
}

fn ket4(xs: [f64; 4]) -> StateVector {
    StateVector::from_real(SPIN_DIMS.to_vec(), &xs).expect("four amplitudes")
}

fn singlet() -> StateVector {
    let h = FRAC_1_SQRT_2;
    ket4([0.0, h, -h, 0.0])
}

fn psi_plus() -> StateVector {
    let h = FRAC_1_SQRT_2;
    ket4([0.0, h, h, 0.0])
}

fn psi_minus() -> StateVector {
    singlet()
}

fn phi(sign: f64) -> StateVector {
    let h = FRAC_1_SQRT_2;
    ket4([h, 0.0, 0.0, sign * h])
}

fn product(i: usize) -> StateVector {
    let mut xs = [0.0; 4];
    xs[i] = 1.0;
    ket4(xs)
}

/// Total-spin `S²` measurement.
///
/// Outcome order: singlet first, then the triplet. `standard` resolves the
/// triplet as `{(↑↓+↓↑)/√2, ↑↑, ↓↓}`, `bell` as `{(↑↓+↓↑)/√2, (↑↑+↓↓)/√2,
/// (↑↑−↓↓)/√2}`, `luders` keeps it as one rank-3 outcome.
pub fn scheme_s2(choice: BasisChoice) -> MeasurementScheme {
    let dims = SPIN_DIMS.to_vec();
    let built = match choice {
        BasisChoice::Standard => MeasurementScheme::from_basis(
            dims,
            vec![
                ("S=0:singlet".into(), singlet()),
                ("S=1:psi+".into(), psi_plus()),
                ("S=1:uu".into(), product(0)),
                ("S=1:dd".into(), product(3)),
            ],
            SchemeKind::CompleteOrthogonal,
        ),
        BasisChoice::Bell => MeasurementScheme::from_basis(
            dims,
            vec![
                ("S=0:singlet".into(), singlet()),
                ("S=1:psi+".into(), psi_plus()),
                ("S=1:phi+".into(), phi(1.0)),
                ("S=1:phi-".into(), phi(-1.0)),
            ],
            SchemeKind::CompleteOrthogonal,
        ),
        BasisChoice::Luders => MeasurementScheme::from_subspaces(
            dims,
            vec![
                ("S=0".into(), vec![singlet()]),
                ("S=1".into(), vec![psi_plus(), product(0), product(3)]),
            ],
            SchemeKind::Luders,
        ),
    };
    built.expect("total-spin eigenvectors are orthonormal and complete")
}

/// Total `S_z` measurement.
///
/// Outcome order `m = 1, 0, 0, −1`. `standard` resolves `m = 0` as
/// `{↑↓, ↓↑}`, `bell` as `{(↑↓+↓↑)/√2, (↑↓−↓↑)/√2}`, `luders` keeps the
/// rank-2 eigenspace.
pub fn scheme_sz(choice: BasisChoice) -> MeasurementScheme {
    let dims = SPIN_DIMS.to_vec();
    let built = match choice {
        BasisChoice::Standard => MeasurementScheme::from_basis(
            dims,
            vec![
                ("m=1:uu".into(), product(0)),
                ("m=0:ud".into(), product(1)),
                ("m=0:du".into(), product(2)),
                ("m=-1:dd".into(), product(3)),
            ],
            SchemeKind::CompleteOrthogonal,
        ),
        BasisChoice::Bell => MeasurementScheme::from_basis(
            dims,
            vec![
                ("m=1:uu".into(), product(0)),
                ("m=0:psi+".into(), psi_plus()),
                ("m=0:psi-".into(), psi_minus()),
                ("m=-1:dd".into(), product(3)),
            ],
            SchemeKind::CompleteOrthogonal,
        ),
        BasisChoice::Luders => MeasurementScheme::from_subspaces(
            dims,
            vec![
                ("m=1".into(), vec![product(0)]),
                ("m=0".into(), vec![product(1), product(2)]),
                ("m=-1".into(), vec![product(3)]),
            ],
            SchemeKind::Luders,
        ),
    };
    built.expect("total-S_z eigenvectors are orthonormal and complete")
}

/// Expectation value before and after a measurement.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BeforeAfter {
    pub before: f64,
    pub after: f64,
}

/// `⟨O⟩` on the prestate and the outcome-averaged `⟨O⟩` after `scheme`.
pub fn measured_flag_observable(
    scheme: &MeasurementScheme,
    prestate: &StateVector,
    obs: &dyn Observable,
) -> Result<BeforeAfter> {
    Ok(BeforeAfter {
        before: prestate.expectation(obs)?,
        after: post_measurement_expectation(prestate, scheme, obs)?,
    })
}

/// Largest deviation of the reduced projectors `Tr_A P_i` on B from one
/// common multiple of `1_B`. Zero means the scheme is semicausal.
pub fn semicausality_deviation(scheme: &MeasurementScheme) -> Result<f64> {
    let reduced = scheme
        .outcomes()
        .iter()
        .map(|o| reduced_projector(&o.projector.to_operator(scheme.dims().to_vec())?, 1))
        .collect::<Result<Vec<_>>>()?;
    let mean =
        reduced.iter().map(|r| r.matrix().trace().re).sum::<f64>() / (2.0 * reduced.len() as f64);
    let target = DMatrix::<C64>::identity(2, 2) * c(mean, 0.0);
    Ok(reduced
        .iter()
        .map(|r| {
            (r.matrix() - &target)
                .iter()
                .map(|z| z.norm())
                .fold(0.0, f64::max)
        })
        .fold(0.0, f64::max))
}

/// Deterministic grid of `n` Bloch-sphere axes (Fibonacci lattice).
pub fn bloch_grid(n: usize) -> Vec<[f64; 3]> {
    let golden = std::f64::consts::PI * (3.0 - 5f64.sqrt());
    (0..n)
        .map(|i| {
            let z = 1.0 - (2.0 * i as f64 + 1.0) / n as f64;
            let r = (1.0 - z * z).sqrt();
            let phi = golden * i as f64;
            [r * phi.cos(), r * phi.sin(), z]
        })
        .collect()
}
