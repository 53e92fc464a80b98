//! Free real scalar field on a periodic `d`-dimensional lattice.
//!
//! Each lattice wave vector `k = 2πq/(Na)`, `q_i ∈ (−N/2, N/2]`, carries an
//! independent oscillator `b_k` with `[b_k, b_p†] = δ_kp`, and
//!
//! `φ_x = Σ_k √(ħ/2ω_kV) (b_k e^{ik·x} + h.c.)`,
//! `π_x = Σ_k −i√(ħω_k/2V) (b_k e^{ik·x} − h.c.)`,
//!
//! so `[φ_x, π_y] = iħ δ_xy/a^d`. Mode integrals become `(1/V)Σ_k`, the
//! mode-volume factor is `ε = 1/V`. Sums run in a fixed order with a fixed
//! chunking, so results do not depend on the thread count.

mod closed;
mod oracle;

pub use closed::{
    injected_energy, max_signaling, naive_np_expectations, naive_np_probabilities,
    prestate_expectations, qndsv_expectations, qndsv_phi2_y, qndsv_phi_y, qndsv_wavepacket_phi_y,
    sorkin_derivative, suppression_factor, FieldExpectations, MaxSignaling, NaiveProbabilities,
    Phi2Report,
};
pub use oracle::{numeric_oracle, FieldScheme, OracleReport};

use std::f64::consts::PI;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::quantum::{c, C64};
use crate::{Error, NumericPolicy, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Dispersion {
    /// `ω² = m² + Σ_i (2/a)² sin²(k_i a/2)`
    Lattice,
    /// `ω² = m² + |k|²`
    Continuum,
}

impl FromStr for Dispersion {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "lattice" => Ok(Dispersion::Lattice),
            "continuum" => Ok(Dispersion::Continuum),
            _ => Err(format!("unknown dispersion `{s}` (lattice, continuum)")),
        }
    }
}

/// Periodic lattice with `sites` points per axis and spacing `spacing`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LatticeSpec {
    pub d: usize,
    pub sites: usize,
    pub spacing: f64,
    pub mass: f64,
    pub hbar: f64,
    pub dispersion: Dispersion,
    /// Frequency given to the zero mode of a massless field.
    pub regulator: Option<f64>,
}

impl LatticeSpec {
    /// Lattice dispersion, massless zero mode regulated at `10⁻³/a`.
    pub fn new(d: usize, sites: usize, spacing: f64, mass: f64, hbar: f64) -> Result<Self> {
        let spec = Self {
            d,
            sites,
            spacing,
            mass,
            hbar,
            dispersion: Dispersion::Lattice,
            regulator: Some(1e-3 / spacing),
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn with_dispersion(mut self, dispersion: Dispersion) -> Self {
        self.dispersion = dispersion;
        self
    }

    pub fn with_regulator(mut self, regulator: Option<f64>) -> Self {
        self.regulator = regulator;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(1..=3).contains(&self.d) {
            return Err(Error::InvalidParameter(format!(
                "dimension must be 1, 2 or 3, got {}",
                self.d
            )));
        }
        if self.sites < 2 || self.sites % 2 == 1 {
            return Err(Error::InvalidParameter(format!(
                "sites per axis must be even and at least 2, got {}",
                self.sites
            )));
        }
        if !(self.spacing > 0.0 && self.spacing.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "spacing must be positive, got {}",
                self.spacing
            )));
        }
        if !(self.mass >= 0.0 && self.mass.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "mass must be non-negative, got {}",
                self.mass
            )));
        }
        if !(self.hbar > 0.0 && self.hbar.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "hbar must be positive, got {}",
                self.hbar
            )));
        }
        if let Some(mu) = self.regulator {
            if !(mu > 0.0 && mu.is_finite()) {
                return Err(Error::InvalidParameter(format!(
                    "regulator must be positive, got {mu}"
                )));
            }
        }
        Ok(())
    }

    pub fn volume(&self) -> f64 {
        (self.sites as f64 * self.spacing).powi(self.d as i32)
    }

    /// `a^d`, the volume of one cell.
    pub fn cell(&self) -> f64 {
        self.spacing.powi(self.d as i32)
    }

    pub fn site_count(&self) -> usize {
        self.sites.pow(self.d as u32)
    }

    pub fn check_site(&self, site: &[usize]) -> Result<()> {
        if site.len() != self.d || site.iter().any(|&s| s >= self.sites) {
            return Err(Error::InvalidParameter(format!(
                "site {site:?} is not on the {}-dimensional lattice with {} sites per axis",
                self.d, self.sites
            )));
        }
        Ok(())
    }

    /// All sites in lexicographic order.
    pub fn sites_iter(&self) -> impl Iterator<Item = Vec<usize>> + '_ {
        (0..self.site_count()).map(move |i| {
            let mut rest = i;
            let mut s = vec![0; self.d];
            for slot in s.iter_mut().rev() {
                *slot = rest % self.sites;
                rest /= self.sites;
            }
            s
        })
    }
}

/// One plane-wave oscillator.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Mode {
    /// Integer wave index, `k = 2πq/(Na)`.
    pub q: Vec<i64>,
    pub k: Vec<f64>,
    pub omega: f64,
}

/// Plane-wave modes of a lattice with their `±k` pairing.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeSet {
    lattice: LatticeSpec,
    modes: Vec<Mode>,
    pairs: Vec<(usize, usize)>,
    self_conjugate: Vec<usize>,
}

/// Enumerates the dual lattice and assigns frequencies.
pub fn build_modes(lattice: &LatticeSpec) -> Result<ModeSet> {
    lattice.validate()?;
    let n = lattice.sites as i64;
    let a = lattice.spacing;
    let count = lattice.site_count();
    let mut modes = Vec::with_capacity(count);
    for idx in 0..count {
        let mut rest = idx;
        let mut q = vec![0i64; lattice.d];
        for slot in q.iter_mut().rev() {
            *slot = (rest % lattice.sites) as i64 - n / 2 + 1;
            rest /= lattice.sites;
        }
        let k: Vec<f64> = q
            .iter()
            .map(|&qi| 2.0 * PI * qi as f64 / (n as f64 * a))
            .collect();
        let k2: f64 = match lattice.dispersion {
            Dispersion::Lattice => q
                .iter()
                .map(|&qi| {
                    let s = (PI * qi as f64 / n as f64).sin();
                    4.0 * s * s / (a * a)
                })
                .sum(),
            Dispersion::Continuum => k.iter().map(|x| x * x).sum(),
        };
        let mut omega = (lattice.mass * lattice.mass + k2).sqrt();
        if omega == 0.0 {
            omega = lattice.regulator.ok_or(Error::MasslessZeroMode)?;
        }
        modes.push(Mode { q, k, omega });
    }
    let mut pairs = Vec::new();
    let mut self_conjugate = Vec::new();
    for (i, m) in modes.iter().enumerate() {
        let neg: Vec<i64> = m.q.iter().map(|&qi| wrap(-qi, n)).collect();
        if neg == m.q {
            self_conjugate.push(i);
        } else {
            let j = index_of(&neg, lattice);
            if i < j {
                pairs.push((i, j));
            }
        }
    }
    Ok(ModeSet {
        lattice: lattice.clone(),
        modes,
        pairs,
        self_conjugate,
    })
}

/// Maps an integer wave index into `(−N/2, N/2]`.
fn wrap(q: i64, n: i64) -> i64 {
    let r = (q + n / 2 - 1).rem_euclid(n);
    r - n / 2 + 1
}

fn index_of(q: &[i64], lattice: &LatticeSpec) -> usize {
    let n = lattice.sites as i64;
    q.iter().fold(0usize, |acc, &qi| {
        acc * lattice.sites + (qi + n / 2 - 1) as usize
    })
}

/// Deterministic parallel sum: fixed chunks reduced in index order.
pub(crate) fn det_sum<T, F>(n: usize, f: F) -> T
where
    T: Send + Copy + std::iter::Sum<T>,
    F: Fn(usize) -> T + Sync,
{
    const CHUNK: usize = 4096;
    if n <= CHUNK {
        return (0..n).map(&f).sum();
    }
    let parts: Vec<T> = (0..n.div_ceil(CHUNK))
        .into_par_iter()
        .map(|ch| (ch * CHUNK..((ch + 1) * CHUNK).min(n)).map(&f).sum())
        .collect();
    parts.into_iter().sum()
}

impl ModeSet {
    pub fn lattice(&self) -> &LatticeSpec {
        &self.lattice
    }

    pub fn modes(&self) -> &[Mode] {
        &self.modes
    }

    pub fn len(&self) -> usize {
        self.modes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.modes.is_empty()
    }

    /// `(k, −k)` index pairs, each listed once.
    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }

    /// Modes with `k ≡ −k`.
    pub fn self_conjugate(&self) -> &[usize] {
        &self.self_conjugate
    }

    /// `ε = 1/V`
    pub fn epsilon(&self) -> f64 {
        1.0 / self.lattice.volume()
    }

    pub fn hbar(&self) -> f64 {
        self.lattice.hbar
    }

    /// Index of the mode with wave index `q` (wrapped into the zone).
    pub fn find(&self, q: &[i64]) -> Result<usize> {
        if q.len() != self.lattice.d {
            return Err(Error::InvalidParameter(format!(
                "wave index {q:?} has wrong dimension for d = {}",
                self.lattice.d
            )));
        }
        let n = self.lattice.sites as i64;
        let wrapped: Vec<i64> = q.iter().map(|&qi| wrap(qi, n)).collect();
        Ok(index_of(&wrapped, &self.lattice))
    }

    /// Index of `q`, rejecting self-conjugate modes.
    pub fn find_paired(&self, q: &[i64]) -> Result<usize> {
        let i = self.find(q)?;
        if self.self_conjugate.contains(&i) {
            return Err(Error::SelfConjugateMode(self.modes[i].q.clone()));
        }
        Ok(i)
    }

    /// Partner of a paired mode.
    pub fn partner(&self, i: usize) -> usize {
        let neg: Vec<i64> = self.modes[i].q.iter().map(|&qi| -qi).collect();
        self.find(&neg)
            .expect("negated index has the same dimension")
    }

    /// `k·(y − x)` evaluated from integer indices, exact modulo 2π.
    pub fn phase(&self, mode: usize, x: &[usize], y: &[usize]) -> f64 {
        let n = self.lattice.sites as i64;
        let dot: i64 = self.modes[mode]
            .q
            .iter()
            .zip(x.iter().zip(y))
            .map(|(&qi, (&xi, &yi))| qi * (yi as i64 - xi as i64))
            .sum();
        2.0 * PI * dot.rem_euclid(n) as f64 / n as f64
    }

    fn kernel(&self, x: &[usize], y: &[usize], power: f64) -> Result<f64> {
        self.lattice.check_site(x)?;
        self.lattice.check_site(y)?;
        let sum = det_sum(self.modes.len(), |i| {
            self.modes[i].omega.powf(power) * self.phase(i, x, y).cos()
        });
        Ok(sum / self.lattice.volume())
    }

    /// `g(x, y) = (1/V) Σ_k ω_k cos k·(x−y)`
    pub fn kernel_g(&self, x: &[usize], y: &[usize]) -> Result<f64> {
        self.kernel(x, y, 1.0)
    }

    /// `g⁻¹(x, y) = (1/V) Σ_k ω_k⁻¹ cos k·(x−y)`
    pub fn kernel_ginv(&self, x: &[usize], y: &[usize]) -> Result<f64> {
        self.kernel(x, y, -1.0)
    }

    /// `max_{x,y} |a^{2d} Σ_z g⁻¹(x,z) g(z,y) − δ_xy|` over all site pairs.
    pub fn kernel_duality_residual(&self) -> Result<f64> {
        let sites: Vec<Vec<usize>> = self.lattice.sites_iter().collect();
        let origin = vec![0; self.lattice.d];
        // translation invariance: tabulate g(0, z), g⁻¹(0, z)
        let g: Vec<f64> = sites
            .iter()
            .map(|z| self.kernel_g(&origin, z))
            .collect::<Result<_>>()?;
        let gi: Vec<f64> = sites
            .iter()
            .map(|z| self.kernel_ginv(&origin, z))
            .collect::<Result<_>>()?;
        let n = self.lattice.sites;
        let diff = |a: &[usize], b: &[usize]| -> usize {
            a.iter()
                .zip(b)
                .fold(0, |acc, (&ai, &bi)| acc * n + (bi + n - ai) % n)
        };
        let cell2 = self.lattice.cell() * self.lattice.cell();
        let mut worst: f64 = 0.0;
        for y in &sites {
            let total: f64 = sites
                .iter()
                .map(|z| gi[diff(&origin, z)] * g[diff(z, y)])
                .sum();
            let delta = if y == &origin { 1.0 } else { 0.0 };
            worst = worst.max((cell2 * total - delta).abs());
        }
        Ok(worst)
    }
}

/// Alice's kick `e^{iλφ_x/ħ}` at site `x`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KickSpec {
    pub x: Vec<usize>,
    pub lambda: f64,
}

impl KickSpec {
    pub fn new(x: Vec<usize>, lambda: f64) -> Self {
        Self { x, lambda }
    }
}

/// Coherent amplitudes `α_k = iλ e^{−ik·x}/√(2ħω_kV)` of the kicked vacuum.
pub fn kick_displacements(modes: &ModeSet, kick: &KickSpec) -> Result<Vec<C64>> {
    modes.lattice.check_site(&kick.x)?;
    let origin = vec![0; modes.lattice.d];
    let (hbar, vol) = (modes.hbar(), modes.lattice.volume());
    Ok(modes
        .modes
        .iter()
        .enumerate()
        .map(|(i, m)| {
            // e^{−ik·x} = e^{ik·(0 − x)}
            let ph = modes.phase(i, &kick.x, &origin);
            C64::from_polar(kick.lambda / (2.0 * hbar * m.omega * vol).sqrt(), ph) * c(0.0, 1.0)
        })
        .collect())
}

/// One-particle wave packet `Σ_k φ̃_k b_k†|0⟩/√V` with `Σ_k |φ̃_k|²/V = 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct WavePacket {
    amplitudes: Vec<C64>,
}

impl WavePacket {
    /// Spectral amplitudes in mode order; must be normalized.
    pub fn new(modes: &ModeSet, amplitudes: Vec<C64>) -> Result<Self> {
        if amplitudes.len() != modes.len() {
            return Err(Error::DimensionMismatch {
                expected: vec![modes.len()],
                found: vec![amplitudes.len()],
            });
        }
        let norm = amplitudes.iter().map(|z| z.norm_sqr()).sum::<f64>() * modes.epsilon();
        if (norm - 1.0).abs() > NumericPolicy::DEFAULT.structural {
            return Err(Error::InvalidParameter(format!(
                "wave packet normalization is {norm}, expected 1"
            )));
        }
        Ok(Self { amplitudes })
    }

    /// Packet built from `(q, weight)` entries, rescaled to unit norm.
    pub fn from_weights(modes: &ModeSet, weights: &[(Vec<i64>, C64)]) -> Result<Self> {
        let mut amps = vec![c(0.0, 0.0); modes.len()];
        for (q, w) in weights {
            amps[modes.find(q)?] += *w;
        }
        let norm = (amps.iter().map(|z| z.norm_sqr()).sum::<f64>() * modes.epsilon()).sqrt();
        if norm == 0.0 {
            return Err(Error::ZeroVector);
        }
        Self::new(modes, amps.into_iter().map(|z| z / norm).collect())
    }

    /// Spectral delta on mode `q`: `φ̃ = √V` there, zero elsewhere.
    pub fn single_mode(modes: &ModeSet, q: &[i64]) -> Result<Self> {
        let mut amps = vec![c(0.0, 0.0); modes.len()];
        amps[modes.find(q)?] = c(modes.lattice.volume().sqrt(), 0.0);
        Self::new(modes, amps)
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    /// Normalized one-particle coefficients `f_k = φ̃_k e^{−iω_k t₁}/√V`.
    pub fn coefficients(&self, modes: &ModeSet, t1: f64) -> Vec<C64> {
        let s = modes.lattice.volume().sqrt();
        self.amplitudes
            .iter()
            .zip(&modes.modes)
            .map(|(a, m)| a * C64::from_polar(1.0 / s, -m.omega * t1))
            .collect()
    }

    /// `F(t, z) = (1/V) Σ_k φ̃_k ω_k^{−1/2} e^{−i(ω_k t − k·z)}`
    pub fn kernel_f(&self, modes: &ModeSet, t: f64, z: &[usize]) -> Result<C64> {
        modes.lattice.check_site(z)?;
        let origin = vec![0; modes.lattice.d];
        let sum: C64 = det_sum(modes.len(), |i| {
            let a = self.amplitudes[i];
            if a == c(0.0, 0.0) {
                return c(0.0, 0.0);
            }
            let m = &modes.modes[i];
            a * C64::from_polar(m.omega.powf(-0.5), modes.phase(i, &origin, z) - m.omega * t)
        });
        Ok(sum / modes.lattice.volume())
    }
}
