use serde::Serialize;

use super::{det_sum, kick_displacements, KickSpec, ModeSet, WavePacket};
use crate::quantum::{c, C64};
use crate::Result;

/// Local field moments at Bob's site.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FieldExpectations {
    pub phi: f64,
    pub pi: f64,
    pub phi2: f64,
    pub pi2: f64,
}

/// `u_k` of `φ_y = Σ_k (u_k b_k + h.c.)` or of `π_y`.
pub(crate) fn quadrature_coefficients(
    modes: &ModeSet,
    y: &[usize],
    momentum: bool,
) -> Result<Vec<C64>> {
    modes.lattice().check_site(y)?;
    let origin = vec![0; modes.lattice().d];
    let (hbar, vol) = (modes.hbar(), modes.lattice().volume());
    Ok(modes
        .modes()
        .iter()
        .enumerate()
        .map(|(i, m)| {
            let ph = C64::from_polar(1.0, modes.phase(i, &origin, y));
            if momentum {
                ph * c(0.0, -(hbar * m.omega / (2.0 * vol)).sqrt())
            } else {
                ph * (hbar / (2.0 * m.omega * vol)).sqrt()
            }
        })
        .collect())
}

fn dot(u: &[C64], v: &[C64]) -> C64 {
    det_sum(u.len(), |i| u[i] * v[i])
}

/// `e^{−λ² g⁻¹(x,x)/2ħ}`, the vacuum overlap factor of the kick.
pub fn suppression_factor(modes: &ModeSet, x: &[usize], lambda: f64) -> Result<f64> {
    let g = modes.kernel_ginv(x, x)?;
    Ok((-lambda * lambda * g / (2.0 * modes.hbar())).exp())
}

/// `Σ_k ħω_k |α_k|²`; equals `λ²/(2a^d)` for any dispersion.
pub fn injected_energy(modes: &ModeSet, kick: &KickSpec) -> Result<f64> {
    let alphas = kick_displacements(modes, kick)?;
    let hbar = modes.hbar();
    Ok(det_sum(alphas.len(), |i| {
        hbar * modes.modes()[i].omega * alphas[i].norm_sqr()
    }))
}

/// Moments on the kicked vacuum itself (no measurement): a coherent state,
/// so `⟨X⟩ = 2Re Σ u_k α_k` and `⟨X²⟩ = ⟨X⟩² + Σ|u_k|²`.
pub fn prestate_expectations(
    modes: &ModeSet,
    kick: &KickSpec,
    y: &[usize],
) -> Result<FieldExpectations> {
    let alphas = kick_displacements(modes, kick)?;
    let moments = |u: &[C64]| {
        let mean = 2.0 * dot(u, &alphas).re;
        (mean, mean * mean + det_sum(u.len(), |i| u[i].norm_sqr()))
    };
    let (phi, phi2) = moments(&quadrature_coefficients(modes, y, false)?);
    let (pi, pi2) = moments(&quadrature_coefficients(modes, y, true)?);
    Ok(FieldExpectations { phi, pi, phi2, pi2 })
}

/// `⟨φ_y⟩` after verifying the one-particle state of mode `p` on the kicked
/// vacuum: `λ e^{−λ²g⁻¹(x,x)/2ħ} (ε/ω_p) sin p·(y−x)`.
pub fn qndsv_phi_y(modes: &ModeSet, kick: &KickSpec, y: &[usize], p: &[i64]) -> Result<f64> {
    let ip = modes.find_paired(p)?;
    modes.lattice().check_site(y)?;
    let supp = suppression_factor(modes, &kick.x, kick.lambda)?;
    let omega = modes.modes()[ip].omega;
    Ok(kick.lambda * supp * modes.epsilon() / omega * modes.phase(ip, &kick.x, y).sin())
}

/// `⟨φ_y⟩` after verifying a wave packet at time `t₁`:
/// `λ e^{−λ²g⁻¹(x,x)/2ħ} Im F*(t₁,x) F(t₁,y)`.
pub fn qndsv_wavepacket_phi_y(
    modes: &ModeSet,
    kick: &KickSpec,
    y: &[usize],
    packet: &WavePacket,
    t1: f64,
) -> Result<f64> {
    let s = sorkin_derivative(modes, &kick.x, y, packet, t1)?;
    Ok(kick.lambda * suppression_factor(modes, &kick.x, kick.lambda)? * s)
}

/// `S(x,y) = Im F*(t₁,x) F(t₁,y)`, the slope `d⟨φ_y⟩/dλ` at `λ = 0` where
/// the suppression factor is one.
pub fn sorkin_derivative(
    modes: &ModeSet,
    x: &[usize],
    y: &[usize],
    packet: &WavePacket,
    t1: f64,
) -> Result<f64> {
    let fx = packet.kernel_f(modes, t1, x)?;
    let fy = packet.kernel_f(modes, t1, y)?;
    Ok((fx.conj() * fy).im)
}

/// Exact post-verification moments of `φ_y` and `π_y` for a packet target.
///
/// With `A = Σ u_k b_k` (so the quadrature is `A + A†`), coherent prestate
/// `A|M⟩ = a|M⟩`, packet coefficients `f_k`, `B = Σ f_k* α_k`,
/// `U = Σ u_k f_k`, `C = Σ|u_k|²`, `S = Σ|α_k|²` and `P = |B|² e^{−S}`:
///
/// `⟨X⟩ = 2Re(a)(1 − P) − 2Re(UB) e^{−S}`,
/// `⟨X²⟩ = (2Re a)² + C − 2Re(a²) P − 4Re(a* U B) e^{−S} + 4P|U|²`.
pub fn qndsv_expectations(
    modes: &ModeSet,
    kick: &KickSpec,
    y: &[usize],
    packet: &WavePacket,
    t1: f64,
) -> Result<FieldExpectations> {
    let alphas = kick_displacements(modes, kick)?;
    let f = packet.coefficients(modes, t1);
    let fconj: Vec<C64> = f.iter().map(|z| z.conj()).collect();
    let s = det_sum(alphas.len(), |i| alphas[i].norm_sqr());
    let e = (-s).exp();
    let b = dot(&fconj, &alphas);
    let p = b.norm_sqr() * e;
    let moments = |u: &[C64]| {
        let a = dot(u, &alphas);
        let uu = dot(u, &f);
        let cc = det_sum(u.len(), |i| u[i].norm_sqr());
        let mean = 2.0 * a.re * (1.0 - p) - 2.0 * (uu * b).re * e;
        let sq =
            (2.0 * a.re).powi(2) + cc - 2.0 * (a * a).re * p - 4.0 * (a.conj() * uu * b).re * e
                + 4.0 * p * uu.norm_sqr();
        (mean, sq)
    };
    let (phi, phi2) = moments(&quadrature_coefficients(modes, y, false)?);
    let (pi, pi2) = moments(&quadrature_coefficients(modes, y, true)?);
    Ok(FieldExpectations { phi, pi, phi2, pi2 })
}

/// Two transcriptions of `⟨φ_y²⟩` after single-mode verification.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Phi2Report {
    /// `(3ħ/2)g⁻¹_yy + 2ħε/ω_p − (λ²ε/ħω_p) e^{−λ²g⁻¹_xx/2ħ}
    /// [2ħ g⁻¹_xy cos p·(x−y) + (ħ/2)g⁻¹_yy − (λ²/4)(g⁻¹_xy)²]`
    pub printed: f64,
    /// `(ħ/2)g⁻¹_yy + (λ²ε/ħω_p) e^{−λ²g⁻¹_xx/2ħ}
    /// [(λ²/4)(g⁻¹_xy)² + ħε/ω_p − ħ g⁻¹_xy cos p·(x−y)]`
    pub exact: f64,
}

/// `⟨φ_y²⟩` after verifying mode `p`: the literal published form next to
/// the exact lattice value (they differ already at `λ = 0`).
pub fn qndsv_phi2_y(
    modes: &ModeSet,
    kick: &KickSpec,
    y: &[usize],
    p: &[i64],
) -> Result<Phi2Report> {
    let ip = modes.find_paired(p)?;
    let x = &kick.x;
    let (hbar, eps, lam) = (modes.hbar(), modes.epsilon(), kick.lambda);
    let omega = modes.modes()[ip].omega;
    let gyy = modes.kernel_ginv(y, y)?;
    let gxy = modes.kernel_ginv(x, y)?;
    let supp = suppression_factor(modes, x, lam)?;
    let cosp = modes.phase(ip, x, y).cos();
    let pref = lam * lam * eps / (hbar * omega) * supp;
    let printed = 1.5 * hbar * gyy + 2.0 * hbar * eps / omega
        - pref * (2.0 * hbar * gxy * cosp + 0.5 * hbar * gyy - 0.25 * lam * lam * gxy * gxy);
    let exact = 0.5 * hbar * gyy
        + pref * (0.25 * lam * lam * gxy * gxy + hbar * eps / omega - hbar * gxy * cosp);
    Ok(Phi2Report { printed, exact })
}

/// Moments after the naive number measurement of the pair `±p`, which
/// leaves every other mode coherent:
///
/// `⟨φ_y⟩ = 0`, `⟨π_y⟩ = λ[δ_xy/a^d − 2ε cos p·(x−y)]`,
/// `⟨φ_y²⟩ = (ħ/2)g⁻¹_yy + λ²ε²/ω_p²`,
/// `⟨π_y²⟩ = ⟨π_y⟩² + (ħ/2)g_yy + λ²ε²`.
pub fn naive_np_expectations(
    modes: &ModeSet,
    kick: &KickSpec,
    y: &[usize],
    p: &[i64],
) -> Result<FieldExpectations> {
    let ip = modes.find_paired(p)?;
    modes.lattice().check_site(&kick.x)?;
    let (hbar, eps, lam) = (modes.hbar(), modes.epsilon(), kick.lambda);
    let omega = modes.modes()[ip].omega;
    let delta = if kick.x.as_slice() == y {
        1.0 / modes.lattice().cell()
    } else {
        0.0
    };
    let pi = lam * (delta - 2.0 * eps * modes.phase(ip, &kick.x, y).cos());
    Ok(FieldExpectations {
        phi: 0.0,
        pi,
        phi2: 0.5 * hbar * modes.kernel_ginv(y, y)? + (lam * eps / omega).powi(2),
        pi2: pi * pi + 0.5 * hbar * modes.kernel_g(y, y)? + (lam * eps).powi(2),
    })
}

/// Joint outcome probabilities `P_mn` of the naive `(N_p, N_{−p})`
/// measurement, a product of Poisson laws with mean `λ²/(2ħω_pV)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NaiveProbabilities {
    pub mean: f64,
    /// `table[m][n]` for `m, n < levels`.
    pub table: Vec<Vec<f64>>,
    /// `1 − Σ table`, the weight beyond the listed levels.
    pub tail: f64,
}

pub fn naive_np_probabilities(
    modes: &ModeSet,
    kick: &KickSpec,
    p: &[i64],
    levels: usize,
) -> Result<NaiveProbabilities> {
    let ip = modes.find_paired(p)?;
    modes.lattice().check_site(&kick.x)?;
    let omega = modes.modes()[ip].omega;
    let mean = kick.lambda * kick.lambda / (2.0 * modes.hbar() * omega * modes.lattice().volume());
    let mut pois = Vec::with_capacity(levels);
    let mut t = (-mean).exp();
    for n in 0..levels {
        if n > 0 {
            t *= mean / n as f64;
        }
        pois.push(t);
    }
    let single_tail = crate::oscillator::poisson_tail(mean, levels);
    let table = pois
        .iter()
        .map(|a| pois.iter().map(|b| a * b).collect())
        .collect();
    Ok(NaiveProbabilities {
        mean,
        table,
        tail: 2.0 * single_tail - single_tail * single_tail,
    })
}

/// Kick strength that maximizes `λ e^{−λ²g⁻¹_xx/2ħ}` and that maximum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MaxSignaling {
    pub lambda_star: f64,
    pub amplitude: f64,
    pub ginv_xx: f64,
}

/// `λ* = √(ħ/g⁻¹_xx)`, amplitude `√(ħ/(e g⁻¹_xx))`.
pub fn max_signaling(modes: &ModeSet, x: &[usize]) -> Result<MaxSignaling> {
    let g = modes.kernel_ginv(x, x)?;
    let hbar = modes.hbar();
    Ok(MaxSignaling {
        lambda_star: (hbar / g).sqrt(),
        amplitude: (hbar / (std::f64::consts::E * g)).sqrt(),
        ginv_xx: g,
    })
}
