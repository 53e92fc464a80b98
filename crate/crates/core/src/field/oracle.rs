use nalgebra::DVector;

use super::closed::{quadrature_coefficients, FieldExpectations};
use super::{kick_displacements, KickSpec, ModeSet, WavePacket};
use crate::oscillator::coherent_amplitudes;
use crate::quantum::{
    c, post_measurement_expectation, qndsv_scheme, strides, total_dim, MeasurementScheme,
    Observable, Quadrature, StateVector,
};
use crate::{Error, NumericPolicy, Result};

/// Largest truncated Fock space the oracle will build.
pub const ORACLE_MAX_DIM: usize = 200_000;

/// Measurement applied by the oracle.
#[derive(Debug, Clone, PartialEq)]
pub enum FieldScheme {
    None,
    /// Yes/no verification of a one-particle packet at time `t1`.
    Qndsv {
        packet: WavePacket,
        t1: f64,
    },
    /// Lüders number measurement of the pair `±p` only.
    Naive {
        p: Vec<i64>,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct OracleReport {
    pub values: FieldExpectations,
    /// Born weights of the scheme outcomes, in scheme order.
    pub probabilities: Vec<(String, f64)>,
    /// Norm lost by truncating every mode at `trunc` levels.
    pub tail_bound: f64,
    pub dim: usize,
}

/// Expectation values from an explicit truncated-Fock construction: the
/// kicked vacuum as a product of per-mode coherent vectors, the scheme as
/// quantum-core projectors, observables as ladder-operator sums.
pub fn numeric_oracle(
    modes: &ModeSet,
    kick: &KickSpec,
    y: &[usize],
    scheme: &FieldScheme,
    trunc: usize,
) -> Result<OracleReport> {
    let nmodes = modes.len();
    let dims = vec![trunc; nmodes];
    let dim = trunc
        .checked_pow(nmodes as u32)
        .filter(|&d| d <= ORACLE_MAX_DIM)
        .ok_or_else(|| {
            Error::InvalidParameter(format!(
                "oracle space {trunc}^{nmodes} exceeds {ORACLE_MAX_DIM} states"
            ))
        })?;
    let alphas = kick_displacements(modes, kick)?;
    let mut kept = 1.0;
    let mut factors = Vec::with_capacity(nmodes);
    for a in &alphas {
        let (amps, tail) = coherent_amplitudes(*a, trunc);
        kept *= 1.0 - tail;
        factors.push(amps);
    }
    let tail_bound = 1.0 - kept;
    let limit = NumericPolicy::DEFAULT.tail;
    if tail_bound > limit {
        return Err(Error::TruncationInsufficient {
            tail: tail_bound,
            limit,
        });
    }
    let st = strides(&dims);
    let amps = DVector::from_fn(dim, |flat, _| {
        factors
            .iter()
            .enumerate()
            .fold(c(1.0, 0.0), |acc, (k, f)| acc * f[(flat / st[k]) % trunc])
    });
    let state = StateVector::from_dvector(dims.clone(), amps)?;

    let ms = match scheme {
        FieldScheme::None => MeasurementScheme::identity(dims.clone()),
        FieldScheme::Qndsv { packet, t1 } => {
            let f = packet.coefficients(modes, *t1);
            let mut target = DVector::zeros(total_dim(&dims));
            for (k, fk) in f.iter().enumerate() {
                if trunc > 1 {
                    target[st[k]] = *fk;
                }
            }
            qndsv_scheme(&StateVector::from_dvector(dims.clone(), target)?.normalized()?)?
        }
        FieldScheme::Naive { p } => {
            let ip = modes.find_paired(p)?;
            MeasurementScheme::local_number(
                dims.clone(),
                &[ip.min(modes.partner(ip)), ip.max(modes.partner(ip))],
            )?
        }
    };

    let quad = |momentum: bool| -> Result<Quadrature> {
        let u = quadrature_coefficients(modes, y, momentum)?;
        Quadrature::new(dims.clone(), u.into_iter().enumerate().collect())
    };
    let phi = quad(false)?;
    let pi = quad(true)?;
    let eval = |o: &dyn Observable| post_measurement_expectation(&state, &ms, o);
    let values = FieldExpectations {
        phi: eval(&phi)?,
        pi: eval(&pi)?,
        phi2: eval(&phi.square())?,
        pi2: eval(&pi.square())?,
    };
    let probabilities = ms
        .outcomes()
        .iter()
        .map(|o| (o.label.clone(), o.projector.weight(state.amplitudes())))
        .collect();
    Ok(OracleReport {
        values,
        probabilities,
        tail_bound,
        dim,
    })
}
