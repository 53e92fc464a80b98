use nalgebra::DMatrix;

use super::operator::max_abs;
use super::{strides, total_dim, Projector, StateVector, C64};
use crate::{Error, NumericPolicy, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SchemeKind {
    /// Rank-1 projectors onto a full orthonormal basis.
    CompleteOrthogonal,
    /// Yes/no verification of one state.
    Qndsv,
    /// Projectors onto (possibly degenerate) eigenspaces.
    Luders,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub label: String,
    pub projector: Projector,
}

/// Ordered, labeled family of orthogonal projectors that resolves the identity.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementScheme {
    dims: Vec<usize>,
    outcomes: Vec<Outcome>,
    kind: SchemeKind,
}

/// Max-entry deviations of a projector family from the scheme axioms.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct SchemeDiagnostics {
    pub idempotence: f64,
    pub hermiticity: f64,
    pub orthogonality: f64,
    pub completeness: f64,
}

impl SchemeDiagnostics {
    pub fn max_deviation(&self) -> f64 {
        self.idempotence
            .max(self.hermiticity)
            .max(self.orthogonality)
            .max(self.completeness)
    }

    pub fn is_valid(&self, tol: f64) -> bool {
        self.max_deviation() <= tol
    }
}

impl MeasurementScheme {
    /// Validated constructor. Checks run on dense matrices, so keep this to
    /// spaces of at most a few hundred dimensions; the large structured
    /// families in this crate are built through `trusted`.
    pub fn new(dims: Vec<usize>, outcomes: Vec<Outcome>, kind: SchemeKind) -> Result<Self> {
        let scheme = Self::trusted(dims, outcomes, kind)?;
        let diag = validate_scheme(&scheme);
        if !diag.is_valid(NumericPolicy::DEFAULT.structural) {
            return Err(Error::InvalidScheme(format!(
                "projector family violates scheme axioms: {diag:?}"
            )));
        }
        Ok(scheme)
    }

    /// Constructor for families that are orthogonal and complete by
    /// construction; only shapes are checked.
    pub(crate) fn trusted(
        dims: Vec<usize>,
        outcomes: Vec<Outcome>,
        kind: SchemeKind,
    ) -> Result<Self> {
        let n = total_dim(&dims);
        if outcomes.is_empty() {
            return Err(Error::InvalidScheme("no outcomes".into()));
        }
        if let Some(bad) = outcomes.iter().find(|o| o.projector.dim() != n) {
            return Err(Error::InvalidScheme(format!(
                "outcome `{}` acts on dimension {}, scheme on {n}",
                bad.label,
                bad.projector.dim()
            )));
        }
        Ok(Self {
            dims,
            outcomes,
            kind,
        })
    }

    /// Rank-1 projectors onto the given labeled states.
    pub fn from_basis(
        dims: Vec<usize>,
        states: Vec<(String, StateVector)>,
        kind: SchemeKind,
    ) -> Result<Self> {
        let outcomes = states
            .into_iter()
            .map(|(label, s)| {
                Ok(Outcome {
                    label,
                    projector: Projector::onto_state(&s)?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(dims, outcomes, kind)
    }

    /// Projectors onto the spans of the given labeled state sets.
    pub fn from_subspaces(
        dims: Vec<usize>,
        subspaces: Vec<(String, Vec<StateVector>)>,
        kind: SchemeKind,
    ) -> Result<Self> {
        let outcomes = subspaces
            .into_iter()
            .map(|(label, states)| {
                let vecs: Vec<_> = states.iter().map(|s| s.amplitudes().clone()).collect();
                Ok(Outcome {
                    label,
                    projector: Projector::onto(&vecs)?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(dims, outcomes, kind)
    }

    /// The trivial one-outcome scheme (no measurement).
    pub fn identity(dims: Vec<usize>) -> Self {
        let n = total_dim(&dims);
        Self {
            dims,
            outcomes: vec![Outcome {
                label: "identity".into(),
                projector: Projector::identity(n),
            }],
            kind: SchemeKind::Luders,
        }
    }

    /// Lüders measurement of the occupation numbers of `slots`: one outcome
    /// per joint index on those slots, identity on the rest.
    pub fn local_number(dims: Vec<usize>, slots: &[usize]) -> Result<Self> {
        for &s in slots {
            if s >= dims.len() {
                return Err(Error::SlotOutOfRange {
                    slot: s,
                    count: dims.len(),
                });
            }
        }
        let n = total_dim(&dims);
        let st = strides(&dims);
        let sub_dims: Vec<usize> = slots.iter().map(|&s| dims[s]).collect();
        let count = total_dim(&sub_dims);
        let mut buckets: Vec<Vec<usize>> = vec![Vec::new(); count];
        let sub_st = strides(&sub_dims);
        for flat in 0..n {
            let key: usize = slots
                .iter()
                .zip(&sub_st)
                .map(|(&s, &w)| (flat / st[s]) % dims[s] * w)
                .sum();
            buckets[key].push(flat);
        }
        let outcomes = buckets
            .into_iter()
            .enumerate()
            .map(|(key, idx)| {
                let levels: Vec<String> = sub_st
                    .iter()
                    .zip(&sub_dims)
                    .map(|(&w, &d)| (key / w % d).to_string())
                    .collect();
                Ok(Outcome {
                    label: format!("n={}", levels.join(",")),
                    projector: Projector::coordinates(n, idx)?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Self::trusted(dims, outcomes, SchemeKind::Luders)
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn outcomes(&self) -> &[Outcome] {
        &self.outcomes
    }

    pub fn kind(&self) -> SchemeKind {
        self.kind
    }

    pub fn len(&self) -> usize {
        self.outcomes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.outcomes.is_empty()
    }

    pub fn outcome(&self, label: &str) -> Option<&Outcome> {
        self.outcomes.iter().find(|o| o.label == label)
    }
}

/// Two-outcome verification of `target`: `{yes: |t⟩⟨t|, no: 1 − |t⟩⟨t|}`.
pub fn qndsv_scheme(target: &StateVector) -> Result<MeasurementScheme> {
    if target.norm() == 0.0 {
        return Err(Error::ZeroVector);
    }
    if !target.is_normalized(NumericPolicy::DEFAULT.exact) {
        return Err(Error::NotNormalized {
            norm: target.norm(),
        });
    }
    let yes = Projector::onto_state(target)?;
    let no = yes.complement();
    MeasurementScheme::trusted(
        target.dims().to_vec(),
        vec![
            Outcome {
                label: "yes".into(),
                projector: yes,
            },
            Outcome {
                label: "no".into(),
                projector: no,
            },
        ],
        SchemeKind::Qndsv,
    )
}

/// Dense diagnostics of idempotence, hermiticity, pairwise orthogonality and
/// completeness.
pub fn validate_scheme(scheme: &MeasurementScheme) -> SchemeDiagnostics {
    let n = total_dim(scheme.dims());
    let dense: Vec<DMatrix<C64>> = scheme
        .outcomes()
        .iter()
        .map(|o| o.projector.to_dense())
        .collect();
    let mut diag = SchemeDiagnostics {
        idempotence: 0.0,
        hermiticity: 0.0,
        orthogonality: 0.0,
        completeness: 0.0,
    };
    let mut sum = DMatrix::<C64>::zeros(n, n);
    for (i, p) in dense.iter().enumerate() {
        diag.idempotence = diag.idempotence.max(max_abs(&(p * p - p)));
        diag.hermiticity = diag.hermiticity.max(max_abs(&(p - p.adjoint())));
        for q in &dense[i + 1..] {
            diag.orthogonality = diag.orthogonality.max(max_abs(&(p * q)));
        }
        sum += p;
    }
    diag.completeness = max_abs(&(sum - DMatrix::<C64>::identity(n, n)));
    diag
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum::c;
    use nalgebra::DVector;

    fn ket(xs: &[f64]) -> StateVector {
        StateVector::from_real(vec![2, 2], xs).unwrap()
    }

    #[test]
    fn qndsv_ranks() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let scheme = qndsv_scheme(&ket(&[h, h, 0.0, 0.0])).unwrap();
        let ranks: Vec<usize> = scheme
            .outcomes()
            .iter()
            .map(|o| o.projector.rank())
            .collect();
        assert_eq!(ranks, vec![1, 3]);
        assert!(validate_scheme(&scheme).is_valid(1e-12));
    }

    #[test]
    fn qndsv_of_basis_state_is_rank_one_diagonal() {
        let scheme = qndsv_scheme(&ket(&[1.0, 0.0, 0.0, 0.0])).unwrap();
        let yes = scheme.outcome("yes").unwrap().projector.to_dense();
        let mut expected = DMatrix::<C64>::zeros(4, 4);
        expected[(0, 0)] = c(1.0, 0.0);
        assert!(max_abs(&(yes - expected)) < 1e-15);
    }

    #[test]
    fn qndsv_rejects_zero_target() {
        assert_eq!(qndsv_scheme(&ket(&[0.0; 4])), Err(Error::ZeroVector));
    }

    #[test]
    fn yes_only_family_has_unit_completeness_hole() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let yes = Projector::onto_state(&ket(&[h, h, 0.0, 0.0])).unwrap();
        let scheme = MeasurementScheme::trusted(
            vec![2, 2],
            vec![Outcome {
                label: "yes".into(),
                projector: yes,
            }],
            SchemeKind::Qndsv,
        )
        .unwrap();
        let diag = validate_scheme(&scheme);
        assert!((diag.completeness - 1.0).abs() < 1e-12);
        assert!(diag.idempotence < 1e-12);
    }

    #[test]
    fn non_orthogonal_pair_is_reported() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let a = Projector::onto(&[DVector::from_vec(vec![c(1.0, 0.0), c(0.0, 0.0)])]).unwrap();
        let b = Projector::onto(&[DVector::from_vec(vec![c(h, 0.0), c(h, 0.0)])]).unwrap();
        let outcomes = vec![
            Outcome {
                label: "a".into(),
                projector: a,
            },
            Outcome {
                label: "b".into(),
                projector: b,
            },
        ];
        let scheme =
            MeasurementScheme::trusted(vec![2], outcomes.clone(), SchemeKind::CompleteOrthogonal)
                .unwrap();
        assert!(validate_scheme(&scheme).orthogonality > 0.1);
        assert!(MeasurementScheme::new(vec![2], outcomes, SchemeKind::CompleteOrthogonal).is_err());
    }

    #[test]
    fn local_number_scheme_is_complete() {
        let scheme = MeasurementScheme::local_number(vec![3, 2, 2], &[0, 2]).unwrap();
        assert_eq!(scheme.len(), 6);
        assert!(validate_scheme(&scheme).is_valid(1e-15));
        assert!(scheme.outcomes().iter().all(|o| o.projector.rank() == 2));
        assert_eq!(scheme.outcomes()[5].label, "n=2,1");
    }
}
