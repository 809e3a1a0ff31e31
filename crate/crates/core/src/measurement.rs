//! Projection-valued and positive operator-valued measures and the Born rule.

use std::ops::Deref;

use crate::error::{Error, Result};
use crate::qcore::{
    complement_projector, projector_from_angle, ComplexMatrix, PolarizationAngle, StateDescriptor, Tolerances,
};

/// One labelled positive operator of a measurement.
#[derive(Debug, Clone, PartialEq)]
pub struct Effect {
    label: String,
    matrix: ComplexMatrix,
}

impl Effect {
    pub fn new(label: impl Into<String>, matrix: ComplexMatrix) -> Self {
        Self {
            label: label.into(),
            matrix,
        }
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    /// Checks Hermiticity and `O ≤ M ≤ I`.
    pub fn validate(&self, tol: &Tolerances) -> Result<()> {
        let deviation = self.matrix.hermiticity_deviation();
        if deviation > tol.algebraic {
            return Err(Error::NotHermitian {
                label: self.label.clone(),
                deviation,
            });
        }
        let ev = self.matrix.hermitian_eigenvalues()?;
        let (min, max) = (ev[0], ev[ev.len() - 1]);
        if min < -tol.positivity || max > 1.0 + tol.positivity {
            return Err(Error::NotPositive {
                label: self.label.clone(),
                min_eigenvalue: min,
                max_eigenvalue: max,
            });
        }
        Ok(())
    }
}

/// A validated resolution of the identity. Effect order is significant.
#[derive(Debug, Clone, PartialEq)]
pub struct Povm {
    effects: Vec<Effect>,
    projective: bool,
}

impl Povm {
    pub fn new(effects: Vec<Effect>) -> Result<Self> {
        validate_povm_with(effects, &Tolerances::default())
    }

    pub fn effects(&self) -> &[Effect] {
        &self.effects
    }

    pub fn len(&self) -> usize {
        self.effects.len()
    }

    pub fn is_empty(&self) -> bool {
        self.effects.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.effects[0].matrix.rows()
    }

    pub fn labels(&self) -> Vec<String> {
        self.effects.iter().map(|e| e.label.clone()).collect()
    }

    pub fn effect(&self, label: &str) -> Option<&Effect> {
        self.effects.iter().find(|e| e.label == label)
    }

    /// True when every effect is a projector and distinct effects are orthogonal.
    pub fn is_projective(&self) -> bool {
        self.projective
    }

    pub fn as_pvm(&self) -> Option<Pvm> {
        self.projective.then(|| Pvm(self.clone()))
    }

    /// Replaces effects `i` and `j` by their sum, placed at position `min(i, j)`.
    pub fn merge(&self, i: usize, j: usize, label: impl Into<String>) -> Result<Povm> {
        if i == j || i >= self.len() || j >= self.len() {
            return Err(Error::Domain(format!(
                "cannot merge effects {i} and {j} of {}",
                self.len()
            )));
        }
        let (lo, hi) = (i.min(j), i.max(j));
        let merged = self.effects[lo].matrix.add(&self.effects[hi].matrix)?;
        let mut effects = self.effects.clone();
        effects.remove(hi);
        effects[lo] = Effect::new(label, merged);
        Povm::new(effects)
    }
}

/// A POVM whose effects are mutually orthogonal projectors.
#[derive(Debug, Clone, PartialEq)]
pub struct Pvm(Povm);

impl Pvm {
    pub fn into_povm(self) -> Povm {
        self.0
    }
}

impl Deref for Pvm {
    type Target = Povm;

    fn deref(&self) -> &Povm {
        &self.0
    }
}

impl TryFrom<Povm> for Pvm {
    type Error = Error;

    fn try_from(povm: Povm) -> Result<Pvm> {
        if povm.projective {
            Ok(Pvm(povm))
        } else {
            Err(Error::Domain("effects are not mutually orthogonal projectors".into()))
        }
    }
}

pub fn validate_povm(effects: Vec<Effect>) -> Result<Povm> {
    validate_povm_with(effects, &Tolerances::default())
}

pub fn validate_povm_with(effects: Vec<Effect>, tol: &Tolerances) -> Result<Povm> {
    let first = effects
        .first()
        .ok_or_else(|| Error::Domain("a POVM needs at least one effect".into()))?;
    let dim = first.matrix.rows();
    for e in &effects {
        if e.matrix.rows() != dim || e.matrix.cols() != dim {
            return Err(Error::shape(
                format!("{dim}x{dim} effect"),
                format!("{}x{} for {:?}", e.matrix.rows(), e.matrix.cols(), e.label),
            ));
        }
    }
    for (k, e) in effects.iter().enumerate() {
        if effects[..k].iter().any(|o| o.label == e.label) {
            return Err(Error::Domain(format!("duplicate outcome label {:?}", e.label)));
        }
    }
    for e in &effects {
        e.validate(tol)?;
    }
    let mut sum = ComplexMatrix::zeros(dim, dim);
    for e in &effects {
        sum = sum.add(&e.matrix)?;
    }
    let deviation = sum.max_abs_diff(&ComplexMatrix::identity(dim))?;
    if deviation > tol.algebraic {
        return Err(Error::NotComplete { deviation });
    }
    let projective = is_projective(&effects, tol)?;
    Ok(Povm { effects, projective })
}

fn is_projective(effects: &[Effect], tol: &Tolerances) -> Result<bool> {
    for (i, a) in effects.iter().enumerate() {
        let sq = a.matrix.matmul(&a.matrix)?;
        if sq.max_abs_diff(&a.matrix)? > tol.algebraic {
            return Ok(false);
        }
        for b in &effects[i + 1..] {
            if a.matrix.matmul(&b.matrix)?.max_abs() > tol.algebraic {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Outcome probabilities in the effect order of the measuring POVM.
#[derive(Debug, Clone, PartialEq)]
pub struct OutcomeDistribution {
    labels: Vec<String>,
    probs: Vec<f64>,
}

impl OutcomeDistribution {
    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn get(&self, label: &str) -> Option<f64> {
        self.labels.iter().position(|l| l == label).map(|i| self.probs[i])
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, f64)> {
        self.labels.iter().map(String::as_str).zip(self.probs.iter().copied())
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }
}

pub fn born_probabilities(state: &StateDescriptor, povm: &Povm) -> Result<OutcomeDistribution> {
    born_probabilities_with(state, povm, &Tolerances::default())
}

/// `p_m = ⟨ψ|M_m|ψ⟩` or `Tr ρ M_m`, with floating-point dust clamped.
pub fn born_probabilities_with(state: &StateDescriptor, povm: &Povm, tol: &Tolerances) -> Result<OutcomeDistribution> {
    let mut probs = Vec::with_capacity(povm.len());
    for e in &povm.effects {
        let p = state.expectation(&e.matrix)?.re;
        if p < -tol.probability {
            return Err(Error::NegativeProbability {
                label: e.label.clone(),
                value: p,
            });
        }
        probs.push(p.clamp(0.0, 1.0));
    }
    let total: f64 = probs.iter().sum();
    if (total - 1.0).abs() > tol.probability {
        return Err(Error::Invariant(format!("probabilities sum to {total}")));
    }
    if total != 1.0 {
        probs.iter_mut().for_each(|p| *p /= total);
    }
    Ok(OutcomeDistribution {
        labels: povm.labels(),
        probs,
    })
}

/// Two-outcome polarization PVM `{E₊^θ, E₋^θ}` labelled `"+"`, `"-"`.
pub fn polarization_pvm(theta: PolarizationAngle) -> Pvm {
    let povm = Povm::new(vec![
        Effect::new("+", projector_from_angle(theta)),
        Effect::new("-", complement_projector(theta)),
    ])
    .expect("polarization projectors resolve the identity");
    Pvm::try_from(povm).expect("polarization projectors are orthogonal")
}
