//! Entropic nonideality measures, the Martens inequality for joint
//! nonideal measurements, and the Heisenberg dispersion relation.
//!
//! All logarithms are natural; entropies are in nats.

use crate::error::{Error, Result};
use crate::measurement::{polarization_pvm, Pvm};
use crate::qcore::{ComplexMatrix, PolarizationAngle, StateDescriptor, Tolerances};
use crate::whichway::{BivariateWhichWay, NonidealityMatrix};

/// Average row entropy of a nonideality matrix.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct NonidealityEntropy(f64);

impl NonidealityEntropy {
    pub fn value(self) -> f64 {
        self.0
    }
}

/// `J = −(1/N) Σ_{mm′} λ_{mm′} ln(λ_{mm′} / Σ_{m′} λ_{mm′})`, with `N` the
/// number of ideal outcomes (columns) and `0·ln 0 = 0`.
pub fn row_entropy(matrix: &NonidealityMatrix) -> NonidealityEntropy {
    let n = matrix.cols() as f64;
    let mut acc = 0.0;
    for r in 0..matrix.rows() {
        let row = matrix.row(r);
        let total: f64 = row.iter().sum();
        if total <= 0.0 {
            continue;
        }
        for &x in row.iter().filter(|&&x| x > 0.0) {
            acc -= x * (x / total).ln();
        }
    }
    NonidealityEntropy((acc / n).max(0.0))
}

/// `−ln max_{mn} Tr(E_m F_n)` over all effect pairs of two measurements.
pub fn martens_bound_pvms(first: &Pvm, second: &Pvm) -> Result<f64> {
    let mut best = f64::NEG_INFINITY;
    for e in first.effects() {
        for f in second.effects() {
            best = best.max(e.matrix().matmul(f.matrix())?.trace()?.re);
        }
    }
    if best.is_nan() || best <= 0.0 {
        return Err(Error::Domain(format!("maximal overlap {best} is not positive")));
    }
    Ok(-best.ln())
}

/// Martens bound for the polarization PVMs at `theta` and `theta_prime`.
pub fn martens_bound(theta: PolarizationAngle, theta_prime: PolarizationAngle) -> f64 {
    martens_bound_pvms(&polarization_pvm(theta), &polarization_pvm(theta_prime))
        .expect("polarization overlaps are at least 1/2")
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MartensReport {
    pub j_lambda: NonidealityEntropy,
    pub j_mu: NonidealityEntropy,
    pub bound: f64,
    pub satisfied: bool,
    /// `J_λ + J_μ − bound`.
    pub slack: f64,
}

impl MartensReport {
    pub fn from_parts(j_lambda: NonidealityEntropy, j_mu: NonidealityEntropy, bound: f64, tol: &Tolerances) -> Self {
        let slack = j_lambda.0 + j_mu.0 - bound;
        Self {
            j_lambda,
            j_mu,
            bound,
            satisfied: slack >= -tol.probability,
            slack,
        }
    }
}

pub fn martens_check(ww: &BivariateWhichWay) -> MartensReport {
    let (lambda, mu) = ww.nonideality_matrices();
    let cfg = ww.config();
    MartensReport::from_parts(
        row_entropy(&lambda),
        row_entropy(&mu),
        martens_bound(cfg.theta(), cfg.theta_prime()),
        &Tolerances::default(),
    )
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HeisenbergReport {
    /// `ΔA·ΔB`
    pub lhs: f64,
    /// `½|⟨[A, B]⟩|`
    pub rhs: f64,
    pub satisfied: bool,
}

pub fn heisenberg_check(state: &StateDescriptor, a: &ComplexMatrix, b: &ComplexMatrix) -> Result<HeisenbergReport> {
    let tol = Tolerances::default();
    for (name, op) in [("A", a), ("B", b)] {
        let dev = op.hermiticity_deviation();
        if dev > tol.algebraic {
            return Err(Error::Domain(format!("observable {name} is not Hermitian ({dev:e})")));
        }
    }
    let spread = |op: &ComplexMatrix| -> Result<f64> {
        let mean = state.expectation(op)?.re;
        let second = state.expectation(&op.matmul(op)?)?.re;
        Ok((second - mean * mean).max(0.0).sqrt())
    };
    let lhs = spread(a)? * spread(b)?;
    let rhs = 0.5 * state.expectation(&a.commutator(b)?)?.norm();
    Ok(HeisenbergReport {
        lhs,
        rhs,
        satisfied: lhs >= rhs - tol.probability,
    })
}
