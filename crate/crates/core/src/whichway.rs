//! Which-way polarization measurement.
//!
//! A photon meets a beam splitter: with probability `γ` it is transmitted to
//! an analyzer at angle `θ` followed by detector D, otherwise it is reflected
//! to an analyzer at `θ′` followed by detector D′. Recording both detectors
//! gives a bivariate POVM over outcome pairs `(m, n)`, where `m` is the D
//! reading and `n` the D′ reading (`+` = click, `-` = no click):
//!
//! ```text
//! M₊₊ = O                 M₊₋ = γ E₊^θ
//! M₋₊ = (1−γ) E₊^θ′       M₋₋ = I − γ E₊^θ − (1−γ) E₊^θ′
//! ```
//!
//! Each marginal is a nonideal version of the corresponding polarization PVM,
//! related to it by a column-stochastic nonideality matrix.

use crate::error::{Error, Result};
use crate::measurement::{born_probabilities, polarization_pvm, Effect, OutcomeDistribution, Povm};
use crate::qcore::{projector_from_angle, ComplexMatrix, PolarizationAngle, StateDescriptor, Tolerances};

/// Outcome labels in effect order.
pub const WHICHWAY_LABELS: [&str; 4] = ["++", "+-", "-+", "--"];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WhichWayConfig {
    gamma: f64,
    theta: PolarizationAngle,
    theta_prime: PolarizationAngle,
}

impl WhichWayConfig {
    pub fn new(gamma: f64, theta: PolarizationAngle, theta_prime: PolarizationAngle) -> Result<Self> {
        if !(0.0..=1.0).contains(&gamma) {
            return Err(Error::Domain(format!(
                "transmission probability gamma must lie in [0, 1], got {gamma}"
            )));
        }
        Ok(Self {
            gamma,
            theta,
            theta_prime,
        })
    }

    /// Angles in radians.
    pub fn from_radians(gamma: f64, theta: f64, theta_prime: f64) -> Result<Self> {
        Self::new(
            gamma,
            PolarizationAngle::new(theta)?,
            PolarizationAngle::new(theta_prime)?,
        )
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn theta(&self) -> PolarizationAngle {
        self.theta
    }

    pub fn theta_prime(&self) -> PolarizationAngle {
        self.theta_prime
    }
}

/// Column-stochastic matrix mapping ideal PVM probabilities to measured marginals.
#[derive(Debug, Clone, PartialEq)]
pub struct NonidealityMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<f64>,
}

impl NonidealityMatrix {
    pub fn new(rows: usize, cols: usize, entries: Vec<f64>) -> Result<Self> {
        Self::new_with(rows, cols, entries, &Tolerances::default())
    }

    pub fn new_with(rows: usize, cols: usize, entries: Vec<f64>, tol: &Tolerances) -> Result<Self> {
        if rows == 0 || cols == 0 || entries.len() != rows * cols {
            return Err(Error::shape(format!("{rows}x{cols} nonideality matrix"), entries.len()));
        }
        if let Some(bad) = entries.iter().find(|x| !(x.is_finite() && **x >= 0.0)) {
            return Err(Error::Domain(format!(
                "nonideality entries must be nonnegative, got {bad}"
            )));
        }
        for j in 0..cols {
            let s: f64 = (0..rows).map(|i| entries[i * cols + j]).sum();
            if (s - 1.0).abs() > tol.algebraic {
                return Err(Error::Domain(format!("column {j} sums to {s}, not 1")));
            }
        }
        Ok(Self { rows, cols, entries })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.entries[row * self.cols + col]
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    pub fn row(&self, row: usize) -> &[f64] {
        &self.entries[row * self.cols..(row + 1) * self.cols]
    }

    /// Matrix-vector product with a vector of ideal probabilities.
    pub fn apply(&self, ideal: &[f64]) -> Result<Vec<f64>> {
        if ideal.len() != self.cols {
            return Err(Error::shape(self.cols, ideal.len()));
        }
        Ok((0..self.rows)
            .map(|i| self.row(i).iter().zip(ideal).map(|(a, b)| a * b).sum())
            .collect())
    }

    /// Same matrix with its rows reordered by `order`.
    pub fn permute_rows(&self, order: &[usize]) -> Result<Self> {
        let mut seen = vec![false; self.rows];
        if order.len() != self.rows
            || order
                .iter()
                .any(|&r| r >= self.rows || std::mem::replace(&mut seen[r], true))
        {
            return Err(Error::Domain("row order must be a permutation".into()));
        }
        let entries = order.iter().flat_map(|&r| self.row(r).iter().copied()).collect();
        Ok(Self {
            rows: self.rows,
            cols: self.cols,
            entries,
        })
    }
}

/// The four-effect which-way POVM together with its configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct BivariateWhichWay {
    config: WhichWayConfig,
    povm: Povm,
}

pub fn build_whichway(config: WhichWayConfig) -> Result<BivariateWhichWay> {
    let g = config.gamma;
    let e_theta = projector_from_angle(config.theta);
    let e_theta_prime = projector_from_angle(config.theta_prime);
    let d_click = e_theta.scale(g);
    let d_prime_click = e_theta_prime.scale(1.0 - g);
    let absorbed = ComplexMatrix::identity(2).sub(&d_click)?.sub(&d_prime_click)?;
    let effects = vec![
        Effect::new(WHICHWAY_LABELS[0], ComplexMatrix::zeros(2, 2)),
        Effect::new(WHICHWAY_LABELS[1], d_click),
        Effect::new(WHICHWAY_LABELS[2], d_prime_click),
        Effect::new(WHICHWAY_LABELS[3], absorbed),
    ];
    Ok(BivariateWhichWay {
        config,
        povm: Povm::new(effects)?,
    })
}

impl BivariateWhichWay {
    pub fn new(config: WhichWayConfig) -> Result<Self> {
        build_whichway(config)
    }

    pub fn config(&self) -> &WhichWayConfig {
        &self.config
    }

    pub fn povm(&self) -> &Povm {
        &self.povm
    }

    fn check_state(state: &StateDescriptor) -> Result<()> {
        if state.dim() != 2 {
            return Err(Error::shape("single-photon state of dimension 2", state.dim()));
        }
        Ok(())
    }

    /// `p_mn` over the labels `++, +-, -+, --`.
    pub fn joint_distribution(&self, state: &StateDescriptor) -> Result<OutcomeDistribution> {
        Self::check_state(state)?;
        born_probabilities(state, &self.povm)
    }

    /// Click probabilities `(P_D, P_D′)`.
    pub fn detection_probabilities(&self, state: &StateDescriptor) -> Result<(f64, f64)> {
        let p = self.joint_distribution(state)?;
        Ok((p.probs()[1], p.probs()[2]))
    }

    /// Detector D marginal `(Σ_n p₊ₙ, Σ_n p₋ₙ)`.
    pub fn theta_marginal(&self, state: &StateDescriptor) -> Result<[f64; 2]> {
        let p = self.joint_distribution(state)?;
        let p = p.probs();
        Ok([p[0] + p[1], p[2] + p[3]])
    }

    /// Detector D′ marginal `(Σ_m p_m₊, Σ_m p_m₋)`.
    pub fn theta_prime_marginal(&self, state: &StateDescriptor) -> Result<[f64; 2]> {
        let p = self.joint_distribution(state)?;
        let p = p.probs();
        Ok([p[0] + p[2], p[1] + p[3]])
    }

    /// Closed-form nonideality matrices `(λ, μ)` for the θ and θ′ observables.
    pub fn nonideality_matrices(&self) -> (NonidealityMatrix, NonidealityMatrix) {
        let g = self.config.gamma;
        let lambda = NonidealityMatrix {
            rows: 2,
            cols: 2,
            entries: vec![g, 0.0, 1.0 - g, 1.0],
        };
        let mu = NonidealityMatrix {
            rows: 2,
            cols: 2,
            entries: vec![1.0 - g, 0.0, g, 1.0],
        };
        (lambda, mu)
    }

    /// Largest deviation between the measured marginals and the nonideality
    /// matrices applied to the ideal PVM probabilities, over both branches.
    pub fn marginal_identity_deviation(&self, state: &StateDescriptor) -> Result<f64> {
        let (lambda, mu) = self.nonideality_matrices();
        let ideal_theta = born_probabilities(state, &polarization_pvm(self.config.theta))?;
        let ideal_theta_prime = born_probabilities(state, &polarization_pvm(self.config.theta_prime))?;
        let predicted_d = lambda.apply(ideal_theta.probs())?;
        let predicted_d_prime = mu.apply(ideal_theta_prime.probs())?;
        let measured_d = self.theta_marginal(state)?;
        let measured_d_prime = self.theta_prime_marginal(state)?;
        Ok(predicted_d
            .iter()
            .chain(&predicted_d_prime)
            .zip(measured_d.iter().chain(&measured_d_prime))
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max))
    }

    /// Nonideality matrices, self-checked against the marginals of a fixed
    /// set of probe states (linear polarizations every π/8 plus both
    /// circular polarizations and the maximally mixed state).
    pub fn marginals_and_nonideality(&self) -> Result<(NonidealityMatrix, NonidealityMatrix)> {
        let tol = Tolerances::default();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let mut probes: Vec<StateDescriptor> = (0..8)
            .map(|k| StateDescriptor::linear(k as f64 * std::f64::consts::PI / 8.0))
            .collect();
        for sign in [1.0, -1.0] {
            probes.push(StateDescriptor::pure(vec![
                num_complex::Complex64::new(s, 0.0),
                num_complex::Complex64::new(0.0, sign * s),
            ])?);
        }
        probes.push(StateDescriptor::maximally_mixed(2));
        for state in &probes {
            let dev = self.marginal_identity_deviation(state)?;
            if dev > tol.algebraic {
                return Err(Error::Invariant(format!("marginal identity off by {dev:e}")));
            }
        }
        Ok(self.nonideality_matrices())
    }

    /// `Σ_m p_m₋`, the probability that D′ does not click.
    pub fn certainty_check(&self, state: &StateDescriptor) -> Result<f64> {
        Ok(self.theta_prime_marginal(state)?[1])
    }
}
