//! Generalized EPR-Bell experiment.
//!
//! Each photon of a pair enters its own which-way setup (transmission `γᵢ`,
//! analyzer angles `θᵢ`, `θᵢ′`, detectors Dᵢ and Dᵢ′). The four detectors
//! are read out on every pair, so one run is described by a single 16-effect
//! POVM, the tensor product of the two arm POVMs. The Aspect experiments are
//! the corners `(γ₁, γ₂) ∈ {0, 1}²`, each measuring only one detector per arm.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::measurement::{born_probabilities, Effect, OutcomeDistribution, Povm};
use crate::qcore::{PolarizationAngle, StateDescriptor};
use crate::whichway::{build_whichway, BivariateWhichWay, WhichWayConfig, WHICHWAY_LABELS};

/// Slack on the classical CHSH bound before a value counts as a violation.
pub const CHSH_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct BellConfig {
    pub arm1: WhichWayConfig,
    pub arm2: WhichWayConfig,
    pub state: StateDescriptor,
}

impl BellConfig {
    pub fn new(arm1: WhichWayConfig, arm2: WhichWayConfig, state: StateDescriptor) -> Result<Self> {
        if state.dim() != 4 {
            return Err(Error::shape("photon-pair state of dimension 4", state.dim()));
        }
        Ok(Self { arm1, arm2, state })
    }
}

/// Which arm of the interferometer.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Arm {
    First,
    Second,
}

/// A detector-pair choice for a two-photon correlation, one detector per arm.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DetectorPair {
    D1D2,
    D1D2Prime,
    D1PrimeD2,
    D1PrimeD2Prime,
}

impl DetectorPair {
    /// CHSH order: `(D₁,D₂), (D₁,D₂′), (D₁′,D₂), (D₁′,D₂′)`.
    pub const ALL: [DetectorPair; 4] = [
        DetectorPair::D1D2,
        DetectorPair::D1D2Prime,
        DetectorPair::D1PrimeD2,
        DetectorPair::D1PrimeD2Prime,
    ];

    /// Whether the primed detector is used in arm 1 and arm 2 respectively.
    fn primes(self) -> (bool, bool) {
        match self {
            DetectorPair::D1D2 => (false, false),
            DetectorPair::D1D2Prime => (false, true),
            DetectorPair::D1PrimeD2 => (true, false),
            DetectorPair::D1PrimeD2Prime => (true, true),
        }
    }
}

impl fmt::Display for DetectorPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (p1, p2) = self.primes();
        write!(f, "D1{},D2{}", if p1 { "'" } else { "" }, if p2 { "'" } else { "" })
    }
}

impl FromStr for DetectorPair {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        DetectorPair::ALL
            .into_iter()
            .find(|p| p.to_string() == compact)
            .ok_or_else(|| {
                Error::Domain(format!(
                    "unknown detector pair {s:?}; expected one of D1,D2 D1,D2' D1',D2 D1',D2'"
                ))
            })
    }
}

/// `(D fired, D′ fired)` as ±1 for an arm outcome index in `WHICHWAY_LABELS` order.
pub(crate) fn arm_signs(index: usize) -> (f64, f64) {
    let d = if index < 2 { 1.0 } else { -1.0 };
    let d_prime = if index.is_multiple_of(2) { 1.0 } else { -1.0 };
    (d, d_prime)
}

fn detector_sign(arm_index: usize, primed: bool) -> f64 {
    let (d, d_prime) = arm_signs(arm_index);
    if primed {
        d_prime
    } else {
        d
    }
}

/// Quadruple label `"m₁n₁,m₂n₂"`.
pub fn quad_label(arm1_index: usize, arm2_index: usize) -> String {
    format!("{},{}", WHICHWAY_LABELS[arm1_index], WHICHWAY_LABELS[arm2_index])
}

/// The 16 outcome labels in effect order (arm 1 major).
pub fn quad_labels() -> Vec<String> {
    (0..16).map(|k| quad_label(k / 4, k % 4)).collect()
}

/// CHSH evaluation from four correlations in [`DetectorPair::ALL`] order.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChshReport {
    pub correlations: [f64; 4],
    /// `E(D₁,D₂) − E(D₁,D₂′) + E(D₁′,D₂) + E(D₁′,D₂′)`.
    pub s_value: f64,
    /// Largest `|S|` over the eight sign-symmetric CHSH combinations.
    pub s_max: f64,
    pub violates: bool,
}

impl ChshReport {
    pub fn from_correlations(correlations: [f64; 4]) -> Self {
        let [a, b, c, d] = correlations;
        let s_value = a - b + c + d;
        let total = a + b + c + d;
        let s_max = correlations.iter().map(|e| (total - 2.0 * e).abs()).fold(0.0, f64::max);
        Self {
            correlations,
            s_value,
            s_max,
            violates: s_value.abs() > 2.0 + CHSH_TOLERANCE,
        }
    }

    /// True if any of the eight CHSH forms exceeds 2.
    pub fn violates_any_form(&self) -> bool {
        self.s_max > 2.0 + CHSH_TOLERANCE
    }
}

/// The 16-effect direct-product POVM of one generalized run.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadrivariateBell {
    config: BellConfig,
    arm1: BivariateWhichWay,
    arm2: BivariateWhichWay,
    povm: Povm,
}

pub fn build_bell(config: BellConfig) -> Result<QuadrivariateBell> {
    let arm1 = build_whichway(config.arm1)?;
    let arm2 = build_whichway(config.arm2)?;
    let mut effects = Vec::with_capacity(16);
    for (i, e1) in arm1.povm().effects().iter().enumerate() {
        for (j, e2) in arm2.povm().effects().iter().enumerate() {
            effects.push(Effect::new(quad_label(i, j), e1.matrix().kron(e2.matrix())));
        }
    }
    Ok(QuadrivariateBell {
        povm: Povm::new(effects)?,
        config,
        arm1,
        arm2,
    })
}

impl QuadrivariateBell {
    pub fn new(config: BellConfig) -> Result<Self> {
        build_bell(config)
    }

    pub fn config(&self) -> &BellConfig {
        &self.config
    }

    pub fn povm(&self) -> &Povm {
        &self.povm
    }

    pub fn arm(&self, arm: Arm) -> &BivariateWhichWay {
        match arm {
            Arm::First => &self.arm1,
            Arm::Second => &self.arm2,
        }
    }

    /// `p_{m₁n₁m₂n₂}` over [`quad_labels`].
    pub fn quad_distribution(&self) -> Result<OutcomeDistribution> {
        born_probabilities(&self.config.state, &self.povm)
    }

    /// Bivariate marginal of one arm over `WHICHWAY_LABELS`.
    pub fn arm_marginal(&self, arm: Arm) -> Result<[f64; 4]> {
        let p = self.quad_distribution()?;
        let mut out = [0.0; 4];
        for (k, &pk) in p.probs().iter().enumerate() {
            let idx = match arm {
                Arm::First => k / 4,
                Arm::Second => k % 4,
            };
            out[idx] += pk;
        }
        Ok(out)
    }

    /// Expectation of the product of ±1 click values of the two chosen detectors.
    pub fn detector_correlation(&self, pair: DetectorPair) -> Result<f64> {
        let p = self.quad_distribution()?;
        Ok(correlation_from_probs(p.probs(), pair))
    }

    /// CHSH from the one joint distribution of all four detectors.
    pub fn chsh_single_run(&self) -> Result<ChshReport> {
        let p = self.quad_distribution()?;
        Ok(ChshReport::from_correlations(
            DetectorPair::ALL.map(|pair| correlation_from_probs(p.probs(), pair)),
        ))
    }
}

pub(crate) fn correlation_from_probs(probs: &[f64], pair: DetectorPair) -> f64 {
    let (p1, p2) = pair.primes();
    probs
        .iter()
        .enumerate()
        .map(|(k, p)| p * detector_sign(k / 4, p1) * detector_sign(k % 4, p2))
        .sum()
}

/// Analyzer angles of the two arms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AspectAngles {
    pub theta1: PolarizationAngle,
    pub theta1_prime: PolarizationAngle,
    pub theta2: PolarizationAngle,
    pub theta2_prime: PolarizationAngle,
}

impl AspectAngles {
    pub fn from_radians(theta1: f64, theta1_prime: f64, theta2: f64, theta2_prime: f64) -> Result<Self> {
        Ok(Self {
            theta1: PolarizationAngle::new(theta1)?,
            theta1_prime: PolarizationAngle::new(theta1_prime)?,
            theta2: PolarizationAngle::new(theta2)?,
            theta2_prime: PolarizationAngle::new(theta2_prime)?,
        })
    }

    pub fn from_degrees(theta1: f64, theta1_prime: f64, theta2: f64, theta2_prime: f64) -> Result<Self> {
        Self::from_radians(
            theta1.to_radians(),
            theta1_prime.to_radians(),
            theta2.to_radians(),
            theta2_prime.to_radians(),
        )
    }
}

/// One of the four Aspect corner runs and the detector pair it measures.
#[derive(Debug, Clone, PartialEq)]
pub struct AspectCorner {
    pub gammas: (f64, f64),
    pub pair: DetectorPair,
    pub experiment: QuadrivariateBell,
    pub correlation: f64,
}

/// The four corner experiments in [`DetectorPair::ALL`] order:
/// `(1,1)→(D₁,D₂)`, `(1,0)→(D₁,D₂′)`, `(0,1)→(D₁′,D₂)`, `(0,0)→(D₁′,D₂′)`.
pub fn aspect_corners(state: &StateDescriptor, angles: AspectAngles) -> Result<Vec<AspectCorner>> {
    DetectorPair::ALL
        .into_iter()
        .map(|pair| {
            let (p1, p2) = pair.primes();
            let g1 = if p1 { 0.0 } else { 1.0 };
            let g2 = if p2 { 0.0 } else { 1.0 };
            let config = BellConfig::new(
                WhichWayConfig::new(g1, angles.theta1, angles.theta1_prime)?,
                WhichWayConfig::new(g2, angles.theta2, angles.theta2_prime)?,
                state.clone(),
            )?;
            let experiment = build_bell(config)?;
            let correlation = experiment.detector_correlation(pair)?;
            Ok(AspectCorner {
                gammas: (g1, g2),
                pair,
                experiment,
                correlation,
            })
        })
        .collect()
}

/// CHSH pooled from four separate corner runs.
pub fn chsh_aspect(state: &StateDescriptor, angles: AspectAngles) -> Result<ChshReport> {
    let corners = aspect_corners(state, angles)?;
    let mut correlations = [0.0; 4];
    for (slot, corner) in correlations.iter_mut().zip(&corners) {
        *slot = corner.correlation;
    }
    Ok(ChshReport::from_correlations(correlations))
}
