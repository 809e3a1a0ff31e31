//! Experiment configuration files.
//!
//! A config is a JSON object `{"kind": ..., "params": {...}, "output": {...}}`.
//! Angles are given in degrees and converted to radians once, here.

use std::fmt;
use std::str::FromStr;

use nonideal::bell::{AspectAngles, BellConfig};
use nonideal::qcore::{PolarizationAngle, StateDescriptor};
use nonideal::whichway::WhichWayConfig;
use nonideal::Complex64;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{CliError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Kind {
    Whichway,
    Bell,
    Aspect,
    SweepMartens,
    Sample,
}

impl Kind {
    pub fn as_str(self) -> &'static str {
        match self {
            Kind::Whichway => "whichway",
            Kind::Bell => "bell",
            Kind::Aspect => "aspect",
            Kind::SweepMartens => "sweep-martens",
            Kind::Sample => "sample",
        }
    }
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

impl FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => Err(format!("unknown format {other:?}; expected csv or json")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub path: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub format: Option<Format>,
}

/// A complex amplitude written either as a real number or as `[re, im]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Amplitude {
    Real(f64),
    Complex([f64; 2]),
}

/// Named state (`singlet`, `H`, `V`, `diag`) or explicit amplitudes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum StateSpec {
    Named(String),
    Amplitudes(Vec<Amplitude>),
}

impl StateSpec {
    pub const NAMES: [&'static str; 4] = ["singlet", "H", "V", "diag"];

    /// Explicit amplitude lists are normalized; the zero vector is rejected.
    pub fn resolve(&self, path: &str) -> Result<StateDescriptor> {
        match self {
            StateSpec::Named(name) => match name.as_str() {
                "singlet" => Ok(StateDescriptor::singlet()),
                "H" => Ok(StateDescriptor::horizontal()),
                "V" => Ok(StateDescriptor::vertical()),
                "diag" => Ok(StateDescriptor::diagonal()),
                other => Err(CliError::config(
                    path,
                    format!(
                        "unknown state {other:?}; expected one of {:?} or an amplitude list",
                        Self::NAMES
                    ),
                )),
            },
            StateSpec::Amplitudes(amps) => {
                let v: Vec<Complex64> = amps
                    .iter()
                    .map(|a| match *a {
                        Amplitude::Real(x) => Complex64::new(x, 0.0),
                        Amplitude::Complex([re, im]) => Complex64::new(re, im),
                    })
                    .collect();
                StateDescriptor::normalized(v).map_err(|e| CliError::config(path, e.to_string()))
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WhichwayParams {
    pub gamma: f64,
    pub theta_deg: f64,
    pub theta_prime_deg: f64,
    pub state: StateSpec,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ArmParams {
    pub gamma: f64,
    pub theta_deg: f64,
    pub theta_prime_deg: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BellParams {
    pub arm1: ArmParams,
    pub arm2: ArmParams,
    pub state: StateSpec,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AspectParams {
    pub theta1_deg: f64,
    pub theta1_prime_deg: f64,
    pub theta2_deg: f64,
    pub theta2_prime_deg: f64,
    pub state: StateSpec,
}

/// γ grid given either explicitly (`gammas`) or as `points` evenly spaced
/// values on `[0, 1]`; `θ′ = θ + Δ`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepParams {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gammas: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub points: Option<usize>,
    pub delta_deg: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theta_deg: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum SampleTarget {
    Whichway(WhichwayParams),
    Bell(BellParams),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SampleParams {
    pub target: SampleTarget,
    pub n_events: Option<u64>,
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Experiment {
    Whichway(WhichwayParams),
    Bell(BellParams),
    Aspect(AspectParams),
    SweepMartens(SweepParams),
    Sample(SampleParams),
}

impl Experiment {
    pub fn kind(&self) -> Kind {
        match self {
            Experiment::Whichway(_) => Kind::Whichway,
            Experiment::Bell(_) => Kind::Bell,
            Experiment::Aspect(_) => Kind::Aspect,
            Experiment::SweepMartens(_) => Kind::SweepMartens,
            Experiment::Sample(_) => Kind::Sample,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentSpec {
    pub experiment: Experiment,
    pub output: Option<OutputSpec>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSpec {
    kind: Kind,
    params: Value,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    output: Option<OutputSpec>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSample {
    target: RawTarget,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    n_events: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    seed: Option<u64>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTarget {
    kind: Kind,
    params: Value,
}

fn join(prefix: &str, inner: &str) -> String {
    if inner.is_empty() || inner == "." {
        prefix.to_string()
    } else {
        format!("{prefix}.{inner}")
    }
}

fn parse_value<T: DeserializeOwned>(value: Value, prefix: &str) -> Result<T> {
    serde_path_to_error::deserialize(value).map_err(|e| {
        let path = join(prefix, &e.path().to_string());
        CliError::config(path, e.into_inner().to_string())
    })
}

fn to_value<T: Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("config types serialize to JSON")
}

impl ExperimentSpec {
    pub fn from_json_str(text: &str) -> Result<Self> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let raw: RawSpec = serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            CliError::config(
                if path == "." { "<root>".to_string() } else { path },
                e.into_inner().to_string(),
            )
        })?;
        let experiment = match raw.kind {
            Kind::Whichway => Experiment::Whichway(parse_value(raw.params, "params")?),
            Kind::Bell => Experiment::Bell(parse_value(raw.params, "params")?),
            Kind::Aspect => Experiment::Aspect(parse_value(raw.params, "params")?),
            Kind::SweepMartens => Experiment::SweepMartens(parse_value(raw.params, "params")?),
            Kind::Sample => {
                let s: RawSample = parse_value(raw.params, "params")?;
                let target = match s.target.kind {
                    Kind::Whichway => SampleTarget::Whichway(parse_value(s.target.params, "params.target.params")?),
                    Kind::Bell => SampleTarget::Bell(parse_value(s.target.params, "params.target.params")?),
                    other => {
                        return Err(CliError::config(
                            "params.target.kind",
                            format!("cannot sample a {other} experiment; expected whichway or bell"),
                        ))
                    }
                };
                Experiment::Sample(SampleParams {
                    target,
                    n_events: s.n_events,
                    seed: s.seed,
                })
            }
        };
        let spec = ExperimentSpec {
            experiment,
            output: raw.output,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn to_json_value(&self) -> Value {
        let params = match &self.experiment {
            Experiment::Whichway(p) => to_value(p),
            Experiment::Bell(p) => to_value(p),
            Experiment::Aspect(p) => to_value(p),
            Experiment::SweepMartens(p) => to_value(p),
            Experiment::Sample(s) => {
                let (kind, params) = match &s.target {
                    SampleTarget::Whichway(p) => (Kind::Whichway, to_value(p)),
                    SampleTarget::Bell(p) => (Kind::Bell, to_value(p)),
                };
                to_value(&RawSample {
                    target: RawTarget { kind, params },
                    n_events: s.n_events,
                    seed: s.seed,
                })
            }
        };
        to_value(&RawSpec {
            kind: self.experiment.kind(),
            params,
            output: self.output.clone(),
        })
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(&self.to_json_value()).expect("JSON value serializes")
    }

    /// Range and completeness checks beyond what the schema enforces.
    pub fn validate(&self) -> Result<()> {
        match &self.experiment {
            Experiment::Whichway(p) => p.whichway_config("params").map(drop),
            Experiment::Bell(p) => p.bell_config("params").map(drop),
            Experiment::Aspect(p) => p.resolve("params").map(drop),
            Experiment::SweepMartens(p) => p.grid("params").and_then(|_| p.angles("params")).map(drop),
            Experiment::Sample(s) => match &s.target {
                SampleTarget::Whichway(p) => p.whichway_config("params.target.params").map(drop),
                SampleTarget::Bell(p) => p.bell_config("params.target.params").map(drop),
            },
        }
    }
}

fn angle(deg: f64, path: &str) -> Result<PolarizationAngle> {
    PolarizationAngle::from_degrees(deg).map_err(|e| CliError::config(path, e.to_string()))
}

fn arm_config(gamma: f64, theta_deg: f64, theta_prime_deg: f64, prefix: &str) -> Result<WhichWayConfig> {
    if !(0.0..=1.0).contains(&gamma) {
        return Err(CliError::config(
            join(prefix, "gamma"),
            format!("gamma must lie in [0, 1], got {gamma}"),
        ));
    }
    let theta = angle(theta_deg, &join(prefix, "theta_deg"))?;
    let theta_prime = angle(theta_prime_deg, &join(prefix, "theta_prime_deg"))?;
    WhichWayConfig::new(gamma, theta, theta_prime).map_err(|e| CliError::config(prefix, e.to_string()))
}

fn require_dim(state: StateDescriptor, dim: usize, path: &str) -> Result<StateDescriptor> {
    if state.dim() != dim {
        return Err(CliError::config(
            path,
            format!("state has dimension {}, this experiment needs {dim}", state.dim()),
        ));
    }
    Ok(state)
}

impl WhichwayParams {
    pub fn whichway_config(&self, prefix: &str) -> Result<(WhichWayConfig, StateDescriptor)> {
        let cfg = arm_config(self.gamma, self.theta_deg, self.theta_prime_deg, prefix)?;
        let path = join(prefix, "state");
        let state = require_dim(self.state.resolve(&path)?, 2, &path)?;
        Ok((cfg, state))
    }
}

impl BellParams {
    pub fn bell_config(&self, prefix: &str) -> Result<BellConfig> {
        let a = &self.arm1;
        let arm1 = arm_config(a.gamma, a.theta_deg, a.theta_prime_deg, &join(prefix, "arm1"))?;
        let b = &self.arm2;
        let arm2 = arm_config(b.gamma, b.theta_deg, b.theta_prime_deg, &join(prefix, "arm2"))?;
        let path = join(prefix, "state");
        let state = require_dim(self.state.resolve(&path)?, 4, &path)?;
        BellConfig::new(arm1, arm2, state).map_err(|e| CliError::config(prefix, e.to_string()))
    }
}

impl AspectParams {
    pub fn resolve(&self, prefix: &str) -> Result<(StateDescriptor, AspectAngles)> {
        let angles = AspectAngles {
            theta1: angle(self.theta1_deg, &join(prefix, "theta1_deg"))?,
            theta1_prime: angle(self.theta1_prime_deg, &join(prefix, "theta1_prime_deg"))?,
            theta2: angle(self.theta2_deg, &join(prefix, "theta2_deg"))?,
            theta2_prime: angle(self.theta2_prime_deg, &join(prefix, "theta2_prime_deg"))?,
        };
        let path = join(prefix, "state");
        let state = require_dim(self.state.resolve(&path)?, 4, &path)?;
        Ok((state, angles))
    }
}

impl SweepParams {
    pub fn grid(&self, prefix: &str) -> Result<Vec<f64>> {
        let grid = match (&self.gammas, self.points) {
            (Some(_), Some(_)) => {
                return Err(CliError::config(prefix, "give either gammas or points, not both"));
            }
            (None, None) => {
                return Err(CliError::config(
                    join(prefix, "gammas"),
                    "missing gamma grid (gammas or points)",
                ))
            }
            (Some(list), None) => list.clone(),
            (None, Some(0)) => Vec::new(),
            (None, Some(1)) => vec![0.0],
            (None, Some(n)) => (0..n).map(|k| k as f64 / (n - 1) as f64).collect(),
        };
        if grid.is_empty() {
            return Err(CliError::config(join(prefix, "gammas"), "gamma grid is empty"));
        }
        for (i, g) in grid.iter().enumerate() {
            if !(0.0..=1.0).contains(g) {
                return Err(CliError::config(
                    format!("{prefix}.gammas[{i}]"),
                    format!("gamma must lie in [0, 1], got {g}"),
                ));
            }
        }
        Ok(grid)
    }

    /// `(θ, θ′)` with `θ′ = θ + Δ`.
    pub fn angles(&self, prefix: &str) -> Result<(PolarizationAngle, PolarizationAngle)> {
        let theta_deg = self.theta_deg.unwrap_or(0.0);
        let theta = angle(theta_deg, &join(prefix, "theta_deg"))?;
        let theta_prime = angle(theta_deg + self.delta_deg, &join(prefix, "delta_deg"))?;
        Ok((theta, theta_prime))
    }
}
