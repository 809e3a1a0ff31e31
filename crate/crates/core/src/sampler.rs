//! Seeded Monte Carlo event generation.
//!
//! Events are drawn i.i.d. by inverse-CDF over the POVM's fixed label order.
//! The uniform variate is `(next_u64 >> 11) · 2⁻⁵³` from a ChaCha20 stream
//! seeded with `ChaCha20Rng::seed_from_u64(seed)`, so a `(seed, config)` pair
//! fully determines the log.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;

use crate::bell::{arm_signs, ChshReport};
use crate::error::{Error, Result};
use crate::measurement::{born_probabilities, OutcomeDistribution, Povm};
use crate::qcore::StateDescriptor;
use crate::whichway::WHICHWAY_LABELS;

/// Generator name recorded alongside every log.
pub const GENERATOR: &str = "chacha20-u53";

/// A reproducible sequence of measurement outcomes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EventLog {
    descriptor: String,
    generator: String,
    seed: u64,
    labels: Vec<String>,
    events: Vec<u16>,
}

impl EventLog {
    /// Assembles a log from raw outcome indices, checking each against `labels`.
    pub fn from_parts(
        descriptor: impl Into<String>,
        generator: impl Into<String>,
        seed: u64,
        labels: Vec<String>,
        events: Vec<u16>,
    ) -> Result<Self> {
        if let Some(bad) = events.iter().find(|&&e| e as usize >= labels.len()) {
            return Err(Error::Domain(format!(
                "event index {bad} outside label set of {}",
                labels.len()
            )));
        }
        Ok(Self {
            descriptor: descriptor.into(),
            generator: generator.into(),
            seed,
            labels,
            events,
        })
    }

    pub fn with_descriptor(mut self, descriptor: impl Into<String>) -> Self {
        self.descriptor = descriptor.into();
        self
    }

    pub fn descriptor(&self) -> &str {
        &self.descriptor
    }

    pub fn generator(&self) -> &str {
        &self.generator
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    /// Outcome indices into [`labels`](Self::labels).
    pub fn events(&self) -> &[u16] {
        &self.events
    }

    pub fn count(&self) -> usize {
        self.events.len()
    }

    pub fn event_labels(&self) -> impl Iterator<Item = &str> + '_ {
        self.events.iter().map(|&e| self.labels[e as usize].as_str())
    }

    pub fn counts(&self) -> Vec<u64> {
        let mut counts = vec![0u64; self.labels.len()];
        for &e in &self.events {
            counts[e as usize] += 1;
        }
        counts
    }

    /// Relative frequencies in label order; all zero for an empty log.
    pub fn frequencies(&self) -> Vec<f64> {
        let n = self.count();
        self.counts()
            .into_iter()
            .map(|c| if n == 0 { 0.0 } else { c as f64 / n as f64 })
            .collect()
    }

    /// Per-event ±1 readings of `(D₁, D₁′, D₂, D₂′)` for a quadrivariate log.
    pub fn quadruples(&self) -> Result<Vec<[i8; 4]>> {
        let table = quadruple_table(&self.labels)?;
        Ok(self.events.iter().map(|&e| table[e as usize]).collect())
    }
}

fn arm_index(label: &str) -> Option<usize> {
    WHICHWAY_LABELS.iter().position(|l| *l == label)
}

/// Detector readings for each label of a quadrivariate label set.
fn quadruple_table(labels: &[String]) -> Result<Vec<[i8; 4]>> {
    let mut seen = [false; 16];
    let table = labels
        .iter()
        .map(|label| {
            let parsed = label
                .split_once(',')
                .and_then(|(a, b)| Some((arm_index(a)?, arm_index(b)?)));
            let (i, j) = parsed.ok_or_else(|| Error::Domain(format!("{label:?} is not a quadruple label")))?;
            if std::mem::replace(&mut seen[4 * i + j], true) {
                return Err(Error::Domain(format!("duplicate label {label:?}")));
            }
            let (d1, d1p) = arm_signs(i);
            let (d2, d2p) = arm_signs(j);
            Ok([d1 as i8, d1p as i8, d2 as i8, d2p as i8])
        })
        .collect::<Result<Vec<_>>>()?;
    if table.len() != 16 {
        return Err(Error::Domain(format!(
            "expected 16 quadruple labels, got {}",
            table.len()
        )));
    }
    Ok(table)
}

/// Draws `n` outcomes from a distribution.
pub fn sample_distribution(dist: &OutcomeDistribution, n: usize, seed: u64) -> EventLog {
    let mut cumulative = Vec::with_capacity(dist.len());
    let mut acc = 0.0;
    for &p in dist.probs() {
        acc += p;
        cumulative.push(acc);
    }
    // rounding can leave the last cumulative value just under 1
    let fallback = dist.probs().iter().rposition(|&p| p > 0.0).unwrap_or(0);
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let events = (0..n)
        .map(|_| {
            let u = (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64);
            cumulative.iter().position(|&c| u < c).unwrap_or(fallback) as u16
        })
        .collect();
    EventLog {
        descriptor: String::new(),
        generator: GENERATOR.to_string(),
        seed,
        labels: dist.labels().to_vec(),
        events,
    }
}

/// `n` i.i.d. Born-rule outcomes of `povm` on `state`.
pub fn sample(povm: &Povm, state: &StateDescriptor, n: usize, seed: u64) -> Result<EventLog> {
    if povm.len() > u16::MAX as usize {
        return Err(Error::Domain(format!("too many outcomes ({})", povm.len())));
    }
    Ok(sample_distribution(&born_probabilities(state, povm)?, n, seed))
}

/// CHSH from the per-event quadruples of one generalized-run log.
pub fn empirical_chsh(log: &EventLog) -> Result<ChshReport> {
    let table = quadruple_table(log.labels())?;
    if log.count() == 0 {
        return Err(Error::Domain("empirical CHSH needs at least one event".into()));
    }
    let mut sums = [0i64; 4];
    for &e in log.events() {
        let [d1, d1p, d2, d2p] = table[e as usize];
        sums[0] += (d1 * d2) as i64;
        sums[1] += (d1 * d2p) as i64;
        sums[2] += (d1p * d2) as i64;
        sums[3] += (d1p * d2p) as i64;
    }
    let n = log.count() as f64;
    Ok(ChshReport::from_correlations(sums.map(|s| s as f64 / n)))
}
