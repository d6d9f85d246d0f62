//! Beta-Bernoulli bookkeeping shared by every policy and metric.
//!
//! Arms are indexed from zero internally. Anything written to disk (traces,
//! reports) converts to 1-based indices at the boundary.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Success/failure counts for one arm under a uniform Beta(1, 1) prior.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ArmState {
    pub successes: u64,
    pub failures: u64,
}

impl ArmState {
    pub const fn new(successes: u64, failures: u64) -> Self {
        Self {
            successes,
            failures,
        }
    }

    pub const fn pulls(&self) -> u64 {
        self.successes + self.failures
    }

    /// Returns the state after observing `reward`.
    #[must_use]
    pub const fn update(self, reward: bool) -> Self {
        if reward {
            Self {
                successes: self.successes + 1,
                ..self
            }
        } else {
            Self {
                failures: self.failures + 1,
                ..self
            }
        }
    }

    /// Beta posterior parameters `(successes + 1, failures + 1)`.
    pub fn posterior_params(&self) -> (f64, f64) {
        (self.successes as f64 + 1.0, self.failures as f64 + 1.0)
    }

    pub fn posterior_mean(&self) -> f64 {
        let (alpha, beta) = self.posterior_params();
        alpha / (alpha + beta)
    }

    /// Observed success ratio. An arm that has never been pulled reports 1.0,
    /// which keeps unseen arms maximally attractive to the weighted score.
    pub fn empirical_rate(&self) -> f64 {
        match self.pulls() {
            0 => 1.0,
            n => self.successes as f64 / n as f64,
        }
    }
}

/// One assignment: 1-based round, 0-based arm, observed bit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceEntry {
    pub round: usize,
    pub arm: usize,
    pub reward: bool,
}

/// Full assignment/reward sequence of one replication.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct BanditTrace {
    entries: Vec<TraceEntry>,
}

impl BanditTrace {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_capacity(n: usize) -> Self {
        Self {
            entries: Vec::with_capacity(n),
        }
    }

    /// Builds a trace from `(arm, reward)` pairs, numbering rounds from 1.
    pub fn from_pulls<I>(pulls: I) -> Self
    where
        I: IntoIterator<Item = (usize, bool)>,
    {
        let mut trace = Self::new();
        for (arm, reward) in pulls {
            trace.push(arm, reward);
        }
        trace
    }

    /// Appends the next round.
    pub fn push(&mut self, arm: usize, reward: bool) {
        let round = self.entries.len() + 1;
        self.entries.push(TraceEntry { round, arm, reward });
    }

    pub fn entries(&self) -> &[TraceEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn arms(&self) -> impl Iterator<Item = usize> + '_ {
        self.entries.iter().map(|e| e.arm)
    }

    /// Concatenates `other` after `self`, renumbering its rounds.
    pub fn concat(&self, other: &BanditTrace) -> BanditTrace {
        BanditTrace::from_pulls(
            self.entries
                .iter()
                .chain(other.entries.iter())
                .map(|e| (e.arm, e.reward)),
        )
    }

    /// Checks the round numbering and that every arm is below `n_arms`.
    pub fn validate(&self, n_arms: usize) -> Result<()> {
        for (i, e) in self.entries.iter().enumerate() {
            if e.round != i + 1 {
                return Err(Error::invalid(
                    "trace.round",
                    format!("expected round {}, found {}", i + 1, e.round),
                ));
            }
            if e.arm >= n_arms {
                return Err(Error::ArmOutOfRange { arm: e.arm, n_arms });
            }
        }
        Ok(())
    }

    /// Pull counts per arm.
    pub fn allocation_counts(&self, n_arms: usize) -> Vec<u64> {
        let mut counts = vec![0u64; n_arms];
        for e in &self.entries {
            counts[e.arm] += 1;
        }
        counts
    }

    /// Replays the trace into per-arm counts.
    pub fn arm_states(&self, n_arms: usize) -> Vec<ArmState> {
        let mut arms = vec![ArmState::default(); n_arms];
        for e in &self.entries {
            arms[e.arm] = arms[e.arm].update(e.reward);
        }
        arms
    }
}
