use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::environment::ScenarioSpec;
use crate::error::{Error, FieldError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Policy {
    /// Uniform random assignment.
    Ur,
    /// Beta-Bernoulli Thompson sampling.
    Ts,
    /// Thompson draws reweighted by `(1 + r) r` of the empirical rate.
    Wapts,
}

impl Policy {
    pub const ALL: [Policy; 3] = [Policy::Ur, Policy::Ts, Policy::Wapts];

    pub fn as_str(&self) -> &'static str {
        match self {
            Policy::Ur => "ur",
            Policy::Ts => "ts",
            Policy::Wapts => "wapts",
        }
    }
}

impl fmt::Display for Policy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Policy {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "ur" => Ok(Policy::Ur),
            "ts" => Ok(Policy::Ts),
            "wapts" => Ok(Policy::Wapts),
            other => Err(format!("unknown policy `{other}` (expected ur | ts | wapts)")),
        }
    }
}

/// Where the hypothesis-test threshold `theta* - epsilon` comes from.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ThresholdMode {
    /// Use the environment's true best success probability.
    #[default]
    TrueTheta,
    /// Use the largest posterior mean across arms.
    PlugIn,
}

impl ThresholdMode {
    pub fn as_str(&self) -> &'static str {
        match self {
            ThresholdMode::TrueTheta => "true_theta",
            ThresholdMode::PlugIn => "plug_in",
        }
    }
}

impl FromStr for ThresholdMode {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().replace('-', "_").as_str() {
            "true_theta" | "truetheta" | "true" => Ok(ThresholdMode::TrueTheta),
            "plug_in" | "plugin" => Ok(ThresholdMode::PlugIn),
            other => Err(format!(
                "unknown threshold mode `{other}` (expected true_theta | plug_in)"
            )),
        }
    }
}

/// Which rejections count as a detection in the "at least one lenient arm" power.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PowerCounting {
    /// Only rejections of arms that are truly epsilon-lenient.
    #[default]
    Strict,
    /// Any rejection at all.
    Permissive,
}

impl FromStr for PowerCounting {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "strict" => Ok(PowerCounting::Strict),
            "permissive" => Ok(PowerCounting::Permissive),
            other => Err(format!(
                "unknown power counting `{other}` (expected strict | permissive)"
            )),
        }
    }
}

pub const DEFAULT_ETA: f64 = 0.5;
pub const DEFAULT_TAU: f64 = 0.5;
pub const DEFAULT_FDR_Q: f64 = 0.05;
pub const DEFAULT_MIN_PULLS: u64 = 5;

/// Per-experiment knobs. `burn_in = None` resolves to the number of arms.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub n_participants: usize,
    pub policy: Policy,
    pub burn_in: Option<usize>,
    pub eta: f64,
    /// Absolute tolerance; overrides `eta * effect_size` when set.
    pub epsilon: Option<f64>,
    pub tau: f64,
    pub fdr_q: f64,
    pub threshold_mode: ThresholdMode,
    pub min_pull_diagnostic: u64,
    pub power_counting: PowerCounting,
}

impl ExperimentConfig {
    pub fn new(n_participants: usize, policy: Policy) -> Self {
        Self {
            n_participants,
            policy,
            burn_in: None,
            eta: DEFAULT_ETA,
            epsilon: None,
            tau: DEFAULT_TAU,
            fdr_q: DEFAULT_FDR_Q,
            threshold_mode: ThresholdMode::default(),
            min_pull_diagnostic: DEFAULT_MIN_PULLS,
            power_counting: PowerCounting::default(),
        }
    }

    pub fn with_policy(&self, policy: Policy) -> Self {
        Self {
            policy,
            ..self.clone()
        }
    }

    pub fn resolved_burn_in(&self, n_arms: usize) -> usize {
        self.burn_in.unwrap_or(n_arms)
    }

    pub fn epsilon_for(&self, scenario: &ScenarioSpec) -> f64 {
        self.epsilon.unwrap_or(self.eta * scenario.effect_size)
    }

    /// Collects every violated invariant instead of stopping at the first.
    pub fn violations(&self, n_arms: usize) -> Vec<FieldError> {
        let mut errs = Vec::new();
        if self.n_participants == 0 {
            errs.push(FieldError::new("n_participants", "must be at least 1"));
        }
        let burn_in = self.resolved_burn_in(n_arms);
        if burn_in > self.n_participants {
            errs.push(FieldError::new(
                "burn_in",
                format!(
                    "{burn_in} exceeds n_participants = {}",
                    self.n_participants
                ),
            ));
        }
        if !(0.0..=1.0).contains(&self.eta) {
            errs.push(FieldError::new("eta", format!("{} not in [0, 1]", self.eta)));
        }
        if let Some(eps) = self.epsilon {
            if !(eps >= 0.0 && eps.is_finite()) {
                errs.push(FieldError::new("epsilon", format!("{eps} must be >= 0")));
            }
        }
        if !(self.tau > 0.0 && self.tau <= 1.0) {
            errs.push(FieldError::new("tau", format!("{} not in (0, 1]", self.tau)));
        }
        if !(self.fdr_q > 0.0 && self.fdr_q < 1.0) {
            errs.push(FieldError::new("q", format!("{} not in (0, 1)", self.fdr_q)));
        }
        errs
    }

    pub fn validate(&self, n_arms: usize) -> Result<()> {
        let errs = self.violations(n_arms);
        if errs.is_empty() {
            Ok(())
        } else {
            Err(Error::Invalid(errs))
        }
    }
}
