//! Hidden ground truth for the fixed-gap and flexible-gap scenarios.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, FieldError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScenarioKind {
    /// One arm at `theta_min + effect_size`, every other arm at `theta_min`.
    FixedGap,
    /// One arm pinned at `theta_min + effect_size`, the rest uniform below it.
    FlexibleGap,
}

impl ScenarioKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            ScenarioKind::FixedGap => "fixed",
            ScenarioKind::FlexibleGap => "flexible",
        }
    }
}

impl fmt::Display for ScenarioKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ScenarioKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().replace('-', "_").as_str() {
            "fixed" | "fixed_gap" | "fixedgap" => Ok(ScenarioKind::FixedGap),
            "flexible" | "flex" | "flexible_gap" | "flexiblegap" => Ok(ScenarioKind::FlexibleGap),
            other => Err(format!(
                "unknown scenario kind `{other}` (expected fixed | flexible)"
            )),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScenarioSpec {
    pub kind: ScenarioKind,
    pub n_arms: usize,
    pub theta_min: f64,
    pub effect_size: f64,
}

impl ScenarioSpec {
    pub fn new(kind: ScenarioKind, n_arms: usize, theta_min: f64, effect_size: f64) -> Self {
        Self {
            kind,
            n_arms,
            theta_min,
            effect_size,
        }
    }

    pub fn fixed(n_arms: usize, theta_min: f64, effect_size: f64) -> Self {
        Self::new(ScenarioKind::FixedGap, n_arms, theta_min, effect_size)
    }

    pub fn flexible(n_arms: usize, theta_min: f64, effect_size: f64) -> Self {
        Self::new(ScenarioKind::FlexibleGap, n_arms, theta_min, effect_size)
    }

    pub fn theta_star(&self) -> f64 {
        self.theta_min + self.effect_size
    }

    pub fn violations(&self) -> Vec<FieldError> {
        let mut errs = Vec::new();
        if self.n_arms < 2 {
            errs.push(FieldError::new(
                "n_arms",
                format!("{} arms; at least 2 required", self.n_arms),
            ));
        }
        if !(self.theta_min >= 0.0 && self.theta_min <= 1.0) {
            errs.push(FieldError::new(
                "theta_min",
                format!("{} not in [0, 1]", self.theta_min),
            ));
        }
        if !(self.effect_size >= 0.0 && self.effect_size.is_finite()) {
            errs.push(FieldError::new(
                "delta",
                format!("{} must be >= 0", self.effect_size),
            ));
        }
        if self.theta_star() > 1.0 {
            errs.push(FieldError::new(
                "theta_min + delta",
                format!(
                    "theta_min ({}) + delta ({}) = {} exceeds 1",
                    self.theta_min,
                    self.effect_size,
                    self.theta_star()
                ),
            ));
        }
        errs
    }

    pub fn validate(&self) -> Result<()> {
        let errs = self.violations();
        if errs.is_empty() {
            Ok(())
        } else {
            Err(Error::Invalid(errs))
        }
    }
}

/// Per-arm success probabilities plus the (0-based) index of the best arm.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Environment {
    thetas: Vec<f64>,
    best_arm: usize,
}

impl Environment {
    /// Builds an environment from explicit probabilities. The best arm is the
    /// first arm attaining the maximum.
    pub fn from_thetas(thetas: Vec<f64>) -> Result<Self> {
        if thetas.is_empty() {
            return Err(Error::invalid("thetas", "at least one arm required"));
        }
        if let Some(&bad) = thetas.iter().find(|t| !(0.0..=1.0).contains(*t)) {
            return Err(Error::Probability(bad));
        }
        let best_arm = crate::policy::argmax(&thetas);
        Ok(Self { thetas, best_arm })
    }

    pub fn thetas(&self) -> &[f64] {
        &self.thetas
    }

    pub fn n_arms(&self) -> usize {
        self.thetas.len()
    }

    pub fn best_arm(&self) -> usize {
        self.best_arm
    }

    pub fn theta(&self, arm: usize) -> f64 {
        self.thetas[arm]
    }

    pub fn theta_star(&self) -> f64 {
        self.thetas[self.best_arm]
    }

    /// `theta* - theta_arm`.
    pub fn gap(&self, arm: usize) -> f64 {
        self.theta_star() - self.thetas[arm]
    }

    pub fn check_arm(&self, arm: usize) -> Result<()> {
        if arm < self.thetas.len() {
            Ok(())
        } else {
            Err(Error::ArmOutOfRange {
                arm,
                n_arms: self.thetas.len(),
            })
        }
    }
}

/// Dispatches on `spec.kind`.
pub fn build_environment<R: Rng + ?Sized>(spec: &ScenarioSpec, rng: &mut R) -> Result<Environment> {
    match spec.kind {
        ScenarioKind::FixedGap => build_fixed_gap(spec, rng),
        ScenarioKind::FlexibleGap => build_flexible_gap(spec, rng),
    }
}

pub fn build_fixed_gap<R: Rng + ?Sized>(spec: &ScenarioSpec, rng: &mut R) -> Result<Environment> {
    expect_kind(spec, ScenarioKind::FixedGap)?;
    spec.validate()?;
    let best_arm = rng.random_range(0..spec.n_arms);
    let mut thetas = vec![spec.theta_min; spec.n_arms];
    thetas[best_arm] = spec.theta_star();
    Ok(Environment { thetas, best_arm })
}

/// Non-best arms are drawn in index order from `[theta_min, theta*)`.
pub fn build_flexible_gap<R: Rng + ?Sized>(
    spec: &ScenarioSpec,
    rng: &mut R,
) -> Result<Environment> {
    expect_kind(spec, ScenarioKind::FlexibleGap)?;
    spec.validate()?;
    let best_arm = rng.random_range(0..spec.n_arms);
    let theta_star = spec.theta_star();
    let thetas = (0..spec.n_arms)
        .map(|arm| {
            if arm == best_arm {
                theta_star
            } else if theta_star > spec.theta_min {
                rng.random_range(spec.theta_min..theta_star)
            } else {
                spec.theta_min
            }
        })
        .collect();
    Ok(Environment { thetas, best_arm })
}

fn expect_kind(spec: &ScenarioSpec, kind: ScenarioKind) -> Result<()> {
    if spec.kind == kind {
        Ok(())
    } else {
        Err(Error::invalid(
            "kind",
            format!("expected {kind} scenario, got {}", spec.kind),
        ))
    }
}

/// Bernoulli draw for `arm`; consumes one uniform variate.
pub fn draw_reward<R: Rng + ?Sized>(env: &Environment, arm: usize, rng: &mut R) -> Result<bool> {
    env.check_arm(arm)?;
    let u: f64 = rng.random();
    Ok(u < env.thetas[arm])
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn rng(seed: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(seed)
    }

    #[test]
    fn fixed_gap_two_arms() {
        let env = build_fixed_gap(&ScenarioSpec::fixed(2, 0.5, 0.2), &mut rng(1)).unwrap();
        let mut sorted = env.thetas().to_vec();
        sorted.sort_by(f64::total_cmp);
        assert_eq!(sorted, [0.5, 0.5 + 0.2]);
        assert_eq!(env.theta_star(), 0.5 + 0.2);
    }

    #[test]
    fn fixed_gap_ten_arms() {
        for seed in 0..20 {
            let env = build_fixed_gap(&ScenarioSpec::fixed(10, 0.5, 0.1), &mut rng(seed)).unwrap();
            let at_min = env.thetas().iter().filter(|&&t| t == 0.5).count();
            assert_eq!(at_min, 9);
            assert_eq!(env.theta(env.best_arm()), 0.6);
        }
    }

    #[test]
    fn zero_gap_ties() {
        let env = build_fixed_gap(&ScenarioSpec::fixed(4, 0.3, 0.0), &mut rng(3)).unwrap();
        assert!(env.thetas().iter().all(|&t| t == 0.3));
        assert!(env.best_arm() < 4);
        let env = build_flexible_gap(&ScenarioSpec::flexible(4, 0.3, 0.0), &mut rng(3)).unwrap();
        assert!(env.thetas().iter().all(|&t| t == 0.3));
    }

    #[test]
    fn flexible_gap_bounds() {
        for seed in 0..50 {
            let env =
                build_flexible_gap(&ScenarioSpec::flexible(10, 0.15, 0.35), &mut rng(seed)).unwrap();
            let star = 0.15 + 0.35;
            assert_eq!(env.theta_star(), star);
            for (i, &t) in env.thetas().iter().enumerate() {
                assert!(t >= 0.15 && t <= star);
                if i != env.best_arm() {
                    assert!(t < star);
                }
            }
        }
    }

    #[test]
    fn flexible_gap_single_pinned_max() {
        for seed in 0..200 {
            let spec = ScenarioSpec::flexible(3, 0.2, 0.4);
            let env = build_flexible_gap(&spec, &mut rng(seed)).unwrap();
            let pinned: Vec<_> = env
                .thetas()
                .iter()
                .enumerate()
                .filter(|(_, &t)| t == spec.theta_star())
                .map(|(i, _)| i)
                .collect();
            assert_eq!(pinned, [env.best_arm()]);
        }
    }

    #[test]
    fn build_is_deterministic() {
        let spec = ScenarioSpec::flexible(12, 0.1, 0.5);
        let a = build_environment(&spec, &mut rng(99)).unwrap();
        let b = build_environment(&spec, &mut rng(99)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn rejects_invalid_scenario() {
        let err = build_fixed_gap(&ScenarioSpec::fixed(1, 0.9, 0.2), &mut rng(0)).unwrap_err();
        match err {
            Error::Invalid(fields) => {
                let names: Vec<_> = fields.iter().map(|f| f.field.as_str()).collect();
                assert_eq!(names, ["n_arms", "theta_min + delta"]);
            }
            other => panic!("unexpected {other:?}"),
        }
        assert!(build_flexible_gap(&ScenarioSpec::fixed(3, 0.1, 0.2), &mut rng(0)).is_err());
    }

    #[test]
    fn degenerate_rewards() {
        let env = Environment::from_thetas(vec![1.0, 0.0]).unwrap();
        let mut r = rng(5);
        for _ in 0..1000 {
            assert!(draw_reward(&env, 0, &mut r).unwrap());
            assert!(!draw_reward(&env, 1, &mut r).unwrap());
        }
        assert!(draw_reward(&env, 2, &mut r).is_err());
    }

    #[test]
    fn reward_frequency() {
        let env = Environment::from_thetas(vec![0.5]).unwrap();
        let mut r = rng(11);
        let n = 100_000;
        let hits = (0..n).filter(|_| draw_reward(&env, 0, &mut r).unwrap()).count();
        let mean = hits as f64 / n as f64;
        assert!((mean - 0.5).abs() < 0.01, "mean {mean}");
    }

    #[test]
    fn lenient_count_monotone_in_epsilon() {
        let spec = ScenarioSpec::flexible(10, 0.2, 0.3);
        for seed in 0..50 {
            let env = build_flexible_gap(&spec, &mut rng(seed)).unwrap();
            let mut prev = 0;
            for eps in [0.0, 0.05, 0.1, 0.2, 0.3] {
                let n = env.thetas().iter().filter(|&&t| env.theta_star() - t <= eps).count();
                assert!(n >= 1 && n >= prev);
                prev = n;
            }
        }
    }
}
