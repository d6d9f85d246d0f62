//! Per-arm epsilon-lenient hypothesis tests with Benjamini-Hochberg control.
//!
//! For each arm the null is `theta_i <= threshold` where the threshold is
//! `theta* - epsilon`; the one-sided exact binomial upper tail is the p-value.

use serde::{Deserialize, Serialize};
use statrs::function::beta::beta_reg;

use crate::arm::ArmState;
use crate::config::{PowerCounting, ThresholdMode};
use crate::environment::Environment;
use crate::error::{Error, Result};
use crate::metrics::is_lenient_correct;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HypothesisResult {
    pub p_values: Vec<f64>,
    pub rejected: Vec<bool>,
    pub threshold_used: f64,
    pub mode: ThresholdMode,
}

/// `P(X >= successes)` for `X ~ Binomial(trials, p0)`.
///
/// Uses the identity `P(X >= s) = I_{p0}(s, n - s + 1)` for `0 < s <= n`.
pub fn binom_upper_tail(successes: u64, trials: u64, p0: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&p0) {
        return Err(Error::Probability(p0));
    }
    if successes > trials {
        return Err(Error::invalid(
            "successes",
            format!("{successes} exceeds trials = {trials}"),
        ));
    }
    if successes == 0 || trials == 0 {
        return Ok(1.0);
    }
    if p0 == 0.0 {
        return Ok(0.0);
    }
    if p0 == 1.0 {
        return Ok(1.0);
    }
    let tail = beta_reg(successes as f64, (trials - successes + 1) as f64, p0);
    Ok(tail.clamp(0.0, 1.0))
}

/// Benjamini-Hochberg step-up at level `q`. Returns a rejection flag per input.
pub fn bh_adjust(p_values: &[f64], q: f64) -> Vec<bool> {
    let m = p_values.len();
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&a, &b| p_values[a].total_cmp(&p_values[b]));
    let cutoff = order
        .iter()
        .enumerate()
        .rev()
        .find(|&(rank, &i)| p_values[i] <= (rank + 1) as f64 * q / m as f64)
        .map(|(_, &i)| p_values[i]);
    match cutoff {
        Some(c) => p_values.iter().map(|&p| p <= c).collect(),
        None => vec![false; m],
    }
}

pub fn lenient_tests(
    env: &Environment,
    final_arms: &[ArmState],
    epsilon: f64,
    q: f64,
    mode: ThresholdMode,
) -> Result<HypothesisResult> {
    if final_arms.len() != env.n_arms() {
        return Err(Error::LengthMismatch {
            expected: env.n_arms(),
            actual: final_arms.len(),
        });
    }
    if epsilon.is_nan() || epsilon < 0.0 {
        return Err(Error::invalid("epsilon", format!("{epsilon} must be >= 0")));
    }
    let reference = match mode {
        ThresholdMode::TrueTheta => env.theta_star(),
        ThresholdMode::PlugIn => final_arms
            .iter()
            .map(ArmState::posterior_mean)
            .fold(f64::NEG_INFINITY, f64::max),
    };
    let raw = reference - epsilon;
    let threshold = raw.clamp(0.0, 1.0);
    if threshold != raw {
        log::debug!("test threshold {raw} clamped to {threshold}");
    }
    let p_values = final_arms
        .iter()
        .map(|arm| binom_upper_tail(arm.successes, arm.pulls(), threshold))
        .collect::<Result<Vec<_>>>()?;
    let rejected = bh_adjust(&p_values, q);
    Ok(HypothesisResult {
        p_values,
        rejected,
        threshold_used: threshold,
        mode,
    })
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct Power {
    pub power_any_lenient: f64,
    pub power_true_best: f64,
}

/// Fraction of replications detecting at least one lenient arm, and the
/// fraction rejecting the null for the true best arm.
pub fn power_aggregate<'a, I>(results: I, epsilon: f64, counting: PowerCounting) -> Power
where
    I: IntoIterator<Item = (&'a HypothesisResult, &'a Environment)>,
{
    let mut n = 0usize;
    let mut any = 0usize;
    let mut best = 0usize;
    for (result, env) in results {
        n += 1;
        let hit = result.rejected.iter().enumerate().any(|(arm, &rej)| {
            rej && match counting {
                PowerCounting::Strict => is_lenient_correct(env, arm, epsilon),
                PowerCounting::Permissive => true,
            }
        });
        if hit {
            any += 1;
        }
        if result.rejected[env.best_arm()] {
            best += 1;
        }
    }
    if n == 0 {
        return Power::default();
    }
    Power {
        power_any_lenient: any as f64 / n as f64,
        power_true_best: best as f64 / n as f64,
    }
}
