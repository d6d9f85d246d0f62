//! Per-replication evaluation quantities.

use serde::{Deserialize, Serialize};

use crate::arm::{ArmState, BanditTrace};
use crate::environment::Environment;
use crate::error::{Error, Result};

/// Fixed metric identifiers used in CSV output.
pub const METRIC_NAMES: [&str; 8] = [
    "avg_outcome",
    "correct_rate",
    "regret",
    "lenient_regret",
    "commit_time",
    "commit_arm",
    "lenient_correct",
    "best_arm_starved",
];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReplicationSummary {
    pub average_outcome: f64,
    pub correct_rate: f64,
    pub regret: f64,
    pub lenient_regret: f64,
    pub epsilon: f64,
    pub commit_time: Option<usize>,
    /// 0-based.
    pub commit_arm: Option<usize>,
    pub lenient_correct: Option<bool>,
    pub posterior_means: Vec<f64>,
    pub allocation_counts: Vec<u64>,
    pub best_arm_starved: bool,
    /// Mean posterior bias over arms other than the best one (0 when K = 1).
    pub suboptimal_bias: f64,
}

pub fn traditional_regret(env: &Environment, trace: &BanditTrace) -> f64 {
    trace.arms().map(|arm| env.gap(arm)).sum()
}

/// Regret counting only pulls whose gap exceeds `epsilon`.
pub fn lenient_regret(env: &Environment, trace: &BanditTrace, epsilon: f64) -> f64 {
    trace
        .arms()
        .map(|arm| env.gap(arm))
        .filter(|&gap| gap > epsilon)
        .sum()
}

/// Running totals of lenient regret after each round.
pub fn cumulative_lenient_regret(env: &Environment, trace: &BanditTrace, epsilon: f64) -> Vec<f64> {
    trace
        .arms()
        .scan(0.0, |acc, arm| {
            let gap = env.gap(arm);
            if gap > epsilon {
                *acc += gap;
            }
            Some(*acc)
        })
        .collect()
}

pub fn average_outcome(trace: &BanditTrace) -> Result<f64> {
    if trace.is_empty() {
        return Err(Error::EmptyTrace);
    }
    let hits = trace.entries().iter().filter(|e| e.reward).count();
    Ok(hits as f64 / trace.len() as f64)
}

/// Fraction of rounds assigned to the true best arm.
pub fn correct_rate(env: &Environment, trace: &BanditTrace) -> Result<f64> {
    if trace.is_empty() {
        return Err(Error::EmptyTrace);
    }
    let best = env.best_arm();
    let hits = trace.arms().filter(|&a| a == best).count();
    Ok(hits as f64 / trace.len() as f64)
}

/// Earliest round `t >= max(burn_in, 1)` from which one arm holds at least a
/// `tau` share of the assignments in rounds `t..=N`.
///
/// Returns the 1-based round and the 0-based arm. When several arms clear
/// the bar, the one with the largest suffix count wins, lowest index on ties.
pub fn majority_commit_time(
    trace: &BanditTrace,
    tau: f64,
    burn_in: usize,
) -> Option<(usize, usize)> {
    let n = trace.len();
    let start = burn_in.max(1);
    if n == 0 || start > n {
        return None;
    }
    let n_arms = trace.arms().max().map_or(0, |m| m + 1);
    let mut counts = vec![0usize; n_arms];
    let mut leader = 0usize;
    let mut found = None;
    // Walk suffixes from shortest to longest; counts only grow, so the
    // leader can change only to the arm just added.
    for (idx, e) in trace.entries().iter().enumerate().rev() {
        let t = idx + 1;
        counts[e.arm] += 1;
        if counts[e.arm] > counts[leader] || (counts[e.arm] == counts[leader] && e.arm < leader) {
            leader = e.arm;
        }
        if t < start {
            break;
        }
        let len = n - t + 1;
        if counts[leader] as f64 / len as f64 >= tau {
            found = Some((t, leader));
        }
    }
    found
}

/// `theta* - theta_arm <= epsilon`.
pub fn is_lenient_correct(env: &Environment, arm: usize, epsilon: f64) -> bool {
    env.gap(arm) <= epsilon
}

/// Posterior mean minus true probability, per arm.
pub fn posterior_bias(env: &Environment, final_arms: &[ArmState]) -> Result<Vec<f64>> {
    if final_arms.len() != env.n_arms() {
        return Err(Error::LengthMismatch {
            expected: env.n_arms(),
            actual: final_arms.len(),
        });
    }
    Ok(final_arms
        .iter()
        .zip(env.thetas())
        .map(|(arm, &theta)| arm.posterior_mean() - theta)
        .collect())
}

/// True when the best arm got fewer than `min_pulls` pulls after burn-in.
pub fn starvation_diagnostic(
    env: &Environment,
    trace: &BanditTrace,
    burn_in: usize,
    min_pulls: u64,
) -> bool {
    let best = env.best_arm();
    let pulls = trace
        .entries()
        .iter()
        .filter(|e| e.round > burn_in && e.arm == best)
        .count() as u64;
    pulls < min_pulls
}

/// Parameters the summary needs besides the environment and trace.
#[derive(Debug, Clone, Copy)]
pub struct SummaryParams {
    pub epsilon: f64,
    pub tau: f64,
    pub burn_in: usize,
    pub min_pulls: u64,
}

pub fn summarize(
    env: &Environment,
    trace: &BanditTrace,
    params: SummaryParams,
) -> Result<ReplicationSummary> {
    trace.validate(env.n_arms())?;
    let final_arms = trace.arm_states(env.n_arms());
    let commit = majority_commit_time(trace, params.tau, params.burn_in);
    let bias = posterior_bias(env, &final_arms)?;
    let best = env.best_arm();
    let others: Vec<f64> = bias
        .iter()
        .enumerate()
        .filter(|&(i, _)| i != best)
        .map(|(_, &b)| b)
        .collect();
    let suboptimal_bias = if others.is_empty() {
        0.0
    } else {
        others.iter().sum::<f64>() / others.len() as f64
    };
    Ok(ReplicationSummary {
        average_outcome: average_outcome(trace)?,
        correct_rate: correct_rate(env, trace)?,
        regret: traditional_regret(env, trace),
        lenient_regret: lenient_regret(env, trace, params.epsilon),
        epsilon: params.epsilon,
        commit_time: commit.map(|(t, _)| t),
        commit_arm: commit.map(|(_, a)| a),
        lenient_correct: commit.map(|(_, a)| is_lenient_correct(env, a, params.epsilon)),
        posterior_means: final_arms.iter().map(ArmState::posterior_mean).collect(),
        allocation_counts: trace.allocation_counts(env.n_arms()),
        best_arm_starved: starvation_diagnostic(env, trace, params.burn_in, params.min_pulls),
        suboptimal_bias,
    })
}
