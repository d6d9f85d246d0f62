//! Sequential arm selection for the three allocation policies.
//!
//! Selection never mutates [`PolicyState`]; the caller pulls the returned arm
//! and folds the reward back in with [`PolicyState::record`].

use rand::Rng;
use rand_distr::{Beta, Distribution};

use crate::arm::ArmState;
use crate::config::{ExperimentConfig, Policy};

#[derive(Debug, Clone, PartialEq)]
pub struct PolicyState {
    pub arms: Vec<ArmState>,
    /// Current 1-based round.
    pub round: usize,
}

impl PolicyState {
    pub fn new(n_arms: usize) -> Self {
        Self {
            arms: vec![ArmState::default(); n_arms],
            round: 1,
        }
    }

    pub fn from_arms(arms: Vec<ArmState>, round: usize) -> Self {
        Self { arms, round }
    }

    pub fn n_arms(&self) -> usize {
        self.arms.len()
    }

    /// Applies the observed reward and advances to the next round.
    pub fn record(&mut self, arm: usize, reward: bool) {
        self.arms[arm] = self.arms[arm].update(reward);
        self.round += 1;
    }
}

/// Index of the largest value; ties go to the lowest index.
pub fn argmax(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, &v) in values.iter().enumerate().skip(1) {
        if v > values[best] {
            best = i;
        }
    }
    best
}

/// One posterior draw per arm, in arm order.
pub fn posterior_draws<R: Rng + ?Sized>(arms: &[ArmState], rng: &mut R) -> Vec<f64> {
    arms.iter()
        .map(|arm| {
            let (alpha, beta) = arm.posterior_params();
            Beta::new(alpha, beta)
                .expect("Beta parameters are >= 1")
                .sample(rng)
        })
        .collect()
}

pub fn select_ur<R: Rng + ?Sized>(state: &PolicyState, rng: &mut R) -> usize {
    rng.random_range(0..state.n_arms())
}

pub fn select_ts<R: Rng + ?Sized>(state: &PolicyState, rng: &mut R) -> usize {
    argmax(&posterior_draws(&state.arms, rng))
}

/// Weighted allocation score `(1 + rate) * rate * draw`, in `[0, 2]`.
pub fn wapts_score(draw: f64, rate: f64) -> f64 {
    (1.0 + rate) * rate * draw
}

/// Uniform during the burn-in rounds, then argmax of the weighted scores.
pub fn select_wapts<R: Rng + ?Sized>(
    state: &PolicyState,
    config: &ExperimentConfig,
    rng: &mut R,
) -> usize {
    if state.round <= config.resolved_burn_in(state.n_arms()) {
        return select_ur(state, rng);
    }
    let draws = posterior_draws(&state.arms, rng);
    let scores: Vec<f64> = draws
        .iter()
        .zip(&state.arms)
        .map(|(&draw, arm)| wapts_score(draw, arm.empirical_rate()))
        .collect();
    argmax(&scores)
}

pub fn policy_step<R: Rng + ?Sized>(
    policy: Policy,
    state: &PolicyState,
    config: &ExperimentConfig,
    rng: &mut R,
) -> usize {
    match policy {
        Policy::Ur => select_ur(state, rng),
        Policy::Ts => select_ts(state, rng),
        Policy::Wapts => select_wapts(state, config, rng),
    }
}
