//! Built-in reproduction presets for the published comparison tables.

use crate::config::{ExperimentConfig, Policy};
use crate::environment::{ScenarioKind, ScenarioSpec};
use crate::error::{Error, Result};
use crate::runner::{AggregateReport, SeedRange};

/// Published value for one (effect size, policy, metric) cell.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Reference {
    pub effect_size: f64,
    pub policy: Policy,
    pub metric: &'static str,
    pub value: f64,
    /// Absolute tolerance; `None` means informational only.
    pub tolerance: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Preset {
    pub id: &'static str,
    pub title: &'static str,
    pub kind: ScenarioKind,
    pub n_arms: usize,
    pub n_participants: usize,
    pub theta_min: f64,
    pub effect_sizes: Vec<f64>,
    pub policies: Vec<Policy>,
    pub seeds: SeedRange,
    pub references: Vec<Reference>,
}

impl Preset {
    pub fn scenario(&self, effect_size: f64) -> ScenarioSpec {
        ScenarioSpec::new(self.kind, self.n_arms, self.theta_min, effect_size)
    }

    pub fn config(&self) -> ExperimentConfig {
        ExperimentConfig::new(self.n_participants, self.policies[0])
    }
}

/// Derived metrics used by presets on top of the aggregated report.
///
/// `commit_after_burn_in` is the mean majority-commit round minus the burn-in;
/// `lenient_commit` is the share of commitments landing on a lenient arm.
pub fn preset_metric(report: &AggregateReport, policy: Policy, metric: &str) -> Option<f64> {
    let p = report.policy(policy)?;
    Some(match metric {
        "commit_after_burn_in" => p.commit_time.mean - report.burn_in as f64,
        "commit_rate" => p.commit_rate,
        "lenient_commit" => p.lenient_correct.mean,
        "power_any_lenient" => p.power.power_any_lenient,
        "power_true_best" => p.power.power_true_best,
        other => p.metric(other)?.mean,
    })
}

pub const PRESET_IDS: [&str; 9] = [
    "f1-flex", "f1-fixed", "f2-flex", "f2-fixed", "f3-flex", "f3-fixed", "cmp-k10", "power-t1",
    "speed-t2",
];

fn refs(effect_size: f64, rows: &[(Policy, &'static str, f64, Option<f64>)]) -> Vec<Reference> {
    rows.iter()
        .map(|&(policy, metric, value, tolerance)| Reference {
            effect_size,
            policy,
            metric,
            value,
            tolerance,
        })
        .collect()
}

fn table(
    id: &'static str,
    title: &'static str,
    kind: ScenarioKind,
    (n_arms, n_participants, effect_size): (usize, usize, f64),
    rows: &[(Policy, &'static str, f64, Option<f64>)],
) -> Preset {
    Preset {
        id,
        title,
        kind,
        n_arms,
        n_participants,
        theta_min: 0.5,
        effect_sizes: vec![effect_size],
        policies: Policy::ALL.to_vec(),
        seeds: SeedRange::new(1, 200),
        references: refs(effect_size, rows),
    }
}

const SWEEP_DELTAS: [f64; 4] = [0.05, 0.10, 0.20, 0.30];

pub fn find(id: &str) -> Result<Preset> {
    use Policy::{Ts, Ur, Wapts};
    use ScenarioKind::{FixedGap, FlexibleGap};
    let id: &'static str = PRESET_IDS
        .into_iter()
        .find(|known| *known == id)
        .ok_or_else(|| Error::UnknownTable(id.to_string()))?;
    let cr = Some(0.06);
    let out = Some(0.025);
    Ok(match id {
        "f1-flex" => table(
            id,
            "N=50, K=2, delta=0.1, flexible gap",
            FlexibleGap,
            (2, 50, 0.1),
            &[
                (Wapts, "correct_rate", 0.879, cr),
                (Ts, "correct_rate", 0.654, cr),
                (Ur, "correct_rate", 0.496, cr),
                (Wapts, "avg_outcome", 0.590, out),
                (Ts, "avg_outcome", 0.564, out),
                (Ur, "avg_outcome", 0.546, out),
            ],
        ),
        "f1-fixed" => table(
            id,
            "N=50, K=2, delta=0.1, fixed gap",
            FixedGap,
            (2, 50, 0.1),
            &[
                (Wapts, "correct_rate", 0.869, cr),
                (Ts, "correct_rate", 0.600, cr),
                (Ur, "correct_rate", 0.496, cr),
                (Wapts, "avg_outcome", 0.588, out),
                (Ts, "avg_outcome", 0.569, out),
                (Ur, "avg_outcome", 0.551, out),
            ],
        ),
        "f2-flex" => table(
            id,
            "N=300, K=50, delta=0.2, flexible gap",
            FlexibleGap,
            (50, 300, 0.2),
            &[
                (Wapts, "correct_rate", 0.051, Some(0.015)),
                (Ts, "correct_rate", 0.028, None),
                (Ur, "correct_rate", 0.021, Some(0.015)),
                (Wapts, "avg_outcome", 0.611, None),
                (Ts, "avg_outcome", 0.617, None),
                (Ur, "avg_outcome", 0.604, None),
            ],
        ),
        "f2-fixed" => table(
            id,
            "N=300, K=50, delta=0.2, fixed gap",
            FixedGap,
            (50, 300, 0.2),
            &[
                (Wapts, "correct_rate", 0.048, Some(0.015)),
                (Ts, "correct_rate", 0.048, None),
                (Ur, "correct_rate", 0.021, Some(0.015)),
                (Wapts, "avg_outcome", 0.515, None),
                (Ts, "avg_outcome", 0.506, None),
                (Ur, "avg_outcome", 0.505, None),
            ],
        ),
        "f3-flex" => table(
            id,
            "N=1000, K=24, delta=0.1, flexible gap",
            FlexibleGap,
            (24, 1000, 0.1),
            &[
                (Wapts, "correct_rate", 0.097, None),
                (Ts, "correct_rate", 0.063, None),
                (Ur, "correct_rate", 0.042, None),
                (Wapts, "avg_outcome", 0.565, None),
                (Ts, "avg_outcome", 0.565, None),
                (Ur, "avg_outcome", 0.560, None),
            ],
        ),
        "f3-fixed" => table(
            id,
            "N=1000, K=24, delta=0.1, fixed gap",
            FixedGap,
            (24, 1000, 0.1),
            &[
                (Wapts, "correct_rate", 0.129, None),
                (Ts, "correct_rate", 0.114, None),
                (Ur, "correct_rate", 0.042, None),
                (Wapts, "avg_outcome", 0.512, None),
                (Ts, "avg_outcome", 0.512, None),
                (Ur, "avg_outcome", 0.503, None),
            ],
        ),
        "cmp-k10" => Preset {
            seeds: SeedRange::new(1, 2000),
            ..table(
                id,
                "N=1000, K=10, delta=0.2, fixed gap",
                FixedGap,
                (10, 1000, 0.2),
                &[
                    (Wapts, "avg_outcome", 0.663, Some(0.01)),
                    (Ts, "avg_outcome", 0.638, Some(0.01)),
                    (Ur, "avg_outcome", 0.520, Some(0.01)),
                ],
            )
        },
        "power-t1" => {
            let pct = |v: f64| v / 100.0;
            let tol = Some(0.10);
            let rows = [
                (3.4, 6.3, 1.0, 1.7),
                (11.1, 12.6, 3.7, 5.2),
                (39.6, 38.1, 16.5, 24.8),
                (78.3, 74.1, 43.6, 57.5),
            ];
            let references = SWEEP_DELTAS
                .iter()
                .zip(rows)
                .flat_map(|(&d, (ts_any, w_any, ts_best, w_best))| {
                    refs(
                        d,
                        &[
                            (Ts, "power_any_lenient", pct(ts_any), tol),
                            (Wapts, "power_any_lenient", pct(w_any), tol),
                            (Ts, "power_true_best", pct(ts_best), tol),
                            (Wapts, "power_true_best", pct(w_best), tol),
                        ],
                    )
                })
                .collect();
            sweep_preset(id, "lenient-test power, K=10, N=239, flexible gap", references)
        }
        "speed-t2" => {
            let tol = Some(10.0);
            let rows = [
                (209.4, 200.0, 33.3, 51.3),
                (204.1, 192.9, 67.0, 80.8),
                (153.7, 133.8, 82.7, 78.8),
                (142.1, 143.4, 95.8, 81.1),
            ];
            let references = SWEEP_DELTAS
                .iter()
                .zip(rows)
                .flat_map(|(&d, (ts_t, w_t, ts_len, w_len))| {
                    refs(
                        d,
                        &[
                            (Ts, "commit_after_burn_in", ts_t, tol),
                            (Wapts, "commit_after_burn_in", w_t, tol),
                            (Ts, "commit_rate", 1.0, None),
                            (Wapts, "commit_rate", 1.0, None),
                            (Ts, "lenient_commit", ts_len / 100.0, None),
                            (Wapts, "lenient_commit", w_len / 100.0, None),
                        ],
                    )
                })
                .collect();
            sweep_preset(id, "majority-commit speed, K=10, N=239, flexible gap", references)
        }
        other => return Err(Error::UnknownTable(other.to_string())),
    })
}

fn sweep_preset(id: &'static str, title: &'static str, references: Vec<Reference>) -> Preset {
    Preset {
        id,
        title,
        kind: ScenarioKind::FlexibleGap,
        n_arms: 10,
        n_participants: 239,
        theta_min: 0.5,
        effect_sizes: SWEEP_DELTAS.to_vec(),
        policies: vec![Policy::Ts, Policy::Wapts],
        seeds: SeedRange::new(1, 2000),
        references,
    }
}
