//! Single replications and seed-paired Monte Carlo aggregation.
//!
//! Each seed drives two ChaCha8 streams: stream 0 builds the environment and
//! stream 1 feeds policy draws and rewards. Every policy run under the same
//! seed therefore faces the same environment.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::arm::{ArmState, BanditTrace};
use crate::config::{ExperimentConfig, Policy};
use crate::environment::{build_environment, draw_reward, Environment, ScenarioSpec};
use crate::error::{Error, Result};
use crate::inference::{lenient_tests, power_aggregate, HypothesisResult, Power};
use crate::metrics::{self, ReplicationSummary, SummaryParams};
use crate::policy::{policy_step, PolicyState};

pub type SimRng = ChaCha8Rng;

const ENV_STREAM: u64 = 0;
const POLICY_STREAM: u64 = 1;

/// Independent environment and policy generators for `seed`.
pub fn seed_streams(seed: u64) -> (SimRng, SimRng) {
    let mut env_rng = SimRng::seed_from_u64(seed);
    env_rng.set_stream(ENV_STREAM);
    let mut policy_rng = SimRng::seed_from_u64(seed);
    policy_rng.set_stream(POLICY_STREAM);
    (env_rng, policy_rng)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeedRange {
    pub start: u64,
    pub count: u64,
}

impl SeedRange {
    pub fn new(start: u64, count: u64) -> Self {
        Self { start, count }
    }

    pub fn iter(&self) -> std::ops::Range<u64> {
        self.start..self.start + self.count
    }
}

/// How replications are scheduled. `threads = None` uses the global pool.
#[derive(Debug, Clone, Copy, Default)]
pub struct Execution {
    pub threads: Option<usize>,
}

impl Execution {
    pub fn sequential() -> Self {
        Self { threads: Some(1) }
    }

    pub fn with_threads(threads: usize) -> Self {
        Self {
            threads: Some(threads),
        }
    }

    /// Maps `f` over the seeds, returning results in seed order.
    #[cfg(feature = "parallel")]
    pub fn map_seeds<T, F>(&self, seeds: SeedRange, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(u64) -> T + Sync + Send,
    {
        use rayon::prelude::*;
        let run = || seeds.iter().into_par_iter().map(&f).collect::<Vec<_>>();
        match self.threads {
            Some(1) => seeds.iter().map(&f).collect(),
            Some(n) => match rayon::ThreadPoolBuilder::new().num_threads(n).build() {
                Ok(pool) => pool.install(run),
                Err(err) => {
                    log::warn!("could not build a {n}-thread pool ({err}); using the global pool");
                    run()
                }
            },
            None => run(),
        }
    }

    #[cfg(not(feature = "parallel"))]
    pub fn map_seeds<T, F>(&self, seeds: SeedRange, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(u64) -> T + Sync + Send,
    {
        seeds.iter().map(f).collect()
    }
}

/// Everything produced by one seed under one policy.
#[derive(Debug, Clone, PartialEq)]
pub struct Replication {
    pub seed: u64,
    pub policy: Policy,
    pub env: Environment,
    pub trace: BanditTrace,
    pub final_arms: Vec<ArmState>,
    pub summary: ReplicationSummary,
    pub hypothesis: HypothesisResult,
}

pub fn validate(scenario: &ScenarioSpec, config: &ExperimentConfig) -> Result<()> {
    let mut errs = scenario.violations();
    errs.extend(config.violations(scenario.n_arms));
    if errs.is_empty() {
        Ok(())
    } else {
        Err(Error::Invalid(errs))
    }
}

/// Simulates `config.policy` for `n_participants` rounds on the seed's environment.
pub fn run_replication(
    scenario: &ScenarioSpec,
    config: &ExperimentConfig,
    seed: u64,
) -> Result<Replication> {
    validate(scenario, config)?;
    let (mut env_rng, mut rng) = seed_streams(seed);
    let env = build_environment(scenario, &mut env_rng)?;

    let mut state = PolicyState::new(env.n_arms());
    let mut trace = BanditTrace::with_capacity(config.n_participants);
    for _ in 0..config.n_participants {
        let arm = policy_step(config.policy, &state, config, &mut rng);
        let reward = draw_reward(&env, arm, &mut rng)?;
        state.record(arm, reward);
        trace.push(arm, reward);
    }

    let epsilon = config.epsilon_for(scenario);
    let summary = metrics::summarize(
        &env,
        &trace,
        SummaryParams {
            epsilon,
            tau: config.tau,
            burn_in: config.resolved_burn_in(env.n_arms()),
            min_pulls: config.min_pull_diagnostic,
        },
    )?;
    let hypothesis = lenient_tests(
        &env,
        &state.arms,
        epsilon,
        config.fdr_q,
        config.threshold_mode,
    )?;
    Ok(Replication {
        seed,
        policy: config.policy,
        env,
        trace,
        final_arms: state.arms,
        summary,
        hypothesis,
    })
}

/// Across-replication mean and sample standard deviation.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct MetricStats {
    pub mean: f64,
    pub sd: f64,
    pub n: usize,
}

impl MetricStats {
    pub fn from_values(values: &[f64]) -> Self {
        let n = values.len();
        if n == 0 {
            return Self {
                mean: f64::NAN,
                sd: f64::NAN,
                n,
            };
        }
        let mean = values.iter().sum::<f64>() / n as f64;
        let sd = if n > 1 {
            let ss: f64 = values.iter().map(|v| (v - mean).powi(2)).sum();
            (ss / (n - 1) as f64).sqrt()
        } else {
            0.0
        };
        Self { mean, sd, n }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolicyReport {
    pub policy: Policy,
    pub n_reps: usize,
    pub avg_outcome: MetricStats,
    pub correct_rate: MetricStats,
    pub regret: MetricStats,
    pub lenient_regret: MetricStats,
    /// Over committed replications only.
    pub commit_time: MetricStats,
    pub commit_rate: f64,
    /// Share of commitments whose arm is epsilon-lenient.
    pub lenient_correct: MetricStats,
    pub best_arm_starved: MetricStats,
    /// Mean posterior bias of the non-best arms.
    pub posterior_bias: MetricStats,
    pub power: Power,
}

impl PolicyReport {
    /// Aggregated metrics in reporting order.
    pub fn metric_rows(&self) -> [(&'static str, &MetricStats); 8] {
        [
            ("avg_outcome", &self.avg_outcome),
            ("correct_rate", &self.correct_rate),
            ("regret", &self.regret),
            ("lenient_regret", &self.lenient_regret),
            ("commit_time", &self.commit_time),
            ("lenient_correct", &self.lenient_correct),
            ("best_arm_starved", &self.best_arm_starved),
            ("posterior_bias", &self.posterior_bias),
        ]
    }

    pub fn metric(&self, name: &str) -> Option<&MetricStats> {
        self.metric_rows()
            .into_iter()
            .find(|(n, _)| *n == name)
            .map(|(_, s)| s)
    }
}

/// Replications where WAPTS had a strictly higher average outcome than `baseline`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SuperiorCount {
    pub baseline: Policy,
    pub count: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AggregateReport {
    pub scenario: ScenarioSpec,
    pub config: ExperimentConfig,
    pub burn_in: usize,
    pub epsilon: f64,
    pub seeds: SeedRange,
    pub n_reps: usize,
    /// Always "seed-paired": every policy sees the same environment per seed.
    pub pairing: String,
    pub policies: Vec<PolicyReport>,
    pub superior_counts: Vec<SuperiorCount>,
}

impl AggregateReport {
    pub fn policy(&self, policy: Policy) -> Option<&PolicyReport> {
        self.policies.iter().find(|p| p.policy == policy)
    }

    pub fn superior_count(&self, baseline: Policy) -> Option<usize> {
        self.superior_counts
            .iter()
            .find(|s| s.baseline == baseline)
            .map(|s| s.count)
    }
}

/// Per-seed outputs kept after a policy run; traces are dropped unless asked for.
#[derive(Debug, Clone, PartialEq)]
pub struct ReplicationRecord {
    pub seed: u64,
    pub env: Environment,
    pub summary: ReplicationSummary,
    pub hypothesis: HypothesisResult,
    pub trace: Option<BanditTrace>,
}

/// Runs one policy over all seeds, in seed order.
pub fn run_policy(
    scenario: &ScenarioSpec,
    config: &ExperimentConfig,
    seeds: SeedRange,
    exec: Execution,
    keep_traces: bool,
) -> Result<Vec<ReplicationRecord>> {
    validate(scenario, config)?;
    exec.map_seeds(seeds, |seed| {
        run_replication(scenario, config, seed).map(|rep| ReplicationRecord {
            seed,
            env: rep.env,
            summary: rep.summary,
            hypothesis: rep.hypothesis,
            trace: keep_traces.then_some(rep.trace),
        })
    })
    .into_iter()
    .collect()
}

pub fn summarize_policy(
    policy: Policy,
    records: &[ReplicationRecord],
    epsilon: f64,
    config: &ExperimentConfig,
) -> PolicyReport {
    let collect = |f: &dyn Fn(&ReplicationSummary) -> Option<f64>| -> MetricStats {
        let values: Vec<f64> = records.iter().filter_map(|r| f(&r.summary)).collect();
        MetricStats::from_values(&values)
    };
    let committed = records
        .iter()
        .filter(|r| r.summary.commit_time.is_some())
        .count();
    PolicyReport {
        policy,
        n_reps: records.len(),
        avg_outcome: collect(&|s| Some(s.average_outcome)),
        correct_rate: collect(&|s| Some(s.correct_rate)),
        regret: collect(&|s| Some(s.regret)),
        lenient_regret: collect(&|s| Some(s.lenient_regret)),
        commit_time: collect(&|s| s.commit_time.map(|t| t as f64)),
        commit_rate: if records.is_empty() {
            0.0
        } else {
            committed as f64 / records.len() as f64
        },
        lenient_correct: collect(&|s| s.lenient_correct.map(|b| f64::from(u8::from(b)))),
        best_arm_starved: collect(&|s| Some(f64::from(u8::from(s.best_arm_starved)))),
        posterior_bias: collect(&|s| Some(s.suboptimal_bias)),
        power: power_aggregate(
            records.iter().map(|r| (&r.hypothesis, &r.env)),
            epsilon,
            config.power_counting,
        ),
    }
}

/// Seeds where `challenger` strictly beats `baseline` on average outcome.
pub fn paired_superior_count(challenger: &[ReplicationRecord], baseline: &[ReplicationRecord]) -> usize {
    challenger
        .iter()
        .zip(baseline)
        .filter(|(c, b)| {
            debug_assert_eq!(c.seed, b.seed);
            c.summary.average_outcome > b.summary.average_outcome
        })
        .count()
}

/// Full per-policy output of [`run_replications_detailed`].
#[derive(Debug, Clone)]
pub struct DetailedRun {
    pub report: AggregateReport,
    pub records: Vec<(Policy, Vec<ReplicationRecord>)>,
}

/// Runs every policy over the same seeds and aggregates.
pub fn run_replications(
    scenario: &ScenarioSpec,
    config: &ExperimentConfig,
    policies: &[Policy],
    seeds: SeedRange,
    exec: Execution,
) -> Result<AggregateReport> {
    run_replications_detailed(scenario, config, policies, seeds, exec, false).map(|d| d.report)
}

pub fn run_replications_detailed(
    scenario: &ScenarioSpec,
    config: &ExperimentConfig,
    policies: &[Policy],
    seeds: SeedRange,
    exec: Execution,
    keep_traces: bool,
) -> Result<DetailedRun> {
    if seeds.count == 0 {
        return Err(Error::invalid("seed_count", "must be at least 1"));
    }
    if policies.is_empty() {
        return Err(Error::invalid("policies", "at least one policy required"));
    }
    validate(scenario, config)?;
    let epsilon = config.epsilon_for(scenario);

    let mut records = Vec::with_capacity(policies.len());
    for &policy in policies {
        let cfg = config.with_policy(policy);
        records.push((policy, run_policy(scenario, &cfg, seeds, exec, keep_traces)?));
    }

    let reports = records
        .iter()
        .map(|(policy, recs)| summarize_policy(*policy, recs, epsilon, config))
        .collect();
    let superior_counts = match records.iter().find(|(p, _)| *p == Policy::Wapts) {
        Some((_, wapts)) => records
            .iter()
            .filter(|(p, _)| *p != Policy::Wapts)
            .map(|(p, recs)| SuperiorCount {
                baseline: *p,
                count: paired_superior_count(wapts, recs),
            })
            .collect(),
        None => Vec::new(),
    };

    Ok(DetailedRun {
        report: AggregateReport {
            scenario: *scenario,
            config: config.clone(),
            burn_in: config.resolved_burn_in(scenario.n_arms),
            epsilon,
            seeds,
            n_reps: seeds.count as usize,
            pairing: "seed-paired".to_string(),
            policies: reports,
            superior_counts,
        },
        records,
    })
}

/// One cell of a sweep grid.
#[derive(Debug, Clone, PartialEq)]
pub struct GridCell {
    pub scenario: ScenarioSpec,
    pub config: ExperimentConfig,
    pub policies: Vec<Policy>,
}

/// One report per cell, in input order. A failing cell does not stop the sweep.
pub fn sweep(grid: &[GridCell], seeds: SeedRange, exec: Execution) -> Vec<Result<AggregateReport>> {
    grid.iter()
        .map(|cell| run_replications(&cell.scenario, &cell.config, &cell.policies, seeds, exec))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TrajectoryMetric {
    Regret,
    LenientRegret,
}

impl TrajectoryMetric {
    pub fn as_str(&self) -> &'static str {
        match self {
            TrajectoryMetric::Regret => "regret",
            TrajectoryMetric::LenientRegret => "lenient_regret",
        }
    }
}

/// Per-round mean and SD of a cumulative metric across seeds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub metric: TrajectoryMetric,
    pub policy: Policy,
    pub mean: Vec<f64>,
    pub sd: Vec<f64>,
}

pub fn trajectory(
    scenario: &ScenarioSpec,
    config: &ExperimentConfig,
    metric: TrajectoryMetric,
    seeds: SeedRange,
    exec: Execution,
) -> Result<Trajectory> {
    validate(scenario, config)?;
    let epsilon = match metric {
        TrajectoryMetric::Regret => 0.0,
        TrajectoryMetric::LenientRegret => config.epsilon_for(scenario),
    };
    let paths = exec
        .map_seeds(seeds, |seed| {
            run_replication(scenario, config, seed)
                .map(|rep| metrics::cumulative_lenient_regret(&rep.env, &rep.trace, epsilon))
        })
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    let n = config.n_participants;
    let mut mean = Vec::with_capacity(n);
    let mut sd = Vec::with_capacity(n);
    let mut column = Vec::with_capacity(paths.len());
    for t in 0..n {
        column.clear();
        column.extend(paths.iter().map(|p| p[t]));
        let stats = MetricStats::from_values(&column);
        mean.push(stats.mean);
        sd.push(stats.sd);
    }
    Ok(Trajectory {
        metric,
        policy: config.policy,
        mean,
        sd,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> (ScenarioSpec, ExperimentConfig) {
        (
            ScenarioSpec::flexible(2, 0.5, 0.1),
            ExperimentConfig::new(50, Policy::Wapts),
        )
    }

    #[test]
    fn replication_is_deterministic() {
        let (scenario, config) = small();
        let a = run_replication(&scenario, &config, 17).unwrap();
        let b = run_replication(&scenario, &config, 17).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.summary.allocation_counts.iter().sum::<u64>(), 50);
        assert_eq!(a.trace.len(), 50);
    }

    #[test]
    fn zero_participants_rejected() {
        let (scenario, mut config) = small();
        config.n_participants = 0;
        match run_replication(&scenario, &config, 1) {
            Err(Error::Invalid(fields)) => {
                assert!(fields.iter().any(|f| f.field == "n_participants"))
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn policies_share_environment() {
        let (scenario, config) = small();
        for seed in 0..20 {
            let envs: Vec<_> = Policy::ALL
                .iter()
                .map(|&p| run_replication(&scenario, &config.with_policy(p), seed).unwrap().env)
                .collect();
            assert!(envs.windows(2).all(|w| w[0] == w[1]));
        }
    }

    #[test]
    fn singleton_statistics() {
        let (scenario, config) = small();
        let report =
            run_replications(&scenario, &config, &[Policy::Wapts], SeedRange::new(5, 1), Execution::default())
                .unwrap();
        let rep = run_replication(&scenario, &config, 5).unwrap();
        let p = report.policy(Policy::Wapts).unwrap();
        assert_eq!(p.avg_outcome.mean, rep.summary.average_outcome);
        assert_eq!(p.avg_outcome.sd, 0.0);
        assert_eq!(p.correct_rate.sd, 0.0);
        assert_eq!(report.n_reps, 1);
    }

    #[test]
    fn self_comparison_has_no_superior_count() {
        let (scenario, config) = small();
        let recs = run_policy(&scenario, &config, SeedRange::new(0, 30), Execution::default(), false).unwrap();
        assert_eq!(paired_superior_count(&recs, &recs), 0);
    }

    #[test]
    fn thread_count_does_not_change_report() {
        let (scenario, config) = small();
        let seeds = SeedRange::new(100, 40);
        let one =
            run_replications(&scenario, &config, &Policy::ALL, seeds, Execution::sequential()).unwrap();
        let four =
            run_replications(&scenario, &config, &Policy::ALL, seeds, Execution::with_threads(4)).unwrap();
        assert_eq!(one, four);
        for s in &one.superior_counts {
            assert!(s.count <= one.n_reps);
        }
    }

    #[test]
    fn sweep_preserves_order_and_isolates_errors() {
        let (scenario, config) = small();
        let bad = ScenarioSpec::fixed(1, 0.5, 0.1);
        let grid = vec![
            GridCell { scenario, config: config.clone(), policies: vec![Policy::Ur] },
            GridCell { scenario: bad, config: config.clone(), policies: vec![Policy::Ur] },
            GridCell {
                scenario: ScenarioSpec::fixed(3, 0.2, 0.3),
                config: config.clone(),
                policies: vec![Policy::Ts],
            },
        ];
        let out = sweep(&grid, SeedRange::new(0, 5), Execution::default());
        assert_eq!(out[0].as_ref().unwrap().scenario, scenario);
        assert!(out[1].is_err());
        assert_eq!(out[2].as_ref().unwrap().scenario.n_arms, 3);
        let direct = run_replications(&scenario, &config, &[Policy::Ur], SeedRange::new(0, 5), Execution::default())
            .unwrap();
        assert_eq!(out[0].as_ref().unwrap(), &direct);
    }

    #[test]
    fn trajectory_ends_at_mean_total() {
        let scenario = ScenarioSpec::flexible(4, 0.3, 0.3);
        let config = ExperimentConfig::new(60, Policy::Ts);
        let seeds = SeedRange::new(0, 12);
        let traj = trajectory(&scenario, &config, TrajectoryMetric::LenientRegret, seeds, Execution::default())
            .unwrap();
        let report = run_replications(&scenario, &config, &[Policy::Ts], seeds, Execution::default()).unwrap();
        let last = *traj.mean.last().unwrap();
        assert!((last - report.policies[0].lenient_regret.mean).abs() < 1e-9);
        assert_eq!(traj.mean.len(), 60);
    }
}
