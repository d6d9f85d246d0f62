//! Seeded Monte Carlo harness for Beta-Bernoulli bandit allocation policies.
//!
//! Three policies share one selection contract: uniform random, Thompson
//! sampling, and WAPTS, which scales each Thompson draw by `(1 + r) r` of the
//! arm's empirical success rate. Replications are reproducible from a seed,
//! and reports cover outcomes, regret and lenient regret, majority-commit
//! speed, and Benjamini-Hochberg power for epsilon-lenient tests.

pub mod arm;
pub mod cli;
pub mod config;
pub mod config_file;
pub mod environment;
pub mod error;
pub mod inference;
pub mod metrics;
pub mod policy;
pub mod presets;
pub mod report;
pub mod runner;

pub use arm::{ArmState, BanditTrace, TraceEntry};
pub use config::{ExperimentConfig, Policy, PowerCounting, ThresholdMode};
pub use environment::{Environment, ScenarioKind, ScenarioSpec};
pub use error::{Error, Result};
pub use runner::{
    run_replication, run_replications, AggregateReport, Execution, PolicyReport, SeedRange,
};
