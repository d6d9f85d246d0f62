//! Command-line front end: `run`, `sweep` and `reproduce`.
//!
//! Exit codes are 0 on success, 1 for configuration or validation problems
//! and 2 for I/O failures.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use crate::config_file::{parse_config, Formats, RunConfigFile};
use crate::error::{Error, Result};
use crate::presets::{self, preset_metric, Preset};
use crate::report::{self, fmt_num};
use crate::runner::{
    run_replications, run_replications_detailed, sweep, trajectory, AggregateReport, Execution,
    SeedRange,
};

pub const SEED_OFFSET_VAR: &str = "BANDIT_ARENA_SEED_OFFSET";

pub const COMPARISON_HEADER: &str =
    "effect_size,policy,metric,reference,ours,diff,tolerance,verdict";

#[derive(Debug, Parser)]
#[command(name = "bandit-arena", version, about = "Seeded bandit policy simulations")]
pub struct Cli {
    /// Increase log verbosity (-v info, -vv debug).
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    pub verbose: u8,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run every configured policy over the seed range.
    Run {
        #[arg(long)]
        config: PathBuf,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Run the grid described by the `[sweep]` section.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Rerun a published table and compare against its numbers.
    Reproduce {
        /// One of: f1-flex, f1-fixed, f2-flex, f2-fixed, f3-flex, f3-fixed, cmp-k10, power-t1, speed-t2.
        table_id: String,
        #[command(flatten)]
        common: CommonArgs,
    },
}

#[derive(Debug, Clone, Default, Args)]
pub struct CommonArgs {
    /// Output directory (overrides the config file).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Seed range as `start:count`.
    #[arg(long, value_parser = parse_seeds)]
    pub seeds: Option<SeedRange>,
    /// Worker threads; 0 uses every core.
    #[arg(long)]
    pub parallelism: Option<usize>,
    /// Write per-replication trace files.
    #[arg(long)]
    pub emit_traces: bool,
    /// csv, json or both.
    #[arg(long)]
    pub format: Option<Formats>,
}

pub fn parse_seeds(s: &str) -> std::result::Result<SeedRange, String> {
    let (start, count) = s
        .split_once(':')
        .ok_or_else(|| format!("expected start:count, got `{s}`"))?;
    let start = start
        .trim()
        .parse::<u64>()
        .map_err(|e| format!("bad seed start `{start}`: {e}"))?;
    let count = count
        .trim()
        .parse::<u64>()
        .map_err(|e| format!("bad seed count `{count}`: {e}"))?;
    if count == 0 {
        return Err("seed count must be at least 1".to_string());
    }
    start
        .checked_add(count)
        .ok_or_else(|| "seed range overflows".to_string())?;
    Ok(SeedRange::new(start, count))
}

fn seed_offset() -> Result<u64> {
    match std::env::var(SEED_OFFSET_VAR) {
        Ok(v) if !v.trim().is_empty() => v.trim().parse::<u64>().map_err(|e| {
            Error::invalid(SEED_OFFSET_VAR, format!("expected a non-negative integer, got `{v}`: {e}"))
        }),
        _ => Ok(0),
    }
}

fn shifted(seeds: SeedRange) -> Result<SeedRange> {
    let offset = seed_offset()?;
    seeds
        .start
        .checked_add(offset)
        .and_then(|start| start.checked_add(seeds.count).map(|_| start))
        .map(|start| SeedRange::new(start, seeds.count))
        .ok_or_else(|| Error::invalid(SEED_OFFSET_VAR, "seed range overflows"))
}

fn execution(parallelism: Option<usize>) -> Execution {
    Execution {
        threads: parallelism.filter(|&p| p > 0),
    }
}

/// Settings after command-line overrides have been applied to a config file.
struct Resolved {
    file: RunConfigFile,
    seeds: SeedRange,
    exec: Execution,
    out: PathBuf,
    formats: Formats,
    emit_traces: bool,
}

fn resolve(config: &Path, common: &CommonArgs) -> Result<Resolved> {
    let file = parse_config(config)?;
    let ex = &file.execution;
    Ok(Resolved {
        seeds: shifted(common.seeds.unwrap_or_else(|| ex.seeds()))?,
        exec: execution(common.parallelism.or(ex.parallelism)),
        out: common.out.clone().unwrap_or_else(|| ex.output_dir.clone()),
        formats: common.format.unwrap_or(ex.formats),
        emit_traces: common.emit_traces || ex.emit_traces,
        file,
    })
}

fn finish(result: Result<()>) -> u8 {
    match result {
        Ok(()) => 0,
        Err(err) => {
            eprintln!("error: {err}");
            err.exit_code()
        }
    }
}

pub fn main_with(cli: Cli) -> u8 {
    match cli.command {
        Command::Run { config, common } => cmd_run(&config, &common),
        Command::Sweep { config, common } => cmd_sweep(&config, &common),
        Command::Reproduce { table_id, common } => cmd_reproduce(&table_id, &common),
    }
}

pub fn cmd_run(config: &Path, common: &CommonArgs) -> u8 {
    finish(run(config, common))
}

fn run(config: &Path, common: &CommonArgs) -> Result<()> {
    let r = resolve(config, common)?;
    let f = &r.file;
    let detailed = run_replications_detailed(
        &f.scenario,
        &f.experiment,
        &f.policies,
        r.seeds,
        r.exec,
        r.emit_traces,
    )?;
    let rep = &detailed.report;

    if r.formats.csv {
        report::write_file(&r.out.join("summary.csv"), &report::summary_csv(rep))?;
        report::write_file(&r.out.join("power.csv"), &report::power_csv(rep))?;
        report::write_file(
            &r.out.join("replications.csv"),
            &report::replications_csv(&detailed.records),
        )?;
    }
    if r.formats.json {
        report::write_file(&r.out.join("summary.json"), &report::to_json(rep)?)?;
    }
    if r.emit_traces {
        for (policy, records) in &detailed.records {
            let dir = r.out.join("traces").join(policy.as_str());
            for rec in records {
                if let Some(trace) = &rec.trace {
                    let path = dir.join(format!("trace_{}.csv", rec.seed));
                    report::write_file(&path, &report::trace_csv(trace))?;
                }
            }
        }
    }
    print!("{}", summary_table(rep));
    println!("wrote results to {}", r.out.display());
    Ok(())
}

/// Human-readable summary printed after a run.
pub fn summary_table(rep: &AggregateReport) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{} gap, K={}, theta_min={}, delta={}, N={}, seeds {}..{} (burn-in {}, epsilon {})",
        rep.scenario.kind,
        rep.scenario.n_arms,
        fmt_num(rep.scenario.theta_min),
        fmt_num(rep.scenario.effect_size),
        rep.config.n_participants,
        rep.seeds.start,
        rep.seeds.start + rep.seeds.count - 1,
        rep.burn_in,
        fmt_num(rep.epsilon),
    );
    let _ = writeln!(
        out,
        "{:<6} {:>17} {:>17} {:>9} {:>9} {:>9} {:>8} {:>8} {:>9}",
        "policy", "outcome", "correct rate", "regret", "lenient", "commit", "pwr any", "pwr best", "superior"
    );
    for p in &rep.policies {
        let _ = writeln!(
            out,
            "{:<6} {:>8.4} ± {:<6.4} {:>8.4} ± {:<6.4} {:>9.2} {:>9.2} {:>9.1} {:>8.3} {:>8.3} {:>9}",
            p.policy.as_str(),
            p.avg_outcome.mean,
            p.avg_outcome.sd,
            p.correct_rate.mean,
            p.correct_rate.sd,
            p.regret.mean,
            p.lenient_regret.mean,
            p.commit_time.mean,
            p.power.power_any_lenient,
            p.power.power_true_best,
            rep.superior_count(p.policy)
                .map_or_else(|| "-".to_string(), |c| c.to_string()),
        );
    }
    out
}

pub fn cmd_sweep(config: &Path, common: &CommonArgs) -> u8 {
    finish(run_sweep(config, common))
}

fn run_sweep(config: &Path, common: &CommonArgs) -> Result<()> {
    let r = resolve(config, common)?;
    let grid = r.file.grid();
    let metrics = r
        .file
        .sweep
        .as_ref()
        .map(|s| s.trajectories.clone())
        .unwrap_or_default();
    let results = sweep(&grid, r.seeds, r.exec);

    let mut sweep_csv = format!("{}\n", report::SWEEP_HEADER);
    let mut power_csv = format!("{}\n", report::POWER_HEADER);
    let mut traj_csv = format!("{}\n", report::TRAJECTORY_HEADER);
    let mut reports = Vec::new();
    let mut failures = Vec::new();
    for (i, (cell, result)) in grid.iter().zip(&results).enumerate() {
        match result {
            Ok(rep) => {
                report::sweep_rows(i, rep, &mut sweep_csv);
                report::power_rows(rep, &mut power_csv);
                for &metric in &metrics {
                    for &policy in &cell.policies {
                        let cfg = cell.config.with_policy(policy);
                        let traj = trajectory(&cell.scenario, &cfg, metric, r.seeds, r.exec)?;
                        report::trajectory_rows(i, rep, &traj, &mut traj_csv);
                    }
                }
                reports.push(rep);
            }
            Err(err) => {
                eprintln!("cell {i} failed: {err}");
                failures.push(i);
            }
        }
    }

    if r.formats.csv {
        report::write_file(&r.out.join("sweep.csv"), &sweep_csv)?;
        report::write_file(&r.out.join("power.csv"), &power_csv)?;
        if !metrics.is_empty() {
            report::write_file(&r.out.join("trajectories.csv"), &traj_csv)?;
        }
    }
    if r.formats.json {
        #[derive(Serialize)]
        struct SweepJson<'a> {
            cells: &'a [&'a AggregateReport],
            failed_cells: &'a [usize],
        }
        let body = SweepJson {
            cells: &reports,
            failed_cells: &failures,
        };
        report::write_file(&r.out.join("sweep.json"), &report::to_json(&body)?)?;
    }
    println!(
        "{} of {} cells completed; wrote results to {}",
        reports.len(),
        grid.len(),
        r.out.display()
    );
    if failures.is_empty() {
        Ok(())
    } else {
        Err(Error::invalid("sweep", format!("{} cell(s) failed: {failures:?}", failures.len())))
    }
}

/// One line of a reproduction side-by-side.
#[derive(Debug, Clone, Serialize)]
pub struct Comparison {
    pub effect_size: f64,
    pub policy: String,
    pub metric: String,
    pub reference: f64,
    pub ours: f64,
    pub tolerance: Option<f64>,
    /// `None` when no tolerance applies.
    pub within: Option<bool>,
}

pub fn compare(preset: &Preset, reports: &[AggregateReport]) -> Vec<Comparison> {
    preset
        .references
        .iter()
        .filter_map(|r| {
            let rep = reports
                .iter()
                .find(|rep| rep.scenario.effect_size == r.effect_size)?;
            let ours = preset_metric(rep, r.policy, r.metric)?;
            Some(Comparison {
                effect_size: r.effect_size,
                policy: r.policy.to_string(),
                metric: r.metric.to_string(),
                reference: r.value,
                ours,
                tolerance: r.tolerance,
                within: r.tolerance.map(|t| (ours - r.value).abs() <= t),
            })
        })
        .collect()
}

fn verdict(c: &Comparison) -> &'static str {
    match c.within {
        Some(true) => "ok",
        Some(false) => "miss",
        None => "-",
    }
}

pub fn comparison_csv(rows: &[Comparison]) -> String {
    let mut out = format!("{COMPARISON_HEADER}\n");
    for c in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            fmt_num(c.effect_size),
            c.policy,
            c.metric,
            fmt_num(c.reference),
            fmt_num(c.ours),
            fmt_num(c.ours - c.reference),
            c.tolerance.map(fmt_num).unwrap_or_default(),
            verdict(c),
        );
    }
    out
}

pub fn cmd_reproduce(table_id: &str, common: &CommonArgs) -> u8 {
    finish(reproduce(table_id, common))
}

fn reproduce(table_id: &str, common: &CommonArgs) -> Result<()> {
    let preset = presets::find(table_id).map_err(|e| match e {
        Error::UnknownTable(id) => Error::invalid(
            "table_id",
            format!("unknown table `{id}`; expected one of {}", presets::PRESET_IDS.join(", ")),
        ),
        other => other,
    })?;
    let seeds = shifted(common.seeds.unwrap_or(preset.seeds))?;
    let exec = execution(common.parallelism);
    let out = common
        .out
        .clone()
        .unwrap_or_else(|| PathBuf::from("out").join(preset.id));
    let formats = common.format.unwrap_or_default();

    println!(
        "{}: {} ({} seeds from {})",
        preset.id, preset.title, seeds.count, seeds.start
    );
    let config = preset.config();
    let reports = preset
        .effect_sizes
        .iter()
        .map(|&d| run_replications(&preset.scenario(d), &config, &preset.policies, seeds, exec))
        .collect::<Result<Vec<_>>>()?;
    let rows = compare(&preset, &reports);

    println!(
        "{:>6} {:<6} {:<22} {:>10} {:>10} {:>9}  verdict",
        "delta", "policy", "metric", "reference", "ours", "diff"
    );
    for c in &rows {
        println!(
            "{:>6} {:<6} {:<22} {:>10.4} {:>10.4} {:>+9.4}  {}",
            fmt_num(c.effect_size),
            c.policy,
            c.metric,
            c.reference,
            c.ours,
            c.ours - c.reference,
            verdict(c),
        );
    }

    if formats.csv {
        report::write_file(&out.join("comparison.csv"), &comparison_csv(&rows))?;
        let mut sweep_csv = format!("{}\n", report::SWEEP_HEADER);
        let mut power_csv = format!("{}\n", report::POWER_HEADER);
        for (i, rep) in reports.iter().enumerate() {
            report::sweep_rows(i, rep, &mut sweep_csv);
            report::power_rows(rep, &mut power_csv);
        }
        report::write_file(&out.join("sweep.csv"), &sweep_csv)?;
        report::write_file(&out.join("power.csv"), &power_csv)?;
        if let [only] = reports.as_slice() {
            report::write_file(&out.join("summary.csv"), &report::summary_csv(only))?;
        }
    }
    if formats.json {
        #[derive(Serialize)]
        struct ReproduceJson<'a> {
            table_id: &'a str,
            comparisons: &'a [Comparison],
            reports: &'a [AggregateReport],
        }
        let body = ReproduceJson {
            table_id: preset.id,
            comparisons: &rows,
            reports: &reports,
        };
        report::write_file(&out.join("reproduce.json"), &report::to_json(&body)?)?;
    }
    println!("wrote results to {}", out.display());
    Ok(())
}
