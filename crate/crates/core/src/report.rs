//! CSV and JSON writers. Every CSV has a fixed header; numbers use six
//! significant digits so reruns produce byte-identical bodies.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde::Serialize;

use crate::arm::BanditTrace;
use crate::config::Policy;
use crate::error::{Error, Result};
use crate::runner::{AggregateReport, ReplicationRecord, Trajectory};

pub const SUMMARY_HEADER: &str = "policy,n_reps,avg_outcome_mean,avg_outcome_sd,correct_rate_mean,correct_rate_sd,regret_mean,regret_sd,lenient_regret_mean,lenient_regret_sd,commit_time_mean,commit_time_sd,commit_rate,lenient_correct_mean,lenient_correct_sd,best_arm_starved_mean,best_arm_starved_sd,posterior_bias_mean,posterior_bias_sd,wapts_superior_count";
pub const POWER_HEADER: &str =
    "effect_size,policy,power_any_lenient,power_true_best,n_reps,epsilon,mode";
pub const REPLICATIONS_HEADER: &str = "policy,seed,avg_outcome,correct_rate,regret,lenient_regret,commit_time,commit_arm,lenient_correct,best_arm_starved";
pub const TRACE_HEADER: &str = "round,arm,reward";
pub const SWEEP_HEADER: &str =
    "cell,kind,n_arms,n_participants,theta_min,effect_size,policy,metric,mean,sd,n";
pub const TRAJECTORY_HEADER: &str =
    "cell,kind,n_arms,n_participants,theta_min,effect_size,policy,metric,round,mean,sd";

/// Six significant digits, `%g` style, independent of locale.
pub fn fmt_num(x: f64) -> String {
    if x.is_nan() {
        return "NaN".to_string();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf" } else { "-inf" }.to_string();
    }
    if x == 0.0 {
        return "0".to_string();
    }
    let sci = format!("{x:.5e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-4..6).contains(&exp) {
        let mantissa = trim_zeros(mantissa);
        return format!("{mantissa}e{}{:02}", if exp < 0 { '-' } else { '+' }, exp.abs());
    }
    let decimals = (5 - exp).max(0) as usize;
    trim_zeros(&format!("{x:.decimals$}")).to_string()
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

pub fn summary_csv(report: &AggregateReport) -> String {
    let mut out = String::from(SUMMARY_HEADER);
    out.push('\n');
    for p in &report.policies {
        let mut row = vec![p.policy.to_string(), p.n_reps.to_string()];
        for (name, stats) in p.metric_rows() {
            row.push(fmt_num(stats.mean));
            row.push(fmt_num(stats.sd));
            if name == "commit_time" {
                row.push(fmt_num(p.commit_rate));
            }
        }
        row.push(opt(report.superior_count(p.policy)));
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

pub fn power_csv(report: &AggregateReport) -> String {
    let mut out = String::from(POWER_HEADER);
    out.push('\n');
    power_rows(report, &mut out);
    out
}

pub fn power_rows(report: &AggregateReport, out: &mut String) {
    for p in &report.policies {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{}",
            fmt_num(report.scenario.effect_size),
            p.policy,
            fmt_num(p.power.power_any_lenient),
            fmt_num(p.power.power_true_best),
            p.n_reps,
            fmt_num(report.epsilon),
            report.config.threshold_mode.as_str(),
        );
    }
}

/// Per-replication metrics with 1-based commit arms.
pub fn replications_csv(records: &[(Policy, Vec<ReplicationRecord>)]) -> String {
    let mut out = String::from(REPLICATIONS_HEADER);
    out.push('\n');
    for (policy, recs) in records {
        for r in recs {
            let s = &r.summary;
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{},{},{},{}",
                policy,
                r.seed,
                fmt_num(s.average_outcome),
                fmt_num(s.correct_rate),
                fmt_num(s.regret),
                fmt_num(s.lenient_regret),
                opt(s.commit_time),
                opt(s.commit_arm.map(|a| a + 1)),
                opt(s.lenient_correct.map(u8::from)),
                u8::from(s.best_arm_starved),
            );
        }
    }
    out
}

/// `round,arm,reward` with 1-based round and arm.
pub fn trace_csv(trace: &BanditTrace) -> String {
    let mut out = String::with_capacity(16 * (trace.len() + 1));
    out.push_str(TRACE_HEADER);
    out.push('\n');
    for e in trace.entries() {
        let _ = writeln!(out, "{},{},{}", e.round, e.arm + 1, u8::from(e.reward));
    }
    out
}

fn cell_prefix(cell: usize, report: &AggregateReport) -> String {
    format!(
        "{},{},{},{},{},{}",
        cell,
        report.scenario.kind,
        report.scenario.n_arms,
        report.config.n_participants,
        fmt_num(report.scenario.theta_min),
        fmt_num(report.scenario.effect_size),
    )
}

/// One row per (policy, metric) for a sweep cell.
pub fn sweep_rows(cell: usize, report: &AggregateReport, out: &mut String) {
    let prefix = cell_prefix(cell, report);
    for p in &report.policies {
        for (name, stats) in p.metric_rows() {
            let _ = writeln!(
                out,
                "{prefix},{},{name},{},{},{}",
                p.policy,
                fmt_num(stats.mean),
                fmt_num(stats.sd),
                stats.n
            );
        }
    }
}

pub fn trajectory_rows(cell: usize, report: &AggregateReport, traj: &Trajectory, out: &mut String) {
    let prefix = cell_prefix(cell, report);
    for (i, (m, s)) in traj.mean.iter().zip(&traj.sd).enumerate() {
        let _ = writeln!(
            out,
            "{prefix},{},{},{},{},{}",
            traj.policy,
            traj.metric.as_str(),
            i + 1,
            fmt_num(*m),
            fmt_num(*s)
        );
    }
}

#[derive(Serialize)]
struct Metadata {
    tool: &'static str,
    version: &'static str,
    generated_unix_secs: u64,
    pairing_note: &'static str,
}

#[derive(Serialize)]
struct JsonDocument<'a, T: Serialize> {
    metadata: Metadata,
    #[serde(flatten)]
    body: &'a T,
}

/// Pretty JSON with a metadata block; the timestamp lives only here.
pub fn to_json<T: Serialize>(body: &T) -> Result<String> {
    let generated_unix_secs = std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0);
    let doc = JsonDocument {
        metadata: Metadata {
            tool: env!("CARGO_PKG_NAME"),
            version: env!("CARGO_PKG_VERSION"),
            generated_unix_secs,
            pairing_note: "superior counts compare policies on identical seeds (same environment per seed)",
        },
        body,
    };
    serde_json::to_string_pretty(&doc)
        .map_err(|e| Error::invalid("json", format!("serialization failed: {e}")))
}

pub fn write_file(path: &Path, contents: &str) -> Result<()> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
    }
    fs::write(path, contents).map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn number_format() {
        assert_eq!(fmt_num(0.0), "0");
        assert_eq!(fmt_num(0.5), "0.5");
        assert_eq!(fmt_num(1.0), "1");
        assert_eq!(fmt_num(0.123456789), "0.123457");
        assert_eq!(fmt_num(123456.7), "123457");
        assert_eq!(fmt_num(1234567.0), "1.23457e+06");
        assert_eq!(fmt_num(0.0000123456), "1.23456e-05");
        assert_eq!(fmt_num(-2.5), "-2.5");
        assert_eq!(fmt_num(9.9999996), "10");
        assert_eq!(fmt_num(209.4), "209.4");
        assert_eq!(fmt_num(f64::NAN), "NaN");
    }

    #[test]
    fn trace_is_one_based() {
        let trace = BanditTrace::from_pulls([(0, true), (2, false)]);
        assert_eq!(trace_csv(&trace), "round,arm,reward\n1,1,1\n2,3,0\n");
    }
}
