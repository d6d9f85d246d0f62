use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use bandit_arena::report::{POWER_HEADER, SUMMARY_HEADER, SWEEP_HEADER, TRACE_HEADER};

const BIN: &str = env!("CARGO_BIN_EXE_bandit-arena");

fn arena(args: &[&str], dir: &Path) -> Output {
    Command::new(BIN)
        .args(args)
        .current_dir(dir)
        .env_remove("BANDIT_ARENA_SEED_OFFSET")
        .output()
        .expect("binary runs")
}

fn write_config(dir: &Path, name: &str, body: &str) {
    fs::write(dir.join(name), body).unwrap();
}

fn read(path: impl AsRef<Path>) -> String {
    fs::read_to_string(path.as_ref()).unwrap_or_else(|e| panic!("{}: {e}", path.as_ref().display()))
}

const RUN: &str = r#"
[scenario]
kind = "flexible"
n_arms = 3
theta_min = 0.3
delta = 0.2

[experiment]
n_participants = 50
policies = ["ur", "ts", "wapts"]

[execution]
seed_start = 1
seed_count = 3
"#;

#[test]
fn run_writes_documented_files() {
    let dir = tempfile::tempdir().unwrap();
    write_config(dir.path(), "run.toml", RUN);
    let out = arena(&["run", "--config", "run.toml", "--out", "a"], dir.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));

    let summary = read(dir.path().join("a/summary.csv"));
    let mut lines = summary.lines();
    assert_eq!(lines.next(), Some(SUMMARY_HEADER));
    let rows: Vec<_> = lines.collect();
    assert_eq!(rows.len(), 3);
    assert!(rows[0].starts_with("ur,3,"));
    assert!(rows[2].starts_with("wapts,3,"));
    let width = SUMMARY_HEADER.split(',').count();
    assert!(rows.iter().all(|r| r.split(',').count() == width));

    let power = read(dir.path().join("a/power.csv"));
    assert_eq!(power.lines().next(), Some(POWER_HEADER));
    assert_eq!(power.lines().count(), 4);

    let json: serde_json::Value = serde_json::from_str(&read(dir.path().join("a/summary.json"))).unwrap();
    assert_eq!(json["pairing"], "seed-paired");
    assert!(json["metadata"]["generated_unix_secs"].is_u64());
    assert_eq!(json["policies"].as_array().unwrap().len(), 3);
}

#[test]
fn rerun_is_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    write_config(dir.path(), "run.toml", RUN);
    for out_dir in ["a", "b"] {
        let out = arena(&["run", "--config", "run.toml", "--out", out_dir, "--parallelism", "2"], dir.path());
        assert!(out.status.success());
    }
    for file in ["summary.csv", "power.csv", "replications.csv"] {
        let a = fs::read(dir.path().join("a").join(file)).unwrap();
        let b = fs::read(dir.path().join("b").join(file)).unwrap();
        assert_eq!(a, b, "{file} differs between runs");
    }
}

#[test]
fn traces_one_file_per_seed_and_policy() {
    let dir = tempfile::tempdir().unwrap();
    write_config(dir.path(), "run.toml", RUN);
    let out = arena(
        &["run", "--config", "run.toml", "--out", "t", "--emit-traces", "--format", "csv"],
        dir.path(),
    );
    assert!(out.status.success());
    assert!(!dir.path().join("t/summary.json").exists());
    for policy in ["ur", "ts", "wapts"] {
        let pdir = dir.path().join("t/traces").join(policy);
        let mut files: Vec<_> = fs::read_dir(&pdir)
            .unwrap()
            .map(|e| e.unwrap().file_name().into_string().unwrap())
            .collect();
        files.sort();
        assert_eq!(files, ["trace_1.csv", "trace_2.csv", "trace_3.csv"]);
        for f in files {
            let body = read(pdir.join(f));
            let mut lines = body.lines();
            assert_eq!(lines.next(), Some(TRACE_HEADER));
            let rows: Vec<_> = lines.collect();
            assert_eq!(rows.len(), 50);
            for (i, row) in rows.iter().enumerate() {
                let cols: Vec<u64> = row.split(',').map(|c| c.parse().unwrap()).collect();
                assert_eq!(cols[0], i as u64 + 1);
                assert!((1..=3).contains(&cols[1]));
                assert!(cols[2] <= 1);
            }
        }
    }
}

#[test]
fn seed_flag_and_offset_agree() {
    let dir = tempfile::tempdir().unwrap();
    write_config(dir.path(), "run.toml", RUN);
    let direct = arena(&["run", "--config", "run.toml", "--out", "d", "--seeds", "11:3"], dir.path());
    assert!(direct.status.success());
    let shifted = Command::new(BIN)
        .args(["run", "--config", "run.toml", "--out", "s", "--seeds", "1:3"])
        .current_dir(dir.path())
        .env("BANDIT_ARENA_SEED_OFFSET", "10")
        .output()
        .unwrap();
    assert!(shifted.status.success());
    assert_eq!(
        read(dir.path().join("d/replications.csv")),
        read(dir.path().join("s/replications.csv"))
    );
    assert!(read(dir.path().join("d/replications.csv")).contains("\nts,11,"));

    let bad = Command::new(BIN)
        .args(["run", "--config", "run.toml", "--out", "x"])
        .current_dir(dir.path())
        .env("BANDIT_ARENA_SEED_OFFSET", "minus one")
        .output()
        .unwrap();
    assert_eq!(bad.status.code(), Some(1));
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let missing = arena(&["run", "--config", "absent.toml"], dir.path());
    assert_eq!(missing.status.code(), Some(2));

    write_config(dir.path(), "bad.toml", &RUN.replace("theta_min = 0.3", "theta_min = 0.9"));
    let invalid = arena(&["run", "--config", "bad.toml"], dir.path());
    assert_eq!(invalid.status.code(), Some(1));
    let stderr = String::from_utf8_lossy(&invalid.stderr);
    assert!(stderr.contains("theta_min") && stderr.contains("delta"), "{stderr}");

    let unknown = arena(&["reproduce", "t9"], dir.path());
    assert_eq!(unknown.status.code(), Some(1));

    fs::write(dir.path().join("blocker"), "").unwrap();
    write_config(dir.path(), "run.toml", RUN);
    let unwritable = arena(&["run", "--config", "run.toml", "--out", "blocker/sub"], dir.path());
    assert_eq!(unwritable.status.code(), Some(2));
}

#[test]
fn sweep_emits_one_row_per_cell_policy_metric() {
    let dir = tempfile::tempdir().unwrap();
    let body = r#"
[scenario]
kind = "fixed"
n_arms = 2
theta_min = 0.4
delta = 0.2

[experiment]
n_participants = 30
policies = ["ts", "ur"]

[execution]
seed_count = 2

[sweep]
n_participants = [30, 100, 300]
n_arms = [2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12, 13, 14, 15, 16, 17, 18, 19, 20, 21, 22, 23, 24, 25, 26, 27, 28, 29, 30]
"#;
    write_config(dir.path(), "sweep.toml", body);
    let out = arena(&["sweep", "--config", "sweep.toml", "--out", "s"], dir.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = read(dir.path().join("s/sweep.csv"));
    assert_eq!(csv.lines().next(), Some(SWEEP_HEADER));
    let outcome_rows = csv.lines().filter(|l| l.contains(",avg_outcome,")).count();
    assert_eq!(outcome_rows, 3 * 29 * 2);
    let first = csv.lines().nth(1).unwrap();
    assert!(first.starts_with("0,fixed,2,30,0.4,0.2,ts,"), "{first}");
    assert!(!dir.path().join("s/trajectories.csv").exists());
}

#[test]
fn sweep_trajectories_over_effect_sizes() {
    let dir = tempfile::tempdir().unwrap();
    let body = r#"
[scenario]
kind = "flexible"
n_arms = 4
theta_min = 0.3
delta = 0.1

[experiment]
n_participants = 40
policies = ["ts", "wapts"]

[execution]
seed_count = 3
formats = "csv"

[sweep]
delta = [0.05, 0.1, 0.2, 0.3]
trajectories = ["lenient_regret"]
"#;
    write_config(dir.path(), "sweep.toml", body);
    let out = arena(&["sweep", "--config", "sweep.toml", "--out", "s"], dir.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let traj = read(dir.path().join("s/trajectories.csv"));
    assert_eq!(traj.lines().count(), 1 + 4 * 2 * 40);
    for d in ["0.05", "0.1", "0.2", "0.3"] {
        for p in ["ts", "wapts"] {
            let tag = format!(",{d},{p},lenient_regret,");
            assert_eq!(traj.lines().filter(|l| l.contains(&tag)).count(), 40, "{tag}");
        }
    }
    // Cumulative lenient regret never decreases along a trajectory.
    let means: Vec<f64> = traj
        .lines()
        .skip(1)
        .take(40)
        .map(|l| l.split(',').nth(9).unwrap().parse().unwrap())
        .collect();
    assert!(means.windows(2).all(|w| w[1] >= w[0]));
}

#[test]
fn sweep_rejects_empty_axis() {
    let dir = tempfile::tempdir().unwrap();
    write_config(dir.path(), "sweep.toml", &format!("{RUN}\n[sweep]\nn_arms = []\n"));
    let out = arena(&["sweep", "--config", "sweep.toml", "--out", "s"], dir.path());
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("sweep.n_arms"));
    assert!(!dir.path().join("s").exists());
}

#[test]
fn reproduce_prints_side_by_side() {
    let dir = tempfile::tempdir().unwrap();
    let out = arena(&["reproduce", "f1-fixed", "--out", "r", "--seeds", "1:20"], dir.path());
    assert!(out.status.success());
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("correct_rate"), "{stdout}");
    let cmp = read(dir.path().join("r/comparison.csv"));
    assert_eq!(cmp.lines().count(), 1 + 6);
    assert!(cmp.lines().nth(1).unwrap().starts_with("0.1,wapts,correct_rate,0.869,"));
}
