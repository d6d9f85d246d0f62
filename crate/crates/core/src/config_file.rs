//! Run configuration files.
//!
//! The primary format is TOML with three sections mirroring the blocks of a
//! run (plus an optional `[sweep]` grid); a JSON document with the same
//! nesting is accepted when the file ends in `.json`.
//!
//! ```toml
//! [scenario]
//! kind = "flexible"        # fixed | flexible
//! n_arms = 10
//! theta_min = 0.5
//! delta = 0.2
//!
//! [experiment]
//! n_participants = 239
//! policies = ["ur", "ts", "wapts"]
//! # burn_in defaults to n_arms; eta = 0.5, tau = 0.5, q = 0.05, m = 5
//!
//! [execution]
//! seed_start = 1
//! seed_count = 200
//! output_dir = "out"
//! formats = ["csv", "json"]
//! ```

use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::Serialize;
use serde_json::{Map, Value};

use crate::config::{
    ExperimentConfig, Policy, PowerCounting, ThresholdMode, DEFAULT_ETA, DEFAULT_FDR_Q,
    DEFAULT_MIN_PULLS, DEFAULT_TAU,
};
use crate::environment::{ScenarioKind, ScenarioSpec};
use crate::error::{Error, FieldError, Result};
use crate::runner::{GridCell, SeedRange, TrajectoryMetric};

/// Keys reserved for the allocation reset mechanism, which is not implemented.
const RESERVED_KEYS: [&str; 3] = ["reset", "reset_interval", "reset_min_samples"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Formats {
    pub csv: bool,
    pub json: bool,
}

impl Default for Formats {
    fn default() -> Self {
        Self {
            csv: true,
            json: true,
        }
    }
}

impl FromStr for Formats {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "csv" => Ok(Formats { csv: true, json: false }),
            "json" => Ok(Formats { csv: false, json: true }),
            "both" => Ok(Formats::default()),
            other => Err(format!("unknown format `{other}` (expected csv | json | both)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExecutionBlock {
    pub seed_start: u64,
    pub seed_count: u64,
    /// `None` uses every available core.
    pub parallelism: Option<usize>,
    pub output_dir: PathBuf,
    pub formats: Formats,
    pub emit_traces: bool,
}

impl Default for ExecutionBlock {
    fn default() -> Self {
        Self {
            seed_start: 1,
            seed_count: 200,
            parallelism: None,
            output_dir: PathBuf::from("out"),
            formats: Formats::default(),
            emit_traces: false,
        }
    }
}

impl ExecutionBlock {
    pub fn seeds(&self) -> SeedRange {
        SeedRange::new(self.seed_start, self.seed_count)
    }
}

/// Grid axes; an absent axis keeps the base value.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct SweepAxes {
    pub n_participants: Option<Vec<usize>>,
    pub n_arms: Option<Vec<usize>>,
    pub effect_sizes: Option<Vec<f64>>,
    pub trajectories: Vec<TrajectoryMetric>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfigFile {
    pub scenario: ScenarioSpec,
    /// `experiment.policy` is the first entry of `policies`.
    pub experiment: ExperimentConfig,
    pub policies: Vec<Policy>,
    pub execution: ExecutionBlock,
    pub sweep: Option<SweepAxes>,
}

impl RunConfigFile {
    /// Cartesian product of the sweep axes, N outermost, then K, then delta.
    pub fn grid(&self) -> Vec<GridCell> {
        let axes = self.sweep.clone().unwrap_or_default();
        let ns = axes
            .n_participants
            .unwrap_or_else(|| vec![self.experiment.n_participants]);
        let ks = axes.n_arms.unwrap_or_else(|| vec![self.scenario.n_arms]);
        let ds = axes
            .effect_sizes
            .unwrap_or_else(|| vec![self.scenario.effect_size]);
        let mut cells = Vec::with_capacity(ns.len() * ks.len() * ds.len());
        for &n in &ns {
            for &k in &ks {
                for &d in &ds {
                    let scenario = ScenarioSpec {
                        n_arms: k,
                        effect_size: d,
                        ..self.scenario
                    };
                    let config = ExperimentConfig {
                        n_participants: n,
                        ..self.experiment.clone()
                    };
                    cells.push(GridCell {
                        scenario,
                        config,
                        policies: self.policies.clone(),
                    });
                }
            }
        }
        cells
    }
}

pub fn parse_config(path: &Path) -> Result<RunConfigFile> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let is_json = path
        .extension()
        .is_some_and(|ext| ext.eq_ignore_ascii_case("json"));
    let root = if is_json {
        serde_json::from_str::<Value>(&text).map_err(|e| Error::Parse {
            path: path.to_path_buf(),
            message: format!("line {} column {}: {e}", e.line(), e.column()),
        })?
    } else {
        let table: toml::Table = toml::from_str(&text).map_err(|e| Error::Parse {
            path: path.to_path_buf(),
            message: toml_message(&text, &e),
        })?;
        serde_json::to_value(table).map_err(|e| Error::Parse {
            path: path.to_path_buf(),
            message: e.to_string(),
        })?
    };
    from_value(&root)
}

fn toml_message(text: &str, err: &toml::de::Error) -> String {
    match err.span() {
        Some(span) => {
            let line = text[..span.start.min(text.len())].matches('\n').count() + 1;
            format!("line {line}: {}", err.message())
        }
        None => err.message().to_string(),
    }
}

/// Reads a parsed document, collecting every problem before failing.
pub fn from_value(root: &Value) -> Result<RunConfigFile> {
    let mut r = Reader::default();
    let empty = Map::new();
    let root = match root.as_object() {
        Some(obj) => obj,
        None => {
            return Err(Error::invalid("<root>", "expected a table of sections"));
        }
    };
    for key in root.keys() {
        if !["scenario", "experiment", "execution", "sweep"].contains(&key.as_str()) {
            r.err(key, "unknown section");
        }
    }
    let scenario_sec = r.section(root, "scenario", true).unwrap_or(&empty);
    let experiment_sec = r.section(root, "experiment", true).unwrap_or(&empty);
    let execution_sec = r.section(root, "execution", false).unwrap_or(&empty);
    let sweep_sec = r.section(root, "sweep", false);

    r.known_keys("scenario", scenario_sec, &["kind", "n_arms", "theta_min", "delta"]);
    let kind = r
        .parsed::<ScenarioKind>(scenario_sec, "scenario.kind", "kind")
        .unwrap_or(ScenarioKind::FixedGap);
    let n_arms = r.required_uint(scenario_sec, "scenario.n_arms", "n_arms").unwrap_or(2) as usize;
    let theta_min = r.required_f64(scenario_sec, "scenario.theta_min", "theta_min").unwrap_or(0.0);
    let delta = r.required_f64(scenario_sec, "scenario.delta", "delta").unwrap_or(0.0);
    let scenario = ScenarioSpec::new(kind, n_arms, theta_min, delta);

    for reserved in RESERVED_KEYS {
        if experiment_sec.contains_key(reserved) {
            r.err(
                format!("experiment.{reserved}"),
                "reset mechanism is unimplemented (reserved for future work)",
            );
        }
    }
    r.known_keys(
        "experiment",
        experiment_sec,
        &[
            "n_participants",
            "policies",
            "policy",
            "burn_in",
            "eta",
            "epsilon",
            "tau",
            "q",
            "threshold_mode",
            "m",
            "power_counting",
            "reset",
            "reset_interval",
            "reset_min_samples",
        ],
    );
    let n_participants = r
        .required_uint(experiment_sec, "experiment.n_participants", "n_participants")
        .unwrap_or(1) as usize;
    let policies = match (experiment_sec.get("policies"), experiment_sec.get("policy")) {
        (Some(_), _) => r.list::<Policy>(experiment_sec, "experiment.policies", "policies"),
        (None, Some(_)) => r
            .parsed::<Policy>(experiment_sec, "experiment.policy", "policy")
            .map(|p| vec![p]),
        (None, None) => Some(Policy::ALL.to_vec()),
    }
    .unwrap_or_default();
    if policies.is_empty() && !r.has_field("experiment.polic") {
        r.err("experiment.policies", "at least one policy required");
    }
    let mut experiment =
        ExperimentConfig::new(n_participants, policies.first().copied().unwrap_or(Policy::Wapts));
    experiment.burn_in = r.opt_uint(experiment_sec, "experiment.burn_in", "burn_in").map(|b| b as usize);
    experiment.eta = r.opt_f64(experiment_sec, "experiment.eta", "eta").unwrap_or(DEFAULT_ETA);
    experiment.epsilon = r.opt_f64(experiment_sec, "experiment.epsilon", "epsilon");
    experiment.tau = r.opt_f64(experiment_sec, "experiment.tau", "tau").unwrap_or(DEFAULT_TAU);
    experiment.fdr_q = r.opt_f64(experiment_sec, "experiment.q", "q").unwrap_or(DEFAULT_FDR_Q);
    experiment.threshold_mode = r
        .opt_parsed(experiment_sec, "experiment.threshold_mode", "threshold_mode")
        .unwrap_or(ThresholdMode::TrueTheta);
    experiment.min_pull_diagnostic =
        r.opt_uint(experiment_sec, "experiment.m", "m").unwrap_or(DEFAULT_MIN_PULLS);
    experiment.power_counting = r
        .opt_parsed(experiment_sec, "experiment.power_counting", "power_counting")
        .unwrap_or(PowerCounting::Strict);

    r.known_keys(
        "execution",
        execution_sec,
        &["seed_start", "seed_count", "parallelism", "output_dir", "formats", "emit_traces"],
    );
    let defaults = ExecutionBlock::default();
    let formats = match execution_sec.get("formats") {
        Some(Value::String(_)) => r.parsed::<Formats>(execution_sec, "execution.formats", "formats"),
        Some(_) => r
            .list::<Formats>(execution_sec, "execution.formats", "formats")
            .map(|fs| Formats {
                csv: fs.iter().any(|f| f.csv),
                json: fs.iter().any(|f| f.json),
            }),
        None => Some(defaults.formats),
    }
    .unwrap_or(defaults.formats);
    let execution = ExecutionBlock {
        seed_start: r
            .opt_uint(execution_sec, "execution.seed_start", "seed_start")
            .unwrap_or(defaults.seed_start),
        seed_count: r
            .opt_uint(execution_sec, "execution.seed_count", "seed_count")
            .unwrap_or(defaults.seed_count),
        parallelism: r
            .opt_uint(execution_sec, "execution.parallelism", "parallelism")
            .filter(|&p| p > 0)
            .map(|p| p as usize),
        output_dir: r
            .opt_string(execution_sec, "execution.output_dir", "output_dir")
            .map(PathBuf::from)
            .unwrap_or(defaults.output_dir),
        formats,
        emit_traces: r
            .opt_bool(execution_sec, "execution.emit_traces", "emit_traces")
            .unwrap_or(false),
    };
    if execution.seed_count == 0 {
        r.err("execution.seed_count", "must be at least 1");
    }

    let sweep = sweep_sec.map(|sec| {
        r.known_keys("sweep", sec, &["n_participants", "n_arms", "delta", "trajectories"]);
        let axes = SweepAxes {
            n_participants: r
                .uint_axis(sec, "sweep.n_participants", "n_participants")
                .map(|v| v.into_iter().map(|x| x as usize).collect()),
            n_arms: r
                .uint_axis(sec, "sweep.n_arms", "n_arms")
                .map(|v| v.into_iter().map(|x| x as usize).collect()),
            effect_sizes: r.f64_axis(sec, "sweep.delta", "delta"),
            trajectories: if sec.contains_key("trajectories") {
                r.list::<TrajectoryMetricName>(sec, "sweep.trajectories", "trajectories")
                    .unwrap_or_default()
                    .into_iter()
                    .map(|m| m.0)
                    .collect()
            } else {
                Vec::new()
            },
        };
        for (name, empty) in [
            ("sweep.n_participants", axes.n_participants.as_ref().is_some_and(Vec::is_empty)),
            ("sweep.n_arms", axes.n_arms.as_ref().is_some_and(Vec::is_empty)),
            ("sweep.delta", axes.effect_sizes.as_ref().is_some_and(Vec::is_empty)),
        ] {
            if empty {
                r.err(name, "axis must not be empty");
            }
        }
        axes
    });

    let file = RunConfigFile {
        scenario,
        experiment,
        policies,
        execution,
        sweep,
    };
    if r.errors.is_empty() {
        validate_file(&file, &mut r.errors);
    }
    if r.errors.is_empty() {
        Ok(file)
    } else {
        Err(Error::Invalid(r.errors))
    }
}

/// Domain checks on the assembled config, including every sweep cell.
fn validate_file(file: &RunConfigFile, errors: &mut Vec<FieldError>) {
    let prefix = |section: &str, errs: Vec<FieldError>| {
        errs.into_iter()
            .map(|e| FieldError::new(format!("{section}.{}", e.field), e.message))
            .collect::<Vec<_>>()
    };
    errors.extend(prefix("scenario", file.scenario.violations()));
    errors.extend(prefix(
        "experiment",
        file.experiment.violations(file.scenario.n_arms),
    ));
    if file.sweep.is_some() {
        for cell in file.grid() {
            let label = format!(
                "sweep[N={}, K={}, delta={}]",
                cell.config.n_participants, cell.scenario.n_arms, cell.scenario.effect_size
            );
            let mut errs = cell.scenario.violations();
            errs.extend(cell.config.violations(cell.scenario.n_arms));
            for e in errs {
                let fe = FieldError::new(format!("{label}.{}", e.field), e.message);
                if !errors.contains(&fe) {
                    errors.push(fe);
                }
            }
        }
    }
}

struct TrajectoryMetricName(TrajectoryMetric);

impl FromStr for TrajectoryMetricName {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.trim() {
            "regret" => Ok(Self(TrajectoryMetric::Regret)),
            "lenient_regret" => Ok(Self(TrajectoryMetric::LenientRegret)),
            other => Err(format!(
                "unknown trajectory metric `{other}` (expected regret | lenient_regret)"
            )),
        }
    }
}

#[derive(Default)]
struct Reader {
    errors: Vec<FieldError>,
}

impl Reader {
    fn err(&mut self, field: impl Into<String>, message: impl Into<String>) {
        self.errors.push(FieldError::new(field, message));
    }

    fn has_field(&self, prefix: &str) -> bool {
        self.errors.iter().any(|e| e.field.starts_with(prefix))
    }

    fn section<'a>(
        &mut self,
        root: &'a Map<String, Value>,
        name: &str,
        required: bool,
    ) -> Option<&'a Map<String, Value>> {
        match root.get(name) {
            Some(Value::Object(obj)) => Some(obj),
            Some(_) => {
                self.err(name, "expected a section/table");
                None
            }
            None => {
                if required {
                    self.err(name, "missing section");
                }
                None
            }
        }
    }

    fn known_keys(&mut self, section: &str, sec: &Map<String, Value>, allowed: &[&str]) {
        for key in sec.keys() {
            if !allowed.contains(&key.as_str()) {
                self.err(format!("{section}.{key}"), "unknown key");
            }
        }
    }

    fn required_f64(&mut self, sec: &Map<String, Value>, field: &str, key: &str) -> Option<f64> {
        if !sec.contains_key(key) {
            self.err(field, "missing required key");
            return None;
        }
        self.opt_f64(sec, field, key)
    }

    fn required_uint(&mut self, sec: &Map<String, Value>, field: &str, key: &str) -> Option<u64> {
        if !sec.contains_key(key) {
            self.err(field, "missing required key");
            return None;
        }
        self.opt_uint(sec, field, key)
    }

    fn opt_f64(&mut self, sec: &Map<String, Value>, field: &str, key: &str) -> Option<f64> {
        let v = sec.get(key)?;
        match v.as_f64() {
            Some(x) => Some(x),
            None => {
                self.err(field, format!("expected a number, found {v}"));
                None
            }
        }
    }

    fn opt_uint(&mut self, sec: &Map<String, Value>, field: &str, key: &str) -> Option<u64> {
        let v = sec.get(key)?;
        match v.as_u64() {
            Some(x) => Some(x),
            None => {
                self.err(field, format!("expected a non-negative integer, found {v}"));
                None
            }
        }
    }

    fn opt_bool(&mut self, sec: &Map<String, Value>, field: &str, key: &str) -> Option<bool> {
        let v = sec.get(key)?;
        match v.as_bool() {
            Some(x) => Some(x),
            None => {
                self.err(field, format!("expected true or false, found {v}"));
                None
            }
        }
    }

    fn opt_string(&mut self, sec: &Map<String, Value>, field: &str, key: &str) -> Option<String> {
        let v = sec.get(key)?;
        match v.as_str() {
            Some(x) => Some(x.to_string()),
            None => {
                self.err(field, format!("expected a string, found {v}"));
                None
            }
        }
    }

    fn opt_parsed<T>(&mut self, sec: &Map<String, Value>, field: &str, key: &str) -> Option<T>
    where
        T: FromStr<Err = String>,
    {
        sec.get(key)?;
        self.parsed(sec, field, key)
    }

    fn parsed<T>(&mut self, sec: &Map<String, Value>, field: &str, key: &str) -> Option<T>
    where
        T: FromStr<Err = String>,
    {
        let Some(s) = self.opt_string(sec, field, key) else {
            if !sec.contains_key(key) {
                self.err(field, "missing required key");
            }
            return None;
        };
        match s.parse() {
            Ok(v) => Some(v),
            Err(msg) => {
                self.err(field, msg);
                None
            }
        }
    }

    fn array<'a>(&mut self, sec: &'a Map<String, Value>, field: &str, key: &str) -> Option<&'a Vec<Value>> {
        let v = sec.get(key)?;
        match v.as_array() {
            Some(a) => Some(a),
            None => {
                self.err(field, format!("expected a list, found {v}"));
                None
            }
        }
    }

    fn list<T>(&mut self, sec: &Map<String, Value>, field: &str, key: &str) -> Option<Vec<T>>
    where
        T: FromStr<Err = String>,
    {
        let items = self.array(sec, field, key)?;
        let mut out = Vec::with_capacity(items.len());
        for item in items {
            match item.as_str().map(str::parse::<T>) {
                Some(Ok(v)) => out.push(v),
                Some(Err(msg)) => self.err(field, msg),
                None => self.err(field, format!("expected a string, found {item}")),
            }
        }
        Some(out)
    }

    fn uint_axis(&mut self, sec: &Map<String, Value>, field: &str, key: &str) -> Option<Vec<u64>> {
        let items = self.array(sec, field, key)?;
        let mut out = Vec::with_capacity(items.len());
        for item in items {
            match item.as_u64() {
                Some(v) => out.push(v),
                None => self.err(field, format!("expected a non-negative integer, found {item}")),
            }
        }
        Some(out)
    }

    fn f64_axis(&mut self, sec: &Map<String, Value>, field: &str, key: &str) -> Option<Vec<f64>> {
        let items = self.array(sec, field, key)?;
        let mut out = Vec::with_capacity(items.len());
        for item in items {
            match item.as_f64() {
                Some(v) => out.push(v),
                None => self.err(field, format!("expected a number, found {item}")),
            }
        }
        Some(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn write(name: &str, body: &str) -> (tempfile::TempDir, PathBuf) {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join(name);
        std::fs::File::create(&path)
            .unwrap()
            .write_all(body.as_bytes())
            .unwrap();
        (dir, path)
    }

    const MINIMAL: &str = r#"
[scenario]
kind = "flexible"
n_arms = 10
theta_min = 0.5
delta = 0.2

[experiment]
n_participants = 239
"#;

    fn fields(err: Error) -> Vec<String> {
        match err {
            Error::Invalid(f) => f.into_iter().map(|e| e.field).collect(),
            other => panic!("expected validation error, got {other:?}"),
        }
    }

    #[test]
    fn minimal_file_gets_defaults() {
        let (_d, path) = write("run.toml", MINIMAL);
        let cfg = parse_config(&path).unwrap();
        assert_eq!(cfg.experiment.resolved_burn_in(cfg.scenario.n_arms), 10);
        assert_eq!(cfg.experiment.burn_in, None);
        assert_eq!(cfg.experiment.eta, 0.5);
        assert_eq!(cfg.experiment.tau, 0.5);
        assert_eq!(cfg.experiment.fdr_q, 0.05);
        assert_eq!(cfg.experiment.min_pull_diagnostic, 5);
        assert_eq!(cfg.policies, Policy::ALL);
        assert_eq!(cfg.execution, ExecutionBlock::default());
        assert!(cfg.sweep.is_none());
    }

    #[test]
    fn gap_overflow_names_both_fields() {
        let body = MINIMAL.replace("theta_min = 0.5", "theta_min = 0.9");
        let (_d, path) = write("run.toml", &body);
        let f = fields(parse_config(&path).unwrap_err());
        assert_eq!(f, ["scenario.theta_min + delta"]);
    }

    #[test]
    fn reset_key_is_rejected() {
        let body = format!("{MINIMAL}reset = 50\n");
        let (_d, path) = write("run.toml", &body);
        let err = parse_config(&path).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("experiment.reset"), "{msg}");
        assert!(msg.contains("unimplemented"), "{msg}");
    }

    #[test]
    fn reports_every_error() {
        let body = r#"
[scenario]
kind = "sideways"
n_arms = 1
theta_min = 0.5
delta = 0.2

[experiment]
n_participants = 10
policies = ["ts", "ucb"]
tau = 0.0
colour = "blue"
"#;
        let (_d, path) = write("run.toml", body);
        let f = fields(parse_config(&path).unwrap_err());
        assert!(f.contains(&"scenario.kind".to_string()));
        assert!(f.contains(&"experiment.policies".to_string()));
        assert!(f.contains(&"experiment.colour".to_string()));
    }

    #[test]
    fn domain_errors_collected_together() {
        let body = r#"
[scenario]
kind = "fixed"
n_arms = 1
theta_min = 0.5
delta = 0.7

[experiment]
n_participants = 10
tau = 1.5
q = 0.0
"#;
        let (_d, path) = write("run.toml", body);
        let f = fields(parse_config(&path).unwrap_err());
        assert_eq!(
            f,
            [
                "scenario.n_arms",
                "scenario.theta_min + delta",
                "experiment.tau",
                "experiment.q"
            ]
        );
    }

    #[test]
    fn parse_error_has_line_number() {
        let (_d, path) = write("run.toml", "[scenario]\nkind = \"fixed\"\nn_arms = = 3\n");
        match parse_config(&path).unwrap_err() {
            Error::Parse { message, .. } => assert!(message.contains("line 3"), "{message}"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn missing_file_is_io() {
        let err = parse_config(Path::new("/nonexistent/run.toml")).unwrap_err();
        assert_eq!(err.exit_code(), 2);
    }

    #[test]
    fn json_alternative() {
        let body = r#"{
  "scenario": {"kind": "fixed", "n_arms": 2, "theta_min": 0.5, "delta": 0.1},
  "experiment": {"n_participants": 50, "policies": ["wapts", "ts"], "burn_in": 4},
  "execution": {"seed_count": 3, "formats": "csv", "emit_traces": true}
}"#;
        let (_d, path) = write("run.json", body);
        let cfg = parse_config(&path).unwrap();
        assert_eq!(cfg.scenario.kind, ScenarioKind::FixedGap);
        assert_eq!(cfg.policies, [Policy::Wapts, Policy::Ts]);
        assert_eq!(cfg.experiment.burn_in, Some(4));
        assert_eq!(cfg.execution.formats, Formats { csv: true, json: false });
        assert!(cfg.execution.emit_traces);
    }

    #[test]
    fn sweep_grid_and_empty_axis() {
        let body = format!("{MINIMAL}\n[sweep]\nn_participants = [30, 100]\nn_arms = [2, 3, 4]\n");
        let (_d, path) = write("run.toml", &body);
        let cfg = parse_config(&path).unwrap();
        let grid = cfg.grid();
        assert_eq!(grid.len(), 6);
        assert_eq!(grid[0].config.n_participants, 30);
        assert_eq!(grid[0].scenario.n_arms, 2);
        assert_eq!(grid[5].config.n_participants, 100);
        assert_eq!(grid[5].scenario.n_arms, 4);

        let body = format!("{MINIMAL}\n[sweep]\ndelta = []\n");
        let (_d, path) = write("run.toml", &body);
        assert_eq!(fields(parse_config(&path).unwrap_err()), ["sweep.delta"]);
    }
}
