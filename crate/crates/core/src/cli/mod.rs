//! Scenario files, experiment dispatch and the verification suite behind the
//! `metaplectic` binary.
//!
//! Exit codes: 0 success, 2 input or schema error, 3 numerical guard
//! violation or failed oracle check.

pub mod output;
pub mod suite;

use std::path::{Path, PathBuf};

use num_complex::Complex64 as C64;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::coherent_states::{marker_scan, DEFAULT_SCAN};
use crate::error::Error;
use crate::measurement::{
    self, amplitude_ratios, recover_lambda, resolvability_check, uniform_magnitude, MeasurementScenario,
};

use output::{complex_cells, pairs, Cell, Pair, Table};
use suite::{all_pass, rows_to_table, run_suite, CheckRow, SuiteConfig};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("input error: {0}")]
    Input(String),
    #[error("numerical guard: {0}")]
    Numerical(String),
    #[error("{0} oracle check(s) failed")]
    ChecksFailed(usize),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => 2,
            CliError::Numerical(_) | CliError::ChecksFailed(_) => 3,
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        if e.is_numerical() {
            CliError::Numerical(e.to_string())
        } else {
            CliError::Input(e.to_string())
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize, Serialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    Orbit,
    OverlapDecay,
    MarkerScan,
    Measure,
    Recover,
    OracleCheck,
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    pub path: Option<PathBuf>,
    pub format: Option<Format>,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawScenario {
    experiment: ExperimentKind,
    #[serde(default)]
    parameters: Option<serde_json::Value>,
    #[serde(default)]
    output: Option<OutputSpec>,
    #[serde(default)]
    seed: Option<u64>,
}

type Amplitudes = Vec<[f64; 2]>;

fn complex(values: &[[f64; 2]]) -> Vec<C64> {
    values.iter().map(|&[re, im]| C64::new(re, im)).collect()
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OrbitParams {
    pub object: Amplitudes,
    #[serde(default)]
    pub device: Option<Amplitudes>,
    pub couplings: Amplitudes,
    pub times: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OverlapDecayParams {
    pub object_a: Amplitudes,
    pub object_b: Amplitudes,
    pub couplings: Amplitudes,
    pub times: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MarkerScanParams {
    #[serde(default = "default_norm_min")]
    pub norm_min: f64,
    #[serde(default = "default_norm_max")]
    pub norm_max: f64,
    #[serde(default = "default_step")]
    pub step: f64,
}

fn default_norm_min() -> f64 {
    DEFAULT_SCAN.0
}

fn default_norm_max() -> f64 {
    DEFAULT_SCAN.1
}

fn default_step() -> f64 {
    DEFAULT_SCAN.2
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeasureParams {
    pub object: Amplitudes,
    #[serde(default)]
    pub device: Option<Amplitudes>,
    pub couplings: Amplitudes,
    pub time: f64,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RecoverParams {
    pub pointer: Amplitudes,
    pub couplings: Amplitudes,
    pub time: f64,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OracleCheckParams {
    #[serde(default = "default_single_cutoff")]
    pub single_mode_cutoff: usize,
    #[serde(default = "default_two_mode_cutoff")]
    pub two_mode_cutoff: usize,
}

fn default_single_cutoff() -> usize {
    suite::SINGLE_MODE_CUTOFF
}

fn default_two_mode_cutoff() -> usize {
    suite::TWO_MODE_CUTOFF
}

#[derive(Debug, Clone, PartialEq)]
pub enum Experiment {
    Orbit(OrbitParams),
    OverlapDecay(OverlapDecayParams),
    MarkerScan(MarkerScanParams),
    Measure(MeasureParams),
    Recover(RecoverParams),
    OracleCheck(OracleCheckParams),
}

/// A schema-validated scenario file.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioFile {
    pub experiment: Experiment,
    pub output: OutputSpec,
    pub seed: Option<u64>,
}

fn params<T: DeserializeOwned>(value: Option<serde_json::Value>) -> CliResult<T> {
    let value = value.unwrap_or_else(|| serde_json::Value::Object(Default::default()));
    serde_json::from_value(value).map_err(|e| CliError::Input(format!("parameters: {e}")))
}

fn require(cond: bool, msg: &str) -> CliResult<()> {
    if cond {
        Ok(())
    } else {
        Err(CliError::Input(msg.to_string()))
    }
}

fn check_times(times: &[f64]) -> CliResult<()> {
    require(!times.is_empty(), "times must not be empty")?;
    require(times.iter().all(|t| t.is_finite() && *t >= 0.0), "times must be finite and non-negative")
}

fn check_lengths(n: usize, lists: &[(&str, usize)]) -> CliResult<()> {
    require(n > 0, "amplitude lists must not be empty")?;
    for (name, len) in lists {
        if *len != n {
            return Err(CliError::Input(format!("{name} has {len} entries, expected {n}")));
        }
    }
    Ok(())
}

impl ScenarioFile {
    pub fn from_json(text: &str) -> CliResult<Self> {
        let raw: RawScenario = serde_json::from_str(text).map_err(|e| CliError::Input(format!("scenario: {e}")))?;
        let experiment = match raw.experiment {
            ExperimentKind::Orbit => {
                let p: OrbitParams = params(raw.parameters)?;
                check_lengths(p.object.len(), &[("couplings", p.couplings.len())])?;
                if let Some(d) = &p.device {
                    check_lengths(p.object.len(), &[("device", d.len())])?;
                }
                check_times(&p.times)?;
                Experiment::Orbit(p)
            }
            ExperimentKind::OverlapDecay => {
                let p: OverlapDecayParams = params(raw.parameters)?;
                check_lengths(p.object_a.len(), &[("object_b", p.object_b.len()), ("couplings", p.couplings.len())])?;
                check_times(&p.times)?;
                Experiment::OverlapDecay(p)
            }
            ExperimentKind::MarkerScan => Experiment::MarkerScan(params(raw.parameters)?),
            ExperimentKind::Measure => {
                let p: MeasureParams = params(raw.parameters)?;
                check_lengths(p.object.len(), &[("couplings", p.couplings.len())])?;
                if let Some(d) = &p.device {
                    check_lengths(p.object.len(), &[("device", d.len())])?;
                }
                Experiment::Measure(p)
            }
            ExperimentKind::Recover => {
                let p: RecoverParams = params(raw.parameters)?;
                check_lengths(p.pointer.len(), &[("couplings", p.couplings.len())])?;
                Experiment::Recover(p)
            }
            ExperimentKind::OracleCheck => Experiment::OracleCheck(params(raw.parameters)?),
        };
        Ok(Self { experiment, output: raw.output.unwrap_or_default(), seed: raw.seed })
    }

    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Input(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }
}

/// Result of an experiment in both output formats.
#[derive(Debug, Clone, PartialEq)]
pub struct Artifact {
    pub table: Table,
    pub json: String,
    /// Failing oracle rows, if any.
    pub failures: usize,
}

impl Artifact {
    fn new<T: Serialize>(table: Table, body: &T) -> Self {
        let mut json = serde_json::to_string_pretty(body).expect("artifact serializes");
        json.push('\n');
        Self { table, json, failures: 0 }
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Csv => self.table.to_csv(),
            Format::Json => self.json.clone(),
        }
    }

    /// `Ok` when every oracle row passed.
    pub fn status(&self) -> CliResult<()> {
        if self.failures == 0 {
            Ok(())
        } else {
            Err(CliError::ChecksFailed(self.failures))
        }
    }
}

#[derive(Serialize)]
struct OrbitRow {
    t: f64,
    lambda: Vec<Pair>,
    mu: Vec<Pair>,
    norm_sq: f64,
}

fn orbit(p: &OrbitParams) -> CliResult<Artifact> {
    let object = complex(&p.object);
    let device = p.device.as_deref().map(complex).unwrap_or_else(|| vec![C64::new(0.0, 0.0); object.len()]);
    let couplings = complex(&p.couplings);
    let n = object.len();

    let mut columns = vec!["t".to_string()];
    for name in ["lambda", "mu"] {
        for j in 0..n {
            columns.push(format!("{name}_{j}_re"));
            columns.push(format!("{name}_{j}_im"));
        }
    }
    columns.push("norm_sq".into());
    let mut table = Table::new(columns);
    let mut rows = Vec::with_capacity(p.times.len());
    for &t in &p.times {
        let r = measurement::run(&MeasurementScenario::new(object.clone(), device.clone(), couplings.clone(), t)?);
        let mut cells = vec![Cell::Num(t)];
        cells.extend(r.lambda_t.iter().chain(&r.mu_t).flat_map(|&z| complex_cells(z)));
        cells.push(Cell::Num(r.norm_sq));
        table.push(cells);
        rows.push(OrbitRow { t, lambda: pairs(&r.lambda_t), mu: pairs(&r.mu_t), norm_sq: r.norm_sq });
    }
    Ok(Artifact::new(table, &serde_json::json!({ "experiment": "orbit", "rows": rows })))
}

#[derive(Serialize)]
struct DecayRow {
    t: f64,
    resolvability: f64,
    from_orbits: f64,
}

fn overlap_decay(p: &OverlapDecayParams) -> CliResult<Artifact> {
    let (a, b, couplings) = (complex(&p.object_a), complex(&p.object_b), complex(&p.couplings));
    let mut table = Table::new(["t", "resolvability", "from_orbits"]);
    let mut rows = Vec::with_capacity(p.times.len());
    for &t in &p.times {
        let r = resolvability_check(&a, &b, &couplings, t)?;
        table.push(vec![Cell::Num(t), Cell::Num(r.closed_form), Cell::Num(r.from_orbits)]);
        rows.push(DecayRow { t, resolvability: r.closed_form, from_orbits: r.from_orbits });
    }
    Ok(Artifact::new(table, &serde_json::json!({ "experiment": "overlap-decay", "rows": rows })))
}

fn marker(p: &MarkerScanParams) -> CliResult<Artifact> {
    let scan = marker_scan(p.norm_min, p.norm_max, p.step)?;
    let mut table = Table::new(["kind", "norm", "marker"]);
    for &(r, m) in &scan.curve {
        table.push(vec![Cell::Text("curve".into()), Cell::Num(r), Cell::Num(m)]);
    }
    table.push(vec![Cell::Text("argmax".into()), Cell::Num(scan.argmax_norm), Cell::Num(scan.max_marker)]);
    let (norms, markers): (Vec<f64>, Vec<f64>) = scan.curve.iter().copied().unzip();
    let body = serde_json::json!({
        "experiment": "marker-scan",
        "norm": norms,
        "marker": markers,
        "argmax_norm": scan.argmax_norm,
        "max_marker": scan.max_marker,
    });
    Ok(Artifact::new(table, &body))
}

#[derive(Serialize)]
struct MeasureRow {
    pair: usize,
    lambda_t: Pair,
    mu_t: Pair,
    amplitude_ratio: Option<f64>,
}

fn measure(p: &MeasureParams) -> CliResult<Artifact> {
    let object = complex(&p.object);
    let couplings = complex(&p.couplings);
    let scenario = match &p.device {
        Some(d) => MeasurementScenario::new(object, complex(d), couplings.clone(), p.time)?,
        None => MeasurementScenario::ready(object, couplings.clone(), p.time)?,
    };
    let record = measurement::run(&scenario);
    // Pointer ratios only track object ratios under a shared coupling magnitude.
    let ratios = match uniform_magnitude(&couplings, 1e-12) {
        Some(_) => amplitude_ratios(&record.mu_t, 0).ok(),
        None => None,
    };
    let mut table = Table::new(["pair", "lambda_t_re", "lambda_t_im", "mu_t_re", "mu_t_im", "amplitude_ratio"]);
    let mut rows = Vec::new();
    for j in 0..scenario.pairs() {
        let ratio = ratios.as_ref().map(|r| r[j]);
        let mut cells = vec![Cell::Int(j)];
        cells.extend(complex_cells(record.lambda_t[j]));
        cells.extend(complex_cells(record.mu_t[j]));
        cells.push(ratio.map_or(Cell::Empty, Cell::Num));
        table.push(cells);
        rows.push(MeasureRow {
            pair: j,
            lambda_t: Pair(record.lambda_t[j]),
            mu_t: Pair(record.mu_t[j]),
            amplitude_ratio: ratio,
        });
    }
    let body = serde_json::json!({
        "experiment": "measure",
        "time": p.time,
        "norm_sq": record.norm_sq,
        "rows": rows,
    });
    Ok(Artifact::new(table, &body))
}

fn recover(p: &RecoverParams) -> CliResult<Artifact> {
    let lambda = recover_lambda(&complex(&p.pointer), &complex(&p.couplings), p.time)?;
    let mut table = Table::new(["pair", "lambda_re", "lambda_im"]);
    for (j, &z) in lambda.iter().enumerate() {
        let mut cells = vec![Cell::Int(j)];
        cells.extend(complex_cells(z));
        table.push(cells);
    }
    let body = serde_json::json!({ "experiment": "recover", "lambda": pairs(&lambda) });
    Ok(Artifact::new(table, &body))
}

fn checks_artifact(rows: Vec<CheckRow>) -> Artifact {
    let failures = rows.iter().filter(|r| !r.pass).count();
    let body = serde_json::json!({ "experiment": "oracle-check", "all_pass": all_pass(&rows), "checks": rows });
    Artifact { failures, ..Artifact::new(rows_to_table(&rows), &body) }
}

/// Runs the oracle suite. Cutoffs beyond the dimension limit are input errors.
pub fn verify_all(config: &SuiteConfig) -> CliResult<Artifact> {
    config.validate()?;
    Ok(checks_artifact(run_suite(config)?))
}

pub fn run_experiment(file: &ScenarioFile) -> CliResult<Artifact> {
    match &file.experiment {
        Experiment::Orbit(p) => orbit(p),
        Experiment::OverlapDecay(p) => overlap_decay(p),
        Experiment::MarkerScan(p) => marker(p),
        Experiment::Measure(p) => measure(p),
        Experiment::Recover(p) => recover(p),
        Experiment::OracleCheck(p) => verify_all(&SuiteConfig {
            single_mode_cutoff: p.single_mode_cutoff,
            two_mode_cutoff: p.two_mode_cutoff,
            seed: file.seed,
        }),
    }
}

/// Writes to `path`, or stdout when `None`.
pub fn emit(text: &str, path: Option<&Path>) -> CliResult<()> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(|e| CliError::Input(format!("cannot write {}: {e}", p.display()))),
        None => {
            use std::io::Write;
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes()).map_err(|e| CliError::Input(format!("stdout: {e}")))
        }
    }
}
