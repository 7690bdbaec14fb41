//! `subgraph-sentinel`: sample graphs, evaluate statistics, calibrate tests,
//! estimate risk, sweep parameter grids and classify regimes.
//!
//! Every subcommand accepts `--config FILE`, a JSON object whose keys are the
//! subcommand's flag names (`N` for `--N`, underscores for dashes). Flags given
//! on the command line win over the file. The resolved configuration is written
//! to `<out>.run.json` when the command has an output file, otherwise to stderr.
//!
//! Exit codes: 0 success, 2 configuration error, 3 I/O error, 4 detector or
//! domain error, 5 budget exceeded.

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::parser::ValueSource;
use clap::{ArgMatches, Args, CommandFactory, FromArgMatches, Parser, Subcommand, ValueEnum};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use subgraph_sentinel::detectors::{DensestMode, ScanMode};
use subgraph_sentinel::graph::{read_graph, write_graph};
use subgraph_sentinel::harness::{
    bootstrap_calibrate, calibrate, calibrate_analytic, classify_regime_with, phase_sweep, rows_to_csv, CalibrationMethod,
    Knowledge, RegimeOptions, SweepConfig, SweepGrid, SweepModel, SweepOptions, SweepRow,
};
use subgraph_sentinel::models::{sample_with, Placement};
use subgraph_sentinel::{Detector, Error, ModelSpec, SeededStream};

#[derive(Parser)]
#[command(name = "subgraph-sentinel", version, about = "Detect planted dense subgraphs in random graphs")]
struct Cli {
    /// Worker threads [default: available parallelism]
    #[arg(long, global = true, env = "SUBGRAPH_SENTINEL_WORKERS", hide_env_values = true)]
    workers: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Draw one graph from a null or planted model
    Sample(SampleArgs),
    /// Evaluate one statistic on a graph file
    Stat(StatArgs),
    /// Compute a rejection threshold for one statistic
    Calibrate(CalibrateArgs),
    /// Estimate type-I, type-II and total risk for one parameter cell
    Risk(RiskArgs),
    /// Estimate risk over a parameter grid, with checkpoints
    Phase(PhaseArgs),
    /// Evaluate the detection-boundary conditions at one parameter point
    Classify(ClassifyArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[value(rename_all = "snake_case")]
#[serde(rename_all = "snake_case")]
enum ModelKind {
    Null,
    Planted,
    FixedDegree,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[value(rename_all = "snake_case")]
#[serde(rename_all = "snake_case")]
enum PlacementKind {
    Prefix,
    Uniform,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[value(rename_all = "snake_case")]
#[serde(rename_all = "snake_case")]
enum DetectorKind {
    TotalDegree,
    MaxDegree,
    DegreeVariance,
    Scan,
    Glr,
    CliqueNumber,
    DensestSubgraph,
    DensestAtLeast,
    RelaxedScan,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[value(rename_all = "snake_case")]
#[serde(rename_all = "snake_case")]
enum ModeKind {
    Exact,
    BranchBound,
    Greedy,
    ExactFlow,
    Peel,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[value(rename_all = "snake_case")]
#[serde(rename_all = "snake_case")]
enum MethodKind {
    MonteCarlo,
    Analytic,
    Bootstrap,
}

impl MethodKind {
    fn method(self) -> CalibrationMethod {
        match self {
            MethodKind::MonteCarlo => CalibrationMethod::MonteCarloKnownP0,
            MethodKind::Analytic => CalibrationMethod::AnalyticBinomial,
            MethodKind::Bootstrap => CalibrationMethod::ParametricBootstrap,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[value(rename_all = "snake_case")]
#[serde(rename_all = "snake_case")]
enum AltModel {
    Known,
    FixedDegree,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[value(rename_all = "snake_case")]
#[serde(rename_all = "snake_case")]
enum KnowledgeKind {
    Known,
    Unknown,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[value(rename_all = "snake_case")]
#[serde(rename_all = "snake_case")]
enum Format {
    Csv,
    Json,
}

#[derive(Args, Serialize, Deserialize)]
struct SampleArgs {
    /// JSON file supplying values for any of the flags below
    #[arg(long)]
    #[serde(skip)]
    config: Option<PathBuf>,
    /// Graph distribution
    #[arg(long, value_enum, default_value_t = ModelKind::Null)]
    model: ModelKind,
    /// Number of nodes
    #[arg(id = "N", long = "N")]
    #[serde(rename = "N")]
    num_nodes: Option<usize>,
    /// Planted community size
    #[arg(long)]
    n: Option<usize>,
    /// Background edge probability (p0' for the fixed_degree model)
    #[arg(long)]
    p0: Option<f64>,
    /// Edge probability inside the community
    #[arg(long)]
    p1: Option<f64>,
    /// Master seed
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Stream index under the master seed
    #[arg(long, default_value_t = 0)]
    stream: u64,
    /// Community placement: the first n nodes, or a uniformly random subset
    #[arg(long, value_enum, default_value_t = PlacementKind::Prefix)]
    placement: PlacementKind,
    /// Output edge-list file; planted models also write <out>.planted
    #[arg(long, default_value = "graph.txt")]
    out: PathBuf,
}

#[derive(Args, Serialize, Deserialize)]
struct StatArgs {
    /// JSON file supplying values for any of the flags below
    #[arg(long)]
    #[serde(skip)]
    config: Option<PathBuf>,
    /// Edge-list file
    #[arg(long)]
    graph: Option<PathBuf>,
    /// Statistic to evaluate
    #[arg(long, value_enum)]
    detector: Option<DetectorKind>,
    /// Subset size for scan, glr, densest_at_least and relaxed_scan
    #[arg(long)]
    n: Option<usize>,
    /// Search mode [default: branch_bound for scan, exact_flow for densest_subgraph]
    #[arg(long, value_enum)]
    mode: Option<ModeKind>,
}

#[derive(Args, Serialize, Deserialize)]
struct CalibrateArgs {
    /// JSON file supplying values for any of the flags below
    #[arg(long)]
    #[serde(skip)]
    config: Option<PathBuf>,
    /// Statistic to calibrate
    #[arg(long, value_enum)]
    detector: Option<DetectorKind>,
    /// Subset size for scan, glr, densest_at_least and relaxed_scan
    #[arg(long)]
    n: Option<usize>,
    /// Search mode [default: branch_bound for scan, exact_flow for densest_subgraph]
    #[arg(long, value_enum)]
    mode: Option<ModeKind>,
    /// Number of nodes of the null model (ignored by bootstrap)
    #[arg(id = "N", long = "N")]
    #[serde(rename = "N")]
    num_nodes: Option<usize>,
    /// Null edge probability (ignored by bootstrap)
    #[arg(long)]
    p0: Option<f64>,
    /// Observed graph, required by bootstrap
    #[arg(long)]
    graph: Option<PathBuf>,
    /// Calibration method
    #[arg(long, value_enum, default_value_t = MethodKind::MonteCarlo)]
    method: MethodKind,
    /// Test level
    #[arg(long, default_value_t = 0.05)]
    alpha: f64,
    /// Null replicates
    #[arg(long, default_value_t = 999)]
    replicates: usize,
    /// Master seed
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output JSON file [default: standard output]
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Serialize, Deserialize)]
struct RiskArgs {
    /// JSON file supplying values for any of the flags below
    #[arg(long)]
    #[serde(skip)]
    config: Option<PathBuf>,
    /// Alternative family
    #[arg(long, value_enum, default_value_t = AltModel::Known)]
    model: AltModel,
    /// Number of nodes
    #[arg(id = "N", long = "N")]
    #[serde(rename = "N")]
    num_nodes: Option<usize>,
    /// Planted community size
    #[arg(long)]
    n: Option<usize>,
    /// Background edge probability (p0' for the fixed_degree model)
    #[arg(long)]
    p0: Option<f64>,
    /// Edge probability inside the community
    #[arg(long)]
    p1: Option<f64>,
    /// Statistic to test with
    #[arg(long, value_enum)]
    detector: Option<DetectorKind>,
    /// Subset size used by the statistic [default: the community size]
    #[arg(long)]
    detector_n: Option<usize>,
    /// Search mode [default: branch_bound for scan, exact_flow for densest_subgraph]
    #[arg(long, value_enum)]
    mode: Option<ModeKind>,
    /// Threshold calibration method
    #[arg(long, value_enum, default_value_t = MethodKind::MonteCarlo)]
    calibration: MethodKind,
    /// Test level
    #[arg(long, default_value_t = 0.05)]
    alpha: f64,
    /// Replicates per hypothesis
    #[arg(long, default_value_t = 200)]
    replicates: usize,
    /// Null replicates for the threshold
    #[arg(long, default_value_t = 199)]
    calibration_replicates: usize,
    /// Master seed
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output format
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Output file [default: standard output]
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct PhaseArgs {
    /// Sweep definition (grid, model, detectors, alpha, replicates, calibration_replicates, calibration, seed)
    #[arg(long)]
    config: PathBuf,
    /// Checkpoint directory; completed rows found there are reused
    #[arg(long)]
    resume: Option<PathBuf>,
    /// Overrides the sweep seed
    #[arg(long)]
    seed: Option<u64>,
    /// Overrides the sweep level
    #[arg(long)]
    alpha: Option<f64>,
    /// Overrides the replicates per hypothesis
    #[arg(long)]
    replicates: Option<usize>,
    /// Overrides the null replicates for thresholds
    #[arg(long)]
    calibration_replicates: Option<usize>,
    /// Stop after computing this many new rows
    #[arg(long)]
    stop_after: Option<usize>,
    /// Fill the seconds column with wall-clock times
    #[arg(long)]
    record_timing: bool,
    /// Output format
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Output file [default: standard output]
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Serialize, Deserialize)]
struct ClassifyArgs {
    /// JSON file supplying values for any of the flags below
    #[arg(long)]
    #[serde(skip)]
    config: Option<PathBuf>,
    /// Number of nodes
    #[arg(id = "N", long = "N")]
    #[serde(rename = "N")]
    num_nodes: Option<usize>,
    /// Community size
    #[arg(long)]
    n: Option<usize>,
    /// Background edge probability (p0' when p0 is unknown)
    #[arg(long)]
    p0: Option<f64>,
    /// Edge probability inside the community
    #[arg(long)]
    p1: Option<f64>,
    /// Whether p0 is known
    #[arg(long, value_enum, default_value_t = KnowledgeKind::Known)]
    knowledge: KnowledgeKind,
    /// Also report the quasi-normal and large-n side conditions
    #[arg(long)]
    constraints: bool,
    /// Largest quasi-normal ratio still treated as quasi-normal
    #[arg(long, default_value_t = 0.5)]
    quasi_normal_max: f64,
    /// Smallest n / log N treated as large
    #[arg(long, default_value_t = 1.0)]
    n_log_min: f64,
}

#[derive(Debug)]
struct Failure {
    code: u8,
    name: String,
    message: String,
}

fn exit_code(name: &str) -> u8 {
    match name {
        "IoError" | "ParseError" => 3,
        "InvalidSpec" | "InvalidSpecPair" | "MismatchedNullSpec" | "InsufficientReplicates" | "ConfigError" => 2,
        "BudgetExceeded" | "TimeBudgetExceeded" => 5,
        _ => 4,
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure { code: exit_code(e.name()), name: e.name().to_string(), message: e.to_string() }
    }
}

fn config_error(message: impl Into<String>) -> Failure {
    Failure { code: 2, name: "ConfigError".into(), message: message.into() }
}

fn io_error(path: &Path, e: std::io::Error) -> Failure {
    Failure { code: 3, name: "IoError".into(), message: format!("{}: {e}", path.display()) }
}

type CliResult<T = ()> = Result<T, Failure>;

fn main() -> ExitCode {
    let matches = Cli::command().get_matches();
    let cli = Cli::from_arg_matches(&matches).unwrap_or_else(|e| e.exit());
    let sub = matches.subcommand().map(|(_, m)| m).expect("subcommand is required");
    match run(cli, sub) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}: {}", f.name, f.message);
            ExitCode::from(f.code)
        }
    }
}

fn run(cli: Cli, sub: &ArgMatches) -> CliResult {
    if let Some(k) = cli.workers {
        if k == 0 {
            return Err(config_error("--workers must be positive"));
        }
        rayon::ThreadPoolBuilder::new().num_threads(k).build_global().map_err(|e| config_error(e.to_string()))?;
    }
    match cli.command {
        Command::Sample(a) => {
            let path = a.config.clone();
            cmd_sample(resolve(a, path.as_deref(), sub)?)
        }
        Command::Stat(a) => {
            let path = a.config.clone();
            cmd_stat(resolve(a, path.as_deref(), sub)?)
        }
        Command::Calibrate(a) => {
            let path = a.config.clone();
            cmd_calibrate(resolve(a, path.as_deref(), sub)?)
        }
        Command::Risk(a) => {
            let path = a.config.clone();
            cmd_risk(resolve(a, path.as_deref(), sub)?)
        }
        Command::Phase(a) => cmd_phase(a),
        Command::Classify(a) => {
            let path = a.config.clone();
            cmd_classify(resolve(a, path.as_deref(), sub)?)
        }
    }
}

fn read_json_object(path: &Path) -> CliResult<Map<String, Value>> {
    let text = fs::read_to_string(path).map_err(|e| io_error(path, e))?;
    match serde_json::from_str(&text) {
        Ok(Value::Object(m)) => Ok(m),
        Ok(_) => Err(config_error(format!("{}: expected a JSON object", path.display()))),
        Err(e) => Err(config_error(format!("{}: {e}", path.display()))),
    }
}

/// Fill every flag not given on the command line from the config file.
fn resolve<T: Serialize + DeserializeOwned>(args: T, config: Option<&Path>, matches: &ArgMatches) -> CliResult<T> {
    let Some(path) = config else {
        return Ok(args);
    };
    let file = read_json_object(path)?;
    let Value::Object(mut merged) = serde_json::to_value(&args).expect("arguments serialize") else {
        unreachable!("argument structs serialize to objects");
    };
    for (key, value) in file {
        if !merged.contains_key(&key) {
            return Err(config_error(format!("{}: unknown key {key:?}", path.display())));
        }
        if matches.value_source(&key) != Some(ValueSource::CommandLine) {
            merged.insert(key, value);
        }
    }
    serde_json::from_value(Value::Object(merged)).map_err(|e| config_error(format!("{}: {e}", path.display())))
}

fn with_suffix(path: &Path, suffix: &str) -> PathBuf {
    let mut s = OsString::from(path.as_os_str());
    s.push(suffix);
    PathBuf::from(s)
}

fn write_file(path: &Path, contents: &str) -> CliResult {
    fs::write(path, contents).map_err(|e| io_error(path, e))
}

/// The resolved configuration goes next to the output, or to stderr.
fn log_config<T: Serialize>(resolved: &T, out: Option<&Path>) -> CliResult {
    let text = serde_json::to_string_pretty(resolved).expect("configuration serializes");
    match out {
        Some(p) => write_file(&with_suffix(p, ".run.json"), &(text + "\n")),
        None => {
            eprintln!("resolved config: {}", serde_json::to_string(resolved).expect("configuration serializes"));
            Ok(())
        }
    }
}

fn require<T: Copy>(v: Option<T>, flag: &str) -> CliResult<T> {
    v.ok_or_else(|| config_error(format!("missing {flag}")))
}

fn build_detector(kind: DetectorKind, n: Option<usize>, mode: Option<ModeKind>) -> CliResult<Detector> {
    let need_n = |flag: &str| require(n, flag);
    let d = match kind {
        DetectorKind::TotalDegree => Detector::TotalDegree,
        DetectorKind::MaxDegree => Detector::MaxDegree,
        DetectorKind::DegreeVariance => Detector::DegreeVariance,
        DetectorKind::CliqueNumber => Detector::CliqueNumber,
        DetectorKind::Scan => {
            let mode = match mode {
                None | Some(ModeKind::BranchBound) => ScanMode::BranchBound,
                Some(ModeKind::Exact) => ScanMode::Exact,
                Some(ModeKind::Greedy) => ScanMode::Greedy,
                Some(m) => return Err(config_error(format!("mode {m:?} does not apply to scan"))),
            };
            Detector::Scan { n: need_n("--n for scan")?, mode }
        }
        DetectorKind::DensestSubgraph => {
            let mode = match mode {
                None | Some(ModeKind::ExactFlow) => DensestMode::ExactFlow,
                Some(ModeKind::Peel) => DensestMode::Peel,
                Some(m) => return Err(config_error(format!("mode {m:?} does not apply to densest_subgraph"))),
            };
            Detector::DensestSubgraph { mode }
        }
        DetectorKind::Glr => Detector::Glr { n: need_n("--n for glr")? },
        DetectorKind::DensestAtLeast => Detector::DensestAtLeast { n: need_n("--n for densest_at_least")? },
        DetectorKind::RelaxedScan => Detector::RelaxedScan { n: need_n("--n for relaxed_scan")? },
    };
    if mode.is_some() && !matches!(kind, DetectorKind::Scan | DetectorKind::DensestSubgraph) {
        return Err(config_error(format!("--mode does not apply to {}", d.label())));
    }
    Ok(d)
}

fn cmd_sample(a: SampleArgs) -> CliResult {
    let num_nodes = require(a.num_nodes, "--N")?;
    let p0 = require(a.p0, "--p0")?;
    let spec = match a.model {
        ModelKind::Null => ModelSpec::null(num_nodes, p0),
        ModelKind::Planted => ModelSpec::planted(num_nodes, require(a.n, "--n")?, p0, require(a.p1, "--p1")?),
        ModelKind::FixedDegree => ModelSpec::fixed_degree(num_nodes, require(a.n, "--n")?, p0, require(a.p1, "--p1")?),
    };
    spec.validate()?;
    let placement = match a.placement {
        PlacementKind::Prefix => Placement::Spec,
        PlacementKind::Uniform => Placement::UniformRandom,
    };
    let s = sample_with(&spec, SeededStream::new(a.seed, a.stream), placement)?;
    write_graph(&s.graph, &a.out).map_err(|e| match e {
        Error::Io(io) => io_error(&a.out, io),
        other => other.into(),
    })?;
    let sidecar = with_suffix(&a.out, ".planted");
    if let Some(set) = &s.planted {
        let text: String = set.iter().map(|v| format!("{v}\n")).collect();
        write_file(&sidecar, &text)?;
    }
    log_config(&a, Some(&a.out))?;
    let summary = serde_json::json!({
        "graph": a.out.display().to_string(),
        "planted": s.planted.as_ref().map(|_| sidecar.display().to_string()),
        "N": s.graph.num_nodes(),
        "M": s.graph.total_edges(),
    });
    println!("{summary}");
    Ok(())
}

fn load_graph(path: &Path) -> CliResult<subgraph_sentinel::Graph> {
    match read_graph(path) {
        Ok(p) => Ok(p.graph),
        Err(Error::Io(e)) => Err(io_error(path, e)),
        Err(e) => {
            let f = Failure::from(e);
            Err(Failure { message: format!("{}: {}", path.display(), f.message), ..f })
        }
    }
}

fn cmd_stat(a: StatArgs) -> CliResult {
    let result = (|| -> CliResult<_> {
        let path = a.graph.clone().ok_or_else(|| config_error("missing --graph"))?;
        let detector = build_detector(require(a.detector, "--detector")?, a.n, a.mode)?;
        log_config(&a, None)?;
        let g = load_graph(&path)?;
        Ok(detector.evaluate(&g)?)
    })();
    match result {
        Ok(r) => {
            println!("{}", serde_json::to_string(&r).expect("result serializes"));
            Ok(())
        }
        Err(f) => {
            println!("{}", serde_json::json!({ "error": f.name, "message": f.message }));
            Err(f)
        }
    }
}

fn emit(text: &str, out: Option<&Path>) -> CliResult {
    match out {
        Some(p) => write_file(p, text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn cmd_calibrate(a: CalibrateArgs) -> CliResult {
    let detector = build_detector(require(a.detector, "--detector")?, a.n, a.mode)?;
    let test = match a.method {
        MethodKind::Bootstrap => {
            let path = a.graph.clone().ok_or_else(|| config_error("bootstrap calibration needs --graph"))?;
            let g = load_graph(&path)?;
            bootstrap_calibrate(&detector, &g, a.alpha, a.replicates, a.seed)?
        }
        MethodKind::MonteCarlo => {
            let null = ModelSpec::null(require(a.num_nodes, "--N")?, require(a.p0, "--p0")?);
            calibrate(&detector, &null, a.alpha, a.replicates, a.seed)?
        }
        MethodKind::Analytic => {
            if detector != Detector::TotalDegree {
                return Err(config_error("analytic calibration applies to total_degree only"));
            }
            calibrate_analytic(&ModelSpec::null(require(a.num_nodes, "--N")?, require(a.p0, "--p0")?), a.alpha)?
        }
    };
    log_config(&a, a.out.as_deref())?;
    emit(&(serde_json::to_string(&test).expect("test serializes") + "\n"), a.out.as_deref())
}

fn render_rows(rows: &[SweepRow], format: Format) -> String {
    match format {
        Format::Csv => rows_to_csv(rows),
        Format::Json => rows.iter().map(|r| serde_json::to_string(r).expect("row serializes") + "\n").collect(),
    }
}

/// Exit status of the first failed row, if any.
fn row_failure(rows: &[SweepRow]) -> Option<Failure> {
    rows.iter().find_map(|r| {
        let message = r.error.clone()?;
        let name = message.split(':').next().unwrap_or_default().to_string();
        Some(Failure { code: exit_code(&name), name, message: format!("{} at N={}, n={}, p0={}, p1={}", r.detector, r.num_nodes, r.n, r.p0, r.p1) })
    })
}

fn cmd_risk(a: RiskArgs) -> CliResult {
    let n = require(a.n, "--n")?;
    let detector = build_detector(require(a.detector, "--detector")?, Some(a.detector_n.unwrap_or(n)), a.mode)?;
    let config = SweepConfig {
        grid: SweepGrid { num_nodes: vec![require(a.num_nodes, "--N")?], n: vec![n], p0: vec![require(a.p0, "--p0")?], p1: vec![require(a.p1, "--p1")?] },
        model: match a.model {
            AltModel::Known => SweepModel::Known,
            AltModel::FixedDegree => SweepModel::FixedDegree,
        },
        detectors: vec![detector],
        alpha: a.alpha,
        replicates: a.replicates,
        calibration_replicates: a.calibration_replicates,
        calibration: a.calibration.method(),
        seed: a.seed,
    };
    log_config(&a, a.out.as_deref())?;
    let outcome = phase_sweep(&config, &SweepOptions::default())?;
    emit(&render_rows(&outcome.rows, a.format), a.out.as_deref())?;
    match row_failure(&outcome.rows) {
        Some(f) => Err(f),
        None => Ok(()),
    }
}

fn cmd_phase(a: PhaseArgs) -> CliResult {
    let mut file = read_json_object(&a.config)?;
    if let Some(v) = a.seed {
        file.insert("seed".into(), v.into());
    }
    if let Some(v) = a.alpha {
        file.insert("alpha".into(), v.into());
    }
    if let Some(v) = a.replicates {
        file.insert("replicates".into(), v.into());
    }
    if let Some(v) = a.calibration_replicates {
        file.insert("calibration_replicates".into(), v.into());
    }
    let config: SweepConfig =
        serde_json::from_value(Value::Object(file)).map_err(|e| config_error(format!("{}: {e}", a.config.display())))?;
    match (&a.out, &a.resume) {
        (Some(out), _) => log_config(&config, Some(out))?,
        (None, Some(dir)) => {
            fs::create_dir_all(dir).map_err(|e| io_error(dir, e))?;
            write_file(&dir.join("run.json"), &(serde_json::to_string_pretty(&config).expect("configuration serializes") + "\n"))?;
        }
        (None, None) => log_config(&config, None)?,
    }
    let options = SweepOptions { checkpoint_dir: a.resume.clone(), stop_after: a.stop_after, record_timing: a.record_timing };
    let outcome = phase_sweep(&config, &options).map_err(|e| match e {
        Error::Io(io) => io_error(a.resume.as_deref().unwrap_or(Path::new(".")), io),
        other => other.into(),
    })?;
    if !outcome.complete {
        eprintln!("stopped after {} rows; rerun with the same --resume directory to continue", outcome.rows.len());
    }
    emit(&render_rows(&outcome.rows, a.format), a.out.as_deref())?;
    for r in outcome.rows.iter().filter(|r| r.error.is_some()) {
        eprintln!("row failed: {} at N={}, n={}, p0={}, p1={}: {}", r.detector, r.num_nodes, r.n, r.p0, r.p1, r.error.as_deref().unwrap_or_default());
    }
    Ok(())
}

fn cmd_classify(a: ClassifyArgs) -> CliResult {
    let knowledge = match a.knowledge {
        KnowledgeKind::Known => Knowledge::Known,
        KnowledgeKind::Unknown => Knowledge::Unknown,
    };
    let options = RegimeOptions { quasi_normal_max: a.quasi_normal_max, n_log_min: a.n_log_min };
    log_config(&a, None)?;
    let report = classify_regime_with(
        require(a.num_nodes, "--N")?,
        require(a.n, "--n")?,
        require(a.p0, "--p0")?,
        require(a.p1, "--p1")?,
        knowledge,
        a.constraints,
        options,
    )?;
    println!("{}", serde_json::to_string(&report).expect("report serializes"));
    Ok(())
}
