//! Risk over a parameter grid, checkpointed row by row so interrupted runs resume.

use std::collections::HashMap;
use std::fs::{self, File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::detectors::Detector;
use crate::error::{Error, Result};
use crate::harness::calibrate::{calibrate, calibrate_analytic, BootstrapTest, CalibrationMethod};
use crate::harness::regime::{classify_regime, Knowledge};
use crate::harness::risk::{estimate_risk, DecisionRule};
use crate::models::{derive_seed, effective_p0, ModelSpec};

/// Alternative family for a sweep.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepModel {
    /// `G(N, p0; n, p1)` against `G(N, p0)`.
    Known,
    /// `G(N, p0'; n, p1)` against `G(N, p0)` with equal expected edge counts;
    /// the grid's `p0` values are read as `p0'`.
    FixedDegree,
}

impl SweepModel {
    fn as_str(self) -> &'static str {
        match self {
            SweepModel::Known => "known",
            SweepModel::FixedDegree => "fixed_degree",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepGrid {
    #[serde(rename = "N")]
    pub num_nodes: Vec<usize>,
    pub n: Vec<usize>,
    pub p0: Vec<f64>,
    pub p1: Vec<f64>,
}

fn default_calibration() -> CalibrationMethod {
    CalibrationMethod::MonteCarloKnownP0
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub grid: SweepGrid,
    pub model: SweepModel,
    pub detectors: Vec<Detector>,
    pub alpha: f64,
    /// Replicates per hypothesis for the risk estimate.
    pub replicates: usize,
    /// Null replicates for Monte Carlo or bootstrap thresholds.
    pub calibration_replicates: usize,
    #[serde(default = "default_calibration")]
    pub calibration: CalibrationMethod,
    pub seed: u64,
}

/// One output row. `error` is carried in JSON output only; the CSV leaves the
/// risk columns empty for failed cells. `seconds` is filled only when timing is requested, so that
/// the default output is byte-identical across runs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    #[serde(rename = "N")]
    pub num_nodes: usize,
    pub n: usize,
    pub p0: f64,
    pub p1: f64,
    pub model: String,
    pub detector: String,
    pub alpha: f64,
    pub replicates: usize,
    pub type1: Option<f64>,
    pub type2: Option<f64>,
    pub gamma: Option<f64>,
    pub ci_half: Option<f64>,
    pub regime: String,
    pub seconds: Option<f64>,
    pub error: Option<String>,
}

pub const CSV_HEADER: &str = "N,n,p0,p1,model,detector,alpha,replicates,type1,type2,gamma,ci_half,regime,seconds";

#[derive(Clone, Debug, Default)]
pub struct SweepOptions {
    /// Directory holding `checkpoint.jsonl`; rows found there are not recomputed.
    pub checkpoint_dir: Option<PathBuf>,
    /// Stop after computing this many new rows (for staged runs).
    pub stop_after: Option<usize>,
    pub record_timing: bool,
}

#[derive(Serialize, Deserialize)]
struct CheckpointLine {
    key: String,
    seed: u64,
    row: SweepRow,
}

#[derive(Clone, Debug, Serialize)]
struct CellKey<'a> {
    #[serde(rename = "N")]
    num_nodes: usize,
    n: usize,
    p0: f64,
    p1: f64,
    model: &'a str,
    detector: &'a Detector,
    alpha: f64,
    replicates: usize,
    calibration_replicates: usize,
    calibration: CalibrationMethod,
}

fn row_key(key: &CellKey<'_>) -> (String, u64) {
    let digest = Sha256::digest(serde_json::to_vec(key).expect("serializable key"));
    let hex: String = digest.iter().map(|b| format!("{b:02x}")).collect();
    let tag = u64::from_le_bytes(digest[..8].try_into().expect("8 bytes"));
    (hex, tag)
}

/// Outcome of a sweep: the rows computed or loaded so far, in grid order.
#[derive(Clone, Debug, PartialEq)]
pub struct SweepOutcome {
    pub rows: Vec<SweepRow>,
    pub complete: bool,
}

pub fn phase_sweep(config: &SweepConfig, options: &SweepOptions) -> Result<SweepOutcome> {
    let g = &config.grid;
    if g.num_nodes.is_empty() || g.n.is_empty() || g.p0.is_empty() || g.p1.is_empty() || config.detectors.is_empty() {
        return Err(Error::InvalidSpec("sweep grid and detector list must be nonempty".into()));
    }
    let checkpoint = options.checkpoint_dir.as_ref().map(|d| d.join("checkpoint.jsonl"));
    let mut done: HashMap<String, SweepRow> = match &checkpoint {
        Some(path) => load_checkpoint(path)?,
        None => HashMap::new(),
    };
    let mut writer = match (&checkpoint, &options.checkpoint_dir) {
        (Some(path), Some(dir)) => {
            fs::create_dir_all(dir)?;
            Some(OpenOptions::new().create(true).append(true).open(path)?)
        }
        _ => None,
    };

    let mut rows = Vec::new();
    let mut fresh = 0usize;
    for &num_nodes in &g.num_nodes {
        for &n in &g.n {
            for &p0 in &g.p0 {
                for &p1 in &g.p1 {
                    for detector in &config.detectors {
                        let key = CellKey {
                            num_nodes,
                            n,
                            p0,
                            p1,
                            model: config.model.as_str(),
                            detector,
                            alpha: config.alpha,
                            replicates: config.replicates,
                            calibration_replicates: config.calibration_replicates,
                            calibration: config.calibration,
                        };
                        let (hex, tag) = row_key(&key);
                        if let Some(row) = done.remove(&hex) {
                            rows.push(row);
                            continue;
                        }
                        if options.stop_after.is_some_and(|k| fresh >= k) {
                            return Ok(SweepOutcome { rows, complete: false });
                        }
                        let seed = derive_seed(config.seed, tag);
                        let row = run_cell(config, &key, seed, options.record_timing);
                        if let Some(w) = writer.as_mut() {
                            let line = serde_json::to_string(&CheckpointLine { key: hex, seed, row: row.clone() }).expect("serializable row");
                            writeln!(w, "{line}")?;
                            w.flush()?;
                        }
                        rows.push(row);
                        fresh += 1;
                    }
                }
            }
        }
    }
    Ok(SweepOutcome { rows, complete: true })
}

fn load_checkpoint(path: &Path) -> Result<HashMap<String, SweepRow>> {
    let mut map = HashMap::new();
    let file = match File::open(path) {
        Ok(f) => f,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(map),
        Err(e) => return Err(e.into()),
    };
    for line in BufReader::new(file).lines() {
        // a line torn by an interrupted write is skipped and its row recomputed
        if let Ok(c) = serde_json::from_str::<CheckpointLine>(&line?) {
            map.insert(c.key, c.row);
        }
    }
    Ok(map)
}

fn run_cell(config: &SweepConfig, key: &CellKey<'_>, seed: u64, record_timing: bool) -> SweepRow {
    let start = record_timing.then(Instant::now);
    let mut row = SweepRow {
        num_nodes: key.num_nodes,
        n: key.n,
        p0: key.p0,
        p1: key.p1,
        model: key.model.to_string(),
        detector: key.detector.label(),
        alpha: config.alpha,
        replicates: config.replicates,
        type1: None,
        type2: None,
        gamma: None,
        ci_half: None,
        regime: String::new(),
        seconds: None,
        error: None,
    };
    let knowledge = match config.model {
        SweepModel::Known => Knowledge::Known,
        SweepModel::FixedDegree => Knowledge::Unknown,
    };
    row.regime = match classify_regime(key.num_nodes, key.n, key.p0, key.p1, knowledge, false) {
        Ok(r) => format!("{:?}", r.label),
        Err(_) => "Indeterminate".into(),
    };
    match cell_risk(config, key, seed) {
        Ok(r) => {
            row.type1 = Some(r.type1_hat);
            row.type2 = Some(r.type2_hat);
            row.gamma = Some(r.gamma_hat);
            row.ci_half = Some(r.half_width);
        }
        Err(e) => row.error = Some(format!("{}: {e}", e.name())),
    }
    row.seconds = start.map(|s| s.elapsed().as_secs_f64());
    row
}

fn cell_risk(config: &SweepConfig, key: &CellKey<'_>, seed: u64) -> Result<crate::harness::risk::RiskReport> {
    let (null, alt) = match config.model {
        SweepModel::Known => (ModelSpec::null(key.num_nodes, key.p0), ModelSpec::planted(key.num_nodes, key.n, key.p0, key.p1)),
        SweepModel::FixedDegree => {
            let p0 = effective_p0(key.p0, key.p1, key.n, key.num_nodes)?;
            (ModelSpec::null(key.num_nodes, p0), ModelSpec::fixed_degree(key.num_nodes, key.n, key.p0, key.p1))
        }
    };
    let cal_seed = derive_seed(seed, 10);
    let rule = match config.calibration {
        CalibrationMethod::MonteCarloKnownP0 => DecisionRule::Calibrated(calibrate(key.detector, &null, config.alpha, config.calibration_replicates, cal_seed)?),
        CalibrationMethod::AnalyticBinomial => {
            if *key.detector != Detector::TotalDegree {
                return Err(Error::InvalidSpec("analytic calibration applies to the total degree only".into()));
            }
            DecisionRule::Calibrated(calibrate_analytic(&null, config.alpha)?)
        }
        CalibrationMethod::ParametricBootstrap => {
            DecisionRule::Bootstrap(BootstrapTest::new(key.detector.clone(), config.alpha, config.calibration_replicates, cal_seed)?)
        }
    };
    estimate_risk(&rule, &null, &alt, config.replicates, derive_seed(seed, 20))
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// CSV with [`CSV_HEADER`], one line per row.
pub fn rows_to_csv(rows: &[SweepRow]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in rows {
        let fields = [
            r.num_nodes.to_string(),
            r.n.to_string(),
            r.p0.to_string(),
            r.p1.to_string(),
            csv_field(&r.model),
            csv_field(&r.detector),
            r.alpha.to_string(),
            r.replicates.to_string(),
            opt(r.type1),
            opt(r.type2),
            opt(r.gamma),
            opt(r.ci_half),
            csv_field(&r.regime),
            opt(r.seconds),
        ];
        out.push_str(&fields.join(","));
        out.push('\n');
    }
    out
}
