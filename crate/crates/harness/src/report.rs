//! Experiment reports: CSV rows with a fixed schema plus a JSON document.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

pub const CSV_HEADER: &str = "experiment,metric,estimate,stderr,target,tol,verdict,N,beta2,lambda,seed";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
    /// Reported value without a pass/fail criterion.
    Info,
}

impl Verdict {
    pub fn from_bool(ok: bool) -> Self {
        if ok {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetricRow {
    pub experiment: String,
    pub metric: String,
    pub estimate: f64,
    pub stderr: f64,
    pub target: f64,
    pub tol: f64,
    pub verdict: Verdict,
    #[serde(rename = "N")]
    pub n: Option<u32>,
    pub beta2: Option<f64>,
    pub lambda: Option<f64>,
    pub seed: Option<u64>,
}

impl MetricRow {
    /// A row with a verdict; `stderr`, `target` and `tol` may be NaN when
    /// they do not apply.
    pub fn check(experiment: &str, metric: impl Into<String>, estimate: f64, stderr: f64, target: f64, tol: f64, ok: bool) -> Self {
        MetricRow {
            experiment: experiment.to_string(),
            metric: metric.into(),
            estimate,
            stderr,
            target,
            tol,
            verdict: Verdict::from_bool(ok),
            n: None,
            beta2: None,
            lambda: None,
            seed: None,
        }
    }

    pub fn info(experiment: &str, metric: impl Into<String>, estimate: f64, stderr: f64) -> Self {
        let mut r = Self::check(experiment, metric, estimate, stderr, f64::NAN, f64::NAN, true);
        r.verdict = Verdict::Info;
        r
    }

    pub fn n(mut self, n: u32) -> Self {
        self.n = Some(n);
        self
    }

    pub fn beta2(mut self, b: f64) -> Self {
        self.beta2 = Some(b);
        self
    }

    pub fn lambda(mut self, l: f64) -> Self {
        self.lambda = Some(l);
        self
    }

    pub fn seed(mut self, s: u64) -> Self {
        self.seed = Some(s);
        self
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub experiment_id: String,
    pub config: serde_json::Value,
    pub rows: Vec<MetricRow>,
    pub wall_clock_s: f64,
    pub seed: u64,
}

impl ExperimentReport {
    pub fn new(experiment_id: &str, config: serde_json::Value, seed: u64) -> Self {
        ExperimentReport {
            experiment_id: experiment_id.to_string(),
            config,
            rows: Vec::new(),
            wall_clock_s: 0.0,
            seed,
        }
    }

    pub fn push(&mut self, row: MetricRow) {
        self.rows.push(row);
    }

    pub fn failed(&self) -> bool {
        self.rows.iter().any(|r| r.verdict == Verdict::Fail)
    }

    /// Passes when no row fails and at least one row carries a verdict.
    pub fn passed(&self) -> bool {
        !self.failed() && self.rows.iter().any(|r| r.verdict == Verdict::Pass)
    }

    /// Writes `<dir>/<id>.csv` and `<dir>/<id>.json`.
    pub fn write(&self, dir: &Path) -> std::io::Result<(PathBuf, PathBuf)> {
        fs::create_dir_all(dir)?;
        let csv_path = dir.join(format!("{}.csv", self.experiment_id));
        write_csv(&csv_path, &self.rows)?;
        let json_path = dir.join(format!("{}.json", self.experiment_id));
        fs::write(&json_path, serde_json::to_string_pretty(self)?)?;
        Ok((csv_path, json_path))
    }
}

pub fn write_csv(path: &Path, rows: &[MetricRow]) -> std::io::Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    if rows.is_empty() {
        w.write_record(CSV_HEADER.split(','))?;
    }
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()
}

pub fn read_csv(path: &Path) -> Result<Vec<MetricRow>, csv::Error> {
    csv::Reader::from_path(path)?.deserialize().collect()
}
