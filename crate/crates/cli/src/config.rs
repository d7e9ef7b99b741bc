//! Experiment configuration and the emitted run record.

use std::collections::BTreeMap;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use serde::Serialize;

pub const ARTIFACT_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Experiment {
    KOmega,
    KestScan,
    EntropyScan,
    ReduceDemo,
    Decouple,
    Selectors,
    VerifyAll,
}

impl Experiment {
    pub fn name(self) -> &'static str {
        match self {
            Experiment::KOmega => "k-omega",
            Experiment::KestScan => "kest-scan",
            Experiment::EntropyScan => "entropy-scan",
            Experiment::ReduceDemo => "reduce-demo",
            Experiment::Decouple => "decouple",
            Experiment::Selectors => "selectors",
            Experiment::VerifyAll => "verify-all",
        }
    }
}

/// Full experiment configuration; every knob lands in the run record.
#[derive(Debug, Clone, Serialize)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    pub seed: u64,
    pub system: String,
    pub out_dir: PathBuf,
    pub oversample: usize,
    pub p: f64,
    pub trials: usize,
    /// n values (list for trend experiments, single entry otherwise).
    pub n_list: Vec<usize>,
    pub m_list: Vec<usize>,
    pub t_list: Vec<f64>,
    pub q: f64,
    pub t: f64,
    pub max_tries: usize,
    pub families: usize,
    pub omega_pairs: usize,
    pub draws: usize,
    pub delta: Option<f64>,
    pub sigma: Option<f64>,
    pub variant: String,
    pub p1: f64,
    pub timings: bool,
}

impl ExperimentConfig {
    pub fn new(experiment: Experiment, seed: u64) -> Self {
        ExperimentConfig {
            experiment,
            seed,
            system: "walsh".into(),
            out_dir: PathBuf::from("lpslab-out"),
            oversample: 16,
            p: 3.0,
            trials: 50,
            n_list: Vec::new(),
            m_list: Vec::new(),
            t_list: Vec::new(),
            q: 4.0,
            t: 4.0,
            max_tries: 50,
            families: 50,
            omega_pairs: 3,
            draws: 12,
            delta: None,
            sigma: None,
            variant: "standard".into(),
            p1: 3.0,
            timings: false,
        }
    }
}

/// One named check with its outcome.
#[derive(Debug, Clone, Serialize)]
pub struct CheckOutcome {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

impl CheckOutcome {
    pub fn new(name: &str, pass: bool, detail: impl Into<String>) -> Self {
        CheckOutcome { name: name.into(), pass, detail: detail.into() }
    }
}

/// The emitted record of a run: config snapshot, version, produced files,
/// summary statistics and per-assertion outcomes. Wall-clock timestamps are
/// only recorded under --timings so that reruns are byte-identical.
#[derive(Debug, Clone, Serialize)]
pub struct RunRecord {
    pub config: ExperimentConfig,
    pub artifact_version: String,
    pub emitted_files: Vec<String>,
    pub summary: BTreeMap<String, serde_json::Value>,
    pub checks: Vec<CheckOutcome>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub started_at_unix_ms: Option<u128>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub finished_at_unix_ms: Option<u128>,
}

impl RunRecord {
    pub fn new(config: ExperimentConfig) -> Self {
        let started = config.timings.then(now_ms);
        RunRecord {
            config,
            artifact_version: ARTIFACT_VERSION.into(),
            emitted_files: Vec::new(),
            summary: BTreeMap::new(),
            checks: Vec::new(),
            started_at_unix_ms: started,
            finished_at_unix_ms: None,
        }
    }

    pub fn put(&mut self, key: &str, value: impl Serialize) {
        self.summary.insert(key.into(), serde_json::to_value(value).expect("serializable"));
    }

    pub fn check(&mut self, name: &str, pass: bool, detail: impl Into<String>) {
        self.checks.push(CheckOutcome::new(name, pass, detail));
    }

    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    /// Serialize to `record.json` in the output directory.
    pub fn write(&mut self, out_dir: &Path) -> io::Result<PathBuf> {
        if self.config.timings {
            self.finished_at_unix_ms = Some(now_ms());
        }
        fs::create_dir_all(out_dir)?;
        let path = out_dir.join("record.json");
        self.emitted_files.push("record.json".into());
        let json = serde_json::to_string_pretty(self).expect("record serializes");
        fs::write(&path, json)?;
        Ok(path)
    }
}

fn now_ms() -> u128 {
    std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map(|d| d.as_millis())
        .unwrap_or(0)
}
