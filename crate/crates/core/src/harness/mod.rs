//! Experiment orchestration: configuration, seed derivation, deterministic
//! parallel sampling and report emission.
//!
//! Every sample `i` of a named stream is drawn from
//! `derive_seed(master, stream, i)`, and samples are collected in index
//! order, so a report depends on the configuration and the master seed but
//! never on the number of workers.

mod emit;
mod experiments;

pub use emit::{emit, from_json, to_csv, to_json, OutputFormat, CSV_HEADER};

use std::fmt;

use clap::ValueEnum;
use rayon::prelude::*;
use rayon::ThreadPool;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::Distribution;
use crate::rng::mix64;

pub const WORKERS_ENV: &str = "RSK_RATES_WORKERS";
pub const MC_BAND_DELTA: f64 = 1e-3;
pub const DEFAULT_SEED: u64 = 20_240_601;

const FNV_OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
const FNV_PRIME: u64 = 0x0000_0100_0000_01b3;
const GOLDEN_GAMMA: u64 = 0x9e37_79b9_7f4a_7c15;

fn fnv1a(label: &str) -> u64 {
    label
        .bytes()
        .fold(FNV_OFFSET, |h, b| (h ^ b as u64).wrapping_mul(FNV_PRIME))
}

/// Seed of sample `index` in the stream `stream`.
///
/// For a fixed `(master, stream)` the map is a bijection of `index`: the
/// index is spread by an odd multiplier, offset by a mixed key and mixed
/// again.
pub fn derive_seed(master: u64, stream: &str, index: u64) -> u64 {
    let key = mix64(master ^ fnv1a(stream));
    mix64(key.wrapping_add(index.wrapping_mul(GOLDEN_GAMMA)))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Experiment {
    Identity,
    ShapeVsGue,
    Rate,
    Gap,
    EventAn,
    CoupleDemo,
    TwRegime,
    LimitSample,
    Wp,
    Lci,
}

impl Experiment {
    pub const ALL: [Experiment; 10] = [
        Experiment::Identity,
        Experiment::ShapeVsGue,
        Experiment::Rate,
        Experiment::Gap,
        Experiment::EventAn,
        Experiment::CoupleDemo,
        Experiment::TwRegime,
        Experiment::LimitSample,
        Experiment::Wp,
        Experiment::Lci,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Experiment::Identity => "identity",
            Experiment::ShapeVsGue => "shape-vs-gue",
            Experiment::Rate => "rate",
            Experiment::Gap => "gap",
            Experiment::EventAn => "event-an",
            Experiment::CoupleDemo => "couple-demo",
            Experiment::TwRegime => "tw-regime",
            Experiment::LimitSample => "limit-sample",
            Experiment::Wp => "wp",
            Experiment::Lci => "lci",
        }
    }

    /// Statistic names emitted for every grid point, in row order.
    pub fn statistics(self, m: usize) -> Vec<String> {
        let fixed: &[&str] = match self {
            Experiment::Identity => &["max_abs_deviation", "violations"],
            Experiment::ShapeVsGue => {
                let mut names: Vec<String> = (1..m).map(|k| format!("ks_k{k}")).collect();
                names.push("max_abs_t_m".into());
                return names;
            }
            Experiment::Rate => &["ks", "normalized_ks"],
            Experiment::Gap => &["min_gap", "max_gap", "bound", "exceed_fraction", "precondition_ok"],
            Experiment::EventAn => &["failures", "failure_fraction", "theoretical_bound"],
            Experiment::CoupleDemo => &["mismatches", "ks", "dkw_combined", "ks_shift_resolved"],
            Experiment::TwRegime => &["ks"],
            Experiment::LimitSample => &["ks", "ks_half_grid"],
            Experiment::Wp => &["ks", "w1", "w2"],
            Experiment::Lci => &["lci_mean_ratio", "ks_n_vs_4n", "e_max"],
        };
        fixed.iter().map(|s| s.to_string()).collect()
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Partial configuration, as read from a JSON file or the command line.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigOverrides {
    pub experiment: Option<Experiment>,
    pub dist: Option<Vec<f64>>,
    pub n_grid: Option<Vec<usize>>,
    pub n_samples: Option<usize>,
    pub alpha: Option<f64>,
    #[serde(rename = "grid_G", alias = "grid_g")]
    pub grid_g: Option<usize>,
    pub m_ref: Option<usize>,
    pub seed: Option<u64>,
    pub workers: Option<usize>,
    pub out: Option<String>,
}

impl ConfigOverrides {
    pub fn from_json_str(text: &str) -> Result<Self> {
        serde_json::from_str(text)
            .map_err(|e| Error::InvalidConfig(vec![format!("config file: {e}")]))
    }

    pub fn from_path(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| {
            Error::InvalidConfig(vec![format!("config file {}: {e}", path.display())])
        })?;
        Self::from_json_str(&text)
    }
}

/// A complete, validated experiment configuration.
///
/// `workers` only affects scheduling and is left out of serialised echoes.
/// For `tw-regime` the entries of `n_grid` are matrix dimensions.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    pub dist: Vec<f64>,
    pub n_grid: Vec<usize>,
    pub n_samples: usize,
    pub alpha: f64,
    #[serde(rename = "grid_G")]
    pub grid_g: usize,
    pub m_ref: usize,
    pub seed: u64,
    #[serde(skip)]
    pub workers: usize,
    pub out: Option<String>,
}

fn default_workers() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

impl ExperimentConfig {
    pub fn defaults(experiment: Experiment) -> Self {
        let (dist, n_grid, n_samples): (Vec<f64>, Vec<usize>, usize) = match experiment {
            Experiment::Identity => (vec![0.5, 0.3, 0.2], vec![10, 100, 300], 1_000),
            Experiment::ShapeVsGue => (vec![1.0 / 3.0; 3], vec![100, 1_000, 10_000], 5_000),
            Experiment::Rate => (vec![1.0 / 3.0; 3], vec![100, 1_000, 10_000, 30_000], 50_000),
            Experiment::Gap => (vec![0.5, 0.3, 0.2], vec![10_000], 1_000),
            Experiment::EventAn => (vec![0.5, 0.5], vec![500], 200),
            Experiment::CoupleDemo => (vec![0.5, 0.5], vec![30], 10_000),
            Experiment::TwRegime => (vec![0.5, 0.5], vec![4, 16, 64], 20_000),
            Experiment::LimitSample => (vec![0.4, 0.4, 0.2], vec![2_000], 20_000),
            Experiment::Wp => (vec![0.5, 0.5], vec![10_000], 100_000),
            Experiment::Lci => (vec![0.5, 0.5], vec![25, 50, 100], 400),
        };
        Self {
            experiment,
            dist,
            n_grid,
            n_samples,
            alpha: 1.0,
            grid_g: 2_000,
            m_ref: 500,
            seed: DEFAULT_SEED,
            workers: default_workers(),
            out: None,
        }
    }

    /// Defaults, then the file, then the command line; later layers win.
    /// `workers` falls back to `$RSK_RATES_WORKERS` when neither layer sets it.
    pub fn resolve(
        experiment: Experiment,
        file: &ConfigOverrides,
        cli: &ConfigOverrides,
    ) -> Result<Self> {
        let mut cfg = Self::defaults(experiment);
        let mut problems = Vec::new();
        let workers_unset = file.workers.is_none() && cli.workers.is_none();
        if let (true, Ok(text)) = (workers_unset, std::env::var(WORKERS_ENV)) {
            match text.trim().parse() {
                Ok(w) => cfg.workers = w,
                Err(_) => problems.push(format!("{WORKERS_ENV}: '{text}' is not a worker count")),
            }
        }
        for layer in [file, cli] {
            cfg.apply(layer);
        }
        cfg.experiment = experiment;
        match cfg.validate() {
            Err(Error::InvalidConfig(mut more)) => {
                problems.append(&mut more);
                Err(Error::InvalidConfig(problems))
            }
            Err(e) => Err(e),
            Ok(()) if problems.is_empty() => Ok(cfg),
            Ok(()) => Err(Error::InvalidConfig(problems)),
        }
    }

    fn apply(&mut self, o: &ConfigOverrides) {
        if let Some(v) = &o.dist {
            self.dist = v.clone();
        }
        if let Some(v) = &o.n_grid {
            self.n_grid = v.clone();
        }
        if let Some(v) = o.n_samples {
            self.n_samples = v;
        }
        if let Some(v) = o.alpha {
            self.alpha = v;
        }
        if let Some(v) = o.grid_g {
            self.grid_g = v;
        }
        if let Some(v) = o.m_ref {
            self.m_ref = v;
        }
        if let Some(v) = o.seed {
            self.seed = v;
        }
        if let Some(v) = o.workers {
            self.workers = v;
        }
        if let Some(v) = &o.out {
            self.out = Some(v.clone());
        }
    }

    /// Checks every field and reports all offending ones at once.
    pub fn validate(&self) -> Result<()> {
        let mut problems = Vec::new();
        let dist = match Distribution::new(self.dist.clone()) {
            Ok(d) => Some(d),
            Err(e) => {
                problems.push(format!("dist: {e}"));
                None
            }
        };
        if self.n_grid.is_empty() {
            problems.push("n_grid: empty".into());
        }
        if self.n_grid.contains(&0) {
            problems.push("n_grid: entries must be positive".into());
        }
        if self.n_samples < 2 {
            problems.push(format!("n_samples: {} < 2", self.n_samples));
        }
        if !(self.alpha >= 1.0 && self.alpha.is_finite()) {
            problems.push(format!("alpha: {} is not a finite value ≥ 1", self.alpha));
        }
        if self.grid_g < 2 {
            problems.push(format!("grid_G: {} < 2", self.grid_g));
        }
        if self.m_ref < crate::limits::TW_REFERENCE_MIN_DIM {
            problems.push(format!(
                "m_ref: {} < {}",
                self.m_ref,
                crate::limits::TW_REFERENCE_MIN_DIM
            ));
        }
        if self.workers == 0 {
            problems.push("workers: must be at least 1".into());
        }

        let min_n = self.n_grid.iter().copied().min().unwrap_or(1);
        match self.experiment {
            Experiment::ShapeVsGue | Experiment::Rate | Experiment::Wp => {
                if dist.as_ref().is_some_and(|d| !d.is_uniform()) {
                    problems.push(format!("dist: {} needs a uniform distribution", self.experiment));
                }
            }
            Experiment::Gap => {
                if dist.as_ref().is_some_and(|d| d.is_uniform()) {
                    problems.push("dist: gap needs a non-uniform distribution".into());
                }
                if min_n < 2 {
                    problems.push("n_grid: gap needs n ≥ 2".into());
                }
            }
            Experiment::EventAn => {
                if min_n < 2 {
                    problems.push("n_grid: event-an needs n ≥ 2".into());
                }
                if let Some(&n) = self
                    .n_grid
                    .iter()
                    .find(|&&n| n > crate::variational::DEFAULT_EVENT_N_CAP)
                {
                    problems.push(format!(
                        "n_grid: event-an scans O(n²) windows; {n} exceeds {}",
                        crate::variational::DEFAULT_EVENT_N_CAP
                    ));
                }
            }
            Experiment::CoupleDemo => {
                if dist.as_ref().is_some_and(|d| !(d.m() == 2 && d.is_uniform())) {
                    problems.push("dist: couple-demo needs (0.5, 0.5)".into());
                }
            }
            Experiment::TwRegime => {
                if min_n < 2 {
                    problems.push("n_grid: tw-regime dimensions must be ≥ 2".into());
                }
            }
            Experiment::Identity | Experiment::LimitSample | Experiment::Lci => {}
        }
        if self.experiment == Experiment::Rate && self.n_grid.len() < 2 {
            problems.push("n_grid: rate needs at least two grid points".into());
        }

        if problems.is_empty() {
            Ok(())
        } else {
            Err(Error::InvalidConfig(problems))
        }
    }

    pub fn distribution(&self) -> Result<Distribution> {
        Distribution::new(self.dist.clone())
    }

    /// Dimension reported in the `m` column.
    pub fn m(&self) -> usize {
        self.dist.len()
    }

    fn echo(&self) -> Self {
        Self {
            workers: 0,
            ..self.clone()
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub experiment: Experiment,
    pub n: usize,
    pub m: usize,
    pub statistic: String,
    #[serde(with = "emit::float_or_null")]
    pub value: f64,
    #[serde(with = "emit::float_or_null")]
    pub mc_band: f64,
    pub seed: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    #[serde(with = "emit::float_or_null")]
    pub value: f64,
    #[serde(with = "emit::float_or_null")]
    pub threshold: f64,
    pub pass: bool,
}

impl Check {
    fn at_most(name: impl Into<String>, value: f64, threshold: f64) -> Self {
        Self {
            name: name.into(),
            value,
            threshold,
            pass: value <= threshold,
        }
    }

    fn at_least(name: impl Into<String>, value: f64, threshold: f64) -> Self {
        Self {
            name: name.into(),
            value,
            threshold,
            pass: value >= threshold,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub slope: Option<f64>,
    pub c_hat: Option<f64>,
    pub checks: Vec<Check>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub config: ExperimentConfig,
    pub seed: u64,
    pub version: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub rows: Vec<ReportRow>,
    pub summary: Summary,
    pub provenance: Provenance,
}

impl ExperimentReport {
    pub fn passed(&self) -> bool {
        self.summary.checks.iter().all(|c| c.pass)
    }

    pub fn value(&self, n: usize, statistic: &str) -> Option<f64> {
        self.rows
            .iter()
            .find(|r| r.n == n && r.statistic == statistic)
            .map(|r| r.value)
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.summary.checks.iter().find(|c| c.name == name)
    }
}

/// Validates `cfg`, runs it on a pool of `cfg.workers` threads and returns
/// the report.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    cfg.validate()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.workers)
        .build()
        .map_err(|e| Error::InvalidConfig(vec![format!("workers: {e}")]))?;
    let runner = Runner { cfg, pool };
    let (rows, summary) = experiments::run(&runner)?;
    Ok(ExperimentReport {
        rows,
        summary,
        provenance: Provenance {
            config: cfg.echo(),
            seed: cfg.seed,
            version: env!("CARGO_PKG_VERSION").to_string(),
        },
    })
}

struct Runner<'a> {
    cfg: &'a ExperimentConfig,
    pool: ThreadPool,
}

impl Runner<'_> {
    /// `f(derive_seed(master, stream, i))` for `i = 0..count`, in index order.
    fn samples<T, F>(&self, stream: &str, count: usize, f: F) -> Result<Vec<T>>
    where
        T: Send,
        F: Fn(u64) -> Result<T> + Sync,
    {
        let master = self.cfg.seed;
        let results: Vec<Result<T>> = self.pool.install(|| {
            (0..count)
                .into_par_iter()
                .map(|i| f(derive_seed(master, stream, i as u64)))
                .collect()
        });
        results
            .into_iter()
            .enumerate()
            .map(|(index, r)| {
                r.map_err(|e| Error::Sample {
                    index,
                    source: Box::new(e),
                })
            })
            .collect()
    }

    fn row(&self, n: usize, m: usize, statistic: &str, value: f64) -> ReportRow {
        ReportRow {
            experiment: self.cfg.experiment,
            n,
            m,
            statistic: statistic.to_string(),
            value,
            mc_band: crate::distance::dkw_band(self.cfg.n_samples, MC_BAND_DELTA),
            seed: self.cfg.seed,
        }
    }
}
