//! Run configuration: defaults, a `key = value` file, then flag overrides.
//!
//! ```text
//! # lines starting with '#' or ';' are comments, [sections] are ignored
//! dataset = funsd
//! data_root = data/funsd
//! threshold = 0.7
//! ratios = 0.64,0.16,0.2
//! seed = 42
//! ```
//!
//! Relative paths in a config file are resolved against the file's
//! directory. Flags always win over the file.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use sha2::{Digest, Sha256};

use super::CliError;
use crate::corpus::Dataset;
use crate::grouping::DEFAULT_THRESHOLD;
use crate::resampling::Ratios;
use crate::similarity::Metric;

pub const DEFAULT_SEED: u64 = 0;
pub const DEFAULT_K_FOLDS: usize = 4;
pub const DEFAULT_TRAIN_FRACTION: f64 = 0.8;
/// Test share used when the corpus ships without a test split.
pub const FALLBACK_TEST_FRACTION: f64 = 0.2;
pub const DEFAULT_THRESHOLD_GRID: [f64; 5] = [0.5, 0.6, 0.7, 0.8, 0.9];

/// How train/val folds treat template groups.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FoldMode {
    /// Whole groups go to train or val.
    Group,
    /// Plain document-level shuffles.
    Random,
}

impl FoldMode {
    fn as_str(self) -> &'static str {
        match self {
            FoldMode::Group => "group",
            FoldMode::Random => "random",
        }
    }
}

impl FromStr for FoldMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "group" => Ok(FoldMode::Group),
            "random" => Ok(FoldMode::Random),
            _ => Err(format!("unknown fold mode `{s}` (expected group or random)")),
        }
    }
}

/// Raw settings before defaults are applied. Every field is optional so a
/// config file and the command line can be layered.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Settings {
    pub dataset: Option<Dataset>,
    pub data_root: Option<PathBuf>,
    pub metric: Option<Metric>,
    pub threshold: Option<f64>,
    pub ratios: Option<Ratios>,
    pub seed: Option<u64>,
    pub k_folds: Option<usize>,
    pub train_fraction: Option<f64>,
    pub output_dir: Option<PathBuf>,
    pub ground_truth: Option<PathBuf>,
    pub thresholds: Option<Vec<f64>>,
    pub fold_mode: Option<FoldMode>,
    pub manifest: Option<PathBuf>,
    pub predictions: Option<PathBuf>,
}

fn parse_value<T: FromStr>(key: &str, value: &str) -> Result<T, CliError>
where
    T::Err: std::fmt::Display,
{
    value
        .parse()
        .map_err(|e| CliError::Usage(format!("invalid value for `{key}`: `{value}` ({e})")))
}

fn parse_grid(key: &str, value: &str) -> Result<Vec<f64>, CliError> {
    value
        .split(',')
        .map(|t| parse_value::<f64>(key, t.trim()))
        .collect()
}

impl Settings {
    /// Sets one `key = value` pair. `base` anchors relative paths.
    pub fn set(&mut self, key: &str, value: &str, base: &Path) -> Result<(), CliError> {
        let path = |v: &str| {
            let p = PathBuf::from(v);
            if p.is_absolute() {
                p
            } else {
                base.join(p)
            }
        };
        match key {
            "dataset" => self.dataset = Some(parse_value(key, value)?),
            "data_root" => self.data_root = Some(path(value)),
            "metric" => self.metric = Some(parse_value(key, value)?),
            "threshold" => self.threshold = Some(parse_value(key, value)?),
            "ratios" => self.ratios = Some(parse_value(key, value)?),
            "seed" => self.seed = Some(parse_value(key, value)?),
            "k_folds" => self.k_folds = Some(parse_value(key, value)?),
            "train_fraction" => self.train_fraction = Some(parse_value(key, value)?),
            "output_dir" => self.output_dir = Some(path(value)),
            "ground_truth" => self.ground_truth = Some(path(value)),
            "thresholds" => self.thresholds = Some(parse_grid(key, value)?),
            "fold_mode" => self.fold_mode = Some(parse_value(key, value)?),
            "manifest" => self.manifest = Some(path(value)),
            "predictions" => self.predictions = Some(path(value)),
            _ => return Err(CliError::Usage(format!("unknown setting `{key}`"))),
        }
        Ok(())
    }

    /// Parses a config file body. `base` anchors relative paths.
    pub fn parse(raw: &str, base: &Path) -> Result<Self, CliError> {
        let mut s = Settings::default();
        for (i, line) in raw.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') || line.starts_with(';') || line.starts_with('[') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                CliError::Usage(format!("config line {}: expected `key = value`, got `{line}`", i + 1))
            })?;
            s.set(key.trim(), value.trim(), base).map_err(|e| match e {
                CliError::Usage(m) => CliError::Usage(format!("config line {}: {m}", i + 1)),
                other => other,
            })?;
        }
        Ok(s)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let raw = std::fs::read_to_string(path).map_err(|e| {
            CliError::Usage(format!("cannot read config file {}: {e}", path.display()))
        })?;
        let base = path.parent().unwrap_or(Path::new("."));
        Self::parse(&raw, base)
    }

    /// Fields set in `over` replace those in `self`.
    pub fn overlay(self, over: Settings) -> Settings {
        Settings {
            dataset: over.dataset.or(self.dataset),
            data_root: over.data_root.or(self.data_root),
            metric: over.metric.or(self.metric),
            threshold: over.threshold.or(self.threshold),
            ratios: over.ratios.or(self.ratios),
            seed: over.seed.or(self.seed),
            k_folds: over.k_folds.or(self.k_folds),
            train_fraction: over.train_fraction.or(self.train_fraction),
            output_dir: over.output_dir.or(self.output_dir),
            ground_truth: over.ground_truth.or(self.ground_truth),
            thresholds: over.thresholds.or(self.thresholds),
            fold_mode: over.fold_mode.or(self.fold_mode),
            manifest: over.manifest.or(self.manifest),
            predictions: over.predictions.or(self.predictions),
        }
    }
}

/// Effective configuration of one run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub dataset: Dataset,
    pub data_root: Option<PathBuf>,
    pub metric: Metric,
    pub threshold: f64,
    /// `None` means "keep the corpus's own test fraction".
    pub ratios: Option<Ratios>,
    pub seed: u64,
    pub k_folds: usize,
    pub train_fraction: f64,
    pub output_dir: PathBuf,
    pub ground_truth: Option<PathBuf>,
    pub thresholds: Vec<f64>,
    pub fold_mode: FoldMode,
    pub manifest: Option<PathBuf>,
    pub predictions: Option<PathBuf>,
}

pub fn default_metric(dataset: Dataset) -> Metric {
    match dataset {
        Dataset::Funsd => Metric::QuestionOverlap,
        Dataset::Sroie => Metric::BusinessKey,
        Dataset::Generic => Metric::shingle(),
    }
}

impl RunConfig {
    /// Applies defaults and validates. Any failure is a usage error.
    pub fn resolve(s: Settings) -> Result<Self, CliError> {
        let dataset = s
            .dataset
            .ok_or_else(|| CliError::Usage("`dataset` is required (funsd, sroie or generic)".into()))?;
        let threshold = s.threshold.unwrap_or(DEFAULT_THRESHOLD);
        crate::grouping::check_threshold(threshold).map_err(|e| CliError::Usage(e.to_string()))?;
        let thresholds = s.thresholds.unwrap_or_else(|| DEFAULT_THRESHOLD_GRID.to_vec());
        for &t in &thresholds {
            crate::grouping::check_threshold(t).map_err(|e| CliError::Usage(e.to_string()))?;
        }
        let k_folds = s.k_folds.unwrap_or(DEFAULT_K_FOLDS);
        if k_folds == 0 {
            return Err(CliError::Usage("`k_folds` must be at least 1".into()));
        }
        let train_fraction = s.train_fraction.unwrap_or(DEFAULT_TRAIN_FRACTION);
        if !(train_fraction > 0.0 && train_fraction < 1.0) {
            return Err(CliError::Usage(format!(
                "`train_fraction` must lie in (0, 1), got {train_fraction}"
            )));
        }
        let output_dir = s.output_dir.unwrap_or_else(|| PathBuf::from("kie-leakage-out"));
        if let Some(root) = &s.data_root {
            if inside(&output_dir, root) {
                return Err(CliError::Usage(format!(
                    "output directory {} lies inside the data root {}; refusing to write there",
                    output_dir.display(),
                    root.display()
                )));
            }
        }
        Ok(RunConfig {
            dataset,
            data_root: s.data_root,
            metric: s.metric.unwrap_or_else(|| default_metric(dataset)),
            threshold,
            ratios: s.ratios,
            seed: s.seed.unwrap_or(DEFAULT_SEED),
            k_folds,
            train_fraction,
            output_dir,
            ground_truth: s.ground_truth,
            thresholds,
            fold_mode: s.fold_mode.unwrap_or(FoldMode::Group),
            manifest: s.manifest,
            predictions: s.predictions,
        })
    }

    /// Canonical `key = value` rendering of everything that affects output
    /// contents. The output directory is left out: writing the same results
    /// elsewhere is the same run.
    pub fn canonical(&self) -> String {
        let mut out = String::new();
        let mut kv = BTreeMap::new();
        kv.insert("dataset", self.dataset.to_string());
        kv.insert("metric", self.metric.to_string());
        kv.insert("threshold", self.threshold.to_string());
        kv.insert(
            "ratios",
            self.ratios.map_or_else(|| "corpus".to_string(), |r| r.to_string()),
        );
        kv.insert("seed", self.seed.to_string());
        kv.insert("k_folds", self.k_folds.to_string());
        kv.insert("train_fraction", self.train_fraction.to_string());
        kv.insert(
            "thresholds",
            self.thresholds.iter().map(f64::to_string).collect::<Vec<_>>().join(","),
        );
        kv.insert("fold_mode", self.fold_mode.as_str().to_string());
        for (key, path) in [
            ("data_root", &self.data_root),
            ("ground_truth", &self.ground_truth),
            ("manifest", &self.manifest),
            ("predictions", &self.predictions),
        ] {
            if let Some(p) = path {
                kv.insert(key, p.display().to_string());
            }
        }
        for (k, v) in kv {
            let _ = writeln!(out, "{k} = {v}");
        }
        out
    }

    pub fn digest(&self) -> String {
        hex::encode(Sha256::digest(self.canonical().as_bytes()))
    }

    pub fn data_root(&self) -> Result<&Path, CliError> {
        self.data_root
            .as_deref()
            .ok_or_else(|| CliError::Usage("`data_root` is required for this command".into()))
    }
}

/// Lexical check, plus a canonical one when both paths exist.
fn inside(path: &Path, root: &Path) -> bool {
    if path.starts_with(root) {
        return true;
    }
    match (root.canonicalize(), path.canonicalize()) {
        (Ok(r), Ok(p)) => p.starts_with(r),
        _ => false,
    }
}
