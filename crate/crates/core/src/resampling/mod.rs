//! Leakage measurement and group-atomic resampling.
//!
//! A [`SplitManifest`] assigns every document to train, val or test. The
//! resampler packs whole template groups into splits so no template is
//! shared between training and testing, then draws train/val folds from
//! what remains.

mod folds;
mod leakage;
mod manifest_io;
mod pack;
mod verify;

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::{Corpus, OriginSplit};
use crate::similarity::Metric;

pub use folds::{make_cv_folds, make_group_cv_folds, CvFolds};
pub use leakage::{leakage_report, leakage_report_for_manifest, LeakageReport};
pub use pack::resample_splits;
pub use verify::{ratio_deviations, verify_manifest, SplitDeviation, Violation};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ResampleError {
    #[error("invalid ratios: {0}")]
    InvalidRatios(String),
    #[error("infeasible ratios: a group of {group_size} documents exceeds every split's share (largest share {largest_share})")]
    InfeasibleRatios { group_size: usize, largest_share: f64 },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("document `{0}` has no origin split")]
    UnassignedDocument(String),
    #[error("malformed manifest line {line}: {detail}")]
    MalformedManifest { line: usize, detail: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Split {
    Train,
    Val,
    Test,
}

impl Split {
    pub const ALL: [Split; 3] = [Split::Train, Split::Val, Split::Test];

    pub fn as_str(self) -> &'static str {
        match self {
            Split::Train => "train",
            Split::Val => "val",
            Split::Test => "test",
        }
    }
}

impl fmt::Display for Split {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Split {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "train" => Ok(Split::Train),
            "val" => Ok(Split::Val),
            "test" => Ok(Split::Test),
            other => Err(format!("unknown split `{other}`")),
        }
    }
}

const RATIO_TOLERANCE: f64 = 1e-9;

/// Rounds away binary noise from derived fractions (0.6000000000000001)
/// so manifests stay readable.
pub(crate) fn tidy(x: f64) -> f64 {
    (x * 1e12).round() / 1e12
}

/// Target split fractions; non-negative and summing to one.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Ratios {
    pub train: f64,
    pub val: f64,
    pub test: f64,
}

impl Ratios {
    pub fn new(train: f64, val: f64, test: f64) -> Result<Self, ResampleError> {
        for (name, v) in [("train", train), ("val", val), ("test", test)] {
            if !v.is_finite() || v < 0.0 {
                return Err(ResampleError::InvalidRatios(format!("{name} ratio {v} is not a non-negative number")));
            }
        }
        let sum = train + val + test;
        if (sum - 1.0).abs() > RATIO_TOLERANCE {
            return Err(ResampleError::InvalidRatios(format!(
                "ratios sum to {sum}, expected 1"
            )));
        }
        Ok(Self { train, val, test })
    }

    /// Carves `test` first, then splits the rest 80:20 into train and val.
    pub fn from_test_fraction(test: f64) -> Result<Self, ResampleError> {
        if !(0.0..=1.0).contains(&test) {
            return Err(ResampleError::InvalidRatios(format!(
                "test fraction {test} outside [0, 1]"
            )));
        }
        let rest = 1.0 - test;
        Self::new(tidy(0.8 * rest), tidy(0.2 * rest), test)
    }

    pub fn get(&self, split: Split) -> f64 {
        match split {
            Split::Train => self.train,
            Split::Val => self.val,
            Split::Test => self.test,
        }
    }
}

impl fmt::Display for Ratios {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "train={} val={} test={}", self.train, self.val, self.test)
    }
}

impl FromStr for Ratios {
    type Err = ResampleError;

    /// Accepts `train,val,test` or the `train=.. val=.. test=..` display form.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || ResampleError::InvalidRatios(format!("cannot parse ratios `{s}`"));
        let parts: Vec<&str> = s
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|p| !p.is_empty())
            .collect();
        if parts.len() != 3 {
            return Err(bad());
        }
        let mut values = [0.0; 3];
        for (slot, (part, name)) in values.iter_mut().zip(parts.iter().zip(["train", "val", "test"])) {
            let raw = match part.split_once('=') {
                Some((key, v)) if key == name => v,
                Some(_) => return Err(bad()),
                None => part,
            };
            *slot = raw.parse().map_err(|_| bad())?;
        }
        Ratios::new(values[0], values[1], values[2])
    }
}

/// Which grouping a manifest was built against.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupingStamp {
    pub metric: Metric,
    pub threshold: f64,
    pub sha256: String,
}

/// Assignment of every document to a split, plus the inputs that produced
/// it. Written as `manifest.tsv` / `fold_<i>.tsv`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SplitManifest {
    pub assignments: BTreeMap<String, Split>,
    pub seed: u64,
    pub ratios: Ratios,
    pub grouping: Option<GroupingStamp>,
    pub fold: Option<usize>,
    /// Extra `key: value` header lines (tool version, config digest, ...).
    pub provenance: BTreeMap<String, String>,
}

impl SplitManifest {
    pub fn new(assignments: BTreeMap<String, Split>, seed: u64, ratios: Ratios) -> Self {
        Self {
            assignments,
            seed,
            ratios,
            grouping: None,
            fold: None,
            provenance: BTreeMap::new(),
        }
    }

    /// The split a corpus shipped with: train stays train, test stays test.
    /// Ratios record the realized fractions.
    pub fn from_origin_splits(corpus: &Corpus) -> Result<Self, ResampleError> {
        let mut assignments = BTreeMap::new();
        for doc in &corpus.documents {
            let split = match doc.origin_split {
                OriginSplit::Train => Split::Train,
                OriginSplit::Test => Split::Test,
                OriginSplit::Unassigned => {
                    return Err(ResampleError::UnassignedDocument(doc.doc_id.clone()))
                }
            };
            assignments.insert(doc.doc_id.clone(), split);
        }
        let n = assignments.len().max(1) as f64;
        let test = assignments.values().filter(|s| **s == Split::Test).count() as f64 / n;
        let ratios = if assignments.is_empty() {
            Ratios::new(1.0, 0.0, 0.0)?
        } else {
            Ratios::new(1.0 - test, 0.0, test)?
        };
        Ok(Self::new(assignments, 0, ratios))
    }

    pub fn len(&self) -> usize {
        self.assignments.len()
    }

    pub fn is_empty(&self) -> bool {
        self.assignments.is_empty()
    }

    pub fn count(&self, split: Split) -> usize {
        self.assignments.values().filter(|s| **s == split).count()
    }

    pub fn docs_in(&self, split: Split) -> impl Iterator<Item = &str> {
        self.assignments
            .iter()
            .filter(move |(_, s)| **s == split)
            .map(|(d, _)| d.as_str())
    }
}
