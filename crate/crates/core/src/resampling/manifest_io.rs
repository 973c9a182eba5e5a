//! `manifest.tsv` reader and writer.
//!
//! ```text
//! # kie-leakage split manifest v1
//! # seed: 42
//! # ratios: train=0.64 val=0.16 test=0.2
//! # grouping: metric=question_overlap threshold=0.7 sha256=<hex>
//! # fold: 0
//! # tool: kie-leakage 0.1.0
//! 0000971160<TAB>train
//! ```
//!
//! Comment lines come first; `grouping`, `fold` and any provenance lines
//! are optional. Data lines are sorted by document id. Floats use Rust's
//! shortest round-trip formatting, so the bytes are the same on every
//! platform.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use super::{GroupingStamp, Ratios, ResampleError, Split, SplitManifest};

const MAGIC: &str = "# kie-leakage split manifest v1";
const RESERVED: [&str; 4] = ["seed", "ratios", "grouping", "fold"];

impl SplitManifest {
    pub fn to_tsv(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{MAGIC}");
        let _ = writeln!(out, "# seed: {}", self.seed);
        let _ = writeln!(out, "# ratios: {}", self.ratios);
        if let Some(g) = &self.grouping {
            let _ = writeln!(
                out,
                "# grouping: metric={} threshold={} sha256={}",
                g.metric, g.threshold, g.sha256
            );
        }
        if let Some(fold) = self.fold {
            let _ = writeln!(out, "# fold: {fold}");
        }
        for (k, v) in &self.provenance {
            if !RESERVED.contains(&k.as_str()) {
                let _ = writeln!(out, "# {k}: {v}");
            }
        }
        for (doc, split) in &self.assignments {
            let _ = writeln!(out, "{doc}\t{split}");
        }
        out
    }

    pub fn from_tsv(raw: &str) -> Result<Self, ResampleError> {
        let bad = |line: usize, detail: String| ResampleError::MalformedManifest { line, detail };
        let mut lines = raw.lines().enumerate().map(|(i, l)| (i + 1, l));
        match lines.next() {
            Some((_, MAGIC)) => {}
            _ => return Err(bad(1, "missing manifest header".into())),
        }

        let mut seed = None;
        let mut ratios = None;
        let mut grouping = None;
        let mut fold = None;
        let mut provenance = BTreeMap::new();
        let mut assignments = BTreeMap::new();
        for (no, line) in lines {
            if let Some(comment) = line.strip_prefix("# ") {
                let (key, value) = comment
                    .split_once(": ")
                    .ok_or_else(|| bad(no, format!("header line without `key: value`: {line}")))?;
                match key {
                    "seed" => seed = Some(value.parse().map_err(|_| bad(no, format!("bad seed `{value}`")))?),
                    "ratios" => ratios = Some(value.parse::<Ratios>().map_err(|e| bad(no, e.to_string()))?),
                    "grouping" => grouping = Some(parse_stamp(value).ok_or_else(|| bad(no, format!("bad grouping `{value}`")))?),
                    "fold" => fold = Some(value.parse().map_err(|_| bad(no, format!("bad fold `{value}`")))?),
                    _ => {
                        provenance.insert(key.to_string(), value.to_string());
                    }
                }
                continue;
            }
            if line.is_empty() {
                continue;
            }
            let (doc, split) = line
                .split_once('\t')
                .ok_or_else(|| bad(no, format!("expected `doc_id<TAB>split`, got `{line}`")))?;
            let split: Split = split.parse().map_err(|e: String| bad(no, e))?;
            if assignments.insert(doc.to_string(), split).is_some() {
                return Err(bad(no, format!("document `{doc}` listed twice")));
            }
        }
        Ok(SplitManifest {
            assignments,
            seed: seed.ok_or_else(|| bad(0, "missing seed header".into()))?,
            ratios: ratios.ok_or_else(|| bad(0, "missing ratios header".into()))?,
            grouping,
            fold,
            provenance,
        })
    }
}

fn parse_stamp(value: &str) -> Option<GroupingStamp> {
    let mut metric = None;
    let mut threshold = None;
    let mut sha256 = None;
    for part in value.split(' ') {
        let (k, v) = part.split_once('=')?;
        match k {
            "metric" => metric = v.parse().ok(),
            "threshold" => threshold = v.parse().ok(),
            "sha256" => sha256 = Some(v.to_string()),
            _ => return None,
        }
    }
    Some(GroupingStamp {
        metric: metric?,
        threshold: threshold?,
        sha256: sha256?,
    })
}
