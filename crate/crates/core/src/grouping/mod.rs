//! Template groups: connected components of the thresholded similarity
//! graph, or exact business-key classes for receipts.

mod histogram;
mod pairwise;
mod tune;
mod union_find;

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::corpus::Corpus;
use crate::similarity::{
    business_key, score_candidates, Metric, SimilarityEdge, SimilarityError, TemplateKey,
};

pub use histogram::{
    group_size_histogram, SizeHistogram, FUNSD_REFERENCE_SIZES, SROIE_BUCKET_ANCHORS,
    SROIE_REFERENCE_SIZES,
};
pub use pairwise::{pairwise_grouping_metrics, GroundTruthGrouping, PairwiseMetrics};
pub use tune::{tune_threshold, TuningRow, TuningTable};
pub use union_find::DisjointSet;

/// Operating threshold for the question-overlap metric.
pub const DEFAULT_THRESHOLD: f64 = 0.7;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GroupingError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("edge references unknown document `{0}`")]
    UnknownDocId(String),
    #[error("inconsistent ground truth: {0}")]
    InconsistentGroundTruth(String),
    #[error(transparent)]
    Similarity(#[from] SimilarityError),
}

/// Accepts thresholds in (0, 1].
pub fn check_threshold(threshold: f64) -> Result<(), GroupingError> {
    if threshold.is_finite() && threshold > 0.0 && threshold <= 1.0 {
        Ok(())
    } else {
        Err(GroupingError::InvalidParameter(format!(
            "threshold must lie in (0, 1], got {threshold}"
        )))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TemplateGroup {
    pub group_id: usize,
    pub members: Vec<String>,
}

impl TemplateGroup {
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }
}

/// A partition of a corpus into template groups.
///
/// Canonical form: members sorted, groups ordered by smallest member,
/// `group_id`s dense from 0 in that order. Serializes to the `groups.json`
/// shape `{metric, threshold, groups: [{group_id, members}]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupingResult {
    pub metric: Metric,
    pub threshold: f64,
    pub groups: Vec<TemplateGroup>,
}

impl GroupingResult {
    /// Canonicalizes arbitrary member lists into a grouping.
    pub fn new(metric: Metric, threshold: f64, groups: Vec<Vec<String>>) -> Self {
        let mut groups: Vec<Vec<String>> = groups
            .into_iter()
            .filter(|g| !g.is_empty())
            .map(|mut g| {
                g.sort();
                g
            })
            .collect();
        groups.sort_by(|a, b| a[0].cmp(&b[0]));
        let groups = groups
            .into_iter()
            .enumerate()
            .map(|(group_id, members)| TemplateGroup { group_id, members })
            .collect();
        Self {
            metric,
            threshold,
            groups,
        }
    }

    pub fn num_documents(&self) -> usize {
        self.groups.iter().map(TemplateGroup::len).sum()
    }

    pub fn max_group_size(&self) -> usize {
        self.groups.iter().map(TemplateGroup::len).max().unwrap_or(0)
    }

    /// Map from document id to its group id.
    pub fn membership(&self) -> HashMap<&str, usize> {
        self.groups
            .iter()
            .flat_map(|g| g.members.iter().map(move |m| (m.as_str(), g.group_id)))
            .collect()
    }

    /// Compact canonical JSON, the input of [`GroupingResult::digest`].
    pub fn to_canonical_json(&self) -> String {
        serde_json::to_string(self).expect("grouping serialization is infallible")
    }

    /// SHA-256 of the canonical JSON, hex encoded.
    pub fn digest(&self) -> String {
        hex::encode(Sha256::digest(self.to_canonical_json().as_bytes()))
    }

    /// True when every group of `self` lies inside a single group of
    /// `coarser`.
    pub fn refines(&self, coarser: &GroupingResult) -> bool {
        let outer = coarser.membership();
        self.groups.iter().all(|g| {
            let first = outer.get(g.members[0].as_str());
            first.is_some() && g.members.iter().all(|m| outer.get(m.as_str()) == first)
        })
    }
}

/// Candidate pairs whose score reaches `threshold` (inclusive).
pub fn build_similarity_graph(
    corpus: &Corpus,
    metric: Metric,
    threshold: f64,
) -> Result<Vec<SimilarityEdge>, GroupingError> {
    check_threshold(threshold)?;
    let mut edges = score_candidates(corpus, metric)?;
    edges.retain(|e| e.score >= threshold);
    Ok(edges)
}

/// Connected components over the corpus, every document starting as its
/// own singleton.
pub fn connected_components(
    edges: &[SimilarityEdge],
    corpus: &Corpus,
) -> Result<Vec<Vec<String>>, GroupingError> {
    let mut sets = DisjointSet::new(corpus.len());
    let index = |id: &str| {
        corpus
            .position(id)
            .ok_or_else(|| GroupingError::UnknownDocId(id.to_string()))
    };
    for edge in edges {
        let (a, b) = (index(&edge.doc_a)?, index(&edge.doc_b)?);
        sets.union(a, b);
    }
    Ok(sets
        .components()
        .into_iter()
        .map(|members| {
            members
                .into_iter()
                .map(|i| corpus.documents[i].doc_id.clone())
                .collect()
        })
        .collect())
}

/// Groups documents by identical non-fallback keys. Documents without a key
/// (or missing from `keys`) are singletons.
pub fn group_by_key(corpus: &Corpus, keys: &BTreeMap<String, TemplateKey>) -> GroupingResult {
    let mut classes: BTreeMap<&TemplateKey, Vec<String>> = BTreeMap::new();
    let mut groups = Vec::new();
    for id in corpus.doc_ids() {
        match keys.get(id) {
            Some(key) if !key.is_fallback() => classes.entry(key).or_default().push(id.to_string()),
            _ => groups.push(vec![id.to_string()]),
        }
    }
    groups.extend(classes.into_values());
    GroupingResult::new(Metric::BusinessKey, 1.0, groups)
}

/// Full grouping pipeline for one metric and threshold.
pub fn group_corpus(
    corpus: &Corpus,
    metric: Metric,
    threshold: f64,
) -> Result<GroupingResult, GroupingError> {
    check_threshold(threshold)?;
    if metric == Metric::BusinessKey {
        let keys = corpus
            .documents
            .iter()
            .map(|d| (d.doc_id.clone(), business_key(d)))
            .collect();
        let mut result = group_by_key(corpus, &keys);
        result.threshold = threshold;
        return Ok(result);
    }
    let edges = build_similarity_graph(corpus, metric, threshold)?;
    let groups = connected_components(&edges, corpus)?;
    Ok(GroupingResult::new(metric, threshold, groups))
}
