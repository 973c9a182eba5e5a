//! Pairwise template similarity between documents.
//!
//! Three measures are available, selected by [`Metric`]:
//!
//! - **question overlap** for forms: `|A ∩ B| / max(|A|, |B|)` over the
//!   normalized question strings of two documents, defined as 0 when both
//!   sets are empty;
//! - **business key** for receipts: 1 when two receipts carry the same
//!   normalized company name (or address, when the name is missing);
//! - **shingle Jaccard**, a generic fallback over token k-grams.
//!
//! [`candidate_pairs`] uses an inverted index so only documents sharing at
//! least one question, key or shingle are ever compared.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::{Corpus, Document};
use crate::text::normalize_text;

pub const DEFAULT_SHINGLE_K: usize = 3;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SimilarityError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

/// Which similarity drives grouping.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub enum Metric {
    QuestionOverlap,
    Shingle { k: usize },
    BusinessKey,
}

impl Metric {
    pub fn shingle() -> Self {
        Metric::Shingle {
            k: DEFAULT_SHINGLE_K,
        }
    }

    fn check(self) -> Result<Self, SimilarityError> {
        match self {
            Metric::Shingle { k: 0 } => Err(SimilarityError::InvalidParameter(
                "shingle size k must be at least 1".into(),
            )),
            m => Ok(m),
        }
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Metric::QuestionOverlap => f.write_str("question_overlap"),
            Metric::BusinessKey => f.write_str("business_key"),
            Metric::Shingle { k } if *k == DEFAULT_SHINGLE_K => f.write_str("shingle"),
            Metric::Shingle { k } => write!(f, "shingle:{k}"),
        }
    }
}

impl FromStr for Metric {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        match s {
            "question_overlap" => Ok(Metric::QuestionOverlap),
            "business_key" => Ok(Metric::BusinessKey),
            "shingle" => Ok(Metric::shingle()),
            _ => {
                let k = s
                    .strip_prefix("shingle:")
                    .and_then(|k| k.parse::<usize>().ok())
                    .ok_or_else(|| {
                        format!(
                            "unknown metric `{s}` (expected question_overlap, business_key, shingle or shingle:<k>)"
                        )
                    })?;
                Metric::Shingle { k }.check().map_err(|e| e.to_string())
            }
        }
    }
}

impl From<Metric> for String {
    fn from(m: Metric) -> String {
        m.to_string()
    }
}

impl TryFrom<String> for Metric {
    type Error = String;

    fn try_from(s: String) -> Result<Self, Self::Error> {
        s.parse()
    }
}

/// Normalized question strings of one form.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuestionSet(BTreeSet<String>);

impl QuestionSet {
    /// Normalizes every string and keeps the non-empty ones.
    pub fn from_raw<I, S>(raw: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        Self(
            raw.into_iter()
                .map(|s| normalize_text(s.as_ref()))
                .filter(|s| !s.is_empty())
                .collect(),
        )
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, q: &str) -> bool {
        self.0.contains(q)
    }

    pub fn iter(&self) -> impl Iterator<Item = &str> {
        self.0.iter().map(String::as_str)
    }
}

pub fn extract_question_set(doc: &Document) -> QuestionSet {
    QuestionSet::from_raw(doc.entities_with_label("question").map(|e| e.text.as_str()))
}

/// Size of the intersection over the size of the larger set; 0 for two
/// empty sets.
pub fn question_overlap(a: &QuestionSet, b: &QuestionSet) -> f64 {
    let denom = a.len().max(b.len());
    if denom == 0 {
        return 0.0;
    }
    let (small, large) = if a.len() <= b.len() { (a, b) } else { (b, a) };
    let shared = small.iter().filter(|q| large.contains(q)).count();
    shared as f64 / denom as f64
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KeySource {
    Company,
    Address,
    FallbackNone,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct TemplateKey {
    pub key: String,
    pub source: KeySource,
}

impl TemplateKey {
    pub fn none() -> Self {
        Self {
            key: String::new(),
            source: KeySource::FallbackNone,
        }
    }

    pub fn is_fallback(&self) -> bool {
        self.source == KeySource::FallbackNone
    }
}

/// Receipt template key: the normalized company name, else the normalized
/// address, else no key (the receipt stays on its own).
pub fn business_key(doc: &Document) -> TemplateKey {
    for (label, source) in [("company", KeySource::Company), ("address", KeySource::Address)] {
        if let Some(key) = doc
            .entities_with_label(label)
            .map(|e| normalize_text(&e.text))
            .find(|k| !k.is_empty())
        {
            return TemplateKey { key, source };
        }
    }
    TemplateKey::none()
}

// Normalized words never contain U+001F (it is whitespace), so it can
// separate the words of a shingle.
const SHINGLE_SEP: char = '\u{1f}';
// A lone separator is never a valid shingle; it blocks documents whose
// shingle set is empty.
const EMPTY_SHINGLES: &str = "\u{1f}";

/// Set of k-word shingles over a document's normalized tokens. A document
/// shorter than `k` words yields one shingle holding all of them.
fn shingles(doc: &Document, k: usize) -> HashSet<String> {
    let words: Vec<String> = doc
        .tokens
        .iter()
        .map(|t| normalize_text(&t.text))
        .filter(|w| !w.is_empty())
        .collect();
    if words.is_empty() {
        return HashSet::new();
    }
    let join = |ws: &[String]| {
        let mut s = String::new();
        for (i, w) in ws.iter().enumerate() {
            if i > 0 {
                s.push(SHINGLE_SEP);
            }
            s.push_str(w);
        }
        s
    };
    if words.len() < k {
        return std::iter::once(join(&words)).collect();
    }
    words.windows(k).map(join).collect()
}

fn jaccard(a: &HashSet<String>, b: &HashSet<String>) -> f64 {
    match (a.is_empty(), b.is_empty()) {
        (true, true) => 1.0,
        (true, false) | (false, true) => 0.0,
        _ => {
            let shared = a.intersection(b).count();
            shared as f64 / (a.len() + b.len() - shared) as f64
        }
    }
}

/// Jaccard similarity of the k-word shingle sets of two documents.
pub fn shingle_jaccard(a: &Document, b: &Document, k: usize) -> Result<f64, SimilarityError> {
    Metric::Shingle { k }.check()?;
    Ok(jaccard(&shingles(a, k), &shingles(b, k)))
}

/// A scored document pair, `doc_a < doc_b`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimilarityEdge {
    pub doc_a: String,
    pub doc_b: String,
    pub score: f64,
}

enum Features {
    Questions(Vec<QuestionSet>),
    Shingles(Vec<HashSet<String>>),
    Keys(Vec<TemplateKey>),
}

/// Per-document features for one metric, computed once and reused for both
/// blocking and scoring. Indices follow the corpus document order.
pub(crate) struct FeatureTable {
    features: Features,
}

impl FeatureTable {
    pub(crate) fn build(corpus: &Corpus, metric: Metric) -> Result<Self, SimilarityError> {
        let docs = &corpus.documents;
        let features = match metric.check()? {
            Metric::QuestionOverlap => {
                Features::Questions(docs.par_iter().map(extract_question_set).collect())
            }
            Metric::Shingle { k } => {
                Features::Shingles(docs.par_iter().map(|d| shingles(d, k)).collect())
            }
            Metric::BusinessKey => Features::Keys(docs.par_iter().map(business_key).collect()),
        };
        Ok(Self { features })
    }

    pub(crate) fn score(&self, i: usize, j: usize) -> f64 {
        match &self.features {
            Features::Questions(q) => question_overlap(&q[i], &q[j]),
            Features::Shingles(s) => jaccard(&s[i], &s[j]),
            Features::Keys(k) => {
                if !k[i].is_fallback() && k[i] == k[j] {
                    1.0
                } else {
                    0.0
                }
            }
        }
    }

    fn posting_lists(&self) -> HashMap<String, Vec<u32>> {
        let mut index: HashMap<String, Vec<u32>> = HashMap::new();
        let mut add = |key: &str, doc: usize| {
            index.entry(key.to_string()).or_default().push(doc as u32);
        };
        match &self.features {
            Features::Questions(sets) => {
                for (i, set) in sets.iter().enumerate() {
                    for q in set.iter() {
                        add(q, i);
                    }
                }
            }
            Features::Shingles(sets) => {
                for (i, set) in sets.iter().enumerate() {
                    if set.is_empty() {
                        add(EMPTY_SHINGLES, i);
                    }
                    for s in set {
                        add(s, i);
                    }
                }
            }
            Features::Keys(keys) => {
                for (i, key) in keys.iter().enumerate() {
                    if !key.is_fallback() {
                        let tag = match key.source {
                            KeySource::Company => 'c',
                            _ => 'a',
                        };
                        add(&format!("{tag}{SHINGLE_SEP}{}", key.key), i);
                    }
                }
            }
        }
        index
    }

    /// Every index pair `(i, j)`, `i < j`, sharing at least one posting list.
    pub(crate) fn candidate_indices(&self) -> Vec<(u32, u32)> {
        let mut pairs = Vec::new();
        for docs in self.posting_lists().values() {
            for (n, &a) in docs.iter().enumerate() {
                for &b in &docs[n + 1..] {
                    pairs.push((a.min(b), a.max(b)));
                }
            }
        }
        pairs.sort_unstable();
        pairs.dedup();
        pairs
    }
}

/// Document pairs that can have a non-zero score under `metric`, canonically
/// ordered and deduplicated.
pub fn candidate_pairs(
    corpus: &Corpus,
    metric: Metric,
) -> Result<Vec<(String, String)>, SimilarityError> {
    let table = FeatureTable::build(corpus, metric)?;
    Ok(table
        .candidate_indices()
        .into_iter()
        .map(|(a, b)| {
            (
                corpus.documents[a as usize].doc_id.clone(),
                corpus.documents[b as usize].doc_id.clone(),
            )
        })
        .collect())
}

/// Scores every candidate pair. Scoring runs in parallel; output order is
/// the canonical pair order.
pub fn score_candidates(
    corpus: &Corpus,
    metric: Metric,
) -> Result<Vec<SimilarityEdge>, SimilarityError> {
    let table = FeatureTable::build(corpus, metric)?;
    let pairs = table.candidate_indices();
    Ok(pairs
        .par_iter()
        .map(|&(a, b)| SimilarityEdge {
            doc_a: corpus.documents[a as usize].doc_id.clone(),
            doc_b: corpus.documents[b as usize].doc_id.clone(),
            score: table.score(a as usize, b as usize),
        })
        .collect())
}
