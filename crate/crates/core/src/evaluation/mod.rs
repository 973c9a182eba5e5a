//! Entity-level scoring and the template-memorizer baseline.

mod memorizer;

use std::collections::HashMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::Document;
use crate::text::normalize_text;

pub use memorizer::{
    evaluate_memorizer, fit_memorizer, leakage_gap_experiment, predict_memorizer,
    BusinessKeySignature, GapReport, GroupSignature, MemorizerModel, TemplateSignature,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("document `{0}` has no split assignment in the manifest")]
    UncoveredDocument(String),
}

/// Precision, recall and F1 from raw counts.
///
/// Zero denominators: precision is 1 when there are neither predictions nor
/// gold items and 0 when only the predictions are missing; recall mirrors
/// that. F1 is 0 whenever precision + recall is 0.
pub fn prf(tp: u64, fp: u64, fn_: u64) -> (f64, f64, f64) {
    let nothing_to_find = tp + fn_ == 0;
    let nothing_predicted = tp + fp == 0;
    let precision = match (nothing_predicted, nothing_to_find) {
        (true, true) => 1.0,
        (true, false) => 0.0,
        _ => tp as f64 / (tp + fp) as f64,
    };
    let recall = match (nothing_to_find, nothing_predicted) {
        (true, true) => 1.0,
        (true, false) => 0.0,
        _ => tp as f64 / (tp + fn_) as f64,
    };
    let f1 = if precision + recall == 0.0 {
        0.0
    } else {
        2.0 * precision * recall / (precision + recall)
    };
    (precision, recall, f1)
}

/// One extracted field; `text` is stored normalized.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ExtractedEntity {
    pub doc_id: String,
    pub label: String,
    pub text: String,
}

impl ExtractedEntity {
    pub fn new(doc_id: impl Into<String>, label: impl Into<String>, text: &str) -> Self {
        Self {
            doc_id: doc_id.into(),
            label: label.into(),
            text: normalize_text(text),
        }
    }
}

/// Gold entities of a document, skipping those whose text normalizes to
/// nothing.
pub fn gold_entities(doc: &Document) -> Vec<ExtractedEntity> {
    doc.entities
        .iter()
        .map(|e| ExtractedEntity::new(&doc.doc_id, &e.label, &e.text))
        .filter(|e| !e.text.is_empty())
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EvalMetrics {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub tp: u64,
    pub fp: u64,
    #[serde(rename = "fn")]
    pub fn_: u64,
}

impl EvalMetrics {
    pub fn from_counts(tp: u64, fp: u64, fn_: u64) -> Self {
        let (precision, recall, f1) = prf(tp, fp, fn_);
        Self {
            precision,
            recall,
            f1,
            tp,
            fp,
            fn_,
        }
    }
}

/// Micro-averaged exact-match scoring.
///
/// Within each document a prediction is a true positive when an unmatched
/// gold entity with the same label and normalized text exists; each gold
/// entity is consumed at most once.
pub fn entity_f1(gold: &[ExtractedEntity], pred: &[ExtractedEntity]) -> EvalMetrics {
    let mut unmatched: HashMap<(&str, &str, &str), u64> = HashMap::new();
    for g in gold {
        *unmatched
            .entry((g.doc_id.as_str(), g.label.as_str(), g.text.as_str()))
            .or_insert(0) += 1;
    }
    let mut tp = 0;
    for p in pred {
        if let Some(n) = unmatched.get_mut(&(p.doc_id.as_str(), p.label.as_str(), p.text.as_str())) {
            if *n > 0 {
                *n -= 1;
                tp += 1;
            }
        }
    }
    EvalMetrics::from_counts(tp, pred.len() as u64 - tp, gold.len() as u64 - tp)
}
