use std::collections::HashSet;

use serde::Serialize;

use super::{Document, Token};

/// A single invariant violation found by [`validate_document`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Issue {
    EmptyDocId,
    DanglingToken { entity_id: u64, token_index: usize },
    DuplicateEntityId { entity_id: u64 },
    UnknownLabel { entity_id: u64, label: String },
    InvalidBox { token_index: usize },
    EmptyTokenText { token_index: usize },
}

/// Lists every invariant the document breaks. An empty list means valid.
pub fn validate_document(doc: &Document) -> Vec<Issue> {
    let mut issues = Vec::new();
    if doc.doc_id.is_empty() {
        issues.push(Issue::EmptyDocId);
    }

    for (token_index, token) in doc.tokens.iter().enumerate() {
        if !token.bbox.is_valid() {
            issues.push(Issue::InvalidBox { token_index });
        }
        if token.text.trim().is_empty() {
            issues.push(Issue::EmptyTokenText { token_index });
        }
    }

    let known: HashSet<&Token> = doc.tokens.iter().collect();
    let mut seen_ids = HashSet::new();
    for entity in &doc.entities {
        if !seen_ids.insert(entity.entity_id) {
            issues.push(Issue::DuplicateEntityId {
                entity_id: entity.entity_id,
            });
        }
        if !doc.dataset.accepts_label(&entity.label) {
            issues.push(Issue::UnknownLabel {
                entity_id: entity.entity_id,
                label: entity.label.clone(),
            });
        }
        for (token_index, token) in entity.tokens.iter().enumerate() {
            if !known.contains(token) {
                issues.push(Issue::DanglingToken {
                    entity_id: entity.entity_id,
                    token_index,
                });
            }
        }
    }
    issues
}
