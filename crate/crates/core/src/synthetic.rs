//! Deterministic synthetic corpora with known template structure.
//!
//! Useful for demos and tests where the real benchmarks are unavailable:
//! every document's template is known, so groupings and leakage can be
//! checked exactly.

use crate::corpus::{BoundingBox, Corpus, Dataset, Document, Entity, OriginSplit, Token};
use crate::rng::SplitMix64;

/// Questions every synthetic form carries regardless of template, so
/// cross-template pairs still overlap a little.
const COMMON_QUESTIONS: [&str; 2] = ["Date:", "Signature:"];

#[derive(Debug, Clone)]
pub struct FormSpec {
    pub templates: usize,
    pub copies_per_template: usize,
    /// Template-specific questions per form (plus the common ones).
    pub questions_per_template: usize,
    /// Copies (from the end) of each template that go to the test split.
    pub test_copies_per_template: usize,
    /// When true, every copy of a template carries the same answers.
    pub shared_values: bool,
    pub seed: u64,
}

impl Default for FormSpec {
    fn default() -> Self {
        Self {
            templates: 10,
            copies_per_template: 4,
            questions_per_template: 6,
            test_copies_per_template: 1,
            shared_values: true,
            seed: 0,
        }
    }
}

/// Lays out entity texts as one line of word tokens each.
fn add_entity(doc: &mut Document, label: &str, text: &str, line: u32) {
    let mut x = 10u32;
    let y = 20 + line * 30;
    let mut tokens = Vec::new();
    for word in text.split_whitespace() {
        let w = 8 * word.chars().count() as u32;
        tokens.push(Token {
            text: word.to_string(),
            bbox: BoundingBox {
                x0: x,
                y0: y,
                x1: x + w,
                y1: y + 20,
            },
        });
        x += w + 6;
    }
    doc.tokens.extend(tokens.iter().cloned());
    doc.entities.push(Entity {
        entity_id: doc.entities.len() as u64,
        label: label.to_string(),
        text: text.to_string(),
        tokens,
        linking: Vec::new(),
    });
}

/// Document id of copy `c` of template `t`.
pub fn form_id(t: usize, c: usize) -> String {
    format!("form_t{t:03}_c{c:02}")
}

/// FUNSD-style forms: template `t` asks its own questions plus the common
/// ones; each copy answers them.
pub fn synthetic_forms(spec: &FormSpec) -> Corpus {
    let mut rng = SplitMix64::new(spec.seed);
    let mut docs = Vec::new();
    for t in 0..spec.templates {
        let questions: Vec<String> = (0..spec.questions_per_template)
            .map(|j| format!("T{t} field {j}:"))
            .chain(COMMON_QUESTIONS.iter().map(|q| q.to_string()))
            .collect();
        let template_values: Vec<String> = (0..questions.len())
            .map(|_| format!("value {}", rng.below(1_000_000)))
            .collect();
        for c in 0..spec.copies_per_template {
            let split = if c + spec.test_copies_per_template >= spec.copies_per_template {
                OriginSplit::Test
            } else {
                OriginSplit::Train
            };
            let mut doc = Document::new(form_id(t, c), Dataset::Funsd, split);
            add_entity(&mut doc, "header", &format!("FORM {t}"), 0);
            for (j, q) in questions.iter().enumerate() {
                let value = if spec.shared_values {
                    template_values[j].clone()
                } else {
                    format!("value {}", rng.below(1_000_000))
                };
                add_entity(&mut doc, "question", q, 2 * j as u32 + 1);
                add_entity(&mut doc, "answer", &value, 2 * j as u32 + 2);
            }
            docs.push(doc);
        }
    }
    Corpus::new(Dataset::Funsd, docs).expect("synthetic ids are unique")
}

/// SROIE-style receipts: business `b` issues `sizes[b]` receipts; the last
/// `test_per_business` of each go to test.
pub fn synthetic_receipts(sizes: &[usize], test_per_business: usize, seed: u64) -> Corpus {
    let mut rng = SplitMix64::new(seed);
    let mut docs = Vec::new();
    for (b, &n) in sizes.iter().enumerate() {
        let company = format!("SHOP {b} SDN BHD");
        let address = format!("NO {}, JALAN {b}, KUALA LUMPUR", b + 1);
        for c in 0..n {
            let split = if c + test_per_business >= n {
                OriginSplit::Test
            } else {
                OriginSplit::Train
            };
            let mut doc = Document::new(format!("rcpt_b{b:03}_{c:03}"), Dataset::Sroie, split);
            let total = format!("{}.{:02}", rng.below(200), rng.below(100));
            let date = format!("{:02}/{:02}/2018", 1 + rng.below(28), 1 + rng.below(12));
            for (i, (label, text)) in [
                ("company", company.as_str()),
                ("date", date.as_str()),
                ("address", address.as_str()),
                ("total", total.as_str()),
            ]
            .into_iter()
            .enumerate()
            {
                doc.tokens.push(Token {
                    text: text.to_string(),
                    bbox: BoundingBox {
                        x0: 10,
                        y0: 20 + 30 * i as u32,
                        x1: 300,
                        y1: 40 + 30 * i as u32,
                    },
                });
                doc.entities.push(Entity {
                    entity_id: i as u64,
                    label: label.to_string(),
                    text: text.to_string(),
                    tokens: Vec::new(),
                    linking: Vec::new(),
                });
            }
            docs.push(doc);
        }
    }
    Corpus::new(Dataset::Sroie, docs).expect("synthetic ids are unique")
}

/// A form with the given questions, each answered with `value <i>`.
pub fn form_with_questions(doc_id: &str, split: OriginSplit, questions: &[String]) -> Document {
    let mut doc = Document::new(doc_id, Dataset::Funsd, split);
    for (j, q) in questions.iter().enumerate() {
        add_entity(&mut doc, "question", q, 2 * j as u32);
        add_entity(&mut doc, "answer", &format!("value {j}"), 2 * j as u32 + 1);
    }
    doc
}

/// Pairs of look-alike templates for threshold tuning, with the true
/// template groups.
///
/// Templates `2p` and `2p+1` share six questions and own four each. Copy 0
/// of a template asks all ten; copy 1 drops the first shared and the first
/// own question. Same-template copies overlap at 0.8 and cross-template
/// pairs at 0.625 or below, so 0.7 separates them while 0.5 merges the
/// look-alikes and 0.9 splits every template.
pub fn near_template_forms(pairs: usize) -> (Corpus, Vec<Vec<String>>) {
    let mut docs = Vec::new();
    let mut truth = Vec::new();
    for p in 0..pairs {
        for side in 0..2 {
            let t = 2 * p + side;
            let shared = (0..6).map(|j| format!("Pair {p} shared {j}"));
            let own = (0..4).map(|j| format!("Template {t} own {j}"));
            let full: Vec<String> = shared.chain(own).collect();
            let reduced: Vec<String> = full
                .iter()
                .enumerate()
                .filter(|(j, _)| *j != 0 && *j != 6)
                .map(|(_, q)| q.clone())
                .collect();
            let ids = [form_id(t, 0), form_id(t, 1)];
            docs.push(form_with_questions(&ids[0], OriginSplit::Train, &full));
            docs.push(form_with_questions(&ids[1], OriginSplit::Test, &reduced));
            truth.push(ids.to_vec());
        }
    }
    let corpus = Corpus::new(Dataset::Funsd, docs).expect("synthetic ids are unique");
    (corpus, truth)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::validate_document;

    #[test]
    fn forms_are_valid_and_split() {
        let corpus = synthetic_forms(&FormSpec::default());
        assert_eq!(corpus.len(), 40);
        assert!(corpus.documents.iter().all(|d| validate_document(d).is_empty()));
        let test = corpus
            .documents
            .iter()
            .filter(|d| d.origin_split == OriginSplit::Test)
            .count();
        assert_eq!(test, 10);
    }

    #[test]
    fn receipts_shape() {
        let corpus = synthetic_receipts(&[3, 1], 1, 0);
        assert_eq!(corpus.len(), 4);
        assert_eq!(corpus.documents[0].entities.len(), 4);
    }
}
