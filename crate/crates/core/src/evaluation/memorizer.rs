use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use super::{entity_f1, gold_entities, EvalError, EvalMetrics, ExtractedEntity};
use crate::corpus::{Corpus, Document};
use crate::grouping::GroupingResult;
use crate::resampling::{Split, SplitManifest};
use crate::similarity::business_key;
use crate::text::normalize_text;

/// Maps a document to the template identity the memorizer keys on. `None`
/// means the document has no usable signature and is never matched.
pub trait TemplateSignature {
    fn signature(&self, doc: &Document) -> Option<String>;
}

impl<F> TemplateSignature for F
where
    F: Fn(&Document) -> Option<String>,
{
    fn signature(&self, doc: &Document) -> Option<String> {
        self(doc)
    }
}

/// Signature = id of the template group holding the document.
#[derive(Debug, Clone)]
pub struct GroupSignature {
    group_of: HashMap<String, usize>,
}

impl GroupSignature {
    pub fn new(groups: &GroupingResult) -> Self {
        Self {
            group_of: groups
                .membership()
                .into_iter()
                .map(|(doc, g)| (doc.to_string(), g))
                .collect(),
        }
    }
}

impl TemplateSignature for GroupSignature {
    fn signature(&self, doc: &Document) -> Option<String> {
        self.group_of.get(&doc.doc_id).map(|g| format!("group:{g}"))
    }
}

/// Signature = receipt business key.
#[derive(Debug, Clone, Copy, Default)]
pub struct BusinessKeySignature;

impl TemplateSignature for BusinessKeySignature {
    fn signature(&self, doc: &Document) -> Option<String> {
        let key = business_key(doc);
        (!key.is_fallback()).then(|| format!("{:?}:{}", key.source, key.key))
    }
}

/// Replays the entities of one training document per template signature.
#[derive(Debug, Clone)]
pub struct MemorizerModel<S> {
    signature: S,
    index: BTreeMap<String, Vec<(String, String)>>,
}

impl<S: TemplateSignature> MemorizerModel<S> {
    pub fn len(&self) -> usize {
        self.index.len()
    }

    pub fn is_empty(&self) -> bool {
        self.index.is_empty()
    }

    /// Stored `(label, normalized text)` pairs for a signature.
    pub fn stored(&self, signature: &str) -> Option<&[(String, String)]> {
        self.index.get(signature).map(Vec::as_slice)
    }
}

/// Indexes training documents by signature; for each signature the
/// document with the smallest id wins.
pub fn fit_memorizer<'a, S, I>(train_docs: I, signature: S) -> MemorizerModel<S>
where
    S: TemplateSignature,
    I: IntoIterator<Item = &'a Document>,
{
    let mut docs: Vec<&Document> = train_docs.into_iter().collect();
    docs.sort_by(|a, b| a.doc_id.cmp(&b.doc_id));
    let mut index = BTreeMap::new();
    for doc in docs {
        let Some(sig) = signature.signature(doc) else {
            continue;
        };
        index.entry(sig).or_insert_with(|| {
            doc.entities
                .iter()
                .map(|e| (e.label.clone(), normalize_text(&e.text)))
                .filter(|(_, t)| !t.is_empty())
                .collect()
        });
    }
    MemorizerModel { signature, index }
}

/// Stored entities for the document's signature, re-addressed to `doc`;
/// empty when the signature was never seen in training.
pub fn predict_memorizer<S: TemplateSignature>(
    model: &MemorizerModel<S>,
    doc: &Document,
) -> Vec<ExtractedEntity> {
    model
        .signature
        .signature(doc)
        .and_then(|sig| model.index.get(&sig))
        .map(|stored| {
            stored
                .iter()
                .map(|(label, text)| ExtractedEntity {
                    doc_id: doc.doc_id.clone(),
                    label: label.clone(),
                    text: text.clone(),
                })
                .collect()
        })
        .unwrap_or_default()
}

fn docs_in<'a>(
    corpus: &'a Corpus,
    manifest: &SplitManifest,
    split: Split,
) -> Result<Vec<&'a Document>, EvalError> {
    let mut out = Vec::new();
    for doc in &corpus.documents {
        match manifest.assignments.get(&doc.doc_id) {
            Some(s) if *s == split => out.push(doc),
            Some(_) => {}
            None => return Err(EvalError::UncoveredDocument(doc.doc_id.clone())),
        }
    }
    Ok(out)
}

/// Fits the group-signature memorizer on the manifest's train split and
/// scores it on the test split.
pub fn evaluate_memorizer(
    corpus: &Corpus,
    groups: &GroupingResult,
    manifest: &SplitManifest,
) -> Result<EvalMetrics, EvalError> {
    let train = docs_in(corpus, manifest, Split::Train)?;
    let test = docs_in(corpus, manifest, Split::Test)?;
    let model = fit_memorizer(train, GroupSignature::new(groups));
    let mut gold = Vec::new();
    let mut pred = Vec::new();
    for doc in test {
        gold.extend(gold_entities(doc));
        pred.extend(predict_memorizer(&model, doc));
    }
    Ok(entity_f1(&gold, &pred))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GapReport {
    pub f1_leaky: f64,
    pub f1_clean: f64,
    pub gap: f64,
}

/// Memorizer F1 on a leaky split versus a group-atomic one.
pub fn leakage_gap_experiment(
    corpus: &Corpus,
    groups: &GroupingResult,
    leaky: &SplitManifest,
    clean: &SplitManifest,
) -> Result<GapReport, EvalError> {
    let f1_leaky = evaluate_memorizer(corpus, groups, leaky)?.f1;
    let f1_clean = evaluate_memorizer(corpus, groups, clean)?.f1;
    Ok(GapReport {
        f1_leaky,
        f1_clean,
        gap: f1_leaky - f1_clean,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{Dataset, Entity, OriginSplit};

    fn receipt(id: &str, company: &str, total: &str) -> Document {
        let mut d = Document::new(id, Dataset::Sroie, OriginSplit::Train);
        for (i, (label, text)) in [("company", company), ("total", total)].into_iter().enumerate() {
            d.entities.push(Entity {
                entity_id: i as u64,
                label: label.into(),
                text: text.into(),
                tokens: vec![],
                linking: vec![],
            });
        }
        d
    }

    #[test]
    fn first_document_wins() {
        let b = receipt("b", "Shop", "2.00");
        let a = receipt("a", "Shop", "1.00");
        let model = fit_memorizer([&b, &a], BusinessKeySignature);
        assert_eq!(model.len(), 1);
        let stored = model.stored("Company:shop").unwrap();
        assert!(stored.contains(&("total".to_string(), "1.00".to_string())));
    }

    #[test]
    fn disjoint_signatures_and_empty_training() {
        let docs = [receipt("a", "A", "1"), receipt("b", "B", "1"), receipt("c", "C", "1")];
        assert_eq!(fit_memorizer(docs.iter(), BusinessKeySignature).len(), 3);
        assert!(fit_memorizer(std::iter::empty(), BusinessKeySignature).is_empty());
    }

    #[test]
    fn replay_and_unseen() {
        let train = receipt("a", "Shop", "1.00");
        let model = fit_memorizer([&train], BusinessKeySignature);

        let twin = receipt("t1", "SHOP", "1.00");
        let pred = predict_memorizer(&model, &twin);
        let m = entity_f1(&gold_entities(&twin), &pred);
        assert_eq!(m.f1, 1.0);

        let stranger = receipt("t2", "Other", "1.00");
        assert!(predict_memorizer(&model, &stranger).is_empty());
        assert_eq!(entity_f1(&gold_entities(&stranger), &[]).f1, 0.0);
    }

    #[test]
    fn differing_values_hit_only_where_equal() {
        let train = receipt("a", "Shop", "1.00");
        let model = fit_memorizer([&train], BusinessKeySignature);
        let test = receipt("t", "Shop", "7.50");
        let m = entity_f1(&gold_entities(&test), &predict_memorizer(&model, &test));
        // company matches, total does not: tp 1, fp 1, fn 1
        assert_eq!((m.tp, m.fp, m.fn_), (1, 1, 1));
        assert_eq!(m.f1, 0.5);
    }

    #[test]
    fn closures_are_signatures() {
        let doc = receipt("a", "X", "1");
        let model = fit_memorizer([&doc], |_: &Document| Some("all".to_string()));
        assert_eq!(model.len(), 1);
    }
}
