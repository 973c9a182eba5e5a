use std::fs;
use std::path::Path;

use serde_json::{json, Value};

use super::{Corpus, Dataset, Document, IngestError, OriginSplit};

/// Serializes a document back into the FUNSD annotation shape.
///
/// Item boxes are the hull of the item's tokens (zero box when it has none).
pub fn write_funsd_document(doc: &Document) -> Vec<u8> {
    let items: Vec<Value> = doc
        .entities
        .iter()
        .map(|e| {
            let hull = e.tokens.iter().fold(None, |acc: Option<[u32; 4]>, t| {
                let b = t.bbox;
                Some(match acc {
                    None => [b.x0, b.y0, b.x1, b.y1],
                    Some([x0, y0, x1, y1]) => [x0.min(b.x0), y0.min(b.y0), x1.max(b.x1), y1.max(b.y1)],
                })
            });
            json!({
                "id": e.entity_id,
                "text": e.text,
                "box": hull.unwrap_or([0, 0, 0, 0]),
                "label": e.label,
                "words": e.tokens.iter().map(|t| json!({
                    "text": t.text,
                    "box": [t.bbox.x0, t.bbox.y0, t.bbox.x1, t.bbox.y1],
                })).collect::<Vec<_>>(),
                "linking": e.linking,
            })
        })
        .collect();
    serde_json::to_vec_pretty(&json!({ "form": items })).expect("json encoding")
}

/// Serializes a receipt into `(box file, entities file)` contents. Token
/// boxes are written as axis-aligned quadrilaterals.
pub fn write_sroie_document(doc: &Document) -> (Vec<u8>, Vec<u8>) {
    let mut ocr = String::new();
    for t in &doc.tokens {
        let b = t.bbox;
        ocr.push_str(&format!(
            "{},{},{},{},{},{},{},{},{}\n",
            b.x0, b.y0, b.x1, b.y0, b.x1, b.y1, b.x0, b.y1, t.text
        ));
    }
    let entities: serde_json::Map<String, Value> = doc
        .entities
        .iter()
        .map(|e| (e.label.clone(), Value::String(e.text.clone())))
        .collect();
    let entities = serde_json::to_vec_pretty(&Value::Object(entities)).expect("json encoding");
    (ocr.into_bytes(), entities)
}

fn split_dir(split: OriginSplit, dataset: Dataset) -> &'static str {
    match (split, dataset) {
        (OriginSplit::Test, Dataset::Sroie) => "test",
        (_, Dataset::Sroie) => "train",
        (OriginSplit::Test, _) => "testing_data",
        _ => "training_data",
    }
}

/// Writes a corpus to disk in the layout [`super::load_corpus`] reads.
/// Unassigned documents go to the training directory.
pub fn write_corpus_tree(corpus: &Corpus, root: &Path) -> Result<(), IngestError> {
    let io = |path: &Path, source| IngestError::Io {
        path: path.display().to_string(),
        source,
    };
    for doc in &corpus.documents {
        let split = root.join(split_dir(doc.origin_split, corpus.dataset));
        match corpus.dataset {
            Dataset::Funsd | Dataset::Generic => {
                let dir = split.join("annotations");
                fs::create_dir_all(&dir).map_err(|e| io(&dir, e))?;
                let path = dir.join(format!("{}.json", doc.doc_id));
                fs::write(&path, write_funsd_document(doc)).map_err(|e| io(&path, e))?;
            }
            Dataset::Sroie => {
                let (ocr, ents) = write_sroie_document(doc);
                for (sub, bytes) in [("box", ocr), ("entities", ents)] {
                    let dir = split.join(sub);
                    fs::create_dir_all(&dir).map_err(|e| io(&dir, e))?;
                    let path = dir.join(format!("{}.txt", doc.doc_id));
                    fs::write(&path, bytes).map_err(|e| io(&path, e))?;
                }
            }
        }
    }
    Ok(())
}
