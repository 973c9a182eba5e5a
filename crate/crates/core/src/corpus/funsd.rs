use serde::Deserialize;

use super::{BoundingBox, Dataset, Document, Entity, IngestError, OriginSplit, Token};

#[derive(Deserialize)]
struct RawForm {
    form: Vec<RawItem>,
}

#[derive(Deserialize)]
struct RawItem {
    id: u64,
    text: String,
    #[serde(rename = "box")]
    bbox: Vec<i64>,
    label: String,
    words: Vec<RawWord>,
    linking: Vec<Vec<u64>>,
}

#[derive(Deserialize)]
struct RawWord {
    text: String,
    #[serde(rename = "box")]
    bbox: Vec<i64>,
}

fn parse_box(raw: &[i64], what: &str) -> Result<BoundingBox, IngestError> {
    match *raw {
        [x0, y0, x1, y1] => BoundingBox::try_new(x0, y0, x1, y1)
            .map_err(|e| IngestError::MalformedAnnotation(format!("{what}: {e}"))),
        _ => Err(IngestError::MalformedAnnotation(format!(
            "{what}: box has {} coordinates, expected 4",
            raw.len()
        ))),
    }
}

/// Parses one FUNSD annotation file.
///
/// Every item of the `form` list becomes one [`Entity`]; its words become
/// tokens. Words with empty text are dropped.
pub fn parse_funsd_document(
    raw: &[u8],
    doc_id: &str,
    origin_split: OriginSplit,
) -> Result<Document, IngestError> {
    parse_funsd_counted(raw, doc_id, origin_split, Dataset::Funsd).map(|(doc, _)| doc)
}

/// Same as [`parse_funsd_document`], also returning the number of dropped
/// empty words. `dataset` selects the label set (`Generic` accepts any).
pub(crate) fn parse_funsd_counted(
    raw: &[u8],
    doc_id: &str,
    origin_split: OriginSplit,
    dataset: Dataset,
) -> Result<(Document, usize), IngestError> {
    let form: RawForm =
        serde_json::from_slice(raw).map_err(|e| IngestError::MalformedAnnotation(e.to_string()))?;

    let mut doc = Document::new(doc_id, dataset, origin_split);
    let mut dropped = 0;
    for item in form.form {
        if !dataset.accepts_label(&item.label) {
            return Err(IngestError::UnknownLabel {
                label: item.label,
                dataset,
            });
        }
        parse_box(&item.bbox, &format!("item {}", item.id))?;

        let mut tokens = Vec::with_capacity(item.words.len());
        for word in item.words {
            let bbox = parse_box(&word.bbox, &format!("word in item {}", item.id))?;
            if word.text.trim().is_empty() {
                dropped += 1;
                continue;
            }
            tokens.push(Token {
                text: word.text,
                bbox,
            });
        }

        let linking = item
            .linking
            .into_iter()
            .map(|pair| match pair[..] {
                [from, to] => Ok([from, to]),
                _ => Err(IngestError::MalformedAnnotation(format!(
                    "item {}: linking entry has {} ids, expected 2",
                    item.id,
                    pair.len()
                ))),
            })
            .collect::<Result<Vec<_>, _>>()?;

        doc.tokens.extend(tokens.iter().cloned());
        doc.entities.push(Entity {
            entity_id: item.id,
            label: item.label,
            text: item.text,
            tokens,
            linking,
        });
    }
    Ok((doc, dropped))
}

#[cfg(test)]
mod tests {
    use super::*;

    const ONE_ITEM: &str = r#"{"form": [{"id": 0, "text": "NAME OF ACCOUNT", "box": [10, 20, 120, 40],
        "label": "question",
        "words": [{"text": "NAME", "box": [10, 20, 50, 40]}, {"text": "OF ACCOUNT", "box": [55, 20, 120, 40]}],
        "linking": [[0, 1]]}]}"#;

    #[test]
    fn single_question_item() {
        let doc = parse_funsd_document(ONE_ITEM.as_bytes(), "f1", OriginSplit::Train).unwrap();
        assert_eq!(doc.entities.len(), 1);
        assert_eq!(doc.tokens.len(), 2);
        assert_eq!(doc.entities[0].text, "NAME OF ACCOUNT");
        assert_eq!(doc.entities[0].label, "question");
        assert_eq!(doc.entities[0].linking, vec![[0, 1]]);
        assert_eq!(doc.origin_split, OriginSplit::Train);
    }

    #[test]
    fn empty_form() {
        let doc = parse_funsd_document(br#"{"form": []}"#, "f", OriginSplit::Test).unwrap();
        assert!(doc.entities.is_empty());
        assert!(doc.tokens.is_empty());
    }

    #[test]
    fn inverted_box_is_malformed() {
        let raw = r#"{"form": [{"id": 0, "text": "x", "box": [10, 20, 5, 30], "label": "other",
            "words": [], "linking": []}]}"#;
        let err = parse_funsd_document(raw.as_bytes(), "f", OriginSplit::Train).unwrap_err();
        assert!(matches!(err, IngestError::MalformedAnnotation(_)), "{err}");
    }

    #[test]
    fn wrong_box_arity() {
        let raw = r#"{"form": [{"id": 0, "text": "x", "box": [1, 2, 3], "label": "other",
            "words": [], "linking": []}]}"#;
        assert!(matches!(
            parse_funsd_document(raw.as_bytes(), "f", OriginSplit::Train),
            Err(IngestError::MalformedAnnotation(_))
        ));
    }

    #[test]
    fn missing_key_is_malformed() {
        let raw = r#"{"form": [{"id": 0, "text": "x", "box": [1, 2, 3, 4], "label": "other", "words": []}]}"#;
        assert!(matches!(
            parse_funsd_document(raw.as_bytes(), "f", OriginSplit::Train),
            Err(IngestError::MalformedAnnotation(_))
        ));
        assert!(matches!(
            parse_funsd_document(b"{}", "f", OriginSplit::Train),
            Err(IngestError::MalformedAnnotation(_))
        ));
    }

    #[test]
    fn unknown_label_rejected() {
        let raw = r#"{"form": [{"id": 0, "text": "x", "box": [1, 2, 3, 4], "label": "signature",
            "words": [], "linking": []}]}"#;
        assert!(matches!(
            parse_funsd_document(raw.as_bytes(), "f", OriginSplit::Train),
            Err(IngestError::UnknownLabel { .. })
        ));
    }

    #[test]
    fn extra_keys_ignored_and_empty_words_dropped() {
        let raw = r#"{"form": [{"id": 3, "text": "Date", "box": [1, 2, 3, 4], "label": "question",
            "words": [{"text": "Date", "box": [1, 2, 3, 4]}, {"text": "", "box": [1, 2, 3, 4]}],
            "linking": [], "extra": true}], "version": 2}"#;
        let (doc, dropped) =
            parse_funsd_counted(raw.as_bytes(), "f", OriginSplit::Train, Dataset::Funsd).unwrap();
        assert_eq!(doc.tokens.len(), 1);
        assert_eq!(dropped, 1);
    }
}
