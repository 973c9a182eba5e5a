use serde_json::Value;

use super::{BoundingBox, Dataset, Document, Entity, IngestError, OriginSplit, Token, SROIE_LABELS};

/// Parses one SROIE receipt: the OCR box file plus the key-field object.
///
/// Each OCR line is `x1,y1,x2,y2,x3,y3,x4,y4,text`. Exactly the first eight
/// fields are coordinates; everything after the eighth comma is the
/// transcription, commas included. The quadrilateral is collapsed to its
/// axis-aligned hull. Blank lines and empty transcriptions are dropped.
pub fn parse_sroie_document(
    ocr_raw: &[u8],
    entities_raw: &[u8],
    doc_id: &str,
    origin_split: OriginSplit,
) -> Result<Document, IngestError> {
    parse_sroie_counted(ocr_raw, entities_raw, doc_id, origin_split).map(|(doc, _)| doc)
}

pub(crate) fn parse_sroie_counted(
    ocr_raw: &[u8],
    entities_raw: &[u8],
    doc_id: &str,
    origin_split: OriginSplit,
) -> Result<(Document, usize), IngestError> {
    let mut doc = Document::new(doc_id, Dataset::Sroie, origin_split);
    let (tokens, dropped) = parse_ocr_lines(ocr_raw)?;
    doc.tokens = tokens;
    doc.entities = parse_entities(entities_raw)?;
    Ok((doc, dropped))
}

fn strip_bom(s: &str) -> &str {
    s.strip_prefix('\u{feff}').unwrap_or(s)
}

fn parse_ocr_lines(raw: &[u8]) -> Result<(Vec<Token>, usize), IngestError> {
    // SROIE box files are not reliably UTF-8.
    let text = String::from_utf8_lossy(raw);
    let mut tokens = Vec::new();
    let mut dropped = 0;
    for (idx, line) in strip_bom(&text).lines().enumerate() {
        if line.trim().is_empty() {
            dropped += 1;
            continue;
        }
        match parse_ocr_line(line, idx + 1)? {
            Some(token) => tokens.push(token),
            None => dropped += 1,
        }
    }
    Ok((tokens, dropped))
}

fn parse_ocr_line(line: &str, line_no: usize) -> Result<Option<Token>, IngestError> {
    let mut fields = line.splitn(9, ',');
    let mut coords = [0i64; 8];
    for (i, slot) in coords.iter_mut().enumerate() {
        let field = fields.next().ok_or_else(|| IngestError::MalformedOcrLine {
            line: line_no,
            detail: format!("only {i} coordinate fields"),
        })?;
        *slot = field
            .trim()
            .parse()
            .map_err(|_| IngestError::MalformedOcrLine {
                line: line_no,
                detail: format!("coordinate field {} is not an integer: `{field}`", i + 1),
            })?;
    }
    let text = fields.next().unwrap_or("");
    if text.trim().is_empty() {
        return Ok(None);
    }

    // Corners are (x, y) pairs; a few OCR boxes poke slightly past the page
    // edge, so negative values are clamped onto it.
    let xs = [coords[0], coords[2], coords[4], coords[6]].map(|v| v.max(0));
    let ys = [coords[1], coords[3], coords[5], coords[7]].map(|v| v.max(0));
    let min = |v: [i64; 4]| v.into_iter().min().unwrap_or(0);
    let max = |v: [i64; 4]| v.into_iter().max().unwrap_or(0);
    let bbox = BoundingBox::try_new(min(xs), min(ys), max(xs), max(ys)).map_err(|e| {
        IngestError::MalformedOcrLine {
            line: line_no,
            detail: e.to_string(),
        }
    })?;
    Ok(Some(Token {
        text: text.to_string(),
        bbox,
    }))
}

fn parse_entities(raw: &[u8]) -> Result<Vec<Entity>, IngestError> {
    let text = String::from_utf8_lossy(raw);
    let value: Value = serde_json::from_str(strip_bom(&text))
        .map_err(|e| IngestError::MalformedAnnotation(format!("entity file: {e}")))?;
    let object = value.as_object().ok_or_else(|| {
        IngestError::MalformedAnnotation("entity file is not a JSON object".to_string())
    })?;

    let mut entities = Vec::new();
    for label in SROIE_LABELS {
        let Some(value) = object.get(label) else {
            continue;
        };
        let text = value.as_str().ok_or_else(|| {
            IngestError::MalformedAnnotation(format!("entity `{label}` is not a string: {value}"))
        })?;
        entities.push(Entity {
            entity_id: entities.len() as u64,
            label: label.to_string(),
            text: text.to_string(),
            tokens: Vec::new(),
            linking: Vec::new(),
        });
    }
    Ok(entities)
}
