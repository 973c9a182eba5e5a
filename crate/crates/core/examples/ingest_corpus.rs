// Parse FUNSD and SROIE annotations, write a corpus tree to disk and load
// it back.

use std::error::Error;

use kie_leakage::corpus::write_corpus_tree;
use kie_leakage::synthetic::{synthetic_forms, FormSpec};
use kie_leakage::{
    load_corpus, parse_funsd_document, parse_sroie_document, validate_document, Dataset,
    Document, OriginSplit,
};

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let funsd = br#"{"form": [
        {"id": 0, "text": "Date:", "label": "question", "box": [10, 10, 50, 20],
         "words": [{"text": "Date:", "box": [10, 10, 50, 20]}], "linking": [[0, 1]]},
        {"id": 1, "text": "12/03/1998", "label": "answer", "box": [60, 10, 140, 20],
         "words": [{"text": "12/03/1998", "box": [60, 10, 140, 20]}], "linking": [[0, 1]]}
    ]}"#;
    let form = parse_funsd_document(funsd, "0000971160", OriginSplit::Train)?;
    println!("form {}: {} entities, {} tokens", form.doc_id, form.entities.len(), form.tokens.len());

    let ocr = b"72,25,326,25,326,64,72,64,TAN WOON YANN\n50,459,440,459,440,500,50,500,TOTAL 9.00\n";
    let labels = br#"{"company": "TAN WOON YANN", "date": "25/12/2018", "address": "KUALA LUMPUR", "total": "9.00"}"#;
    let receipt = parse_sroie_document(ocr, labels, "X00016469612", OriginSplit::Test)?;
    println!("receipt {}: {} entities, {} tokens", receipt.doc_id, receipt.entities.len(), receipt.tokens.len());
    assert!(validate_document(&receipt).is_empty());

    // Canonical JSON is a lossless interchange form.
    let back = Document::from_canonical_json(&form.to_canonical_json())?;
    assert_eq!(back, form);

    let corpus = synthetic_forms(&FormSpec::default());
    let dir = tempfile::tempdir()?;
    write_corpus_tree(&corpus, dir.path())?;
    let (loaded, report) = load_corpus(dir.path(), Dataset::Funsd)?;
    println!(
        "loaded {} documents, {} dropped lines, {} file errors",
        report.documents,
        report.dropped_lines,
        report.errors.len()
    );
    assert_eq!(loaded, corpus);
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
