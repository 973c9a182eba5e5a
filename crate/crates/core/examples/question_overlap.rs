// Pairwise similarity: question overlap for forms, shingle Jaccard for
// free text, and the candidate pairs blocking produces.

use std::error::Error;

use kie_leakage::synthetic::form_with_questions;
use kie_leakage::{
    candidate_pairs, extract_question_set, normalize_text, question_overlap, shingle_jaccard,
    Corpus, Dataset, Metric, OriginSplit,
};

fn questions(qs: &[&str]) -> Vec<String> {
    qs.iter().map(|q| q.to_string()).collect()
}

pub fn run_example() -> Result<(), Box<dyn Error>> {
    println!("normalized: {:?}", normalize_text("NAME OF  ACCOUNT:"));

    let a = form_with_questions(
        "a",
        OriginSplit::Train,
        &questions(&["Name:", "Date:", "Fax:", "Phone:", "To:"]),
    );
    let b = form_with_questions(
        "b",
        OriginSplit::Test,
        &questions(&["NAME", "date", "Fax :", "Phone", "From:"]),
    );
    let c = form_with_questions("c", OriginSplit::Test, &questions(&["Brand", "Budget"]));

    let (qa, qb, qc) = (extract_question_set(&a), extract_question_set(&b), extract_question_set(&c));
    println!("overlap(a, b) = {}", question_overlap(&qa, &qb));
    println!("overlap(a, c) = {}", question_overlap(&qa, &qc));
    assert_eq!(question_overlap(&qa, &qb), 0.8);

    println!("shingle(a, b, k=1) = {:.3}", shingle_jaccard(&a, &b, 1)?);

    // Blocking only emits pairs that share at least one question.
    let corpus = Corpus::new(Dataset::Funsd, vec![a, b, c])?;
    let pairs = candidate_pairs(&corpus, Metric::QuestionOverlap)?;
    println!("candidate pairs: {pairs:?}");
    assert_eq!(pairs, vec![("a".to_string(), "b".to_string())]);
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
