// Receipts group by business: normalized company name, falling back to
// the address.

use std::error::Error;

use kie_leakage::grouping::SROIE_BUCKET_ANCHORS;
use kie_leakage::synthetic::synthetic_receipts;
use kie_leakage::{business_key, group_corpus, group_size_histogram, Metric};

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let corpus = synthetic_receipts(&[12, 5, 1, 1, 1], 1, 7);
    let key = business_key(&corpus.documents[0]);
    println!("{} -> {:?} ({:?})", corpus.documents[0].doc_id, key.key, key.source);

    let groups = group_corpus(&corpus, Metric::BusinessKey, 1.0)?;
    let hist = group_size_histogram(&groups);
    print!("{}", hist.to_csv());
    print!("binned:\n{}", hist.rebin(&SROIE_BUCKET_ANCHORS).to_csv());
    assert_eq!(groups.max_group_size(), 12);
    assert_eq!(hist.count(1), 3);
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
