// Group forms into templates at the 0.7 overlap threshold and print the
// group-size histogram.

use std::error::Error;

use kie_leakage::synthetic::{synthetic_forms, FormSpec};
use kie_leakage::{group_corpus, group_size_histogram, Metric};

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let corpus = synthetic_forms(&FormSpec {
        templates: 6,
        copies_per_template: 3,
        ..FormSpec::default()
    });
    let groups = group_corpus(&corpus, Metric::QuestionOverlap, 0.7)?;
    for g in groups.groups.iter().take(3) {
        println!("group {}: {:?}", g.group_id, g.members);
    }
    let hist = group_size_histogram(&groups);
    print!("{}", hist.to_csv());
    println!("digest {}", groups.digest());
    assert_eq!(groups.groups.len(), 6);
    assert_eq!(groups.max_group_size(), 3);

    // A stricter threshold can only split groups further.
    let strict = group_corpus(&corpus, Metric::QuestionOverlap, 0.95)?;
    assert!(strict.refines(&groups));
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
