// Pick a similarity threshold by pairwise F1 against hand-labeled
// template groups.

use std::error::Error;

use kie_leakage::synthetic::near_template_forms;
use kie_leakage::{tune_threshold, GroundTruthGrouping, Metric};

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let (corpus, truth) = near_template_forms(3);
    let gt = GroundTruthGrouping::from_groups(truth)?;
    let table = tune_threshold(&corpus, Metric::QuestionOverlap, &gt, &[0.5, 0.7, 0.9])?;
    print!("{}", table.to_csv());
    let best = table.selected().expect("non-empty grid");
    println!("selected threshold {}", best.threshold);
    assert_eq!(best.threshold, 0.7);
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
