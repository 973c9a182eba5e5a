// Count test documents whose template also appears in training.

use std::error::Error;

use kie_leakage::resampling::leakage_report_for_manifest;
use kie_leakage::synthetic::{synthetic_forms, FormSpec};
use kie_leakage::{group_corpus, leakage_report, resample_splits, Metric, Ratios};

pub fn run_example() -> Result<(), Box<dyn Error>> {
    // Ten templates, the last copy of each in test: every test form leaks.
    let corpus = synthetic_forms(&FormSpec::default());
    let groups = group_corpus(&corpus, Metric::QuestionOverlap, 0.7)?;
    let report = leakage_report(&groups, &corpus)?;
    println!(
        "shipped split: {}/{} test documents leaked ({:.0}%)",
        report.n_leaked_test,
        report.n_test,
        100.0 * report.leak_fraction
    );
    assert_eq!(report.n_leaked_test, 10);

    let clean = resample_splits(&groups, Ratios::new(0.8, 0.0, 0.2)?, 42)?;
    let after = leakage_report_for_manifest(&groups, &clean);
    println!("group-atomic resample: {}/{} leaked", after.n_leaked_test, after.n_test);
    assert_eq!(after.n_leaked_test, 0);
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
