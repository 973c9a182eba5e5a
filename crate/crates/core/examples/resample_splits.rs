// Group-atomic train/val/test packing, train/val folds and the manifest
// file format.

use std::error::Error;

use kie_leakage::resampling::{make_group_cv_folds, ratio_deviations};
use kie_leakage::synthetic::synthetic_receipts;
use kie_leakage::{group_corpus, resample_splits, verify_manifest, Metric, Ratios, Split, SplitManifest};

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let corpus = synthetic_receipts(&[9, 6, 4, 3, 3, 2, 2, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1], 1, 3);
    let groups = group_corpus(&corpus, Metric::BusinessKey, 1.0)?;
    let ratios = Ratios::from_test_fraction(0.25)?;
    let manifest = resample_splits(&groups, ratios, 42)?;
    assert!(verify_manifest(&manifest, &groups).is_empty());
    for d in ratio_deviations(&manifest) {
        println!("{}: {} documents (target {:.1})", d.split, d.realized, d.target);
    }

    let tsv = manifest.to_tsv();
    print!("{}", tsv.lines().take(6).collect::<Vec<_>>().join("\n"));
    println!();
    assert_eq!(SplitManifest::from_tsv(&tsv)?, manifest);

    let folds = make_group_cv_folds(&manifest, &groups, 4, 0.8, 42)?;
    for fold in &folds.folds {
        println!(
            "fold {}: train {} val {} test {}",
            fold.fold.unwrap_or(0),
            fold.count(Split::Train),
            fold.count(Split::Val),
            fold.count(Split::Test)
        );
    }
    // Same inputs, same bytes.
    assert_eq!(resample_splits(&groups, ratios, 42)?.to_tsv(), tsv);
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
