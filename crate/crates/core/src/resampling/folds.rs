use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::pack::{pack, packing_order};
use super::{tidy, Ratios, ResampleError, Split, SplitManifest};
use crate::grouping::GroupingResult;
use crate::rng::SplitMix64;

/// Train/val re-splits of the non-test documents. Test membership is the
/// same in every fold.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CvFolds {
    pub folds: Vec<SplitManifest>,
    pub train_fraction: f64,
    pub group_atomic: bool,
}

fn check(k: usize, train_fraction: f64) -> Result<(), ResampleError> {
    if k == 0 {
        return Err(ResampleError::InvalidParameter("k must be at least 1".into()));
    }
    if !(train_fraction > 0.0 && train_fraction < 1.0) {
        return Err(ResampleError::InvalidParameter(format!(
            "train fraction must lie in (0, 1), got {train_fraction}"
        )));
    }
    Ok(())
}

fn fold_manifest(
    base: &SplitManifest,
    fold: usize,
    train_fraction: f64,
    seed: u64,
    trainval: impl IntoIterator<Item = (String, Split)>,
) -> Result<SplitManifest, ResampleError> {
    let mut assignments: BTreeMap<String, Split> = base
        .assignments
        .iter()
        .filter(|(_, s)| **s == Split::Test)
        .map(|(d, s)| (d.clone(), *s))
        .collect();
    assignments.extend(trainval);
    let rest = 1.0 - base.ratios.test;
    let ratios = Ratios::new(
        tidy(train_fraction * rest),
        tidy((1.0 - base.ratios.test - train_fraction * rest).max(0.0)),
        base.ratios.test,
    )?;
    let mut m = SplitManifest::new(assignments, seed, ratios);
    m.grouping = base.grouping.clone();
    m.provenance = base.provenance.clone();
    m.fold = Some(fold);
    Ok(m)
}

/// `k` independent seeded train/val draws over the non-test documents.
///
/// Fold `i` shuffles the doc-id-sorted non-test documents with the stream
/// `SplitMix64::derive(seed, i)` and puts the first
/// `round(n * train_fraction)` into train. Folds are not group-atomic; see
/// [`make_group_cv_folds`] for that.
pub fn make_cv_folds(
    manifest: &SplitManifest,
    k: usize,
    train_fraction: f64,
    seed: u64,
) -> Result<CvFolds, ResampleError> {
    check(k, train_fraction)?;
    let pool: Vec<&String> = manifest
        .assignments
        .iter()
        .filter(|(_, s)| **s != Split::Test)
        .map(|(d, _)| d)
        .collect();
    let n_train = ((pool.len() as f64) * train_fraction).round() as usize;
    let mut folds = Vec::with_capacity(k);
    for fold in 0..k {
        let mut order = pool.clone();
        SplitMix64::derive(seed, fold as u64).shuffle(&mut order);
        let trainval = order.into_iter().enumerate().map(|(i, d)| {
            (d.clone(), if i < n_train { Split::Train } else { Split::Val })
        });
        folds.push(fold_manifest(manifest, fold, train_fraction, seed, trainval)?);
    }
    Ok(CvFolds {
        folds,
        train_fraction,
        group_atomic: false,
    })
}

/// Like [`make_cv_folds`] but packs whole template groups into train or
/// val with the same deficit rule as the main resampler.
pub fn make_group_cv_folds(
    manifest: &SplitManifest,
    groups: &GroupingResult,
    k: usize,
    train_fraction: f64,
    seed: u64,
) -> Result<CvFolds, ResampleError> {
    check(k, train_fraction)?;
    // Restrict groups to documents in the train/val pool.
    let pooled: Vec<Vec<String>> = groups
        .groups
        .iter()
        .map(|g| {
            g.members
                .iter()
                .filter(|d| matches!(manifest.assignments.get(*d), Some(Split::Train | Split::Val)))
                .cloned()
                .collect::<Vec<_>>()
        })
        .filter(|g| !g.is_empty())
        .collect();
    let n: usize = pooled.iter().map(Vec::len).sum();
    let targets = [(1.0 - train_fraction) * n as f64, train_fraction * n as f64];
    let slots = [Split::Val, Split::Train];
    let members: Vec<&[String]> = pooled.iter().map(Vec::as_slice).collect();

    let mut folds = Vec::with_capacity(k);
    for fold in 0..k {
        let mut rng = SplitMix64::derive(seed, fold as u64);
        let order = packing_order(&members, &mut rng);
        let chosen = pack(&order, &targets);
        let trainval = order
            .iter()
            .zip(chosen)
            .flat_map(|(g, slot)| g.iter().map(move |d| (d.clone(), slots[slot])));
        folds.push(fold_manifest(manifest, fold, train_fraction, seed, trainval)?);
    }
    Ok(CvFolds {
        folds,
        train_fraction,
        group_atomic: true,
    })
}
