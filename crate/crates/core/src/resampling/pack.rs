use std::collections::BTreeMap;

use super::{GroupingStamp, Ratios, ResampleError, Split, SplitManifest};
use crate::grouping::GroupingResult;
use crate::rng::SplitMix64;

/// Orders groups largest first (smallest member breaking ties), then
/// shuffles each run of equal-sized groups with `rng`.
pub(crate) fn packing_order<'a>(groups: &[&'a [String]], rng: &mut SplitMix64) -> Vec<&'a [String]> {
    let mut order: Vec<&[String]> = groups.to_vec();
    order.sort_by(|a, b| b.len().cmp(&a.len()).then_with(|| a[0].cmp(&b[0])));
    let mut start = 0;
    while start < order.len() {
        let size = order[start].len();
        let end = start + order[start..].iter().take_while(|g| g.len() == size).count();
        rng.shuffle(&mut order[start..end]);
        start = end;
    }
    order
}

/// Greedy deficit packing: each group goes to the slot whose remaining
/// deficit (target minus documents placed) is largest; ties go to the
/// earlier slot. Returns the chosen slot per group, in `order`.
pub(crate) fn pack(order: &[&[String]], targets: &[f64]) -> Vec<usize> {
    let mut deficit = targets.to_vec();
    order
        .iter()
        .map(|group| {
            let mut best = 0;
            for slot in 1..deficit.len() {
                if deficit[slot] > deficit[best] {
                    best = slot;
                }
            }
            deficit[best] -= group.len() as f64;
            best
        })
        .collect()
}

/// Slot order doubles as tie-break order.
const SLOTS: [Split; 3] = [Split::Test, Split::Val, Split::Train];

/// Group-atomic train/val/test assignment.
///
/// Groups are sorted by size (descending) and smallest member, equal-size
/// runs are shuffled with a SplitMix64 stream seeded by `seed`, and each
/// group is placed whole into the split with the largest remaining document
/// deficit (ties: test, then val, then train). Every split ends within one
/// maximum group size of its target.
pub fn resample_splits(
    groups: &GroupingResult,
    ratios: Ratios,
    seed: u64,
) -> Result<SplitManifest, ResampleError> {
    let ratios = Ratios::new(ratios.train, ratios.val, ratios.test)?;
    let n = groups.num_documents() as f64;
    let targets: Vec<f64> = SLOTS.iter().map(|s| ratios.get(*s) * n).collect();

    let largest_share = targets.iter().copied().fold(0.0, f64::max);
    let max_group = groups.max_group_size();
    if max_group > 0 && max_group as f64 > largest_share + 1e-9 {
        return Err(ResampleError::InfeasibleRatios {
            group_size: max_group,
            largest_share,
        });
    }

    let members: Vec<&[String]> = groups.groups.iter().map(|g| g.members.as_slice()).collect();
    let mut rng = SplitMix64::new(seed);
    let order = packing_order(&members, &mut rng);
    let slots = pack(&order, &targets);

    let mut assignments = BTreeMap::new();
    for (group, slot) in order.iter().zip(slots) {
        for doc in group.iter() {
            assignments.insert(doc.clone(), SLOTS[slot]);
        }
    }
    let mut manifest = SplitManifest::new(assignments, seed, ratios);
    manifest.grouping = Some(GroupingStamp {
        metric: groups.metric,
        threshold: groups.threshold,
        sha256: groups.digest(),
    });
    Ok(manifest)
}
