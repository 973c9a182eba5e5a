use std::collections::{BTreeSet, HashSet};

use serde::{Deserialize, Serialize};

use super::{Split, SplitManifest};
use crate::grouping::GroupingResult;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    /// Members of one group sit in more than one split.
    StraddlingGroup {
        group_id: usize,
        splits: Vec<Split>,
        members: Vec<String>,
    },
    /// A grouped document is missing from the manifest.
    UnassignedDocument { doc_id: String },
    /// The manifest assigns a document no group mentions.
    UnknownDocument { doc_id: String },
    /// A split missed its target by more than the largest group size.
    RatioOutOfBounds {
        split: Split,
        target: f64,
        realized: usize,
    },
}

/// Realized size of one split against its target.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SplitDeviation {
    pub split: Split,
    pub target: f64,
    pub realized: usize,
    /// `(realized - target) / n`, as a fraction of the manifest.
    pub deviation: f64,
}

pub fn ratio_deviations(manifest: &SplitManifest) -> Vec<SplitDeviation> {
    let n = manifest.len();
    Split::ALL
        .iter()
        .map(|&split| {
            let target = manifest.ratios.get(split) * n as f64;
            let realized = manifest.count(split);
            SplitDeviation {
                split,
                target,
                realized,
                deviation: if n == 0 {
                    0.0
                } else {
                    (realized as f64 - target) / n as f64
                },
            }
        })
        .collect()
}

/// Checks a manifest against a grouping: one violation per straddling
/// group, per unassigned or unknown document, and per split whose size is
/// off target by more than the largest group.
pub fn verify_manifest(manifest: &SplitManifest, groups: &GroupingResult) -> Vec<Violation> {
    let mut out = Vec::new();
    let mut grouped = HashSet::new();
    for g in &groups.groups {
        let mut splits = BTreeSet::new();
        for m in &g.members {
            grouped.insert(m.as_str());
            match manifest.assignments.get(m) {
                Some(s) => {
                    splits.insert(*s);
                }
                None => out.push(Violation::UnassignedDocument { doc_id: m.clone() }),
            }
        }
        if splits.len() > 1 {
            out.push(Violation::StraddlingGroup {
                group_id: g.group_id,
                splits: splits.into_iter().collect(),
                members: g.members.clone(),
            });
        }
    }
    for doc in manifest.assignments.keys() {
        if !grouped.contains(doc.as_str()) {
            out.push(Violation::UnknownDocument { doc_id: doc.clone() });
        }
    }
    let bound = groups.max_group_size() as f64 + 1e-9;
    for d in ratio_deviations(manifest) {
        if (d.realized as f64 - d.target).abs() > bound {
            out.push(Violation::RatioOutOfBounds {
                split: d.split,
                target: d.target,
                realized: d.realized,
            });
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::resampling::Ratios;
    use crate::similarity::Metric;
    use std::collections::BTreeMap;

    fn manifest(pairs: &[(&str, Split)], ratios: Ratios) -> SplitManifest {
        let a: BTreeMap<_, _> = pairs.iter().map(|(d, s)| (d.to_string(), *s)).collect();
        SplitManifest::new(a, 0, ratios)
    }

    #[test]
    fn straddling_pair_reported() {
        let g = GroupingResult::new(
            Metric::QuestionOverlap,
            0.7,
            vec![vec!["a".into(), "b".into()], vec!["c".into()], vec!["d".into()]],
        );
        let m = manifest(
            &[("a", Split::Train), ("b", Split::Test), ("c", Split::Train), ("d", Split::Train)],
            Ratios::new(0.75, 0.0, 0.25).unwrap(),
        );
        let v = verify_manifest(&m, &g);
        assert_eq!(v.len(), 1);
        assert!(matches!(&v[0], Violation::StraddlingGroup { group_id: 0, .. }));
    }

    #[test]
    fn unassigned_unknown_and_ratio() {
        let g = GroupingResult::new(Metric::QuestionOverlap, 0.7, vec![vec!["a".into()], vec!["b".into()]]);
        let m = manifest(&[("a", Split::Train), ("z", Split::Train)], Ratios::new(0.0, 0.0, 1.0).unwrap());
        let v = verify_manifest(&m, &g);
        assert!(v.contains(&Violation::UnassignedDocument { doc_id: "b".into() }));
        assert!(v.contains(&Violation::UnknownDocument { doc_id: "z".into() }));
        assert!(v.iter().any(|x| matches!(x, Violation::RatioOutOfBounds { split: Split::Train, .. })));
    }

    #[test]
    fn deviation_fractions() {
        let m = manifest(&[("a", Split::Train), ("b", Split::Test)], Ratios::new(1.0, 0.0, 0.0).unwrap());
        let d = ratio_deviations(&m);
        assert_eq!(d[0].deviation, -0.5);
        assert_eq!(d[2].deviation, 0.5);
    }
}
