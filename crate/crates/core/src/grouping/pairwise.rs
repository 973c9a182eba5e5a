use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use super::{DisjointSet, GroupingError, GroupingResult};
use crate::evaluation::prf;

/// Hand-labeled template groups over a subset of the corpus.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroundTruthGrouping {
    groups: Vec<Vec<String>>,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum GroundTruthFile {
    Groups { groups: Vec<Vec<String>> },
    Pairs { pairs: Vec<(String, String)> },
}

impl GroundTruthGrouping {
    /// Labeled groups. A document listed in two groups is an error.
    pub fn from_groups(groups: Vec<Vec<String>>) -> Result<Self, GroupingError> {
        let mut seen: HashMap<String, usize> = HashMap::new();
        let mut canonical = Vec::with_capacity(groups.len());
        for (i, mut g) in groups.into_iter().enumerate() {
            g.sort();
            g.dedup();
            for m in &g {
                if let Some(prev) = seen.insert(m.clone(), i) {
                    if prev != i {
                        return Err(GroupingError::InconsistentGroundTruth(format!(
                            "`{m}` appears in groups {prev} and {i}"
                        )));
                    }
                }
            }
            if !g.is_empty() {
                canonical.push(g);
            }
        }
        canonical.sort();
        Ok(Self { groups: canonical })
    }

    /// Labeled same-template pairs, closed transitively.
    pub fn from_pairs<I, S>(pairs: I) -> Self
    where
        I: IntoIterator<Item = (S, S)>,
        S: Into<String>,
    {
        let mut ids: BTreeMap<String, usize> = BTreeMap::new();
        let mut edges = Vec::new();
        for (a, b) in pairs {
            let mut id = |s: String| {
                let n = ids.len();
                *ids.entry(s).or_insert(n)
            };
            edges.push((id(a.into()), id(b.into())));
        }
        let mut sets = DisjointSet::new(ids.len());
        for (a, b) in edges {
            sets.union(a, b);
        }
        let names: BTreeMap<usize, String> = ids.into_iter().map(|(k, v)| (v, k)).collect();
        let groups = sets
            .components()
            .into_iter()
            .map(|c| c.into_iter().map(|i| names[&i].clone()).collect())
            .collect();
        Self::from_groups(groups).expect("components are disjoint")
    }

    /// Parses `{"groups": [[...], ...]}` or `{"pairs": [[a, b], ...]}`.
    pub fn from_json(raw: &str) -> Result<Self, GroupingError> {
        let file: GroundTruthFile = serde_json::from_str(raw)
            .map_err(|e| GroupingError::InconsistentGroundTruth(e.to_string()))?;
        match file {
            GroundTruthFile::Groups { groups } => Self::from_groups(groups),
            GroundTruthFile::Pairs { pairs } => Ok(Self::from_pairs(pairs)),
        }
    }

    pub fn groups(&self) -> &[Vec<String>] {
        &self.groups
    }

    pub fn num_documents(&self) -> usize {
        self.groups.iter().map(Vec::len).sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PairwiseMetrics {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub tp: u64,
    pub fp: u64,
    #[serde(rename = "fn")]
    pub fn_: u64,
}

fn pairs_in(n: u64) -> u64 {
    n * n.saturating_sub(1) / 2
}

/// Precision and recall over same-group document pairs, restricted to the
/// documents the ground truth covers. Documents the prediction does not
/// mention count as singletons.
pub fn pairwise_grouping_metrics(
    predicted: &GroupingResult,
    gt: &GroundTruthGrouping,
) -> PairwiseMetrics {
    let membership = predicted.membership();
    let mut pred_sizes: HashMap<usize, u64> = HashMap::new();
    let mut joint_sizes: HashMap<(usize, usize), u64> = HashMap::new();
    let mut gt_pairs = 0;
    let mut unseen = usize::MAX;
    for (gt_id, group) in gt.groups.iter().enumerate() {
        gt_pairs += pairs_in(group.len() as u64);
        for doc in group {
            let pred_id = membership.get(doc.as_str()).copied().unwrap_or_else(|| {
                unseen -= 1;
                unseen
            });
            *pred_sizes.entry(pred_id).or_insert(0) += 1;
            *joint_sizes.entry((pred_id, gt_id)).or_insert(0) += 1;
        }
    }
    let pred_pairs: u64 = pred_sizes.values().map(|&n| pairs_in(n)).sum();
    let tp: u64 = joint_sizes.values().map(|&n| pairs_in(n)).sum();
    let (fp, fn_) = (pred_pairs - tp, gt_pairs - tp);
    let (precision, recall, f1) = prf(tp, fp, fn_);
    PairwiseMetrics {
        precision,
        recall,
        f1,
        tp,
        fp,
        fn_,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::similarity::Metric;

    fn grouping(groups: &[&[&str]]) -> GroupingResult {
        GroupingResult::new(
            Metric::QuestionOverlap,
            0.7,
            groups
                .iter()
                .map(|g| g.iter().map(|s| s.to_string()).collect())
                .collect(),
        )
    }

    fn gt(groups: &[&[&str]]) -> GroundTruthGrouping {
        GroundTruthGrouping::from_groups(
            groups
                .iter()
                .map(|g| g.iter().map(|s| s.to_string()).collect())
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn identity() {
        let m = pairwise_grouping_metrics(&grouping(&[&["a", "b"], &["c"]]), &gt(&[&["a", "b"], &["c"]]));
        assert_eq!((m.precision, m.recall, m.f1), (1.0, 1.0, 1.0));
    }

    #[test]
    fn all_singletons_against_a_pair() {
        let m = pairwise_grouping_metrics(&grouping(&[&["a"], &["b"]]), &gt(&[&["a", "b"]]));
        assert_eq!((m.precision, m.recall, m.f1), (0.0, 0.0, 0.0));
    }

    #[test]
    fn both_empty_is_perfect() {
        let m = pairwise_grouping_metrics(&grouping(&[&["a"], &["b"]]), &gt(&[&["a"], &["b"]]));
        assert_eq!((m.precision, m.recall, m.f1), (1.0, 1.0, 1.0));
    }

    #[test]
    fn partial_split() {
        // gt pairs: ab, ac, bc; predicted pairs: ab -> P = 1, R = 1/3, F1 = 0.5
        let m = pairwise_grouping_metrics(
            &grouping(&[&["a", "b"], &["c"], &["d"]]),
            &gt(&[&["a", "b", "c"], &["d"]]),
        );
        assert_eq!(m.precision, 1.0);
        assert_eq!(m.recall, 1.0 / 3.0);
        assert_eq!(m.f1, 0.5);
    }

    #[test]
    fn evaluation_restricted_to_labeled_subset() {
        // x and y are grouped with a, but unlabeled: they must not count.
        let m = pairwise_grouping_metrics(
            &grouping(&[&["a", "b", "x", "y"]]),
            &gt(&[&["a", "b"]]),
        );
        assert_eq!((m.tp, m.fp, m.fn_), (1, 0, 0));
    }

    #[test]
    fn pairs_are_closed_transitively() {
        let g = GroundTruthGrouping::from_pairs([("a", "b"), ("c", "b"), ("d", "e")]);
        assert_eq!(g.groups(), &[vec!["a", "b", "c"], vec!["d", "e"]]);
    }

    #[test]
    fn overlapping_groups_rejected() {
        assert!(GroundTruthGrouping::from_groups(vec![
            vec!["a".into(), "b".into()],
            vec!["b".into()]
        ])
        .is_err());
    }

    #[test]
    fn json_forms() {
        let g = GroundTruthGrouping::from_json(r#"{"groups": [["b", "a"], ["c"]]}"#).unwrap();
        assert_eq!(g.num_documents(), 3);
        let p = GroundTruthGrouping::from_json(r#"{"pairs": [["a", "b"]]}"#).unwrap();
        assert_eq!(p.groups(), &[vec!["a", "b"]]);
        assert!(GroundTruthGrouping::from_json("[1]").is_err());
    }
}
