use std::collections::{BTreeSet, HashSet};

use serde::{Deserialize, Serialize};

use super::{ResampleError, Split, SplitManifest};
use crate::corpus::{Corpus, OriginSplit};
use crate::grouping::GroupingResult;

/// Test documents whose template group also reaches the training side.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LeakageReport {
    pub n_test: usize,
    pub n_leaked_test: usize,
    pub leak_fraction: f64,
    pub leaked_doc_ids: Vec<String>,
    pub offending_groups: Vec<usize>,
}

fn build_report<'a>(
    groups: &GroupingResult,
    test_docs: impl Iterator<Item = &'a str>,
    train_docs: impl Iterator<Item = &'a str>,
) -> LeakageReport {
    let membership = groups.membership();
    let train_groups: HashSet<usize> = train_docs
        .filter_map(|d| membership.get(d).copied())
        .collect();
    let mut n_test = 0;
    let mut leaked = Vec::new();
    let mut offending = BTreeSet::new();
    for doc in test_docs {
        n_test += 1;
        if let Some(&g) = membership.get(doc) {
            if train_groups.contains(&g) {
                leaked.push(doc.to_string());
                offending.insert(g);
            }
        }
    }
    leaked.sort();
    LeakageReport {
        n_test,
        n_leaked_test: leaked.len(),
        leak_fraction: if n_test == 0 {
            0.0
        } else {
            leaked.len() as f64 / n_test as f64
        },
        leaked_doc_ids: leaked,
        offending_groups: offending.into_iter().collect(),
    }
}

/// Leakage of the corpus' original split. A test document is leaked when
/// its group holds at least one training document.
pub fn leakage_report(
    groups: &GroupingResult,
    corpus: &Corpus,
) -> Result<LeakageReport, ResampleError> {
    if let Some(doc) = corpus
        .documents
        .iter()
        .find(|d| d.origin_split == OriginSplit::Unassigned)
    {
        return Err(ResampleError::UnassignedDocument(doc.doc_id.clone()));
    }
    let of = |s: OriginSplit| {
        corpus
            .documents
            .iter()
            .filter(move |d| d.origin_split == s)
            .map(|d| d.doc_id.as_str())
    };
    Ok(build_report(
        groups,
        of(OriginSplit::Test),
        of(OriginSplit::Train),
    ))
}

/// Leakage of a manifest; train and val both count as the training side.
pub fn leakage_report_for_manifest(
    groups: &GroupingResult,
    manifest: &SplitManifest,
) -> LeakageReport {
    build_report(
        groups,
        manifest.docs_in(Split::Test),
        manifest.docs_in(Split::Train).chain(manifest.docs_in(Split::Val)),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{Dataset, Document};
    use crate::similarity::Metric;

    fn corpus(docs: &[(&str, OriginSplit)]) -> Corpus {
        Corpus::new(
            Dataset::Funsd,
            docs.iter()
                .map(|(id, s)| Document::new(*id, Dataset::Funsd, *s))
                .collect(),
        )
        .unwrap()
    }

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

    #[test]
    fn singletons_never_leak() {
        let c = corpus(&[("a", OriginSplit::Train), ("b", OriginSplit::Test)]);
        let r = leakage_report(&grouping(&[&["a"], &["b"]]), &c).unwrap();
        assert_eq!((r.n_test, r.n_leaked_test, r.leak_fraction), (1, 0, 0.0));
    }

    #[test]
    fn shared_group_leaks() {
        let c = corpus(&[
            ("t1", OriginSplit::Train),
            ("t2", OriginSplit::Test),
            ("t3", OriginSplit::Test),
        ]);
        let r = leakage_report(&grouping(&[&["t1", "t2"], &["t3"]]), &c).unwrap();
        assert_eq!(r.n_leaked_test, 1);
        assert_eq!(r.leaked_doc_ids, ["t2"]);
        assert_eq!(r.offending_groups, [0]);
        assert_eq!(r.leak_fraction, 0.5);
    }

    #[test]
    fn test_only_group_is_not_leaked() {
        let c = corpus(&[("a", OriginSplit::Test), ("b", OriginSplit::Test)]);
        let r = leakage_report(&grouping(&[&["a", "b"]]), &c).unwrap();
        assert_eq!(r.n_leaked_test, 0);
    }

    #[test]
    fn unassigned_is_an_error() {
        let c = corpus(&[("a", OriginSplit::Unassigned)]);
        assert_eq!(
            leakage_report(&grouping(&[&["a"]]), &c),
            Err(ResampleError::UnassignedDocument("a".into()))
        );
    }

    #[test]
    fn empty_test_set() {
        let c = corpus(&[("a", OriginSplit::Train)]);
        let r = leakage_report(&grouping(&[&["a"]]), &c).unwrap();
        assert_eq!((r.n_test, r.leak_fraction), (0, 0.0));
    }
}
