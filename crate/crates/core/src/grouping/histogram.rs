use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::GroupingResult;

/// Bucket anchors used to compare receipt group sizes against the reference
/// receipt distribution; a size falls into the largest anchor not above it.
pub const SROIE_BUCKET_ANCHORS: [usize; 10] = [1, 9, 17, 26, 34, 42, 51, 59, 67, 75];

/// Reference group-size distribution of the FUNSD template groups at 0.7.
pub const FUNSD_REFERENCE_SIZES: [(usize, usize); 4] = [(1, 130), (2, 21), (3, 8), (4, 1)];

/// Reference (binned) group-size distribution of SROIE business groups.
pub const SROIE_REFERENCE_SIZES: [(usize, usize); 10] = [
    (1, 301),
    (9, 6),
    (17, 3),
    (26, 2),
    (34, 3),
    (42, 3),
    (51, 1),
    (59, 1),
    (67, 3),
    (75, 1),
];

/// Group size → number of groups of that size.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SizeHistogram(pub BTreeMap<usize, usize>);

impl SizeHistogram {
    pub fn from_pairs(pairs: &[(usize, usize)]) -> Self {
        Self(pairs.iter().copied().collect())
    }

    pub fn count(&self, size: usize) -> usize {
        self.0.get(&size).copied().unwrap_or(0)
    }

    /// Σ size × count.
    pub fn documents(&self) -> usize {
        self.0.iter().map(|(s, c)| s * c).sum()
    }

    pub fn groups(&self) -> usize {
        self.0.values().sum()
    }

    pub fn max_size(&self) -> usize {
        self.0.keys().next_back().copied().unwrap_or(0)
    }

    /// Re-buckets sizes onto `anchors` (ascending): each size lands on the
    /// largest anchor `<=` it. Sizes below the first anchor keep the first.
    pub fn rebin(&self, anchors: &[usize]) -> SizeHistogram {
        let mut out = BTreeMap::new();
        for (&size, &count) in &self.0 {
            let anchor = anchors
                .iter()
                .rev()
                .find(|&&a| a <= size)
                .or(anchors.first())
                .copied()
                .unwrap_or(size);
            *out.entry(anchor).or_insert(0) += count;
        }
        SizeHistogram(out)
    }

    /// `size,count` CSV with a header row.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("size,count\n");
        for (size, count) in &self.0 {
            let _ = writeln!(out, "{size},{count}");
        }
        out
    }
}

pub fn group_size_histogram(result: &GroupingResult) -> SizeHistogram {
    let mut hist = BTreeMap::new();
    for g in &result.groups {
        *hist.entry(g.len()).or_insert(0) += 1;
    }
    SizeHistogram(hist)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::similarity::Metric;

    #[test]
    fn small_histogram() {
        let r = GroupingResult::new(
            Metric::QuestionOverlap,
            0.7,
            vec![vec!["a".into(), "b".into()], vec!["c".into()]],
        );
        let h = group_size_histogram(&r);
        assert_eq!(h, SizeHistogram::from_pairs(&[(1, 1), (2, 1)]));
        assert_eq!(h.documents(), 3);
        assert_eq!(h.to_csv(), "size,count\n1,1\n2,1\n");
    }

    #[test]
    fn reference_totals() {
        let funsd = SizeHistogram::from_pairs(&FUNSD_REFERENCE_SIZES);
        assert_eq!(funsd.documents(), 130 + 42 + 24 + 4);
        assert_eq!(funsd.max_size(), 4);
    }

    #[test]
    fn rebinning() {
        let h = SizeHistogram::from_pairs(&[(1, 5), (2, 3), (9, 1), (16, 1), (76, 1)]);
        let r = h.rebin(&SROIE_BUCKET_ANCHORS);
        assert_eq!(r, SizeHistogram::from_pairs(&[(1, 8), (9, 2), (75, 1)]));
        assert_eq!(r.groups(), h.groups());
    }
}
