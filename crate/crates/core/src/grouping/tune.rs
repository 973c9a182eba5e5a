use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::{
    check_threshold, connected_components, pairwise_grouping_metrics, GroundTruthGrouping,
    GroupingError, GroupingResult,
};
use crate::corpus::Corpus;
use crate::similarity::{score_candidates, Metric};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TuningRow {
    pub threshold: f64,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub selected: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TuningTable {
    pub metric: Metric,
    pub rows: Vec<TuningRow>,
}

impl TuningTable {
    pub fn selected(&self) -> Option<&TuningRow> {
        self.rows.iter().find(|r| r.selected)
    }

    /// `threshold,precision,recall,f1,selected` CSV.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("threshold,precision,recall,f1,selected\n");
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{},{:.6},{:.6},{:.6},{}",
                r.threshold, r.precision, r.recall, r.f1, r.selected as u8
            );
        }
        out
    }
}

/// Evaluates the grouping pipeline at each threshold against hand-labeled
/// groups and marks the best pairwise F1. Ties go to the larger threshold.
///
/// Candidate pairs are scored once and re-filtered per threshold.
pub fn tune_threshold(
    corpus: &Corpus,
    metric: Metric,
    gt: &GroundTruthGrouping,
    thresholds: &[f64],
) -> Result<TuningTable, GroupingError> {
    if thresholds.is_empty() {
        return Err(GroupingError::InvalidParameter(
            "at least one threshold is required".into(),
        ));
    }
    for &t in thresholds {
        check_threshold(t)?;
    }
    let mut grid = thresholds.to_vec();
    grid.sort_by(f64::total_cmp);
    grid.dedup();

    let scored = score_candidates(corpus, metric)?;
    let mut rows = Vec::with_capacity(grid.len());
    for t in grid {
        let edges: Vec<_> = scored.iter().filter(|e| e.score >= t).cloned().collect();
        let predicted = GroupingResult::new(metric, t, connected_components(&edges, corpus)?);
        let m = pairwise_grouping_metrics(&predicted, gt);
        rows.push(TuningRow {
            threshold: t,
            precision: m.precision,
            recall: m.recall,
            f1: m.f1,
            selected: false,
        });
    }
    // Rows are ascending, so `>=` keeps the largest threshold among ties.
    let best = rows
        .iter()
        .enumerate()
        .fold(0, |best, (i, r)| if r.f1 >= rows[best].f1 { i } else { best });
    rows[best].selected = true;
    Ok(TuningTable { metric, rows })
}
