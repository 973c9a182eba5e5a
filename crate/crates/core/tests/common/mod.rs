//! Generators and brute-force oracles shared by the integration tests.
//! The oracles deliberately avoid the library's own algorithms.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};

use kie_leakage::synthetic::form_with_questions;
use kie_leakage::{Corpus, Dataset, ExtractedEntity, GroupingResult, Metric, OriginSplit};

pub fn rng(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}

/// A random set of already-normalized question strings drawn from a
/// vocabulary of `vocab` words.
pub fn random_question_set(rng: &mut StdRng, max_len: usize, vocab: usize) -> BTreeSet<String> {
    let len = rng.gen_range(0..=max_len);
    (0..len).map(|_| format!("q{}", rng.gen_range(0..vocab))).collect()
}

/// |A ∩ B| / max(|A|, |B|), 0 for two empty sets.
pub fn brute_overlap(a: &BTreeSet<String>, b: &BTreeSet<String>) -> f64 {
    let denom = a.len().max(b.len());
    if denom == 0 {
        return 0.0;
    }
    let shared = a.iter().filter(|q| b.contains(*q)).count();
    shared as f64 / denom as f64
}

pub fn doc_id(i: usize) -> String {
    format!("d{i:04}")
}

/// One form per question set, ids `d0000`, `d0001`, ...
pub fn question_corpus(sets: &[BTreeSet<String>]) -> Corpus {
    let docs = sets
        .iter()
        .enumerate()
        .map(|(i, qs)| {
            let qs: Vec<String> = qs.iter().cloned().collect();
            form_with_questions(&doc_id(i), OriginSplit::Train, &qs)
        })
        .collect();
    Corpus::new(Dataset::Funsd, docs).unwrap()
}

/// Random corpus whose question sets overlap often enough to form groups.
pub fn random_question_corpus(rng: &mut StdRng, max_docs: usize) -> (Corpus, Vec<BTreeSet<String>>) {
    let n = rng.gen_range(0..=max_docs);
    let vocab = rng.gen_range(5..60);
    let max_len = rng.gen_range(1..12);
    let sets: Vec<_> = (0..n).map(|_| random_question_set(rng, max_len, vocab)).collect();
    (question_corpus(&sets), sets)
}

/// Reachability via repeated relaxation of a boolean matrix (transitive
/// closure), returned as a set of node sets.
pub fn brute_components(n: usize, edges: &[(usize, usize)]) -> BTreeSet<BTreeSet<usize>> {
    let mut reach = vec![vec![false; n]; n];
    for (i, row) in reach.iter_mut().enumerate() {
        row[i] = true;
    }
    for &(a, b) in edges {
        reach[a][b] = true;
        reach[b][a] = true;
    }
    for k in 0..n {
        for i in 0..n {
            if reach[i][k] {
                for j in 0..n {
                    if reach[k][j] {
                        reach[i][j] = true;
                    }
                }
            }
        }
    }
    (0..n)
        .map(|i| (0..n).filter(|&j| reach[i][j]).collect())
        .collect()
}

/// Groups as sets of doc ids, ignoring ids and order.
pub fn as_sets(g: &GroupingResult) -> BTreeSet<BTreeSet<String>> {
    g.groups
        .iter()
        .map(|g| g.members.iter().cloned().collect())
        .collect()
}

/// `fine` refines `coarse`: every fine group sits inside one coarse group.
pub fn brute_refines(fine: &GroupingResult, coarse: &GroupingResult) -> bool {
    let coarse_sets = as_sets(coarse);
    as_sets(fine)
        .iter()
        .all(|f| coarse_sets.iter().any(|c| f.is_subset(c)))
}

/// GroupingResult with groups of the given sizes over ids `d0000...`.
pub fn sized_grouping(sizes: &[usize]) -> GroupingResult {
    let mut next = 0;
    let groups = sizes
        .iter()
        .map(|&s| {
            (0..s)
                .map(|_| {
                    next += 1;
                    doc_id(next - 1)
                })
                .collect()
        })
        .collect();
    GroupingResult::new(Metric::QuestionOverlap, 0.7, groups)
}

/// Maximum bipartite matching (Kuhn's augmenting paths) between gold and
/// predicted entities of each document, an edge joining equal entities.
/// Returns (tp, fp, fn).
pub fn brute_match(gold: &[ExtractedEntity], pred: &[ExtractedEntity]) -> (u64, u64, u64) {
    let mut docs: BTreeMap<&str, (Vec<&ExtractedEntity>, Vec<&ExtractedEntity>)> = BTreeMap::new();
    for g in gold {
        docs.entry(&g.doc_id).or_default().0.push(g);
    }
    for p in pred {
        docs.entry(&p.doc_id).or_default().1.push(p);
    }
    let mut tp = 0;
    for (gs, ps) in docs.values() {
        let mut owner: Vec<Option<usize>> = vec![None; gs.len()];
        fn augment(
            p: usize,
            ps: &[&ExtractedEntity],
            gs: &[&ExtractedEntity],
            owner: &mut [Option<usize>],
            seen: &mut [bool],
        ) -> bool {
            for g in 0..gs.len() {
                if seen[g] || gs[g].label != ps[p].label || gs[g].text != ps[p].text {
                    continue;
                }
                seen[g] = true;
                if owner[g].is_none() || augment(owner[g].unwrap(), ps, gs, owner, seen) {
                    owner[g] = Some(p);
                    return true;
                }
            }
            false
        }
        for p in 0..ps.len() {
            let mut seen = vec![false; gs.len()];
            if augment(p, ps, gs, &mut owner, &mut seen) {
                tp += 1;
            }
        }
    }
    (tp, pred.len() as u64 - tp, gold.len() as u64 - tp)
}

/// Precision, recall, F1 with the documented zero-denominator rules.
pub fn brute_prf(tp: u64, fp: u64, fn_: u64) -> (f64, f64, f64) {
    let p = if tp + fp > 0 {
        tp as f64 / (tp + fp) as f64
    } else if tp + fn_ == 0 {
        1.0
    } else {
        0.0
    };
    let r = if tp + fn_ > 0 {
        tp as f64 / (tp + fn_) as f64
    } else if tp + fp == 0 {
        1.0
    } else {
        0.0
    };
    let f = if p + r > 0.0 { 2.0 * p * r / (p + r) } else { 0.0 };
    (p, r, f)
}

const LABELS: [&str; 3] = ["company", "date", "total"];
const VALUES: [&str; 5] = ["ACME SDN BHD", "acme sdn bhd.", "12/03/2018", "9.00", "Total: 9.00"];

/// Small random gold/prediction lists over a few documents.
pub fn random_entity_case(rng: &mut StdRng) -> (Vec<ExtractedEntity>, Vec<ExtractedEntity>) {
    let docs = rng.gen_range(1..4);
    let mut gold = Vec::new();
    let mut pred = Vec::new();
    for d in 0..docs {
        let id = format!("doc{d}");
        let draw = |rng: &mut StdRng| {
            let n = rng.gen_range(0..=10);
            (0..n)
                .map(|_| {
                    ExtractedEntity::new(
                        id.clone(),
                        *LABELS.choose(rng).unwrap(),
                        VALUES.choose(rng).unwrap(),
                    )
                })
                .collect::<Vec<_>>()
        };
        gold.extend(draw(rng));
        pred.extend(draw(rng));
    }
    gold.shuffle(rng);
    pred.shuffle(rng);
    (gold, pred)
}
