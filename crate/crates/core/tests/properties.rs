mod common;

use std::collections::{BTreeSet, HashSet};

use proptest::prelude::*;
use rand::seq::SliceRandom;

use common::*;
use kie_leakage::corpus::{write_funsd_document, FUNSD_LABELS};
use kie_leakage::evaluation::evaluate_memorizer;
use kie_leakage::grouping::DEFAULT_THRESHOLD;
use kie_leakage::resampling::{leakage_report_for_manifest, make_group_cv_folds};
use kie_leakage::synthetic::{synthetic_forms, FormSpec};
use kie_leakage::{
    business_key, candidate_pairs, entity_f1, extract_question_set, group_corpus,
    group_size_histogram, load_corpus, make_cv_folds, parse_funsd_document, parse_sroie_document,
    question_overlap, resample_splits, shingle_jaccard, BoundingBox, Dataset, Document, Entity,
    Metric, OriginSplit, QuestionSet, Ratios, Split, Token,
};

fn question_set() -> impl Strategy<Value = BTreeSet<String>> {
    proptest::collection::btree_set("q[0-9]{1,2}", 0..15)
}

fn qs(set: &BTreeSet<String>) -> QuestionSet {
    QuestionSet::from_raw(set.iter())
}

proptest! {
    #[test]
    fn overlap_symmetric_and_in_range(a in question_set(), b in question_set()) {
        let (x, y) = (qs(&a), qs(&b));
        let s = question_overlap(&x, &y);
        prop_assert_eq!(s, question_overlap(&y, &x));
        prop_assert!((0.0..=1.0).contains(&s));
        prop_assert_eq!(s == 1.0, !a.is_empty() && a == b);
    }

    #[test]
    fn grouping_is_a_partition_with_conserved_histogram(seed in any::<u64>(), t in 0.05f64..=1.0) {
        let (corpus, _) = random_question_corpus(&mut rng(seed), 60);
        let g = group_corpus(&corpus, Metric::QuestionOverlap, t).unwrap();
        let mut seen = HashSet::new();
        for group in &g.groups {
            for m in &group.members {
                prop_assert!(seen.insert(m.clone()), "{} in two groups", m);
            }
        }
        let all: HashSet<String> = corpus.doc_ids().map(str::to_string).collect();
        prop_assert_eq!(seen, all);
        prop_assert_eq!(group_size_histogram(&g).documents(), corpus.len());
    }

    #[test]
    fn higher_threshold_refines(seed in any::<u64>(), a in 0.05f64..=1.0, b in 0.05f64..=1.0) {
        let (t1, t2) = if a <= b { (a, b) } else { (b, a) };
        let (corpus, _) = random_question_corpus(&mut rng(seed), 60);
        let coarse = group_corpus(&corpus, Metric::QuestionOverlap, t1).unwrap();
        let fine = group_corpus(&corpus, Metric::QuestionOverlap, t2).unwrap();
        prop_assert!(brute_refines(&fine, &coarse));
    }

    #[test]
    fn shingle_and_key_blocking_are_complete(seed in any::<u64>(), k in 1usize..4) {
        let mut r = rng(seed);
        let (corpus, _) = random_question_corpus(&mut r, 30);
        let metric = Metric::Shingle { k };
        let cands: HashSet<(String, String)> = candidate_pairs(&corpus, metric).unwrap().into_iter().collect();
        let docs = &corpus.documents;
        for i in 0..docs.len() {
            for j in i + 1..docs.len() {
                if shingle_jaccard(&docs[i], &docs[j], k).unwrap() > 0.0 {
                    prop_assert!(cands.contains(&(docs[i].doc_id.clone(), docs[j].doc_id.clone())));
                }
            }
        }
    }

    #[test]
    fn funsd_write_parse_round_trip(doc in funsd_document()) {
        let raw = write_funsd_document(&doc);
        let back = parse_funsd_document(&raw, &doc.doc_id, doc.origin_split).unwrap();
        prop_assert_eq!(&back, &doc);
        let again = Document::from_canonical_json(&back.to_canonical_json()).unwrap();
        prop_assert_eq!(again, doc);
    }

    #[test]
    fn sroie_token_count_is_nonblank_lines(
        lines in proptest::collection::vec(prop_oneof![
            Just(String::new()),
            Just("   ".to_string()),
            Just("1,2,3,4,5,6,7,8,".to_string()),
            "[A-Z][A-Z0-9 ,.:]{0,20}".prop_map(|t| format!("10,10,90,10,90,30,10,30,{t}")),
        ], 0..30),
    ) {
        let expected = lines.iter().filter(|l| l.starts_with("10,")).count();
        let ocr = lines.join("\n");
        let doc = parse_sroie_document(ocr.as_bytes(), b"{}", "r", OriginSplit::Train).unwrap();
        prop_assert_eq!(doc.tokens.len(), expected);
    }

    #[test]
    fn entity_f1_sane_and_order_free(seed in any::<u64>()) {
        let mut r = rng(seed);
        let (gold, pred) = random_entity_case(&mut r);
        let m = entity_f1(&gold, &pred);
        for v in [m.precision, m.recall, m.f1] {
            prop_assert!((0.0..=1.0).contains(&v));
        }
        prop_assert!(m.f1 <= m.precision.max(m.recall) + 1e-12);
        if !gold.is_empty() {
            prop_assert_eq!(m.f1 == 0.0, m.tp == 0);
        }
        let (mut g2, mut p2) = (gold.clone(), pred.clone());
        g2.shuffle(&mut r);
        p2.shuffle(&mut r);
        prop_assert_eq!(entity_f1(&g2, &p2), m);
    }

    #[test]
    fn memorizer_scores_zero_on_group_atomic_splits(
        templates in 2usize..12,
        copies in 1usize..5,
        seed in any::<u64>(),
    ) {
        let corpus = synthetic_forms(&FormSpec { templates, copies_per_template: copies, seed, ..FormSpec::default() });
        let groups = group_corpus(&corpus, Metric::QuestionOverlap, DEFAULT_THRESHOLD).unwrap();
        let manifest = resample_splits(&groups, Ratios::from_test_fraction(0.5).unwrap(), seed).unwrap();
        let m = evaluate_memorizer(&corpus, &groups, &manifest).unwrap();
        if m.fn_ > 0 {
            prop_assert_eq!(m.f1, 0.0);
            prop_assert_eq!(m.tp, 0);
        }
    }

    #[test]
    fn folds_exclude_test_and_are_deterministic(sizes in proptest::collection::vec(1usize..5, 10..40), seed in any::<u64>()) {
        let groups = sized_grouping(&sizes);
        let manifest = resample_splits(&groups, Ratios::from_test_fraction(0.2).unwrap(), seed).unwrap();
        let random = make_cv_folds(&manifest, 4, 0.8, seed).unwrap();
        prop_assert_eq!(&random, &make_cv_folds(&manifest, 4, 0.8, seed).unwrap());
        let atomic = make_group_cv_folds(&manifest, &groups, 4, 0.8, seed).unwrap();
        for fold in random.folds.iter().chain(&atomic.folds) {
            for (doc, split) in &manifest.assignments {
                prop_assert_eq!(fold.assignments[doc] == Split::Test, *split == Split::Test);
            }
        }
        for fold in &atomic.folds {
            prop_assert_eq!(leakage_report_for_manifest(&groups, fold).n_leaked_test, 0);
            for g in &groups.groups {
                let splits: BTreeSet<Split> = g.members.iter().map(|d| fold.assignments[d]).collect();
                prop_assert_eq!(splits.len(), 1);
            }
        }
    }
}

fn funsd_document() -> impl Strategy<Value = Document> {
    let token = ("[A-Za-z0-9:.]{1,8}", 0u32..500, 0u32..500, 1u32..60, 1u32..30).prop_map(
        |(text, x, y, w, h)| Token {
            text,
            bbox: BoundingBox { x0: x, y0: y, x1: x + w, y1: y + h },
        },
    );
    let entity = (
        proptest::sample::select(FUNSD_LABELS.to_vec()),
        "[A-Za-z0-9 :]{0,20}",
        proptest::collection::vec(token, 0..4),
        proptest::collection::vec((0u64..10, 0u64..10), 0..3),
    );
    (
        proptest::collection::vec(entity, 0..8),
        prop_oneof![Just(OriginSplit::Train), Just(OriginSplit::Test)],
    )
        .prop_map(|(entities, split)| {
            let mut doc = Document::new("doc", Dataset::Funsd, split);
            for (i, (label, text, tokens, links)) in entities.into_iter().enumerate() {
                doc.tokens.extend(tokens.iter().cloned());
                doc.entities.push(Entity {
                    entity_id: i as u64,
                    label: label.to_string(),
                    text,
                    tokens,
                    linking: links.into_iter().map(|(a, b)| [a, b]).collect(),
                });
            }
            doc
        })
}

#[test]
fn question_blocking_is_complete() {
    let mut r = rng(7);
    for _ in 0..20 {
        let (corpus, sets) = random_question_corpus(&mut r, 120);
        let cands: HashSet<(String, String)> = candidate_pairs(&corpus, Metric::QuestionOverlap)
            .unwrap()
            .into_iter()
            .collect();
        for i in 0..sets.len() {
            for j in i + 1..sets.len() {
                if brute_overlap(&sets[i], &sets[j]) > 0.0 {
                    assert!(cands.contains(&(doc_id(i), doc_id(j))));
                }
            }
        }
    }
}

#[test]
fn business_key_blocking_is_complete() {
    let corpus = kie_leakage::synthetic::synthetic_receipts(&[4, 3, 1, 1, 2], 1, 5);
    let cands: HashSet<(String, String)> =
        candidate_pairs(&corpus, Metric::BusinessKey).unwrap().into_iter().collect();
    let docs = &corpus.documents;
    for i in 0..docs.len() {
        for j in i + 1..docs.len() {
            let (a, b) = (business_key(&docs[i]), business_key(&docs[j]));
            if !a.is_fallback() && a == b {
                assert!(cands.contains(&(docs[i].doc_id.clone(), docs[j].doc_id.clone())));
            }
        }
    }
}

#[test]
fn grouping_is_independent_of_thread_count() {
    let (corpus, _) = random_question_corpus(&mut rng(99), 200);
    let digest_with = |threads| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| group_corpus(&corpus, Metric::QuestionOverlap, 0.5).unwrap().to_canonical_json())
    };
    assert_eq!(digest_with(1), digest_with(4));
}

#[test]
fn load_is_independent_of_file_order() {
    let corpus = synthetic_forms(&FormSpec { templates: 6, copies_per_template: 3, ..FormSpec::default() });
    let mut r = rng(3);
    let mut loaded = Vec::new();
    for _ in 0..3 {
        let dir = tempfile::tempdir().unwrap();
        let mut docs: Vec<&Document> = corpus.documents.iter().collect();
        docs.shuffle(&mut r);
        for d in docs {
            let split = match d.origin_split {
                OriginSplit::Test => "testing_data",
                _ => "training_data",
            };
            let ann = dir.path().join(split).join("annotations");
            std::fs::create_dir_all(&ann).unwrap();
            std::fs::write(ann.join(format!("{}.json", d.doc_id)), write_funsd_document(d)).unwrap();
        }
        loaded.push(load_corpus(dir.path(), Dataset::Funsd).unwrap().0);
    }
    assert!(loaded.iter().all(|c| *c == corpus));
}

#[test]
fn question_sets_ignore_case_and_punctuation() {
    let q = |raw: &[&str]| {
        let qs: Vec<String> = raw.iter().map(|s| s.to_string()).collect();
        extract_question_set(&kie_leakage::synthetic::form_with_questions("x", OriginSplit::Train, &qs))
    };
    assert_eq!(q(&["DATE:", "Name"]), q(&["date", " name: "]));
}
