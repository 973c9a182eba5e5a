//! Template-level redundancy auditing for document information-extraction
//! benchmarks.
//!
//! The crate ingests FUNSD-style form annotations and SROIE-style receipt
//! annotations, scores how similar documents are at the template level,
//! groups documents that share a template, measures how many test documents
//! have a template twin in training, and produces deterministic resampled
//! splits in which every template group sits entirely inside one split.
//!
//! The pipeline, module by module:
//!
//! - [`corpus`]: parsing and validation of annotation files.
//! - [`similarity`]: text normalization, the question-overlap score for
//!   forms, business keys for receipts, shingle Jaccard, candidate blocking.
//! - [`grouping`]: similarity graph, connected components, group-size
//!   histograms, threshold tuning against hand-labeled groups.
//! - [`resampling`]: leakage reports, group-atomic split packing, train/val
//!   fold generation and manifest files.
//! - [`evaluation`]: entity-level precision/recall/F1 and a template
//!   memorizer baseline that turns leakage into a measurable score gap.
//! - [`cli`]: the `kie-leakage` command-line front end.
//!
//! Runnable walkthroughs for each stage live in `examples/`.

pub mod cli;
pub mod corpus;
pub mod evaluation;
pub mod grouping;
pub mod resampling;
pub mod rng;
pub mod similarity;
pub mod synthetic;
pub mod text;

pub use corpus::{
    load_corpus, parse_funsd_document, parse_sroie_document, validate_document, BoundingBox,
    Corpus, Dataset, Document, Entity, IngestError, Issue, LoadReport, OriginSplit, Token,
};
pub use evaluation::{
    entity_f1, fit_memorizer, leakage_gap_experiment, predict_memorizer, EvalMetrics,
    ExtractedEntity, GapReport, MemorizerModel,
};
pub use grouping::{
    build_similarity_graph, connected_components, group_by_key, group_corpus,
    group_size_histogram, pairwise_grouping_metrics, tune_threshold, GroundTruthGrouping,
    GroupingError, GroupingResult, SizeHistogram, TemplateGroup,
};
pub use resampling::{
    leakage_report, make_cv_folds, resample_splits, verify_manifest, CvFolds, LeakageReport,
    Ratios, ResampleError, Split, SplitManifest, Violation,
};
pub use similarity::{
    business_key, candidate_pairs, extract_question_set, question_overlap, shingle_jaccard,
    KeySource, Metric, QuestionSet, SimilarityEdge, SimilarityError, TemplateKey,
};
pub use text::normalize_text;
