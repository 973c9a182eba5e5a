use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::config::{FoldMode, RunConfig, FALLBACK_TEST_FRACTION};
use super::CliError;
use crate::corpus::{load_corpus, Corpus, Dataset, LoadReport, OriginSplit};
use crate::evaluation::{entity_f1, evaluate_memorizer, gold_entities, EvalMetrics, ExtractedEntity, GapReport};
use crate::grouping::{
    group_corpus, group_size_histogram, tune_threshold, GroundTruthGrouping, GroupingResult,
    SizeHistogram, TuningTable, FUNSD_REFERENCE_SIZES, SROIE_BUCKET_ANCHORS, SROIE_REFERENCE_SIZES,
};
use crate::resampling::{
    leakage_report, leakage_report_for_manifest, make_cv_folds, make_group_cv_folds,
    resample_splits, verify_manifest, LeakageReport, Ratios, ResampleError, Split, SplitManifest,
    Violation,
};
use crate::rng::SplitMix64;

pub const TOOL: &str = concat!("kie-leakage ", env!("CARGO_PKG_VERSION"));

/// Stamped on every output file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Provenance {
    pub tool: String,
    pub config_sha256: String,
    pub seed: u64,
}

impl Provenance {
    pub fn of(config: &RunConfig) -> Self {
        Self {
            tool: TOOL.to_string(),
            config_sha256: config.digest(),
            seed: config.seed,
        }
    }

    /// `# key: value` lines for text outputs.
    fn comment_lines(&self) -> String {
        format!(
            "# tool: {}\n# config_sha256: {}\n# seed: {}\n",
            self.tool, self.config_sha256, self.seed
        )
    }
}

#[derive(Serialize, Deserialize)]
struct Stamped<T> {
    provenance: Provenance,
    #[serde(flatten)]
    body: T,
}

fn write_out(config: &RunConfig, name: &str, contents: &str) -> Result<PathBuf, CliError> {
    let dir = &config.output_dir;
    fs::create_dir_all(dir)
        .map_err(|e| CliError::Runtime(format!("cannot create {}: {e}", dir.display())))?;
    let path = dir.join(name);
    fs::write(&path, contents)
        .map_err(|e| CliError::Runtime(format!("cannot write {}: {e}", path.display())))?;
    Ok(path)
}

fn write_json<T: Serialize>(config: &RunConfig, name: &str, body: T) -> Result<PathBuf, CliError> {
    let stamped = Stamped {
        provenance: Provenance::of(config),
        body,
    };
    let mut text = serde_json::to_string_pretty(&stamped)
        .map_err(|e| CliError::Runtime(format!("cannot encode {name}: {e}")))?;
    text.push('\n');
    write_out(config, name, &text)
}

fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T, CliError> {
    let raw = fs::read_to_string(path)
        .map_err(|e| CliError::Runtime(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&raw).map_err(|e| CliError::Runtime(format!("{}: {e}", path.display())))
}

fn load(config: &RunConfig) -> Result<Corpus, CliError> {
    let root = config.data_root()?;
    let (corpus, report) =
        load_corpus(root, config.dataset).map_err(|e| CliError::Runtime(e.to_string()))?;
    for e in &report.errors {
        eprintln!("kie-leakage: skipped {} ({}): {}", e.path, e.kind, e.detail);
    }
    for w in &report.warnings {
        eprintln!("kie-leakage: warning: {w}");
    }
    write_json::<&LoadReport>(config, "load_report.json", &report)?;
    Ok(corpus)
}

fn grouping(config: &RunConfig, corpus: &Corpus) -> Result<GroupingResult, CliError> {
    group_corpus(corpus, config.metric, config.threshold).map_err(|e| CliError::Usage(e.to_string()))
}

/// Configured ratios, or the corpus's own test share with the remainder
/// split 80/20 into train/val.
fn effective_ratios(config: &RunConfig, corpus: &Corpus) -> Result<Ratios, CliError> {
    if let Some(r) = config.ratios {
        return Ok(r);
    }
    let n = corpus.len();
    let n_test = corpus
        .documents
        .iter()
        .filter(|d| d.origin_split == OriginSplit::Test)
        .count();
    let test = if n == 0 || n_test == 0 || n_test == n {
        FALLBACK_TEST_FRACTION
    } else {
        n_test as f64 / n as f64
    };
    Ratios::from_test_fraction(test).map_err(|e| CliError::Usage(e.to_string()))
}

fn resample_error(e: ResampleError) -> CliError {
    match e {
        ResampleError::InfeasibleRatios { .. }
        | ResampleError::InvalidRatios(..)
        | ResampleError::InvalidParameter(_) => CliError::Usage(e.to_string()),
        other => CliError::Runtime(other.to_string()),
    }
}

fn stamp_manifest(m: &mut SplitManifest, config: &RunConfig) {
    let p = Provenance::of(config);
    m.provenance.insert("tool".into(), p.tool);
    m.provenance.insert("config_sha256".into(), p.config_sha256);
}

/// Groups the corpus and measures leakage of its shipped split, or of
/// `config.manifest` when one is given. Writes groups.json and
/// leakage.json.
pub fn cmd_audit(config: &RunConfig) -> Result<LeakageReport, CliError> {
    let corpus = load(config)?;
    let groups = grouping(config, &corpus)?;
    let report = match &config.manifest {
        Some(path) => {
            let raw = fs::read_to_string(path)
                .map_err(|e| CliError::Runtime(format!("cannot read {}: {e}", path.display())))?;
            let manifest = SplitManifest::from_tsv(&raw)
                .map_err(|e| CliError::Runtime(format!("{}: {e}", path.display())))?;
            leakage_report_for_manifest(&groups, &manifest)
        }
        None => leakage_report(&groups, &corpus).map_err(|e| {
            CliError::Runtime(format!(
                "{e}; the corpus has no train/test split, pass a manifest to audit"
            ))
        })?,
    };
    write_json(config, "groups.json", &groups)?;
    write_json(config, "leakage.json", &report)?;
    Ok(report)
}

fn write_histograms(config: &RunConfig, hist: &SizeHistogram) -> Result<(), CliError> {
    let head = Provenance::of(config).comment_lines();
    write_out(config, "histogram.csv", &format!("{head}{}", hist.to_csv()))?;
    if config.dataset == Dataset::Sroie {
        let binned = hist.rebin(&SROIE_BUCKET_ANCHORS);
        write_out(config, "histogram_binned.csv", &format!("{head}{}", binned.to_csv()))?;
    }
    Ok(())
}

/// Writes groups.json and the group-size histogram(s).
pub fn cmd_group(config: &RunConfig) -> Result<GroupingResult, CliError> {
    let corpus = load(config)?;
    let groups = grouping(config, &corpus)?;
    write_json(config, "groups.json", &groups)?;
    write_histograms(config, &group_size_histogram(&groups))?;
    Ok(groups)
}

/// Scores the threshold grid against `config.ground_truth`; writes
/// tuning.csv.
pub fn cmd_tune(config: &RunConfig) -> Result<TuningTable, CliError> {
    let gt_path = config
        .ground_truth
        .as_deref()
        .ok_or_else(|| CliError::Usage("`tune` needs `ground_truth`".into()))?;
    let raw = fs::read_to_string(gt_path)
        .map_err(|e| CliError::Runtime(format!("cannot read {}: {e}", gt_path.display())))?;
    let gt = GroundTruthGrouping::from_json(&raw)
        .map_err(|e| CliError::Runtime(format!("{}: {e}", gt_path.display())))?;
    let corpus = load(config)?;
    let table = tune_threshold(&corpus, config.metric, &gt, &config.thresholds)
        .map_err(|e| CliError::Runtime(e.to_string()))?;
    let head = Provenance::of(config).comment_lines();
    write_out(config, "tuning.csv", &format!("{head}{}", table.to_csv()))?;
    Ok(table)
}

#[derive(Debug, Clone)]
pub struct ResampleOutcome {
    pub groups: GroupingResult,
    pub manifest: SplitManifest,
    pub folds: Vec<SplitManifest>,
}

fn build_resample(config: &RunConfig, corpus: &Corpus) -> Result<ResampleOutcome, CliError> {
    let groups = grouping(config, corpus)?;
    let ratios = effective_ratios(config, corpus)?;
    let mut manifest = resample_splits(&groups, ratios, config.seed).map_err(resample_error)?;
    stamp_manifest(&mut manifest, config);
    let violations = verify_manifest(&manifest, &groups);
    if !violations.is_empty() {
        return Err(violation_error("manifest.tsv", &violations));
    }
    let cv = match config.fold_mode {
        FoldMode::Group => make_group_cv_folds(
            &manifest,
            &groups,
            config.k_folds,
            config.train_fraction,
            config.seed,
        ),
        FoldMode::Random => {
            make_cv_folds(&manifest, config.k_folds, config.train_fraction, config.seed)
        }
    }
    .map_err(resample_error)?;
    if config.fold_mode == FoldMode::Group {
        for fold in &cv.folds {
            let straddling: Vec<Violation> = verify_manifest(fold, &groups)
                .into_iter()
                .filter(|v| matches!(v, Violation::StraddlingGroup { .. }))
                .collect();
            if !straddling.is_empty() {
                return Err(violation_error(
                    &format!("fold_{}.tsv", fold.fold.unwrap_or(0)),
                    &straddling,
                ));
            }
        }
    }
    Ok(ResampleOutcome {
        groups,
        manifest,
        folds: cv.folds,
    })
}

fn violation_error(name: &str, violations: &[Violation]) -> CliError {
    let mut msg = format!("{name} failed verification with {} violation(s):", violations.len());
    for v in violations {
        let _ = write!(msg, "\n  {}", serde_json::to_string(v).unwrap_or_default());
    }
    CliError::Runtime(msg)
}

/// Writes groups.json, manifest.tsv and `k` fold_<i>.tsv files.
pub fn cmd_resample(config: &RunConfig) -> Result<ResampleOutcome, CliError> {
    let corpus = load(config)?;
    let out = build_resample(config, &corpus)?;
    write_json(config, "groups.json", &out.groups)?;
    write_out(config, "manifest.tsv", &out.manifest.to_tsv())?;
    for (i, fold) in out.folds.iter().enumerate() {
        let mut fold = fold.clone();
        stamp_manifest(&mut fold, config);
        write_out(config, &format!("fold_{i}.tsv"), &fold.to_tsv())?;
    }
    Ok(out)
}

/// The split the corpus shipped with, or a seeded document-level shuffle
/// at the configured ratios when it has none.
fn leaky_manifest(config: &RunConfig, corpus: &Corpus) -> Result<SplitManifest, CliError> {
    if let Ok(m) = SplitManifest::from_origin_splits(corpus) {
        return Ok(m);
    }
    let ratios = effective_ratios(config, corpus)?;
    let mut ids: Vec<&str> = corpus.doc_ids().collect();
    SplitMix64::new(config.seed).shuffle(&mut ids);
    let n = ids.len() as f64;
    let n_test = (ratios.test * n).round() as usize;
    let n_val = (ratios.val * n).round() as usize;
    let assignments: BTreeMap<String, Split> = ids
        .into_iter()
        .enumerate()
        .map(|(i, d)| {
            let split = if i < n_test {
                Split::Test
            } else if i < n_test + n_val {
                Split::Val
            } else {
                Split::Train
            };
            (d.to_string(), split)
        })
        .collect();
    Ok(SplitManifest::new(assignments, config.seed, ratios))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalOutcome {
    pub leaky: EvalMetrics,
    pub clean: EvalMetrics,
    #[serde(flatten)]
    pub gap: GapReport,
    /// Supplied predictions scored on the original test split.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub predictions: Option<EvalMetrics>,
}

/// Memorizer baseline on the shipped split versus the group-atomic
/// resample; writes metrics.json.
pub fn cmd_eval(config: &RunConfig) -> Result<EvalOutcome, CliError> {
    let corpus = load(config)?;
    let resampled = build_resample(config, &corpus)?;
    let leaky = leaky_manifest(config, &corpus)?;
    let groups = &resampled.groups;
    let leaky_metrics =
        evaluate_memorizer(&corpus, groups, &leaky).map_err(|e| CliError::Runtime(e.to_string()))?;
    let clean_metrics = evaluate_memorizer(&corpus, groups, &resampled.manifest)
        .map_err(|e| CliError::Runtime(e.to_string()))?;

    let predictions = match &config.predictions {
        None => None,
        Some(path) => {
            let pred: Vec<ExtractedEntity> = read_json(path)?;
            let pred: Vec<ExtractedEntity> = pred
                .into_iter()
                .map(|e| ExtractedEntity::new(e.doc_id, e.label, &e.text))
                .collect();
            let gold: Vec<ExtractedEntity> = leaky
                .docs_in(Split::Test)
                .filter_map(|d| corpus.get(d))
                .flat_map(gold_entities)
                .collect();
            Some(entity_f1(&gold, &pred))
        }
    };

    let outcome = EvalOutcome {
        gap: GapReport {
            f1_leaky: leaky_metrics.f1,
            f1_clean: clean_metrics.f1,
            gap: leaky_metrics.f1 - clean_metrics.f1,
        },
        leaky: leaky_metrics,
        clean: clean_metrics,
        predictions,
    };
    write_json(config, "metrics.json", &outcome)?;
    Ok(outcome)
}

fn read_tuning(path: &Path) -> Result<Vec<Vec<String>>, CliError> {
    let raw = fs::read_to_string(path)
        .map_err(|e| CliError::Runtime(format!("cannot read {}: {e}", path.display())))?;
    Ok(raw
        .lines()
        .filter(|l| !l.starts_with('#') && !l.is_empty())
        .skip(1)
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect())
}

fn pct(num: usize, den: usize) -> String {
    if den == 0 {
        "0.0%".into()
    } else {
        format!("{:.1}%", 100.0 * num as f64 / den as f64)
    }
}

fn histogram_section(
    out: &mut String,
    hist: &SizeHistogram,
    reference: Option<&[(usize, usize)]>,
    size_label: &str,
) {
    let reference: Option<BTreeMap<usize, usize>> = reference.map(|r| r.iter().copied().collect());
    let mut sizes: Vec<usize> = hist.0.keys().copied().collect();
    if let Some(r) = &reference {
        sizes.extend(r.keys());
        sizes.sort_unstable();
        sizes.dedup();
    }
    match reference {
        Some(_) => {
            let _ = writeln!(out, "| {size_label} | groups | documents | reference groups |");
            let _ = writeln!(out, "|---:|---:|---:|---:|");
        }
        None => {
            let _ = writeln!(out, "| {size_label} | groups | documents |");
            let _ = writeln!(out, "|---:|---:|---:|");
        }
    }
    for size in sizes {
        let count = hist.count(size);
        match &reference {
            Some(r) => {
                let _ = writeln!(
                    out,
                    "| {size} | {count} | {} | {} |",
                    size * count,
                    r.get(&size).copied().unwrap_or(0)
                );
            }
            None => {
                let _ = writeln!(out, "| {size} | {count} | {} |", size * count);
            }
        }
    }
    let _ = writeln!(
        out,
        "| total | {} | {} documents |{}",
        hist.groups(),
        hist.documents(),
        if reference.is_some() { " |" } else { "" }
    );
}

/// Reads groups.json, leakage.json, metrics.json (and tuning.csv when
/// present) from the output directory; writes histogram CSVs and
/// summary.md.
pub fn cmd_report(config: &RunConfig) -> Result<PathBuf, CliError> {
    let dir = &config.output_dir;
    let required = ["groups.json", "leakage.json", "metrics.json"];
    let missing: Vec<&str> = required
        .iter()
        .copied()
        .filter(|f| !dir.join(f).is_file())
        .collect();
    if !missing.is_empty() {
        return Err(CliError::Runtime(format!(
            "missing artifacts in {}: {} (run group/audit and eval first)",
            dir.display(),
            missing.join(", ")
        )));
    }
    let groups: Stamped<GroupingResult> = read_json(&dir.join("groups.json"))?;
    let leakage: Stamped<LeakageReport> = read_json(&dir.join("leakage.json"))?;
    let metrics: Stamped<EvalOutcome> = read_json(&dir.join("metrics.json"))?;
    let (groups, leakage, metrics) = (groups.body, leakage.body, metrics.body);
    let tuning_path = dir.join("tuning.csv");
    let tuning = if tuning_path.is_file() {
        Some(read_tuning(&tuning_path)?)
    } else {
        None
    };

    let hist = group_size_histogram(&groups);
    write_histograms(config, &hist)?;

    let p = Provenance::of(config);
    let mut out = String::new();
    let _ = writeln!(out, "# Template leakage summary\n");
    let _ = writeln!(out, "- tool: {}", p.tool);
    let _ = writeln!(out, "- config sha256: {}", p.config_sha256);
    let _ = writeln!(out, "- seed: {}", p.seed);
    let _ = writeln!(out, "- dataset: {}\n", config.dataset);

    let _ = writeln!(out, "## Group-size distribution\n");
    let _ = writeln!(
        out,
        "{} documents in {} groups (metric {}, threshold {}); largest group: {} documents.\n",
        groups.num_documents(),
        groups.groups.len(),
        groups.metric,
        groups.threshold,
        groups.max_group_size()
    );
    match config.dataset {
        Dataset::Funsd => histogram_section(&mut out, &hist, Some(&FUNSD_REFERENCE_SIZES), "size"),
        Dataset::Sroie => {
            histogram_section(&mut out, &hist, None, "size");
            let _ = writeln!(out, "\nBinned:\n");
            histogram_section(
                &mut out,
                &hist.rebin(&SROIE_BUCKET_ANCHORS),
                Some(&SROIE_REFERENCE_SIZES),
                "size bucket",
            );
        }
        Dataset::Generic => histogram_section(&mut out, &hist, None, "size"),
    }

    let _ = writeln!(out, "\n## Leakage\n");
    let _ = writeln!(out, "| measure | value |\n|---|---:|");
    let _ = writeln!(out, "| test documents | {} documents |", leakage.n_test);
    let _ = writeln!(out, "| leaked test documents | {} documents |", leakage.n_leaked_test);
    let _ = writeln!(
        out,
        "| leak fraction | {} |",
        pct(leakage.n_leaked_test, leakage.n_test)
    );
    let _ = writeln!(out, "| offending groups | {} |", leakage.offending_groups.len());

    let _ = writeln!(out, "\n## Threshold tuning\n");
    match tuning {
        Some(rows) if !rows.is_empty() => {
            let _ = writeln!(out, "| threshold | precision | recall | f1 | selected |");
            let _ = writeln!(out, "|---:|---:|---:|---:|:---:|");
            for r in rows {
                let cell = |i: usize| r.get(i).map(String::as_str).unwrap_or("");
                let _ = writeln!(
                    out,
                    "| {} | {} | {} | {} | {} |",
                    cell(0),
                    cell(1),
                    cell(2),
                    cell(3),
                    if cell(4) == "1" { "yes" } else { "" }
                );
            }
        }
        _ => {
            let _ = writeln!(out, "Not run: no tuning.csv (run `kie-leakage tune` with ground-truth groups).");
        }
    }

    let _ = writeln!(out, "\n## Memorizer gap\n");
    let _ = writeln!(out, "| split | precision | recall | f1 | tp | fp | fn |");
    let _ = writeln!(out, "|---|---:|---:|---:|---:|---:|---:|");
    for (name, m) in [("original", &metrics.leaky), ("group-atomic", &metrics.clean)] {
        let _ = writeln!(
            out,
            "| {name} | {:.4} | {:.4} | {:.4} | {} | {} | {} |",
            m.precision, m.recall, m.f1, m.tp, m.fp, m.fn_
        );
    }
    let _ = writeln!(out, "\nGap (original minus group-atomic F1): {:.4}", metrics.gap.gap);

    write_out(config, "summary.md", &out)
}
