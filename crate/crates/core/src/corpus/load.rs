use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{parse_funsd_counted, parse_sroie_counted, Corpus, Dataset, Document, IngestError, OriginSplit};

/// One file that could not be turned into a document.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LoadError {
    pub path: String,
    pub kind: String,
    pub detail: String,
}

/// Summary of a corpus load, serialized as `load_report.json`.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct LoadReport {
    pub documents: usize,
    pub dropped_lines: usize,
    pub errors: Vec<LoadError>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
}

enum Job {
    Funsd {
        path: PathBuf,
        split: OriginSplit,
    },
    Sroie {
        box_path: PathBuf,
        entities_path: PathBuf,
        split: OriginSplit,
    },
}

impl Job {
    fn primary_path(&self) -> &Path {
        match self {
            Job::Funsd { path, .. } => path,
            Job::Sroie { box_path, .. } => box_path,
        }
    }
}

fn io_err(path: &Path, source: std::io::Error) -> IngestError {
    IngestError::Io {
        path: path.display().to_string(),
        source,
    }
}

fn stem(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default()
}

/// Files directly inside `dir` with the given extension, sorted by name.
fn files_with_ext(dir: &Path, ext: &str) -> Result<Vec<PathBuf>, IngestError> {
    let mut out = Vec::new();
    for entry in fs::read_dir(dir).map_err(|e| io_err(dir, e))? {
        let path = entry.map_err(|e| io_err(dir, e))?.path();
        if path.is_file() && path.extension().is_some_and(|x| x.eq_ignore_ascii_case(ext)) {
            out.push(path);
        }
    }
    out.sort();
    Ok(out)
}

/// Split directories under `root`, keyed by directory name so the listing
/// order of the filesystem never matters.
fn split_dirs(root: &Path) -> Result<BTreeMap<String, (PathBuf, OriginSplit)>, IngestError> {
    let mut dirs = BTreeMap::new();
    for entry in fs::read_dir(root).map_err(|e| io_err(root, e))? {
        let path = entry.map_err(|e| io_err(root, e))?.path();
        if !path.is_dir() {
            continue;
        }
        let name = path
            .file_name()
            .map(|n| n.to_string_lossy().into_owned())
            .unwrap_or_default();
        if let Some(split) = OriginSplit::from_dir_name(&name) {
            dirs.insert(name, (path, split));
        }
    }
    Ok(dirs)
}

fn collect_jobs(
    root: &Path,
    dataset: Dataset,
    report: &mut LoadReport,
) -> Result<Vec<Job>, IngestError> {
    let mut jobs = Vec::new();
    let dirs = split_dirs(root)?;
    if dirs.is_empty() {
        report.warnings.push(format!(
            "no split directories (training_data/, testing_data/) under {}",
            root.display()
        ));
    }
    for (name, (dir, split)) in dirs {
        match dataset {
            Dataset::Funsd | Dataset::Generic => {
                let ann = dir.join("annotations");
                if !ann.is_dir() {
                    report.warnings.push(format!("{name}/ has no annotations/ directory"));
                    continue;
                }
                for path in files_with_ext(&ann, "json")? {
                    jobs.push(Job::Funsd { path, split });
                }
            }
            Dataset::Sroie => {
                let box_dir = dir.join("box");
                let ent_dir = dir.join("entities");
                if !box_dir.is_dir() || !ent_dir.is_dir() {
                    report
                        .warnings
                        .push(format!("{name}/ needs both box/ and entities/ directories"));
                    continue;
                }
                let mut entities: BTreeMap<String, PathBuf> = files_with_ext(&ent_dir, "txt")?
                    .into_iter()
                    .map(|p| (stem(&p), p))
                    .collect();
                for box_path in files_with_ext(&box_dir, "txt")? {
                    match entities.remove(&stem(&box_path)) {
                        Some(entities_path) => jobs.push(Job::Sroie {
                            box_path,
                            entities_path,
                            split,
                        }),
                        None => report.errors.push(LoadError {
                            path: box_path.display().to_string(),
                            kind: "unpaired_file".into(),
                            detail: "no matching entities file".into(),
                        }),
                    }
                }
                for (_, orphan) in entities {
                    report.errors.push(LoadError {
                        path: orphan.display().to_string(),
                        kind: "unpaired_file".into(),
                        detail: "no matching box file".into(),
                    });
                }
            }
        }
    }
    Ok(jobs)
}

fn run_job(job: &Job, dataset: Dataset) -> Result<(Document, usize), IngestError> {
    match job {
        Job::Funsd { path, split } => {
            let raw = fs::read(path).map_err(|e| io_err(path, e))?;
            parse_funsd_counted(&raw, &stem(path), *split, dataset)
        }
        Job::Sroie {
            box_path,
            entities_path,
            split,
        } => {
            let ocr = fs::read(box_path).map_err(|e| io_err(box_path, e))?;
            let ents = fs::read(entities_path).map_err(|e| io_err(entities_path, e))?;
            parse_sroie_counted(&ocr, &ents, &stem(box_path), *split)
        }
    }
}

/// Loads every annotated document under `root`.
///
/// Expected layouts:
///
/// ```text
/// funsd / generic:  <root>/{training_data,testing_data}/annotations/<id>.json
/// sroie:            <root>/{train,test,...}/box/<id>.txt + entities/<id>.txt
/// ```
///
/// A missing or unreadable root and duplicate ids are fatal. Files that fail
/// to parse are skipped and listed in the returned [`LoadReport`].
pub fn load_corpus(root: &Path, dataset: Dataset) -> Result<(Corpus, LoadReport), IngestError> {
    if !root.is_dir() {
        return Err(io_err(
            root,
            std::io::Error::new(std::io::ErrorKind::NotFound, "data root is not a directory"),
        ));
    }
    let mut report = LoadReport::default();
    let jobs = collect_jobs(root, dataset, &mut report)?;

    let results: Vec<_> = jobs.par_iter().map(|job| run_job(job, dataset)).collect();

    let mut documents = Vec::with_capacity(results.len());
    for (job, result) in jobs.iter().zip(results) {
        match result {
            Ok((doc, dropped)) => {
                report.dropped_lines += dropped;
                documents.push(doc);
            }
            Err(e) => report.errors.push(LoadError {
                path: job.primary_path().display().to_string(),
                kind: e.kind().to_string(),
                detail: e.to_string(),
            }),
        }
    }
    report.errors.sort_by(|a, b| a.path.cmp(&b.path));

    let corpus = Corpus::new(dataset, documents)?;
    report.documents = corpus.len();
    if corpus.is_empty() {
        report
            .warnings
            .push(format!("no documents found under {}", root.display()));
    }
    Ok((corpus, report))
}

#[cfg(test)]
mod tests {
    use super::*;
    use tempfile::TempDir;

    fn funsd_file(dir: &Path, split: &str, name: &str, body: &str) {
        let ann = dir.join(split).join("annotations");
        fs::create_dir_all(&ann).unwrap();
        fs::write(ann.join(format!("{name}.json")), body).unwrap();
    }

    const EMPTY_FORM: &str = r#"{"form": []}"#;

    #[test]
    fn splits_tagged_from_directories() {
        let tmp = TempDir::new().unwrap();
        for name in ["c", "a", "e"] {
            funsd_file(tmp.path(), "training_data", name, EMPTY_FORM);
        }
        for name in ["d", "b"] {
            funsd_file(tmp.path(), "testing_data", name, EMPTY_FORM);
        }
        let (corpus, report) = load_corpus(tmp.path(), Dataset::Funsd).unwrap();
        assert_eq!(corpus.len(), 5);
        assert_eq!(report.documents, 5);
        let ids: Vec<_> = corpus.doc_ids().collect();
        assert_eq!(ids, ["a", "b", "c", "d", "e"]);
        let train = corpus
            .documents
            .iter()
            .filter(|d| d.origin_split == OriginSplit::Train)
            .count();
        assert_eq!(train, 3);
    }

    #[test]
    fn duplicate_ids_across_splits() {
        let tmp = TempDir::new().unwrap();
        funsd_file(tmp.path(), "training_data", "x", EMPTY_FORM);
        funsd_file(tmp.path(), "testing_data", "x", EMPTY_FORM);
        let err = load_corpus(tmp.path(), Dataset::Funsd).unwrap_err();
        assert!(matches!(err, IngestError::DuplicateDocId(ref id) if id == "x"));
    }

    #[test]
    fn empty_root_warns() {
        let tmp = TempDir::new().unwrap();
        let (corpus, report) = load_corpus(tmp.path(), Dataset::Funsd).unwrap();
        assert!(corpus.is_empty());
        assert!(!report.warnings.is_empty());
    }

    #[test]
    fn missing_root_is_io_error() {
        let err = load_corpus(Path::new("/nonexistent/kie/root"), Dataset::Funsd).unwrap_err();
        assert!(matches!(err, IngestError::Io { .. }));
        assert!(err.to_string().contains("/nonexistent/kie/root"));
    }

    #[test]
    fn parse_errors_aggregated() {
        let tmp = TempDir::new().unwrap();
        funsd_file(tmp.path(), "training_data", "good", EMPTY_FORM);
        funsd_file(tmp.path(), "training_data", "bad", "{not json");
        let (corpus, report) = load_corpus(tmp.path(), Dataset::Funsd).unwrap();
        assert_eq!(corpus.len(), 1);
        assert_eq!(report.errors.len(), 1);
        assert!(report.errors[0].path.ends_with("bad.json"));
        assert_eq!(report.errors[0].kind, "malformed_annotation");
    }

    #[test]
    fn sroie_pairs_by_stem() {
        let tmp = TempDir::new().unwrap();
        let split = tmp.path().join("train");
        fs::create_dir_all(split.join("box")).unwrap();
        fs::create_dir_all(split.join("entities")).unwrap();
        fs::write(split.join("box/r1.txt"), "1,1,2,1,2,2,1,2,SHOP\n\n").unwrap();
        fs::write(split.join("entities/r1.txt"), r#"{"company": "Shop"}"#).unwrap();
        fs::write(split.join("box/r2.txt"), "1,1,2,1,2,2,1,2,X\n").unwrap();
        let (corpus, report) = load_corpus(tmp.path(), Dataset::Sroie).unwrap();
        assert_eq!(corpus.len(), 1);
        assert_eq!(report.dropped_lines, 1);
        assert_eq!(report.errors.len(), 1);
        assert_eq!(report.errors[0].kind, "unpaired_file");
    }
}
