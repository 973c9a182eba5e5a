//! Normalized document model and the FUNSD / SROIE readers that feed it.
//!
//! A [`Document`] is one annotated page: the OCR tokens with their boxes and
//! the labeled entities built on top of them. Split membership comes from
//! where a file sits on disk, never from its content.

mod funsd;
mod load;
mod sroie;
mod validate;
mod write;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use funsd::parse_funsd_document;
pub use load::{load_corpus, LoadError, LoadReport};
pub use sroie::parse_sroie_document;
pub use validate::{validate_document, Issue};
pub use write::{write_corpus_tree, write_funsd_document, write_sroie_document};

pub(crate) use funsd::parse_funsd_counted;
pub(crate) use sroie::parse_sroie_counted;

/// FUNSD entity labels.
pub const FUNSD_LABELS: [&str; 4] = ["question", "answer", "header", "other"];
/// SROIE key fields, in the order entity ids are assigned.
pub const SROIE_LABELS: [&str; 4] = ["company", "date", "address", "total"];

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("malformed annotation: {0}")]
    MalformedAnnotation(String),
    #[error("unknown label `{label}` for {dataset} documents")]
    UnknownLabel { label: String, dataset: Dataset },
    #[error("malformed OCR line {line}: {detail}")]
    MalformedOcrLine { line: usize, detail: String },
    #[error("duplicate document id `{0}`")]
    DuplicateDocId(String),
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl IngestError {
    /// Short machine-readable name used in load reports.
    pub fn kind(&self) -> &'static str {
        match self {
            IngestError::MalformedAnnotation(_) => "malformed_annotation",
            IngestError::UnknownLabel { .. } => "unknown_label",
            IngestError::MalformedOcrLine { .. } => "malformed_ocr_line",
            IngestError::DuplicateDocId(_) => "duplicate_doc_id",
            IngestError::Io { .. } => "io",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct BoundingBox {
    pub x0: u32,
    pub y0: u32,
    pub x1: u32,
    pub y1: u32,
}

impl BoundingBox {
    /// Builds a box from raw coordinates, rejecting inverted or negative ones.
    pub fn try_new(x0: i64, y0: i64, x1: i64, y1: i64) -> Result<Self, IngestError> {
        if x0 > x1 || y0 > y1 {
            return Err(IngestError::MalformedAnnotation(format!(
                "inverted box [{x0},{y0},{x1},{y1}]"
            )));
        }
        let conv = |v: i64| {
            u32::try_from(v).map_err(|_| {
                IngestError::MalformedAnnotation(format!(
                    "box coordinate {v} outside 0..={}",
                    u32::MAX
                ))
            })
        };
        Ok(Self {
            x0: conv(x0)?,
            y0: conv(y0)?,
            x1: conv(x1)?,
            y1: conv(y1)?,
        })
    }

    pub fn is_valid(&self) -> bool {
        self.x0 <= self.x1 && self.y0 <= self.y1
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Token {
    pub text: String,
    #[serde(rename = "box")]
    pub bbox: BoundingBox,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Entity {
    pub entity_id: u64,
    pub label: String,
    pub text: String,
    pub tokens: Vec<Token>,
    /// FUNSD `linking` pairs, kept verbatim. Nothing downstream reads them.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub linking: Vec<[u64; 2]>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Dataset {
    Funsd,
    Sroie,
    Generic,
}

impl Dataset {
    /// The closed label set, or `None` for generic corpora.
    pub fn labels(self) -> Option<&'static [&'static str]> {
        match self {
            Dataset::Funsd => Some(&FUNSD_LABELS),
            Dataset::Sroie => Some(&SROIE_LABELS),
            Dataset::Generic => None,
        }
    }

    pub fn accepts_label(self, label: &str) -> bool {
        self.labels().map_or(true, |set| set.contains(&label))
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Dataset::Funsd => "funsd",
            Dataset::Sroie => "sroie",
            Dataset::Generic => "generic",
        }
    }
}

impl fmt::Display for Dataset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Dataset {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "funsd" => Ok(Dataset::Funsd),
            "sroie" => Ok(Dataset::Sroie),
            "generic" => Ok(Dataset::Generic),
            other => Err(format!("unknown dataset `{other}` (expected funsd, sroie or generic)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OriginSplit {
    Train,
    Test,
    Unassigned,
}

impl OriginSplit {
    /// Maps a split directory name onto a split tag.
    pub fn from_dir_name(name: &str) -> Option<Self> {
        match name {
            "training_data" | "train" => Some(OriginSplit::Train),
            "testing_data" | "test" => Some(OriginSplit::Test),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Document {
    pub doc_id: String,
    pub dataset: Dataset,
    pub origin_split: OriginSplit,
    pub entities: Vec<Entity>,
    pub tokens: Vec<Token>,
}

impl Document {
    pub fn new(doc_id: impl Into<String>, dataset: Dataset, origin_split: OriginSplit) -> Self {
        Self {
            doc_id: doc_id.into(),
            dataset,
            origin_split,
            entities: Vec::new(),
            tokens: Vec::new(),
        }
    }

    pub fn entities_with_label<'a>(&'a self, label: &'a str) -> impl Iterator<Item = &'a Entity> {
        self.entities.iter().filter(move |e| e.label == label)
    }

    /// Canonical JSON form of the document (the shape written into reports).
    pub fn to_canonical_json(&self) -> String {
        serde_json::to_string(self).expect("document serialization is infallible")
    }

    pub fn from_canonical_json(raw: &str) -> Result<Self, IngestError> {
        serde_json::from_str(raw).map_err(|e| IngestError::MalformedAnnotation(e.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Corpus {
    pub dataset: Dataset,
    pub documents: Vec<Document>,
}

impl Corpus {
    /// Sorts documents by id and checks the corpus invariants.
    pub fn new(dataset: Dataset, mut documents: Vec<Document>) -> Result<Self, IngestError> {
        documents.sort_by(|a, b| a.doc_id.cmp(&b.doc_id));
        for pair in documents.windows(2) {
            if pair[0].doc_id == pair[1].doc_id {
                return Err(IngestError::DuplicateDocId(pair[0].doc_id.clone()));
            }
        }
        if let Some(doc) = documents.iter().find(|d| d.dataset != dataset) {
            return Err(IngestError::MalformedAnnotation(format!(
                "document `{}` is tagged {} inside a {} corpus",
                doc.doc_id, doc.dataset, dataset
            )));
        }
        Ok(Self { dataset, documents })
    }

    pub fn empty(dataset: Dataset) -> Self {
        Self {
            dataset,
            documents: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.documents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.documents.is_empty()
    }

    /// Index of a document by id. Documents are kept sorted so this is a
    /// binary search.
    pub fn position(&self, doc_id: &str) -> Option<usize> {
        self.documents
            .binary_search_by(|d| d.doc_id.as_str().cmp(doc_id))
            .ok()
    }

    pub fn get(&self, doc_id: &str) -> Option<&Document> {
        self.position(doc_id).map(|i| &self.documents[i])
    }

    pub fn doc_ids(&self) -> impl Iterator<Item = &str> {
        self.documents.iter().map(|d| d.doc_id.as_str())
    }
}
