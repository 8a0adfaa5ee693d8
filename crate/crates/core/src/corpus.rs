//! Corpus ingestion.
//!
//! The primary format is the JSON layout used by the public NLU evaluation
//! corpora: a top-level `sentences` array whose entries carry `text`,
//! `intent` and a boolean `training` flag. Every other field (entities,
//! answers, authors, URLs) is accepted and dropped. A CSV alternative with a
//! `text,intent,split` header is supported for user corpora.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};

/// One utterance with its intent label and split tag.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabeledUtterance {
    pub text: String,
    pub intent: String,
    pub is_training: bool,
}

impl LabeledUtterance {
    pub fn new(text: impl Into<String>, intent: impl Into<String>, is_training: bool) -> Self {
        Self {
            text: text.into(),
            intent: intent.into(),
            is_training,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Split {
    Train,
    Test,
}

impl Split {
    fn matches(self, sample: &LabeledUtterance) -> bool {
        match self {
            Split::Train => sample.is_training,
            Split::Test => !sample.is_training,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Dataset {
    pub name: String,
    pub samples: Vec<LabeledUtterance>,
}

impl Dataset {
    pub fn new(name: impl Into<String>, samples: Vec<LabeledUtterance>) -> Self {
        Self {
            name: name.into(),
            samples,
        }
    }

    pub fn train(&self) -> impl Iterator<Item = &LabeledUtterance> {
        self.samples.iter().filter(|s| s.is_training)
    }

    pub fn test(&self) -> impl Iterator<Item = &LabeledUtterance> {
        self.samples.iter().filter(|s| !s.is_training)
    }

    pub fn split(&self, split: Split) -> Vec<LabeledUtterance> {
        self.samples
            .iter()
            .filter(|s| split.matches(s))
            .cloned()
            .collect()
    }

    /// Per-label sample counts of one split, ordered by label.
    pub fn class_distribution(&self, split: Split) -> BTreeMap<String, usize> {
        let mut counts = BTreeMap::new();
        for sample in self.samples.iter().filter(|s| split.matches(s)) {
            *counts.entry(sample.intent.clone()).or_insert(0) += 1;
        }
        counts
    }

    /// Structural problems that do not prevent use of the dataset: an empty
    /// split, or test labels that never occur in training.
    pub fn warnings(&self) -> Vec<String> {
        let mut warnings = Vec::new();
        let train = self.class_distribution(Split::Train);
        let test = self.class_distribution(Split::Test);
        if train.is_empty() {
            warnings.push(format!("{}: no training samples", self.name));
        }
        if test.is_empty() {
            warnings.push(format!("{}: no test samples", self.name));
        }
        for label in test.keys().filter(|l| !train.contains_key(*l)) {
            warnings.push(format!(
                "{}: test label {label:?} has no training samples",
                self.name
            ));
        }
        for (label, _) in train.iter().filter(|(l, _)| !test.contains_key(*l)) {
            warnings.push(format!(
                "{}: training label {label:?} has no test samples",
                self.name
            ));
        }
        warnings
    }
}

/// Free-function form of [`Dataset::class_distribution`].
pub fn class_distribution(ds: &Dataset, split: Split) -> BTreeMap<String, usize> {
    ds.class_distribution(split)
}

/// Loads a corpus file, choosing the CSV reader for `.csv` files and the
/// JSON reader otherwise.
pub fn load_dataset(path: impl AsRef<Path>, name: &str) -> Result<Dataset> {
    let path = path.as_ref();
    let is_csv = path
        .extension()
        .and_then(|e| e.to_str())
        .is_some_and(|e| e.eq_ignore_ascii_case("csv"));
    if is_csv {
        load_csv(path, name)
    } else {
        load_json(path, name)
    }
}

pub fn load_json(path: impl AsRef<Path>, name: &str) -> Result<Dataset> {
    let path = path.as_ref();
    let raw = read(path)?;
    parse_json(&raw, path, name)
}

fn parse_json(raw: &str, path: &Path, name: &str) -> Result<Dataset> {
    let corpus_err = |message: String| Error::Corpus {
        path: path.to_path_buf(),
        message,
    };
    let doc: Value = serde_json::from_str(raw).map_err(|e| corpus_err(e.to_string()))?;
    let sentences = doc
        .get("sentences")
        .and_then(Value::as_array)
        .ok_or_else(|| corpus_err("missing top-level \"sentences\" array".into()))?;

    let mut samples = Vec::with_capacity(sentences.len());
    for (index, entry) in sentences.iter().enumerate() {
        let record_err = |message: &str| Error::CorpusRecord {
            path: path.to_path_buf(),
            index,
            message: message.to_string(),
        };
        let text = entry
            .get("text")
            .and_then(Value::as_str)
            .ok_or_else(|| record_err("missing string field \"text\""))?;
        let intent = entry
            .get("intent")
            .and_then(Value::as_str)
            .ok_or_else(|| record_err("missing string field \"intent\""))?;
        let training = entry
            .get("training")
            .and_then(Value::as_bool)
            .ok_or_else(|| record_err("missing boolean field \"training\""))?;
        samples.push(validated(text, intent, training).map_err(record_err)?);
    }
    Ok(Dataset::new(name, samples))
}

#[derive(Debug, Deserialize)]
struct CsvRecord {
    text: String,
    intent: String,
    split: String,
}

pub fn load_csv(path: impl AsRef<Path>, name: &str) -> Result<Dataset> {
    let path = path.as_ref();
    let raw = read(path)?;
    let mut reader = csv::Reader::from_reader(raw.as_bytes());
    let mut samples = Vec::new();
    for (index, record) in reader.deserialize::<CsvRecord>().enumerate() {
        let record_err = |message: String| Error::CorpusRecord {
            path: path.to_path_buf(),
            index,
            message,
        };
        let record = record.map_err(|e| record_err(e.to_string()))?;
        let training = match record.split.trim() {
            "train" => true,
            "test" => false,
            other => return Err(record_err(format!("unknown split {other:?}"))),
        };
        samples.push(
            validated(&record.text, &record.intent, training)
                .map_err(|m| record_err(m.to_string()))?,
        );
    }
    Ok(Dataset::new(name, samples))
}

fn validated(text: &str, intent: &str, training: bool) -> Result<LabeledUtterance, &'static str> {
    if text.trim().is_empty() {
        return Err("empty text");
    }
    let intent = intent.trim();
    if intent.is_empty() {
        return Err("empty intent");
    }
    Ok(LabeledUtterance::new(text, intent, training))
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// The three public benchmark corpora, keyed by their short names.
pub const KNOWN_CORPORA: &[(&str, &str)] = &[
    ("chatbot", "ChatbotCorpus.json"),
    ("askubuntu", "AskUbuntuCorpus.json"),
    ("webapp", "WebApplicationsCorpus.json"),
];

/// Finds the file for dataset `key` inside `dir`: the published file name
/// for known corpora, then `<key>.json`, then `<key>.csv`.
pub fn resolve_corpus(dir: &Path, key: &str) -> Option<PathBuf> {
    let published = KNOWN_CORPORA
        .iter()
        .find(|(k, _)| *k == key)
        .map(|(_, file)| dir.join(file));
    published
        .into_iter()
        .chain([
            dir.join(format!("{key}.json")),
            dir.join(format!("{key}.csv")),
        ])
        .find(|p| p.is_file())
}
