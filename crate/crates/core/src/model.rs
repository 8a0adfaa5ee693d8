//! Versioned JSON model files.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::classifiers::{ClassifierModel, ClassifierParams};
use crate::error::{Error, Result};
use crate::evaluate::fnv1a;
use crate::pipeline::{featurize, TrainedPipeline};
use crate::preprocess::{PRONOUNS, PRONOUN_MASK, STOP_CHARS};
use crate::vectorize::{FeatureSpace, SparseVector};

pub const MODEL_FORMAT_VERSION: u32 = 1;
pub const MODEL_EXTENSION: &str = "shm";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PreprocessingConfig {
    /// FNV-1a of the pronoun list joined with newlines, as 16 hex digits.
    pub pronoun_set_hash: String,
    pub pronoun_mask: String,
    pub stop_chars: String,
}

impl PreprocessingConfig {
    pub fn current() -> Self {
        Self {
            pronoun_set_hash: format!("{:016x}", fnv1a(&PRONOUNS.join("\n"))),
            pronoun_mask: PRONOUN_MASK.to_string(),
            stop_chars: STOP_CHARS.iter().collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub corpus: String,
    pub seed: u64,
    /// Seconds since the Unix epoch.
    pub created_unix: u64,
    pub augmented: bool,
    pub thesaurus: Option<String>,
    pub params: ClassifierParams,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelArtifact {
    pub format_version: u32,
    pub preprocessing: PreprocessingConfig,
    pub feature_space: FeatureSpace,
    pub classifier: ClassifierModel,
    pub class_names: Vec<String>,
    pub provenance: Provenance,
}

impl ModelArtifact {
    pub fn new(pipeline: TrainedPipeline, provenance: Provenance) -> Self {
        Self {
            format_version: MODEL_FORMAT_VERSION,
            preprocessing: PreprocessingConfig::current(),
            class_names: pipeline.model.class_names.clone(),
            feature_space: pipeline.feature_space,
            classifier: pipeline.model,
            provenance,
        }
    }

    pub fn vectorize(&self, raw: &str) -> SparseVector {
        self.feature_space.transform(&featurize(raw))
    }

    pub fn predict(&self, raw: &str) -> Result<&str> {
        self.classifier.predict_label(&self.vectorize(raw))
    }

    pub fn scores(&self, raw: &str) -> Result<Vec<f64>> {
        self.classifier.decision_values(&self.vectorize(raw))
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// Parses a model file, rejecting other format versions and models
    /// built with different preprocessing.
    pub fn from_json(raw: &str) -> Result<Self> {
        let value: Value = serde_json::from_str(raw)?;
        let found = value
            .get("format_version")
            .and_then(Value::as_u64)
            .ok_or_else(|| Error::InvalidArgument("model file has no format_version".into()))?;
        if found != MODEL_FORMAT_VERSION as u64 {
            return Err(Error::VersionMismatch {
                found: u32::try_from(found).unwrap_or(u32::MAX),
                expected: MODEL_FORMAT_VERSION,
            });
        }
        let artifact: Self = serde_json::from_value(value)?;
        if artifact.preprocessing != PreprocessingConfig::current() {
            return Err(Error::PreprocessingMismatch);
        }
        if artifact.classifier.dim != artifact.feature_space.dim() {
            return Err(Error::DimensionMismatch {
                expected: artifact.feature_space.dim(),
                found: artifact.classifier.dim,
            });
        }
        if artifact.class_names != artifact.classifier.class_names {
            return Err(Error::InvalidArgument(
                "class names disagree with the classifier".into(),
            ));
        }
        Ok(artifact)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        fs::write(path, self.to_json()?).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let raw = fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_json(&raw)
    }
}
