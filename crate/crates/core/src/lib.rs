//! Subword semantic hashing for short-text intent classification.
//!
//! Text is normalized, split into `#`-padded character trigrams, weighted
//! with tf-idf and handed to one of several classifiers. The [`evaluate`]
//! module runs the multi-run cross-validated benchmark.

pub mod augment;
pub mod classifiers;
pub mod corpus;
pub mod error;
pub mod evaluate;
pub mod model;
pub mod pipeline;
pub mod preprocess;
pub mod semhash;
pub mod vectorize;

pub use augment::{balance_classes, synonym_augment, AugmentationPlan, Thesaurus};
pub use classifiers::{ClassifierKind, ClassifierModel, ClassifierParams, TrainingMatrix};
pub use corpus::{Dataset, LabeledUtterance, Split};
pub use error::{Error, Result};
pub use evaluate::{benchmark, BenchmarkConfig, EvalReport};
pub use model::ModelArtifact;
pub use pipeline::{train_pipeline, PipelineObserver, TrainedPipeline};
pub use preprocess::{normalize_text, NormalizedText};
pub use semhash::{featurize_text, subtokenize_word, FeaturizedText, SubToken};
pub use vectorize::{FeatureSpace, SparseVector};
