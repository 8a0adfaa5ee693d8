//! Text-to-prediction plumbing shared by the benchmark, the CLI and tests.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::augment::{balance_classes, AugmentationPlan, Thesaurus};
use crate::classifiers::{self, ClassifierModel, ClassifierParams, TrainingMatrix};
use crate::corpus::LabeledUtterance;
use crate::error::{Error, Result};
use crate::preprocess::normalize_text;
use crate::semhash::{featurize_text, FeaturizedText};
use crate::vectorize::{FeatureSpace, SparseVector};

/// Hooks that see every sample entering a training-side stage, before the
/// stage validates its input.
pub trait PipelineObserver: Sync {
    fn augment_input(&self, _samples: &[LabeledUtterance]) {}
    fn fit_input(&self, _samples: &[LabeledUtterance]) {}
    fn grid_search_input(&self, _samples: &[LabeledUtterance]) {}
}

#[derive(Debug, Clone, Copy, Default)]
pub struct NoopObserver;

impl PipelineObserver for NoopObserver {}

pub(crate) fn reject_test_samples(stage: &'static str, samples: &[LabeledUtterance]) -> Result<()> {
    match samples.iter().find(|s| !s.is_training) {
        Some(leak) => Err(Error::Leakage {
            stage,
            text: leak.text.clone(),
        }),
        None => Ok(()),
    }
}

pub fn featurize(raw: &str) -> FeaturizedText {
    featurize_text(&normalize_text(raw))
}

/// Balances `train` with synonym augmentation, or returns it unchanged when
/// no thesaurus is given.
pub fn augment_training(
    train: &[LabeledUtterance],
    thesaurus: Option<&Thesaurus>,
    seed: u64,
    observer: &dyn PipelineObserver,
) -> Result<Vec<LabeledUtterance>> {
    observer.augment_input(train);
    reject_test_samples("augmentation", train)?;
    match thesaurus {
        Some(th) => balance_classes(train, th, &AugmentationPlan::new(seed)),
        None => Ok(train.to_vec()),
    }
}

/// Sorted distinct intents.
pub fn class_names(samples: &[LabeledUtterance]) -> Vec<String> {
    samples
        .iter()
        .map(|s| s.intent.clone())
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect()
}

/// A feature space fitted on training samples together with their vectors.
#[derive(Debug, Clone)]
pub struct FittedFeatures {
    pub feature_space: FeatureSpace,
    pub matrix: TrainingMatrix,
}

pub fn fit_features(
    train: &[LabeledUtterance],
    observer: &dyn PipelineObserver,
) -> Result<FittedFeatures> {
    observer.fit_input(train);
    reject_test_samples("vectorizer fit", train)?;
    let featurized: Vec<FeaturizedText> = train.iter().map(|s| featurize(&s.text)).collect();
    let feature_space = FeatureSpace::fit(&featurized)?;
    let names = class_names(train);
    let rows = featurized
        .iter()
        .map(|f| feature_space.transform(f))
        .collect();
    let labels = train
        .iter()
        .map(|s| {
            names
                .binary_search(&s.intent)
                .expect("label collected above")
        })
        .collect();
    let matrix = TrainingMatrix::new(rows, labels, names, feature_space.dim())?;
    Ok(FittedFeatures {
        feature_space,
        matrix,
    })
}

/// A feature space and the classifier trained on its vectors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainedPipeline {
    pub feature_space: FeatureSpace,
    pub model: ClassifierModel,
}

impl TrainedPipeline {
    pub fn vectorize(&self, raw: &str) -> SparseVector {
        self.feature_space.transform(&featurize(raw))
    }

    pub fn predict(&self, raw: &str) -> Result<&str> {
        self.model.predict_label(&self.vectorize(raw))
    }

    pub fn scores(&self, raw: &str) -> Result<Vec<f64>> {
        self.model.decision_values(&self.vectorize(raw))
    }

    pub fn class_names(&self) -> &[String] {
        &self.model.class_names
    }
}

/// Fits the feature space on `train` and trains one classifier on it.
/// `train` must already be augmented if augmentation is wanted.
pub fn train_pipeline(
    train: &[LabeledUtterance],
    params: &ClassifierParams,
    seed: u64,
    observer: &dyn PipelineObserver,
) -> Result<TrainedPipeline> {
    let fitted = fit_features(train, observer)?;
    let model = classifiers::train(params, &fitted.matrix, seed)?;
    Ok(TrainedPipeline {
        feature_space: fitted.feature_space,
        model,
    })
}
