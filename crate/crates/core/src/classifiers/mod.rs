//! Classifiers over tf-idf sparse vectors.
//!
//! Every trainer consumes a [`TrainingMatrix`] and returns a
//! [`ClassifierModel`]. Predictions take the argmax of per-class decision
//! values, with ties going to the lowest class id.

mod kmeans;
mod linear;
mod naive_bayes;
mod neighbors;

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use kmeans::{train_kmeans, KMeansModel};
pub use linear::{
    pa_step, train_linear_svc, train_passive_aggressive, train_ridge, train_sgd, LinearModel,
};
pub use naive_bayes::{train_bernoulli_nb, train_multinomial_nb, BernoulliNb, MultinomialNb};
pub use neighbors::{predict_knn, train_knn, train_nearest_centroid, KnnModel, NearestCentroid};

use crate::error::{Error, Result};
use crate::vectorize::SparseVector;

/// Labeled rows over a fixed number of feature columns.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainingMatrix {
    rows: Vec<SparseVector>,
    labels: Vec<usize>,
    class_names: Vec<String>,
    dim: usize,
}

impl TrainingMatrix {
    /// Every class must own at least one row and every row must fit in
    /// `dim` columns.
    pub fn new(
        rows: Vec<SparseVector>,
        labels: Vec<usize>,
        class_names: Vec<String>,
        dim: usize,
    ) -> Result<Self> {
        if rows.len() != labels.len() {
            return Err(Error::LengthMismatch {
                left: rows.len(),
                right: labels.len(),
            });
        }
        if rows.is_empty() {
            return Err(Error::InvalidArgument("training matrix has no rows".into()));
        }
        if let Some(&bad) = labels.iter().find(|&&l| l >= class_names.len()) {
            return Err(Error::InvalidArgument(format!(
                "label {bad} out of range for {} classes",
                class_names.len()
            )));
        }
        let present: BTreeSet<usize> = labels.iter().copied().collect();
        if let Some(missing) = (0..class_names.len()).find(|c| !present.contains(c)) {
            return Err(Error::EmptyClass(class_names[missing].clone()));
        }
        if let Some(row) = rows.iter().find(|r| r.min_dim() > dim) {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: row.min_dim(),
            });
        }
        Ok(Self {
            rows,
            labels,
            class_names,
            dim,
        })
    }

    pub fn rows(&self) -> &[SparseVector] {
        &self.rows
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn class_names(&self) -> &[String] {
        &self.class_names
    }

    pub fn n_classes(&self) -> usize {
        self.class_names.len()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn class_counts(&self) -> Vec<usize> {
        let mut counts = vec![0; self.n_classes()];
        for &l in &self.labels {
            counts[l] += 1;
        }
        counts
    }

    /// Rows at `indices`. Classes with no row in the subset are dropped and
    /// the remaining class ids are compacted in order.
    pub fn subset(&self, indices: &[usize]) -> Result<Self> {
        let rows = indices.iter().map(|&i| self.rows[i].clone()).collect();
        let labels: Vec<usize> = indices.iter().map(|&i| self.labels[i]).collect();
        let present: BTreeSet<usize> = labels.iter().copied().collect();
        let remap: Vec<Option<usize>> = (0..self.n_classes())
            .map(|c| present.iter().position(|&p| p == c))
            .collect();
        let class_names = present
            .iter()
            .map(|&c| self.class_names[c].clone())
            .collect();
        let labels = labels.iter().map(|&l| remap[l].expect("present")).collect();
        Self::new(rows, labels, class_names, self.dim)
    }

    fn require_two_classes(&self) -> Result<()> {
        if self.n_classes() < 2 {
            return Err(Error::SingleClass(self.n_classes()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ClassifierKind {
    Ridge,
    Knn,
    PassiveAggressive,
    LinearSvc,
    Sgd,
    NearestCentroid,
    MultinomialNb,
    BernoulliNb,
    Kmeans,
}

impl ClassifierKind {
    pub const ALL: [ClassifierKind; 9] = [
        Self::Ridge,
        Self::Knn,
        Self::PassiveAggressive,
        Self::LinearSvc,
        Self::Sgd,
        Self::NearestCentroid,
        Self::MultinomialNb,
        Self::BernoulliNb,
        Self::Kmeans,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Self::Ridge => "ridge",
            Self::Knn => "knn",
            Self::PassiveAggressive => "passive_aggressive",
            Self::LinearSvc => "linear_svc",
            Self::Sgd => "sgd",
            Self::NearestCentroid => "nearest_centroid",
            Self::MultinomialNb => "multinomial_nb",
            Self::BernoulliNb => "bernoulli_nb",
            Self::Kmeans => "kmeans",
        }
    }

    pub fn display_name(self) -> &'static str {
        match self {
            Self::Ridge => "Ridge Classifier",
            Self::Knn => "KNN Classifier",
            Self::PassiveAggressive => "Passive Aggressive",
            Self::LinearSvc => "Linear SVC",
            Self::Sgd => "SGD Classifier",
            Self::NearestCentroid => "Nearest Centroid",
            Self::MultinomialNb => "Multinomial NB",
            Self::BernoulliNb => "Bernoulli NB",
            Self::Kmeans => "K-means",
        }
    }

    pub fn default_params(self) -> ClassifierParams {
        match self {
            Self::Ridge => ClassifierParams::Ridge { alpha: 1.0 },
            Self::Knn => ClassifierParams::Knn { k: 5 },
            Self::PassiveAggressive => ClassifierParams::PassiveAggressive { c: 1.0, epochs: 5 },
            Self::LinearSvc => ClassifierParams::LinearSvc { c: 1.0 },
            Self::Sgd => ClassifierParams::Sgd {
                alpha: 1e-4,
                epochs: 20,
            },
            Self::NearestCentroid => ClassifierParams::NearestCentroid,
            Self::MultinomialNb => ClassifierParams::MultinomialNb { smoothing: 1.0 },
            Self::BernoulliNb => ClassifierParams::BernoulliNb {
                smoothing: 1.0,
                binarize_threshold: 0.0,
            },
            Self::Kmeans => ClassifierParams::Kmeans {
                k: None,
                max_iter: 100,
            },
        }
    }

    /// Hyperparameter grid searched by cross-validation. Kinds that run on
    /// fixed defaults return a single point.
    pub fn grid(self) -> Vec<ClassifierParams> {
        match self {
            Self::Knn => [3, 5, 7]
                .into_iter()
                .map(|k| ClassifierParams::Knn { k })
                .collect(),
            Self::Sgd => [1e-3, 1e-4, 1e-5]
                .into_iter()
                .flat_map(|alpha| {
                    [10, 20]
                        .into_iter()
                        .map(move |epochs| ClassifierParams::Sgd { alpha, epochs })
                })
                .collect(),
            other => vec![other.default_params()],
        }
    }
}

impl fmt::Display for ClassifierKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ClassifierKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| {
                let valid: Vec<_> = Self::ALL.iter().map(|k| k.name()).collect();
                Error::InvalidArgument(format!(
                    "unknown classifier {s:?}; valid names: {}",
                    valid.join(", ")
                ))
            })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ClassifierParams {
    Ridge {
        alpha: f64,
    },
    Knn {
        k: usize,
    },
    PassiveAggressive {
        c: f64,
        epochs: usize,
    },
    LinearSvc {
        c: f64,
    },
    Sgd {
        alpha: f64,
        epochs: usize,
    },
    NearestCentroid,
    MultinomialNb {
        smoothing: f64,
    },
    BernoulliNb {
        smoothing: f64,
        binarize_threshold: f64,
    },
    Kmeans {
        /// Defaults to the number of classes.
        k: Option<usize>,
        max_iter: usize,
    },
}

impl ClassifierParams {
    pub fn kind(&self) -> ClassifierKind {
        match self {
            Self::Ridge { .. } => ClassifierKind::Ridge,
            Self::Knn { .. } => ClassifierKind::Knn,
            Self::PassiveAggressive { .. } => ClassifierKind::PassiveAggressive,
            Self::LinearSvc { .. } => ClassifierKind::LinearSvc,
            Self::Sgd { .. } => ClassifierKind::Sgd,
            Self::NearestCentroid => ClassifierKind::NearestCentroid,
            Self::MultinomialNb { .. } => ClassifierKind::MultinomialNb,
            Self::BernoulliNb { .. } => ClassifierKind::BernoulliNb,
            Self::Kmeans { .. } => ClassifierKind::Kmeans,
        }
    }

    /// Short human-readable form, e.g. `k=5`.
    pub fn summary(&self) -> String {
        match self {
            Self::Ridge { alpha } => format!("alpha={alpha}"),
            Self::Knn { k } => format!("k={k}"),
            Self::PassiveAggressive { c, epochs } => format!("C={c},epochs={epochs}"),
            Self::LinearSvc { c } => format!("C={c}"),
            Self::Sgd { alpha, epochs } => format!("alpha={alpha},epochs={epochs}"),
            Self::NearestCentroid => String::new(),
            Self::MultinomialNb { smoothing } => format!("smoothing={smoothing}"),
            Self::BernoulliNb {
                smoothing,
                binarize_threshold,
            } => format!("smoothing={smoothing},binarize={binarize_threshold}"),
            Self::Kmeans { k, max_iter } => match k {
                Some(k) => format!("k={k},max_iter={max_iter}"),
                None => format!("max_iter={max_iter}"),
            },
        }
    }
}

/// Learned state of one classifier kind.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum ModelParams {
    Linear(LinearModel),
    MultinomialNb(MultinomialNb),
    BernoulliNb(BernoulliNb),
    NearestCentroid(NearestCentroid),
    Knn(KnnModel),
    Kmeans(KMeansModel),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassifierModel {
    pub kind: ClassifierKind,
    pub class_names: Vec<String>,
    pub dim: usize,
    pub params: ModelParams,
}

impl ClassifierModel {
    pub fn n_classes(&self) -> usize {
        self.class_names.len()
    }

    /// Per-class scores; larger is better.
    pub fn decision_values(&self, x: &SparseVector) -> Result<Vec<f64>> {
        if x.min_dim() > self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: x.min_dim(),
            });
        }
        Ok(match &self.params {
            ModelParams::Linear(m) => m.decision_values(x),
            ModelParams::MultinomialNb(m) => m.joint_log_likelihood(x),
            ModelParams::BernoulliNb(m) => m.joint_log_likelihood(x),
            ModelParams::NearestCentroid(m) => m.decision_values(x),
            ModelParams::Knn(m) => m.votes(x, self.n_classes()),
            ModelParams::Kmeans(m) => m.decision_values(x, self.n_classes()),
        })
    }

    pub fn predict(&self, x: &SparseVector) -> Result<usize> {
        Ok(argmax(&self.decision_values(x)?))
    }

    pub fn predict_label(&self, x: &SparseVector) -> Result<&str> {
        Ok(&self.class_names[self.predict(x)?])
    }

    /// Normalized class posteriors for the naive Bayes kinds.
    pub fn class_posteriors(&self, x: &SparseVector) -> Result<Option<Vec<f64>>> {
        match &self.params {
            ModelParams::MultinomialNb(_) | ModelParams::BernoulliNb(_) => {
                Ok(Some(softmax_log(&self.decision_values(x)?)))
            }
            _ => Ok(None),
        }
    }
}

/// Trains the kind selected by `params`. `seed` drives every stochastic
/// trainer; deterministic trainers ignore it.
pub fn train(params: &ClassifierParams, tm: &TrainingMatrix, seed: u64) -> Result<ClassifierModel> {
    match *params {
        ClassifierParams::Ridge { alpha } => train_ridge(tm, alpha),
        ClassifierParams::Knn { k } => train_knn(tm, k),
        ClassifierParams::PassiveAggressive { c, epochs } => {
            train_passive_aggressive(tm, c, epochs, seed)
        }
        ClassifierParams::LinearSvc { c } => train_linear_svc(tm, c),
        ClassifierParams::Sgd { alpha, epochs } => train_sgd(tm, alpha, epochs, seed),
        ClassifierParams::NearestCentroid => train_nearest_centroid(tm),
        ClassifierParams::MultinomialNb { smoothing } => train_multinomial_nb(tm, smoothing),
        ClassifierParams::BernoulliNb {
            smoothing,
            binarize_threshold,
        } => train_bernoulli_nb(tm, smoothing, binarize_threshold),
        ClassifierParams::Kmeans { k, max_iter } => {
            train_kmeans(tm, k.unwrap_or(tm.n_classes()), seed, max_iter)
        }
    }
}

/// Index of the largest score; the first index wins ties and NaN never wins.
pub fn argmax(scores: &[f64]) -> usize {
    let mut best = 0;
    let mut best_score = f64::NEG_INFINITY;
    for (i, &s) in scores.iter().enumerate() {
        if s > best_score {
            best = i;
            best_score = s;
        }
    }
    best
}

fn softmax_log(log_scores: &[f64]) -> Vec<f64> {
    let max = log_scores.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let exps: Vec<f64> = log_scores.iter().map(|s| (s - max).exp()).collect();
    let total: f64 = exps.iter().sum();
    exps.into_iter().map(|e| e / total).collect()
}

fn check_positive(name: &str, value: f64) -> Result<()> {
    if !(value > 0.0 && value.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "{name} must be positive and finite, got {value}"
        )));
    }
    Ok(())
}
