//! Multinomial and Bernoulli naive Bayes with class priors taken from the
//! training distribution.

use serde::{Deserialize, Serialize};

use super::{check_positive, ClassifierKind, ClassifierModel, ModelParams, TrainingMatrix};
use crate::error::{Error, Result};
use crate::vectorize::SparseVector;

fn class_log_priors(tm: &TrainingMatrix) -> Vec<f64> {
    let total = tm.len() as f64;
    tm.class_counts()
        .into_iter()
        .map(|n| (n as f64 / total).ln())
        .collect()
}

/// Multinomial NB over fractional tf-idf mass.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MultinomialNb {
    pub dim: usize,
    pub class_log_prior: Vec<f64>,
    /// Class-major `ln P(feature | class)`.
    pub feature_log_prob: Vec<f64>,
}

impl MultinomialNb {
    pub fn joint_log_likelihood(&self, x: &SparseVector) -> Vec<f64> {
        self.class_log_prior
            .iter()
            .enumerate()
            .map(|(c, prior)| {
                prior + x.dot_dense(&self.feature_log_prob[c * self.dim..(c + 1) * self.dim])
            })
            .collect()
    }
}

pub fn train_multinomial_nb(tm: &TrainingMatrix, smoothing: f64) -> Result<ClassifierModel> {
    check_positive("smoothing", smoothing)?;
    let (k, dim) = (tm.n_classes(), tm.dim());
    let mut mass = vec![0.0; k * dim];
    for (row, &label) in tm.rows().iter().zip(tm.labels()) {
        row.add_scaled_to(&mut mass[label * dim..(label + 1) * dim], 1.0);
    }
    let mut feature_log_prob = vec![0.0; k * dim];
    for c in 0..k {
        let class_mass = &mass[c * dim..(c + 1) * dim];
        let denom = (class_mass.iter().sum::<f64>() + smoothing * dim as f64).ln();
        for (out, m) in feature_log_prob[c * dim..(c + 1) * dim]
            .iter_mut()
            .zip(class_mass)
        {
            *out = (m + smoothing).ln() - denom;
        }
    }
    Ok(ClassifierModel {
        kind: ClassifierKind::MultinomialNb,
        class_names: tm.class_names().to_vec(),
        dim,
        params: ModelParams::MultinomialNb(MultinomialNb {
            dim,
            class_log_prior: class_log_priors(tm),
            feature_log_prob,
        }),
    })
}

/// Bernoulli NB on features binarized at `weight > threshold`, including the
/// contribution of absent features.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BernoulliNb {
    pub dim: usize,
    pub binarize_threshold: f64,
    pub class_log_prior: Vec<f64>,
    /// Class-major `ln p` for feature present.
    pub feature_log_prob: Vec<f64>,
    /// Class-major `ln (1 − p)`.
    pub feature_log_neg_prob: Vec<f64>,
}

impl BernoulliNb {
    pub fn joint_log_likelihood(&self, x: &SparseVector) -> Vec<f64> {
        let dim = self.dim;
        self.class_log_prior
            .iter()
            .enumerate()
            .map(|(c, prior)| {
                let log_p = &self.feature_log_prob[c * dim..(c + 1) * dim];
                let log_q = &self.feature_log_neg_prob[c * dim..(c + 1) * dim];
                let absent_all: f64 = log_q.iter().sum();
                let present: f64 = x
                    .entries()
                    .iter()
                    .filter(|(_, v)| *v > self.binarize_threshold)
                    .map(|&(j, _)| log_p[j] - log_q[j])
                    .sum();
                prior + absent_all + present
            })
            .collect()
    }
}

pub fn train_bernoulli_nb(
    tm: &TrainingMatrix,
    smoothing: f64,
    binarize_threshold: f64,
) -> Result<ClassifierModel> {
    check_positive("smoothing", smoothing)?;
    // A negative threshold would turn every implicit zero into a present
    // feature, which sparse rows cannot express.
    if !(binarize_threshold >= 0.0 && binarize_threshold.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "binarize threshold must be non-negative, got {binarize_threshold}"
        )));
    }
    let (k, dim) = (tm.n_classes(), tm.dim());
    let mut present = vec![0.0; k * dim];
    for (row, &label) in tm.rows().iter().zip(tm.labels()) {
        for &(j, v) in row.entries() {
            if v > binarize_threshold {
                present[label * dim + j] += 1.0;
            }
        }
    }
    let counts = tm.class_counts();
    let mut feature_log_prob = vec![0.0; k * dim];
    let mut feature_log_neg_prob = vec![0.0; k * dim];
    for c in 0..k {
        let denom = counts[c] as f64 + 2.0 * smoothing;
        for j in 0..dim {
            let p = (present[c * dim + j] + smoothing) / denom;
            feature_log_prob[c * dim + j] = p.ln();
            feature_log_neg_prob[c * dim + j] = (1.0 - p).ln();
        }
    }
    Ok(ClassifierModel {
        kind: ClassifierKind::BernoulliNb,
        class_names: tm.class_names().to_vec(),
        dim,
        params: ModelParams::BernoulliNb(BernoulliNb {
            dim,
            binarize_threshold,
            class_log_prior: class_log_priors(tm),
            feature_log_prob,
            feature_log_neg_prob,
        }),
    })
}
