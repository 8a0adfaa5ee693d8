use serde::{Deserialize, Serialize};

use super::{argmax, ClassifierKind, ClassifierModel, ModelParams, TrainingMatrix};
use crate::error::{Error, Result};
use crate::vectorize::SparseVector;

/// Per-class mean rows; predicts the class of the nearest mean.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NearestCentroid {
    pub n_classes: usize,
    pub dim: usize,
    /// Class-major dense centroids.
    pub centroids: Vec<f64>,
}

impl NearestCentroid {
    pub fn centroid(&self, class: usize) -> &[f64] {
        &self.centroids[class * self.dim..(class + 1) * self.dim]
    }

    /// Negated squared Euclidean distances to every centroid.
    pub fn decision_values(&self, x: &SparseVector) -> Vec<f64> {
        (0..self.n_classes)
            .map(|c| -x.squared_distance_dense(self.centroid(c)))
            .collect()
    }
}

pub fn train_nearest_centroid(tm: &TrainingMatrix) -> Result<ClassifierModel> {
    let (k, dim) = (tm.n_classes(), tm.dim());
    let mut centroids = vec![0.0; k * dim];
    for (row, &label) in tm.rows().iter().zip(tm.labels()) {
        row.add_scaled_to(&mut centroids[label * dim..(label + 1) * dim], 1.0);
    }
    for (c, n) in tm.class_counts().into_iter().enumerate() {
        centroids[c * dim..(c + 1) * dim]
            .iter_mut()
            .for_each(|v| *v /= n as f64);
    }
    Ok(ClassifierModel {
        kind: ClassifierKind::NearestCentroid,
        class_names: tm.class_names().to_vec(),
        dim,
        params: ModelParams::NearestCentroid(NearestCentroid {
            n_classes: k,
            dim,
            centroids,
        }),
    })
}

/// Stored training rows for k-nearest-neighbour voting.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KnnModel {
    pub k: usize,
    pub rows: Vec<SparseVector>,
    pub labels: Vec<usize>,
}

impl KnnModel {
    /// Uniform votes of the `k` nearest rows (Euclidean distance, ties in
    /// distance broken by row order).
    pub fn votes(&self, x: &SparseVector, n_classes: usize) -> Vec<f64> {
        knn_votes(&self.rows, &self.labels, x, self.k, n_classes)
    }
}

fn knn_votes(
    rows: &[SparseVector],
    labels: &[usize],
    x: &SparseVector,
    k: usize,
    n_classes: usize,
) -> Vec<f64> {
    let mut by_distance: Vec<(f64, usize)> = rows
        .iter()
        .enumerate()
        .map(|(i, row)| (row.squared_distance(x), i))
        .collect();
    by_distance.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    let mut votes = vec![0.0; n_classes];
    for &(_, i) in by_distance.iter().take(k) {
        votes[labels[i]] += 1.0;
    }
    votes
}

pub fn train_knn(tm: &TrainingMatrix, k: usize) -> Result<ClassifierModel> {
    if k == 0 {
        return Err(Error::InvalidArgument("k must be at least 1".into()));
    }
    tm.require_two_classes()?;
    Ok(ClassifierModel {
        kind: ClassifierKind::Knn,
        class_names: tm.class_names().to_vec(),
        dim: tm.dim(),
        params: ModelParams::Knn(KnnModel {
            k,
            rows: tm.rows().to_vec(),
            labels: tm.labels().to_vec(),
        }),
    })
}

/// Majority label among the `k` training rows nearest to `x`; ties go to
/// the lowest class id. `k` larger than the row count uses every row.
pub fn predict_knn(tm: &TrainingMatrix, x: &SparseVector, k: usize) -> Result<usize> {
    if k == 0 {
        return Err(Error::InvalidArgument("k must be at least 1".into()));
    }
    Ok(argmax(&knn_votes(
        tm.rows(),
        tm.labels(),
        x,
        k,
        tm.n_classes(),
    )))
}
