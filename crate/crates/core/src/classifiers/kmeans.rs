//! Seeded k-means++ with Lloyd iterations; every cluster votes for the
//! majority training label of its members.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{ClassifierKind, ClassifierModel, ModelParams, TrainingMatrix};
use crate::error::{Error, Result};
use crate::vectorize::SparseVector;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KMeansModel {
    pub k: usize,
    pub dim: usize,
    /// Cluster-major dense centroids.
    pub centroids: Vec<f64>,
    pub cluster_labels: Vec<usize>,
}

impl KMeansModel {
    pub fn centroid(&self, cluster: usize) -> &[f64] {
        &self.centroids[cluster * self.dim..(cluster + 1) * self.dim]
    }

    pub fn nearest_cluster(&self, x: &SparseVector) -> usize {
        let norms = centroid_norms(&self.centroids, self.k, self.dim);
        nearest(x, &self.centroids, &norms, self.dim).0
    }

    /// Per class, the negated squared distance to its closest cluster, or
    /// negative infinity for classes that own no cluster.
    pub fn decision_values(&self, x: &SparseVector, n_classes: usize) -> Vec<f64> {
        let mut scores = vec![f64::NEG_INFINITY; n_classes];
        for c in 0..self.k {
            let s = -x.squared_distance_dense(self.centroid(c));
            let label = self.cluster_labels[c];
            if s > scores[label] {
                scores[label] = s;
            }
        }
        scores
    }
}

fn centroid_norms(centroids: &[f64], k: usize, dim: usize) -> Vec<f64> {
    (0..k)
        .map(|c| {
            centroids[c * dim..(c + 1) * dim]
                .iter()
                .map(|a| a * a)
                .sum()
        })
        .collect()
}

fn nearest(x: &SparseVector, centroids: &[f64], norms: &[f64], dim: usize) -> (usize, f64) {
    let xn = x.squared_norm();
    let mut best = (0, f64::INFINITY);
    for (c, norm) in norms.iter().enumerate() {
        let d = (xn - 2.0 * x.dot_dense(&centroids[c * dim..(c + 1) * dim]) + norm).max(0.0);
        if d < best.1 {
            best = (c, d);
        }
    }
    best
}

fn plus_plus_init(rows: &[SparseVector], k: usize, dim: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let mut centroids = Vec::with_capacity(k * dim);
    let first = rng.gen_range(0..rows.len());
    centroids.extend(rows[first].to_dense(dim));
    let mut d2: Vec<f64> = rows
        .iter()
        .map(|r| r.squared_distance_dense(&centroids[..dim]))
        .collect();
    for _ in 1..k {
        let total: f64 = d2.iter().sum();
        let pick = if total > 0.0 {
            let mut target = rng.gen::<f64>() * total;
            let mut chosen = rows.len() - 1;
            for (i, d) in d2.iter().enumerate() {
                if target < *d {
                    chosen = i;
                    break;
                }
                target -= d;
            }
            chosen
        } else {
            rng.gen_range(0..rows.len())
        };
        let start = centroids.len();
        centroids.extend(rows[pick].to_dense(dim));
        for (d, r) in d2.iter_mut().zip(rows) {
            *d = d.min(r.squared_distance_dense(&centroids[start..]));
        }
    }
    centroids
}

pub fn train_kmeans(
    tm: &TrainingMatrix,
    k: usize,
    seed: u64,
    max_iter: usize,
) -> Result<ClassifierModel> {
    if k == 0 {
        return Err(Error::InvalidArgument("k must be at least 1".into()));
    }
    let (rows, dim) = (tm.rows(), tm.dim());
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut centroids = plus_plus_init(rows, k, dim, &mut rng);
    let mut assignment = vec![usize::MAX; rows.len()];
    for _ in 0..max_iter {
        let norms = centroid_norms(&centroids, k, dim);
        let mut changed = false;
        for (a, row) in assignment.iter_mut().zip(rows) {
            let c = nearest(row, &centroids, &norms, dim).0;
            if *a != c {
                *a = c;
                changed = true;
            }
        }
        if !changed {
            break;
        }
        let mut sums = vec![0.0; k * dim];
        let mut counts = vec![0usize; k];
        for (&c, row) in assignment.iter().zip(rows) {
            row.add_scaled_to(&mut sums[c * dim..(c + 1) * dim], 1.0);
            counts[c] += 1;
        }
        for c in 0..k {
            if counts[c] > 0 {
                for (out, s) in centroids[c * dim..(c + 1) * dim]
                    .iter_mut()
                    .zip(&sums[c * dim..(c + 1) * dim])
                {
                    *out = s / counts[c] as f64;
                }
            }
        }
    }
    if assignment.contains(&usize::MAX) {
        let norms = centroid_norms(&centroids, k, dim);
        for (a, row) in assignment.iter_mut().zip(rows) {
            *a = nearest(row, &centroids, &norms, dim).0;
        }
    }

    let n_classes = tm.n_classes();
    let global = super::argmax(
        &tm.class_counts()
            .into_iter()
            .map(|n| n as f64)
            .collect::<Vec<_>>(),
    );
    let mut tallies = vec![vec![0.0; n_classes]; k];
    for (&c, &label) in assignment.iter().zip(tm.labels()) {
        tallies[c][label] += 1.0;
    }
    let cluster_labels = tallies
        .iter()
        .map(|t| {
            if t.iter().all(|&v| v == 0.0) {
                global
            } else {
                super::argmax(t)
            }
        })
        .collect();

    Ok(ClassifierModel {
        kind: ClassifierKind::Kmeans,
        class_names: tm.class_names().to_vec(),
        dim,
        params: ModelParams::Kmeans(KMeansModel {
            k,
            dim,
            centroids,
            cluster_labels,
        }),
    })
}
