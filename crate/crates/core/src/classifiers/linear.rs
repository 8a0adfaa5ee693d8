//! One-vs-rest linear classifiers: ridge regression, passive-aggressive
//! (PA-I), L1-loss linear SVM and hinge-loss SGD.
//!
//! Each class `c` gets a weight vector trained on targets `+1` for rows of
//! `c` and `-1` for every other row. Prediction is the argmax of `w·x + b`.

use nalgebra::DMatrix;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{check_positive, ClassifierKind, ClassifierModel, ModelParams, TrainingMatrix};
use crate::error::{Error, Result};
use crate::vectorize::SparseVector;

/// Per-class weights stored class-major in one flat array.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearModel {
    pub n_classes: usize,
    pub dim: usize,
    pub weights: Vec<f64>,
    pub bias: Vec<f64>,
}

impl LinearModel {
    fn zeros(n_classes: usize, dim: usize) -> Self {
        Self {
            n_classes,
            dim,
            weights: vec![0.0; n_classes * dim],
            bias: vec![0.0; n_classes],
        }
    }

    pub fn class_weights(&self, class: usize) -> &[f64] {
        &self.weights[class * self.dim..(class + 1) * self.dim]
    }

    fn class_weights_mut(&mut self, class: usize) -> &mut [f64] {
        &mut self.weights[class * self.dim..(class + 1) * self.dim]
    }

    pub fn decision_values(&self, x: &SparseVector) -> Vec<f64> {
        (0..self.n_classes)
            .map(|c| x.dot_dense(self.class_weights(c)) + self.bias[c])
            .collect()
    }

    fn into_model(self, kind: ClassifierKind, tm: &TrainingMatrix) -> ClassifierModel {
        ClassifierModel {
            kind,
            class_names: tm.class_names().to_vec(),
            dim: tm.dim(),
            params: ModelParams::Linear(self),
        }
    }
}

fn target(label: usize, class: usize) -> f64 {
    if label == class {
        1.0
    } else {
        -1.0
    }
}

/// Ridge regression on `±1` targets with an unpenalized intercept.
///
/// Rows and targets are centered, so the weights solve
/// `(XcᵀXc + αI) w = Xcᵀ yc` and `b = ȳ − x̄·w`. The system is solved
/// exactly through its `n × n` dual form `w = Xcᵀ (XcXcᵀ + αI)⁻¹ yc`, which
/// is small for corpora of a few hundred sentences.
pub fn train_ridge(tm: &TrainingMatrix, alpha: f64) -> Result<ClassifierModel> {
    tm.require_two_classes()?;
    check_positive("alpha", alpha)?;
    let n = tm.len();
    let k = tm.n_classes();
    let rows = tm.rows();

    let mut gram = DMatrix::<f64>::zeros(n, n);
    for i in 0..n {
        for j in 0..=i {
            let v = rows[i].dot(&rows[j]);
            gram[(i, j)] = v;
            gram[(j, i)] = v;
        }
    }
    // Double centering: H K H with H = I − 11ᵀ/n.
    let row_means: Vec<f64> = (0..n).map(|i| gram.row(i).sum() / n as f64).collect();
    let grand_mean = row_means.iter().sum::<f64>() / n as f64;
    for i in 0..n {
        for j in 0..n {
            gram[(i, j)] += grand_mean - row_means[i] - row_means[j];
        }
        gram[(i, i)] += alpha;
    }

    let mut targets = DMatrix::<f64>::zeros(n, k);
    for (i, &label) in tm.labels().iter().enumerate() {
        for c in 0..k {
            targets[(i, c)] = target(label, c);
        }
    }
    let target_means: Vec<f64> = (0..k).map(|c| targets.column(c).sum() / n as f64).collect();
    for c in 0..k {
        for i in 0..n {
            targets[(i, c)] -= target_means[c];
        }
    }

    let chol = gram
        .cholesky()
        .ok_or_else(|| Error::InvalidArgument("ridge system is not positive definite".into()))?;
    let coef = chol.solve(&targets);

    let mut row_mean = vec![0.0; tm.dim()];
    for row in rows {
        row.add_scaled_to(&mut row_mean, 1.0 / n as f64);
    }

    let mut model = LinearModel::zeros(k, tm.dim());
    for c in 0..k {
        let coef_sum: f64 = coef.column(c).sum();
        let w = model.class_weights_mut(c);
        for (i, row) in rows.iter().enumerate() {
            row.add_scaled_to(w, coef[(i, c)]);
        }
        for (wj, mj) in w.iter_mut().zip(&row_mean) {
            *wj -= coef_sum * mj;
        }
        let offset: f64 = w.iter().zip(&row_mean).map(|(a, b)| a * b).sum();
        model.bias[c] = target_means[c] - offset;
    }
    Ok(model.into_model(ClassifierKind::Ridge, tm))
}

/// PA-I step size for hinge loss `loss` on an input with squared norm
/// `sq_norm`, clipped at the aggressiveness `c`. Always in `[0, c]`.
pub fn pa_step(loss: f64, sq_norm: f64, c: f64) -> f64 {
    if loss <= 0.0 || sq_norm <= 0.0 {
        0.0
    } else {
        (loss / sq_norm).min(c)
    }
}

/// Passive-aggressive (PA-I) training, one-vs-rest, with a seeded shuffle
/// of the rows at the start of every epoch. No intercept is learned.
pub fn train_passive_aggressive(
    tm: &TrainingMatrix,
    c: f64,
    epochs: usize,
    seed: u64,
) -> Result<ClassifierModel> {
    tm.require_two_classes()?;
    check_positive("C", c)?;
    let k = tm.n_classes();
    let mut model = LinearModel::zeros(k, tm.dim());
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut order: Vec<usize> = (0..tm.len()).collect();
    let sq_norms: Vec<f64> = tm.rows().iter().map(SparseVector::squared_norm).collect();

    for _ in 0..epochs {
        order.shuffle(&mut rng);
        for &i in &order {
            let x = &tm.rows()[i];
            for class in 0..k {
                let y = target(tm.labels()[i], class);
                let w = model.class_weights_mut(class);
                let loss = (1.0 - y * x.dot_dense(w)).max(0.0);
                let tau = pa_step(loss, sq_norms[i], c);
                if tau > 0.0 {
                    x.add_scaled_to(w, tau * y);
                }
            }
        }
    }
    Ok(model.into_model(ClassifierKind::PassiveAggressive, tm))
}

const SVC_TOLERANCE: f64 = 1e-6;
const SVC_MAX_EPOCHS: usize = 10_000;
const SVC_SHUFFLE_SEED: u64 = 0x005e_ed5c;

/// L1-loss linear SVM, `min ½‖w‖² + C Σ max(0, 1 − yᵢ w·xᵢ)`, one-vs-rest,
/// solved by dual coordinate descent.
///
/// Iteration stops once the spread of projected gradients over an epoch
/// drops below 1e-6. Coordinates are visited in a shuffled order drawn from
/// a fixed seed, so training is deterministic. Duplicating every row is
/// equivalent to doubling `C`.
pub fn train_linear_svc(tm: &TrainingMatrix, c: f64) -> Result<ClassifierModel> {
    tm.require_two_classes()?;
    check_positive("C", c)?;
    let k = tm.n_classes();
    let n = tm.len();
    let mut model = LinearModel::zeros(k, tm.dim());
    let diag: Vec<f64> = tm.rows().iter().map(SparseVector::squared_norm).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(SVC_SHUFFLE_SEED);
    let mut order: Vec<usize> = (0..n).collect();

    for class in 0..k {
        let w = model.class_weights_mut(class);
        let mut dual = vec![0.0; n];
        for _ in 0..SVC_MAX_EPOCHS {
            order.shuffle(&mut rng);
            let mut pg_max = f64::NEG_INFINITY;
            let mut pg_min = f64::INFINITY;
            for &i in &order {
                if diag[i] == 0.0 {
                    continue;
                }
                let x = &tm.rows()[i];
                let y = target(tm.labels()[i], class);
                let grad = y * x.dot_dense(w) - 1.0;
                let projected = if dual[i] == 0.0 {
                    grad.min(0.0)
                } else if dual[i] == c {
                    grad.max(0.0)
                } else {
                    grad
                };
                pg_max = pg_max.max(projected);
                pg_min = pg_min.min(projected);
                if projected.abs() > 1e-12 {
                    let old = dual[i];
                    dual[i] = (old - grad / diag[i]).clamp(0.0, c);
                    x.add_scaled_to(w, (dual[i] - old) * y);
                }
            }
            if pg_max - pg_min <= SVC_TOLERANCE || pg_max == f64::NEG_INFINITY {
                break;
            }
        }
    }
    Ok(model.into_model(ClassifierKind::LinearSvc, tm))
}

/// Hinge-loss SGD with L2 penalty `alpha`, one-vs-rest, no intercept.
///
/// The step at update `t` (counting from 0) is `1 / (alpha · (t0 + t))` with
/// `t0 = 1 / alpha`, so the first step is exactly 1. Rows are reshuffled
/// with the seeded generator each epoch.
pub fn train_sgd(
    tm: &TrainingMatrix,
    alpha: f64,
    epochs: usize,
    seed: u64,
) -> Result<ClassifierModel> {
    tm.require_two_classes()?;
    check_positive("alpha", alpha)?;
    let k = tm.n_classes();
    let mut model = LinearModel::zeros(k, tm.dim());
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut order: Vec<usize> = (0..tm.len()).collect();
    let t0 = 1.0 / alpha;

    // w = scale · v keeps the shrink step O(1).
    let mut scales = vec![1.0; k];
    let mut t = 0usize;
    for _ in 0..epochs {
        order.shuffle(&mut rng);
        for &i in &order {
            let eta = 1.0 / (alpha * (t0 + t as f64));
            let x = &tm.rows()[i];
            for (class, scale) in scales.iter_mut().enumerate() {
                let y = target(tm.labels()[i], class);
                let v = model.class_weights_mut(class);
                let margin = y * *scale * x.dot_dense(v);
                *scale *= 1.0 - eta * alpha;
                if margin < 1.0 {
                    x.add_scaled_to(v, eta * y / *scale);
                }
                if *scale < 1e-9 {
                    v.iter_mut().for_each(|vj| *vj *= *scale);
                    *scale = 1.0;
                }
            }
            t += 1;
        }
    }
    for (class, &s) in scales.iter().enumerate() {
        model
            .class_weights_mut(class)
            .iter_mut()
            .for_each(|vj| *vj *= s);
    }
    Ok(model.into_model(ClassifierKind::Sgd, tm))
}
