use serde::{Deserialize, Serialize};

use super::cv::stratified_kfold;
use super::metrics::accuracy;
use super::mix_seed;
use crate::augment::Thesaurus;
use crate::classifiers::{self, ClassifierParams, TrainingMatrix};
use crate::corpus::LabeledUtterance;
use crate::error::{Error, Result};
use crate::pipeline::{
    augment_training, featurize, fit_features, reject_test_samples, PipelineObserver,
};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridScore {
    pub params: ClassifierParams,
    pub mean_accuracy: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridResult {
    pub best: ClassifierParams,
    /// Empty for a singleton grid, which is returned without validation.
    pub scores: Vec<GridScore>,
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone, Copy)]
pub struct GridSearchConfig<'a> {
    pub folds: usize,
    pub seed: u64,
    /// Augments the training folds when set. Validation folds are never
    /// augmented.
    pub thesaurus: Option<&'a Thesaurus>,
}

fn pick_best(
    grid: &[ClassifierParams],
    fold_scores: Vec<Vec<f64>>,
    warnings: Vec<String>,
) -> GridResult {
    let scores: Vec<GridScore> = grid
        .iter()
        .zip(fold_scores)
        .map(|(params, s)| GridScore {
            params: params.clone(),
            mean_accuracy: s.iter().sum::<f64>() / s.len() as f64,
        })
        .collect();
    let mut best = 0;
    for (i, s) in scores.iter().enumerate() {
        if s.mean_accuracy > scores[best].mean_accuracy {
            best = i;
        }
    }
    GridResult {
        best: grid[best].clone(),
        scores,
        warnings,
    }
}

fn check_grid(grid: &[ClassifierParams]) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::InvalidArgument("empty hyperparameter grid".into()));
    }
    Ok(())
}

fn singleton(grid: &[ClassifierParams]) -> Option<GridResult> {
    (grid.len() == 1).then(|| GridResult {
        best: grid[0].clone(),
        scores: Vec::new(),
        warnings: Vec::new(),
    })
}

/// Grid search over already vectorized rows.
pub fn grid_search_matrix(
    grid: &[ClassifierParams],
    tm: &TrainingMatrix,
    folds: usize,
    seed: u64,
) -> Result<GridResult> {
    check_grid(grid)?;
    if let Some(result) = singleton(grid) {
        return Ok(result);
    }
    let split = stratified_kfold(tm.labels(), folds, seed)?;
    let mut fold_scores = vec![Vec::new(); grid.len()];
    for fold in &split.folds {
        let train = tm.subset(&fold.train)?;
        let gold: Vec<&str> = fold
            .validation
            .iter()
            .map(|&i| tm.class_names()[tm.labels()[i]].as_str())
            .collect();
        for (params, scores) in grid.iter().zip(&mut fold_scores) {
            let model = classifiers::train(params, &train, seed)?;
            let predicted = fold
                .validation
                .iter()
                .map(|&i| model.predict_label(&tm.rows()[i]))
                .collect::<Result<Vec<_>>>()?;
            scores.push(accuracy(&predicted, &gold)?);
        }
    }
    Ok(pick_best(grid, fold_scores, split.warnings))
}

/// Grid search on raw utterances. Every fold re-runs augmentation and
/// feature fitting on its own training part.
pub fn grid_search(
    grid: &[ClassifierParams],
    train: &[LabeledUtterance],
    config: &GridSearchConfig<'_>,
    observer: &dyn PipelineObserver,
) -> Result<GridResult> {
    observer.grid_search_input(train);
    reject_test_samples("grid search", train)?;
    check_grid(grid)?;
    if let Some(result) = singleton(grid) {
        return Ok(result);
    }
    let labels: Vec<&str> = train.iter().map(|s| s.intent.as_str()).collect();
    let split = stratified_kfold(&labels, config.folds, config.seed)?;
    let mut fold_scores = vec![Vec::new(); grid.len()];
    for (f, fold) in split.folds.iter().enumerate() {
        let fold_train: Vec<LabeledUtterance> =
            fold.train.iter().map(|&i| train[i].clone()).collect();
        let augmented = augment_training(
            &fold_train,
            config.thesaurus,
            mix_seed(config.seed, f as u64),
            observer,
        )?;
        let fitted = fit_features(&augmented, observer)?;
        let rows: Vec<_> = fold
            .validation
            .iter()
            .map(|&i| fitted.feature_space.transform(&featurize(&train[i].text)))
            .collect();
        let gold: Vec<&str> = fold.validation.iter().map(|&i| labels[i]).collect();
        for (params, scores) in grid.iter().zip(&mut fold_scores) {
            let model = classifiers::train(params, &fitted.matrix, config.seed)?;
            let predicted = rows
                .iter()
                .map(|x| model.predict_label(x))
                .collect::<Result<Vec<_>>>()?;
            scores.push(accuracy(&predicted, &gold)?);
        }
    }
    Ok(pick_best(grid, fold_scores, split.warnings))
}
