use std::collections::BTreeMap;
use std::time::Instant;

use rayon::prelude::*;

use super::grid::{grid_search, GridSearchConfig};
use super::metrics::{accuracy, micro_f1, ConfusionTally};
use super::report::{CellReport, DatasetReport, EvalReport, ReportConfig, RunRecord};
use super::{fnv1a, mix_seed, DEFAULT_FOLDS};
use crate::augment::Thesaurus;
use crate::classifiers::{self, ClassifierKind};
use crate::corpus::{Dataset, LabeledUtterance, Split};
use crate::error::{Error, Result};
use crate::pipeline::{
    augment_training, featurize, fit_features, FittedFeatures, PipelineObserver,
};
use crate::vectorize::SparseVector;

#[derive(Debug, Clone)]
pub struct BenchmarkConfig<'a> {
    pub classifiers: Vec<ClassifierKind>,
    pub runs: usize,
    pub base_seed: u64,
    pub folds: usize,
    /// Synonym lexicon for balancing; `None` disables augmentation.
    pub thesaurus: Option<&'a Thesaurus>,
    /// Human-readable name of the lexicon for the report.
    pub thesaurus_label: Option<String>,
}

impl<'a> BenchmarkConfig<'a> {
    pub fn new(classifiers: Vec<ClassifierKind>, runs: usize, base_seed: u64) -> Self {
        Self {
            classifiers,
            runs,
            base_seed,
            folds: DEFAULT_FOLDS,
            thesaurus: Some(Thesaurus::builtin()),
            thesaurus_label: Some("builtin".into()),
        }
    }

    pub fn without_augmentation(mut self) -> Self {
        self.thesaurus = None;
        self.thesaurus_label = None;
        self
    }

    pub fn with_thesaurus(mut self, thesaurus: &'a Thesaurus, label: impl Into<String>) -> Self {
        self.thesaurus = Some(thesaurus);
        self.thesaurus_label = Some(label.into());
        self
    }
}

/// Training side of one (dataset, run): augmented samples and fitted
/// features, shared by every classifier of that run.
struct PreparedRun {
    dataset: usize,
    run: usize,
    train: Vec<LabeledUtterance>,
    augmented_len: usize,
    fitted: FittedFeatures,
    test_rows: Vec<SparseVector>,
}

fn annotate(dataset: &str, classifier: &str, run: usize) -> impl FnOnce(Error) -> Error {
    let (dataset, classifier) = (dataset.to_string(), classifier.to_string());
    move |source| Error::Cell {
        dataset,
        classifier,
        run,
        source: Box::new(source),
    }
}

fn elapsed_ms(start: Instant) -> f64 {
    start.elapsed().as_secs_f64() * 1e3
}

fn prepare(
    ds: &Dataset,
    dataset: usize,
    run: usize,
    config: &BenchmarkConfig<'_>,
    observer: &dyn PipelineObserver,
) -> Result<PreparedRun> {
    let run_seed = config.base_seed.wrapping_add(run as u64);
    let train = ds.split(Split::Train);
    let augmented = augment_training(
        &train,
        config.thesaurus,
        mix_seed(run_seed, fnv1a(&ds.name)),
        observer,
    )?;
    let fitted = fit_features(&augmented, observer)?;
    let test_rows = ds
        .test()
        .map(|s| fitted.feature_space.transform(&featurize(&s.text)))
        .collect();
    Ok(PreparedRun {
        dataset,
        run,
        train,
        augmented_len: augmented.len(),
        fitted,
        test_rows,
    })
}

fn run_cell(
    ds: &Dataset,
    prepared: &PreparedRun,
    kind: ClassifierKind,
    config: &BenchmarkConfig<'_>,
    observer: &dyn PipelineObserver,
) -> Result<(RunRecord, Vec<String>)> {
    let run_seed = config.base_seed.wrapping_add(prepared.run as u64);
    let seed = mix_seed(run_seed, fnv1a(&format!("{}/{}", ds.name, kind.name())));

    let start = Instant::now();
    let grid = grid_search(
        &kind.grid(),
        &prepared.train,
        &GridSearchConfig {
            folds: config.folds,
            seed,
            thesaurus: config.thesaurus,
        },
        observer,
    )?;
    let grid_search_time_ms = elapsed_ms(start);

    let start = Instant::now();
    let model = classifiers::train(&grid.best, &prepared.fitted.matrix, seed)?;
    let train_time_ms = elapsed_ms(start);

    let start = Instant::now();
    let predicted = prepared
        .test_rows
        .iter()
        .map(|x| model.predict_label(x))
        .collect::<Result<Vec<_>>>()?;
    let test_time_ms = elapsed_ms(start);

    let gold: Vec<&str> = ds.test().map(|s| s.intent.as_str()).collect();
    let tally = ConfusionTally::from_predictions(&predicted, &gold)?;
    Ok((
        RunRecord {
            run: prepared.run,
            seed,
            params: grid.best,
            accuracy: accuracy(&predicted, &gold)?,
            micro_f1: micro_f1(tally).f1,
            tally,
            grid_search_time_ms,
            train_time_ms,
            test_time_ms,
        },
        grid.warnings,
    ))
}

/// Runs every (dataset, classifier) cell `config.runs` times.
///
/// Run `r` seeds augmentation with `base_seed + r` salted by the dataset
/// name, and classifier training and fold shuffling salted by dataset and
/// classifier. Cells run in parallel; the report does not depend on
/// scheduling.
pub fn benchmark(
    datasets: &[Dataset],
    config: &BenchmarkConfig<'_>,
    observer: &dyn PipelineObserver,
) -> Result<EvalReport> {
    if datasets.is_empty() || config.classifiers.is_empty() {
        return Err(Error::InvalidArgument(
            "benchmark needs at least one dataset and one classifier".into(),
        ));
    }
    if config.runs == 0 {
        return Err(Error::InvalidArgument("runs must be at least 1".into()));
    }
    let mut names = std::collections::BTreeSet::new();
    for ds in datasets {
        if !names.insert(ds.name.as_str()) {
            return Err(Error::InvalidArgument(format!(
                "dataset name {} appears twice",
                ds.name
            )));
        }
        if ds.train().next().is_none() || ds.test().next().is_none() {
            return Err(Error::InvalidArgument(format!(
                "dataset {} needs both training and test samples",
                ds.name
            )));
        }
    }

    let units: Vec<(usize, usize)> = (0..datasets.len())
        .flat_map(|d| (0..config.runs).map(move |r| (d, r)))
        .collect();
    let prepared = units
        .par_iter()
        .map(|&(d, r)| {
            prepare(&datasets[d], d, r, config, observer).map_err(annotate(
                &datasets[d].name,
                "features",
                r,
            ))
        })
        .collect::<Result<Vec<_>>>()?;

    let cells: Vec<(usize, usize)> = (0..prepared.len())
        .flat_map(|p| (0..config.classifiers.len()).map(move |c| (p, c)))
        .collect();
    let records = cells
        .par_iter()
        .map(|&(p, c)| {
            let prep = &prepared[p];
            let ds = &datasets[prep.dataset];
            let kind = config.classifiers[c];
            run_cell(ds, prep, kind, config, observer).map_err(annotate(
                &ds.name,
                kind.name(),
                prep.run,
            ))
        })
        .collect::<Result<Vec<_>>>()?;

    let mut warnings = Vec::new();
    let mut by_cell: BTreeMap<(usize, usize), Vec<RunRecord>> = BTreeMap::new();
    for (&(p, c), (record, cell_warnings)) in cells.iter().zip(records) {
        let ds = &datasets[prepared[p].dataset];
        warnings.extend(
            cell_warnings
                .into_iter()
                .map(|w| format!("{}: {w}", ds.name)),
        );
        by_cell
            .entry((prepared[p].dataset, c))
            .or_default()
            .push(record);
    }

    let mut reports = BTreeMap::new();
    for (d, ds) in datasets.iter().enumerate() {
        warnings.extend(
            ds.warnings()
                .into_iter()
                .map(|w| format!("{}: {w}", ds.name)),
        );
        let runs: Vec<&PreparedRun> = prepared.iter().filter(|p| p.dataset == d).collect();
        let cells = config
            .classifiers
            .iter()
            .enumerate()
            .map(|(c, kind)| {
                let records = by_cell.remove(&(d, c)).unwrap_or_default();
                (kind.name().to_string(), CellReport::from_runs(records))
            })
            .collect();
        reports.insert(
            ds.name.clone(),
            DatasetReport {
                train_size: runs[0].train.len(),
                test_size: runs[0].test_rows.len(),
                augmented_train_size: runs[0].augmented_len,
                n_classes: runs[0].fitted.matrix.n_classes(),
                feature_dims: runs.iter().map(|p| p.fitted.feature_space.dim()).collect(),
                cells,
            },
        );
    }

    let report_config = ReportConfig {
        runs: config.runs,
        base_seed: config.base_seed,
        folds: config.folds,
        augmentation: config.thesaurus.is_some(),
        thesaurus: config.thesaurus_label.clone(),
        datasets: datasets.iter().map(|d| d.name.clone()).collect(),
        classifiers: config
            .classifiers
            .iter()
            .map(|k| k.name().to_string())
            .collect(),
    };
    Ok(EvalReport::assemble(report_config, reports, warnings))
}
