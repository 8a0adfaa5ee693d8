use std::collections::BTreeMap;
use std::fmt::Write;

use serde::{Deserialize, Serialize};

use super::metrics::{mean_variance, micro_f1, ConfusionTally, MicroF1};
use crate::classifiers::ClassifierParams;

pub const REPORT_FORMAT_VERSION: u32 = 1;

/// Variance above which a cell is flagged in the warnings.
pub const EXPECTED_MAX_VARIANCE: f64 = 1e-3;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportConfig {
    pub runs: usize,
    pub base_seed: u64,
    pub folds: usize,
    pub augmentation: bool,
    pub thesaurus: Option<String>,
    pub datasets: Vec<String>,
    pub classifiers: Vec<String>,
}

/// One (dataset, classifier, run) evaluation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub run: usize,
    pub seed: u64,
    pub params: ClassifierParams,
    pub accuracy: f64,
    pub micro_f1: f64,
    pub tally: ConfusionTally,
    pub grid_search_time_ms: f64,
    pub train_time_ms: f64,
    pub test_time_ms: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellReport {
    pub mean_accuracy: f64,
    pub variance: f64,
    pub accuracies: Vec<f64>,
    /// True when every run's micro-F1 equals its accuracy exactly.
    pub micro_f1_equals_accuracy: bool,
    pub mean_grid_search_time_ms: f64,
    pub mean_train_time_ms: f64,
    pub mean_test_time_ms: f64,
    pub runs: Vec<RunRecord>,
}

impl CellReport {
    pub fn from_runs(runs: Vec<RunRecord>) -> Self {
        let accuracies: Vec<f64> = runs.iter().map(|r| r.accuracy).collect();
        let (mean_accuracy, variance) = mean_variance(&accuracies);
        let mean_of =
            |f: fn(&RunRecord) -> f64| mean_variance(&runs.iter().map(f).collect::<Vec<_>>()).0;
        Self {
            mean_accuracy,
            variance,
            micro_f1_equals_accuracy: runs.iter().all(|r| r.micro_f1 == r.accuracy),
            mean_grid_search_time_ms: mean_of(|r| r.grid_search_time_ms),
            mean_train_time_ms: mean_of(|r| r.train_time_ms),
            mean_test_time_ms: mean_of(|r| r.test_time_ms),
            accuracies,
            runs,
        }
    }

    pub fn tally(&self) -> ConfusionTally {
        let mut total = ConfusionTally::default();
        for r in &self.runs {
            total += r.tally;
        }
        total
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetReport {
    pub train_size: usize,
    pub test_size: usize,
    pub augmented_train_size: usize,
    pub n_classes: usize,
    /// Fitted feature count per run.
    pub feature_dims: Vec<usize>,
    pub cells: BTreeMap<String, CellReport>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassifierSummary {
    /// Mean accuracy per dataset.
    pub per_dataset: BTreeMap<String, f64>,
    /// Unweighted mean of the per-dataset accuracies.
    pub avg: f64,
    /// Micro-F1 pooled over every test prediction of every dataset and run.
    pub overall: MicroF1,
    pub tally: ConfusionTally,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BestEntry {
    pub classifier: String,
    pub score: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BestSummary {
    /// Highest mean accuracy per dataset.
    pub per_dataset: BTreeMap<String, BestEntry>,
    /// Unweighted mean of the per-dataset best accuracies.
    pub avg: f64,
    /// Pooled micro-F1 when each dataset uses its own best classifier.
    pub overall_best_per_dataset: f64,
    /// The single classifier with the highest pooled micro-F1.
    pub overall_single_classifier: BestEntry,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub format_version: u32,
    pub config: ReportConfig,
    pub datasets: BTreeMap<String, DatasetReport>,
    pub classifiers: BTreeMap<String, ClassifierSummary>,
    pub best: BestSummary,
    pub warnings: Vec<String>,
}

fn best_of<'a>(candidates: impl Iterator<Item = (&'a str, f64)>) -> BestEntry {
    let mut best = BestEntry {
        classifier: String::new(),
        score: f64::NEG_INFINITY,
    };
    for (name, score) in candidates {
        if score > best.score {
            best = BestEntry {
                classifier: name.to_string(),
                score,
            };
        }
    }
    best
}

impl EvalReport {
    /// Builds the summaries from per-dataset cells. Ties between classifiers
    /// go to the one listed first in `config.classifiers`.
    pub fn assemble(
        config: ReportConfig,
        datasets: BTreeMap<String, DatasetReport>,
        mut warnings: Vec<String>,
    ) -> Self {
        let mut classifiers = BTreeMap::new();
        for name in &config.classifiers {
            let mut per_dataset = BTreeMap::new();
            let mut tally = ConfusionTally::default();
            for (ds, report) in &datasets {
                if let Some(cell) = report.cells.get(name) {
                    per_dataset.insert(ds.clone(), cell.mean_accuracy);
                    tally += cell.tally();
                }
            }
            let avg = mean_variance(&per_dataset.values().copied().collect::<Vec<_>>()).0;
            classifiers.insert(
                name.clone(),
                ClassifierSummary {
                    per_dataset,
                    avg,
                    overall: micro_f1(tally),
                    tally,
                },
            );
        }

        let mut per_dataset = BTreeMap::new();
        let mut pooled = ConfusionTally::default();
        for (ds, report) in &datasets {
            let best = best_of(config.classifiers.iter().filter_map(|c| {
                report
                    .cells
                    .get(c)
                    .map(|cell| (c.as_str(), cell.mean_accuracy))
            }));
            if let Some(cell) = report.cells.get(&best.classifier) {
                pooled += cell.tally();
            }
            per_dataset.insert(ds.clone(), best);
        }
        let avg = mean_variance(&per_dataset.values().map(|b| b.score).collect::<Vec<_>>()).0;
        let overall_single_classifier = best_of(
            config
                .classifiers
                .iter()
                .filter_map(|c| classifiers.get(c).map(|s| (c.as_str(), s.overall.f1))),
        );

        for (ds, report) in &datasets {
            for (clf, cell) in &report.cells {
                if cell.variance >= EXPECTED_MAX_VARIANCE {
                    warnings.push(format!(
                        "{ds}/{clf}: accuracy variance {:.2e} is not below {EXPECTED_MAX_VARIANCE:.0e}",
                        cell.variance
                    ));
                }
            }
        }
        warnings.sort();
        warnings.dedup();

        Self {
            format_version: REPORT_FORMAT_VERSION,
            config,
            datasets,
            classifiers,
            best: BestSummary {
                per_dataset,
                avg,
                overall_best_per_dataset: micro_f1(pooled).f1,
                overall_single_classifier,
            },
            warnings,
        }
    }
}

/// Aligned plain-text tables: one per dataset, then the cross-dataset
/// summary.
pub fn render_text(report: &EvalReport) -> String {
    let mut out = String::new();
    let cfg = &report.config;
    let _ = writeln!(
        out,
        "runs={} seed={} folds={} augmentation={}",
        cfg.runs,
        cfg.base_seed,
        cfg.folds,
        cfg.thesaurus.as_deref().unwrap_or("off")
    );
    for (ds, dr) in &report.datasets {
        let _ = writeln!(
            out,
            "\n{ds}: {} train ({} after augmentation), {} test, {} classes",
            dr.train_size, dr.augmented_train_size, dr.test_size, dr.n_classes
        );
        let _ = writeln!(
            out,
            "{:<20} {:>8} {:>10} {:>10} {:>10}  params",
            "classifier", "accuracy", "variance", "train ms", "test ms"
        );
        for clf in &cfg.classifiers {
            let Some(cell) = dr.cells.get(clf) else {
                continue;
            };
            let params = cell
                .runs
                .first()
                .map(|r| r.params.summary())
                .unwrap_or_default();
            let _ = writeln!(
                out,
                "{:<20} {:>8.4} {:>10.2e} {:>10.2} {:>10.2}  {}",
                clf,
                cell.mean_accuracy,
                cell.variance,
                cell.mean_train_time_ms,
                cell.mean_test_time_ms,
                params
            );
        }
    }

    let _ = writeln!(
        out,
        "\nsummary (mean accuracy per dataset, Avg, pooled Overall micro-F1)"
    );
    let mut header = format!("{:<20}", "classifier");
    for ds in report.datasets.keys() {
        let _ = write!(header, " {ds:>10}");
    }
    let _ = writeln!(out, "{header} {:>8} {:>8}", "Avg", "Overall");
    for clf in &cfg.classifiers {
        let Some(summary) = report.classifiers.get(clf) else {
            continue;
        };
        let mut line = format!("{clf:<20}");
        for ds in report.datasets.keys() {
            match summary.per_dataset.get(ds) {
                Some(v) => {
                    let _ = write!(line, " {v:>10.4}");
                }
                None => {
                    let _ = write!(line, " {:>10}", "-");
                }
            }
        }
        let _ = writeln!(
            out,
            "{line} {:>8.4} {:>8.4}",
            summary.avg, summary.overall.f1
        );
    }
    let mut line = format!("{:<20}", "best");
    for entry in report.best.per_dataset.values() {
        let _ = write!(line, " {:>10.4}", entry.score);
    }
    let _ = writeln!(
        out,
        "{line} {:>8.4} {:>8.4}",
        report.best.avg, report.best.overall_best_per_dataset
    );
    let _ = writeln!(
        out,
        "best single classifier overall: {} ({:.4})",
        report.best.overall_single_classifier.classifier,
        report.best.overall_single_classifier.score
    );
    for w in &report.warnings {
        let _ = writeln!(out, "warning: {w}");
    }
    out
}
