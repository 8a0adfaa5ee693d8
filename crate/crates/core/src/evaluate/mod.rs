//! Metrics, stratified cross-validation, grid search and the multi-run
//! benchmark.

mod benchmark;
mod check;
mod cv;
mod grid;
mod metrics;
mod report;

pub use benchmark::{benchmark, BenchmarkConfig};
pub use check::{check_report, CheckOutcome, Thresholds, REFERENCE_DATASETS};
pub use cv::{stratified_kfold, Fold, Folds, DEFAULT_FOLDS};
pub use grid::{grid_search, grid_search_matrix, GridResult, GridScore, GridSearchConfig};
pub use metrics::{accuracy, mean_variance, micro_f1, ConfusionTally, MicroF1};
pub use report::{
    render_text, BestEntry, BestSummary, CellReport, ClassifierSummary, DatasetReport, EvalReport,
    ReportConfig, RunRecord, REPORT_FORMAT_VERSION,
};

/// SplitMix64 finalizer over `seed ^ salt`.
pub fn mix_seed(seed: u64, salt: u64) -> u64 {
    let mut z = (seed ^ salt.rotate_left(32)).wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// 64-bit FNV-1a.
pub fn fnv1a(text: &str) -> u64 {
    text.bytes().fold(0xcbf2_9ce4_8422_2325, |h, b| {
        (h ^ b as u64).wrapping_mul(0x0000_0100_0000_01b3)
    })
}
