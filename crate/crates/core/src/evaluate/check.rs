//! Reproduction thresholds applied to a benchmark report.

use serde::{Deserialize, Serialize};

use super::report::EvalReport;
use crate::classifiers::ClassifierKind;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Thresholds {
    pub chatbot_best: f64,
    pub chatbot_top: f64,
    pub askubuntu_best: f64,
    pub webapp_best: f64,
    pub overall: f64,
    pub max_variance: f64,
}

impl Default for Thresholds {
    fn default() -> Self {
        Self {
            chatbot_best: 0.95,
            chatbot_top: 0.98,
            askubuntu_best: 0.88,
            webapp_best: 0.74,
            overall: 0.88,
            max_variance: 1e-2,
        }
    }
}

pub const REFERENCE_DATASETS: [&str; 3] = ["chatbot", "askubuntu", "webapp"];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckOutcome {
    pub criterion: u8,
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

fn outcome(criterion: u8, name: &str, passed: bool, detail: String) -> CheckOutcome {
    CheckOutcome {
        criterion,
        name: name.into(),
        passed,
        detail,
    }
}

/// Evaluates the thresholds that apply to the datasets present in
/// `report`. Checks on datasets the report does not contain are skipped.
pub fn check_report(report: &EvalReport, t: &Thresholds) -> Vec<CheckOutcome> {
    let mut out = Vec::new();
    let best = |ds: &str| report.best.per_dataset.get(ds);

    if let Some(b) = best("chatbot") {
        out.push(outcome(
            3,
            "chatbot reproduction",
            b.score >= t.chatbot_best.max(t.chatbot_top),
            format!(
                "best {} = {:.4} (need >= {} and one classifier >= {})",
                b.classifier, b.score, t.chatbot_best, t.chatbot_top
            ),
        ));
    }
    for (criterion, ds, min) in [
        (4, "askubuntu", t.askubuntu_best),
        (5, "webapp", t.webapp_best),
    ] {
        if let Some(b) = best(ds) {
            out.push(outcome(
                criterion,
                &format!("{ds} reproduction"),
                b.score >= min,
                format!("best {} = {:.4} (need >= {min})", b.classifier, b.score),
            ));
        }
    }
    if REFERENCE_DATASETS
        .iter()
        .all(|ds| report.datasets.contains_key(*ds))
    {
        let b = &report.best.overall_single_classifier;
        out.push(outcome(
            6,
            "pooled micro-F1",
            b.score >= t.overall,
            format!(
                "best single classifier {} = {:.4} (need >= {}); best per dataset pooled = {:.4}",
                b.classifier, b.score, t.overall, report.best.overall_best_per_dataset
            ),
        ));
    }

    let kmeans = ClassifierKind::Kmeans.name();
    let mut worst: Option<(String, f64)> = None;
    for (ds, dr) in &report.datasets {
        for (clf, cell) in dr.cells.iter().filter(|(clf, _)| *clf != kmeans) {
            if worst.as_ref().is_none_or(|(_, v)| cell.variance > *v) {
                worst = Some((format!("{ds}/{clf}"), cell.variance));
            }
        }
    }
    if let Some((cell, variance)) = worst {
        out.push(outcome(
            7,
            "run-to-run variance",
            variance < t.max_variance,
            format!(
                "largest {cell} = {variance:.2e} (need < {:.0e}, k-means excluded)",
                t.max_variance
            ),
        ));
    }

    let mismatched: Vec<String> = report
        .datasets
        .iter()
        .flat_map(|(ds, dr)| {
            dr.cells
                .iter()
                .filter(|(_, c)| !c.micro_f1_equals_accuracy)
                .map(move |(clf, _)| format!("{ds}/{clf}"))
        })
        .collect();
    out.push(outcome(
        8,
        "micro-F1 equals accuracy",
        mismatched.is_empty(),
        if mismatched.is_empty() {
            "every single-dataset run".into()
        } else {
            format!("differs in {}", mismatched.join(", "))
        },
    ));
    out
}
