use std::ops::AddAssign;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Micro-aggregated true positive, false positive and false negative counts.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionTally {
    pub tp: u64,
    pub fp: u64,
    #[serde(rename = "fn")]
    pub fn_: u64,
}

impl ConfusionTally {
    /// Tallies single-label predictions: a miss is one false positive for
    /// the predicted class and one false negative for the gold class.
    pub fn from_predictions<T: PartialEq>(predictions: &[T], gold: &[T]) -> Result<Self> {
        check_lengths(predictions, gold)?;
        let correct = predictions.iter().zip(gold).filter(|(p, g)| p == g).count() as u64;
        let wrong = gold.len() as u64 - correct;
        Ok(Self {
            tp: correct,
            fp: wrong,
            fn_: wrong,
        })
    }
}

impl AddAssign for ConfusionTally {
    fn add_assign(&mut self, other: Self) {
        self.tp += other.tp;
        self.fp += other.fp;
        self.fn_ += other.fn_;
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MicroF1 {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    /// Set when there are no true positives, so the harmonic mean is
    /// undefined and reported as zero.
    pub degenerate: bool,
}

pub fn micro_f1(t: ConfusionTally) -> MicroF1 {
    let ratio = |num: u64, den: u64| {
        if den == 0 {
            0.0
        } else {
            num as f64 / den as f64
        }
    };
    MicroF1 {
        precision: ratio(t.tp, t.tp + t.fp),
        recall: ratio(t.tp, t.tp + t.fn_),
        f1: if t.tp == 0 {
            0.0
        } else {
            ratio(2 * t.tp, 2 * t.tp + t.fp + t.fn_)
        },
        degenerate: t.tp == 0,
    }
}

fn check_lengths<T>(predictions: &[T], gold: &[T]) -> Result<()> {
    if predictions.len() != gold.len() {
        return Err(Error::LengthMismatch {
            left: predictions.len(),
            right: gold.len(),
        });
    }
    Ok(())
}

/// Fraction of exact label matches.
pub fn accuracy<T: PartialEq>(predictions: &[T], gold: &[T]) -> Result<f64> {
    check_lengths(predictions, gold)?;
    if gold.is_empty() {
        return Err(Error::InvalidArgument(
            "accuracy needs at least one prediction".into(),
        ));
    }
    let correct = predictions.iter().zip(gold).filter(|(p, g)| p == g).count();
    Ok(correct as f64 / gold.len() as f64)
}

/// Population mean and variance.
pub fn mean_variance(values: &[f64]) -> (f64, f64) {
    if values.is_empty() {
        return (0.0, 0.0);
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
    (mean, var)
}

#[cfg(test)]
mod tests {
    use proptest::prelude::*;

    use super::*;

    #[test]
    fn hand_values() {
        let m = micro_f1(ConfusionTally {
            tp: 90,
            fp: 10,
            fn_: 10,
        });
        assert_eq!(
            (m.precision, m.recall, m.f1, m.degenerate),
            (0.9, 0.9, 0.9, false)
        );
        let m = micro_f1(ConfusionTally {
            tp: 7,
            fp: 0,
            fn_: 0,
        });
        assert_eq!((m.precision, m.recall, m.f1), (1.0, 1.0, 1.0));
        let m = micro_f1(ConfusionTally {
            tp: 0,
            fp: 3,
            fn_: 3,
        });
        assert_eq!(
            (m.precision, m.recall, m.f1, m.degenerate),
            (0.0, 0.0, 0.0, true)
        );
        assert!(micro_f1(ConfusionTally::default()).degenerate);
    }

    #[test]
    fn accuracy_errors() {
        assert_eq!(accuracy(&[1, 2], &[1, 2]).unwrap(), 1.0);
        assert!(accuracy::<u8>(&[], &[]).is_err());
        assert!(accuracy(&[1], &[1, 2]).is_err());
    }

    #[test]
    fn variance_of_constant_is_zero() {
        assert_eq!(mean_variance(&[0.25]), (0.25, 0.0));
        assert_eq!(mean_variance(&[1.0, 3.0]), (2.0, 1.0));
    }

    proptest! {
        #[test]
        fn micro_f1_equals_accuracy(pairs in prop::collection::vec((0u8..5, 0u8..5), 1..200)) {
            let (pred, gold): (Vec<u8>, Vec<u8>) = pairs.into_iter().unzip();
            let t = ConfusionTally::from_predictions(&pred, &gold).unwrap();
            prop_assert_eq!(t.fp, t.fn_);
            let acc = accuracy(&pred, &gold).unwrap();
            prop_assert_eq!(micro_f1(t).f1, acc);
        }
    }
}
