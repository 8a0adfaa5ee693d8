use std::fmt::Display;
use std::hash::Hash;

use indexmap::IndexMap;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

pub const DEFAULT_FOLDS: usize = 5;

/// One train/validation split of sample indices, both sorted.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Fold {
    pub train: Vec<usize>,
    pub validation: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Folds {
    pub folds: Vec<Fold>,
    pub warnings: Vec<String>,
}

/// Stratified k-fold split.
///
/// Each class is shuffled with the seeded generator and dealt round-robin
/// over the folds. The starting fold carries over from one class to the
/// next, which keeps both per-class and total fold sizes within one of each
/// other.
pub fn stratified_kfold<T: Eq + Hash + Display>(
    labels: &[T],
    k: usize,
    seed: u64,
) -> Result<Folds> {
    if labels.is_empty() {
        return Err(Error::InvalidArgument(
            "cannot split an empty label list".into(),
        ));
    }
    if k < 2 {
        return Err(Error::InvalidArgument(format!(
            "k-fold needs at least 2 folds, got {k}"
        )));
    }
    if k > labels.len() {
        return Err(Error::InvalidArgument(format!(
            "{k} folds requested for {} samples",
            labels.len()
        )));
    }

    let mut by_class: IndexMap<&T, Vec<usize>> = IndexMap::new();
    for (i, label) in labels.iter().enumerate() {
        by_class.entry(label).or_default().push(i);
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut assignment = vec![0usize; labels.len()];
    let mut warnings = Vec::new();
    let mut offset = 0;
    for (label, members) in by_class.iter_mut() {
        if members.len() < k {
            warnings.push(format!(
                "class {label} has {} samples, fewer than {k} folds",
                members.len()
            ));
        }
        members.shuffle(&mut rng);
        for (p, &i) in members.iter().enumerate() {
            assignment[i] = (offset + p) % k;
        }
        offset = (offset + members.len()) % k;
    }

    let folds = (0..k)
        .map(|f| {
            let (validation, train) = (0..labels.len()).partition(|&i| assignment[i] == f);
            Fold { train, validation }
        })
        .collect();
    Ok(Folds { folds, warnings })
}
