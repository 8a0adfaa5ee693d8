//! Class balancing by oversampling with synonym replacement.

mod thesaurus;

use indexmap::IndexMap;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub use thesaurus::{LoadStats, PartOfSpeech, Thesaurus};

use crate::corpus::LabeledUtterance;
use crate::error::{Error, Result};
use crate::preprocess::{normalize_text, NormalizedText};

pub const DEFAULT_MAX_REPLACEMENTS: usize = 2;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Augmented {
    pub text: NormalizedText,
    /// False when no token had a thesaurus entry.
    pub changed: bool,
}

/// Replaces up to `max_replacements` randomly chosen thesaurus headwords in
/// `nt` with a uniformly drawn synonym each.
pub fn synonym_augment<R: Rng + ?Sized>(
    nt: &NormalizedText,
    thesaurus: &Thesaurus,
    max_replacements: usize,
    rng: &mut R,
) -> Augmented {
    let mut candidates: Vec<usize> = nt
        .tokens()
        .iter()
        .enumerate()
        .filter(|(_, t)| !thesaurus.synonyms(t).is_empty())
        .map(|(i, _)| i)
        .collect();
    let picks = max_replacements.min(candidates.len());
    if picks == 0 {
        return Augmented {
            text: nt.clone(),
            changed: false,
        };
    }

    // Partial Fisher-Yates: the first `picks` slots become a uniform sample
    // without replacement.
    for i in 0..picks {
        let j = rng.gen_range(i..candidates.len());
        candidates.swap(i, j);
    }
    let mut tokens = nt.tokens().to_vec();
    for &pos in &candidates[..picks] {
        let synonyms = thesaurus.synonyms(&tokens[pos]);
        tokens[pos] = synonyms[rng.gen_range(0..synonyms.len())].clone();
    }
    Augmented {
        text: NormalizedText::from_tokens(tokens),
        changed: true,
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AugmentationPlan {
    /// Samples per class after balancing; `None` means the largest original
    /// class count.
    pub target_count: Option<usize>,
    pub seed: u64,
    pub max_replacements: usize,
    /// Labels that must be present in the input. Empty means the label set
    /// is taken from the input itself.
    pub classes: Vec<String>,
}

impl AugmentationPlan {
    pub fn new(seed: u64) -> Self {
        Self {
            target_count: None,
            seed,
            max_replacements: DEFAULT_MAX_REPLACEMENTS,
            classes: Vec::new(),
        }
    }

    pub fn with_target(mut self, target_count: usize) -> Self {
        self.target_count = Some(target_count);
        self
    }
}

/// Oversamples every class to the plan's target count.
///
/// The originals come first, in input order. Then for each class, in order
/// of first appearance, synonym-augmented copies of uniformly drawn
/// originals are appended. A draw with no thesaurus coverage is appended as
/// an exact duplicate.
pub fn balance_classes(
    train: &[LabeledUtterance],
    thesaurus: &Thesaurus,
    plan: &AugmentationPlan,
) -> Result<Vec<LabeledUtterance>> {
    if let Some(leak) = train.iter().find(|s| !s.is_training) {
        return Err(Error::Leakage {
            stage: "augmentation",
            text: leak.text.clone(),
        });
    }

    let mut by_class: IndexMap<&str, Vec<&LabeledUtterance>> = IndexMap::new();
    for class in &plan.classes {
        by_class.entry(class.as_str()).or_default();
    }
    for sample in train {
        by_class
            .entry(sample.intent.as_str())
            .or_default()
            .push(sample);
    }
    if by_class.is_empty() {
        return Err(Error::InvalidArgument(
            "cannot balance an empty training set".into(),
        ));
    }
    if let Some((class, _)) = by_class.iter().find(|(_, members)| members.is_empty()) {
        return Err(Error::EmptyClass(class.to_string()));
    }

    let largest = by_class.values().map(Vec::len).max().unwrap_or(0);
    let target = plan.target_count.unwrap_or(largest);
    if target < largest {
        return Err(Error::InvalidArgument(format!(
            "target count {target} is below the largest class size {largest}"
        )));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(plan.seed);
    let mut out: Vec<LabeledUtterance> = train.to_vec();
    for members in by_class.values() {
        for _ in members.len()..target {
            let source = members[rng.gen_range(0..members.len())];
            let augmented = synonym_augment(
                &normalize_text(&source.text),
                thesaurus,
                plan.max_replacements,
                &mut rng,
            );
            out.push(LabeledUtterance {
                text: augmented.text.text().to_string(),
                intent: source.intent.clone(),
                is_training: true,
            });
        }
    }
    Ok(out)
}
