//! Subword semantic hashing: every word is padded with `#` on both sides
//! and broken into its contiguous character trigrams.
//!
//! `have` becomes `#have#` and yields `#ha hav ave ve#`. A word of `L`
//! characters always yields exactly `L` sub-tokens.

use std::fmt;

use indexmap::IndexSet;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::preprocess::NormalizedText;

pub const PAD: char = '#';

/// A three-character window over a `#`-padded word.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SubToken(String);

impl SubToken {
    pub fn as_str(&self) -> &str {
        &self.0
    }

    fn from_window(window: &[char]) -> Self {
        debug_assert_eq!(window.len(), 3);
        SubToken(window.iter().collect())
    }
}

impl fmt::Display for SubToken {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl AsRef<str> for SubToken {
    fn as_ref(&self) -> &str {
        &self.0
    }
}

impl TryFrom<String> for SubToken {
    type Error = Error;

    fn try_from(value: String) -> Result<Self> {
        let chars: Vec<char> = value.chars().collect();
        let interior_pad = chars.len() == 3 && chars[1] == PAD;
        if chars.len() != 3 || interior_pad {
            return Err(Error::InvalidArgument(format!(
                "{value:?} is not a padded trigram"
            )));
        }
        Ok(SubToken(value))
    }
}

/// The sub-tokens of one text in document order, repetitions included.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct FeaturizedText(Vec<SubToken>);

impl FeaturizedText {
    pub fn new(subtokens: Vec<SubToken>) -> Self {
        Self(subtokens)
    }

    pub fn subtokens(&self) -> &[SubToken] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, SubToken> {
        self.0.iter()
    }
}

impl<'a> IntoIterator for &'a FeaturizedText {
    type Item = &'a SubToken;
    type IntoIter = std::slice::Iter<'a, SubToken>;

    fn into_iter(self) -> Self::IntoIter {
        self.0.iter()
    }
}

pub fn subtokenize_word(word: &str) -> Result<Vec<SubToken>> {
    if word.is_empty() {
        return Err(Error::InvalidWord {
            word: word.to_string(),
            reason: "empty word",
        });
    }
    if word.contains(PAD) {
        return Err(Error::InvalidWord {
            word: word.to_string(),
            reason: "contains the padding character '#'",
        });
    }
    if word.contains(char::is_whitespace) {
        return Err(Error::InvalidWord {
            word: word.to_string(),
            reason: "contains whitespace",
        });
    }
    let padded: Vec<char> = std::iter::once(PAD)
        .chain(word.chars())
        .chain(std::iter::once(PAD))
        .collect();
    Ok(padded.windows(3).map(SubToken::from_window).collect())
}

/// Sub-tokens of every word of `nt`, lowercased, in order.
pub fn featurize_text(nt: &NormalizedText) -> FeaturizedText {
    let subtokens = nt
        .tokens()
        .iter()
        .flat_map(|word| {
            // Tokens of a normalized text are non-empty and never contain
            // whitespace or '#'.
            subtokenize_word(&word.to_lowercase()).expect("normalized token")
        })
        .collect();
    FeaturizedText(subtokens)
}

/// Featurizes a corpus, returning the distinct sub-tokens in order of first
/// appearance together with the per-text sub-token lists.
pub fn build_subtoken_set(texts: &[NormalizedText]) -> (IndexSet<SubToken>, Vec<FeaturizedText>) {
    let examples: Vec<FeaturizedText> = texts.iter().map(featurize_text).collect();
    let set = examples
        .iter()
        .flat_map(|ex| ex.iter().cloned())
        .collect::<IndexSet<_>>();
    (set, examples)
}
