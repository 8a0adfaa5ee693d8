//! Text normalization ahead of featurization.
//!
//! Normalization lowercases, replaces personal and possessive pronouns with
//! the literal mask `-PRON-`, deletes every character that is not a letter,
//! digit or stop character (`.`, `!`, `?`) and collapses whitespace.

use serde::{Deserialize, Serialize};

pub const PRONOUN_MASK: &str = "-PRON-";
const PRONOUN_MASK_LOWER: &str = "-pron-";

pub const STOP_CHARS: [char; 3] = ['.', '!', '?'];

pub const PRONOUNS: [&str; 31] = [
    "i",
    "me",
    "my",
    "mine",
    "myself",
    "we",
    "us",
    "our",
    "ours",
    "ourselves",
    "you",
    "your",
    "yours",
    "yourself",
    "yourselves",
    "he",
    "him",
    "his",
    "himself",
    "she",
    "her",
    "hers",
    "herself",
    "it",
    "its",
    "itself",
    "they",
    "them",
    "their",
    "theirs",
    "themselves",
];

pub fn is_stop_char(c: char) -> bool {
    STOP_CHARS.contains(&c)
}

pub fn is_pronoun(word: &str) -> bool {
    PRONOUNS.contains(&word)
}

/// A normalized sentence together with its word split.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NormalizedText {
    text: String,
    tokens: Vec<String>,
}

impl NormalizedText {
    /// Rebuilds a normalized text from already-normalized tokens.
    pub fn from_tokens(tokens: Vec<String>) -> Self {
        let text = tokens.join(" ");
        Self { text, tokens }
    }

    pub fn text(&self) -> &str {
        &self.text
    }

    pub fn tokens(&self) -> &[String] {
        &self.tokens
    }

    pub fn into_tokens(self) -> Vec<String> {
        self.tokens
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }
}

pub fn normalize_text(raw: &str) -> NormalizedText {
    let lower = raw.to_lowercase();
    let pieces: Vec<String> = lower
        .split_whitespace()
        .map(normalize_piece)
        .filter(|p| !p.is_empty())
        .collect();
    let text = pieces.join(" ");
    let tokens = split_words(&text);
    NormalizedText { text, tokens }
}

// One whitespace-delimited piece of lowercased input. An existing mask is
// kept intact so that normalization is idempotent.
fn normalize_piece(piece: &str) -> String {
    let mut out = String::with_capacity(piece.len());
    let mut word = String::new();
    let flush = |word: &mut String, out: &mut String| {
        if is_pronoun(word) {
            out.push_str(PRONOUN_MASK);
        } else {
            out.push_str(word);
        }
        word.clear();
    };

    let mut rest = piece;
    while let Some(c) = rest.chars().next() {
        if rest.starts_with(PRONOUN_MASK_LOWER) {
            flush(&mut word, &mut out);
            out.push_str(PRONOUN_MASK);
            rest = &rest[PRONOUN_MASK_LOWER.len()..];
            continue;
        }
        if c.is_alphanumeric() && !c.is_uppercase() {
            word.push(c);
        } else if is_stop_char(c) {
            flush(&mut word, &mut out);
            out.push(c);
        }
        rest = &rest[c.len_utf8()..];
    }
    flush(&mut word, &mut out);
    out
}

/// Splits on whitespace and detaches every stop character as its own token.
pub fn split_words(text: &str) -> Vec<String> {
    let mut tokens = Vec::new();
    for piece in text.split_whitespace() {
        let mut current = String::new();
        for c in piece.chars() {
            if is_stop_char(c) {
                if !current.is_empty() {
                    tokens.push(std::mem::take(&mut current));
                }
                tokens.push(c.to_string());
            } else {
                current.push(c);
            }
        }
        if !current.is_empty() {
            tokens.push(current);
        }
    }
    tokens
}
