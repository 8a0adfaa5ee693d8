use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::path::Path;
use std::sync::OnceLock;

use crate::error::{Error, Result};

const BUILTIN: &str = include_str!("../../data/thesaurus.tsv");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PartOfSpeech {
    Noun,
    Verb,
}

impl PartOfSpeech {
    fn parse(tag: &str) -> Option<Self> {
        match tag {
            "n" => Some(Self::Noun),
            "v" => Some(Self::Verb),
            _ => None,
        }
    }
}

impl fmt::Display for PartOfSpeech {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Noun => "n",
            Self::Verb => "v",
        })
    }
}

/// Counts of lexicon content skipped while loading.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct LoadStats {
    pub rejected_headwords: usize,
    pub rejected_synonyms: usize,
}

/// Synonyms for nouns and verbs, keyed by `(word, part of speech)`.
///
/// Every word and synonym is a lowercase single token made of letters and
/// digits. Immutable once loaded.
#[derive(Debug, Clone, Default)]
pub struct Thesaurus {
    entries: BTreeMap<(String, PartOfSpeech), Vec<String>>,
    by_word: HashMap<String, Vec<String>>,
}

fn is_single_token(word: &str) -> bool {
    !word.is_empty()
        && word
            .chars()
            .all(|c| c.is_alphanumeric() && !c.is_uppercase())
}

impl Thesaurus {
    /// The small lexicon compiled into the crate.
    pub fn builtin() -> &'static Thesaurus {
        static BUILTIN_THESAURUS: OnceLock<Thesaurus> = OnceLock::new();
        BUILTIN_THESAURUS.get_or_init(|| {
            Thesaurus::parse(BUILTIN)
                .expect("built-in thesaurus is well formed")
                .0
        })
    }

    pub fn from_file(path: impl AsRef<Path>) -> Result<(Self, LoadStats)> {
        let path = path.as_ref();
        let raw = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::parse(&raw)
    }

    /// Parses `word<TAB>pos<TAB>syn1,syn2,...` lines. Blank lines and lines
    /// starting with `#` are skipped; repeated `(word, pos)` lines are
    /// merged. Multi-word headwords and synonyms are dropped and counted.
    pub fn parse(raw: &str) -> Result<(Self, LoadStats)> {
        let mut stats = LoadStats::default();
        let mut entries: BTreeMap<(String, PartOfSpeech), Vec<String>> = BTreeMap::new();
        for (i, line) in raw.lines().enumerate() {
            let line_no = i + 1;
            let trimmed = line.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = line.split('\t').collect();
            if fields.len() != 3 {
                return Err(Error::Thesaurus {
                    line: line_no,
                    message: format!("expected 3 tab-separated fields, found {}", fields.len()),
                });
            }
            let pos = PartOfSpeech::parse(fields[1].trim()).ok_or_else(|| Error::Thesaurus {
                line: line_no,
                message: format!("unknown part of speech {:?}", fields[1]),
            })?;
            let word = fields[0].trim().to_lowercase();
            if !is_single_token(&word) {
                stats.rejected_headwords += 1;
                continue;
            }
            let list = entries.entry((word.clone(), pos)).or_default();
            for synonym in fields[2].split(',') {
                let synonym = synonym.trim().to_lowercase();
                if synonym.is_empty() || synonym == word || list.contains(&synonym) {
                    continue;
                }
                if !is_single_token(&synonym) {
                    stats.rejected_synonyms += 1;
                    continue;
                }
                list.push(synonym);
            }
        }
        entries.retain(|_, syns| !syns.is_empty());

        let mut by_word: HashMap<String, Vec<String>> = HashMap::new();
        for ((word, _), synonyms) in &entries {
            let merged = by_word.entry(word.clone()).or_default();
            for s in synonyms {
                if !merged.contains(s) {
                    merged.push(s.clone());
                }
            }
        }
        Ok((Self { entries, by_word }, stats))
    }

    pub fn get(&self, word: &str, pos: PartOfSpeech) -> Option<&[String]> {
        self.entries
            .get(&(word.to_string(), pos))
            .map(Vec::as_slice)
    }

    /// All synonyms of `word` across parts of speech, nouns first.
    pub fn synonyms(&self, word: &str) -> &[String] {
        self.by_word.get(word).map_or(&[], Vec::as_slice)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, PartOfSpeech, &[String])> {
        self.entries
            .iter()
            .map(|((w, p), s)| (w.as_str(), *p, s.as_slice()))
    }
}
