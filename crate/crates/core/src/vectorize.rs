//! Vector space model over sub-tokens: smoothed tf-idf weighting followed by
//! Euclidean normalization.
//!
//! For `n` fitted documents and a sub-token seen in `df` of them,
//! `idf = ln((1 + n) / (1 + df)) + 1`. A document's weight for a sub-token is
//! its raw occurrence count times its idf, and the weight vector is divided
//! by its L2 norm. Sub-tokens that were not seen during fitting are ignored.

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::semhash::{FeaturizedText, SubToken};

/// Sorted `(column, weight)` pairs with nonzero weights.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SparseVector {
    entries: Vec<(usize, f64)>,
}

impl SparseVector {
    /// Builds a vector from pairs with strictly increasing columns. Zero
    /// weights are dropped.
    pub fn new(entries: Vec<(usize, f64)>) -> Result<Self> {
        if entries.windows(2).any(|w| w[0].0 >= w[1].0) {
            return Err(Error::InvalidArgument(
                "sparse vector columns must be strictly increasing".into(),
            ));
        }
        if entries.iter().any(|(_, v)| !v.is_finite()) {
            return Err(Error::InvalidArgument(
                "sparse vector weights must be finite".into(),
            ));
        }
        Ok(Self {
            entries: entries.into_iter().filter(|(_, v)| *v != 0.0).collect(),
        })
    }

    pub fn from_dense(values: &[f64]) -> Self {
        Self {
            entries: values
                .iter()
                .copied()
                .enumerate()
                .filter(|(_, v)| *v != 0.0)
                .collect(),
        }
    }

    pub fn entries(&self) -> &[(usize, f64)] {
        &self.entries
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    /// One past the largest column, or 0 for the zero vector.
    pub fn min_dim(&self) -> usize {
        self.entries.last().map_or(0, |(c, _)| c + 1)
    }

    pub fn squared_norm(&self) -> f64 {
        self.entries.iter().map(|(_, v)| v * v).sum()
    }

    pub fn norm(&self) -> f64 {
        self.squared_norm().sqrt()
    }

    pub fn dot_dense(&self, dense: &[f64]) -> f64 {
        self.entries.iter().map(|&(c, v)| v * dense[c]).sum()
    }

    pub fn dot(&self, other: &SparseVector) -> f64 {
        let (mut i, mut j, mut acc) = (0, 0, 0.0);
        let (a, b) = (&self.entries, &other.entries);
        while i < a.len() && j < b.len() {
            match a[i].0.cmp(&b[j].0) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => {
                    acc += a[i].1 * b[j].1;
                    i += 1;
                    j += 1;
                }
            }
        }
        acc
    }

    /// `dense += scale * self`.
    pub fn add_scaled_to(&self, dense: &mut [f64], scale: f64) {
        for &(c, v) in &self.entries {
            dense[c] += scale * v;
        }
    }

    /// Squared Euclidean distance to a dense point, summed over every
    /// dimension of `dense`.
    pub fn squared_distance_dense(&self, dense: &[f64]) -> f64 {
        let mut acc = 0.0;
        let mut it = self.entries.iter().peekable();
        for (c, &d) in dense.iter().enumerate() {
            let x = match it.peek() {
                Some(&&(col, v)) if col == c => {
                    it.next();
                    v
                }
                _ => 0.0,
            };
            let diff = x - d;
            acc += diff * diff;
        }
        acc
    }

    /// Squared Euclidean distance between two sparse vectors, merging on
    /// column order.
    pub fn squared_distance(&self, other: &SparseVector) -> f64 {
        let (a, b) = (&self.entries, &other.entries);
        let (mut i, mut j, mut acc) = (0, 0, 0.0);
        while i < a.len() || j < b.len() {
            let diff = match (a.get(i), b.get(j)) {
                (Some(&(ca, va)), Some(&(cb, vb))) if ca == cb => {
                    i += 1;
                    j += 1;
                    va - vb
                }
                (Some(&(ca, va)), Some(&(cb, _))) if ca < cb => {
                    i += 1;
                    va
                }
                (Some(_), Some(&(_, vb))) => {
                    j += 1;
                    -vb
                }
                (Some(&(_, va)), None) => {
                    i += 1;
                    va
                }
                (None, Some(&(_, vb))) => {
                    j += 1;
                    -vb
                }
                (None, None) => unreachable!(),
            };
            acc += diff * diff;
        }
        acc
    }

    pub fn scaled(&self, factor: f64) -> SparseVector {
        SparseVector {
            entries: self
                .entries
                .iter()
                .map(|&(c, v)| (c, v * factor))
                .filter(|(_, v)| *v != 0.0)
                .collect(),
        }
    }

    pub fn to_dense(&self, dim: usize) -> Vec<f64> {
        let mut out = vec![0.0; dim];
        for &(c, v) in &self.entries {
            out[c] = v;
        }
        out
    }
}

/// A fitted vocabulary of sub-tokens with document frequencies.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "FeatureSpaceRepr", into = "FeatureSpaceRepr")]
pub struct FeatureSpace {
    tokens: Vec<SubToken>,
    index: HashMap<SubToken, usize>,
    doc_freq: Vec<u32>,
    n_docs: u32,
}

#[derive(Serialize, Deserialize)]
struct FeatureSpaceRepr {
    tokens: Vec<SubToken>,
    doc_freq: Vec<u32>,
    n_docs: u32,
}

impl From<FeatureSpace> for FeatureSpaceRepr {
    fn from(fs: FeatureSpace) -> Self {
        Self {
            tokens: fs.tokens,
            doc_freq: fs.doc_freq,
            n_docs: fs.n_docs,
        }
    }
}

impl TryFrom<FeatureSpaceRepr> for FeatureSpace {
    type Error = String;

    fn try_from(repr: FeatureSpaceRepr) -> std::result::Result<Self, String> {
        if repr.tokens.len() != repr.doc_freq.len() {
            return Err("token list and df array differ in length".into());
        }
        if repr.doc_freq.iter().any(|&df| df == 0 || df > repr.n_docs) {
            return Err("document frequency out of range".into());
        }
        let index: HashMap<_, _> = repr
            .tokens
            .iter()
            .cloned()
            .enumerate()
            .map(|(i, t)| (t, i))
            .collect();
        if index.len() != repr.tokens.len() {
            return Err("duplicate token in vocabulary".into());
        }
        Ok(Self {
            tokens: repr.tokens,
            index,
            doc_freq: repr.doc_freq,
            n_docs: repr.n_docs,
        })
    }
}

impl FeatureSpace {
    pub fn fit(featurized: &[FeaturizedText]) -> Result<Self> {
        if featurized.is_empty() {
            return Err(Error::EmptyCorpus);
        }
        let mut tokens = Vec::new();
        let mut index: HashMap<SubToken, usize> = HashMap::new();
        let mut doc_freq: Vec<u32> = Vec::new();
        let mut last_seen: Vec<usize> = Vec::new();
        for (doc, ft) in featurized.iter().enumerate() {
            for token in ft {
                let col = *index.entry(token.clone()).or_insert_with(|| {
                    tokens.push(token.clone());
                    doc_freq.push(0);
                    last_seen.push(usize::MAX);
                    tokens.len() - 1
                });
                if last_seen[col] != doc {
                    last_seen[col] = doc;
                    doc_freq[col] += 1;
                }
            }
        }
        Ok(Self {
            tokens,
            index,
            doc_freq,
            n_docs: featurized.len() as u32,
        })
    }

    pub fn dim(&self) -> usize {
        self.tokens.len()
    }

    pub fn n_docs(&self) -> u32 {
        self.n_docs
    }

    pub fn tokens(&self) -> &[SubToken] {
        &self.tokens
    }

    pub fn doc_freq(&self) -> &[u32] {
        &self.doc_freq
    }

    pub fn column(&self, token: &SubToken) -> Option<usize> {
        self.index.get(token).copied()
    }

    /// Smoothed inverse document frequency, or `None` for unseen sub-tokens.
    pub fn idf(&self, token: &SubToken) -> Option<f64> {
        self.column(token).map(|c| self.idf_at(c))
    }

    pub fn idf_at(&self, column: usize) -> f64 {
        smoothed_idf(self.n_docs, self.doc_freq[column])
    }

    pub fn transform(&self, ft: &FeaturizedText) -> SparseVector {
        let mut counts: BTreeMap<usize, u32> = BTreeMap::new();
        for token in ft {
            if let Some(col) = self.column(token) {
                *counts.entry(col).or_insert(0) += 1;
            }
        }
        let weighted: Vec<(usize, f64)> = counts
            .into_iter()
            .map(|(col, tf)| (col, f64::from(tf) * self.idf_at(col)))
            .collect();
        let norm = weighted.iter().map(|(_, w)| w * w).sum::<f64>().sqrt();
        if norm == 0.0 {
            return SparseVector::default();
        }
        SparseVector {
            entries: weighted.into_iter().map(|(c, w)| (c, w / norm)).collect(),
        }
    }
}

pub fn smoothed_idf(n_docs: u32, df: u32) -> f64 {
    ((1.0 + f64::from(n_docs)) / (1.0 + f64::from(df))).ln() + 1.0
}
