//! Vocabularies and unigram-presence feature vectors.

use std::collections::HashMap;
use std::fmt::Write as _;

use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

/// Lowercases and splits on whitespace; the corpora are pre-tokenized.
pub fn tokenize(text: &str) -> Vec<String> {
    text.split_whitespace().map(str::to_lowercase).collect()
}

/// Dense token index, ordered by first occurrence in the training texts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Vocabulary {
    tokens: Vec<String>,
    index: HashMap<String, u32>,
}

impl Vocabulary {
    /// Keeps every token whose document frequency is at least `min_doc_freq`.
    pub fn build<T, S>(texts: &[T], min_doc_freq: usize) -> Result<Self>
    where
        T: AsRef<[S]>,
        S: AsRef<str>,
    {
        if min_doc_freq == 0 {
            return Err(Error::Config("min_doc_freq must be at least 1".into()));
        }
        let mut order: Vec<&str> = Vec::new();
        let mut doc_freq: HashMap<&str, (usize, usize)> = HashMap::new();
        for (doc, text) in texts.iter().enumerate() {
            for tok in text.as_ref() {
                let tok = tok.as_ref();
                let entry = doc_freq.entry(tok).or_insert_with(|| {
                    order.push(tok);
                    (0, usize::MAX)
                });
                if entry.1 != doc {
                    entry.0 += 1;
                    entry.1 = doc;
                }
            }
        }
        let tokens: Vec<String> = order
            .into_iter()
            .filter(|t| doc_freq[t].0 >= min_doc_freq)
            .map(str::to_owned)
            .collect();
        if tokens.is_empty() {
            return Err(Error::EmptyVocabulary);
        }
        Ok(Self::from_tokens(tokens))
    }

    fn from_tokens(tokens: Vec<String>) -> Self {
        let index = tokens
            .iter()
            .enumerate()
            .map(|(i, t)| (t.clone(), i as u32))
            .collect();
        Self { tokens, index }
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn get(&self, token: &str) -> Option<u32> {
        self.index.get(token).copied()
    }

    pub fn token(&self, index: u32) -> Option<&str> {
        self.tokens.get(index as usize).map(String::as_str)
    }

    /// Presence vector for a token list; unknown tokens are dropped.
    pub fn featurize<S: AsRef<str>>(&self, tokens: &[S], normalize: bool) -> PresenceVector {
        PresenceVector::from_indices(
            tokens.iter().filter_map(|t| self.get(t.as_ref())).collect(),
            normalize,
        )
    }

    /// Two-column `token<TAB>index` text form.
    pub fn to_tsv(&self) -> String {
        let mut out = String::new();
        for (i, t) in self.tokens.iter().enumerate() {
            let _ = writeln!(out, "{t}\t{i}");
        }
        out
    }

    pub fn from_tsv(text: &str) -> Result<Self> {
        let mut tokens: Vec<Option<String>> = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            if line.is_empty() {
                continue;
            }
            let (tok, idx) = line.rsplit_once('\t').ok_or_else(|| {
                Error::Validation(format!("vocabulary line {}: missing tab", lineno + 1))
            })?;
            let idx: usize = idx.parse().map_err(|_| {
                Error::Validation(format!("vocabulary line {}: bad index", lineno + 1))
            })?;
            if idx >= tokens.len() {
                tokens.resize(idx + 1, None);
            }
            if tokens[idx].replace(tok.to_owned()).is_some() {
                return Err(Error::Validation(format!(
                    "vocabulary index {idx} appears twice"
                )));
            }
        }
        let tokens = tokens
            .into_iter()
            .enumerate()
            .map(|(i, t)| {
                t.ok_or_else(|| Error::Validation(format!("vocabulary index {i} missing")))
            })
            .collect::<Result<Vec<_>>>()?;
        if tokens.is_empty() {
            return Err(Error::EmptyVocabulary);
        }
        let vocab = Self::from_tokens(tokens);
        if vocab.index.len() != vocab.tokens.len() {
            return Err(Error::Validation(
                "vocabulary contains duplicate tokens".into(),
            ));
        }
        Ok(vocab)
    }

    /// SHA-256 of the TSV form; models record it to refuse foreign vocabularies.
    pub fn digest(&self) -> String {
        hex::encode(Sha256::digest(self.to_tsv().as_bytes()))
    }
}

/// Sparse binary vector: every active coordinate carries the same value.
#[derive(Debug, Clone, PartialEq)]
pub struct PresenceVector {
    indices: Vec<u32>,
    value: f64,
    normalized: bool,
}

impl PresenceVector {
    /// Deduplicates and sorts `indices`.
    pub fn from_indices(mut indices: Vec<u32>, normalize: bool) -> Self {
        indices.sort_unstable();
        indices.dedup();
        let value = if normalize && !indices.is_empty() {
            1.0 / (indices.len() as f64).sqrt()
        } else {
            1.0
        };
        Self {
            indices,
            value,
            normalized: normalize,
        }
    }

    pub fn indices(&self) -> &[u32] {
        &self.indices
    }

    pub fn value(&self) -> f64 {
        self.value
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    pub fn nnz(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn dot(&self, dense: &[f64]) -> f64 {
        self.value * self.indices.iter().map(|&i| dense[i as usize]).sum::<f64>()
    }

    pub fn squared_norm(&self) -> f64 {
        self.value * self.value * self.indices.len() as f64
    }

    pub fn norm(&self) -> f64 {
        self.squared_norm().sqrt()
    }

    /// `dense += scale * self`.
    pub fn add_to(&self, dense: &mut [f64], scale: f64) {
        let step = scale * self.value;
        for &i in &self.indices {
            dense[i as usize] += step;
        }
    }
}
