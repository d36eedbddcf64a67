//! Dataset ingestion.
//!
//! The polarity corpus is a directory with `pos/` and `neg/` subdirectories of
//! plain-text reviews, one sentence per line. The subjectivity corpus is a pair
//! of flat files (review snippets and plot-summary sentences), one item per
//! line. Both are read as UTF-8 with invalid bytes replaced.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

pub const DEFAULT_FOLDS: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Polarity {
    Positive,
    Negative,
}

impl Polarity {
    /// `true` for the positive class; classifiers treat it as class 1.
    pub fn is_positive(self) -> bool {
        matches!(self, Polarity::Positive)
    }

    pub fn dir_name(self) -> &'static str {
        match self {
            Polarity::Positive => "pos",
            Polarity::Negative => "neg",
        }
    }
}

impl fmt::Display for Polarity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.dir_name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Subjectivity {
    Subjective,
    Objective,
}

impl Subjectivity {
    pub fn is_subjective(self) -> bool {
        matches!(self, Subjectivity::Subjective)
    }
}

/// One movie review.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReviewDocument {
    pub id: String,
    pub label: Polarity,
    pub sentences: Vec<String>,
    /// Index of the first sentence of every paragraph; always starts with 0.
    pub paragraph_starts: Vec<usize>,
    pub fold: usize,
    pub word_count: usize,
}

impl ReviewDocument {
    /// Builds a validated document with fold 0; folds are set by [`assign_folds`].
    pub fn new(
        id: impl Into<String>,
        label: Polarity,
        sentences: Vec<String>,
        paragraph_starts: Vec<usize>,
    ) -> Result<Self> {
        let id = id.into();
        if sentences.is_empty() {
            return Err(Error::Validation(format!("document {id} has no sentences")));
        }
        if let Some(i) = sentences.iter().position(|s| s.trim().is_empty()) {
            return Err(Error::Validation(format!(
                "document {id}: sentence {i} is blank"
            )));
        }
        validate_paragraph_starts(&id, &paragraph_starts, sentences.len())?;
        let word_count = sentences.iter().map(|s| s.split_whitespace().count()).sum();
        Ok(Self {
            id,
            label,
            sentences,
            paragraph_starts,
            fold: 0,
            word_count,
        })
    }

    pub fn len(&self) -> usize {
        self.sentences.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sentences.is_empty()
    }

    /// Paragraph index of every sentence.
    pub fn paragraph_of_sentences(&self) -> Vec<usize> {
        paragraph_ids(&self.paragraph_starts, self.sentences.len())
    }

    /// Sentence index ranges, one per paragraph.
    pub fn paragraph_ranges(&self) -> Vec<std::ops::Range<usize>> {
        let n = self.sentences.len();
        self.paragraph_starts
            .iter()
            .enumerate()
            .map(|(p, &start)| {
                let end = self.paragraph_starts.get(p + 1).copied().unwrap_or(n);
                start..end
            })
            .collect()
    }
}

pub(crate) fn paragraph_ids(starts: &[usize], n: usize) -> Vec<usize> {
    let mut ids = vec![0; n];
    let mut p = 0;
    for (i, id) in ids.iter_mut().enumerate() {
        while p + 1 < starts.len() && starts[p + 1] <= i {
            p += 1;
        }
        *id = p;
    }
    ids
}

fn validate_paragraph_starts(id: &str, starts: &[usize], n: usize) -> Result<()> {
    if starts.first() != Some(&0) {
        return Err(Error::Validation(format!(
            "document {id}: paragraph starts must begin with 0, got {starts:?}"
        )));
    }
    if starts.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Validation(format!(
            "document {id}: paragraph starts not strictly increasing: {starts:?}"
        )));
    }
    if let Some(bad) = starts.iter().find(|&&s| s >= n) {
        return Err(Error::Validation(format!(
            "document {id}: paragraph start {bad} out of range for {n} sentences"
        )));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabeledSentence {
    pub text: String,
    pub label: Subjectivity,
}

/// Counts and per-file SHA-256 digests of everything that was ingested.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct CorpusManifest {
    pub positive_count: usize,
    pub negative_count: usize,
    pub subjective_count: usize,
    pub objective_count: usize,
    pub checksums: BTreeMap<String, String>,
    /// Files that were skipped during ingestion (e.g. empty files).
    #[serde(default)]
    pub skipped: Vec<String>,
    /// Filled in by callers that build a vocabulary over the loaded data.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub vocabulary_size: Option<usize>,
}

impl CorpusManifest {
    pub fn merge(&mut self, other: CorpusManifest) {
        self.positive_count += other.positive_count;
        self.negative_count += other.negative_count;
        self.subjective_count += other.subjective_count;
        self.objective_count += other.objective_count;
        self.checksums.extend(other.checksums);
        self.skipped.extend(other.skipped);
        if other.vocabulary_size.is_some() {
            self.vocabulary_size = other.vocabulary_size;
        }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

#[derive(Debug, Clone)]
pub struct PolarityCorpus {
    pub documents: Vec<ReviewDocument>,
    pub manifest: CorpusManifest,
}

#[derive(Debug, Clone)]
pub struct SubjectivityCorpus {
    pub sentences: Vec<LabeledSentence>,
    pub manifest: CorpusManifest,
}

#[derive(Debug, Clone)]
pub struct LoadOptions {
    pub folds: usize,
    /// Optional paragraph sidecar: `docid<TAB>comma-separated sentence indices`.
    pub paragraph_sidecar: Option<PathBuf>,
}

impl Default for LoadOptions {
    fn default() -> Self {
        Self {
            folds: DEFAULT_FOLDS,
            paragraph_sidecar: None,
        }
    }
}

fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

fn read_lossy(path: &Path) -> Result<(String, String)> {
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    let digest = sha256_hex(&bytes);
    Ok((String::from_utf8_lossy(&bytes).into_owned(), digest))
}

/// Nonblank lines, trimmed, in order.
pub fn split_sentences(raw_text: &str) -> Vec<String> {
    raw_text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty())
        .map(str::to_owned)
        .collect()
}

/// Blank-line paragraph heuristic: a nonblank line following one or more blank
/// lines starts a new paragraph. Returns `[0]` when no breaks are found.
pub fn detect_paragraphs(raw_text: &str) -> Vec<usize> {
    let mut starts = vec![0];
    let mut sentence = 0usize;
    let mut pending_break = false;
    for line in raw_text.lines() {
        if line.trim().is_empty() {
            pending_break = true;
            continue;
        }
        if pending_break && sentence > 0 {
            starts.push(sentence);
        }
        pending_break = false;
        sentence += 1;
    }
    starts
}

/// Paragraph boundaries for one document: the sidecar entry wins when present,
/// otherwise the blank-line heuristic applies.
pub fn resolve_paragraphs(
    doc_id: &str,
    raw_text: &str,
    sidecar: Option<&[usize]>,
    num_sentences: usize,
) -> Result<Vec<usize>> {
    match sidecar {
        Some(starts) => {
            let mut starts = starts.to_vec();
            if starts.first() != Some(&0) {
                starts.insert(0, 0);
            }
            validate_paragraph_starts(doc_id, &starts, num_sentences)?;
            Ok(starts)
        }
        None => Ok(detect_paragraphs(raw_text)),
    }
}

/// Parses a paragraph sidecar file body.
pub fn parse_paragraph_sidecar(text: &str) -> Result<HashMap<String, Vec<usize>>> {
    let mut out = HashMap::new();
    for (lineno, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let (id, list) = line.split_once('\t').ok_or_else(|| {
            Error::Validation(format!(
                "sidecar line {}: expected `docid<TAB>indices`",
                lineno + 1
            ))
        })?;
        let indices = list
            .split(',')
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .map(|s| {
                s.parse::<usize>().map_err(|_| {
                    Error::Validation(format!("sidecar line {}: bad index {s:?}", lineno + 1))
                })
            })
            .collect::<Result<Vec<_>>>()?;
        out.insert(id.trim().to_owned(), indices);
    }
    Ok(out)
}

/// Parses the `cvNNN` prefix of a polarity-corpus filename stem.
pub fn fold_tag(stem: &str) -> Option<usize> {
    let digits = stem.strip_prefix("cv")?.get(..3)?;
    if !digits.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    digits.parse().ok()
}

/// Assigns cross-validation folds.
///
/// When every id carries a `cvNNN` tag the fold is `NNN * k / 1000`, which is
/// `NNN / 100` for the standard ten folds. Otherwise folds are assigned
/// round-robin by position in `docs`.
pub fn assign_folds(docs: &mut [ReviewDocument], k: usize) -> Result<()> {
    if k < 2 {
        return Err(Error::Config(format!(
            "number of folds must be at least 2, got {k}"
        )));
    }
    let tags: Option<Vec<usize>> = docs.iter().map(|d| fold_tag(&d.id)).collect();
    match tags {
        Some(tags) if !docs.is_empty() => {
            for (doc, tag) in docs.iter_mut().zip(tags) {
                doc.fold = tag * k / 1000;
            }
        }
        _ => {
            for (i, doc) in docs.iter_mut().enumerate() {
                doc.fold = i % k;
            }
        }
    }
    let mut sizes = vec![0usize; k];
    for d in docs.iter() {
        sizes[d.fold] += 1;
    }
    if let Some(empty) = sizes.iter().position(|&s| s == 0) {
        return Err(Error::Validation(format!(
            "fold {empty} is empty ({} documents over {k} folds)",
            docs.len()
        )));
    }
    Ok(())
}

fn list_text_files(dir: &Path) -> Result<Vec<PathBuf>> {
    let mut files = Vec::new();
    let entries = fs::read_dir(dir).map_err(|e| Error::io(dir, e))?;
    for entry in entries {
        let entry = entry.map_err(|e| Error::io(dir, e))?;
        let path = entry.path();
        if path.is_file() {
            files.push(path);
        }
    }
    files.sort();
    Ok(files)
}

pub fn load_polarity_dataset(root: impl AsRef<Path>) -> Result<PolarityCorpus> {
    load_polarity_dataset_with(root, &LoadOptions::default())
}

pub fn load_polarity_dataset_with(
    root: impl AsRef<Path>,
    opts: &LoadOptions,
) -> Result<PolarityCorpus> {
    let root = root.as_ref();
    let sidecar = match &opts.paragraph_sidecar {
        Some(p) => {
            let text = fs::read_to_string(p).map_err(|e| Error::io(p, e))?;
            parse_paragraph_sidecar(&text)?
        }
        None => HashMap::new(),
    };

    let mut manifest = CorpusManifest::default();
    let mut documents = Vec::new();
    for label in [Polarity::Positive, Polarity::Negative] {
        let dir = root.join(label.dir_name());
        if !dir.is_dir() {
            return Err(Error::Ingestion(format!(
                "missing `{}` subdirectory under {}",
                label.dir_name(),
                root.display()
            )));
        }
        for path in list_text_files(&dir)? {
            let rel = format!(
                "{}/{}",
                label.dir_name(),
                path.file_name().unwrap_or_default().to_string_lossy()
            );
            let (raw, digest) = read_lossy(&path)?;
            manifest.checksums.insert(rel.clone(), digest);
            let sentences = split_sentences(&raw);
            if sentences.is_empty() {
                log::warn!("skipping empty file {}", path.display());
                manifest.skipped.push(rel);
                continue;
            }
            let id = path
                .file_stem()
                .unwrap_or_default()
                .to_string_lossy()
                .into_owned();
            let starts = resolve_paragraphs(
                &id,
                &raw,
                sidecar.get(&id).map(Vec::as_slice),
                sentences.len(),
            )?;
            documents.push(ReviewDocument::new(id, label, sentences, starts)?);
            match label {
                Polarity::Positive => manifest.positive_count += 1,
                Polarity::Negative => manifest.negative_count += 1,
            }
        }
    }
    if documents.is_empty() {
        return Err(Error::Ingestion(format!(
            "no documents found under {}",
            root.display()
        )));
    }
    assign_folds(&mut documents, opts.folds)?;
    Ok(PolarityCorpus {
        documents,
        manifest,
    })
}

/// Loads the subjectivity corpus: `quote_file` lines are subjective,
/// `plot_file` lines objective. Blank lines are skipped.
pub fn load_subjectivity_dataset(
    quote_file: impl AsRef<Path>,
    plot_file: impl AsRef<Path>,
) -> Result<SubjectivityCorpus> {
    let mut manifest = CorpusManifest::default();
    let mut sentences = Vec::new();
    for (path, label) in [
        (quote_file.as_ref(), Subjectivity::Subjective),
        (plot_file.as_ref(), Subjectivity::Objective),
    ] {
        let (raw, digest) = read_lossy(path)?;
        let name = path
            .file_name()
            .unwrap_or_default()
            .to_string_lossy()
            .into_owned();
        manifest.checksums.insert(name, digest);
        let before = sentences.len();
        sentences.extend(
            split_sentences(&raw)
                .into_iter()
                .map(|text| LabeledSentence { text, label }),
        );
        let added = sentences.len() - before;
        match label {
            Subjectivity::Subjective => manifest.subjective_count += added,
            Subjectivity::Objective => manifest.objective_count += added,
        }
    }
    Ok(SubjectivityCorpus {
        sentences,
        manifest,
    })
}

/// Assigns round-robin folds to subjectivity sentences, stratified by label.
pub fn subjectivity_folds(sentences: &[LabeledSentence], k: usize) -> Result<Vec<usize>> {
    if k < 2 {
        return Err(Error::Config(format!(
            "number of folds must be at least 2, got {k}"
        )));
    }
    let mut seen = [0usize; 2];
    Ok(sentences
        .iter()
        .map(|s| {
            let slot = &mut seen[s.label.is_subjective() as usize];
            let fold = *slot % k;
            *slot += 1;
            fold
        })
        .collect())
}
