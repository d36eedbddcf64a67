//! Cross-validated polarity experiments over extracts.
//!
//! Subjectivity detectors are trained once, on the sentence corpus, and every
//! review's sentences are scored up front. An experiment then picks an
//! extractor, reduces every review to its extract and runs k-fold
//! cross-validation of a polarity classifier on the extracts. Vocabulary and
//! classifier parameters of each fold see only that fold's training extracts.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use statrs::distribution::{ContinuousCDF, StudentsT};

use crate::classifiers::{LinearMarginModel, NaiveBayesModel, SvmParams};
use crate::corpus::{subjectivity_folds, LabeledSentence, ReviewDocument};
use crate::error::{Error, Result};
use crate::extraction::{
    complement, detect_basic, detect_graph, expand_paragraph_labels, first_n, last_n, least_n,
    paragraph_scores, preservation_rate, top_n, BaseClassifier, ClassifierParams, Decay,
    DetectionMode, DetectorConfig, Extract, ProximityParams, SubjectivityDetector,
};
use crate::features::{tokenize, Vocabulary};
use crate::mincut::IndividualScores;

/// Which sentences of each review the polarity classifier gets to see.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum Extractor {
    FullReview,
    FirstN {
        n: usize,
    },
    LastN {
        n: usize,
    },
    /// The `n` sentences the NB detector finds most subjective.
    TopN {
        n: usize,
    },
    /// The `n` sentences the NB detector finds least subjective.
    LeastN {
        n: usize,
    },
    Detector(DetectorConfig),
    /// The sentences the detector labels objective.
    Flipped(DetectorConfig),
}

impl Extractor {
    pub const NAMES: [&'static str; 7] = [
        "full_review",
        "first_n",
        "last_n",
        "top_n",
        "least_n",
        "detector",
        "flipped",
    ];

    pub fn label(&self) -> String {
        match self {
            Extractor::FullReview => "full_review".into(),
            Extractor::FirstN { n } => format!("first_n:{n}"),
            Extractor::LastN { n } => format!("last_n:{n}"),
            Extractor::TopN { n } => format!("top_n:{n}"),
            Extractor::LeastN { n } => format!("least_n:{n}"),
            Extractor::Detector(d) => d.label(),
            Extractor::Flipped(d) => format!("flipped:{}", d.label()),
        }
    }

    fn validate(&self) -> Result<()> {
        match self {
            Extractor::FirstN { n }
            | Extractor::LastN { n }
            | Extractor::TopN { n }
            | Extractor::LeastN { n }
                if *n == 0 =>
            {
                Err(Error::Config("N-sentence extractors need N >= 1".into()))
            }
            Extractor::Detector(d) | Extractor::Flipped(d) => match &d.mode {
                DetectionMode::Graph(p) => p.validate(),
                _ => Ok(()),
            },
            _ => Ok(()),
        }
    }
}

fn default_folds() -> usize {
    crate::corpus::DEFAULT_FOLDS
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub extractor: Extractor,
    /// Document-level polarity classifier.
    pub classifier: BaseClassifier,
    #[serde(default = "default_folds")]
    pub folds: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub params: ClassifierParams,
}

impl ExperimentConfig {
    pub fn new(extractor: Extractor, classifier: BaseClassifier) -> Self {
        Self {
            name: None,
            extractor,
            classifier,
            folds: default_folds(),
            seed: 0,
            params: ClassifierParams::default(),
        }
    }

    pub fn with_extractor(&self, extractor: Extractor) -> Self {
        Self {
            extractor,
            ..self.clone()
        }
    }

    /// First 16 hex digits of the SHA-256 of the canonical JSON form.
    pub fn digest(&self) -> String {
        let json = serde_json::to_string(self).expect("config serializes");
        hex::encode(&Sha256::digest(json.as_bytes())[..8])
    }

    pub fn label(&self) -> String {
        self.name
            .clone()
            .unwrap_or_else(|| format!("{}+{}", self.extractor.label(), self.classifier))
    }
}

/// Rows are the true label, columns the prediction; index 1 is positive.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Confusion {
    pub true_positive: usize,
    pub false_negative: usize,
    pub false_positive: usize,
    pub true_negative: usize,
}

impl Confusion {
    fn record(&mut self, truth: bool, predicted: bool) {
        match (truth, predicted) {
            (true, true) => self.true_positive += 1,
            (true, false) => self.false_negative += 1,
            (false, true) => self.false_positive += 1,
            (false, false) => self.true_negative += 1,
        }
    }

    pub fn total(&self) -> usize {
        self.true_positive + self.false_negative + self.false_positive + self.true_negative
    }

    pub fn correct(&self) -> usize {
        self.true_positive + self.true_negative
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FoldResult {
    pub fold: usize,
    pub accuracy: f64,
    pub correct: usize,
    pub n_test: usize,
    /// Mean word preservation over this fold's test extracts.
    pub preservation: f64,
    pub confusion: Confusion,
    pub vocabulary_size: usize,
    /// SHA-256 prefix over everything the fold's classifier was trained on.
    pub training_digest: String,
}

/// Two-tailed paired t-test outcome.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TTest {
    pub t_statistic: f64,
    pub p_value: f64,
    pub df: usize,
    pub mean_difference: f64,
    /// Set when the differences are all equal but nonzero: `t` is infinite
    /// and `p` is reported as 0.
    pub degenerate: bool,
}

/// Paired two-tailed t-test on `a[i] - b[i]` with `n - 1` degrees of freedom.
/// All-zero differences give `t = 0, p = 1`.
pub fn paired_t_test(a: &[f64], b: &[f64]) -> Result<TTest> {
    if a.len() != b.len() {
        return Err(Error::Config(format!(
            "paired t-test needs equal lengths, got {} and {}",
            a.len(),
            b.len()
        )));
    }
    let n = a.len();
    if n < 2 {
        return Err(Error::Config(
            "paired t-test needs at least two pairs".into(),
        ));
    }
    let diffs: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
    let df = n - 1;
    let mean = diffs.iter().sum::<f64>() / n as f64;
    if diffs.iter().all(|&d| d == 0.0) {
        return Ok(TTest {
            t_statistic: 0.0,
            p_value: 1.0,
            df,
            mean_difference: 0.0,
            degenerate: false,
        });
    }
    let var = diffs.iter().map(|d| (d - mean).powi(2)).sum::<f64>() / df as f64;
    let se = (var / n as f64).sqrt();
    if se == 0.0 || se < mean.abs() * 1e-12 {
        return Ok(TTest {
            t_statistic: f64::INFINITY.copysign(mean),
            p_value: 0.0,
            df,
            mean_difference: mean,
            degenerate: true,
        });
    }
    let t = mean / se;
    let dist = StudentsT::new(0.0, 1.0, df as f64).expect("df >= 1");
    let p = (2.0 * dist.sf(t.abs())).min(1.0);
    Ok(TTest {
        t_statistic: t,
        p_value: p,
        df,
        mean_difference: mean,
        degenerate: false,
    })
}

/// A significance comparison against another experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Comparison {
    pub other_digest: String,
    pub other_label: String,
    pub other_mean_accuracy: f64,
    pub mean_difference: f64,
    /// `None` when the statistic is infinite (zero-variance differences).
    pub t_statistic: Option<f64>,
    pub p_value: f64,
    pub df: usize,
    pub degenerate: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub label: String,
    pub config_digest: String,
    pub config: ExperimentConfig,
    pub folds: Vec<FoldResult>,
    pub mean_accuracy: f64,
    pub mean_preservation: f64,
    /// True when the configuration was picked by scoring on the test folds.
    pub oracle_selected: bool,
    pub comparisons: Vec<Comparison>,
}

impl ExperimentReport {
    pub fn fold_accuracies(&self) -> Vec<f64> {
        self.folds.iter().map(|f| f.accuracy).collect()
    }

    /// Runs a paired t-test of this experiment against `other` and records it,
    /// replacing an earlier comparison with the same experiment.
    pub fn compare(&mut self, other: &ExperimentReport) -> Result<Comparison> {
        let t = paired_t_test(&self.fold_accuracies(), &other.fold_accuracies())?;
        let cmp = Comparison {
            other_digest: other.config_digest.clone(),
            other_label: other.label.clone(),
            other_mean_accuracy: other.mean_accuracy,
            mean_difference: t.mean_difference,
            t_statistic: t.t_statistic.is_finite().then_some(t.t_statistic),
            p_value: t.p_value,
            df: t.df,
            degenerate: t.degenerate,
        };
        self.comparisons
            .retain(|c| c.other_digest != cmp.other_digest);
        self.comparisons.push(cmp.clone());
        Ok(cmp)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)? + "\n")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    /// Aligned-column human-readable form.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "experiment  {}", self.label);
        let _ = writeln!(out, "digest      {}", self.config_digest);
        if self.oracle_selected {
            let _ = writeln!(
                out,
                "note        setting selected on test folds (oracle selection)"
            );
        }
        let _ = writeln!(
            out,
            "{:>4}  {:>8}  {:>7}  {:>6}  {:>12}",
            "fold", "accuracy", "correct", "n_test", "preservation"
        );
        for f in &self.folds {
            let _ = writeln!(
                out,
                "{:>4}  {:>8.4}  {:>7}  {:>6}  {:>12.4}",
                f.fold, f.accuracy, f.correct, f.n_test, f.preservation
            );
        }
        let _ = writeln!(
            out,
            "{:>4}  {:>8.4}  {:>7}  {:>6}  {:>12.4}",
            "mean", self.mean_accuracy, "", "", self.mean_preservation
        );
        for c in &self.comparisons {
            let t = c
                .t_statistic
                .map_or_else(|| "inf".to_string(), |t| format!("{t:.4}"));
            let _ = writeln!(
                out,
                "vs {}  ({:.4})  diff {:+.4}  t {}  p {:.4}{}",
                c.other_label,
                c.other_mean_accuracy,
                c.mean_difference,
                t,
                c.p_value,
                if c.degenerate { "  [degenerate]" } else { "" }
            );
        }
        out
    }
}

struct DetectorBundle {
    detector: SubjectivityDetector,
    sentence_scores: Vec<IndividualScores>,
    paragraph_scores: Vec<IndividualScores>,
}

/// Reviews, their tokens and cached detector scores.
pub struct ExperimentContext {
    documents: Vec<ReviewDocument>,
    tokens: Vec<Vec<Vec<String>>>,
    detectors: BTreeMap<BaseClassifier, DetectorBundle>,
    folds: usize,
}

impl ExperimentContext {
    /// Documents must already carry their folds.
    pub fn new(documents: Vec<ReviewDocument>) -> Result<Self> {
        if documents.is_empty() {
            return Err(Error::Config(
                "experiment needs at least one document".into(),
            ));
        }
        let folds = documents.iter().map(|d| d.fold).max().unwrap_or(0) + 1;
        let tokens = documents
            .par_iter()
            .map(|d| d.sentences.iter().map(|s| tokenize(s)).collect())
            .collect();
        Ok(Self {
            documents,
            tokens,
            detectors: BTreeMap::new(),
            folds,
        })
    }

    pub fn documents(&self) -> &[ReviewDocument] {
        &self.documents
    }

    pub fn folds(&self) -> usize {
        self.folds
    }

    pub fn detector(&self, base: BaseClassifier) -> Option<&SubjectivityDetector> {
        self.detectors.get(&base).map(|b| &b.detector)
    }

    /// Scores every sentence and paragraph with `detector` and keeps the scores.
    pub fn add_detector(&mut self, detector: SubjectivityDetector) -> Result<()> {
        let sentence_scores = self
            .tokens
            .par_iter()
            .map(|doc| {
                doc.iter()
                    .map(|t| detector.score_tokens(t))
                    .collect::<Result<IndividualScores>>()
            })
            .collect::<Result<Vec<_>>>()?;
        let paragraph_scores = self
            .documents
            .par_iter()
            .map(|d| paragraph_scores(&detector, d))
            .collect::<Result<Vec<_>>>()?;
        self.detectors.insert(
            detector.base(),
            DetectorBundle {
                detector,
                sentence_scores,
                paragraph_scores,
            },
        );
        Ok(())
    }

    pub fn train_detector(
        &mut self,
        sentences: &[LabeledSentence],
        base: BaseClassifier,
        params: &ClassifierParams,
    ) -> Result<()> {
        let detector = SubjectivityDetector::train(sentences, base, params)?;
        self.add_detector(detector)
    }

    fn bundle(&self, base: BaseClassifier) -> Result<&DetectorBundle> {
        self.detectors.get(&base).ok_or_else(|| {
            Error::Config(format!("no trained {base} subjectivity detector available"))
        })
    }

    /// Cached individual scores of one document's sentences.
    pub fn sentence_scores(&self, base: BaseClassifier, doc: usize) -> Result<&IndividualScores> {
        Ok(&self.bundle(base)?.sentence_scores[doc])
    }

    fn select(&self, config: &DetectorConfig, doc: usize) -> Result<Vec<usize>> {
        let bundle = self.bundle(config.base)?;
        match &config.mode {
            DetectionMode::Basic => Ok(detect_basic(&bundle.sentence_scores[doc])),
            DetectionMode::Graph(p) => detect_graph(
                &bundle.sentence_scores[doc],
                p,
                &self.documents[doc].paragraph_starts,
            ),
            DetectionMode::ParagraphUnit => Ok(expand_paragraph_labels(
                &bundle.paragraph_scores[doc],
                &self.documents[doc],
            )),
        }
    }

    fn nb_source_scores(&self, doc: usize) -> Result<Vec<f64>> {
        Ok(self.bundle(BaseClassifier::Nb)?.sentence_scores[doc]
            .iter()
            .map(|p| p.source)
            .collect())
    }

    /// One extract per document, in document order.
    pub fn extracts(&self, extractor: &Extractor) -> Result<Vec<Extract>> {
        extractor.validate()?;
        (0..self.documents.len())
            .into_par_iter()
            .map(|i| {
                let doc = &self.documents[i];
                let selected = match extractor {
                    Extractor::FullReview => return Ok(Extract::full(doc)),
                    Extractor::FirstN { n } => first_n(doc.len(), *n),
                    Extractor::LastN { n } => last_n(doc.len(), *n),
                    Extractor::TopN { n } => top_n(&self.nb_source_scores(i)?, *n),
                    Extractor::LeastN { n } => least_n(&self.nb_source_scores(i)?, *n),
                    Extractor::Detector(d) => self.select(d, i)?,
                    Extractor::Flipped(d) => complement(doc.len(), &self.select(d, i)?),
                };
                Extract::new(doc, selected)
            })
            .collect()
    }

    fn extract_tokens<'a>(&'a self, doc: usize, extract: &'a Extract) -> Vec<&'a str> {
        extract
            .selected
            .iter()
            .flat_map(|&s| self.tokens[doc][s].iter().map(String::as_str))
            .collect()
    }
}

enum PolarityModel {
    Nb(NaiveBayesModel),
    Svm(LinearMarginModel),
}

fn run_fold(
    ctx: &ExperimentContext,
    config: &ExperimentConfig,
    extracts: &[Extract],
    fold: usize,
) -> Result<FoldResult> {
    let (train, test): (Vec<usize>, Vec<usize>) =
        (0..ctx.documents.len()).partition(|&i| ctx.documents[i].fold != fold);
    if test.is_empty() {
        return Err(Error::Config(format!("fold {fold} has no test documents")));
    }

    let mut hasher = Sha256::new();
    let train_tokens: Vec<Vec<&str>> = train
        .iter()
        .map(|&i| {
            let toks = ctx.extract_tokens(i, &extracts[i]);
            hasher.update(ctx.documents[i].id.as_bytes());
            hasher.update([ctx.documents[i].label.is_positive() as u8]);
            for t in &toks {
                hasher.update(t.as_bytes());
                hasher.update([0]);
            }
            hasher.update([0xff]);
            toks
        })
        .collect();
    let training_digest = hex::encode(&hasher.finalize()[..8]);

    let vocab = Vocabulary::build(&train_tokens, config.params.min_doc_freq)?;
    let normalize = config.classifier == BaseClassifier::Svm;
    let vectors: Vec<_> = train_tokens
        .iter()
        .map(|t| vocab.featurize(t, normalize))
        .collect();
    let labels: Vec<bool> = train
        .iter()
        .map(|&i| ctx.documents[i].label.is_positive())
        .collect();
    let model = match config.classifier {
        BaseClassifier::Nb => PolarityModel::Nb(NaiveBayesModel::train(
            &vectors,
            &labels,
            vocab.len(),
            config.params.nb,
        )?),
        BaseClassifier::Svm => {
            let params = SvmParams {
                seed: config.seed.wrapping_add(fold as u64),
                ..config.params.svm
            };
            PolarityModel::Svm(LinearMarginModel::train(
                &vectors,
                &labels,
                vocab.len(),
                params,
            )?)
        }
    };

    let mut confusion = Confusion::default();
    let mut preserved = 0.0;
    for &i in &test {
        let x = vocab.featurize(&ctx.extract_tokens(i, &extracts[i]), normalize);
        let predicted = match &model {
            PolarityModel::Nb(m) => m.predict(&x),
            PolarityModel::Svm(m) => m.predict(&x),
        };
        confusion.record(ctx.documents[i].label.is_positive(), predicted);
        preserved += extracts[i].preservation();
    }
    Ok(FoldResult {
        fold,
        accuracy: confusion.correct() as f64 / test.len() as f64,
        correct: confusion.correct(),
        n_test: test.len(),
        preservation: preserved / test.len() as f64,
        confusion,
        vocabulary_size: vocab.len(),
        training_digest,
    })
}

fn check_folds(ctx: &ExperimentContext, config: &ExperimentConfig) -> Result<()> {
    if config.folds != ctx.folds {
        return Err(Error::Config(format!(
            "experiment asks for {} folds but the corpus was split into {}",
            config.folds, ctx.folds
        )));
    }
    Ok(())
}

/// Cross-validation on precomputed extracts.
pub fn run_with_extracts(
    ctx: &ExperimentContext,
    config: &ExperimentConfig,
    extracts: &[Extract],
) -> Result<ExperimentReport> {
    check_folds(ctx, config)?;
    if extracts.len() != ctx.documents.len() {
        return Err(Error::Config("one extract per document is required".into()));
    }
    let folds = (0..ctx.folds)
        .into_par_iter()
        .map(|f| run_fold(ctx, config, extracts, f))
        .collect::<Result<Vec<_>>>()?;
    let mean_accuracy = folds.iter().map(|f| f.accuracy).sum::<f64>() / folds.len() as f64;
    Ok(ExperimentReport {
        label: config.label(),
        config_digest: config.digest(),
        config: config.clone(),
        folds,
        mean_accuracy,
        mean_preservation: preservation_rate(extracts),
        oracle_selected: false,
        comparisons: Vec::new(),
    })
}

pub fn run_experiment(
    ctx: &ExperimentContext,
    config: &ExperimentConfig,
) -> Result<ExperimentReport> {
    check_folds(ctx, config)?;
    let extracts = ctx.extracts(&config.extractor)?;
    run_with_extracts(ctx, config, &extracts)
}

/// Proximity settings to try. The default is every combination of
/// `T in {1, 2, 3}`, the three decays and `c in {0, 0.1, ..., 1}` with `w = 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ProximityGrid {
    pub thresholds: Vec<usize>,
    pub decays: Vec<Decay>,
    pub strengths: Vec<f64>,
    pub cross_paragraph: Vec<f64>,
}

impl Default for ProximityGrid {
    fn default() -> Self {
        Self {
            thresholds: vec![1, 2, 3],
            decays: Decay::ALL.to_vec(),
            strengths: tenths(),
            cross_paragraph: vec![1.0],
        }
    }
}

/// `0.0, 0.1, ..., 1.0`.
pub fn tenths() -> Vec<f64> {
    (0..=10).map(|i| i as f64 / 10.0).collect()
}

impl ProximityGrid {
    pub fn settings(&self) -> Vec<ProximityParams> {
        let mut out = Vec::new();
        for &t in &self.thresholds {
            for &decay in &self.decays {
                for &c in &self.strengths {
                    for &w in &self.cross_paragraph {
                        out.push(ProximityParams::new(t, decay, c).with_cross_paragraph(w));
                    }
                }
            }
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridCell {
    pub params: ProximityParams,
    pub mean_accuracy: f64,
    pub mean_preservation: f64,
    pub fold_accuracies: Vec<f64>,
    pub fold_preservation: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridResult {
    pub base: BaseClassifier,
    pub classifier: BaseClassifier,
    pub cells: Vec<GridCell>,
    /// Best single setting over all folds; marked as oracle-selected.
    pub best: ExperimentReport,
}

const CSV_HEADER: &str = "method,N,classifier,fold,accuracy,preservation\n";

fn csv_rows(
    out: &mut String,
    method: &str,
    n: Option<usize>,
    classifier: BaseClassifier,
    accs: &[f64],
    pres: &[f64],
) {
    let n = n.map(|n| n.to_string()).unwrap_or_default();
    for (f, (a, p)) in accs.iter().zip(pres).enumerate() {
        let _ = writeln!(out, "{method},{n},{classifier},{f},{a},{p}");
    }
    let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
    let _ = writeln!(
        out,
        "{method},{n},{classifier},mean,{},{}",
        mean(accs),
        mean(pres)
    );
}

impl GridResult {
    pub fn to_csv(&self) -> String {
        let mut out = String::from(CSV_HEADER);
        for cell in &self.cells {
            let method = format!("{}-graph:{}", self.base, cell.params.label());
            csv_rows(
                &mut out,
                &method,
                None,
                self.classifier,
                &cell.fold_accuracies,
                &cell.fold_preservation,
            );
        }
        out
    }
}

/// Evaluates every grid setting as a graph detector on the base experiment's
/// detector and returns the best one by mean accuracy (first wins ties).
pub fn grid_search(
    ctx: &ExperimentContext,
    base: &ExperimentConfig,
    grid: &ProximityGrid,
) -> Result<GridResult> {
    let detector_base = match &base.extractor {
        Extractor::Detector(d) => d.base,
        other => {
            return Err(Error::Config(format!(
                "grid search needs a detector extractor, got {}",
                other.label()
            )))
        }
    };
    let settings = grid.settings();
    if settings.is_empty() {
        return Err(Error::Config("proximity grid is empty".into()));
    }
    let reports = settings
        .par_iter()
        .map(|p| {
            let config = base.with_extractor(Extractor::Detector(DetectorConfig::graph(
                detector_base,
                *p,
            )));
            run_experiment(
                ctx,
                &ExperimentConfig {
                    name: None,
                    ..config
                },
            )
        })
        .collect::<Result<Vec<_>>>()?;
    let cells = settings
        .iter()
        .zip(&reports)
        .map(|(p, r)| GridCell {
            params: *p,
            mean_accuracy: r.mean_accuracy,
            mean_preservation: r.mean_preservation,
            fold_accuracies: r.fold_accuracies(),
            fold_preservation: r.folds.iter().map(|f| f.preservation).collect(),
        })
        .collect();
    let mut best_idx = 0;
    for (i, r) in reports.iter().enumerate() {
        if r.mean_accuracy > reports[best_idx].mean_accuracy {
            best_idx = i;
        }
    }
    let mut best = reports.into_iter().nth(best_idx).expect("nonempty grid");
    best.oracle_selected = true;
    Ok(GridResult {
        base: detector_base,
        classifier: base.classifier,
        cells,
        best,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepMethod {
    TopN,
    FirstN,
    LastN,
    LeastN,
}

impl SweepMethod {
    pub const ALL: [SweepMethod; 4] = [
        SweepMethod::TopN,
        SweepMethod::FirstN,
        SweepMethod::LastN,
        SweepMethod::LeastN,
    ];

    pub fn extractor(self, n: usize) -> Extractor {
        match self {
            SweepMethod::TopN => Extractor::TopN { n },
            SweepMethod::FirstN => Extractor::FirstN { n },
            SweepMethod::LastN => Extractor::LastN { n },
            SweepMethod::LeastN => Extractor::LeastN { n },
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            SweepMethod::TopN => "top_n",
            SweepMethod::FirstN => "first_n",
            SweepMethod::LastN => "last_n",
            SweepMethod::LeastN => "least_n",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub method: SweepMethod,
    pub n: usize,
    pub classifier: BaseClassifier,
    pub mean_accuracy: f64,
    pub mean_preservation: f64,
    pub fold_accuracies: Vec<f64>,
    pub fold_preservation: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub rows: Vec<SweepRow>,
}

impl SweepResult {
    pub fn get(
        &self,
        method: SweepMethod,
        n: usize,
        classifier: BaseClassifier,
    ) -> Option<&SweepRow> {
        self.rows
            .iter()
            .find(|r| r.method == method && r.n == n && r.classifier == classifier)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from(CSV_HEADER);
        for r in &self.rows {
            csv_rows(
                &mut out,
                r.method.name(),
                Some(r.n),
                r.classifier,
                &r.fold_accuracies,
                &r.fold_preservation,
            );
        }
        out
    }
}

/// Accuracy of N-sentence extracts for every method, N and classifier.
pub fn n_sentence_sweep(
    ctx: &ExperimentContext,
    base: &ExperimentConfig,
    methods: &[SweepMethod],
    ns: &[usize],
    classifiers: &[BaseClassifier],
) -> Result<SweepResult> {
    let mut jobs = Vec::new();
    for &m in methods {
        for &n in ns {
            jobs.push((m, n));
        }
    }
    let per_job = jobs
        .par_iter()
        .map(|&(m, n)| {
            let extracts = ctx.extracts(&m.extractor(n))?;
            classifiers
                .iter()
                .map(|&c| {
                    let config = ExperimentConfig {
                        name: None,
                        classifier: c,
                        ..base.with_extractor(m.extractor(n))
                    };
                    let r = run_with_extracts(ctx, &config, &extracts)?;
                    Ok(SweepRow {
                        method: m,
                        n,
                        classifier: c,
                        mean_accuracy: r.mean_accuracy,
                        mean_preservation: r.mean_preservation,
                        fold_accuracies: r.fold_accuracies(),
                        fold_preservation: r.folds.iter().map(|f| f.preservation).collect(),
                    })
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SweepResult {
        rows: per_job.into_iter().flatten().collect(),
    })
}

/// Graph detector (best over a grid that includes `w`) against the
/// paragraph-unit detector on the same base classifier.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParagraphComparison {
    pub graph: ExperimentReport,
    pub paragraph_unit: ExperimentReport,
    pub grid: GridResult,
}

pub fn paragraph_comparison(
    ctx: &ExperimentContext,
    base: &ExperimentConfig,
    detector_base: BaseClassifier,
    grid: &ProximityGrid,
) -> Result<ParagraphComparison> {
    let paragraph_cfg = base.with_extractor(Extractor::Detector(DetectorConfig::paragraph_unit(
        detector_base,
    )));
    let paragraph_unit = run_experiment(ctx, &paragraph_cfg)?;
    let grid_base = base.with_extractor(Extractor::Detector(DetectorConfig::basic(detector_base)));
    let grid = grid_search(ctx, &grid_base, grid)?;
    let mut graph = grid.best.clone();
    graph.compare(&paragraph_unit)?;
    Ok(ParagraphComparison {
        graph,
        paragraph_unit,
        grid,
    })
}

/// Sentence-level cross-validation of a subjectivity detector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DetectorCvReport {
    pub base: BaseClassifier,
    pub fold_accuracies: Vec<f64>,
    pub mean_accuracy: f64,
}

/// k-fold accuracy of `base` on labeled sentences, with label-stratified
/// round-robin folds. Each fold's vocabulary comes from its training part.
pub fn detector_cross_validation(
    sentences: &[LabeledSentence],
    base: BaseClassifier,
    k: usize,
    params: &ClassifierParams,
) -> Result<DetectorCvReport> {
    let folds = subjectivity_folds(sentences, k)?;
    let tokens: Vec<Vec<String>> = sentences.iter().map(|s| tokenize(&s.text)).collect();
    let fold_accuracies = (0..k)
        .into_par_iter()
        .map(|f| {
            let (train, test): (Vec<usize>, Vec<usize>) =
                (0..sentences.len()).partition(|&i| folds[i] != f);
            if test.is_empty() {
                return Err(Error::Validation(format!("subjectivity fold {f} is empty")));
            }
            let train_tokens: Vec<Vec<String>> = train.iter().map(|&i| tokens[i].clone()).collect();
            let labels: Vec<bool> = train
                .iter()
                .map(|&i| sentences[i].label.is_subjective())
                .collect();
            let detector =
                SubjectivityDetector::train_tokens(&train_tokens, &labels, base, params)?;
            let mut correct = 0usize;
            for &i in &test {
                let s = detector.score_tokens(&tokens[i])?;
                if (s.source > s.sink) == sentences[i].label.is_subjective() {
                    correct += 1;
                }
            }
            Ok(correct as f64 / test.len() as f64)
        })
        .collect::<Result<Vec<_>>>()?;
    let mean_accuracy = fold_accuracies.iter().sum::<f64>() / k as f64;
    Ok(DetectorCvReport {
        base,
        fold_accuracies,
        mean_accuracy,
    })
}
