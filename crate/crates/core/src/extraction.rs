//! Sentence selection: subjectivity detectors and N-sentence baselines.

use serde::{Deserialize, Serialize};

use crate::classifiers::{
    probability_to_individual, svm_to_individual, LinearMarginModel, ModelFile, ModelParams,
    NaiveBayesModel, NbParams, SvmParams,
};
use crate::corpus::{paragraph_ids, LabeledSentence, ReviewDocument};
use crate::error::{Error, Result};
use crate::features::{tokenize, Vocabulary};
use crate::mincut::{AssociationScores, FlowNetwork, IndividualScores, ScorePair, DEFAULT_SCALE};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BaseClassifier {
    Nb,
    Svm,
}

impl BaseClassifier {
    pub fn name(self) -> &'static str {
        match self {
            BaseClassifier::Nb => "nb",
            BaseClassifier::Svm => "svm",
        }
    }
}

impl std::fmt::Display for BaseClassifier {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Hyperparameters shared by detector and polarity classifier training.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ClassifierParams {
    pub nb: NbParams,
    pub svm: SvmParams,
    pub min_doc_freq: usize,
}

impl Default for ClassifierParams {
    fn default() -> Self {
        Self {
            nb: NbParams::default(),
            svm: SvmParams::default(),
            min_doc_freq: 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum DetectorModel {
    NaiveBayes(NaiveBayesModel),
    LinearMargin(LinearMarginModel),
}

/// A sentence-level subjectivity classifier together with its vocabulary.
#[derive(Debug, Clone, PartialEq)]
pub struct SubjectivityDetector {
    vocab: Vocabulary,
    model: DetectorModel,
}

impl SubjectivityDetector {
    pub fn train(
        sentences: &[LabeledSentence],
        base: BaseClassifier,
        params: &ClassifierParams,
    ) -> Result<Self> {
        let tokens: Vec<Vec<String>> = sentences.iter().map(|s| tokenize(&s.text)).collect();
        let labels: Vec<bool> = sentences.iter().map(|s| s.label.is_subjective()).collect();
        Self::train_tokens(&tokens, &labels, base, params)
    }

    pub fn train_tokens(
        tokens: &[Vec<String>],
        labels: &[bool],
        base: BaseClassifier,
        params: &ClassifierParams,
    ) -> Result<Self> {
        let vocab = Vocabulary::build(tokens, params.min_doc_freq)?;
        let normalize = base == BaseClassifier::Svm;
        let vectors: Vec<_> = tokens
            .iter()
            .map(|t| vocab.featurize(t, normalize))
            .collect();
        let model = match base {
            BaseClassifier::Nb => DetectorModel::NaiveBayes(NaiveBayesModel::train(
                &vectors,
                labels,
                vocab.len(),
                params.nb,
            )?),
            BaseClassifier::Svm => {
                let m = LinearMarginModel::train(&vectors, labels, vocab.len(), params.svm)?;
                if m.weight_norm() == 0.0 {
                    return Err(Error::DegenerateModel(
                        "trained weight vector is zero".into(),
                    ));
                }
                DetectorModel::LinearMargin(m)
            }
        };
        Ok(Self { vocab, model })
    }

    pub fn base(&self) -> BaseClassifier {
        match self.model {
            DetectorModel::NaiveBayes(_) => BaseClassifier::Nb,
            DetectorModel::LinearMargin(_) => BaseClassifier::Svm,
        }
    }

    pub fn vocabulary(&self) -> &Vocabulary {
        &self.vocab
    }

    pub fn model(&self) -> &DetectorModel {
        &self.model
    }

    /// Individual scores of one text unit: `(P_sub, 1 - P_sub)` for NB, the
    /// clamped hyperplane distance for the linear-margin model.
    pub fn score_tokens<S: AsRef<str>>(&self, tokens: &[S]) -> Result<ScorePair> {
        match &self.model {
            DetectorModel::NaiveBayes(m) => Ok(probability_to_individual(
                m.predict_prob(&self.vocab.featurize(tokens, false)),
            )),
            DetectorModel::LinearMargin(m) => Ok(svm_to_individual(
                m.decision(&self.vocab.featurize(tokens, true))?,
            )),
        }
    }

    pub fn score_text(&self, text: &str) -> Result<ScorePair> {
        self.score_tokens(&tokenize(text))
    }

    pub fn individual_scores<S: AsRef<str>>(&self, sentences: &[S]) -> Result<IndividualScores> {
        sentences
            .iter()
            .map(|s| self.score_text(s.as_ref()))
            .collect()
    }

    /// Hard label of one text unit (subjective = `true`).
    pub fn classify_text(&self, text: &str) -> Result<bool> {
        let p = self.score_text(text)?;
        Ok(p.source > p.sink)
    }

    pub fn to_model_file(&self) -> ModelFile {
        let params = match &self.model {
            DetectorModel::NaiveBayes(m) => ModelParams::NaiveBayes(m.clone()),
            DetectorModel::LinearMargin(m) => ModelParams::LinearMargin(m.clone()),
        };
        ModelFile::new(params, &self.vocab)
    }

    pub fn from_model_file(file: &ModelFile, vocab: Vocabulary) -> Result<Self> {
        let model = match file.check_vocabulary(&vocab)? {
            ModelParams::NaiveBayes(m) => DetectorModel::NaiveBayes(m.clone()),
            ModelParams::LinearMargin(m) => DetectorModel::LinearMargin(m.clone()),
        };
        Ok(Self { vocab, model })
    }
}

/// How proximity influence decays with sentence distance `d >= 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Decay {
    /// `f(d) = 1`
    Constant,
    /// `f(d) = e^(1 - d)`
    Exponential,
    /// `f(d) = 1 / d^2`
    InverseSquare,
}

impl Decay {
    pub const ALL: [Decay; 3] = [Decay::Constant, Decay::Exponential, Decay::InverseSquare];

    pub fn apply(self, d: usize) -> f64 {
        let d = d as f64;
        match self {
            Decay::Constant => 1.0,
            Decay::Exponential => (1.0 - d).exp(),
            Decay::InverseSquare => 1.0 / (d * d),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Decay::Constant => "constant",
            Decay::Exponential => "exponential",
            Decay::InverseSquare => "inverse_square",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProximityParams {
    /// Largest sentence distance that still gets an association edge.
    pub threshold: usize,
    pub decay: Decay,
    /// Association strength `c`.
    pub strength: f64,
    /// Multiplier `w` for pairs in different paragraphs; 1 disables it.
    #[serde(default = "one")]
    pub cross_paragraph: f64,
}

fn one() -> f64 {
    1.0
}

impl ProximityParams {
    pub fn new(threshold: usize, decay: Decay, strength: f64) -> Self {
        Self {
            threshold,
            decay,
            strength,
            cross_paragraph: 1.0,
        }
    }

    pub fn with_cross_paragraph(mut self, w: f64) -> Self {
        self.cross_paragraph = w;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.threshold == 0 {
            return Err(Error::Config(
                "proximity threshold must be at least 1".into(),
            ));
        }
        if !(self.strength.is_finite() && self.strength >= 0.0) {
            return Err(Error::Config(format!(
                "association strength must be >= 0, got {}",
                self.strength
            )));
        }
        if !(0.0..=1.0).contains(&self.cross_paragraph) {
            return Err(Error::Config(format!(
                "cross-paragraph weight must lie in [0, 1], got {}",
                self.cross_paragraph
            )));
        }
        Ok(())
    }

    /// Short label such as `T=2:f=exponential:c=0.3:w=1`.
    pub fn label(&self) -> String {
        format!(
            "T={}:f={}:c={}:w={}",
            self.threshold,
            self.decay.name(),
            self.strength,
            self.cross_paragraph
        )
    }
}

/// Proximity associations: `f(j - i) * c` for `j - i <= T`, times `w` when
/// the two sentences lie in different paragraphs.
pub fn assoc_scores(
    num_sentences: usize,
    params: &ProximityParams,
    paragraph_starts: &[usize],
) -> Result<AssociationScores> {
    params.validate()?;
    let para = if paragraph_starts.is_empty() {
        vec![0; num_sentences]
    } else {
        paragraph_ids(paragraph_starts, num_sentences)
    };
    let mut assoc = AssociationScores::new();
    for i in 0..num_sentences {
        for j in i + 1..num_sentences.min(i + params.threshold + 1) {
            let mut w = params.decay.apply(j - i) * params.strength;
            if para[i] != para[j] {
                w *= params.cross_paragraph;
            }
            assoc.insert(i, j, w)?;
        }
    }
    Ok(assoc)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DetectionMode {
    /// Each sentence classified in isolation.
    Basic,
    /// Minimum cut over individual and proximity scores.
    Graph(ProximityParams),
    /// Each paragraph classified as one unit; its sentences share the label.
    ParagraphUnit,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DetectorConfig {
    pub base: BaseClassifier,
    pub mode: DetectionMode,
}

impl DetectorConfig {
    pub fn basic(base: BaseClassifier) -> Self {
        Self {
            base,
            mode: DetectionMode::Basic,
        }
    }

    pub fn graph(base: BaseClassifier, params: ProximityParams) -> Self {
        Self {
            base,
            mode: DetectionMode::Graph(params),
        }
    }

    pub fn paragraph_unit(base: BaseClassifier) -> Self {
        Self {
            base,
            mode: DetectionMode::ParagraphUnit,
        }
    }

    pub fn label(&self) -> String {
        match &self.mode {
            DetectionMode::Basic => format!("{}-basic", self.base),
            DetectionMode::Graph(p) => format!("{}-graph:{}", self.base, p.label()),
            DetectionMode::ParagraphUnit => format!("{}-paragraph", self.base),
        }
    }
}

/// Sentences whose individual preference for the subjective class strictly
/// exceeds the objective one. Ties are objective.
pub fn detect_basic(scores: &IndividualScores) -> Vec<usize> {
    scores
        .iter()
        .enumerate()
        .filter(|(_, p)| p.source > p.sink)
        .map(|(i, _)| i)
        .collect()
}

/// Source side of the minimum cut over arbitrary individual and association scores.
pub fn select_by_cut(scores: &IndividualScores, assoc: &AssociationScores) -> Result<Vec<usize>> {
    let net = FlowNetwork::build(scores, assoc, DEFAULT_SCALE)?;
    Ok(net.min_cut().source_side)
}

/// Minimum-cut selection with proximity associations.
pub fn detect_graph(
    scores: &IndividualScores,
    params: &ProximityParams,
    paragraph_starts: &[usize],
) -> Result<Vec<usize>> {
    select_by_cut(
        scores,
        &assoc_scores(scores.len(), params, paragraph_starts)?,
    )
}

/// Expands per-paragraph decisions to sentence indices.
pub fn expand_paragraph_labels(
    paragraph_scores: &IndividualScores,
    doc: &ReviewDocument,
) -> Vec<usize> {
    doc.paragraph_ranges()
        .into_iter()
        .zip(paragraph_scores.iter())
        .filter(|(_, p)| p.source > p.sink)
        .flat_map(|(range, _)| range)
        .collect()
}

/// Scores every paragraph of `doc` as a single text unit.
pub fn paragraph_scores(
    detector: &SubjectivityDetector,
    doc: &ReviewDocument,
) -> Result<IndividualScores> {
    doc.paragraph_ranges()
        .into_iter()
        .map(|range| {
            let tokens: Vec<String> = doc.sentences[range]
                .iter()
                .flat_map(|s| tokenize(s))
                .collect();
            detector.score_tokens(&tokens)
        })
        .collect()
}

pub fn detect_paragraph_unit(
    detector: &SubjectivityDetector,
    doc: &ReviewDocument,
) -> Result<Vec<usize>> {
    Ok(expand_paragraph_labels(
        &paragraph_scores(detector, doc)?,
        doc,
    ))
}

/// Runs the configured detector on one document.
pub fn detect(
    detector: &SubjectivityDetector,
    config: &DetectorConfig,
    doc: &ReviewDocument,
) -> Result<Vec<usize>> {
    if detector.base() != config.base {
        return Err(Error::Config(format!(
            "detector config wants {} but the trained detector is {}",
            config.base,
            detector.base()
        )));
    }
    match &config.mode {
        DetectionMode::Basic => Ok(detect_basic(&detector.individual_scores(&doc.sentences)?)),
        DetectionMode::Graph(p) => detect_graph(
            &detector.individual_scores(&doc.sentences)?,
            p,
            &doc.paragraph_starts,
        ),
        DetectionMode::ParagraphUnit => detect_paragraph_unit(detector, doc),
    }
}

/// Indices of the `n` highest scores, earlier position winning ties, returned
/// in document order. Everything is returned when there are at most `n`.
pub fn top_n(scores: &[f64], n: usize) -> Vec<usize> {
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]).then(a.cmp(&b)));
    order.truncate(n);
    order.sort_unstable();
    order
}

/// `top_n` under score negation.
pub fn least_n(scores: &[f64], n: usize) -> Vec<usize> {
    let negated: Vec<f64> = scores.iter().map(|s| -s).collect();
    top_n(&negated, n)
}

pub fn first_n(num_sentences: usize, n: usize) -> Vec<usize> {
    (0..num_sentences.min(n)).collect()
}

pub fn last_n(num_sentences: usize, n: usize) -> Vec<usize> {
    (num_sentences.saturating_sub(n)..num_sentences).collect()
}

/// Sentence indices not in `selected`.
pub fn complement(num_sentences: usize, selected: &[usize]) -> Vec<usize> {
    let mut keep = vec![true; num_sentences];
    for &i in selected {
        keep[i] = false;
    }
    (0..num_sentences).filter(|&i| keep[i]).collect()
}

/// A document reduced to a subset of its sentences.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Extract {
    pub doc_id: String,
    pub selected: Vec<usize>,
    pub words_kept: usize,
    pub words_total: usize,
}

impl Extract {
    pub fn new(doc: &ReviewDocument, mut selected: Vec<usize>) -> Result<Self> {
        selected.sort_unstable();
        selected.dedup();
        if let Some(&bad) = selected.iter().find(|&&i| i >= doc.len()) {
            return Err(Error::Validation(format!(
                "extract of {} selects sentence {bad} of {}",
                doc.id,
                doc.len()
            )));
        }
        let words_kept = selected
            .iter()
            .map(|&i| doc.sentences[i].split_whitespace().count())
            .sum();
        Ok(Self {
            doc_id: doc.id.clone(),
            selected,
            words_kept,
            words_total: doc.word_count,
        })
    }

    pub fn full(doc: &ReviewDocument) -> Self {
        Self {
            doc_id: doc.id.clone(),
            selected: (0..doc.len()).collect(),
            words_kept: doc.word_count,
            words_total: doc.word_count,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.selected.is_empty()
    }

    pub fn preservation(&self) -> f64 {
        if self.words_total == 0 {
            0.0
        } else {
            self.words_kept as f64 / self.words_total as f64
        }
    }

    /// Selected sentences of `doc`, in order.
    pub fn sentences<'a>(&'a self, doc: &'a ReviewDocument) -> impl Iterator<Item = &'a str> + 'a {
        self.selected
            .iter()
            .map(move |&i| doc.sentences[i].as_str())
    }

    /// Selected sentences joined one per line.
    pub fn text(&self, doc: &ReviewDocument) -> String {
        let mut out = String::new();
        for s in self.sentences(doc) {
            out.push_str(s);
            out.push('\n');
        }
        out
    }

    /// The sentences this extract dropped.
    pub fn objective(&self, doc: &ReviewDocument) -> Self {
        Self::new(doc, complement(doc.len(), &self.selected))
            .expect("complement indices are in range")
    }

    pub fn to_json_line(&self) -> String {
        serde_json::to_string(self).expect("extract serializes")
    }
}

pub fn extract_top_n(
    detector: &SubjectivityDetector,
    doc: &ReviewDocument,
    n: usize,
) -> Result<Extract> {
    let scores: Vec<f64> = detector
        .individual_scores(&doc.sentences)?
        .iter()
        .map(|p| p.source)
        .collect();
    Extract::new(doc, top_n(&scores, n))
}

pub fn extract_least_n(
    detector: &SubjectivityDetector,
    doc: &ReviewDocument,
    n: usize,
) -> Result<Extract> {
    let scores: Vec<f64> = detector
        .individual_scores(&doc.sentences)?
        .iter()
        .map(|p| p.source)
        .collect();
    Extract::new(doc, least_n(&scores, n))
}

pub fn extract_first_n(doc: &ReviewDocument, n: usize) -> Extract {
    Extract::new(doc, first_n(doc.len(), n)).expect("prefix is in range")
}

pub fn extract_last_n(doc: &ReviewDocument, n: usize) -> Extract {
    Extract::new(doc, last_n(doc.len(), n)).expect("suffix is in range")
}

pub fn extract_objective(
    detector: &SubjectivityDetector,
    config: &DetectorConfig,
    doc: &ReviewDocument,
) -> Result<Extract> {
    Ok(Extract::new(doc, detect(detector, config, doc)?)?.objective(doc))
}

/// Mean of `words_kept / words_total` over extracts; 0 for no extracts.
pub fn preservation_rate(extracts: &[Extract]) -> f64 {
    if extracts.is_empty() {
        return 0.0;
    }
    extracts.iter().map(Extract::preservation).sum::<f64>() / extracts.len() as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{Polarity, Subjectivity};
    use crate::mincut::brute_force_min;
    use proptest::prelude::*;

    fn doc(n: usize, starts: Vec<usize>) -> ReviewDocument {
        ReviewDocument::new(
            "d",
            Polarity::Positive,
            (0..n).map(|i| format!("word{i} filler")).collect(),
            starts,
        )
        .unwrap()
    }

    fn toy_detector(base: BaseClassifier) -> SubjectivityDetector {
        let data = [
            ("brilliant moving film", Subjectivity::Subjective),
            ("awful boring mess", Subjectivity::Subjective),
            ("a stunning triumph", Subjectivity::Subjective),
            ("he moves to paris", Subjectivity::Objective),
            ("the police find a body", Subjectivity::Objective),
            ("she returns to paris", Subjectivity::Objective),
        ];
        let sentences: Vec<LabeledSentence> = data
            .iter()
            .map(|(t, l)| LabeledSentence {
                text: t.to_string(),
                label: *l,
            })
            .collect();
        SubjectivityDetector::train(&sentences, base, &ClassifierParams::default()).unwrap()
    }

    #[test]
    fn individual_score_conversions() {
        assert_eq!(
            probability_to_individual(0.8),
            ScorePair::new(0.8, 1.0 - 0.8)
        );
        assert_eq!(svm_to_individual(2.5), ScorePair::new(1.0, 0.0));
        let det = toy_detector(BaseClassifier::Nb);
        let scores = det
            .individual_scores(&["a stunning film", "a stunning film"])
            .unwrap();
        assert_eq!(scores[0], scores[1]);
        assert!(scores[0].source > 0.5);
        let det = toy_detector(BaseClassifier::Svm);
        let s = det.score_text("brilliant boring mess").unwrap();
        assert!(s.source > 0.5 && s.source <= 1.0);
        assert_eq!(s.source + s.sink, 1.0);
    }

    #[test]
    fn assoc_formula() {
        let p = ProximityParams::new(3, Decay::Constant, 0.5);
        let a = assoc_scores(6, &p, &[0]).unwrap();
        assert_eq!(a.get(1, 2), 0.5);
        assert_eq!(a.get(1, 4), 0.5);
        assert_eq!(a.get(1, 5), 0.0);
        let e = assoc_scores(3, &ProximityParams::new(3, Decay::Exponential, 1.0), &[0]).unwrap();
        assert!((e.get(0, 2) - 0.367879).abs() < 1e-6);
        assert_eq!(e.get(0, 1), 1.0);
        let q = assoc_scores(3, &ProximityParams::new(2, Decay::InverseSquare, 1.0), &[0]).unwrap();
        assert_eq!(q.get(0, 2), 0.25);
        let w = assoc_scores(
            4,
            &ProximityParams::new(2, Decay::Constant, 1.0).with_cross_paragraph(0.3),
            &[0, 2],
        )
        .unwrap();
        assert!((w.get(1, 2) - 0.3).abs() < 1e-15);
        assert_eq!(w.get(0, 1), 1.0);
        assert_eq!(w.get(2, 3), 1.0);
        assert!(assoc_scores(3, &ProximityParams::new(0, Decay::Constant, 1.0), &[0]).is_err());
        assert!(assoc_scores(
            3,
            &ProximityParams::new(1, Decay::Constant, 1.0).with_cross_paragraph(1.5),
            &[0]
        )
        .is_err());
    }

    #[test]
    fn basic_thresholding() {
        assert_eq!(
            detect_basic(&IndividualScores::from_probabilities(&[0.9, 0.3, 0.6])),
            vec![0, 2]
        );
        assert!(detect_basic(&IndividualScores::from_probabilities(&[0.1, 0.4, 0.49])).is_empty());
        assert!(detect_basic(&IndividualScores::from_probabilities(&[0.5])).is_empty());
    }

    #[test]
    fn graph_on_worked_example() {
        let scores = IndividualScores::from_probabilities(&[0.8, 0.5, 0.1]);
        let mut assoc = AssociationScores::new();
        assoc.insert(0, 1, 1.0).unwrap();
        assoc.insert(0, 2, 0.1).unwrap();
        assoc.insert(1, 2, 0.2).unwrap();
        assert_eq!(select_by_cut(&scores, &assoc).unwrap(), vec![0, 1]);
        assert_eq!(detect_basic(&scores), vec![0]);
        // The same optimum from proximity: a paragraph break before sentence 2
        // weakens its ties (assoc 1.0, 0.2, 0.2).
        let p = ProximityParams::new(2, Decay::Constant, 1.0).with_cross_paragraph(0.2);
        assert_eq!(detect_graph(&scores, &p, &[0, 2]).unwrap(), vec![0, 1]);
    }

    #[test]
    fn strong_coupling_gives_uniform_labels() {
        let probs = [0.9, 0.2, 0.7, 0.3, 0.6];
        let scores = IndividualScores::from_probabilities(&probs);
        let total: f64 = scores.iter().map(|p| p.source + p.sink).sum();
        let p = ProximityParams::new(5, Decay::Constant, total);
        let selected = detect_graph(&scores, &p, &[0]).unwrap();
        // Uniform labelings: all subjective costs sum(ind2) = 2.3, all objective sum(ind1) = 2.7.
        let all_subj: f64 = scores.iter().map(|p| p.sink).sum();
        let all_obj: f64 = scores.iter().map(|p| p.source).sum();
        assert!(all_subj < all_obj);
        assert_eq!(selected, vec![0, 1, 2, 3, 4]);
        let assoc = assoc_scores(5, &p, &[0]).unwrap();
        let oracle = brute_force_min(&scores, &assoc, DEFAULT_SCALE).unwrap();
        assert_eq!(oracle.source_side, selected);
    }

    #[test]
    fn n_sentence_selectors() {
        assert_eq!(top_n(&[0.2, 0.9, 0.9, 0.1], 2), vec![1, 2]);
        assert_eq!(top_n(&[0.2, 0.9, 0.3], 5), vec![0, 1, 2]);
        assert_eq!(top_n(&[0.2, 0.9, 0.3], 1), vec![1]);
        assert_eq!(first_n(10, 3), vec![0, 1, 2]);
        assert_eq!(last_n(10, 3), vec![7, 8, 9]);
        assert_eq!(last_n(2, 3), vec![0, 1]);
        let s = [0.2, 0.9, 0.9, 0.1, 0.5];
        let neg: Vec<f64> = s.iter().map(|x| -x).collect();
        assert_eq!(least_n(&s, 2), top_n(&neg, 2));
        assert_eq!(least_n(&s, 2), vec![0, 3]);
    }

    #[test]
    fn objective_extracts() {
        let d = doc(4, vec![0]);
        let e = Extract::new(&d, vec![0, 2]).unwrap();
        assert_eq!(e.objective(&d).selected, vec![1, 3]);
        let empty = Extract::new(&d, vec![]).unwrap();
        assert_eq!(empty.objective(&d), Extract::full(&d));
        assert!(Extract::new(&d, vec![4]).is_err());
    }

    #[test]
    fn preservation_rates() {
        let docs = [doc(4, vec![0]), doc(2, vec![0])];
        let full: Vec<_> = docs.iter().map(Extract::full).collect();
        assert_eq!(preservation_rate(&full), 1.0);
        let empty: Vec<_> = docs
            .iter()
            .map(|d| Extract::new(d, vec![]).unwrap())
            .collect();
        assert_eq!(preservation_rate(&empty), 0.0);
        let half = Extract::new(&docs[0], vec![1, 3]).unwrap();
        assert_eq!(half.words_kept, 4);
        assert_eq!(half.preservation(), 0.5);
        assert_eq!(half.text(&docs[0]), "word1 filler\nword3 filler\n");
        assert_eq!(
            half.to_json_line(),
            r#"{"doc_id":"d","selected":[1,3],"words_kept":4,"words_total":8}"#
        );
    }

    #[test]
    fn paragraph_unit_detection() {
        let det = toy_detector(BaseClassifier::Nb);
        let d = ReviewDocument::new(
            "p",
            Polarity::Positive,
            vec![
                "brilliant moving film".into(),
                "a stunning triumph".into(),
                "he moves to paris".into(),
                "the police find a body".into(),
            ],
            vec![0, 2],
        )
        .unwrap();
        assert_eq!(detect_paragraph_unit(&det, &d).unwrap(), vec![0, 1]);

        let single = ReviewDocument {
            paragraph_starts: vec![0],
            ..d.clone()
        };
        let sel = detect_paragraph_unit(&det, &single).unwrap();
        assert!(sel.is_empty() || sel == vec![0, 1, 2, 3]);

        let singletons = ReviewDocument {
            paragraph_starts: vec![0, 1, 2, 3],
            ..d.clone()
        };
        let per_sentence = detect(
            &det,
            &DetectorConfig::basic(BaseClassifier::Nb),
            &singletons,
        )
        .unwrap();
        assert_eq!(
            detect_paragraph_unit(&det, &singletons).unwrap(),
            per_sentence
        );
        assert_eq!(per_sentence, vec![0, 1]);
    }

    #[test]
    fn detect_refuses_mismatched_base() {
        let det = toy_detector(BaseClassifier::Nb);
        let err = detect(
            &det,
            &DetectorConfig::basic(BaseClassifier::Svm),
            &doc(2, vec![0]),
        )
        .unwrap_err();
        assert!(matches!(err, Error::Config(_)));
    }

    #[test]
    fn detector_model_file_round_trip() {
        let det = toy_detector(BaseClassifier::Svm);
        let file = det.to_model_file();
        let vocab = Vocabulary::from_tsv(&det.vocabulary().to_tsv()).unwrap();
        let back = SubjectivityDetector::from_model_file(&file, vocab).unwrap();
        assert_eq!(back, det);
        let other = toy_detector(BaseClassifier::Nb);
        let foreign = Vocabulary::build(&[vec!["zzz"]], 1).unwrap();
        assert!(SubjectivityDetector::from_model_file(&other.to_model_file(), foreign).is_err());
    }

    fn brute_split_pairs(side: &[usize], n: usize, t: usize) -> usize {
        let mut mask = vec![false; n];
        for &i in side {
            mask[i] = true;
        }
        (0..n)
            .flat_map(|i| (i + 1..n.min(i + t + 1)).map(move |j| (i, j)))
            .filter(|&(i, j)| mask[i] != mask[j])
            .count()
    }

    proptest! {
        #[test]
        fn zero_strength_graph_equals_basic(
            probs in prop::collection::vec(prop_oneof![Just(0.5), 0.0f64..1.0], 1..40),
            t in 1usize..4,
        ) {
            let scores = IndividualScores::from_probabilities(&probs);
            for decay in Decay::ALL {
                let p = ProximityParams::new(t, decay, 0.0);
                prop_assert_eq!(detect_graph(&scores, &p, &[0]).unwrap(), detect_basic(&scores));
            }
        }

        #[test]
        fn assoc_shape(n in 1usize..30, t in 1usize..4, c in 0.0f64..1.0, w in 0.0f64..1.0, cut in 1usize..29) {
            let starts = if cut < n { vec![0, cut] } else { vec![0] };
            let p = ProximityParams::new(t, Decay::Exponential, c).with_cross_paragraph(w);
            let a = assoc_scores(n, &p, &starts).unwrap();
            for (i, j, v) in a.iter() {
                prop_assert!(i < j && j - i <= t && v >= 0.0);
                prop_assert_eq!(a.get(j, i), v);
            }
            let unit = assoc_scores(n, &p.with_cross_paragraph(1.0), &starts).unwrap();
            let plain = assoc_scores(n, &p.with_cross_paragraph(1.0), &[0]).unwrap();
            prop_assert_eq!(unit, plain);
        }

        #[test]
        fn partition_and_order(probs in prop::collection::vec(0.0f64..1.0, 1..30), c in 0.0f64..1.0) {
            let d = doc(probs.len(), vec![0]);
            let scores = IndividualScores::from_probabilities(&probs);
            let sel = detect_graph(&scores, &ProximityParams::new(2, Decay::Constant, c), &[0]).unwrap();
            prop_assert!(sel.windows(2).all(|w| w[0] < w[1]));
            let e = Extract::new(&d, sel.clone()).unwrap();
            let o = e.objective(&d);
            let mut union: Vec<usize> = e.selected.iter().chain(&o.selected).copied().collect();
            union.sort_unstable();
            prop_assert_eq!(union, (0..d.len()).collect::<Vec<_>>());
            prop_assert_eq!(e.words_kept + o.words_kept, d.word_count);
        }

        #[test]
        fn raising_strength_never_splits_more(probs in prop::collection::vec(0.0f64..1.0, 1..10), c1 in 0.0f64..1.0, dc in 0.0f64..1.0) {
            let scores = IndividualScores::from_probabilities(&probs);
            let n = probs.len();
            let t = 2;
            let lo = ProximityParams::new(t, Decay::Constant, c1);
            let hi = ProximityParams::new(t, Decay::Constant, c1 + dc);
            let a_lo = assoc_scores(n, &lo, &[0]).unwrap();
            let a_hi = assoc_scores(n, &hi, &[0]).unwrap();
            let s_lo = brute_force_min(&scores, &a_lo, DEFAULT_SCALE).unwrap();
            let s_hi = brute_force_min(&scores, &a_hi, DEFAULT_SCALE).unwrap();
            let g_lo = detect_graph(&scores, &lo, &[0]).unwrap();
            let g_hi = detect_graph(&scores, &hi, &[0]).unwrap();
            // Graph detector agrees with the oracle in cost.
            let net_lo = FlowNetwork::build(&scores, &a_lo, DEFAULT_SCALE).unwrap();
            let net_hi = FlowNetwork::build(&scores, &a_hi, DEFAULT_SCALE).unwrap();
            let mask = |side: &[usize]| { let mut m = vec![false; n]; for &i in side { m[i] = true; } m };
            prop_assert_eq!(net_lo.scaled_cost(&mask(&g_lo)), s_lo.max_flow_value);
            prop_assert_eq!(net_hi.scaled_cost(&mask(&g_hi)), s_hi.max_flow_value);
            prop_assert!(brute_split_pairs(&g_hi, n, t) <= brute_split_pairs(&g_lo, n, t));
        }
    }
}
