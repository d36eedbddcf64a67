//! Naive Bayes and linear soft-margin classifiers over presence vectors.
//!
//! Both are binary. Labels are `bool`, `true` meaning class 1: subjective for
//! detectors, positive for polarity classifiers.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::features::{PresenceVector, Vocabulary};
use crate::mincut::ScorePair;

fn check_binary_labels(n_vectors: usize, labels: &[bool]) -> Result<()> {
    if n_vectors != labels.len() {
        return Err(Error::Training(format!(
            "{n_vectors} vectors but {} labels",
            labels.len()
        )));
    }
    let positives = labels.iter().filter(|&&l| l).count();
    if positives == 0 || positives == labels.len() {
        return Err(Error::Training(
            "training data must contain examples of both classes".into(),
        ));
    }
    Ok(())
}

fn log_sum_exp(a: f64, b: f64) -> f64 {
    let m = a.max(b);
    if m == f64::NEG_INFINITY {
        return m;
    }
    m + ((a - m).exp() + (b - m).exp()).ln()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NbEventModel {
    /// Multinomial over present tokens; absence carries no evidence.
    #[default]
    Multinomial,
    /// Bernoulli: every vocabulary entry contributes, present or absent.
    Bernoulli,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NbParams {
    pub alpha: f64,
    pub event_model: NbEventModel,
}

impl Default for NbParams {
    fn default() -> Self {
        Self {
            alpha: 1.0,
            event_model: NbEventModel::Multinomial,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NaiveBayesModel {
    pub event_model: NbEventModel,
    pub smoothing_alpha: f64,
    /// Indexed by class (0, 1).
    pub log_prior: [f64; 2],
    /// `log P(token | class)`, indexed by class then vocabulary index.
    pub log_likelihood: [Vec<f64>; 2],
    /// Bernoulli only: `sum_w log(1 - P(w | class))`.
    #[serde(default)]
    absent_log_sum: [f64; 2],
}

impl NaiveBayesModel {
    pub fn train(
        vectors: &[PresenceVector],
        labels: &[bool],
        vocab_size: usize,
        params: NbParams,
    ) -> Result<Self> {
        check_binary_labels(vectors.len(), labels)?;
        if !(params.alpha > 0.0 && params.alpha.is_finite()) {
            return Err(Error::Config(format!(
                "smoothing alpha must be > 0, got {}",
                params.alpha
            )));
        }
        let mut doc_counts = [0usize; 2];
        let mut token_counts = [vec![0usize; vocab_size], vec![0usize; vocab_size]];
        for (x, &y) in vectors.iter().zip(labels) {
            let c = y as usize;
            doc_counts[c] += 1;
            for &i in x.indices() {
                let i = i as usize;
                if i >= vocab_size {
                    return Err(Error::Training(format!(
                        "feature index {i} outside vocabulary of size {vocab_size}"
                    )));
                }
                token_counts[c][i] += 1;
            }
        }
        let n = vectors.len() as f64;
        let log_prior = [
            (doc_counts[0] as f64 / n).ln(),
            (doc_counts[1] as f64 / n).ln(),
        ];
        let alpha = params.alpha;
        let mut absent_log_sum = [0.0; 2];
        let log_likelihood = [0, 1].map(|c| {
            let counts = &token_counts[c];
            match params.event_model {
                NbEventModel::Multinomial => {
                    let total: usize = counts.iter().sum();
                    let denom = (total as f64 + alpha * vocab_size as f64).ln();
                    counts
                        .iter()
                        .map(|&k| (k as f64 + alpha).ln() - denom)
                        .collect::<Vec<_>>()
                }
                NbEventModel::Bernoulli => {
                    let denom = doc_counts[c] as f64 + 2.0 * alpha;
                    let ll: Vec<f64> = counts
                        .iter()
                        .map(|&k| ((k as f64 + alpha) / denom).ln())
                        .collect();
                    absent_log_sum[c] = ll.iter().map(|&lp| (-lp.exp()).ln_1p()).sum();
                    ll
                }
            }
        });
        Ok(Self {
            event_model: params.event_model,
            smoothing_alpha: alpha,
            log_prior,
            log_likelihood,
            absent_log_sum,
        })
    }

    pub fn vocab_size(&self) -> usize {
        self.log_likelihood[0].len()
    }

    /// Unnormalized `log P(class, x)` for both classes.
    pub fn log_joint(&self, x: &PresenceVector) -> [f64; 2] {
        [0, 1].map(|c| {
            let ll = &self.log_likelihood[c];
            let mut s = self.log_prior[c];
            match self.event_model {
                NbEventModel::Multinomial => {
                    for &i in x.indices() {
                        s += ll[i as usize];
                    }
                }
                NbEventModel::Bernoulli => {
                    s += self.absent_log_sum[c];
                    for &i in x.indices() {
                        let lp = ll[i as usize];
                        s += lp - (-lp.exp()).ln_1p();
                    }
                }
            }
            s
        })
    }

    /// Posterior probability of class 1.
    pub fn predict_prob(&self, x: &PresenceVector) -> f64 {
        let [s0, s1] = self.log_joint(x);
        let z = log_sum_exp(s0, s1);
        (s1 - z).exp().clamp(0.0, 1.0)
    }

    /// Class 1 iff its posterior exceeds one half.
    pub fn predict(&self, x: &PresenceVector) -> bool {
        let [s0, s1] = self.log_joint(x);
        s1 > s0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SvmParams {
    /// Soft-margin constant `C` in `1/2 |w|^2 + C sum_i hinge_i`.
    pub regularization: f64,
    pub seed: u64,
    /// Stop when the projected-gradient spread of the dual falls below this.
    pub tolerance: f64,
    pub max_epochs: usize,
}

impl Default for SvmParams {
    fn default() -> Self {
        Self {
            regularization: 1.0,
            seed: 0,
            tolerance: 1e-3,
            max_epochs: 2000,
        }
    }
}

/// Linear soft-margin classifier trained by dual coordinate descent.
///
/// The bias is learned as the weight of a constant feature of value 1, so
/// it is regularized together with `weights`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearMarginModel {
    pub weights: Vec<f64>,
    pub bias: f64,
    pub regularization: f64,
    pub training_seed: u64,
    pub epochs: usize,
    pub converged: bool,
}

impl LinearMarginModel {
    pub fn train(
        vectors: &[PresenceVector],
        labels: &[bool],
        vocab_size: usize,
        params: SvmParams,
    ) -> Result<Self> {
        check_binary_labels(vectors.len(), labels)?;
        let c = params.regularization;
        if !(c > 0.0 && c.is_finite()) {
            return Err(Error::Config(format!(
                "regularization must be > 0, got {c}"
            )));
        }
        if let Some(bad) = vectors
            .iter()
            .flat_map(|x| x.indices())
            .find(|&&i| i as usize >= vocab_size)
        {
            return Err(Error::Training(format!(
                "feature index {bad} outside vocabulary of size {vocab_size}"
            )));
        }

        let n = vectors.len();
        let sign: Vec<f64> = labels.iter().map(|&l| if l { 1.0 } else { -1.0 }).collect();
        let q_diag: Vec<f64> = vectors.iter().map(|x| x.squared_norm() + 1.0).collect();
        let mut alpha = vec![0.0; n];
        let mut w = vec![0.0; vocab_size];
        let mut b = 0.0;
        let mut order: Vec<usize> = (0..n).collect();
        let mut rng = ChaCha8Rng::seed_from_u64(params.seed);

        let mut epochs = 0;
        let mut converged = false;
        while epochs < params.max_epochs {
            epochs += 1;
            order.shuffle(&mut rng);
            let mut pg_max = f64::NEG_INFINITY;
            let mut pg_min = f64::INFINITY;
            for &i in &order {
                let x = &vectors[i];
                let y = sign[i];
                let g = y * (x.dot(&w) + b) - 1.0;
                let pg = if alpha[i] <= 0.0 {
                    g.min(0.0)
                } else if alpha[i] >= c {
                    g.max(0.0)
                } else {
                    g
                };
                pg_max = pg_max.max(pg);
                pg_min = pg_min.min(pg);
                if pg.abs() > 1e-12 {
                    let old = alpha[i];
                    alpha[i] = (old - g / q_diag[i]).clamp(0.0, c);
                    let delta = (alpha[i] - old) * y;
                    x.add_to(&mut w, delta);
                    b += delta;
                }
            }
            if pg_max - pg_min < params.tolerance {
                converged = true;
                break;
            }
        }
        if !converged {
            log::warn!(
                "linear-margin training stopped after {epochs} epochs without reaching tolerance {}",
                params.tolerance
            );
        }
        Ok(Self {
            weights: w,
            bias: b,
            regularization: c,
            training_seed: params.seed,
            epochs,
            converged,
        })
    }

    pub fn vocab_size(&self) -> usize {
        self.weights.len()
    }

    /// `w . x + b`.
    pub fn raw_score(&self, x: &PresenceVector) -> f64 {
        x.dot(&self.weights) + self.bias
    }

    pub fn weight_norm(&self) -> f64 {
        self.weights.iter().map(|w| w * w).sum::<f64>().sqrt()
    }

    /// Signed geometric distance `(w . x + b) / |w|`; positive means class 1.
    pub fn decision(&self, x: &PresenceVector) -> Result<f64> {
        let norm = self.weight_norm();
        if norm == 0.0 {
            return Err(Error::DegenerateModel("weight vector is zero".into()));
        }
        Ok(self.raw_score(x) / norm)
    }

    pub fn predict(&self, x: &PresenceVector) -> bool {
        self.raw_score(x) > 0.0
    }

    /// Primal objective `1/2 |w|^2 + C sum hinge`, with the bias regularized.
    pub fn objective(&self, vectors: &[PresenceVector], labels: &[bool]) -> f64 {
        let reg = 0.5 * (self.weight_norm().powi(2) + self.bias * self.bias);
        let loss: f64 = vectors
            .iter()
            .zip(labels)
            .map(|(x, &l)| {
                let y = if l { 1.0 } else { -1.0 };
                (1.0 - y * self.raw_score(x)).max(0.0)
            })
            .sum();
        reg + self.regularization * loss
    }
}

/// Maps a signed hyperplane distance onto individual scores: the clamp
/// `(2 + d) / 4` on `[-2, 2]`, saturating to 1 above and 0 below.
pub fn svm_to_individual(d: f64) -> ScorePair {
    let source = if d > 2.0 {
        1.0
    } else if d < -2.0 {
        0.0
    } else {
        (2.0 + d) / 4.0
    };
    ScorePair {
        source,
        sink: 1.0 - source,
    }
}

/// NB posterior lifted to individual scores `(p, 1 - p)`.
pub fn probability_to_individual(p: f64) -> ScorePair {
    ScorePair {
        source: p,
        sink: 1.0 - p,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ModelParams {
    NaiveBayes(NaiveBayesModel),
    LinearMargin(LinearMarginModel),
}

impl ModelParams {
    pub fn vocab_size(&self) -> usize {
        match self {
            ModelParams::NaiveBayes(m) => m.vocab_size(),
            ModelParams::LinearMargin(m) => m.vocab_size(),
        }
    }
}

pub const MODEL_FORMAT: &str = "subjex-model";
pub const MODEL_VERSION: u32 = 1;

/// Versioned JSON container tying a model to the vocabulary it was trained on.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelFile {
    pub format: String,
    pub version: u32,
    pub vocabulary_digest: String,
    pub vocabulary_size: usize,
    pub model: ModelParams,
}

impl ModelFile {
    pub fn new(model: ModelParams, vocab: &Vocabulary) -> Self {
        Self {
            format: MODEL_FORMAT.into(),
            version: MODEL_VERSION,
            vocabulary_digest: vocab.digest(),
            vocabulary_size: vocab.len(),
            model,
        }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: Self = serde_json::from_str(text)?;
        if file.format != MODEL_FORMAT || file.version != MODEL_VERSION {
            return Err(Error::Validation(format!(
                "unsupported model container {} v{}",
                file.format, file.version
            )));
        }
        if file.model.vocab_size() != file.vocabulary_size {
            return Err(Error::Validation(
                "model parameter size disagrees with vocabulary size".into(),
            ));
        }
        Ok(file)
    }

    /// Returns the model only if `vocab` is the one it was trained with.
    pub fn check_vocabulary(&self, vocab: &Vocabulary) -> Result<&ModelParams> {
        let actual = vocab.digest();
        if actual != self.vocabulary_digest {
            return Err(Error::VocabularyMismatch {
                expected: self.vocabulary_digest.clone(),
                actual,
            });
        }
        Ok(&self.model)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn pv(ix: &[u32], normalize: bool) -> PresenceVector {
        PresenceVector::from_indices(ix.to_vec(), normalize)
    }

    fn two_example_model() -> NaiveBayesModel {
        // vocab {good: 0, bad: 1}
        NaiveBayesModel::train(
            &[pv(&[0], false), pv(&[1], false)],
            &[true, false],
            2,
            NbParams::default(),
        )
        .unwrap()
    }

    #[test]
    fn nb_smoothed_likelihoods() {
        let m = two_example_model();
        assert!((m.log_likelihood[1][0].exp() - 2.0 / 3.0).abs() < 1e-12);
        assert!((m.log_likelihood[1][1].exp() - 1.0 / 3.0).abs() < 1e-12);
        assert!((m.log_prior[0] - 0.5f64.ln()).abs() < 1e-15);
        assert!((m.log_prior[1] - 0.5f64.ln()).abs() < 1e-15);
        let prior_sum: f64 = m.log_prior.iter().map(|l| l.exp()).sum();
        assert!((prior_sum - 1.0).abs() < 1e-9);
    }

    #[test]
    fn nb_posteriors_by_hand() {
        let m = two_example_model();
        assert!((m.predict_prob(&pv(&[], false)) - 0.5).abs() < 1e-15);
        // P(pos|good) = .5 * 2/3 / (.5 * 2/3 + .5 * 1/3) = 2/3
        assert!((m.predict_prob(&pv(&[0], false)) - 2.0 / 3.0).abs() < 1e-12);
        assert!((m.predict_prob(&pv(&[1], false)) - 1.0 / 3.0).abs() < 1e-12);
        assert!((m.predict_prob(&pv(&[0, 1], false)) - 0.5).abs() < 1e-12);
    }

    #[test]
    fn nb_single_class_is_error() {
        let err = NaiveBayesModel::train(&[pv(&[0], false)], &[true], 1, NbParams::default())
            .unwrap_err();
        assert!(matches!(err, Error::Training(_)));
    }

    #[test]
    fn nb_bernoulli_by_hand() {
        let params = NbParams {
            alpha: 1.0,
            event_model: NbEventModel::Bernoulli,
        };
        let m = NaiveBayesModel::train(
            &[pv(&[0], false), pv(&[1], false)],
            &[true, false],
            2,
            params,
        )
        .unwrap();
        // P(good|pos) = 2/3, P(bad|pos) = 1/3; P(good|neg) = 1/3, P(bad|neg) = 2/3.
        // x = {good}: pos: 2/3 * (1 - 1/3) = 4/9; neg: 1/3 * (1 - 2/3) = 1/9 -> 0.8
        assert!((m.predict_prob(&pv(&[0], false)) - 0.8).abs() < 1e-12);
    }

    #[test]
    fn nb_extreme_scores_do_not_nan() {
        let m = two_example_model();
        let mut big = m.clone();
        big.log_likelihood[1][0] = -1e6;
        let p = big.predict_prob(&pv(&[0], false));
        assert!(p.is_finite() && (0.0..=1.0).contains(&p));
    }

    fn separable() -> (Vec<PresenceVector>, Vec<bool>) {
        (
            vec![
                pv(&[0], true),
                pv(&[0, 1], true),
                pv(&[2], true),
                pv(&[2, 3], true),
            ],
            vec![true, true, false, false],
        )
    }

    #[test]
    fn svm_separable_and_deterministic() {
        let (xs, ys) = separable();
        let a = LinearMarginModel::train(&xs, &ys, 4, SvmParams::default()).unwrap();
        assert!(a.converged);
        for (x, &y) in xs.iter().zip(&ys) {
            assert_eq!(a.predict(x), y);
            assert_eq!(a.decision(x).unwrap() > 0.0, y);
        }
        let b = LinearMarginModel::train(&xs, &ys, 4, SvmParams::default()).unwrap();
        assert_eq!(a, b);
        let sa = ModelFile::new(
            ModelParams::LinearMargin(a),
            &Vocabulary::build(&[vec!["a", "b", "c", "d"]], 1).unwrap(),
        );
        let sb = ModelFile::new(
            ModelParams::LinearMargin(b),
            &Vocabulary::build(&[vec!["a", "b", "c", "d"]], 1).unwrap(),
        );
        assert_eq!(sa.to_json().unwrap(), sb.to_json().unwrap());
    }

    #[test]
    fn svm_objective_matches_dual_optimum_band() {
        // Coordinate descent must do at least as well as the trivial w = 0 point.
        let (xs, ys) = separable();
        let m = LinearMarginModel::train(&xs, &ys, 4, SvmParams::default()).unwrap();
        let zero = LinearMarginModel {
            weights: vec![0.0; 4],
            bias: 0.0,
            ..m.clone()
        };
        assert!(m.objective(&xs, &ys) < zero.objective(&xs, &ys));
    }

    #[test]
    fn svm_decision_geometry() {
        let m = LinearMarginModel {
            weights: vec![3.0, 4.0],
            bias: -5.0,
            regularization: 1.0,
            training_seed: 0,
            epochs: 0,
            converged: true,
        };
        // (3 + 4 - 5) / 5 on the unnormalized two-token vector.
        assert!((m.decision(&pv(&[0, 1], false)).unwrap() - 0.4).abs() < 1e-12);
        let on_plane = LinearMarginModel {
            weights: vec![1.0, 0.0],
            bias: -1.0,
            ..m.clone()
        };
        assert_eq!(on_plane.decision(&pv(&[0], false)).unwrap(), 0.0);
        let doubled = LinearMarginModel {
            weights: vec![6.0, 8.0],
            bias: -10.0,
            ..m.clone()
        };
        assert!((doubled.decision(&pv(&[0, 1], false)).unwrap() - 0.4).abs() < 1e-12);
        let zero = LinearMarginModel {
            weights: vec![0.0, 0.0],
            ..m
        };
        assert!(matches!(
            zero.decision(&pv(&[0], false)),
            Err(Error::DegenerateModel(_))
        ));
    }

    #[test]
    fn svm_single_class_is_error() {
        let err = LinearMarginModel::train(&[pv(&[0], true)], &[false], 1, SvmParams::default())
            .unwrap_err();
        assert!(matches!(err, Error::Training(_)));
    }

    #[test]
    fn clamp_values() {
        let cases = [
            (3.0, 1.0),
            (0.0, 0.5),
            (-2.0, 0.0),
            (1.0, 0.75),
            (2.0, 1.0),
            (-3.0, 0.0),
        ];
        for (d, expect) in cases {
            let s = svm_to_individual(d);
            assert_eq!(s.source, expect, "d = {d}");
            assert_eq!(s.sink, 1.0 - expect);
        }
    }

    #[test]
    fn model_file_refuses_foreign_vocabulary() {
        let v1 = Vocabulary::build(&[vec!["good", "bad"]], 1).unwrap();
        let v2 = Vocabulary::build(&[vec!["bad", "good"]], 1).unwrap();
        let file = ModelFile::new(ModelParams::NaiveBayes(two_example_model()), &v1);
        let back = ModelFile::from_json(&file.to_json().unwrap()).unwrap();
        assert_eq!(back, file);
        assert!(back.check_vocabulary(&v1).is_ok());
        assert!(matches!(
            back.check_vocabulary(&v2),
            Err(Error::VocabularyMismatch { .. })
        ));
    }

    proptest! {
        #[test]
        fn nb_posterior_properties(
            data in prop::collection::vec((prop::collection::vec(0u32..8, 0..6), any::<bool>()), 2..20),
            probe in prop::collection::vec(0u32..8, 0..6),
        ) {
            let mut labels: Vec<bool> = data.iter().map(|d| d.1).collect();
            labels[0] = true;
            labels[1] = false;
            let xs: Vec<PresenceVector> = data.iter().map(|d| pv(&d.0, false)).collect();
            let m = NaiveBayesModel::train(&xs, &labels, 8, NbParams::default()).unwrap();
            let swapped: Vec<bool> = labels.iter().map(|l| !l).collect();
            let ms = NaiveBayesModel::train(&xs, &swapped, 8, NbParams::default()).unwrap();
            let x = pv(&probe, false);
            let p = m.predict_prob(&x);
            prop_assert!((0.0..=1.0).contains(&p));
            let [s0, s1] = m.log_joint(&x);
            let z = log_sum_exp(s0, s1);
            prop_assert!(((s0 - z).exp() + (s1 - z).exp() - 1.0).abs() < 1e-9);
            prop_assert!((p + ms.predict_prob(&x) - 1.0).abs() < 1e-12);
        }

        #[test]
        fn nb_monotone_in_likelihood_ratio(base in prop::collection::vec(0u32..6, 0..4)) {
            // token 7 only ever appears with class 1, so its ratio exceeds 1.
            let xs = vec![pv(&[7, 0], false), pv(&[1], false), pv(&[2, 3], false), pv(&[4, 5], false)];
            let m = NaiveBayesModel::train(&xs, &[true, false, true, false], 8, NbParams::default()).unwrap();
            let without: Vec<u32> = base.clone();
            let mut with = base;
            with.push(7);
            prop_assert!(m.predict_prob(&pv(&with, false)) > m.predict_prob(&pv(&without, false)));
        }

        #[test]
        fn clamp_is_monotone_and_complementary(a in -10.0f64..10.0, b in -10.0f64..10.0) {
            let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
            let (sl, sh) = (svm_to_individual(lo), svm_to_individual(hi));
            prop_assert!(sl.source <= sh.source);
            prop_assert_eq!(sl.source + sl.sink, 1.0);
            prop_assert!((0.0..=1.0).contains(&sl.source));
            let eps = 1e-9;
            prop_assert!((svm_to_individual(lo + eps).source - sl.source).abs() <= eps);
        }
    }
}
