//! Seeded synthetic corpora with the layout of the real review and
//! subjectivity datasets.
//!
//! Reviews mix opinion sentences, whose polarity words mostly agree with the
//! review label, and plot sentences, whose polarity words are label-blind
//! noise. Sentence kinds come in runs, and paragraph breaks tend to fall
//! where the kind changes. The generator is used by tests, benchmarks and
//! the acceptance suite when the real data are not installed.

use std::fs;
use std::path::{Path, PathBuf};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::corpus::{assign_folds, LabeledSentence, Polarity, ReviewDocument, Subjectivity};
use crate::error::{Error, Result};

pub const QUOTE_FILE: &str = "quote.tok.gt9.5000";
pub const PLOT_FILE: &str = "plot.tok.gt9.5000";

#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticConfig {
    pub seed: u64,
    pub reviews_per_class: usize,
    /// Inclusive range of sentences per review.
    pub sentences_per_review: (usize, usize),
    pub sentences_per_class: usize,
    pub folds: usize,
    /// Probability that the next sentence keeps the current kind.
    pub persistence: f64,
    /// Share of polarity words in opinion sentences that agree with the label.
    pub purity: f64,
}

impl SyntheticConfig {
    /// 2000 reviews of about 32 sentences and 10000 labeled sentences.
    pub fn full_size(seed: u64) -> Self {
        Self {
            seed,
            reviews_per_class: 1000,
            sentences_per_review: (20, 44),
            sentences_per_class: 5000,
            folds: 10,
            persistence: 0.8,
            purity: 0.62,
        }
    }

    pub fn small(seed: u64) -> Self {
        Self {
            seed,
            reviews_per_class: 60,
            sentences_per_review: (10, 20),
            sentences_per_class: 400,
            folds: 10,
            persistence: 0.8,
            purity: 0.62,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticCorpus {
    pub reviews: Vec<ReviewDocument>,
    /// Generator truth: whether each review sentence is an opinion sentence.
    pub truth: Vec<Vec<bool>>,
    pub sentences: Vec<LabeledSentence>,
}

struct Lexicon {
    positive: Vec<String>,
    negative: Vec<String>,
    opinion: Vec<String>,
    plot: Vec<String>,
    function: Vec<String>,
}

fn words(base: &[&str], stem: &str, extra: usize) -> Vec<String> {
    base.iter()
        .map(|s| s.to_string())
        .chain((0..extra).map(|k| format!("{stem}{k}")))
        .collect()
}

impl Lexicon {
    fn new() -> Self {
        Self {
            positive: words(
                &[
                    "good",
                    "great",
                    "wonderful",
                    "moving",
                    "funny",
                    "superb",
                    "charming",
                    "best",
                    "enjoyable",
                    "gripping",
                ],
                "bravo",
                50,
            ),
            negative: words(
                &[
                    "bad", "boring", "awful", "dull", "worst", "stupid", "mess", "waste", "lame",
                    "tedious",
                ],
                "bleh",
                50,
            ),
            opinion: words(
                &[
                    "i", "think", "feel", "really", "simply", "frankly", "perhaps", "me", "seems",
                    "quite", "my", "!",
                ],
                "opine",
                30,
            ),
            plot: words(
                &[
                    "he",
                    "she",
                    "they",
                    "town",
                    "wife",
                    "father",
                    "finds",
                    "discovers",
                    "travels",
                    "must",
                    "year",
                    "where",
                ],
                "plot",
                300,
            ),
            function: words(
                &[
                    "the", "a", "of", "and", "to", "in", ",", ".", "is", "that", "with", "as",
                ],
                "fn",
                0,
            ),
        }
    }
}

struct Generator<'a> {
    rng: ChaCha8Rng,
    lex: &'a Lexicon,
    purity: f64,
}

impl Generator<'_> {
    fn pick<'b>(&mut self, pool: &'b [String]) -> &'b str {
        pool.choose(&mut self.rng).expect("nonempty pool")
    }

    fn polarity_word(&mut self, positive: bool) -> String {
        let pool = if positive {
            &self.lex.positive
        } else {
            &self.lex.negative
        };
        self.pick(pool).to_owned()
    }

    fn sentence(&mut self, opinion: bool, polarity: Option<bool>) -> String {
        let len = self.rng.gen_range(8..=20);
        let mut toks = Vec::with_capacity(len);
        for _ in 0..len {
            let r: f64 = self.rng.gen();
            let tok = if opinion {
                if r < 0.18 {
                    self.pick(&self.lex.opinion).to_owned()
                } else if r < 0.38 {
                    let agree = self.rng.gen_bool(self.purity);
                    let positive = match polarity {
                        Some(p) => p == agree,
                        None => self.rng.gen(),
                    };
                    self.polarity_word(positive)
                } else if r < 0.5 {
                    self.pick(&self.lex.plot).to_owned()
                } else {
                    self.pick(&self.lex.function).to_owned()
                }
            } else if r < 0.36 {
                self.pick(&self.lex.plot).to_owned()
            } else if r < 0.46 {
                let positive = self.rng.gen();
                self.polarity_word(positive)
            } else if r < 0.5 {
                self.pick(&self.lex.opinion).to_owned()
            } else {
                self.pick(&self.lex.function).to_owned()
            };
            toks.push(tok);
        }
        toks.join(" ")
    }
}

impl SyntheticCorpus {
    pub fn generate(config: &SyntheticConfig) -> Self {
        let lex = Lexicon::new();
        let mut gen = Generator {
            rng: ChaCha8Rng::seed_from_u64(config.seed),
            lex: &lex,
            purity: config.purity,
        };
        let (lo, hi) = config.sentences_per_review;
        let mut reviews = Vec::new();
        let mut truth = Vec::new();
        let mut serial = 0usize;
        for label in [Polarity::Negative, Polarity::Positive] {
            for i in 0..config.reviews_per_class {
                let tag = i * 1000 / config.reviews_per_class.max(1);
                serial += 1;
                let id = format!("cv{tag:03}_{serial}");
                let n = gen.rng.gen_range(lo.max(1)..=hi.max(lo.max(1)));
                let mut kinds = Vec::with_capacity(n);
                let mut sentences = Vec::with_capacity(n);
                let mut starts = vec![0];
                let mut opinion = gen.rng.gen_bool(0.5);
                let mut para_len = 0;
                for s in 0..n {
                    if s > 0 {
                        let switched = !gen.rng.gen_bool(config.persistence);
                        if switched {
                            opinion = !opinion;
                        }
                        if (switched && gen.rng.gen_bool(0.6)) || para_len >= 6 {
                            starts.push(s);
                            para_len = 0;
                        }
                    }
                    para_len += 1;
                    kinds.push(opinion);
                    sentences.push(gen.sentence(opinion, Some(label.is_positive())));
                }
                reviews.push(
                    ReviewDocument::new(id, label, sentences, starts)
                        .expect("generated review is valid"),
                );
                truth.push(kinds);
            }
        }
        assign_folds(&mut reviews, config.folds).expect("generated ids carry fold tags");

        let mut sentences = Vec::with_capacity(2 * config.sentences_per_class);
        for label in [Subjectivity::Subjective, Subjectivity::Objective] {
            for _ in 0..config.sentences_per_class {
                let text = gen.sentence(label.is_subjective(), None);
                sentences.push(LabeledSentence { text, label });
            }
        }
        Self {
            reviews,
            truth,
            sentences,
        }
    }

    /// Writes `root/pos/*.txt` and `root/neg/*.txt`, one sentence per line
    /// and a blank line between paragraphs.
    pub fn write_polarity(&self, root: &Path) -> Result<()> {
        for doc in &self.reviews {
            let dir = root.join(doc.label.dir_name());
            fs::create_dir_all(&dir).map_err(|e| Error::io(&dir, e))?;
            let mut body = String::new();
            for (p, range) in doc.paragraph_ranges().into_iter().enumerate() {
                if p > 0 {
                    body.push('\n');
                }
                for s in &doc.sentences[range] {
                    body.push_str(s);
                    body.push('\n');
                }
            }
            let path = dir.join(format!("{}.txt", doc.id));
            fs::write(&path, body).map_err(|e| Error::io(&path, e))?;
        }
        Ok(())
    }

    /// Writes the quote and plot files into `dir` and returns their paths.
    pub fn write_subjectivity(&self, dir: &Path) -> Result<(PathBuf, PathBuf)> {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        let quote = dir.join(QUOTE_FILE);
        let plot = dir.join(PLOT_FILE);
        for (path, label) in [
            (&quote, Subjectivity::Subjective),
            (&plot, Subjectivity::Objective),
        ] {
            let body: String = self
                .sentences
                .iter()
                .filter(|s| s.label == label)
                .map(|s| format!("{}\n", s.text))
                .collect();
            fs::write(path, body).map_err(|e| Error::io(path.as_path(), e))?;
        }
        Ok((quote, plot))
    }
}
