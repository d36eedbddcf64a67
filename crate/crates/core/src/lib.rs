//! Sentiment polarity classification over subjective extracts.
//!
//! A per-sentence subjectivity detector (Naive Bayes or a linear soft-margin
//! classifier) scores every sentence of a review. The scores, optionally
//! coupled by sentence-proximity penalties, are turned into a source/sink
//! flow network whose minimum cut selects the subjective sentences. The
//! selected sentences form an extract that is then fed to a document-level
//! polarity classifier. The [`evaluation`] module runs the cross-validation
//! protocol around all of this.
//!
//! Module map:
//!
//! * [`corpus`]: dataset ingestion, paragraph boundaries, fold assignment.
//! * [`features`]: vocabularies and unigram-presence vectors.
//! * [`classifiers`]: Naive Bayes and linear-margin training and prediction.
//! * [`mincut`]: flow network construction, max-flow min-cut, brute-force oracle.
//! * [`extraction`]: detectors and N-sentence baselines.
//! * [`evaluation`]: experiments, grid search, sweeps, paired t-tests.
//! * [`synthetic`]: reproducible synthetic corpora for tests and benchmarks.

pub mod classifiers;
pub mod corpus;
pub mod error;
pub mod evaluation;
pub mod extraction;
pub mod features;
pub mod mincut;
pub mod synthetic;

pub use classifiers::{LinearMarginModel, NaiveBayesModel, NbEventModel, SvmParams};
pub use corpus::{CorpusManifest, LabeledSentence, Polarity, ReviewDocument, Subjectivity};
pub use error::{Error, Result};
pub use evaluation::{ExperimentConfig, ExperimentReport, FoldResult};
pub use extraction::{Decay, DetectionMode, DetectorConfig, Extract, ProximityParams};
pub use features::{PresenceVector, Vocabulary};
pub use mincut::{AssociationScores, CutResult, FlowNetwork, IndividualScores, ScorePair};
