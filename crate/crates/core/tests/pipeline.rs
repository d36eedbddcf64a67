use subjex::classifiers::ModelFile;
use subjex::corpus::{load_polarity_dataset, load_subjectivity_dataset};
use subjex::evaluation::{run_experiment, ExperimentConfig, ExperimentContext, Extractor};
use subjex::extraction::{
    detect, BaseClassifier, ClassifierParams, Decay, DetectorConfig, ProximityParams,
    SubjectivityDetector,
};
use subjex::synthetic::{SyntheticConfig, SyntheticCorpus};
use subjex::Vocabulary;

#[test]
fn files_to_report() {
    let corpus = SyntheticCorpus::generate(&SyntheticConfig::small(21));
    let tmp = tempfile::tempdir().unwrap();
    corpus.write_polarity(&tmp.path().join("polarity")).unwrap();
    let (quote, plot) = corpus
        .write_subjectivity(&tmp.path().join("subjectivity"))
        .unwrap();

    let polarity = load_polarity_dataset(tmp.path().join("polarity")).unwrap();
    let subj = load_subjectivity_dataset(quote, plot).unwrap();
    assert_eq!(polarity.manifest.positive_count, 60);
    assert_eq!(subj.manifest.subjective_count, 400);

    let detector = SubjectivityDetector::train(
        &subj.sentences,
        BaseClassifier::Svm,
        &ClassifierParams::default(),
    )
    .unwrap();
    let file = ModelFile::from_json(&detector.to_model_file().to_json().unwrap()).unwrap();
    let vocab = Vocabulary::from_tsv(&detector.vocabulary().to_tsv()).unwrap();
    let reloaded = SubjectivityDetector::from_model_file(&file, vocab).unwrap();

    let config = DetectorConfig::graph(
        BaseClassifier::Svm,
        ProximityParams::new(2, Decay::Exponential, 0.5),
    );
    for doc in polarity.documents.iter().take(10) {
        assert_eq!(
            detect(&detector, &config, doc).unwrap(),
            detect(&reloaded, &config, doc).unwrap()
        );
    }

    let mut ctx = ExperimentContext::new(polarity.documents).unwrap();
    ctx.add_detector(reloaded).unwrap();
    let experiment = ExperimentConfig::new(Extractor::Detector(config), BaseClassifier::Nb);
    let report = run_experiment(&ctx, &experiment).unwrap();
    assert_eq!(report.folds.len(), 10);
    assert!(report.mean_preservation > 0.0 && report.mean_preservation < 1.0);
    assert!(!report.oracle_selected);
}

#[test]
fn detector_agrees_with_generator_truth() {
    let corpus = SyntheticCorpus::generate(&SyntheticConfig::small(22));
    let detector = SubjectivityDetector::train(
        &corpus.sentences,
        BaseClassifier::Nb,
        &ClassifierParams::default(),
    )
    .unwrap();
    let basic = DetectorConfig::basic(BaseClassifier::Nb);
    let (mut hits, mut total) = (0usize, 0usize);
    for (doc, truth) in corpus.reviews.iter().zip(&corpus.truth) {
        let selected = detect(&detector, &basic, doc).unwrap();
        for (i, &is_opinion) in truth.iter().enumerate() {
            hits += usize::from(selected.binary_search(&i).is_ok() == is_opinion);
            total += 1;
        }
    }
    let agreement = hits as f64 / total as f64;
    assert!(agreement > 0.75, "agreement {agreement}");
}
