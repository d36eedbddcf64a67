mod data;
mod oracle;
mod spec;

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use subjex::classifiers::ModelFile;
use subjex::corpus::CorpusManifest;
use subjex::evaluation::{
    detector_cross_validation, grid_search, n_sentence_sweep, paragraph_comparison, run_experiment,
    ExperimentConfig, ExperimentContext, ExperimentReport, Extractor, ProximityGrid, SweepMethod,
};
use subjex::extraction::{
    BaseClassifier, ClassifierParams, Decay, DetectorConfig, ProximityParams, SubjectivityDetector,
};
use subjex::features::Vocabulary;
use subjex::synthetic::{SyntheticConfig, SyntheticCorpus};

use data::DataRoot;
use spec::RunSpec;

/// A failed command: exit code plus a one-line message.
#[derive(Debug)]
pub struct CliError {
    pub code: u8,
    pub kind: String,
    pub message: String,
}

impl CliError {
    pub fn usage(kind: &str, message: impl Into<String>) -> Self {
        Self {
            code: 2,
            kind: kind.into(),
            message: message.into(),
        }
    }

    pub fn failure(kind: &str, message: impl Into<String>) -> Self {
        Self {
            code: 1,
            kind: kind.into(),
            message: message.into(),
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let message = self.message.replace(['\n', '\r'], " ");
        write!(
            f,
            "error: kind={} code={} message={}",
            self.kind, self.code, message
        )
    }
}

impl From<subjex::Error> for CliError {
    fn from(e: subjex::Error) -> Self {
        let code = match e {
            subjex::Error::Config(_) | subjex::Error::Serde(_) => 2,
            _ => 1,
        };
        Self {
            code,
            kind: e.kind().into(),
            message: e.to_string(),
        }
    }
}

type CliResult<T = ()> = Result<T, CliError>;

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Base {
    Nb,
    Svm,
}

impl From<Base> for BaseClassifier {
    fn from(b: Base) -> Self {
        match b {
            Base::Nb => BaseClassifier::Nb,
            Base::Svm => BaseClassifier::Svm,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Mode {
    Basic,
    Graph,
    ParagraphUnit,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum DecayArg {
    Constant,
    Exponential,
    InverseSquare,
}

impl From<DecayArg> for Decay {
    fn from(d: DecayArg) -> Self {
        match d {
            DecayArg::Constant => Decay::Constant,
            DecayArg::Exponential => Decay::Exponential,
            DecayArg::InverseSquare => Decay::InverseSquare,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum MethodArg {
    TopN,
    FirstN,
    LastN,
    LeastN,
}

impl From<MethodArg> for SweepMethod {
    fn from(m: MethodArg) -> Self {
        match m {
            MethodArg::TopN => SweepMethod::TopN,
            MethodArg::FirstN => SweepMethod::FirstN,
            MethodArg::LastN => SweepMethod::LastN,
            MethodArg::LeastN => SweepMethod::LeastN,
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "subjex",
    version,
    about = "Subjectivity extracts for review polarity classification"
)]
struct Cli {
    /// Directory holding polarity/ and subjectivity/.
    #[arg(long, env = "SUBJEX_DATA_ROOT", global = true)]
    data_root: Option<PathBuf>,
    /// Where reports, models and extracts are written; created if absent.
    #[arg(long, short = 'o', global = true, default_value = "subjex-out")]
    output_dir: PathBuf,
    /// Seed for every random choice (default 0).
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads for folds and grid cells (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Directory with detector-<base>.json and .vocab.tsv from train-detector.
    #[arg(long, global = true)]
    models: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check dataset layout and counts and write manifest.json.
    VerifyData {
        /// Manifest from an earlier run; missing or changed files are named.
        #[arg(long)]
        expected: Option<PathBuf>,
        #[arg(long, default_value_t = 1000)]
        reviews_per_class: usize,
        #[arg(long, default_value_t = 5000)]
        sentences_per_class: usize,
    },
    /// Train a sentence subjectivity detector on the subjectivity dataset.
    TrainDetector {
        #[arg(long, value_enum, default_value = "nb")]
        base: Base,
        /// Also report 10-fold cross-validated accuracy.
        #[arg(long)]
        cv: bool,
    },
    /// Write per-review extracts (JSONL plus text files).
    Extract {
        #[arg(long, value_enum, default_value = "nb")]
        base: Base,
        #[arg(long, value_enum, default_value = "basic")]
        mode: Mode,
        #[arg(long, default_value_t = 3)]
        threshold: usize,
        #[arg(long, value_enum, default_value = "exponential")]
        decay: DecayArg,
        #[arg(long, default_value_t = 0.5)]
        strength: f64,
        #[arg(long, default_value_t = 1.0)]
        cross_paragraph: f64,
        /// Keep the sentences the detector discards instead.
        #[arg(long)]
        objective: bool,
        /// Keep the N most subjective sentences instead of detecting.
        #[arg(long)]
        top_n: Option<usize>,
    },
    /// Run the experiment described by a JSON spec file.
    Run {
        spec: PathBuf,
        #[arg(long)]
        folds: Option<usize>,
        #[arg(long, value_enum)]
        classifier: Option<Base>,
    },
    /// Proximity-parameter grid search for a graph detector.
    Grid {
        #[arg(long, value_enum, default_value = "nb")]
        detector: Base,
        #[arg(long, value_enum, default_value = "nb")]
        classifier: Base,
        #[arg(long, value_delimiter = ',', default_values_t = vec![1usize, 2, 3])]
        thresholds: Vec<usize>,
        #[arg(long, value_delimiter = ',', default_values_t = vec![1.0f64])]
        w: Vec<f64>,
    },
    /// Accuracy of N-sentence extracts over a range of N.
    Sweep {
        #[arg(long, value_enum, value_delimiter = ',', default_values_t = vec![Base::Nb, Base::Svm])]
        classifiers: Vec<Base>,
        #[arg(long, value_delimiter = ',', default_values_t = spec::SWEEP_NS.to_vec())]
        ns: Vec<usize>,
        #[arg(long, value_enum, value_delimiter = ',', default_values_t = vec![MethodArg::TopN, MethodArg::FirstN, MethodArg::LastN, MethodArg::LeastN])]
        methods: Vec<MethodArg>,
    },
    /// Compare max-flow cuts against exhaustive search on random instances.
    Oracle {
        #[arg(long, default_value_t = 12)]
        n_max: usize,
        #[arg(long, default_value_t = 200)]
        trials: usize,
    },
    /// Render report JSON files as text; later reports are t-tested against the first.
    Report {
        #[arg(required = true)]
        reports: Vec<PathBuf>,
    },
    /// Write a seeded synthetic corpus in the data-root layout.
    Synth {
        /// Target directory (defaults to --data-root).
        #[arg(long)]
        into: Option<PathBuf>,
        /// Small corpus (120 reviews, 800 sentences) instead of full size.
        #[arg(long)]
        small: bool,
    },
}

fn ensure_dir(dir: &Path) -> CliResult {
    fs::create_dir_all(dir)
        .map_err(|e| CliError::failure("io", format!("cannot create {}: {e}", dir.display())))
}

fn write_file(path: &Path, body: impl AsRef<[u8]>) -> CliResult {
    if let Some(parent) = path.parent() {
        ensure_dir(parent)?;
    }
    fs::write(path, body)
        .map_err(|e| CliError::failure("io", format!("cannot write {}: {e}", path.display())))
}

fn read_file(path: &Path) -> CliResult<String> {
    fs::read_to_string(path)
        .map_err(|e| CliError::usage("io", format!("cannot read {}: {e}", path.display())))
}

fn model_paths(dir: &Path, base: BaseClassifier) -> (PathBuf, PathBuf) {
    (
        dir.join(format!("detector-{base}.json")),
        dir.join(format!("detector-{base}.vocab.tsv")),
    )
}

struct App {
    data_root: Option<PathBuf>,
    output_dir: PathBuf,
    seed: Option<u64>,
    models: Option<PathBuf>,
}

impl App {
    fn root(&self) -> CliResult<DataRoot> {
        DataRoot::locate(self.data_root.as_deref())
    }

    fn detector(
        &self,
        root: &DataRoot,
        base: BaseClassifier,
        params: &ClassifierParams,
    ) -> CliResult<SubjectivityDetector> {
        if let Some(dir) = &self.models {
            let (model, vocab) = model_paths(dir, base);
            let file = ModelFile::from_json(&read_file(&model)?)?;
            let vocab = Vocabulary::from_tsv(&read_file(&vocab)?)?;
            return Ok(SubjectivityDetector::from_model_file(&file, vocab)?);
        }
        let sentences = root.load_subjectivity()?.sentences;
        Ok(SubjectivityDetector::train(&sentences, base, params)?)
    }

    fn context(
        &self,
        folds: usize,
        bases: &[BaseClassifier],
        params: &ClassifierParams,
    ) -> CliResult<ExperimentContext> {
        let root = self.root()?;
        let corpus = root.load_polarity(folds)?;
        let mut ctx = ExperimentContext::new(corpus.documents)?;
        for &b in bases {
            ctx.add_detector(self.detector(&root, b, params)?)?;
        }
        Ok(ctx)
    }

    fn write_report(&self, stem: &str, report: &ExperimentReport) -> CliResult {
        write_file(
            &self.output_dir.join(format!("{stem}.report.json")),
            report.to_json()?,
        )?;
        write_file(
            &self.output_dir.join(format!("{stem}.report.txt")),
            report.to_text(),
        )?;
        println!(
            "{stem}: mean accuracy {:.4}, preservation {:.4}",
            report.mean_accuracy, report.mean_preservation
        );
        Ok(())
    }

    fn verify_data(&self, expected: Option<&Path>, reviews: usize, sentences: usize) -> CliResult {
        let root = self.root()?;
        let mut manifest = root.load_polarity(subjex::corpus::DEFAULT_FOLDS)?.manifest;
        manifest.merge(root.load_subjectivity()?.manifest);
        let mut problems = Vec::new();
        for (name, got, want) in [
            ("positive reviews", manifest.positive_count, reviews),
            ("negative reviews", manifest.negative_count, reviews),
            ("subjective sentences", manifest.subjective_count, sentences),
            ("objective sentences", manifest.objective_count, sentences),
        ] {
            println!("{name:<22} {got}");
            if got != want {
                problems.push(format!("{name}: found {got}, expected {want}"));
            }
        }
        if let Some(path) = expected {
            let reference: CorpusManifest = serde_json::from_str(&read_file(path)?)
                .map_err(|e| CliError::usage("bad-manifest", format!("{}: {e}", path.display())))?;
            for (file, digest) in &reference.checksums {
                match manifest.checksums.get(file) {
                    None => problems.push(format!("missing file {file}")),
                    Some(d) if d != digest => problems.push(format!("changed file {file}")),
                    _ => {}
                }
            }
            for file in manifest
                .checksums
                .keys()
                .filter(|f| !reference.checksums.contains_key(*f))
            {
                problems.push(format!("unexpected file {file}"));
            }
        }
        for file in &manifest.skipped {
            problems.push(format!("skipped file {file}"));
        }
        let path = self.output_dir.join("manifest.json");
        write_file(&path, manifest.to_json()?)?;
        println!("manifest written to {}", path.display());
        if problems.is_empty() {
            Ok(())
        } else {
            Err(CliError::failure("data-mismatch", problems.join("; ")))
        }
    }

    fn train_detector(&self, base: BaseClassifier, cv: bool) -> CliResult {
        let root = self.root()?;
        let sentences = root.load_subjectivity()?.sentences;
        let params = ClassifierParams {
            svm: subjex::SvmParams {
                seed: self.seed.unwrap_or(0),
                ..Default::default()
            },
            ..Default::default()
        };
        let detector = SubjectivityDetector::train(&sentences, base, &params)?;
        let (model, vocab) = model_paths(&self.output_dir, base);
        write_file(&model, detector.to_model_file().to_json()?)?;
        write_file(&vocab, detector.vocabulary().to_tsv())?;
        println!(
            "{base} detector: {} sentences, vocabulary {}",
            sentences.len(),
            detector.vocabulary().len()
        );
        if cv {
            let k = subjex::corpus::DEFAULT_FOLDS;
            let report = detector_cross_validation(&sentences, base, k, &params)?;
            write_file(
                &self.output_dir.join(format!("detector-{base}-cv.json")),
                serde_json::to_string_pretty(&report).map_err(subjex::Error::from)? + "\n",
            )?;
            println!(
                "{base} detector {k}-fold accuracy {:.4}",
                report.mean_accuracy
            );
        }
        Ok(())
    }

    fn extract(&self, extractor: Extractor, base: BaseClassifier) -> CliResult {
        let ctx = self.context(
            subjex::corpus::DEFAULT_FOLDS,
            &[base],
            &ClassifierParams::default(),
        )?;
        let extracts = ctx.extracts(&extractor)?;
        let mut jsonl = String::new();
        for (doc, e) in ctx.documents().iter().zip(&extracts) {
            jsonl.push_str(&e.to_json_line());
            jsonl.push('\n');
            let body: String = e.sentences(doc).map(|s| format!("{s}\n")).collect();
            let path = self
                .output_dir
                .join("extracts")
                .join(doc.label.dir_name())
                .join(format!("{}.txt", doc.id));
            write_file(&path, body)?;
        }
        write_file(&self.output_dir.join("extracts.jsonl"), jsonl)?;
        println!(
            "{}: {} extracts, preservation {:.4}",
            extractor.label(),
            extracts.len(),
            subjex::extraction::preservation_rate(&extracts)
        );
        Ok(())
    }

    fn run(
        &self,
        mut spec: RunSpec,
        folds: Option<usize>,
        classifier: Option<BaseClassifier>,
    ) -> CliResult {
        spec.apply_overrides(self.seed, folds, classifier);
        let k = spec.folds().unwrap_or(subjex::corpus::DEFAULT_FOLDS);
        let ctx = self.context(k, &spec.detectors(), &ClassifierParams::default())?;
        match spec {
            RunSpec::Experiment {
                config,
                compare_with,
            } => {
                let mut report = run_experiment(&ctx, &config)?;
                for other in compare_with {
                    let other_cfg = ExperimentConfig {
                        name: None,
                        ..config.with_extractor(other)
                    };
                    let other_report = run_experiment(&ctx, &other_cfg)?;
                    report.compare(&other_report)?;
                    self.write_report(
                        &format!("experiment-{}", other_report.config_digest),
                        &other_report,
                    )?;
                }
                let stem = config
                    .name
                    .clone()
                    .unwrap_or_else(|| format!("experiment-{}", report.config_digest));
                self.write_report(&stem, &report)
            }
            RunSpec::Grid(g) => self.grid_outputs(&ctx, &g.base, &g.grid),
            RunSpec::Sweep(s) => {
                let base = ExperimentConfig {
                    seed: s.seed,
                    params: s.params,
                    ..ExperimentConfig::new(Extractor::FullReview, BaseClassifier::Nb)
                };
                self.sweep_outputs(&ctx, &base, &s.methods, &s.ns, &s.classifiers)
            }
            RunSpec::Paragraph(p) => {
                for c in &p.classifiers {
                    let base = ExperimentConfig {
                        seed: p.seed,
                        params: p.params,
                        ..ExperimentConfig::new(Extractor::FullReview, *c)
                    };
                    let cmp = paragraph_comparison(&ctx, &base, p.detector, &p.grid)?;
                    let stem = format!("paragraph-{}-{c}", p.detector);
                    write_file(
                        &self.output_dir.join(format!("{stem}-grid.csv")),
                        cmp.grid.to_csv(),
                    )?;
                    self.write_report(&format!("{stem}-graph"), &cmp.graph)?;
                    self.write_report(&format!("{stem}-unit"), &cmp.paragraph_unit)?;
                }
                Ok(())
            }
        }
    }

    fn grid_outputs(
        &self,
        ctx: &ExperimentContext,
        base: &ExperimentConfig,
        grid: &ProximityGrid,
    ) -> CliResult {
        let result = grid_search(ctx, base, grid)?;
        write_file(&self.output_dir.join("grid.csv"), result.to_csv())?;
        println!("{} grid cells written to grid.csv", result.cells.len());
        self.write_report("grid-best", &result.best)
    }

    fn sweep_outputs(
        &self,
        ctx: &ExperimentContext,
        base: &ExperimentConfig,
        methods: &[SweepMethod],
        ns: &[usize],
        classifiers: &[BaseClassifier],
    ) -> CliResult {
        let result = n_sentence_sweep(ctx, base, methods, ns, classifiers)?;
        write_file(&self.output_dir.join("sweep.csv"), result.to_csv())?;
        write_file(
            &self.output_dir.join("sweep.json"),
            serde_json::to_string_pretty(&result).map_err(subjex::Error::from)? + "\n",
        )?;
        for r in &result.rows {
            println!(
                "{:<8} N={:<3} {:<4} accuracy {:.4} preservation {:.4}",
                r.method.name(),
                r.n,
                r.classifier,
                r.mean_accuracy,
                r.mean_preservation
            );
        }
        Ok(())
    }

    fn report(&self, paths: &[PathBuf]) -> CliResult {
        let mut reports = paths
            .iter()
            .map(|p| {
                ExperimentReport::from_json(&read_file(p)?)
                    .map_err(|e| CliError::usage("bad-report", format!("{}: {e}", p.display())))
            })
            .collect::<CliResult<Vec<_>>>()?;
        let (first, rest) = reports.split_first_mut().expect("clap requires one report");
        for other in rest.iter() {
            first.compare(other)?;
        }
        print!("{}", first.to_text());
        for other in rest.iter() {
            print!("\n{}", other.to_text());
        }
        Ok(())
    }

    fn oracle(&self, n_max: usize, trials: usize) -> CliResult {
        if n_max > subjex::mincut::BRUTE_FORCE_LIMIT {
            return Err(CliError::usage(
                "config",
                format!(
                    "n-max {n_max} exceeds the exhaustive-search limit {}",
                    subjex::mincut::BRUTE_FORCE_LIMIT
                ),
            ));
        }
        if trials == 0 {
            log::warn!("oracle run with zero random trials; only the worked example is checked");
        }
        let summary = oracle::run(n_max, trials, self.seed.unwrap_or(0))?;
        println!(
            "worked example: source side {:?}, cost {:.1}",
            summary.fixture_side, summary.fixture_cost
        );
        match summary.counterexample {
            None => {
                println!(
                    "oracle: pass ({} random instances, n <= {n_max})",
                    summary.trials
                );
                Ok(())
            }
            Some(c) => {
                println!(
                    "counterexample trial {}: ind1 {:?} assoc {:?} flow {:?}={} exhaustive {:?}={}",
                    c.trial,
                    c.individual,
                    c.association,
                    c.flow_side,
                    c.flow_value,
                    c.oracle_side,
                    c.oracle_value
                );
                Err(CliError::failure(
                    "oracle-mismatch",
                    format!("trial {} disagrees with exhaustive search", c.trial),
                ))
            }
        }
    }

    fn synth(&self, into: Option<&Path>, small: bool) -> CliResult {
        let dir = into
            .or(self.data_root.as_deref())
            .ok_or_else(|| CliError::usage("missing-target", "pass --into or --data-root"))?;
        let seed = self.seed.unwrap_or(0);
        let config = if small {
            SyntheticConfig::small(seed)
        } else {
            SyntheticConfig::full_size(seed)
        };
        let corpus = SyntheticCorpus::generate(&config);
        corpus.write_polarity(&dir.join(data::POLARITY_DIRS[0]))?;
        corpus.write_subjectivity(&dir.join(data::SUBJECTIVITY_DIRS[0]))?;
        println!(
            "synthetic corpus: {} reviews, {} sentences in {}",
            corpus.reviews.len(),
            corpus.sentences.len(),
            dir.display()
        );
        Ok(())
    }
}

fn dispatch(cli: Cli) -> CliResult {
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(CliError::usage("config", "--threads must be at least 1"));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::failure("threads", e.to_string()))?;
    }
    let app = App {
        data_root: cli.data_root,
        output_dir: cli.output_dir,
        seed: cli.seed,
        models: cli.models,
    };
    match cli.command {
        Command::VerifyData {
            expected,
            reviews_per_class,
            sentences_per_class,
        } => app.verify_data(expected.as_deref(), reviews_per_class, sentences_per_class),
        Command::TrainDetector { base, cv } => app.train_detector(base.into(), cv),
        Command::Extract {
            base,
            mode,
            threshold,
            decay,
            strength,
            cross_paragraph,
            objective,
            top_n,
        } => {
            let base = BaseClassifier::from(base);
            let extractor = if let Some(n) = top_n {
                if objective {
                    return Err(CliError::usage(
                        "config",
                        "--top-n and --objective are exclusive",
                    ));
                }
                Extractor::TopN { n }
            } else {
                let config = match mode {
                    Mode::Basic => DetectorConfig::basic(base),
                    Mode::Graph => DetectorConfig::graph(
                        base,
                        ProximityParams::new(threshold, decay.into(), strength)
                            .with_cross_paragraph(cross_paragraph),
                    ),
                    Mode::ParagraphUnit => DetectorConfig::paragraph_unit(base),
                };
                if objective {
                    Extractor::Flipped(config)
                } else {
                    Extractor::Detector(config)
                }
            };
            let needed = if top_n.is_some() {
                BaseClassifier::Nb
            } else {
                base
            };
            app.extract(extractor, needed)
        }
        Command::Run {
            spec,
            folds,
            classifier,
        } => {
            let parsed = spec::parse(&read_file(&spec)?)?;
            app.run(parsed, folds, classifier.map(Into::into))
        }
        Command::Grid {
            detector,
            classifier,
            thresholds,
            w,
        } => {
            let detector = BaseClassifier::from(detector);
            let base = ExperimentConfig {
                seed: app.seed.unwrap_or(0),
                ..ExperimentConfig::new(
                    Extractor::Detector(DetectorConfig::basic(detector)),
                    classifier.into(),
                )
            };
            let grid = ProximityGrid {
                thresholds,
                cross_paragraph: w,
                ..ProximityGrid::default()
            };
            let ctx = app.context(base.folds, &[detector], &base.params)?;
            app.grid_outputs(&ctx, &base, &grid)
        }
        Command::Sweep {
            classifiers,
            ns,
            methods,
        } => {
            let base = ExperimentConfig {
                seed: app.seed.unwrap_or(0),
                ..ExperimentConfig::new(Extractor::FullReview, BaseClassifier::Nb)
            };
            let methods: Vec<SweepMethod> = methods.into_iter().map(Into::into).collect();
            let classifiers: Vec<BaseClassifier> =
                classifiers.into_iter().map(Into::into).collect();
            let ctx = app.context(base.folds, &[BaseClassifier::Nb], &base.params)?;
            app.sweep_outputs(&ctx, &base, &methods, &ns, &classifiers)
        }
        Command::Oracle { n_max, trials } => app.oracle(n_max, trials),
        Command::Report { reports } => app.report(&reports),
        Command::Synth { into, small } => app.synth(into.as_deref(), small),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match dispatch(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(e.code)
        }
    }
}
