//! Experiment specification files for `subjex run`.
//!
//! A spec is either a bare experiment config (an object with an `extractor`
//! key) or an object with exactly one of `experiment`, `grid`, `sweep` or
//! `paragraph_comparison`.

use serde::Deserialize;
use serde_json::Value;

use subjex::evaluation::{ExperimentConfig, Extractor, ProximityGrid, SweepMethod};
use subjex::extraction::{BaseClassifier, ClassifierParams};

use crate::CliError;

pub const SWEEP_NS: [usize; 7] = [1, 5, 10, 15, 20, 30, 40];
pub const PARAGRAPH_W: [f64; 4] = [0.25, 0.5, 0.75, 1.0];

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpecFile {
    #[serde(default)]
    pub experiment: Option<ExperimentConfig>,
    /// Extractors run with the same classifier and compared by paired t-test.
    #[serde(default)]
    pub compare_with: Vec<Extractor>,
    #[serde(default)]
    pub grid: Option<GridSpec>,
    #[serde(default)]
    pub sweep: Option<SweepSpec>,
    #[serde(default)]
    pub paragraph_comparison: Option<ParagraphSpec>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub base: ExperimentConfig,
    #[serde(default)]
    pub grid: ProximityGrid,
}

fn all_methods() -> Vec<SweepMethod> {
    SweepMethod::ALL.to_vec()
}

fn sweep_ns() -> Vec<usize> {
    SWEEP_NS.to_vec()
}

fn both_classifiers() -> Vec<BaseClassifier> {
    vec![BaseClassifier::Nb, BaseClassifier::Svm]
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    #[serde(default = "all_methods")]
    pub methods: Vec<SweepMethod>,
    #[serde(default = "sweep_ns")]
    pub ns: Vec<usize>,
    #[serde(default = "both_classifiers")]
    pub classifiers: Vec<BaseClassifier>,
    #[serde(default)]
    pub params: ClassifierParams,
    #[serde(default)]
    pub seed: u64,
}

impl Default for SweepSpec {
    fn default() -> Self {
        Self {
            methods: all_methods(),
            ns: sweep_ns(),
            classifiers: both_classifiers(),
            params: ClassifierParams::default(),
            seed: 0,
        }
    }
}

fn svm() -> BaseClassifier {
    BaseClassifier::Svm
}

pub fn paragraph_grid() -> ProximityGrid {
    ProximityGrid {
        cross_paragraph: PARAGRAPH_W.to_vec(),
        ..ProximityGrid::default()
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParagraphSpec {
    #[serde(default = "svm")]
    pub detector: BaseClassifier,
    #[serde(default = "both_classifiers")]
    pub classifiers: Vec<BaseClassifier>,
    #[serde(default = "paragraph_grid")]
    pub grid: ProximityGrid,
    #[serde(default)]
    pub params: ClassifierParams,
    #[serde(default)]
    pub seed: u64,
}

#[derive(Debug, Clone)]
pub enum RunSpec {
    Experiment {
        config: ExperimentConfig,
        compare_with: Vec<Extractor>,
    },
    Grid(GridSpec),
    Sweep(SweepSpec),
    Paragraph(ParagraphSpec),
}

fn bad_spec(e: serde_json::Error) -> CliError {
    let message = e.to_string();
    if message.contains("expected one of") {
        return CliError::usage("bad-spec", message);
    }
    let valid = Extractor::NAMES.join(", ");
    CliError::usage(
        "bad-spec",
        format!("{message} (valid extractor types: {valid})"),
    )
}

pub fn parse(text: &str) -> Result<RunSpec, CliError> {
    let value: Value = serde_json::from_str(text).map_err(bad_spec)?;
    if value.get("extractor").is_some() {
        let config = serde_json::from_value(value).map_err(bad_spec)?;
        return Ok(RunSpec::Experiment {
            config,
            compare_with: Vec::new(),
        });
    }
    let file: SpecFile = serde_json::from_value(value).map_err(bad_spec)?;
    let mut found = Vec::new();
    if let Some(config) = file.experiment {
        found.push(RunSpec::Experiment {
            config,
            compare_with: file.compare_with,
        });
    } else if !file.compare_with.is_empty() {
        return Err(CliError::usage(
            "bad-spec",
            "compare_with needs an experiment",
        ));
    }
    found.extend(file.grid.map(RunSpec::Grid));
    found.extend(file.sweep.map(RunSpec::Sweep));
    found.extend(file.paragraph_comparison.map(RunSpec::Paragraph));
    match found.len() {
        1 => Ok(found.pop().expect("one spec")),
        0 => Err(CliError::usage(
            "bad-spec",
            "spec needs one of: extractor, experiment, grid, sweep, paragraph_comparison",
        )),
        _ => Err(CliError::usage(
            "bad-spec",
            "spec may hold only one experiment kind",
        )),
    }
}

impl RunSpec {
    /// Detector bases the spec needs.
    pub fn detectors(&self) -> Vec<BaseClassifier> {
        fn of(e: &Extractor) -> Option<BaseClassifier> {
            match e {
                Extractor::Detector(d) | Extractor::Flipped(d) => Some(d.base),
                Extractor::TopN { .. } | Extractor::LeastN { .. } => Some(BaseClassifier::Nb),
                _ => None,
            }
        }
        let mut out: Vec<BaseClassifier> = match self {
            RunSpec::Experiment {
                config,
                compare_with,
            } => std::iter::once(&config.extractor)
                .chain(compare_with)
                .filter_map(of)
                .collect(),
            RunSpec::Grid(g) => of(&g.base.extractor).into_iter().collect(),
            RunSpec::Sweep(s) => s
                .methods
                .iter()
                .any(|m| matches!(m, SweepMethod::TopN | SweepMethod::LeastN))
                .then_some(BaseClassifier::Nb)
                .into_iter()
                .collect(),
            RunSpec::Paragraph(p) => vec![p.detector],
        };
        out.sort();
        out.dedup();
        out
    }

    /// Applies command-line overrides to every config in the spec.
    pub fn apply_overrides(
        &mut self,
        seed: Option<u64>,
        folds: Option<usize>,
        classifier: Option<BaseClassifier>,
    ) {
        let patch = |c: &mut ExperimentConfig| {
            if let Some(s) = seed {
                c.seed = s;
            }
            if let Some(f) = folds {
                c.folds = f;
            }
            if let Some(k) = classifier {
                c.classifier = k;
            }
        };
        match self {
            RunSpec::Experiment { config, .. } => patch(config),
            RunSpec::Grid(g) => patch(&mut g.base),
            RunSpec::Sweep(s) => {
                if let Some(v) = seed {
                    s.seed = v;
                }
                if let Some(k) = classifier {
                    s.classifiers = vec![k];
                }
            }
            RunSpec::Paragraph(p) => {
                if let Some(v) = seed {
                    p.seed = v;
                }
                if let Some(k) = classifier {
                    p.classifiers = vec![k];
                }
            }
        }
    }

    pub fn folds(&self) -> Option<usize> {
        match self {
            RunSpec::Experiment { config, .. } => Some(config.folds),
            RunSpec::Grid(g) => Some(g.base.folds),
            _ => None,
        }
    }
}
