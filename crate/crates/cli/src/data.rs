//! Data-root layout: `<root>/polarity/{pos,neg}/*.txt` and
//! `<root>/subjectivity/{quote,plot}.tok.gt9.5000`. The archive directory
//! names `txt_sentoken` and `rotten_imdb` are accepted as well.

use std::path::{Path, PathBuf};

use subjex::corpus::{
    load_polarity_dataset_with, load_subjectivity_dataset, LoadOptions, PolarityCorpus,
    SubjectivityCorpus,
};
use subjex::synthetic::{PLOT_FILE, QUOTE_FILE};

use crate::CliError;

pub const POLARITY_DIRS: [&str; 2] = ["polarity", "txt_sentoken"];
pub const SUBJECTIVITY_DIRS: [&str; 2] = ["subjectivity", "rotten_imdb"];
pub const PARAGRAPH_SIDECAR: &str = "paragraphs.tsv";

pub struct DataRoot {
    pub polarity: PathBuf,
    pub subjectivity: PathBuf,
}

fn first_existing(root: &Path, names: &[&str]) -> Option<PathBuf> {
    names.iter().map(|n| root.join(n)).find(|p| p.is_dir())
}

impl DataRoot {
    pub fn locate(root: Option<&Path>) -> Result<Self, CliError> {
        let root = root.ok_or_else(|| {
            CliError::usage(
                "missing-data-root",
                "no data root given; pass --data-root or set SUBJEX_DATA_ROOT",
            )
        })?;
        if !root.is_dir() {
            return Err(CliError::usage(
                "bad-data-root",
                format!("data root {} is not a directory", root.display()),
            ));
        }
        let polarity = first_existing(root, &POLARITY_DIRS).ok_or_else(|| {
            CliError::usage(
                "bad-data-root",
                format!(
                    "{} has no polarity/ (or txt_sentoken/) directory",
                    root.display()
                ),
            )
        })?;
        let subjectivity = first_existing(root, &SUBJECTIVITY_DIRS).ok_or_else(|| {
            CliError::usage(
                "bad-data-root",
                format!(
                    "{} has no subjectivity/ (or rotten_imdb/) directory",
                    root.display()
                ),
            )
        })?;
        Ok(Self {
            polarity,
            subjectivity,
        })
    }

    pub fn load_polarity(&self, folds: usize) -> Result<PolarityCorpus, CliError> {
        let sidecar = self.polarity.join(PARAGRAPH_SIDECAR);
        let opts = LoadOptions {
            folds,
            paragraph_sidecar: sidecar.is_file().then_some(sidecar),
        };
        Ok(load_polarity_dataset_with(&self.polarity, &opts)?)
    }

    pub fn load_subjectivity(&self) -> Result<SubjectivityCorpus, CliError> {
        Ok(load_subjectivity_dataset(
            self.subjectivity.join(QUOTE_FILE),
            self.subjectivity.join(PLOT_FILE),
        )?)
    }
}
