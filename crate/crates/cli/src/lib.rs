//! Command-line driver: ingest, extract, analyze and evaluate in one binary.
//!
//! Exit codes: 0 success, 1 other failure, 2 invalid input or configuration,
//! 3 non-convergence, 4 I/O failure.

pub mod commands;
pub mod config;

use std::path::PathBuf;

use anyhow::Result;
use clap::{Args, Parser, Subcommand};
use svf_core::corpus::Label;
use svf_core::textproc::TrainConfig;
use svf_core::ErrorKind;

use config::{ExternalPredictions, Overrides, RunConfig};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_VALIDATION: i32 = 2;
pub const EXIT_CONVERGENCE: i32 = 3;
pub const EXIT_IO: i32 = 4;

#[derive(Debug, Parser)]
#[command(
    name = "svf",
    version,
    about = "Coherence features for fake news vs. satire"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args, Default)]
pub struct Common {
    /// TOML run configuration.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Number of folds.
    #[arg(long, global = true)]
    pub k: Option<usize>,
    /// Significance level for backward elimination.
    #[arg(long, global = true)]
    pub alpha: Option<f64>,
    #[arg(long, global = true, value_parser = parse_label)]
    pub positive_class: Option<Label>,
    /// Comma-separated: mnb, svm-coh, svm-raw, svm-pca.
    #[arg(long, global = true, value_delimiter = ',')]
    pub methods: Option<Vec<String>>,
    /// Use only the first N articles of the corpus.
    #[arg(long, global = true)]
    pub limit: Option<usize>,
    /// Output directory.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    /// Canonical corpus file.
    #[arg(long, global = true)]
    pub corpus: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Convert a raw story directory into the corpus file.
    Ingest {
        raw_dir: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Write the stratified fold plan.
    Folds(Common),
    /// Compute the feature table.
    Extract(Common),
    /// PCA, logistic regression and backward elimination on the feature table.
    Analyze(Common),
    /// Cross-validate the configured methods and compare them.
    Evaluate {
        #[command(flatten)]
        common: Common,
        /// Extra prediction file as METHOD=PATH; repeatable.
        #[arg(long, value_parser = parse_external)]
        external: Vec<ExternalPredictions>,
    },
    /// Train a tagger model from `word/TAG` sentences.
    TrainTagger {
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 5)]
        iterations: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
    /// Ingest (if configured), extract, analyze and evaluate.
    Run(Common),
}

fn parse_label(s: &str) -> Result<Label, String> {
    s.parse().map_err(|e: svf_core::Error| e.to_string())
}

fn parse_external(s: &str) -> Result<ExternalPredictions, String> {
    let (method, path) = s.split_once('=').ok_or("expected METHOD=PATH")?;
    if method.is_empty() || path.is_empty() {
        return Err("expected METHOD=PATH".into());
    }
    Ok(ExternalPredictions {
        method: method.to_string(),
        path: PathBuf::from(path),
    })
}

impl Common {
    pub fn resolve(&self) -> Result<RunConfig> {
        let mut cfg = RunConfig::load(self.config.as_deref())?;
        cfg.apply(&Overrides {
            seed: self.seed,
            k: self.k,
            alpha: self.alpha,
            positive_class: self.positive_class,
            methods: self.methods.clone(),
            limit: self.limit,
            output: self.output.clone(),
            corpus: self.corpus.clone(),
        });
        cfg.validate()?;
        Ok(cfg)
    }
}

pub fn execute(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Ingest { raw_dir, out } => {
            commands::ingest(&raw_dir, &out)?;
        }
        Command::Folds(c) => {
            commands::folds(&c.resolve()?)?;
        }
        Command::Extract(c) => {
            commands::extract(&c.resolve()?)?;
        }
        Command::Analyze(c) => {
            commands::analyze(&c.resolve()?)?;
        }
        Command::Evaluate { common, external } => {
            let mut cfg = common.resolve()?;
            cfg.external.extend(external);
            commands::evaluate_methods(&cfg)?;
        }
        Command::TrainTagger {
            input,
            out,
            iterations,
            seed,
        } => {
            let config = TrainConfig {
                iterations,
                seed,
                ..TrainConfig::default()
            };
            commands::train_tagger(&input, &out, &config)?;
        }
        Command::Run(c) => {
            commands::run(&c.resolve()?)?;
        }
    }
    Ok(())
}

/// Maps an error to its exit code by the first typed cause in the chain.
pub fn exit_code(err: &anyhow::Error) -> i32 {
    for cause in err.chain() {
        if let Some(e) = cause.downcast_ref::<svf_core::Error>() {
            return match e.kind() {
                ErrorKind::Io => EXIT_IO,
                ErrorKind::Validation => EXIT_VALIDATION,
                ErrorKind::Convergence => EXIT_CONVERGENCE,
            };
        }
        if cause.downcast_ref::<std::io::Error>().is_some() {
            return EXIT_IO;
        }
    }
    EXIT_FAILURE
}
