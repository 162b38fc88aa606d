//! Run configuration: a TOML file plus command-line overrides.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};
use svf_core::classify::{FeatureSet, SvmParams, MNB_METHOD};
use svf_core::corpus::{Label, RESOURCE_DIR_ENV};
use svf_core::stats::AnalysisOptions;

pub const DEFAULT_SEED: u64 = 20190605;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Paths {
    /// Canonical corpus file (written by `ingest`, read by later steps).
    pub corpus: PathBuf,
    pub resources: PathBuf,
    pub catalog: PathBuf,
    pub output: PathBuf,
    /// Raw story directory used by `run`; `ingest` takes it as an argument.
    pub raw_dataset: Option<PathBuf>,
}

impl Default for Paths {
    fn default() -> Self {
        Paths {
            corpus: PathBuf::from("out/corpus.jsonl"),
            resources: PathBuf::from("resources/manifest.toml"),
            catalog: PathBuf::from("resources/catalog.toml"),
            output: PathBuf::from("out"),
            raw_dataset: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExternalPredictions {
    /// Row label in the comparison table.
    pub method: String,
    pub path: PathBuf,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub paths: Paths,
    pub seed: u64,
    pub k: usize,
    pub alpha: f64,
    pub positive_class: Label,
    /// Built-in methods: `mnb`, `svm-coh`, `svm-raw`, `svm-pca`.
    pub methods: Vec<String>,
    pub baseline: String,
    pub limit: Option<usize>,
    pub analysis: AnalysisSection,
    pub svm: SvmSection,
    pub external: Vec<ExternalPredictions>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AnalysisSection {
    pub rotate: bool,
    pub kaiser_normalize: bool,
}

impl Default for AnalysisSection {
    fn default() -> Self {
        AnalysisSection {
            rotate: true,
            kaiser_normalize: true,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SvmSection {
    pub lambda: f64,
    pub epochs: usize,
}

impl Default for SvmSection {
    fn default() -> Self {
        let p = SvmParams::default();
        SvmSection {
            lambda: p.lambda,
            epochs: p.epochs,
        }
    }
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            paths: Paths::default(),
            seed: DEFAULT_SEED,
            k: 10,
            alpha: 0.05,
            positive_class: Label::Fake,
            methods: vec![
                MNB_METHOD.to_string(),
                FeatureSet::Survivors.method_name().to_string(),
            ],
            baseline: MNB_METHOD.to_string(),
            limit: None,
            analysis: AnalysisSection::default(),
            svm: SvmSection::default(),
            external: Vec::new(),
        }
    }
}

/// Built-in classifier selected by a method name.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Mnb,
    Svm(FeatureSet),
}

impl Method {
    pub fn parse(name: &str) -> Result<Method> {
        Ok(match name {
            "mnb" => Method::Mnb,
            "svm-coh" => Method::Svm(FeatureSet::Survivors),
            "svm-raw" => Method::Svm(FeatureSet::Raw),
            "svm-pca" => Method::Svm(FeatureSet::Pca),
            other => bail!("unknown method `{other}` (mnb, svm-coh, svm-raw, svm-pca)"),
        })
    }
}

/// Per-field overrides taken from the command line.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub k: Option<usize>,
    pub alpha: Option<f64>,
    pub positive_class: Option<Label>,
    pub methods: Option<Vec<String>>,
    pub limit: Option<usize>,
    pub output: Option<PathBuf>,
    pub corpus: Option<PathBuf>,
}

impl RunConfig {
    /// Reads `path` when given, otherwise starts from defaults; relative
    /// paths in the file are resolved against the file's directory.
    pub fn load(path: Option<&Path>) -> Result<RunConfig> {
        let mut cfg = match path {
            Some(p) => {
                let text = std::fs::read_to_string(p)
                    .with_context(|| format!("reading config {}", p.display()))?;
                let mut cfg: RunConfig = toml::from_str(&text)
                    .map_err(|e| svf_core::Error::Config(format!("{}: {e}", p.display())))?;
                let base = p.parent().unwrap_or(Path::new(""));
                cfg.paths.resolve(base);
                for e in &mut cfg.external {
                    if e.path.is_relative() {
                        e.path = base.join(&e.path);
                    }
                }
                cfg
            }
            None => RunConfig::default(),
        };
        if let Some(dir) = std::env::var_os(RESOURCE_DIR_ENV) {
            let dir = PathBuf::from(dir);
            if path.is_none() || !cfg.paths.resources.is_file() {
                cfg.paths.resources = dir.join("manifest.toml");
            }
            if !cfg.paths.catalog.is_file() {
                cfg.paths.catalog = dir.join("catalog.toml");
            }
        }
        Ok(cfg)
    }

    pub fn apply(&mut self, o: &Overrides) {
        if let Some(v) = o.seed {
            self.seed = v;
        }
        if let Some(v) = o.k {
            self.k = v;
        }
        if let Some(v) = o.alpha {
            self.alpha = v;
        }
        if let Some(v) = o.positive_class {
            self.positive_class = v;
        }
        if let Some(v) = &o.methods {
            self.methods = v.clone();
        }
        if let Some(v) = o.limit {
            self.limit = Some(v);
        }
        if let Some(v) = &o.output {
            self.paths.output = v.clone();
        }
        if let Some(v) = &o.corpus {
            self.paths.corpus = v.clone();
        }
    }

    /// Checks value ranges and method names; path existence is checked by
    /// each command for the inputs it reads.
    pub fn validate(&self) -> Result<()> {
        let invalid = |msg: String| -> Result<()> { Err(svf_core::Error::Config(msg).into()) };
        if self.k < 2 {
            return invalid(format!("k must be at least 2, got {}", self.k));
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return invalid(format!("alpha must lie in (0, 1), got {}", self.alpha));
        }
        if self.methods.is_empty() && self.external.is_empty() {
            return invalid("no methods selected".into());
        }
        for m in &self.methods {
            if let Err(e) = Method::parse(m) {
                return invalid(e.to_string());
            }
        }
        if self.limit == Some(0) {
            return invalid("limit must be positive".into());
        }
        if !(self.svm.lambda > 0.0) || self.svm.epochs == 0 {
            return invalid("svm.lambda must be positive and svm.epochs at least 1".into());
        }
        Ok(())
    }

    pub fn analysis_options(&self) -> AnalysisOptions {
        AnalysisOptions {
            rotate: self.analysis.rotate,
            kaiser_normalize: self.analysis.kaiser_normalize,
            alpha: self.alpha,
        }
    }

    pub fn svm_params(&self) -> SvmParams {
        SvmParams {
            lambda: self.svm.lambda,
            epochs: self.svm.epochs,
            seed: self.seed,
        }
    }

    pub fn out(&self, name: &str) -> PathBuf {
        self.paths.output.join(name)
    }
}

impl Paths {
    fn resolve(&mut self, base: &Path) {
        for p in [
            &mut self.corpus,
            &mut self.resources,
            &mut self.catalog,
            &mut self.output,
        ] {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        }
        if let Some(p) = &mut self.raw_dataset {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        }
    }
}

pub fn require_file(path: &Path, what: &str) -> Result<()> {
    if !path.is_file() {
        return Err(
            svf_core::Error::Config(format!("{what} not found at {}", path.display())).into(),
        );
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_validate() {
        RunConfig::default().validate().unwrap();
    }

    #[test]
    fn overrides_win_and_bad_values_fail() {
        let mut c = RunConfig::default();
        c.apply(&Overrides {
            seed: Some(7),
            k: Some(1),
            ..Default::default()
        });
        assert_eq!(c.seed, 7);
        assert!(c.validate().is_err());
        let mut c = RunConfig::default();
        c.methods = vec!["gbm".into()];
        assert!(c.validate().is_err());
    }

    #[test]
    fn toml_round_trip() {
        let text = toml::to_string(&RunConfig::default()).unwrap();
        let back: RunConfig = toml::from_str(&text).unwrap();
        assert_eq!(back, RunConfig::default());
        assert!(toml::from_str::<RunConfig>("sed = 3").is_err());
    }

    #[test]
    fn shipped_config_matches_defaults() {
        let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../svf.toml");
        let cfg = RunConfig::load(Some(&path)).unwrap();
        cfg.validate().unwrap();
        let d = RunConfig::default();
        assert_eq!(
            (cfg.seed, cfg.k, cfg.alpha, cfg.positive_class),
            (d.seed, d.k, d.alpha, d.positive_class)
        );
        assert_eq!(cfg.methods, d.methods);
        assert_eq!((cfg.svm, cfg.analysis), (d.svm, d.analysis));
        assert!(cfg.paths.raw_dataset.unwrap().ends_with("data/raw"));
    }
}
