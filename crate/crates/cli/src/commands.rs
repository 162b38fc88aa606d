use std::collections::HashMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use log::{info, warn};
use svf_core::classify::{
    check_predictions, compare_methods, cross_validate_mnb, cross_validate_svm, evaluate,
    make_folds, read_predictions, write_folds, write_predictions, ComparisonTable, EvalReport,
    Prediction, SplitPlan,
};
use svf_core::corpus::{
    ingest_dir, load_corpus, load_resources, read_features, write_corpus, write_features,
    write_flags, Corpus, Label,
};
use svf_core::features::{extract_matrix, IndexCatalog};
use svf_core::stats::{
    analyze_matrix, component_labels, direction_check, fit_logistic, fit_pca, fit_to_string,
    pca_to_string, project_scores, standardize, varimax_rotate, Analysis,
};
use svf_core::textproc::{parse_training_text, Tagger, TrainConfig};
use svf_core::{Error, FeatureMatrix};

use crate::config::{require_file, ExternalPredictions, Method, RunConfig};

/// Share of unreadable story files above which ingestion fails.
pub const MAX_REJECTION_RATE: f64 = 0.05;

pub const FOLDS_FILE: &str = "folds.csv";
pub const FEATURES_FILE: &str = "features.csv";
pub const FLAGS_FILE: &str = "features.flags.csv";
pub const DIAGNOSTICS_FILE: &str = "analyze.diagnostics.txt";

fn write_file(path: &Path, contents: impl AsRef<[u8]>) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|source| Error::Io {
            path: dir.to_path_buf(),
            source,
        })?;
    }
    fs::write(path, contents).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    Ok(())
}

fn ensure_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|source| Error::Io {
        path: dir.to_path_buf(),
        source,
    })?;
    Ok(())
}

pub fn rejection_report_path(out: &Path) -> PathBuf {
    let mut name = out
        .file_name()
        .map(|n| n.to_os_string())
        .unwrap_or_default();
    name.push(".rejections.tsv");
    out.with_file_name(name)
}

pub fn ingest(raw: &Path, out: &Path) -> Result<Corpus> {
    let report = ingest_dir(raw)?;
    let mut tsv = String::from("file\tposition\treason\n");
    for (path, r) in &report.rejections {
        let rel = path.strip_prefix(raw).unwrap_or(path);
        writeln!(
            tsv,
            "{}\t{}\t{}",
            rel.display(),
            r.line,
            r.reason.replace(['\t', '\n'], " ")
        )
        .unwrap();
    }
    let report_path = rejection_report_path(out);
    write_file(&report_path, tsv)?;
    for (path, r) in &report.rejections {
        warn!("rejected {}: {}", path.display(), r.reason);
    }
    if report.rejection_rate() > MAX_REJECTION_RATE {
        return Err(Error::Validation(format!(
            "{} of {} story files rejected (more than {:.0}%), see {}",
            report.rejections.len(),
            report.files_seen,
            MAX_REJECTION_RATE * 100.0,
            report_path.display()
        ))
        .into());
    }
    if let Some(dir) = out.parent().filter(|d| !d.as_os_str().is_empty()) {
        ensure_dir(dir)?;
    }
    write_corpus(&report.corpus, out)?;
    println!("{}", report.corpus.counts());
    Ok(report.corpus)
}

/// Loads the corpus named in the config, truncated to `limit` when set.
pub fn load_config_corpus(cfg: &RunConfig) -> Result<Corpus> {
    require_file(&cfg.paths.corpus, "corpus file")?;
    let load = load_corpus(&cfg.paths.corpus)?;
    for r in &load.rejections {
        warn!(
            "{}: line {}: {}",
            cfg.paths.corpus.display(),
            r.line,
            r.reason
        );
    }
    let corpus = match cfg.limit {
        Some(n) => load.corpus.truncated(n),
        None => load.corpus,
    };
    if corpus.is_empty() {
        return Err(
            Error::Validation(format!("no articles in {}", cfg.paths.corpus.display())).into(),
        );
    }
    info!("corpus: {}", corpus.counts());
    Ok(corpus)
}

fn label_map(corpus: &Corpus) -> HashMap<String, Label> {
    corpus
        .articles()
        .iter()
        .map(|a| (a.id.clone(), a.label))
        .collect()
}

pub fn folds(cfg: &RunConfig) -> Result<SplitPlan> {
    let corpus = load_config_corpus(cfg)?;
    let plan = make_folds(corpus.articles(), cfg.k, cfg.seed)?;
    ensure_dir(&cfg.paths.output)?;
    write_folds(&plan, cfg.out(FOLDS_FILE))?;
    let sizes: Vec<String> = plan.fold_sizes().iter().map(usize::to_string).collect();
    println!(
        "{} folds, seed {}: sizes {}",
        plan.k,
        plan.seed,
        sizes.join(" ")
    );
    Ok(plan)
}

pub fn extract(cfg: &RunConfig) -> Result<FeatureMatrix> {
    let corpus = load_config_corpus(cfg)?;
    require_file(&cfg.paths.resources, "resource manifest")?;
    require_file(&cfg.paths.catalog, "index catalog")?;
    let loaded = load_resources(&cfg.paths.resources)?;
    for r in &loaded.reports {
        info!(
            "{}: {} entries, {} skipped ({})",
            r.name,
            r.entries,
            r.skipped,
            r.path.display()
        );
    }
    let catalog = IndexCatalog::load(&cfg.paths.catalog)?;
    let extracted = extract_matrix(corpus.articles(), &loaded.bundle, &catalog)?;
    ensure_dir(&cfg.paths.output)?;
    let m = &extracted.matrix;
    write_features(m, cfg.out(FEATURES_FILE))?;
    write_flags(
        &m.row_ids,
        &m.column_names,
        &extracted.defaulted,
        cfg.out(FLAGS_FILE),
    )?;
    let defaulted: usize = extracted.defaulted.iter().flatten().filter(|&&f| f).count();
    println!(
        "{} rows x {} indices ({} defaulted cells)",
        m.nrows(),
        m.ncols(),
        defaulted
    );
    Ok(extracted.matrix)
}

fn read_feature_table(cfg: &RunConfig) -> Result<FeatureMatrix> {
    let path = cfg.out(FEATURES_FILE);
    require_file(&path, "feature table (run `extract` first)")?;
    Ok(read_features(&path)?)
}

fn binary_labels(matrix: &FeatureMatrix, labels: &HashMap<String, Label>) -> Result<Vec<u8>> {
    matrix
        .row_ids
        .iter()
        .map(|id| {
            labels.get(id).map(|l| l.as_binary() as u8).ok_or_else(|| {
                Error::Validation(format!("feature row `{id}` is not in the corpus")).into()
            })
        })
        .collect()
}

/// Writes the full fit of a failed analysis so the failure can be inspected.
fn write_diagnostics(cfg: &RunConfig, matrix: &FeatureMatrix, y: &[u8], err: &Error) -> Result<()> {
    let mut text = format!(
        "analysis failed: {err}\nrows {} columns {}\n",
        matrix.nrows(),
        matrix.ncols()
    );
    let opts = cfg.analysis_options();
    let fit = standardize(matrix).and_then(|s| {
        let mut pca = fit_pca(&s.matrix)?;
        if opts.rotate {
            pca = varimax_rotate(&pca, opts.kaiser_normalize)?;
        }
        writeln!(text, "dropped constant columns: {}", s.dropped.join(", ")).unwrap();
        let scores = project_scores(&s.matrix, &pca)?;
        fit_logistic(&scores, y)
    });
    match fit {
        Ok(fit) => {
            writeln!(
                text,
                "iterations {} gradient max-norm {:e} converged {} wald reliable {}",
                fit.iterations, fit.gradient_norm, fit.converged, fit.wald_reliable
            )
            .unwrap();
            text.push_str(&fit_to_string(&fit));
        }
        Err(e) => writeln!(text, "refit failed: {e}").unwrap(),
    }
    write_file(&cfg.out(DIAGNOSTICS_FILE), text)
}

pub fn analyze(cfg: &RunConfig) -> Result<Analysis> {
    let matrix = read_feature_table(cfg)?;
    require_file(&cfg.paths.corpus, "corpus file")?;
    let labels = label_map(&load_corpus(&cfg.paths.corpus)?.corpus);
    let y = binary_labels(&matrix, &labels)?;
    let analysis = match analyze_matrix(&matrix, &y, &cfg.analysis_options()) {
        Ok(a) => a,
        Err(e) => {
            if matches!(e, Error::NonConvergence { .. }) {
                write_diagnostics(cfg, &matrix, &y, &e)?;
            }
            return Err(e.into());
        }
    };
    let catalog = if cfg.paths.catalog.is_file() {
        Some(IndexCatalog::load(&cfg.paths.catalog)?)
    } else {
        None
    };
    let labels = component_labels(&analysis.pca);
    let describe = |component: &str| -> Option<String> {
        let index = labels.get(component)?;
        Some(
            match catalog.as_ref().and_then(|c| c.description_of(index)) {
                Some(d) => format!("{index}: {d}"),
                None => index.clone(),
            },
        )
    };
    let table_text = analysis.table.to_text(&describe);
    let directions = direction_check(&analysis.table);
    let mut stepwise = String::from("step\tremoved\tp_value\tz\n");
    for (i, r) in analysis.stepwise.removals.iter().enumerate() {
        writeln!(
            stepwise,
            "{}\t{}\t{:.6e}\t{:.6}",
            i + 1,
            r.name,
            r.p_value,
            r.z
        )
        .unwrap();
    }
    writeln!(
        stepwise,
        "survivors\t{}",
        analysis.stepwise.survivors.join(",")
    )
    .unwrap();

    write_file(&cfg.out("significance.txt"), &table_text)?;
    write_file(&cfg.out("significance.tsv"), analysis.table.to_tsv())?;
    write_file(&cfg.out("pca.txt"), pca_to_string(&analysis.pca))?;
    write_file(&cfg.out("fit_full.txt"), fit_to_string(&analysis.full_fit))?;
    write_file(
        &cfg.out("fit_stepwise.txt"),
        fit_to_string(&analysis.stepwise.fit),
    )?;
    write_file(&cfg.out("stepwise.tsv"), stepwise)?;
    write_file(&cfg.out("directions.txt"), directions.to_text())?;
    print!("{table_text}");
    for n in &directions.notices {
        println!("{n}");
    }
    Ok(analysis)
}

/// Per-method reports plus the comparison table.
#[derive(Debug, Clone)]
pub struct Evaluation {
    pub plan: SplitPlan,
    pub reports: Vec<EvalReport>,
    /// `None` when fewer than two methods ran.
    pub comparison: Option<ComparisonTable>,
}

fn method_predictions(
    cfg: &RunConfig,
    method: Method,
    corpus: &Corpus,
    plan: &SplitPlan,
    labels: &HashMap<String, Label>,
    matrix: &mut Option<FeatureMatrix>,
) -> Result<Vec<Prediction>> {
    match method {
        Method::Mnb => Ok(cross_validate_mnb(corpus.articles(), plan)?),
        Method::Svm(features) => {
            if matrix.is_none() {
                let m = read_feature_table(cfg)?;
                let ids: Vec<&str> = corpus.articles().iter().map(|a| a.id.as_str()).collect();
                plan.check_covers(m.row_ids.iter().map(String::as_str))
                    .with_context(|| {
                        format!(
                            "feature table has {} rows for {} articles; rerun `extract`",
                            m.nrows(),
                            ids.len()
                        )
                    })?;
                *matrix = Some(m);
            }
            let m = matrix.as_ref().expect("loaded above");
            let run = cross_validate_svm(
                m,
                labels,
                plan,
                &cfg.svm_params(),
                features,
                &cfg.analysis_options(),
            )?;
            for f in &run.folds {
                info!(
                    "{} fold {}: {} columns",
                    features.method_name(),
                    f.fold,
                    f.columns.len()
                );
            }
            Ok(run.predictions)
        }
    }
}

fn external_predictions(
    e: &ExternalPredictions,
    plan: &SplitPlan,
    labels: &HashMap<String, Label>,
) -> Result<Vec<Prediction>> {
    require_file(&e.path, &format!("prediction file for `{}`", e.method))?;
    let mut preds = read_predictions(&e.path)?;
    check_predictions(&preds, plan, Some(labels))
        .with_context(|| format!("{}", e.path.display()))?;
    for p in &mut preds {
        p.method = e.method.clone();
    }
    Ok(preds)
}

pub fn evaluate_methods(cfg: &RunConfig) -> Result<Evaluation> {
    let corpus = load_config_corpus(cfg)?;
    let labels = label_map(&corpus);
    let plan = make_folds(corpus.articles(), cfg.k, cfg.seed)?;
    ensure_dir(&cfg.paths.output)?;
    write_folds(&plan, cfg.out(FOLDS_FILE))?;

    let mut matrix = None;
    let mut reports = Vec::new();
    for name in &cfg.methods {
        let method = Method::parse(name)?;
        let preds = method_predictions(cfg, method, &corpus, &plan, &labels, &mut matrix)?;
        check_predictions(&preds, &plan, Some(&labels))?;
        write_predictions(&preds, cfg.out(&format!("predictions_{name}.jsonl")))?;
        reports.push(evaluate(&preds, &plan, cfg.positive_class)?);
    }
    for e in &cfg.external {
        let preds = external_predictions(e, &plan, &labels)?;
        write_predictions(&preds, cfg.out(&format!("predictions_{}.jsonl", e.method)))?;
        reports.push(evaluate(&preds, &plan, cfg.positive_class)?);
    }
    for r in &reports {
        write_file(&cfg.out(&format!("report_{}.tsv", r.method)), r.to_tsv())?;
        info!("{}", r.summary());
    }
    if !reports.iter().any(|r| r.method == cfg.baseline) {
        return Err(Error::Config(format!(
            "baseline method `{}` was not evaluated",
            cfg.baseline
        ))
        .into());
    }
    let comparison = if reports.len() > 1 {
        let c = compare_methods(&reports, &cfg.baseline)?;
        write_file(&cfg.out("comparison.txt"), c.to_text())?;
        write_file(&cfg.out("comparison.tsv"), c.to_tsv())?;
        print!("{}", c.to_text());
        Some(c)
    } else {
        for r in &reports {
            println!("{}", r.summary());
        }
        None
    };
    Ok(Evaluation {
        plan,
        reports,
        comparison,
    })
}

pub fn train_tagger(input: &Path, out: &Path, config: &TrainConfig) -> Result<Tagger> {
    let text = fs::read_to_string(input).map_err(|source| Error::Io {
        path: input.to_path_buf(),
        source,
    })?;
    let (sentences, bad) = parse_training_text(&text);
    if !bad.is_empty() {
        warn!("{}: {} malformed lines skipped", input.display(), bad.len());
    }
    let tagger = Tagger::train(&sentences, config).map_err(Error::Validation)?;
    write_file(out, tagger.to_model_string())?;
    println!(
        "{} sentences, {} tags, {} weights",
        sentences.len(),
        tagger.classes().len(),
        tagger.weight_count()
    );
    Ok(tagger)
}

/// Ingest (when a raw dataset is configured), extract, analyze, evaluate.
pub fn run(cfg: &RunConfig) -> Result<Evaluation> {
    if let Some(raw) = &cfg.paths.raw_dataset {
        ingest(raw, &cfg.paths.corpus)?;
    }
    extract(cfg)?;
    analyze(cfg)?;
    evaluate_methods(cfg)
}
