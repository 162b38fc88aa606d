//! Significance tables, the reference direction check, and flat-file
//! serialization of fitted models.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::path::Path;

use nalgebra::DMatrix;

use super::logistic::{Coefficient, RegressionFit, INTERCEPT};
use super::pca::PcaModel;
use super::stepwise::StepwiseResult;
use crate::error::{Error, Result};
use crate::matrix::Standardization;

pub const PCA_HEADER: &str = "svf-pca 1";
pub const FIT_HEADER: &str = "svf-fit 1";
pub const SIGNIFICANCE_LEVEL: f64 = 0.05;

/// Index-level directions of the published stepwise survivors:
/// `true` = satire-associated.
pub const REFERENCE_DIRECTIONS: [(&str, bool); 16] = [
    ("first_person_singular", true),
    ("sentence_length", true),
    ("hypernymy_nouns", true),
    ("concreteness", true),
    ("causal_particle_verb_ratio", true),
    ("pc_referential_cohesion", true),
    ("gerund_incidence", true),
    ("third_person_singular", true),
    ("l2_readability", true),
    ("word_frequency_all", true),
    ("agentless_passive_density", false),
    ("word_frequency_content", false),
    ("adverb_incidence", false),
    ("sentence_count", false),
    ("lsa_verbs", false),
    ("lsa_adjacent", false),
];

pub fn stars(p: f64) -> &'static str {
    if p < 0.001 {
        "***"
    } else if p < 0.01 {
        "**"
    } else if p < 0.05 {
        "*"
    } else {
        ""
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SignificanceRow {
    pub name: String,
    /// Index dominating the component, when known.
    pub label: Option<String>,
    pub estimate: f64,
    pub std_error: f64,
    pub z: f64,
    pub p_value: f64,
    pub stars: &'static str,
    pub survivor: bool,
}

impl SignificanceRow {
    fn new(c: &Coefficient, label: Option<String>, survivor: bool) -> Self {
        SignificanceRow {
            name: c.name.clone(),
            label,
            estimate: c.estimate,
            std_error: c.std_error,
            z: c.z,
            p_value: c.p_value,
            stars: stars(c.p_value),
            survivor,
        }
    }

    pub fn significant(&self) -> bool {
        self.p_value < SIGNIFICANCE_LEVEL
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SignificanceTable {
    pub intercept: SignificanceRow,
    /// β > 0, sorted by |z| descending.
    pub satire: Vec<SignificanceRow>,
    /// β < 0, sorted by |z| descending.
    pub fake: Vec<SignificanceRow>,
    pub wald_reliable: bool,
}

/// Builds the two-block table from the full fit, marking stepwise survivors.
/// `labels` maps component names to their dominating index.
pub fn significance_table(
    full: &RegressionFit,
    stepwise: &StepwiseResult,
    labels: &HashMap<String, String>,
) -> SignificanceTable {
    let mut satire = Vec::new();
    let mut fake = Vec::new();
    for c in &full.coefficients {
        let row = SignificanceRow::new(
            c,
            labels.get(&c.name).cloned(),
            stepwise.survivors.contains(&c.name),
        );
        if c.estimate > 0.0 {
            satire.push(row);
        } else if c.estimate < 0.0 {
            fake.push(row);
        }
    }
    let by_z = |a: &SignificanceRow, b: &SignificanceRow| {
        b.z.abs().total_cmp(&a.z.abs()).then(a.name.cmp(&b.name))
    };
    satire.sort_by(by_z);
    fake.sort_by(by_z);
    SignificanceTable {
        intercept: SignificanceRow::new(&full.intercept, None, false),
        satire,
        fake,
        wald_reliable: full.wald_reliable,
    }
}

pub fn component_labels(model: &PcaModel) -> HashMap<String, String> {
    model
        .component_names
        .iter()
        .cloned()
        .zip(model.component_labels.iter().cloned())
        .collect()
}

impl SignificanceTable {
    pub fn rows(&self) -> impl Iterator<Item = (&'static str, &SignificanceRow)> {
        self.satire
            .iter()
            .map(|r| ("satire", r))
            .chain(self.fake.iter().map(|r| ("fake", r)))
    }

    /// Aligned text of the significant rows. Survivors are wrapped in `**`.
    pub fn to_text(&self, describe: &dyn Fn(&str) -> Option<String>) -> String {
        let mut out = String::new();
        if !self.wald_reliable {
            out.push_str("WARNING: separation detected; Wald statistics are unreliable\n\n");
        }
        let header = format!(
            "{:<10} {:<30} {:<48} {:>9} {:>9} {:>9}",
            "component", "index", "description", "estimate", "std.error", "statistic"
        );
        let line = |r: &SignificanceRow| {
            let name = if r.survivor {
                format!("**{}**", r.name)
            } else {
                r.name.clone()
            };
            let label = r.label.clone().unwrap_or_default();
            let desc = r.label.as_deref().and_then(describe).unwrap_or_default();
            format!(
                "{:<10} {:<30} {:<48} {:>9.2} {:>9.2} {:>9.2}{}\n",
                name, label, desc, r.estimate, r.std_error, r.z, r.stars
            )
        };
        for (title, block) in [
            ("Satire associated", &self.satire),
            ("Fake news associated", &self.fake),
        ] {
            let _ = writeln!(out, "{title}");
            let _ = writeln!(out, "{header}");
            for r in block.iter().filter(|r| r.significant()) {
                out.push_str(&line(r));
            }
            out.push('\n');
        }
        let i = &self.intercept;
        let _ = writeln!(
            out,
            "{:<10} {:<30} {:<48} {:>9.2} {:>9.2} {:>9.2}{}",
            INTERCEPT, "", "", i.estimate, i.std_error, i.z, i.stars
        );
        out.push_str(
            "\n*** p < 0.001, ** p < 0.01, * p < 0.05; **name**: kept by backward elimination\n",
        );
        out
    }

    /// Tab-separated rows for every coefficient, including the intercept.
    pub fn to_tsv(&self) -> String {
        let mut out = String::from(
            "block\tcomponent\tindex\testimate\tstd_error\tstatistic\tp_value\tstars\tsurvivor\n",
        );
        let mut push = |block: &str, r: &SignificanceRow| {
            let _ = writeln!(
                out,
                "{block}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}",
                r.name,
                r.label.as_deref().unwrap_or(""),
                r.estimate,
                r.std_error,
                r.z,
                r.p_value,
                r.stars,
                r.survivor
            );
        };
        for (block, r) in self.rows() {
            push(block, r);
        }
        push("intercept", &self.intercept);
        out
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DirectionEntry {
    pub index: String,
    pub expected_satire: bool,
    /// Component with the largest |z| among those labelled with this index.
    pub component: Option<String>,
    pub estimate: Option<f64>,
    pub p_value: Option<f64>,
}

impl DirectionEntry {
    pub fn agrees(&self) -> Option<bool> {
        self.estimate.map(|b| (b > 0.0) == self.expected_satire)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DirectionCheck {
    pub entries: Vec<DirectionEntry>,
    pub notices: Vec<String>,
    pub agreements: usize,
    pub compared: usize,
    pub passed: bool,
}

pub const MIN_DIRECTION_AGREEMENT: usize = 6;

/// Compares component directions with [`REFERENCE_DIRECTIONS`]. The two
/// headline indices must be significant with the expected sign; if either is
/// not significant, a deviation notice is recorded and the check instead
/// needs sign agreement on at least [`MIN_DIRECTION_AGREEMENT`] indices.
pub fn direction_check(table: &SignificanceTable) -> DirectionCheck {
    let entries: Vec<DirectionEntry> = REFERENCE_DIRECTIONS
        .iter()
        .map(|&(index, expected)| {
            let best = table
                .rows()
                .map(|(_, r)| r)
                .filter(|r| r.label.as_deref() == Some(index))
                .max_by(|a, b| a.z.abs().total_cmp(&b.z.abs()).then(b.name.cmp(&a.name)));
            DirectionEntry {
                index: index.to_string(),
                expected_satire: expected,
                component: best.map(|r| r.name.clone()),
                estimate: best.map(|r| r.estimate),
                p_value: best.map(|r| r.p_value),
            }
        })
        .collect();
    let compared = entries.iter().filter(|e| e.estimate.is_some()).count();
    let agreements = entries.iter().filter(|e| e.agrees() == Some(true)).count();
    let mut notices = Vec::new();
    let mut headline_ok = true;
    let mut headline_significant = true;
    for key in ["first_person_singular", "agentless_passive_density"] {
        let e = entries
            .iter()
            .find(|e| e.index == key)
            .expect("reference index");
        match (e.p_value, e.agrees()) {
            (Some(p), Some(agrees)) if p < SIGNIFICANCE_LEVEL => headline_ok &= agrees,
            (Some(p), _) => {
                headline_significant = false;
                notices.push(format!(
                    "DEVIATION: `{key}` dominates {} but is not significant (p = {p:.3})",
                    e.component.as_deref().unwrap_or("?")
                ));
            }
            (None, _) => {
                headline_significant = false;
                notices.push(format!("DEVIATION: no component is dominated by `{key}`"));
            }
        }
    }
    let passed = if headline_significant {
        headline_ok
    } else {
        agreements >= MIN_DIRECTION_AGREEMENT
    };
    DirectionCheck {
        entries,
        notices,
        agreements,
        compared,
        passed,
    }
}

impl DirectionCheck {
    pub fn to_text(&self) -> String {
        let mut out = String::from("index\texpected\tcomponent\testimate\tp_value\tagrees\n");
        for e in &self.entries {
            let _ = writeln!(
                out,
                "{}\t{}\t{}\t{}\t{}\t{}",
                e.index,
                if e.expected_satire { "satire" } else { "fake" },
                e.component.as_deref().unwrap_or("-"),
                e.estimate
                    .map(|b| format!("{b:.4}"))
                    .unwrap_or_else(|| "-".into()),
                e.p_value
                    .map(|p| format!("{p:.4}"))
                    .unwrap_or_else(|| "-".into()),
                e.agrees()
                    .map(|a| a.to_string())
                    .unwrap_or_else(|| "-".into()),
            );
        }
        for n in &self.notices {
            let _ = writeln!(out, "{n}");
        }
        let _ = writeln!(
            out,
            "sign agreement: {}/{} compared ({} reference indices); {}",
            self.agreements,
            self.compared,
            REFERENCE_DIRECTIONS.len(),
            if self.passed { "PASS" } else { "FAIL" }
        );
        out
    }
}

fn join(values: impl IntoIterator<Item = f64>) -> String {
    values
        .into_iter()
        .map(|v| v.to_string())
        .collect::<Vec<_>>()
        .join("\t")
}

fn bad(path: &Path, row: usize, msg: impl Into<String>) -> Error {
    Error::parse(path, row, msg)
}

fn parse_floats(path: &Path, row: usize, fields: &[&str]) -> Result<Vec<f64>> {
    fields
        .iter()
        .map(|f| {
            f.parse::<f64>()
                .map_err(|e| bad(path, row, format!("`{f}`: {e}")))
        })
        .collect()
}

/// Versioned tab-separated text form of a PCA model.
pub fn pca_to_string(model: &PcaModel) -> String {
    let mut out = format!("{PCA_HEADER}\n");
    let _ = writeln!(out, "rotated\t{}", model.rotated);
    let _ = writeln!(out, "total_variance\t{}", model.total_variance);
    let _ = writeln!(out, "columns\t{}", model.columns.join("\t"));
    let _ = writeln!(out, "components\t{}", model.component_names.join("\t"));
    let _ = writeln!(out, "labels\t{}", model.component_labels.join("\t"));
    let _ = writeln!(
        out,
        "eigenvalues\t{}",
        join(model.eigenvalues.iter().copied())
    );
    if let Some(s) = &model.standardization {
        let _ = writeln!(out, "std_columns\t{}", s.columns.join("\t"));
        let _ = writeln!(out, "std_means\t{}", join(s.means.iter().copied()));
        let _ = writeln!(out, "std_sds\t{}", join(s.sds.iter().copied()));
    }
    let _ = writeln!(
        out,
        "varimax_trace\t{}",
        join(model.varimax_trace.iter().copied())
    );
    for i in 0..model.loadings.nrows() {
        let _ = writeln!(
            out,
            "loading\t{}",
            join(model.loadings.row(i).iter().copied())
        );
    }
    for i in 0..model.score_weights.nrows() {
        let _ = writeln!(
            out,
            "weight\t{}",
            join(model.score_weights.row(i).iter().copied())
        );
    }
    for i in 0..model.rotation.nrows() {
        let _ = writeln!(
            out,
            "rotation\t{}",
            join(model.rotation.row(i).iter().copied())
        );
    }
    out
}

pub fn parse_pca(text: &str, path: &Path) -> Result<PcaModel> {
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, PCA_HEADER)) => {}
        other => {
            return Err(bad(
                path,
                1,
                format!("expected `{PCA_HEADER}`, found {:?}", other.map(|l| l.1)),
            ))
        }
    }
    let mut fields: HashMap<&str, Vec<&str>> = HashMap::new();
    let mut rows: HashMap<&str, Vec<Vec<f64>>> = HashMap::new();
    for (i, line) in lines {
        let mut parts = line.split('\t');
        let key = parts.next().unwrap_or("");
        let rest: Vec<&str> = parts.filter(|s| !s.is_empty()).collect();
        match key {
            "loading" | "weight" | "rotation" => {
                rows.entry(key)
                    .or_default()
                    .push(parse_floats(path, i + 1, &rest)?)
            }
            "" => {}
            _ => {
                fields.insert(key, rest);
            }
        }
    }
    let get = |k: &str| {
        fields
            .get(k)
            .cloned()
            .ok_or_else(|| bad(path, 0, format!("missing `{k}`")))
    };
    let strings =
        |k: &str| -> Result<Vec<String>> { Ok(get(k)?.into_iter().map(String::from).collect()) };
    let floats = |k: &str| -> Result<Vec<f64>> { parse_floats(path, 0, &get(k)?) };
    let dense = |k: &str, ncols: usize| -> Result<DMatrix<f64>> {
        let r = rows.get(k).cloned().unwrap_or_default();
        if r.iter().any(|row| row.len() != ncols) {
            return Err(bad(path, 0, format!("`{k}` rows must have {ncols} values")));
        }
        Ok(DMatrix::from_fn(r.len(), ncols, |i, j| r[i][j]))
    };
    let columns = strings("columns")?;
    let component_names = strings("components")?;
    let k = component_names.len();
    let loadings = dense("loading", k)?;
    let score_weights = dense("weight", k)?;
    let rotation = dense("rotation", k)?;
    if loadings.nrows() != columns.len()
        || score_weights.nrows() != columns.len()
        || rotation.nrows() != k
    {
        return Err(bad(
            path,
            0,
            "matrix shapes do not match the column and component lists",
        ));
    }
    let standardization = if fields.contains_key("std_columns") {
        Some(Standardization {
            columns: strings("std_columns")?,
            means: floats("std_means")?,
            sds: floats("std_sds")?,
        })
    } else {
        None
    };
    let rotated = match get("rotated")?.first().copied() {
        Some("true") => true,
        Some("false") => false,
        other => return Err(bad(path, 0, format!("bad `rotated` value {other:?}"))),
    };
    Ok(PcaModel {
        columns,
        standardization,
        eigenvalues: floats("eigenvalues")?,
        total_variance: floats("total_variance")?.first().copied().unwrap_or(0.0),
        loadings,
        score_weights,
        rotation,
        rotated,
        component_names,
        component_labels: strings("labels")?,
        varimax_trace: floats("varimax_trace")?,
    })
}

/// Versioned tab-separated text form of a regression fit.
pub fn fit_to_string(fit: &RegressionFit) -> String {
    let mut out = format!("{FIT_HEADER}\n");
    let _ = writeln!(out, "n\t{}", fit.n);
    let _ = writeln!(out, "log_likelihood\t{}", fit.log_likelihood);
    let _ = writeln!(out, "converged\t{}", fit.converged);
    let _ = writeln!(out, "wald_reliable\t{}", fit.wald_reliable);
    let _ = writeln!(out, "iterations\t{}", fit.iterations);
    let _ = writeln!(out, "gradient_norm\t{}", fit.gradient_norm);
    out.push_str("name\testimate\tstd_error\tstatistic\tp_value\n");
    for c in std::iter::once(&fit.intercept).chain(&fit.coefficients) {
        let _ = writeln!(
            out,
            "{}\t{}\t{}\t{}\t{}",
            c.name, c.estimate, c.std_error, c.z, c.p_value
        );
    }
    out
}

pub fn parse_fit(text: &str, path: &Path) -> Result<RegressionFit> {
    let lines: Vec<&str> = text.lines().collect();
    if lines.first() != Some(&FIT_HEADER) {
        return Err(bad(path, 1, format!("expected `{FIT_HEADER}`")));
    }
    let mut meta = HashMap::new();
    let mut coefs = Vec::new();
    let mut in_table = false;
    for (i, line) in lines.iter().enumerate().skip(1) {
        let parts: Vec<&str> = line.split('\t').collect();
        if in_table {
            if parts.len() != 5 {
                return Err(bad(path, i + 1, "coefficient rows need 5 fields"));
            }
            let v = parse_floats(path, i + 1, &parts[1..])?;
            coefs.push(Coefficient {
                name: parts[0].to_string(),
                estimate: v[0],
                std_error: v[1],
                z: v[2],
                p_value: v[3],
            });
        } else if parts[0] == "name" {
            in_table = true;
        } else if parts.len() == 2 {
            meta.insert(parts[0], parts[1]);
        } else {
            return Err(bad(path, i + 1, "expected `key<TAB>value`"));
        }
    }
    let field = |k: &str| {
        meta.get(k)
            .copied()
            .ok_or_else(|| bad(path, 0, format!("missing `{k}`")))
    };
    let num = |k: &str| -> Result<f64> {
        field(k)?
            .parse()
            .map_err(|e| bad(path, 0, format!("`{k}`: {e}")))
    };
    let int = |k: &str| -> Result<usize> {
        field(k)?
            .parse()
            .map_err(|e| bad(path, 0, format!("`{k}`: {e}")))
    };
    let flag = |k: &str| -> Result<bool> {
        field(k)?
            .parse()
            .map_err(|e| bad(path, 0, format!("`{k}`: {e}")))
    };
    if coefs.first().map(|c| c.name.as_str()) != Some(INTERCEPT) {
        return Err(bad(path, 0, "first coefficient must be the intercept"));
    }
    let intercept = coefs.remove(0);
    Ok(RegressionFit {
        intercept,
        coefficients: coefs,
        log_likelihood: num("log_likelihood")?,
        converged: flag("converged")?,
        wald_reliable: flag("wald_reliable")?,
        iterations: int("iterations")?,
        gradient_norm: num("gradient_norm")?,
        n: int("n")?,
    })
}
