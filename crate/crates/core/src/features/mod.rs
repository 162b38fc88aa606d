//! Per-article coherence, readability and lexical indices.
//!
//! [`extract_features`] computes every document-level catalog index for one
//! article. [`extract_matrix`] runs it over a corpus in parallel and appends
//! the corpus-level easability composites, giving one column per catalog
//! entry in catalog order.

mod catalog;
mod indices;

use rayon::prelude::*;

use crate::corpus::{Article, ConnectiveCategory, ResourceBundle};
use crate::error::{Error, Result};
use crate::matrix::FeatureMatrix;
use crate::textproc::{analyze, AnalyzedDoc};

pub use catalog::{
    DefaultRule, EasabilityConfig, IndexCatalog, IndexDescriptor, L2Coefficients, CATALOG_VERSION,
    COMPOSITE_INDICES, KNOWN_INDICES,
};
pub use indices::*;

/// Document-level index values for one article, in catalog order
/// (composites excluded).
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureVector {
    pub article_id: String,
    pub names: Vec<String>,
    pub values: Vec<f64>,
    /// `true` where the value is the catalog default because the index was
    /// undefined for this document.
    pub defaulted: Vec<bool>,
}

impl FeatureVector {
    pub fn get(&self, name: &str) -> Option<f64> {
        self.names
            .iter()
            .position(|n| n == name)
            .map(|i| self.values[i])
    }

    pub fn is_defaulted(&self, name: &str) -> Option<bool> {
        self.names
            .iter()
            .position(|n| n == name)
            .map(|i| self.defaulted[i])
    }
}

/// Feature table for a corpus plus per-cell default flags.
#[derive(Debug, Clone)]
pub struct ExtractedFeatures {
    pub matrix: FeatureMatrix,
    pub defaulted: Vec<Vec<bool>>,
}

fn resolve_default(d: &IndexDescriptor, resources: &ResourceBundle) -> f64 {
    match d.default {
        DefaultRule::Value(v) => v,
        DefaultRule::ScaleMidpoint => resources.concreteness.midpoint(),
        DefaultRule::TableMean => resources.hypernymy.table_mean(),
    }
}

/// Lazily computed pieces shared between several indices.
struct DocContext<'a> {
    doc: &'a AnalyzedDoc,
    res: &'a ResourceBundle,
    catalog: &'a IndexCatalog,
    surface: Option<SurfaceStats>,
    frequency: Option<FrequencyStats>,
    readability: Option<Readability>,
}

impl<'a> DocContext<'a> {
    fn surface(&mut self) -> Result<SurfaceStats> {
        if self.surface.is_none() {
            self.surface = Some(surface_stats(self.doc)?);
        }
        Ok(self.surface.expect("set"))
    }

    fn frequency(&mut self) -> Result<FrequencyStats> {
        if self.frequency.is_none() {
            self.frequency = Some(word_frequency_stats(self.doc, &self.res.frequency)?);
        }
        Ok(self.frequency.expect("set"))
    }

    fn readability(&mut self) -> Result<Readability> {
        if self.readability.is_none() {
            self.readability = Some(readability(
                self.doc,
                &self.res.frequency,
                &self.catalog.l2,
            )?);
        }
        Ok(self.readability.expect("set"))
    }

    /// `Ok(None)` means undefined for this document.
    fn compute(&mut self, name: &str) -> Result<Option<f64>> {
        let doc = self.doc;
        let res = self.res;
        let conn = |cats: &[ConnectiveCategory]| {
            connective_incidence(doc, &res.connectives, cats).map(Some)
        };
        match name {
            "sentence_count" => Ok(Some(self.surface()?.sentence_count as f64)),
            "sentence_length" => Ok(Some(self.surface()?.mean_sentence_length)),
            "word_length" => Ok(Some(self.surface()?.mean_word_length)),
            "lexical_diversity" => lexical_diversity(doc).map(Some),
            "first_person_singular" => incidence(doc, is_first_person_singular).map(Some),
            "third_person_singular" => incidence(doc, is_third_person_singular).map(Some),
            "adverb_incidence" => incidence(doc, |t| t.is_word() && t.is_adverb()).map(Some),
            "verb_incidence" => incidence(doc, |t| t.is_word() && t.is_verb()).map(Some),
            "gerund_incidence" => incidence(doc, is_gerund).map(Some),
            "temporal_connectives" => conn(&[ConnectiveCategory::TemporalExpanded]),
            "causal_intentional_connectives" => {
                conn(&[ConnectiveCategory::Causal, ConnectiveCategory::Intentional])
            }
            "additive_connectives" => conn(&[ConnectiveCategory::Additive]),
            "adversative_connectives" => conn(&[ConnectiveCategory::Adversative]),
            "causal_particle_verb_ratio" => Ok(Some(causal_ratio(
                doc,
                &res.causal_particles,
                &res.causal_verbs,
            ))),
            "word_frequency_all" => Ok(Some(self.frequency()?.mean_log_freq_all)),
            "word_frequency_content" => Ok(self.frequency()?.mean_log_freq_content),
            "concreteness" => Ok(concreteness_mean(doc, &res.concreteness).value),
            "hypernymy_nouns" => Ok(hypernymy_nouns(doc, &res.hypernymy).value),
            "agentless_passive_density" => passive_density(doc).map(Some),
            "verb_phrase_density" => verb_phrase_density(doc).map(Some),
            "content_word_overlap_adjacent" => Ok(content_word_overlap(doc)),
            "lsa_adjacent" => Ok(lsa_overlap(
                doc,
                &res.embeddings,
                LsaMode::AdjacentSentences,
            )),
            "lsa_paragraph" => Ok(lsa_overlap(
                doc,
                &res.embeddings,
                LsaMode::AllSentencesInParagraph,
            )),
            "lsa_verbs" => Ok(lsa_overlap(doc, &res.embeddings, LsaMode::Verbs)),
            "givenness" => Ok(givenness(doc, &res.embeddings)),
            "flesch_reading_ease" => Ok(Some(self.readability()?.flesch_reading_ease)),
            "flesch_kincaid_grade" => Ok(Some(self.readability()?.flesch_kincaid_grade)),
            "l2_readability" => Ok(self.readability()?.l2),
            other => Err(Error::Config(format!(
                "index `{other}` is not a document-level index"
            ))),
        }
    }
}

/// Document-level indices of an already analyzed document.
pub fn document_features(
    article_id: &str,
    doc: &AnalyzedDoc,
    resources: &ResourceBundle,
    catalog: &IndexCatalog,
) -> Result<FeatureVector> {
    if doc.word_count() == 0 {
        return Err(Error::EmptyDocument);
    }
    let mut ctx = DocContext {
        doc,
        res: resources,
        catalog,
        surface: None,
        frequency: None,
        readability: None,
    };
    let mut names = Vec::new();
    let mut values = Vec::new();
    let mut defaulted = Vec::new();
    for d in catalog.document_indices() {
        let (v, flag) = match ctx.compute(&d.name)? {
            Some(v) if v.is_finite() => (v, false),
            _ => (resolve_default(d, resources), true),
        };
        names.push(d.name.clone());
        values.push(v);
        defaulted.push(flag);
    }
    Ok(FeatureVector {
        article_id: article_id.to_string(),
        names,
        values,
        defaulted,
    })
}

/// Analyzes headline and body (joined by a paragraph break) and computes the
/// document-level indices.
pub fn extract_features(
    article: &Article,
    resources: &ResourceBundle,
    catalog: &IndexCatalog,
) -> Result<FeatureVector> {
    let doc = analyze(&article.full_text(), &resources.tagger);
    document_features(&article.id, &doc, resources, catalog)
}

/// Features for every article, in input order, with composites appended at
/// their catalog positions. Output does not depend on thread scheduling.
pub fn extract_matrix(
    articles: &[Article],
    resources: &ResourceBundle,
    catalog: &IndexCatalog,
) -> Result<ExtractedFeatures> {
    let vectors: Vec<FeatureVector> = articles
        .par_iter()
        .map(|a| {
            extract_features(a, resources, catalog)
                .map_err(|e| Error::Validation(format!("article `{}`: {e}", a.id)))
        })
        .collect::<Result<_>>()?;
    assemble(vectors, catalog)
}

/// Builds the full-width table from per-article vectors.
pub fn assemble(vectors: Vec<FeatureVector>, catalog: &IndexCatalog) -> Result<ExtractedFeatures> {
    let doc_names: Vec<String> = catalog.document_indices().map(|d| d.name.clone()).collect();
    let ids: Vec<String> = vectors.iter().map(|v| v.article_id.clone()).collect();
    let rows: Vec<Vec<f64>> = vectors.iter().map(|v| v.values.clone()).collect();
    let mut defaulted: Vec<Vec<bool>> = vectors.iter().map(|v| v.defaulted.clone()).collect();
    let mut matrix = FeatureMatrix::from_rows(ids, doc_names, &rows)?;
    let composites = easability_composites(&matrix, catalog)?;
    for (pos, d) in catalog.indices.iter().enumerate() {
        if let Some((_, col)) = composites.iter().find(|(n, _)| n == &d.name) {
            matrix.insert_column(pos, &d.name, col)?;
            for row in defaulted.iter_mut() {
                row.insert(pos, false);
            }
        }
    }
    Ok(ExtractedFeatures { matrix, defaulted })
}

/// Column z-scores with the sample standard deviation; constant columns
/// (or fewer than two rows) give zeros.
fn z_scores(column: &[f64]) -> Vec<f64> {
    let n = column.len();
    if n < 2 {
        return vec![0.0; n];
    }
    let m = column.iter().sum::<f64>() / n as f64;
    let var = column.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (n as f64 - 1.0);
    let sd = var.sqrt();
    if sd == 0.0 || !sd.is_finite() {
        return vec![0.0; n];
    }
    column.iter().map(|x| (x - m) / sd).collect()
}

/// Corpus-level composites for the composites listed in the catalog:
/// referential cohesion = mean z of the overlap columns; syntactic
/// simplicity = mean of the negated z of sentence length and verb-phrase
/// density (per the catalog's constituent lists).
pub fn easability_composites(
    matrix: &FeatureMatrix,
    catalog: &IndexCatalog,
) -> Result<Vec<(String, Vec<f64>)>> {
    let mut out = Vec::new();
    for d in catalog.indices.iter().filter(|d| d.is_composite()) {
        let (cols, sign) = match d.name.as_str() {
            "pc_referential_cohesion" => (&catalog.easability.referential, 1.0),
            "pc_syntactic_simplicity" => (&catalog.easability.syntactic_negated, -1.0),
            other => return Err(Error::Config(format!("no rule for composite `{other}`"))),
        };
        let missing: Vec<String> = cols
            .iter()
            .filter(|c| matrix.column_index(c).is_none())
            .cloned()
            .collect();
        if !missing.is_empty() {
            return Err(Error::Config(format!(
                "composite `{}` is missing constituent columns: {}",
                d.name,
                missing.join(", ")
            )));
        }
        let zs: Vec<Vec<f64>> = cols
            .iter()
            .map(|c| z_scores(&matrix.column(c).expect("checked")))
            .collect();
        let n = matrix.nrows();
        let composite = (0..n)
            .map(|i| sign * zs.iter().map(|z| z[i]).sum::<f64>() / zs.len() as f64)
            .collect();
        out.push((d.name.clone(), composite));
    }
    Ok(out)
}
