//! Versioned index catalog: which indices are computed, in which column
//! order, and what value stands in when an index is undefined.

use std::collections::HashSet;
use std::fs;
use std::path::Path;

use serde::Deserialize;

use crate::error::{Error, Result};

pub const CATALOG_VERSION: u32 = 1;

/// Every index this crate knows how to compute, in canonical order.
pub const KNOWN_INDICES: &[&str] = &[
    "sentence_count",
    "sentence_length",
    "word_length",
    "lexical_diversity",
    "first_person_singular",
    "third_person_singular",
    "adverb_incidence",
    "verb_incidence",
    "gerund_incidence",
    "temporal_connectives",
    "causal_intentional_connectives",
    "additive_connectives",
    "adversative_connectives",
    "causal_particle_verb_ratio",
    "word_frequency_all",
    "word_frequency_content",
    "concreteness",
    "hypernymy_nouns",
    "agentless_passive_density",
    "verb_phrase_density",
    "content_word_overlap_adjacent",
    "lsa_adjacent",
    "lsa_paragraph",
    "lsa_verbs",
    "givenness",
    "flesch_reading_ease",
    "flesch_kincaid_grade",
    "l2_readability",
    "pc_referential_cohesion",
    "pc_syntactic_simplicity",
];

/// Indices computed over the whole corpus rather than per document.
pub const COMPOSITE_INDICES: &[&str] = &["pc_referential_cohesion", "pc_syntactic_simplicity"];

#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(untagged)]
enum RawDefault {
    Value(f64),
    Rule(DefaultRuleName),
}

#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(rename_all = "kebab-case")]
enum DefaultRuleName {
    ScaleMidpoint,
    TableMean,
}

/// Value used (and flagged) when an index is undefined for a document.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DefaultRule {
    Value(f64),
    /// Midpoint of the concreteness scale.
    ScaleMidpoint,
    /// Mean of the hypernymy table.
    TableMean,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawIndex {
    name: String,
    code: String,
    description: String,
    formula: String,
    #[serde(default)]
    resources: Vec<String>,
    default: RawDefault,
    #[serde(default)]
    scale_invariant: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct IndexDescriptor {
    pub name: String,
    pub code: String,
    pub description: String,
    pub formula: String,
    pub resources: Vec<String>,
    pub default: DefaultRule,
    /// Unchanged when the document is repeated as a second paragraph.
    pub scale_invariant: bool,
}

impl IndexDescriptor {
    pub fn is_composite(&self) -> bool {
        COMPOSITE_INDICES.contains(&self.name.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct L2Coefficients {
    pub intercept: f64,
    pub overlap: f64,
    pub syntax: f64,
    pub frequency: f64,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EasabilityConfig {
    pub referential: Vec<String>,
    pub syntactic_negated: Vec<String>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawCatalog {
    version: u32,
    index: Vec<RawIndex>,
    l2: L2Coefficients,
    easability: EasabilityConfig,
}

#[derive(Debug, Clone, PartialEq)]
pub struct IndexCatalog {
    pub version: u32,
    pub indices: Vec<IndexDescriptor>,
    pub l2: L2Coefficients,
    pub easability: EasabilityConfig,
}

impl IndexCatalog {
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text).map_err(|e| match e {
            Error::Config(msg) => Error::Config(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    pub fn parse(text: &str) -> Result<Self> {
        let raw: RawCatalog = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        if raw.version != CATALOG_VERSION {
            return Err(Error::Config(format!(
                "catalog version {} is not supported (expected {CATALOG_VERSION})",
                raw.version
            )));
        }
        let indices = raw
            .index
            .into_iter()
            .map(|r| IndexDescriptor {
                name: r.name,
                code: r.code,
                description: r.description,
                formula: r.formula,
                resources: r.resources,
                default: match r.default {
                    RawDefault::Value(v) => DefaultRule::Value(v),
                    RawDefault::Rule(DefaultRuleName::ScaleMidpoint) => DefaultRule::ScaleMidpoint,
                    RawDefault::Rule(DefaultRuleName::TableMean) => DefaultRule::TableMean,
                },
                scale_invariant: r.scale_invariant,
            })
            .collect();
        let catalog = IndexCatalog {
            version: raw.version,
            indices,
            l2: raw.l2,
            easability: raw.easability,
        };
        catalog.validate()?;
        Ok(catalog)
    }

    fn validate(&self) -> Result<()> {
        if self.indices.is_empty() {
            return Err(Error::Config("catalog lists no indices".into()));
        }
        let mut seen = HashSet::new();
        for d in &self.indices {
            if !KNOWN_INDICES.contains(&d.name.as_str()) {
                return Err(Error::Config(format!("unknown index `{}`", d.name)));
            }
            if !seen.insert(d.name.as_str()) {
                return Err(Error::Config(format!("duplicate index `{}`", d.name)));
            }
            if let DefaultRule::Value(v) = d.default {
                if !v.is_finite() {
                    return Err(Error::Config(format!(
                        "index `{}` has a non-finite default",
                        d.name
                    )));
                }
            }
        }
        let composites: Vec<&str> = self
            .indices
            .iter()
            .filter(|d| d.is_composite())
            .map(|d| d.name.as_str())
            .collect();
        let check = |cols: &[String], composite: &str| -> Result<()> {
            if !composites.contains(&composite) {
                return Ok(());
            }
            if cols.is_empty() {
                return Err(Error::Config(format!(
                    "composite `{composite}` has no constituents"
                )));
            }
            let missing: Vec<&str> = cols
                .iter()
                .filter(|c| {
                    !self
                        .indices
                        .iter()
                        .any(|d| &d.name == *c && !d.is_composite())
                })
                .map(String::as_str)
                .collect();
            if missing.is_empty() {
                Ok(())
            } else {
                Err(Error::Config(format!(
                    "composite `{composite}` needs missing columns: {}",
                    missing.join(", ")
                )))
            }
        };
        check(&self.easability.referential, "pc_referential_cohesion")?;
        check(
            &self.easability.syntactic_negated,
            "pc_syntactic_simplicity",
        )?;
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn names(&self) -> Vec<String> {
        self.indices.iter().map(|d| d.name.clone()).collect()
    }

    /// Indices computed per document (everything except composites).
    pub fn document_indices(&self) -> impl Iterator<Item = &IndexDescriptor> {
        self.indices.iter().filter(|d| !d.is_composite())
    }

    pub fn get(&self, name: &str) -> Option<&IndexDescriptor> {
        self.indices.iter().find(|d| d.name == name)
    }

    /// Catalog name of the index with the given description, if any.
    pub fn description_of(&self, name: &str) -> Option<&str> {
        self.get(name).map(|d| d.description.as_str())
    }
}
