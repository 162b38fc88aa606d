//! Lexical resources consumed by feature extraction.
//!
//! A resource manifest is a flat TOML file mapping each resource name to a
//! path. Paths are resolved against the manifest's directory, or against
//! `$SVF_RESOURCE_DIR` when that variable is set. Malformed lines are skipped
//! and counted; a missing file or an embedding of the wrong dimension is fatal.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::textproc::Tagger;

pub const RESOURCE_DIR_ENV: &str = "SVF_RESOURCE_DIR";

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ResourceManifest {
    pub version: u32,
    pub frequency: PathBuf,
    pub concreteness: PathBuf,
    pub hypernymy: PathBuf,
    pub connectives: PathBuf,
    pub causal_verbs: PathBuf,
    pub causal_particles: PathBuf,
    pub embeddings: PathBuf,
    pub tagger: PathBuf,
}

/// Word → count, plus the corpus total the counts are relative to.
#[derive(Debug, Clone, Default)]
pub struct FrequencyTable {
    counts: HashMap<String, u64>,
    total: u64,
}

impl FrequencyTable {
    /// `total` defaults to the sum of counts.
    pub fn new(counts: HashMap<String, u64>, total: Option<u64>) -> Result<Self> {
        if counts.values().any(|&c| c == 0) {
            return Err(Error::Validation("frequency counts must be >= 1".into()));
        }
        let sum: u64 = counts.values().sum();
        let total = total.unwrap_or(sum);
        if total == 0 {
            return Err(Error::Validation("frequency table is empty".into()));
        }
        Ok(FrequencyTable { counts, total })
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn len(&self) -> usize {
        self.counts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    pub fn count(&self, word: &str) -> Option<u64> {
        self.counts.get(word).copied()
    }

    pub fn per_million(&self, word: &str) -> Option<f64> {
        self.count(word)
            .map(|c| c as f64 * 1_000_000.0 / self.total as f64)
    }
}

/// Lemma → concreteness rating on a declared scale.
#[derive(Debug, Clone)]
pub struct ConcretenessNorms {
    ratings: HashMap<String, f64>,
    pub min: f64,
    pub max: f64,
}

impl ConcretenessNorms {
    pub fn new(ratings: HashMap<String, f64>, min: f64, max: f64) -> Result<Self> {
        if min >= max {
            return Err(Error::Validation(format!(
                "invalid concreteness scale [{min}, {max}]"
            )));
        }
        if let Some((w, r)) = ratings.iter().find(|(_, &r)| !(min..=max).contains(&r)) {
            return Err(Error::Validation(format!(
                "concreteness of `{w}` ({r}) outside scale"
            )));
        }
        Ok(ConcretenessNorms { ratings, min, max })
    }

    pub fn get(&self, lemma: &str) -> Option<f64> {
        self.ratings.get(lemma).copied()
    }

    pub fn midpoint(&self) -> f64 {
        (self.min + self.max) / 2.0
    }

    pub fn len(&self) -> usize {
        self.ratings.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ratings.is_empty()
    }
}

/// Noun lemma → mean hypernym path depth.
#[derive(Debug, Clone)]
pub struct HypernymDepths {
    depths: HashMap<String, f64>,
    mean: f64,
}

impl HypernymDepths {
    pub fn new(depths: HashMap<String, f64>) -> Result<Self> {
        if depths.is_empty() {
            return Err(Error::Validation("hypernym table is empty".into()));
        }
        if depths.values().any(|d| !d.is_finite() || *d < 0.0) {
            return Err(Error::Validation(
                "hypernym depths must be finite and >= 0".into(),
            ));
        }
        // sorted summation keeps the mean independent of hash order
        let mut values: Vec<f64> = depths.values().copied().collect();
        values.sort_by(f64::total_cmp);
        let mean = values.iter().sum::<f64>() / values.len() as f64;
        Ok(HypernymDepths { depths, mean })
    }

    pub fn get(&self, lemma: &str) -> Option<f64> {
        self.depths.get(lemma).copied()
    }

    pub fn table_mean(&self) -> f64 {
        self.mean
    }

    pub fn len(&self) -> usize {
        self.depths.len()
    }

    pub fn is_empty(&self) -> bool {
        self.depths.is_empty()
    }
}

/// Set of single- or multi-word phrases matched against lowercased token sequences.
#[derive(Debug, Clone, Default)]
pub struct PhraseLexicon {
    /// Longest first, so greedy matching prefers "because of" over "because".
    phrases: Vec<Vec<String>>,
}

impl PhraseLexicon {
    pub fn new<I, S>(phrases: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let mut set: Vec<Vec<String>> = phrases
            .into_iter()
            .map(|p| {
                p.as_ref()
                    .split_whitespace()
                    .map(|w| w.to_lowercase())
                    .collect::<Vec<_>>()
            })
            .filter(|p: &Vec<String>| !p.is_empty())
            .collect::<HashSet<_>>()
            .into_iter()
            .collect();
        set.sort_by(|a, b| b.len().cmp(&a.len()).then_with(|| a.cmp(b)));
        PhraseLexicon { phrases: set }
    }

    pub fn len(&self) -> usize {
        self.phrases.len()
    }

    pub fn is_empty(&self) -> bool {
        self.phrases.is_empty()
    }

    pub fn contains(&self, phrase: &str) -> bool {
        let p: Vec<String> = phrase.split_whitespace().map(str::to_lowercase).collect();
        self.phrases.contains(&p)
    }

    /// Non-overlapping greedy left-to-right matches over lowercased `tokens`.
    pub fn count_matches<S: AsRef<str>>(&self, tokens: &[S]) -> usize {
        let mut i = 0;
        let mut n = 0;
        while i < tokens.len() {
            let hit = self.phrases.iter().find(|p| {
                p.len() <= tokens.len() - i
                    && p.iter().zip(&tokens[i..]).all(|(a, b)| a == b.as_ref())
            });
            match hit {
                Some(p) => {
                    n += 1;
                    i += p.len();
                }
                None => i += 1,
            }
        }
        n
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ConnectiveCategory {
    Causal,
    Intentional,
    TemporalExpanded,
    Additive,
    Adversative,
}

impl ConnectiveCategory {
    pub const ALL: [ConnectiveCategory; 5] = [
        ConnectiveCategory::Causal,
        ConnectiveCategory::Intentional,
        ConnectiveCategory::TemporalExpanded,
        ConnectiveCategory::Additive,
        ConnectiveCategory::Adversative,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ConnectiveCategory::Causal => "causal",
            ConnectiveCategory::Intentional => "intentional",
            ConnectiveCategory::TemporalExpanded => "temporal-expanded",
            ConnectiveCategory::Additive => "additive",
            ConnectiveCategory::Adversative => "adversative",
        }
    }
}

impl fmt::Display for ConnectiveCategory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ConnectiveCategory {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ConnectiveCategory::ALL
            .into_iter()
            .find(|c| c.as_str() == s)
            .ok_or_else(|| Error::Validation(format!("unknown connective category `{s}`")))
    }
}

#[derive(Debug, Clone)]
pub struct ConnectiveLexicon {
    categories: BTreeMap<ConnectiveCategory, PhraseLexicon>,
}

impl ConnectiveLexicon {
    /// Every category must be present and non-empty.
    pub fn new(categories: BTreeMap<ConnectiveCategory, PhraseLexicon>) -> Result<Self> {
        for c in ConnectiveCategory::ALL {
            if categories.get(&c).is_none_or(|l| l.is_empty()) {
                return Err(Error::Validation(format!(
                    "connective category `{c}` is empty"
                )));
            }
        }
        Ok(ConnectiveLexicon { categories })
    }

    pub fn get(&self, category: ConnectiveCategory) -> &PhraseLexicon {
        &self.categories[&category]
    }
}

/// Word → dense vector, all of dimension `dim`.
#[derive(Debug, Clone)]
pub struct EmbeddingSpace {
    dim: usize,
    vectors: HashMap<String, Vec<f64>>,
}

impl EmbeddingSpace {
    pub fn new(vectors: HashMap<String, Vec<f64>>) -> Result<Self> {
        let dim = vectors.values().next().map(Vec::len).unwrap_or(0);
        if dim == 0 {
            return Err(Error::Validation("embedding space is empty".into()));
        }
        if vectors.values().any(|v| v.len() != dim) {
            return Err(Error::Validation(
                "embedding vectors differ in dimension".into(),
            ));
        }
        Ok(EmbeddingSpace { dim, vectors })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, word: &str) -> Option<&[f64]> {
        self.vectors.get(word).map(Vec::as_slice)
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }
}

/// Everything feature extraction needs. Immutable once loaded.
#[derive(Debug, Clone)]
pub struct ResourceBundle {
    pub frequency: FrequencyTable,
    pub concreteness: ConcretenessNorms,
    pub hypernymy: HypernymDepths,
    pub connectives: ConnectiveLexicon,
    pub causal_verbs: HashSet<String>,
    pub causal_particles: PhraseLexicon,
    pub embeddings: EmbeddingSpace,
    pub tagger: Tagger,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResourceReport {
    pub name: &'static str,
    pub path: PathBuf,
    pub entries: usize,
    pub skipped: usize,
}

#[derive(Debug, Clone)]
pub struct LoadedResources {
    pub bundle: ResourceBundle,
    pub reports: Vec<ResourceReport>,
}

/// Load every resource named in the manifest at `manifest_path`.
pub fn load_resources(manifest_path: impl AsRef<Path>) -> Result<LoadedResources> {
    let manifest_path = manifest_path.as_ref();
    let text = fs::read_to_string(manifest_path).map_err(|e| Error::io(manifest_path, e))?;
    let manifest: ResourceManifest = toml::from_str(&text)
        .map_err(|e| Error::Config(format!("{}: {e}", manifest_path.display())))?;
    if manifest.version != 1 {
        return Err(Error::Config(format!(
            "unsupported manifest version {}",
            manifest.version
        )));
    }
    let base = match std::env::var_os(RESOURCE_DIR_ENV) {
        Some(dir) => PathBuf::from(dir),
        None => manifest_path
            .parent()
            .map(Path::to_path_buf)
            .unwrap_or_default(),
    };
    load_from_manifest(&manifest, &base)
}

pub(crate) fn load_from_manifest(m: &ResourceManifest, base: &Path) -> Result<LoadedResources> {
    let mut reports = Vec::new();
    let open = |name: &'static str, rel: &Path| -> Result<(PathBuf, String)> {
        let path = base.join(rel);
        if !path.is_file() {
            return Err(Error::MissingResource {
                name: name.to_string(),
                path,
            });
        }
        let text = fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
        Ok((path, text))
    };

    let (path, text) = open("frequency", &m.frequency)?;
    let (frequency, skipped) = parse_frequency(&text)?;
    reports.push(report("frequency", path, frequency.len(), skipped));

    let (path, text) = open("concreteness", &m.concreteness)?;
    let (concreteness, skipped) = parse_concreteness(&text)?;
    reports.push(report("concreteness", path, concreteness.len(), skipped));

    let (path, text) = open("hypernymy", &m.hypernymy)?;
    let (hypernymy, skipped) = parse_hypernymy(&text)?;
    reports.push(report("hypernymy", path, hypernymy.len(), skipped));

    let (path, text) = open("connectives", &m.connectives)?;
    let (connectives, entries, skipped) = parse_connectives(&text)?;
    reports.push(report("connectives", path, entries, skipped));

    let (path, text) = open("causal_verbs", &m.causal_verbs)?;
    let causal_verbs: HashSet<String> = word_lines(&text).map(str::to_lowercase).collect();
    if causal_verbs.is_empty() {
        return Err(Error::Validation("causal verb lexicon is empty".into()));
    }
    reports.push(report("causal_verbs", path, causal_verbs.len(), 0));

    let (path, text) = open("causal_particles", &m.causal_particles)?;
    let causal_particles = PhraseLexicon::new(word_lines(&text));
    if causal_particles.is_empty() {
        return Err(Error::Validation("causal particle lexicon is empty".into()));
    }
    reports.push(report("causal_particles", path, causal_particles.len(), 0));

    let (path, text) = open("embeddings", &m.embeddings)?;
    let (embeddings, skipped) = parse_embeddings(&text)?;
    reports.push(report("embeddings", path, embeddings.len(), skipped));

    let (path, text) = open("tagger", &m.tagger)?;
    let (tagger, skipped) = Tagger::parse(&text).map_err(|msg| Error::parse(&path, 1, msg))?;
    reports.push(report("tagger", path, tagger.weight_count(), skipped));

    for r in &reports {
        if r.skipped > 0 {
            log::warn!(
                "{}: skipped {} malformed line(s)",
                r.path.display(),
                r.skipped
            );
        }
    }

    Ok(LoadedResources {
        bundle: ResourceBundle {
            frequency,
            concreteness,
            hypernymy,
            connectives,
            causal_verbs,
            causal_particles,
            embeddings,
            tagger,
        },
        reports,
    })
}

fn report(name: &'static str, path: PathBuf, entries: usize, skipped: usize) -> ResourceReport {
    ResourceReport {
        name,
        path,
        entries,
        skipped,
    }
}

fn data_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

fn word_lines(text: &str) -> impl Iterator<Item = &str> {
    data_lines(text).map(|(_, l)| l)
}

fn header_value<'a>(text: &'a str, key: &str) -> Option<Vec<&'a str>> {
    text.lines()
        .map(str::trim)
        .filter_map(|l| l.strip_prefix('#'))
        .map(|l| l.split_whitespace().collect::<Vec<_>>())
        .find(|f| f.first() == Some(&key))
        .map(|f| f[1..].to_vec())
}

fn split_pair(line: &str) -> Option<(&str, &str)> {
    match line.split_once('\t') {
        Some((a, b)) => Some((a.trim(), b.trim())),
        None => {
            let mut it = line.split_whitespace();
            let a = it.next()?;
            let b = it.next()?;
            if it.next().is_some() {
                return None;
            }
            Some((a, b))
        }
    }
}

pub(crate) fn parse_frequency(text: &str) -> Result<(FrequencyTable, usize)> {
    let mut counts = HashMap::new();
    let mut skipped = 0;
    for (_, line) in data_lines(text) {
        match split_pair(line).and_then(|(w, c)| c.parse::<u64>().ok().map(|c| (w, c))) {
            Some((w, c)) if c >= 1 => {
                counts.insert(w.to_lowercase(), c);
            }
            _ => skipped += 1,
        }
    }
    let total =
        header_value(text, "total").and_then(|v| v.first().and_then(|t| t.parse::<u64>().ok()));
    Ok((FrequencyTable::new(counts, total)?, skipped))
}

pub(crate) fn parse_concreteness(text: &str) -> Result<(ConcretenessNorms, usize)> {
    let (min, max) = match header_value(text, "scale") {
        Some(v) if v.len() == 2 => {
            let min = v[0]
                .parse::<f64>()
                .map_err(|_| Error::Validation("bad scale header".into()))?;
            let max = v[1]
                .parse::<f64>()
                .map_err(|_| Error::Validation("bad scale header".into()))?;
            (min, max)
        }
        _ => {
            return Err(Error::Validation(
                "concreteness file lacks `# scale MIN MAX` header".into(),
            ))
        }
    };
    let mut ratings = HashMap::new();
    let mut skipped = 0;
    for (_, line) in data_lines(text) {
        match split_pair(line).and_then(|(w, r)| r.parse::<f64>().ok().map(|r| (w, r))) {
            Some((w, r)) if r.is_finite() && (min..=max).contains(&r) => {
                ratings.insert(w.to_lowercase(), r);
            }
            _ => skipped += 1,
        }
    }
    Ok((ConcretenessNorms::new(ratings, min, max)?, skipped))
}

pub(crate) fn parse_hypernymy(text: &str) -> Result<(HypernymDepths, usize)> {
    let mut depths = HashMap::new();
    let mut skipped = 0;
    for (_, line) in data_lines(text) {
        match split_pair(line).and_then(|(w, d)| d.parse::<f64>().ok().map(|d| (w, d))) {
            Some((w, d)) if d.is_finite() && d >= 0.0 => {
                depths.insert(w.to_lowercase(), d);
            }
            _ => skipped += 1,
        }
    }
    Ok((HypernymDepths::new(depths)?, skipped))
}

pub(crate) fn parse_connectives(text: &str) -> Result<(ConnectiveLexicon, usize, usize)> {
    let mut by_cat: BTreeMap<ConnectiveCategory, Vec<String>> = BTreeMap::new();
    let mut skipped = 0;
    let mut entries = 0;
    for (_, line) in data_lines(text) {
        let parsed = line.split_once('\t').and_then(|(c, p)| {
            c.trim()
                .parse::<ConnectiveCategory>()
                .ok()
                .map(|c| (c, p.trim()))
        });
        match parsed {
            Some((c, p)) if !p.is_empty() => {
                by_cat.entry(c).or_default().push(p.to_string());
                entries += 1;
            }
            _ => skipped += 1,
        }
    }
    let categories = by_cat
        .into_iter()
        .map(|(c, ps)| (c, PhraseLexicon::new(ps)))
        .collect();
    Ok((ConnectiveLexicon::new(categories)?, entries, skipped))
}

pub(crate) fn parse_embeddings(text: &str) -> Result<(EmbeddingSpace, usize)> {
    let mut vectors = HashMap::new();
    let mut dim: Option<usize> = None;
    let mut skipped = 0;
    for (line_no, line) in data_lines(text) {
        let mut fields = line.split_whitespace();
        let word = fields.next().unwrap_or_default();
        let values: std::result::Result<Vec<f64>, _> = fields.map(str::parse::<f64>).collect();
        let Ok(values) = values else {
            skipped += 1;
            continue;
        };
        if values.is_empty() || values.iter().any(|v| !v.is_finite()) {
            skipped += 1;
            continue;
        }
        match dim {
            None => dim = Some(values.len()),
            Some(d) if d != values.len() => {
                return Err(Error::DimensionMismatch {
                    line: line_no,
                    expected: d,
                    found: values.len(),
                })
            }
            _ => {}
        }
        vectors.insert(word.to_lowercase(), values);
    }
    Ok((EmbeddingSpace::new(vectors)?, skipped))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn frequency_total_is_sum_without_header() {
        let (t, skipped) = parse_frequency("the\t100\nof 50\ncat\t10\nsat\t5\nmat\t5\n").unwrap();
        assert_eq!(t.total(), 170);
        assert_eq!(t.len(), 5);
        assert_eq!(skipped, 0);
    }

    #[test]
    fn frequency_header_total_and_malformed_lines() {
        let (t, skipped) =
            parse_frequency("# total 1000\nthe\t100\nbroken\nzero\t0\nx\tnope\n").unwrap();
        assert_eq!(t.total(), 1000);
        assert_eq!(skipped, 3);
        assert_eq!(t.per_million("the"), Some(100_000.0));
    }

    #[test]
    fn embeddings_mixed_dimension_is_fatal() {
        let err = parse_embeddings("a 1 2 3\nb 1 2\n").unwrap_err();
        assert!(matches!(
            err,
            Error::DimensionMismatch {
                line: 2,
                expected: 3,
                found: 2
            }
        ));
    }

    #[test]
    fn embeddings_skip_non_numeric() {
        let (e, skipped) = parse_embeddings("a 1 2\nb x y\nc 3 4\n").unwrap();
        assert_eq!(e.dim(), 2);
        assert_eq!(e.len(), 2);
        assert_eq!(skipped, 1);
    }

    #[test]
    fn concreteness_out_of_scale_is_skipped() {
        let (n, skipped) =
            parse_concreteness("# scale 1 5\ndog\t4.9\nidea\t1.9\nodd\t7.0\n").unwrap();
        assert_eq!(n.len(), 2);
        assert_eq!(skipped, 1);
        assert_eq!(n.midpoint(), 3.0);
    }

    #[test]
    fn connectives_require_every_category() {
        assert!(parse_connectives("causal\tbecause\n").is_err());
        let text = "causal\tbecause\nintentional\tin order to\ntemporal-expanded\tthen\nadditive\tand\nadversative\tbut\nbogus\tx\n";
        let (lex, entries, skipped) = parse_connectives(text).unwrap();
        assert_eq!(entries, 5);
        assert_eq!(skipped, 1);
        assert!(lex
            .get(ConnectiveCategory::Intentional)
            .contains("in order to"));
    }

    #[test]
    fn phrase_matching_is_greedy_and_non_overlapping() {
        let lex = PhraseLexicon::new(["because", "because of", "so", "so that"]);
        let toks = ["because", "of", "this", "so", "that", "so"];
        assert_eq!(lex.count_matches(&toks), 3);
        assert_eq!(lex.count_matches::<&str>(&[]), 0);
    }

    #[test]
    fn hypernymy_mean_of_table() {
        let (h, _) = parse_hypernymy("cat\t10\nanimal\t5\n").unwrap();
        assert_eq!(h.table_mean(), 7.5);
    }
}
