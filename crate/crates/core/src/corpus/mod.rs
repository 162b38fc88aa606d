//! Labelled article corpus, lexical resources and feature-table files.
//!
//! The canonical corpus file holds one JSON object per line with the fields
//! `id`, `label` (`fake` or `satire`), `headline`, `body` and optional
//! `source`. Records that fail validation are reported with their line
//! number and skipped; a duplicate id aborts the load.

mod ingest;
mod resources;
mod table;

use std::collections::HashSet;
use std::fmt;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use ingest::{ingest_dir, IngestReport};
pub use resources::{
    load_resources, ConcretenessNorms, ConnectiveCategory, ConnectiveLexicon, EmbeddingSpace,
    FrequencyTable, HypernymDepths, LoadedResources, PhraseLexicon, ResourceBundle,
    ResourceManifest, ResourceReport, RESOURCE_DIR_ENV,
};
pub use table::{read_features, read_flags, write_features, write_flags, NA_TOKEN};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Label {
    Fake,
    Satire,
}

impl Label {
    pub const ALL: [Label; 2] = [Label::Fake, Label::Satire];

    /// Regression coding: Satire = 1.
    pub fn as_binary(self) -> f64 {
        match self {
            Label::Fake => 0.0,
            Label::Satire => 1.0,
        }
    }

    pub fn index(self) -> usize {
        match self {
            Label::Fake => 0,
            Label::Satire => 1,
        }
    }

    pub fn other(self) -> Label {
        match self {
            Label::Fake => Label::Satire,
            Label::Satire => Label::Fake,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Label::Fake => "fake",
            Label::Satire => "satire",
        }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Label {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "fake" => Ok(Label::Fake),
            "satire" => Ok(Label::Satire),
            other => Err(Error::Validation(format!("unknown label `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Article {
    pub id: String,
    pub label: Label,
    pub headline: String,
    pub body: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub source: Option<String>,
}

impl Article {
    /// Headline and body joined by a paragraph break.
    pub fn full_text(&self) -> String {
        if self.headline.trim().is_empty() {
            self.body.clone()
        } else {
            format!("{}\n\n{}", self.headline.trim(), self.body)
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct LabelCounts {
    pub fake: usize,
    pub satire: usize,
}

impl LabelCounts {
    pub fn get(&self, label: Label) -> usize {
        match label {
            Label::Fake => self.fake,
            Label::Satire => self.satire,
        }
    }

    pub fn total(&self) -> usize {
        self.fake + self.satire
    }
}

impl fmt::Display for LabelCounts {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Fake: {}, Satire: {}", self.fake, self.satire)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Corpus {
    articles: Vec<Article>,
    counts: LabelCounts,
}

impl Corpus {
    /// Validates id uniqueness and non-empty ids/bodies.
    pub fn new(articles: Vec<Article>) -> Result<Self> {
        let mut seen = HashSet::new();
        let mut counts = LabelCounts::default();
        for a in &articles {
            validate_article(a).map_err(Error::Validation)?;
            if !seen.insert(a.id.as_str()) {
                return Err(Error::DuplicateId(a.id.clone()));
            }
            match a.label {
                Label::Fake => counts.fake += 1,
                Label::Satire => counts.satire += 1,
            }
        }
        Ok(Corpus { articles, counts })
    }

    pub fn articles(&self) -> &[Article] {
        &self.articles
    }

    pub fn counts(&self) -> LabelCounts {
        self.counts
    }

    pub fn len(&self) -> usize {
        self.articles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.articles.is_empty()
    }

    pub fn get(&self, id: &str) -> Option<&Article> {
        self.articles.iter().find(|a| a.id == id)
    }

    /// First `n` articles, preserving order.
    pub fn truncated(&self, n: usize) -> Corpus {
        Corpus::new(self.articles.iter().take(n).cloned().collect())
            .expect("subset of a valid corpus")
    }
}

fn validate_article(a: &Article) -> std::result::Result<(), String> {
    if a.id.trim().is_empty() {
        return Err("empty id".into());
    }
    if a.body.trim().is_empty() {
        return Err(format!("article `{}` has an empty body", a.id));
    }
    Ok(())
}

/// A record skipped during loading.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rejection {
    /// 1-based line number (or file path for ingestion).
    pub line: usize,
    pub reason: String,
}

#[derive(Debug, Clone)]
pub struct CorpusLoad {
    pub corpus: Corpus,
    pub rejections: Vec<Rejection>,
}

#[derive(Deserialize)]
struct RawRecord {
    id: Option<String>,
    label: Option<String>,
    headline: Option<String>,
    body: Option<String>,
    #[serde(default)]
    source: Option<String>,
}

/// Load a line-delimited corpus file.
pub fn load_corpus(path: impl AsRef<Path>) -> Result<CorpusLoad> {
    let path = path.as_ref();
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    let mut articles = Vec::new();
    let mut rejections = Vec::new();
    let mut seen = HashSet::new();

    for (i, raw_line) in bytes.split(|&b| b == b'\n').enumerate() {
        let line_no = i + 1;
        let raw_line = raw_line.strip_suffix(b"\r").unwrap_or(raw_line);
        let line = match std::str::from_utf8(raw_line) {
            Ok(l) => l,
            Err(e) => {
                rejections.push(Rejection {
                    line: line_no,
                    reason: format!("invalid UTF-8: {e}"),
                });
                continue;
            }
        };
        if line.trim().is_empty() {
            continue;
        }
        match parse_record(line) {
            Ok(article) => {
                if !seen.insert(article.id.clone()) {
                    return Err(Error::DuplicateId(article.id));
                }
                articles.push(article);
            }
            Err(reason) => rejections.push(Rejection {
                line: line_no,
                reason,
            }),
        }
    }

    let corpus = Corpus::new(articles)?;
    Ok(CorpusLoad { corpus, rejections })
}

fn parse_record(line: &str) -> std::result::Result<Article, String> {
    let raw: RawRecord =
        serde_json::from_str(line).map_err(|e| format!("malformed record: {e}"))?;
    let id = raw.id.ok_or("missing field `id`")?;
    let label = raw.label.ok_or("missing field `label`")?;
    let label = label.parse::<Label>().map_err(|e| e.to_string())?;
    let headline = raw.headline.ok_or("missing field `headline`")?;
    let body = raw.body.ok_or("missing field `body`")?;
    let article = Article {
        id,
        label,
        headline,
        body,
        source: raw.source,
    };
    validate_article(&article)?;
    Ok(article)
}

/// Write the canonical corpus file, one record per line.
pub fn write_corpus(corpus: &Corpus, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let mut out = String::new();
    for a in corpus.articles() {
        out.push_str(&serde_json::to_string(a).expect("article serializes"));
        out.push('\n');
    }
    fs::write(path, out).map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn write_tmp(contents: &[u8]) -> tempfile::NamedTempFile {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(contents).unwrap();
        f
    }

    #[test]
    fn empty_file_gives_empty_corpus() {
        let f = write_tmp(b"");
        let load = load_corpus(f.path()).unwrap();
        assert!(load.corpus.is_empty());
        assert_eq!(load.corpus.counts(), LabelCounts::default());
        assert!(load.rejections.is_empty());
    }

    #[test]
    fn missing_body_is_rejected_with_line_number() {
        let f = write_tmp(
            br#"{"id":"a","label":"fake","headline":"H","body":"One."}
{"id":"b","label":"satire","headline":"H"}
{"id":"c","label":"satire","headline":"H","body":"Two."}
"#,
        );
        let load = load_corpus(f.path()).unwrap();
        assert_eq!(load.corpus.len(), 2);
        assert_eq!(load.rejections.len(), 1);
        assert_eq!(load.rejections[0].line, 2);
        assert!(load.rejections[0].reason.contains("body"));
    }

    #[test]
    fn unknown_label_rejected() {
        let f = write_tmp(br#"{"id":"a","label":"real","headline":"H","body":"B"}"#);
        let load = load_corpus(f.path()).unwrap();
        assert!(load.corpus.is_empty());
        assert!(load.rejections[0].reason.contains("unknown label"));
    }

    #[test]
    fn invalid_utf8_is_a_rejection() {
        let mut bytes = br#"{"id":"a","label":"fake","headline":"H","body":"ok"}"#.to_vec();
        bytes.extend_from_slice(
            b"\n{\"id\":\"b\",\"label\":\"fake\",\"headline\":\"\xff\",\"body\":\"x\"}\n",
        );
        let f = write_tmp(&bytes);
        let load = load_corpus(f.path()).unwrap();
        assert_eq!(load.corpus.len(), 1);
        assert_eq!(load.rejections[0].line, 2);
    }

    #[test]
    fn duplicate_id_is_fatal() {
        let f = write_tmp(
            br#"{"id":"a","label":"fake","headline":"H","body":"B"}
{"id":"a","label":"satire","headline":"H","body":"B"}"#,
        );
        assert!(matches!(load_corpus(f.path()), Err(Error::DuplicateId(id)) if id == "a"));
    }

    #[test]
    fn missing_file_is_io_error() {
        let err = load_corpus("/nonexistent/corpus.jsonl").unwrap_err();
        assert_eq!(err.kind(), crate::ErrorKind::Io);
    }

    #[test]
    fn write_then_load_is_identity() {
        let corpus = Corpus::new(vec![
            Article {
                id: "x1".into(),
                label: Label::Satire,
                headline: "A \"quoted\" head".into(),
                body: "Body text.\n\nSecond paragraph.".into(),
                source: Some("site".into()),
            },
            Article {
                id: "x2".into(),
                label: Label::Fake,
                headline: String::new(),
                body: "Only body.".into(),
                source: None,
            },
        ])
        .unwrap();
        let f = tempfile::NamedTempFile::new().unwrap();
        write_corpus(&corpus, f.path()).unwrap();
        let a = load_corpus(f.path()).unwrap().corpus;
        let b = load_corpus(f.path()).unwrap().corpus;
        assert_eq!(a, corpus);
        assert_eq!(a, b);
        assert_eq!(a.counts(), LabelCounts { fake: 1, satire: 1 });
    }
}
