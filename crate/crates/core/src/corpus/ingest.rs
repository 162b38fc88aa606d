//! Conversion of a raw story directory into the canonical corpus.
//!
//! Layout: every regular file below `root` is one story. The label comes from
//! the first path component (relative to `root`) whose lowercased name
//! contains `fake` or `satire`. The first non-blank line of a story is its
//! headline, the remainder its body.

use std::fs;
use std::path::{Path, PathBuf};

use super::{Article, Corpus, Label, Rejection};
use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub struct IngestReport {
    pub corpus: Corpus,
    /// `line` is the 1-based position of the file in the sorted walk.
    pub rejections: Vec<(PathBuf, Rejection)>,
    pub files_seen: usize,
}

impl IngestReport {
    pub fn rejection_rate(&self) -> f64 {
        if self.files_seen == 0 {
            0.0
        } else {
            self.rejections.len() as f64 / self.files_seen as f64
        }
    }
}

pub fn ingest_dir(root: impl AsRef<Path>) -> Result<IngestReport> {
    let root = root.as_ref();
    let mut files = Vec::new();
    collect_files(root, &mut files)?;
    files.sort();
    if files.is_empty() {
        return Err(Error::Validation(format!(
            "no story files under {}",
            root.display()
        )));
    }

    let mut articles = Vec::new();
    let mut rejections = Vec::new();
    for (i, path) in files.iter().enumerate() {
        let rel = path.strip_prefix(root).unwrap_or(path);
        let reject = |reason: String| {
            (
                path.clone(),
                Rejection {
                    line: i + 1,
                    reason,
                },
            )
        };
        let Some(label) = label_from_path(rel) else {
            rejections.push(reject("no fake/satire directory in path".into()));
            continue;
        };
        let bytes = match fs::read(path) {
            Ok(b) => b,
            Err(e) => {
                rejections.push(reject(format!("unreadable: {e}")));
                continue;
            }
        };
        let text = match String::from_utf8(bytes) {
            Ok(t) => t,
            Err(e) => {
                rejections.push(reject(format!("invalid UTF-8: {e}")));
                continue;
            }
        };
        let Some((headline, body)) = split_headline(&text) else {
            rejections.push(reject("story has no body".into()));
            continue;
        };
        articles.push(Article {
            id: story_id(rel),
            label,
            headline,
            body,
            source: None,
        });
    }

    Ok(IngestReport {
        corpus: Corpus::new(articles)?,
        rejections,
        files_seen: files.len(),
    })
}

fn collect_files(dir: &Path, out: &mut Vec<PathBuf>) -> Result<()> {
    let entries = fs::read_dir(dir).map_err(|e| Error::io(dir, e))?;
    for entry in entries {
        let entry = entry.map_err(|e| Error::io(dir, e))?;
        let path = entry.path();
        if entry.file_name().to_string_lossy().starts_with('.') {
            continue;
        }
        let ft = entry.file_type().map_err(|e| Error::io(&path, e))?;
        if ft.is_dir() {
            collect_files(&path, out)?;
        } else if ft.is_file() {
            out.push(path);
        }
    }
    Ok(())
}

fn label_from_path(rel: &Path) -> Option<Label> {
    let parent = rel.parent()?;
    parent.components().find_map(|c| {
        let name = c.as_os_str().to_string_lossy().to_lowercase();
        if name.contains("satire") {
            Some(Label::Satire)
        } else if name.contains("fake") {
            Some(Label::Fake)
        } else {
            None
        }
    })
}

fn story_id(rel: &Path) -> String {
    let no_ext = rel.with_extension("");
    no_ext
        .components()
        .map(|c| c.as_os_str().to_string_lossy().into_owned())
        .collect::<Vec<_>>()
        .join("/")
}

/// First non-blank line → headline; rest → body. `None` when the body is empty.
pub(crate) fn split_headline(text: &str) -> Option<(String, String)> {
    let text = text.trim_start_matches('\u{feff}');
    let mut lines = text.lines();
    let headline = lines
        .by_ref()
        .find(|l| !l.trim().is_empty())?
        .trim()
        .to_string();
    let body = lines.collect::<Vec<_>>().join("\n").trim().to_string();
    if body.is_empty() {
        None
    } else {
        Some((headline, body))
    }
}
