//! Greedy averaged-perceptron part-of-speech tagger.
//!
//! Model file format (UTF-8, tab-separated, one record per line):
//!
//! ```text
//! svf-tagger 1
//! classes<TAB>TAG TAG ...
//! D<TAB>word<TAB>TAG            # tag dictionary: unambiguous frequent words
//! W<TAB>feature<TAB>TAG<TAB>w   # perceptron weight
//! ```
//!
//! Feature names are space-joined templates such as `i suffix ing` or
//! `i-1 tag+i word DT dog`.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub const MODEL_HEADER: &str = "svf-tagger 1";
const START: [&str; 2] = ["-START-", "-START2-"];
const END: [&str; 2] = ["-END-", "-END2-"];

#[derive(Debug, Clone, Default)]
pub struct Tagger {
    classes: Vec<String>,
    tagdict: HashMap<String, usize>,
    weights: HashMap<String, Vec<(usize, f64)>>,
}

#[derive(Debug, Clone)]
pub struct TrainConfig {
    pub iterations: usize,
    pub seed: u64,
    /// Words seen at least this often...
    pub tagdict_min_count: usize,
    /// ...with this share of a single tag go straight to the dictionary.
    pub tagdict_min_share: f64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            iterations: 5,
            seed: 1,
            tagdict_min_count: 20,
            tagdict_min_share: 0.97,
        }
    }
}

/// Treebank spelling of punctuation the model was trained on.
pub fn treebank_form(surface: &str, opening: bool) -> &str {
    match surface {
        "(" | "[" | "{" => "-LRB-",
        ")" | "]" | "}" => "-RRB-",
        "\"" => {
            if opening {
                "``"
            } else {
                "''"
            }
        }
        "\u{201c}" | "\u{ab}" => "``",
        "\u{201d}" | "\u{bb}" => "''",
        "\u{2018}" => "`",
        "\u{2019}" => "'",
        "\u{2014}" | "\u{2013}" => "--",
        "\u{2026}" => "...",
        other => other,
    }
}

fn normalize(word: &str) -> String {
    let first = word.chars().next();
    if word.contains('-') && first != Some('-') {
        "!HYPHEN".to_string()
    } else if word.chars().count() == 4 && word.chars().all(char::is_numeric) {
        "!YEAR".to_string()
    } else if first.is_some_and(char::is_numeric) {
        "!DIGITS".to_string()
    } else {
        word.to_lowercase()
    }
}

fn suffix(word: &str, n: usize) -> &str {
    match word.char_indices().rev().nth(n - 1) {
        Some((i, _)) => &word[i..],
        None => word,
    }
}

fn prefix1(word: &str) -> &str {
    match word.chars().next() {
        Some(c) => &word[..c.len_utf8()],
        None => "",
    }
}

fn features(i: usize, word: &str, context: &[String], prev: &str, prev2: &str) -> Vec<String> {
    let i = i + START.len();
    vec![
        "bias".to_string(),
        format!("i suffix {}", suffix(word, 3)),
        format!("i pref1 {}", prefix1(word)),
        format!("i-1 tag {prev}"),
        format!("i-2 tag {prev2}"),
        format!("i tag+i-2 tag {prev} {prev2}"),
        format!("i word {}", context[i]),
        format!("i-1 tag+i word {prev} {}", context[i]),
        format!("i-1 word {}", context[i - 1]),
        format!("i-1 suffix {}", suffix(&context[i - 1], 3)),
        format!("i-2 word {}", context[i - 2]),
        format!("i+1 word {}", context[i + 1]),
        format!("i+1 suffix {}", suffix(&context[i + 1], 3)),
        format!("i+2 word {}", context[i + 2]),
    ]
}

fn context_of(words: &[&str]) -> Vec<String> {
    START
        .iter()
        .map(|s| s.to_string())
        .chain(words.iter().map(|w| normalize(w)))
        .chain(END.iter().map(|s| s.to_string()))
        .collect()
}

impl Tagger {
    pub fn classes(&self) -> &[String] {
        &self.classes
    }

    pub fn weight_count(&self) -> usize {
        self.weights.values().map(Vec::len).sum()
    }

    pub fn tagdict_len(&self) -> usize {
        self.tagdict.len()
    }

    /// Tags one sentence. Never fails: a model without classes tags
    /// everything `NN`.
    pub fn tag(&self, words: &[&str]) -> Vec<String> {
        if self.classes.is_empty() {
            return vec!["NN".to_string(); words.len()];
        }
        let context = context_of(words);
        let mut prev = START[0].to_string();
        let mut prev2 = START[1].to_string();
        let mut out = Vec::with_capacity(words.len());
        for (i, word) in words.iter().enumerate() {
            let tag = match self.tagdict.get(*word) {
                Some(&c) => self.classes[c].clone(),
                None => {
                    let feats = features(i, word, &context, &prev, &prev2);
                    self.classes[self.predict(&feats)].clone()
                }
            };
            prev2 = std::mem::replace(&mut prev, tag.clone());
            out.push(tag);
        }
        out
    }

    fn scores(&self, feats: &[String]) -> Vec<f64> {
        let mut scores = vec![0.0; self.classes.len()];
        for f in feats {
            if let Some(ws) = self.weights.get(f) {
                for &(c, w) in ws {
                    scores[c] += w;
                }
            }
        }
        scores
    }

    fn predict(&self, feats: &[String]) -> usize {
        let scores = self.scores(feats);
        // highest score, ties to the larger tag string
        (0..self.classes.len())
            .max_by(|&a, &b| {
                scores[a]
                    .total_cmp(&scores[b])
                    .then_with(|| self.classes[a].cmp(&self.classes[b]))
            })
            .unwrap_or(0)
    }

    /// Parses a model file. Returns the tagger and the number of malformed
    /// lines that were skipped.
    pub fn parse(text: &str) -> Result<(Tagger, usize), String> {
        let mut lines = text.lines();
        match lines.next() {
            Some(h) if h.trim() == MODEL_HEADER => {}
            Some(h) => return Err(format!("unsupported tagger header `{h}`")),
            None => return Err("empty tagger model".into()),
        }
        let classes: Vec<String> = match lines.next().and_then(|l| l.strip_prefix("classes\t")) {
            Some(rest) => rest
                .split(' ')
                .filter(|s| !s.is_empty())
                .map(String::from)
                .collect(),
            None => return Err("missing `classes` line".into()),
        };
        if classes.is_empty() {
            return Err("tagger model declares no classes".into());
        }
        let index: HashMap<&str, usize> = classes
            .iter()
            .enumerate()
            .map(|(i, c)| (c.as_str(), i))
            .collect();
        let mut tagger = Tagger {
            classes: classes.clone(),
            ..Default::default()
        };
        let mut skipped = 0;
        for line in lines {
            if line.is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split('\t').collect();
            match fields.as_slice() {
                ["D", word, tag] => match index.get(tag) {
                    Some(&c) => {
                        tagger.tagdict.insert(word.to_string(), c);
                    }
                    None => skipped += 1,
                },
                ["W", feat, tag, w] => match (index.get(tag), w.parse::<f64>()) {
                    (Some(&c), Ok(w)) if w.is_finite() => {
                        tagger
                            .weights
                            .entry(feat.to_string())
                            .or_default()
                            .push((c, w));
                    }
                    _ => skipped += 1,
                },
                _ => skipped += 1,
            }
        }
        Ok((tagger, skipped))
    }

    /// Serializes in the documented format; output is sorted and therefore
    /// deterministic.
    pub fn to_model_string(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{MODEL_HEADER}");
        let _ = writeln!(out, "classes\t{}", self.classes.join(" "));
        let dict: BTreeMap<&String, &usize> = self.tagdict.iter().collect();
        for (word, &c) in dict {
            let _ = writeln!(out, "D\t{word}\t{}", self.classes[c]);
        }
        let weights: BTreeMap<&String, &Vec<(usize, f64)>> = self.weights.iter().collect();
        for (feat, ws) in weights {
            let mut ws = ws.clone();
            ws.sort_by_key(|&(c, _)| c);
            for (c, w) in ws {
                let _ = writeln!(out, "W\t{feat}\t{}\t{w}", self.classes[c]);
            }
        }
        out
    }

    /// Trains on `(words, tags)` sentences with the averaged perceptron.
    pub fn train(
        sentences: &[(Vec<String>, Vec<String>)],
        config: &TrainConfig,
    ) -> Result<Tagger, String> {
        let mut class_set = std::collections::BTreeSet::new();
        for (words, tags) in sentences {
            if words.len() != tags.len() {
                return Err(format!(
                    "sentence has {} words but {} tags",
                    words.len(),
                    tags.len()
                ));
            }
            class_set.extend(tags.iter().cloned());
        }
        if class_set.is_empty() {
            return Err("training data contains no tagged tokens".into());
        }
        let classes: Vec<String> = class_set.into_iter().collect();
        let index: HashMap<String, usize> = classes
            .iter()
            .enumerate()
            .map(|(i, c)| (c.clone(), i))
            .collect();

        let mut counts: HashMap<&str, HashMap<usize, usize>> = HashMap::new();
        for (words, tags) in sentences {
            for (w, t) in words.iter().zip(tags) {
                *counts
                    .entry(w)
                    .or_default()
                    .entry(index[t.as_str()])
                    .or_default() += 1;
            }
        }
        let mut tagdict = HashMap::new();
        for (word, by_tag) in counts {
            let n: usize = by_tag.values().sum();
            let (&best, &freq) = by_tag
                .iter()
                .max_by(|a, b| a.1.cmp(b.1).then(b.0.cmp(a.0)))
                .expect("non-empty");
            if n >= config.tagdict_min_count && freq as f64 / n as f64 >= config.tagdict_min_share {
                tagdict.insert(word.to_string(), best);
            }
        }

        let mut tagger = Tagger {
            classes,
            tagdict,
            weights: HashMap::new(),
        };
        let mut acc = Averager::default();
        let mut order: Vec<usize> = (0..sentences.len()).collect();
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
        for _ in 0..config.iterations {
            for &s in &order {
                let (words, tags) = &sentences[s];
                let refs: Vec<&str> = words.iter().map(String::as_str).collect();
                let context = context_of(&refs);
                let mut prev = START[0].to_string();
                let mut prev2 = START[1].to_string();
                for (i, word) in refs.iter().enumerate() {
                    let guess = match tagger.tagdict.get(*word) {
                        Some(&c) => c,
                        None => {
                            let feats = features(i, word, &context, &prev, &prev2);
                            let guess = tagger.predict(&feats);
                            acc.update(&mut tagger.weights, index[tags[i].as_str()], guess, &feats);
                            guess
                        }
                    };
                    prev2 = std::mem::replace(&mut prev, tagger.classes[guess].clone());
                }
            }
            order.shuffle(&mut rng);
        }
        acc.average(&mut tagger.weights);
        Ok(tagger)
    }
}

/// Running totals for weight averaging, keyed by (feature, class).
#[derive(Default)]
struct Averager {
    step: u64,
    totals: HashMap<(String, usize), f64>,
    stamps: HashMap<(String, usize), u64>,
}

impl Averager {
    fn update(
        &mut self,
        weights: &mut HashMap<String, Vec<(usize, f64)>>,
        truth: usize,
        guess: usize,
        feats: &[String],
    ) {
        self.step += 1;
        if truth == guess {
            return;
        }
        for f in feats {
            let ws = weights.entry(f.clone()).or_default();
            for (class, delta) in [(truth, 1.0), (guess, -1.0)] {
                let slot = match ws.iter().position(|&(c, _)| c == class) {
                    Some(p) => p,
                    None => {
                        ws.push((class, 0.0));
                        ws.len() - 1
                    }
                };
                let w = ws[slot].1;
                let key = (f.clone(), class);
                let stamp = self.stamps.get(&key).copied().unwrap_or(0);
                *self.totals.entry(key.clone()).or_default() += (self.step - stamp) as f64 * w;
                self.stamps.insert(key, self.step);
                ws[slot].1 = w + delta;
            }
        }
    }

    fn average(&self, weights: &mut HashMap<String, Vec<(usize, f64)>>) {
        if self.step == 0 {
            return;
        }
        for (feat, ws) in weights.iter_mut() {
            let averaged: Vec<(usize, f64)> = ws
                .iter()
                .filter_map(|&(c, w)| {
                    let key = (feat.clone(), c);
                    let total = self.totals.get(&key).copied().unwrap_or(0.0)
                        + (self.step - self.stamps.get(&key).copied().unwrap_or(0)) as f64 * w;
                    let avg = (total / self.step as f64 * 1000.0).round() / 1000.0;
                    (avg != 0.0).then_some((c, avg))
                })
                .collect();
            *ws = averaged;
        }
        weights.retain(|_, ws| !ws.is_empty());
    }
}

/// Parses training text: one sentence per line, `word/TAG` tokens separated
/// by whitespace (split at the last `/`). Returns sentences and the 1-based
/// numbers of lines containing a malformed token.
pub fn parse_training_text(text: &str) -> (Vec<(Vec<String>, Vec<String>)>, Vec<usize>) {
    let mut sentences = Vec::new();
    let mut bad = Vec::new();
    for (ln, line) in text.lines().enumerate() {
        let mut words = Vec::new();
        let mut tags = Vec::new();
        let mut ok = true;
        for tok in line.split_whitespace() {
            match tok.rsplit_once('/') {
                Some((w, t)) if !w.is_empty() && !t.is_empty() => {
                    words.push(w.to_string());
                    tags.push(t.to_string());
                }
                _ => ok = false,
            }
        }
        if !ok {
            bad.push(ln + 1);
        } else if !words.is_empty() {
            sentences.push((words, tags));
        }
    }
    (sentences, bad)
}
