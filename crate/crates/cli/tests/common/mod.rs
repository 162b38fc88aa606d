#![allow(dead_code)]

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const BIN: &str = env!("CARGO_BIN_EXE_svf");

pub fn resources_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../resources")
}

const SUBJECTS: &[&str] = &[
    "the senator",
    "a local official",
    "the company",
    "the governor",
    "a spokesperson",
    "the committee",
    "the mayor",
    "an unnamed source",
    "the agency",
    "the president",
    "a group of residents",
    "the council",
];

const VERBS: &[&str] = &[
    "announced",
    "denied",
    "approved",
    "criticized",
    "defended",
    "questioned",
    "supported",
    "rejected",
    "reviewed",
    "described",
];

const OBJECTS: &[&str] = &[
    "the new budget",
    "a controversial plan",
    "the tax proposal",
    "the report",
    "the election results",
    "a school policy",
    "the health bill",
    "the trade agreement",
    "the investigation",
    "the water project",
];

const TAILS: &[&str] = &[
    "on Tuesday",
    "after a long meeting",
    "because the deadline had passed",
    "although many people disagreed",
    "in a short statement",
    "during the morning session",
    "while reporters waited outside",
    "and then left the building",
];

const PASSIVE: &[&str] = &[
    "The documents were released late at night.",
    "The money was transferred to a private account.",
    "The evidence was hidden from the public.",
    "The decision was made without a vote.",
    "The files were deleted before the hearing.",
];

const FIRST_PERSON: &[&str] = &[
    "I think this is the best day of my life.",
    "I told my neighbor that I would never do it again.",
    "My cat was not impressed by the speech.",
    "I tried to explain it to myself for an hour.",
    "I am still waiting for my free sandwich.",
];

fn sentence(rng: &mut ChaCha8Rng, satire: bool) -> String {
    let special = rng.gen_bool(0.25);
    if special {
        let first_person = if satire {
            rng.gen_bool(0.6)
        } else {
            rng.gen_bool(0.4)
        };
        let pool = if first_person { FIRST_PERSON } else { PASSIVE };
        return pool.choose(rng).unwrap().to_string();
    }
    let mut s = format!(
        "{} {} {}",
        SUBJECTS.choose(rng).unwrap(),
        VERBS.choose(rng).unwrap(),
        OBJECTS.choose(rng).unwrap()
    );
    if rng.gen_bool(0.5) {
        s.push(' ');
        s.push_str(TAILS.choose(rng).unwrap());
    }
    let mut chars = s.chars();
    let first = chars.next().unwrap().to_uppercase().collect::<String>();
    format!("{first}{}.", chars.as_str())
}

pub fn story(rng: &mut ChaCha8Rng, satire: bool) -> String {
    let headline = {
        let s = sentence(rng, satire);
        s.trim_end_matches('.').to_string()
    };
    let paragraphs = rng.gen_range(1..=3);
    let mut text = format!("{headline}\n\n");
    for _ in 0..paragraphs {
        let n = rng.gen_range(2..=5);
        let p: Vec<String> = (0..n).map(|_| sentence(rng, satire)).collect();
        text.push_str(&p.join(" "));
        text.push_str("\n\n");
    }
    text
}

/// Raw dataset layout: `<root>/fake/*.txt` and `<root>/satire/*.txt`.
pub fn write_raw_corpus(root: &Path, per_class: usize, seed: u64) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for (dir, satire) in [("fake", false), ("satire", true)] {
        let d = root.join(dir);
        fs::create_dir_all(&d).unwrap();
        for i in 0..per_class {
            fs::write(d.join(format!("{dir}_{i:03}.txt")), story(&mut rng, satire)).unwrap();
        }
    }
}

pub fn svf(args: &[&str], cwd: &Path) -> Output {
    Command::new(BIN)
        .args(args)
        .current_dir(cwd)
        .env("SVF_RESOURCE_DIR", resources_dir())
        .env("RUST_LOG", "warn")
        .output()
        .expect("binary runs")
}

pub fn ok(args: &[&str], cwd: &Path) -> Output {
    let out = svf(args, cwd);
    assert!(
        out.status.success(),
        "svf {args:?} failed ({:?}):\n{}",
        out.status.code(),
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

/// Every file below `dir` with its bytes, sorted by relative path.
pub fn snapshot(dir: &Path) -> Vec<(PathBuf, Vec<u8>)> {
    let mut out = Vec::new();
    let mut stack = vec![dir.to_path_buf()];
    while let Some(d) = stack.pop() {
        for entry in fs::read_dir(&d).unwrap() {
            let p = entry.unwrap().path();
            if p.is_dir() {
                stack.push(p);
            } else {
                out.push((
                    p.strip_prefix(dir).unwrap().to_path_buf(),
                    fs::read(&p).unwrap(),
                ));
            }
        }
    }
    out.sort();
    out
}

/// Raw corpus plus an ingested corpus file under `root`.
pub fn prepared(root: &Path, per_class: usize, seed: u64) {
    write_raw_corpus(&root.join("raw"), per_class, seed);
    ok(&["ingest", "raw", "--out", "out/corpus.jsonl"], root);
}
