//! Treebank-style tokenizer producing spans into the original text.
//!
//! Whitespace-separated chunks are split further:
//! - leading quotes, brackets and currency symbols become their own tokens;
//! - trailing punctuation (`, ; : ! ? . %`, closing quotes and brackets, `...`)
//!   is peeled off, except the period of an abbreviation that is not the last
//!   chunk of the sentence;
//! - dashes (`--`, en and em dash) inside a chunk separate words;
//! - clitics are split: `n't`, `'s`, `'re`, `'ve`, `'ll`, `'d`, `'m`
//!   (so "don't" → "do" + "n't", "can't" → "ca" + "n't").

use super::Span;

const LEADING: &[char] = &[
    '"', '\'', '(', '[', '{', '\u{201c}', '\u{2018}', '`', '$', '#', '\u{a3}', '\u{20ac}',
    '\u{ab}', '*', '\u{2014}', '\u{2013}',
];
const TRAILING: &[char] = &[
    '"', '\'', ')', ']', '}', '\u{201d}', '\u{2019}', ',', ';', ':', '!', '?', '.', '%',
    '\u{2026}', '\u{bb}', '*', '\u{2014}', '\u{2013}',
];
const CLITICS: &[&str] = &["n't", "'s", "'re", "'ve", "'ll", "'d", "'m"];
const ABBREVIATIONS: &[&str] = &[
    "mr", "mrs", "ms", "dr", "prof", "sr", "jr", "st", "sen", "rep", "gov", "gen", "col", "lt",
    "sgt", "capt", "rev", "hon", "pres", "mt", "ft", "no", "vs", "etc", "inc", "ltd", "co", "corp",
    "jan", "feb", "mar", "apr", "jun", "jul", "aug", "sep", "sept", "oct", "nov", "dec", "e.g",
    "i.e", "a.m", "p.m", "u.s", "u.k", "u.n", "d.c", "approx", "dept", "est", "fig", "mass",
    "calif", "fla", "wash",
];

/// Tokens of the text inside `span`; returned spans are absolute offsets.
pub fn tokenize(text: &str, span: Span) -> Vec<Span> {
    let s = &text[span.start..span.end];
    let mut chunks = Vec::new();
    let mut start = None;
    for (i, c) in s.char_indices() {
        if c.is_whitespace() {
            if let Some(st) = start.take() {
                chunks.push((st, i));
            }
        } else if start.is_none() {
            start = Some(i);
        }
    }
    if let Some(st) = start {
        chunks.push((st, s.len()));
    }
    let last = chunks.len().saturating_sub(1);
    let mut out = Vec::new();
    for (k, &(a, b)) in chunks.iter().enumerate() {
        split_chunk(s, a, b, k == last, &mut out);
    }
    out.into_iter()
        .map(|(a, b)| Span::new(span.start + a, span.start + b))
        .collect()
}

fn normalize_apostrophe(s: &str) -> String {
    s.replace('\u{2019}', "'").to_lowercase()
}

fn split_chunk(
    s: &str,
    mut a: usize,
    mut b: usize,
    last_in_sentence: bool,
    out: &mut Vec<(usize, usize)>,
) {
    if is_clitic(&s[a..b]) {
        out.push((a, b));
        return;
    }
    // leading punctuation
    while a < b {
        let c = s[a..b].chars().next().unwrap();
        let is_signed_number = (c == '\u{2013}' || c == '\u{2014}')
            && s[a + c.len_utf8()..b]
                .chars()
                .next()
                .is_some_and(|d| d.is_ascii_digit());
        if LEADING.contains(&c) && !is_signed_number && b - a > c.len_utf8() {
            out.push((a, a + c.len_utf8()));
            a += c.len_utf8();
            if is_clitic(&s[a..b]) {
                out.push((a, b));
                return;
            }
        } else {
            break;
        }
    }
    // trailing punctuation, collected in reverse
    let mut tail = Vec::new();
    while a < b {
        let piece = &s[a..b];
        if piece.ends_with("...") && piece.len() > 3 {
            tail.push((b - 3, b));
            b -= 3;
            continue;
        }
        let c = piece.chars().next_back().unwrap();
        if !TRAILING.contains(&c) || b - a == c.len_utf8() {
            break;
        }
        if c == '.' && !last_in_sentence && is_abbreviation(&piece[..piece.len() - 1]) {
            break;
        }
        if (c == '\'' || c == '\u{2019}') && is_clitic(piece) {
            break;
        }
        tail.push((b - c.len_utf8(), b));
        b -= c.len_utf8();
    }
    split_core(s, a, b, out);
    out.extend(tail.into_iter().rev());
}

fn split_core(s: &str, a: usize, b: usize, out: &mut Vec<(usize, usize)>) {
    if a >= b {
        return;
    }
    let piece = &s[a..b];
    // dashes between words
    for dash in ["--", "\u{2014}", "\u{2013}"] {
        if let Some(pos) = piece.find(dash) {
            if pos > 0 && pos + dash.len() < piece.len() {
                split_core(s, a, a + pos, out);
                out.push((a + pos, a + pos + dash.len()));
                split_core(s, a + pos + dash.len(), b, out);
                return;
            }
        }
    }
    let lower = normalize_apostrophe(piece);
    for clitic in CLITICS {
        if lower.ends_with(clitic) && lower.len() > clitic.len() {
            let cut = b - clitic_len_in(piece, clitic);
            if cut > a && s[a..cut].chars().last().is_some_and(char::is_alphanumeric) {
                out.push((a, cut));
                out.push((cut, b));
                return;
            }
        }
    }
    out.push((a, b));
}

/// Byte length of the clitic suffix within `piece` (curly apostrophes are 3 bytes).
fn clitic_len_in(piece: &str, clitic: &str) -> usize {
    let n = clitic.chars().count();
    piece
        .char_indices()
        .rev()
        .nth(n - 1)
        .map(|(i, _)| piece.len() - i)
        .unwrap_or(piece.len())
}

fn is_clitic(piece: &str) -> bool {
    let lower = normalize_apostrophe(piece);
    CLITICS.contains(&lower.as_str())
}

fn is_abbreviation(word: &str) -> bool {
    let lower = word.to_lowercase();
    if ABBREVIATIONS.contains(&lower.as_str()) {
        return true;
    }
    // single initials and dotted acronyms (J, U.S, D.C)
    let letters: Vec<char> = word.chars().filter(|c| *c != '.').collect();
    !letters.is_empty()
        && letters.iter().all(|c| c.is_alphabetic())
        && (letters.len() == 1 || word.contains('.'))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toks(text: &str) -> Vec<&str> {
        tokenize(text, Span::new(0, text.len()))
            .into_iter()
            .map(|s| &text[s.start..s.end])
            .collect()
    }

    #[test]
    fn simple_sentence() {
        assert_eq!(toks("The cat sat."), vec!["The", "cat", "sat", "."]);
    }

    #[test]
    fn contractions() {
        assert_eq!(toks("don't"), vec!["do", "n't"]);
        assert_eq!(
            toks("I can't, they're here."),
            vec!["I", "ca", "n't", ",", "they", "'re", "here", "."]
        );
        assert_eq!(toks("John\u{2019}s dog"), vec!["John", "\u{2019}s", "dog"]);
    }

    #[test]
    fn empty_span() {
        assert!(toks("").is_empty());
        assert!(toks("   ").is_empty());
    }

    #[test]
    fn quotes_brackets_and_money() {
        assert_eq!(
            toks("\"Hello,\" she said ($5, 10%)."),
            vec!["\"", "Hello", ",", "\"", "she", "said", "(", "$", "5", ",", "10", "%", ")", "."]
        );
    }

    #[test]
    fn abbreviations_keep_period_mid_sentence() {
        assert_eq!(
            toks("Mr. Smith met U.S. troops."),
            vec!["Mr.", "Smith", "met", "U.S.", "troops", "."]
        );
        assert_eq!(
            toks("He lives in the U.S."),
            vec!["He", "lives", "in", "the", "U.S", "."]
        );
    }

    #[test]
    fn dashes_and_ellipsis() {
        assert_eq!(
            toks("well-known--really"),
            vec!["well-known", "--", "really"]
        );
        assert_eq!(toks("Wait..."), vec!["Wait", "..."]);
        assert_eq!(toks("3.5 and 1,000"), vec!["3.5", "and", "1,000"]);
    }

    #[test]
    fn spans_reconstruct_text() {
        let text = "He said: \"I won't go\u{2014}ever!\" (Really?)";
        let spans = tokenize(text, Span::new(0, text.len()));
        let mut rebuilt = String::new();
        let mut pos = 0;
        for s in &spans {
            assert!(text[pos..s.start].chars().all(char::is_whitespace));
            rebuilt.push_str(&text[pos..s.end]);
            pos = s.end;
        }
        rebuilt.push_str(&text[pos..]);
        assert_eq!(rebuilt, text);
        assert!(spans.windows(2).all(|w| w[0].end <= w[1].start));
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn word() -> impl Strategy<Value = String> {
            prop_oneof![
                "[A-Za-z]{1,8}",
                "[A-Za-z]{1,6}(n't|'s|'re|'ll)",
                "[0-9]{1,4}(\\.[0-9]{1,2})?",
                "[\"(\\[]?[A-Za-z]{1,6}[.,;:!?)\"\\]]{0,2}",
                "[A-Z]\\.",
                "[a-z]{1,5}-[a-z]{1,5}",
            ]
        }

        proptest! {
            #[test]
            fn idempotent_on_space_joined_tokens(words in prop::collection::vec(word(), 1..12)) {
                let text = words.join(" ");
                let first: Vec<String> = toks(&text).into_iter().map(String::from).collect();
                let joined = first.join(" ");
                let second: Vec<String> = toks(&joined).into_iter().map(String::from).collect();
                prop_assert_eq!(first, second);
            }

            #[test]
            fn tokens_are_ordered_and_nonempty(words in prop::collection::vec(word(), 0..12)) {
                let text = words.join("  ");
                let spans = tokenize(&text, Span::new(0, text.len()));
                for w in spans.windows(2) {
                    prop_assert!(w[0].end <= w[1].start);
                }
                for s in &spans {
                    prop_assert!(s.start < s.end);
                    prop_assert!(!text[s.start..s.end].chars().any(char::is_whitespace));
                }
                let non_ws: usize = text.chars().filter(|c| !c.is_whitespace()).map(char::len_utf8).sum();
                let covered: usize = spans.iter().map(|s| s.end - s.start).sum();
                prop_assert_eq!(non_ws, covered);
            }
        }
    }
}
