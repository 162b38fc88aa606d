/// Syllable estimate: vowel groups (`y` counts as a vowel), minus a silent
/// final `e` (but not `-le` after a consonant), at least 1. Input without
/// letters counts as 1.
pub fn count_syllables(word: &str) -> usize {
    let w: Vec<char> = word
        .chars()
        .filter(|c| c.is_alphabetic())
        .flat_map(char::to_lowercase)
        .collect();
    if w.is_empty() {
        return 1;
    }
    let is_vowel = |c: char| matches!(c, 'a' | 'e' | 'i' | 'o' | 'u' | 'y');
    let mut groups = 0;
    let mut in_group = false;
    for &c in &w {
        if is_vowel(c) {
            if !in_group {
                groups += 1;
            }
            in_group = true;
        } else {
            in_group = false;
        }
    }
    let n = w.len();
    if groups > 1 && w[n - 1] == 'e' && !is_vowel(w[n - 2]) {
        let consonant_le = n >= 3 && w[n - 2] == 'l' && !is_vowel(w[n - 3]);
        if !consonant_le {
            groups -= 1;
        }
    }
    groups.max(1)
}
