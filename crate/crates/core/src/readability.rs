//! Readability scoring: FRES, FKG, SMOG, and the Coleman-Liau index over
//! counts produced by a pinned sentence splitter and syllable counter.
//!
//! The splitter and counter are deliberate heuristics. Sentences end at
//! `.`, `!` or `?` followed by whitespace and a capital letter (or end of
//! text), with a short abbreviation list suppressing false splits.
//! Syllables are vowel groups with a silent final "e" correction. Both are
//! documented in tests, including cases where they are knowingly wrong.

use serde::{Deserialize, Serialize};

/// Sentence-final abbreviations that never end a sentence.
const ABBREVIATIONS: [&str; 7] = ["Mr.", "e.g.", "i.e.", "etc.", "Inc.", "Ltd.", "U.S."];

/// Raw counts feeding all four formulas.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct TextStats {
    pub sentences: usize,
    pub words: usize,
    pub letters: usize,
    pub syllables: usize,
    pub polysyllabic_words: usize,
}

/// Counts syllables in one whitespace token. Non-alphabetic characters are
/// ignored; any token containing at least one letter counts at least one
/// syllable.
pub fn count_syllables(word: &str) -> usize {
    let letters: Vec<char> = word
        .chars()
        .filter(|c| c.is_alphabetic())
        .flat_map(|c| c.to_lowercase())
        .collect();
    if letters.is_empty() {
        return 0;
    }
    let is_vowel = |c: char| matches!(c, 'a' | 'e' | 'i' | 'o' | 'u' | 'y');
    let mut groups = 0usize;
    let mut in_group = false;
    for &c in &letters {
        if is_vowel(c) {
            if !in_group {
                groups += 1;
            }
            in_group = true;
        } else {
            in_group = false;
        }
    }
    // Silent final "e": drop one group when the final "e" stands alone
    // after a consonant, unless the word ends in consonant + "le"
    // ("table" keeps its final syllable, "whale" loses it, "cookie" is
    // untouched because its "e" rides the "ie" group).
    let n = letters.len();
    if groups > 1 && letters.last() == Some(&'e') && n >= 2 && !is_vowel(letters[n - 2]) {
        let consonant_le =
            n >= 3 && letters[n - 2] == 'l' && !is_vowel(letters[n - 3]);
        if !consonant_le {
            groups -= 1;
        }
    }
    groups.max(1)
}

fn is_abbreviation(token: &str) -> bool {
    ABBREVIATIONS.contains(&token)
}

/// Counts sentences under the pinned splitter: a boundary is `.`, `!` or
/// `?` followed by whitespace and then a capital letter, or end of text.
/// Tokens on the abbreviation list suppress the boundary. Any trailing
/// material with at least one non-whitespace character counts as a final
/// sentence.
fn count_sentences(text: &str) -> usize {
    let chars: Vec<char> = text.chars().collect();
    let mut sentences = 0usize;
    let mut segment_has_content = false;
    let mut token = String::new();
    let mut i = 0usize;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            token.clear();
            i += 1;
            continue;
        }
        segment_has_content = true;
        token.push(c);
        if matches!(c, '.' | '!' | '?') && !is_abbreviation(&token) {
            // Look ahead: whitespace then a capital, or end of text.
            let mut j = i + 1;
            let mut saw_space = false;
            while j < chars.len() && chars[j].is_whitespace() {
                saw_space = true;
                j += 1;
            }
            let at_end = j >= chars.len() && i + 1 >= chars.len();
            let capital_follows = saw_space && j < chars.len() && chars[j].is_uppercase();
            if at_end || capital_follows {
                sentences += 1;
                segment_has_content = false;
                token.clear();
                if capital_follows {
                    i = j;
                    continue;
                }
            }
        }
        i += 1;
    }
    if segment_has_content {
        sentences += 1;
    }
    sentences
}

/// Computes all counts for one text. Empty text gives all zeros; any text
/// with at least one word has at least one sentence.
pub fn text_stats(text: &str) -> TextStats {
    let mut stats = TextStats {
        sentences: count_sentences(text),
        ..TextStats::default()
    };
    for word in text.split_whitespace() {
        stats.words += 1;
        stats.letters += word.chars().filter(|c| c.is_alphabetic()).count();
        let syl = count_syllables(word);
        stats.syllables += syl;
        if syl >= 3 {
            stats.polysyllabic_words += 1;
        }
    }
    stats
}

/// Flesch Reading Ease. Empty stats score as if both ratios were zero.
pub fn fres(stats: &TextStats) -> f64 {
    if stats.words == 0 || stats.sentences == 0 {
        return 206.835;
    }
    206.835
        - 1.015 * (stats.words as f64 / stats.sentences as f64)
        - 84.6 * (stats.syllables as f64 / stats.words as f64)
}

/// Flesch-Kincaid grade level.
pub fn fkg(stats: &TextStats) -> f64 {
    if stats.words == 0 || stats.sentences == 0 {
        return -15.59;
    }
    0.39 * (stats.words as f64 / stats.sentences as f64)
        + 11.8 * (stats.syllables as f64 / stats.words as f64)
        - 15.59
}

/// SMOG grade. With no sentences the polysyllable term is taken as zero,
/// so the floor 3.1291 is returned.
pub fn smog(stats: &TextStats) -> f64 {
    if stats.sentences == 0 {
        return 3.1291;
    }
    1.0430 * (stats.polysyllabic_words as f64 * 30.0 / stats.sentences as f64).sqrt() + 3.1291
}

/// Coleman-Liau index. L is letters per 100 words, S sentences per 100
/// words.
pub fn cli_index(stats: &TextStats) -> f64 {
    if stats.words == 0 {
        return -15.8;
    }
    let l = stats.letters as f64 / stats.words as f64 * 100.0;
    let s = stats.sentences as f64 / stats.words as f64 * 100.0;
    0.0588 * l - 0.296 * s - 15.8
}

/// All four scores for one document, plus the short-sample flag for SMOG
/// (the formula is defined on 30-sentence samples and generalized below
/// that).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DocumentScores {
    pub fres: f64,
    pub fkg: f64,
    pub smog: f64,
    pub cli: f64,
    pub smog_short_sample: bool,
}

pub fn score(stats: &TextStats) -> DocumentScores {
    DocumentScores {
        fres: fres(stats),
        fkg: fkg(stats),
        smog: smog(stats),
        cli: cli_index(stats),
        smog_short_sample: stats.sentences < 30,
    }
}

/// Min, max, mean and population standard deviation for one metric across
/// a corpus.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricSummary {
    pub min: f64,
    pub max: f64,
    pub mean: f64,
    pub sd: f64,
}

impl MetricSummary {
    pub fn from_values(values: &[f64]) -> Option<Self> {
        if values.is_empty() {
            return None;
        }
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let variance = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
        let min = values.iter().copied().fold(f64::INFINITY, f64::min);
        let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        Some(MetricSummary {
            min,
            max,
            mean,
            sd: variance.sqrt(),
        })
    }
}
