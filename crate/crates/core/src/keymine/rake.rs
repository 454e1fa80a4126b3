//! RAKE. Candidate phrases are the maximal stopword-free token runs
//! inside fragments. Word scores are degree/frequency over the candidate
//! co-occurrence graph; a phrase scores the sum of its word scores.
//! Arithmetic is exact rational so results are reproducible bit-for-bit.

use std::collections::BTreeMap;

use num_rational::Ratio;

use super::{fragments, KeyphraseScore, Source};
use crate::stopwords::Stopwords;

fn candidates(text: &str, stopwords: &Stopwords) -> Vec<Vec<String>> {
    let mut out = Vec::new();
    for fragment in fragments(text) {
        let mut run: Vec<String> = Vec::new();
        for token in fragment {
            if stopwords.contains(&token) {
                if !run.is_empty() {
                    out.push(std::mem::take(&mut run));
                }
            } else {
                run.push(token);
            }
        }
        if !run.is_empty() {
            out.push(run);
        }
    }
    out
}

/// RAKE with exact rational scores. Every occurrence of a word adds 1 to
/// its frequency and the length of its candidate to its degree; the word
/// score is degree/frequency and a phrase sums its members' scores.
pub fn rake_exact(text: &str, stopwords: &Stopwords) -> Vec<(Vec<String>, Ratio<u128>)> {
    let candidates = candidates(text, stopwords);
    if candidates.is_empty() {
        return Vec::new();
    }
    let mut freq: BTreeMap<&str, u128> = BTreeMap::new();
    let mut degree: BTreeMap<&str, u128> = BTreeMap::new();
    for cand in &candidates {
        for word in cand {
            *freq.entry(word).or_insert(0) += 1;
            *degree.entry(word).or_insert(0) += cand.len() as u128;
        }
    }
    let word_score = |w: &str| Ratio::new(degree[w], freq[w]);

    let mut phrases: BTreeMap<Vec<String>, Ratio<u128>> = BTreeMap::new();
    for cand in &candidates {
        let score = cand.iter().map(|w| word_score(w)).sum();
        phrases.insert(cand.clone(), score);
    }
    let mut out: Vec<(Vec<String>, Ratio<u128>)> = phrases.into_iter().collect();
    out.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
    out
}

/// RAKE with scores converted to f64 (numerator / denominator, one
/// division, so equal rationals always convert to equal floats).
pub fn rake(text: &str, stopwords: &Stopwords) -> Vec<KeyphraseScore> {
    rake_exact(text, stopwords)
        .into_iter()
        .map(|(phrase, score)| KeyphraseScore {
            phrase,
            score: *score.numer() as f64 / *score.denom() as f64,
            source: Source::Rake,
        })
        .collect()
}
