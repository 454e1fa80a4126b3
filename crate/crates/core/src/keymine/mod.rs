//! Unsupervised keyphrase extraction: RAKE and TextRank per document,
//! plus corpus-level aggregation where per-document scores are
//! max-normalized and summed across documents.
//!
//! Both extractors share one text scan: tokens are maximal alphabetic
//! runs, lowercased; any other non-whitespace character ends the current
//! fragment. Stopwords never appear inside an emitted phrase.

mod rake;
mod textrank;

pub use rake::{rake, rake_exact};
pub use textrank::{textrank, textrank_scores, TextRankConfig};

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Source {
    Rake,
    TextRank,
}

/// One scored phrase from one document.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KeyphraseScore {
    pub phrase: Vec<String>,
    pub score: f64,
    pub source: Source,
}

/// Splits text into fragments of lowercase word tokens. Whitespace
/// separates tokens; punctuation and digits end the fragment.
pub(crate) fn fragments(text: &str) -> Vec<Vec<String>> {
    let mut frags = Vec::new();
    let mut current: Vec<String> = Vec::new();
    let mut token = String::new();
    for c in text.chars() {
        if c.is_alphabetic() {
            token.extend(c.to_lowercase());
            continue;
        }
        if !token.is_empty() {
            current.push(std::mem::take(&mut token));
        }
        if !c.is_whitespace() && !current.is_empty() {
            frags.push(std::mem::take(&mut current));
        }
    }
    if !token.is_empty() {
        current.push(token);
    }
    if !current.is_empty() {
        frags.push(current);
    }
    frags
}

/// One corpus-level phrase after aggregation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorpusKeyphrase {
    pub phrase: Vec<String>,
    pub score: f64,
    /// Number of documents the phrase appeared in.
    pub doc_freq: usize,
}

/// Aggregates per-document phrase lists: each document's scores are
/// divided by that document's maximum (so its best phrase scores 1.0),
/// then equal phrases are summed across documents and ranked. The result
/// does not depend on document order: contributions are sorted before
/// summation so floating-point addition order is fixed.
pub fn aggregate_corpus(documents: &[Vec<KeyphraseScore>], top_k: usize) -> Vec<CorpusKeyphrase> {
    let mut contributions: std::collections::BTreeMap<Vec<String>, Vec<f64>> = std::collections::BTreeMap::new();
    for doc in documents {
        let max = doc.iter().map(|k| k.score).fold(0.0f64, f64::max);
        if max <= 0.0 {
            continue;
        }
        for k in doc {
            let folded: Vec<String> = k.phrase.iter().map(|t| t.to_lowercase()).collect();
            contributions.entry(folded).or_default().push(k.score / max);
        }
    }
    let mut out: Vec<CorpusKeyphrase> = contributions
        .into_iter()
        .map(|(phrase, mut parts)| {
            parts.sort_by(|a, b| a.total_cmp(b));
            CorpusKeyphrase {
                doc_freq: parts.len(),
                score: parts.iter().sum(),
                phrase,
            }
        })
        .collect();
    out.sort_by(|a, b| b.score.total_cmp(&a.score).then_with(|| a.phrase.cmp(&b.phrase)));
    out.truncate(top_k);
    out
}
