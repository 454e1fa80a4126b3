//! Byte n-gram language identification.
//!
//! A multinomial Naive Bayes model over byte n-grams of orders 1 through 4.
//! Each language keeps the 3000 most frequent grams per order plus one
//! unknown bucket, with add-alpha smoothing, so every per-order
//! distribution sums to exactly one. At scoring time the bucket's mass is
//! spread uniformly over the unseen gram space. Scores are accumulated in
//! log space and normalized with log-sum-exp, so the reported confidence
//! is a proper posterior under a uniform prior.

use std::collections::{BTreeMap, HashMap};
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::corpus::Record;
use crate::{Error, Result};

/// Smoothing constant for every gram table.
pub const ALPHA: f64 = 0.5;
/// Retained grams per language per order.
pub const TOP_GRAMS: usize = 3000;
/// Smallest and largest gram length.
pub const ORDERS: std::ops::RangeInclusive<usize> = 1..=4;
/// Language code returned for undecidable input.
pub const UNKNOWN_LANGUAGE: &str = "und";

/// Log-probabilities for one n-gram order of one language.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OrderTable {
    pub order: usize,
    /// Log-probability of any gram not in `grams`.
    pub log_unknown: f64,
    /// Gram bytes (hex-encoded for serialization) to log-probability.
    #[serde(with = "hex_table")]
    pub grams: HashMap<Vec<u8>, f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LanguageProfile {
    pub language: String,
    pub alpha: f64,
    pub tables: Vec<OrderTable>,
}

impl Record for LanguageProfile {
    const KIND: &'static str = "language-profile";
    const SCHEMA_VERSION: u32 = 1;
}

/// Hex-encodes byte-string keys so gram tables survive JSON, which only
/// allows string keys. A BTreeMap on the wire keeps file output stable.
mod hex_table {
    use super::*;
    use serde::{Deserializer, Serializer};

    pub fn serialize<S: Serializer>(map: &HashMap<Vec<u8>, f64>, ser: S) -> std::result::Result<S::Ok, S::Error> {
        let encoded: BTreeMap<String, f64> = map
            .iter()
            .map(|(k, v)| (k.iter().map(|b| format!("{b:02x}")).collect(), *v))
            .collect();
        serde::Serialize::serialize(&encoded, ser)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(de: D) -> std::result::Result<HashMap<Vec<u8>, f64>, D::Error> {
        let encoded: BTreeMap<String, f64> = serde::Deserialize::deserialize(de)?;
        let mut out = HashMap::with_capacity(encoded.len());
        for (k, v) in encoded {
            if k.len() % 2 != 0 {
                return Err(serde::de::Error::custom("odd-length hex gram"));
            }
            let bytes: std::result::Result<Vec<u8>, _> = (0..k.len())
                .step_by(2)
                .map(|i| u8::from_str_radix(&k[i..i + 2], 16))
                .collect();
            out.insert(bytes.map_err(serde::de::Error::custom)?, v);
        }
        Ok(out)
    }
}

fn count_grams(texts: &[&str], order: usize) -> HashMap<Vec<u8>, u64> {
    let mut counts: HashMap<Vec<u8>, u64> = HashMap::new();
    for text in texts {
        let bytes = text.as_bytes();
        if bytes.len() < order {
            continue;
        }
        for window in bytes.windows(order) {
            *counts.entry(window.to_vec()).or_insert(0) += 1;
        }
    }
    counts
}

fn build_table(texts: &[&str], order: usize) -> OrderTable {
    let counts = count_grams(texts, order);
    let total: u64 = counts.values().sum();

    // Keep the most frequent grams; ties broken by gram bytes so training
    // is deterministic regardless of hash iteration order.
    let mut ranked: Vec<(Vec<u8>, u64)> = counts.into_iter().collect();
    ranked.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
    ranked.truncate(TOP_GRAMS);

    let retained_total: u64 = ranked.iter().map(|(_, c)| c).sum();
    let unknown_count = total - retained_total;
    let v = ranked.len() as f64;
    let denom = total as f64 + ALPHA * (v + 1.0);

    let grams = ranked
        .into_iter()
        .map(|(gram, count)| (gram, ((count as f64 + ALPHA) / denom).ln()))
        .collect();
    OrderTable {
        order,
        log_unknown: ((unknown_count as f64 + ALPHA) / denom).ln(),
        grams,
    }
}

/// Trains one profile per language from (text, language) pairs. At least
/// two distinct languages are required; a single-language corpus has
/// nothing to discriminate and is rejected.
pub fn train_profiles<S1, S2>(corpus: &[(S1, S2)]) -> Result<Vec<LanguageProfile>>
where
    S1: AsRef<str>,
    S2: AsRef<str>,
{
    let mut by_language: BTreeMap<&str, Vec<&str>> = BTreeMap::new();
    for (text, language) in corpus {
        by_language.entry(language.as_ref()).or_default().push(text.as_ref());
    }
    if by_language.len() < 2 {
        return Err(Error::Model(format!(
            "profile training needs at least 2 languages, got {}",
            by_language.len()
        )));
    }
    Ok(by_language
        .into_iter()
        .map(|(language, texts)| LanguageProfile {
            language: language.to_string(),
            alpha: ALPHA,
            tables: ORDERS.map(|order| build_table(&texts, order)).collect(),
        })
        .collect())
}

fn log_likelihood(text: &str, profile: &LanguageProfile) -> f64 {
    let bytes = text.as_bytes();
    let mut score = 0.0;
    for table in &profile.tables {
        if bytes.len() < table.order {
            continue;
        }
        // log_unknown holds the aggregate leftover mass. Spreading it
        // uniformly over the unseen gram space keeps a miss far cheaper
        // than a retained gram; scoring the whole bucket per miss would
        // reward the language with the worst coverage.
        let unseen_space = (256f64).powi(table.order as i32) - table.grams.len() as f64;
        let miss = table.log_unknown - unseen_space.max(1.0).ln();
        for window in bytes.windows(table.order) {
            score += table.grams.get(window).copied().unwrap_or(miss);
        }
    }
    score
}

/// Detects the language of `text`. Returns the winning language code and
/// its posterior probability; ties go to the lexicographically smallest
/// code. Whitespace-only input returns ("und", 0.0).
pub fn detect(text: &str, profiles: &[LanguageProfile]) -> (String, f64) {
    if text.trim().is_empty() || profiles.is_empty() {
        return (UNKNOWN_LANGUAGE.to_string(), 0.0);
    }
    let mut order: Vec<usize> = (0..profiles.len()).collect();
    order.sort_by(|&a, &b| profiles[a].language.cmp(&profiles[b].language));

    let scores: Vec<f64> = order.iter().map(|&i| log_likelihood(text, &profiles[i])).collect();
    let max = scores.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let log_sum = max + scores.iter().map(|s| (s - max).exp()).sum::<f64>().ln();

    // Strictly-greater comparison over language-sorted scores: ties keep
    // the lexicographically smallest code.
    let mut best = 0usize;
    for (idx, &s) in scores.iter().enumerate() {
        if s > scores[best] {
            best = idx;
        }
    }
    let confidence = (scores[best] - log_sum).exp();
    (profiles[order[best]].language.clone(), confidence)
}

/// Posterior for every profile, normalized to sum to 1. Exposed for the
/// normalization property and for auditing.
pub fn posteriors(text: &str, profiles: &[LanguageProfile]) -> Vec<(String, f64)> {
    if text.trim().is_empty() || profiles.is_empty() {
        return Vec::new();
    }
    let scores: Vec<f64> = profiles.iter().map(|p| log_likelihood(text, p)).collect();
    let max = scores.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let log_sum = max + scores.iter().map(|s| (s - max).exp()).sum::<f64>().ln();
    profiles
        .iter()
        .zip(scores)
        .map(|(p, s)| (p.language.clone(), (s - log_sum).exp()))
        .collect()
}

/// Bundled multilingual training sentences, one sentence per line.
pub mod fixtures {
    pub const LANGUAGES: [&str; 5] = ["de", "en", "es", "fr", "it"];

    pub fn sentences(language: &str) -> Option<Vec<&'static str>> {
        let raw = match language {
            "en" => include_str!("../assets/langid/en.txt"),
            "de" => include_str!("../assets/langid/de.txt"),
            "fr" => include_str!("../assets/langid/fr.txt"),
            "es" => include_str!("../assets/langid/es.txt"),
            "it" => include_str!("../assets/langid/it.txt"),
            "el" => include_str!("../assets/langid/el.txt"),
            _ => return None,
        };
        Some(raw.lines().map(str::trim).filter(|l| !l.is_empty()).collect())
    }

    /// (text, language) pairs for the five bundled languages.
    pub fn training_pairs() -> Vec<(&'static str, &'static str)> {
        let mut pairs = Vec::new();
        for lang in LANGUAGES {
            for line in sentences(lang).expect("bundled fixture") {
                pairs.push((line, lang));
            }
        }
        pairs
    }
}

/// Profiles trained once from the bundled fixtures. Rebuilding from the
/// same embedded text is deterministic, so this is equivalent to shipping
/// a pretrained model file.
pub fn bundled_profiles() -> &'static [LanguageProfile] {
    static PROFILES: OnceLock<Vec<LanguageProfile>> = OnceLock::new();
    PROFILES.get_or_init(|| train_profiles(&fixtures::training_pairs()).expect("bundled fixtures cover 5 languages"))
}
