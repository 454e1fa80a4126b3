//! Exact-duplicate removal by content hash and near-duplicate removal by
//! 64-bit simhash over word 3-shingles, compared per domain with a greedy
//! keep-first pass. Also Jaccard similarity over shingle sets for the
//! similarity study report.

use std::collections::{BTreeMap, HashSet};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::corpus::RawDocument;

/// FNV-1a, 64-bit. Pinned as the shingle hash: stable across processes and
/// platforms, no per-process seeding.
pub fn fnv1a64(bytes: &[u8]) -> u64 {
    let mut hash: u64 = 0xcbf29ce484222325;
    for &b in bytes {
        hash ^= u64::from(b);
        hash = hash.wrapping_mul(0x100000001b3);
    }
    hash
}

/// Word 3-gram hashes for one document.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ShingleSet {
    pub hashes: HashSet<u64>,
    pub word_count: usize,
}

/// Shingles `text`: tokens are whitespace-split lowercased words, shingles
/// are consecutive k-grams hashed with FNV-1a. Texts shorter than k words
/// yield a single shingle of the whole (normalized) text; empty text yields
/// an empty set.
pub fn shingle(text: &str, k: usize) -> ShingleSet {
    assert!(k >= 1, "shingle size must be at least 1");
    let tokens: Vec<String> = text.split_whitespace().map(|w| w.to_lowercase()).collect();
    let word_count = tokens.len();
    let mut hashes = HashSet::new();
    if tokens.is_empty() {
        return ShingleSet { hashes, word_count };
    }
    if tokens.len() < k {
        hashes.insert(fnv1a64(tokens.join(" ").as_bytes()));
        return ShingleSet { hashes, word_count };
    }
    for window in tokens.windows(k) {
        hashes.insert(fnv1a64(window.join(" ").as_bytes()));
    }
    ShingleSet { hashes, word_count }
}

/// Simhash over a shingle set: every unique shingle votes +1 on each bit it
/// has set and -1 on each bit it has clear; result bit is 1 iff the sum is
/// strictly positive (ties fall to 0).
pub fn simhash(shingles: &ShingleSet) -> u64 {
    let mut votes = [0i64; 64];
    for &h in &shingles.hashes {
        for (i, vote) in votes.iter_mut().enumerate() {
            if (h >> i) & 1 == 1 {
                *vote += 1;
            } else {
                *vote -= 1;
            }
        }
    }
    let mut out = 0u64;
    for (i, &vote) in votes.iter().enumerate() {
        if vote > 0 {
            out |= 1 << i;
        }
    }
    out
}

/// Number of differing bit positions.
pub fn hamming(a: u64, b: u64) -> u32 {
    (a ^ b).count_ones()
}

/// |a ∩ b| / |a ∪ b|; two empty sets count as identical (1.0).
pub fn jaccard(a: &ShingleSet, b: &ShingleSet) -> f64 {
    if a.hashes.is_empty() && b.hashes.is_empty() {
        return 1.0;
    }
    let intersection = a.hashes.intersection(&b.hashes).count();
    let union = a.hashes.len() + b.hashes.len() - intersection;
    intersection as f64 / union as f64
}

/// 64-bit fingerprint of a document, grouped by domain for comparison.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Fingerprint {
    pub value: u64,
    pub id: String,
    pub domain: String,
}

/// Keeps the first document (URL-lexicographic order) of every group sharing
/// a content hash; later copies are the exact-duplicate discards.
pub fn exact_dedup(mut docs: Vec<RawDocument>) -> (Vec<RawDocument>, Vec<RawDocument>) {
    docs.sort_by(|a, b| a.url.cmp(&b.url));
    let mut seen: HashSet<String> = HashSet::new();
    let mut survivors = Vec::new();
    let mut discarded = Vec::new();
    for doc in docs {
        if seen.insert(doc.content_hash.clone()) {
            survivors.push(doc);
        } else {
            discarded.push(doc);
        }
    }
    (survivors, discarded)
}

/// One document entering near-duplicate comparison.
#[derive(Debug, Clone)]
pub struct DedupRecord {
    pub id: String,
    pub domain: String,
    pub fingerprint: u64,
    pub shingles: ShingleSet,
}

impl DedupRecord {
    pub fn from_text(id: impl Into<String>, domain: impl Into<String>, text: &str) -> Self {
        let shingles = shingle(text, 3);
        let fingerprint = simhash(&shingles);
        DedupRecord {
            id: id.into(),
            domain: domain.into(),
            fingerprint,
            shingles,
        }
    }
}

/// A reported same-domain pair within the Hamming threshold.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairReport {
    pub id_a: String,
    pub id_b: String,
    pub domain: String,
    pub hamming: u32,
    pub jaccard: f64,
}

#[derive(Debug, Clone, Default)]
pub struct NearDedupOutcome {
    /// Ids kept, in input order of their domains then URL order.
    pub kept: Vec<String>,
    /// Ids dropped as near duplicates of a kept document.
    pub dropped: Vec<String>,
    /// All same-domain pairs within the threshold (kept or not).
    pub pairs: Vec<PairReport>,
}

/// Near-duplicate filtering. Within each domain every fingerprint pair within
/// `threshold_bits` is reported; then a greedy pass in URL-lexicographic
/// order keeps a document iff it is not within threshold of an already-kept
/// document of the same domain. Cross-domain pairs are never compared.
pub fn near_dedup(records: &[DedupRecord], threshold_bits: u32) -> NearDedupOutcome {
    let mut domains: BTreeMap<&str, Vec<&DedupRecord>> = BTreeMap::new();
    for r in records {
        domains.entry(&r.domain).or_default().push(r);
    }

    let per_domain: Vec<(Vec<String>, Vec<String>, Vec<PairReport>)> = domains
        .par_iter()
        .map(|(domain, group)| {
            let mut group: Vec<&DedupRecord> = group.clone();
            group.sort_by(|a, b| a.id.cmp(&b.id));
            let mut pairs = Vec::new();
            for i in 0..group.len() {
                for j in (i + 1)..group.len() {
                    let d = hamming(group[i].fingerprint, group[j].fingerprint);
                    if d <= threshold_bits {
                        pairs.push(PairReport {
                            id_a: group[i].id.clone(),
                            id_b: group[j].id.clone(),
                            domain: domain.to_string(),
                            hamming: d,
                            jaccard: jaccard(&group[i].shingles, &group[j].shingles),
                        });
                    }
                }
            }
            let mut kept_idx: Vec<usize> = Vec::new();
            let mut kept = Vec::new();
            let mut dropped = Vec::new();
            for (i, record) in group.iter().enumerate() {
                let near_kept = kept_idx
                    .iter()
                    .any(|&k| hamming(group[k].fingerprint, record.fingerprint) <= threshold_bits);
                if near_kept {
                    dropped.push(record.id.clone());
                } else {
                    kept_idx.push(i);
                    kept.push(record.id.clone());
                }
            }
            (kept, dropped, pairs)
        })
        .collect();

    let mut outcome = NearDedupOutcome::default();
    for (kept, dropped, pairs) in per_domain {
        outcome.kept.extend(kept);
        outcome.dropped.extend(dropped);
        outcome.pairs.extend(pairs);
    }
    outcome
}

/// Cross-pair similarity distributions between two samples.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SimilarityReport {
    pub pair_count: usize,
    pub hamming_mean: f64,
    pub hamming_sd: f64,
    /// Count of pairs at each Hamming distance 0..=64.
    pub hamming_histogram: Vec<usize>,
    /// Jaccard counts over 20 equal bins of [0, 1]; values of exactly 1.0
    /// land in the final bin.
    pub jaccard_histogram: Vec<usize>,
}

/// All cross pairs between `sample_a` and `sample_b`: Hamming distance of
/// fingerprints and Jaccard of shingle sets, summarized as histograms plus
/// the Hamming mean and standard deviation (population).
pub fn similarity_study(sample_a: &[DedupRecord], sample_b: &[DedupRecord]) -> SimilarityReport {
    let mut hamming_histogram = vec![0usize; 65];
    let mut jaccard_histogram = vec![0usize; 20];
    let mut sum = 0f64;
    let mut sum_sq = 0f64;
    let mut pair_count = 0usize;
    for a in sample_a {
        for b in sample_b {
            let d = hamming(a.fingerprint, b.fingerprint);
            hamming_histogram[d as usize] += 1;
            let j = jaccard(&a.shingles, &b.shingles);
            let bin = ((j * 20.0) as usize).min(19);
            jaccard_histogram[bin] += 1;
            sum += f64::from(d);
            sum_sq += f64::from(d) * f64::from(d);
            pair_count += 1;
        }
    }
    let n = pair_count.max(1) as f64;
    let mean = sum / n;
    let variance = (sum_sq / n - mean * mean).max(0.0);
    SimilarityReport {
        pair_count,
        hamming_mean: mean,
        hamming_sd: variance.sqrt(),
        hamming_histogram,
        jaccard_histogram,
    }
}
