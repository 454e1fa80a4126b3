//! Paragraph-level topic modeling with collapsed Gibbs sampling.
//! Policies are split into paragraphs, tokenized and lemmatized, then an
//! LDA model is fit per requested topic count. A coherence report backs
//! the manual choice of K.

pub mod lemma;

use std::collections::{BTreeMap, HashSet};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::classifier::forest::splitmix64;
use crate::corpus::Record;
use crate::{Error, Result};

pub use lemma::lemmatize;

/// Splits text on runs of blank lines. Whitespace-only lines count as
/// blank. Token-count filtering happens later, in corpus preparation.
pub fn split_paragraphs(text: &str) -> Vec<String> {
    let mut paragraphs = Vec::new();
    let mut current = String::new();
    for line in text.lines() {
        if line.trim().is_empty() {
            if !current.trim().is_empty() {
                paragraphs.push(current.trim().to_string());
            }
            current.clear();
        } else {
            if !current.is_empty() {
                current.push('\n');
            }
            current.push_str(line);
        }
    }
    if !current.trim().is_empty() {
        paragraphs.push(current.trim().to_string());
    }
    paragraphs
}

/// Tokenizes and lemmatizes one paragraph.
pub fn preprocess(paragraph: &str) -> Vec<String> {
    crate::classifier::tokenize(paragraph)
        .iter()
        .map(|t| lemmatize(t))
        .collect()
}

pub const MIN_PARAGRAPH_TOKENS: usize = 5;

/// Full corpus preparation for one policy text: paragraph split, then
/// preprocessing, dropping paragraphs shorter than five tokens.
pub fn policy_paragraphs(text: &str) -> Vec<Vec<String>> {
    split_paragraphs(text)
        .iter()
        .map(|p| preprocess(p))
        .filter(|tokens| tokens.len() >= MIN_PARAGRAPH_TOKENS)
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitConfig {
    /// Document-topic prior. None selects 50/K.
    pub alpha: Option<f64>,
    /// Topic-word prior.
    pub beta: f64,
    pub iterations: usize,
    pub seed: u64,
    /// Tokens in fewer paragraphs than this are pruned.
    pub min_df: usize,
    /// Tokens in more than this fraction of paragraphs are pruned.
    pub max_df_fraction: f64,
}

impl Default for FitConfig {
    fn default() -> Self {
        FitConfig {
            alpha: None,
            beta: 0.01,
            iterations: 1000,
            seed: 0,
            min_df: 5,
            max_df_fraction: 0.5,
        }
    }
}

impl FitConfig {
    pub fn alpha_for(&self, k: usize) -> f64 {
        self.alpha.unwrap_or(50.0 / k as f64)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LdaModel {
    pub k: usize,
    pub alpha: f64,
    pub beta: f64,
    pub vocabulary: Vec<String>,
    /// K x V topic-word counts.
    pub topic_word: Vec<Vec<u32>>,
    /// D x K document-topic counts.
    pub doc_topic: Vec<Vec<u32>>,
    /// Per-topic token totals.
    pub topic_totals: Vec<u64>,
    /// Token ids per document, pruned vocabulary only.
    pub docs: Vec<Vec<u32>>,
    /// Topic assignment per token, parallel to docs. Kept so sampling can
    /// resume exactly where it stopped.
    pub assignments: Vec<Vec<u32>>,
    pub seed: u64,
    pub iterations_run: usize,
}

impl Record for LdaModel {
    const KIND: &'static str = "lda-model";
    const SCHEMA_VERSION: u32 = 1;
}

impl LdaModel {
    /// Topic-word distribution row: (n_kw + beta) / (n_k + V*beta).
    pub fn phi(&self, topic: usize) -> Vec<f64> {
        let v = self.vocabulary.len() as f64;
        let denom = self.topic_totals[topic] as f64 + v * self.beta;
        self.topic_word[topic]
            .iter()
            .map(|&c| (c as f64 + self.beta) / denom)
            .collect()
    }

    /// Document-topic distribution row.
    pub fn theta(&self, doc: usize) -> Vec<f64> {
        let n: u32 = self.doc_topic[doc].iter().sum();
        let denom = n as f64 + self.k as f64 * self.alpha;
        self.doc_topic[doc]
            .iter()
            .map(|&c| (c as f64 + self.alpha) / denom)
            .collect()
    }

    pub fn total_tokens(&self) -> u64 {
        self.topic_totals.iter().sum()
    }

    pub fn resume(self) -> LdaSampler {
        LdaSampler::from_model(self)
    }
}

/// Words ranked by in-topic probability, descending, ties broken
/// lexicographically. Returns (word, phi) pairs.
pub fn top_words(model: &LdaModel, topic: usize, n: usize) -> Vec<(String, f64)> {
    let phi = model.phi(topic);
    let mut order: Vec<usize> = (0..model.vocabulary.len()).collect();
    order.sort_by(|&a, &b| {
        model.topic_word[topic][b]
            .cmp(&model.topic_word[topic][a])
            .then_with(|| model.vocabulary[a].cmp(&model.vocabulary[b]))
    });
    order
        .into_iter()
        .take(n)
        .map(|w| (model.vocabulary[w].clone(), phi[w]))
        .collect()
}

/// Collapsed Gibbs sampler. Each sweep reseeds its generator from the
/// base seed and the absolute sweep index, so a resumed run continues the
/// exact stream an uninterrupted run would have used.
pub struct LdaSampler {
    k: usize,
    alpha: f64,
    beta: f64,
    vocabulary: Vec<String>,
    docs: Vec<Vec<u32>>,
    assignments: Vec<Vec<u32>>,
    doc_topic: Vec<Vec<u32>>,
    topic_word: Vec<Vec<u32>>,
    topic_totals: Vec<u64>,
    seed: u64,
    iterations_run: usize,
}

impl LdaSampler {
    /// Builds the pruned vocabulary, maps documents to token ids and
    /// assigns initial topics at random.
    pub fn new(documents: &[Vec<String>], k: usize, config: &FitConfig) -> Result<LdaSampler> {
        if k < 2 {
            return Err(Error::Model(format!("topic count must be at least 2, got {k}")));
        }
        if documents.is_empty() {
            return Err(Error::Model("empty corpus".into()));
        }
        if documents.len() < k {
            return Err(Error::Model(format!(
                "corpus has {} paragraphs, fewer than k={k}",
                documents.len()
            )));
        }

        let mut df: BTreeMap<&str, usize> = BTreeMap::new();
        for doc in documents {
            let unique: HashSet<&str> = doc.iter().map(String::as_str).collect();
            for term in unique {
                *df.entry(term).or_insert(0) += 1;
            }
        }
        let max_df = (documents.len() as f64 * config.max_df_fraction).floor() as usize;
        let vocabulary: Vec<String> = df
            .iter()
            .filter(|(_, &count)| count >= config.min_df && count <= max_df)
            .map(|(term, _)| term.to_string())
            .collect();
        if vocabulary.is_empty() {
            return Err(Error::Model("vocabulary is empty after pruning".into()));
        }
        let index: BTreeMap<&str, u32> = vocabulary
            .iter()
            .enumerate()
            .map(|(i, t)| (t.as_str(), i as u32))
            .collect();

        let docs: Vec<Vec<u32>> = documents
            .iter()
            .map(|doc| doc.iter().filter_map(|t| index.get(t.as_str()).copied()).collect())
            .collect();

        let alpha = config.alpha_for(k);
        let mut sampler = LdaSampler {
            k,
            alpha,
            beta: config.beta,
            vocabulary,
            assignments: docs.iter().map(|d| Vec::with_capacity(d.len())).collect(),
            doc_topic: vec![vec![0; k]; docs.len()],
            topic_word: Vec::new(),
            topic_totals: vec![0; k],
            seed: config.seed,
            iterations_run: 0,
            docs,
        };
        sampler.topic_word = vec![vec![0; sampler.vocabulary.len()]; k];

        let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
        for d in 0..sampler.docs.len() {
            for i in 0..sampler.docs[d].len() {
                let topic = rng.random_range(0..k) as u32;
                let word = sampler.docs[d][i] as usize;
                sampler.assignments[d].push(topic);
                sampler.doc_topic[d][topic as usize] += 1;
                sampler.topic_word[topic as usize][word] += 1;
                sampler.topic_totals[topic as usize] += 1;
            }
        }
        Ok(sampler)
    }

    fn from_model(model: LdaModel) -> LdaSampler {
        LdaSampler {
            k: model.k,
            alpha: model.alpha,
            beta: model.beta,
            vocabulary: model.vocabulary,
            docs: model.docs,
            assignments: model.assignments,
            doc_topic: model.doc_topic,
            topic_word: model.topic_word,
            topic_totals: model.topic_totals,
            seed: model.seed,
            iterations_run: model.iterations_run,
        }
    }

    pub fn iterations_run(&self) -> usize {
        self.iterations_run
    }

    /// One full Gibbs sweep. Every token's topic is resampled from
    /// p(z=k) proportional to (n_dk + alpha) * (n_kw + beta) / (n_k + V*beta)
    /// with the token's own count removed first.
    pub fn sweep(&mut self) {
        let v_beta = self.vocabulary.len() as f64 * self.beta;
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed.wrapping_add(splitmix64(self.iterations_run as u64 + 1)));
        let mut weights = vec![0.0f64; self.k];
        for d in 0..self.docs.len() {
            for i in 0..self.docs[d].len() {
                let word = self.docs[d][i] as usize;
                let old = self.assignments[d][i] as usize;
                self.doc_topic[d][old] -= 1;
                self.topic_word[old][word] -= 1;
                self.topic_totals[old] -= 1;

                let mut total = 0.0;
                for (k, weight) in weights.iter_mut().enumerate() {
                    let w = (self.doc_topic[d][k] as f64 + self.alpha)
                        * (self.topic_word[k][word] as f64 + self.beta)
                        / (self.topic_totals[k] as f64 + v_beta);
                    *weight = w;
                    total += w;
                }
                let mut target = rng.random::<f64>() * total;
                let mut chosen = self.k - 1;
                for (k, w) in weights.iter().enumerate() {
                    target -= w;
                    if target <= 0.0 {
                        chosen = k;
                        break;
                    }
                }

                self.assignments[d][i] = chosen as u32;
                self.doc_topic[d][chosen] += 1;
                self.topic_word[chosen][word] += 1;
                self.topic_totals[chosen] += 1;
            }
        }
        self.iterations_run += 1;
    }

    /// Count conservation: per-document topic counts sum to the document
    /// length, per-topic word counts sum to the topic total, and topic
    /// totals sum to the corpus token count.
    pub fn validate(&self) -> Result<()> {
        for (d, doc) in self.docs.iter().enumerate() {
            let sum: u32 = self.doc_topic[d].iter().sum();
            if sum as usize != doc.len() {
                return Err(Error::Model(format!(
                    "document {d} topic counts sum to {sum}, expected {}",
                    doc.len()
                )));
            }
        }
        let mut grand: u64 = 0;
        for k in 0..self.k {
            let sum: u64 = self.topic_word[k].iter().map(|&c| c as u64).sum();
            if sum != self.topic_totals[k] {
                return Err(Error::Model(format!(
                    "topic {k} word counts sum to {sum}, expected {}",
                    self.topic_totals[k]
                )));
            }
            grand += sum;
        }
        let tokens: u64 = self.docs.iter().map(|d| d.len() as u64).sum();
        if grand != tokens {
            return Err(Error::Model(format!("{grand} assigned tokens, corpus has {tokens}")));
        }
        Ok(())
    }

    pub fn into_model(self) -> LdaModel {
        LdaModel {
            k: self.k,
            alpha: self.alpha,
            beta: self.beta,
            vocabulary: self.vocabulary,
            topic_word: self.topic_word,
            doc_topic: self.doc_topic,
            topic_totals: self.topic_totals,
            docs: self.docs,
            assignments: self.assignments,
            seed: self.seed,
            iterations_run: self.iterations_run,
        }
    }
}

/// Fits one model: init, `iterations` sweeps, final conservation check.
pub fn fit_lda(documents: &[Vec<String>], k: usize, config: &FitConfig) -> Result<LdaModel> {
    let mut sampler = LdaSampler::new(documents, k, config)?;
    for _ in 0..config.iterations {
        sampler.sweep();
    }
    sampler.validate()?;
    Ok(sampler.into_model())
}

/// UMass coherence over a topic's top words: sum over ordered pairs of
/// ln((co-document frequency + 1) / document frequency of the earlier
/// ranked word).
fn umass_coherence(doc_sets: &[HashSet<u32>], top: &[u32]) -> f64 {
    let mut score = 0.0;
    for i in 1..top.len() {
        for j in 0..i {
            let co = doc_sets.iter().filter(|s| s.contains(&top[i]) && s.contains(&top[j])).count();
            let dj = doc_sets.iter().filter(|s| s.contains(&top[j])).count();
            if dj > 0 {
                score += ((co as f64 + 1.0) / dj as f64).ln();
            }
        }
    }
    score
}

pub const NEAR_EMPTY_SHARE: f64 = 0.01;
const COHERENCE_TOP_WORDS: usize = 10;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SweepEntry {
    pub k: usize,
    pub mean_coherence: f64,
    pub per_topic_coherence: Vec<f64>,
    /// Topics holding less than 1% of all tokens.
    pub near_empty_topics: Vec<usize>,
    pub model: LdaModel,
}

/// Fits one model per requested topic count (in parallel) and reports
/// UMass coherence to support choosing K by hand.
pub fn sweep_topic_sizes(documents: &[Vec<String>], sizes: &[usize], config: &FitConfig) -> Result<Vec<SweepEntry>> {
    let results: Vec<Result<SweepEntry>> = sizes
        .par_iter()
        .map(|&k| {
            let model = fit_lda(documents, k, config)?;
            let word_index: BTreeMap<&str, u32> = model
                .vocabulary
                .iter()
                .enumerate()
                .map(|(i, t)| (t.as_str(), i as u32))
                .collect();
            let doc_sets: Vec<HashSet<u32>> = documents
                .iter()
                .map(|doc| doc.iter().filter_map(|t| word_index.get(t.as_str()).copied()).collect())
                .collect();
            let total = model.total_tokens() as f64;
            let mut per_topic = Vec::with_capacity(k);
            let mut near_empty = Vec::new();
            for topic in 0..k {
                let top: Vec<u32> = top_words(&model, topic, COHERENCE_TOP_WORDS)
                    .iter()
                    .map(|(w, _)| word_index[w.as_str()])
                    .collect();
                per_topic.push(umass_coherence(&doc_sets, &top));
                if total > 0.0 && (model.topic_totals[topic] as f64) / total < NEAR_EMPTY_SHARE {
                    near_empty.push(topic);
                }
            }
            let mean = per_topic.iter().sum::<f64>() / per_topic.len() as f64;
            Ok(SweepEntry {
                k,
                mean_coherence: mean,
                per_topic_coherence: per_topic,
                near_empty_topics: near_empty,
                model,
            })
        })
        .collect();
    results.into_iter().collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn test_config(iterations: usize, seed: u64) -> FitConfig {
        FitConfig {
            iterations,
            seed,
            min_df: 1,
            max_df_fraction: 1.0,
            ..FitConfig::default()
        }
    }

    #[test]
    fn split_paragraph_cases() {
        assert_eq!(split_paragraphs("A\n\nB"), vec!["A", "B"]);
        assert_eq!(split_paragraphs("A\n\n\n\nB"), vec!["A", "B"]);
        assert_eq!(split_paragraphs("one line only"), vec!["one line only"]);
        assert_eq!(split_paragraphs("A\nstill A\n\nB"), vec!["A\nstill A", "B"]);
        assert_eq!(split_paragraphs("A\n  \t \nB"), vec!["A", "B"]);
        assert!(split_paragraphs("").is_empty());
        assert!(split_paragraphs("\n\n\n").is_empty());
    }

    #[test]
    fn preprocess_tokenizes_and_lemmatizes() {
        assert_eq!(preprocess("cookies"), vec!["cookie"]);
        assert!(preprocess("is the a").is_empty());
        assert_eq!(preprocess("We collect cookies"), vec!["collect", "cookie"]);
    }

    #[test]
    fn short_paragraphs_dropped() {
        let text = "too short\n\ncollecting user cookies requires explicit consent settings managed here";
        let docs = policy_paragraphs(text);
        assert_eq!(docs.len(), 1);
        assert!(docs[0].len() >= MIN_PARAGRAPH_TOKENS);
    }

    #[test]
    fn k_below_two_rejected() {
        let docs = vec![vec!["a".to_string(), "b".to_string()]; 4];
        assert!(LdaSampler::new(&docs, 1, &test_config(10, 0)).is_err());
        assert!(LdaSampler::new(&docs, 0, &test_config(10, 0)).is_err());
    }

    #[test]
    fn empty_corpus_rejected() {
        assert!(LdaSampler::new(&[], 2, &test_config(10, 0)).is_err());
    }

    #[test]
    fn corpus_smaller_than_k_rejected() {
        let docs = vec![vec!["a".to_string(), "b".to_string()]; 3];
        assert!(LdaSampler::new(&docs, 4, &test_config(10, 0)).is_err());
    }

    #[test]
    fn pruning_empties_vocabulary() {
        let docs = vec![vec!["a".to_string()]; 4];
        let config = FitConfig { min_df: 5, max_df_fraction: 1.0, ..test_config(10, 0) };
        assert!(LdaSampler::new(&docs, 2, &config).is_err());
    }

    #[test]
    fn default_alpha_is_fifty_over_k() {
        let config = FitConfig::default();
        assert!((config.alpha_for(10) - 5.0).abs() < 1e-12);
        assert!((config.alpha_for(7) - 50.0 / 7.0).abs() < 1e-12);
    }

    fn planted_corpus(paragraphs_per_topic: usize, seed: u64) -> (Vec<Vec<String>>, Vec<Vec<String>>) {
        // Three disjoint ten-word vocabularies.
        let topics: Vec<Vec<String>> = vec![
            "cookie tracker beacon pixel banner consent session browser script vendor",
            "retention archive deletion backup period erasure storage duration record purge",
            "transfer processor controller safeguard clause shield border adequacy onward recipient",
        ]
        .into_iter()
        .map(|s| s.split(' ').map(str::to_string).collect())
        .collect();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut docs = Vec::new();
        for topic in &topics {
            for _ in 0..paragraphs_per_topic {
                let len = rng.random_range(8..16);
                let doc: Vec<String> = (0..len)
                    .map(|_| topic[rng.random_range(0..topic.len())].clone())
                    .collect();
                docs.push(doc);
            }
        }
        (docs, topics)
    }

    #[test]
    fn recovers_planted_topics() {
        let (docs, topics) = planted_corpus(120, 7);
        let model = fit_lda(&docs, 3, &test_config(150, 42)).unwrap();

        // Greedy matching of learned topics onto planted vocabularies by
        // cosine between phi and the planted indicator vector.
        let planted_vectors: Vec<Vec<f64>> = topics
            .iter()
            .map(|words| {
                let set: HashSet<&str> = words.iter().map(String::as_str).collect();
                model
                    .vocabulary
                    .iter()
                    .map(|w| if set.contains(w.as_str()) { 1.0 } else { 0.0 })
                    .collect()
            })
            .collect();
        let cosine = |a: &[f64], b: &[f64]| {
            let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
            let na: f64 = a.iter().map(|x| x * x).sum::<f64>().sqrt();
            let nb: f64 = b.iter().map(|x| x * x).sum::<f64>().sqrt();
            dot / (na * nb)
        };
        let mut taken = [false; 3];
        for learned in 0..3 {
            let phi = model.phi(learned);
            let (best, score) = (0..3)
                .filter(|&p| !taken[p])
                .map(|p| (p, cosine(&phi, &planted_vectors[p])))
                .max_by(|a, b| a.1.total_cmp(&b.1))
                .unwrap();
            taken[best] = true;
            assert!(score >= 0.9, "learned topic {learned} best cosine {score}");
        }

        // Planted-vocabulary overlap in the top ten words.
        for topic in 0..3 {
            let top: Vec<String> = top_words(&model, topic, 10).into_iter().map(|(w, _)| w).collect();
            let best_overlap = topics
                .iter()
                .map(|words| top.iter().filter(|w| words.contains(w)).count())
                .max()
                .unwrap();
            assert!(best_overlap >= 8, "topic {topic} overlap {best_overlap}");
        }
    }

    #[test]
    fn conservation_after_every_sweep() {
        let (docs, _) = planted_corpus(20, 3);
        let mut sampler = LdaSampler::new(&docs, 3, &test_config(0, 11)).unwrap();
        sampler.validate().unwrap();
        for _ in 0..25 {
            sampler.sweep();
            sampler.validate().unwrap();
        }
    }

    #[test]
    fn seeded_determinism() {
        let (docs, _) = planted_corpus(15, 5);
        let a = fit_lda(&docs, 3, &test_config(30, 9)).unwrap();
        let b = fit_lda(&docs, 3, &test_config(30, 9)).unwrap();
        assert_eq!(a.topic_word, b.topic_word);
        assert_eq!(a.assignments, b.assignments);
        let c = fit_lda(&docs, 3, &test_config(30, 10)).unwrap();
        assert_ne!(a.assignments, c.assignments);
    }

    #[test]
    fn resumed_run_matches_uninterrupted() {
        let (docs, _) = planted_corpus(10, 2);
        let full = fit_lda(&docs, 3, &test_config(40, 21)).unwrap();

        let half = fit_lda(&docs, 3, &test_config(20, 21)).unwrap();
        let mut resumed = half.resume();
        for _ in 0..20 {
            resumed.sweep();
        }
        let resumed_model = resumed.into_model();
        assert_eq!(resumed_model.iterations_run, 40);
        assert_eq!(resumed_model.topic_word, full.topic_word);
        assert_eq!(resumed_model.assignments, full.assignments);
    }

    #[test]
    fn phi_and_theta_are_distributions() {
        let (docs, _) = planted_corpus(10, 4);
        let model = fit_lda(&docs, 3, &test_config(10, 5)).unwrap();
        for k in 0..3 {
            let sum: f64 = model.phi(k).iter().sum();
            assert!((sum - 1.0).abs() < 1e-9, "phi row {k} sums to {sum}");
        }
        for d in 0..model.doc_topic.len() {
            let sum: f64 = model.theta(d).iter().sum();
            assert!((sum - 1.0).abs() < 1e-9, "theta row {d} sums to {sum}");
        }
    }

    #[test]
    fn top_words_ranking_and_ties() {
        let model = LdaModel {
            k: 2,
            alpha: 25.0,
            beta: 0.01,
            vocabulary: vec!["alpha".into(), "mid".into(), "zeta".into()],
            topic_word: vec![vec![0, 7, 0], vec![3, 3, 3]],
            doc_topic: vec![],
            topic_totals: vec![7, 9],
            docs: vec![],
            assignments: vec![],
            seed: 0,
            iterations_run: 0,
        };
        let only = top_words(&model, 0, 3);
        assert_eq!(only[0].0, "mid");
        let tied: Vec<String> = top_words(&model, 1, 3).into_iter().map(|(w, _)| w).collect();
        assert_eq!(tied, vec!["alpha", "mid", "zeta"]);
    }

    #[test]
    fn sweep_reports_one_row_per_k_and_flags_thin_topics() {
        let (docs, _) = planted_corpus(25, 6);
        let config = test_config(40, 13);
        let entries = sweep_topic_sizes(&docs, &[2, 4, 8], &config).unwrap();
        assert_eq!(entries.len(), 3);
        assert_eq!(entries.iter().map(|e| e.k).collect::<Vec<_>>(), vec![2, 4, 8]);
        for entry in &entries {
            assert_eq!(entry.per_topic_coherence.len(), entry.k);
            assert!(entry.mean_coherence.is_finite());
        }
        // Three planted topics cannot fill eight: some topics end up thin.
        // This is corpus-dependent, so only check the field is well formed.
        for t in &entries[2].near_empty_topics {
            assert!(*t < 8);
        }
    }

    #[test]
    fn coherence_prefers_true_structure() {
        // Two disjoint topics; K=2 should cohere at least as well as K=5.
        let (docs, _) = planted_corpus(30, 8);
        let two_topic_docs: Vec<Vec<String>> = docs.into_iter().take(60).collect();
        let config = test_config(60, 17);
        let entries = sweep_topic_sizes(&two_topic_docs, &[2, 5], &config).unwrap();
        assert!(entries[0].mean_coherence >= entries[1].mean_coherence);
    }

    #[test]
    fn model_round_trips() {
        let (docs, _) = planted_corpus(8, 1);
        let model = fit_lda(&docs, 2, &test_config(5, 3)).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("lda.jsonl");
        crate::corpus::write_records(&path, std::slice::from_ref(&model)).unwrap();
        let loaded: Vec<LdaModel> = crate::corpus::read_records(&path).unwrap();
        assert_eq!(loaded[0], model);
    }
}
