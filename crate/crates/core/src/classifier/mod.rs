//! Policy-vs-not classification. Three feature schemas share one
//! pipeline: URL features (tf-idf over path terms plus two raw counts),
//! document bag-of-words tf-idf, or both concatenated. A random forest
//! does the deciding; the URL schema can balance its minority class with
//! SMOTE before training.

pub mod forest;
pub mod smote;

use std::collections::BTreeMap;
use std::sync::OnceLock;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use regex::Regex;
use serde::{Deserialize, Serialize};

use crate::corpus::Record;
use crate::stopwords::Stopwords;
use crate::urlfilter::extract_url_features;
use crate::{Error, Result};

pub use forest::{train_forest, DecisionTree, ForestConfig, RandomForest};
pub use smote::smote_oversample;

/// Lowercase alphabetic tokens, stopwords removed.
pub fn tokenize(text: &str) -> Vec<String> {
    static WORD: OnceLock<Regex> = OnceLock::new();
    let word = WORD.get_or_init(|| Regex::new(r"\p{Alphabetic}+").expect("valid pattern"));
    let stopwords = Stopwords::bundled();
    word.find_iter(text)
        .map(|m| m.as_str().to_lowercase())
        .filter(|t| !stopwords.contains(t))
        .collect()
}

/// Term index for tf-idf features. Terms are sorted so indices are stable
/// for a given training corpus.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Vocabulary {
    pub terms: Vec<String>,
    pub doc_frequencies: Vec<usize>,
    pub doc_count: usize,
    pub idf: Vec<f64>,
}

impl Vocabulary {
    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn index_of(&self, term: &str) -> Option<usize> {
        self.terms.binary_search_by(|t| t.as_str().cmp(term)).ok()
    }
}

/// Builds the vocabulary and idf table: idf(t) = ln((1+N)/(1+df)) + 1.
pub fn fit_tfidf<T: AsRef<str>>(documents: &[Vec<T>]) -> Vocabulary {
    let mut df: BTreeMap<&str, usize> = BTreeMap::new();
    for doc in documents {
        let mut seen: Vec<&str> = doc.iter().map(AsRef::as_ref).collect();
        seen.sort_unstable();
        seen.dedup();
        for term in seen {
            *df.entry(term).or_insert(0) += 1;
        }
    }
    let n = documents.len();
    let mut terms = Vec::with_capacity(df.len());
    let mut doc_frequencies = Vec::with_capacity(df.len());
    let mut idf = Vec::with_capacity(df.len());
    for (term, count) in df {
        terms.push(term.to_string());
        doc_frequencies.push(count);
        idf.push(((1 + n) as f64 / (1 + count) as f64).ln() + 1.0);
    }
    Vocabulary {
        terms,
        doc_frequencies,
        doc_count: n,
        idf,
    }
}

/// Sparse tf-idf vector: strictly increasing indices, no stored zeros.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
pub struct FeatureVector {
    pub entries: Vec<(usize, f64)>,
}

impl FeatureVector {
    pub fn get(&self, index: usize) -> f64 {
        self.entries
            .binary_search_by_key(&index, |(i, _)| *i)
            .map(|at| self.entries[at].1)
            .unwrap_or(0.0)
    }

    pub fn l2_norm(&self) -> f64 {
        self.entries.iter().map(|(_, w)| w * w).sum::<f64>().sqrt()
    }
}

/// Counts in-vocabulary terms, weights by idf, L2-normalizes.
pub fn vectorize<T: AsRef<str>>(tokens: &[T], vocab: &Vocabulary) -> FeatureVector {
    let mut counts: BTreeMap<usize, usize> = BTreeMap::new();
    for token in tokens {
        if let Some(index) = vocab.index_of(token.as_ref()) {
            *counts.entry(index).or_insert(0) += 1;
        }
    }
    let mut entries: Vec<(usize, f64)> = counts
        .into_iter()
        .map(|(index, count)| (index, count as f64 * vocab.idf[index]))
        .filter(|(_, w)| *w != 0.0)
        .collect();
    let norm = entries.iter().map(|(_, w)| w * w).sum::<f64>().sqrt();
    if norm > 0.0 {
        for (_, w) in &mut entries {
            *w /= norm;
        }
    }
    FeatureVector { entries }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FeatureSchema {
    Url,
    Document,
    Combined,
}

impl std::str::FromStr for FeatureSchema {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "url" => Ok(FeatureSchema::Url),
            "document" => Ok(FeatureSchema::Document),
            "combined" => Ok(FeatureSchema::Combined),
            other => Err(Error::Config(format!("unknown feature schema '{other}'"))),
        }
    }
}

/// One labelled training example.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LabeledExample {
    pub url: String,
    pub text: String,
    /// true = privacy policy.
    pub label: bool,
}

impl Record for LabeledExample {
    const KIND: &'static str = "labeled-example";
    const SCHEMA_VERSION: u32 = 1;
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrainOptions {
    pub forest: ForestConfig,
    /// SMOTE neighbor count for the URL schema; None disables
    /// oversampling. Ignored by the document and combined schemas.
    pub smote_k: Option<usize>,
}

impl Default for TrainOptions {
    fn default() -> Self {
        TrainOptions {
            forest: ForestConfig::default(),
            smote_k: Some(5),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainingMeta {
    pub seed: u64,
    pub trees: usize,
    pub smote_k: Option<usize>,
    pub synthetic_count: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TrainedClassifier {
    pub schema: FeatureSchema,
    pub doc_vocab: Option<Vocabulary>,
    pub url_vocab: Option<Vocabulary>,
    pub forest: RandomForest,
    pub meta: TrainingMeta,
}

impl Record for TrainedClassifier {
    const KIND: &'static str = "classifier-model";
    const SCHEMA_VERSION: u32 = 1;
}

/// URL feature vector: tf-idf of path terms, then two raw features at the
/// end of the schema (path segment count, URL length in characters).
fn url_vector(url: &str, vocab: &Vocabulary) -> Result<FeatureVector> {
    let features = extract_url_features(url)?;
    let mut v = vectorize(&features.path_terms, vocab);
    let base = vocab.len();
    if features.path_segment_count > 0 {
        v.entries.push((base, features.path_segment_count as f64));
    }
    v.entries.push((base + 1, features.url_length as f64));
    Ok(v)
}

fn url_dim(vocab: &Vocabulary) -> usize {
    vocab.len() + 2
}

impl TrainedClassifier {
    /// Maps one (url, text) pair into this model's feature space.
    pub fn vectorize_example(&self, url: &str, text: &str) -> Result<FeatureVector> {
        match self.schema {
            FeatureSchema::Document => {
                let vocab = self.doc_vocab.as_ref().expect("document vocab");
                Ok(vectorize(&tokenize(text), vocab))
            }
            FeatureSchema::Url => url_vector(url, self.url_vocab.as_ref().expect("url vocab")),
            FeatureSchema::Combined => {
                let doc_vocab = self.doc_vocab.as_ref().expect("document vocab");
                let url_vocab = self.url_vocab.as_ref().expect("url vocab");
                let mut v = vectorize(&tokenize(text), doc_vocab);
                let offset = doc_vocab.len();
                for (index, weight) in url_vector(url, url_vocab)?.entries {
                    v.entries.push((index + offset, weight));
                }
                Ok(v)
            }
        }
    }

    pub fn predict(&self, url: &str, text: &str) -> Result<(bool, f64)> {
        Ok(self.forest.predict(&self.vectorize_example(url, text)?))
    }
}

/// Trains one model on the full example set.
pub fn train(examples: &[LabeledExample], schema: FeatureSchema, options: &TrainOptions) -> Result<TrainedClassifier> {
    if examples.is_empty() {
        return Err(Error::Model("no training examples".into()));
    }
    let doc_vocab = match schema {
        FeatureSchema::Url => None,
        _ => {
            let token_lists: Vec<Vec<String>> = examples.iter().map(|e| tokenize(&e.text)).collect();
            Some(fit_tfidf(&token_lists))
        }
    };
    let url_vocab = match schema {
        FeatureSchema::Document => None,
        _ => {
            let mut term_lists = Vec::with_capacity(examples.len());
            for e in examples {
                term_lists.push(extract_url_features(&e.url)?.path_terms);
            }
            Some(fit_tfidf(&term_lists))
        }
    };
    let dimensionality = match schema {
        FeatureSchema::Document => doc_vocab.as_ref().unwrap().len(),
        FeatureSchema::Url => url_dim(url_vocab.as_ref().unwrap()),
        FeatureSchema::Combined => doc_vocab.as_ref().unwrap().len() + url_dim(url_vocab.as_ref().unwrap()),
    };

    let probe = TrainedClassifier {
        schema,
        doc_vocab,
        url_vocab,
        forest: RandomForest {
            trees: Vec::new(),
            dimensionality,
        },
        meta: TrainingMeta {
            seed: options.forest.seed,
            trees: options.forest.trees,
            smote_k: options.smote_k,
            synthetic_count: 0,
        },
    };
    let mut vectors: Vec<FeatureVector> = Vec::with_capacity(examples.len());
    for e in examples {
        vectors.push(probe.vectorize_example(&e.url, &e.text)?);
    }
    let mut labels: Vec<bool> = examples.iter().map(|e| e.label).collect();

    // Minority oversampling, URL schema only.
    let mut synthetic_count = 0;
    if schema == FeatureSchema::Url {
        if let Some(k) = options.smote_k {
            let positives = labels.iter().filter(|&&l| l).count();
            let negatives = labels.len() - positives;
            let minority_label = positives < negatives;
            let minority: Vec<FeatureVector> = vectors
                .iter()
                .zip(&labels)
                .filter(|(_, &l)| l == minority_label)
                .map(|(v, _)| v.clone())
                .collect();
            let target = positives.max(negatives);
            if !minority.is_empty() && minority.len() < target {
                let synthetics = smote_oversample(&minority, k, target, options.forest.seed)?;
                synthetic_count = synthetics.len();
                for s in synthetics {
                    vectors.push(s);
                    labels.push(minority_label);
                }
            }
        }
    }

    let forest = train_forest(&vectors, &labels, dimensionality, &options.forest)?;
    Ok(TrainedClassifier {
        meta: TrainingMeta {
            synthetic_count,
            ..probe.meta
        },
        forest,
        ..probe
    })
}

/// Precision, recall and F1 on the positive class.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

/// Metrics from (predicted, actual) pairs.
pub fn metrics_from_pairs(pairs: &[(bool, bool)]) -> Metrics {
    let tp = pairs.iter().filter(|(p, a)| *p && *a).count() as f64;
    let fp = pairs.iter().filter(|(p, a)| *p && !*a).count() as f64;
    let fn_ = pairs.iter().filter(|(p, a)| !*p && *a).count() as f64;
    let precision = if tp + fp > 0.0 { tp / (tp + fp) } else { 0.0 };
    let recall = if tp + fn_ > 0.0 { tp / (tp + fn_) } else { 0.0 };
    let f1 = if precision + recall > 0.0 {
        2.0 * precision * recall / (precision + recall)
    } else {
        0.0
    };
    Metrics { precision, recall, f1 }
}

pub fn evaluate(classifier: &TrainedClassifier, examples: &[LabeledExample]) -> Result<Metrics> {
    let mut pairs = Vec::with_capacity(examples.len());
    for e in examples {
        let (predicted, _) = classifier.predict(&e.url, &e.text)?;
        pairs.push((predicted, e.label));
    }
    Ok(metrics_from_pairs(&pairs))
}

/// The model-comparison protocol: deterministic 80/20 split, train on the
/// 80, measure on the 20, then retrain on everything for the model that
/// ships. Returns the final model with the held-out metrics.
pub fn train_and_evaluate(
    examples: &[LabeledExample],
    schema: FeatureSchema,
    options: &TrainOptions,
    split_seed: u64,
) -> Result<(TrainedClassifier, Metrics)> {
    if examples.len() < 5 {
        return Err(Error::Model("need at least 5 examples for an 80/20 split".into()));
    }
    let mut order: Vec<usize> = (0..examples.len()).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(split_seed);
    order.shuffle(&mut rng);
    let cut = examples.len() * 4 / 5;
    let train_set: Vec<LabeledExample> = order[..cut].iter().map(|&i| examples[i].clone()).collect();
    let eval_set: Vec<LabeledExample> = order[cut..].iter().map(|&i| examples[i].clone()).collect();

    let holdout_model = train(&train_set, schema, options)?;
    let metrics = evaluate(&holdout_model, &eval_set)?;
    let final_model = train(examples, schema, options)?;
    Ok((final_model, metrics))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tokenize_examples() {
        assert_eq!(tokenize("We collect your IP address."), vec!["collect", "ip", "address"]);
        assert!(tokenize("").is_empty());
        assert!(tokenize("123 456").is_empty());
    }

    #[test]
    fn tokenize_is_alphabetic_only() {
        assert_eq!(tokenize("e-mail isn't data2day"), vec!["e", "mail", "isn", "data", "day"]);
    }

    fn docs(raw: &[&[&str]]) -> Vec<Vec<String>> {
        raw.iter().map(|d| d.iter().map(|s| s.to_string()).collect()).collect()
    }

    #[test]
    fn idf_formula_cases() {
        let vocab = fit_tfidf(&docs(&[
            &["common", "alpha"],
            &["common", "beta"],
            &["common", "gamma"],
            &["common", "delta"],
        ]));
        let common = vocab.index_of("common").unwrap();
        assert!((vocab.idf[common] - 1.0).abs() < 1e-12);
        let alpha = vocab.index_of("alpha").unwrap();
        assert!((vocab.idf[alpha] - ((5.0f64 / 2.0).ln() + 1.0)).abs() < 1e-12);
        assert_eq!(vocab.doc_frequencies[common], 4);
        assert_eq!(vocab.doc_frequencies[alpha], 1);
    }

    #[test]
    fn single_document_idf_is_one() {
        let vocab = fit_tfidf(&docs(&[&["a", "b", "c"]]));
        for idf in &vocab.idf {
            assert!((idf - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn vocabulary_sorted_dense_df_positive() {
        let vocab = fit_tfidf(&docs(&[&["zeta", "alpha"], &["mid", "alpha"]]));
        assert_eq!(vocab.terms, vec!["alpha", "mid", "zeta"]);
        for (i, term) in vocab.terms.iter().enumerate() {
            assert_eq!(vocab.index_of(term), Some(i));
        }
        assert!(vocab.doc_frequencies.iter().all(|&df| df >= 1));
    }

    #[test]
    fn vectorize_cases() {
        let vocab = fit_tfidf(&docs(&[&["one", "two"], &["one", "two"]]));
        let zero = vectorize(&["unknown".to_string()], &vocab);
        assert!(zero.entries.is_empty());

        let single = vectorize(&["one".to_string(), "one".to_string(), "one".to_string()], &vocab);
        assert_eq!(single.entries.len(), 1);
        assert!((single.entries[0].1 - 1.0).abs() < 1e-12);

        // Counts (2, 1) with equal idf: weights (2, 1)/sqrt(5).
        let v = vectorize(
            &["one".to_string(), "one".to_string(), "two".to_string()],
            &vocab,
        );
        assert!((v.get(vocab.index_of("one").unwrap()) - 2.0 / 5.0f64.sqrt()).abs() < 1e-12);
        assert!((v.get(vocab.index_of("two").unwrap()) - 1.0 / 5.0f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn nonzero_vectors_have_unit_norm() {
        let vocab = fit_tfidf(&docs(&[&["a", "b", "c"], &["a", "d"], &["e"]]));
        for tokens in [vec!["a", "b", "b", "e"], vec!["d"], vec!["a", "a", "a", "c", "e"]] {
            let owned: Vec<String> = tokens.iter().map(|s| s.to_string()).collect();
            let v = vectorize(&owned, &vocab);
            assert!((v.l2_norm() - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn metrics_cases() {
        let perfect: Vec<(bool, bool)> = vec![(true, true), (false, false), (true, true)];
        assert_eq!(metrics_from_pairs(&perfect), Metrics { precision: 1.0, recall: 1.0, f1: 1.0 });

        let all_positive: Vec<(bool, bool)> = vec![(true, true), (true, false), (true, true), (true, false)];
        let m = metrics_from_pairs(&all_positive);
        assert!((m.precision - 0.5).abs() < 1e-12);
        assert!((m.recall - 1.0).abs() < 1e-12);
        assert!((m.f1 - 2.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn metrics_match_confusion_matrix_oracle() {
        // Pseudo-random prediction/label pairs from a tiny LCG.
        let mut state = 0x12345678u64;
        let mut next = || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            (state >> 33) & 1 == 1
        };
        for _ in 0..50 {
            let pairs: Vec<(bool, bool)> = (0..40).map(|_| (next(), next())).collect();
            let m = metrics_from_pairs(&pairs);
            let (mut tp, mut fp, mut fn_) = (0f64, 0f64, 0f64);
            for (p, a) in &pairs {
                match (p, a) {
                    (true, true) => tp += 1.0,
                    (true, false) => fp += 1.0,
                    (false, true) => fn_ += 1.0,
                    (false, false) => {}
                }
            }
            let precision = if tp + fp > 0.0 { tp / (tp + fp) } else { 0.0 };
            let recall = if tp + fn_ > 0.0 { tp / (tp + fn_) } else { 0.0 };
            assert!((m.precision - precision).abs() < 1e-12);
            assert!((m.recall - recall).abs() < 1e-12);
        }
    }

    fn toy_examples() -> Vec<LabeledExample> {
        let mut out = Vec::new();
        for i in 0..12 {
            out.push(LabeledExample {
                url: format!("https://site{i}.com/legal/privacy-policy"),
                text: format!(
                    "privacy policy number {i}: we collect personal information, cookies, \
                     usage data and we share it with processors under safeguards"
                ),
                label: true,
            });
            out.push(LabeledExample {
                url: format!("https://site{i}.com/blog/summer-recipes-{i}"),
                text: format!(
                    "recipe {i}: combine flour, sugar and butter, bake twenty minutes, \
                     serve warm with fresh strawberries and cream"
                ),
                label: false,
            });
        }
        out
    }

    #[test]
    fn document_schema_end_to_end() {
        let examples = toy_examples();
        let options = TrainOptions {
            forest: ForestConfig { trees: 20, seed: 4, ..Default::default() },
            smote_k: None,
        };
        let model = train(&examples, FeatureSchema::Document, &options).unwrap();
        let m = evaluate(&model, &examples).unwrap();
        assert_eq!(m.f1, 1.0);
    }

    #[test]
    fn url_schema_uses_smote_and_raw_features() {
        let mut examples = toy_examples();
        examples.truncate(18); // 9 positive, 9 negative
        examples.retain(|e| e.label || e.url.contains("recipes"));
        // Make the classes unbalanced so SMOTE has work to do.
        let mut unbalanced: Vec<LabeledExample> = examples.iter().filter(|e| !e.label).cloned().collect();
        unbalanced.extend(examples.iter().filter(|e| e.label).take(6).cloned());
        let options = TrainOptions {
            forest: ForestConfig { trees: 30, seed: 9, ..Default::default() },
            smote_k: Some(3),
        };
        let model = train(&unbalanced, FeatureSchema::Url, &options).unwrap();
        assert_eq!(model.schema, FeatureSchema::Url);
        assert!(model.meta.synthetic_count > 0);
        let (label, _) = model.predict("https://new.example/legal/privacy-policy", "").unwrap();
        assert!(label);
    }

    #[test]
    fn combined_schema_offsets_url_features() {
        let examples = toy_examples();
        let options = TrainOptions {
            forest: ForestConfig { trees: 10, seed: 2, ..Default::default() },
            smote_k: None,
        };
        let model = train(&examples, FeatureSchema::Combined, &options).unwrap();
        let doc_dim = model.doc_vocab.as_ref().unwrap().len();
        let url_dim = model.url_vocab.as_ref().unwrap().len() + 2;
        assert_eq!(model.forest.dimensionality, doc_dim + url_dim);
        let v = model
            .vectorize_example("https://x.example/legal/privacy-policy", "cookies and usage data")
            .unwrap();
        assert!(v.entries.iter().any(|(i, _)| *i >= doc_dim), "url features present");
        for pair in v.entries.windows(2) {
            assert!(pair[0].0 < pair[1].0);
        }
        assert!(v.entries.last().unwrap().0 < model.forest.dimensionality);
    }

    #[test]
    fn train_and_evaluate_protocol() {
        let examples = toy_examples();
        let options = TrainOptions {
            forest: ForestConfig { trees: 20, seed: 1, ..Default::default() },
            smote_k: None,
        };
        let (model, metrics) = train_and_evaluate(&examples, FeatureSchema::Document, &options, 77).unwrap();
        assert!(metrics.f1 > 0.8, "holdout f1 {}", metrics.f1);
        // The shipped model saw every example.
        assert_eq!(model.doc_vocab.as_ref().unwrap().doc_count, examples.len());
    }

    #[test]
    fn model_round_trips_through_records() {
        let examples = toy_examples();
        let options = TrainOptions {
            forest: ForestConfig { trees: 5, seed: 8, ..Default::default() },
            smote_k: None,
        };
        let model = train(&examples, FeatureSchema::Document, &options).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("model.jsonl");
        crate::corpus::write_records(&path, std::slice::from_ref(&model)).unwrap();
        let loaded: Vec<TrainedClassifier> = crate::corpus::read_records(&path).unwrap();
        let url = "https://a.example/privacy";
        let text = "we collect cookies and personal information";
        assert_eq!(loaded[0].predict(url, text).unwrap(), model.predict(url, text).unwrap());
    }
}
