//! Random forest over sparse feature vectors: bootstrap samples, Gini
//! splits over sqrt(V) random feature candidates, trees grown to purity.
//! Every tree gets its own counter-derived RNG, so training is
//! deterministic no matter how rayon schedules the work.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::FeatureVector;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ForestConfig {
    pub trees: usize,
    /// Feature candidates per split; sqrt of the dimensionality if unset.
    pub max_features: Option<usize>,
    pub bootstrap: bool,
    pub seed: u64,
}

impl Default for ForestConfig {
    fn default() -> Self {
        ForestConfig {
            trees: 100,
            max_features: None,
            bootstrap: true,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Node {
    Leaf { label: bool },
    Split { feature: usize, threshold: f64, left: usize, right: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecisionTree {
    pub nodes: Vec<Node>,
}

impl DecisionTree {
    pub fn predict(&self, v: &FeatureVector) -> bool {
        let mut at = 0usize;
        loop {
            match &self.nodes[at] {
                Node::Leaf { label } => return *label,
                Node::Split { feature, threshold, left, right } => {
                    at = if v.get(*feature) <= *threshold { *left } else { *right };
                }
            }
        }
    }

    /// Largest feature index any split tests, if the tree splits at all.
    pub fn max_feature_index(&self) -> Option<usize> {
        self.nodes
            .iter()
            .filter_map(|n| match n {
                Node::Split { feature, .. } => Some(*feature),
                Node::Leaf { .. } => None,
            })
            .max()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RandomForest {
    pub trees: Vec<DecisionTree>,
    pub dimensionality: usize,
}

impl RandomForest {
    /// Fraction of trees voting positive.
    pub fn score(&self, v: &FeatureVector) -> f64 {
        let votes = self.trees.iter().filter(|t| t.predict(v)).count();
        votes as f64 / self.trees.len() as f64
    }

    /// Positive iff at least half the trees vote positive.
    pub fn predict(&self, v: &FeatureVector) -> (bool, f64) {
        let score = self.score(v);
        (score >= 0.5, score)
    }
}

pub(crate) fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E3779B97F4A7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58476D1CE4E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D049BB133111EB);
    x ^ (x >> 31)
}

fn gini(positives: usize, total: usize) -> f64 {
    if total == 0 {
        return 0.0;
    }
    let p = positives as f64 / total as f64;
    1.0 - p * p - (1.0 - p) * (1.0 - p)
}

struct TreeBuilder<'a> {
    features: &'a [FeatureVector],
    labels: &'a [bool],
    max_features: usize,
    dimensionality: usize,
    nodes: Vec<Node>,
}

impl TreeBuilder<'_> {
    fn leaf(&mut self, rows: &[usize]) -> usize {
        let positives = rows.iter().filter(|&&r| self.labels[r]).count();
        // Majority label; exact tie favors positive, consistent with the
        // 0.5 vote threshold.
        let label = positives * 2 >= rows.len();
        self.nodes.push(Node::Leaf { label });
        self.nodes.len() - 1
    }

    fn grow(&mut self, rows: Vec<usize>, rng: &mut ChaCha8Rng) -> usize {
        let positives = rows.iter().filter(|&&r| self.labels[r]).count();
        if positives == 0 || positives == rows.len() {
            return self.leaf(&rows);
        }
        let candidates = rand::seq::index::sample(rng, self.dimensionality, self.max_features.min(self.dimensionality));

        let mut best: Option<(f64, usize, f64)> = None; // (impurity, feature, threshold)
        let mut values: Vec<(f64, bool)> = Vec::with_capacity(rows.len());
        for feature in candidates.iter() {
            values.clear();
            values.extend(rows.iter().map(|&r| (self.features[r].get(feature), self.labels[r])));
            values.sort_by(|a, b| a.0.total_cmp(&b.0));
            if values[0].0 == values[values.len() - 1].0 {
                continue;
            }
            let total_pos = positives;
            let mut left_pos = 0usize;
            for i in 1..values.len() {
                if values[i - 1].1 {
                    left_pos += 1;
                }
                if values[i].0 <= values[i - 1].0 {
                    continue;
                }
                let left_n = i;
                let right_n = values.len() - i;
                let impurity = (left_n as f64 * gini(left_pos, left_n)
                    + right_n as f64 * gini(total_pos - left_pos, right_n))
                    / values.len() as f64;
                if best.is_none() || impurity < best.unwrap().0 {
                    let mut threshold = (values[i - 1].0 + values[i].0) / 2.0;
                    if threshold >= values[i].0 {
                        threshold = values[i - 1].0;
                    }
                    best = Some((impurity, feature, threshold));
                }
            }
        }

        let Some((_, feature, threshold)) = best else {
            return self.leaf(&rows);
        };
        let (left_rows, right_rows): (Vec<usize>, Vec<usize>) =
            rows.into_iter().partition(|&r| self.features[r].get(feature) <= threshold);
        debug_assert!(!left_rows.is_empty() && !right_rows.is_empty());

        let at = self.nodes.len();
        self.nodes.push(Node::Leaf { label: false }); // placeholder
        let left = self.grow(left_rows, rng);
        let right = self.grow(right_rows, rng);
        self.nodes[at] = Node::Split { feature, threshold, left, right };
        at
    }
}

fn grow_tree(
    features: &[FeatureVector],
    labels: &[bool],
    dimensionality: usize,
    max_features: usize,
    bootstrap: bool,
    seed: u64,
) -> DecisionTree {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = labels.len();
    let rows: Vec<usize> = if bootstrap {
        (0..n).map(|_| rng.random_range(0..n)).collect()
    } else {
        (0..n).collect()
    };
    let mut builder = TreeBuilder {
        features,
        labels,
        max_features,
        dimensionality,
        nodes: Vec::new(),
    };
    let root = builder.grow(rows, &mut rng);
    debug_assert_eq!(root, 0);
    DecisionTree { nodes: builder.nodes }
}

/// Trains the ensemble. Both classes must be present.
pub fn train_forest(
    features: &[FeatureVector],
    labels: &[bool],
    dimensionality: usize,
    config: &ForestConfig,
) -> Result<RandomForest> {
    if features.len() != labels.len() || features.is_empty() {
        return Err(Error::Model("training set is empty or misaligned".into()));
    }
    let positives = labels.iter().filter(|&&l| l).count();
    if positives == 0 || positives == labels.len() {
        return Err(Error::Model("training set has a single class".into()));
    }
    if dimensionality == 0 {
        return Err(Error::Model("zero-dimensional feature schema".into()));
    }
    let max_features = config
        .max_features
        .unwrap_or_else(|| ((dimensionality as f64).sqrt() as usize).max(1));
    let trees: Vec<DecisionTree> = (0..config.trees)
        .into_par_iter()
        .map(|i| {
            let tree_seed = config.seed.wrapping_add(splitmix64(i as u64));
            grow_tree(features, labels, dimensionality, max_features, config.bootstrap, tree_seed)
        })
        .collect();
    Ok(RandomForest { trees, dimensionality })
}
