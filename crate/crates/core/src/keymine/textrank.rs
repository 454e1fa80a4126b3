//! TextRank keyphrases. Nodes are the distinct non-stopword tokens;
//! undirected edges join tokens whose filtered positions fall within the
//! co-occurrence window of the same fragment (edges never cross
//! punctuation). Node scores come from damped power iteration with
//! dangling mass redistributed uniformly, so the score vector always sums
//! to one. The top third of nodes is kept and adjacent kept tokens merge
//! into phrases.

use std::collections::BTreeSet;

use super::{fragments, KeyphraseScore, Source};
use crate::stopwords::Stopwords;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TextRankConfig {
    pub window: usize,
    pub damping: f64,
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for TextRankConfig {
    fn default() -> Self {
        TextRankConfig {
            window: 4,
            damping: 0.85,
            tol: 1e-6,
            max_iter: 100,
        }
    }
}

pub(crate) struct Graph {
    /// Sorted distinct tokens; index = node id.
    pub nodes: Vec<String>,
    pub adjacency: Vec<BTreeSet<usize>>,
}

pub(crate) fn build_graph(text: &str, stopwords: &Stopwords, window: usize) -> Graph {
    let frags = fragments(text);
    let mut vocab: BTreeSet<&str> = BTreeSet::new();
    for frag in &frags {
        for token in frag {
            if !stopwords.contains(token) {
                vocab.insert(token);
            }
        }
    }
    let nodes: Vec<String> = vocab.into_iter().map(str::to_string).collect();
    let index = |t: &str| nodes.binary_search_by(|n| n.as_str().cmp(t)).expect("token in vocab");
    let mut adjacency = vec![BTreeSet::new(); nodes.len()];
    for frag in &frags {
        let filtered: Vec<usize> = frag
            .iter()
            .filter(|t| !stopwords.contains(t))
            .map(|t| index(t))
            .collect();
        for i in 0..filtered.len() {
            for j in (i + 1)..filtered.len().min(i + window) {
                let (a, b) = (filtered[i], filtered[j]);
                if a != b {
                    adjacency[a].insert(b);
                    adjacency[b].insert(a);
                }
            }
        }
    }
    Graph { nodes, adjacency }
}

/// One damped power-iteration step. Dangling (isolated) node mass is
/// spread uniformly so the vector keeps summing to one.
pub(crate) fn power_step(scores: &[f64], adjacency: &[BTreeSet<usize>], damping: f64) -> Vec<f64> {
    let n = scores.len() as f64;
    let dangling: f64 = scores
        .iter()
        .zip(adjacency)
        .filter(|(_, adj)| adj.is_empty())
        .map(|(s, _)| s)
        .sum();
    (0..scores.len())
        .map(|i| {
            let incoming: f64 = adjacency[i].iter().map(|&j| scores[j] / adjacency[j].len() as f64).sum();
            (1.0 - damping) / n + damping * (incoming + dangling / n)
        })
        .collect()
}

/// Node scores after convergence, as (token, score) sorted by token.
pub fn textrank_scores(text: &str, stopwords: &Stopwords, config: &TextRankConfig) -> Vec<(String, f64)> {
    let graph = build_graph(text, stopwords, config.window);
    if graph.nodes.is_empty() {
        return Vec::new();
    }
    let n = graph.nodes.len();
    let mut scores = vec![1.0 / n as f64; n];
    for _ in 0..config.max_iter {
        let next = power_step(&scores, &graph.adjacency, config.damping);
        let l1: f64 = scores.iter().zip(&next).map(|(a, b)| (a - b).abs()).sum();
        scores = next;
        if l1 < config.tol {
            break;
        }
    }
    graph.nodes.into_iter().zip(scores).collect()
}

/// Full TextRank: converged node scores, top ceil(V/3) tokens kept,
/// adjacent kept tokens merged into phrases scored by their members' sum.
pub fn textrank(text: &str, stopwords: &Stopwords, config: &TextRankConfig) -> Vec<KeyphraseScore> {
    let scored = textrank_scores(text, stopwords, config);
    if scored.is_empty() {
        return Vec::new();
    }
    let keep_count = scored.len().div_ceil(3);
    let mut ranked: Vec<usize> = (0..scored.len()).collect();
    ranked.sort_by(|&a, &b| {
        scored[b].1.total_cmp(&scored[a].1).then_with(|| scored[a].0.cmp(&scored[b].0))
    });
    let kept: BTreeSet<&str> = ranked[..keep_count].iter().map(|&i| scored[i].0.as_str()).collect();
    let score_of = |t: &str| {
        scored[scored.binary_search_by(|(n, _)| n.as_str().cmp(t)).expect("token scored")].1
    };

    let mut phrases: std::collections::BTreeMap<Vec<String>, f64> = std::collections::BTreeMap::new();
    for frag in fragments(text) {
        let mut run: Vec<String> = Vec::new();
        for token in frag {
            if !stopwords.contains(&token) && kept.contains(token.as_str()) {
                run.push(token);
                continue;
            }
            if !run.is_empty() {
                let score = run.iter().map(|t| score_of(t)).sum();
                phrases.insert(std::mem::take(&mut run), score);
            }
        }
        if !run.is_empty() {
            let score = run.iter().map(|t| score_of(t)).sum();
            phrases.insert(run, score);
        }
    }
    let mut out: Vec<KeyphraseScore> = phrases
        .into_iter()
        .map(|(phrase, score)| KeyphraseScore {
            phrase,
            score,
            source: Source::TextRank,
        })
        .collect();
    out.sort_by(|a, b| b.score.total_cmp(&a.score).then_with(|| a.phrase.cmp(&b.phrase)));
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sw() -> &'static Stopwords {
        crate::stopwords::Stopwords::bundled()
    }

    fn cfg() -> TextRankConfig {
        TextRankConfig::default()
    }

    #[test]
    fn two_tokens_symmetric() {
        let scores = textrank_scores("alpha beta", sw(), &cfg());
        assert_eq!(scores.len(), 2);
        assert!((scores[0].1 - 0.5).abs() < 1e-9);
        assert!((scores[1].1 - 0.5).abs() < 1e-9);
    }

    #[test]
    fn star_hub_scores_highest() {
        let scores = textrank_scores("hub leafa. hub leafb. hub leafc.", sw(), &cfg());
        let hub = scores.iter().find(|(t, _)| t == "hub").unwrap().1;
        for (token, s) in &scores {
            if token != "hub" {
                assert!(hub > *s, "{token} {s} vs hub {hub}");
            }
        }
    }

    #[test]
    fn scores_sum_to_one_and_converge() {
        let text = "Controllers process personal data lawfully. Processors act on documented instructions. \
                    Data subjects exercise access rights. Supervisory authorities monitor compliance closely.";
        let scored = textrank_scores(text, sw(), &cfg());
        let total: f64 = scored.iter().map(|(_, s)| s).sum();
        assert!((total - 1.0).abs() < 1e-6, "sum {total}");

        // Fixed point: one more step moves the vector less than tol.
        let graph = build_graph(text, sw(), cfg().window);
        let vec: Vec<f64> = scored.iter().map(|(_, s)| *s).collect();
        let next = power_step(&vec, &graph.adjacency, cfg().damping);
        let l1: f64 = vec.iter().zip(&next).map(|(a, b)| (a - b).abs()).sum();
        assert!(l1 < cfg().tol, "l1 {l1}");
    }

    #[test]
    fn empty_and_stopword_only_texts() {
        assert!(textrank("", sw(), &cfg()).is_empty());
        assert!(textrank("the of and is", sw(), &cfg()).is_empty());
    }

    #[test]
    fn disconnected_paragraph_shuffle_invariance() {
        let paragraphs = [
            "alpha beta gamma delta.",
            "epsilon zeta eta theta.",
            "iota kappa lambda mu.",
        ];
        let forward = textrank_scores(&paragraphs.join(" "), sw(), &cfg());
        let shuffled = [paragraphs[2], paragraphs[0], paragraphs[1]].join(" ");
        let backward = textrank_scores(&shuffled, sw(), &cfg());
        assert_eq!(forward.len(), backward.len());
        for ((ta, sa), (tb, sb)) in forward.iter().zip(&backward) {
            assert_eq!(ta, tb);
            assert!((sa - sb).abs() < 2.0 * cfg().tol);
        }
    }

    #[test]
    fn edges_do_not_cross_punctuation() {
        let graph = build_graph("alpha beta. gamma delta", sw(), 4);
        let a = graph.nodes.iter().position(|n| n == "alpha").unwrap();
        let g = graph.nodes.iter().position(|n| n == "gamma").unwrap();
        let b = graph.nodes.iter().position(|n| n == "beta").unwrap();
        assert!(graph.adjacency[a].contains(&b));
        assert!(!graph.adjacency[a].contains(&g));
        assert!(!graph.adjacency[b].contains(&g));
    }

    #[test]
    fn keeps_top_third_and_merges_adjacent() {
        // Nine distinct tokens; three are kept. Make "data retention"
        // dominate by repetition so the pair merges into one phrase.
        let text = "data retention policy explained here. data retention matters greatly. \
                    data retention schedule follows. unrelated words appear once.";
        let phrases = textrank(text, sw(), &cfg());
        assert!(!phrases.is_empty());
        let top = phrases[0].phrase.join(" ");
        assert_eq!(top, "data retention");
        for k in &phrases {
            assert!(!k.phrase.is_empty());
            assert!(k.phrase.iter().all(|w| !sw().contains(w)));
        }
    }

    #[test]
    fn deterministic_output() {
        let text = "We disclose aggregate statistics to partners. Partners never receive raw identifiers.";
        assert_eq!(textrank(text, sw(), &cfg()), textrank(text, sw(), &cfg()));
    }
}
