//! Bundled English stopword list, shared by the tokenizer, keyphrase
//! extraction, and topic preprocessing so there is a single source of truth.

use std::collections::HashSet;
use std::sync::OnceLock;

const BUNDLED: &str = include_str!("../assets/stopwords_en.txt");

/// A set of lowercase stopwords.
#[derive(Debug, Clone)]
pub struct Stopwords {
    words: HashSet<String>,
}

impl Stopwords {
    /// Parses a list with one word per line. Blank lines and lines starting
    /// with '#' are ignored; words are lowercased.
    pub fn parse(text: &str) -> Self {
        let words = text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'))
            .map(|l| l.to_lowercase())
            .collect();
        Stopwords { words }
    }

    /// The bundled English list.
    pub fn bundled() -> &'static Stopwords {
        static INSTANCE: OnceLock<Stopwords> = OnceLock::new();
        INSTANCE.get_or_init(|| Stopwords::parse(BUNDLED))
    }

    pub fn contains(&self, word: &str) -> bool {
        self.words.contains(word)
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }
}
