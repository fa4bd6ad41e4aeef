//! Tokenization, vocabulary construction, and bag-of-words counts.
//!
//! The tokenizer is deliberately fixed and documented rather than
//! configurable: lowercase, delete apostrophes in place (`you're` →
//! `youre`), split on any remaining non-alphanumeric character, and drop
//! tokens shorter than two characters. Purely numeric tokens are kept.
//! There is no stemming and no default stop list.

use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet, HashMap};

use crate::error::{Error, Result};

/// One corpus item.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Document {
    pub id: String,
    pub text: String,
    /// Oracle relevance label, when known.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub relevant: Option<bool>,
    /// Topic identifiers, when known.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub topics: Option<Vec<String>>,
}

impl Document {
    pub fn new(id: impl Into<String>, text: impl Into<String>) -> Self {
        Self {
            id: id.into(),
            text: text.into(),
            relevant: None,
            topics: None,
        }
    }
}

/// Splits text into normalized tokens.
pub fn tokenize(text: &str) -> Vec<String> {
    let lowered = text.to_lowercase();
    let mut tokens = Vec::new();
    let mut current = String::new();
    for ch in lowered.chars() {
        if ch == '\'' || ch == '\u{2019}' {
            continue; // apostrophes vanish without splitting the token
        }
        if ch.is_alphanumeric() {
            current.push(ch);
        } else if !current.is_empty() {
            tokens.push(std::mem::take(&mut current));
        }
    }
    if !current.is_empty() {
        tokens.push(current);
    }
    tokens.retain(|t| t.chars().count() >= 2);
    tokens
}

/// Lexicographically ordered distinct terms with a reverse index.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Vocabulary {
    terms: Vec<String>,
    #[serde(skip)]
    index: HashMap<String, u32>,
}

impl Vocabulary {
    fn from_terms(terms: Vec<String>) -> Self {
        let index = terms
            .iter()
            .enumerate()
            .map(|(i, t)| (t.clone(), i as u32))
            .collect();
        Self { terms, index }
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> &[String] {
        &self.terms
    }

    pub fn term(&self, index: u32) -> &str {
        &self.terms[index as usize]
    }

    pub fn index_of(&self, term: &str) -> Option<u32> {
        self.index.get(term).copied()
    }

    /// Rebuilds the reverse index after deserialization.
    pub fn reindex(&mut self) {
        self.index = self
            .terms
            .iter()
            .enumerate()
            .map(|(i, t)| (t.clone(), i as u32))
            .collect();
    }
}

/// Options for [`build_vocab`].
#[derive(Debug, Clone)]
pub struct VocabOptions {
    /// Keep only terms occurring in at least this many documents.
    pub min_doc_freq: usize,
    /// Terms to exclude entirely. Empty by default.
    pub stop_words: BTreeSet<String>,
}

impl Default for VocabOptions {
    fn default() -> Self {
        Self {
            min_doc_freq: 1,
            stop_words: BTreeSet::new(),
        }
    }
}

/// Collects the distinct tokens of a corpus in lexicographic order.
pub fn build_vocab(docs: &[Document], options: &VocabOptions) -> Result<Vocabulary> {
    if docs.is_empty() {
        return Err(Error::EmptyInput("corpus"));
    }
    let mut doc_freq: BTreeMap<String, usize> = BTreeMap::new();
    for doc in docs {
        let mut seen: BTreeSet<String> = BTreeSet::new();
        for token in tokenize(&doc.text) {
            seen.insert(token);
        }
        for token in seen {
            *doc_freq.entry(token).or_insert(0) += 1;
        }
    }
    let terms: Vec<String> = doc_freq
        .into_iter()
        .filter(|(term, df)| *df >= options.min_doc_freq && !options.stop_words.contains(term))
        .map(|(term, _)| term)
        .collect();
    if terms.is_empty() {
        return Err(Error::EmptyInput("vocabulary (corpus has no usable tokens)"));
    }
    Ok(Vocabulary::from_terms(terms))
}

/// Sparse documents-by-terms count matrix. Rows hold `(term index, count)`
/// pairs sorted by term index.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BowMatrix {
    pub n_terms: usize,
    rows: Vec<Vec<(u32, u32)>>,
}

impl BowMatrix {
    pub fn n_docs(&self) -> usize {
        self.rows.len()
    }

    pub fn row(&self, doc: usize) -> &[(u32, u32)] {
        &self.rows[doc]
    }

    /// Total token count of one document (in-vocabulary tokens only).
    pub fn row_total(&self, doc: usize) -> u64 {
        self.rows[doc].iter().map(|&(_, c)| u64::from(c)).sum()
    }

    pub fn total_tokens(&self) -> u64 {
        (0..self.n_docs()).map(|d| self.row_total(d)).sum()
    }

    /// Restricts the matrix to a subset of row indices (clones rows).
    pub fn select_rows(&self, indices: &[usize]) -> BowMatrix {
        BowMatrix {
            n_terms: self.n_terms,
            rows: indices.iter().map(|&i| self.rows[i].clone()).collect(),
        }
    }
}

/// Counts in-vocabulary token occurrences per document. Out-of-vocabulary
/// tokens are ignored; a document with none becomes a zero row.
pub fn vectorize(docs: &[Document], vocab: &Vocabulary) -> BowMatrix {
    let rows = docs
        .iter()
        .map(|doc| {
            let mut counts: BTreeMap<u32, u32> = BTreeMap::new();
            for token in tokenize(&doc.text) {
                if let Some(idx) = vocab.index_of(&token) {
                    *counts.entry(idx).or_insert(0) += 1;
                }
            }
            counts.into_iter().collect()
        })
        .collect();
    BowMatrix {
        n_terms: vocab.len(),
        rows,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn tokenize_normalizes_case_and_apostrophes() {
        assert_eq!(tokenize("You're EXOTIC!"), ["youre", "exotic"]);
        assert_eq!(tokenize("there\u{2019}s"), ["theres"]);
    }

    #[test]
    fn tokenize_edge_cases() {
        assert_eq!(tokenize(""), Vec::<String>::new());
        assert_eq!(tokenize("a bb"), ["bb"]);
        assert_eq!(tokenize("42 x 7"), ["42"]);
        assert_eq!(tokenize("semi-random"), ["semi", "random"]);
        assert_eq!(tokenize("  \t\n "), Vec::<String>::new());
    }

    #[test]
    fn tokenize_keeps_non_ascii_letters() {
        assert_eq!(tokenize("Naïve Café"), ["naïve", "café"]);
    }

    #[test]
    fn vocab_is_sorted_and_deterministic() {
        let docs = vec![
            Document::new("1", "aa bb"),
            Document::new("2", "bb cc"),
        ];
        let vocab = build_vocab(&docs, &VocabOptions::default()).unwrap();
        assert_eq!(vocab.terms(), ["aa", "bb", "cc"]);
        let again = build_vocab(&docs, &VocabOptions::default()).unwrap();
        assert_eq!(vocab, again);
    }

    #[test]
    fn vocab_single_doc_and_errors() {
        let docs = vec![Document::new("1", "xx xx")];
        let vocab = build_vocab(&docs, &VocabOptions::default()).unwrap();
        assert_eq!(vocab.terms(), ["xx"]);

        assert!(build_vocab(&[], &VocabOptions::default()).is_err());
        let unusable = vec![Document::new("1", "a ! b")];
        assert!(build_vocab(&unusable, &VocabOptions::default()).is_err());
    }

    #[test]
    fn vocab_min_doc_freq_filters() {
        let docs = vec![
            Document::new("1", "aa bb"),
            Document::new("2", "aa cc"),
            Document::new("3", "aa"),
        ];
        let options = VocabOptions {
            min_doc_freq: 2,
            ..Default::default()
        };
        let vocab = build_vocab(&docs, &options).unwrap();
        assert_eq!(vocab.terms(), ["aa"]);
    }

    #[test]
    fn vectorize_counts_and_ignores_oov() {
        let docs = vec![Document::new("1", "xx yy xx")];
        let vocab = build_vocab(&docs, &VocabOptions::default()).unwrap();
        let bow = vectorize(&docs, &vocab);
        let xx = vocab.index_of("xx").unwrap();
        let yy = vocab.index_of("yy").unwrap();
        assert_eq!(bow.row(0), [(xx, 2), (yy, 1)]);

        let oov = vec![Document::new("2", "zz ww"), Document::new("3", "")];
        let bow2 = vectorize(&oov, &vocab);
        assert!(bow2.row(0).is_empty());
        assert!(bow2.row(1).is_empty());
    }

    #[test]
    fn row_sums_count_in_vocabulary_tokens() {
        let docs = vec![
            Document::new("1", "aa bb aa zz"),
            Document::new("2", "bb bb"),
        ];
        let vocab = build_vocab(&docs[..1], &VocabOptions::default()).unwrap();
        let bow = vectorize(&docs, &vocab);
        assert_eq!(bow.row_total(0), 4); // aa aa bb zz all in vocab
        assert_eq!(bow.row_total(1), 2);
    }

    proptest! {
        #[test]
        fn tokenize_is_idempotent_on_its_own_output(text in "[ a-zA-Z0-9'!?.,;:-]{0,200}") {
            let once = tokenize(&text);
            let twice = tokenize(&once.join(" "));
            prop_assert_eq!(once, twice);
        }

        #[test]
        fn vectorize_row_sum_equals_in_vocab_token_count(text in "[ a-z]{0,120}") {
            let docs = vec![Document::new("d", text.clone())];
            if let Ok(vocab) = build_vocab(&docs, &VocabOptions::default()) {
                let bow = vectorize(&docs, &vocab);
                let expected = tokenize(&text)
                    .into_iter()
                    .filter(|t| vocab.index_of(t).is_some())
                    .count() as u64;
                prop_assert_eq!(bow.row_total(0), expected);
            }
        }
    }
}
