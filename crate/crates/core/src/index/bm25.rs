//! Okapi BM25 over full, untruncated code text.
//!
//! `idf(t) = ln(1 + (N - df + 0.5) / (df + 0.5))`, the non-negative form, and
//! each distinct query term counts once.

use std::collections::{BTreeSet, HashMap};

use super::{search_ranker, Ranker, SearchResult};
use crate::error::Result;
use crate::split::SourceSnippet;
use crate::tokenize::{tokenize, TokenizerRule};

pub const BM25_K1: f64 = 1.2;
pub const BM25_B: f64 = 0.75;

#[derive(Debug, Clone)]
pub struct Bm25Index {
    ids: Vec<String>,
    term_freqs: Vec<HashMap<String, u32>>,
    doc_lens: Vec<usize>,
    doc_freq: HashMap<String, usize>,
    avg_len: f64,
    tokenizer: TokenizerRule,
    k1: f64,
    b: f64,
}

impl Bm25Index {
    pub fn new(corpus: &[SourceSnippet], tokenizer: TokenizerRule) -> Self {
        Self::with_params(corpus, tokenizer, BM25_K1, BM25_B)
    }

    pub fn with_params(corpus: &[SourceSnippet], tokenizer: TokenizerRule, k1: f64, b: f64) -> Self {
        let mut ids = Vec::with_capacity(corpus.len());
        let mut term_freqs = Vec::with_capacity(corpus.len());
        let mut doc_lens = Vec::with_capacity(corpus.len());
        let mut doc_freq: HashMap<String, usize> = HashMap::new();
        for snippet in corpus {
            let mut tf: HashMap<String, u32> = HashMap::new();
            let mut len = 0;
            for tok in tokenize(&snippet.text, tokenizer) {
                *tf.entry(tok.text).or_default() += 1;
                len += 1;
            }
            for term in tf.keys() {
                *doc_freq.entry(term.clone()).or_default() += 1;
            }
            ids.push(snippet.id.clone());
            term_freqs.push(tf);
            doc_lens.push(len);
        }
        let avg_len = if doc_lens.is_empty() {
            0.0
        } else {
            doc_lens.iter().sum::<usize>() as f64 / doc_lens.len() as f64
        };
        Bm25Index {
            ids,
            term_freqs,
            doc_lens,
            doc_freq,
            avg_len,
            tokenizer,
            k1,
            b,
        }
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn idf(&self, term: &str) -> f64 {
        let n = self.ids.len() as f64;
        let df = self.doc_freq.get(term).copied().unwrap_or(0) as f64;
        (1.0 + (n - df + 0.5) / (df + 0.5)).ln()
    }

    pub fn scores(&self, query: &str) -> Vec<f64> {
        let terms: BTreeSet<String> = tokenize(query, self.tokenizer).into_iter().map(|t| t.text).collect();
        let weighted: Vec<(&String, f64)> = terms
            .iter()
            .filter(|t| self.doc_freq.contains_key(*t))
            .map(|t| (t, self.idf(t)))
            .collect();
        self.term_freqs
            .iter()
            .zip(&self.doc_lens)
            .map(|(tf, &len)| {
                let norm = if self.avg_len > 0.0 {
                    self.k1 * (1.0 - self.b + self.b * len as f64 / self.avg_len)
                } else {
                    self.k1
                };
                weighted
                    .iter()
                    .map(|&(t, idf)| match tf.get(t) {
                        Some(&f) => {
                            let f = f as f64;
                            idf * f * (self.k1 + 1.0) / (f + norm)
                        }
                        None => 0.0,
                    })
                    .sum()
            })
            .collect()
    }
}

impl Ranker for Bm25Index {
    fn ids(&self) -> &[String] {
        &self.ids
    }

    fn score_all(&self, _query_id: Option<&str>, query: &str) -> Result<Vec<f64>> {
        Ok(self.scores(query))
    }
}

pub fn bm25_search(corpus: &[SourceSnippet], query: &str, top_k: usize) -> SearchResult {
    let index = Bm25Index::new(corpus, TokenizerRule::default());
    search_ranker(&index, None, query, top_k, None).expect("bm25 scoring is infallible")
}
