//! Okapi BM25 over small in-memory collections.
//!
//! Term weight: `idf(t) * tf * (k1 + 1) / (tf + k1 * (1 - b + b * dl / avgdl))`
//! with `idf(t) = ln((N - df + 0.5) / (df + 0.5) + 1)`, which stays positive
//! for every term. Texts are tokenized with [`crate::metrics::tokenize`].

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap};
use std::fmt::Debug;

use thiserror::Error;

use crate::metrics::tokenize;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Bm25Error {
    #[error("cannot index an empty collection")]
    EmptyCorpus,
    #[error("invalid BM25 parameters k1={k1}, b={b}; need k1 >= 0 and 0 <= b <= 1")]
    InvalidParameters { k1: f64, b: f64 },
    #[error("document id {0} appears twice")]
    DuplicateDocument(String),
    #[error("unknown document {0}")]
    UnknownDocument(String),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bm25Params {
    /// Term frequency saturation.
    pub k1: f64,
    /// Document length normalization, 0 (none) to 1 (full).
    pub b: f64,
}

impl Default for Bm25Params {
    fn default() -> Self {
        Self { k1: 1.5, b: 0.75 }
    }
}

#[derive(Debug, Clone)]
struct Document<Id> {
    id: Id,
    len: usize,
    term_freqs: HashMap<String, usize>,
}

#[derive(Debug, Clone)]
pub struct Bm25Index<Id> {
    docs: Vec<Document<Id>>,
    positions: BTreeMap<Id, usize>,
    doc_freqs: HashMap<String, usize>,
    avg_doc_len: f64,
    params: Bm25Params,
}

impl<Id: Ord + Clone + Debug> Bm25Index<Id> {
    pub fn build<S: AsRef<str>>(
        docs: impl IntoIterator<Item = (Id, S)>,
        params: Bm25Params,
    ) -> Result<Self, Bm25Error> {
        Self::from_tokens(
            docs.into_iter()
                .map(|(id, text)| (id, tokenize(text.as_ref()))),
            params,
        )
    }

    /// Indexes already tokenized documents.
    pub fn from_tokens(
        docs: impl IntoIterator<Item = (Id, Vec<String>)>,
        params: Bm25Params,
    ) -> Result<Self, Bm25Error> {
        let Bm25Params { k1, b } = params;
        if !(k1 >= 0.0 && (0.0..=1.0).contains(&b)) {
            return Err(Bm25Error::InvalidParameters { k1, b });
        }
        let mut documents = Vec::new();
        let mut positions = BTreeMap::new();
        let mut doc_freqs: HashMap<String, usize> = HashMap::new();
        let mut total_len = 0usize;
        for (id, tokens) in docs {
            if positions.insert(id.clone(), documents.len()).is_some() {
                return Err(Bm25Error::DuplicateDocument(format!("{id:?}")));
            }
            let mut term_freqs: HashMap<String, usize> = HashMap::new();
            for token in &tokens {
                *term_freqs.entry(token.clone()).or_default() += 1;
            }
            for term in term_freqs.keys() {
                *doc_freqs.entry(term.clone()).or_default() += 1;
            }
            total_len += tokens.len();
            documents.push(Document {
                id,
                len: tokens.len(),
                term_freqs,
            });
        }
        if documents.is_empty() {
            return Err(Bm25Error::EmptyCorpus);
        }
        let avg_doc_len = total_len as f64 / documents.len() as f64;
        Ok(Self {
            docs: documents,
            positions,
            doc_freqs,
            avg_doc_len,
            params,
        })
    }

    pub fn len(&self) -> usize {
        self.docs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.docs.is_empty()
    }

    pub fn params(&self) -> Bm25Params {
        self.params
    }

    pub fn average_document_length(&self) -> f64 {
        self.avg_doc_len
    }

    /// Number of documents containing `term` at least once.
    pub fn document_frequency(&self, term: &str) -> usize {
        self.doc_freqs.get(term).copied().unwrap_or(0)
    }

    pub fn document_length(&self, id: &Id) -> Option<usize> {
        self.positions.get(id).map(|&p| self.docs[p].len)
    }

    pub fn idf(&self, term: &str) -> f64 {
        let n = self.docs.len() as f64;
        let df = self.document_frequency(term) as f64;
        ((n - df + 0.5) / (df + 0.5) + 1.0).ln()
    }

    fn score_at(&self, query: &[String], pos: usize) -> f64 {
        let doc = &self.docs[pos];
        let Bm25Params { k1, b } = self.params;
        query
            .iter()
            .filter_map(|term| {
                let tf = *doc.term_freqs.get(term)? as f64;
                let norm = 1.0 - b + b * doc.len as f64 / self.avg_doc_len;
                Some(self.idf(term) * tf * (k1 + 1.0) / (tf + k1 * norm))
            })
            .sum()
    }

    pub fn score(&self, query: &str, id: &Id) -> Result<f64, Bm25Error> {
        self.score_tokens(&tokenize(query), id)
    }

    pub fn score_tokens(&self, query: &[String], id: &Id) -> Result<f64, Bm25Error> {
        let pos = self
            .positions
            .get(id)
            .ok_or_else(|| Bm25Error::UnknownDocument(format!("{id:?}")))?;
        Ok(self.score_at(query, *pos))
    }

    /// Every document with its score, best first when `descending`, worst
    /// first otherwise. Equal scores are always ordered by ascending id.
    pub fn rank(&self, query: &str, descending: bool) -> Vec<(Id, f64)> {
        self.rank_tokens(&tokenize(query), descending)
    }

    pub fn rank_tokens(&self, query: &[String], descending: bool) -> Vec<(Id, f64)> {
        let mut scored: Vec<(Id, f64)> = self
            .docs
            .iter()
            .enumerate()
            .map(|(pos, doc)| (doc.id.clone(), self.score_at(query, pos)))
            .collect();
        scored.sort_by(|a, b| {
            let by_score = a.1.total_cmp(&b.1);
            let by_score = if descending {
                by_score.reverse()
            } else {
                by_score
            };
            match by_score {
                Ordering::Equal => a.0.cmp(&b.0),
                other => other,
            }
        });
        scored
    }
}
