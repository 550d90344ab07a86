//! Per-sample text scores. All scores are percentages in `[0, 100]`.

use std::collections::{HashMap, HashSet};

use super::{tokenize, MetricError};

/// Numerator used in place of a zero n-gram match count.
pub const BLEU_EPSILON: f64 = 1e-9;

fn ngram_counts(tokens: &[String], n: usize) -> HashMap<&[String], usize> {
    let mut counts = HashMap::new();
    for g in tokens.windows(n) {
        *counts.entry(g).or_insert(0) += 1;
    }
    counts
}

/// Clipped n-gram matches and hypothesis n-gram totals for n = 1..=max_n,
/// plus both lengths. Summing these over samples gives corpus-level BLEU.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct BleuStats {
    pub matches: Vec<usize>,
    pub totals: Vec<usize>,
    pub hypothesis_len: usize,
    pub reference_len: usize,
}

impl BleuStats {
    pub fn collect(hypothesis: &[String], reference: &[String], max_n: usize) -> Self {
        let mut matches = Vec::with_capacity(max_n);
        let mut totals = Vec::with_capacity(max_n);
        for n in 1..=max_n {
            let hyp = ngram_counts(hypothesis, n);
            let reference = ngram_counts(reference, n);
            let clipped = hyp
                .iter()
                .map(|(g, &c)| c.min(reference.get(g).copied().unwrap_or(0)))
                .sum();
            matches.push(clipped);
            totals.push(hypothesis.len().saturating_sub(n - 1));
        }
        Self {
            matches,
            totals,
            hypothesis_len: hypothesis.len(),
            reference_len: reference.len(),
        }
    }

    pub fn add(&mut self, other: &BleuStats) {
        if self.matches.is_empty() {
            self.matches = vec![0; other.matches.len()];
            self.totals = vec![0; other.totals.len()];
        }
        for (a, b) in self.matches.iter_mut().zip(&other.matches) {
            *a += b;
        }
        for (a, b) in self.totals.iter_mut().zip(&other.totals) {
            *a += b;
        }
        self.hypothesis_len += other.hypothesis_len;
        self.reference_len += other.reference_len;
    }

    /// Geometric mean of the smoothed precisions times the brevity penalty.
    pub fn score(&self) -> f64 {
        if self.hypothesis_len == 0 || self.matches.first().copied().unwrap_or(0) == 0 {
            return 0.0;
        }
        let n = self.matches.len() as f64;
        let log_precision: f64 = self
            .matches
            .iter()
            .zip(&self.totals)
            .map(|(&m, &t)| {
                let num = if m == 0 { BLEU_EPSILON } else { m as f64 };
                (num / t.max(1) as f64).ln()
            })
            .sum::<f64>()
            / n;
        let ratio = self.reference_len as f64 / self.hypothesis_len as f64;
        let brevity = (1.0 - ratio).min(0.0).exp();
        100.0 * brevity * log_precision.exp()
    }
}

fn check_order(max_n: usize) -> Result<(), MetricError> {
    if (1..=4).contains(&max_n) {
        Ok(())
    } else {
        Err(MetricError::InvalidOrder(max_n))
    }
}

/// Single-reference sentence BLEU up to `max_n`-grams.
pub fn bleu(hypothesis: &str, reference: &str, max_n: usize) -> Result<f64, MetricError> {
    bleu_tokens(&tokenize(hypothesis), &tokenize(reference), max_n)
}

pub fn bleu_tokens(
    hypothesis: &[String],
    reference: &[String],
    max_n: usize,
) -> Result<f64, MetricError> {
    check_order(max_n)?;
    Ok(BleuStats::collect(hypothesis, reference, max_n).score())
}

/// ROUGE-L F1 (beta = 1) over the longest common token subsequence.
pub fn rouge_l(hypothesis: &str, reference: &str) -> f64 {
    rouge_l_tokens(&tokenize(hypothesis), &tokenize(reference))
}

pub fn rouge_l_tokens(hypothesis: &[String], reference: &[String]) -> f64 {
    let lcs = lcs_len(hypothesis, reference);
    if lcs == 0 {
        return 0.0;
    }
    let p = lcs as f64 / hypothesis.len() as f64;
    let r = lcs as f64 / reference.len() as f64;
    100.0 * 2.0 * p * r / (p + r)
}

fn lcs_len(a: &[String], b: &[String]) -> usize {
    let mut prev = vec![0usize; b.len() + 1];
    let mut cur = vec![0usize; b.len() + 1];
    for x in a {
        for (j, y) in b.iter().enumerate() {
            cur[j + 1] = if x == y {
                prev[j] + 1
            } else {
                cur[j].max(prev[j + 1])
            };
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    prev[b.len()]
}

/// Share of n-gram occurrences in `hypothesis` that repeat an earlier one.
pub fn rep_n(hypothesis: &str, n: usize) -> f64 {
    rep_n_tokens(&tokenize(hypothesis), n)
}

pub fn rep_n_tokens(tokens: &[String], n: usize) -> f64 {
    if n == 0 || tokens.len() < n {
        return 0.0;
    }
    let total = tokens.len() - n + 1;
    let unique: HashSet<&[String]> = tokens.windows(n).collect();
    100.0 * (1.0 - unique.len() as f64 / total as f64)
}

/// Share of hypothesis n-gram occurrences that never occur in `source`.
/// Hypotheses shorter than `n` tokens score 0.
pub fn abs_n(hypothesis: &str, source: &str, n: usize) -> f64 {
    abs_n_tokens(&tokenize(hypothesis), &tokenize(source), n)
}

pub fn abs_n_tokens(hypothesis: &[String], source: &[String], n: usize) -> f64 {
    if n == 0 || hypothesis.len() < n {
        return 0.0;
    }
    let seen: HashSet<&[String]> = source.windows(n).collect();
    let total = hypothesis.len() - n + 1;
    let novel = hypothesis.windows(n).filter(|g| !seen.contains(g)).count();
    100.0 * novel as f64 / total as f64
}
