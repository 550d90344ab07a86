//! Evaluation of generated claims: LENGTH, REP-3, ABS-3, BLEU-1, BLEU-4,
//! ROUGE-L and the token frequency (Zipf) curve.

mod report;
mod scores;
mod tokenize;
mod zipf;

use thiserror::Error;

pub use report::{
    evaluate_system, reference_profile, BleuAggregation, EvalPair, MetricReport, ReportTable,
    REPORT_COLUMNS,
};
pub use scores::{
    abs_n, abs_n_tokens, bleu, bleu_tokens, rep_n, rep_n_tokens, rouge_l, rouge_l_tokens,
    BleuStats, BLEU_EPSILON,
};
pub use tokenize::tokenize;
pub use zipf::{read_zipf_csv, zipf_cdf, ZipfCurve, ZipfPoint, ZipfRow};

#[derive(Debug, Error)]
pub enum MetricError {
    #[error("BLEU order must be between 1 and 4, got {0}")]
    InvalidOrder(usize),
    #[error("nothing to evaluate")]
    NoSamples,
    #[error("no tokens in input")]
    NoTokens,
    #[error("{0}")]
    Format(String),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}
