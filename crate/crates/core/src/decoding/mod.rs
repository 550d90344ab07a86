//! Nucleus sampling, a small n-gram generator and a persona-aware stance
//! classifier: non-neural stand-ins that let the pipeline run end to end.
//!
//! The n-gram generator only exercises decoding and evaluation; its scores
//! say nothing about what a trained sequence-to-sequence model would reach.

mod classifier;
mod ngram;
mod nucleus;

use thiserror::Error;

pub use classifier::{
    baseline_stance_classifier, evaluate_stance_baselines, macro_f1, ClassificationReport,
    CorpusPrior,
};
pub use ngram::{generate, train_ngram, DecodingConfig, NgramModel, END, START};
pub use nucleus::{nucleus_filter, sample_token, TokenDistribution, MASS_TOLERANCE};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DecodeError {
    #[error("top_p must be in (0, 1], got {0}")]
    InvalidP(f64),
    #[error("invalid token distribution: {0}")]
    InvalidDistribution(String),
    #[error("n-gram order must be at least 1, got {0}")]
    InvalidOrder(usize),
    #[error("the model saw no training text")]
    UntrainedModel,
}
