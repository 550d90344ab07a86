//! Corpus tooling for persona-conditioned argument generation.
//!
//! Discussions are trees of pro/con claims under a thesis. This crate parses
//! them, splits them by discussion, builds stance-based author personas,
//! exports text-to-text samples, and scores generated claims.

pub mod bm25;
pub mod corpus;
pub mod decoding;
pub mod ingest;
pub mod metrics;
pub mod persona;
pub mod samples;

pub use corpus::{
    corpus_stats, AuthorId, Claim, ClaimId, Corpus, CorpusError, CorpusStats, Discussion,
    DiscussionId, Stance, StanceLabel,
};
pub use ingest::{parse_corpus, stratified_split, ParseOptions, Split, SplitAssignment};

/// 64-bit FNV-1a; stable across platforms and releases.
pub(crate) fn stable_hash(bytes: &[u8]) -> u64 {
    bytes.iter().fold(0xcbf2_9ce4_8422_2325, |h, &b| {
        (h ^ b as u64).wrapping_mul(0x0000_0100_0000_01b3)
    })
}
