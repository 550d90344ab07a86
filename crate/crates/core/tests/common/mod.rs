//! Synthetic corpora shared by the integration tests.
#![allow(dead_code)]

use std::collections::HashMap;

use rand::distributions::WeightedIndex;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use rand_distr::LogNormal;

use stancekit::{Claim, ClaimId, Corpus, Discussion, Stance, StanceLabel};

pub const VOCAB: &[&str] = &[
    "school", "tax", "church", "vote", "freedom", "market", "health", "energy", "war", "peace",
    "law", "court", "money", "family", "science", "faith", "data", "privacy", "climate", "trade",
    "is", "not", "should", "must", "because", "the", "a", "of", "more", "less", "good", "bad",
    "harms", "helps", "people", "state", "rights", "cost", "risk", "truth", ".", ",", "!", "?",
];

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_text<R: Rng>(rng: &mut R, min: usize, max: usize) -> String {
    let len = rng.gen_range(min..=max);
    (0..len)
        .map(|_| *VOCAB.choose(rng).unwrap())
        .collect::<Vec<_>>()
        .join(" ")
}

/// A tree of `n` claims in which claim `i > 0` hangs under a uniformly chosen
/// earlier claim and gets a random label. Returns claims in creation order.
pub fn random_tree<R: Rng>(rng: &mut R, discussion: &str, n: usize, authors: usize) -> Vec<Claim> {
    (0..n)
        .map(|i| {
            let (parent, label) = if i == 0 {
                (None, StanceLabel::Thesis)
            } else {
                let p = rng.gen_range(0..i);
                let label = if rng.gen_bool(0.5) {
                    StanceLabel::Pro
                } else {
                    StanceLabel::Con
                };
                (Some(ClaimId::new(format!("{discussion}-{p}"))), label)
            };
            Claim::new(
                format!("{discussion}-{i}"),
                discussion,
                format!("u{}", rng.gen_range(0..authors.max(1))),
                parent,
                random_text(rng, 1, 8),
                label,
            )
            .unwrap()
        })
        .collect()
}

/// Discussion sizes from a log-normal with the given mean and standard
/// deviation, rounded and floored at 2.
pub fn lognormal_sizes<R: Rng>(rng: &mut R, count: usize, mean: f64, std: f64) -> Vec<usize> {
    let sigma2 = (1.0 + (std / mean).powi(2)).ln();
    let dist = LogNormal::new(mean.ln() - sigma2 / 2.0, sigma2.sqrt()).unwrap();
    (0..count)
        .map(|_| (dist.sample(rng).round() as usize).max(2))
        .collect()
}

pub struct SyntheticSpec {
    pub sizes: Vec<usize>,
    pub authors: usize,
    /// Probability that a reply follows its author's leaning toward the
    /// thesis of that discussion.
    pub consistency: f64,
}

/// Random-shaped discussions whose authors each lean pro or con per
/// discussion and label their replies accordingly with probability
/// `consistency`. Author activity is heavy-tailed.
pub fn synthetic_corpus<R: Rng>(rng: &mut R, spec: &SyntheticSpec) -> Corpus {
    let weights: Vec<f64> = (1..=spec.authors).map(|r| 1.0 / r as f64).collect();
    let pick_author = WeightedIndex::new(&weights).unwrap();
    let mut discussions = Vec::with_capacity(spec.sizes.len());
    for (di, &size) in spec.sizes.iter().enumerate() {
        let did = format!("s{di:05}");
        let mut leaning: HashMap<usize, Stance> = HashMap::new();
        let mut orientation: Vec<Stance> = Vec::with_capacity(size);
        let mut claims = Vec::with_capacity(size);
        for i in 0..size {
            let author = pick_author.sample(rng);
            let text = random_text(rng, 3, 12);
            let claim = if i == 0 {
                orientation.push(Stance::Pro);
                Claim::new(
                    format!("{did}-{i}"),
                    did.as_str(),
                    format!("a{author}"),
                    None,
                    text,
                    StanceLabel::Thesis,
                )
            } else {
                let parent = rng.gen_range(0..i);
                let lean = *leaning.entry(author).or_insert_with(|| {
                    if rng.gen_bool(0.5) {
                        Stance::Pro
                    } else {
                        Stance::Con
                    }
                });
                let want = if rng.gen_bool(spec.consistency) {
                    lean
                } else {
                    lean.flip()
                };
                let label = if want == orientation[parent] {
                    StanceLabel::Pro
                } else {
                    StanceLabel::Con
                };
                orientation.push(want);
                Claim::new(
                    format!("{did}-{i}"),
                    did.as_str(),
                    format!("a{author}"),
                    Some(ClaimId::new(format!("{did}-{parent}"))),
                    text,
                    label,
                )
            };
            claims.push(claim.unwrap());
        }
        discussions.push(Discussion::build(claims).unwrap());
    }
    Corpus::new(discussions).unwrap()
}
