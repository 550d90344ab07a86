use std::collections::{BTreeMap, HashMap};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::nucleus::{nucleus_filter, sample_token, TokenDistribution};
use super::DecodeError;
use crate::metrics::tokenize;

pub const START: &str = "<s>";
pub const END: &str = "</s>";

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecodingConfig {
    pub top_p: f64,
    pub max_length: usize,
    pub seed: u64,
}

impl Default for DecodingConfig {
    fn default() -> Self {
        Self {
            top_p: 0.95,
            max_length: 40,
            seed: 0,
        }
    }
}

/// Count-based n-gram model with backoff to the longest context seen in
/// training. It stands in for a trained generator so that decoding and
/// evaluation can run end to end; it does not look at the source text
/// beyond seeding its sampling stream.
#[derive(Debug, Clone)]
pub struct NgramModel {
    order: usize,
    /// Context (the last 0..order-1 tokens) to next-token counts.
    tables: HashMap<Vec<String>, BTreeMap<String, usize>>,
}

/// Trains an order-`n` model on tokenized `texts`; every text is padded
/// with `n - 1` start markers and closed with an end marker.
pub fn train_ngram<'a>(
    texts: impl IntoIterator<Item = &'a str>,
    n: usize,
) -> Result<NgramModel, DecodeError> {
    if n == 0 {
        return Err(DecodeError::InvalidOrder(n));
    }
    let mut tables: HashMap<Vec<String>, BTreeMap<String, usize>> = HashMap::new();
    for text in texts {
        let tokens = tokenize(text);
        if tokens.is_empty() {
            continue;
        }
        let mut padded = vec![START.to_owned(); n - 1];
        padded.extend(tokens);
        padded.push(END.to_owned());
        for i in (n - 1)..padded.len() {
            for k in 0..n {
                let context = padded[i - k..i].to_vec();
                *tables
                    .entry(context)
                    .or_default()
                    .entry(padded[i].clone())
                    .or_default() += 1;
            }
        }
    }
    if tables.is_empty() {
        return Err(DecodeError::UntrainedModel);
    }
    Ok(NgramModel { order: n, tables })
}

impl NgramModel {
    pub fn order(&self) -> usize {
        self.order
    }

    /// Next-token distribution after `history` (start markers included),
    /// tokens in lexicographic order.
    pub fn next_distribution(&self, history: &[String]) -> TokenDistribution {
        let longest = (self.order - 1).min(history.len());
        let counts = (0..=longest)
            .rev()
            .find_map(|k| self.tables.get(&history[history.len() - k..]))
            .expect("the empty context is always trained");
        TokenDistribution::from_weights(
            counts.iter().map(|(t, &c)| (t.clone(), c as f64)).collect(),
        )
        .expect("trained counts are positive")
    }

    /// Samples up to `max_length` tokens with nucleus filtering at every
    /// step, stopping early at the end marker.
    pub fn generate(&self, source: &str, cfg: &DecodingConfig) -> Result<String, DecodeError> {
        if !(cfg.top_p > 0.0 && cfg.top_p <= 1.0) {
            return Err(DecodeError::InvalidP(cfg.top_p));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ crate::stable_hash(source.as_bytes()));
        let mut history = vec![START.to_owned(); self.order - 1];
        let mut produced = Vec::new();
        while produced.len() < cfg.max_length {
            let dist = nucleus_filter(&self.next_distribution(&history), cfg.top_p)?;
            let token = sample_token(&dist, &mut rng);
            if token == END {
                break;
            }
            produced.push(token.to_owned());
            history.push(token.to_owned());
        }
        Ok(produced.join(" "))
    }
}

pub fn generate(
    model: &NgramModel,
    source: &str,
    cfg: &DecodingConfig,
) -> Result<String, DecodeError> {
    model.generate(source, cfg)
}
