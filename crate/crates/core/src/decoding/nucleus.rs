use rand::Rng;

use super::DecodeError;

/// Tolerance for probability sums and the cumulative-mass comparison.
pub const MASS_TOLERANCE: f64 = 1e-9;

/// Next-token probabilities. Token order is meaningful: it breaks ties.
#[derive(Debug, Clone, PartialEq)]
pub struct TokenDistribution {
    entries: Vec<(String, f64)>,
}

impl TokenDistribution {
    pub fn new(entries: Vec<(String, f64)>) -> Result<Self, DecodeError> {
        if entries.is_empty() {
            return Err(DecodeError::InvalidDistribution("no tokens".into()));
        }
        if let Some((t, p)) = entries.iter().find(|(_, p)| !p.is_finite() || *p < 0.0) {
            return Err(DecodeError::InvalidDistribution(format!(
                "token {t:?} has probability {p}"
            )));
        }
        let total: f64 = entries.iter().map(|(_, p)| p).sum();
        if (total - 1.0).abs() > MASS_TOLERANCE {
            return Err(DecodeError::InvalidDistribution(format!(
                "probabilities sum to {total}"
            )));
        }
        Ok(Self { entries })
    }

    /// Normalizes non-negative weights into a distribution.
    pub fn from_weights(weights: Vec<(String, f64)>) -> Result<Self, DecodeError> {
        let total: f64 = weights.iter().map(|(_, w)| w).sum();
        if !(total > 0.0 && total.is_finite()) {
            return Err(DecodeError::InvalidDistribution(format!(
                "weights sum to {total}"
            )));
        }
        Self::new(weights.into_iter().map(|(t, w)| (t, w / total)).collect())
    }

    pub fn entries(&self) -> &[(String, f64)] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn probability(&self, token: &str) -> f64 {
        self.entries
            .iter()
            .filter(|(t, _)| t == token)
            .map(|(_, p)| p)
            .sum()
    }
}

/// Keeps the smallest most-probable prefix whose mass reaches `top_p` and
/// renormalizes it. Tokens are stably sorted by descending probability, so
/// equal probabilities keep their input order.
pub fn nucleus_filter(d: &TokenDistribution, top_p: f64) -> Result<TokenDistribution, DecodeError> {
    if !(top_p > 0.0 && top_p <= 1.0) {
        return Err(DecodeError::InvalidP(top_p));
    }
    let mut sorted = d.entries.clone();
    sorted.sort_by(|a, b| b.1.total_cmp(&a.1));
    let mut mass = 0.0;
    let mut keep = sorted.len();
    for (i, (_, p)) in sorted.iter().enumerate() {
        mass += p;
        if mass >= top_p - MASS_TOLERANCE {
            keep = i + 1;
            break;
        }
    }
    sorted.truncate(keep);
    let kept: f64 = sorted.iter().map(|(_, p)| p).sum();
    if kept <= 0.0 {
        // every remaining token has zero mass; fall back to the first one
        sorted.truncate(1);
        sorted[0].1 = 1.0;
        return Ok(TokenDistribution { entries: sorted });
    }
    Ok(TokenDistribution {
        entries: sorted.into_iter().map(|(t, p)| (t, p / kept)).collect(),
    })
}

/// Draws a token with probability equal to its mass.
pub fn sample_token<'d, R: Rng + ?Sized>(d: &'d TokenDistribution, rng: &mut R) -> &'d str {
    let u: f64 = rng.gen();
    let mut acc = 0.0;
    for (t, p) in &d.entries {
        acc += p;
        if u < acc {
            return t;
        }
    }
    // rounding left u above the final cumulative sum
    d.entries
        .iter()
        .rev()
        .find(|(_, p)| *p > 0.0)
        .map(|(t, _)| t.as_str())
        .unwrap_or(&d.entries[0].0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn dist(ps: &[(&str, f64)]) -> TokenDistribution {
        TokenDistribution::new(ps.iter().map(|(t, p)| (t.to_string(), *p)).collect()).unwrap()
    }

    #[test]
    fn filter_examples() {
        let d = dist(&[("a", 0.5), ("b", 0.3), ("c", 0.2)]);
        let f = nucleus_filter(&d, 0.6).unwrap();
        assert_eq!(f.len(), 2);
        assert!((f.probability("a") - 0.625).abs() < 1e-12);
        assert!((f.probability("b") - 0.375).abs() < 1e-12);

        assert_eq!(nucleus_filter(&d, 1.0).unwrap(), d);
        let argmax = nucleus_filter(&d, 0.5).unwrap();
        assert_eq!(argmax.entries(), &[("a".to_string(), 1.0)]);
        assert_eq!(nucleus_filter(&d, 0.1).unwrap(), argmax);

        for p in [0.0, -0.1, 1.01, f64::NAN] {
            assert!(matches!(
                nucleus_filter(&d, p),
                Err(DecodeError::InvalidP(_))
            ));
        }
    }

    #[test]
    fn ties_keep_input_order() {
        let d = dist(&[("x", 0.25), ("y", 0.25), ("z", 0.5)]);
        let f = nucleus_filter(&d, 0.7).unwrap();
        let tokens: Vec<&str> = f.entries().iter().map(|(t, _)| t.as_str()).collect();
        assert_eq!(tokens, ["z", "x"]);
    }

    #[test]
    fn invalid_distributions() {
        assert!(TokenDistribution::new(vec![]).is_err());
        assert!(TokenDistribution::new(vec![("a".into(), 0.5)]).is_err());
        assert!(TokenDistribution::new(vec![("a".into(), -0.5), ("b".into(), 1.5)]).is_err());
        assert!(TokenDistribution::from_weights(vec![("a".into(), 0.0)]).is_err());
    }

    #[test]
    fn sampling_replays_with_seed() {
        let d = dist(&[("a", 0.1), ("b", 0.2), ("c", 0.7)]);
        let draw = |seed| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            (0..50)
                .map(|_| sample_token(&d, &mut rng).to_owned())
                .collect::<Vec<_>>()
        };
        assert_eq!(draw(3), draw(3));
        let single = dist(&[("only", 1.0)]);
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert!((0..100).all(|_| sample_token(&single, &mut rng) == "only"));
    }
}
