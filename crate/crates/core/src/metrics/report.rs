use serde::Serialize;

use super::scores::{abs_n_tokens, rep_n_tokens, rouge_l_tokens, BleuStats, BLEU_EPSILON};
use super::{tokenize, MetricError};

/// How BLEU is aggregated over a system's samples.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BleuAggregation {
    /// Sentence BLEU per sample, then the mean.
    #[default]
    SentenceMean,
    /// Matches and lengths pooled over all samples before scoring.
    Corpus,
}

#[derive(Debug, Clone)]
pub struct EvalPair {
    /// Full serialized model input (persona and parent claim).
    pub source: String,
    pub hypothesis: String,
    pub reference: String,
}

/// System-level averages; every score except `length_mean` is a percentage.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MetricReport {
    pub length_mean: f64,
    pub rep3: f64,
    pub abs3: f64,
    pub bleu1: f64,
    pub bleu4: f64,
    pub rouge_l: f64,
    pub sample_count: usize,
    pub bleu_aggregation: BleuAggregation,
    pub bleu_smoothing: String,
}

pub fn evaluate_system(
    pairs: &[EvalPair],
    aggregation: BleuAggregation,
) -> Result<MetricReport, MetricError> {
    if pairs.is_empty() {
        return Err(MetricError::NoSamples);
    }
    let n = pairs.len() as f64;
    let mut length = 0.0;
    let mut rep3 = 0.0;
    let mut abs3 = 0.0;
    let mut rouge = 0.0;
    let mut bleu1 = 0.0;
    let mut bleu4 = 0.0;
    let mut pooled1 = BleuStats::default();
    let mut pooled4 = BleuStats::default();
    for pair in pairs {
        let hyp = tokenize(&pair.hypothesis);
        let reference = tokenize(&pair.reference);
        let source = tokenize(&pair.source);
        length += hyp.len() as f64;
        rep3 += rep_n_tokens(&hyp, 3);
        abs3 += abs_n_tokens(&hyp, &source, 3);
        rouge += rouge_l_tokens(&hyp, &reference);
        let s1 = BleuStats::collect(&hyp, &reference, 1);
        let s4 = BleuStats::collect(&hyp, &reference, 4);
        match aggregation {
            BleuAggregation::SentenceMean => {
                bleu1 += s1.score();
                bleu4 += s4.score();
            }
            BleuAggregation::Corpus => {
                pooled1.add(&s1);
                pooled4.add(&s4);
            }
        }
    }
    let (bleu1, bleu4) = match aggregation {
        BleuAggregation::SentenceMean => (bleu1 / n, bleu4 / n),
        BleuAggregation::Corpus => (pooled1.score(), pooled4.score()),
    };
    Ok(MetricReport {
        length_mean: length / n,
        rep3: rep3 / n,
        abs3: abs3 / n,
        bleu1,
        bleu4,
        rouge_l: rouge / n,
        sample_count: pairs.len(),
        bleu_aggregation: aggregation,
        bleu_smoothing: format!("add-epsilon {BLEU_EPSILON:e} on zero n-gram matches"),
    })
}

/// LENGTH, REP-3 and ABS-3 of the references themselves (the "Human" row).
pub fn reference_profile(pairs: &[EvalPair]) -> Result<[f64; 3], MetricError> {
    if pairs.is_empty() {
        return Err(MetricError::NoSamples);
    }
    let n = pairs.len() as f64;
    let mut out = [0.0; 3];
    for pair in pairs {
        let reference = tokenize(&pair.reference);
        out[0] += reference.len() as f64;
        out[1] += rep_n_tokens(&reference, 3);
        out[2] += abs_n_tokens(&reference, &tokenize(&pair.source), 3);
    }
    Ok(out.map(|v| v / n))
}

pub const REPORT_COLUMNS: [&str; 6] = ["LENGTH", "REP-3", "ABS-3", "BLEU-1", "BLEU-4", "ROUGE-L"];

/// Rows of named systems in the LENGTH / REP-3 / ABS-3 / BLEU-1 / BLEU-4 /
/// ROUGE-L layout. Missing cells print as `-`.
#[derive(Debug, Clone, Default, Serialize)]
pub struct ReportTable {
    pub rows: Vec<(String, [Option<f64>; 6])>,
}

impl ReportTable {
    pub fn push_system(&mut self, name: impl Into<String>, r: &MetricReport) {
        self.rows.push((
            name.into(),
            [r.length_mean, r.rep3, r.abs3, r.bleu1, r.bleu4, r.rouge_l].map(Some),
        ));
    }

    pub fn push_reference(&mut self, name: impl Into<String>, profile: [f64; 3]) {
        self.rows.push((
            name.into(),
            [
                Some(profile[0]),
                Some(profile[1]),
                Some(profile[2]),
                None,
                None,
                None,
            ],
        ));
    }

    pub fn render(&self) -> String {
        let name_width = self
            .rows
            .iter()
            .map(|(n, _)| n.chars().count())
            .max()
            .unwrap_or(0)
            .max(8);
        let mut out = format!("{:<name_width$}", "");
        for c in REPORT_COLUMNS {
            out.push_str(&format!(" {c:>8}"));
        }
        out.push('\n');
        for (name, cells) in &self.rows {
            out.push_str(&format!("{name:<name_width$}"));
            for cell in cells {
                match cell {
                    Some(v) => out.push_str(&format!(" {v:>8.2}")),
                    None => out.push_str(&format!(" {:>8}", "-")),
                }
            }
            out.push('\n');
        }
        out
    }
}
