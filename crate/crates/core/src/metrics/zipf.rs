use std::collections::HashMap;
use std::io::{Read, Write};

use serde::Serialize;

use super::{tokenize, MetricError};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ZipfPoint {
    pub rank: usize,
    pub token: String,
    pub frequency: usize,
    pub cdf: f64,
}

/// Token frequencies ranked in descending order with their cumulative share.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ZipfCurve {
    pub points: Vec<ZipfPoint>,
    pub total_tokens: usize,
}

/// Ranks tokens by frequency (ties by token) and accumulates the CDF.
pub fn zipf_cdf<'a>(texts: impl IntoIterator<Item = &'a str>) -> Result<ZipfCurve, MetricError> {
    let mut counts: HashMap<String, usize> = HashMap::new();
    for text in texts {
        for token in tokenize(text) {
            *counts.entry(token).or_default() += 1;
        }
    }
    let total: usize = counts.values().sum();
    if total == 0 {
        return Err(MetricError::NoTokens);
    }
    let mut ranked: Vec<(String, usize)> = counts.into_iter().collect();
    ranked.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
    let mut running = 0usize;
    let points = ranked
        .into_iter()
        .enumerate()
        .map(|(i, (token, frequency))| {
            running += frequency;
            ZipfPoint {
                rank: i + 1,
                token,
                frequency,
                cdf: running as f64 / total as f64,
            }
        })
        .collect();
    Ok(ZipfCurve {
        points,
        total_tokens: total,
    })
}

/// One row of the `rank,frequency,cdf` table.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZipfRow {
    pub rank: usize,
    pub frequency: usize,
    pub cdf: f64,
}

impl ZipfCurve {
    pub fn rows(&self) -> Vec<ZipfRow> {
        self.points
            .iter()
            .map(|p| ZipfRow {
                rank: p.rank,
                frequency: p.frequency,
                cdf: p.cdf,
            })
            .collect()
    }

    /// Writes `rank,frequency,cdf` CSV. Floats use the shortest
    /// representation that parses back to the same value.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<(), MetricError> {
        let mut writer = csv::Writer::from_writer(out);
        writer.write_record(["rank", "frequency", "cdf"])?;
        for p in &self.points {
            writer.write_record([
                p.rank.to_string(),
                p.frequency.to_string(),
                p.cdf.to_string(),
            ])?;
        }
        writer.flush().map_err(csv::Error::from)?;
        Ok(())
    }
}

pub fn read_zipf_csv<R: Read>(input: R) -> Result<Vec<ZipfRow>, MetricError> {
    let mut reader = csv::Reader::from_reader(input);
    let headers = reader.headers()?.clone();
    if headers.iter().collect::<Vec<_>>() != ["rank", "frequency", "cdf"] {
        return Err(MetricError::Format(format!(
            "unexpected zipf header {headers:?}"
        )));
    }
    reader
        .records()
        .map(|r| {
            let r = r?;
            let field = |i: usize| r.get(i).unwrap_or_default();
            let bad = |e: &dyn std::fmt::Display| MetricError::Format(e.to_string());
            Ok(ZipfRow {
                rank: field(0).parse().map_err(|e| bad(&e))?,
                frequency: field(1).parse().map_err(|e| bad(&e))?,
                cdf: field(2).parse().map_err(|e| bad(&e))?,
            })
        })
        .collect()
}
