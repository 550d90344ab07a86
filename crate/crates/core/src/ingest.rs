//! Reading the claim-record corpus format and splitting a corpus into
//! train / validation / test at discussion granularity.
//!
//! The corpus format is JSON Lines. An optional first line
//! `{"format":"stancekit-corpus","version":1}` declares the version; every
//! other non-blank line is one claim record with the string fields
//! `claim_id`, `discussion_id`, `author_id`, `parent_id` (nullable), `text`
//! and `stance_label` (`"pro"`, `"con"` or `"thesis"`). Records of one
//! discussion must be contiguous, which lets [`DiscussionReader`] validate
//! and hand out one discussion at a time.

use std::collections::{BTreeMap, HashSet};
use std::fmt;
use std::io::{self, BufRead, Write};
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};
use thiserror::Error;

use crate::corpus::{Claim, ClaimId, Corpus, CorpusError, Discussion, DiscussionId};

pub const CORPUS_FORMAT: &str = "stancekit-corpus";
pub const CORPUS_VERSION: u64 = 1;

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("line {line}: malformed record: {message}")]
    MalformedRecord { line: usize, message: String },
    #[error("line {line}: missing field {field:?}")]
    MissingField { line: usize, field: &'static str },
    #[error("line {line}: discussion {discussion_id} resumes after other records; records of a discussion must be contiguous")]
    NonContiguousDiscussion {
        line: usize,
        discussion_id: DiscussionId,
    },
    #[error("line {line}: unsupported corpus format version {version}")]
    UnsupportedVersion { line: usize, version: String },
    #[error("discussion starting at line {line}: {source}")]
    InvalidDiscussion {
        line: usize,
        #[source]
        source: CorpusError,
    },
    #[error(transparent)]
    Corpus(#[from] CorpusError),
    #[error("split fractions must satisfy 0 <= val + test < 1 (got val={val}, test={test})")]
    FractionOutOfRange { val: f64, test: f64 },
    #[error("split file: {0}")]
    SplitFormat(String),
    #[error(transparent)]
    Io(#[from] io::Error),
}

impl IngestError {
    /// The underlying tree/corpus validation error, if any.
    pub fn corpus_error(&self) -> Option<&CorpusError> {
        match self {
            IngestError::InvalidDiscussion { source, .. } => Some(source),
            IngestError::Corpus(e) => Some(e),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct ParseOptions {
    /// Give records without an `author_id` a fresh author of their own
    /// (`anon:<claim_id>`) instead of rejecting them.
    pub synthesize_missing_authors: bool,
}

/// Streams validated discussions out of a corpus file.
pub struct DiscussionReader<R> {
    lines: io::Lines<R>,
    options: ParseOptions,
    line_no: usize,
    pending: Option<(usize, Claim)>,
    seen: HashSet<DiscussionId>,
    done: bool,
}

impl<R: BufRead> DiscussionReader<R> {
    pub fn new(reader: R, options: ParseOptions) -> Self {
        Self {
            lines: reader.lines(),
            options,
            line_no: 0,
            pending: None,
            seen: HashSet::new(),
            done: false,
        }
    }

    fn next_record(&mut self) -> Result<Option<(usize, Claim)>, IngestError> {
        loop {
            let Some(line) = self.lines.next() else {
                return Ok(None);
            };
            let line = line?;
            self.line_no += 1;
            if line.trim().is_empty() {
                continue;
            }
            let value: Value =
                serde_json::from_str(&line).map_err(|e| IngestError::MalformedRecord {
                    line: self.line_no,
                    message: e.to_string(),
                })?;
            let Value::Object(map) = value else {
                return Err(IngestError::MalformedRecord {
                    line: self.line_no,
                    message: "expected a JSON object".into(),
                });
            };
            if map.contains_key("format") {
                check_header(&map, self.line_no)?;
                continue;
            }
            let claim = claim_from_record(&map, self.line_no, self.options)?;
            return Ok(Some((self.line_no, claim)));
        }
    }

    fn next_discussion(&mut self) -> Result<Option<Discussion>, IngestError> {
        let (start_line, first) = match self.pending.take() {
            Some(p) => p,
            None => match self.next_record()? {
                Some(r) => r,
                None => return Ok(None),
            },
        };
        let discussion_id = first.discussion_id().clone();
        if !self.seen.insert(discussion_id.clone()) {
            return Err(IngestError::NonContiguousDiscussion {
                line: start_line,
                discussion_id,
            });
        }
        let mut claims = vec![first];
        while let Some((line, claim)) = self.next_record()? {
            if claim.discussion_id() == &discussion_id {
                claims.push(claim);
            } else {
                self.pending = Some((line, claim));
                break;
            }
        }
        Discussion::build(claims)
            .map(Some)
            .map_err(|source| IngestError::InvalidDiscussion {
                line: start_line,
                source,
            })
    }
}

impl<R: BufRead> Iterator for DiscussionReader<R> {
    type Item = Result<Discussion, IngestError>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.done {
            return None;
        }
        match self.next_discussion() {
            Ok(Some(d)) => Some(Ok(d)),
            Ok(None) => {
                self.done = true;
                None
            }
            Err(e) => {
                self.done = true;
                Some(Err(e))
            }
        }
    }
}

fn check_header(map: &Map<String, Value>, line: usize) -> Result<(), IngestError> {
    if map.get("format").and_then(Value::as_str) != Some(CORPUS_FORMAT) {
        return Err(IngestError::MalformedRecord {
            line,
            message: format!("header must declare format {CORPUS_FORMAT:?}"),
        });
    }
    match map.get("version") {
        Some(Value::Number(n)) if n.as_u64() == Some(CORPUS_VERSION) => Ok(()),
        Some(v) => Err(IngestError::UnsupportedVersion {
            line,
            version: v.to_string(),
        }),
        None => Err(IngestError::MissingField {
            line,
            field: "version",
        }),
    }
}

fn string_field(
    map: &Map<String, Value>,
    field: &'static str,
    line: usize,
) -> Result<Option<String>, IngestError> {
    match map.get(field) {
        None | Some(Value::Null) => Ok(None),
        Some(Value::String(s)) => Ok(Some(s.clone())),
        Some(other) => Err(IngestError::MalformedRecord {
            line,
            message: format!("field {field:?} must be a string, got {other}"),
        }),
    }
}

fn required(
    map: &Map<String, Value>,
    field: &'static str,
    line: usize,
) -> Result<String, IngestError> {
    string_field(map, field, line)?.ok_or(IngestError::MissingField { line, field })
}

fn claim_from_record(
    map: &Map<String, Value>,
    line: usize,
    options: ParseOptions,
) -> Result<Claim, IngestError> {
    let claim_id = required(map, "claim_id", line)?;
    let discussion_id = required(map, "discussion_id", line)?;
    let author_id = match string_field(map, "author_id", line)? {
        Some(a) => a,
        None if options.synthesize_missing_authors => format!("anon:{claim_id}"),
        None => {
            return Err(IngestError::MissingField {
                line,
                field: "author_id",
            })
        }
    };
    if !map.contains_key("parent_id") {
        return Err(IngestError::MissingField {
            line,
            field: "parent_id",
        });
    }
    let parent_id = string_field(map, "parent_id", line)?.map(ClaimId::from);
    let text = required(map, "text", line)?;
    let label = required(map, "stance_label", line)?;
    let label = label
        .parse()
        .map_err(|message| IngestError::MalformedRecord { line, message })?;
    Claim::new(claim_id, discussion_id, author_id, parent_id, text, label).map_err(|e| {
        IngestError::MalformedRecord {
            line,
            message: e.to_string(),
        }
    })
}

/// Parses a whole corpus.
pub fn parse_corpus<R: BufRead>(input: R, options: ParseOptions) -> Result<Corpus, IngestError> {
    let discussions = DiscussionReader::new(input, options).collect::<Result<Vec<_>, _>>()?;
    Ok(Corpus::new(discussions)?)
}

/// Writes a corpus in the canonical format, header first, discussions and
/// claims in id order.
pub fn write_corpus<W: Write>(corpus: &Corpus, mut out: W) -> io::Result<()> {
    writeln!(
        out,
        "{}",
        serde_json::json!({"format": CORPUS_FORMAT, "version": CORPUS_VERSION})
    )?;
    for discussion in corpus.discussions() {
        for claim in discussion.claims() {
            let record = serde_json::json!({
                "claim_id": claim.claim_id(),
                "discussion_id": claim.discussion_id(),
                "author_id": claim.author_id(),
                "parent_id": claim.parent_id(),
                "text": claim.text(),
                "stance_label": claim.stance_label(),
            });
            writeln!(out, "{record}")?;
        }
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Split {
    Train,
    Validation,
    Test,
}

impl Split {
    pub const ALL: [Split; 3] = [Split::Train, Split::Validation, Split::Test];

    pub fn as_str(self) -> &'static str {
        match self {
            Split::Train => "train",
            Split::Validation => "validation",
            Split::Test => "test",
        }
    }
}

impl fmt::Display for Split {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Split {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "train" => Ok(Split::Train),
            "validation" | "val" => Ok(Split::Validation),
            "test" => Ok(Split::Test),
            other => Err(format!("unknown split {other:?}")),
        }
    }
}

/// Discussions binned by claim count into value-based quartiles.
///
/// Cut points are the nearest-rank 25th/50th/75th percentiles of the
/// per-discussion claim counts; a discussion with `n` claims falls into the
/// first bin whose cut point is `>= n`, or the last bin. Tied counts always
/// share a bin, so there may be fewer than four non-empty strata.
#[derive(Debug, Clone, PartialEq)]
pub struct Strata {
    pub cuts: [usize; 3],
    /// Non-empty bins in ascending size order; members sorted by id.
    pub bins: Vec<Vec<DiscussionId>>,
}

impl Strata {
    pub fn describe(&self) -> String {
        let [q1, q2, q3] = self.cuts;
        format!(
            "quartiles of claims per discussion (nearest rank): <={q1} | {q1}<n<={q2} | {q2}<n<={q3} | >{q3}"
        )
    }
}

pub fn quartile_strata(corpus: &Corpus) -> Strata {
    let mut sizes: Vec<usize> = corpus.discussions().map(Discussion::len).collect();
    sizes.sort_unstable();
    let n = sizes.len();
    let rank = |num: usize| sizes[((num * n).div_ceil(4)).max(1) - 1];
    let cuts = [rank(1), rank(2), rank(3)];
    let mut bins: [Vec<DiscussionId>; 4] = Default::default();
    for d in corpus.discussions() {
        let bin = cuts.iter().position(|&c| d.len() <= c).unwrap_or(3);
        bins[bin].push(d.id().clone());
    }
    Strata {
        cuts,
        bins: bins.into_iter().filter(|b| !b.is_empty()).collect(),
    }
}

/// Number of items a stratum contributes to a held-out split.
pub fn stratum_quota(fraction: f64, stratum_size: usize) -> usize {
    // f64::round rounds half away from zero
    (fraction * stratum_size as f64).round() as usize
}

#[derive(Debug, Clone, PartialEq)]
pub struct SplitAssignment {
    assignments: BTreeMap<DiscussionId, Split>,
    pub seed: u64,
    pub val_fraction: f64,
    pub test_fraction: f64,
    pub strata_spec: String,
}

impl SplitAssignment {
    pub fn get(&self, id: &DiscussionId) -> Option<Split> {
        self.assignments.get(id).copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&DiscussionId, Split)> {
        self.assignments.iter().map(|(d, s)| (d, *s))
    }

    pub fn len(&self) -> usize {
        self.assignments.len()
    }

    pub fn is_empty(&self) -> bool {
        self.assignments.is_empty()
    }

    pub fn count(&self, split: Split) -> usize {
        self.assignments.values().filter(|&&s| s == split).count()
    }

    /// Split of the discussion that holds `claim`.
    pub fn split_of_claim(&self, claim: &Claim) -> Option<Split> {
        self.get(claim.discussion_id())
    }

    /// Checks that every corpus discussion is assigned and nothing else is.
    pub fn covers(&self, corpus: &Corpus) -> Result<(), IngestError> {
        for d in corpus.discussions() {
            if !self.assignments.contains_key(d.id()) {
                return Err(IngestError::SplitFormat(format!(
                    "discussion {} has no split assignment",
                    d.id()
                )));
            }
        }
        if self.assignments.len() != corpus.discussion_count() {
            return Err(IngestError::SplitFormat(
                "split file names discussions that are not in the corpus".into(),
            ));
        }
        Ok(())
    }

    /// Tab-separated `discussion_id`/`split` table preceded by `#` metadata
    /// lines.
    pub fn write<W: Write>(&self, mut out: W) -> Result<(), IngestError> {
        writeln!(out, "# stancekit-split v1")?;
        writeln!(out, "# seed: {}", self.seed)?;
        writeln!(out, "# val_fraction: {}", self.val_fraction)?;
        writeln!(out, "# test_fraction: {}", self.test_fraction)?;
        writeln!(out, "# strata: {}", self.strata_spec)?;
        let mut writer = csv::WriterBuilder::new().delimiter(b'\t').from_writer(out);
        writer
            .write_record(["discussion_id", "split"])
            .map_err(csv_err)?;
        for (id, split) in &self.assignments {
            writer
                .write_record([id.as_str(), split.as_str()])
                .map_err(csv_err)?;
        }
        writer.flush()?;
        Ok(())
    }

    pub fn read<R: BufRead>(mut input: R) -> Result<Self, IngestError> {
        let mut meta = BTreeMap::new();
        let mut header_line = String::new();
        loop {
            header_line.clear();
            if input.read_line(&mut header_line)? == 0 {
                return Err(IngestError::SplitFormat("missing table header".into()));
            }
            let Some(rest) = header_line.strip_prefix('#') else {
                break;
            };
            if let Some((k, v)) = rest.trim().split_once(':') {
                meta.insert(k.trim().to_owned(), v.trim().to_owned());
            }
        }
        if header_line.trim_end() != "discussion_id\tsplit" {
            return Err(IngestError::SplitFormat(format!(
                "expected header \"discussion_id<TAB>split\", got {:?}",
                header_line.trim_end()
            )));
        }
        let meta_num = |key: &str| -> Result<f64, IngestError> {
            meta.get(key)
                .ok_or_else(|| IngestError::SplitFormat(format!("missing metadata {key:?}")))?
                .parse()
                .map_err(|e| IngestError::SplitFormat(format!("metadata {key:?}: {e}")))
        };
        let seed = meta
            .get("seed")
            .ok_or_else(|| IngestError::SplitFormat("missing metadata \"seed\"".into()))?
            .parse()
            .map_err(|e| IngestError::SplitFormat(format!("metadata \"seed\": {e}")))?;
        let val_fraction = meta_num("val_fraction")?;
        let test_fraction = meta_num("test_fraction")?;
        let strata_spec = meta.get("strata").cloned().unwrap_or_default();

        let mut reader = csv::ReaderBuilder::new()
            .delimiter(b'\t')
            .has_headers(false)
            .from_reader(input);
        let mut assignments = BTreeMap::new();
        for (i, record) in reader.records().enumerate() {
            let record = record.map_err(csv_err)?;
            if record.len() != 2 {
                return Err(IngestError::SplitFormat(format!(
                    "row {}: expected 2 columns",
                    i + 1
                )));
            }
            let split = record[1].parse().map_err(IngestError::SplitFormat)?;
            let id = DiscussionId::from(&record[0]);
            if assignments.insert(id.clone(), split).is_some() {
                return Err(IngestError::SplitFormat(format!(
                    "discussion {id} assigned twice"
                )));
            }
        }
        Ok(Self {
            assignments,
            seed,
            val_fraction,
            test_fraction,
            strata_spec,
        })
    }
}

fn csv_err(e: csv::Error) -> IngestError {
    IngestError::SplitFormat(e.to_string())
}

/// Stratified discussion-level split.
///
/// Within each quartile stratum the test and validation quotas are
/// `round(fraction * stratum_size)`; the rest goes to train. Each stratum's
/// members (sorted by id) are shuffled with a ChaCha8 generator seeded via
/// `seed_from_u64(seed)`, strata visited in ascending order and sharing one
/// generator; the first test-quota members become test, the next
/// validation-quota members validation.
pub fn stratified_split(
    corpus: &Corpus,
    val_fraction: f64,
    test_fraction: f64,
    seed: u64,
) -> Result<SplitAssignment, IngestError> {
    let valid = |f: f64| f.is_finite() && f >= 0.0;
    if !valid(val_fraction) || !valid(test_fraction) || val_fraction + test_fraction >= 1.0 {
        return Err(IngestError::FractionOutOfRange {
            val: val_fraction,
            test: test_fraction,
        });
    }
    let strata = quartile_strata(corpus);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut assignments = BTreeMap::new();
    for bin in &strata.bins {
        let mut members = bin.clone();
        members.shuffle(&mut rng);
        let n_test = stratum_quota(test_fraction, members.len()).min(members.len());
        let n_val = stratum_quota(val_fraction, members.len()).min(members.len() - n_test);
        for (i, id) in members.into_iter().enumerate() {
            let split = if i < n_test {
                Split::Test
            } else if i < n_test + n_val {
                Split::Validation
            } else {
                Split::Train
            };
            assignments.insert(id, split);
        }
    }
    Ok(SplitAssignment {
        assignments,
        seed,
        val_fraction,
        test_fraction,
        strata_spec: strata.describe(),
    })
}

/// Claims per split grouped by the author's explicit persona size.
///
/// Columns are persona sizes `0, 1, .., threshold-1` followed by one
/// `>= threshold` column. The persona size of a claim is the number of other
/// train-split claims by the same author; the claim itself never counts.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BucketTable {
    pub threshold: usize,
    pub rows: BTreeMap<Split, Vec<usize>>,
}

impl BucketTable {
    pub fn row_total(&self, split: Split) -> usize {
        self.rows.get(&split).map_or(0, |r| r.iter().sum())
    }

    pub fn render(&self) -> String {
        let t = self.threshold;
        let mut headers: Vec<String> = (0..t).map(|i| format!("#={i}")).collect();
        headers.push(format!("#>={t}"));
        headers.push("#TOTAL".into());
        let mut out = format!("{:<12}", "");
        for h in &headers {
            out.push_str(&format!("{h:>10}"));
        }
        out.push('\n');
        for (split, row) in &self.rows {
            out.push_str(&format!("{:<12}", split.as_str()));
            for v in row {
                out.push_str(&format!("{v:>10}"));
            }
            out.push_str(&format!("{:>10}\n", row.iter().sum::<usize>()));
        }
        out
    }
}

pub fn bucket_table(corpus: &Corpus, split: &SplitAssignment, threshold: usize) -> BucketTable {
    let threshold = threshold.max(1);
    let mut train_counts: BTreeMap<&crate::corpus::AuthorId, usize> = BTreeMap::new();
    for d in corpus.discussions() {
        if split.get(d.id()) == Some(Split::Train) {
            for c in d.claims() {
                *train_counts.entry(c.author_id()).or_default() += 1;
            }
        }
    }
    let mut rows: BTreeMap<Split, Vec<usize>> = Split::ALL
        .iter()
        .map(|&s| (s, vec![0; threshold + 1]))
        .collect();
    for d in corpus.discussions() {
        let Some(s) = split.get(d.id()) else { continue };
        for c in d.claims() {
            let mut size = train_counts.get(c.author_id()).copied().unwrap_or(0);
            if s == Split::Train {
                size -= 1;
            }
            rows.get_mut(&s).expect("all splits present")[size.min(threshold)] += 1;
        }
    }
    BucketTable { threshold, rows }
}

#[cfg(test)]
mod tests {
    use super::*;

    const CHAIN: &str = r#"{"claim_id":"t","discussion_id":"d1","author_id":"a","parent_id":null,"text":"Thesis","stance_label":"thesis"}
{"claim_id":"c1","discussion_id":"d1","author_id":"b","parent_id":"t","text":"Child","stance_label":"pro"}
{"claim_id":"c2","discussion_id":"d1","author_id":"a","parent_id":"c1","text":"Grandchild","stance_label":"con"}
"#;

    fn parse(s: &str) -> Result<Corpus, IngestError> {
        parse_corpus(s.as_bytes(), ParseOptions::default())
    }

    #[test]
    fn parses_three_line_chain() {
        let corpus = parse(CHAIN).unwrap();
        assert_eq!(corpus.discussion_count(), 1);
        assert_eq!(corpus.claim_count(), 3);
    }

    #[test]
    fn empty_stream() {
        let err = parse("").unwrap_err();
        assert!(matches!(err, IngestError::Corpus(CorpusError::EmptyCorpus)));
        let err = parse("\n\n").unwrap_err();
        assert!(matches!(err, IngestError::Corpus(CorpusError::EmptyCorpus)));
    }

    #[test]
    fn missing_stance_label() {
        let err = parse(
            r#"{"claim_id":"t","discussion_id":"d","author_id":"a","parent_id":null,"text":"x"}"#,
        )
        .unwrap_err();
        assert!(matches!(
            err,
            IngestError::MissingField {
                line: 1,
                field: "stance_label"
            }
        ));
    }

    #[test]
    fn missing_author_rejected_or_synthesized() {
        let rec = r#"{"claim_id":"t","discussion_id":"d","parent_id":null,"text":"x","stance_label":"thesis"}"#;
        assert!(matches!(
            parse(rec).unwrap_err(),
            IngestError::MissingField {
                field: "author_id",
                ..
            }
        ));
        let corpus = parse_corpus(
            rec.as_bytes(),
            ParseOptions {
                synthesize_missing_authors: true,
            },
        )
        .unwrap();
        assert_eq!(corpus.authors().next().unwrap().as_str(), "anon:t");
    }

    #[test]
    fn header_and_bad_lines() {
        let with_header = format!("{{\"format\":\"stancekit-corpus\",\"version\":1}}\n{CHAIN}");
        assert_eq!(parse(&with_header).unwrap().claim_count(), 3);

        let bad_version = format!("{{\"format\":\"stancekit-corpus\",\"version\":9}}\n{CHAIN}");
        assert!(matches!(
            parse(&bad_version).unwrap_err(),
            IngestError::UnsupportedVersion { line: 1, .. }
        ));

        let garbage = format!("{CHAIN}not json\n");
        assert!(matches!(
            parse(&garbage).unwrap_err(),
            IngestError::MalformedRecord { line: 4, .. }
        ));

        let label = CHAIN.replace("\"con\"", "\"maybe\"");
        assert!(matches!(
            parse(&label).unwrap_err(),
            IngestError::MalformedRecord { line: 3, .. }
        ));

        // thesis label on a claim that has a parent
        let mismatch = CHAIN.replace("\"pro\"", "\"thesis\"");
        assert!(matches!(
            parse(&mismatch).unwrap_err(),
            IngestError::MalformedRecord { line: 2, .. }
        ));
    }

    #[test]
    fn tree_errors_carry_line() {
        let dangling = CHAIN.replace("\"parent_id\":\"c1\"", "\"parent_id\":\"zz\"");
        let err = parse(&dangling).unwrap_err();
        assert!(matches!(
            err.corpus_error(),
            Some(CorpusError::DanglingParent { .. })
        ));
        assert!(err.to_string().contains("line 1"));
    }

    #[test]
    fn non_contiguous_discussions_rejected() {
        let lines: Vec<&str> = CHAIN.lines().collect();
        let other = r#"{"claim_id":"x","discussion_id":"d2","author_id":"a","parent_id":null,"text":"T2","stance_label":"thesis"}"#;
        let input = format!("{}\n{}\n{}\n{}\n", lines[0], other, lines[1], lines[2]);
        assert!(matches!(
            parse(&input).unwrap_err(),
            IngestError::NonContiguousDiscussion { line: 3, .. }
        ));
    }

    #[test]
    fn write_then_parse_roundtrip() {
        let corpus = parse(CHAIN).unwrap();
        let mut buf = Vec::new();
        write_corpus(&corpus, &mut buf).unwrap();
        let again = parse_corpus(buf.as_slice(), ParseOptions::default()).unwrap();
        let mut buf2 = Vec::new();
        write_corpus(&again, &mut buf2).unwrap();
        assert_eq!(buf, buf2);
    }

    fn uniform_corpus(n: usize, size: usize) -> Corpus {
        let discussions = (0..n).map(|i| {
            let d = format!("d{i:04}");
            let mut claims = vec![Claim::new(
                format!("{d}-0"),
                d.as_str(),
                "a",
                None,
                "t",
                crate::corpus::StanceLabel::Thesis,
            )
            .unwrap()];
            for j in 1..size {
                claims.push(
                    Claim::new(
                        format!("{d}-{j}"),
                        d.as_str(),
                        format!("a{j}"),
                        Some(ClaimId::new(format!("{d}-0"))),
                        "c",
                        crate::corpus::StanceLabel::Pro,
                    )
                    .unwrap(),
                );
            }
            Discussion::build(claims).unwrap()
        });
        Corpus::new(discussions).unwrap()
    }

    #[test]
    fn twenty_uniform_discussions() {
        let corpus = uniform_corpus(20, 3);
        let split = stratified_split(&corpus, 0.05, 0.05, 1).unwrap();
        assert_eq!(split.count(Split::Validation), 1);
        assert_eq!(split.count(Split::Test), 1);
        assert_eq!(split.count(Split::Train), 18);
    }

    #[test]
    fn split_is_deterministic() {
        let corpus = uniform_corpus(60, 2);
        let a = stratified_split(&corpus, 0.1, 0.2, 42).unwrap();
        let b = stratified_split(&corpus, 0.1, 0.2, 42).unwrap();
        assert_eq!(a, b);
        let c = stratified_split(&corpus, 0.1, 0.2, 43).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn fraction_bounds() {
        let corpus = uniform_corpus(4, 1);
        for (v, t) in [(0.5, 0.5), (-0.1, 0.1), (f64::NAN, 0.0), (0.9, 0.2)] {
            assert!(matches!(
                stratified_split(&corpus, v, t, 0),
                Err(IngestError::FractionOutOfRange { .. })
            ));
        }
        let all_train = stratified_split(&corpus, 0.0, 0.0, 0).unwrap();
        assert_eq!(all_train.count(Split::Train), 4);
    }

    #[test]
    fn split_file_roundtrip() {
        let corpus = uniform_corpus(30, 2);
        let split = stratified_split(&corpus, 0.1, 0.1, 9).unwrap();
        let mut buf = Vec::new();
        split.write(&mut buf).unwrap();
        let back = SplitAssignment::read(buf.as_slice()).unwrap();
        assert_eq!(back, split);
        back.covers(&corpus).unwrap();
    }

    #[test]
    fn strata_collapse_ties() {
        let corpus = uniform_corpus(8, 2);
        let strata = quartile_strata(&corpus);
        assert_eq!(strata.bins.len(), 1);
        assert_eq!(strata.cuts, [2, 2, 2]);
    }

    #[test]
    fn one_author_fills_one_column() {
        let corpus = parse(&CHAIN.replace("\"author_id\":\"b\"", "\"author_id\":\"a\"")).unwrap();
        let split = stratified_split(&corpus, 0.0, 0.0, 0).unwrap();
        let table = bucket_table(&corpus, &split, 5);
        assert_eq!(table.rows[&Split::Train], vec![0, 0, 3, 0, 0, 0]);
        assert_eq!(table.row_total(Split::Train), 3);
        assert_eq!(table.row_total(Split::Test), 0);
    }
}
