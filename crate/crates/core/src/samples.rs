//! Persona-conditioned text-to-text samples and their JSON Lines exports.
//!
//! A sample's source is the serialized persona, `" [SEP] "`, then the parent
//! claim; with no persona it is the parent claim alone. The target is the
//! child claim (generation) or its `pro`/`con` label toward the parent
//! (classification).

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::io::{self, BufRead, Write};
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::{AuthorId, Claim, ClaimId, Corpus, DiscussionId, Stance, StanceLabel};
use crate::ingest::{Split, SplitAssignment};
use crate::metrics::EvalPair;
use crate::persona::{
    bucket_of, explicit_pool, implicit_persona, select_dynamic, select_negative, select_random,
    thesis_orientation, ImplicitPersona, PersonaBucket, PersonaError, SelectionStrategy, SEP,
};

pub const SAMPLES_FORMAT: &str = "stancekit-samples";
pub const SAMPLES_VERSION: u64 = 1;

#[derive(Debug, Error)]
pub enum SampleError {
    #[error("claim {child} is not a child of claim {parent}")]
    NotAChild { parent: ClaimId, child: ClaimId },
    #[error("claim {0} is a thesis and has no stance label to predict")]
    ThesisHasNoStance(ClaimId),
    #[error("configuration conflict: {0}")]
    ConfigConflict(String),
    #[error(transparent)]
    Persona(#[from] PersonaError),
    #[error("line {line}: {message}")]
    Format { line: usize, message: String },
    #[error("{0}")]
    Pairing(String),
    #[error(transparent)]
    Io(#[from] io::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Task {
    Generation,
    Classification,
}

impl FromStr for Task {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "generation" => Ok(Task::Generation),
            "classification" => Ok(Task::Classification),
            other => Err(format!("unknown task {other:?}")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GenerationSample {
    pub source: String,
    pub target: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassificationSample {
    pub source: String,
    pub target: Stance,
}

fn compose_source(persona_text: &str, parent: &Claim) -> String {
    if persona_text.is_empty() {
        parent.text().to_owned()
    } else {
        format!("{persona_text}{SEP}{}", parent.text())
    }
}

fn check_child(parent: &Claim, child: &Claim) -> Result<(), SampleError> {
    if child.parent_id() != Some(parent.claim_id()) {
        return Err(SampleError::NotAChild {
            parent: parent.claim_id().clone(),
            child: child.claim_id().clone(),
        });
    }
    Ok(())
}

pub fn make_generation_sample(
    parent: &Claim,
    persona_text: &str,
    child: &Claim,
) -> Result<GenerationSample, SampleError> {
    check_child(parent, child)?;
    Ok(GenerationSample {
        source: compose_source(persona_text, parent),
        target: child.text().to_owned(),
    })
}

/// The target is the child's label toward its parent, not toward the thesis.
pub fn make_classification_sample(
    parent: &Claim,
    persona_text: &str,
    child: &Claim,
) -> Result<ClassificationSample, SampleError> {
    let target = child
        .stance_label()
        .stance()
        .ok_or_else(|| SampleError::ThesisHasNoStance(child.claim_id().clone()))?;
    check_child(parent, child)?;
    Ok(ClassificationSample {
        source: compose_source(persona_text, parent),
        target,
    })
}

/// Which persona feeds the source of each sample.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PersonaKind {
    None,
    Random,
    Dynamic,
    Negative,
    Implicit,
}

impl PersonaKind {
    pub fn as_str(self) -> &'static str {
        match self {
            PersonaKind::None => "none",
            PersonaKind::Random => "random",
            PersonaKind::Dynamic => "dynamic",
            PersonaKind::Negative => "negative",
            PersonaKind::Implicit => "implicit",
        }
    }
}

impl From<SelectionStrategy> for PersonaKind {
    fn from(s: SelectionStrategy) -> Self {
        match s {
            SelectionStrategy::Random => PersonaKind::Random,
            SelectionStrategy::Dynamic => PersonaKind::Dynamic,
            SelectionStrategy::Negative => PersonaKind::Negative,
        }
    }
}

impl fmt::Display for PersonaKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// The `--persona` flag.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Representation {
    None,
    Explicit,
    Implicit,
}

impl FromStr for Representation {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "none" => Ok(Self::None),
            "explicit" => Ok(Self::Explicit),
            "implicit" => Ok(Self::Implicit),
            other => Err(format!("unknown persona representation {other:?}")),
        }
    }
}

/// The `--strategy` flag. `Hybrid` selects randomly for train exports and
/// dynamically for validation/test exports.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StrategyChoice {
    Fixed(SelectionStrategy),
    Hybrid,
}

impl FromStr for StrategyChoice {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "hybrid" => Ok(Self::Hybrid),
            other => other.parse().map(Self::Fixed),
        }
    }
}

impl StrategyChoice {
    pub fn for_split(self, split: Split) -> SelectionStrategy {
        match (self, split) {
            (StrategyChoice::Fixed(s), _) => s,
            (StrategyChoice::Hybrid, Split::Train) => SelectionStrategy::Random,
            (StrategyChoice::Hybrid, _) => SelectionStrategy::Dynamic,
        }
    }
}

/// Resolves the persona flags for one exported split.
pub fn resolve_persona(
    representation: Representation,
    strategy: Option<StrategyChoice>,
    split: Split,
) -> Result<PersonaKind, SampleError> {
    match (representation, strategy) {
        (Representation::None, None) => Ok(PersonaKind::None),
        (Representation::Implicit, None) => Ok(PersonaKind::Implicit),
        (Representation::Explicit, Some(choice)) => Ok(choice.for_split(split).into()),
        (Representation::Explicit, None) => Err(SampleError::ConfigConflict(
            "an explicit persona needs a selection strategy".into(),
        )),
        (Representation::None | Representation::Implicit, Some(_)) => {
            Err(SampleError::ConfigConflict(
                "selection strategies only apply to explicit personas".into(),
            ))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExportConfig {
    pub task: Task,
    pub persona: PersonaKind,
    pub cap: usize,
    pub threshold: usize,
    pub seed: u64,
    pub split: Split,
}

impl ExportConfig {
    pub fn new(task: Task, persona: PersonaKind, split: Split) -> Self {
        Self {
            task,
            persona,
            cap: crate::persona::DEFAULT_CAP,
            threshold: crate::persona::DEFAULT_THRESHOLD,
            seed: 0,
            split,
        }
    }

    pub fn validate(&self) -> Result<(), SampleError> {
        if self.cap == 0 {
            return Err(SampleError::ConfigConflict("cap must be at least 1".into()));
        }
        if self.threshold == 0 {
            return Err(SampleError::ConfigConflict(
                "bucket threshold must be at least 1".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleMetadata {
    pub claim_id: ClaimId,
    pub parent_id: ClaimId,
    pub discussion_id: DiscussionId,
    pub author_id: AuthorId,
    pub split: Split,
    pub persona: PersonaKind,
    pub persona_bucket: PersonaBucket,
    /// Train claims by the author other than this one.
    pub persona_size: usize,
    pub stance_label: StanceLabel,
    /// Stance of the child claim toward the thesis.
    pub thesis_stance: Stance,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleRecord {
    pub source: String,
    pub target: String,
    pub metadata: SampleMetadata,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExportHeader {
    pub format: String,
    pub version: u64,
    pub task: Task,
    pub persona: PersonaKind,
    pub split: Split,
    pub cap: usize,
    pub threshold: usize,
    pub seed: u64,
}

impl ExportHeader {
    pub fn for_config(config: &ExportConfig) -> Self {
        Self {
            format: SAMPLES_FORMAT.into(),
            version: SAMPLES_VERSION,
            task: config.task,
            persona: config.persona,
            split: config.split,
            cap: config.cap,
            threshold: config.threshold,
            seed: config.seed,
        }
    }
}

/// Seed of the random persona drawn for `claim_id` under export seed `seed`.
pub fn claim_seed(seed: u64, claim_id: &ClaimId) -> u64 {
    seed ^ crate::stable_hash(claim_id.as_str().as_bytes())
}

/// One record per non-thesis claim of the configured split, ordered by
/// discussion id then claim id. The persona for a claim never includes the
/// claim itself.
pub fn export_dataset(
    corpus: &Corpus,
    split: &SplitAssignment,
    config: &ExportConfig,
) -> Result<Vec<SampleRecord>, SampleError> {
    config.validate()?;
    split
        .covers(corpus)
        .map_err(|e| SampleError::ConfigConflict(e.to_string()))?;
    let mut pools: HashMap<&AuthorId, Vec<&Claim>> = HashMap::new();
    let mut implicit: HashMap<&AuthorId, ImplicitPersona> = HashMap::new();
    let mut records = Vec::new();
    for discussion in corpus.discussions() {
        if split.get(discussion.id()) != Some(config.split) {
            continue;
        }
        for child in discussion.claims() {
            let Some(parent) = discussion.parent_of(child) else {
                continue;
            };
            let author = child.author_id();
            if !pools.contains_key(author) {
                pools.insert(author, explicit_pool(corpus, split, author)?);
            }
            let pool: Vec<&Claim> = pools[author]
                .iter()
                .copied()
                .filter(|c| c.claim_id() != child.claim_id())
                .collect();
            let cap = config.cap;
            let persona_text = match config.persona {
                PersonaKind::None => String::new(),
                PersonaKind::Random => select_random(
                    author,
                    &pool,
                    cap,
                    claim_seed(config.seed, child.claim_id()),
                )?
                .serialize(),
                PersonaKind::Dynamic => {
                    select_dynamic(author, &pool, parent.text(), cap)?.serialize()
                }
                PersonaKind::Negative => {
                    select_negative(author, &pool, parent.text(), cap)?.serialize()
                }
                PersonaKind::Implicit => {
                    if !implicit.contains_key(author) {
                        implicit.insert(author, implicit_persona(corpus, split, author)?);
                    }
                    let full = &implicit[author];
                    if config.split == Split::Train {
                        full.without_claim(discussion.id(), thesis_orientation(discussion, child))
                            .serialize()
                    } else {
                        full.serialize()
                    }
                }
            };
            let (source, target) = match config.task {
                Task::Generation => {
                    let s = make_generation_sample(parent, &persona_text, child)?;
                    (s.source, s.target)
                }
                Task::Classification => {
                    let s = make_classification_sample(parent, &persona_text, child)?;
                    (s.source, s.target.as_str().to_owned())
                }
            };
            records.push(SampleRecord {
                source,
                target,
                metadata: SampleMetadata {
                    claim_id: child.claim_id().clone(),
                    parent_id: parent.claim_id().clone(),
                    discussion_id: discussion.id().clone(),
                    author_id: author.clone(),
                    split: config.split,
                    persona: config.persona,
                    persona_bucket: bucket_of(pool.len(), config.threshold),
                    persona_size: pool.len(),
                    stance_label: child.stance_label(),
                    thesis_stance: thesis_orientation(discussion, child),
                },
            });
        }
    }
    Ok(records)
}

/// Writes the header line followed by one record per line.
pub fn write_samples<W: Write>(
    header: &ExportHeader,
    records: &[SampleRecord],
    mut out: W,
) -> Result<(), SampleError> {
    writeln!(
        out,
        "{}",
        serde_json::to_string(header).map_err(io::Error::from)?
    )?;
    for r in records {
        writeln!(
            out,
            "{}",
            serde_json::to_string(r).map_err(io::Error::from)?
        )?;
    }
    out.flush()?;
    Ok(())
}

fn json_line<T: for<'de> Deserialize<'de>>(line: &str, no: usize) -> Result<T, SampleError> {
    serde_json::from_str(line).map_err(|e| SampleError::Format {
        line: no,
        message: e.to_string(),
    })
}

pub fn read_samples<R: BufRead>(
    input: R,
) -> Result<(ExportHeader, Vec<SampleRecord>), SampleError> {
    let mut header = None;
    let mut records = Vec::new();
    for (i, line) in input.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        if header.is_none() {
            let h: ExportHeader = json_line(&line, i + 1)?;
            if h.format != SAMPLES_FORMAT || h.version != SAMPLES_VERSION {
                return Err(SampleError::Format {
                    line: i + 1,
                    message: format!("expected {SAMPLES_FORMAT} v{SAMPLES_VERSION} header"),
                });
            }
            header = Some(h);
        } else {
            records.push(json_line(&line, i + 1)?);
        }
    }
    let header = header.ok_or(SampleError::Format {
        line: 0,
        message: "missing export header".into(),
    })?;
    Ok((header, records))
}

/// One generated text, keyed by the claim whose parent it answers.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GenerationRecord {
    pub claim_id: ClaimId,
    pub text: String,
}

pub fn write_generations<W: Write>(
    records: &[GenerationRecord],
    mut out: W,
) -> Result<(), SampleError> {
    for r in records {
        writeln!(
            out,
            "{}",
            serde_json::to_string(r).map_err(io::Error::from)?
        )?;
    }
    out.flush()?;
    Ok(())
}

pub fn read_generations<R: BufRead>(input: R) -> Result<Vec<GenerationRecord>, SampleError> {
    let mut out = Vec::new();
    for (i, line) in input.lines().enumerate() {
        let line = line?;
        if !line.trim().is_empty() {
            out.push(json_line(&line, i + 1)?);
        }
    }
    Ok(out)
}

/// Joins generations to exported samples by claim id. Every sample needs
/// exactly one generation and every generation a sample.
pub fn pair_for_evaluation(
    samples: &[SampleRecord],
    generations: &[GenerationRecord],
) -> Result<Vec<EvalPair>, SampleError> {
    let mut by_claim: BTreeMap<&ClaimId, &str> = BTreeMap::new();
    for g in generations {
        if by_claim.insert(&g.claim_id, &g.text).is_some() {
            return Err(SampleError::Pairing(format!(
                "claim {} has more than one generation",
                g.claim_id
            )));
        }
    }
    let mut pairs = Vec::with_capacity(samples.len());
    for s in samples {
        let hyp = by_claim.remove(&s.metadata.claim_id).ok_or_else(|| {
            SampleError::Pairing(format!("no generation for claim {}", s.metadata.claim_id))
        })?;
        pairs.push(EvalPair {
            source: s.source.clone(),
            hypothesis: hyp.to_owned(),
            reference: s.target.clone(),
        });
    }
    if let Some(extra) = by_claim.keys().next() {
        return Err(SampleError::Pairing(format!(
            "generation for claim {extra} matches no exported sample"
        )));
    }
    Ok(pairs)
}
