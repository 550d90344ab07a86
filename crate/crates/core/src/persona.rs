//! Stance-based personas built from an author's training claims.
//!
//! An explicit persona is a handful of the author's own claims, picked at
//! random or by BM25 similarity to the parent claim being answered. An
//! implicit persona summarizes, per discussion, how many of the author's
//! claims support or oppose the thesis.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bm25::{Bm25Index, Bm25Params};
use crate::corpus::{AuthorId, Claim, ClaimId, Corpus, Discussion, DiscussionId, Stance};
use crate::ingest::{Split, SplitAssignment};
use crate::metrics::tokenize;

pub const DEFAULT_CAP: usize = 5;
pub const DEFAULT_THRESHOLD: usize = 5;
pub const SEP: &str = " [SEP] ";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PersonaError {
    #[error("unknown author {0}")]
    UnknownAuthor(AuthorId),
    #[error("unknown claim {0}")]
    UnknownClaim(ClaimId),
    #[error("claim {0} is the thesis and has no stance toward it")]
    IsThesis(ClaimId),
    #[error("persona cap must be at least 1")]
    InvalidCap,
    #[error("malformed implicit persona entry: {0:?}")]
    MalformedImplicit(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SelectionStrategy {
    Random,
    Dynamic,
    Negative,
}

impl SelectionStrategy {
    pub fn as_str(self) -> &'static str {
        match self {
            SelectionStrategy::Random => "random",
            SelectionStrategy::Dynamic => "dynamic",
            SelectionStrategy::Negative => "negative",
        }
    }
}

impl fmt::Display for SelectionStrategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SelectionStrategy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "random" => Ok(Self::Random),
            "dynamic" => Ok(Self::Dynamic),
            "negative" => Ok(Self::Negative),
            other => Err(format!("unknown selection strategy {other:?}")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PersonaClaim {
    pub claim_id: ClaimId,
    pub text: String,
}

impl From<&Claim> for PersonaClaim {
    fn from(c: &Claim) -> Self {
        Self {
            claim_id: c.claim_id().clone(),
            text: c.text().to_owned(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ExplicitPersona {
    pub author_id: AuthorId,
    pub selected_claims: Vec<PersonaClaim>,
    pub strategy: SelectionStrategy,
    pub cap: usize,
}

impl ExplicitPersona {
    pub fn len(&self) -> usize {
        self.selected_claims.len()
    }

    pub fn is_empty(&self) -> bool {
        self.selected_claims.is_empty()
    }

    /// Claim texts joined by `" [SEP] "`; empty for an empty persona.
    pub fn serialize(&self) -> String {
        self.selected_claims
            .iter()
            .map(|c| c.text.as_str())
            .collect::<Vec<_>>()
            .join(SEP)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ThesisStanceSummary {
    pub discussion_id: DiscussionId,
    pub thesis_text: String,
    pub pro_count: usize,
    pub con_count: usize,
}

impl ThesisStanceSummary {
    pub fn render(&self) -> String {
        format!(
            "pro: {} - con: {} - text: {}",
            self.pro_count, self.con_count, self.thesis_text
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ImplicitPersona {
    pub author_id: AuthorId,
    pub entries: Vec<ThesisStanceSummary>,
}

impl ImplicitPersona {
    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// `pro: {n} - con: {m} - text: {thesis}` entries joined by `" [SEP] "`.
    pub fn serialize(&self) -> String {
        self.entries
            .iter()
            .map(ThesisStanceSummary::render)
            .collect::<Vec<_>>()
            .join(SEP)
    }

    pub fn entry_for(&self, discussion: &DiscussionId) -> Option<&ThesisStanceSummary> {
        self.entries.iter().find(|e| &e.discussion_id == discussion)
    }

    /// The persona minus one pool claim from `discussion` whose stance toward
    /// the thesis is `stance`. An entry left at zero counts is dropped.
    pub fn without_claim(&self, discussion: &DiscussionId, stance: Stance) -> ImplicitPersona {
        let mut out = self.clone();
        if let Some(pos) = out
            .entries
            .iter()
            .position(|e| &e.discussion_id == discussion)
        {
            let e = &mut out.entries[pos];
            match stance {
                Stance::Pro => e.pro_count = e.pro_count.saturating_sub(1),
                Stance::Con => e.con_count = e.con_count.saturating_sub(1),
            }
            if e.pro_count + e.con_count == 0 {
                out.entries.remove(pos);
            }
        }
        out
    }
}

pub fn serialize_explicit(p: &ExplicitPersona) -> String {
    p.serialize()
}

pub fn serialize_implicit(p: &ImplicitPersona) -> String {
    p.serialize()
}

/// Parses a serialized implicit persona back into `(pro, con, thesis)`
/// triples. Entries are delimited by `" [SEP] "` only where the next entry
/// header (`pro: N - con: M - text: `) follows.
pub fn parse_implicit(s: &str) -> Result<Vec<(usize, usize, String)>, PersonaError> {
    if s.is_empty() {
        return Ok(Vec::new());
    }
    let mut entries = Vec::new();
    let mut rest = s;
    loop {
        let (pro, con, body) = parse_entry_header(rest)
            .ok_or_else(|| PersonaError::MalformedImplicit(rest.chars().take(40).collect()))?;
        let mut cut = None;
        let mut search_from = 0;
        while let Some(off) = body[search_from..].find(SEP) {
            let at = search_from + off;
            if parse_entry_header(&body[at + SEP.len()..]).is_some() {
                cut = Some(at);
                break;
            }
            search_from = at + 1;
        }
        match cut {
            Some(at) => {
                entries.push((pro, con, body[..at].to_owned()));
                rest = &body[at + SEP.len()..];
            }
            None => {
                entries.push((pro, con, body.to_owned()));
                return Ok(entries);
            }
        }
    }
}

fn parse_entry_header(s: &str) -> Option<(usize, usize, &str)> {
    let s = s.strip_prefix("pro: ")?;
    let digits = s.find(|c: char| !c.is_ascii_digit())?;
    let pro = s[..digits].parse().ok()?;
    let s = s[digits..].strip_prefix(" - con: ")?;
    let digits = s.find(|c: char| !c.is_ascii_digit())?;
    let con = s[..digits].parse().ok()?;
    let body = s[digits..].strip_prefix(" - text: ")?;
    Some((pro, con, body))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PersonaBucket {
    NoPersona,
    SmallPersona,
    BigPersona,
}

impl PersonaBucket {
    pub fn as_str(self) -> &'static str {
        match self {
            PersonaBucket::NoPersona => "no_persona",
            PersonaBucket::SmallPersona => "small_persona",
            PersonaBucket::BigPersona => "big_persona",
        }
    }
}

/// `0` is no persona, `1..threshold` small, `threshold..` big.
pub fn bucket_of(pool_size: usize, threshold: usize) -> PersonaBucket {
    match pool_size {
        0 => PersonaBucket::NoPersona,
        n if n < threshold.max(1) => PersonaBucket::SmallPersona,
        _ => PersonaBucket::BigPersona,
    }
}

/// The author's claims that lie in train-split discussions, by claim id.
pub fn explicit_pool<'c>(
    corpus: &'c Corpus,
    split: &SplitAssignment,
    author: &AuthorId,
) -> Result<Vec<&'c Claim>, PersonaError> {
    let ids = corpus
        .claims_by(author)
        .ok_or_else(|| PersonaError::UnknownAuthor(author.clone()))?;
    Ok(ids
        .iter()
        .filter_map(|id| corpus.claim(id))
        .filter(|c| split.split_of_claim(c) == Some(Split::Train))
        .collect())
}

fn check_cap(cap: usize) -> Result<(), PersonaError> {
    if cap == 0 {
        Err(PersonaError::InvalidCap)
    } else {
        Ok(())
    }
}

/// Uniform sample of `cap` claims without replacement, kept in sampling
/// order. Pools no larger than `cap` are taken whole, in pool order.
pub fn select_random(
    author: &AuthorId,
    pool: &[&Claim],
    cap: usize,
    seed: u64,
) -> Result<ExplicitPersona, PersonaError> {
    check_cap(cap)?;
    let selected_claims = if pool.len() <= cap {
        pool.iter().map(|&c| c.into()).collect()
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rand::seq::index::sample(&mut rng, pool.len(), cap)
            .into_iter()
            .map(|i| pool[i].into())
            .collect()
    };
    Ok(ExplicitPersona {
        author_id: author.clone(),
        selected_claims,
        strategy: SelectionStrategy::Random,
        cap,
    })
}

/// The `cap` pool claims most similar to `parent_text` under BM25, best
/// first, ties by claim id.
pub fn select_dynamic(
    author: &AuthorId,
    pool: &[&Claim],
    parent_text: &str,
    cap: usize,
) -> Result<ExplicitPersona, PersonaError> {
    select_by_similarity(author, pool, parent_text, cap, SelectionStrategy::Dynamic)
}

/// The `cap` pool claims least similar to `parent_text`, worst first.
pub fn select_negative(
    author: &AuthorId,
    pool: &[&Claim],
    parent_text: &str,
    cap: usize,
) -> Result<ExplicitPersona, PersonaError> {
    select_by_similarity(author, pool, parent_text, cap, SelectionStrategy::Negative)
}

fn select_by_similarity(
    author: &AuthorId,
    pool: &[&Claim],
    parent_text: &str,
    cap: usize,
    strategy: SelectionStrategy,
) -> Result<ExplicitPersona, PersonaError> {
    check_cap(cap)?;
    let selected_claims = if pool.len() < 2 {
        pool.iter().map(|&c| c.into()).collect()
    } else {
        let by_id: BTreeMap<&ClaimId, &Claim> = pool.iter().map(|c| (c.claim_id(), *c)).collect();
        let index = Bm25Index::build(
            pool.iter().map(|c| (c.claim_id(), c.text())),
            Bm25Params::default(),
        )
        .expect("pool is non-empty with unique claim ids");
        index
            .rank_tokens(
                &tokenize(parent_text),
                strategy == SelectionStrategy::Dynamic,
            )
            .into_iter()
            .take(cap)
            .map(|(id, _)| by_id[id].into())
            .collect()
    };
    Ok(ExplicitPersona {
        author_id: author.clone(),
        selected_claims,
        strategy,
        cap,
    })
}

/// Stance of a claim toward its discussion's thesis: pro when the path up to
/// the thesis crosses an even number of con edges (the claim's own label
/// counts as the first edge), con otherwise.
pub fn propagate_stance(d: &Discussion, claim_id: &ClaimId) -> Result<Stance, PersonaError> {
    let claim = d
        .get(claim_id)
        .ok_or_else(|| PersonaError::UnknownClaim(claim_id.clone()))?;
    if claim.is_thesis() {
        return Err(PersonaError::IsThesis(claim_id.clone()));
    }
    Ok(thesis_orientation(d, claim))
}

/// Like [`propagate_stance`] but total: the thesis is pro itself.
pub fn thesis_orientation(d: &Discussion, claim: &Claim) -> Stance {
    let mut stance = Stance::Pro;
    let mut current = claim;
    while let Some(parent) = d.parent_of(current) {
        if current.stance_label().stance() == Some(Stance::Con) {
            stance = stance.flip();
        }
        current = parent;
    }
    stance
}

/// One entry per train discussion the author wrote in, ordered by
/// discussion id. An authored thesis counts as pro.
pub fn implicit_persona(
    corpus: &Corpus,
    split: &SplitAssignment,
    author: &AuthorId,
) -> Result<ImplicitPersona, PersonaError> {
    implicit_persona_excluding(corpus, split, author, None)
}

/// [`implicit_persona`] computed as if `exclude` had not been written.
pub fn implicit_persona_excluding(
    corpus: &Corpus,
    split: &SplitAssignment,
    author: &AuthorId,
    exclude: Option<&ClaimId>,
) -> Result<ImplicitPersona, PersonaError> {
    let pool = explicit_pool(corpus, split, author)?;
    let mut per_discussion: BTreeMap<&DiscussionId, (usize, usize)> = BTreeMap::new();
    for claim in pool {
        if Some(claim.claim_id()) == exclude {
            continue;
        }
        let d = corpus
            .discussion_of(claim.claim_id())
            .expect("pool claims are indexed");
        let counts = per_discussion.entry(d.id()).or_default();
        match thesis_orientation(d, claim) {
            Stance::Pro => counts.0 += 1,
            Stance::Con => counts.1 += 1,
        }
    }
    let entries = per_discussion
        .into_iter()
        .map(|(id, (pro, con))| ThesisStanceSummary {
            discussion_id: id.clone(),
            thesis_text: corpus
                .discussion(id)
                .expect("indexed discussion")
                .thesis()
                .text()
                .to_owned(),
            pro_count: pro,
            con_count: con,
        })
        .collect();
    Ok(ImplicitPersona {
        author_id: author.clone(),
        entries,
    })
}
