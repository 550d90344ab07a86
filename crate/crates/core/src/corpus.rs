//! Discussion trees, claims and corpus-level statistics.
//!
//! Every type here is validated on construction and immutable afterwards.

use std::collections::{BTreeMap, HashMap, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

macro_rules! id_newtype {
    ($(#[$meta:meta])* $name:ident) => {
        $(#[$meta])*
        #[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
        #[serde(transparent)]
        pub struct $name(String);

        impl $name {
            pub fn new(id: impl Into<String>) -> Self {
                Self(id.into())
            }

            pub fn as_str(&self) -> &str {
                &self.0
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(&self.0)
            }
        }

        impl From<&str> for $name {
            fn from(s: &str) -> Self {
                Self(s.to_owned())
            }
        }

        impl From<String> for $name {
            fn from(s: String) -> Self {
                Self(s)
            }
        }
    };
}

id_newtype!(
    /// Globally unique claim identifier.
    ClaimId
);
id_newtype!(DiscussionId);
id_newtype!(AuthorId);

/// Relation of a claim to its direct parent, as recorded in the corpus.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StanceLabel {
    Pro,
    Con,
    Thesis,
}

impl StanceLabel {
    pub fn as_str(self) -> &'static str {
        match self {
            StanceLabel::Pro => "pro",
            StanceLabel::Con => "con",
            StanceLabel::Thesis => "thesis",
        }
    }

    /// The pro/con part of the label; `None` for the thesis.
    pub fn stance(self) -> Option<Stance> {
        match self {
            StanceLabel::Pro => Some(Stance::Pro),
            StanceLabel::Con => Some(Stance::Con),
            StanceLabel::Thesis => None,
        }
    }
}

impl fmt::Display for StanceLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for StanceLabel {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "pro" => Ok(StanceLabel::Pro),
            "con" => Ok(StanceLabel::Con),
            "thesis" => Ok(StanceLabel::Thesis),
            other => Err(format!("unknown stance label {other:?}")),
        }
    }
}

/// A binary stance, either toward a parent claim or toward the thesis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Stance {
    Pro,
    Con,
}

impl Stance {
    pub fn as_str(self) -> &'static str {
        match self {
            Stance::Pro => "pro",
            Stance::Con => "con",
        }
    }

    pub fn flip(self) -> Stance {
        match self {
            Stance::Pro => Stance::Con,
            Stance::Con => Stance::Pro,
        }
    }
}

impl fmt::Display for Stance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CorpusError {
    #[error("claim {claim_id}: {reason}")]
    InvalidClaim { claim_id: ClaimId, reason: String },
    #[error("a discussion needs at least one claim")]
    EmptyDiscussion,
    #[error("claim {claim_id} belongs to discussion {found}, expected {expected}")]
    MixedDiscussion {
        claim_id: ClaimId,
        expected: DiscussionId,
        found: DiscussionId,
    },
    #[error("discussion {0} has no thesis claim")]
    NoThesis(DiscussionId),
    #[error("discussion {discussion_id} has several thesis claims: {}", .theses.iter().map(|c| c.as_str()).collect::<Vec<_>>().join(", "))]
    MultipleTheses {
        discussion_id: DiscussionId,
        theses: Vec<ClaimId>,
    },
    #[error("claim {claim_id} points at parent {parent_id}, which is not in the discussion")]
    DanglingParent {
        claim_id: ClaimId,
        parent_id: ClaimId,
    },
    #[error("parent links starting at claim {0} form a cycle")]
    CycleDetected(ClaimId),
    #[error("duplicate claim id {0}")]
    DuplicateClaimId(ClaimId),
    #[error("duplicate discussion id {0}")]
    DuplicateDiscussion(DiscussionId),
    #[error("unknown claim {0}")]
    UnknownClaim(ClaimId),
    #[error("corpus is empty")]
    EmptyCorpus,
}

/// One node of a discussion tree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Claim {
    claim_id: ClaimId,
    discussion_id: DiscussionId,
    author_id: AuthorId,
    parent_id: Option<ClaimId>,
    text: String,
    stance_label: StanceLabel,
}

impl Claim {
    /// Validates the label/parent agreement and the non-empty text.
    pub fn new(
        claim_id: impl Into<ClaimId>,
        discussion_id: impl Into<DiscussionId>,
        author_id: impl Into<AuthorId>,
        parent_id: Option<ClaimId>,
        text: impl Into<String>,
        stance_label: StanceLabel,
    ) -> Result<Self, CorpusError> {
        let claim_id = claim_id.into();
        let text = text.into();
        if text.trim().is_empty() {
            return Err(CorpusError::InvalidClaim {
                claim_id,
                reason: "text is empty".into(),
            });
        }
        match (&parent_id, stance_label) {
            (None, StanceLabel::Thesis) | (Some(_), StanceLabel::Pro | StanceLabel::Con) => {}
            (None, label) => {
                return Err(CorpusError::InvalidClaim {
                    claim_id,
                    reason: format!("label {label} requires a parent_id"),
                })
            }
            (Some(_), StanceLabel::Thesis) => {
                return Err(CorpusError::InvalidClaim {
                    claim_id,
                    reason: "a thesis cannot have a parent_id".into(),
                })
            }
        }
        Ok(Self {
            claim_id,
            discussion_id: discussion_id.into(),
            author_id: author_id.into(),
            parent_id,
            text,
            stance_label,
        })
    }

    pub fn claim_id(&self) -> &ClaimId {
        &self.claim_id
    }

    pub fn discussion_id(&self) -> &DiscussionId {
        &self.discussion_id
    }

    pub fn author_id(&self) -> &AuthorId {
        &self.author_id
    }

    pub fn parent_id(&self) -> Option<&ClaimId> {
        self.parent_id.as_ref()
    }

    pub fn text(&self) -> &str {
        &self.text
    }

    pub fn stance_label(&self) -> StanceLabel {
        self.stance_label
    }

    pub fn is_thesis(&self) -> bool {
        self.stance_label == StanceLabel::Thesis
    }
}

/// A validated discussion tree rooted at its thesis.
#[derive(Debug, Clone)]
pub struct Discussion {
    discussion_id: DiscussionId,
    thesis_id: ClaimId,
    claims: BTreeMap<ClaimId, Claim>,
    children: HashMap<ClaimId, Vec<ClaimId>>,
    depths: HashMap<ClaimId, usize>,
    max_depth: usize,
}

impl Discussion {
    /// Builds and validates a discussion. The result does not depend on the
    /// order of `raw_claims`.
    pub fn build(raw_claims: Vec<Claim>) -> Result<Self, CorpusError> {
        let discussion_id = match raw_claims.first() {
            Some(c) => c.discussion_id.clone(),
            None => return Err(CorpusError::EmptyDiscussion),
        };

        let mut claims = BTreeMap::new();
        for claim in raw_claims {
            if claim.discussion_id != discussion_id {
                return Err(CorpusError::MixedDiscussion {
                    claim_id: claim.claim_id,
                    expected: discussion_id,
                    found: claim.discussion_id,
                });
            }
            if claims.contains_key(&claim.claim_id) {
                return Err(CorpusError::DuplicateClaimId(claim.claim_id));
            }
            claims.insert(claim.claim_id.clone(), claim);
        }

        for claim in claims.values() {
            if let Some(parent) = &claim.parent_id {
                if !claims.contains_key(parent) {
                    return Err(CorpusError::DanglingParent {
                        claim_id: claim.claim_id.clone(),
                        parent_id: parent.clone(),
                    });
                }
            }
        }

        detect_cycle(&claims)?;

        let theses: Vec<ClaimId> = claims
            .values()
            .filter(|c| c.parent_id.is_none())
            .map(|c| c.claim_id.clone())
            .collect();
        let thesis_id = match theses.len() {
            0 => return Err(CorpusError::NoThesis(discussion_id)),
            1 => theses.into_iter().next().expect("one thesis"),
            _ => {
                return Err(CorpusError::MultipleTheses {
                    discussion_id,
                    theses,
                })
            }
        };

        let mut children: HashMap<ClaimId, Vec<ClaimId>> = HashMap::new();
        for claim in claims.values() {
            if let Some(parent) = &claim.parent_id {
                children
                    .entry(parent.clone())
                    .or_default()
                    .push(claim.claim_id.clone());
            }
        }

        let mut depths = HashMap::with_capacity(claims.len());
        let mut queue = VecDeque::from([(thesis_id.clone(), 0usize)]);
        let mut max_depth = 0;
        while let Some((id, depth)) = queue.pop_front() {
            max_depth = max_depth.max(depth);
            if let Some(kids) = children.get(&id) {
                queue.extend(kids.iter().map(|k| (k.clone(), depth + 1)));
            }
            depths.insert(id, depth);
        }
        debug_assert_eq!(depths.len(), claims.len());

        Ok(Self {
            discussion_id,
            thesis_id,
            claims,
            children,
            depths,
            max_depth,
        })
    }

    pub fn id(&self) -> &DiscussionId {
        &self.discussion_id
    }

    pub fn thesis(&self) -> &Claim {
        &self.claims[&self.thesis_id]
    }

    pub fn len(&self) -> usize {
        self.claims.len()
    }

    pub fn is_empty(&self) -> bool {
        self.claims.is_empty()
    }

    pub fn get(&self, claim_id: &ClaimId) -> Option<&Claim> {
        self.claims.get(claim_id)
    }

    /// Claims in ascending claim id order.
    pub fn claims(&self) -> impl Iterator<Item = &Claim> {
        self.claims.values()
    }

    pub fn parent_of(&self, claim: &Claim) -> Option<&Claim> {
        claim.parent_id.as_ref().map(|p| &self.claims[p])
    }

    pub fn children(&self, claim_id: &ClaimId) -> &[ClaimId] {
        self.children.get(claim_id).map_or(&[], Vec::as_slice)
    }

    /// Depth of a claim; the thesis sits at depth 0.
    pub fn depth(&self, claim_id: &ClaimId) -> Result<usize, CorpusError> {
        self.depths
            .get(claim_id)
            .copied()
            .ok_or_else(|| CorpusError::UnknownClaim(claim_id.clone()))
    }

    pub fn max_depth(&self) -> usize {
        self.max_depth
    }

    /// The claim itself first, the thesis last.
    pub fn path_to_root(&self, claim_id: &ClaimId) -> Result<Vec<&Claim>, CorpusError> {
        let mut current = self
            .claims
            .get(claim_id)
            .ok_or_else(|| CorpusError::UnknownClaim(claim_id.clone()))?;
        let mut path = vec![current];
        while let Some(parent) = &current.parent_id {
            current = &self.claims[parent];
            path.push(current);
        }
        Ok(path)
    }
}

fn detect_cycle(claims: &BTreeMap<ClaimId, Claim>) -> Result<(), CorpusError> {
    #[derive(Clone, Copy, PartialEq)]
    enum Mark {
        Open,
        Done,
    }
    let mut marks: HashMap<&ClaimId, Mark> = HashMap::with_capacity(claims.len());
    for start in claims.keys() {
        if marks.contains_key(start) {
            continue;
        }
        let mut walk = Vec::new();
        let mut cursor = Some(start);
        while let Some(id) = cursor {
            match marks.get(id) {
                Some(Mark::Done) => break,
                Some(Mark::Open) => return Err(CorpusError::CycleDetected(id.clone())),
                None => {
                    marks.insert(id, Mark::Open);
                    walk.push(id);
                    cursor = claims[id].parent_id.as_ref();
                }
            }
        }
        for id in walk {
            marks.insert(id, Mark::Done);
        }
    }
    Ok(())
}

/// A validated collection of discussions with a global claim index.
#[derive(Debug, Clone)]
pub struct Corpus {
    discussions: BTreeMap<DiscussionId, Discussion>,
    claim_index: HashMap<ClaimId, DiscussionId>,
    author_index: BTreeMap<AuthorId, Vec<ClaimId>>,
}

impl Corpus {
    pub fn new(discussions: impl IntoIterator<Item = Discussion>) -> Result<Self, CorpusError> {
        let mut by_id = BTreeMap::new();
        let mut claim_index = HashMap::new();
        let mut author_index: BTreeMap<AuthorId, Vec<ClaimId>> = BTreeMap::new();
        for discussion in discussions {
            for claim in discussion.claims() {
                if claim_index
                    .insert(claim.claim_id.clone(), discussion.discussion_id.clone())
                    .is_some()
                {
                    return Err(CorpusError::DuplicateClaimId(claim.claim_id.clone()));
                }
                author_index
                    .entry(claim.author_id.clone())
                    .or_default()
                    .push(claim.claim_id.clone());
            }
            if by_id.contains_key(&discussion.discussion_id) {
                return Err(CorpusError::DuplicateDiscussion(discussion.discussion_id));
            }
            by_id.insert(discussion.discussion_id.clone(), discussion);
        }
        if by_id.is_empty() {
            return Err(CorpusError::EmptyCorpus);
        }
        for ids in author_index.values_mut() {
            ids.sort();
        }
        Ok(Self {
            discussions: by_id,
            claim_index,
            author_index,
        })
    }

    /// Discussions in ascending discussion id order.
    pub fn discussions(&self) -> impl Iterator<Item = &Discussion> {
        self.discussions.values()
    }

    pub fn discussion(&self, id: &DiscussionId) -> Option<&Discussion> {
        self.discussions.get(id)
    }

    pub fn discussion_count(&self) -> usize {
        self.discussions.len()
    }

    pub fn claim_count(&self) -> usize {
        self.claim_index.len()
    }

    pub fn claim(&self, id: &ClaimId) -> Option<&Claim> {
        let discussion = self.claim_index.get(id)?;
        self.discussions[discussion].get(id)
    }

    /// The discussion holding a claim.
    pub fn discussion_of(&self, id: &ClaimId) -> Option<&Discussion> {
        self.claim_index.get(id).map(|d| &self.discussions[d])
    }

    /// Claim ids of an author, sorted.
    pub fn claims_by(&self, author: &AuthorId) -> Option<&[ClaimId]> {
        self.author_index.get(author).map(Vec::as_slice)
    }

    pub fn authors(&self) -> impl Iterator<Item = &AuthorId> {
        self.author_index.keys()
    }

    pub fn author_index(&self) -> &BTreeMap<AuthorId, Vec<ClaimId>> {
        &self.author_index
    }
}

/// Descriptive statistics over a corpus. Standard deviations are population
/// standard deviations (divide by N).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CorpusStats {
    pub discussion_count: usize,
    pub unique_claim_count: usize,
    pub claims_per_discussion_mean: f64,
    pub claims_per_discussion_std: f64,
    pub max_depth_per_discussion_mean: f64,
    pub max_depth_per_discussion_std: f64,
    pub author_count: usize,
    pub claims_per_author_min: usize,
    pub claims_per_author_max: usize,
}

pub fn corpus_stats(corpus: &Corpus) -> CorpusStats {
    let sizes: Vec<f64> = corpus.discussions().map(|d| d.len() as f64).collect();
    let depths: Vec<f64> = corpus.discussions().map(|d| d.max_depth() as f64).collect();
    let (size_mean, size_std) = mean_std(&sizes);
    let (depth_mean, depth_std) = mean_std(&depths);
    let per_author = corpus.author_index.values().map(Vec::len);
    CorpusStats {
        discussion_count: corpus.discussion_count(),
        unique_claim_count: corpus.claim_count(),
        claims_per_discussion_mean: size_mean,
        claims_per_discussion_std: size_std,
        max_depth_per_discussion_mean: depth_mean,
        max_depth_per_discussion_std: depth_std,
        author_count: corpus.author_index.len(),
        claims_per_author_min: per_author.clone().min().unwrap_or(0),
        claims_per_author_max: per_author.max().unwrap_or(0),
    }
}

/// Mean and population standard deviation.
pub(crate) fn mean_std(values: &[f64]) -> (f64, f64) {
    if values.is_empty() {
        return (0.0, 0.0);
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
    (mean, var.sqrt())
}
