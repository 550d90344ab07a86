use serde::Serialize;

use crate::corpus::{Claim, Corpus, Stance};
use crate::ingest::{Split, SplitAssignment};
use std::collections::HashMap;

use crate::persona::{implicit_persona, thesis_orientation, ImplicitPersona, PersonaError};

/// Label counts (toward the parent) over a set of claims.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct CorpusPrior {
    pub pro: usize,
    pub con: usize,
}

impl CorpusPrior {
    pub fn from_split(corpus: &Corpus, split: &SplitAssignment, which: Split) -> Self {
        let mut prior = Self::default();
        for d in corpus.discussions() {
            if split.get(d.id()) != Some(which) {
                continue;
            }
            for c in d.claims() {
                match c.stance_label().stance() {
                    Some(Stance::Pro) => prior.pro += 1,
                    Some(Stance::Con) => prior.con += 1,
                    None => {}
                }
            }
        }
        prior
    }

    /// The more frequent label; pro on a tie.
    pub fn majority(&self) -> Stance {
        if self.pro >= self.con {
            Stance::Pro
        } else {
            Stance::Con
        }
    }
}

/// Predicts the label of a reply to `parent` from the replying author's
/// implicit persona.
///
/// When the persona has an entry for the parent's discussion the author's
/// leaning toward the thesis is pro if `pro_count >= con_count`, else con.
/// A reply agrees with the parent exactly when the author's leaning matches
/// `parent_orientation` (the parent's own stance toward the thesis; the
/// thesis itself is pro). Without an entry the prior's majority label is
/// returned.
pub fn baseline_stance_classifier(
    parent: &Claim,
    parent_orientation: Stance,
    persona: &ImplicitPersona,
    prior: &CorpusPrior,
) -> Stance {
    match persona.entry_for(parent.discussion_id()) {
        Some(entry) => {
            let leaning = if entry.pro_count >= entry.con_count {
                Stance::Pro
            } else {
                Stance::Con
            };
            if leaning == parent_orientation {
                Stance::Pro
            } else {
                Stance::Con
            }
        }
        None => prior.majority(),
    }
}

/// Macro-averaged F1 over pro and con, as a percentage.
pub fn macro_f1(gold: &[Stance], predicted: &[Stance]) -> f64 {
    assert_eq!(
        gold.len(),
        predicted.len(),
        "label sequences differ in length"
    );
    let f1 = |class: Stance| {
        let mut tp = 0usize;
        let mut fp = 0usize;
        let mut fneg = 0usize;
        for (&g, &p) in gold.iter().zip(predicted) {
            match (g == class, p == class) {
                (true, true) => tp += 1,
                (false, true) => fp += 1,
                (true, false) => fneg += 1,
                (false, false) => {}
            }
        }
        if tp == 0 {
            0.0
        } else {
            2.0 * tp as f64 / (2 * tp + fp + fneg) as f64
        }
    };
    100.0 * (f1(Stance::Pro) + f1(Stance::Con)) / 2.0
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClassificationReport {
    pub split: Split,
    pub sample_count: usize,
    pub persona_f1: f64,
    pub majority_f1: f64,
    pub prior: CorpusPrior,
}

/// Scores the persona classifier and the majority baseline on every
/// non-thesis claim of `eval_split`. Personas come from train claims only
/// and never include the claim being classified, so on the train split this
/// is a leave-one-out evaluation.
pub fn evaluate_stance_baselines(
    corpus: &Corpus,
    split: &SplitAssignment,
    eval_split: Split,
) -> Result<ClassificationReport, PersonaError> {
    let prior = CorpusPrior::from_split(corpus, split, Split::Train);
    let mut gold = Vec::new();
    let mut persona_pred = Vec::new();
    let mut personas: HashMap<_, ImplicitPersona> = HashMap::new();
    for d in corpus.discussions() {
        if split.get(d.id()) != Some(eval_split) {
            continue;
        }
        for child in d.claims() {
            let (Some(parent), Some(label)) = (d.parent_of(child), child.stance_label().stance())
            else {
                continue;
            };
            let author = child.author_id();
            if !personas.contains_key(author) {
                personas.insert(author, implicit_persona(corpus, split, author)?);
            }
            let full = &personas[author];
            let persona = if eval_split == Split::Train {
                full.without_claim(d.id(), thesis_orientation(d, child))
            } else {
                full.clone()
            };
            gold.push(label);
            persona_pred.push(baseline_stance_classifier(
                parent,
                thesis_orientation(d, parent),
                &persona,
                &prior,
            ));
        }
    }
    let majority = vec![prior.majority(); gold.len()];
    Ok(ClassificationReport {
        split: eval_split,
        sample_count: gold.len(),
        persona_f1: macro_f1(&gold, &persona_pred),
        majority_f1: macro_f1(&gold, &majority),
        prior,
    })
}
