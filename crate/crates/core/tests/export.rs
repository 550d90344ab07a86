use std::collections::HashSet;
use std::fs::File;
use std::io::BufReader;

use stancekit::metrics::{evaluate_system, BleuAggregation};
use stancekit::persona::{SelectionStrategy, SEP};
use stancekit::samples::{
    export_dataset, pair_for_evaluation, read_samples, resolve_persona, write_samples,
    ExportConfig, ExportHeader, GenerationRecord, PersonaKind, Representation, SampleError,
    StrategyChoice, Task,
};
use stancekit::{parse_corpus, Corpus, ParseOptions, Split, SplitAssignment};

const FIXTURES: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/tests/fixtures");

fn fixture() -> (Corpus, SplitAssignment) {
    let f = File::open(format!("{FIXTURES}/discussions50.jsonl")).unwrap();
    let corpus = parse_corpus(BufReader::new(f), ParseOptions::default()).unwrap();
    let f = File::open(format!("{FIXTURES}/split50.tsv")).unwrap();
    (corpus, SplitAssignment::read(BufReader::new(f)).unwrap())
}

fn bytes(corpus: &Corpus, split: &SplitAssignment, config: &ExportConfig) -> Vec<u8> {
    let records = export_dataset(corpus, split, config).unwrap();
    let mut out = Vec::new();
    write_samples(&ExportHeader::for_config(config), &records, &mut out).unwrap();
    out
}

const KINDS: [PersonaKind; 5] = [
    PersonaKind::None,
    PersonaKind::Random,
    PersonaKind::Dynamic,
    PersonaKind::Negative,
    PersonaKind::Implicit,
];

#[test]
fn record_counts_and_disjoint_splits() {
    let (corpus, split) = fixture();
    let mut seen = HashSet::new();
    for s in Split::ALL {
        let non_thesis: usize = corpus
            .discussions()
            .filter(|d| split.get(d.id()) == Some(s))
            .map(|d| d.len() - 1)
            .sum();
        for kind in KINDS {
            for task in [Task::Generation, Task::Classification] {
                let records =
                    export_dataset(&corpus, &split, &ExportConfig::new(task, kind, s)).unwrap();
                assert_eq!(records.len(), non_thesis, "{s:?} {kind:?}");
            }
        }
        for r in export_dataset(
            &corpus,
            &split,
            &ExportConfig::new(Task::Generation, PersonaKind::None, s),
        )
        .unwrap()
        {
            assert!(
                seen.insert(r.metadata.claim_id),
                "claim exported in two splits"
            );
        }
    }
}

#[test]
fn exports_are_deterministic_and_round_trip() {
    let (corpus, split) = fixture();
    for kind in KINDS {
        let config = ExportConfig::new(Task::Generation, kind, Split::Train);
        let a = bytes(&corpus, &split, &config);
        assert_eq!(a, bytes(&corpus, &split, &config));
        let (header, records) = read_samples(a.as_slice()).unwrap();
        assert_eq!(header, ExportHeader::for_config(&config));
        let mut again = Vec::new();
        write_samples(&header, &records, &mut again).unwrap();
        assert_eq!(a, again);
    }
}

#[test]
fn hybrid_train_equals_random_train() {
    let (corpus, split) = fixture();
    let hybrid = resolve_persona(
        Representation::Explicit,
        Some(StrategyChoice::Hybrid),
        Split::Train,
    )
    .unwrap();
    let random = resolve_persona(
        Representation::Explicit,
        Some(StrategyChoice::Fixed(SelectionStrategy::Random)),
        Split::Train,
    )
    .unwrap();
    assert_eq!(hybrid, PersonaKind::Random);
    assert_eq!(
        bytes(
            &corpus,
            &split,
            &ExportConfig::new(Task::Generation, hybrid, Split::Train)
        ),
        bytes(
            &corpus,
            &split,
            &ExportConfig::new(Task::Generation, random, Split::Train)
        )
    );
    let infer = resolve_persona(
        Representation::Explicit,
        Some(StrategyChoice::Hybrid),
        Split::Test,
    )
    .unwrap();
    assert_eq!(infer, PersonaKind::Dynamic);
}

#[test]
fn flag_conflicts() {
    for (rep, strategy) in [
        (Representation::None, Some(StrategyChoice::Hybrid)),
        (
            Representation::Implicit,
            Some(StrategyChoice::Fixed(SelectionStrategy::Dynamic)),
        ),
        (Representation::Explicit, None),
    ] {
        assert!(matches!(
            resolve_persona(rep, strategy, Split::Train),
            Err(SampleError::ConfigConflict(_))
        ));
    }
}

#[test]
fn sources_carry_parent_and_persona() {
    let (corpus, split) = fixture();
    let none = export_dataset(
        &corpus,
        &split,
        &ExportConfig::new(Task::Generation, PersonaKind::None, Split::Test),
    )
    .unwrap();
    let with = export_dataset(
        &corpus,
        &split,
        &ExportConfig::new(Task::Generation, PersonaKind::Dynamic, Split::Test),
    )
    .unwrap();
    let mut contained = 0;
    for (a, b) in none.iter().zip(&with) {
        let parent = corpus.claim(&a.metadata.parent_id).unwrap();
        assert_eq!(a.source, parent.text());
        assert!(b.source.ends_with(&a.source));
        assert_eq!(b.source == a.source, b.metadata.persona_size == 0);
        if b.metadata.persona_size > 0 {
            assert!(b.source[..b.source.len() - a.source.len()].ends_with(SEP));
        }
        if a.source.contains(&a.target) {
            contained += 1;
        }
    }
    assert!(contained * 10 < none.len(), "targets leak into sources");
}

#[test]
fn references_as_hypotheses_score_perfectly() {
    let (corpus, split) = fixture();
    let records = export_dataset(
        &corpus,
        &split,
        &ExportConfig::new(Task::Generation, PersonaKind::Implicit, Split::Test),
    )
    .unwrap();
    let generations: Vec<GenerationRecord> = records
        .iter()
        .map(|r| GenerationRecord {
            claim_id: r.metadata.claim_id.clone(),
            text: r.target.clone(),
        })
        .collect();
    let pairs = pair_for_evaluation(&records, &generations).unwrap();
    let report = evaluate_system(&pairs, BleuAggregation::SentenceMean).unwrap();
    assert!((report.bleu1 - 100.0).abs() < 1e-9);
    assert!((report.rouge_l - 100.0).abs() < 1e-9);
    assert!(pair_for_evaluation(&records, &generations[1..]).is_err());
}
