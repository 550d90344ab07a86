//! Values for the 50-discussion fixture, computed by `fixtures/oracle.py`.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::BufReader;

use stancekit::bm25::{Bm25Index, Bm25Params};
use stancekit::ingest::{bucket_table, quartile_strata};
use stancekit::metrics::{tokenize, zipf_cdf};
use stancekit::persona::{implicit_persona, thesis_orientation};
use stancekit::{
    corpus_stats, parse_corpus, AuthorId, Corpus, DiscussionId, ParseOptions, Split,
    SplitAssignment, Stance, StanceLabel,
};

const FIXTURES: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/tests/fixtures");

fn corpus() -> Corpus {
    let f = File::open(format!("{FIXTURES}/discussions50.jsonl")).unwrap();
    parse_corpus(BufReader::new(f), ParseOptions::default()).unwrap()
}

fn split() -> SplitAssignment {
    let f = File::open(format!("{FIXTURES}/split50.tsv")).unwrap();
    SplitAssignment::read(BufReader::new(f)).unwrap()
}

fn close(a: f64, b: f64) {
    assert!((a - b).abs() < 1e-12, "{a} != {b}");
}

#[test]
fn corpus_statistics() {
    let s = corpus_stats(&corpus());
    assert_eq!(s.discussion_count, 50);
    assert_eq!(s.unique_claim_count, 624);
    close(s.claims_per_discussion_mean, 12.48);
    close(s.claims_per_discussion_std, 11.203999285969275);
    close(s.max_depth_per_discussion_mean, 3.64);
    close(s.max_depth_per_discussion_std, 2.0567936211491906);
    assert_eq!(s.author_count, 59);
    assert_eq!(s.claims_per_author_min, 1);
    assert_eq!(s.claims_per_author_max, 122);
}

#[test]
fn labels_and_orientations() {
    let corpus = corpus();
    let mut labels = BTreeMap::new();
    let mut oriented = BTreeMap::new();
    for d in corpus.discussions() {
        for c in d.claims() {
            *labels.entry(c.stance_label().as_str()).or_insert(0) += 1;
            if !c.is_thesis() {
                *oriented.entry(thesis_orientation(d, c)).or_insert(0) += 1;
            }
        }
    }
    assert_eq!(
        labels,
        BTreeMap::from([("thesis", 50), ("pro", 277), ("con", 297)])
    );
    assert_eq!(oriented[&Stance::Pro], 302);
    assert_eq!(oriented[&Stance::Con], 272);
    assert!(corpus
        .discussions()
        .all(|d| d.thesis().stance_label() == StanceLabel::Thesis));
}

#[test]
fn strata_and_split() {
    let corpus = corpus();
    assert_eq!(quartile_strata(&corpus).cuts, [5, 9, 15]);
    let split = split();
    split.covers(&corpus).unwrap();
    assert_eq!(split.count(Split::Train), 40);
    assert_eq!(split.count(Split::Validation), 5);
    assert_eq!(split.count(Split::Test), 5);
    let again = stancekit::stratified_split(&corpus, 0.1, 0.1, 7).unwrap();
    assert_eq!(
        again.iter().collect::<Vec<_>>(),
        split.iter().collect::<Vec<_>>()
    );
}

#[test]
fn bucket_counts() {
    let table = bucket_table(&corpus(), &split(), 5);
    assert_eq!(table.rows[&Split::Train], vec![2, 18, 33, 20, 35, 393]);
    assert_eq!(table.rows[&Split::Validation], vec![0, 0, 3, 8, 2, 47]);
    assert_eq!(table.rows[&Split::Test], vec![0, 1, 1, 2, 4, 55]);
}

#[test]
fn implicit_persona_of_busiest_author() {
    let p = implicit_persona(&corpus(), &split(), &AuthorId::new("u000")).unwrap();
    assert_eq!(p.entries.len(), 30);
    let head: Vec<(&str, usize, usize)> = p
        .entries
        .iter()
        .take(5)
        .map(|e| (e.discussion_id.as_str(), e.pro_count, e.con_count))
        .collect();
    assert_eq!(
        head,
        vec![
            ("d000", 3, 1),
            ("d001", 1, 1),
            ("d002", 2, 0),
            ("d003", 4, 1),
            ("d005", 1, 4)
        ]
    );
}

#[test]
fn zipf_curve() {
    let corpus = corpus();
    let texts: Vec<&str> = corpus
        .discussions()
        .flat_map(|d| d.claims().map(|c| c.text()))
        .collect();
    let curve = zipf_cdf(texts).unwrap();
    assert_eq!(curve.points.len(), 93);
    assert_eq!(curve.total_tokens, 7262);
    let head: Vec<usize> = curve.points.iter().take(3).map(|p| p.frequency).collect();
    assert_eq!(head, vec![624, 508, 286]);
    close(curve.points[0].cdf, 0.08592674194436795);
    close(curve.points[1].cdf, 0.15587992288625724);
    close(curve.points[2].cdf, 0.19526301294409254);
}

#[test]
fn tokenizer() {
    let cases: [(&str, &[&str]); 4] = [
        ("Hello, World!", &["hello", ",", "world", "!"]),
        (
            "It's 3.5% of U.S.A.",
            &[
                "it", "'", "s", "3", ".", "5", "%", "of", "u", ".", "s", ".", "a", ".",
            ],
        ),
        ("  tabs\tand\nnewlines  ", &["tabs", "and", "newlines"]),
        ("a--b", &["a", "-", "-", "b"]),
    ];
    for (text, want) in cases {
        assert_eq!(tokenize(text), want, "{text:?}");
    }
}

#[test]
fn bm25_against_thesis_query() {
    let corpus = corpus();
    let d = corpus.discussion(&DiscussionId::new("d000")).unwrap();
    let index = Bm25Index::build(
        d.claims()
            .map(|c| (c.claim_id().as_str().to_owned(), c.text())),
        Bm25Params::default(),
    )
    .unwrap();
    let ranked = index.rank(d.thesis().text(), true);
    let want = [
        ("d000-c000", 15.020245181079423),
        ("d000-c002", 1.2750014747489107),
        ("d000-c014", 1.2750014747489107),
        ("d000-c004", 1.2220698767440397),
        ("d000-c009", 1.0867240549025687),
    ];
    for ((id, score), (want_id, want_score)) in ranked.iter().zip(want) {
        assert_eq!(id, want_id);
        assert!((score - want_score).abs() < 1e-9, "{id}: {score}");
    }

    let single = Bm25Index::build([(0, "hello world")], Bm25Params::default()).unwrap();
    close(single.score("hello", &0).unwrap(), 0.28768207245178085);
}
