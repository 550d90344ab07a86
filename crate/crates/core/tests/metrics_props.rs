use proptest::prelude::*;

use stancekit::metrics::{
    abs_n, bleu, evaluate_system, rep_n, rouge_l, tokenize, zipf_cdf, BleuAggregation, EvalPair,
    MetricError,
};

fn text() -> impl Strategy<Value = String> {
    prop::collection::vec(
        prop::sample::select(vec!["a", "b", "c", "d", "x", ",", "."]),
        1..25,
    )
    .prop_map(|w| w.join(" "))
}

proptest! {
    #[test]
    fn self_overlap_is_perfect(h in text()) {
        let len = tokenize(&h).len();
        for n in 1..=len.min(4) {
            prop_assert!((bleu(&h, &h, n).unwrap() - 100.0).abs() < 1e-9);
        }
        prop_assert!((rouge_l(&h, &h) - 100.0).abs() < 1e-9);
        prop_assert_eq!(abs_n(&h, &h, 3), 0.0);
    }

    #[test]
    fn rouge_is_symmetric(h in text(), r in text()) {
        prop_assert!((rouge_l(&h, &r) - rouge_l(&r, &h)).abs() < 1e-9);
    }

    #[test]
    fn scores_are_percentages(h in text(), r in text(), s in text()) {
        for n in 1..=4 {
            let b = bleu(&h, &r, n).unwrap();
            prop_assert!((0.0..=100.0 + 1e-9).contains(&b));
        }
        let rep = rep_n(&h, 3);
        prop_assert!((0.0..100.0).contains(&rep));
        prop_assert!((0.0..=100.0).contains(&abs_n(&h, &s, 3)));
        prop_assert!((0.0..=100.0).contains(&rouge_l(&h, &r)));
    }

    #[test]
    fn report_length_is_mean_token_count(hyps in prop::collection::vec(text(), 1..10)) {
        let pairs: Vec<EvalPair> = hyps
            .iter()
            .map(|h| EvalPair { source: "a b".into(), hypothesis: h.clone(), reference: "a b c".into() })
            .collect();
        let report = evaluate_system(&pairs, BleuAggregation::SentenceMean).unwrap();
        let mean = hyps.iter().map(|h| tokenize(h).len() as f64).sum::<f64>() / hyps.len() as f64;
        prop_assert!((report.length_mean - mean).abs() < 1e-9);
        prop_assert_eq!(report.sample_count, hyps.len());
    }

    #[test]
    fn zipf_is_monotone_and_complete(texts in prop::collection::vec(text(), 1..10)) {
        let curve = zipf_cdf(texts.iter().map(String::as_str)).unwrap();
        prop_assert!(curve.points.windows(2).all(|w| w[0].cdf <= w[1].cdf && w[0].frequency >= w[1].frequency));
        prop_assert!((curve.points.last().unwrap().cdf - 1.0).abs() <= 1e-12);
        let total: usize = curve.points.iter().map(|p| p.frequency).sum();
        prop_assert_eq!(total, curve.total_tokens);
    }
}

#[test]
fn identical_system_scores_hundred() {
    let pairs: Vec<EvalPair> = ["the cat sat on the mat", "a b c d e"]
        .iter()
        .map(|t| EvalPair {
            source: "context".into(),
            hypothesis: t.to_string(),
            reference: t.to_string(),
        })
        .collect();
    for agg in [BleuAggregation::SentenceMean, BleuAggregation::Corpus] {
        let r = evaluate_system(&pairs, agg).unwrap();
        assert!((r.bleu1 - 100.0).abs() < 1e-9);
        assert!((r.bleu4 - 100.0).abs() < 1e-9);
        assert!((r.rouge_l - 100.0).abs() < 1e-9);
        assert_eq!(r.abs3, 100.0);
    }
    assert!(matches!(
        evaluate_system(&[], BleuAggregation::SentenceMean),
        Err(MetricError::NoSamples)
    ));
}
