mod common;

use common::*;
use netpeace_core::eval::{build_filter_index, evaluate, raw_rank};
use netpeace_core::kgc::{score_all_tails, KgcModelParams, ModelKind};
use netpeace_core::{EmbeddingMatrix, Error};
use proptest::prelude::*;

#[test]
fn matches_exhaustive_oracle_for_every_kind() {
    for seed in 0..5 {
        let ds = random_dataset(seed, 40, 4, 150, 20, 30).augmented().unwrap();
        let filter = build_filter_index(&[&ds.train, &ds.valid, &ds.test]).unwrap();
        for kind in ModelKind::ALL {
            let params = random_params(kind, ds.train.entity_count(), ds.train.relation_count(), 6, false, seed);
            let report = evaluate(&params, &ds.test, &filter, true).unwrap();
            assert_eq!(report.per_triple_ranks, oracle_ranks(&params, &ds.test, &filter));
            // The augmented store holds each test triple twice; each yields two queries.
            assert_eq!(report.n_queries, ds.test.len());
            let per_relation = report.per_relation.as_ref().unwrap();
            assert_eq!(per_relation.iter().map(|r| r.count).sum::<usize>(), report.n_queries);
            assert!(report.hits1 <= report.hits3 && report.hits3 <= report.hits10);
            assert!(report.mrr > 0.0 && report.mrr <= 1.0);
        }
    }
}

#[test]
fn filtered_rank_never_exceeds_raw_rank() {
    let ds = random_dataset(1, 30, 2, 120, 10, 20).augmented().unwrap();
    let filter = build_filter_index(&[&ds.train, &ds.valid, &ds.test]).unwrap();
    let params = random_params(ModelKind::ComplEx, 30, 4, 4, false, 1);
    let report = evaluate(&params, &ds.test, &filter, false).unwrap();
    for q in &report.queries {
        let (h, r, answer) = match q.direction {
            netpeace_core::eval::Direction::Tail => (q.head, q.relation, q.tail),
            netpeace_core::eval::Direction::Head => (q.tail, q.relation + 2, q.head),
        };
        let scores = score_all_tails(&params, h, r, None).unwrap();
        assert!(q.rank <= raw_rank(&scores, answer).unwrap());
    }
}

#[test]
fn plain_and_augmented_test_stores_agree() {
    let plain = random_dataset(2, 25, 3, 80, 10, 15);
    let aug = plain.augmented().unwrap();
    let filter = build_filter_index(&[&plain.train, &plain.valid, &plain.test]).unwrap();
    let params = random_params(ModelKind::Tucker, 25, 6, 4, false, 2);
    let a = evaluate(&params, &plain.test, &filter, true).unwrap();
    let b = evaluate(&params, &aug.test, &filter, true).unwrap();
    assert_eq!(a, b);
}

#[test]
fn missing_reciprocals_are_rejected() {
    let ds = random_dataset(3, 20, 3, 50, 5, 5);
    let filter = build_filter_index(&[&ds.train, &ds.valid, &ds.test]).unwrap();
    let params = random_params(ModelKind::DistMult, 20, 3, 4, false, 3);
    assert!(matches!(
        evaluate(&params, &ds.test, &filter, false),
        Err(Error::MissingReciprocal { expected: 6, actual: 3 })
    ));
}

#[test]
fn entity_count_mismatch_is_rejected() {
    let ds = random_dataset(3, 20, 3, 50, 5, 5);
    let filter = build_filter_index(&[&ds.train, &ds.valid, &ds.test]).unwrap();
    let params = random_params(ModelKind::DistMult, 21, 6, 4, false, 3);
    assert!(matches!(evaluate(&params, &ds.test, &filter, false), Err(Error::VocabMismatch(_))));
}

#[test]
fn rank_dump_has_one_line_per_query() {
    let ds = random_dataset(4, 20, 2, 50, 5, 7);
    let filter = build_filter_index(&[&ds.train, &ds.valid, &ds.test]).unwrap();
    let params = random_params(ModelKind::DistMult, ds.entity_count(), 4, 4, false, 4);
    let report = evaluate(&params, &ds.test, &filter, false).unwrap();
    let mut out = Vec::new();
    report.write_rank_dump(&ds.test, &mut out).unwrap();
    let text = String::from_utf8(out).unwrap();
    assert_eq!(text.lines().count(), 1 + 2 * ds.test.len());
    let json = serde_json::to_value(&report).unwrap();
    for key in ["mrr", "hits1", "hits3", "hits10", "n_queries", "tie_policy"] {
        assert!(json.get(key).is_some(), "{key}");
    }
}

/// Appends an entity whose embedding makes every score it takes part in
/// lower than any existing score.
fn with_low_entity(params: &KgcModelParams) -> KgcModelParams {
    let (n, d) = (params.entity_count(), params.entity_dim());
    let mut values = params.entities.values().to_vec();
    values.extend(std::iter::repeat_n(0.0, d));
    let mut out = params.clone();
    out.entities = EmbeddingMatrix::from_values(n + 1, d, values).unwrap();
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn permuting_test_triples_keeps_the_report(seed in 0u64..1000, rot in 1usize..10) {
        let ds = random_dataset(seed, 20, 2, 60, 5, 12);
        let filter = build_filter_index(&[&ds.train, &ds.valid, &ds.test]).unwrap();
        let params = random_params(ModelKind::Tucker, ds.entity_count(), 4, 4, false, seed);
        let mut shuffled = ds.test.triples().to_vec();
        let len = shuffled.len();
        shuffled.rotate_left(rot % len);
        shuffled.reverse();
        let plain = &ds.test;
        let permuted = plain.with_triples(shuffled);
        let a = evaluate(&params, plain, &filter, true).unwrap();
        let b = evaluate(&params, &permuted, &filter, true).unwrap();
        prop_assert_eq!((a.mrr, a.hits1, a.hits3, a.hits10, a.n_queries), (b.mrr, b.hits1, b.hits3, b.hits10, b.n_queries));
        prop_assert_eq!(a.per_relation, b.per_relation);
        let (mut ra, mut rb) = (a.per_triple_ranks, b.per_triple_ranks);
        ra.sort_unstable();
        rb.sort_unstable();
        prop_assert_eq!(ra, rb);
    }

    #[test]
    fn a_strictly_worse_entity_changes_no_rank(seed in 0u64..1000) {
        // DistMult with positive relation and entity entries: every score is
        // positive, and a zero entity row scores exactly 0.
        let ds = random_dataset(seed, 15, 2, 40, 5, 10).augmented().unwrap();
        let filter = build_filter_index(&[&ds.train, &ds.valid, &ds.test]).unwrap();
        let mut params = random_params(ModelKind::DistMult, 15, 4, 4, false, seed);
        params.entities.values_mut().iter_mut().for_each(|v| *v = v.abs() + 0.01);
        params.relations.values_mut().iter_mut().for_each(|v| *v = v.abs() + 0.01);
        let before = evaluate(&params, &ds.test, &filter, false).unwrap();

        let extended = with_low_entity(&params);
        let mut ranks = Vec::new();
        let m = 2;
        for t in &ds.test.triples()[..ds.test.len() / 2] {
            for (h, r, answer) in [(t.head, t.relation, t.tail), (t.tail, t.relation + m, t.head)] {
                let scores = score_all_tails(&extended, h, r, None).unwrap();
                ranks.push(netpeace_core::eval::filtered_rank(&scores, answer, filter.known(h, r)).unwrap());
            }
        }
        let mut expected = before.per_triple_ranks.clone();
        expected.sort_unstable();
        ranks.sort_unstable();
        prop_assert_eq!(ranks, expected);
    }
}
