mod common;

use std::time::Duration;

use circrank_core::certificates::{divides_condition_brute_force, partition_certificates};
use circrank_core::rank::spec_real_rank;
use circrank_core::{
    best_bounds, binary_rank_exact, build_block_diagonal, complement, complement_partition,
    divides_condition, is_balanced, lin_independence_bound, Axis, BlockSpec, BoundKind, Rectangle,
    SearchConfig, Side, TheoremId,
};
use common::*;
use proptest::prelude::*;

fn solve_complement(spec: &BlockSpec, secs: u64) -> circrank_core::BinaryRankOutcome {
    let cfg = SearchConfig {
        time_budget: Some(Duration::from_secs(secs)),
        seed_partition: Some(complement_partition(spec).unwrap()),
        ..Default::default()
    };
    binary_rank_exact(&complement(&build_block_diagonal(spec)), &cfg).unwrap()
}

/// A partition of the complement with as many rectangles as the real rank
/// has only balanced rectangles.
#[test]
fn minimum_partitions_at_real_rank_are_balanced() {
    let mut seen = 0;
    for spec in unordered_specs(&pairs(1..=6, 1..=3), 2) {
        let out = solve_complement(&spec, 2);
        if out.exact != Some(spec_real_rank(&spec, true).unwrap()) {
            continue;
        }
        seen += 1;
        for r in &out.witness.rects {
            for h in 0..spec.m() {
                for axis in [Axis::Rows, Axis::Cols] {
                    assert!(
                        is_balanced(r, &spec, h, axis).unwrap(),
                        "{spec}: {r:?} in block {h}"
                    );
                }
            }
        }
    }
    assert!(seen > 20);
}

#[test]
fn two_regular_complements_respect_the_gap_bound() {
    for spec in two_regular_specs(10) {
        let m2 = spec.blocks().iter().filter(|b| b.n == 2).count();
        let r = spec.n() - m2;
        if r < 4 {
            continue;
        }
        let out = solve_complement(&spec, 3);
        let bound = (3 * r).div_ceil(4) + 1;
        assert!(
            out.upper >= bound,
            "{spec}: partition of size {} below {bound}",
            out.upper
        );
        if let Some(exact) = out.exact {
            assert!(exact >= bound, "{spec}");
        }
    }
}

#[test]
fn unbalanced_rectangle_raises_the_bound() {
    let spec = BlockSpec::parse("2;4").unwrap();
    let p = complement_partition(&spec).unwrap();
    let unbalanced = p
        .rects
        .iter()
        .any(|r| !is_balanced(r, &spec, 0, Axis::Rows).unwrap());
    let claim = lin_independence_bound(&p, &spec, 0, Axis::Rows).unwrap();
    let rreal = spec_real_rank(&spec, true).unwrap();
    assert_eq!(claim.value.unwrap() > rreal, unbalanced);
}

#[test]
fn balanced_partition_gives_the_plain_rank_bound() {
    // d = 1 everywhere: every sequence is a multiple of the all-one vector
    let spec = BlockSpec::parse("2;5,3").unwrap();
    let p = complement_partition(&spec).unwrap();
    for h in 0..2 {
        let claim = lin_independence_bound(&p, &spec, h, Axis::Cols).unwrap();
        assert_eq!(claim.value, Some(spec_real_rank(&spec, true).unwrap()));
    }
}

#[test]
fn partition_certificates_stay_below_partition_sizes() {
    for spec in unordered_specs(&pairs(2..=6, 1..=4), 2) {
        let p = complement_partition(&spec).unwrap();
        for c in partition_certificates(&p, &spec).unwrap() {
            if let Some(v) = c.value {
                assert!(
                    v <= p.len(),
                    "{spec}: {} claims {v} > {}",
                    c.theorem,
                    p.len()
                );
            }
        }
    }
}

#[test]
fn reports_never_cross() {
    for spec in unordered_specs(&pairs(1..=8, 1..=8), 2) {
        for complemented in [false, true] {
            let r = best_bounds(&spec, complemented).unwrap();
            assert!(
                r.is_consistent(),
                "{spec} complemented={complemented}: {r:?}"
            );
        }
    }
}

#[test]
fn equal_gcd_example() {
    let spec = BlockSpec::parse("6;9,9").unwrap();
    let r = best_bounds(&spec, true).unwrap();
    assert_eq!((r.real_rank, r.lower, r.upper), (14, 15, 16));
    assert!(r
        .claims
        .iter()
        .any(|c| c.theorem == TheoremId::EqualGcd && c.applicable && c.value == Some(15)));
    assert!(r.claims.iter().all(|c| c.side == Side::Complement
        && (c.kind == BoundKind::Lower || c.kind == BoundKind::Upper)));
}

fn spec_and_rectangle() -> impl Strategy<Value = (BlockSpec, Rectangle)> {
    prop::collection::vec((1usize..=8).prop_flat_map(|n| (Just(n), 1..=n)), 1..=3).prop_flat_map(
        |pairs| {
            let spec = BlockSpec::from_pairs(&pairs).unwrap();
            let n = spec.n();
            (
                Just(spec),
                prop::collection::vec(0..n, 0..n),
                prop::collection::vec(0..n, 0..n),
            )
                .prop_map(|(spec, rows, cols)| (spec, Rectangle::new(rows, cols)))
        },
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn divisibility_matches_lattice_enumeration((spec, r) in spec_and_rectangle()) {
        prop_assert_eq!(
            divides_condition(&r, &spec).unwrap(),
            divides_condition_brute_force(&r, &spec, 20, false).unwrap()
        );
    }
}
