//! Property tests over random passages, partitions and frontier sets.

use proptest::collection::vec;
use proptest::prelude::*;

use polyseg::{
    build_vertex_graph, enumerate_shapes, match_frontiers, polytope_cost, segment_song,
    BeatSequence, Chord, CostConfig, Engine, PolytopeShape, RelationSystem, SegmentationConfig,
    SystemKind,
};

fn chord_index() -> impl Strategy<Value = u8> {
    0u8..24
}

fn frontier_set() -> impl Strategy<Value = Vec<usize>> {
    proptest::collection::btree_set(2usize..=60, 0..8).prop_map(|s| s.into_iter().collect())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn passage_costs_are_transposition_invariant(
        indices in vec(chord_index(), 4..=10),
        step in 0i32..24,
    ) {
        let passage: Vec<Chord> = indices.iter().map(|&i| Chord::from_index(i)).collect();
        let circle = RelationSystem::triad_circle();
        let g = circle.step_relation(step).unwrap();
        let moved: Vec<Chord> = passage.iter().map(|&c| circle.apply(g, c).unwrap()).collect();
        for shape in enumerate_shapes(passage.len()) {
            let graph = build_vertex_graph(&shape);
            let original = polytope_cost(&passage, &graph, &circle).unwrap().raw_cost();
            let transposed = polytope_cost(&moved, &graph, &circle).unwrap().raw_cost();
            prop_assert_eq!(original, transposed);
        }
    }

    #[test]
    fn square_contrast_is_antecedent_independent_on_the_circle(
        indices in vec(chord_index(), 4),
    ) {
        // testing the fourth element through a_2 or a_3 must agree
        let circle = RelationSystem::triad_circle();
        let c: Vec<Chord> = indices.iter().map(|&i| Chord::from_index(i)).collect();
        let via_a3 = circle.relation_between(c[0], c[1]) == circle.relation_between(c[2], c[3]);
        let via_a2 = circle.relation_between(c[0], c[2]) == circle.relation_between(c[1], c[3]);
        prop_assert_eq!(via_a3, via_a2);
    }

    #[test]
    fn dp_equals_brute_force_on_short_sequences(
        indices in vec(chord_index(), 4..=12),
        pa in prop_oneof![Just(0.0), Just(3.0)],
        pr in prop_oneof![Just(0.0), Just(0.1)],
    ) {
        let sequence = BeatSequence::new(
            indices.iter().map(|&i| Chord::from_index(i)).collect(),
        ).unwrap();
        let config = SegmentationConfig::new(
            CostConfig::new(SystemKind::TriadCircle, pa, pr),
        );
        let engine = Engine::new(config.cost.clone(), config.max_segment).unwrap();
        let chords = sequence.chords();
        // enumerate boundary subsets directly
        let total = chords.len();
        let mut best = f64::INFINITY;
        for mask in 0..(1u32 << (total - 1)) {
            let mut bounds = Vec::new();
            let mut prev = 0usize;
            let mut ok = true;
            for t in 1..=total {
                if t == total || mask >> (t - 1) & 1 == 1 {
                    let size = t - prev;
                    if size < config.min_segment || size > config.max_segment {
                        ok = false;
                        break;
                    }
                    bounds.push((prev, t));
                    prev = t;
                }
            }
            if !ok {
                continue;
            }
            let mut acc = 0.0;
            for (start, end) in bounds {
                acc += engine.segment_cost(&chords[start..end]);
            }
            if acc < best {
                best = acc;
            }
        }
        let dp = segment_song(&sequence, &config).unwrap();
        prop_assert_eq!(dp.total_cost, best);
    }

    #[test]
    fn frontiers_are_strictly_increasing_and_in_range(
        indices in vec(chord_index(), 2..=24),
    ) {
        let total = indices.len();
        let sequence = BeatSequence::new(
            indices.iter().map(|&i| Chord::from_index(i)).collect(),
        ).unwrap();
        let result = segment_song(&sequence, &SegmentationConfig::default()).unwrap();
        let mut last = 1usize;
        for &f in &result.frontiers {
            prop_assert!(f > last && f <= total);
            last = f;
        }
        prop_assert_eq!(result.segments.iter().map(|s| s.end - s.start + 1).sum::<usize>(), total);
    }

    #[test]
    fn matching_counts_swap_with_the_roles(
        est in frontier_set(),
        reference in frontier_set(),
        tol in 0usize..5,
    ) {
        let a = match_frontiers(&est, &reference, tol).unwrap();
        let b = match_frontiers(&reference, &est, tol).unwrap();
        prop_assert_eq!(a.true_positives, b.true_positives);
        prop_assert_eq!(a.false_positives, b.false_negatives);
        prop_assert_eq!(a.false_negatives, b.false_positives);
    }

    #[test]
    fn widening_the_tolerance_never_loses_matches(
        est in frontier_set(),
        reference in frontier_set(),
    ) {
        let mut last = 0usize;
        for tol in 0..6 {
            let counts = match_frontiers(&est, &reference, tol).unwrap();
            prop_assert!(counts.true_positives >= last);
            last = counts.true_positives;
        }
    }

    #[test]
    fn nested_text_round_trips_for_random_sizes(size in 1usize..=20) {
        for shape in enumerate_shapes(size) {
            let text = shape.nested_representation();
            let parsed = PolytopeShape::parse_nested(&text).unwrap();
            let reparsed = build_vertex_graph(&parsed);
            let direct = build_vertex_graph(&shape);
            prop_assert_eq!(reparsed.vertices(), direct.vertices());
        }
    }
}
