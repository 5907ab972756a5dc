use std::collections::HashSet;

use proptest::prelude::*;

use tworound::census::triangles;
use tworound::collage::{
    extract_core, maximal_collages, replay_core_log, Collage, CoreOptions, EdgeOrder,
};
use tworound::colouring::{
    count_crbbbb, count_crrbb, find_triangle_free_colouring, is_t_good, monochromatic_triangles, Colour,
    SearchOutcome, TwoColouring,
};
use tworound::game::{
    first_round_colouring, greedy_extend, online_game, online_game_with_order, replay_transcript, two_round_game,
    verify_transcript, ArrivalMode, FirstRound, GameOutcome, GameParams, StrategySpec, StrategyVariant, TrialSeeds,
};
use tworound::graph::sample_gnp;
use tworound::{Edge, Graph, RngSpec};

fn coloured_graph() -> impl Strategy<Value = TwoColouring> {
    (4usize..=11, any::<u64>(), 0.2f64..0.8).prop_map(|(n, seed, p)| {
        let g = sample_gnp(n, p, &RngSpec::new(seed, 0)).unwrap();
        let mut bit = seed;
        TwoColouring::from_fn(g, |_| {
            bit = bit.rotate_left(7) ^ 0x9e37_79b9_7f4a_7c15;
            if bit & 1 == 0 { Colour::Red } else { Colour::Blue }
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn swapping_colours_keeps_rrbb(phi in coloured_graph()) {
        // A rotation of rrbb stays one after swapping colours.
        prop_assert_eq!(count_crrbb(&phi).unwrap(), count_crrbb(&phi.swapped()).unwrap());
    }

    #[test]
    fn colouring_text_round_trips(phi in coloured_graph()) {
        prop_assert_eq!(TwoColouring::parse(phi.graph(), &phi.to_text()).unwrap(), phi);
    }

    #[test]
    fn all_blue_has_no_rbbbb(n in 4usize..12, seed in any::<u64>()) {
        let g = sample_gnp(n, 0.5, &RngSpec::new(seed, 0)).unwrap();
        let phi = TwoColouring::monochromatic(g, Colour::Blue);
        prop_assert_eq!(count_crbbbb(&phi).unwrap(), 0);
        prop_assert_eq!(count_crrbb(&phi).unwrap(), 0);
    }

    #[test]
    fn search_results_are_proper(n in 4usize..14, seed in any::<u64>()) {
        let g = sample_gnp(n, 0.5, &RngSpec::new(seed, 0)).unwrap();
        if let SearchOutcome::Found(phi) = find_triangle_free_colouring(&g, 1_000_000) {
            prop_assert!(monochromatic_triangles(&phi).unwrap().is_empty());
            let tri: HashSet<Edge> = triangles(&g).into_iter()
                .flat_map(|[a, b, c]| [Edge::new(a, b), Edge::new(a, c), Edge::new(b, c)]).collect();
            for (e, c) in phi.coloured_edges() {
                prop_assert!(tri.contains(&e) || c == Colour::Blue);
            }
        }
    }

    #[test]
    fn collages_partition_the_edges(n in 5usize..40, seed in any::<u64>(), p in 0.05f64..0.4) {
        let g = sample_gnp(n, p, &RngSpec::new(seed, 0)).unwrap();
        let mut seen = HashSet::new();
        for c in maximal_collages(&g) {
            for e in c.host_edges().iter() {
                prop_assert!(seen.insert(e));
            }
        }
        prop_assert_eq!(seen.len(), g.edge_count());
    }

    #[test]
    fn core_logs_replay(n in 20usize..60, seed in any::<u64>()) {
        let g = sample_gnp(n, (n as f64).powf(-0.55), &RngSpec::new(seed, 0)).unwrap();
        let order = EdgeOrder::lexicographic();
        for c in maximal_collages(&g) {
            let out = extract_core(&c, &order, &CoreOptions::unbounded()).unwrap();
            prop_assert_eq!(replay_core_log(&out.log, &order).unwrap(), out.log.edges.clone());
            prop_assert!(out.log.snapshots.iter().all(|s| s.satisfies_density_invariant()));
            prop_assert!(out.core.iter().all(|e| c.host_edges().contains(e)));
        }
    }

    #[test]
    fn greedy_extension_never_leaves_a_monochromatic_triangle(seed in any::<u64>(), q in 0.001f64..0.05) {
        let params = GameParams { n: 40, p: 40f64.powf(-0.55), q, arrival: ArrivalMode::Random };
        let t = two_round_game(&params, &StrategySpec::default(), &TrialSeeds::new(seed, 0)).unwrap();
        if let Some(phi1) = &t.phi1 {
            let ext = greedy_extend(&t.g1, phi1, &t.g2, &t.arrival_order).unwrap();
            match ext.result {
                Ok(phi) => {
                    prop_assert!(t.succeeded());
                    prop_assert!(monochromatic_triangles(&phi).unwrap().is_empty());
                    prop_assert_eq!(phi.graph(), &t.g1.union(&t.g2).unwrap());
                }
                Err(f) => prop_assert_eq!(t.outcome.clone(), GameOutcome::Failure(f)),
            }
        }
        prop_assert!(verify_transcript(&t).is_empty());
    }
}

#[test]
fn k5_is_colourable_and_k6_is_not() {
    assert!(matches!(find_triangle_free_colouring(&Graph::complete(5), 1_000_000), SearchOutcome::Found(_)));
    assert_eq!(find_triangle_free_colouring(&Graph::complete(6), 1_000_000), SearchOutcome::Impossible);
}

#[test]
fn tiny_budget_is_reported() {
    assert!(matches!(
        find_triangle_free_colouring(&Graph::complete(8), 1),
        SearchOutcome::BudgetExhausted { .. } | SearchOutcome::Impossible
    ));
}

#[test]
fn strategies_give_proper_first_round_colourings() {
    for variant in [StrategyVariant::GoodColouring, StrategyVariant::NaiveTriangleFree, StrategyVariant::AllBlueGreedy] {
        let spec = StrategySpec::new(variant, 100_000).unwrap();
        for s in 0..10 {
            let g = sample_gnp(60, 60f64.powf(-0.6), &RngSpec::new(5, s)).unwrap();
            match first_round_colouring(&g, &spec, &RngSpec::new(6, s)).unwrap() {
                FirstRound::Coloured { colouring, .. } => {
                    assert!(monochromatic_triangles(&colouring).unwrap().is_empty(), "{variant:?}");
                    if variant == StrategyVariant::GoodColouring {
                        assert!(is_t_good(&colouring, u64::MAX).unwrap().is_good());
                    }
                }
                FirstRound::Failed(_) => assert_ne!(variant, StrategyVariant::GoodColouring),
            }
        }
    }
}

#[test]
fn good_colouring_discharges_whole_collages() {
    let g = tworound::census::Pattern::named("F0_minus").unwrap().graph;
    let c = Collage::from_graph(&g).unwrap();
    assert_eq!(maximal_collages(&g), vec![c]);
    match first_round_colouring(&g, &StrategySpec::default(), &RngSpec::new(0, 0)).unwrap() {
        FirstRound::Coloured { colouring, routing } => {
            assert_eq!(routing.discharged, 1);
            assert!(is_t_good(&colouring, 1).unwrap().is_good());
        }
        FirstRound::Failed(f) => panic!("{f:?}"),
    }
}

#[test]
fn transcripts_survive_json_and_replay() {
    let params = GameParams { n: 60, p: 60f64.powf(-0.55), q: 0.01, arrival: ArrivalMode::Random };
    let mut outcomes = HashSet::new();
    for s in 0..20 {
        let t = two_round_game(&params, &StrategySpec::default(), &TrialSeeds::new(9, s)).unwrap();
        let back = serde_json::from_str(&serde_json::to_string(&t).unwrap()).unwrap();
        assert_eq!(t, back);
        assert!(replay_transcript(&back).unwrap().ok());
        outcomes.insert(t.succeeded());
    }
    assert_eq!(outcomes.len(), 2, "expected both outcomes over 20 trials");
}

#[test]
fn tampered_transcripts_are_caught() {
    let params = GameParams { n: 60, p: 60f64.powf(-0.55), q: 0.02, arrival: ArrivalMode::Lex };
    let t = (0..50)
        .map(|s| two_round_game(&params, &StrategySpec::default(), &TrialSeeds::new(10, s)).unwrap())
        .find(|t| !t.decisions.is_empty())
        .expect("some trial colours a new edge");
    let mut bad = t.clone();
    bad.decisions[0] = bad.decisions[0].flip();
    assert!(!verify_transcript(&bad).is_empty());
    assert!(!replay_transcript(&bad).unwrap().ok());
    let mut bad = t;
    bad.seeds.trial_stream += 1;
    assert!(!replay_transcript(&bad).unwrap().reproduced);
}

#[test]
fn online_game_fails_on_k6_order() {
    let edges = Graph::complete(6).edges().to_vec();
    let r = online_game_with_order(6, &edges).unwrap();
    assert!(r.failed && r.rounds <= 15);
    let r = online_game(30, 50, &RngSpec::new(0, 0)).unwrap();
    assert!(r.rounds <= 50);
    assert!(online_game(5, 11, &RngSpec::new(0, 0)).is_err());
}
