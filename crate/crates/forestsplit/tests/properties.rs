use forestsplit::base::{forest_decomposition, to_spanning_plus_residual};
use forestsplit::certify::verify;
use forestsplit::engine::{run, EngineConfig, OutcomeStatus};
use forestsplit::graph::{parse_edge_list, MultiGraph};
use forestsplit::sparsity::{beta_of_set, find_overfull, is_overfull_set};
use proptest::prelude::*;

fn multigraph() -> impl Strategy<Value = MultiGraph> {
    (2usize..=7).prop_flat_map(|n| {
        prop::collection::vec((0..n, 0..n - 1), 0..=14).prop_map(move |pairs| {
            let edges: Vec<_> = pairs.into_iter().map(|(u, v)| (u, if v >= u { v + 1 } else { v })).collect();
            MultiGraph::from_edges(n, &edges).unwrap()
        })
    })
}

fn params() -> impl Strategy<Value = (usize, usize)> {
    (1usize..=2).prop_flat_map(|k| (Just(k), 1..=2 * (k + 1)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn every_outcome_checks_out(g in multigraph(), (k, d) in params()) {
        let out = run(&g, k, d, &EngineConfig::default()).unwrap();
        match out.status {
            OutcomeStatus::ValidDecomposition => prop_assert!(verify(&g, k, d, &out.forests).passed),
            OutcomeStatus::DenseWitness => prop_assert!(beta_of_set(&g, &out.witness_vertices, k, d) < 0),
            OutcomeStatus::OverfullWitness => prop_assert!(is_overfull_set(&g, &out.witness_vertices, k + 1)),
            OutcomeStatus::StuckReport => prop_assert!(false, "stuck on a graph with at most 7 vertices"),
        }
    }

    #[test]
    fn forest_split_matches_overfull_search(g in multigraph(), n in 1usize..=3) {
        prop_assert_eq!(forest_decomposition(&g, n).is_ok(), find_overfull(&g, n).is_none());
    }

    #[test]
    fn spanning_refinement_keeps_every_edge(g in multigraph(), k in 1usize..=2) {
        prop_assume!(g.is_connected());
        if let Ok(r) = to_spanning_plus_residual(&g, k) {
            prop_assert_eq!(r.colour.len(), g.edge_count());
        }
    }

    #[test]
    fn edge_lists_round_trip(g in multigraph()) {
        let back = parse_edge_list(&g.to_edge_list()).unwrap();
        prop_assert_eq!(back.to_edge_list(), g.to_edge_list());
    }
}
