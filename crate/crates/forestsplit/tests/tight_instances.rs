//! Graphs saturated right up to the sparsity limit, solved without the oracle.

use forestsplit::certify::verify;
use forestsplit::engine::{run, EngineConfig, OutcomeStatus};
use forestsplit::graph::MultiGraph;
use forestsplit::sparsity::{find_overfull, min_beta_subgraph};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// A random spanning tree, then random edges kept while the graph stays sparse.
fn saturate(n: usize, k: usize, d: usize, rng: &mut ChaCha8Rng, simple: bool) -> MultiGraph {
    let mut edges: Vec<(usize, usize)> = (1..n).map(|v| (rng.gen_range(0..v), v)).collect();
    for _ in 0..20 * n {
        let (u, v) = (rng.gen_range(0..n), rng.gen_range(0..n));
        if u == v || (simple && edges.iter().any(|&e| e == (u, v) || e == (v, u))) {
            continue;
        }
        edges.push((u, v));
        let g = MultiGraph::from_edges(n, &edges).unwrap();
        if min_beta_subgraph(&g, k, d).value < 0 || find_overfull(&g, k + 1).is_some() {
            edges.pop();
        }
    }
    MultiGraph::from_edges(n, &edges).unwrap()
}

#[test]
fn saturated_graphs_decompose() {
    let cfg = EngineConfig { oracle_threshold: 0, debug_asserts: true, ..EngineConfig::default() };
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for (k, d) in [(1, 1), (1, 2), (1, 4), (2, 2), (2, 6), (3, 3)] {
        for i in 0..15 {
            let g = saturate(rng.gen_range(6..=12), k, d, &mut rng, i % 2 == 0);
            let out = run(&g, k, d, &cfg).unwrap();
            assert_eq!(out.status, OutcomeStatus::ValidDecomposition, "k={k} d={d}\n{}", g.to_edge_list());
            assert!(verify(&g, k, d, &out.forests).passed);
            assert_eq!(out.stats.monotonicity_violations, 0);
        }
    }
}
