//! Swapping a blue arc with a red edge.

use crate::base::Colour;
use crate::graph::{forest_path, is_forest, EdgeId, Vertex};

use super::state::DecompositionState;
use super::EngineError;

/// One primitive swap: the arc leaving `tail` in tree `tree` becomes red and
/// `red_edge` joins the tree.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub struct Exchange {
    pub tree: usize,
    pub tail: Vertex,
    pub red_edge: EdgeId,
}

fn recolour(state: &DecompositionState, x: Exchange, arc_edge: EdgeId) -> Vec<Colour> {
    let mut colour = state.colours().to_vec();
    colour[arc_edge] = Colour::Red;
    colour[x.red_edge] = Colour::Blue(x.tree);
    colour
}

/// Red edges stay a forest after the swap.
pub fn red_stays_forest(state: &DecompositionState, x: Exchange) -> bool {
    let Some((_, arc_edge)) = state.parent(x.tree, x.tail) else { return false };
    let g = state.graph();
    let red = (0..g.edge_count()).filter(|&e| e != x.red_edge && (state.colour(e) == Colour::Red || e == arc_edge));
    is_forest(g, red)
}

/// The tree stays a forest after the swap (checked from scratch).
pub fn condition_forest(state: &DecompositionState, x: Exchange) -> bool {
    let Some((_, arc_edge)) = state.parent(x.tree, x.tail) else { return false };
    if state.colour(x.red_edge) != Colour::Red {
        return false;
    }
    let g = state.graph();
    let class = (0..g.edge_count())
        .filter(|&e| e != arc_edge && (state.colour(e) == Colour::Blue(x.tree) || e == x.red_edge));
    is_forest(g, class)
}

/// The arc lies on the tree path between the ends of the red edge.
pub fn condition_cycle(state: &DecompositionState, x: Exchange) -> bool {
    let Some((_, arc_edge)) = state.parent(x.tree, x.tail) else { return false };
    let g = state.graph();
    let (v, w) = g.endpoints(x.red_edge);
    let class: Vec<EdgeId> = (0..g.edge_count()).filter(|&e| state.colour(e) == Colour::Blue(x.tree)).collect();
    matches!(forest_path(g, &class, v, w), Ok(Some(p)) if p.contains(&arc_edge))
}

/// Exactly one end of the red edge lies in the subtree of the tail.
pub fn condition_descendant(state: &DecompositionState, x: Exchange) -> bool {
    if state.parent(x.tree, x.tail).is_none() {
        return false;
    }
    let (v, w) = state.graph().endpoints(x.red_edge);
    state.is_descendant(x.tree, v, x.tail) != state.is_descendant(x.tree, w, x.tail)
}

/// Performs the swap. Arcs are recomputed toward the root, which reverses
/// the tree path from the red edge to the tail.
pub fn exchange<'g>(state: &DecompositionState<'g>, x: Exchange) -> Result<DecompositionState<'g>, EngineError> {
    let Some((_, arc_edge)) = state.parent(x.tree, x.tail) else {
        return Err(EngineError::Rejected(format!("vertex {} has no arc in tree {}", x.tail, x.tree)));
    };
    if state.colour(x.red_edge) != Colour::Red {
        return Err(EngineError::Rejected(format!("edge {} is not red", x.red_edge)));
    }
    if !condition_descendant(state, x) {
        return Err(EngineError::Rejected(format!(
            "edge {} does not leave the subtree of {} in tree {}",
            x.red_edge, x.tail, x.tree
        )));
    }
    if !red_stays_forest(state, x) {
        return Err(EngineError::Rejected("swap would close a red cycle".into()));
    }
    state.recoloured(recolour(state, x, arc_edge))
}

/// Applies swaps in order; the first failure aborts.
pub fn exchange_all<'g>(state: &DecompositionState<'g>, steps: &[Exchange]) -> Result<DecompositionState<'g>, EngineError> {
    let mut cur = state.clone();
    for &x in steps {
        cur = exchange(&cur, x)?;
    }
    Ok(cur)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::base::to_spanning_plus_residual;
    use crate::graph::MultiGraph;
    use crate::instances;
    use rand::{Rng, SeedableRng};

    fn all_swaps(s: &DecompositionState) -> Vec<Exchange> {
        let mut out = Vec::new();
        for tree in 0..s.k() {
            for tail in 0..s.graph().vertex_count() {
                for red_edge in 0..s.graph().edge_count() {
                    if s.parent(tree, tail).is_some() && s.colour(red_edge) == Colour::Red {
                        out.push(Exchange { tree, tail, red_edge });
                    }
                }
            }
        }
        out
    }

    #[test]
    fn swap_on_small_state() {
        // Six vertices: tree path 0-1-2-3-4-5 rooted at 0, red edges 1-4 and 2-5.
        let g = MultiGraph::from_edges(6, &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (1, 4), (2, 5)]).unwrap();
        let colour = vec![Colour::Blue(0); 5].into_iter().chain([Colour::Red; 2]).collect();
        let s = DecompositionState::with_root(&g, 1, 3, colour, 0, vec![]).unwrap();
        let x = Exchange { tree: 0, tail: 3, red_edge: 5 };
        assert!(condition_descendant(&s, x) && condition_cycle(&s, x) && condition_forest(&s, x));
        let t = exchange(&s, x).unwrap();
        t.check_invariants().unwrap();
        assert_eq!(t.colour(2), Colour::Red);
        assert_eq!(t.colour(5), Colour::Blue(0));
        let changed: Vec<_> = (0..7).filter(|&e| s.colour(e) != t.colour(e)).collect();
        assert_eq!(changed, vec![2, 5]);
        // 4 now hangs off 1, and 3 off 4.
        assert_eq!(t.parent(0, 4), Some((1, 5)));
        assert_eq!(t.parent(0, 3), Some((4, 3)));
        // Both ends below the tail.
        let bad = Exchange { tree: 0, tail: 1, red_edge: 6 };
        assert!(!condition_descendant(&s, bad));
        assert!(exchange(&s, bad).is_err());
    }

    #[test]
    fn swap_conditions_agree() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        let mut checked = 0;
        for _ in 0..60 {
            let n = rng.gen_range(3..8);
            let m = rng.gen_range(n..3 * n);
            let g = instances::random_multigraph(n, m, &mut rng);
            if !g.is_connected() {
                continue;
            }
            let k = rng.gen_range(1..3);
            let Ok(r) = to_spanning_plus_residual(&g, k) else { continue };
            let s = DecompositionState::with_root(&g, k, 2, r.colour, 0, vec![]).unwrap();
            for x in all_swaps(&s) {
                if !red_stays_forest(&s, x) {
                    continue;
                }
                let c = condition_descendant(&s, x);
                assert_eq!(condition_forest(&s, x), c);
                if r.spanning {
                    assert_eq!(condition_cycle(&s, x), c);
                }
                if c {
                    exchange(&s, x).unwrap().check_invariants().unwrap();
                }
                checked += 1;
            }
        }
        assert!(checked > 100);
    }
}
