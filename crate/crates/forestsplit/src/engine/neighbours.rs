//! Small children and interesting neighbours of a red component, and the
//! two ways a red path between two of their generators can be cut.

use serde::{Deserialize, Serialize};

use crate::graph::{EdgeId, Vertex};

use super::exchange::{exchange, Exchange};
use super::order::LegalOrder;
use super::state::DecompositionState;
use super::EngineError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum NeighbourKind {
    SmallChild,
    Interesting,
}

/// A neighbour of `host` generated by the arc `(x, x_parent)` of `tree`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RelevantNeighbour {
    pub host: usize,
    pub component: usize,
    pub tree: usize,
    pub x: Vertex,
    pub x_parent: Vertex,
    pub kind: NeighbourKind,
    /// 0 when the neighbour has no edges, else 1.
    pub c: usize,
    /// For interesting neighbours: the only red neighbour of `x_parent` and its edge.
    pub pivot: Option<(Vertex, EdgeId)>,
    /// The arc that generates a small child once the pre-swap is done:
    /// `(x, x_parent)` for small children, `(x_parent, its parent)` otherwise.
    pub bar: (Vertex, Vertex),
}

impl RelevantNeighbour {
    /// The swap turning an interesting neighbour into a small child; `None` for small children.
    pub fn pre_swap(&self) -> Option<Exchange> {
        self.pivot.map(|(_, e)| Exchange { tree: self.tree, tail: self.x, red_edge: e })
    }
}

/// Relevant neighbours of red component `host`, small children first, by generator tail.
pub fn relevant_neighbours(state: &DecompositionState, order: &LegalOrder, host: usize) -> Vec<RelevantNeighbour> {
    let red = state.red();
    let mut out = Vec::new();
    for c in order.children_of(state, host) {
        if red.size(c) <= 1 {
            let (b, arc) = order.generator_of(c).expect("children have generators");
            out.push(RelevantNeighbour {
                host,
                component: c,
                tree: b,
                x: arc.tail,
                x_parent: arc.head,
                kind: NeighbourKind::SmallChild,
                c: red.size(c).min(1),
                pivot: None,
                bar: (arc.tail, arc.head),
            });
        }
    }
    for &x in &red.vertices[host] {
        for b in 0..state.k() {
            if let Some(nb) = interesting_at(state, order, host, x, b) {
                out.push(nb);
            }
        }
    }
    out.sort_by_key(|nb| (nb.kind == NeighbourKind::Interesting, nb.x, nb.tree));
    out
}

fn interesting_at(state: &DecompositionState, order: &LegalOrder, host: usize, x: Vertex, b: usize) -> Option<RelevantNeighbour> {
    let red = state.red();
    let (xp, _) = state.parent(b, x)?;
    if xp == state.root() || !order.in_exploration[xp] {
        return None;
    }
    let l = red.comp_of[xp];
    if l == host {
        return None;
    }
    let reds = state.red_neighbours(xp);
    let [(n, n_edge)] = reds[..] else { return None };
    let (xpp, _) = state.parent(b, xp)?;
    let cz = red.comp_of[xpp];
    if red.size(cz) != 0 {
        return None;
    }
    let (_, gen) = order.generator_of(cz)?;
    if red.comp_of[gen.tail] != l || !state.is_descendant(b, n, x) {
        return None;
    }
    Some(RelevantNeighbour {
        host,
        component: l,
        tree: b,
        x,
        x_parent: xp,
        kind: NeighbourKind::Interesting,
        c: 1,
        pivot: Some((n, n_edge)),
        bar: (xp, xpp),
    })
}

/// The state after the pre-swap of `nb` (unchanged for small children).
pub fn pre_swapped<'g>(state: &DecompositionState<'g>, nb: &RelevantNeighbour) -> Result<DecompositionState<'g>, EngineError> {
    match nb.pre_swap() {
        Some(x) => exchange(state, x),
        None => Ok(state.clone()),
    }
}

/// How the red path from `x` to `y` crosses the subtrees of `x` and `y`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum PairCase {
    /// One path edge leaves the subtree of `x` straight into the subtree of `y`.
    Adjacent { u: Vertex, v: Vertex, edge: EdgeId },
    /// The last edge leaving the subtree of `x`, then the first edge entering the subtree of `y` after it.
    Separated { leave: (Vertex, Vertex, EdgeId), enter: (Vertex, Vertex, EdgeId) },
}

/// Classifies the red path from `nb.x` to `y` in the pre-swapped state `tx`.
/// `y` must share the host component, must not lie below the bar arc, and
/// its parent in the tree must differ from `nb.x_parent`.
pub fn classify_pair(
    original: &DecompositionState,
    tx: &DecompositionState,
    nb: &RelevantNeighbour,
    y: Vertex,
) -> Result<PairCase, EngineError> {
    let b = nb.tree;
    let x = nb.x;
    let red = original.red();
    if red.comp_of[y] != nb.host || y == x {
        return Err(EngineError::Rejected("second vertex is not in the host component".into()));
    }
    if tx.is_descendant(b, y, nb.bar.0) {
        return Err(EngineError::Rejected("second vertex lies below the bar arc".into()));
    }
    match original.parent(b, y) {
        Some((yp, _)) if yp != nb.x_parent => {}
        _ => return Err(EngineError::Rejected("second vertex shares the parent".into())),
    }
    let path = original.red_path(x, y).expect("same component");
    let edge = |i: usize| -> EdgeId {
        let (a, c) = (path[i], path[i + 1]);
        original
            .red_neighbours(a)
            .into_iter()
            .find(|&(w, _)| w == c)
            .map(|(_, e)| e)
            .expect("consecutive path vertices are red neighbours")
    };
    let below_x: Vec<bool> = path.iter().map(|&v| tx.is_descendant(b, v, x)).collect();
    let below_y: Vec<bool> = path.iter().map(|&v| tx.is_descendant(b, v, y)).collect();
    let n = path.len();
    for i in 0..n - 1 {
        if below_x[i] && !below_x[i + 1] && below_y[i + 1] {
            return Ok(PairCase::Adjacent { u: path[i], v: path[i + 1], edge: edge(i) });
        }
    }
    let i = (0..n.saturating_sub(2)).rev().find(|&i| below_x[i] && !below_x[i + 1]);
    let Some(i) = i else { return Err(EngineError::Rejected("path never leaves the subtree of x".into())) };
    let j = (i + 2..n).find(|&j| below_y[j] && !below_y[j - 1]);
    let Some(j) = j else { return Err(EngineError::Rejected("path never enters the subtree of y".into())) };
    Ok(PairCase::Separated {
        leave: (path[i], path[i + 1], edge(i)),
        enter: (path[j - 1], path[j], edge(j - 1)),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::base::Colour::{self, Blue, Red};
    use crate::engine::order::minimal_legal_order;
    use crate::graph::MultiGraph;

    #[test]
    fn small_child_is_found() {
        // Root component 0-1-2-3 (root 1), isolated 4 below 0.
        let edges = [(0, 1), (1, 2), (2, 3), (0, 4), (4, 1), (2, 1), (3, 2)];
        let g = MultiGraph::from_edges(5, &edges).unwrap();
        let colour: Vec<Colour> = vec![Red, Red, Red, Blue(0), Blue(0), Blue(0), Blue(0)];
        let s = DecompositionState::with_root(&g, 1, 2, colour, 1, vec![0, 1, 2]).unwrap();
        let o = minimal_legal_order(&s, 100);
        let nbs = relevant_neighbours(&s, &o, s.root_comp());
        assert_eq!(nbs.len(), 1);
        assert_eq!((nbs[0].kind, nbs[0].c, nbs[0].x, nbs[0].x_parent), (NeighbourKind::SmallChild, 0, 0, 4));
    }

    #[test]
    fn interesting_neighbour_is_found() {
        // Red: R = 0-1-2-3 (root 0), K = {4}, L = 5-6-7-8, Z = {9}.
        // Tree: 3 -> 4 -> 5 -> 9 -> 2 -> 1 -> 0 and 8 -> 7 -> 6 -> 4.
        let red = [(0, 1), (1, 2), (2, 3), (5, 6), (6, 7), (7, 8)];
        let blue = [(1, 0), (2, 1), (3, 4), (4, 5), (5, 9), (9, 2), (6, 4), (7, 6), (8, 7)];
        let edges: Vec<_> = red.iter().chain(blue.iter()).copied().collect();
        let g = MultiGraph::from_edges(10, &edges).unwrap();
        let colour: Vec<Colour> = [Red; 6].into_iter().chain([Blue(0); 9]).collect();
        let s = DecompositionState::with_root(&g, 1, 2, colour, 0, vec![0, 1, 2]).unwrap();
        s.check_invariants().unwrap();
        let o = minimal_legal_order(&s, 100);
        assert_eq!(o.sizes(&s), vec![3, 0, 3, 0]);
        let k = s.red().comp_of[4];
        let nbs = relevant_neighbours(&s, &o, k);
        assert_eq!(nbs.len(), 1);
        let nb = nbs[0];
        assert_eq!(nb.kind, NeighbourKind::Interesting);
        assert_eq!((nb.x, nb.x_parent, nb.pivot, nb.bar), (4, 5, Some((6, 3)), (5, 9)));
        let tx = pre_swapped(&s, &nb).unwrap();
        tx.check_invariants().unwrap();
        assert_eq!(tx.parent(0, 5), Some((9, 10)));
        assert_eq!(tx.parent(0, 4), Some((6, 12)));
        assert!(tx.is_descendant(0, 4, 5));
    }

    /// Root component 0-1-2-3 (root 0), K = 4-5-6 with small children {7}, {8}.
    fn pair_state(five_to: Vertex) -> (MultiGraph, Vec<Colour>) {
        let red = [(0, 1), (1, 2), (2, 3), (4, 5), (5, 6)];
        let blue = [(1, 0), (2, 1), (3, 5), (5, five_to), (4, 7), (7, 1), (6, 8), (8, 2)];
        let edges: Vec<_> = red.iter().chain(blue.iter()).copied().collect();
        let g = MultiGraph::from_edges(9, &edges).unwrap();
        let colour = [Red; 5].into_iter().chain([Blue(0); 8]).collect();
        (g, colour)
    }

    #[test]
    fn pair_cases() {
        for (five_to, adjacent) in [(0, false), (6, true)] {
            let (g, colour) = pair_state(five_to);
            let s = DecompositionState::with_root(&g, 1, 2, colour, 0, vec![0, 1, 2]).unwrap();
            s.check_invariants().unwrap();
            let o = minimal_legal_order(&s, 100);
            let k = s.red().comp_of[4];
            let nbs = relevant_neighbours(&s, &o, k);
            assert_eq!(nbs.iter().map(|nb| nb.x).collect::<Vec<_>>(), vec![4, 6]);
            let case = classify_pair(&s, &s, &nbs[0], 6).unwrap();
            if adjacent {
                assert_eq!(case, PairCase::Adjacent { u: 4, v: 5, edge: 3 });
            } else {
                assert_eq!(case, PairCase::Separated { leave: (4, 5, 3), enter: (5, 6, 4) });
            }
            assert!(classify_pair(&s, &s, &nbs[0], 4).is_err());
        }
    }
}
