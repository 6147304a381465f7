//! Blue paths that let a blue edge turn red in exchange for a red edge nearer the root.

use std::collections::{BTreeSet, VecDeque};

use serde::{Deserialize, Serialize};

use crate::base::{insert_edge, Colour};
use crate::graph::{ArcRef, EdgeId, Vertex};

use super::order::LegalOrder;
use super::state::DecompositionState;
use super::EngineError;

/// Blue directed path; every step is an arc of the recorded tree.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpecialPath {
    pub arcs: Vec<(usize, ArcRef)>,
}

impl SpecialPath {
    pub fn start(&self) -> Vertex {
        self.arcs[0].1.tail
    }

    pub fn last(&self) -> (usize, ArcRef) {
        *self.arcs.last().expect("paths have at least one arc")
    }

    pub fn vertices(&self) -> Vec<Vertex> {
        let mut out = vec![self.start()];
        out.extend(self.arcs.iter().map(|(_, a)| a.head));
        out
    }
}

/// Arcs `(w, v)` of any tree entering `v`.
fn child_arcs(state: &DecompositionState, v: Vertex) -> Vec<(usize, ArcRef)> {
    let g = state.graph();
    let mut out = Vec::new();
    for &e in g.incident(v) {
        if let Colour::Blue(b) = state.colour(e) {
            let w = g.opposite(e, v);
            if state.parent(b, w) == Some((v, e)) {
                out.push((b, ArcRef { tail: w, head: v, edge: e }));
            }
        }
    }
    out
}

/// Smallest special path ending with the arc `last`: earliest start
/// component, then no other start strictly above it in the auxiliary tree
/// (shallowest, lowest id), then the shortest path from that start.
pub fn find_minimal_special_path(
    state: &DecompositionState,
    order: &LegalOrder,
    last: (usize, ArcRef),
) -> Option<SpecialPath> {
    let (_, arc) = last;
    let (x, y) = (arc.tail, arc.head);
    if state.parent(last.0, x) != Some((y, arc.edge)) {
        return None;
    }
    let red = state.red();
    if red.comp_of[x] == red.comp_of[y] || !order.in_exploration[x] {
        return None;
    }
    let iy = order.index(state, y)?;
    let n = state.graph().vertex_count();
    // next[w] = first arc of the shortest path from w to x.
    let mut next: Vec<Option<(usize, ArcRef)>> = vec![None; n];
    let mut seen = vec![false; n];
    seen[x] = true;
    seen[y] = true;
    let mut reached = vec![x];
    let mut queue = VecDeque::from([x]);
    while let Some(v) = queue.pop_front() {
        for (b, a) in child_arcs(state, v) {
            let w = a.tail;
            if !seen[w] && order.in_exploration[w] {
                seen[w] = true;
                next[w] = Some((b, a));
                reached.push(w);
                queue.push_back(w);
            }
        }
    }
    let qualifies = |v0: Vertex| {
        let Some(i0) = order.index(state, v0) else { return false };
        iy > i0 && (red.comp_of[v0] != red.comp_of[x] || order.is_aux_ancestor(v0, x))
    };
    let v0 = reached
        .into_iter()
        .filter(|&v| qualifies(v))
        .min_by_key(|&v| (order.index(state, v), order.aux_depth[v], v))?;
    let mut arcs = Vec::new();
    let mut cur = v0;
    while cur != x {
        let (b, a) = next[cur].expect("reached vertices have a path");
        arcs.push((b, a));
        cur = a.head;
    }
    arcs.push(last);
    Some(SpecialPath { arcs })
}

/// Every special path ending with `last`, with no minimality filter. Used by tests.
pub fn all_special_starts(state: &DecompositionState, order: &LegalOrder, last: (usize, ArcRef)) -> BTreeSet<Vertex> {
    let (x, y) = (last.1.tail, last.1.head);
    let red = state.red();
    let mut out = BTreeSet::new();
    let Some(iy) = order.index(state, y) else { return out };
    if red.comp_of[x] == red.comp_of[y] || !order.in_exploration[x] {
        return out;
    }
    // Depth-first over simple paths ending at x.
    fn go(state: &DecompositionState, order: &LegalOrder, v: Vertex, y: Vertex, on_path: &mut Vec<bool>, out: &mut Vec<Vertex>) {
        out.push(v);
        for (_, a) in child_arcs(state, v) {
            if !on_path[a.tail] && a.tail != y && order.in_exploration[a.tail] {
                on_path[a.tail] = true;
                go(state, order, a.tail, y, on_path, out);
                on_path[a.tail] = false;
            }
        }
    }
    let mut on_path = vec![false; state.graph().vertex_count()];
    on_path[x] = true;
    let mut starts = Vec::new();
    go(state, order, x, y, &mut on_path, &mut starts);
    for v0 in starts {
        let Some(i0) = order.index(state, v0) else { continue };
        if iy > i0 && (red.comp_of[v0] != red.comp_of[x] || order.is_aux_ancestor(v0, x)) {
            out.insert(v0);
        }
    }
    out
}

/// Violations of the augmentation postconditions, empty when all hold.
pub fn special_path_violations(
    before: &DecompositionState,
    order: &LegalOrder,
    path: &SpecialPath,
    after: &DecompositionState,
) -> Vec<String> {
    let mut out = Vec::new();
    let v0 = path.start();
    let Some((vm1, e_in)) = order.aux_parent[v0] else {
        return vec!["start has no parent in the auxiliary tree".into()];
    };
    let e_out = path.last().1.edge;
    let m = before.graph().edge_count();
    for e in 0..m {
        let was_red = before.colour(e) == Colour::Red;
        let want_red = (was_red && e != e_in) || e == e_out;
        if (after.colour(e) == Colour::Red) != want_red {
            out.push(format!("red set differs at edge {e}"));
        }
    }
    if !(0..after.k()).any(|b| after.parent(b, v0) == Some((vm1, e_in))) {
        out.push(format!("no arc ({v0}, {vm1}) after augmentation"));
    }
    let i0 = order.index(before, v0);
    for b in 0..before.k() {
        for v in 0..before.graph().vertex_count() {
            let early = matches!((order.index(before, v), i0), (Some(i), Some(j)) if i < j);
            if early && before.parent(b, v) != after.parent(b, v) {
                out.push(format!("arc leaving {v} in tree {b} changed"));
            }
        }
    }
    let blue = |s: &DecompositionState, e: EdgeId| s.colour(e) != Colour::Red;
    let moved: Vec<EdgeId> = (0..m).filter(|&e| blue(before, e) != blue(after, e)).collect();
    let mut expected = vec![e_in, e_out];
    expected.sort_unstable();
    expected.dedup();
    if moved != expected {
        out.push(format!("blue edge set changed by {moved:?}, expected {expected:?}"));
    }
    out
}

/// Red edge to free and the arc it becomes.
fn entry_edge(order: &LegalOrder, state: &DecompositionState, path: &SpecialPath) -> Result<(Vertex, EdgeId), EngineError> {
    let v0 = path.start();
    let Some((vm1, e_in)) = order.aux_parent[v0] else {
        return Err(EngineError::Rejected("special path starts at the root".into()));
    };
    if state.colour(e_in) != Colour::Red {
        return Err(EngineError::Rejected("special path is not minimal: its start is entered by a blue arc".into()));
    }
    Ok((vm1, e_in))
}

/// Turns the last arc red and the edge above the start blue, shifting tree
/// classes along the path or, failing that, along a shortest exchange chain
/// that leaves arcs of earlier components alone.
pub fn augment_special_path<'g>(
    state: &DecompositionState<'g>,
    order: &LegalOrder,
    path: &SpecialPath,
) -> Result<DecompositionState<'g>, EngineError> {
    let (_, e_in) = entry_edge(order, state, path)?;
    let e_out = path.last().1.edge;
    let attempt = |colour: Vec<Colour>| -> Option<DecompositionState<'g>> {
        let next = state.recoloured(colour).ok()?;
        if !next.is_spanning() && state.is_spanning() {
            return None;
        }
        special_path_violations(state, order, path, &next).is_empty().then_some(next)
    };

    let mut colour = state.colours().to_vec();
    colour[e_in] = Colour::Blue(path.arcs[0].0);
    for w in path.arcs.windows(2) {
        colour[w[0].1.edge] = Colour::Blue(w[1].0);
    }
    colour[e_out] = Colour::Red;
    if let Some(next) = attempt(colour) {
        return Ok(next);
    }

    let g = state.graph();
    let m = g.edge_count();
    let i0 = order.index(state, path.start());
    let mut class_of: Vec<Option<usize>> = (0..m)
        .map(|e| match state.colour(e) {
            Colour::Blue(b) if e != e_out => Some(b),
            _ => None,
        })
        .collect();
    let mut frozen = vec![false; m];
    for (e, f) in frozen.iter_mut().enumerate() {
        if let Some((_, a)) = state.arc_of(e) {
            *f = matches!((order.index(state, a.tail), i0), (Some(i), Some(j)) if i < j);
        }
    }
    if insert_edge(g, &mut class_of, state.k(), e_in, &frozen) {
        let colour = class_of.into_iter().map(|c| c.map_or(Colour::Red, Colour::Blue)).collect();
        if let Some(next) = attempt(colour) {
            return Ok(next);
        }
    }
    Err(EngineError::Rejected("no augmentation keeps the earlier arcs in place".into()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::order::minimal_legal_order;
    use crate::graph::MultiGraph;
    use Colour::{Blue, Red};

    /// Red: 0-1-2-3 (root 1) and 5-6. Tree arcs: 0->4->1, 2->1, 3->5->2, 6->5.
    fn sample() -> (MultiGraph, Vec<Colour>) {
        let edges = [(0, 1), (1, 2), (2, 3), (5, 6), (0, 4), (4, 1), (2, 1), (3, 5), (5, 2), (6, 5)];
        let g = MultiGraph::from_edges(7, &edges).unwrap();
        let colour = vec![Red, Red, Red, Red, Blue(0), Blue(0), Blue(0), Blue(0), Blue(0), Blue(0)];
        (g, colour)
    }

    #[test]
    fn single_arc_path_and_augmentation() {
        let (g, colour) = sample();
        let s = DecompositionState::with_root(&g, 1, 2, colour, 1, vec![0, 1, 2]).unwrap();
        s.check_invariants().unwrap();
        let o = minimal_legal_order(&s, 1000);
        assert_eq!(o.sizes(&s), vec![3, 0, 1]);
        // Arc (6, 5) stays inside {5,6}; arc (4, 1) goes from {4} back into the root component.
        let inner = (0, s.parent_arc(0, 6).unwrap());
        assert!(find_minimal_special_path(&s, &o, inner).is_none());
        let back = (0, s.parent_arc(0, 4).unwrap());
        assert!(find_minimal_special_path(&s, &o, back).is_none());
        // Arc (3, 5): from the root component into {5,6}, the path [3, 5] is special.
        let into = (0, s.parent_arc(0, 3).unwrap());
        let p = find_minimal_special_path(&s, &o, into).unwrap();
        assert_eq!(p.vertices(), vec![3, 5]);
        assert_eq!(all_special_starts(&s, &o, into).into_iter().collect::<Vec<_>>(), vec![3]);
        let t = augment_special_path(&s, &o, &p).unwrap();
        t.check_invariants().unwrap();
        assert!(special_path_violations(&s, &o, &p, &t).is_empty());
        // Edge 2-3 became blue, 3-5 red: the root component shrank.
        assert_eq!(t.colour(2), Blue(0));
        assert_eq!(t.colour(7), Red);
        assert_eq!(t.red().size(t.root_comp()), 2);
    }
}
