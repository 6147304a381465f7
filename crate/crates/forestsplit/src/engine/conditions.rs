//! Sufficient conditions under which recolouring an arc of a modified state
//! would beat the reference state. Only reported, never used for acceptance.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::graph::{ArcRef, Vertex};

use super::order::LegalOrder;
use super::state::DecompositionState;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PathConditions {
    /// Earliest reference index among vertices with a blue path to the arc tail.
    pub reach_index: Option<usize>,
    /// The arc head comes strictly later.
    pub head_later: bool,
    /// Changed arcs outside the reaching set come no earlier.
    pub changes_later: bool,
    /// A same-size replacement component still touches the reaching set.
    pub replacement_reached: bool,
    /// Vertices of grown components are in the reaching set.
    pub growth_reached: bool,
}

impl PathConditions {
    pub fn all_hold(&self) -> bool {
        self.head_later && self.changes_later && self.replacement_reached && self.growth_reached
    }
}

/// Vertices with a blue directed path to `a` in `state`.
fn reaching(state: &DecompositionState, a: Vertex) -> Vec<bool> {
    let g = state.graph();
    let mut seen = vec![false; g.vertex_count()];
    seen[a] = true;
    let mut queue = VecDeque::from([a]);
    while let Some(v) = queue.pop_front() {
        for &e in g.incident(v) {
            if let crate::base::Colour::Blue(b) = state.colour(e) {
                let w = g.opposite(e, v);
                if !seen[w] && state.parent(b, w) == Some((v, e)) {
                    seen[w] = true;
                    queue.push_back(w);
                }
            }
        }
    }
    seen
}

pub fn path_conditions(
    reference: &DecompositionState,
    ref_order: &LegalOrder,
    modified: &DecompositionState,
    arc: ArcRef,
) -> PathConditions {
    let n = reference.graph().vertex_count();
    let in_a = reaching(modified, arc.tail);
    let idx = |v: Vertex| ref_order.index(reference, v);
    let min_idx = |it: &mut dyn Iterator<Item = Vertex>| it.filter_map(idx).min();
    let reach_index = min_idx(&mut (0..n).filter(|&v| in_a[v]));
    let changed = (0..n).filter(|&v| (0..reference.k()).any(|b| reference.parent(b, v) != modified.parent(b, v)));
    let b_index = min_idx(&mut changed.filter(|&v| !in_a[v]));
    let later = |i: Option<usize>| match (i, reach_index) {
        (None, _) => true,
        (Some(_), None) => false,
        (Some(i), Some(r)) => i >= r,
    };
    let head_later = match (idx(arc.head), reach_index) {
        (None, Some(_)) => true,
        (Some(h), Some(r)) => h > r,
        _ => false,
    };
    let Some(ia) = reach_index else {
        return PathConditions { reach_index, head_later, changes_later: later(b_index), replacement_reached: false, growth_reached: false };
    };
    let ref_comp = ref_order.components[ia];
    let ref_size = reference.red().size(ref_comp);
    let w = match ref_order.generators[ia] {
        Some((_, g)) => g.head,
        None => reference.root(),
    };
    let mred = modified.red();
    let l = mred.comp_of[w];
    let same = mred.edges[l] == reference.red().edges[ref_comp];
    let replacement_reached = same || mred.size(l) != ref_size || mred.vertices[l].iter().any(|&v| in_a[v]);
    let growth_reached = reference.red().vertices[ref_comp]
        .iter()
        .filter(|&&v| mred.comp_of[v] == l)
        .all(|&v| mred.size(l) <= ref_size || in_a[v]);
    PathConditions { reach_index, head_later, changes_later: later(b_index), replacement_reached, growth_reached }
}
