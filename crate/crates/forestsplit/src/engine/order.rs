//! Exploration subgraph, legal orders of red components and the auxiliary tree.

use std::cmp::Ordering;
use std::collections::{HashMap, VecDeque};

use crate::graph::{ArcRef, EdgeId, Vertex};

use super::state::DecompositionState;

/// Vertices reachable from the root by red edges and by blue arcs followed
/// from tail to head.
pub fn exploration_subgraph(state: &DecompositionState) -> Vec<bool> {
    let n = state.graph().vertex_count();
    let mut seen = vec![false; n];
    if n == 0 {
        return seen;
    }
    let r = state.root();
    seen[r] = true;
    let mut queue = VecDeque::from([r]);
    while let Some(v) = queue.pop_front() {
        let red = state.red_neighbours(v).into_iter().map(|(w, _)| w);
        let blue = (0..state.k()).filter_map(|b| state.parent(b, v).map(|(p, _)| p));
        for w in red.chain(blue) {
            if !seen[w] {
                seen[w] = true;
                queue.push_back(w);
            }
        }
    }
    seen
}

/// A legal order of the red components inside the exploration subgraph.
#[derive(Clone, Debug)]
pub struct LegalOrder {
    /// Red component ids (as in [`DecompositionState::red`]), root component first.
    pub components: Vec<usize>,
    /// Position of each red component, `None` outside the exploration subgraph.
    pub position: Vec<Option<usize>>,
    /// Generator arc (tree, arc) for every position but the first.
    pub generators: Vec<Option<(usize, ArcRef)>>,
    pub in_exploration: Vec<bool>,
    /// Parent in the auxiliary tree with the connecting edge.
    pub aux_parent: Vec<Option<(Vertex, EdgeId)>>,
    pub aux_depth: Vec<usize>,
    /// False when the search budget ran out and a greedy order was used.
    pub exact: bool,
}

impl LegalOrder {
    /// Order index of `v`; `None` outside the exploration subgraph.
    pub fn index(&self, state: &DecompositionState, v: Vertex) -> Option<usize> {
        self.position[state.red().comp_of[v]]
    }

    pub fn sizes(&self, state: &DecompositionState) -> Vec<usize> {
        self.components.iter().map(|&c| state.red().size(c)).collect()
    }

    /// Reflexive ancestor test in the auxiliary tree.
    pub fn is_aux_ancestor(&self, anc: Vertex, v: Vertex) -> bool {
        let mut cur = v;
        loop {
            if cur == anc {
                return true;
            }
            match self.aux_parent[cur] {
                Some((p, _)) => cur = p,
                None => return false,
            }
        }
    }

    /// Component generated by an arc whose tail lies in component `c`.
    pub fn children_of(&self, state: &DecompositionState, c: usize) -> Vec<usize> {
        self.generators
            .iter()
            .enumerate()
            .filter_map(|(j, g)| g.filter(|(_, a)| state.red().comp_of[a.tail] == c).map(|_| self.components[j]))
            .collect()
    }

    /// Generator arc of red component `c`, if it is not the first one.
    pub fn generator_of(&self, c: usize) -> Option<(usize, ArcRef)> {
        self.position[c].and_then(|j| self.generators[j])
    }
}

/// Compares edge-count sequences lexicographically, padding with zeros.
pub fn compare_sizes(a: &[usize], b: &[usize]) -> Ordering {
    let len = a.len().max(b.len());
    (0..len)
        .map(|i| a.get(i).copied().unwrap_or(0).cmp(&b.get(i).copied().unwrap_or(0)))
        .find(|o| o.is_ne())
        .unwrap_or(Ordering::Equal)
}

/// Components reachable by one blue arc from each red component of the exploration subgraph.
struct Successors {
    comps: Vec<usize>,
    local: HashMap<usize, usize>,
    out: Vec<Vec<usize>>,
    sizes: Vec<usize>,
}

impl Successors {
    fn new(state: &DecompositionState, in_h: &[bool]) -> Self {
        let red = state.red();
        let comps: Vec<usize> = (0..red.len()).filter(|&c| in_h[red.vertices[c][0]]).collect();
        let local: HashMap<usize, usize> = comps.iter().enumerate().map(|(i, &c)| (c, i)).collect();
        let mut out = vec![Vec::new(); comps.len()];
        for (i, &c) in comps.iter().enumerate() {
            for &v in &red.vertices[c] {
                for b in 0..state.k() {
                    if let Some((p, _)) = state.parent(b, v) {
                        let pc = local[&red.comp_of[p]];
                        if pc != i {
                            out[i].push(pc);
                        }
                    }
                }
            }
            out[i].sort_unstable();
            out[i].dedup();
        }
        let sizes = comps.iter().map(|&c| red.size(c)).collect();
        Successors { comps, local, out, sizes }
    }
}

#[derive(Clone, PartialEq, Eq, Hash)]
struct Placed(Vec<u64>);

impl Placed {
    fn new(n: usize) -> Self {
        Placed(vec![0; n.div_ceil(64).max(1)])
    }
    fn has(&self, i: usize) -> bool {
        self.0[i / 64] >> (i % 64) & 1 == 1
    }
    fn set(&mut self, i: usize) {
        self.0[i / 64] |= 1 << (i % 64);
    }
}

struct OrderSearch<'a> {
    succ: &'a Successors,
    memo: HashMap<Placed, (Vec<usize>, Option<usize>)>,
    budget: usize,
    exhausted: bool,
}

impl OrderSearch<'_> {
    fn available(&self, placed: &Placed) -> Vec<usize> {
        let n = self.succ.comps.len();
        let mut avail = vec![false; n];
        for i in 0..n {
            if placed.has(i) {
                for &j in &self.succ.out[i] {
                    if !placed.has(j) {
                        avail[j] = true;
                    }
                }
            }
        }
        (0..n).filter(|&i| avail[i]).collect()
    }

    /// Candidates worth branching on: minimum size, and only those that make
    /// something new available unless none does.
    fn candidates(&self, placed: &Placed) -> Vec<usize> {
        let avail = self.available(placed);
        let Some(min) = avail.iter().map(|&i| self.succ.sizes[i]).min() else { return vec![] };
        let mins: Vec<usize> = avail.iter().copied().filter(|&i| self.succ.sizes[i] == min).collect();
        let opens = |i: usize| self.succ.out[i].iter().any(|&j| !placed.has(j) && !avail.contains(&j));
        let opening: Vec<usize> = mins.iter().copied().filter(|&i| opens(i)).collect();
        if opening.is_empty() {
            vec![mins[0]]
        } else {
            opening
        }
    }

    fn best(&mut self, placed: &Placed) -> Vec<usize> {
        if let Some((suffix, _)) = self.memo.get(placed) {
            return suffix.clone();
        }
        let cands = self.candidates(placed);
        if cands.is_empty() {
            self.memo.insert(placed.clone(), (vec![], None));
            return vec![];
        }
        if self.memo.len() >= self.budget {
            self.exhausted = true;
        }
        let cands = if self.exhausted { vec![cands[0]] } else { cands };
        let mut best: Option<(Vec<usize>, usize)> = None;
        for c in cands {
            let mut next = placed.clone();
            next.set(c);
            let mut seq = vec![self.succ.sizes[c]];
            seq.extend(self.best(&next));
            if best.as_ref().is_none_or(|(b, _)| compare_sizes(&seq, b) == Ordering::Less) {
                best = Some((seq, c));
            }
        }
        let (seq, c) = best.expect("nonempty candidates");
        self.memo.insert(placed.clone(), (seq.clone(), Some(c)));
        seq
    }
}

fn root_placed(state: &DecompositionState, succ: &Successors) -> Placed {
    let mut placed = Placed::new(succ.comps.len());
    placed.set(succ.local[&state.root_comp()]);
    placed
}

/// Lexicographically minimal legal order. The search branches only where
/// the choice can matter and gives up to greedy after `budget` states.
pub fn minimal_legal_order(state: &DecompositionState, budget: usize) -> LegalOrder {
    let in_h = exploration_subgraph(state);
    let succ = Successors::new(state, &in_h);
    let mut search = OrderSearch { succ: &succ, memo: HashMap::new(), budget, exhausted: false };
    let mut placed = root_placed(state, &succ);
    search.best(&placed);
    let mut seq = vec![succ.local[&state.root_comp()]];
    while let Some((_, Some(c))) = search.memo.get(&placed) {
        seq.push(*c);
        placed.set(*c);
    }
    let exact = !search.exhausted;
    build(state, in_h, seq.into_iter().map(|i| succ.comps[i]).collect(), exact)
}

/// Greedy order: always the smallest available component, lowest id on ties.
pub fn greedy_legal_order(state: &DecompositionState) -> LegalOrder {
    let in_h = exploration_subgraph(state);
    let succ = Successors::new(state, &in_h);
    let search = OrderSearch { succ: &succ, memo: HashMap::new(), budget: 0, exhausted: true };
    let mut placed = root_placed(state, &succ);
    let mut seq = vec![succ.local[&state.root_comp()]];
    loop {
        let avail = search.available(&placed);
        let Some(&c) = avail.iter().min_by_key(|&&i| (succ.sizes[i], i)) else { break };
        seq.push(c);
        placed.set(c);
    }
    build(state, in_h, seq.into_iter().map(|i| succ.comps[i]).collect(), true)
}

/// Minimum edge-count sequence over every legal order, by plain enumeration.
pub fn enumerate_minimal_sizes(state: &DecompositionState) -> Vec<usize> {
    fn go(search: &OrderSearch, placed: &mut Placed, prefix: &mut Vec<usize>, total: usize, best: &mut Option<Vec<usize>>) {
        if prefix.len() == total {
            if best.as_ref().is_none_or(|b| compare_sizes(prefix, b) == Ordering::Less) {
                *best = Some(prefix.clone());
            }
            return;
        }
        for c in search.available(placed) {
            let saved = placed.clone();
            placed.set(c);
            prefix.push(search.succ.sizes[c]);
            go(search, placed, prefix, total, best);
            prefix.pop();
            *placed = saved;
        }
    }
    let in_h = exploration_subgraph(state);
    let succ = Successors::new(state, &in_h);
    let search = OrderSearch { succ: &succ, memo: HashMap::new(), budget: 0, exhausted: true };
    let mut placed = root_placed(state, &succ);
    let mut prefix = vec![state.red().size(state.root_comp())];
    let mut best = None;
    go(&search, &mut placed, &mut prefix, succ.comps.len(), &mut best);
    best.expect("at least one legal order exists")
}

fn build(state: &DecompositionState, in_h: Vec<bool>, components: Vec<usize>, exact: bool) -> LegalOrder {
    let red = state.red();
    let n = state.graph().vertex_count();
    let mut position = vec![None; red.len()];
    for (j, &c) in components.iter().enumerate() {
        position[c] = Some(j);
    }
    let mut generators = vec![None; components.len()];
    let mut aux_parent = vec![None; n];
    let mut aux_depth = vec![0; n];
    for (j, &c) in components.iter().enumerate() {
        let entry = if j == 0 {
            state.root()
        } else {
            let mut best: Option<(usize, ArcRef)> = None;
            for v in 0..n {
                let Some(pv) = position[red.comp_of[v]] else { continue };
                if pv >= j {
                    continue;
                }
                for b in 0..state.k() {
                    if let Some(arc) = state.parent_arc(b, v) {
                        if red.comp_of[arc.head] == c {
                            let key = (arc.tail, arc.head, arc.edge);
                            if best.is_none_or(|(_, a)| key < (a.tail, a.head, a.edge)) {
                                best = Some((b, arc));
                            }
                        }
                    }
                }
            }
            let (b, arc) = best.expect("legal order has a generator for every component");
            generators[j] = Some((b, arc));
            aux_parent[arc.head] = Some((arc.tail, arc.edge));
            aux_depth[arc.head] = aux_depth[arc.tail] + 1;
            arc.head
        };
        let mut queue = VecDeque::from([entry]);
        let mut seen = vec![entry];
        while let Some(v) = queue.pop_front() {
            for (w, e) in state.red_neighbours(v) {
                if !seen.contains(&w) {
                    seen.push(w);
                    aux_parent[w] = Some((v, e));
                    aux_depth[w] = aux_depth[v] + 1;
                    queue.push_back(w);
                }
            }
        }
    }
    LegalOrder { components, position, generators, in_exploration: in_h, aux_parent, aux_depth, exact }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::base::Colour::{self, Blue, Red};
    use crate::graph::MultiGraph;

    /// Root component {0,1,2,3} (path), then components reached through tree 0.
    fn sample() -> (MultiGraph, Vec<Colour>) {
        // red: 0-1, 1-2, 2-3 ; 4-5 ; 6 ; 7
        // blue tree rooted at 1: 0->1, 2->1, 3->2, 4->0, 5->4, 6->3, 7->5
        let edges = [(0, 1), (1, 2), (2, 3), (4, 5), (0, 1), (2, 1), (3, 2), (4, 0), (5, 4), (6, 3), (7, 5)];
        let g = MultiGraph::from_edges(8, &edges).unwrap();
        let colour = vec![Red, Red, Red, Red, Blue(0), Blue(0), Blue(0), Blue(0), Blue(0), Blue(0), Blue(0)];
        (g, colour)
    }

    #[test]
    fn exploration_follows_red_edges_and_arcs() {
        let (g, colour) = sample();
        let s = DecompositionState::with_root(&g, 1, 2, colour, 1, vec![0, 1, 2]).unwrap();
        // Arcs point toward the root, so nothing outside the root component is reached.
        let h = exploration_subgraph(&s);
        assert_eq!(h, vec![true, true, true, true, false, false, false, false]);
        let o = minimal_legal_order(&s, 1000);
        assert_eq!(o.components, vec![s.root_comp()]);
    }

    #[test]
    fn orders_prefer_components_that_open_small_ones() {
        // Red: path 0..4 rooted at 2, {5,6}, {7,8}, {9}.
        // Arcs leaving the root component: 0 -> 5 and 4 -> 7; then 6 -> 9.
        let edges = [
            (0, 1), (1, 2), (2, 3), (3, 4), (5, 6), (7, 8), // red
            (0, 5), (4, 7), (6, 9), (5, 2), (7, 2), (1, 2), (3, 2), (8, 7), (9, 2),
        ];
        let g = MultiGraph::from_edges(10, &edges).unwrap();
        let mut colour = vec![Red; 6];
        colour.extend([Blue(0); 9]);
        let s = DecompositionState::with_root(&g, 1, 3, colour, 2, vec![0, 1, 2, 3]).unwrap();
        s.check_invariants().unwrap();
        let exact = minimal_legal_order(&s, 10_000);
        assert_eq!(exact.sizes(&s), vec![4, 1, 0, 1]);
        assert_eq!(enumerate_minimal_sizes(&s), vec![4, 1, 0, 1]);
        assert!(exact.exact);
        // {5,6} has the lower id and opens {9}; greedy happens to agree here.
        assert_eq!(greedy_legal_order(&s).sizes(&s), vec![4, 1, 0, 1]);
        let w = exact.generators[1].unwrap().1;
        assert_eq!((w.tail, w.head), (0, 5));
        assert!(exact.is_aux_ancestor(2, 9));
        assert_eq!(exact.aux_parent[9].map(|p| p.0), Some(6));
    }

    #[test]
    fn greedy_tie_break_can_miss_the_minimum() {
        // Same shape, but the component that opens the isolated vertex has the higher id.
        let edges = [
            (0, 1), (1, 2), (2, 3), (3, 4), (5, 6), (7, 8),
            (0, 5), (4, 7), (8, 9), (5, 2), (7, 2), (1, 2), (3, 2), (6, 5), (9, 2),
        ];
        let g = MultiGraph::from_edges(10, &edges).unwrap();
        let mut colour = vec![Red; 6];
        colour.extend([Blue(0); 9]);
        let s = DecompositionState::with_root(&g, 1, 3, colour, 2, vec![0, 1, 2, 3]).unwrap();
        assert_eq!(greedy_legal_order(&s).sizes(&s), vec![4, 1, 1, 0]);
        assert_eq!(minimal_legal_order(&s, 10_000).sizes(&s), vec![4, 1, 0, 1]);
        assert_eq!(enumerate_minimal_sizes(&s), vec![4, 1, 0, 1]);
    }

    #[test]
    fn size_comparison_pads_with_zeros() {
        assert_eq!(compare_sizes(&[3, 1], &[3, 1, 0]), Ordering::Equal);
        assert_eq!(compare_sizes(&[3, 0, 2], &[3, 1]), Ordering::Less);
    }
}
