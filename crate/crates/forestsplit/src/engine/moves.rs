//! The move catalogue and the potential that every accepted move lowers.

use std::cmp::Ordering;
use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::base::Colour;
use crate::graph::{EdgeId, Vertex};

use super::exchange::{condition_descendant, exchange, exchange_all, red_stays_forest, Exchange};
use super::neighbours::{classify_pair, pre_swapped, relevant_neighbours, NeighbourKind, PairCase, RelevantNeighbour};
use super::order::{compare_sizes, minimal_legal_order, LegalOrder};
use super::special::{augment_special_path, find_minimal_special_path};
use super::state::{DecompositionState, Residue};
use super::{EngineConfig, EngineError};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum MoveKind {
    SpecialPath,
    SingleExchange,
    CompositeSequence,
}

/// A replayable move: swaps in order, then optionally a special path ending
/// with the arc that leaves `tail` in `tree` at that point.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Move {
    pub kind: MoveKind,
    pub label: String,
    pub steps: Vec<Exchange>,
    pub special: Option<(usize, Vertex)>,
}

impl Move {
    pub fn apply<'g>(&self, state: &DecompositionState<'g>, cfg: &EngineConfig) -> Result<DecompositionState<'g>, EngineError> {
        let cur = exchange_all(state, &self.steps)?;
        match self.special {
            None => Ok(cur),
            Some((tree, tail)) => {
                let order = minimal_legal_order(&cur, cfg.order_budget);
                let arc = cur
                    .parent_arc(tree, tail)
                    .ok_or_else(|| EngineError::Rejected(format!("vertex {tail} has no arc in tree {tree}")))?;
                let path = find_minimal_special_path(&cur, &order, (tree, arc))
                    .ok_or_else(|| EngineError::Rejected("no special path for the arc".into()))?;
                augment_special_path(&cur, &order, &path)
            }
        }
    }
}

/// Residue first, then legal-order sizes relative to a fixed root component.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Potential {
    pub residue: Residue,
    pub order_sizes: Vec<usize>,
}

impl Potential {
    pub fn of(state: &DecompositionState, order: &LegalOrder) -> Self {
        Potential { residue: state.residue(), order_sizes: order.sizes(state) }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Improvement {
    Residue,
    Order,
}

/// Whether `after` is strictly better than `before` (whose potential is `pot`).
pub fn improvement(before: &DecompositionState, pot: &Potential, after: &DecompositionState, cfg: &EngineConfig) -> Option<Improvement> {
    match after.residue().cmp(&pot.residue) {
        Ordering::Less => Some(Improvement::Residue),
        Ordering::Greater => None,
        Ordering::Equal => {
            if after.root() != before.root() || !after.root_component_intact() {
                return None;
            }
            let sizes = minimal_legal_order(after, cfg.order_budget).sizes(after);
            (compare_sizes(&sizes, &pot.order_sizes) == Ordering::Less).then_some(Improvement::Order)
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct MoveStats {
    pub candidates_tried: u64,
    pub augmentations: u64,
    pub augmentation_failures: u64,
    pub composite_nodes: u64,
}

pub struct Found<'g> {
    pub mv: Move,
    pub next: DecompositionState<'g>,
    pub gain: Improvement,
}

struct Search<'s, 'g> {
    state: &'s DecompositionState<'g>,
    order: &'s LegalOrder,
    pot: Potential,
    cfg: &'s EngineConfig,
    stats: &'s mut MoveStats,
}

impl<'g> Search<'_, 'g> {
    fn evaluate(&mut self, mv: Move) -> Option<Found<'g>> {
        self.stats.candidates_tried += 1;
        if mv.special.is_some() {
            self.stats.augmentations += 1;
        }
        match mv.apply(self.state, self.cfg) {
            Ok(next) => {
                let gain = improvement(self.state, &self.pot, &next, self.cfg)?;
                Some(Found { mv, next, gain })
            }
            Err(_) => {
                if mv.special.is_some() {
                    self.stats.augmentation_failures += 1;
                }
                None
            }
        }
    }

    /// Arcs between different red components whose recolouring keeps the residue.
    fn special_candidates(&self, state: &DecompositionState, order: &LegalOrder) -> Vec<(usize, Vertex)> {
        let red = state.red();
        let residue = state.residue();
        let mut out = Vec::new();
        for x in 0..state.graph().vertex_count() {
            if !order.in_exploration[x] {
                continue;
            }
            for b in 0..state.k() {
                let Some(arc) = state.parent_arc(b, x) else { continue };
                if red.comp_of[x] == red.comp_of[arc.head] {
                    continue;
                }
                let (Some(ix), Some(iy)) = (order.index(state, x), order.index(state, arc.head)) else { continue };
                if state.residue_with(arc.edge) == residue {
                    out.push((ix, iy, x, arc.head, b));
                }
            }
        }
        out.sort_unstable();
        out.into_iter().map(|(_, _, x, _, b)| (b, x)).collect()
    }

    fn special_paths(&mut self) -> Option<Found<'g>> {
        for (tree, tail) in self.special_candidates(self.state, self.order) {
            let arc = self.state.parent_arc(tree, tail).expect("candidate arcs exist");
            if find_minimal_special_path(self.state, self.order, (tree, arc)).is_none() {
                continue;
            }
            let mv = Move { kind: MoveKind::SpecialPath, label: "special path".into(), steps: vec![], special: Some((tree, tail)) };
            if let Some(f) = self.evaluate(mv) {
                return Some(f);
            }
        }
        None
    }

    fn named(&mut self) -> Option<Found<'g>> {
        let root_comp = self.state.root_comp();
        for &host in &self.order.components {
            let nbs = relevant_neighbours(self.state, self.order, host);
            for nb in &nbs {
                let candidates = if host == root_comp { self.root_moves(nb) } else { self.single_neighbour_moves(nb) };
                for mv in candidates {
                    if let Some(f) = self.evaluate(mv) {
                        return Some(f);
                    }
                }
            }
            if host == root_comp {
                continue;
            }
            for mv in self.pair_moves(&nbs) {
                if let Some(f) = self.evaluate(mv) {
                    return Some(f);
                }
            }
            for mv in self.triple_moves(&nbs) {
                if let Some(f) = self.evaluate(mv) {
                    return Some(f);
                }
            }
        }
        None
    }

    fn pre(nb: &RelevantNeighbour) -> Vec<Exchange> {
        nb.pre_swap().into_iter().collect()
    }

    fn composite(label: &str, steps: Vec<Exchange>, special: Option<(usize, Vertex)>) -> Move {
        Move { kind: MoveKind::CompositeSequence, label: label.into(), steps, special }
    }

    /// A neighbour of the root component: cut the red path from `x` to the root
    /// where it leaves the subtree of the bar arc.
    fn root_moves(&self, nb: &RelevantNeighbour) -> Vec<Move> {
        let Ok(tx) = pre_swapped(self.state, nb) else { return vec![] };
        let Some(path) = tx.red_path(nb.x, tx.root()) else { return vec![] };
        let Some(i) = path.iter().position(|&v| !tx.is_descendant(nb.tree, v, nb.bar.0)) else { return vec![] };
        if i == 0 {
            return vec![];
        }
        let Some(e) = red_edge_between(&tx, path[i - 1], path[i]) else { return vec![] };
        let mut steps = Self::pre(nb);
        steps.push(Exchange { tree: nb.tree, tail: nb.bar.0, red_edge: e });
        vec![Self::composite("root neighbour swap", steps, None)]
    }

    fn single_neighbour_moves(&self, nb: &RelevantNeighbour) -> Vec<Move> {
        let mut out = Vec::new();
        if nb.kind == NeighbourKind::Interesting {
            out.push(Self::composite("interesting neighbour path", Self::pre(nb), Some((nb.tree, nb.bar.0))));
        }
        for (_, e) in self.state.red_neighbours(nb.x) {
            let mut steps = Self::pre(nb);
            steps.push(Exchange { tree: nb.tree, tail: nb.bar.0, red_edge: e });
            out.push(Self::composite("leaf swap", steps, None));
        }
        out
    }

    fn pair_moves(&self, nbs: &[RelevantNeighbour]) -> Vec<Move> {
        let mut out = Vec::new();
        for nx in nbs {
            let Ok(tx) = pre_swapped(self.state, nx) else { continue };
            for ny in nbs {
                if ny == nx || ny.tree != nx.tree {
                    continue;
                }
                let Ok(case) = classify_pair(self.state, &tx, nx, ny.x) else { continue };
                let b = nx.tree;
                let pre_x = Self::pre(nx);
                match case {
                    PairCase::Adjacent { edge, .. } => {
                        let mut steps = pre_x.clone();
                        steps.push(Exchange { tree: b, tail: nx.bar.0, red_edge: edge });
                        steps.extend(Self::pre(ny));
                        out.push(Self::composite("adjacent pair", steps, Some((b, ny.bar.0))));
                        out.extend(self.bad_component_moves(nx, ny, &tx));
                    }
                    PairCase::Separated { leave, enter } => {
                        let mut steps = pre_x.clone();
                        steps.push(Exchange { tree: b, tail: nx.bar.0, red_edge: leave.2 });
                        out.push(Self::composite("separated pair", steps.clone(), Some((b, ny.x))));
                        steps.extend(Self::pre(ny));
                        out.push(Self::composite("separated pair", steps, Some((b, ny.bar.0))));
                        if let Some((_, pivot)) = ny.pivot {
                            let mut steps = pre_x.clone();
                            steps.push(Exchange { tree: b, tail: nx.bar.0, red_edge: pivot });
                            steps.push(Exchange { tree: b, tail: ny.x, red_edge: enter.2 });
                            out.push(Self::composite("separated pair", steps, Some((b, ny.x))));
                        }
                    }
                }
            }
        }
        out
    }

    /// Steps moving the bar arc of `from` onto the edges next to `to`, as in a
    /// chain of three neighbours in one tree.
    fn chain_step(&self, cur: &DecompositionState, from: &RelevantNeighbour, to: &RelevantNeighbour) -> Option<Vec<Exchange>> {
        let b = from.tree;
        let (_, n_to_edge) = single_red_neighbour(cur, to.x)?;
        match classify_pair(self.state, cur, from, to.x).ok()? {
            PairCase::Separated { .. } => {
                let (_, pivot) = to.pivot?;
                Some(vec![
                    Exchange { tree: b, tail: from.bar.0, red_edge: pivot },
                    Exchange { tree: b, tail: to.x, red_edge: n_to_edge },
                ])
            }
            PairCase::Adjacent { .. } => {
                let mut steps = vec![Exchange { tree: b, tail: from.bar.0, red_edge: n_to_edge }];
                if let Some((_, pivot)) = to.pivot {
                    steps.push(Exchange { tree: b, tail: to.x, red_edge: pivot });
                }
                Some(steps)
            }
        }
    }

    fn triple_moves(&self, nbs: &[RelevantNeighbour]) -> Vec<Move> {
        let mut out = Vec::new();
        for nx in nbs {
            for ny in nbs {
                for nz in nbs {
                    let distinct = nx != ny && ny != nz && nx != nz;
                    if !distinct || nx.tree != ny.tree || ny.tree != nz.tree {
                        continue;
                    }
                    let Ok(tx) = pre_swapped(self.state, nx) else { continue };
                    let Some(first) = self.chain_step(&tx, nx, ny) else { continue };
                    let Ok(t1) = exchange_all(&tx, &first) else { continue };
                    let Some(second) = self.chain_step(&t1, ny, nz) else { continue };
                    let mut steps = Self::pre(nx);
                    steps.extend(first);
                    steps.extend(second);
                    out.push(Self::composite("three neighbours", steps, Some((nx.tree, nz.bar.0))));
                }
            }
        }
        out
    }

    /// `nx` has one edge, `ny` none, and they meet on one path edge: reroute
    /// around the last arc into `ny.x` on the tree path from its red neighbour.
    fn bad_component_moves(&self, nx: &RelevantNeighbour, ny: &RelevantNeighbour, tx: &DecompositionState) -> Vec<Move> {
        let b = nx.tree;
        let mut out = Vec::new();
        let Some((n_y, n_y_edge)) = single_red_neighbour(self.state, ny.x) else { return out };
        let chain = self.state.ancestors(b, n_y);
        let Some(pos) = chain.iter().position(|&v| v == ny.x) else { return out };
        if pos == 0 {
            return out;
        }
        let z = chain[pos - 1];
        let pre_x = Self::pre(nx);
        let mut base = pre_x.clone();
        base.push(Exchange { tree: b, tail: nx.bar.0, red_edge: n_y_edge });
        for (_, e) in self.state.red_neighbours(z) {
            let mut steps = base.clone();
            steps.push(Exchange { tree: b, tail: z, red_edge: e });
            out.push(Self::composite("bad component", steps, Some((b, ny.x))));
            out.push(Self::composite("bad component", vec![Exchange { tree: b, tail: z, red_edge: e }], None));
        }
        if let Ok(case) = classify_pair(self.state, tx, nx, z) {
            match case {
                PairCase::Adjacent { edge, .. } => {
                    let mut steps = pre_x.clone();
                    steps.push(Exchange { tree: b, tail: nx.bar.0, red_edge: edge });
                    steps.push(Exchange { tree: b, tail: z, red_edge: n_y_edge });
                    out.push(Self::composite("bad component", steps, Some((b, ny.x))));
                }
                PairCase::Separated { leave, enter } => {
                    let mut steps = pre_x.clone();
                    steps.push(Exchange { tree: b, tail: nx.bar.0, red_edge: leave.2 });
                    out.push(Self::composite("bad component", steps, Some((b, ny.x))));
                    let mut steps = base.clone();
                    steps.push(Exchange { tree: b, tail: z, red_edge: enter.2 });
                    out.push(Self::composite("bad component", steps, Some((b, ny.x))));
                }
            }
        }
        out
    }

    fn single_exchanges(&mut self) -> Option<Found<'g>> {
        let g = self.state.graph();
        let red: Vec<EdgeId> = (0..g.edge_count()).filter(|&e| self.state.colour(e) == Colour::Red).collect();
        for tree in 0..self.state.k() {
            for tail in 0..g.vertex_count() {
                if self.state.parent(tree, tail).is_none() {
                    continue;
                }
                for &red_edge in &red {
                    let x = Exchange { tree, tail, red_edge };
                    if !condition_descendant(self.state, x) || !red_stays_forest(self.state, x) {
                        continue;
                    }
                    let mv = Move { kind: MoveKind::SingleExchange, label: "single swap".into(), steps: vec![x], special: None };
                    if let Some(f) = self.evaluate(mv) {
                        return Some(f);
                    }
                }
            }
        }
        None
    }

    /// Swaps drawn from a small vocabulary around each component, up to the
    /// configured depth, each prefix followed by the available special paths.
    fn composite_search(&mut self) -> Option<Found<'g>> {
        if self.cfg.composite_depth == 0 {
            return None;
        }
        for &host in &self.order.components.clone() {
            let (tails, edges) = self.vocabulary(host);
            if tails.is_empty() || edges.is_empty() {
                continue;
            }
            let mut budget = self.cfg.composite_budget;
            let mut seen = HashSet::new();
            let mut prefix = Vec::new();
            if let Some(f) = self.composite_dfs(self.state.clone(), &tails, &edges, &mut prefix, &mut seen, &mut budget) {
                return Some(f);
            }
        }
        None
    }

    fn vocabulary(&self, host: usize) -> (Vec<(usize, Vertex)>, Vec<EdgeId>) {
        let red = self.state.red();
        let mut tails = Vec::new();
        let mut edges: Vec<EdgeId> = red.edges[host].clone();
        for nb in relevant_neighbours(self.state, self.order, host) {
            tails.push((nb.tree, nb.x));
            tails.push((nb.tree, nb.bar.0));
            if let Some((_, e)) = nb.pivot {
                edges.push(e);
            }
        }
        for &v in &red.vertices[host] {
            for b in 0..self.state.k() {
                if let Some((p, _)) = self.state.parent(b, v) {
                    if red.comp_of[p] != host {
                        tails.push((b, v));
                    }
                }
            }
        }
        for v in 0..self.state.graph().vertex_count() {
            if red.comp_of[v] == host {
                continue;
            }
            for b in 0..self.state.k() {
                if let Some((p, _)) = self.state.parent(b, v) {
                    if red.comp_of[p] == host {
                        tails.push((b, v));
                    }
                }
            }
        }
        tails.sort_unstable();
        tails.dedup();
        tails.truncate(self.cfg.vocabulary_limit);
        edges.sort_unstable();
        edges.dedup();
        (tails, edges)
    }

    fn composite_dfs(
        &mut self,
        cur: DecompositionState<'g>,
        tails: &[(usize, Vertex)],
        edges: &[EdgeId],
        prefix: &mut Vec<Exchange>,
        seen: &mut HashSet<Vec<Colour>>,
        budget: &mut usize,
    ) -> Option<Found<'g>> {
        if prefix.len() >= self.cfg.composite_depth {
            return None;
        }
        for &(tree, tail) in tails {
            for &red_edge in edges {
                if *budget == 0 {
                    return None;
                }
                let x = Exchange { tree, tail, red_edge };
                if cur.colour(red_edge) != Colour::Red {
                    continue;
                }
                let Ok(next) = exchange(&cur, x) else { continue };
                if !seen.insert(next.colours().to_vec()) {
                    continue;
                }
                *budget -= 1;
                self.stats.composite_nodes += 1;
                prefix.push(x);
                if let Some(gain) = improvement(self.state, &self.pot, &next, self.cfg) {
                    let mv = Self::composite("composite search", prefix.clone(), None);
                    prefix.pop();
                    return Some(Found { mv, next, gain });
                }
                let order = minimal_legal_order(&next, self.cfg.order_budget);
                for (b, t) in tails.iter().copied() {
                    let Some(arc) = next.parent_arc(b, t) else { continue };
                    let red = next.red();
                    if red.comp_of[arc.tail] == red.comp_of[arc.head] || next.residue_with(arc.edge) != self.pot.residue {
                        continue;
                    }
                    if find_minimal_special_path(&next, &order, (b, arc)).is_none() {
                        continue;
                    }
                    let mv = Self::composite("composite search", prefix.clone(), Some((b, t)));
                    if let Some(f) = self.evaluate(mv) {
                        prefix.pop();
                        return Some(f);
                    }
                }
                if let Some(f) = self.composite_dfs(next, tails, edges, prefix, seen, budget) {
                    prefix.pop();
                    return Some(f);
                }
                prefix.pop();
            }
        }
        None
    }
}

fn red_edge_between(state: &DecompositionState, u: Vertex, v: Vertex) -> Option<EdgeId> {
    state.red_neighbours(u).into_iter().find(|&(w, _)| w == v).map(|(_, e)| e)
}

fn single_red_neighbour(state: &DecompositionState, v: Vertex) -> Option<(Vertex, EdgeId)> {
    match state.red_neighbours(v)[..] {
        [one] => Some(one),
        _ => None,
    }
}

/// The first improving move in catalogue order, if any.
pub fn find_move<'g>(
    state: &DecompositionState<'g>,
    order: &LegalOrder,
    cfg: &EngineConfig,
    stats: &mut MoveStats,
) -> Option<Found<'g>> {
    let pot = Potential::of(state, order);
    let mut search = Search { state, order, pot, cfg, stats };
    search
        .special_paths()
        .or_else(|| search.named())
        .or_else(|| search.single_exchanges())
        .or_else(|| search.composite_search())
}

/// Trigger summary for a state where no move applies.
pub fn trigger_report(state: &DecompositionState, order: &LegalOrder) -> Vec<String> {
    let mut out = Vec::new();
    let root_comp = state.root_comp();
    for &host in &order.components {
        let nbs = relevant_neighbours(state, order, host);
        if host == root_comp && !nbs.is_empty() {
            out.push(format!("root component has {} relevant neighbours", nbs.len()));
        }
        for b in 0..state.k() {
            let count = nbs.iter().filter(|nb| nb.tree == b).count();
            if count > 2 {
                out.push(format!("component {host} has {count} relevant neighbours in tree {b}"));
            }
        }
        let red = state.red();
        for c in order.children_of(state, host) {
            if red.size(c) <= 1 && red.size(host) <= 1 {
                out.push(format!("small component {host} has small child {c}"));
            }
            if host != root_comp && red.size(host) + red.size(c) < state.d() {
                out.push(format!("component {host} and child {c} hold fewer than d edges together"));
            }
        }
    }
    out
}
