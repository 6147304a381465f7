//! Blue trees oriented toward a root, a red forest, and the root component.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::base::Colour;
use crate::graph::{edge_components, ArcRef, EdgeId, MultiGraph, Vertex};

use super::EngineError;

/// Red components, numbered by smallest vertex.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RedComponents {
    pub comp_of: Vec<usize>,
    pub vertices: Vec<Vec<Vertex>>,
    pub edges: Vec<Vec<EdgeId>>,
}

impl RedComponents {
    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn size(&self, c: usize) -> usize {
        self.edges[c].len()
    }
}

/// Component counts by edge count, from `n - 1` down to `d + 1`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Residue(pub Vec<usize>);

impl Residue {
    pub fn from_sizes(sizes: impl IntoIterator<Item = usize>, n: usize, d: usize) -> Self {
        let top = n.saturating_sub(1);
        let len = top.saturating_sub(d);
        let mut counts = vec![0; len];
        for s in sizes {
            if s > d {
                counts[top - s] += 1;
            }
        }
        Residue(counts)
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&c| c == 0)
    }
}

/// A decomposition into `k` blue forests (spanning trees when possible) and a
/// red forest, with blue arcs pointing toward `root`.
#[derive(Clone, Debug)]
pub struct DecompositionState<'g> {
    graph: &'g MultiGraph,
    k: usize,
    d: usize,
    colour: Vec<Colour>,
    root: Vertex,
    root_component: Vec<EdgeId>,
    parent: Vec<Vec<Option<(Vertex, EdgeId)>>>,
    red: RedComponents,
}

impl<'g> DecompositionState<'g> {
    /// Builds a state and picks the root component and root vertex.
    /// When no red component exceeds `d` edges the root is vertex 0 and the
    /// root component is whatever contains it.
    pub fn new(graph: &'g MultiGraph, k: usize, d: usize, colour: Vec<Colour>) -> Result<Self, EngineError> {
        let red = red_components(graph, &colour);
        let (root, _) = select_root(&red, graph, d).unwrap_or((0, 0));
        let comp = if graph.vertex_count() == 0 { vec![] } else { red.edges[red.comp_of[root]].clone() };
        Self::with_root(graph, k, d, colour, root, comp)
    }

    /// Builds a state with an explicit root and recorded root component.
    pub fn with_root(
        graph: &'g MultiGraph,
        k: usize,
        d: usize,
        colour: Vec<Colour>,
        root: Vertex,
        root_component: Vec<EdgeId>,
    ) -> Result<Self, EngineError> {
        if colour.len() != graph.edge_count() {
            return Err(EngineError::Invalid("colouring does not cover the edge set".into()));
        }
        if colour.iter().any(|c| matches!(c, Colour::Blue(b) if *b >= k)) {
            return Err(EngineError::Invalid("blue class index out of range".into()));
        }
        let parent = (0..k).map(|b| orient(graph, &colour, b, root)).collect::<Result<Vec<_>, _>>()?;
        let red = red_components(graph, &colour);
        if red.edges.iter().zip(&red.vertices).any(|(es, vs)| es.len() + 1 != vs.len()) {
            return Err(EngineError::Invalid("red edges contain a cycle".into()));
        }
        let mut root_component = root_component;
        root_component.sort_unstable();
        Ok(DecompositionState { graph, k, d, colour, root, root_component, parent, red })
    }

    pub fn graph(&self) -> &'g MultiGraph {
        self.graph
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn root(&self) -> Vertex {
        self.root
    }

    pub fn colours(&self) -> &[Colour] {
        &self.colour
    }

    pub fn colour(&self, e: EdgeId) -> Colour {
        self.colour[e]
    }

    pub fn red(&self) -> &RedComponents {
        &self.red
    }

    pub fn recorded_root_component(&self) -> &[EdgeId] {
        &self.root_component
    }

    /// Red component holding the root vertex.
    pub fn root_comp(&self) -> usize {
        self.red.comp_of[self.root]
    }

    /// Whether the recorded root component is still exactly a red component.
    pub fn root_component_intact(&self) -> bool {
        self.red.edges[self.root_comp()] == self.root_component
    }

    /// Parent of `v` in blue tree `b`, with the connecting edge.
    pub fn parent(&self, b: usize, v: Vertex) -> Option<(Vertex, EdgeId)> {
        self.parent[b][v]
    }

    pub fn parent_arc(&self, b: usize, v: Vertex) -> Option<ArcRef> {
        self.parent[b][v].map(|(p, e)| ArcRef { tail: v, head: p, edge: e })
    }

    /// The arc carried by blue edge `e`, if blue.
    pub fn arc_of(&self, e: EdgeId) -> Option<(usize, ArcRef)> {
        let Colour::Blue(b) = self.colour[e] else { return None };
        let (u, v) = self.graph.endpoints(e);
        if self.parent[b][u] == Some((v, e)) {
            Some((b, ArcRef { tail: u, head: v, edge: e }))
        } else {
            Some((b, ArcRef { tail: v, head: u, edge: e }))
        }
    }

    /// True when every blue class is a spanning tree.
    pub fn is_spanning(&self) -> bool {
        let n = self.graph.vertex_count();
        (0..self.k).all(|b| (0..n).all(|v| v == self.root || self.parent[b][v].is_some()))
    }

    /// `v` lies in the subtree of `u` in tree `b` (reflexive).
    pub fn is_descendant(&self, b: usize, v: Vertex, u: Vertex) -> bool {
        let mut cur = v;
        loop {
            if cur == u {
                return true;
            }
            match self.parent[b][cur] {
                Some((p, _)) => cur = p,
                None => return false,
            }
        }
    }

    /// Vertices on the way from `v` to its tree root in tree `b`, starting with `v`.
    pub fn ancestors(&self, b: usize, v: Vertex) -> Vec<Vertex> {
        let mut out = vec![v];
        let mut cur = v;
        while let Some((p, _)) = self.parent[b][cur] {
            out.push(p);
            cur = p;
        }
        out
    }

    pub fn residue(&self) -> Residue {
        Residue::from_sizes((0..self.red.len()).map(|c| self.red.size(c)), self.graph.vertex_count(), self.d)
    }

    /// Residue of the red forest with the extra edge `e` (which joins two components).
    pub fn residue_with(&self, e: EdgeId) -> Residue {
        let (u, v) = self.graph.endpoints(e);
        let (cu, cv) = (self.red.comp_of[u], self.red.comp_of[v]);
        debug_assert_ne!(cu, cv);
        let sizes = (0..self.red.len())
            .filter(|&c| c != cu && c != cv)
            .map(|c| self.red.size(c))
            .chain(std::iter::once(self.red.size(cu) + self.red.size(cv) + 1));
        Residue::from_sizes(sizes, self.graph.vertex_count(), self.d)
    }

    pub fn red_degree(&self, v: Vertex) -> usize {
        self.graph.incident(v).iter().filter(|&&e| self.colour[e] == Colour::Red).count()
    }

    pub fn red_neighbours(&self, v: Vertex) -> Vec<(Vertex, EdgeId)> {
        self.graph
            .incident(v)
            .iter()
            .filter(|&&e| self.colour[e] == Colour::Red)
            .map(|&e| (self.graph.opposite(e, v), e))
            .collect()
    }

    /// Path of red edges from `x` to `y` as a vertex list, if they share a component.
    pub fn red_path(&self, x: Vertex, y: Vertex) -> Option<Vec<Vertex>> {
        let red: Vec<EdgeId> = self.red.edges[self.red.comp_of[x]].clone();
        let edges = crate::graph::forest_path(self.graph, &red, x, y).ok()??;
        let mut out = vec![x];
        let mut cur = x;
        for e in edges {
            cur = self.graph.opposite(e, cur);
            out.push(cur);
        }
        Some(out)
    }

    /// Copy with a new colouring, same root and recorded root component.
    pub fn recoloured(&self, colour: Vec<Colour>) -> Result<Self, EngineError> {
        Self::with_root(self.graph, self.k, self.d, colour, self.root, self.root_component.clone())
    }

    /// Copy with root and root component picked afresh.
    pub fn reselected(&self) -> Result<Self, EngineError> {
        Self::new(self.graph, self.k, self.d, self.colour.clone())
    }

    /// Edge lists per class: blue trees first, red last.
    pub fn forests(&self) -> Vec<Vec<EdgeId>> {
        let mut out = vec![Vec::new(); self.k + 1];
        for (e, c) in self.colour.iter().enumerate() {
            match c {
                Colour::Blue(b) => out[*b].push(e),
                Colour::Red => out[self.k].push(e),
            }
        }
        out
    }

    /// Checks the structural invariants; returns the first failure.
    pub fn check_invariants(&self) -> Result<(), String> {
        let n = self.graph.vertex_count();
        for b in 0..self.k {
            for v in 0..n {
                if let Some((p, e)) = self.parent[b][v] {
                    if self.colour[e] != Colour::Blue(b) {
                        return Err(format!("arc {v}->{p} is not coloured {b}"));
                    }
                }
            }
            if self.parent[b][self.root].is_some() {
                return Err("root has an outgoing arc".into());
            }
            let arcs = self.parent[b].iter().filter(|p| p.is_some()).count();
            let class = self.colour.iter().filter(|&&c| c == Colour::Blue(b)).count();
            if arcs != class {
                return Err(format!("tree {b} has {class} edges but {arcs} arcs"));
            }
        }
        if !crate::graph::is_forest(self.graph, (0..self.colour.len()).filter(|&e| self.colour[e] == Colour::Red)) {
            return Err("red edges contain a cycle".into());
        }
        Ok(())
    }
}

/// Orients blue class `b`: BFS from `root`, then from the lowest unreached vertex
/// of every other component.
fn orient(g: &MultiGraph, colour: &[Colour], b: usize, root: Vertex) -> Result<Vec<Option<(Vertex, EdgeId)>>, EngineError> {
    let n = g.vertex_count();
    let mut parent = vec![None; n];
    let mut seen = vec![false; n];
    let mut used = 0;
    let starts = std::iter::once(root).chain(0..n);
    for s in starts {
        if n == 0 || seen[s] {
            continue;
        }
        seen[s] = true;
        let mut queue = VecDeque::from([s]);
        while let Some(v) = queue.pop_front() {
            for &e in g.incident(v) {
                if colour[e] != Colour::Blue(b) || parent[v].map(|(_, pe)| pe) == Some(e) {
                    continue;
                }
                let w = g.opposite(e, v);
                if seen[w] {
                    return Err(EngineError::Invalid(format!("blue class {b} contains a cycle")));
                }
                seen[w] = true;
                parent[w] = Some((v, e));
                used += 1;
                queue.push_back(w);
            }
        }
    }
    debug_assert_eq!(used, colour.iter().filter(|&&c| c == Colour::Blue(b)).count());
    Ok(parent)
}

pub fn red_components(g: &MultiGraph, colour: &[Colour]) -> RedComponents {
    let red: Vec<EdgeId> = (0..colour.len()).filter(|&e| colour[e] == Colour::Red).collect();
    let comps = edge_components(g, &red);
    let mut comp_of = vec![0; g.vertex_count()];
    for (i, (vs, _)) in comps.iter().enumerate() {
        for &v in vs {
            comp_of[v] = i;
        }
    }
    let (vertices, edges) = comps.into_iter().unzip();
    RedComponents { comp_of, vertices, edges }
}

/// Largest red component (if above `d` edges) and a root vertex inside it.
///
/// The root has red degree at least 3, else it is a path vertex two steps
/// from both ends; failing both, the lowest vertex of maximum degree.
pub fn select_root(red: &RedComponents, g: &MultiGraph, d: usize) -> Option<(Vertex, usize)> {
    let comp = (0..red.len()).filter(|&c| red.size(c) > d).max_by_key(|&c| (red.size(c), std::cmp::Reverse(c)))?;
    let edges = &red.edges[comp];
    let mut deg = vec![0usize; g.vertex_count()];
    for &e in edges {
        let (u, v) = g.endpoints(e);
        deg[u] += 1;
        deg[v] += 1;
    }
    let vs = &red.vertices[comp];
    if let Some(&r) = vs.iter().find(|&&v| deg[v] >= 3) {
        return Some((r, comp));
    }
    // Max degree two: the component is a path; take an interior vertex whose
    // neighbours are interior too.
    for &v in vs {
        if deg[v] != 2 {
            continue;
        }
        let interior = g
            .incident(v)
            .iter()
            .filter(|e| edges.binary_search(e).is_ok())
            .all(|&e| deg[g.opposite(e, v)] >= 2);
        if interior {
            return Some((v, comp));
        }
    }
    let r = *vs.iter().max_by_key(|&&v| (deg[v], std::cmp::Reverse(v))).expect("component is nonempty");
    Some((r, comp))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instances;

    fn all_red(g: &MultiGraph) -> Vec<Colour> {
        vec![Colour::Red; g.edge_count()]
    }

    #[test]
    fn residue_examples() {
        let r = Residue::from_sizes([5, 2, 1], 8, 3);
        assert_eq!(r.0, vec![0, 0, 1, 0]);
        assert!(Residue::from_sizes([3, 2], 8, 3).is_zero());
        assert!(Residue(vec![0, 1, 0]) < Residue(vec![1, 0, 0]));
    }

    #[test]
    fn root_of_star_is_centre() {
        let star = MultiGraph::from_edges(5, &[(0, 1), (0, 2), (0, 3), (0, 4)]).unwrap();
        let red = red_components(&star, &all_red(&star));
        assert_eq!(select_root(&red, &star, 3), Some((0, 0)));
    }

    #[test]
    fn root_of_path_is_interior() {
        let p = instances::path(6);
        let red = red_components(&p, &all_red(&p));
        assert_eq!(select_root(&red, &p, 3), Some((2, 0)));
        let small = instances::path(3);
        let red = red_components(&small, &all_red(&small));
        assert_eq!(select_root(&red, &small, 3), None);
    }

    #[test]
    fn orientation_points_to_root() {
        let g = instances::k4();
        let colour = vec![Colour::Blue(0), Colour::Red, Colour::Red, Colour::Blue(0), Colour::Red, Colour::Blue(0)];
        let s = DecompositionState::with_root(&g, 1, 3, colour, 3, vec![]).unwrap();
        s.check_invariants().unwrap();
        assert!(s.is_spanning());
        assert_eq!(s.ancestors(0, 0), vec![0, 1, 2, 3]);
        assert!(s.is_descendant(0, 0, 2));
        assert!(!s.is_descendant(0, 2, 0));
    }

    #[test]
    fn cycles_are_rejected() {
        let g = instances::cycle(3);
        let blue = vec![Colour::Blue(0); 3];
        assert!(DecompositionState::with_root(&g, 1, 3, blue, 0, vec![]).is_err());
        assert!(DecompositionState::with_root(&g, 1, 3, all_red(&g), 0, vec![]).is_err());
    }
}
