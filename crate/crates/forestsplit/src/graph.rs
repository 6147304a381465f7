//! Loop-free multigraphs with stable edge ids.

use std::collections::VecDeque;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub type Vertex = usize;
pub type EdgeId = usize;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("loop at vertex {vertex} (line {line})")]
    Loop { line: usize, vertex: Vertex },
    #[error("loop at vertex {0}")]
    LoopEdge(Vertex),
    #[error("unknown vertex {0}")]
    UnknownVertex(Vertex),
    #[error("unknown edge {0}")]
    UnknownEdge(EdgeId),
    #[error("edge set is not a forest")]
    NotAForest,
}

/// An undirected multigraph on vertices `0..n`.
///
/// Edge ids are assigned in insertion order and never change, so parallel
/// edges stay distinguishable everywhere downstream.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawGraph", into = "RawGraph")]
pub struct MultiGraph {
    n: usize,
    ends: Vec<(Vertex, Vertex)>,
    adj: Vec<Vec<EdgeId>>,
}

#[derive(Serialize, Deserialize)]
struct RawGraph {
    vertices: usize,
    edges: Vec<(Vertex, Vertex)>,
}

impl TryFrom<RawGraph> for MultiGraph {
    type Error = GraphError;
    fn try_from(raw: RawGraph) -> Result<Self, GraphError> {
        MultiGraph::from_edges(raw.vertices, &raw.edges)
    }
}

impl From<MultiGraph> for RawGraph {
    fn from(g: MultiGraph) -> Self {
        RawGraph { vertices: g.n, edges: g.ends }
    }
}

impl MultiGraph {
    pub fn new(n: usize) -> Self {
        MultiGraph { n, ends: Vec::new(), adj: vec![Vec::new(); n] }
    }

    pub fn from_edges(n: usize, edges: &[(Vertex, Vertex)]) -> Result<Self, GraphError> {
        let mut g = MultiGraph::new(n);
        for &(u, v) in edges {
            g.add_edge(u, v)?;
        }
        Ok(g)
    }

    /// Appends an edge and returns its id.
    pub fn add_edge(&mut self, u: Vertex, v: Vertex) -> Result<EdgeId, GraphError> {
        if u == v {
            return Err(GraphError::LoopEdge(u));
        }
        for w in [u, v] {
            if w >= self.n {
                return Err(GraphError::UnknownVertex(w));
            }
        }
        let id = self.ends.len();
        self.ends.push((u, v));
        self.adj[u].push(id);
        self.adj[v].push(id);
        Ok(id)
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.ends.len()
    }

    pub fn endpoints(&self, e: EdgeId) -> (Vertex, Vertex) {
        self.ends[e]
    }

    /// The endpoint of `e` that is not `v`.
    pub fn opposite(&self, e: EdgeId, v: Vertex) -> Vertex {
        let (a, b) = self.ends[e];
        if a == v {
            b
        } else {
            a
        }
    }

    pub fn incident(&self, v: Vertex) -> &[EdgeId] {
        &self.adj[v]
    }

    pub fn degree(&self, v: Vertex) -> usize {
        self.adj[v].len()
    }

    pub fn edges(&self) -> impl Iterator<Item = (EdgeId, Vertex, Vertex)> + '_ {
        self.ends.iter().enumerate().map(|(i, &(u, v))| (i, u, v))
    }

    /// Vertices `S` and every edge with both ends in `S`, keeping original ids.
    pub fn induced_subgraph(&self, vertices: &[Vertex]) -> Result<Subgraph, GraphError> {
        let mut inside = vec![false; self.n];
        for &v in vertices {
            if v >= self.n {
                return Err(GraphError::UnknownVertex(v));
            }
            inside[v] = true;
        }
        let mut vs: Vec<Vertex> = (0..self.n).filter(|&v| inside[v]).collect();
        vs.dedup();
        let edges = self
            .edges()
            .filter(|&(_, u, v)| inside[u] && inside[v])
            .map(|(e, _, _)| e)
            .collect();
        Ok(Subgraph { vertices: vs, edges })
    }

    /// Number of edges inside a vertex set given as a membership mask.
    pub fn edges_within(&self, inside: &[bool]) -> usize {
        self.ends.iter().filter(|&&(u, v)| inside[u] && inside[v]).count()
    }

    /// Connected components as sorted vertex lists, ordered by smallest vertex.
    pub fn components(&self) -> Vec<Vec<Vertex>> {
        let mut seen = vec![false; self.n];
        let mut out = Vec::new();
        for s in 0..self.n {
            if seen[s] {
                continue;
            }
            seen[s] = true;
            let mut comp = vec![s];
            let mut queue = VecDeque::from([s]);
            while let Some(v) = queue.pop_front() {
                for &e in &self.adj[v] {
                    let w = self.opposite(e, v);
                    if !seen[w] {
                        seen[w] = true;
                        comp.push(w);
                        queue.push_back(w);
                    }
                }
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }

    pub fn is_connected(&self) -> bool {
        self.n <= 1 || self.components().len() == 1
    }

    /// Copies the subgraph induced by `vertices` onto fresh ids `0..|S|`.
    ///
    /// Returns the new graph, the new-to-old vertex map and the new-to-old edge map.
    pub fn compact(&self, vertices: &[Vertex]) -> Result<(MultiGraph, Vec<Vertex>, Vec<EdgeId>), GraphError> {
        let sub = self.induced_subgraph(vertices)?;
        let mut index = vec![usize::MAX; self.n];
        for (i, &v) in sub.vertices.iter().enumerate() {
            index[v] = i;
        }
        let mut g = MultiGraph::new(sub.vertices.len());
        for &e in &sub.edges {
            let (u, v) = self.ends[e];
            g.add_edge(index[u], index[v])?;
        }
        Ok((g, sub.vertices, sub.edges))
    }

    /// Canonical text form: one `u v` line per edge in id order.
    pub fn to_edge_list(&self) -> String {
        let mut s = String::new();
        for &(u, v) in &self.ends {
            s.push_str(&format!("{u} {v}\n"));
        }
        s
    }
}

impl fmt::Display for MultiGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_edge_list())
    }
}

/// Parses `u v` lines; `#` starts a comment.
///
/// ```
/// let g = forestsplit::graph::parse_edge_list("0 1\n# comment\n1 2\n").unwrap();
/// assert_eq!((g.vertex_count(), g.edge_count()), (3, 2));
/// ```
pub fn parse_edge_list(text: &str) -> Result<MultiGraph, GraphError> {
    let mut pairs = Vec::new();
    let mut max_id = None;
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != 2 {
            return Err(GraphError::Parse {
                line: line_no,
                message: format!("expected two vertex ids, found {}", fields.len()),
            });
        }
        let mut ids = [0usize; 2];
        for (slot, field) in ids.iter_mut().zip(&fields) {
            *slot = field.parse().map_err(|_| GraphError::Parse {
                line: line_no,
                message: format!("not a vertex id: {field:?}"),
            })?;
        }
        if ids[0] == ids[1] {
            return Err(GraphError::Loop { line: line_no, vertex: ids[0] });
        }
        max_id = Some(max_id.unwrap_or(0).max(ids[0]).max(ids[1]));
        pairs.push((ids[0], ids[1]));
    }
    let n = max_id.map_or(0, |m| m + 1);
    MultiGraph::from_edges(n, &pairs)
}

/// Vertex set plus the ids of the edges it induces.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Subgraph {
    pub vertices: Vec<Vertex>,
    pub edges: Vec<EdgeId>,
}

impl Subgraph {
    pub fn v(&self) -> usize {
        self.vertices.len()
    }

    pub fn e(&self) -> usize {
        self.edges.len()
    }
}

/// A directed use of an edge, `tail -> head`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct ArcRef {
    pub tail: Vertex,
    pub head: Vertex,
    pub edge: EdgeId,
}

/// Disjoint-set forest with path halving.
#[derive(Clone, Debug)]
pub struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    pub fn new(n: usize) -> Self {
        UnionFind { parent: (0..n).collect() }
    }

    pub fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    /// Returns false when `a` and `b` were already joined.
    pub fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        self.parent[ra.max(rb)] = ra.min(rb);
        true
    }
}

pub fn is_forest(g: &MultiGraph, edges: impl IntoIterator<Item = EdgeId>) -> bool {
    let mut uf = UnionFind::new(g.vertex_count());
    edges.into_iter().all(|e| {
        let (u, v) = g.endpoints(e);
        uf.union(u, v)
    })
}

/// Components of the spanning subgraph on `edges`: `(vertices, edges)` per component,
/// ordered by smallest vertex. Isolated vertices form their own components.
pub fn edge_components(g: &MultiGraph, edges: &[EdgeId]) -> Vec<(Vec<Vertex>, Vec<EdgeId>)> {
    let mut uf = UnionFind::new(g.vertex_count());
    for &e in edges {
        let (u, v) = g.endpoints(e);
        uf.union(u, v);
    }
    let mut slot = vec![usize::MAX; g.vertex_count()];
    let mut out: Vec<(Vec<Vertex>, Vec<EdgeId>)> = Vec::new();
    for v in 0..g.vertex_count() {
        let r = uf.find(v);
        if slot[r] == usize::MAX {
            slot[r] = out.len();
            out.push((Vec::new(), Vec::new()));
        }
        out[slot[r]].0.push(v);
    }
    let mut sorted = edges.to_vec();
    sorted.sort_unstable();
    for e in sorted {
        let r = uf.find(g.endpoints(e).0);
        out[slot[r]].1.push(e);
    }
    out
}

/// The unique path from `x` to `y` inside the forest on `forest`, as edge ids in order.
///
/// ```
/// use forestsplit::graph::{forest_path, MultiGraph};
/// let g = MultiGraph::from_edges(3, &[(0, 1), (1, 2)]).unwrap();
/// assert_eq!(forest_path(&g, &[0, 1], 0, 2).unwrap(), Some(vec![0, 1]));
/// assert_eq!(forest_path(&g, &[0], 0, 2).unwrap(), None);
/// ```
pub fn forest_path(
    g: &MultiGraph,
    forest: &[EdgeId],
    x: Vertex,
    y: Vertex,
) -> Result<Option<Vec<EdgeId>>, GraphError> {
    let n = g.vertex_count();
    for v in [x, y] {
        if v >= n {
            return Err(GraphError::UnknownVertex(v));
        }
    }
    let mut member = vec![false; g.edge_count()];
    for &e in forest {
        if e >= g.edge_count() {
            return Err(GraphError::UnknownEdge(e));
        }
        member[e] = true;
    }
    if !is_forest(g, forest.iter().copied()) {
        return Err(GraphError::NotAForest);
    }
    let mut via: Vec<Option<EdgeId>> = vec![None; n];
    let mut seen = vec![false; n];
    seen[x] = true;
    let mut queue = VecDeque::from([x]);
    while let Some(v) = queue.pop_front() {
        if v == y {
            break;
        }
        for &e in g.incident(v) {
            if !member[e] {
                continue;
            }
            let w = g.opposite(e, v);
            if !seen[w] {
                seen[w] = true;
                via[w] = Some(e);
                queue.push_back(w);
            }
        }
    }
    if !seen[y] {
        return Ok(None);
    }
    let mut path = Vec::new();
    let mut v = y;
    while let Some(e) = via[v] {
        path.push(e);
        v = g.opposite(e, v);
    }
    path.reverse();
    Ok(Some(path))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_counts_vertices_and_keeps_parallel_edges() {
        let g = parse_edge_list("0 1\n1 2").unwrap();
        assert_eq!((g.vertex_count(), g.edge_count()), (3, 2));
        let g = parse_edge_list("0 1\n0 1").unwrap();
        assert_eq!((g.vertex_count(), g.edge_count()), (2, 2));
        assert_eq!(g.endpoints(0), g.endpoints(1));
    }

    #[test]
    fn parse_rejects_loops_and_garbage() {
        assert_eq!(parse_edge_list("0 0"), Err(GraphError::Loop { line: 1, vertex: 0 }));
        match parse_edge_list("0 1\n\n1 x\n") {
            Err(GraphError::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("{other:?}"),
        }
        assert!(matches!(parse_edge_list("0 1 2"), Err(GraphError::Parse { line: 1, .. })));
    }

    #[test]
    fn round_trip_keeps_ids() {
        let text = "# k4\n0 1\n0 2\n0 3\n1 2\n1 3\n2 3\n3 2\n";
        let g = parse_edge_list(text).unwrap();
        let h = parse_edge_list(&g.to_edge_list()).unwrap();
        assert_eq!(g, h);
    }

    #[test]
    fn induced_subgraphs() {
        let k4 = MultiGraph::from_edges(4, &[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]).unwrap();
        assert_eq!(k4.induced_subgraph(&[0, 1, 2, 3]).unwrap().e(), 6);
        let tri = k4.induced_subgraph(&[1, 2, 3]).unwrap();
        assert_eq!(tri.edges, vec![3, 4, 5]);
        let double = MultiGraph::from_edges(2, &[(0, 1), (0, 1)]).unwrap();
        let one = double.induced_subgraph(&[0]).unwrap();
        assert_eq!((one.v(), one.e()), (1, 0));
        assert_eq!(k4.induced_subgraph(&[7]), Err(GraphError::UnknownVertex(7)));
    }

    #[test]
    fn forest_paths() {
        let g = MultiGraph::from_edges(4, &[(0, 1), (1, 2), (2, 3)]).unwrap();
        assert_eq!(forest_path(&g, &[0, 1], 0, 2).unwrap(), Some(vec![0, 1]));
        assert_eq!(forest_path(&g, &[0, 2], 1, 2).unwrap(), None);
        assert_eq!(forest_path(&g, &[0, 1, 2], 3, 3).unwrap(), Some(vec![]));
        assert_eq!(forest_path(&g, &[0], 9, 0), Err(GraphError::UnknownVertex(9)));
    }

    #[test]
    fn components_and_compaction() {
        let g = MultiGraph::from_edges(5, &[(3, 4), (0, 1)]).unwrap();
        assert_eq!(g.components(), vec![vec![0, 1], vec![2], vec![3, 4]]);
        let (h, vmap, emap) = g.compact(&[3, 4]).unwrap();
        assert_eq!((h.vertex_count(), h.edge_count()), (2, 1));
        assert_eq!((vmap, emap), (vec![3, 4], vec![0]));
    }
}
