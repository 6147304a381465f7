//! Sparsity, fractional arboricity and overfull subgraphs, with witnesses.
//!
//! For a subgraph `H` and parameters `k, d`:
//!
//! ```text
//! beta(H) = (k+1)(k+d) v(H) - (k+d+1) e(H) - k^2
//! ```
//!
//! `G` is `(k, d)`-sparse when every subgraph has `beta >= 0`. Since beta of a
//! disconnected graph is the sum over its components plus `(m-1) k^2`, only
//! connected induced subgraphs need to be examined for the sign.
//!
//! Graphs with at most [`ENUMERATION_LIMIT`] vertices are scanned exhaustively;
//! larger ones go through a min-cut formulation that decides the same questions
//! exactly but does not follow the canonical witness order.

use num_rational::Ratio;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::flow::{max_closure, membership};
use crate::graph::{edge_components, MultiGraph, Vertex};

pub type Rational = Ratio<i64>;

/// Largest vertex count handled by exhaustive enumeration.
pub const ENUMERATION_LIMIT: usize = 22;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SparsityError {
    #[error("fractional arboricity needs at least two vertices")]
    TooFewVertices,
    #[error("parameters must satisfy k >= 1 and d >= 1")]
    BadParameters,
}

pub fn beta_value(k: usize, d: usize, v: usize, e: usize) -> i64 {
    let (k, d, v, e) = (k as i64, d as i64, v as i64, e as i64);
    (k + 1) * (k + d) * v - (k + d + 1) * e - k * k
}

/// `beta` of the whole graph.
///
/// ```
/// use forestsplit::{instances, sparsity::beta};
/// assert_eq!(beta(&instances::petersen(), 1, 4), 9);
/// ```
pub fn beta(h: &MultiGraph, k: usize, d: usize) -> i64 {
    beta_value(k, d, h.vertex_count(), h.edge_count())
}

/// `beta` of the subgraph induced by `set`.
pub fn beta_of_set(g: &MultiGraph, set: &[Vertex], k: usize, d: usize) -> i64 {
    let e = g.edges_within(&membership(g.vertex_count(), set));
    beta_value(k, d, set.len(), e)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BetaReport {
    pub k: usize,
    pub d: usize,
    pub value: i64,
    pub witness: Vec<Vertex>,
    pub witness_edges: usize,
}

impl BetaReport {
    pub fn is_sparse(&self) -> bool {
        self.value >= 0
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DensityReport {
    pub value: Rational,
    pub witness: Vec<Vertex>,
    pub witness_edges: usize,
}

/// JSON shape shared by all sparsity reports.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReportJson {
    pub kind: String,
    pub value_num: i64,
    pub value_den: i64,
    pub witness_vertices: Vec<Vertex>,
}

impl From<&BetaReport> for ReportJson {
    fn from(r: &BetaReport) -> Self {
        ReportJson { kind: "min_beta".into(), value_num: r.value, value_den: 1, witness_vertices: r.witness.clone() }
    }
}

impl From<&DensityReport> for ReportJson {
    fn from(r: &DensityReport) -> Self {
        ReportJson {
            kind: "fractional_arboricity".into(),
            value_num: *r.value.numer(),
            value_den: *r.value.denom(),
            witness_vertices: r.witness.clone(),
        }
    }
}

/// Bitmask view of a graph with at most 64 vertices.
pub(crate) struct Masks {
    pub n: usize,
    pub nbr: Vec<u64>,
    /// `(other endpoint, multiplicity)` per vertex.
    pub mult: Vec<Vec<(usize, usize)>>,
}

impl Masks {
    pub fn new(g: &MultiGraph) -> Self {
        let n = g.vertex_count();
        assert!(n <= 64, "bitmask scan needs at most 64 vertices");
        let mut nbr = vec![0u64; n];
        let mut counts = vec![vec![0usize; n]; n];
        for (_, u, v) in g.edges() {
            nbr[u] |= 1 << v;
            nbr[v] |= 1 << u;
            counts[u][v] += 1;
            counts[v][u] += 1;
        }
        let mult = counts
            .iter()
            .map(|row| row.iter().enumerate().filter(|(_, &c)| c > 0).map(|(w, &c)| (w, c)).collect())
            .collect();
        Masks { n, nbr, mult }
    }

    /// Edges between `w` and the set `s`.
    pub fn edges_into(&self, w: usize, s: u64) -> usize {
        self.mult[w].iter().filter(|(u, _)| s >> u & 1 == 1).map(|(_, c)| c).sum()
    }
}

pub(crate) fn mask_to_vec(mask: u64) -> Vec<Vertex> {
    (0..64).filter(|i| mask >> i & 1 == 1).collect()
}

/// True when `a` precedes `b` in the canonical order (size, then sorted ids).
pub(crate) fn canonical_less(a: u64, b: u64) -> bool {
    let (ca, cb) = (a.count_ones(), b.count_ones());
    if ca != cb {
        return ca < cb;
    }
    let diff = a ^ b;
    diff != 0 && a & (diff & diff.wrapping_neg()) != 0
}

/// Calls `visit(mask, edges)` once for every nonempty connected vertex set.
fn for_each_connected(m: &Masks, visit: &mut impl FnMut(u64, usize)) {
    fn grow(m: &Masks, root: usize, set: u64, edges: usize, ext: u64, visit: &mut impl FnMut(u64, usize)) {
        visit(set, edges);
        let mut ext = ext;
        let mut around = 0u64;
        let mut s = set;
        while s != 0 {
            let v = s.trailing_zeros() as usize;
            s &= s - 1;
            around |= m.nbr[v];
        }
        while ext != 0 {
            let w = ext.trailing_zeros() as usize;
            ext &= ext - 1;
            let above = !((2u64 << root).wrapping_sub(1));
            let fresh = m.nbr[w] & !set & !around & above & !(1 << w);
            grow(m, root, set | 1 << w, edges + m.edges_into(w, set), ext | fresh, visit);
        }
    }
    for v in 0..m.n {
        let above = !((2u64 << v).wrapping_sub(1));
        grow(m, v, 1 << v, 0, m.nbr[v] & above, visit);
    }
}

/// Minimum of beta over connected induced subgraphs, with a canonical witness.
///
/// ```
/// use forestsplit::{instances, sparsity::min_beta_subgraph};
/// let r = min_beta_subgraph(&instances::k4(), 1, 3);
/// assert_eq!((r.value, r.witness.len()), (1, 4));
/// ```
pub fn min_beta_subgraph(g: &MultiGraph, k: usize, d: usize) -> BetaReport {
    if g.vertex_count() == 0 {
        return BetaReport { k, d, value: beta_value(k, d, 0, 0), witness: vec![], witness_edges: 0 };
    }
    if g.vertex_count() > ENUMERATION_LIMIT {
        return min_beta_by_flow(g, k, d);
    }
    let m = Masks::new(g);
    let mut best: Option<(i64, u64, usize)> = None;
    for_each_connected(&m, &mut |set, e| {
        let b = beta_value(k, d, set.count_ones() as usize, e);
        let better = match best {
            None => true,
            Some((bv, bs, _)) => b < bv || (b == bv && canonical_less(set, bs)),
        };
        if better {
            best = Some((b, set, e));
        }
    });
    let (value, set, e) = best.expect("nonempty graph has a connected subgraph");
    BetaReport { k, d, value, witness: mask_to_vec(set), witness_edges: e }
}

/// Minimum of beta over all nonempty induced subgraphs, connected or not.
/// Diagnostic only; the sparsity decision never needs it.
pub fn min_beta_any_subgraph(g: &MultiGraph, k: usize, d: usize) -> BetaReport {
    let n = g.vertex_count();
    assert!(n <= ENUMERATION_LIMIT, "diagnostic scan is exhaustive");
    let m = Masks::new(g);
    let mut best: Option<(i64, u64, usize)> = None;
    let mut edges = vec![0usize; 1 << n];
    for set in 1u64..(1u64 << n) {
        let low = set.trailing_zeros() as usize;
        let rest = set & (set - 1);
        edges[set as usize] = edges[rest as usize] + m.edges_into(low, rest);
        let b = beta_value(k, d, set.count_ones() as usize, edges[set as usize]);
        let better = match best {
            None => true,
            Some((bv, bs, _)) => b < bv || (b == bv && canonical_less(set, bs)),
        };
        if better {
            best = Some((b, set, edges[set as usize]));
        }
    }
    match best {
        Some((value, set, e)) => BetaReport { k, d, value, witness: mask_to_vec(set), witness_edges: e },
        None => BetaReport { k, d, value: beta_value(k, d, 0, 0), witness: vec![], witness_edges: 0 },
    }
}

pub fn is_sparse(g: &MultiGraph, k: usize, d: usize) -> bool {
    min_beta_subgraph(g, k, d).is_sparse()
}

/// `max e(H) / (v(H) - 1)` over induced subgraphs with at least two vertices.
///
/// ```
/// use forestsplit::{instances, sparsity::{fractional_arboricity, Rational}};
/// let r = fractional_arboricity(&instances::petersen()).unwrap();
/// assert_eq!(r.value, Rational::new(5, 3));
/// ```
pub fn fractional_arboricity(g: &MultiGraph) -> Result<DensityReport, SparsityError> {
    if g.vertex_count() < 2 {
        return Err(SparsityError::TooFewVertices);
    }
    if g.vertex_count() > ENUMERATION_LIMIT {
        return Ok(arboricity_by_flow(g));
    }
    let m = Masks::new(g);
    // A disconnected set never beats its best component, so connected sets suffice.
    let mut best: Option<(Rational, u64, usize)> = None;
    for_each_connected(&m, &mut |set, e| {
        let v = set.count_ones() as i64;
        if v < 2 {
            return;
        }
        let ratio = Rational::new(e as i64, v - 1);
        let better = match best {
            None => true,
            Some((bv, bs, _)) => ratio > bv || (ratio == bv && canonical_less(set, bs)),
        };
        if better {
            best = Some((ratio, set, e));
        }
    });
    let (value, set, e) = match best {
        Some(b) => b,
        // No connected pair: every two-vertex set has ratio 0.
        None => (Rational::from_integer(0), 0b11, 0),
    };
    Ok(DensityReport { value, witness: mask_to_vec(set), witness_edges: e })
}

/// A vertex set inducing more than `n (v - 1)` edges, if one exists.
///
/// ```
/// use forestsplit::{instances, sparsity::find_overfull};
/// assert_eq!(find_overfull(&instances::k4(), 1), Some(vec![0, 1, 2]));
/// assert_eq!(find_overfull(&instances::k4(), 2), None);
/// ```
pub fn find_overfull(g: &MultiGraph, n: usize) -> Option<Vec<Vertex>> {
    if g.vertex_count() > ENUMERATION_LIMIT {
        return overfull_by_flow(g, n);
    }
    if g.vertex_count() == 0 {
        return None;
    }
    let m = Masks::new(g);
    let mut best: Option<u64> = None;
    for_each_connected(&m, &mut |set, e| {
        let v = set.count_ones() as usize;
        if v >= 2 && e > n * (v - 1) && best.is_none_or(|b| canonical_less(set, b)) {
            best = Some(set);
        }
    });
    best.map(mask_to_vec)
}

pub fn is_overfull_set(g: &MultiGraph, set: &[Vertex], n: usize) -> bool {
    let e = g.edges_within(&membership(g.vertex_count(), set));
    !set.is_empty() && e > n * (set.len() - 1)
}

/// The component of `set` (in the induced subgraph) that minimizes `score`.
fn best_component<K: Ord>(g: &MultiGraph, set: &[Vertex], mut score: impl FnMut(usize, usize) -> K) -> Vec<Vertex> {
    let (sub, vmap, _) = g.compact(set).expect("set is within the graph");
    let comps = edge_components(&sub, &(0..sub.edge_count()).collect::<Vec<_>>());
    let (vs, _) = comps
        .iter()
        .min_by_key(|(vs, es)| score(vs.len(), es.len()))
        .expect("set is nonempty");
    vs.iter().map(|&v| vmap[v]).collect()
}

fn min_beta_by_flow(g: &MultiGraph, k: usize, d: usize) -> BetaReport {
    let (a, b) = (((k + 1) * (k + d)) as i64, (k + d + 1) as i64);
    let mut best: Option<(i64, Vec<Vertex>)> = None;
    for v in 0..g.vertex_count() {
        let (value, set) = max_closure(g, b, a, &[v]);
        if best.as_ref().is_none_or(|(bv, _)| value > *bv) {
            best = Some((value, set));
        }
    }
    let (_, set) = best.expect("graph is nonempty");
    let comp = best_component(g, &set, |v, e| beta_value(k, d, v, e));
    let e = g.edges_within(&membership(g.vertex_count(), &comp));
    BetaReport { k, d, value: beta_value(k, d, comp.len(), e), witness: comp, witness_edges: e }
}

fn overfull_by_flow(g: &MultiGraph, n: usize) -> Option<Vec<Vertex>> {
    for v in 0..g.vertex_count() {
        let (value, set) = max_closure(g, 1, n as i64, &[v]);
        if value > -(n as i64) {
            let comp = best_component(g, &set, |v, e| n as i64 * (v as i64 - 1) - e as i64);
            debug_assert!(is_overfull_set(g, &comp, n));
            return Some(comp);
        }
    }
    None
}

fn arboricity_by_flow(g: &MultiGraph) -> DensityReport {
    // Dinkelbach iteration on e(S) - lambda (|S| - 1), forcing two adjacent vertices.
    let mut best = (Rational::from_integer(0), vec![0, 1], 0usize);
    if let Some((_, u, v)) = g.edges().next() {
        best = (Rational::from_integer(1), vec![u.min(v), u.max(v)], 1);
    }
    let mut pairs: Vec<(Vertex, Vertex)> = g.edges().map(|(_, u, v)| (u.min(v), u.max(v))).collect();
    pairs.sort_unstable();
    pairs.dedup();
    loop {
        let (p, q) = (*best.0.numer(), *best.0.denom());
        let mut improved = None;
        for &(u, v) in &pairs {
            let (value, set) = max_closure(g, q, p, &[u, v]);
            if value + p > 0 {
                improved = Some(set);
                break;
            }
        }
        let Some(set) = improved else { break };
        let comp = best_component(g, &set, |v, e| {
            if v < 2 {
                return std::cmp::Reverse(Rational::from_integer(-1));
            }
            std::cmp::Reverse(Rational::new(e as i64, v as i64 - 1))
        });
        let e = g.edges_within(&membership(g.vertex_count(), &comp));
        let ratio = Rational::new(e as i64, comp.len() as i64 - 1);
        assert!(ratio > best.0, "density search must make progress");
        best = (ratio, comp, e);
    }
    DensityReport { value: best.0, witness: best.1, witness_edges: best.2 }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instances;

    fn k4() -> MultiGraph {
        instances::k4()
    }

    #[test]
    fn beta_examples() {
        assert_eq!(beta(&MultiGraph::new(1), 1, 3), 7);
        assert_eq!(beta(&instances::cycle(3), 1, 3), 8);
        assert_eq!(beta(&instances::petersen(), 1, 4), 9);
        assert_eq!(beta(&MultiGraph::new(0), 2, 3), -4);
    }

    #[test]
    fn min_beta_examples() {
        let tree = instances::path(5);
        let r = min_beta_subgraph(&tree, 1, 3);
        assert_eq!((r.value, r.witness.clone()), (7, vec![0]));
        let r = min_beta_subgraph(&k4(), 1, 3);
        assert_eq!((r.value, r.witness.clone()), (1, vec![0, 1, 2, 3]));
        let double = MultiGraph::from_edges(2, &[(0, 1), (0, 1)]).unwrap();
        let r = min_beta_subgraph(&double, 1, 3);
        assert_eq!((r.value, r.witness.clone()), (5, vec![0, 1]));
    }

    #[test]
    fn arboricity_examples() {
        assert_eq!(fractional_arboricity(&instances::path(6)).unwrap().value, Rational::from_integer(1));
        let r = fractional_arboricity(&k4()).unwrap();
        assert_eq!((r.value, r.witness.clone()), (Rational::from_integer(2), vec![0, 1, 2, 3]));
        assert_eq!(fractional_arboricity(&instances::petersen()).unwrap().value, Rational::new(5, 3));
        assert_eq!(fractional_arboricity(&MultiGraph::new(1)), Err(SparsityError::TooFewVertices));
    }

    #[test]
    fn overfull_examples() {
        let w = find_overfull(&k4(), 1).unwrap();
        assert_eq!(w.len(), 3);
        assert!(is_overfull_set(&k4(), &w, 1));
        assert_eq!(find_overfull(&k4(), 2), None);
        let triple = MultiGraph::from_edges(2, &[(0, 1), (0, 1), (0, 1)]).unwrap();
        assert_eq!(find_overfull(&triple, 2), Some(vec![0, 1]));
    }

    #[test]
    fn canonical_order() {
        assert!(canonical_less(0b1, 0b11));
        assert!(canonical_less(0b011, 0b101));
        assert!(!canonical_less(0b101, 0b011));
        assert!(!canonical_less(0b11, 0b11));
    }

    #[test]
    fn connected_enumeration_counts() {
        let mut count = 0;
        for_each_connected(&Masks::new(&k4()), &mut |_, _| count += 1);
        assert_eq!(count, 15);
        let mut count = 0;
        for_each_connected(&Masks::new(&instances::path(4)), &mut |_, _| count += 1);
        assert_eq!(count, 10);
    }

    #[test]
    fn flow_agrees_with_enumeration() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..200 {
            let n = rng.gen_range(2..9);
            let m = rng.gen_range(0..2 * n + 4);
            let g = instances::random_multigraph(n, m, &mut rng);
            for (k, d) in [(1, 3), (1, 4), (2, 5), (2, 6), (1, 1)] {
                let exact = min_beta_subgraph(&g, k, d);
                let fast = min_beta_by_flow(&g, k, d);
                assert_eq!(exact.value < 0, fast.value < 0);
                assert_eq!(fast.value, beta_of_set(&g, &fast.witness, k, d));
                if exact.value < 0 {
                    assert!(fast.value >= exact.value);
                }
            }
            for n_forests in 1..4 {
                let exact = find_overfull(&g, n_forests);
                let fast = overfull_by_flow(&g, n_forests);
                assert_eq!(exact.is_some(), fast.is_some());
                if let Some(w) = fast {
                    assert!(is_overfull_set(&g, &w, n_forests));
                }
            }
            assert_eq!(fractional_arboricity(&g).unwrap().value, arboricity_by_flow(&g).value);
        }
    }

    #[test]
    fn large_graphs_use_flow() {
        let g = instances::dodecahedron();
        let r = min_beta_subgraph(&g, 1, 4);
        assert!(r.value >= 0);
        let big = instances::cycle(30);
        assert_eq!(fractional_arboricity(&big).unwrap().value, Rational::new(30, 29));
        assert!(min_beta_subgraph(&big, 1, 3).is_sparse());
        assert_eq!(find_overfull(&big, 1).map(|w| w.len()), Some(30));
    }
}
