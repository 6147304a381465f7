//! Brute-force ground truth for small instances.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{EdgeId, MultiGraph, Vertex};
use crate::sparsity::{beta_value, canonical_less, mask_to_vec, Masks, Rational};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OracleError {
    #[error("instance has {vertices} vertices and {edges} edges; oracle caps are {max_vertices} and {max_edges}")]
    TooLarge { vertices: usize, edges: usize, max_vertices: usize, max_edges: usize },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct OracleCaps {
    pub max_vertices: usize,
    pub max_edges: usize,
}

impl Default for OracleCaps {
    fn default() -> Self {
        OracleCaps { max_vertices: 10, max_edges: 16 }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OracleVerdict {
    pub feasible: bool,
    /// `k + 1` edge lists; the last one is the bounded forest.
    pub forests: Option<Vec<Vec<EdgeId>>>,
    pub nodes: u64,
}

/// Union-find with undo, no path compression.
struct UndoUf {
    parent: Vec<usize>,
    size: Vec<usize>,
    edges: Vec<usize>,
    log: Vec<(usize, usize)>,
}

impl UndoUf {
    fn new(n: usize) -> Self {
        UndoUf { parent: (0..n).collect(), size: vec![1; n], edges: vec![0; n], log: Vec::new() }
    }

    fn find(&self, mut x: usize) -> usize {
        while self.parent[x] != x {
            x = self.parent[x];
        }
        x
    }

    /// Joins the roots `a` and `b`, recording the merge.
    fn join(&mut self, a: usize, b: usize) {
        let (big, small) = if self.size[a] >= self.size[b] { (a, b) } else { (b, a) };
        self.parent[small] = big;
        self.size[big] += self.size[small];
        self.edges[big] += self.edges[small] + 1;
        self.log.push((big, small));
    }

    fn undo(&mut self) {
        let (big, small) = self.log.pop().expect("undo matches a join");
        self.parent[small] = small;
        self.size[big] -= self.size[small];
        self.edges[big] -= self.edges[small] + 1;
    }
}

struct Search<'a> {
    g: &'a MultiGraph,
    k: usize,
    d: usize,
    classes: Vec<UndoUf>,
    used: Vec<usize>,
    assignment: Vec<usize>,
    nodes: u64,
}

impl Search<'_> {
    fn go(&mut self, e: EdgeId, trees_open: usize) -> bool {
        self.nodes += 1;
        let m = self.g.edge_count();
        if e == m {
            return true;
        }
        let n = self.g.vertex_count();
        let room: usize = self.used.iter().map(|&u| n - 1 - u).sum();
        if m - e > room {
            return false;
        }
        let (u, v) = self.g.endpoints(e);
        // Tree classes are interchangeable: open them in index order.
        let tree_choices = (0..self.k).filter(|&c| c <= trees_open);
        for c in tree_choices.chain(std::iter::once(self.k)) {
            let uf = &self.classes[c];
            let (ru, rv) = (uf.find(u), uf.find(v));
            if ru == rv {
                continue;
            }
            if c == self.k && uf.edges[ru] + uf.edges[rv] + 1 > self.d {
                continue;
            }
            self.classes[c].join(ru, rv);
            self.used[c] += 1;
            self.assignment[e] = c;
            let open = if c < self.k && c == trees_open { trees_open + 1 } else { trees_open };
            if self.go(e + 1, open) {
                return true;
            }
            self.classes[c].undo();
            self.used[c] -= 1;
        }
        false
    }
}

/// Exhaustive search for `k` forests plus one forest with components of at most `d` edges.
///
/// ```
/// use forestsplit::{instances, oracle::{brute_force_decompose, OracleCaps}};
/// let v = brute_force_decompose(&instances::cycle(5), 1, 1, OracleCaps::default()).unwrap();
/// assert!(v.feasible);
/// ```
pub fn brute_force_decompose(g: &MultiGraph, k: usize, d: usize, caps: OracleCaps) -> Result<OracleVerdict, OracleError> {
    let (n, m) = (g.vertex_count(), g.edge_count());
    if n > caps.max_vertices || m > caps.max_edges {
        return Err(OracleError::TooLarge { vertices: n, edges: m, max_vertices: caps.max_vertices, max_edges: caps.max_edges });
    }
    let mut s = Search {
        g,
        k,
        d,
        classes: (0..=k).map(|_| UndoUf::new(n)).collect(),
        used: vec![0; k + 1],
        assignment: vec![0; m],
        nodes: 0,
    };
    let feasible = n == 0 || s.go(0, 0);
    let forests = feasible.then(|| (0..=k).map(|c| (0..m).filter(|&e| s.assignment[e] == c).collect()).collect());
    Ok(OracleVerdict { feasible, forests, nodes: s.nodes })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DensityScan {
    pub min_beta: i64,
    pub min_beta_set: Vec<Vertex>,
    pub max_ratio: Rational,
    pub max_ratio_set: Vec<Vertex>,
}

fn connected_mask(m: &Masks, set: u64) -> bool {
    let start = set & set.wrapping_neg();
    let mut reach = start;
    loop {
        let mut grown = reach;
        let mut s = reach;
        while s != 0 {
            let v = s.trailing_zeros() as usize;
            s &= s - 1;
            grown |= m.nbr[v] & set;
        }
        if grown == reach {
            return reach == set;
        }
        reach = grown;
    }
}

/// Plain scan over every vertex subset; no pruning.
pub fn exhaustive_density_scan(g: &MultiGraph, k: usize, d: usize) -> Result<DensityScan, OracleError> {
    let n = g.vertex_count();
    if !(2..=20).contains(&n) {
        return Err(OracleError::TooLarge { vertices: n, edges: g.edge_count(), max_vertices: 20, max_edges: usize::MAX });
    }
    let masks = Masks::new(g);
    let mut beta_best: Option<(i64, u64)> = None;
    let mut ratio_best: Option<(Rational, u64)> = None;
    for set in 1u64..(1u64 << n) {
        let vs = mask_to_vec(set);
        let e = g.edges().filter(|&(_, u, v)| set >> u & 1 == 1 && set >> v & 1 == 1).count();
        let v = vs.len();
        if connected_mask(&masks, set) {
            let b = beta_value(k, d, v, e);
            if beta_best.is_none_or(|(bv, bs)| b < bv || (b == bv && canonical_less(set, bs))) {
                beta_best = Some((b, set));
            }
        }
        if v >= 2 {
            let r = Rational::new(e as i64, v as i64 - 1);
            if ratio_best.is_none_or(|(rv, rs)| r > rv || (r == rv && canonical_less(set, rs))) {
                ratio_best = Some((r, set));
            }
        }
    }
    let (min_beta, bset) = beta_best.expect("n >= 2");
    let (max_ratio, rset) = ratio_best.expect("n >= 2");
    Ok(DensityScan { min_beta, min_beta_set: mask_to_vec(bset), max_ratio, max_ratio_set: mask_to_vec(rset) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instances;

    fn check(g: &MultiGraph, k: usize, d: usize, v: &OracleVerdict) {
        let forests = v.forests.as_ref().unwrap();
        let mut count = vec![0; g.edge_count()];
        for f in forests {
            assert!(crate::graph::is_forest(g, f.iter().copied()));
            for &e in f {
                count[e] += 1;
            }
        }
        assert!(count.iter().all(|&c| c == 1));
        for (_, es) in crate::graph::edge_components(g, &forests[k]) {
            assert!(es.len() <= d);
        }
    }

    #[test]
    fn oracle_examples() {
        let caps = OracleCaps::default();
        let c5 = instances::cycle(5);
        let v = brute_force_decompose(&c5, 1, 1, caps).unwrap();
        assert!(v.feasible);
        check(&c5, 1, 1, &v);
        let triple = MultiGraph::from_edges(2, &[(0, 1), (0, 1), (0, 1)]).unwrap();
        assert!(!brute_force_decompose(&triple, 1, 1, caps).unwrap().feasible);
        let tri = instances::cycle(3);
        let v = brute_force_decompose(&tri, 1, 1, caps).unwrap();
        assert!(v.feasible);
        check(&tri, 1, 1, &v);
    }

    #[test]
    fn oracle_refuses_large_instances() {
        let big = instances::complete(7);
        assert!(matches!(
            brute_force_decompose(&big, 2, 3, OracleCaps::default()),
            Err(OracleError::TooLarge { edges: 21, .. })
        ));
    }

    #[test]
    fn oracle_is_deterministic() {
        let g = instances::petersen();
        let caps = OracleCaps { max_vertices: 10, max_edges: 15 };
        let a = brute_force_decompose(&g, 1, 4, caps).unwrap();
        let b = brute_force_decompose(&g, 1, 4, caps).unwrap();
        assert_eq!(a, b);
        assert!(a.feasible);
        check(&g, 1, 4, &a);
    }

    #[test]
    fn scan_examples() {
        let s = exhaustive_density_scan(&instances::k4(), 1, 3).unwrap();
        assert_eq!((s.min_beta, s.max_ratio), (1, Rational::from_integer(2)));
        assert_eq!(s.min_beta_set, vec![0, 1, 2, 3]);
        let s = exhaustive_density_scan(&instances::path(5), 2, 3).unwrap();
        assert_eq!((s.min_beta, s.max_ratio), (3 * 5 - 4, Rational::from_integer(1)));
        assert_eq!(s.min_beta_set, vec![0]);
        let s = exhaustive_density_scan(&instances::petersen(), 1, 4).unwrap();
        assert_eq!(s.max_ratio, Rational::new(5, 3));
    }
}
