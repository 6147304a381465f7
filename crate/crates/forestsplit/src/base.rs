//! Starting decompositions: `n` forests, then `k` spanning trees plus a forest.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{is_forest, EdgeId, MultiGraph, Vertex};
use crate::sparsity::find_overfull;

/// Class index per edge id.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ForestDecomposition {
    pub n: usize,
    pub assignment: Vec<usize>,
}

impl ForestDecomposition {
    pub fn class(&self, c: usize) -> Vec<EdgeId> {
        (0..self.assignment.len()).filter(|&e| self.assignment[e] == c).collect()
    }

    pub fn is_valid(&self, g: &MultiGraph) -> bool {
        self.assignment.len() == g.edge_count()
            && self.assignment.iter().all(|&c| c < self.n)
            && (0..self.n).all(|c| is_forest(g, self.class(c)))
    }
}

/// Edge colour in a trees-plus-forest split.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Colour {
    Blue(usize),
    Red,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum BaseError {
    #[error("graph is not connected")]
    Disconnected,
    #[error("no split into {n} forests; vertices {witness:?} induce too many edges")]
    Overfull { n: usize, witness: Vec<Vertex> },
}

/// Result of refining to spanning trees.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Refinement {
    pub colour: Vec<Colour>,
    /// False when the blue classes could not all be made spanning trees;
    /// `colour` then holds a maximum packing of `k` forests.
    pub spanning: bool,
}

/// Path between `u` and `v` inside class `c`, if connected.
pub(crate) fn class_path(
    g: &MultiGraph,
    in_class: impl Fn(EdgeId) -> bool,
    u: Vertex,
    v: Vertex,
) -> Option<Vec<EdgeId>> {
    let n = g.vertex_count();
    let mut via: Vec<Option<EdgeId>> = vec![None; n];
    let mut seen = vec![false; n];
    seen[u] = true;
    let mut queue = VecDeque::from([u]);
    while let Some(x) = queue.pop_front() {
        if x == v {
            break;
        }
        for &e in g.incident(x) {
            if !in_class(e) {
                continue;
            }
            let y = g.opposite(e, x);
            if !seen[y] {
                seen[y] = true;
                via[y] = Some(e);
                queue.push_back(y);
            }
        }
    }
    if !seen[v] {
        return None;
    }
    let mut path = Vec::new();
    let mut x = v;
    while let Some(e) = via[x] {
        path.push(e);
        x = g.opposite(e, x);
    }
    path.reverse();
    Some(path)
}

/// Inserts `f` into one of `classes` forests, moving other edges along a
/// shortest exchange path. `class_of[e] == None` means unassigned.
/// Edges with `frozen[e]` never move. Returns false if no path exists.
pub(crate) fn insert_edge(
    g: &MultiGraph,
    class_of: &mut [Option<usize>],
    classes: usize,
    f: EdgeId,
    frozen: &[bool],
) -> bool {
    let m = g.edge_count();
    let mut pred: Vec<Option<EdgeId>> = vec![None; m];
    let mut seen = vec![false; m];
    seen[f] = true;
    let mut queue = VecDeque::from([f]);
    while let Some(x) = queue.pop_front() {
        let (a, b) = g.endpoints(x);
        for c in 0..classes {
            if class_of[x] == Some(c) {
                continue;
            }
            match class_path(g, |e| class_of[e] == Some(c), a, b) {
                None => {
                    // x enters c; each predecessor takes the class its successor left.
                    let mut moves = vec![(x, c)];
                    let mut cur = x;
                    while let Some(p) = pred[cur] {
                        moves.push((p, class_of[cur].expect("displaced edges are assigned")));
                        cur = p;
                    }
                    for (e, cls) in moves {
                        class_of[e] = Some(cls);
                    }
                    return true;
                }
                Some(cycle) => {
                    for y in cycle {
                        if !seen[y] && !frozen[y] {
                            seen[y] = true;
                            pred[y] = Some(x);
                            queue.push_back(y);
                        }
                    }
                }
            }
        }
    }
    false
}

/// Splits `g` into `n` forests, or returns an `n`-overfull vertex set.
///
/// ```
/// use forestsplit::{base::forest_decomposition, instances};
/// let fd = forest_decomposition(&instances::k4(), 2).unwrap();
/// assert!(fd.is_valid(&instances::k4()));
/// assert!(forest_decomposition(&instances::cycle(3), 1).is_err());
/// ```
pub fn forest_decomposition(g: &MultiGraph, n: usize) -> Result<ForestDecomposition, BaseError> {
    assert!(n >= 1, "need at least one forest");
    let m = g.edge_count();
    let mut class_of: Vec<Option<usize>> = vec![None; m];
    let frozen = vec![false; m];
    for f in 0..m {
        if !insert_edge(g, &mut class_of, n, f, &frozen) {
            let witness = find_overfull(g, n).expect("failed insertion implies an overfull subgraph");
            return Err(BaseError::Overfull { n, witness });
        }
        debug_assert!((0..n).all(|c| is_forest(g, (0..m).filter(|&e| class_of[e] == Some(c)))));
    }
    Ok(ForestDecomposition { n, assignment: class_of.into_iter().map(|c| c.expect("all assigned")).collect() })
}

/// `k` blue spanning trees plus a red forest, starting from `k + 1` forests.
///
/// The smallest class becomes red; red edges are then pushed into the blue
/// classes by exchange paths until no more fit. Red only ever shrinks, so it
/// stays a forest. The blue classes end as a maximum `k`-forest packing, which
/// consists of spanning trees exactly when the graph has `k` disjoint ones.
pub fn to_spanning_plus_residual(g: &MultiGraph, k: usize) -> Result<Refinement, BaseError> {
    assert!(k >= 1, "need at least one tree");
    if !g.is_connected() {
        return Err(BaseError::Disconnected);
    }
    let fd = forest_decomposition(g, k + 1)?;
    let m = g.edge_count();
    let sizes: Vec<usize> = (0..=k).map(|c| fd.class(c).len()).collect();
    let red = (0..=k).min_by_key(|&c| (sizes[c], c)).expect("k + 1 classes");
    let mut class_of: Vec<Option<usize>> = fd
        .assignment
        .iter()
        .map(|&c| match c.cmp(&red) {
            std::cmp::Ordering::Less => Some(c),
            std::cmp::Ordering::Equal => None,
            std::cmp::Ordering::Greater => Some(c - 1),
        })
        .collect();
    let frozen = vec![false; m];
    // A red edge that cannot enter now never can later: blue only grows in span.
    for f in 0..m {
        if class_of[f].is_none() {
            insert_edge(g, &mut class_of, k, f, &frozen);
        }
    }
    let blue = class_of.iter().filter(|c| c.is_some()).count();
    let spanning = blue == k * g.vertex_count().saturating_sub(1);
    let colour = class_of.into_iter().map(|c| c.map_or(Colour::Red, Colour::Blue)).collect();
    Ok(Refinement { colour, spanning })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instances;

    fn check_refinement(g: &MultiGraph, k: usize, r: &Refinement) {
        let red: Vec<_> = (0..g.edge_count()).filter(|&e| r.colour[e] == Colour::Red).collect();
        assert!(is_forest(g, red));
        for b in 0..k {
            let class: Vec<_> = (0..g.edge_count()).filter(|&e| r.colour[e] == Colour::Blue(b)).collect();
            assert!(is_forest(g, class.iter().copied()));
            if r.spanning {
                assert_eq!(class.len(), g.vertex_count() - 1);
            }
        }
    }

    #[test]
    fn forest_examples() {
        let p = instances::path(3);
        assert_eq!(forest_decomposition(&p, 1).unwrap().assignment, vec![0, 0]);
        match forest_decomposition(&instances::cycle(3), 1) {
            Err(BaseError::Overfull { witness, .. }) => assert_eq!(witness, vec![0, 1, 2]),
            other => panic!("{other:?}"),
        }
        let k4 = instances::k4();
        let fd = forest_decomposition(&k4, 2).unwrap();
        assert!(fd.is_valid(&k4));
        assert_eq!(fd.class(0).len() + fd.class(1).len(), 6);
    }

    #[test]
    fn refinement_examples() {
        let tree = instances::path(5);
        let r = to_spanning_plus_residual(&tree, 1).unwrap();
        assert!(r.spanning);
        assert!(r.colour.iter().all(|&c| c == Colour::Blue(0)));

        let r = to_spanning_plus_residual(&instances::cycle(3), 2).unwrap();
        assert!(!r.spanning);
        check_refinement(&instances::cycle(3), 2, &r);

        let k4 = instances::k4();
        let r = to_spanning_plus_residual(&k4, 1).unwrap();
        assert!(r.spanning);
        check_refinement(&k4, 1, &r);
        assert_eq!(r.colour.iter().filter(|&&c| c == Colour::Red).count(), 3);

        let two = MultiGraph::from_edges(3, &[(0, 1), (2, 1)]).unwrap();
        assert!(to_spanning_plus_residual(&MultiGraph::from_edges(3, &[(0, 1)]).unwrap(), 1).is_err());
        assert!(to_spanning_plus_residual(&two, 1).unwrap().spanning);
    }

    #[test]
    fn decomposition_agrees_with_overfull_search() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..300 {
            let n = rng.gen_range(2..8);
            let m = rng.gen_range(0..3 * n);
            let g = instances::random_multigraph(n, m, &mut rng);
            for forests in 1..4 {
                let fd = forest_decomposition(&g, forests);
                assert_eq!(fd.is_ok(), find_overfull(&g, forests).is_none());
                if let Ok(fd) = fd {
                    assert!(fd.is_valid(&g));
                }
            }
            if g.is_connected() {
                for k in 1..3 {
                    if let Ok(r) = to_spanning_plus_residual(&g, k) {
                        check_refinement(&g, k, &r);
                    }
                }
            }
        }
    }
}
