//! Built-in graphs, seeded random multigraphs and small-graph enumeration.

use std::collections::BTreeSet;

use rand::Rng;

use crate::graph::MultiGraph;

pub fn path(n: usize) -> MultiGraph {
    let edges: Vec<_> = (1..n).map(|i| (i - 1, i)).collect();
    MultiGraph::from_edges(n, &edges).expect("path edges are valid")
}

pub fn cycle(n: usize) -> MultiGraph {
    assert!(n >= 2, "a cycle needs two vertices");
    let edges: Vec<_> = (0..n).map(|i| (i, (i + 1) % n)).collect();
    MultiGraph::from_edges(n, &edges).expect("cycle edges are valid")
}

pub fn complete(n: usize) -> MultiGraph {
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            edges.push((u, v));
        }
    }
    MultiGraph::from_edges(n, &edges).expect("complete graph edges are valid")
}

pub fn k4() -> MultiGraph {
    complete(4)
}

/// Generalized Petersen graph: outer `n`-cycle, spokes, inner step-`s` star polygon.
pub fn generalized_petersen(n: usize, s: usize) -> MultiGraph {
    let mut edges = Vec::new();
    for i in 0..n {
        edges.push((i, (i + 1) % n));
        edges.push((i, n + i));
    }
    for i in 0..n {
        edges.push((n + i, n + (i + s) % n));
    }
    MultiGraph::from_edges(2 * n, &edges).expect("petersen edges are valid")
}

pub fn petersen() -> MultiGraph {
    generalized_petersen(5, 2)
}

pub fn dodecahedron() -> MultiGraph {
    generalized_petersen(10, 2)
}

/// `path_N`, `cycle_N`, `K4`, `K_N`, `petersen`, `dodecahedron` (case-insensitive).
pub fn named(name: &str) -> Option<MultiGraph> {
    let lower = name.to_ascii_lowercase();
    let sized = |prefix: &str| lower.strip_prefix(prefix).and_then(|n| n.parse::<usize>().ok());
    match lower.as_str() {
        "k4" => Some(k4()),
        "petersen" => Some(petersen()),
        "dodecahedron" => Some(dodecahedron()),
        _ => {
            if let Some(n) = sized("path_") {
                Some(path(n))
            } else if let Some(n) = sized("cycle_").filter(|&n| n >= 2) {
                Some(cycle(n))
            } else {
                sized("k_").map(complete)
            }
        }
    }
}

/// `m` edges with independently uniform endpoint pairs (no loops).
pub fn random_multigraph(n: usize, m: usize, rng: &mut impl Rng) -> MultiGraph {
    assert!(n >= 2 || m == 0, "edges need two vertices");
    let mut g = MultiGraph::new(n);
    for _ in 0..m {
        let u = rng.gen_range(0..n);
        let mut v = rng.gen_range(0..n - 1);
        if v >= u {
            v += 1;
        }
        g.add_edge(u, v).expect("endpoints are distinct and in range");
    }
    g
}

fn pair_index(n: usize, i: usize, j: usize) -> usize {
    let (i, j) = (i.min(j), i.max(j));
    i * n - i * (i + 1) / 2 + (j - i - 1)
}

fn code_under(n: usize, adj: &[u32], perm: &[usize]) -> u64 {
    let mut code = 0u64;
    for i in 0..n {
        for j in i + 1..n {
            if adj[perm[i]] >> perm[j] & 1 == 1 {
                code |= 1 << pair_index(n, i, j);
            }
        }
    }
    code
}

/// Smallest adjacency code over all relabelings that respect an invariant
/// vertex ordering; a complete isomorphism invariant.
fn canonical_code(n: usize, adj: &[u32]) -> u64 {
    let deg: Vec<u32> = adj.iter().map(|a| a.count_ones()).collect();
    let key = |v: usize| {
        let mut nd: Vec<u32> = (0..n).filter(|&w| adj[v] >> w & 1 == 1).map(|w| deg[w]).collect();
        nd.sort_unstable();
        (deg[v], nd)
    };
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&v| key(v));
    let mut classes: Vec<Vec<usize>> = Vec::new();
    for &v in &order {
        match classes.last_mut() {
            Some(c) if key(c[0]) == key(v) => c.push(v),
            _ => classes.push(vec![v]),
        }
    }
    fn permute(n: usize, adj: &[u32], classes: &[Vec<usize>], idx: usize, used: &mut Vec<bool>, perm: &mut Vec<usize>, best: &mut u64) {
        if perm.len() == n {
            *best = (*best).min(code_under(n, adj, perm));
            return;
        }
        let start: usize = classes[..idx].iter().map(|c| c.len()).sum();
        let class = &classes[idx];
        let pos = perm.len() - start;
        for &v in class {
            if used[v] {
                continue;
            }
            used[v] = true;
            perm.push(v);
            let next = if pos + 1 == class.len() { idx + 1 } else { idx };
            permute(n, adj, classes, next, used, perm, best);
            perm.pop();
            used[v] = false;
        }
    }
    let mut best = u64::MAX;
    if n == 0 {
        return 0;
    }
    permute(n, adj, &classes, 0, &mut vec![false; n], &mut Vec::new(), &mut best);
    best
}

fn decode(n: usize, code: u64) -> MultiGraph {
    let mut g = MultiGraph::new(n);
    for i in 0..n {
        for j in i + 1..n {
            if code >> pair_index(n, i, j) & 1 == 1 {
                g.add_edge(i, j).expect("valid pair");
            }
        }
    }
    g
}

/// One representative of every isomorphism class of simple graphs on `n` vertices.
pub fn simple_graphs(n: usize) -> Vec<MultiGraph> {
    assert!(n <= 8, "enumeration is meant for small graphs");
    let pairs = n * n.saturating_sub(1) / 2;
    let mut level: BTreeSet<u64> = BTreeSet::from([0]);
    let mut all: Vec<u64> = vec![0];
    for _ in 0..pairs {
        let mut next = BTreeSet::new();
        for &code in &level {
            let mut adj = vec![0u32; n];
            for i in 0..n {
                for j in i + 1..n {
                    if code >> pair_index(n, i, j) & 1 == 1 {
                        adj[i] |= 1 << j;
                        adj[j] |= 1 << i;
                    }
                }
            }
            for i in 0..n {
                for j in i + 1..n {
                    if adj[i] >> j & 1 == 0 {
                        adj[i] |= 1 << j;
                        adj[j] |= 1 << i;
                        next.insert(canonical_code(n, &adj));
                        adj[i] &= !(1 << j);
                        adj[j] &= !(1 << i);
                    }
                }
            }
        }
        all.extend(next.iter().copied());
        level = next;
    }
    all.into_iter().map(|c| decode(n, c)).collect()
}

/// Every connected simple graph on `1..=max_n` vertices, up to isomorphism.
///
/// ```
/// let counts: Vec<usize> = (1..=5)
///     .map(|n| forestsplit::instances::connected_simple_graphs(n).iter().filter(|g| g.vertex_count() == n).count())
///     .collect();
/// assert_eq!(counts, [1, 1, 2, 6, 21]);
/// ```
pub fn connected_simple_graphs(max_n: usize) -> Vec<MultiGraph> {
    (1..=max_n)
        .flat_map(|n| simple_graphs(n).into_iter().filter(|g| g.is_connected()))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    #[test]
    fn named_instances() {
        assert_eq!(named("path_5").unwrap().edge_count(), 4);
        assert_eq!(named("cycle_7").unwrap().edge_count(), 7);
        assert_eq!(named("K4").unwrap().edge_count(), 6);
        let p = named("Petersen").unwrap();
        assert_eq!((p.vertex_count(), p.edge_count()), (10, 15));
        assert!((0..10).all(|v| p.degree(v) == 3));
        let d = named("dodecahedron").unwrap();
        assert_eq!((d.vertex_count(), d.edge_count()), (20, 30));
        assert!((0..20).all(|v| d.degree(v) == 3));
        assert!(named("nonsense").is_none());
    }

    #[test]
    fn graph_counts_match_known_sequence() {
        let all: Vec<usize> = (1..=6).map(|n| simple_graphs(n).len()).collect();
        assert_eq!(all, [1, 2, 4, 11, 34, 156]);
        let connected = connected_simple_graphs(7);
        assert_eq!(connected.len(), 1 + 1 + 2 + 6 + 21 + 112 + 853);
    }

    #[test]
    fn random_graphs_are_seeded() {
        let a = random_multigraph(6, 9, &mut rand_chacha::ChaCha8Rng::seed_from_u64(3));
        let b = random_multigraph(6, 9, &mut rand_chacha::ChaCha8Rng::seed_from_u64(3));
        assert_eq!(a, b);
        assert!(a.edges().all(|(_, u, v)| u != v));
    }

    #[test]
    fn dodecahedron_has_girth_five() {
        let g = dodecahedron();
        for s in 0..g.vertex_count() {
            let mut dist = [usize::MAX; 20];
            let mut par = [usize::MAX; 20];
            dist[s] = 0;
            let mut q = std::collections::VecDeque::from([s]);
            while let Some(v) = q.pop_front() {
                for &e in g.incident(v) {
                    let w = g.opposite(e, v);
                    if dist[w] == usize::MAX {
                        dist[w] = dist[v] + 1;
                        par[w] = v;
                        q.push_back(w);
                    } else if par[v] != w {
                        assert!(dist[v] + dist[w] + 1 >= 5);
                    }
                }
            }
        }
    }
}
