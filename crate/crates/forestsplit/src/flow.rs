//! Max-weight closure over "edge implies both endpoints", solved by min cut.
//!
//! Picks a vertex set `S` maximizing `edge_weight * e(S) - vertex_weight * |S|`
//! subject to `forced ⊆ S`.

use std::collections::VecDeque;

use crate::graph::{MultiGraph, Vertex};

const INF: i64 = i64::MAX / 4;

struct Dinic {
    head: Vec<Vec<usize>>,
    to: Vec<usize>,
    cap: Vec<i64>,
    level: Vec<i32>,
    iter: Vec<usize>,
}

impl Dinic {
    fn new(n: usize) -> Self {
        Dinic { head: vec![Vec::new(); n], to: Vec::new(), cap: Vec::new(), level: vec![0; n], iter: vec![0; n] }
    }

    fn add(&mut self, a: usize, b: usize, c: i64) {
        self.head[a].push(self.to.len());
        self.to.push(b);
        self.cap.push(c);
        self.head[b].push(self.to.len());
        self.to.push(a);
        self.cap.push(0);
    }

    fn bfs(&mut self, s: usize) {
        self.level.iter_mut().for_each(|l| *l = -1);
        self.level[s] = 0;
        let mut q = VecDeque::from([s]);
        while let Some(v) = q.pop_front() {
            for &id in &self.head[v] {
                let w = self.to[id];
                if self.cap[id] > 0 && self.level[w] < 0 {
                    self.level[w] = self.level[v] + 1;
                    q.push_back(w);
                }
            }
        }
    }

    fn dfs(&mut self, v: usize, t: usize, f: i64) -> i64 {
        if v == t {
            return f;
        }
        while self.iter[v] < self.head[v].len() {
            let id = self.head[v][self.iter[v]];
            let w = self.to[id];
            if self.cap[id] > 0 && self.level[v] < self.level[w] {
                let got = self.dfs(w, t, f.min(self.cap[id]));
                if got > 0 {
                    self.cap[id] -= got;
                    self.cap[id ^ 1] += got;
                    return got;
                }
            }
            self.iter[v] += 1;
        }
        0
    }

    fn run(&mut self, s: usize, t: usize) -> i64 {
        let mut total = 0;
        loop {
            self.bfs(s);
            if self.level[t] < 0 {
                return total;
            }
            self.iter.iter_mut().for_each(|i| *i = 0);
            loop {
                let f = self.dfs(s, t, INF);
                if f == 0 {
                    break;
                }
                total += f;
            }
        }
    }
}

/// Returns the optimum value and the (inclusion-minimal) optimal set, sorted.
pub(crate) fn max_closure(
    g: &MultiGraph,
    edge_weight: i64,
    vertex_weight: i64,
    forced: &[Vertex],
) -> (i64, Vec<Vertex>) {
    let n = g.vertex_count();
    let m = g.edge_count();
    let s = n + m;
    let t = s + 1;
    let mut net = Dinic::new(n + m + 2);
    for (e, u, v) in g.edges() {
        net.add(s, n + e, edge_weight);
        net.add(n + e, u, INF);
        net.add(n + e, v, INF);
    }
    for v in 0..n {
        net.add(v, t, vertex_weight);
    }
    for &v in forced {
        net.add(s, v, INF);
    }
    let cut = net.run(s, t);
    net.bfs(s);
    let set: Vec<Vertex> = (0..n).filter(|&v| net.level[v] >= 0).collect();
    let value = edge_weight * g.edges_within(&membership(n, &set)) as i64 - vertex_weight * set.len() as i64;
    debug_assert!(forced.iter().all(|v| set.contains(v)));
    debug_assert_eq!(value, edge_weight * m as i64 - cut);
    (value, set)
}

pub(crate) fn membership(n: usize, set: &[Vertex]) -> Vec<bool> {
    let mut inside = vec![false; n];
    for &v in set {
        inside[v] = true;
    }
    inside
}
