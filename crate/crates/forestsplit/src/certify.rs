//! Checking decompositions, and density certificates for stuck states.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::engine::neighbours::{relevant_neighbours, NeighbourKind, RelevantNeighbour};
use crate::engine::order::LegalOrder;
use crate::engine::state::DecompositionState;
use crate::graph::{edge_components, is_forest, EdgeId, MultiGraph, Vertex};
use crate::sparsity::{beta_of_set, Rational};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub passed: bool,
    /// A class whose components all have at most `d` edges, preferring the last.
    pub qualifying_class: Option<usize>,
    pub problems: Vec<String>,
}

/// Checks that `forests` are `k + 1` forests partitioning the edges, one of
/// them with components of at most `d` edges.
///
/// ```
/// use forestsplit::{certify::verify, instances};
/// let k4 = instances::k4();
/// // Edges: 01 02 03 12 13 23. Star at 0, then the path 1-2-3... plus 1-3.
/// let r = verify(&k4, 1, 3, &[vec![0, 1, 2], vec![3, 5, 4]]);
/// assert!(!r.passed);
/// let r = verify(&k4, 1, 3, &[vec![0, 3, 5], vec![1, 2, 4]]);
/// assert!(r.passed);
/// ```
pub fn verify(g: &MultiGraph, k: usize, d: usize, forests: &[Vec<EdgeId>]) -> VerifyReport {
    let mut problems = Vec::new();
    if forests.len() != k + 1 {
        problems.push(format!("expected {} classes, found {}", k + 1, forests.len()));
    }
    let m = g.edge_count();
    let mut seen = vec![0usize; m];
    for (c, f) in forests.iter().enumerate() {
        for &e in f {
            if e >= m {
                problems.push(format!("class {c} names unknown edge {e}"));
            } else {
                seen[e] += 1;
            }
        }
    }
    for (e, &count) in seen.iter().enumerate() {
        if count != 1 {
            problems.push(format!("edge {e} is used {count} times"));
        }
    }
    let mut qualifying = Vec::new();
    for (c, f) in forests.iter().enumerate() {
        let f: Vec<EdgeId> = f.iter().copied().filter(|&e| e < m).collect();
        if !is_forest(g, f.iter().copied()) {
            problems.push(format!("class {c} contains a cycle"));
        } else if edge_components(g, &f).iter().all(|(_, es)| es.len() <= d) {
            qualifying.push(c);
        }
    }
    let qualifying_class = qualifying.iter().copied().find(|&c| c == k).or(qualifying.first().copied());
    if qualifying_class.is_none() {
        problems.push(format!("no class has all components within {d} edges"));
    }
    VerifyReport { passed: problems.is_empty(), qualifying_class, problems }
}

/// Red components of the exploration subgraph: the root one, the rest with
/// at least two edges, and the small ones.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComponentPartition {
    pub root: usize,
    pub large: Vec<usize>,
    pub small: Vec<usize>,
}

pub fn partition_components(state: &DecompositionState, order: &LegalOrder) -> ComponentPartition {
    let root = order.components[0];
    let red = state.red();
    let (small, large) = order.components[1..].iter().partition(|&&c| red.size(c) <= 1);
    ComponentPartition { root, large, small }
}

/// `host` has an edgeless relevant neighbour and another one in tree `b`.
/// Returns (other, edgeless).
pub fn bad_pair(state: &DecompositionState, order: &LegalOrder, host: usize, b: usize) -> Option<(RelevantNeighbour, RelevantNeighbour)> {
    let nbs: Vec<RelevantNeighbour> = relevant_neighbours(state, order, host).into_iter().filter(|nb| nb.tree == b).collect();
    let zero = *nbs.iter().find(|nb| nb.c == 0)?;
    let other = *nbs.iter().find(|nb| **nb != zero)?;
    Some((other, zero))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SinkSequence {
    pub tree: usize,
    /// (red component, vertex generating the previous component's arc)
    pub steps: Vec<(usize, Vertex)>,
}

/// One sink sequence per bad component whose other neighbour has exactly one
/// edge, plus diagnostics for chains that break.
pub fn sink_sequences(state: &DecompositionState, order: &LegalOrder, b: usize) -> (Vec<SinkSequence>, Vec<String>) {
    let red = state.red();
    let mut out = Vec::new();
    let mut problems = Vec::new();
    for &host in &order.components {
        let Some((x, _)) = bad_pair(state, order, host, b) else { continue };
        if x.kind != NeighbourKind::SmallChild || red.size(x.component) != 1 {
            continue;
        }
        match extend_sink(state, order, b, host, x.x) {
            Ok(seq) => out.push(seq),
            Err(p) => problems.push(p),
        }
    }
    (out, problems)
}

fn extend_sink(state: &DecompositionState, order: &LegalOrder, b: usize, start: usize, x: Vertex) -> Result<SinkSequence, String> {
    let red = state.red();
    let mut steps = vec![(start, x)];
    let mut cur = start;
    loop {
        let Some((_, zero)) = bad_pair(state, order, cur, b) else {
            return Ok(SinkSequence { tree: b, steps });
        };
        let y = zero.x;
        let reds = state.red_neighbours(y);
        let [(n_y, _)] = reds[..] else {
            return Err(format!("component {cur}: vertex {y} has {} red neighbours", reds.len()));
        };
        let chain = state.ancestors(b, n_y);
        let Some(pos) = chain.iter().position(|&v| v == y).filter(|&p| p > 0) else {
            return Err(format!("component {cur}: {n_y} is not below {y} in tree {b}"));
        };
        let z = chain[pos - 1];
        if red.comp_of[z] == cur {
            return Err(format!("component {cur}: predecessor {z} of {y} lies inside it"));
        }
        let next = red.comp_of[z];
        let interesting = relevant_neighbours(state, order, next)
            .into_iter()
            .any(|nb| nb.kind == NeighbourKind::Interesting && nb.x == z && nb.tree == b && nb.component == cur);
        if !interesting {
            return Err(format!("component {cur} is not an interesting neighbour of {next} through {z}"));
        }
        if steps.iter().any(|&(c, _)| c == next) {
            return Err(format!("sink sequence revisits component {next}"));
        }
        steps.push((next, z));
        cur = next;
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Tally {
    pub zeros: usize,
    pub ones: usize,
    pub q0: usize,
    pub q1: usize,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Assignment {
    /// small component -> receiving component
    pub target: BTreeMap<usize, usize>,
    pub tallies: BTreeMap<usize, Tally>,
}

/// Sends every small component to its parent, except one-edge children of a
/// bad parent, which travel to the end of their sink sequence.
pub fn build_assignment(state: &DecompositionState, order: &LegalOrder) -> Result<Assignment, Vec<String>> {
    let red = state.red();
    let (k, d) = (state.k(), state.d());
    let part = partition_components(state, order);
    let mut problems = Vec::new();
    let mut sinks: BTreeMap<(usize, usize, Vertex), usize> = BTreeMap::new();
    for b in 0..k {
        let (seqs, p) = sink_sequences(state, order, b);
        problems.extend(p);
        for s in seqs {
            let (first, x) = s.steps[0];
            sinks.insert((b, first, x), s.steps.last().expect("nonempty").0);
        }
    }
    let mut a = Assignment::default();
    for &c in &part.small {
        let (b, arc) = order.generator_of(c).expect("small components are not first");
        let parent = red.comp_of[arc.tail];
        if parent == part.root {
            problems.push(format!("small component {c} hangs off the root component"));
            continue;
        }
        if red.size(parent) <= 1 {
            problems.push(format!("small component {c} hangs off small component {parent}"));
            continue;
        }
        let mut target = parent;
        if red.size(c) == 1 && bad_pair(state, order, parent, b).is_some() {
            match sinks.get(&(b, parent, arc.tail)) {
                Some(&end) => target = end,
                None => {
                    problems.push(format!("no sink sequence starts at component {parent}"));
                    continue;
                }
            }
        }
        a.target.insert(c, target);
        let t = a.tallies.entry(target).or_default();
        if red.size(c) == 0 {
            t.zeros += 1;
        } else {
            t.ones += 1;
        }
    }
    for (&target, t) in a.tallies.iter_mut() {
        let e = red.size(target);
        t.q0 = t.zeros;
        t.q1 = t.ones.div_ceil(2);
        if e + 1 < d {
            problems.push(format!("component {target} with {e} edges receives small components"));
        } else if e + 1 == d {
            if t.zeros > 0 || t.ones > k {
                problems.push(format!("component {target} with d - 1 edges receives {} + {}", t.zeros, t.ones));
            }
        } else if t.q0 + t.q1 > k {
            problems.push(format!("component {target} receives {} edgeless and {} one-edge components", t.zeros, t.ones));
        }
    }
    if problems.is_empty() {
        Ok(a)
    } else {
        Err(problems)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DensityCheck {
    pub component: Option<usize>,
    pub value: Rational,
    pub bound: Rational,
    pub pass: bool,
}

/// `(e(K) + sum e(C)) / (v(K) + sum v(C))` against `d / (d + k + 1)`.
///
/// ```
/// use forestsplit::{certify::density_check, sparsity::Rational};
/// let c = density_check(1, 4, 4, 5, &[(0, 1)]);
/// assert_eq!(c.value, Rational::new(4, 6));
/// assert!(c.pass);
/// ```
pub fn density_check(k: usize, d: usize, k_edges: usize, k_vertices: usize, assignees: &[(usize, usize)]) -> DensityCheck {
    let e = k_edges + assignees.iter().map(|a| a.0).sum::<usize>();
    let v = k_vertices + assignees.iter().map(|a| a.1).sum::<usize>();
    let value = Rational::new(e as i64, v as i64);
    let bound = Rational::new(d as i64, (d + k + 1) as i64);
    DensityCheck { component: None, value, bound, pass: value >= bound }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Group {
    #[serde(rename = "K_edges")]
    pub k_edges: Vec<EdgeId>,
    #[serde(rename = "K_vertices")]
    pub k_vertices: Vec<Vertex>,
    pub assignees: Vec<Vec<Vertex>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Certificate {
    pub beta: i64,
    pub witness_vertices: Vec<Vertex>,
    pub groups: Vec<Group>,
    pub checks: Vec<DensityCheck>,
}

/// Assembles a density certificate from a stuck state: the exploration
/// subgraph, when every group around a large component is dense enough,
/// has negative beta.
pub fn dense_witness(state: &DecompositionState, order: &LegalOrder) -> Result<Certificate, Vec<String>> {
    let (k, d) = (state.k(), state.d());
    if !state.is_spanning() {
        return Err(vec!["blue classes are not spanning trees".into()]);
    }
    let red = state.red();
    let part = partition_components(state, order);
    let root_edges = red.size(part.root);
    if root_edges < d + 1 || red.vertices[part.root].len() < d + 2 {
        return Err(vec![format!("root component has only {root_edges} edges")]);
    }
    let assignment = build_assignment(state, order)?;
    let mut groups = Vec::new();
    let mut checks = Vec::new();
    let mut failures = Vec::new();
    for &kc in &part.large {
        let assignees: Vec<usize> = assignment.target.iter().filter(|&(_, &t)| t == kc).map(|(&c, _)| c).collect();
        let sizes: Vec<(usize, usize)> = assignees.iter().map(|&c| (red.size(c), red.vertices[c].len())).collect();
        let mut check = density_check(k, d, red.size(kc), red.vertices[kc].len(), &sizes);
        check.component = Some(kc);
        if !check.pass {
            failures.push(format!("component {kc} group density {} below {}", check.value, check.bound));
        }
        checks.push(check);
        groups.push(Group {
            k_edges: red.edges[kc].clone(),
            k_vertices: red.vertices[kc].clone(),
            assignees: assignees.iter().map(|&c| red.vertices[c].clone()).collect(),
        });
    }
    if !failures.is_empty() {
        return Err(failures);
    }
    let witness: Vec<Vertex> = (0..state.graph().vertex_count()).filter(|&v| order.in_exploration[v]).collect();
    let beta = beta_of_set(state.graph(), &witness, k, d);
    if beta >= 0 {
        debug_assert!(false, "all group checks passed but beta = {beta}");
        return Err(vec![format!("internal inconsistency: all checks passed but beta = {beta}")]);
    }
    Ok(Certificate { beta, witness_vertices: witness, groups, checks })
}
