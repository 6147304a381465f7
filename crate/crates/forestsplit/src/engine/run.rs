//! The driver: split each connected component, improve until no oversized
//! red component is left, and fall back to certificates when stuck.

use serde::{Deserialize, Serialize};

use crate::base::{to_spanning_plus_residual, BaseError};
use crate::certify::{dense_witness, verify};
use crate::graph::{EdgeId, MultiGraph, Vertex};
use crate::oracle::{brute_force_decompose, OracleCaps};
use crate::sparsity::{find_overfull, is_overfull_set, min_beta_subgraph};

use super::conditions::{path_conditions, PathConditions};
use super::moves::{find_move, trigger_report, Improvement, MoveStats, Potential};
use super::order::{compare_sizes, minimal_legal_order};
use super::state::DecompositionState;
use super::{check_parameters, EngineConfig, EngineError};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutcomeStatus {
    ValidDecomposition,
    OverfullWitness,
    DenseWitness,
    StuckReport,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunStats {
    pub moves: MoveStats,
    pub residue_moves: u64,
    pub order_moves: u64,
    pub monotonicity_violations: u64,
    pub invariant_violations: u64,
    pub inexact_orders: u64,
    pub stuck_states: u64,
    pub certificate_attempts: u64,
    pub certificates: u64,
    pub oracle_calls: u64,
}

impl RunStats {
    fn absorb(&mut self, o: &RunStats) {
        self.moves.candidates_tried += o.moves.candidates_tried;
        self.moves.augmentations += o.moves.augmentations;
        self.moves.augmentation_failures += o.moves.augmentation_failures;
        self.moves.composite_nodes += o.moves.composite_nodes;
        self.residue_moves += o.residue_moves;
        self.order_moves += o.order_moves;
        self.monotonicity_violations += o.monotonicity_violations;
        self.invariant_violations += o.invariant_violations;
        self.inexact_orders += o.inexact_orders;
        self.stuck_states += o.stuck_states;
        self.certificate_attempts += o.certificate_attempts;
        self.certificates += o.certificates;
        self.oracle_calls += o.oracle_calls;
    }
}

/// What was known when no move applied and no witness was found.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StuckDiagnostics {
    /// Vertices of the component being worked on, in input numbering.
    pub vertices: Vec<Vertex>,
    pub root: Vertex,
    pub residue: Vec<usize>,
    pub order_sizes: Vec<usize>,
    pub triggers: Vec<String>,
    pub certificate_failures: Vec<String>,
    pub path_conditions: Vec<(String, PathConditions)>,
    pub notes: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Outcome {
    pub status: OutcomeStatus,
    /// `k + 1` edge lists for a valid decomposition, empty otherwise.
    pub forests: Vec<Vec<EdgeId>>,
    pub oversize_forest_index: usize,
    pub witness_vertices: Vec<Vertex>,
    pub moves_applied: usize,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub stuck_diagnostics: Option<StuckDiagnostics>,
    /// Which stage settled the outcome: "engine", "oracle", "certificate", "analysis", "base".
    pub source: String,
    pub stats: RunStats,
}

struct Piece {
    status: OutcomeStatus,
    forests: Vec<Vec<EdgeId>>,
    witness: Vec<Vertex>,
    moves: usize,
    diagnostics: Option<StuckDiagnostics>,
    source: &'static str,
}

/// Splits `g` into `k` forests plus one whose components have at most `d`
/// edges, or explains why not.
///
/// ```
/// use forestsplit::{engine::{run, EngineConfig, OutcomeStatus}, instances};
/// let out = run(&instances::petersen(), 1, 4, &EngineConfig::default()).unwrap();
/// assert_eq!(out.status, OutcomeStatus::ValidDecomposition);
/// assert_eq!(out.forests.len(), 2);
/// ```
pub fn run(g: &MultiGraph, k: usize, d: usize, cfg: &EngineConfig) -> Result<Outcome, EngineError> {
    check_parameters(k, d)?;
    let mut stats = RunStats::default();
    let mut forests = vec![Vec::new(); k + 1];
    let mut moves = 0;
    let mut source = "engine";
    for comp in g.components() {
        let (sub, vmap, emap) = g.compact(&comp).map_err(|e| EngineError::Invalid(e.to_string()))?;
        let mut local = RunStats::default();
        let piece = solve_connected(&sub, k, d, cfg, &mut local)?;
        stats.absorb(&local);
        moves += piece.moves;
        match piece.status {
            OutcomeStatus::ValidDecomposition => {
                for (dst, src) in forests.iter_mut().zip(&piece.forests) {
                    dst.extend(src.iter().map(|&e| emap[e]));
                }
                if piece.source != "engine" {
                    source = piece.source;
                }
            }
            status => {
                let diagnostics = piece.diagnostics.map(|mut dg| {
                    dg.vertices = vmap.clone();
                    dg
                });
                let mut witness: Vec<Vertex> = piece.witness.iter().map(|&v| vmap[v]).collect();
                witness.sort_unstable();
                return Ok(Outcome {
                    status,
                    forests: Vec::new(),
                    oversize_forest_index: k,
                    witness_vertices: witness,
                    moves_applied: moves,
                    stuck_diagnostics: diagnostics,
                    source: piece.source.into(),
                    stats,
                });
            }
        }
    }
    for f in &mut forests {
        f.sort_unstable();
    }
    let report = verify(g, k, d, &forests);
    if !report.passed {
        return Err(EngineError::Invalid(format!("assembled decomposition fails: {:?}", report.problems)));
    }
    Ok(Outcome {
        status: OutcomeStatus::ValidDecomposition,
        forests,
        oversize_forest_index: k,
        witness_vertices: Vec::new(),
        moves_applied: moves,
        stuck_diagnostics: None,
        source: source.into(),
        stats,
    })
}

fn valid(forests: Vec<Vec<EdgeId>>, moves: usize, source: &'static str) -> Piece {
    Piece { status: OutcomeStatus::ValidDecomposition, forests, witness: Vec::new(), moves, diagnostics: None, source }
}

fn witness(status: OutcomeStatus, witness: Vec<Vertex>, moves: usize, source: &'static str) -> Piece {
    Piece { status, forests: Vec::new(), witness, moves, diagnostics: None, source }
}

fn solve_connected(g: &MultiGraph, k: usize, d: usize, cfg: &EngineConfig, stats: &mut RunStats) -> Result<Piece, EngineError> {
    if g.edge_count() == 0 {
        return Ok(valid(vec![Vec::new(); k + 1], 0, "engine"));
    }
    let refinement = match to_spanning_plus_residual(g, k) {
        Ok(r) => r,
        Err(BaseError::Overfull { witness: w, .. }) => {
            assert!(is_overfull_set(g, &w, k + 1), "base split returned a bad overfull witness");
            return Ok(witness(OutcomeStatus::OverfullWitness, w, 0, "base"));
        }
        Err(BaseError::Disconnected) => return Err(EngineError::Invalid("component is disconnected".into())),
    };
    let mut state = DecompositionState::new(g, k, d, refinement.colour)?;
    let mut moves = 0;
    let mut boosted = false;
    loop {
        if state.residue().is_zero() {
            return Ok(valid(state.forests(), moves, "engine"));
        }
        if moves >= cfg.max_moves {
            break;
        }
        let order = minimal_legal_order(&state, cfg.order_budget);
        if !order.exact {
            stats.inexact_orders += 1;
        }
        let pot = Potential::of(&state, &order);
        let search_cfg = if boosted {
            EngineConfig {
                composite_depth: cfg.composite_depth + 1,
                composite_budget: cfg.composite_budget * 2,
                ..cfg.clone()
            }
        } else {
            cfg.clone()
        };
        let Some(found) = find_move(&state, &order, &search_cfg, &mut stats.moves) else {
            if !boosted && state.is_spanning() {
                // One more, wider round before giving up on this state.
                stats.certificate_attempts += 1;
                if let Ok(cert) = dense_witness(&state, &order) {
                    stats.certificates += 1;
                    return Ok(witness(OutcomeStatus::DenseWitness, cert.witness_vertices, moves, "certificate"));
                }
                boosted = true;
                continue;
            }
            break;
        };
        boosted = false;
        let next = found.next;
        let better = match next.residue().cmp(&pot.residue) {
            std::cmp::Ordering::Less => true,
            std::cmp::Ordering::Equal => {
                next.root() == state.root()
                    && next.root_component_intact()
                    && compare_sizes(&minimal_legal_order(&next, cfg.order_budget).sizes(&next), &pot.order_sizes).is_lt()
            }
            std::cmp::Ordering::Greater => false,
        };
        if !better {
            stats.monotonicity_violations += 1;
            debug_assert!(false, "accepted move {} does not lower the potential", found.mv.label);
            break;
        }
        if cfg.debug_asserts && next.check_invariants().is_err() {
            stats.invariant_violations += 1;
            debug_assert!(false, "move {} broke the state invariants", found.mv.label);
            break;
        }
        state = match found.gain {
            Improvement::Residue => {
                stats.residue_moves += 1;
                next.reselected()?
            }
            Improvement::Order => {
                stats.order_moves += 1;
                next
            }
        };
        moves += 1;
    }
    stats.stuck_states += 1;
    stuck_fallback(g, k, d, cfg, &state, moves, stats)
}

fn stuck_fallback(
    g: &MultiGraph,
    k: usize,
    d: usize,
    cfg: &EngineConfig,
    state: &DecompositionState,
    moves: usize,
    stats: &mut RunStats,
) -> Result<Piece, EngineError> {
    let order = minimal_legal_order(state, cfg.order_budget);
    let mut notes = Vec::new();
    stats.certificate_attempts += 1;
    let certificate_failures = match dense_witness(state, &order) {
        Ok(cert) => {
            stats.certificates += 1;
            return Ok(witness(OutcomeStatus::DenseWitness, cert.witness_vertices, moves, "certificate"));
        }
        Err(f) => f,
    };
    if g.vertex_count() <= cfg.oracle_threshold {
        stats.oracle_calls += 1;
        let caps = OracleCaps { max_vertices: cfg.oracle_threshold, max_edges: cfg.oracle_max_edges };
        match brute_force_decompose(g, k, d, caps) {
            Ok(v) if v.feasible => {
                let forests = v.forests.expect("feasible verdicts carry forests");
                return Ok(valid(forests, moves, "oracle"));
            }
            Ok(_) => {
                let report = min_beta_subgraph(g, k, d);
                if report.value < 0 {
                    return Ok(witness(OutcomeStatus::DenseWitness, report.witness, moves, "oracle"));
                }
                if let Some(w) = find_overfull(g, k + 1) {
                    return Ok(witness(OutcomeStatus::OverfullWitness, w, moves, "oracle"));
                }
                notes.push("oracle finds no decomposition of a sparse graph".into());
            }
            Err(e) => notes.push(e.to_string()),
        }
    }
    let report = min_beta_subgraph(g, k, d);
    if report.value < 0 {
        return Ok(witness(OutcomeStatus::DenseWitness, report.witness, moves, "analysis"));
    }
    let mut conditions = Vec::new();
    for (b, parents) in (0..k).map(|b| (b, (0..g.vertex_count()).filter_map(move |v| state.parent_arc(b, v).map(|a| (v, a))))) {
        for (v, arc) in parents {
            if order.in_exploration[v] {
                conditions.push((format!("tree {b} arc from {v}"), path_conditions(state, &order, state, arc)));
            }
        }
    }
    let diagnostics = StuckDiagnostics {
        vertices: Vec::new(),
        root: state.root(),
        residue: state.residue().0,
        order_sizes: order.sizes(state),
        triggers: trigger_report(state, &order),
        certificate_failures,
        path_conditions: conditions,
        notes,
    };
    Ok(Piece {
        status: OutcomeStatus::StuckReport,
        forests: Vec::new(),
        witness: Vec::new(),
        moves,
        diagnostics: Some(diagnostics),
        source: "engine",
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instances;

    #[test]
    fn trees_are_immediate() {
        let g = MultiGraph::from_edges(4, &[(0, 1), (1, 2), (2, 3)]).unwrap();
        let out = run(&g, 1, 1, &EngineConfig::default()).unwrap();
        assert_eq!(out.status, OutcomeStatus::ValidDecomposition);
        assert_eq!(out.forests.iter().map(Vec::len).sum::<usize>(), 3);
    }

    #[test]
    fn k4_and_petersen() {
        for (g, d) in [(instances::k4(), 3), (instances::petersen(), 4)] {
            let out = run(&g, 1, d, &EngineConfig::default()).unwrap();
            assert_eq!(out.status, OutcomeStatus::ValidDecomposition);
            assert!(verify(&g, 1, d, &out.forests).passed);
        }
    }

    #[test]
    fn dense_and_overfull() {
        // K4 with d = 2 has beta < 0.
        let out = run(&instances::k4(), 1, 2, &EngineConfig::default()).unwrap();
        assert_eq!(out.status, OutcomeStatus::DenseWitness);
        assert!(crate::sparsity::beta_of_set(&instances::k4(), &out.witness_vertices, 1, 2) < 0);
        let k5 = MultiGraph::from_edges(5, &[(0, 1), (0, 2), (0, 3), (0, 4), (1, 2), (1, 3), (1, 4), (2, 3), (2, 4), (3, 4)]).unwrap();
        let out = run(&k5, 1, 2, &EngineConfig::default()).unwrap();
        assert_eq!(out.status, OutcomeStatus::OverfullWitness);
    }

    #[test]
    fn components_are_merged() {
        let g = MultiGraph::from_edges(7, &[(0, 1), (1, 2), (2, 0), (4, 5), (5, 6), (6, 4)]).unwrap();
        let out = run(&g, 1, 2, &EngineConfig::default()).unwrap();
        assert_eq!(out.status, OutcomeStatus::ValidDecomposition);
        assert!(verify(&g, 1, 2, &out.forests).passed);
        let json = serde_json::to_string(&out).unwrap();
        assert!(json.contains("\"valid_decomposition\""));
    }

    #[test]
    fn bad_parameters() {
        assert!(run(&instances::k4(), 0, 1, &EngineConfig::default()).is_err());
        assert!(run(&instances::k4(), 1, 5, &EngineConfig::default()).is_err());
    }
}
