use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use forestsplit::certify::verify;
use forestsplit::engine::{check_parameters, run, EngineConfig, Outcome, OutcomeStatus};
use forestsplit::graph::{parse_edge_list, EdgeId, MultiGraph};
use forestsplit::instances;
use forestsplit::oracle::{brute_force_decompose, OracleCaps};
use forestsplit::sparsity::{find_overfull, fractional_arboricity, min_beta_subgraph};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::json;

const EXIT_FAILURE: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_WITNESS: u8 = 3;
const EXIT_STUCK: u8 = 4;

#[derive(Parser)]
#[command(name = "forestsplit", version, about = "Split a multigraph into k spanning trees plus a forest with small components")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Copy)]
struct Params {
    #[arg(long)]
    k: usize,
    #[arg(long)]
    d: usize,
}

#[derive(Args)]
struct EngineFlags {
    /// Stuck components with at most this many vertices go to the brute-force search (0 disables).
    #[arg(long, default_value_t = 10)]
    oracle_threshold: usize,
    #[arg(long, default_value_t = 3)]
    composite_depth: usize,
    /// Re-check state invariants after every move.
    #[arg(long)]
    debug_asserts: bool,
}

impl EngineFlags {
    fn config(&self) -> EngineConfig {
        EngineConfig {
            oracle_threshold: self.oracle_threshold,
            composite_depth: self.composite_depth,
            debug_asserts: self.debug_asserts,
            ..EngineConfig::default()
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Density, sparsity and overfull checks.
    Analyze {
        /// Edge-list file or a built-in name (K4, Petersen, dodecahedron, path_N, cycle_N, k_N).
        graph: String,
        #[command(flatten)]
        params: Params,
        /// Write JSON here ("-" for stdout).
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Run the decomposition engine.
    Decompose {
        graph: String,
        #[command(flatten)]
        params: Params,
        #[command(flatten)]
        engine: EngineFlags,
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Check a decomposition given as JSON (an outcome or a list of edge lists).
    Verify {
        graph: String,
        decomposition: PathBuf,
        #[command(flatten)]
        params: Params,
    },
    /// Exhaustive search on a small graph.
    Oracle {
        graph: String,
        #[command(flatten)]
        params: Params,
        #[arg(long, default_value_t = 10)]
        max_vertices: usize,
        #[arg(long, default_value_t = 24)]
        max_edges: usize,
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Random connected multigraph that is sparse and not overfull, by rejection.
    Generate {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: usize,
        #[command(flatten)]
        params: Params,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 10_000)]
        attempts: usize,
    },
    /// Decompose many random instances in parallel and verify each result.
    Fuzz {
        #[command(flatten)]
        params: Params,
        #[arg(long, default_value_t = 1000)]
        count: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 7)]
        max_n: usize,
        #[arg(long, default_value_t = 14)]
        max_m: usize,
        #[command(flatten)]
        engine: EngineFlags,
    },
}

fn load_graph(arg: &str) -> Result<MultiGraph> {
    let path = Path::new(arg);
    if path.exists() {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {arg}"))?;
        return parse_edge_list(&text).with_context(|| format!("parsing {arg}"));
    }
    instances::named(arg).ok_or_else(|| anyhow!("{arg} is neither a file nor a built-in instance"))
}

fn emit_json(target: &Option<PathBuf>, value: &impl serde::Serialize) -> Result<()> {
    let Some(target) = target else { return Ok(()) };
    let text = serde_json::to_string_pretty(value)?;
    if target.as_os_str() == "-" {
        println!("{text}");
    } else {
        std::fs::write(target, text + "\n").with_context(|| format!("writing {}", target.display()))?;
    }
    Ok(())
}

fn analyze(g: &MultiGraph, p: Params, json: &Option<PathBuf>) -> Result<u8> {
    let beta = min_beta_subgraph(g, p.k, p.d);
    let overfull = find_overfull(g, p.k + 1);
    let gamma = fractional_arboricity(g).ok();
    println!("vertices: {}, edges: {}", g.vertex_count(), g.edge_count());
    match &gamma {
        Some(r) => println!("fractional arboricity: {} on {:?}", r.value, r.witness),
        None => println!("fractional arboricity: undefined (fewer than two vertices)"),
    }
    println!("min beta: {} on {:?}", beta.value, beta.witness);
    println!("({}, {})-sparse: {}", p.k, p.d, if beta.value >= 0 { "yes" } else { "no" });
    match &overfull {
        Some(w) => println!("{}-overfull: yes, {:?}", p.k + 1, w),
        None => println!("{}-overfull: no", p.k + 1),
    }
    emit_json(
        json,
        &json!({
            "vertices": g.vertex_count(),
            "edges": g.edge_count(),
            "fractional_arboricity": gamma.as_ref().map(|r| json!({"value": r.value.to_string(), "witness": r.witness})),
            "min_beta": {"value": beta.value, "witness": beta.witness},
            "sparse": beta.value >= 0,
            "overfull_witness": overfull,
        }),
    )?;
    Ok(0)
}

fn decompose(g: &MultiGraph, p: Params, engine: &EngineFlags, json: &Option<PathBuf>) -> Result<u8> {
    let start = Instant::now();
    let out = run(g, p.k, p.d, &engine.config())?;
    let code = match out.status {
        OutcomeStatus::ValidDecomposition => {
            let report = verify(g, p.k, p.d, &out.forests);
            if !report.passed {
                bail!("engine output failed verification: {:?}", report.problems);
            }
            println!("valid decomposition ({} moves, via {}, {:.1?})", out.moves_applied, out.source, start.elapsed());
            for (i, f) in out.forests.iter().enumerate() {
                let role = if i == out.oversize_forest_index { "bounded forest" } else { "forest" };
                println!("{role} {i}: {f:?}");
            }
            0
        }
        OutcomeStatus::OverfullWitness => {
            println!("no split into {} forests; overfull vertex set {:?}", p.k + 1, out.witness_vertices);
            EXIT_WITNESS
        }
        OutcomeStatus::DenseWitness => {
            println!("not ({}, {})-sparse; dense vertex set {:?} (via {})", p.k, p.d, out.witness_vertices, out.source);
            EXIT_WITNESS
        }
        OutcomeStatus::StuckReport => {
            println!("stuck after {} moves", out.moves_applied);
            if let Some(dg) = &out.stuck_diagnostics {
                println!("residue {:?}, order sizes {:?}", dg.residue, dg.order_sizes);
                for t in dg.triggers.iter().chain(&dg.certificate_failures).chain(&dg.notes) {
                    println!("  {t}");
                }
            }
            EXIT_STUCK
        }
    };
    emit_json(json, &out)?;
    Ok(code)
}

fn read_forests(path: &Path) -> Result<Vec<Vec<EdgeId>>> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let value: serde_json::Value = serde_json::from_str(&text).context("decomposition is not JSON")?;
    let forests = match value {
        serde_json::Value::Object(mut o) => o.remove("forests").ok_or_else(|| anyhow!("no \"forests\" field"))?,
        v => v,
    };
    serde_json::from_value(forests).context("forests must be lists of edge ids")
}

fn generate(n: usize, m: usize, p: Params, seed: u64, attempts: usize) -> Result<u8> {
    if n < 2 || m + 1 < n {
        bail!("need n >= 2 and m >= n - 1 for a connected graph");
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rejected = [0usize; 3];
    for attempt in 0..attempts {
        let g = instances::random_multigraph(n, m, &mut rng);
        if !g.is_connected() {
            rejected[0] += 1;
        } else if min_beta_subgraph(&g, p.k, p.d).value < 0 {
            rejected[1] += 1;
        } else if find_overfull(&g, p.k + 1).is_some() {
            rejected[2] += 1;
        } else {
            println!("# n={n} m={m} k={} d={} seed={seed} attempt={attempt}", p.k, p.d);
            print!("{}", g.to_edge_list());
            return Ok(0);
        }
    }
    eprintln!(
        "no instance after {attempts} attempts: {} disconnected, {} not sparse, {} overfull",
        rejected[0], rejected[1], rejected[2]
    );
    Ok(EXIT_FAILURE)
}

fn fuzz(p: Params, count: u64, seed: u64, max_n: usize, max_m: usize, engine: &EngineFlags) -> Result<u8> {
    let cfg = engine.config();
    let start = Instant::now();
    let results: Vec<Option<(u64, Outcome, bool)>> = (0..count)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(i));
            let n = rng.gen_range(2..=max_n.max(2));
            let m = rng.gen_range(1..=max_m.max(1));
            let g = instances::random_multigraph(n, m, &mut rng);
            if min_beta_subgraph(&g, p.k, p.d).value < 0 || find_overfull(&g, p.k + 1).is_some() {
                return None;
            }
            let out = run(&g, p.k, p.d, &cfg).ok()?;
            let ok = out.status == OutcomeStatus::ValidDecomposition && verify(&g, p.k, p.d, &out.forests).passed;
            Some((i, out, ok))
        })
        .collect();
    let tried: Vec<_> = results.into_iter().flatten().collect();
    let failures: Vec<u64> = tried.iter().filter(|r| !r.2).map(|r| r.0).collect();
    let moves: usize = tried.iter().map(|r| r.1.moves_applied).sum();
    let violations: u64 = tried.iter().map(|r| r.1.stats.monotonicity_violations + r.1.stats.invariant_violations).sum();
    let oracle = tried.iter().filter(|r| r.1.source == "oracle").count();
    println!(
        "{} of {count} instances qualified; {} failures, {moves} moves, {oracle} settled by oracle, {violations} violations, {:.1?}",
        tried.len(),
        failures.len(),
        start.elapsed()
    );
    if !failures.is_empty() {
        println!("failing seeds: {:?}", failures.iter().map(|i| seed.wrapping_add(*i)).collect::<Vec<_>>());
    }
    Ok(if failures.is_empty() && violations == 0 { 0 } else { EXIT_FAILURE })
}

fn dispatch(cli: Cli) -> Result<u8> {
    let params = match &cli.command {
        Command::Analyze { params, .. }
        | Command::Decompose { params, .. }
        | Command::Verify { params, .. }
        | Command::Oracle { params, .. }
        | Command::Generate { params, .. }
        | Command::Fuzz { params, .. } => *params,
    };
    if let Err(e) = check_parameters(params.k, params.d) {
        eprintln!("usage error: {e}");
        return Ok(EXIT_USAGE);
    }
    let load = |arg: &str| -> std::result::Result<MultiGraph, u8> {
        load_graph(arg).map_err(|e| {
            eprintln!("error: {e:#}");
            EXIT_USAGE
        })
    };
    match cli.command {
        Command::Analyze { graph, params, json } => match load(&graph) {
            Ok(g) => analyze(&g, params, &json),
            Err(code) => Ok(code),
        },
        Command::Decompose { graph, params, engine, json } => match load(&graph) {
            Ok(g) => decompose(&g, params, &engine, &json),
            Err(code) => Ok(code),
        },
        Command::Verify { graph, decomposition, params } => {
            let g = match load(&graph) {
                Ok(g) => g,
                Err(code) => return Ok(code),
            };
            let forests = match read_forests(&decomposition) {
                Ok(f) => f,
                Err(e) => {
                    eprintln!("error: {e:#}");
                    return Ok(EXIT_USAGE);
                }
            };
            let report = verify(&g, params.k, params.d, &forests);
            println!("{}", serde_json::to_string_pretty(&report)?);
            Ok(if report.passed { 0 } else { EXIT_FAILURE })
        }
        Command::Oracle { graph, params, max_vertices, max_edges, json } => {
            let g = match load(&graph) {
                Ok(g) => g,
                Err(code) => return Ok(code),
            };
            let verdict = brute_force_decompose(&g, params.k, params.d, OracleCaps { max_vertices, max_edges })?;
            println!("feasible: {} ({} search nodes)", verdict.feasible, verdict.nodes);
            if let Some(f) = &verdict.forests {
                for (i, forest) in f.iter().enumerate() {
                    println!("forest {i}: {forest:?}");
                }
            }
            emit_json(&json, &verdict)?;
            Ok(if verdict.feasible { 0 } else { EXIT_WITNESS })
        }
        Command::Generate { n, m, params, seed, attempts } => generate(n, m, params, seed, attempts),
        Command::Fuzz { params, count, seed, max_n, max_m, engine } => fuzz(params, count, seed, max_n, max_m, &engine),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_FAILURE)
        }
    }
}
