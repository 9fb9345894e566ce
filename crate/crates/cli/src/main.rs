//! Command-line front end: exact-cover solves, cover verification, graph
//! enumeration, formula tables, lemma reproduction, and the K19 sweeps.
//!
//! Structured results go to standard output as JSON; human-readable summaries
//! go to standard error. Exit codes: 0 feasible/pass, 1 infeasible/fail,
//! 2 timed out/incomplete, 64 usage error.

use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{anyhow, Context, Result};
use clap::{Args, Parser, Subcommand};
use sha2::{Digest, Sha256};

use clique_cover::cases::{self, OutcomeCache, RunOptions, Verdict};
use clique_cover::enumerate;
use clique_cover::rules;
use clique_cover::solver::{CoverInstance, CoverOutcome, CoverStatus, SolverConfig};
use clique_cover::Block;

const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Parser)]
#[command(
    name = "clique-cover",
    version,
    about = "{K3,K4}-decompositions and coverings of complete graphs"
)]
struct Cli {
    /// Cache directory for solver outcomes (CLIQUE_COVER_CACHE overrides).
    #[arg(long, global = true)]
    cache: Option<PathBuf>,
    /// Append a run-manifest JSON line to this file.
    #[arg(long, global = true)]
    manifest: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve an exact-cover instance over K_v.
    Solve(SolveArgs),
    /// Check a block list against an instance; exit 0 iff the cover is exact.
    Verify(VerifyArgs),
    /// Enumerate isomorphism classes of small graphs.
    Enumerate(EnumerateArgs),
    /// Closed-form design numbers for one order.
    Formulas(FormulasArgs),
    /// Erdős–Gallai graphicality of a degree sequence.
    Graphic(GraphicArgs),
    /// Reproduce one lemma case from the registry.
    Lemma(LemmaArgs),
    /// Run an exhaustive sweep (k19-alpha9 or k19-alpha11).
    Sweep(SweepArgs),
}

#[derive(Args)]
struct SolveArgs {
    #[arg(long)]
    order: u32,
    /// Comma-separated block sizes, e.g. 3,4.
    #[arg(long, value_delimiter = ',')]
    block_sizes: Vec<usize>,
    /// JSON file with removed edges: `[[a,b],...]`.
    #[arg(long)]
    remove: Option<PathBuf>,
    /// JSON file with excess multiplicities: `[[[a,b],m],...]`.
    #[arg(long)]
    excess: Option<PathBuf>,
    /// Minimize the number of blocks instead of finding any exact cover.
    #[arg(long)]
    minimize: bool,
    #[command(flatten)]
    limits: LimitArgs,
}

#[derive(Args)]
struct LimitArgs {
    /// Search-node budget.
    #[arg(long)]
    node_limit: Option<u64>,
    /// Wall-clock budget in seconds.
    #[arg(long)]
    time_limit: Option<f64>,
    /// Worker threads for exhaustive unlimited searches.
    #[arg(long, default_value_t = 1)]
    threads: usize,
    /// Candidate-order seed; 0 keeps (size, lex) order.
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long)]
    order: u32,
    /// JSON file with the block list: `[[v1,v2,...],...]`.
    #[arg(long)]
    solution: PathBuf,
    /// Comma-separated block sizes the instance allows.
    #[arg(long, value_delimiter = ',', default_value = "3,4")]
    block_sizes: Vec<usize>,
    /// JSON file with removed edges.
    #[arg(long)]
    remove: Option<PathBuf>,
    /// JSON file with excess multiplicities.
    #[arg(long)]
    excess: Option<PathBuf>,
}

#[derive(Args)]
struct EnumerateArgs {
    #[arg(long)]
    order: usize,
    /// Edge count for even-graph enumeration.
    #[arg(long)]
    size: Option<usize>,
    /// Select even graphs (all degrees even).
    #[arg(long)]
    even: bool,
    /// Degree for regular-graph enumeration.
    #[arg(long)]
    regular: Option<usize>,
    /// Output format: g6 or json.
    #[arg(long, default_value = "g6")]
    format: String,
}

#[derive(Args)]
struct FormulasArgs {
    #[arg(long)]
    v: u32,
}

#[derive(Args)]
struct GraphicArgs {
    /// Comma-separated degree sequence.
    #[arg(long, value_delimiter = ',')]
    sequence: Vec<u32>,
}

#[derive(Args)]
struct LemmaArgs {
    /// Lemma id, e.g. k18-alpha7. Use `list` to print the registry.
    id: String,
    #[command(flatten)]
    limits: LimitArgs,
}

#[derive(Args)]
struct SweepArgs {
    /// Sweep id: k19-alpha9 or k19-alpha11.
    id: String,
    /// Checkpoint file to resume from and append to (k19-alpha11).
    #[arg(long)]
    resume: Option<PathBuf>,
    /// Worker fan-out over cases.
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    /// Process at most this many unresolved cases.
    #[arg(long)]
    limit: Option<usize>,
    /// Also report (on stderr) whether each candidate graph itself
    /// decomposes into triangles; does not affect the verdict.
    #[arg(long)]
    triangle_side: bool,
    #[command(flatten)]
    limits: LimitArgs,
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            std::process::exit(if e.use_stderr() { 64 } else { 0 });
        }
    };
    match run(cli) {
        Ok(code) => std::process::exit(code),
        Err(e) => {
            let body = serde_json::json!({ "error": format!("{e:#}") });
            println!("{body}");
            eprintln!("error: {e:#}");
            std::process::exit(64);
        }
    }
}

fn cache_dir(cli_flag: Option<&Path>) -> Option<PathBuf> {
    std::env::var_os("CLIQUE_COVER_CACHE")
        .map(PathBuf::from)
        .or_else(|| cli_flag.map(Path::to_path_buf))
}

fn solver_config(limits: &LimitArgs) -> SolverConfig {
    SolverConfig {
        node_limit: limits.node_limit,
        time_limit: limits.time_limit.map(std::time::Duration::from_secs_f64),
        thread_count: limits.threads,
        seed: limits.seed,
    }
}

fn sha256_hex(data: &[u8]) -> String {
    let mut hasher = Sha256::new();
    hasher.update(data);
    hasher
        .finalize()
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

/// Appends one manifest line: command, parameters, input digests, a digest of
/// the deterministic part of the output (timing zeroed), wall time, version.
fn append_manifest(
    path: Option<&Path>,
    command: &str,
    inputs: &[(String, String)],
    stdout_json: &serde_json::Value,
    ms: u128,
) -> Result<()> {
    let Some(path) = path else {
        return Ok(());
    };
    let mut normalized = stdout_json.clone();
    if let Some(obj) = normalized.as_object_mut() {
        if obj.contains_key("ms") {
            obj.insert("ms".into(), serde_json::json!(0));
        }
    }
    let line = serde_json::json!({
        "command": command,
        "parameters": std::env::args().skip(1).collect::<Vec<_>>(),
        "input_digests": inputs.iter().cloned().collect::<std::collections::BTreeMap<_,_>>(),
        "outcome_digest": sha256_hex(normalized.to_string().as_bytes()),
        "ms": ms,
        "version": VERSION,
    });
    let mut file = std::fs::OpenOptions::new()
        .create(true)
        .append(true)
        .open(path)
        .with_context(|| format!("opening manifest {}", path.display()))?;
    writeln!(file, "{line}")?;
    Ok(())
}

fn read_json_file<T: serde::de::DeserializeOwned>(path: &Path, what: &str) -> Result<T> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading {what} file {}", path.display()))?;
    serde_json::from_str(&text).map_err(|e| {
        anyhow!(
            "{what} file {}: malformed JSON at line {}, column {}: {e}",
            path.display(),
            e.line(),
            e.column()
        )
    })
}

fn build_instance(
    order: u32,
    sizes: &[usize],
    remove: Option<&Path>,
    excess: Option<&Path>,
    inputs: &mut Vec<(String, String)>,
) -> Result<CoverInstance> {
    let mut instance = CoverInstance::new(order, sizes)?;
    if let Some(path) = remove {
        let text = std::fs::read(path)
            .with_context(|| format!("reading removed-edges file {}", path.display()))?;
        inputs.push(("removed_edges".into(), sha256_hex(&text)));
        let edges: Vec<(u32, u32)> = read_json_file(path, "removed-edges")?;
        instance = instance.with_removed_edges(&edges)?;
    }
    if let Some(path) = excess {
        let text = std::fs::read(path)
            .with_context(|| format!("reading excess file {}", path.display()))?;
        inputs.push(("excess".into(), sha256_hex(&text)));
        let entries: Vec<((u32, u32), u16)> = read_json_file(path, "excess")?;
        instance = instance.with_excess(&entries)?;
    }
    Ok(instance)
}

fn outcome_exit_code(outcome: &CoverOutcome) -> i32 {
    match outcome.status {
        CoverStatus::Feasible => 0,
        CoverStatus::Infeasible => 1,
        CoverStatus::TimedOut => 2,
    }
}

fn run(cli: Cli) -> Result<i32> {
    let start = Instant::now();
    let cache = cache_dir(cli.cache.as_deref());
    match cli.command {
        Command::Solve(args) => {
            let mut inputs = Vec::new();
            let instance = build_instance(
                args.order,
                &args.block_sizes,
                args.remove.as_deref(),
                args.excess.as_deref(),
                &mut inputs,
            )?;
            let config = solver_config(&args.limits);
            let cache = cache.map(OutcomeCache::new).transpose()?;
            let outcome = if args.minimize {
                instance.solve_minimum(&config)
            } else {
                cases::solve_exact_cached(&instance, &config, cache.as_ref())
            };
            let body = serde_json::to_value(&outcome)?;
            println!("{body}");
            eprintln!(
                "solve order={} sizes={:?}: {:?}, {} blocks, {} nodes, {} ms",
                args.order,
                args.block_sizes,
                outcome.status,
                outcome.block_count,
                outcome.stats.nodes,
                outcome.stats.ms
            );
            append_manifest(
                cli.manifest.as_deref(),
                "solve",
                &inputs,
                &body,
                start.elapsed().as_millis(),
            )?;
            Ok(outcome_exit_code(&outcome))
        }
        Command::Verify(args) => {
            let mut inputs = Vec::new();
            let instance = build_instance(
                args.order,
                &args.block_sizes,
                args.remove.as_deref(),
                args.excess.as_deref(),
                &mut inputs,
            )?;
            let text = std::fs::read(&args.solution)
                .with_context(|| format!("reading solution file {}", args.solution.display()))?;
            inputs.push(("solution".into(), sha256_hex(&text)));
            let raw: Vec<Vec<u32>> = read_json_file(&args.solution, "solution")?;
            let blocks: Vec<Block> = raw.into_iter().map(Block::new).collect::<Result<_, _>>()?;
            let report = instance.verify_cover(&blocks);
            let defects: Vec<String> = report.defects.iter().map(|d| format!("{d:?}")).collect();
            let body = serde_json::json!({
                "exact": report.exact,
                "blocks": blocks.len(),
                "edges": report.coverage.len(),
                "defects": defects,
            });
            println!("{body}");
            eprintln!(
                "verify order={}: exact={} defects={}",
                args.order,
                report.exact,
                report.defects.len()
            );
            append_manifest(
                cli.manifest.as_deref(),
                "verify",
                &inputs,
                &body,
                start.elapsed().as_millis(),
            )?;
            Ok(if report.exact { 0 } else { 1 })
        }
        Command::Enumerate(args) => {
            let graphs = match (args.even, args.size, args.regular) {
                (true, Some(size), None) => enumerate::enumerate_even_graphs(args.order, size)?,
                (false, None, Some(degree)) => {
                    enumerate::enumerate_regular_graphs(args.order, degree)?
                }
                _ => {
                    return Err(anyhow!(
                        "pass either --even --size E or --regular K (exactly one mode)"
                    ))
                }
            };
            let mut lines = Vec::with_capacity(graphs.len());
            for g in &graphs {
                match args.format.as_str() {
                    "g6" => lines.push(g.to_graph6()),
                    "json" => lines.push(
                        serde_json::json!({
                            "order": g.order(),
                            "edges": g.edges(),
                        })
                        .to_string(),
                    ),
                    other => return Err(anyhow!("unknown format {other:?} (use g6 or json)")),
                }
            }
            for line in &lines {
                println!("{line}");
            }
            eprintln!("enumerate: {} classes", graphs.len());
            append_manifest(
                cli.manifest.as_deref(),
                "enumerate",
                &[],
                &serde_json::json!({ "classes": lines }),
                start.elapsed().as_millis(),
            )?;
            Ok(0)
        }
        Command::Formulas(args) => {
            let v = args.v;
            let body = serde_json::json!({
                "v": v,
                "xi": rules::excess_min(v)?,
                "cover_number": rules::cover_number(v)?,
                "lower_bound": rules::lower_bound(v).ok(),
                "residue": rules::vertex_triple_residue(v),
            });
            println!("{body}");
            eprintln!("formulas v={v}");
            append_manifest(
                cli.manifest.as_deref(),
                "formulas",
                &[],
                &body,
                start.elapsed().as_millis(),
            )?;
            Ok(0)
        }
        Command::Graphic(args) => {
            let failing = rules::erdos_gallai_failure(&args.sequence);
            let body = serde_json::json!({
                "graphic": failing.is_none(),
                "failing_k": failing,
            });
            println!("{body}");
            eprintln!(
                "graphic {:?}: {}",
                args.sequence,
                if failing.is_none() { "yes" } else { "no" }
            );
            append_manifest(
                cli.manifest.as_deref(),
                "graphic",
                &[],
                &body,
                start.elapsed().as_millis(),
            )?;
            Ok(0)
        }
        Command::Lemma(args) => {
            if args.id == "list" {
                for id in cases::lemma_ids() {
                    println!("{id}");
                }
                return Ok(0);
            }
            let opts = RunOptions {
                solver: solver_config(&args.limits),
                cache: cache.map(OutcomeCache::new).transpose()?,
                ..RunOptions::default()
            };
            let report = cases::run_lemma(&args.id, &opts)?;
            for outcome in &report.outcomes {
                eprintln!(
                    "  [{}] {} {}: {}",
                    if outcome.ok { "ok" } else { "FAIL" },
                    outcome.kind,
                    outcome.label,
                    outcome.detail
                );
            }
            eprintln!("lemma {}: {:?}", report.lemma_id, report.verdict);
            let body = serde_json::to_value(&report)?;
            println!("{body}");
            append_manifest(
                cli.manifest.as_deref(),
                "lemma",
                &[],
                &body,
                start.elapsed().as_millis(),
            )?;
            Ok(match report.verdict {
                Verdict::AllInfeasible => 0,
                Verdict::CounterexampleFound => 1,
                Verdict::Incomplete => 2,
            })
        }
        Command::Sweep(args) => {
            let opts = RunOptions {
                solver: solver_config(&args.limits),
                cache: cache.map(OutcomeCache::new).transpose()?,
                jobs: args.jobs,
                checkpoint: args.resume.clone(),
                case_limit: args.limit,
                triangle_side: args.triangle_side,
            };
            let report = match args.id.as_str() {
                "k19-alpha9" => cases::k19_alpha9_sweep(&opts)?,
                "k19-alpha11" => {
                    let graphs = cases::regular_11_6_fixture()?;
                    cases::k19_alpha11_sweep(&graphs, &opts)?
                }
                other => return Err(anyhow!("unknown sweep {other:?}")),
            };
            let resolved = report.checkpoint_position.unwrap_or(report.outcomes.len());
            for outcome in report.outcomes.iter().filter(|o| !o.ok) {
                eprintln!("  [pending/FAIL] {}: {}", outcome.label, outcome.detail);
            }
            eprintln!(
                "sweep {}: {:?} ({} of {} cases resolved)",
                report.lemma_id,
                report.verdict,
                resolved,
                report.outcomes.len()
            );
            let body = serde_json::to_value(&report)?;
            println!("{body}");
            append_manifest(
                cli.manifest.as_deref(),
                "sweep",
                &[],
                &body,
                start.elapsed().as_millis(),
            )?;
            Ok(match report.verdict {
                Verdict::AllInfeasible => 0,
                Verdict::CounterexampleFound => 1,
                Verdict::Incomplete => 2,
            })
        }
    }
}
