//! The proof-by-exhaustion pipeline: fixed triangle configurations are built
//! from symbolic triples, their edges removed from K18 or K19, and the solver
//! certifies that no K4-decomposition of the remainder exists. The registry
//! mirrors which sub-cases were settled by search and which by a counting
//! argument; counting arguments carry a programmatic inequality check.
//!
//! Two exhaustive sweeps cover the K19 side: the four 2-regular complement
//! shapes on 9 vertices, and the 266 pairwise non-isomorphic 6-regular graphs
//! on 11 vertices. The long sweep writes an append-only JSON-lines checkpoint
//! and resumes from it.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::enumerate::{self, canonical_graph};
use crate::graph::{Block, GraphError, SmallGraph};
use crate::solver::{
    solve_graph_decomposition, CoverInstance, CoverOutcome, CoverStatus, InstanceError,
    SolverConfig,
};

#[derive(Debug, Error)]
pub enum CaseError {
    #[error("unknown lemma id {0:?}")]
    UnknownLemma(String),
    #[error("bad symbolic vertex name {0:?}")]
    BadSymbol(String),
    #[error("symbol class {0:?} missing from the profile")]
    UnknownClass(String),
    #[error("vertex {symbol} lies in {actual} triples, profile says {expected}")]
    ProfileViolation {
        symbol: String,
        expected: u32,
        actual: u32,
    },
    #[error("triples are not edge-disjoint: edge ({0}, {1}) repeats")]
    EdgeOverlap(u32, u32),
    #[error("configuration needs {needed} vertices, host has {host}")]
    HostTooSmall { needed: u32, host: u32 },
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Instance(#[from] InstanceError),
    #[error(transparent)]
    Enumerate(#[from] enumerate::EnumerateError),
    #[error("checkpoint: {0}")]
    Checkpoint(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// A set of pairwise edge-disjoint triples on a complete host, with the
/// symbolic names that produced the concrete labels.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TriangleConfiguration {
    host_order: u32,
    triples: Vec<Block>,
    symbolic_map: BTreeMap<String, u32>,
}

impl TriangleConfiguration {
    pub fn host_order(&self) -> u32 {
        self.host_order
    }

    pub fn triples(&self) -> &[Block] {
        &self.triples
    }

    pub fn symbolic_map(&self) -> &BTreeMap<String, u32> {
        &self.symbolic_map
    }

    /// Every edge of every triple; disjointness makes this 3 per triple.
    pub fn removed_edges(&self) -> Vec<(u32, u32)> {
        self.triples.iter().flat_map(|t| t.edges()).collect()
    }
}

fn parse_symbol(sym: &str) -> Result<(String, u64), CaseError> {
    let split = sym.find(|c: char| c.is_ascii_digit()).unwrap_or(sym.len());
    let (class, idx) = sym.split_at(split);
    if !class.chars().all(|c| c.is_ascii_alphabetic()) {
        return Err(CaseError::BadSymbol(sym.to_string()));
    }
    let index = if idx.is_empty() {
        0
    } else {
        idx.parse()
            .map_err(|_| CaseError::BadSymbol(sym.to_string()))?
    };
    Ok((class.to_string(), index))
}

/// Builds a concrete configuration from symbolic triples: `w` symbols take
/// ids 1..h in index order, `y` symbols follow, and any other symbols are
/// assigned increasing ids in order of first appearance. The per-class
/// profile (triples per vertex) is validated, as is edge-disjointness.
pub fn build_configuration(
    host_order: u32,
    symbolic_triples: &[[&str; 3]],
    profile: &[(&str, u32)],
) -> Result<TriangleConfiguration, CaseError> {
    let profile: BTreeMap<&str, u32> = profile.iter().copied().collect();
    // collect symbols: w's sorted by index, then y's, then first appearance
    let mut ws: Vec<(u64, String)> = Vec::new();
    let mut ys: Vec<(u64, String)> = Vec::new();
    let mut others: Vec<String> = Vec::new();
    for triple in symbolic_triples {
        for sym in triple {
            let (class, index) = parse_symbol(sym)?;
            if !profile.contains_key(class.as_str()) {
                return Err(CaseError::UnknownClass(class));
            }
            let entry = (index, sym.to_string());
            match class.as_str() {
                "w" => {
                    if !ws.contains(&entry) {
                        ws.push(entry);
                    }
                }
                "y" => {
                    if !ys.contains(&entry) {
                        ys.push(entry);
                    }
                }
                _ => {
                    if !others.contains(&entry.1) {
                        others.push(entry.1);
                    }
                }
            }
        }
    }
    ws.sort();
    ys.sort();
    let mut symbolic_map = BTreeMap::new();
    let mut next = 1u32;
    for (_, sym) in ws.into_iter().chain(ys) {
        symbolic_map.insert(sym, next);
        next += 1;
    }
    for sym in others {
        symbolic_map.insert(sym, next);
        next += 1;
    }
    if next - 1 > host_order {
        return Err(CaseError::HostTooSmall {
            needed: next - 1,
            host: host_order,
        });
    }

    let mut triples = Vec::with_capacity(symbolic_triples.len());
    let mut seen_edges = BTreeMap::new();
    let mut per_vertex: BTreeMap<u32, u32> = BTreeMap::new();
    for triple in symbolic_triples {
        let ids: Vec<u32> = triple.iter().map(|s| symbolic_map[*s]).collect();
        let block = Block::new(ids.clone())?;
        for (a, b) in block.edges() {
            if seen_edges.insert((a, b), ()).is_some() {
                return Err(CaseError::EdgeOverlap(a, b));
            }
        }
        for v in ids {
            *per_vertex.entry(v).or_insert(0) += 1;
        }
        triples.push(block);
    }
    for (sym, &id) in &symbolic_map {
        let (class, _) = parse_symbol(sym)?;
        let expected = profile[class.as_str()];
        let actual = per_vertex.get(&id).copied().unwrap_or(0);
        if actual != expected {
            return Err(CaseError::ProfileViolation {
                symbol: sym.clone(),
                expected,
                actual,
            });
        }
    }
    // alpha consistency: vertex incidences come in threes
    debug_assert_eq!(
        per_vertex.values().sum::<u32>(),
        3 * triples.len() as u32
    );
    Ok(TriangleConfiguration {
        host_order,
        triples,
        symbolic_map,
    })
}

/// Removes the configuration's edges from the complete host and decides
/// whether the remainder decomposes into K4's. A timed-out search propagates
/// as timed out, never as infeasible.
pub fn check_configuration(
    config: &TriangleConfiguration,
    config_solver: &SolverConfig,
) -> Result<CoverOutcome, CaseError> {
    let instance = CoverInstance::new(config.host_order, &[4])?
        .with_removed_edges(&config.removed_edges())?;
    Ok(instance.solve_exact(config_solver))
}

/// Counting-argument exclusions, each with a checkable inequality. `h` is the
/// even graph on the heavy K7 whose complement carries the all-heavy triples;
/// each heavy vertex lies in 4 triples.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AnalyticCheck {
    /// Heavy vertices short on H-edges need heavy-light-light triples:
    /// sum over x of max(0, 4 - deg_HH(x)/2 - deg_H(x)) must exceed t1 for
    /// the case to be excluded (deg_HH is the complement degree within K7).
    LightShortfall { graph6: String, t1: u32 },
    /// Heavy vertices with more H-edges than spare triple slots strand
    /// edges: the usable heavy-heavy-light triple count falls below t2.
    EdgeCapacity { graph6: String, t2: u32 },
}

impl AnalyticCheck {
    /// Evaluates the inequality; `true` means the sub-case is excluded.
    pub fn excluded(&self) -> Result<(bool, String), CaseError> {
        match self {
            AnalyticCheck::LightShortfall { graph6, t1 } => {
                let h = SmallGraph::from_graph6(graph6)?;
                let n = h.order();
                let mut required = 0u32;
                for x in 0..n {
                    let dh = h.degree(x) as u32;
                    let in_complement = (n as u32 - 1 - dh) / 2;
                    required += 4u32.saturating_sub(in_complement + dh);
                }
                Ok((
                    required > *t1,
                    format!("needs {required} light-light triples, case allows {t1}"),
                ))
            }
            AnalyticCheck::EdgeCapacity { graph6, t2 } => {
                let h = SmallGraph::from_graph6(graph6)?;
                let n = h.order();
                let mut total_shortfall = 0u32;
                let mut max_shortfall = 0u32;
                for x in 0..n {
                    let dh = h.degree(x) as u32;
                    let in_complement = (n as u32 - 1 - dh) / 2;
                    let spare = 4u32.saturating_sub(in_complement);
                    let short = dh.saturating_sub(spare);
                    total_shortfall += short;
                    max_shortfall = max_shortfall.max(short);
                }
                let unusable = max_shortfall.max(total_shortfall.div_ceil(2));
                let capacity = h.edge_count() as u32 - unusable;
                Ok((
                    capacity < *t2,
                    format!("at most {capacity} heavy edges usable, case needs {t2}"),
                ))
            }
        }
    }
}

/// One verifiable step of a lemma case.
#[derive(Debug, Clone)]
pub enum CaseCheck {
    /// Remove the configuration's triples; expect no K4-decomposition.
    Ilp {
        label: String,
        config: TriangleConfiguration,
    },
    /// The complement of `graph6` within the complete graph on its order
    /// must (or must not) decompose into triangles.
    ComplementTriangle {
        label: String,
        graph6: String,
        expect_decomposable: bool,
    },
    /// Counting argument; expected to exclude.
    Analytic { label: String, check: AnalyticCheck },
    /// One 2-regular complement shape of the K19 alpha=9 analysis: exclude
    /// via either branch (host not triangle-decomposable, or the K4 side
    /// infeasible).
    K19Alpha9 { label: String, r_graph6: String },
    /// The full 266-case sweep.
    K19Alpha11Sweep,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    AllInfeasible,
    CounterexampleFound,
    Incomplete,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CheckOutcome {
    pub label: String,
    pub kind: String,
    /// The paper's claim holds for this step.
    pub ok: bool,
    pub detail: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cover: Option<CoverOutcome>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CaseReport {
    pub lemma_id: String,
    pub outcomes: Vec<CheckOutcome>,
    pub verdict: Verdict,
    /// Cases resolved so far, for sweeps.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub checkpoint_position: Option<usize>,
}

impl CaseReport {
    fn from_outcomes(lemma_id: &str, outcomes: Vec<CheckOutcome>) -> Self {
        let timed_out = outcomes.iter().any(|o| {
            o.cover
                .as_ref()
                .is_some_and(|c| c.status == CoverStatus::TimedOut)
        });
        let verdict = if outcomes.iter().all(|o| o.ok) {
            Verdict::AllInfeasible
        } else if timed_out {
            Verdict::Incomplete
        } else {
            Verdict::CounterexampleFound
        };
        CaseReport {
            lemma_id: lemma_id.to_string(),
            outcomes,
            verdict,
            checkpoint_position: None,
        }
    }
}

pub struct LemmaCase {
    pub id: &'static str,
    pub description: &'static str,
    pub checks: Vec<CaseCheck>,
}

/// Content-addressed store for terminal solver outcomes. Timed-out results
/// are never cached.
pub struct OutcomeCache {
    dir: PathBuf,
}

impl OutcomeCache {
    pub fn new(dir: impl Into<PathBuf>) -> Result<Self, CaseError> {
        let dir = dir.into();
        fs::create_dir_all(&dir)?;
        Ok(OutcomeCache { dir })
    }

    fn key(instance: &CoverInstance, mode: &str, seed: u64) -> String {
        let mut hasher = Sha256::new();
        hasher.update(serde_json::to_vec(instance).expect("instances serialize"));
        hasher.update(mode.as_bytes());
        hasher.update(seed.to_le_bytes());
        hex_string(&hasher.finalize())
    }

    fn get(&self, key: &str) -> Option<CoverOutcome> {
        let path = self.dir.join(format!("{key}.json"));
        let text = fs::read_to_string(path).ok()?;
        serde_json::from_str(&text).ok()
    }

    fn put(&self, key: &str, outcome: &CoverOutcome) {
        if outcome.status == CoverStatus::TimedOut {
            return;
        }
        let path = self.dir.join(format!("{key}.json"));
        let tmp = self.dir.join(format!("{key}.tmp"));
        if fs::write(&tmp, serde_json::to_vec(outcome).expect("outcomes serialize")).is_ok() {
            let _ = fs::rename(tmp, path);
        }
    }
}

fn hex_string(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

/// Solves with the cache consulted first, when one is configured.
pub fn solve_exact_cached(
    instance: &CoverInstance,
    config: &SolverConfig,
    cache: Option<&OutcomeCache>,
) -> CoverOutcome {
    let key = cache.map(|c| (c, OutcomeCache::key(instance, "exact", config.seed)));
    if let Some((c, k)) = &key {
        if let Some(hit) = c.get(k) {
            return hit;
        }
    }
    let outcome = instance.solve_exact(config);
    if let Some((c, k)) = &key {
        c.put(k, &outcome);
    }
    outcome
}

pub struct RunOptions {
    pub solver: SolverConfig,
    pub cache: Option<OutcomeCache>,
    /// Worker fan-out for sweeps.
    pub jobs: usize,
    /// Checkpoint file for the 266-case sweep.
    pub checkpoint: Option<PathBuf>,
    /// Cap on newly processed sweep cases in this call.
    pub case_limit: Option<usize>,
    /// Also report whether each sweep candidate itself decomposes into
    /// triangles. Informational only; the verdict rests on the K4 side.
    pub triangle_side: bool,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions {
            solver: SolverConfig::default(),
            cache: None,
            jobs: 1,
            checkpoint: None,
            case_limit: None,
            triangle_side: false,
        }
    }
}

fn config18(triples: &[[&str; 3]], profile: &[(&str, u32)]) -> TriangleConfiguration {
    build_configuration(18, triples, profile).expect("registry configuration is valid")
}

const HEAVY_PROFILE: &[(&str, u32)] = &[("w", 4), ("y", 1)];

/// The lemma registry: every configuration the proofs settle by search, and
/// every counting exclusion with its inequality.
#[allow(clippy::vec_init_then_push)]
pub fn registry() -> Vec<LemmaCase> {
    let mut cases = Vec::new();

    // alpha = 7: one hub vertex in 4 triples plus 3 independent triples
    cases.push(LemmaCase {
        id: "k18-alpha7",
        description: "K18 with 7 triples removed admits no K4-decomposition",
        checks: vec![CaseCheck::Ilp {
            label: "hub-plus-three".into(),
            config: config18(
                &[
                    ["u", "x1", "x2"],
                    ["u", "x3", "x4"],
                    ["u", "x5", "x6"],
                    ["u", "x7", "x8"],
                    ["x9", "x10", "x11"],
                    ["x12", "x13", "x14"],
                    ["x15", "x16", "x17"],
                ],
                &[("u", 4), ("x", 1)],
            ),
        }],
    });

    // alpha = 9: three hubs pairwise sharing a triple
    cases.push(LemmaCase {
        id: "k18-alpha9",
        description: "K18 with 9 triples removed admits no K4-decomposition",
        checks: vec![CaseCheck::Ilp {
            label: "three-hubs".into(),
            config: config18(
                &[
                    ["u1", "u2", "x1"],
                    ["u1", "u3", "x2"],
                    ["u2", "u3", "x3"],
                    ["u1", "x4", "x5"],
                    ["u1", "x6", "x7"],
                    ["u2", "x8", "x9"],
                    ["u2", "x10", "x11"],
                    ["u3", "x12", "x13"],
                    ["u3", "x14", "x15"],
                ],
                &[("u", 4), ("x", 1)],
            ),
        }],
    });

    // alpha = 11: the unique configuration with five heavy vertices
    cases.push(LemmaCase {
        id: "k18-alpha11",
        description: "K18 with 11 triples removed admits no K4-decomposition",
        checks: vec![CaseCheck::Ilp {
            label: "five-heavy".into(),
            config: config18(
                &[
                    ["w1", "w2", "w3"],
                    ["w1", "w4", "x1"],
                    ["w2", "w4", "x2"],
                    ["w3", "w4", "x3"],
                    ["w1", "w5", "x4"],
                    ["w2", "w5", "x5"],
                    ["w3", "w5", "x6"],
                    ["w1", "x7", "x8"],
                    ["w2", "x9", "x10"],
                    ["w3", "x11", "x12"],
                    ["w4", "w5", "x13"],
                ],
                &[("w", 4), ("x", 1)],
            ),
        }],
    });

    // alpha = 13, case (0,4,3,6): complement of the six heavy triples is C3
    cases.push(LemmaCase {
        id: "k18-alpha13-c1",
        description: "t=(0,4,3,6): unique triple distribution",
        checks: vec![CaseCheck::Ilp {
            label: "c1".into(),
            config: config18(
                &[
                    ["w1", "w3", "w4"],
                    ["w1", "w5", "w6"],
                    ["w2", "w3", "w5"],
                    ["w2", "w4", "w6"],
                    ["w3", "w6", "w7"],
                    ["w4", "w5", "w7"],
                    ["w1", "w2", "y1"],
                    ["w1", "w7", "y2"],
                    ["w2", "w7", "y3"],
                    ["w3", "y4", "y5"],
                    ["w4", "y6", "y7"],
                    ["w5", "y8", "y9"],
                    ["w6", "y10", "y11"],
                ],
                HEAVY_PROFILE,
            ),
        }],
    });

    // alpha = 13, case (1,1,6,5): H is an even (7,6) graph
    cases.push(LemmaCase {
        id: "k18-alpha13-c2",
        description: "t=(1,1,6,5): even (7,6) complements",
        checks: vec![
            CaseCheck::ComplementTriangle {
                label: "bowtie-complement".into(),
                graph6: "F?`EW".into(),
                expect_decomposable: true,
            },
            CaseCheck::ComplementTriangle {
                label: "c6-complement".into(),
                graph6: "F?qb?".into(),
                expect_decomposable: true,
            },
            CaseCheck::ComplementTriangle {
                label: "c3c3-complement".into(),
                graph6: "FCQQO".into(),
                expect_decomposable: false,
            },
            CaseCheck::Analytic {
                label: "bowtie-light-shortfall".into(),
                check: AnalyticCheck::LightShortfall {
                    graph6: "F?`EW".into(),
                    t1: 1,
                },
            },
            CaseCheck::Ilp {
                label: "c2-c6".into(),
                config: config18(
                    &[
                        ["w1", "w2", "w3"],
                        ["w1", "w4", "w7"],
                        ["w2", "w4", "w6"],
                        ["w3", "w4", "w5"],
                        ["w5", "w6", "w7"],
                        ["w4", "y1", "y2"],
                        ["w1", "w5", "y3"],
                        ["w1", "w6", "y4"],
                        ["w2", "w5", "y5"],
                        ["w2", "w7", "y6"],
                        ["w3", "w6", "y7"],
                        ["w3", "w7", "y8"],
                        ["y9", "y10", "y11"],
                    ],
                    HEAVY_PROFILE,
                ),
            },
        ],
    });

    // alpha = 13, case (0,3,5,5)
    cases.push(LemmaCase {
        id: "k18-alpha13-c3",
        description: "t=(0,3,5,5): bowtie and C6 variants",
        checks: vec![
            CaseCheck::ComplementTriangle {
                label: "c3c3-complement".into(),
                graph6: "FCQQO".into(),
                expect_decomposable: false,
            },
            CaseCheck::Ilp {
                label: "c3-bowtie".into(),
                config: config18(
                    &[
                        ["w1", "w2", "w3"],
                        ["w1", "w4", "w6"],
                        ["w2", "w4", "w5"],
                        ["w3", "w5", "w6"],
                        ["w3", "w4", "w7"],
                        ["w3", "y1", "y2"],
                        ["w4", "y3", "y4"],
                        ["w1", "w5", "y5"],
                        ["w1", "w7", "y6"],
                        ["w2", "w6", "y7"],
                        ["w2", "w7", "y8"],
                        ["w5", "w7", "y9"],
                        ["w6", "y10", "y11"],
                    ],
                    HEAVY_PROFILE,
                ),
            },
            CaseCheck::Ilp {
                label: "c3-c6".into(),
                config: config18(
                    &[
                        ["w1", "w2", "w3"],
                        ["w1", "w4", "w7"],
                        ["w2", "w4", "w6"],
                        ["w3", "w4", "w5"],
                        ["w5", "w6", "w7"],
                        ["w4", "y1", "y2"],
                        ["w1", "w5", "y3"],
                        ["w1", "w6", "y4"],
                        ["w2", "w5", "y5"],
                        ["w2", "w7", "y6"],
                        ["w3", "w6", "y7"],
                        ["w3", "y8", "y9"],
                        ["w7", "y10", "y11"],
                    ],
                    HEAVY_PROFILE,
                ),
            },
        ],
    });

    // alpha = 13, case (1,0,8,4): H is an even (7,9) graph
    cases.push(LemmaCase {
        id: "k18-alpha13-c4",
        description: "t=(1,0,8,4): even (7,9) complements",
        checks: vec![
            CaseCheck::ComplementTriangle {
                label: "g1-complement".into(),
                graph6: "F?bro".into(),
                expect_decomposable: false,
            },
            CaseCheck::ComplementTriangle {
                label: "g2-complement".into(),
                graph6: "F?qrg".into(),
                expect_decomposable: false,
            },
            CaseCheck::ComplementTriangle {
                label: "g3-complement".into(),
                graph6: "F?qjW".into(),
                expect_decomposable: true,
            },
            CaseCheck::ComplementTriangle {
                label: "g4-complement".into(),
                graph6: "FCOfw".into(),
                expect_decomposable: true,
            },
            CaseCheck::ComplementTriangle {
                label: "g5-complement".into(),
                graph6: "FCR`w".into(),
                expect_decomposable: true,
            },
            CaseCheck::ComplementTriangle {
                label: "g6-complement".into(),
                graph6: "FCQrW".into(),
                expect_decomposable: false,
            },
            CaseCheck::Analytic {
                label: "g3-light-shortfall".into(),
                check: AnalyticCheck::LightShortfall {
                    graph6: "F?qjW".into(),
                    t1: 0,
                },
            },
            CaseCheck::Analytic {
                label: "g4-edge-capacity".into(),
                check: AnalyticCheck::EdgeCapacity {
                    graph6: "FCOfw".into(),
                    t2: 8,
                },
            },
            CaseCheck::Ilp {
                label: "c4-g5".into(),
                config: config18(
                    &[
                        ["w1", "w2", "w7"],
                        ["w1", "w3", "w5"],
                        ["w2", "w3", "w4"],
                        ["w4", "w5", "w6"],
                        ["w1", "w4", "y1"],
                        ["w1", "w6", "y2"],
                        ["w2", "w5", "y3"],
                        ["w2", "w6", "y4"],
                        ["w3", "w6", "y5"],
                        ["w3", "w7", "y6"],
                        ["w4", "w7", "y7"],
                        ["w5", "w7", "y8"],
                        ["y9", "y10", "y11"],
                    ],
                    HEAVY_PROFILE,
                ),
            },
        ],
    });

    // alpha = 13, case (0,2,7,4)
    let c5_g5_t3: [[&str; 3]; 4] = [
        ["w1", "w2", "w7"],
        ["w1", "w3", "w5"],
        ["w2", "w3", "w4"],
        ["w4", "w5", "w6"],
    ];
    cases.push(LemmaCase {
        id: "k18-alpha13-c5",
        description: "t=(0,2,7,4): G3, G4 and G5 variants",
        checks: vec![
            CaseCheck::ComplementTriangle {
                label: "g1-complement".into(),
                graph6: "F?bro".into(),
                expect_decomposable: false,
            },
            CaseCheck::ComplementTriangle {
                label: "g2-complement".into(),
                graph6: "F?qrg".into(),
                expect_decomposable: false,
            },
            CaseCheck::ComplementTriangle {
                label: "g6-complement".into(),
                graph6: "FCQrW".into(),
                expect_decomposable: false,
            },
            CaseCheck::Ilp {
                label: "c5-g3".into(),
                config: config18(
                    &[
                        ["w1", "w2", "w3"],
                        ["w1", "w4", "w7"],
                        ["w2", "w4", "w6"],
                        ["w3", "w4", "w5"],
                        ["w4", "y1", "y2"],
                        ["w1", "w5", "y3"],
                        ["w1", "w6", "y4"],
                        ["w2", "w5", "y5"],
                        ["w2", "w7", "y6"],
                        ["w3", "w6", "y7"],
                        ["w3", "w7", "y8"],
                        ["w5", "w7", "y9"],
                        ["w6", "y10", "y11"],
                    ],
                    HEAVY_PROFILE,
                ),
            },
            CaseCheck::Ilp {
                label: "c5-g4-same-triangle".into(),
                config: config18(
                    &[
                        ["w1", "w2", "w3"],
                        ["w1", "w5", "w6"],
                        ["w2", "w4", "w6"],
                        ["w3", "w4", "w5"],
                        ["w1", "w4", "y1"],
                        ["w1", "w7", "y2"],
                        ["w2", "w5", "y3"],
                        ["w2", "w7", "y4"],
                        ["w3", "w6", "y5"],
                        ["w4", "w7", "y6"],
                        ["w5", "w7", "y7"],
                        ["w3", "y8", "y9"],
                        ["w6", "y10", "y11"],
                    ],
                    HEAVY_PROFILE,
                ),
            },
            CaseCheck::Ilp {
                label: "c5-g4-split-triangles".into(),
                config: config18(
                    &[
                        ["w1", "w2", "w3"],
                        ["w1", "w5", "w6"],
                        ["w2", "w4", "w6"],
                        ["w3", "w4", "w5"],
                        ["w1", "w4", "y1"],
                        ["w2", "w5", "y2"],
                        ["w3", "w6", "y3"],
                        ["w3", "w7", "y4"],
                        ["w4", "w7", "y5"],
                        ["w5", "w7", "y6"],
                        ["w6", "w7", "y7"],
                        ["w1", "y8", "y9"],
                        ["w2", "y10", "y11"],
                    ],
                    HEAVY_PROFILE,
                ),
            },
            CaseCheck::Ilp {
                label: "c5-g5-w6-w3".into(),
                config: config18(
                    &[
                        c5_g5_t3[0], c5_g5_t3[1], c5_g5_t3[2], c5_g5_t3[3],
                        ["w6", "y1", "y2"],
                        ["w3", "y3", "y4"],
                        ["w1", "w4", "y5"],
                        ["w1", "w6", "y6"],
                        ["w2", "w5", "y7"],
                        ["w2", "w6", "y8"],
                        ["w3", "w7", "y9"],
                        ["w4", "w7", "y10"],
                        ["w5", "w7", "y11"],
                    ],
                    HEAVY_PROFILE,
                ),
            },
            CaseCheck::Ilp {
                label: "c5-g5-w6-w1".into(),
                config: config18(
                    &[
                        c5_g5_t3[0], c5_g5_t3[1], c5_g5_t3[2], c5_g5_t3[3],
                        ["w6", "y1", "y2"],
                        ["w1", "y3", "y4"],
                        ["w1", "w4", "y5"],
                        ["w2", "w5", "y6"],
                        ["w2", "w6", "y7"],
                        ["w3", "w6", "y8"],
                        ["w3", "w7", "y9"],
                        ["w4", "w7", "y10"],
                        ["w5", "w7", "y11"],
                    ],
                    HEAVY_PROFILE,
                ),
            },
            CaseCheck::Ilp {
                label: "c5-g5-w3-twice".into(),
                config: config18(
                    &[
                        c5_g5_t3[0], c5_g5_t3[1], c5_g5_t3[2], c5_g5_t3[3],
                        ["w3", "y1", "y2"],
                        ["w3", "y3", "y4"],
                        ["w1", "w4", "y5"],
                        ["w1", "w6", "y6"],
                        ["w2", "w5", "y7"],
                        ["w2", "w6", "y8"],
                        ["w4", "w7", "y9"],
                        ["w5", "w7", "y10"],
                        ["w6", "w7", "y11"],
                    ],
                    HEAVY_PROFILE,
                ),
            },
            CaseCheck::Ilp {
                label: "c5-g5-w1-w4".into(),
                config: config18(
                    &[
                        c5_g5_t3[0], c5_g5_t3[1], c5_g5_t3[2], c5_g5_t3[3],
                        ["w1", "y1", "y2"],
                        ["w4", "y3", "y4"],
                        ["w1", "w6", "y5"],
                        ["w2", "w5", "y6"],
                        ["w2", "w6", "y7"],
                        ["w3", "w6", "y8"],
                        ["w3", "w7", "y9"],
                        ["w4", "w7", "y10"],
                        ["w5", "w7", "y11"],
                    ],
                    HEAVY_PROFILE,
                ),
            },
        ],
    });

    // alpha = 13, case (0,1,9,3): H is an even (7,12) graph
    let c6_h1_t3: [[&str; 3]; 3] = [["w1", "w2", "w3"], ["w2", "w4", "w6"], ["w3", "w4", "w5"]];
    let c6_h3_t3: [[&str; 3]; 3] = [["w1", "w2", "w3"], ["w3", "w4", "w7"], ["w4", "w5", "w6"]];
    cases.push(LemmaCase {
        id: "k18-alpha13-c6",
        description: "t=(0,1,9,3): even (7,12) complements",
        checks: vec![
            CaseCheck::ComplementTriangle {
                label: "h1-complement".into(),
                graph6: "FCqnw".into(),
                expect_decomposable: true,
            },
            CaseCheck::ComplementTriangle {
                label: "h2-complement".into(),
                graph6: "FEr]o".into(),
                expect_decomposable: true,
            },
            CaseCheck::ComplementTriangle {
                label: "h3-complement".into(),
                graph6: "FEzeW".into(),
                expect_decomposable: true,
            },
            CaseCheck::ComplementTriangle {
                label: "h4-complement".into(),
                graph6: "FEncw".into(),
                expect_decomposable: false,
            },
            CaseCheck::ComplementTriangle {
                label: "h5-complement".into(),
                graph6: "FQzUW".into(),
                expect_decomposable: false,
            },
            CaseCheck::ComplementTriangle {
                label: "h6-complement".into(),
                graph6: "FQytW".into(),
                expect_decomposable: false,
            },
            CaseCheck::Ilp {
                label: "c6-h1-w7-isolated".into(),
                config: config18(
                    &[
                        c6_h1_t3[0], c6_h1_t3[1], c6_h1_t3[2],
                        ["w1", "w4", "y1"],
                        ["w1", "w5", "y2"],
                        ["w1", "w6", "y3"],
                        ["w2", "w5", "y4"],
                        ["w2", "w7", "y5"],
                        ["w3", "w6", "y6"],
                        ["w3", "w7", "y7"],
                        ["w4", "w7", "y8"],
                        ["w5", "w6", "y9"],
                        ["w7", "y10", "y11"],
                    ],
                    HEAVY_PROFILE,
                ),
            },
            CaseCheck::Ilp {
                label: "c6-h1-drop-w1w4".into(),
                config: config18(
                    &[
                        c6_h1_t3[0], c6_h1_t3[1], c6_h1_t3[2],
                        ["w4", "y1", "y2"],
                        ["w1", "w5", "y3"],
                        ["w1", "w6", "y4"],
                        ["w1", "w7", "y5"],
                        ["w2", "w5", "y6"],
                        ["w2", "w7", "y7"],
                        ["w3", "w6", "y8"],
                        ["w3", "w7", "y9"],
                        ["w4", "w7", "y10"],
                        ["w5", "w6", "y11"],
                    ],
                    HEAVY_PROFILE,
                ),
            },
            CaseCheck::Ilp {
                label: "c6-h1-drop-w1w5".into(),
                config: config18(
                    &[
                        c6_h1_t3[0], c6_h1_t3[1], c6_h1_t3[2],
                        ["w5", "y1", "y2"],
                        ["w1", "w4", "y3"],
                        ["w1", "w6", "y4"],
                        ["w1", "w7", "y5"],
                        ["w2", "w5", "y6"],
                        ["w2", "w7", "y7"],
                        ["w3", "w6", "y8"],
                        ["w3", "w7", "y9"],
                        ["w4", "w7", "y10"],
                        ["w5", "w6", "y11"],
                    ],
                    HEAVY_PROFILE,
                ),
            },
            CaseCheck::Ilp {
                label: "c6-h2-matching".into(),
                config: config18(
                    &[
                        ["w1", "w2", "w3"],
                        ["w3", "w4", "w5"],
                        ["w3", "w6", "w7"],
                        ["w1", "w5", "y1"],
                        ["w1", "w6", "y2"],
                        ["w1", "w7", "y3"],
                        ["w2", "w4", "y4"],
                        ["w2", "w5", "y5"],
                        ["w2", "w7", "y6"],
                        ["w4", "w6", "y7"],
                        ["w4", "w7", "y8"],
                        ["w5", "w6", "y9"],
                        ["w3", "y10", "y11"],
                    ],
                    HEAVY_PROFILE,
                ),
            },
            CaseCheck::Ilp {
                label: "c6-h3-pick-w7".into(),
                config: config18(
                    &[
                        c6_h3_t3[0], c6_h3_t3[1], c6_h3_t3[2],
                        ["w7", "y1", "y2"],
                        ["w1", "w4", "y3"],
                        ["w1", "w5", "y4"],
                        ["w1", "w6", "y5"],
                        ["w2", "w4", "y6"],
                        ["w2", "w6", "y7"],
                        ["w2", "w7", "y8"],
                        ["w3", "w5", "y9"],
                        ["w3", "w6", "y10"],
                        ["w5", "w7", "y11"],
                    ],
                    HEAVY_PROFILE,
                ),
            },
            CaseCheck::Ilp {
                label: "c6-h3-pick-w1".into(),
                config: config18(
                    &[
                        c6_h3_t3[0], c6_h3_t3[1], c6_h3_t3[2],
                        ["w1", "y1", "y2"],
                        ["w1", "w4", "y3"],
                        ["w1", "w6", "y4"],
                        ["w2", "w4", "y5"],
                        ["w2", "w5", "y6"],
                        ["w2", "w7", "y7"],
                        ["w3", "w5", "y8"],
                        ["w3", "w6", "y9"],
                        ["w5", "w7", "y10"],
                        ["w6", "w7", "y11"],
                    ],
                    HEAVY_PROFILE,
                ),
            },
            CaseCheck::Ilp {
                label: "c6-h3-pick-w3".into(),
                config: config18(
                    &[
                        c6_h3_t3[0], c6_h3_t3[1], c6_h3_t3[2],
                        ["w3", "y1", "y2"],
                        ["w1", "w4", "y3"],
                        ["w1", "w5", "y4"],
                        ["w1", "w6", "y5"],
                        ["w2", "w4", "y6"],
                        ["w2", "w6", "y7"],
                        ["w2", "w7", "y8"],
                        ["w3", "w5", "y9"],
                        ["w5", "w7", "y10"],
                        ["w6", "w7", "y11"],
                    ],
                    HEAVY_PROFILE,
                ),
            },
        ],
    });

    // alpha = 13, case (0,0,11,2): two heavy triples, every other triple
    // pairs two heavies with a light vertex
    let c7_shared_t3: [[&str; 3]; 2] = [["w1", "w2", "w3"], ["w1", "w4", "w5"]];
    cases.push(LemmaCase {
        id: "k18-alpha13-c7",
        description: "t=(0,0,11,2): independent or sharing heavy triples",
        checks: vec![
            CaseCheck::Ilp {
                label: "c7-independent".into(),
                config: config18(
                    &[
                        ["w1", "w2", "w3"],
                        ["w4", "w5", "w6"],
                        ["w1", "w7", "y1"],
                        ["w2", "w7", "y2"],
                        ["w4", "w7", "y3"],
                        ["w5", "w7", "y4"],
                        ["w3", "w4", "y5"],
                        ["w3", "w5", "y6"],
                        ["w3", "w6", "y7"],
                        ["w1", "w6", "y8"],
                        ["w2", "w6", "y9"],
                        ["w1", "w4", "y10"],
                        ["w2", "w5", "y11"],
                    ],
                    HEAVY_PROFILE,
                ),
            },
            CaseCheck::Ilp {
                label: "c7-shared-split".into(),
                config: config18(
                    &[
                        c7_shared_t3[0], c7_shared_t3[1],
                        ["w1", "w6", "y1"],
                        ["w1", "w7", "y2"],
                        ["w6", "w7", "y3"],
                        ["w2", "w6", "y4"],
                        ["w4", "w6", "y5"],
                        ["w3", "w7", "y6"],
                        ["w5", "w7", "y7"],
                        ["w2", "w4", "y8"],
                        ["w3", "w4", "y9"],
                        ["w2", "w5", "y10"],
                        ["w3", "w5", "y11"],
                    ],
                    HEAVY_PROFILE,
                ),
            },
            CaseCheck::Ilp {
                label: "c7-shared-same".into(),
                config: config18(
                    &[
                        c7_shared_t3[0], c7_shared_t3[1],
                        ["w1", "w6", "y1"],
                        ["w1", "w7", "y2"],
                        ["w6", "w7", "y3"],
                        ["w2", "w6", "y4"],
                        ["w3", "w6", "y5"],
                        ["w4", "w7", "y6"],
                        ["w5", "w7", "y7"],
                        ["w2", "w4", "y8"],
                        ["w3", "w4", "y9"],
                        ["w2", "w5", "y10"],
                        ["w3", "w5", "y11"],
                    ],
                    HEAVY_PROFILE,
                ),
            },
            CaseCheck::Ilp {
                label: "c7-no-share".into(),
                config: config18(
                    &[
                        c7_shared_t3[0], c7_shared_t3[1],
                        ["w1", "w6", "y1"],
                        ["w1", "w7", "y2"],
                        ["w2", "w6", "y3"],
                        ["w3", "w6", "y4"],
                        ["w4", "w6", "y5"],
                        ["w2", "w7", "y6"],
                        ["w4", "w7", "y7"],
                        ["w5", "w7", "y8"],
                        ["w2", "w5", "y9"],
                        ["w3", "w4", "y10"],
                        ["w3", "w5", "y11"],
                    ],
                    HEAVY_PROFILE,
                ),
            },
        ],
    });

    // K19, alpha = 9: the four 2-regular complement shapes on 9 vertices
    let two_regular =
        enumerate::enumerate_regular_graphs(9, 2).expect("2-regular on 9 is in bounds");
    let mut alpha9_checks = Vec::new();
    for r in &two_regular {
        alpha9_checks.push(CaseCheck::K19Alpha9 {
            label: cycle_shape_label(r),
            r_graph6: r.to_graph6(),
        });
    }
    cases.push(LemmaCase {
        id: "k19-alpha9",
        description: "K19 with 9 triples on a K9: all 2-regular complement shapes excluded",
        checks: alpha9_checks,
    });

    cases.push(LemmaCase {
        id: "k19-alpha11",
        description: "K19 with 11 triples on a K11: all 266 6-regular graphs excluded",
        checks: vec![CaseCheck::K19Alpha11Sweep],
    });

    cases
}

/// The cycle structure of a 2-regular graph, e.g. "C6+C3".
fn cycle_shape_label(g: &SmallGraph) -> String {
    let n = g.order();
    let mut seen = vec![false; n];
    let mut cycles = Vec::new();
    for start in 0..n {
        if seen[start] || g.degree(start) == 0 {
            continue;
        }
        let mut len = 0;
        let mut prev = usize::MAX;
        let mut cur = start;
        loop {
            seen[cur] = true;
            len += 1;
            let nbrs = g.neighbors(cur);
            let mut next = usize::MAX;
            let mut m = nbrs;
            while m != 0 {
                let v = m.trailing_zeros() as usize;
                m &= m - 1;
                if v != prev {
                    next = v;
                    break;
                }
            }
            if next == start || next == usize::MAX {
                break;
            }
            prev = cur;
            cur = next;
        }
        cycles.push(len);
    }
    cycles.sort_unstable_by(|a, b| b.cmp(a));
    let mut parts: Vec<String> = Vec::new();
    let mut i = 0;
    while i < cycles.len() {
        let mut j = i;
        while j < cycles.len() && cycles[j] == cycles[i] {
            j += 1;
        }
        let count = j - i;
        if count > 1 {
            parts.push(format!("{}C{}", count, cycles[i]));
        } else {
            parts.push(format!("C{}", cycles[i]));
        }
        i = j;
    }
    parts.join("+")
}

pub fn lemma_ids() -> Vec<&'static str> {
    registry().iter().map(|c| c.id).collect()
}

/// Runs every check of a lemma case and aggregates the verdict.
pub fn run_lemma(id: &str, opts: &RunOptions) -> Result<CaseReport, CaseError> {
    let case = registry()
        .into_iter()
        .find(|c| c.id == id)
        .ok_or_else(|| CaseError::UnknownLemma(id.to_string()))?;
    let mut outcomes = Vec::new();
    for check in &case.checks {
        match check {
            CaseCheck::Ilp { label, config } => {
                let instance = CoverInstance::new(config.host_order, &[4])?
                    .with_removed_edges(&config.removed_edges())?;
                let cover = solve_exact_cached(&instance, &opts.solver, opts.cache.as_ref());
                outcomes.push(CheckOutcome {
                    label: label.clone(),
                    kind: "ilp".into(),
                    ok: cover.status == CoverStatus::Infeasible,
                    detail: format!(
                        "{} triples removed, K4 side {:?}",
                        config.triples.len(),
                        cover.status
                    ),
                    cover: Some(cover),
                });
            }
            CaseCheck::ComplementTriangle {
                label,
                graph6,
                expect_decomposable,
            } => {
                let g = SmallGraph::from_graph6(graph6)?;
                let cover = solve_graph_decomposition(&g.complement(), 3, &opts.solver)?;
                let ok = match cover.status {
                    CoverStatus::Feasible => *expect_decomposable,
                    CoverStatus::Infeasible => !*expect_decomposable,
                    CoverStatus::TimedOut => false,
                };
                outcomes.push(CheckOutcome {
                    label: label.clone(),
                    kind: "complement-triangle".into(),
                    ok,
                    detail: format!(
                        "complement of {graph6} triangle decomposition {:?}, expected {}",
                        cover.status,
                        if *expect_decomposable {
                            "feasible"
                        } else {
                            "infeasible"
                        }
                    ),
                    cover: Some(cover),
                });
            }
            CaseCheck::Analytic { label, check } => {
                let (excluded, detail) = check.excluded()?;
                outcomes.push(CheckOutcome {
                    label: label.clone(),
                    kind: "analytic".into(),
                    ok: excluded,
                    detail,
                    cover: None,
                });
            }
            CaseCheck::K19Alpha9 { label, r_graph6 } => {
                outcomes.push(run_alpha9_case(label, r_graph6, opts)?);
            }
            CaseCheck::K19Alpha11Sweep => {
                // the sweep is always the sole check; its verdict (which
                // distinguishes incomplete from refuted) passes through
                let graphs = regular_11_6_fixture()?;
                let mut report = k19_alpha11_sweep(&graphs, opts)?;
                report.lemma_id = id.to_string();
                return Ok(report);
            }
        }
    }
    Ok(CaseReport::from_outcomes(id, outcomes))
}

/// One 2-regular shape R: H = K9 - R on vertices 1..9 of K19. Excluded when
/// H has no triangle decomposition, or when K19 - E(H) has no
/// K4-decomposition.
fn run_alpha9_case(
    label: &str,
    r_graph6: &str,
    opts: &RunOptions,
) -> Result<CheckOutcome, CaseError> {
    let r = SmallGraph::from_graph6(r_graph6)?;
    let h = r.complement();
    debug_assert_eq!(h.edge_count(), 27);
    debug_assert!((0..9).all(|v| h.degree(v) == 6));
    let triangle_side = solve_graph_decomposition(&h, 3, &opts.solver)?;
    match triangle_side.status {
        CoverStatus::Infeasible => Ok(CheckOutcome {
            label: label.to_string(),
            kind: "k19-alpha9".into(),
            ok: true,
            detail: "excluded: K9 minus the shape is not triangle-decomposable".into(),
            cover: Some(triangle_side),
        }),
        CoverStatus::TimedOut => Ok(CheckOutcome {
            label: label.to_string(),
            kind: "k19-alpha9".into(),
            ok: false,
            detail: "triangle-side search timed out".into(),
            cover: Some(triangle_side),
        }),
        CoverStatus::Feasible => {
            let instance = CoverInstance::new(19, &[4])?
                .with_removed_edges(&h.one_based_edges())?;
            let cover = solve_exact_cached(&instance, &opts.solver, opts.cache.as_ref());
            let ok = cover.status == CoverStatus::Infeasible;
            Ok(CheckOutcome {
                label: label.to_string(),
                kind: "k19-alpha9".into(),
                ok,
                detail: if ok {
                    "excluded: triangle side feasible, K4 side infeasible".into()
                } else {
                    format!("K4 side returned {:?}", cover.status)
                },
                cover: Some(cover),
            })
        }
    }
}

/// Runs the four-shape analysis directly.
pub fn k19_alpha9_sweep(opts: &RunOptions) -> Result<CaseReport, CaseError> {
    run_lemma("k19-alpha9", opts)
}

/// The 266 six-regular graphs of order 11, loaded from the embedded fixture.
pub fn regular_11_6_fixture() -> Result<Vec<SmallGraph>, CaseError> {
    const FIXTURE: &str = include_str!("../../../fixtures/regular_11_6.g6");
    FIXTURE
        .lines()
        .map(|l| SmallGraph::from_graph6(l).map_err(CaseError::from))
        .collect()
}

#[derive(Debug, Serialize, Deserialize)]
struct CheckpointLine {
    index: usize,
    graph6: String,
    status: CoverStatus,
    nodes: u64,
    ms: u64,
}

fn read_checkpoint(
    path: &Path,
    expected: &[String],
) -> Result<BTreeMap<usize, CheckpointLine>, CaseError> {
    let mut resolved = BTreeMap::new();
    if !path.exists() {
        return Ok(resolved);
    }
    let text = fs::read_to_string(path)?;
    for (lineno, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let entry: CheckpointLine = serde_json::from_str(line).map_err(|e| {
            CaseError::Checkpoint(format!("line {}: {e}", lineno + 1))
        })?;
        if entry.index >= expected.len() {
            return Err(CaseError::Checkpoint(format!(
                "line {}: case index {} out of range",
                lineno + 1,
                entry.index
            )));
        }
        if entry.graph6 != expected[entry.index] {
            return Err(CaseError::Checkpoint(format!(
                "line {}: canonical form mismatch for case {} (checkpoint from a different case list?)",
                lineno + 1,
                entry.index
            )));
        }
        if entry.status != CoverStatus::TimedOut {
            resolved.insert(entry.index, entry);
        }
    }
    Ok(resolved)
}

/// Removes each candidate graph (embedded on vertices 1..n) from K19 and
/// proves the remainder has no K4-decomposition. Outcomes are appended to the
/// checkpoint as JSON lines and already-resolved cases are skipped on resume.
/// `opts.case_limit` bounds the number of newly processed cases, leaving the
/// report incomplete but resumable.
pub fn k19_alpha11_sweep(
    graphs: &[SmallGraph],
    opts: &RunOptions,
) -> Result<CaseReport, CaseError> {
    sweep_k4_removal("k19-alpha11", 19, graphs, opts)
}

/// Generic removal sweep behind the K19 alpha=11 run; the host order and
/// graph list are parameters so checkpoint handling is testable at any size.
pub fn sweep_k4_removal(
    lemma_id: &str,
    host_order: u32,
    graphs: &[SmallGraph],
    opts: &RunOptions,
) -> Result<CaseReport, CaseError> {
    let canon: Vec<String> = graphs
        .iter()
        .map(|g| canonical_graph(g).map(|c| c.to_graph6()))
        .collect::<Result<_, _>>()?;
    let mut resolved = match &opts.checkpoint {
        Some(path) => read_checkpoint(path, &canon)?,
        None => BTreeMap::new(),
    };

    let todo: Vec<usize> = (0..graphs.len())
        .filter(|i| !resolved.contains_key(i))
        .take(opts.case_limit.unwrap_or(usize::MAX))
        .collect();

    let writer: Option<Mutex<fs::File>> = match &opts.checkpoint {
        Some(path) => Some(Mutex::new(
            fs::OpenOptions::new().create(true).append(true).open(path)?,
        )),
        None => None,
    };

    let next = AtomicUsize::new(0);
    let results: Mutex<Vec<(usize, CheckpointLine)>> = Mutex::new(Vec::new());
    let jobs = opts.jobs.max(1).min(todo.len().max(1));
    std::thread::scope(|scope| -> Result<(), CaseError> {
        let mut handles = Vec::new();
        for _ in 0..jobs {
            handles.push(scope.spawn(|| -> Result<(), CaseError> {
                loop {
                    let slot = next.fetch_add(1, Ordering::Relaxed);
                    if slot >= todo.len() {
                        return Ok(());
                    }
                    let case = todo[slot];
                    let instance = CoverInstance::new(host_order, &[4])?
                        .with_removed_edges(&graphs[case].one_based_edges())?;
                    let outcome =
                        solve_exact_cached(&instance, &opts.solver, opts.cache.as_ref());
                    if opts.triangle_side {
                        let side = solve_graph_decomposition(&graphs[case], 3, &opts.solver)?;
                        eprintln!(
                            "case {case}: candidate triangle decomposition {:?}",
                            side.status
                        );
                    }
                    let line = CheckpointLine {
                        index: case,
                        graph6: canon[case].clone(),
                        status: outcome.status,
                        nodes: outcome.stats.nodes,
                        ms: outcome.stats.ms,
                    };
                    if let Some(writer) = &writer {
                        let mut file = writer.lock().expect("checkpoint writer poisoned");
                        let json = serde_json::to_string(&line).expect("line serializes");
                        writeln!(file, "{json}")?;
                    }
                    results
                        .lock()
                        .expect("result collector poisoned")
                        .push((case, line));
                }
            }));
        }
        for handle in handles {
            handle.join().expect("sweep worker panicked")?;
        }
        Ok(())
    })?;

    for (case, line) in results.into_inner().expect("result collector poisoned") {
        if line.status != CoverStatus::TimedOut {
            resolved.insert(case, line);
        } else {
            resolved.entry(case).or_insert(line);
        }
    }

    let mut outcomes = Vec::new();
    let mut all_ok = true;
    let mut any_feasible = false;
    for i in 0..graphs.len() {
        match resolved.get(&i) {
            Some(line) => {
                let ok = line.status == CoverStatus::Infeasible;
                all_ok &= ok;
                any_feasible |= line.status == CoverStatus::Feasible;
                outcomes.push(CheckOutcome {
                    label: format!("case-{i:03}"),
                    kind: "k4-removal".into(),
                    ok,
                    detail: format!("{} -> {:?}", line.graph6, line.status),
                    cover: None,
                });
            }
            None => {
                all_ok = false;
                outcomes.push(CheckOutcome {
                    label: format!("case-{i:03}"),
                    kind: "k4-removal".into(),
                    ok: false,
                    detail: "unresolved".into(),
                    cover: None,
                });
            }
        }
    }
    // timed-out cases stay unresolved; resume re-runs them
    let position = resolved
        .values()
        .filter(|l| l.status != CoverStatus::TimedOut)
        .count();
    let verdict = if all_ok {
        Verdict::AllInfeasible
    } else if any_feasible {
        Verdict::CounterexampleFound
    } else {
        Verdict::Incomplete
    };
    Ok(CaseReport {
        lemma_id: lemma_id.to_string(),
        outcomes,
        verdict,
        checkpoint_position: Some(position),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn registry_configurations_are_valid() {
        // the constructor in config18 already validates; exercise invariants
        let mut ids = std::collections::HashSet::new();
        for case in registry() {
            assert!(ids.insert(case.id), "duplicate id {}", case.id);
            for check in &case.checks {
                if let CaseCheck::Ilp { config, .. } = check {
                    // edge-disjoint: removal count is 3 per triple
                    assert_eq!(
                        config.removed_edges().len(),
                        3 * config.triples().len()
                    );
                    // vertex budget within the host
                    let max = config
                        .triples()
                        .iter()
                        .flat_map(|t| t.vertices().iter().copied())
                        .max()
                        .unwrap_or(0);
                    assert!(max <= config.host_order());
                }
            }
        }
        assert_eq!(ids.len(), 12);
    }

    #[test]
    fn alpha7_matches_published_edge_list() {
        let reg = registry();
        let case = reg.iter().find(|c| c.id == "k18-alpha7").unwrap();
        let CaseCheck::Ilp { config, .. } = &case.checks[0] else {
            panic!("alpha7 is a single ilp check");
        };
        let mut edges = config.removed_edges();
        edges.sort_unstable();
        let expect: Vec<(u32, u32)> = vec![
            (1, 2), (1, 3), (1, 4), (1, 5), (1, 6), (1, 7), (1, 8), (1, 9),
            (2, 3), (4, 5), (6, 7), (8, 9),
            (10, 11), (10, 12), (11, 12),
            (13, 14), (13, 15), (14, 15),
            (16, 17), (16, 18), (17, 18),
        ];
        assert_eq!(edges, expect);

        // every surviving K4 candidate avoids all 21 removed edges
        let instance = CoverInstance::new(18, &[4])
            .unwrap()
            .with_removed_edges(&edges)
            .unwrap();
        let removed: std::collections::BTreeSet<(u32, u32)> = edges.into_iter().collect();
        let candidates = instance.build_candidates();
        assert!(!candidates.is_empty());
        for (block, _) in candidates {
            assert!(block.edges().iter().all(|e| !removed.contains(e)));
        }
    }

    #[test]
    fn alpha13_configs_have_thirteen_triples_and_heavy_profile() {
        for case in registry() {
            if !case.id.starts_with("k18-alpha13") {
                continue;
            }
            for check in &case.checks {
                if let CaseCheck::Ilp { config, label } = check {
                    assert_eq!(config.triples().len(), 13, "{label}");
                    // seven heavy vertices in 4 triples, eleven light in 1
                    let mut counts = std::collections::BTreeMap::new();
                    for t in config.triples() {
                        for &v in t.vertices() {
                            *counts.entry(v).or_insert(0u32) += 1;
                        }
                    }
                    let heavy = counts.values().filter(|&&c| c == 4).count();
                    let light = counts.values().filter(|&&c| c == 1).count();
                    assert_eq!((heavy, light), (7, 11), "{label}");
                }
            }
        }
    }

    #[test]
    fn alpha13_configs_match_their_distribution_and_heavy_graph() {
        // per case: the (t0,t1,t2,t3) distribution, and for configurations
        // tied to an even graph H on the heavy K7, the identification of H
        // (w_{i+1} = graph vertex i): all-heavy triples live in the
        // complement of H, heavy-pair triples use exactly edges of H
        let expected_t: &[(&str, (u32, u32, u32, u32))] = &[
            ("k18-alpha13-c1", (0, 4, 3, 6)),
            ("k18-alpha13-c2", (1, 1, 6, 5)),
            ("k18-alpha13-c3", (0, 3, 5, 5)),
            ("k18-alpha13-c4", (1, 0, 8, 4)),
            ("k18-alpha13-c5", (0, 2, 7, 4)),
            ("k18-alpha13-c6", (0, 1, 9, 3)),
            ("k18-alpha13-c7", (0, 0, 11, 2)),
        ];
        let h_of: &[(&str, &str)] = &[
            ("c2-c6", "F?qb?"),
            ("c3-bowtie", "F?`EW"),
            ("c3-c6", "F?qb?"),
            ("c4-g5", "FCR`w"),
            ("c5-g3", "F?qjW"),
            ("c5-g4-same-triangle", "FCOfw"),
            ("c5-g4-split-triangles", "FCOfw"),
            ("c5-g5-w6-w3", "FCR`w"),
            ("c5-g5-w6-w1", "FCR`w"),
            ("c5-g5-w3-twice", "FCR`w"),
            ("c5-g5-w1-w4", "FCR`w"),
            ("c6-h1-w7-isolated", "FCqnw"),
            ("c6-h1-drop-w1w4", "FCqnw"),
            ("c6-h1-drop-w1w5", "FCqnw"),
            ("c6-h2-matching", "FEr]o"),
            ("c6-h3-pick-w7", "FEzeW"),
            ("c6-h3-pick-w1", "FEzeW"),
            ("c6-h3-pick-w3", "FEzeW"),
        ];
        for case in registry() {
            let Some(&(_, (t0, t1, t2, t3))) =
                expected_t.iter().find(|(id, _)| *id == case.id)
            else {
                continue;
            };
            for check in &case.checks {
                let CaseCheck::Ilp { config, label } = check else {
                    continue;
                };
                let mut counts = std::collections::BTreeMap::new();
                for t in config.triples() {
                    for &v in t.vertices() {
                        *counts.entry(v).or_insert(0u32) += 1;
                    }
                }
                let heavy: std::collections::BTreeSet<u32> = counts
                    .iter()
                    .filter(|(_, &c)| c == 4)
                    .map(|(&v, _)| v)
                    .collect();
                let mut got = [0u32; 4];
                let mut heavy_pairs_used: Vec<(u32, u32)> = Vec::new();
                let mut heavy_triples: Vec<Vec<u32>> = Vec::new();
                for t in config.triples() {
                    let h: Vec<u32> = t
                        .vertices()
                        .iter()
                        .copied()
                        .filter(|v| heavy.contains(v))
                        .collect();
                    got[h.len()] += 1;
                    if h.len() == 2 {
                        heavy_pairs_used.push((h[0], h[1]));
                    } else if h.len() == 3 {
                        heavy_triples.push(h);
                    }
                }
                assert_eq!(got, [t0, t1, t2, t3], "{label}");

                if let Some(&(_, g6)) = h_of.iter().find(|(l, _)| *l == label.as_str()) {
                    let h = SmallGraph::from_graph6(g6).unwrap();
                    // heavy vertices are 1..=7 in registry order
                    assert_eq!(heavy, (1..=7).collect());
                    for &(a, b) in &heavy_pairs_used {
                        assert!(
                            h.has_edge(a as usize - 1, b as usize - 1),
                            "{label}: heavy pair ({a},{b}) not an edge of {g6}"
                        );
                    }
                    for ht in &heavy_triples {
                        for i in 0..3 {
                            for j in (i + 1)..3 {
                                assert!(
                                    !h.has_edge(ht[i] as usize - 1, ht[j] as usize - 1),
                                    "{label}: all-heavy triple {ht:?} collides with {g6}"
                                );
                            }
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn build_configuration_rejects_bad_profiles() {
        // w1 sits in one triple, profile demands four
        let err = build_configuration(18, &[["w1", "y1", "y2"]], &[("w", 4), ("y", 1)]);
        assert!(matches!(err, Err(CaseError::ProfileViolation { .. })));

        // repeated edge across triples
        let err = build_configuration(
            18,
            &[["z1", "z2", "z3"], ["z1", "z2", "z4"]],
            &[("z", 2)],
        );
        assert!(matches!(err, Err(CaseError::EdgeOverlap(..))));

        // unknown class
        let err = build_configuration(18, &[["q1", "q2", "q3"]], &[("w", 1)]);
        assert!(matches!(err, Err(CaseError::UnknownClass(..))));

        // host too small
        let err = build_configuration(3, &[["w1", "w2", "w3"], ["w1", "y1", "y2"]], &[("w", 2), ("y", 1)]);
        assert!(matches!(err, Err(CaseError::HostTooSmall { .. })));
    }

    #[test]
    fn degenerate_single_triple_config() {
        let config =
            build_configuration(18, &[["z1", "z2", "z3"]], &[("z", 1)]).unwrap();
        assert_eq!(config.triples().len(), 1);
        assert_eq!(config.triples()[0].vertices(), &[1, 2, 3]);
    }

    #[test]
    fn empty_config_on_k4_is_feasible() {
        let config = build_configuration(4, &[], &[]).unwrap();
        let out = check_configuration(&config, &SolverConfig::default()).unwrap();
        assert_eq!(out.status, CoverStatus::Feasible);
        assert_eq!(out.block_count, 1);
    }

    #[test]
    fn analytic_checks_match_hand_counts() {
        // bowtie: two vertices isolated in H need light-light triples
        let (excluded, _) = AnalyticCheck::LightShortfall {
            graph6: "F?`EW".into(),
            t1: 1,
        }
        .excluded()
        .unwrap();
        assert!(excluded);
        // with t1 = 2 the bowtie would not be excluded by this count
        let (excluded, _) = AnalyticCheck::LightShortfall {
            graph6: "F?`EW".into(),
            t1: 2,
        }
        .excluded()
        .unwrap();
        assert!(!excluded);
        // G4: the degree-6 vertex strands two edges, capping t2 at 7
        let (excluded, detail) = AnalyticCheck::EdgeCapacity {
            graph6: "FCOfw".into(),
            t2: 8,
        }
        .excluded()
        .unwrap();
        assert!(excluded, "{detail}");
        let (excluded, _) = AnalyticCheck::EdgeCapacity {
            graph6: "FCOfw".into(),
            t2: 7,
        }
        .excluded()
        .unwrap();
        assert!(!excluded);
    }

    #[test]
    fn unknown_lemma_rejected() {
        assert!(matches!(
            run_lemma("k18-alpha99", &RunOptions::default()),
            Err(CaseError::UnknownLemma(_))
        ));
    }

    #[test]
    fn cycle_labels() {
        let graphs = enumerate::enumerate_regular_graphs(9, 2).unwrap();
        let mut labels: Vec<String> = graphs.iter().map(cycle_shape_label).collect();
        labels.sort();
        assert_eq!(labels, vec!["3C3", "C5+C4", "C6+C3", "C9"]);
    }

    #[test]
    fn fixture_loads_266_graphs() {
        let graphs = regular_11_6_fixture().unwrap();
        assert_eq!(graphs.len(), 266);
        for g in &graphs {
            assert_eq!(g.order(), 11);
            assert_eq!(g.edge_count(), 33);
            assert!((0..11).all(|v| g.degree(v) == 6));
        }
    }

    #[test]
    fn check_configuration_is_relabeling_invariant() {
        use rand::seq::SliceRandom;
        use rand::SeedableRng;
        let reg = registry();
        let case = reg.iter().find(|c| c.id == "k18-alpha13-c1").unwrap();
        let CaseCheck::Ilp { config, .. } = &case.checks[0] else {
            panic!("c1 is an ilp check");
        };
        let base = check_configuration(config, &SolverConfig::default()).unwrap();
        assert_eq!(base.status, CoverStatus::Infeasible);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..3 {
            let mut perm: Vec<u32> = (1..=18).collect();
            perm.shuffle(&mut rng);
            let relabeled: Vec<(u32, u32)> = config
                .removed_edges()
                .iter()
                .map(|&(a, b)| (perm[a as usize - 1], perm[b as usize - 1]))
                .collect();
            let instance = CoverInstance::new(18, &[4])
                .unwrap()
                .with_removed_edges(&relabeled)
                .unwrap();
            let out = instance.solve_exact(&SolverConfig::default());
            assert_eq!(out.status, base.status);
        }
    }

    #[test]
    fn checkpoint_rejects_foreign_case_list() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("sweep.jsonl");
        std::fs::write(
            &path,
            "{\"index\":0,\"graph6\":\"Bw\",\"status\":\"infeasible\",\"nodes\":1,\"ms\":0}\n",
        )
        .unwrap();
        let graphs = vec![SmallGraph::from_graph6("J?B~vr{}fq?").unwrap()];
        let opts = RunOptions {
            checkpoint: Some(path),
            case_limit: Some(0),
            ..RunOptions::default()
        };
        let err = sweep_k4_removal("test", 19, &graphs, &opts);
        assert!(matches!(err, Err(CaseError::Checkpoint(_))));
    }
}
