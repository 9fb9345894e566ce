//! Exact-cover search over clique blocks with per-edge multiplicities.
//!
//! An instance is a complete graph K_v minus a set of removed edges, a demand
//! per surviving edge (1 unless raised by an excess entry), and a set of
//! allowed block sizes. The solver selects blocks, each at most once, so that
//! every surviving edge is covered exactly its demand.
//!
//! The search is exact-cover backtracking: branch on the surviving edge with
//! the fewest remaining candidate blocks, tie-break by lowest edge index,
//! propagate forced choices, and undo through a trail. Infeasible means the
//! search space was exhausted; a timed-out search is reported as
//! [`CoverStatus::TimedOut`] and never as infeasible.

use std::collections::{BTreeMap, BTreeSet};
use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{Block, CompleteGraphSpec, GraphError, SmallGraph};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum InstanceError {
    #[error("order must be at least 1, got {0}")]
    BadOrder(u32),
    #[error("block size {size} unusable on order {order}")]
    BadBlockSize { size: usize, order: u32 },
    #[error("no block sizes given")]
    NoBlockSizes,
    #[error(transparent)]
    Edge(#[from] GraphError),
    #[error("edge ({0}, {1}) is removed and cannot carry multiplicity")]
    RemovedEdgeWithExcess(u32, u32),
    #[error("multiplicity for edge ({0}, {1}) must be positive")]
    ZeroMultiplicity(u32, u32),
    #[error("edge restriction given for size {0} not in the block-size set")]
    RestrictionUnknownSize(usize),
}

/// A host edge multiset over `order` vertices plus the allowed block sizes.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "InstanceRepr", into = "InstanceRepr")]
pub struct CoverInstance {
    order: u32,
    block_sizes: Vec<usize>,
    removed_edges: BTreeSet<(u32, u32)>,
    excess: BTreeMap<(u32, u32), u16>,
    per_size_edge_restriction: Option<BTreeMap<usize, BTreeSet<(u32, u32)>>>,
}

/// Wire shape: `{"order": v, "block_sizes": [...], "removed_edges": [[a,b],..],
/// "excess": [[[a,b], m], ...]}`.
#[derive(Serialize, Deserialize)]
struct InstanceRepr {
    order: u32,
    block_sizes: Vec<usize>,
    #[serde(default)]
    removed_edges: Vec<(u32, u32)>,
    #[serde(default)]
    excess: Vec<((u32, u32), u16)>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    per_size_edge_restriction: Option<BTreeMap<usize, Vec<(u32, u32)>>>,
}

impl TryFrom<InstanceRepr> for CoverInstance {
    type Error = InstanceError;
    fn try_from(r: InstanceRepr) -> Result<Self, InstanceError> {
        let mut inst = CoverInstance::new(r.order, &r.block_sizes)?
            .with_removed_edges(&r.removed_edges)?
            .with_excess(&r.excess)?;
        if let Some(map) = r.per_size_edge_restriction {
            for (size, edges) in map {
                inst = inst.with_size_restriction(size, &edges)?;
            }
        }
        Ok(inst)
    }
}

impl From<CoverInstance> for InstanceRepr {
    fn from(i: CoverInstance) -> Self {
        InstanceRepr {
            order: i.order,
            block_sizes: i.block_sizes,
            removed_edges: i.removed_edges.into_iter().collect(),
            excess: i.excess.into_iter().collect(),
            per_size_edge_restriction: i
                .per_size_edge_restriction
                .map(|m| m.into_iter().map(|(k, v)| (k, v.into_iter().collect())).collect()),
        }
    }
}

impl CoverInstance {
    pub fn new(order: u32, block_sizes: &[usize]) -> Result<Self, InstanceError> {
        if order == 0 {
            return Err(InstanceError::BadOrder(order));
        }
        if block_sizes.is_empty() {
            return Err(InstanceError::NoBlockSizes);
        }
        let mut sizes: Vec<usize> = block_sizes.to_vec();
        sizes.sort_unstable();
        sizes.dedup();
        for &size in &sizes {
            if size < 3 || size > order as usize {
                return Err(InstanceError::BadBlockSize { size, order });
            }
        }
        Ok(Self {
            order,
            block_sizes: sizes,
            removed_edges: BTreeSet::new(),
            excess: BTreeMap::new(),
            per_size_edge_restriction: None,
        })
    }

    pub fn with_removed_edges(mut self, edges: &[(u32, u32)]) -> Result<Self, InstanceError> {
        let spec = self.spec();
        for &pair in edges {
            let idx = spec.edge_index(pair)?;
            let norm = spec.edge_at(idx).expect("index from edge_index");
            if self.excess.contains_key(&norm) {
                return Err(InstanceError::RemovedEdgeWithExcess(norm.0, norm.1));
            }
            self.removed_edges.insert(norm);
        }
        Ok(self)
    }

    pub fn with_excess(mut self, excess: &[((u32, u32), u16)]) -> Result<Self, InstanceError> {
        let spec = self.spec();
        for &(pair, mult) in excess {
            let idx = spec.edge_index(pair)?;
            let norm = spec.edge_at(idx).expect("index from edge_index");
            if mult == 0 {
                return Err(InstanceError::ZeroMultiplicity(norm.0, norm.1));
            }
            if self.removed_edges.contains(&norm) {
                return Err(InstanceError::RemovedEdgeWithExcess(norm.0, norm.1));
            }
            self.excess.insert(norm, mult);
        }
        Ok(self)
    }

    /// Restricts blocks of `size` to those whose edges all lie in `edges`.
    pub fn with_size_restriction(
        mut self,
        size: usize,
        edges: &[(u32, u32)],
    ) -> Result<Self, InstanceError> {
        if !self.block_sizes.contains(&size) {
            return Err(InstanceError::RestrictionUnknownSize(size));
        }
        let spec = self.spec();
        let mut set = BTreeSet::new();
        for &pair in edges {
            let idx = spec.edge_index(pair)?;
            set.insert(spec.edge_at(idx).expect("index from edge_index"));
        }
        self.per_size_edge_restriction
            .get_or_insert_with(BTreeMap::new)
            .insert(size, set);
        Ok(self)
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn block_sizes(&self) -> &[usize] {
        &self.block_sizes
    }

    pub fn removed_edges(&self) -> impl Iterator<Item = (u32, u32)> + '_ {
        self.removed_edges.iter().copied()
    }

    fn spec(&self) -> CompleteGraphSpec {
        CompleteGraphSpec::new(self.order).expect("order validated")
    }

    /// Demand of the edge with the given 1-based index.
    pub fn multiplicity(&self, edge_index: u32) -> u32 {
        let pair = match self.spec().edge_at(edge_index) {
            Ok(p) => p,
            Err(_) => return 0,
        };
        if self.removed_edges.contains(&pair) {
            0
        } else {
            u32::from(*self.excess.get(&pair).unwrap_or(&1))
        }
    }

    /// Surviving edges (removed ones excluded), lexicographic.
    pub fn surviving_edges(&self) -> Vec<(u32, u32)> {
        self.spec()
            .edges()
            .into_iter()
            .filter(|e| !self.removed_edges.contains(e))
            .collect()
    }

    pub fn total_demand(&self) -> u64 {
        let spec = self.spec();
        (1..=spec.edge_count() as u32)
            .map(|i| u64::from(self.multiplicity(i)))
            .sum()
    }

    /// Candidate blocks in (size, lexicographic) order, each with its 1-based
    /// edge-index list. A block survives iff none of its edges is removed and
    /// it respects the per-size edge restriction.
    pub fn build_candidates(&self) -> Vec<(Block, Vec<u32>)> {
        let spec = self.spec();
        let mut out = Vec::new();
        for &size in &self.block_sizes {
            let allowed = self
                .per_size_edge_restriction
                .as_ref()
                .and_then(|m| m.get(&size));
            'block: for block in spec.enumerate_blocks(size).expect("size validated") {
                let mut idxs = Vec::with_capacity(size * (size - 1) / 2);
                for pair in block.edges() {
                    if self.removed_edges.contains(&pair) {
                        continue 'block;
                    }
                    if let Some(allowed) = allowed {
                        if !allowed.contains(&pair) {
                            continue 'block;
                        }
                    }
                    idxs.push(spec.edge_index(pair).expect("block edge in range"));
                }
                out.push((block, idxs));
            }
        }
        out
    }

    pub fn solve_exact(&self, config: &SolverConfig) -> CoverOutcome {
        let start = Instant::now();
        let mut engine = Engine::new(self, config);
        let result = if config.thread_count > 1 && config.node_limit.is_none() {
            engine.search_parallel(self, config)
        } else {
            engine.search(None, None)
        };
        engine.outcome(result, false, start)
    }

    /// Like [`solve_exact`](Self::solve_exact) but only admits solutions with
    /// at most `max_blocks` blocks.
    pub fn solve_exact_bounded(&self, config: &SolverConfig, max_blocks: usize) -> CoverOutcome {
        let start = Instant::now();
        let mut engine = Engine::new(self, config);
        let result = engine.search(Some(max_blocks), None);
        engine.outcome(result, false, start)
    }

    /// Smallest achievable block count.
    ///
    /// For size sets within {3,4} the candidate (triple count, quadruple
    /// count) profiles are forced by the edge-count identity, so the solver
    /// enumerates profiles in ascending block count and searches each one.
    /// `minimal` is set only when every smaller profile was exhausted, never
    /// when one was cut short by a limit. Budgets apply per profile.
    pub fn solve_minimum(&self, config: &SolverConfig) -> CoverOutcome {
        let start = Instant::now();
        let demand = self.total_demand();
        if demand == 0 {
            return CoverOutcome {
                status: CoverStatus::Feasible,
                blocks: Some(Vec::new()),
                block_count: 0,
                minimal: true,
                stats: SearchStats {
                    nodes: 0,
                    ms: start.elapsed().as_millis() as u64,
                },
            };
        }
        if self.block_sizes.iter().all(|&s| s == 3 || s == 4) {
            return self.solve_minimum_profiles(config, demand, start);
        }
        self.solve_minimum_deepening(config, demand, start)
    }

    fn profiles(&self, demand: u64) -> Vec<(usize, usize)> {
        let has3 = self.block_sizes.contains(&3);
        let has4 = self.block_sizes.contains(&4);
        let mut out = Vec::new();
        if !demand.is_multiple_of(3) {
            return out;
        }
        match (has3, has4) {
            (true, true) => {
                // 3a + 6b = demand; block count a + b grows with a
                let mut a = if demand % 6 == 3 { 1 } else { 0 };
                while 3 * a <= demand {
                    out.push((a as usize, ((demand - 3 * a) / 6) as usize));
                    a += 2;
                }
            }
            (true, false) => out.push(((demand / 3) as usize, 0)),
            (false, true) => {
                if demand.is_multiple_of(6) {
                    out.push((0, (demand / 6) as usize));
                }
            }
            (false, false) => unreachable!("sizes validated non-empty"),
        }
        out
    }

    fn solve_minimum_profiles(
        &self,
        config: &SolverConfig,
        demand: u64,
        start: Instant,
    ) -> CoverOutcome {
        let deadline = config.time_limit.map(|t| Instant::now() + t);
        let mut nodes = 0;
        let mut all_lower_exhausted = true;
        for (triples, quads) in self.profiles(demand) {
            let (result, spent, solution) =
                self.search_profile(config, deadline, (triples, quads));
            nodes += spent;
            match result {
                SearchResult::Found => {
                    let blocks = solution.expect("found implies solution");
                    let count = blocks.len();
                    return CoverOutcome {
                        status: CoverStatus::Feasible,
                        blocks: Some(blocks),
                        block_count: count,
                        minimal: all_lower_exhausted,
                        stats: SearchStats {
                            nodes,
                            ms: start.elapsed().as_millis() as u64,
                        },
                    };
                }
                SearchResult::Exhausted => {}
                SearchResult::Budget => all_lower_exhausted = false,
            }
        }
        CoverOutcome {
            status: if all_lower_exhausted {
                CoverStatus::Infeasible
            } else {
                CoverStatus::TimedOut
            },
            blocks: None,
            block_count: 0,
            minimal: false,
            stats: SearchStats {
                nodes,
                ms: start.elapsed().as_millis() as u64,
            },
        }
    }

    /// One profile phase. Unbounded configs get a single complete run; under
    /// a node budget the phase runs a doubling restart schedule with
    /// deterministically reseeded candidate orders, which escapes unlucky
    /// prefixes on feasible profiles.
    fn search_profile(
        &self,
        config: &SolverConfig,
        deadline: Option<Instant>,
        profile: (usize, usize),
    ) -> (SearchResult, u64, Option<Vec<Block>>) {
        let time_left = |spent_all: &mut SearchResult| -> Option<Option<Duration>> {
            match deadline {
                None => Some(None),
                Some(d) => {
                    let now = Instant::now();
                    if now >= d {
                        *spent_all = SearchResult::Budget;
                        None
                    } else {
                        Some(Some(d - now))
                    }
                }
            }
        };
        let Some(total) = config.node_limit else {
            let mut status = SearchResult::Exhausted;
            let Some(limit) = time_left(&mut status) else {
                return (SearchResult::Budget, 0, None);
            };
            let mut engine = Engine::new(
                self,
                &SolverConfig {
                    time_limit: limit,
                    ..config.clone()
                },
            );
            let r = engine.search(None, Some(profile));
            return (r, engine.nodes, engine.solution.take());
        };

        let mut spent = 0u64;
        let mut budget = (total / 8).clamp(10_000, total.max(1));
        let mut restart = 0u64;
        loop {
            let mut status = SearchResult::Budget;
            let Some(limit) = time_left(&mut status) else {
                return (status, spent, None);
            };
            let run_cfg = SolverConfig {
                node_limit: Some(budget.min(total - spent)),
                time_limit: limit,
                thread_count: 1,
                seed: config
                    .seed
                    .wrapping_add(restart.wrapping_mul(0x9E37_79B9_7F4A_7C15)),
            };
            let mut engine = Engine::new(self, &run_cfg);
            let r = engine.search(None, Some(profile));
            spent += engine.nodes;
            match r {
                SearchResult::Found => return (r, spent, engine.solution.take()),
                SearchResult::Exhausted => return (r, spent, None),
                SearchResult::Budget => {
                    if spent >= total {
                        return (SearchResult::Budget, spent, None);
                    }
                }
            }
            restart += 1;
            budget = budget.saturating_mul(2);
        }
    }

    fn solve_minimum_deepening(
        &self,
        config: &SolverConfig,
        demand: u64,
        start: Instant,
    ) -> CoverOutcome {
        let max_edges = self
            .block_sizes
            .iter()
            .map(|&s| s * (s - 1) / 2)
            .max()
            .expect("sizes non-empty") as u64;
        let mut nodes = 0;
        let mut all_lower_exhausted = true;
        let mut budget = demand.div_ceil(max_edges) as usize;
        loop {
            let mut engine = Engine::new(self, config);
            let result = engine.search(Some(budget), None);
            nodes += engine.nodes;
            match result {
                SearchResult::Found => {
                    let blocks = engine.solution.expect("found implies solution");
                    let count = blocks.len();
                    return CoverOutcome {
                        status: CoverStatus::Feasible,
                        blocks: Some(blocks),
                        block_count: count,
                        minimal: all_lower_exhausted,
                        stats: SearchStats {
                            nodes,
                            ms: start.elapsed().as_millis() as u64,
                        },
                    };
                }
                SearchResult::Exhausted => {}
                SearchResult::Budget => all_lower_exhausted = false,
            }
            if budget as u64 >= demand / 3 {
                // no block covers fewer than 3 demand units; nothing can fit
                return CoverOutcome {
                    status: if all_lower_exhausted {
                        CoverStatus::Infeasible
                    } else {
                        CoverStatus::TimedOut
                    },
                    blocks: None,
                    block_count: 0,
                    minimal: false,
                    stats: SearchStats {
                        nodes,
                        ms: start.elapsed().as_millis() as u64,
                    },
                };
            }
            budget += 1;
        }
    }

    /// Independent coverage checker; shares no state with the search engine.
    pub fn verify_cover(&self, blocks: &[Block]) -> CoverageReport {
        let spec = self.spec();
        let mut coverage = vec![0u32; spec.edge_count()];
        let mut defects = Vec::new();
        for block in blocks {
            let mut in_range = true;
            for &v in block.vertices() {
                if v < 1 || v > self.order {
                    defects.push(CoverDefect::VertexOutOfRange {
                        block: block.clone(),
                        vertex: v,
                    });
                    in_range = false;
                }
            }
            if !in_range {
                continue;
            }
            for pair in block.edges() {
                if self.removed_edges.contains(&pair) {
                    defects.push(CoverDefect::RemovedEdgeTouched {
                        block: block.clone(),
                        edge: pair,
                    });
                }
                let idx = spec.edge_index(pair).expect("in range") as usize - 1;
                coverage[idx] += 1;
            }
        }
        for (idx0, &got) in coverage.iter().enumerate() {
            let pair = spec.edge_at(idx0 as u32 + 1).expect("in range");
            let want = self.multiplicity(idx0 as u32 + 1);
            if got < want {
                defects.push(CoverDefect::Uncovered {
                    edge: pair,
                    want,
                    got,
                });
            } else if got > want {
                defects.push(CoverDefect::Overcovered {
                    edge: pair,
                    want,
                    got,
                });
            }
        }
        CoverageReport {
            exact: defects.is_empty(),
            coverage,
            defects,
        }
    }

    /// Maximum number of disjoint blocks fitting under the demand (packing
    /// mode): every edge covered at most its multiplicity.
    pub fn solve_max_packing(&self, config: &SolverConfig) -> PackingOutcome {
        let start = Instant::now();
        let mut engine = Engine::new(self, config);
        engine.max_packing();
        PackingOutcome {
            complete: engine.budget_hit == BudgetHit::None,
            block_count: engine.best_packing.as_ref().map_or(0, Vec::len),
            blocks: engine
                .best_packing
                .take()
                .map(|ids| engine.ids_to_blocks(&ids))
                .unwrap_or_default(),
            stats: SearchStats {
                nodes: engine.nodes,
                ms: start.elapsed().as_millis() as u64,
            },
        }
    }
}

/// Exact decomposition of an arbitrary small host graph into `size`-cliques.
/// The host's non-edges are removed from the complete graph on the same
/// vertices; block labels in the outcome are 1-based.
pub fn solve_graph_decomposition(
    host: &SmallGraph,
    size: usize,
    config: &SolverConfig,
) -> Result<CoverOutcome, InstanceError> {
    let order = host.order() as u32;
    let non_edges = host.complement().one_based_edges();
    let instance = CoverInstance::new(order, &[size])?.with_removed_edges(&non_edges)?;
    Ok(instance.solve_exact(config))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SolverConfig {
    /// Search-node budget; `None` means unbounded.
    pub node_limit: Option<u64>,
    /// Wall-clock budget; `None` means unbounded.
    pub time_limit: Option<Duration>,
    /// Worker fan-out for exhaustive searches without limits. Limited runs
    /// stay sequential so outcomes do not depend on the thread count.
    pub thread_count: usize,
    /// Seed for candidate-order shuffling; 0 keeps the (size, lex) order.
    pub seed: u64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            node_limit: None,
            time_limit: None,
            thread_count: 1,
            seed: 0,
        }
    }
}

impl SolverConfig {
    pub fn with_node_limit(mut self, limit: u64) -> Self {
        self.node_limit = Some(limit);
        self
    }

    pub fn with_time_limit(mut self, limit: Duration) -> Self {
        self.time_limit = Some(limit);
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CoverStatus {
    Feasible,
    Infeasible,
    TimedOut,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct SearchStats {
    pub nodes: u64,
    pub ms: u64,
}

/// Solver verdict. `blocks` is present exactly when feasible; `minimal` is
/// set only when no solution with fewer blocks exists, certified by exhausted
/// search below the returned count.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoverOutcome {
    pub status: CoverStatus,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub blocks: Option<Vec<Block>>,
    pub block_count: usize,
    pub minimal: bool,
    #[serde(flatten)]
    pub stats: SearchStats,
}

impl CoverOutcome {
    pub fn is_feasible(&self) -> bool {
        self.status == CoverStatus::Feasible
    }

    pub fn is_infeasible(&self) -> bool {
        self.status == CoverStatus::Infeasible
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PackingOutcome {
    /// False when a limit interrupted the search before exhaustion.
    pub complete: bool,
    pub block_count: usize,
    pub blocks: Vec<Block>,
    pub stats: SearchStats,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoverageReport {
    pub exact: bool,
    /// Coverage count per 1-based edge index (entry `i` is edge `i + 1`).
    pub coverage: Vec<u32>,
    pub defects: Vec<CoverDefect>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CoverDefect {
    Uncovered { edge: (u32, u32), want: u32, got: u32 },
    Overcovered { edge: (u32, u32), want: u32, got: u32 },
    RemovedEdgeTouched { block: Block, edge: (u32, u32) },
    VertexOutOfRange { block: Block, vertex: u32 },
}

// ---------------------------------------------------------------------------
// search engine
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum SearchResult {
    Found,
    Exhausted,
    Budget,
}

/// Verdict, node count and solution of one parallel subtree job.
type JobResult = (SearchResult, u64, Option<Vec<Block>>);

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum BudgetHit {
    None,
    Nodes,
    Time,
}

struct Candidate {
    vertices: Vec<u32>,
    size: usize,
    /// 0-based edge ids.
    edges: Vec<u32>,
}

struct Engine {
    cands: Vec<Candidate>,
    /// Candidate ids per 0-based edge id.
    edge_cands: Vec<Vec<u32>>,
    /// Remaining demand per edge.
    residual: Vec<u16>,
    /// Demand-weighted live degree per 1-based vertex (slot 0 unused).
    vertex_deg: Vec<u32>,
    /// Endpoints per edge id.
    endpoints: Vec<(u32, u32)>,
    /// Whether a vertex degree value is expressible by the size set.
    representable: Vec<bool>,
    /// Count of a candidate's edges that hit zero residual.
    dead_edges: Vec<u16>,
    used: Vec<bool>,
    /// Alive candidates per edge.
    live_count: Vec<u32>,
    /// Remaining total demand.
    remaining: u64,
    /// Per-degree bounds on the number of triples/quads at a vertex, from
    /// 2a + 3b = d. Empty unless both sizes 3 and 4 are allowed.
    amin: Vec<u32>,
    amax: Vec<u32>,
    sum_amin: i64,
    sum_amax: i64,
    /// Applied candidate ids, in order.
    chosen: Vec<u32>,
    solution: Option<Vec<Block>>,
    nodes: u64,
    node_limit: Option<u64>,
    deadline: Option<Instant>,
    budget_hit: BudgetHit,
    best_packing: Option<Vec<u32>>,
    has_size: [bool; 2], // [triples, quads] for the profile prune
    /// Most and fewest edges any allowed block covers.
    max_block_edges: u64,
    min_block_edges: u64,
}

impl Engine {
    fn new(instance: &CoverInstance, config: &SolverConfig) -> Self {
        let spec = instance.spec();
        let num_edges = spec.edge_count();
        let mut cands_raw = instance.build_candidates();
        if config.seed != 0 {
            let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
            cands_raw.shuffle(&mut rng);
        }
        let cands: Vec<Candidate> = cands_raw
            .into_iter()
            .map(|(block, idxs)| Candidate {
                size: block.size(),
                vertices: block.vertices().to_vec(),
                edges: idxs.into_iter().map(|i| i - 1).collect(),
            })
            .collect();

        let mut residual = Vec::with_capacity(num_edges);
        let mut vertex_deg = vec![0u32; instance.order as usize + 1];
        let mut endpoints = Vec::with_capacity(num_edges);
        let mut remaining = 0u64;
        for idx in 1..=num_edges as u32 {
            let mult = instance.multiplicity(idx) as u16;
            let pair = spec.edge_at(idx).expect("in range");
            residual.push(mult);
            endpoints.push(pair);
            vertex_deg[pair.0 as usize] += u32::from(mult);
            vertex_deg[pair.1 as usize] += u32::from(mult);
            remaining += u64::from(mult);
        }

        let mut edge_cands = vec![Vec::new(); num_edges];
        for (id, cand) in cands.iter().enumerate() {
            for &e in &cand.edges {
                edge_cands[e as usize].push(id as u32);
            }
        }
        // branch larger blocks first: more demand retired per decision
        for list in &mut edge_cands {
            list.sort_by(|&a, &b| {
                let (ca, cb) = (&cands[a as usize], &cands[b as usize]);
                cb.size.cmp(&ca.size).then(a.cmp(&b))
            });
        }

        // a candidate whose edge starts at zero demand is dead from the start
        let mut dead_edges = vec![0u16; cands.len()];
        for (id, cand) in cands.iter().enumerate() {
            dead_edges[id] = cand.edges.iter().filter(|&&e| residual[e as usize] == 0).count() as u16;
        }
        let mut live_count = vec![0u32; num_edges];
        for (id, cand) in cands.iter().enumerate() {
            if dead_edges[id] == 0 {
                for &e in &cand.edges {
                    live_count[e as usize] += 1;
                }
            }
        }

        // degree representability by sums of (size - 1) contributions
        let max_deg = vertex_deg.iter().copied().max().unwrap_or(0) as usize;
        let mut representable = vec![false; max_deg + 1];
        representable[0] = true;
        for d in 1..=max_deg {
            representable[d] = instance
                .block_sizes
                .iter()
                .any(|&s| d >= s - 1 && representable[d - (s - 1)]);
        }

        // with sizes {3,4}: triples at a degree-d vertex satisfy a = 2d mod 3
        // up to floor(d/2), stepping by 3 (2a + 3b = d)
        let both = instance.block_sizes.contains(&3) && instance.block_sizes.contains(&4);
        let (mut amin, mut amax) = (Vec::new(), Vec::new());
        let (mut sum_amin, mut sum_amax) = (0i64, 0i64);
        if both {
            amin = vec![0u32; max_deg + 1];
            amax = vec![0u32; max_deg + 1];
            for d in 0..=max_deg {
                let lo = (2 * d) % 3;
                if lo <= d / 2 {
                    amin[d] = lo as u32;
                    amax[d] = (lo + (d / 2 - lo) / 3 * 3) as u32;
                }
            }
            for &d in vertex_deg.iter().skip(1) {
                sum_amin += i64::from(amin[d as usize]);
                sum_amax += i64::from(amax[d as usize]);
            }
        }

        Engine {
            has_size: [
                instance.block_sizes.contains(&3),
                instance.block_sizes.contains(&4),
            ],
            max_block_edges: instance
                .block_sizes
                .iter()
                .map(|&s| (s * (s - 1) / 2) as u64)
                .max()
                .expect("sizes non-empty"),
            min_block_edges: instance
                .block_sizes
                .iter()
                .map(|&s| (s * (s - 1) / 2) as u64)
                .min()
                .expect("sizes non-empty"),
            cands,
            edge_cands,
            residual,
            vertex_deg,
            endpoints,
            representable,
            dead_edges,
            used: vec![false; 0],
            live_count,
            remaining,
            amin,
            amax,
            sum_amin,
            sum_amax,
            chosen: Vec::new(),
            solution: None,
            nodes: 0,
            node_limit: config.node_limit,
            deadline: config.time_limit.map(|t| Instant::now() + t),
            budget_hit: BudgetHit::None,
            best_packing: None,
        }
        .finish_init()
    }

    fn finish_init(mut self) -> Self {
        self.used = vec![false; self.cands.len()];
        self
    }

    fn ids_to_blocks(&self, ids: &[u32]) -> Vec<Block> {
        let mut blocks: Vec<Block> = ids
            .iter()
            .map(|&id| Block::new(self.cands[id as usize].vertices.clone()).expect("valid block"))
            .collect();
        blocks.sort_by(|a, b| a.size().cmp(&b.size()).then_with(|| a.cmp(b)));
        blocks
    }

    fn over_budget(&mut self) -> bool {
        if self.budget_hit != BudgetHit::None {
            return true;
        }
        if let Some(limit) = self.node_limit {
            if self.nodes >= limit {
                self.budget_hit = BudgetHit::Nodes;
                return true;
            }
        }
        if let Some(deadline) = self.deadline {
            if self.nodes.is_multiple_of(1024) && Instant::now() >= deadline {
                self.budget_hit = BudgetHit::Time;
                return true;
            }
        }
        false
    }

    fn alive(&self, cand: u32) -> bool {
        self.dead_edges[cand as usize] == 0 && !self.used[cand as usize]
    }

    fn bump_vertex_deg(&mut self, vertex: u32, delta: i32) {
        let slot = &mut self.vertex_deg[vertex as usize];
        let old = *slot as usize;
        *slot = slot.wrapping_add_signed(delta);
        if !self.amin.is_empty() {
            let new = *slot as usize;
            self.sum_amin += i64::from(self.amin[new]) - i64::from(self.amin[old]);
            self.sum_amax += i64::from(self.amax[new]) - i64::from(self.amax[old]);
        }
    }

    fn apply(&mut self, cand_id: u32) {
        self.nodes += 1;
        let id = cand_id as usize;
        debug_assert!(self.alive(cand_id));
        for k in 0..self.cands[id].edges.len() {
            let e = self.cands[id].edges[k] as usize;
            self.live_count[e] -= 1;
        }
        self.used[id] = true;
        for k in 0..self.cands[id].edges.len() {
            let e = self.cands[id].edges[k] as usize;
            self.residual[e] -= 1;
            self.remaining -= 1;
            let (a, b) = self.endpoints[e];
            self.bump_vertex_deg(a, -1);
            self.bump_vertex_deg(b, -1);
            if self.residual[e] == 0 {
                for j in 0..self.edge_cands[e].len() {
                    let c = self.edge_cands[e][j] as usize;
                    self.dead_edges[c] += 1;
                    if self.dead_edges[c] == 1 && !self.used[c] {
                        for m in 0..self.cands[c].edges.len() {
                            let f = self.cands[c].edges[m] as usize;
                            self.live_count[f] -= 1;
                        }
                    }
                }
            }
        }
        self.chosen.push(cand_id);
    }

    fn undo(&mut self, cand_id: u32) {
        let popped = self.chosen.pop();
        debug_assert_eq!(popped, Some(cand_id));
        let id = cand_id as usize;
        for k in (0..self.cands[id].edges.len()).rev() {
            let e = self.cands[id].edges[k] as usize;
            if self.residual[e] == 0 {
                for j in (0..self.edge_cands[e].len()).rev() {
                    let c = self.edge_cands[e][j] as usize;
                    if self.dead_edges[c] == 1 && !self.used[c] {
                        for m in 0..self.cands[c].edges.len() {
                            let f = self.cands[c].edges[m] as usize;
                            self.live_count[f] += 1;
                        }
                    }
                    self.dead_edges[c] -= 1;
                }
            }
            self.residual[e] += 1;
            self.remaining += 1;
            let (a, b) = self.endpoints[e];
            self.bump_vertex_deg(a, 1);
            self.bump_vertex_deg(b, 1);
        }
        self.used[id] = false;
        for k in 0..self.cands[id].edges.len() {
            let e = self.cands[id].edges[k] as usize;
            self.live_count[e] += 1;
        }
    }

    /// Nonviable iff some live vertex degree is not a sum of (size-1) parts.
    fn degrees_ok(&self) -> bool {
        self.vertex_deg
            .iter()
            .all(|&d| self.representable[d as usize])
    }

    /// For sizes within {3,4}: can the remaining demand be met with at most
    /// `rem3` triples and `rem4` quads used from here on?
    fn profile_ok(&self, rem3: usize, rem4: usize) -> bool {
        let r = self.remaining;
        if !r.is_multiple_of(3) {
            return false;
        }
        let parity = if r % 6 == 3 { 1u64 } else { 0 };
        // smallest admissible triple count with the right parity
        let mut lo = parity;
        if 6 * (rem4 as u64) < r {
            let need = (r - 6 * rem4 as u64).div_ceil(3);
            lo = if need % 2 == parity { need } else { need + 1 };
        }
        let hi = (rem3 as u64).min(r / 3);
        if lo > hi || !(r - 3 * lo).is_multiple_of(6) {
            return false;
        }
        if !self.amin.is_empty() {
            // triples occupy 3 vertex slots each; per-vertex slot counts are
            // pinned to an interval by 2a + 3b = degree
            let t = 3 * rem3 as i64;
            if t < self.sum_amin || t > self.sum_amax {
                return false;
            }
        }
        true
    }

    fn count_used_by_size(&self) -> (usize, usize) {
        let mut t = 0;
        let mut q = 0;
        for &id in &self.chosen {
            match self.cands[id as usize].size {
                3 => t += 1,
                4 => q += 1,
                _ => {}
            }
        }
        (t, q)
    }

    /// Branch-edge choice: fewest live candidates, tie-break lowest edge id.
    fn select_edge(&self) -> Option<usize> {
        let mut best: Option<(u32, usize)> = None;
        for e in 0..self.residual.len() {
            if self.residual[e] == 0 {
                continue;
            }
            let lc = self.live_count[e];
            match best {
                Some((c, _)) if c <= lc => {}
                _ => best = Some((lc, e)),
            }
            if lc == 0 {
                break;
            }
        }
        best.map(|(_, e)| e)
    }

    /// Exhaustive DFS. `max_blocks` caps the solution size; `profile` fixes
    /// exact (triple, quad) budgets. Returns Found with `self.solution` set,
    /// Exhausted, or Budget.
    fn search(
        &mut self,
        max_blocks: Option<usize>,
        profile: Option<(usize, usize)>,
    ) -> SearchResult {
        if let Some((t, q)) = profile {
            if !self.has_size[0] && t > 0 || !self.has_size[1] && q > 0 {
                return SearchResult::Exhausted;
            }
        }
        self.dfs(max_blocks, profile)
    }

    fn dfs(&mut self, max_blocks: Option<usize>, profile: Option<(usize, usize)>) -> SearchResult {
        if self.over_budget() {
            return SearchResult::Budget;
        }
        if !self.degrees_ok() {
            return SearchResult::Exhausted;
        }
        if let Some(limit) = max_blocks {
            let lower = self.remaining.div_ceil(self.max_block_edges) as usize;
            if self.chosen.len() + lower > limit {
                return SearchResult::Exhausted;
            }
        }
        let (rem3, rem4) = if let Some((t, q)) = profile {
            let (used3, used4) = self.count_used_by_size();
            if used3 > t || used4 > q {
                return SearchResult::Exhausted;
            }
            let (rem3, rem4) = (t - used3, q - used4);
            if !self.profile_ok(rem3, rem4) {
                return SearchResult::Exhausted;
            }
            (rem3, rem4)
        } else {
            (usize::MAX, usize::MAX)
        };

        let Some(edge) = self.select_edge() else {
            // no live edge: every demand met
            self.solution = Some(self.ids_to_blocks(&self.chosen.clone()));
            return SearchResult::Found;
        };
        if self.live_count[edge] == 0 {
            return SearchResult::Exhausted;
        }

        let branch: Vec<u32> = self.edge_cands[edge]
            .iter()
            .copied()
            .filter(|&c| self.alive(c))
            .filter(|&c| match self.cands[c as usize].size {
                3 => rem3 > 0,
                4 => rem4 > 0,
                _ => true,
            })
            .collect();
        for cand in branch {
            self.apply(cand);
            let res = self.dfs(max_blocks, profile);
            match res {
                SearchResult::Found | SearchResult::Budget => {
                    self.undo(cand);
                    return res;
                }
                SearchResult::Exhausted => self.undo(cand),
            }
        }
        SearchResult::Exhausted
    }

    /// Splits the first two branching levels into independent jobs and merges
    /// results in branch order, reproducing the sequential verdict.
    fn search_parallel(&mut self, instance: &CoverInstance, config: &SolverConfig) -> SearchResult {
        if !self.degrees_ok() {
            return SearchResult::Exhausted;
        }
        let Some(edge) = self.select_edge() else {
            self.solution = Some(Vec::new());
            return SearchResult::Found;
        };
        let firsts: Vec<u32> = self.edge_cands[edge]
            .iter()
            .copied()
            .filter(|&c| self.alive(c))
            .collect();
        // prefix jobs: (first choice, optional second choice)
        let mut jobs: Vec<(u32, Option<u32>)> = Vec::new();
        for &c1 in &firsts {
            self.apply(c1);
            if self.degrees_ok() {
                if let Some(edge2) = self.select_edge() {
                    let seconds: Vec<u32> = self.edge_cands[edge2]
                        .iter()
                        .copied()
                        .filter(|&c| self.alive(c))
                        .collect();
                    if seconds.is_empty() {
                        // dead subtree; keep a marker job so merge order is stable
                        jobs.push((c1, None));
                    } else {
                        for c2 in seconds {
                            jobs.push((c1, Some(c2)));
                        }
                    }
                } else {
                    jobs.push((c1, None));
                }
            } else {
                jobs.push((c1, None));
            }
            self.undo(c1);
        }

        let threads = config.thread_count.max(1);
        let results: Vec<JobResult> = std::thread::scope(|scope| {
            let mut handles = Vec::new();
            for chunk_start in 0..threads {
                let jobs = &jobs;
                handles.push(scope.spawn(move || {
                    let mut out = Vec::new();
                    let mut i = chunk_start;
                    while i < jobs.len() {
                        let (c1, c2) = jobs[i];
                        let mut engine = Engine::new(instance, config);
                        engine.apply(c1);
                        let res = if let Some(c2) = c2 {
                            if engine.alive(c2) && engine.degrees_ok() {
                                engine.apply(c2);
                                engine.dfs(None, None)
                            } else {
                                SearchResult::Exhausted
                            }
                        } else {
                            engine.dfs(None, None)
                        };
                        out.push((i, (res, engine.nodes, engine.solution.take())));
                        i += threads;
                    }
                    out
                }));
            }
            let mut merged: Vec<Option<JobResult>> = vec![None; jobs.len()];
            for handle in handles {
                for (i, r) in handle.join().expect("worker panicked") {
                    merged[i] = Some(r);
                }
            }
            merged.into_iter().map(|r| r.expect("all jobs ran")).collect()
        });

        // merge in job order: the first feasible subtree wins, exactly as the
        // sequential search would have reached it
        for (res, nodes, solution) in results {
            self.nodes += nodes;
            match res {
                SearchResult::Found => {
                    self.solution = solution;
                    return SearchResult::Found;
                }
                SearchResult::Budget => return SearchResult::Budget,
                SearchResult::Exhausted => {}
            }
        }
        SearchResult::Exhausted
    }

    fn outcome(&mut self, result: SearchResult, minimal: bool, start: Instant) -> CoverOutcome {
        let stats = SearchStats {
            nodes: self.nodes,
            ms: start.elapsed().as_millis() as u64,
        };
        match result {
            SearchResult::Found => {
                let blocks = self.solution.take().expect("found implies solution");
                CoverOutcome {
                    status: CoverStatus::Feasible,
                    block_count: blocks.len(),
                    blocks: Some(blocks),
                    minimal,
                    stats,
                }
            }
            SearchResult::Exhausted => CoverOutcome {
                status: CoverStatus::Infeasible,
                blocks: None,
                block_count: 0,
                minimal: false,
                stats,
            },
            SearchResult::Budget => CoverOutcome {
                status: CoverStatus::TimedOut,
                blocks: None,
                block_count: 0,
                minimal: false,
                stats,
            },
        }
    }

    /// Branch-and-bound packing: each edge may be covered or conceded.
    fn max_packing(&mut self) {
        let mut conceded = vec![false; self.residual.len()];
        let mut best: Vec<u32> = Vec::new();
        self.packing_dfs(&mut conceded, &mut best);
        self.best_packing = Some(best);
    }

    fn packing_dfs(&mut self, conceded: &mut [bool], best: &mut Vec<u32>) {
        self.nodes += 1;
        if self.over_budget() {
            return;
        }
        // coverable demand still on the table
        let open: u64 = (0..self.residual.len())
            .filter(|&e| !conceded[e])
            .map(|e| u64::from(self.residual[e]))
            .sum();
        if self.chosen.len() as u64 + open / self.min_block_edges <= best.len() as u64 {
            return;
        }
        let edge = (0..self.residual.len())
            .find(|&e| !conceded[e] && self.residual[e] > 0 && self.live_count[e] > 0);
        let Some(edge) = edge else {
            if self.chosen.len() > best.len() {
                *best = self.chosen.clone();
            }
            return;
        };
        let branch: Vec<u32> = self.edge_cands[edge]
            .iter()
            .copied()
            .filter(|&c| self.alive(c))
            .collect();
        for cand in branch {
            self.apply(cand);
            self.packing_dfs(conceded, best);
            self.undo(cand);
        }
        conceded[edge] = true;
        self.packing_dfs(conceded, best);
        conceded[edge] = false;
    }
}
