//! Exact `{K3,K4}`-decompositions and coverings of complete graphs.
//!
//! The library has five parts:
//!
//! * [`graph`] — complete-graph bookkeeping (1-based vertices, lexicographic
//!   edge indices), small explicit graphs and bit-exact graph6 I/O.
//! * [`solver`] — an exact-cover backtracking solver over clique blocks with
//!   per-edge multiplicities: feasibility, minimum block count, and proven
//!   infeasibility.
//! * [`enumerate`] — exhaustive generation of pairwise non-isomorphic small
//!   graphs under degree constraints, with canonical labeling.
//! * [`rules`] — closed-form design-theory formulas, counting identities,
//!   Erdős–Gallai graphicality and the heavy/light triple-distribution system.
//! * [`cases`] — the registry of fixed triangle configurations whose removal
//!   from K18/K19 leaves a graph with no K4-decomposition, plus the K19
//!   exhaustive sweeps with checkpoint/resume.

pub mod cases;
pub mod enumerate;
pub mod graph;
pub mod rules;
pub mod solver;

pub use graph::{Block, CompleteGraphSpec, GraphError, SmallGraph};
pub use solver::{CoverInstance, CoverOutcome, CoverStatus, SolverConfig};
