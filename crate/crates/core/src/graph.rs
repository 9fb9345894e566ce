//! Complete-graph bookkeeping, clique blocks and small explicit graphs.
//!
//! Two vertex conventions coexist on purpose: complete-graph instances and
//! blocks are 1-based (matching the solver's edge-index convention and the
//! published decomposition tables), while [`SmallGraph`] is 0-based (matching
//! graph6 and `showg` output). [`SmallGraph::from_one_based_edges`] and
//! [`SmallGraph::one_based_edges`] are the explicit bridge between the two.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Largest order representable with a single-byte graph6 header.
pub const GRAPH6_MAX_ORDER: usize = 62;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GraphError {
    #[error("vertex {vertex} out of range 1..={order}")]
    VertexOutOfRange { vertex: u32, order: u32 },
    #[error("edge endpoints must differ, got ({0}, {0})")]
    LoopEdge(u32),
    #[error("block size {size} out of range 3..={max}")]
    BlockSizeOutOfRange { size: usize, max: usize },
    #[error("block vertices must be strictly increasing: {0:?}")]
    BlockNotIncreasing(Vec<u32>),
    #[error("graph order {0} outside supported range 1..=62")]
    OrderOutOfRange(usize),
    #[error("graph6: empty input")]
    Graph6Empty,
    #[error("graph6: multi-byte order headers (n > 62) are not supported")]
    Graph6LongOrder,
    #[error("graph6: byte {byte:#04x} at position {pos} outside the graph6 alphabet")]
    Graph6BadByte { byte: u8, pos: usize },
    #[error("graph6: expected {expected} bytes for order {order}, got {got}")]
    Graph6BadLength {
        order: usize,
        expected: usize,
        got: usize,
    },
    #[error("graph6: nonzero padding bits")]
    Graph6BadPadding,
}

/// The complete graph K_v with vertices labeled 1..=v and edges numbered
/// 1..=v(v-1)/2 in lexicographic order of (min, max).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CompleteGraphSpec {
    order: u32,
}

impl CompleteGraphSpec {
    pub fn new(order: u32) -> Result<Self, GraphError> {
        if order == 0 {
            return Err(GraphError::VertexOutOfRange { vertex: 0, order });
        }
        Ok(Self { order })
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    /// Number of edges, v(v-1)/2.
    pub fn edge_count(&self) -> usize {
        let v = self.order as usize;
        v * (v - 1) / 2
    }

    /// 1-based position of the pair in the lexicographic edge list.
    /// The pair is normalized first; both orientations address the same edge.
    pub fn edge_index(&self, pair: (u32, u32)) -> Result<u32, GraphError> {
        let (a, b) = normalize_pair(pair, self.order)?;
        let v = self.order as u64;
        let (a, b) = (a as u64, b as u64);
        Ok(((a - 1) * (2 * v - a) / 2 + (b - a)) as u32)
    }

    /// Inverse of [`edge_index`](Self::edge_index).
    pub fn edge_at(&self, index: u32) -> Result<(u32, u32), GraphError> {
        if index == 0 || index as usize > self.edge_count() {
            return Err(GraphError::VertexOutOfRange {
                vertex: index,
                order: self.order,
            });
        }
        let mut rest = index;
        for a in 1..self.order {
            let row = self.order - a;
            if rest <= row {
                return Ok((a, a + rest));
            }
            rest -= row;
        }
        unreachable!("index validated above")
    }

    /// All edges in lexicographic order.
    pub fn edges(&self) -> Vec<(u32, u32)> {
        let mut out = Vec::with_capacity(self.edge_count());
        for a in 1..=self.order {
            for b in (a + 1)..=self.order {
                out.push((a, b));
            }
        }
        out
    }

    /// All strictly increasing `size`-tuples of vertices, in lexicographic
    /// order.
    pub fn enumerate_blocks(&self, size: usize) -> Result<Vec<Block>, GraphError> {
        if size < 3 || size > self.order as usize {
            return Err(GraphError::BlockSizeOutOfRange {
                size,
                max: self.order as usize,
            });
        }
        let mut out = Vec::new();
        let mut cur = Vec::with_capacity(size);
        fn rec(out: &mut Vec<Block>, cur: &mut Vec<u32>, start: u32, order: u32, size: usize) {
            if cur.len() == size {
                out.push(Block {
                    vertices: cur.clone(),
                });
                return;
            }
            let remaining = (size - cur.len()) as u32;
            for v in start..=(order + 1 - remaining) {
                cur.push(v);
                rec(out, cur, v + 1, order, size);
                cur.pop();
            }
        }
        rec(&mut out, &mut cur, 1, self.order, size);
        Ok(out)
    }
}

fn normalize_pair(pair: (u32, u32), order: u32) -> Result<(u32, u32), GraphError> {
    let (mut a, mut b) = pair;
    if a == b {
        return Err(GraphError::LoopEdge(a));
    }
    if a > b {
        std::mem::swap(&mut a, &mut b);
    }
    if a < 1 || b > order {
        let bad = if a < 1 { a } else { b };
        return Err(GraphError::VertexOutOfRange { vertex: bad, order });
    }
    Ok((a, b))
}

/// A clique block: a strictly increasing tuple of 1-based vertex ids.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Block {
    vertices: Vec<u32>,
}

impl Block {
    pub fn new(mut vertices: Vec<u32>) -> Result<Self, GraphError> {
        if vertices.len() < 3 {
            return Err(GraphError::BlockSizeOutOfRange {
                size: vertices.len(),
                max: usize::MAX,
            });
        }
        let sorted = vertices.windows(2).all(|w| w[0] < w[1]);
        if !sorted {
            vertices.sort_unstable();
            if !vertices.windows(2).all(|w| w[0] < w[1]) {
                return Err(GraphError::BlockNotIncreasing(vertices));
            }
        }
        Ok(Self { vertices })
    }

    pub fn vertices(&self) -> &[u32] {
        &self.vertices
    }

    pub fn size(&self) -> usize {
        self.vertices.len()
    }

    /// The C(k,2) unordered pairs within the block, lexicographic.
    pub fn edges(&self) -> Vec<(u32, u32)> {
        let k = self.vertices.len();
        let mut out = Vec::with_capacity(k * (k - 1) / 2);
        for i in 0..k {
            for j in (i + 1)..k {
                out.push((self.vertices[i], self.vertices[j]));
            }
        }
        out
    }

    pub fn contains(&self, vertex: u32) -> bool {
        self.vertices.contains(&vertex)
    }
}

impl fmt::Display for Block {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.vertices.iter().map(|v| v.to_string()).collect();
        write!(f, "{}", parts.join(" "))
    }
}

/// An explicit simple graph on at most 62 vertices, 0-based, stored as
/// per-vertex adjacency bitmasks. Isolated vertices are part of the order.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SmallGraph {
    order: usize,
    adj: Vec<u64>,
}

impl SmallGraph {
    /// The empty graph on `order` vertices.
    pub fn empty(order: usize) -> Result<Self, GraphError> {
        if order == 0 || order > GRAPH6_MAX_ORDER {
            return Err(GraphError::OrderOutOfRange(order));
        }
        Ok(Self {
            order,
            adj: vec![0; order],
        })
    }

    pub fn from_edges(order: usize, edges: &[(usize, usize)]) -> Result<Self, GraphError> {
        let mut g = Self::empty(order)?;
        for &(a, b) in edges {
            g.add_edge(a, b)?;
        }
        Ok(g)
    }

    /// Builds from 1-based pairs, shifting to the 0-based convention.
    pub fn from_one_based_edges(order: usize, edges: &[(u32, u32)]) -> Result<Self, GraphError> {
        let shifted: Vec<(usize, usize)> = edges
            .iter()
            .map(|&(a, b)| {
                if a == 0 || b == 0 {
                    Err(GraphError::VertexOutOfRange {
                        vertex: 0,
                        order: order as u32,
                    })
                } else {
                    Ok((a as usize - 1, b as usize - 1))
                }
            })
            .collect::<Result<_, _>>()?;
        Self::from_edges(order, &shifted)
    }

    pub fn add_edge(&mut self, a: usize, b: usize) -> Result<(), GraphError> {
        if a == b {
            return Err(GraphError::LoopEdge(a as u32));
        }
        if a >= self.order || b >= self.order {
            return Err(GraphError::VertexOutOfRange {
                vertex: a.max(b) as u32,
                order: self.order as u32,
            });
        }
        self.adj[a] |= 1 << b;
        self.adj[b] |= 1 << a;
        Ok(())
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        a < self.order && b < self.order && self.adj[a] >> b & 1 == 1
    }

    /// Neighbor bitmask of `v`.
    pub fn neighbors(&self, v: usize) -> u64 {
        self.adj[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].count_ones() as usize
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(|m| m.count_ones() as usize).sum::<usize>() / 2
    }

    /// Edges as sorted 0-based pairs.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::with_capacity(self.edge_count());
        for a in 0..self.order {
            let mut m = self.adj[a] >> (a + 1) << (a + 1);
            while m != 0 {
                let b = m.trailing_zeros() as usize;
                out.push((a, b));
                m &= m - 1;
            }
        }
        out
    }

    /// Edges as sorted 1-based pairs.
    pub fn one_based_edges(&self) -> Vec<(u32, u32)> {
        self.edges()
            .into_iter()
            .map(|(a, b)| (a as u32 + 1, b as u32 + 1))
            .collect()
    }

    /// Complement within the complete graph on the same vertex set.
    pub fn complement(&self) -> SmallGraph {
        let full = (1u64 << self.order) - 1;
        let adj = (0..self.order)
            .map(|v| (full & !self.adj[v]) & !(1 << v))
            .collect();
        SmallGraph {
            order: self.order,
            adj,
        }
    }

    /// Vertex degrees sorted non-increasing.
    pub fn degree_sequence(&self) -> Vec<usize> {
        let mut d: Vec<usize> = (0..self.order).map(|v| self.degree(v)).collect();
        d.sort_unstable_by(|a, b| b.cmp(a));
        d
    }

    /// Applies a vertex permutation: vertex `v` of `self` becomes
    /// `perm[v]` of the result.
    pub fn relabel(&self, perm: &[usize]) -> SmallGraph {
        debug_assert_eq!(perm.len(), self.order);
        let mut g = SmallGraph {
            order: self.order,
            adj: vec![0; self.order],
        };
        for (a, b) in self.edges() {
            let (pa, pb) = (perm[a], perm[b]);
            g.adj[pa] |= 1 << pb;
            g.adj[pb] |= 1 << pa;
        }
        g
    }

    /// Decodes a graph6 string (single-byte order header, n <= 62).
    pub fn from_graph6(text: &str) -> Result<Self, GraphError> {
        let bytes = text.trim_end_matches(['\r', '\n']).as_bytes();
        if bytes.is_empty() {
            return Err(GraphError::Graph6Empty);
        }
        if bytes[0] == b'~' {
            return Err(GraphError::Graph6LongOrder);
        }
        for (pos, &b) in bytes.iter().enumerate() {
            if !(63..=126).contains(&b) {
                return Err(GraphError::Graph6BadByte { byte: b, pos });
            }
        }
        let order = (bytes[0] - 63) as usize;
        if order == 0 || order > GRAPH6_MAX_ORDER {
            return Err(GraphError::OrderOutOfRange(order));
        }
        let nbits = order * (order - 1) / 2;
        let expected = 1 + nbits.div_ceil(6);
        if bytes.len() != expected {
            return Err(GraphError::Graph6BadLength {
                order,
                expected,
                got: bytes.len(),
            });
        }
        let mut g = Self::empty(order)?;
        let mut bit = 0usize;
        'outer: for j in 1..order {
            for i in 0..j {
                let byte = bytes[1 + bit / 6] - 63;
                if byte >> (5 - bit % 6) & 1 == 1 {
                    g.adj[i] |= 1 << j;
                    g.adj[j] |= 1 << i;
                }
                bit += 1;
                if bit == nbits {
                    break 'outer;
                }
            }
        }
        // padding bits beyond nbits must be zero
        let total_bits = (expected - 1) * 6;
        for p in nbits..total_bits {
            let byte = bytes[1 + p / 6] - 63;
            if byte >> (5 - p % 6) & 1 == 1 {
                return Err(GraphError::Graph6BadPadding);
            }
        }
        Ok(g)
    }

    /// Encodes to graph6, bit-exact per the nauty format: single order byte,
    /// then the upper-triangle bits in column order, 6 per byte, offset 63.
    pub fn to_graph6(&self) -> String {
        let order = self.order;
        let nbits = order * (order - 1) / 2;
        let mut out = Vec::with_capacity(1 + nbits.div_ceil(6));
        out.push(order as u8 + 63);
        let mut acc = 0u8;
        let mut fill = 0;
        for j in 1..order {
            for i in 0..j {
                acc = (acc << 1) | (self.adj[i] >> j & 1) as u8;
                fill += 1;
                if fill == 6 {
                    out.push(acc + 63);
                    acc = 0;
                    fill = 0;
                }
            }
        }
        if fill > 0 {
            out.push((acc << (6 - fill)) + 63);
        }
        String::from_utf8(out).expect("graph6 bytes are ASCII")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn edge_index_examples() {
        let k4 = CompleteGraphSpec::new(4).unwrap();
        assert_eq!(k4.edge_index((1, 2)).unwrap(), 1);
        assert_eq!(k4.edge_index((3, 4)).unwrap(), 6);
        let k18 = CompleteGraphSpec::new(18).unwrap();
        assert_eq!(k18.edge_index((1, 2)).unwrap(), 1);
        // enumerate all 10 pairs of K5 lexicographically: (2,4) is sixth
        let k5 = CompleteGraphSpec::new(5).unwrap();
        assert_eq!(k5.edges()[5], (2, 4));
        assert_eq!(k5.edge_index((2, 4)).unwrap(), 6);
        // orientation does not matter
        assert_eq!(k5.edge_index((4, 2)).unwrap(), 6);
    }

    #[test]
    fn edge_index_errors() {
        let k5 = CompleteGraphSpec::new(5).unwrap();
        assert_eq!(k5.edge_index((2, 2)), Err(GraphError::LoopEdge(2)));
        assert!(matches!(
            k5.edge_index((1, 6)),
            Err(GraphError::VertexOutOfRange { vertex: 6, .. })
        ));
        assert!(matches!(
            k5.edge_index((0, 3)),
            Err(GraphError::VertexOutOfRange { vertex: 0, .. })
        ));
    }

    #[test]
    fn edge_index_bijective_up_to_20() {
        for v in 2..=20u32 {
            let spec = CompleteGraphSpec::new(v).unwrap();
            let mut seen = vec![false; spec.edge_count() + 1];
            for a in 1..=v {
                for b in (a + 1)..=v {
                    let idx = spec.edge_index((a, b)).unwrap() as usize;
                    assert!(idx >= 1 && idx <= spec.edge_count());
                    assert!(!seen[idx], "collision at ({a},{b}) in K{v}");
                    seen[idx] = true;
                    assert_eq!(spec.edge_at(idx as u32).unwrap(), (a, b));
                }
            }
            assert!(seen[1..].iter().all(|&s| s));
        }
    }

    #[test]
    fn enumerate_blocks_examples() {
        let k4 = CompleteGraphSpec::new(4).unwrap();
        let blocks = k4.enumerate_blocks(3).unwrap();
        let expect: Vec<Vec<u32>> = vec![
            vec![1, 2, 3],
            vec![1, 2, 4],
            vec![1, 3, 4],
            vec![2, 3, 4],
        ];
        assert_eq!(
            blocks.iter().map(|b| b.vertices().to_vec()).collect::<Vec<_>>(),
            expect
        );

        let k18 = CompleteGraphSpec::new(18).unwrap();
        assert_eq!(k18.enumerate_blocks(4).unwrap().len(), 3060); // C(18,4)

        let k3 = CompleteGraphSpec::new(3).unwrap();
        assert_eq!(k3.enumerate_blocks(3).unwrap().len(), 1);

        assert!(k4.enumerate_blocks(5).is_err());
        assert!(k4.enumerate_blocks(2).is_err());
    }

    #[test]
    fn block_edges_examples() {
        let b = Block::new(vec![1, 2, 3]).unwrap();
        assert_eq!(b.edges(), vec![(1, 2), (1, 3), (2, 3)]);

        let b = Block::new(vec![1, 8, 9, 10]).unwrap();
        assert_eq!(
            b.edges(),
            vec![(1, 8), (1, 9), (1, 10), (8, 9), (8, 10), (9, 10)]
        );

        let b = Block::new(vec![2, 4, 5, 7]).unwrap();
        assert_eq!(b.edges().len(), 6);
    }

    #[test]
    fn block_sorts_input() {
        let b = Block::new(vec![9, 1, 10, 8]).unwrap();
        assert_eq!(b.vertices(), &[1, 8, 9, 10]);
        assert!(Block::new(vec![1, 2, 2]).is_err());
        assert!(Block::new(vec![1, 2]).is_err());
    }

    #[test]
    fn graph6_decode_examples() {
        // first and third even graphs of order 7 and size 6
        let g = SmallGraph::from_graph6("F?`EW").unwrap();
        assert_eq!(g.order(), 7);
        assert_eq!(g.edges(), vec![(0, 4), (0, 6), (1, 5), (1, 6), (4, 6), (5, 6)]);

        let g = SmallGraph::from_graph6("FCQQO").unwrap();
        assert_eq!(g.edges(), vec![(0, 3), (0, 5), (1, 4), (1, 6), (3, 5), (4, 6)]);
    }

    #[test]
    fn graph6_encode_examples() {
        let g = SmallGraph::from_edges(7, &[(0, 4), (0, 6), (1, 5), (1, 6), (4, 6), (5, 6)])
            .unwrap();
        assert_eq!(g.to_graph6(), "F?`EW");

        let k1 = SmallGraph::empty(1).unwrap();
        assert_eq!(k1.to_graph6(), "@");

        // graph 1 of the 6-regular order-11 list; the complete string carries
        // one trailing pad byte beyond the widely-quoted 10-char prefix
        let edges: Vec<(usize, usize)> = vec![
            (0, 5), (0, 6), (0, 7), (0, 8), (0, 9), (0, 10),
            (1, 5), (1, 6), (1, 7), (1, 8), (1, 9), (1, 10),
            (2, 5), (2, 6), (2, 7), (2, 8), (2, 9), (2, 10),
            (3, 5), (3, 6), (3, 7), (3, 8), (3, 9), (3, 10),
            (4, 5), (4, 6), (4, 7), (4, 8), (4, 9), (4, 10),
            (5, 8), (6, 9), (7, 10),
        ];
        let g = SmallGraph::from_edges(11, &edges).unwrap();
        let enc = g.to_graph6();
        assert!(enc.starts_with("J?B~vr{}fq"));
        assert_eq!(enc, "J?B~vr{}fq?");
        assert_eq!(SmallGraph::from_graph6(&enc).unwrap(), g);
    }

    #[test]
    fn graph6_errors() {
        assert_eq!(SmallGraph::from_graph6(""), Err(GraphError::Graph6Empty));
        assert_eq!(
            SmallGraph::from_graph6("~??"),
            Err(GraphError::Graph6LongOrder)
        );
        // bad alphabet byte
        assert!(matches!(
            SmallGraph::from_graph6("F?`E\x20"),
            Err(GraphError::Graph6BadByte { .. })
        ));
        // truncated body
        assert!(matches!(
            SmallGraph::from_graph6("F?`E"),
            Err(GraphError::Graph6BadLength { .. })
        ));
        // n = 2: one bit + 5 padding bits; 'w' = 0b111000 sets padding
        assert_eq!(
            SmallGraph::from_graph6("Aw"),
            Err(GraphError::Graph6BadPadding)
        );
    }

    #[test]
    fn complement_examples() {
        let empty7 = SmallGraph::empty(7).unwrap();
        let k7 = empty7.complement();
        assert_eq!(k7.edge_count(), 21);
        assert_eq!(k7.complement(), empty7);

        let bowtie = SmallGraph::from_graph6("F?`EW").unwrap();
        let comp = bowtie.complement();
        assert_eq!(comp.edge_count(), 15);
        assert_eq!(comp.complement(), bowtie);
    }

    #[test]
    fn degree_sequence_examples() {
        let k4 = SmallGraph::empty(4).unwrap().complement();
        assert_eq!(k4.degree_sequence(), vec![3, 3, 3, 3]);

        // bowtie plus two isolated vertices: incidence counts over the edge
        // list {04,06,15,16,46,56} give one degree-4 hub and four degree-2
        let g = SmallGraph::from_graph6("F?`EW").unwrap();
        assert_eq!(g.degree_sequence(), vec![4, 2, 2, 2, 2, 0, 0]);
    }

    #[test]
    fn one_based_bridge() {
        let g = SmallGraph::from_one_based_edges(4, &[(1, 2), (3, 4)]).unwrap();
        assert_eq!(g.edges(), vec![(0, 1), (2, 3)]);
        assert_eq!(g.one_based_edges(), vec![(1, 2), (3, 4)]);
    }

    fn file_fixture(name: &str) -> String {
        let path = concat!(env!("CARGO_MANIFEST_DIR"), "/../../fixtures");
        std::fs::read_to_string(format!("{path}/{name}")).unwrap()
    }

    #[test]
    fn graph6_round_trip_on_fixture_strings() {
        let mut total = 0;
        for name in [
            "geng_7_6.g6",
            "geng_7_9.g6",
            "geng_7_12.g6",
            "regular_11_6.g6",
        ] {
            for line in file_fixture(name).lines() {
                let g = SmallGraph::from_graph6(line).unwrap();
                assert_eq!(g.to_graph6(), line, "in {name}");
                total += 1;
            }
        }
        assert_eq!(total, 41 + 131 + 131 + 266);
    }

    proptest! {
        #[test]
        fn graph6_round_trip_random(order in 1usize..=20, seed in any::<u64>()) {
            use rand::{Rng, SeedableRng};
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let mut g = SmallGraph::empty(order).unwrap();
            for a in 0..order {
                for b in (a + 1)..order {
                    if rng.gen_bool(0.4) {
                        g.add_edge(a, b).unwrap();
                    }
                }
            }
            let enc = g.to_graph6();
            prop_assert_eq!(SmallGraph::from_graph6(&enc).unwrap(), g);
        }

        #[test]
        fn complement_involution(order in 1usize..=16, seed in any::<u64>()) {
            use rand::{Rng, SeedableRng};
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let mut g = SmallGraph::empty(order).unwrap();
            for a in 0..order {
                for b in (a + 1)..order {
                    if rng.gen_bool(0.5) {
                        g.add_edge(a, b).unwrap();
                    }
                }
            }
            let c = g.complement();
            prop_assert_eq!(c.edge_count() + g.edge_count(), order * (order - 1) / 2);
            prop_assert_eq!(c.complement(), g);
        }
    }
}
