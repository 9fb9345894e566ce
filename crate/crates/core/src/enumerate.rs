//! Exhaustive generation of pairwise non-isomorphic small graphs under degree
//! constraints, with canonical labeling for isomorphism rejection.
//!
//! Canonical form is the lexicographically least upper-triangle bit encoding
//! (graph6 column order) over all vertex permutations, found by prefix-pruned
//! branch and bound. Generation is row by row over the adjacency matrix: the
//! rows chosen so far refine an ordered partition of the not-yet-processed
//! vertices into interchangeable cells, and each new row may select only a
//! prefix of every cell. That keeps one labeling per class reachable while
//! collapsing most of the label symmetry; canonical-form deduplication
//! removes what remains.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::graph::SmallGraph;
use crate::rules;

/// Canonicalization is capped here; the generators stay within it.
pub const MAX_CANON_ORDER: usize = 12;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum EnumerateError {
    #[error("order {0} above the supported bound {1}")]
    OrderTooLarge(usize, usize),
    #[error("degree {degree} impossible on order {order}")]
    BadDegree { order: usize, degree: usize },
    #[error("no {degree}-regular graph of order {order}: odd degree sum")]
    ParityImpossible { order: usize, degree: usize },
    #[error("edge count {edges} exceeds C({order},2)")]
    TooManyEdges { order: usize, edges: usize },
}

/// Permutation-invariant encoding: two graphs have equal canonical forms iff
/// they are isomorphic.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CanonicalForm {
    order: usize,
    code: u128,
}

impl CanonicalForm {
    pub fn order(&self) -> usize {
        self.order
    }

    /// Upper-triangle bits in graph6 column order, first pair at the most
    /// significant position of the C(n,2)-bit code.
    pub fn code(&self) -> u128 {
        self.code
    }

    /// The canonically labeled representative.
    pub fn graph(&self) -> SmallGraph {
        let n = self.order;
        let nbits = n * (n - 1) / 2;
        let mut g = SmallGraph::empty(n).expect("order within bounds");
        let mut bit = 0;
        for j in 1..n {
            for i in 0..j {
                if self.code >> (nbits - 1 - bit) & 1 == 1 {
                    g.add_edge(i, j).expect("valid pair");
                }
                bit += 1;
            }
        }
        g
    }
}

/// Lexicographically least adjacency encoding over all vertex permutations.
pub fn canonical_form(g: &SmallGraph) -> Result<CanonicalForm, EnumerateError> {
    let n = g.order();
    if n > MAX_CANON_ORDER {
        return Err(EnumerateError::OrderTooLarge(n, MAX_CANON_ORDER));
    }
    let adj: Vec<u16> = (0..n).map(|v| g.neighbors(v) as u16).collect();
    if n <= 1 {
        return Ok(CanonicalForm { order: n, code: 0 });
    }
    let nbits = n * (n - 1) / 2;
    let mut best = greedy_code(&adj, n);
    let mut placed = Vec::with_capacity(n);
    canon_dfs(&adj, n, nbits, &mut placed, 0, 0, &mut best);
    Ok(CanonicalForm {
        order: n,
        code: best,
    })
}

/// Canonically labeled copy of `g`.
pub fn canonical_graph(g: &SmallGraph) -> Result<SmallGraph, EnumerateError> {
    Ok(canonical_form(g)?.graph())
}

fn column_bits(adj: &[u16], placed: &[u8], v: u8) -> u16 {
    let mut col = 0u16;
    for &p in placed {
        col = (col << 1) | (adj[v as usize] >> p & 1);
    }
    col
}

fn greedy_code(adj: &[u16], n: usize) -> u128 {
    let mut placed: Vec<u8> = Vec::with_capacity(n);
    let mut code = 0u128;
    for _ in 0..n {
        let mut pick: Option<(u16, u8)> = None;
        for v in 0..n as u8 {
            if placed.contains(&v) {
                continue;
            }
            let col = column_bits(adj, &placed, v);
            if pick.is_none_or(|(c, _)| col < c) {
                pick = Some((col, v));
            }
        }
        let (col, v) = pick.expect("some vertex unplaced");
        code = (code << placed.len()) | u128::from(col);
        placed.push(v);
    }
    code
}

fn canon_dfs(
    adj: &[u16],
    n: usize,
    nbits: usize,
    placed: &mut Vec<u8>,
    prefix: u128,
    bits: usize,
    best: &mut u128,
) {
    let k = placed.len();
    if k == n {
        if prefix < *best {
            *best = prefix;
        }
        return;
    }
    let mut cands: Vec<(u16, u8)> = (0..n as u8)
        .filter(|v| !placed.contains(v))
        .map(|v| (column_bits(adj, placed, v), v))
        .collect();
    cands.sort_unstable();
    for (col, v) in cands {
        let nb = bits + k;
        let np = (prefix << k) | u128::from(col);
        // candidates are ascending: once the prefix exceeds the incumbent,
        // every later sibling does too
        if nb > 0 && np > (*best >> (nbits - nb)) {
            break;
        }
        placed.push(v);
        canon_dfs(adj, n, nbits, placed, np, nb, best);
        placed.pop();
    }
}

/// Ordered partition of the not-yet-processed vertices; vertices in one cell
/// are interchangeable given the rows chosen so far.
#[derive(Clone)]
struct Cells(Vec<Vec<u8>>);

impl Cells {
    fn initial(n: usize) -> Self {
        Cells(vec![(1..n as u8).collect()])
    }

    /// Drops `v` (always the head of its cell) when its row comes up.
    fn remove_front(&mut self, v: u8) {
        for cell in &mut self.0 {
            if cell.first() == Some(&v) {
                cell.remove(0);
                break;
            }
        }
        self.0.retain(|c| !c.is_empty());
    }

    fn split_by(&self, chosen: &[u8]) -> Cells {
        let mut out = Vec::new();
        for cell in &self.0 {
            let (inn, rest): (Vec<u8>, Vec<u8>) =
                cell.iter().partition(|v| chosen.contains(v));
            if !inn.is_empty() {
                out.push(inn);
            }
            if !rest.is_empty() {
                out.push(rest);
            }
        }
        Cells(out)
    }

    /// All selections taking a prefix of each cell, `want` vertices total.
    fn prefix_selections(&self, want: usize) -> Vec<Vec<u8>> {
        let mut out = Vec::new();
        let mut cur = Vec::new();
        self.rec(0, want, &mut cur, &mut out);
        out
    }

    fn rec(&self, cell: usize, want: usize, cur: &mut Vec<u8>, out: &mut Vec<Vec<u8>>) {
        if want == 0 {
            out.push(cur.clone());
            return;
        }
        if cell >= self.0.len() {
            return;
        }
        let remaining: usize = self.0[cell..].iter().map(Vec::len).sum();
        if remaining < want {
            return;
        }
        let len = self.0[cell].len();
        for take in (0..=len.min(want)).rev() {
            let before = cur.len();
            cur.extend_from_slice(&self.0[cell][..take]);
            self.rec(cell + 1, want - take, cur, out);
            cur.truncate(before);
        }
    }
}

/// One representative per isomorphism class of graphs with `order` vertices,
/// `edges` edges, and all degrees even (isolated vertices allowed). Output is
/// sorted by canonical form.
pub fn enumerate_even_graphs(
    order: usize,
    edges: usize,
) -> Result<Vec<SmallGraph>, EnumerateError> {
    if order == 0 || order > 8 {
        return Err(EnumerateError::OrderTooLarge(order, 8));
    }
    if edges > order * (order - 1) / 2 {
        return Err(EnumerateError::TooManyEdges { order, edges });
    }
    let mut found: BTreeMap<CanonicalForm, SmallGraph> = BTreeMap::new();
    let mut deg = vec![0usize; order];
    let mut rows: Vec<Vec<u8>> = vec![Vec::new(); order];
    even_rows(
        order,
        edges,
        0,
        0,
        &Cells::initial(order),
        &mut deg,
        &mut rows,
        &mut found,
    );
    Ok(found.into_values().collect())
}

#[allow(clippy::too_many_arguments)]
fn even_rows(
    n: usize,
    target_edges: usize,
    row: usize,
    used_edges: usize,
    cells: &Cells,
    deg: &mut [usize],
    rows: &mut [Vec<u8>],
    found: &mut BTreeMap<CanonicalForm, SmallGraph>,
) {
    if row == n {
        if used_edges == target_edges {
            let mut edges = Vec::with_capacity(used_edges);
            for (i, r) in rows.iter().enumerate() {
                for &j in r {
                    edges.push((i, j as usize));
                }
            }
            let g = SmallGraph::from_edges(n, &edges).expect("construction is valid");
            debug_assert!(g.degree_sequence().iter().all(|d| d % 2 == 0));
            debug_assert_eq!(g.edge_count(), target_edges);
            let canon = canonical_form(&g).expect("order within bounds");
            found.entry(canon).or_insert_with(|| canon.graph());
        }
        return;
    }
    let future = n - 1 - row;
    // remaining rows can add at most C(future, 2) edges
    let capacity_after = future * future.saturating_sub(1) / 2;
    for size in 0..=future {
        if !(deg[row] + size).is_multiple_of(2) {
            continue;
        }
        if used_edges + size > target_edges {
            break;
        }
        if used_edges + size + capacity_after < target_edges {
            continue;
        }
        for selection in cells.prefix_selections(size) {
            for &v in &selection {
                deg[v as usize] += 1;
            }
            deg[row] += size;
            rows[row] = selection.clone();
            let mut next = cells.split_by(&selection);
            next.remove_front(row as u8 + 1);
            even_rows(
                n,
                target_edges,
                row + 1,
                used_edges + size,
                &next,
                deg,
                rows,
                found,
            );
            rows[row].clear();
            deg[row] -= size;
            for &v in &selection {
                deg[v as usize] -= 1;
            }
        }
    }
}

/// One representative per isomorphism class of `degree`-regular graphs on
/// `order` vertices, sorted by canonical form. Odd `order * degree` is
/// rejected as a parity error.
pub fn enumerate_regular_graphs(
    order: usize,
    degree: usize,
) -> Result<Vec<SmallGraph>, EnumerateError> {
    if order == 0 || order > MAX_CANON_ORDER {
        return Err(EnumerateError::OrderTooLarge(order, MAX_CANON_ORDER));
    }
    if degree >= order {
        return Err(EnumerateError::BadDegree { order, degree });
    }
    if !(order * degree).is_multiple_of(2) {
        return Err(EnumerateError::ParityImpossible { order, degree });
    }
    // dense targets generate faster through the complement
    if degree > (order - 1) / 2 {
        let co = enumerate_regular_graphs(order, order - 1 - degree)?;
        let mut out: BTreeMap<CanonicalForm, SmallGraph> = BTreeMap::new();
        for g in co {
            let canon = canonical_form(&g.complement()).expect("order within bounds");
            out.insert(canon, canon.graph());
        }
        return Ok(out.into_values().collect());
    }
    let mut found: BTreeMap<CanonicalForm, SmallGraph> = BTreeMap::new();
    let mut deg = vec![0usize; order];
    let mut rows: Vec<Vec<u8>> = vec![Vec::new(); order];
    regular_rows(
        order,
        degree,
        0,
        &Cells::initial(order),
        &mut deg,
        &mut rows,
        &mut found,
    );
    Ok(found.into_values().collect())
}

fn regular_rows(
    n: usize,
    k: usize,
    row: usize,
    cells: &Cells,
    deg: &mut [usize],
    rows: &mut [Vec<u8>],
    found: &mut BTreeMap<CanonicalForm, SmallGraph>,
) {
    if row == n {
        let mut edges = Vec::new();
        for (i, r) in rows.iter().enumerate() {
            for &j in r {
                edges.push((i, j as usize));
            }
        }
        let g = SmallGraph::from_edges(n, &edges).expect("construction is valid");
        debug_assert!((0..n).all(|v| g.degree(v) == k));
        let canon = canonical_form(&g).expect("order within bounds");
        found.entry(canon).or_insert_with(|| canon.graph());
        return;
    }
    let Some(size) = k.checked_sub(deg[row]) else {
        return;
    };
    if size > n - 1 - row {
        return;
    }
    for selection in cells.prefix_selections(size) {
        if selection.iter().any(|&v| deg[v as usize] >= k) {
            continue;
        }
        for &v in &selection {
            deg[v as usize] += 1;
        }
        deg[row] += size;
        // the rest of the graph must realize the residual degrees
        let residual: Vec<u32> = (row + 1..n).map(|v| (k - deg[v]) as u32).collect();
        if residual.iter().all(|&r| r as usize <= n - row - 2)
            && rules::erdos_gallai(&residual)
        {
            rows[row] = selection.clone();
            let mut next = cells.split_by(&selection);
            next.remove_front(row as u8 + 1);
            regular_rows(n, k, row + 1, &next, deg, rows, found);
            rows[row].clear();
        }
        deg[row] -= size;
        for &v in &selection {
            deg[v as usize] -= 1;
        }
    }
}

/// Result of matching generated representatives against fixture graph6
/// strings: a bijection under canonical form, or the mismatch.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FixtureMatch {
    pub bijection: bool,
    /// (generated index, fixture index) pairs.
    pub pairs: Vec<(usize, usize)>,
    pub unmatched_generated: Vec<usize>,
    pub unmatched_fixture: Vec<usize>,
}

/// Matches generated classes against fixture strings by canonical form.
pub fn match_fixture(
    generated: &[SmallGraph],
    fixture: &[String],
) -> Result<FixtureMatch, crate::graph::GraphError> {
    let mut by_canon: BTreeMap<CanonicalForm, Vec<usize>> = BTreeMap::new();
    for (i, g) in generated.iter().enumerate() {
        let form = canonical_form(g).expect("generated graphs stay in bounds");
        by_canon.entry(form).or_default().push(i);
    }
    let mut pairs = Vec::new();
    let mut unmatched_fixture = Vec::new();
    for (j, line) in fixture.iter().enumerate() {
        let g = SmallGraph::from_graph6(line)?;
        let form = canonical_form(&g).expect("fixture graphs stay in bounds");
        match by_canon.get_mut(&form).and_then(Vec::pop) {
            Some(i) => pairs.push((i, j)),
            None => unmatched_fixture.push(j),
        }
    }
    let unmatched_generated: Vec<usize> = by_canon.values().flatten().copied().collect();
    pairs.sort_unstable();
    Ok(FixtureMatch {
        bijection: unmatched_generated.is_empty() && unmatched_fixture.is_empty(),
        pairs,
        unmatched_generated,
        unmatched_fixture,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::seq::SliceRandom;
    use rand::SeedableRng;

    fn g(order: usize, edges: &[(usize, usize)]) -> SmallGraph {
        SmallGraph::from_edges(order, edges).unwrap()
    }

    #[test]
    fn canonical_form_relabeling_invariance() {
        let c3a = g(4, &[(0, 1), (1, 2), (0, 2)]);
        let c3b = g(4, &[(0, 2), (2, 3), (0, 3)]);
        assert_eq!(canonical_form(&c3a).unwrap(), canonical_form(&c3b).unwrap());

        let bowtie = SmallGraph::from_graph6("F?`EW").unwrap();
        let c6 = SmallGraph::from_graph6("F?qb?").unwrap();
        assert_ne!(canonical_form(&bowtie).unwrap(), canonical_form(&c6).unwrap());
    }

    #[test]
    fn canonical_form_idempotent() {
        for line in ["F?`EW", "F?qb?", "FCQQO", "FCR`w"] {
            let graph = SmallGraph::from_graph6(line).unwrap();
            let canon = canonical_graph(&graph).unwrap();
            assert_eq!(canonical_graph(&canon).unwrap(), canon);
        }
    }

    #[test]
    fn canonical_form_under_random_relabelings() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let base = SmallGraph::from_graph6("J?B~vr{}fq?").unwrap();
        let form = canonical_form(&base).unwrap();
        for _ in 0..100 {
            let mut perm: Vec<usize> = (0..11).collect();
            perm.shuffle(&mut rng);
            assert_eq!(canonical_form(&base.relabel(&perm)).unwrap(), form);
        }
    }

    #[test]
    fn canonical_form_rejects_large_order() {
        let big = SmallGraph::empty(13).unwrap();
        assert!(matches!(
            canonical_form(&big),
            Err(EnumerateError::OrderTooLarge(13, _))
        ));
    }

    #[test]
    fn even_7_6_has_three_classes() {
        let graphs = enumerate_even_graphs(7, 6).unwrap();
        assert_eq!(graphs.len(), 3);
        // bowtie, C6 + isolated, C3 + C3 + isolated, in some canonical order
        let degs: Vec<Vec<usize>> = graphs.iter().map(SmallGraph::degree_sequence).collect();
        assert!(degs.contains(&vec![4, 2, 2, 2, 2, 0, 0]));
        assert!(degs.iter().filter(|d| **d == vec![2, 2, 2, 2, 2, 2, 0]).count() == 2);
    }

    #[test]
    fn even_small_trivia() {
        // one even graph with zero edges
        assert_eq!(enumerate_even_graphs(4, 0).unwrap().len(), 1);
        // a single even graph with 3 edges on 3 vertices: the triangle
        assert_eq!(enumerate_even_graphs(3, 3).unwrap().len(), 1);
        // no even graph with exactly one edge
        assert_eq!(enumerate_even_graphs(5, 1).unwrap().len(), 0);
        assert!(enumerate_even_graphs(9, 3).is_err());
        assert!(enumerate_even_graphs(4, 7).is_err());
    }

    #[test]
    fn regular_graph_counts() {
        assert_eq!(enumerate_regular_graphs(4, 3).unwrap().len(), 1); // K4
        assert_eq!(enumerate_regular_graphs(9, 2).unwrap().len(), 4);
        assert_eq!(enumerate_regular_graphs(5, 2).unwrap().len(), 1); // C5
        assert_eq!(enumerate_regular_graphs(6, 3).unwrap().len(), 2); // K33, prism
        assert_eq!(enumerate_regular_graphs(7, 0).unwrap().len(), 1);
        assert!(matches!(
            enumerate_regular_graphs(9, 3),
            Err(EnumerateError::ParityImpossible { .. })
        ));
        assert!(enumerate_regular_graphs(5, 5).is_err());
    }

    #[test]
    fn two_regular_classes_match_partition_counts() {
        // 2-regular graphs on n vertices = partitions of n into parts >= 3
        fn partitions(n: usize, min: usize) -> usize {
            if n == 0 {
                return 1;
            }
            (min..=n).map(|p| partitions(n - p, p)).sum()
        }
        for n in 3..=10 {
            assert_eq!(
                enumerate_regular_graphs(n, 2).unwrap().len(),
                partitions(n, 3),
                "n={n}"
            );
        }
    }

    #[test]
    fn generated_classes_are_pairwise_distinct() {
        let graphs = enumerate_even_graphs(7, 9).unwrap();
        assert_eq!(graphs.len(), 6);
        let mut forms: Vec<CanonicalForm> =
            graphs.iter().map(|g| canonical_form(g).unwrap()).collect();
        forms.sort_unstable();
        forms.dedup();
        assert_eq!(forms.len(), 6);
        // a relabeled copy of a generated graph is a duplicate
        let perm: Vec<usize> = vec![3, 1, 4, 0, 6, 2, 5];
        let dup = graphs[0].relabel(&perm);
        assert_eq!(
            canonical_form(&dup).unwrap(),
            canonical_form(&graphs[0]).unwrap()
        );
    }

    #[test]
    fn match_fixture_identity() {
        let graphs = enumerate_even_graphs(7, 6).unwrap();
        let lines: Vec<String> = graphs.iter().map(SmallGraph::to_graph6).collect();
        let report = match_fixture(&graphs, &lines).unwrap();
        assert!(report.bijection);
        assert_eq!(report.pairs.len(), 3);
    }

    #[test]
    fn match_fixture_reports_mismatch() {
        let graphs = enumerate_even_graphs(7, 6).unwrap();
        let lines = vec![graphs[0].to_graph6(), "FCR`w".to_string()];
        let report = match_fixture(&graphs, &lines).unwrap();
        assert!(!report.bijection);
        assert_eq!(report.pairs.len(), 1);
        assert_eq!(report.unmatched_fixture, vec![1]);
        assert_eq!(report.unmatched_generated.len(), 2);
    }
}
