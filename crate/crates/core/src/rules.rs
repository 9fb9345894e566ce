//! Closed-form design-theory rules: minimum excess and cover counts for
//! {K3,K4}-coverings, lower bounds, per-vertex residues, Erdős–Gallai
//! graphicality, PBD existence, and the heavy/light triple-distribution
//! system.

use std::collections::HashMap;
use std::sync::Mutex;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::solver::{CoverInstance, SolverConfig};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum RulesError {
    #[error("order {0} below the domain minimum 3")]
    OrderTooSmall(u32),
    #[error("lower_bound is defined for v = 6,7,9,10 (mod 12), v != 6; got {0}")]
    LowerBoundResidue(u32),
    #[error("pbd_exists requires v > w > 0, got v={v}, w={w}")]
    BadPbdArgs { v: u32, w: u32 },
    #[error("max_triangle_packing supports 3 <= n <= 9, got {0}")]
    PackingOrder(u32),
}

/// Minimum excess xi_{3,4}(v) of a {K3,K4}-covering of K_v.
pub fn excess_min(v: u32) -> Result<u32, RulesError> {
    if v < 3 {
        return Err(RulesError::OrderTooSmall(v));
    }
    Ok(match v {
        6 => 3,
        _ if v % 3 == 2 => 2,
        _ => 0,
    })
}

/// Minimum number of covering blocks C^xi(v,{3,4},2) in a {K3,K4}-covering
/// of K_v with minimum excess, including every special case.
pub fn cover_number(v: u32) -> Result<u64, RulesError> {
    if v < 3 {
        return Err(RulesError::OrderTooSmall(v));
    }
    let n = u64::from(v);
    Ok(match v {
        6 => 3,
        9 | 10 => 12,
        18 => 33,
        19 => 35,
        _ => match v % 12 {
            1 | 4 => (n * n - n) / 12,
            7 | 10 => (n * n - n + 42) / 12,
            0 | 3 => (n * n + n) / 12,
            6 | 9 => (n * n + n + 6) / 12,
            5 | 8 => (n * n + 3 * n - 4) / 12,
            _ => (n * n + 3 * n + 2) / 12, // v = 2, 11 (mod 12)
        },
    })
}

/// Covering-number lower bound for the residue classes the decomposition
/// arguments need: (v^2+v+6)/12 when v = 6,9 (mod 12), v != 6, and
/// (v^2-v+42)/12 when v = 7,10 (mod 12).
pub fn lower_bound(v: u32) -> Result<u64, RulesError> {
    let n = u64::from(v);
    match v % 12 {
        6 | 9 if v != 6 => Ok((n * n + n + 6) / 12),
        7 | 10 => Ok((n * n - n + 42) / 12),
        _ => Err(RulesError::LowerBoundResidue(v)),
    }
}

/// Quadruple count forced by the edge identity 3a + 6b = C(v,2), or `None`
/// when the count is non-integral or negative (no exact decomposition with
/// that triple count).
pub fn beta_from_alpha(v: u32, alpha: u64) -> Option<u64> {
    let edges = u64::from(v) * (u64::from(v) - 1) / 2;
    let used = 3 * alpha;
    if used > edges || !(edges - used).is_multiple_of(6) {
        return None;
    }
    Some((edges - used) / 6)
}

/// The residue of alpha_x mod 3 forced by 2*alpha_x + 3*beta_x = v - 1:
/// the unique r in {0,1,2} with 2r = v-1 (mod 3).
pub fn vertex_triple_residue(v: u32) -> u32 {
    (2 * (v - 1)) % 3
}

/// Erdős–Gallai test: `seq` is realizable as the degree sequence of a simple
/// graph iff the sum is even and every k-prefix inequality holds. The input
/// is sorted internally; order does not matter.
pub fn erdos_gallai(seq: &[u32]) -> bool {
    erdos_gallai_failure(seq).is_none()
}

/// First failing prefix length of the Erdős–Gallai inequalities, if any.
/// `None` means graphic; `Some(0)` marks an odd degree sum or an entry at
/// least the sequence length.
pub fn erdos_gallai_failure(seq: &[u32]) -> Option<usize> {
    let mut d: Vec<u64> = seq.iter().map(|&x| u64::from(x)).collect();
    d.sort_unstable_by(|a, b| b.cmp(a));
    let n = d.len();
    if d.iter().sum::<u64>() % 2 != 0 || d.first().is_some_and(|&x| x >= n as u64) {
        return Some(0);
    }
    (1..=n).find(|&k| {
        let lhs: u64 = d[..k].iter().sum();
        let rhs = (k as u64) * (k as u64 - 1)
            + d[k..].iter().map(|&x| x.min(k as u64)).sum::<u64>();
        lhs > rhs
    })
}

/// Existence of a PBD(v,{4,w*},1): v >= 3w+1 and the residues of v and w
/// mod 12 lie in the same admissible pair {1,4} or {7,10}.
pub fn pbd_exists(v: u32, w: u32) -> Result<bool, RulesError> {
    if w == 0 || v <= w {
        return Err(RulesError::BadPbdArgs { v, w });
    }
    let fam = |x: u32| match x % 12 {
        1 | 4 => Some(0),
        7 | 10 => Some(1),
        _ => None,
    };
    Ok(v > 3 * w && fam(v).is_some() && fam(v) == fam(w))
}

/// Triple distribution over heavy and light vertices.
///
/// `t[i]` counts triples containing `i` heavy vertices, in the regime where
/// each of `h` heavy vertices lies in `a` triples and each of `l` light
/// vertices lies in exactly one.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TripleDistribution {
    pub t0: u32,
    pub t1: u32,
    pub t2: u32,
    pub t3: u32,
}

/// All (t0,t1,t2,t3) satisfying the distribution system, in lexicographic
/// order:
///
/// * t0+t1+t2+t3 = alpha
/// * 3·t3 + 2·t2 + t1 = h·a (heavy slots)
/// * 3·t0 + 2·t1 + t2 = l (light slots, one triple per light vertex)
/// * t0 <= l/3, t1 <= l/2, t2 <= l
/// * t3 <= max_triangle_packing(h) and t2 + 3·t3 <= C(h,2)
pub fn triple_distribution_solutions(
    h: u32,
    a: u32,
    l: u32,
    alpha: u32,
) -> Result<Vec<TripleDistribution>, RulesError> {
    let packing_cap = if h >= 3 { max_triangle_packing(h)? } else { 0 };
    let heavy_pairs = h * h.saturating_sub(1) / 2;
    let mut out = Vec::new();
    for t0 in 0..=alpha {
        for t1 in 0..=(alpha - t0) {
            for t2 in 0..=(alpha - t0 - t1) {
                let t3 = alpha - t0 - t1 - t2;
                if 3 * t3 + 2 * t2 + t1 != h * a {
                    continue;
                }
                if 3 * t0 + 2 * t1 + t2 != l {
                    continue;
                }
                if t0 > l / 3 || t1 > l / 2 || t2 > l {
                    continue;
                }
                if t3 > packing_cap {
                    continue;
                }
                if t2 + 3 * t3 > heavy_pairs {
                    continue;
                }
                out.push(TripleDistribution { t0, t1, t2, t3 });
            }
        }
    }
    Ok(out)
}

/// Maximum number of edge-disjoint triangles in K_n, computed by the cover
/// solver in packing mode and cached. Supported for 3 <= n <= 9.
pub fn max_triangle_packing(n: u32) -> Result<u32, RulesError> {
    if !(3..=9).contains(&n) {
        return Err(RulesError::PackingOrder(n));
    }
    static CACHE: OnceLock<Mutex<HashMap<u32, u32>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(&hit) = cache.lock().expect("packing cache poisoned").get(&n) {
        return Ok(hit);
    }
    let instance = CoverInstance::new(n, &[3]).expect("valid packing instance");
    let outcome = instance.solve_max_packing(&SolverConfig::default());
    debug_assert!(outcome.complete);
    let count = outcome.block_count as u32;
    cache
        .lock()
        .expect("packing cache poisoned")
        .insert(n, count);
    Ok(count)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn excess_min_cases() {
        assert_eq!(excess_min(18).unwrap(), 0);
        assert_eq!(excess_min(19).unwrap(), 0);
        assert_eq!(excess_min(6).unwrap(), 3);
        assert_eq!(excess_min(20).unwrap(), 2);
        assert_eq!(excess_min(2), Err(RulesError::OrderTooSmall(2)));
        for v in 3..=60 {
            let expect = if v == 6 {
                3
            } else if v % 3 == 2 {
                2
            } else {
                0
            };
            assert_eq!(excess_min(v).unwrap(), expect);
        }
    }

    #[test]
    fn cover_number_cases() {
        assert_eq!(cover_number(18).unwrap(), 33);
        assert_eq!(cover_number(19).unwrap(), 35);
        assert_eq!(cover_number(13).unwrap(), 13); // (169-13)/12
        assert_eq!(cover_number(9).unwrap(), 12);
        assert_eq!(cover_number(10).unwrap(), 12);
        assert_eq!(cover_number(6).unwrap(), 3);
        assert_eq!(cover_number(3).unwrap(), 1);
        assert_eq!(cover_number(4).unwrap(), 1);
        assert_eq!(cover_number(7).unwrap(), 7);
        assert!(cover_number(2).is_err());
    }

    #[test]
    fn cover_number_never_beats_edge_bound() {
        for v in 3..=60u32 {
            let edges = u64::from(v) * u64::from(v - 1) / 2;
            assert!(
                cover_number(v).unwrap() >= edges.div_ceil(6),
                "edge bound violated at v={v}"
            );
        }
    }

    #[test]
    fn lower_bound_cases() {
        assert_eq!(lower_bound(18).unwrap(), 29);
        assert_eq!(lower_bound(19).unwrap(), 32);
        assert_eq!(lower_bound(21).unwrap(), 39);
        assert!(lower_bound(8).is_err());
        assert!(lower_bound(6).is_err());
        // cover_number dominates the lemma bound wherever both are defined
        for v in 7..=60u32 {
            if matches!(v % 12, 6 | 7 | 9 | 10) && v != 18 && v != 19 {
                assert!(cover_number(v).unwrap() >= lower_bound(v).unwrap(), "v={v}");
            }
        }
        assert!(cover_number(18).unwrap() >= lower_bound(18).unwrap());
        assert!(cover_number(19).unwrap() >= lower_bound(19).unwrap());
    }

    #[test]
    fn beta_from_alpha_cases() {
        assert_eq!(beta_from_alpha(18, 15), Some(18));
        assert_eq!(beta_from_alpha(19, 13), Some(22));
        assert_eq!(beta_from_alpha(18, 14), None); // 153 - 42 = 111, not divisible by 6
        assert_eq!(beta_from_alpha(18, 53), None); // negative quadruple count
        // integrality implies the mod-6 congruence of 3*alpha
        for v in 3..=30u32 {
            let edges = u64::from(v) * u64::from(v - 1) / 2;
            for alpha in 0..=edges / 3 {
                if beta_from_alpha(v, alpha).is_some() {
                    assert_eq!((3 * alpha) % 6, edges % 6);
                }
            }
        }
    }

    #[test]
    fn vertex_triple_residue_cases() {
        assert_eq!(vertex_triple_residue(18), 1);
        assert_eq!(vertex_triple_residue(19), 0);
        assert_eq!(vertex_triple_residue(20), 2);
        for v in 3..=60 {
            let r = vertex_triple_residue(v);
            assert_eq!((2 * r) % 3, (v - 1) % 3);
        }
    }

    #[test]
    fn erdos_gallai_cases() {
        assert!(!erdos_gallai(&[6, 6, 6, 6, 6, 2, 2, 2]));
        assert!(erdos_gallai(&[2, 2, 2]));
        assert!(erdos_gallai(&[3, 3, 3, 3]));
        assert!(!erdos_gallai(&[3, 3, 3, 1]));
        assert!(erdos_gallai(&[]));
        assert!(erdos_gallai(&[0]));
        assert!(!erdos_gallai(&[1]));
        // k=5 violates the prefix inequality too, but k=4 fails first
        assert_eq!(erdos_gallai_failure(&[6, 6, 6, 6, 6, 2, 2, 2]), Some(4));
        assert_eq!(erdos_gallai_failure(&[2, 2, 2]), None);
        assert_eq!(erdos_gallai_failure(&[1, 2]), Some(0));
    }

    #[test]
    fn erdos_gallai_matches_brute_force_up_to_n6() {
        // realizable degree sequences over all graphs on n vertices
        for n in 1..=6usize {
            let pairs: Vec<(usize, usize)> = (0..n)
                .flat_map(|a| ((a + 1)..n).map(move |b| (a, b)))
                .collect();
            let mut realizable = std::collections::HashSet::new();
            for mask in 0u32..(1 << pairs.len()) {
                let mut deg = vec![0u32; n];
                for (i, &(a, b)) in pairs.iter().enumerate() {
                    if mask >> i & 1 == 1 {
                        deg[a] += 1;
                        deg[b] += 1;
                    }
                }
                deg.sort_unstable_by(|a, b| b.cmp(a));
                realizable.insert(deg);
            }
            // every non-increasing sequence with entries < n
            fn seqs(n: usize, max: u32, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
                if cur.len() == n {
                    out.push(cur.clone());
                    return;
                }
                for d in (0..=max).rev() {
                    cur.push(d);
                    seqs(n, d, cur, out);
                    cur.pop();
                }
            }
            let mut all = Vec::new();
            seqs(n, n as u32 - 1, &mut Vec::new(), &mut all);
            for seq in all {
                assert_eq!(
                    erdos_gallai(&seq),
                    realizable.contains(&seq),
                    "n={n}, seq={seq:?}"
                );
            }
        }
    }

    #[test]
    fn pbd_cases() {
        assert!(!pbd_exists(19, 7).unwrap()); // 19 < 3*7+1
        assert!(pbd_exists(13, 4).unwrap());
        assert!(!pbd_exists(25, 7).unwrap()); // residue families differ
        assert!(pbd_exists(22, 7).unwrap());
        assert!(pbd_exists(7, 7).is_err());
        assert!(pbd_exists(4, 0).is_err());
    }

    #[test]
    fn triple_distribution_lemma_case() {
        let sols = triple_distribution_solutions(7, 4, 11, 13).unwrap();
        let expect = [
            (0, 0, 11, 2),
            (0, 1, 9, 3),
            (0, 2, 7, 4),
            (0, 3, 5, 5),
            (0, 4, 3, 6),
            (1, 0, 8, 4),
            (1, 1, 6, 5),
        ];
        assert_eq!(sols.len(), 7);
        for (sol, &(t0, t1, t2, t3)) in sols.iter().zip(expect.iter()) {
            assert_eq!((sol.t0, sol.t1, sol.t2, sol.t3), (t0, t1, t2, t3));
        }
    }

    #[test]
    fn triple_distribution_degenerate_cases() {
        let sols = triple_distribution_solutions(0, 0, 3, 1).unwrap();
        assert_eq!(
            sols,
            vec![TripleDistribution {
                t0: 1,
                t1: 0,
                t2: 0,
                t3: 0
            }]
        );
        let sols = triple_distribution_solutions(3, 1, 0, 1).unwrap();
        assert_eq!(
            sols,
            vec![TripleDistribution {
                t0: 0,
                t1: 0,
                t2: 0,
                t3: 1
            }]
        );
        // empty answer is valid
        assert!(triple_distribution_solutions(1, 1, 0, 5).unwrap().is_empty());
    }

    #[test]
    fn triple_distribution_solutions_satisfy_all_constraints() {
        for (h, a, l, alpha) in [(7u32, 4u32, 11u32, 13u32), (5, 4, 13, 11), (3, 4, 15, 9)] {
            for s in triple_distribution_solutions(h, a, l, alpha).unwrap() {
                assert_eq!(s.t0 + s.t1 + s.t2 + s.t3, alpha);
                assert_eq!(3 * s.t3 + 2 * s.t2 + s.t1, h * a);
                assert_eq!(3 * s.t0 + 2 * s.t1 + s.t2, l);
                assert!(s.t0 <= l / 3 && s.t1 <= l / 2 && s.t2 <= l);
                assert!(h < 3 || s.t3 <= max_triangle_packing(h).unwrap());
                assert!(s.t2 + 3 * s.t3 <= h * (h - 1) / 2);
            }
        }
    }

    #[test]
    fn max_triangle_packing_values() {
        // brute-force packing values for K3..K9
        let expect = [(3, 1), (4, 1), (5, 2), (6, 4), (7, 7), (8, 8), (9, 12)];
        for (n, val) in expect {
            assert_eq!(max_triangle_packing(n).unwrap(), val, "n={n}");
        }
        assert!(max_triangle_packing(2).is_err());
        assert!(max_triangle_packing(10).is_err());
    }
}
