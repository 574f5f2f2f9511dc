//! Exact analytics on clause systems: degrees, K_{2,2} counts with per-vertex
//! participation, partial-intersection degree traces and distinct
//! neighborhood classes.
//!
//! All counting works on mask classes (vertices sharing a mask have identical
//! neighborhoods), so cost depends on the number of distinct masks rather than
//! on the vertex count.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::caps::{choose2, choose2_u128, Caps};
use crate::error::{Error, Result};
use crate::graph::{ClauseSystem, ExplicitBipartiteGraph, MaskHistogram, Side};
use crate::mask::{self, Mask};

/// Sum-over-subsets table: `f[M]` is the number of histogram entries whose
/// mask is a subset of `M`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ZetaTable {
    n: usize,
    f: Vec<u32>,
}

impl ZetaTable {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn values(&self) -> &[u32] {
        &self.f
    }

    pub fn full_mask(&self) -> u64 {
        low_bits(self.n)
    }

    pub fn get(&self, m: u64) -> u64 {
        self.f[m as usize] as u64
    }

    /// Number of entries disjoint from `s`, i.e. `f[complement(s)]`.
    pub fn count_disjoint(&self, s: u64) -> u64 {
        self.get(!s & self.full_mask())
    }
}

fn low_bits(n: usize) -> u64 {
    if n >= 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

/// Standard n-pass subset-sum transform, `O(2^n * n)` additions.
pub fn subset_zeta(hist: &MaskHistogram, n: usize, caps: &Caps) -> Result<ZetaTable> {
    if n > caps.max_sos_bits as usize || n >= usize::BITS as usize - 1 {
        return Err(Error::CapExceeded {
            what: "zeta table bits",
            requested: n as u128,
            limit: caps.max_sos_bits as u128,
        });
    }
    if hist.total() > u32::MAX as u64 {
        return Err(Error::Overflow("zeta table counters"));
    }
    let mut f = vec![0u32; 1 << n];
    for (m, &c) in &hist.entries {
        if mask::ones(m.words()).any(|b| b >= n) {
            return Err(Error::domain(format!("histogram mask {m:?} wider than n = {n}")));
        }
        f[m.as_u64() as usize] += c as u32;
    }
    for bit in 0..n {
        let step = 1usize << bit;
        for block in f.chunks_exact_mut(step * 2) {
            let (lo, hi) = block.split_at_mut(step);
            for (h, l) in hi.iter_mut().zip(lo.iter()) {
                *h += *l;
            }
        }
    }
    Ok(ZetaTable { n, f })
}

fn zeta_for(cs: &ClauseSystem, side: Side, caps: &Caps) -> Option<ZetaTable> {
    subset_zeta(&cs.mask_histogram(side), cs.n(), caps).ok()
}

pub fn degree(cs: &ClauseSystem, v: usize) -> Result<u64> {
    let s = cs.left_mask(v)?;
    Ok((0..cs.n_right())
        .filter(|&w| mask::disjoint(s.words(), cs.right_words(w)))
        .count() as u64)
}

/// Degree via a right-side zeta table.
pub fn degree_with_zeta(cs: &ClauseSystem, zeta: &ZetaTable, v: usize) -> Result<u64> {
    let s = cs.left_mask(v)?;
    if zeta.n() != cs.n() {
        return Err(Error::domain("zeta table built for a different clause count"));
    }
    Ok(zeta.count_disjoint(s.as_u64()))
}

/// All left degrees, through the zeta table when it fits under the caps.
pub fn degrees(cs: &ClauseSystem, caps: &Caps) -> Vec<u64> {
    match zeta_for(cs, Side::Right, caps) {
        Some(z) => (0..cs.n_left())
            .map(|v| z.count_disjoint(cs.left_words(v).first().copied().unwrap_or(0)))
            .collect(),
        None => {
            let right = classes(&cs.mask_histogram(Side::Right));
            (0..cs.n_left())
                .map(|v| {
                    let s = cs.left_words(v);
                    right
                        .iter()
                        .filter(|(m, _)| mask::disjoint(s, m.words()))
                        .map(|(_, c)| c)
                        .sum()
                })
                .collect()
        }
    }
}

pub fn average_degree(cs: &ClauseSystem, caps: &Caps) -> Result<f64> {
    if cs.n_left() == 0 {
        return Err(Error::domain("average degree of an empty left side"));
    }
    let total: u64 = degrees(cs, caps).iter().sum();
    Ok(total as f64 / cs.n_left() as f64)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Algorithm {
    /// Left class pairs against a right-side zeta table.
    SubsetZeta,
    /// Left class pairs against right classes; no `2^n` table.
    ClassPairs,
    /// Exhaustive quadruple enumeration on an explicit graph.
    BruteForce,
    /// Common-neighbor counting over left vertex pairs of an explicit graph.
    Wedge,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct K22Report {
    pub total: u64,
    pub algorithm: Algorithm,
    pub left_participation: Vec<u64>,
    pub right_participation: Vec<u64>,
}

impl K22Report {
    /// Same counts, ignoring which algorithm produced them.
    pub fn same_counts(&self, other: &K22Report) -> bool {
        self.total == other.total
            && self.left_participation == other.left_participation
            && self.right_participation == other.right_participation
    }
}

fn classes(hist: &MaskHistogram) -> Vec<(Mask, u64)> {
    hist.entries.iter().map(|(m, &c)| (m.clone(), c)).collect()
}

fn to_u64(x: u128, what: &'static str) -> Result<u64> {
    u64::try_from(x).map_err(|_| Error::Overflow(what))
}

/// Picks the zeta path when `n` fits under the SOS cap, otherwise class pairs.
pub fn count_k22(cs: &ClauseSystem, caps: &Caps) -> Result<K22Report> {
    if cs.n() <= caps.max_sos_bits as usize && cs.n() <= 62 {
        count_k22_zeta(cs, caps)
    } else {
        count_k22_class_pairs(cs)
    }
}

/// For a class `a` on one side, sums `(c_b - [a == b]) * C(f[!(a|b)], 2)` over
/// classes `b` on the same side, where `f` is the opposite side's zeta table.
/// This is the number of K_{2,2}s containing any single vertex of class `a`.
fn zeta_participation(own: &[(u64, u64)], other: &ZetaTable) -> Vec<u128> {
    own.iter()
        .map(|&(a, _)| {
            own.iter()
                .map(|&(b, cb)| {
                    let partners = if a == b { cb - 1 } else { cb };
                    partners as u128 * choose2(other.count_disjoint(a | b)) as u128
                })
                .sum()
        })
        .collect()
}

pub fn count_k22_zeta(cs: &ClauseSystem, caps: &Caps) -> Result<K22Report> {
    let left_hist = cs.mask_histogram(Side::Left);
    let right_hist = cs.mask_histogram(Side::Right);
    let f_right = subset_zeta(&right_hist, cs.n(), caps)?;
    let f_left = subset_zeta(&left_hist, cs.n(), caps)?;
    let (lc, rc) = (classes(&left_hist), classes(&right_hist));
    let flat = |cls: &[(Mask, u64)]| cls.iter().map(|(m, c)| (m.as_u64(), *c)).collect::<Vec<_>>();
    let (lf, rf) = (flat(&lc), flat(&rc));

    let mut total: u128 = 0;
    for (i, &(a, ca)) in lf.iter().enumerate() {
        total += choose2_u128(ca as u128) * choose2(f_right.count_disjoint(a)) as u128;
        for &(b, cb) in &lf[i + 1..] {
            total += (ca as u128 * cb as u128) * choose2(f_right.count_disjoint(a | b)) as u128;
        }
    }
    let lp = zeta_participation(&lf, &f_right);
    let rp = zeta_participation(&rf, &f_left);
    Ok(K22Report {
        total: to_u64(total, "K_{2,2} total")?,
        algorithm: Algorithm::SubsetZeta,
        left_participation: per_vertex(cs, Side::Left, &lc, &lp)?,
        right_participation: per_vertex(cs, Side::Right, &rc, &rp)?,
    })
}

/// Spreads per-class values (aligned with the sorted class list) to vertices.
fn per_vertex(cs: &ClauseSystem, side: Side, cls: &[(Mask, u64)], part: &[u128]) -> Result<Vec<u64>> {
    (0..cs.side_len(side))
        .map(|i| {
            let key = Mask::from_words(cs.words(side, i));
            let idx = cls
                .binary_search_by(|(m, _)| m.cmp(&key))
                .expect("every vertex mask is a class");
            to_u64(part[idx], "K_{2,2} participation")
        })
        .collect()
}

/// For each class `a` on one side, `sum_b (c_b - [a == b]) * C(compat(a|b), 2)`
/// where `compat(u)` is the number of opposite-side vertices disjoint from `u`.
fn class_pair_participation(own: &[(Mask, u64)], other: &[(Mask, u64)]) -> Vec<u128> {
    own.iter()
        .enumerate()
        .map(|(i, (a, _))| {
            own.iter()
                .enumerate()
                .map(|(j, (b, cb))| {
                    let partners = if i == j { cb - 1 } else { *cb };
                    if partners == 0 {
                        return 0;
                    }
                    let u = a.union(b);
                    let compat: u64 = other
                        .iter()
                        .filter(|(r, _)| r.is_disjoint(&u))
                        .map(|(_, c)| c)
                        .sum();
                    partners as u128 * choose2(compat) as u128
                })
                .sum()
        })
        .collect()
}

/// Class-pair path: works for any clause count.
///
/// A quadruple `{v1,v2} x {w1,w2}` is a K_{2,2} iff `S_v1 | S_v2` is disjoint
/// from both `T_w1` and `T_w2`, so each left class pair contributes
/// `C(#right vertices disjoint from the union, 2)`.
pub fn count_k22_class_pairs(cs: &ClauseSystem) -> Result<K22Report> {
    let lc = classes(&cs.mask_histogram(Side::Left));
    let rc = classes(&cs.mask_histogram(Side::Right));
    let lp = class_pair_participation(&lc, &rc);
    let rp = class_pair_participation(&rc, &lc);
    // each K_{2,2} is seen once from each of its two left vertices
    let twice: u128 = lc.iter().zip(&lp).map(|((_, c), p)| *c as u128 * p).sum();
    Ok(K22Report {
        total: to_u64(twice / 2, "K_{2,2} total")?,
        algorithm: Algorithm::ClassPairs,
        left_participation: per_vertex(cs, Side::Left, &lc, &lp)?,
        right_participation: per_vertex(cs, Side::Right, &rc, &rp)?,
    })
}

/// Exhaustive enumeration of all `C(N_L,2) * C(N_R,2)` quadruples.
pub fn count_k22_explicit(g: &ExplicitBipartiteGraph, caps: &Caps) -> Result<K22Report> {
    let quads = choose2_u128(g.n_left() as u128) * choose2_u128(g.n_right() as u128);
    if quads > caps.max_quadruples as u128 {
        return Err(Error::CapExceeded {
            what: "brute-force quadruples",
            requested: quads,
            limit: caps.max_quadruples as u128,
        });
    }
    let rows = g.bit_rows();
    let (nl, nr) = (g.n_left(), g.n_right());
    let mut lp = vec![0u64; nl];
    let mut rp = vec![0u64; nr];
    let mut total = 0u64;
    for v1 in 0..nl {
        for v2 in v1 + 1..nl {
            for w1 in 0..nr {
                if !(rows.get(v1, w1) && rows.get(v2, w1)) {
                    continue;
                }
                for w2 in w1 + 1..nr {
                    if rows.get(v1, w2) && rows.get(v2, w2) {
                        total += 1;
                        lp[v1] += 1;
                        lp[v2] += 1;
                        rp[w1] += 1;
                        rp[w2] += 1;
                    }
                }
            }
        }
    }
    Ok(K22Report {
        total,
        algorithm: Algorithm::BruteForce,
        left_participation: lp,
        right_participation: rp,
    })
}

/// Counts K_{2,2}s of an explicit graph from common neighborhoods of left
/// vertex pairs. Much faster than [`count_k22_explicit`]; used for the
/// Bernoulli baseline.
pub fn count_k22_wedge(g: &ExplicitBipartiteGraph) -> Result<K22Report> {
    let rows = g.bit_rows();
    let (nl, nr) = (g.n_left(), g.n_right());
    let mut lp = vec![0u64; nl];
    let mut rp = vec![0u64; nr];
    let mut total = 0u64;
    let mut common = Vec::new();
    for v1 in 0..nl {
        for v2 in v1 + 1..nl {
            common.clear();
            common.extend(rows.row(v1).iter().zip(rows.row(v2)).map(|(a, b)| a & b));
            let c = mask::count_ones(&common) as u64;
            if c < 2 {
                continue;
            }
            let k = choose2(c);
            total = total.checked_add(k).ok_or(Error::Overflow("K_{2,2} total"))?;
            lp[v1] += k;
            lp[v2] += k;
            for w in mask::ones(&common) {
                rp[w] += c - 1;
            }
        }
    }
    Ok(K22Report {
        total,
        algorithm: Algorithm::Wedge,
        left_participation: lp,
        right_participation: rp,
    })
}

/// Sizes `d_0 = N_R, d_1, ..., d_m` of the running intersections of `B_i`
/// over the clauses `i` excluding `v`, taken in ascending clause order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DegreeTrace {
    pub values: Vec<u64>,
}

impl DegreeTrace {
    pub fn final_degree(&self) -> u64 {
        *self.values.last().expect("trace always has d_0")
    }
}

pub fn degree_trace(cs: &ClauseSystem, v: usize) -> Result<DegreeTrace> {
    let s = cs.left_mask(v)?;
    let mut prefix = Mask::zero(cs.n());
    let mut alive: Vec<usize> = (0..cs.n_right()).collect();
    let mut values = vec![alive.len() as u64];
    for bit in s.ones() {
        prefix.set(bit);
        alive.retain(|&w| mask::disjoint(prefix.words(), cs.right_words(w)));
        values.push(alive.len() as u64);
    }
    Ok(DegreeTrace { values })
}

/// Number of distinct neighborhoods among left vertices of degree at least
/// `min_degree`.
///
/// Each left class is keyed by the (sorted) set of right classes it is
/// compatible with; equal keys mean equal neighborhoods.
pub fn distinct_neighborhood_count(cs: &ClauseSystem, min_degree: u64) -> u64 {
    let lc = classes(&cs.mask_histogram(Side::Left));
    let rc = classes(&cs.mask_histogram(Side::Right));
    let mut seen: HashSet<Vec<u32>> = HashSet::new();
    for (a, _) in &lc {
        let mut deg = 0u64;
        let mut key = Vec::new();
        for (j, (r, c)) in rc.iter().enumerate() {
            if a.is_disjoint(r) {
                deg += c;
                key.push(j as u32);
            }
        }
        if deg >= min_degree {
            seen.insert(key);
        }
    }
    seen.len() as u64
}

pub fn distinct_neighborhood_count_explicit(g: &ExplicitBipartiteGraph, min_degree: u64) -> u64 {
    let rows = g.bit_rows();
    let mut seen: HashSet<&[u64]> = HashSet::new();
    for v in 0..g.n_left() {
        let row = rows.row(v);
        if mask::count_ones(row) as u64 >= min_degree {
            seen.insert(row);
        }
    }
    seen.len() as u64
}
