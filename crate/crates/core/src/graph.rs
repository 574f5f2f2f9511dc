//! Clause systems, explicit bipartite graphs and the conversions between them.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::caps::Caps;
use crate::error::{Error, Result};
use crate::mask::{self, Mask};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Left,
    Right,
}

impl Side {
    pub fn as_str(self) -> &'static str {
        match self {
            Side::Left => "left",
            Side::Right => "right",
        }
    }
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Side {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "left" => Ok(Side::Left),
            "right" => Ok(Side::Right),
            other => Err(Error::Parse(format!("unknown side {other:?}"))),
        }
    }
}

/// Membership of `(v, w)` in the clause graph `(A x W) u (V x B)`.
///
/// `a` and `b` are indicator vectors over the left and right vertex sets.
pub fn clause_graph_contains(a: &[bool], b: &[bool], v: usize, w: usize) -> Result<bool> {
    check_index(Side::Left, v, a.len())?;
    check_index(Side::Right, w, b.len())?;
    Ok(a[v] || b[w])
}

fn check_index(side: Side, index: usize, len: usize) -> Result<()> {
    if index >= len {
        Err(Error::IndexOutOfRange {
            side: side.as_str(),
            index,
            len,
        })
    } else {
        Ok(())
    }
}

/// A bipartite graph given implicitly as the intersection of `n` clause graphs.
///
/// Masks are stored flat, `words_for(n)` words per vertex.
#[derive(Clone, PartialEq, Eq)]
pub struct ClauseSystem {
    n: usize,
    n_left: usize,
    n_right: usize,
    stride: usize,
    left: Vec<u64>,
    right: Vec<u64>,
}

impl fmt::Debug for ClauseSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ClauseSystem")
            .field("n", &self.n)
            .field("n_left", &self.n_left)
            .field("n_right", &self.n_right)
            .finish_non_exhaustive()
    }
}

impl ClauseSystem {
    pub fn new(n: usize, left_masks: &[Mask], right_masks: &[Mask]) -> Result<Self> {
        let stride = mask::words_for(n);
        let mut left = Vec::with_capacity(stride * left_masks.len());
        let mut right = Vec::with_capacity(stride * right_masks.len());
        for (masks, out) in [(left_masks, &mut left), (right_masks, &mut right)] {
            for m in masks {
                check_width(n, m.words())?;
                let ws = m.words();
                out.extend((0..stride).map(|i| ws.get(i).copied().unwrap_or(0)));
            }
        }
        Ok(ClauseSystem {
            n,
            n_left: left_masks.len(),
            n_right: right_masks.len(),
            stride,
            left,
            right,
        })
    }

    /// Convenience constructor for `n <= 64`.
    pub fn from_u64(n: usize, left_masks: &[u64], right_masks: &[u64]) -> Result<Self> {
        if n > 64 {
            return Err(Error::domain(format!(
                "from_u64 supports at most 64 clauses, got {n}"
            )));
        }
        let conv = |ms: &[u64]| ms.iter().map(|&m| Mask::from_u64(n, m)).collect::<Vec<_>>();
        let (l, r) = (conv(left_masks), conv(right_masks));
        // Mask::from_u64 with n == 0 drops the value, so validate against the raw input too.
        for &m in left_masks.iter().chain(right_masks) {
            check_width(n, &[m])?;
        }
        Self::new(n, &l, &r)
    }

    /// Builds from flat word storage already known to be valid.
    pub(crate) fn from_raw(
        n: usize,
        n_left: usize,
        n_right: usize,
        left: Vec<u64>,
        right: Vec<u64>,
    ) -> Self {
        let stride = mask::words_for(n);
        debug_assert_eq!(left.len(), stride * n_left);
        debug_assert_eq!(right.len(), stride * n_right);
        ClauseSystem {
            n,
            n_left,
            n_right,
            stride,
            left,
            right,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn n_left(&self) -> usize {
        self.n_left
    }

    pub fn n_right(&self) -> usize {
        self.n_right
    }

    pub fn side_len(&self, side: Side) -> usize {
        match side {
            Side::Left => self.n_left,
            Side::Right => self.n_right,
        }
    }

    /// Mask words of left vertex `v`. Panics when out of range.
    pub fn left_words(&self, v: usize) -> &[u64] {
        &self.left[v * self.stride..(v + 1) * self.stride]
    }

    pub fn right_words(&self, w: usize) -> &[u64] {
        &self.right[w * self.stride..(w + 1) * self.stride]
    }

    pub(crate) fn words(&self, side: Side, i: usize) -> &[u64] {
        match side {
            Side::Left => self.left_words(i),
            Side::Right => self.right_words(i),
        }
    }

    pub fn left_mask(&self, v: usize) -> Result<Mask> {
        check_index(Side::Left, v, self.n_left)?;
        Ok(Mask::from_words(self.left_words(v)))
    }

    pub fn right_mask(&self, w: usize) -> Result<Mask> {
        check_index(Side::Right, w, self.n_right)?;
        Ok(Mask::from_words(self.right_words(w)))
    }

    pub fn masks(&self, side: Side) -> Vec<Mask> {
        (0..self.side_len(side))
            .map(|i| Mask::from_words(self.words(side, i)))
            .collect()
    }

    /// `(v, w)` is an edge iff no clause excludes both endpoints.
    pub fn adjacent(&self, v: usize, w: usize) -> Result<bool> {
        check_index(Side::Left, v, self.n_left)?;
        check_index(Side::Right, w, self.n_right)?;
        Ok(mask::disjoint(self.left_words(v), self.right_words(w)))
    }

    /// Right neighbors of `v`, ascending. With `S_v = 0` this is all of `W`.
    pub fn neighborhood(&self, v: usize) -> Result<Vec<usize>> {
        check_index(Side::Left, v, self.n_left)?;
        let s = self.left_words(v);
        Ok((0..self.n_right)
            .filter(|&w| mask::disjoint(s, self.right_words(w)))
            .collect())
    }

    pub fn materialize(&self, caps: &Caps) -> Result<ExplicitBipartiteGraph> {
        let pairs = self.n_left as u128 * self.n_right as u128;
        if pairs > caps.max_pairs as u128 {
            return Err(Error::CapExceeded {
                what: "materialization pair tests",
                requested: pairs,
                limit: caps.max_pairs as u128,
            });
        }
        let mut edges = Vec::new();
        for v in 0..self.n_left {
            let s = self.left_words(v);
            for w in 0..self.n_right {
                if mask::disjoint(s, self.right_words(w)) {
                    edges.push((v, w));
                }
            }
        }
        Ok(ExplicitBipartiteGraph {
            n_left: self.n_left,
            n_right: self.n_right,
            edges,
        })
    }

    pub fn mask_histogram(&self, side: Side) -> MaskHistogram {
        let mut entries = BTreeMap::new();
        for i in 0..self.side_len(side) {
            *entries
                .entry(Mask::from_words(self.words(side, i)))
                .or_insert(0u64) += 1;
        }
        MaskHistogram { side, entries }
    }

    /// Sub-system on the given left vertices (in the given order) and,
    /// optionally, a subset of right vertices. The clause count is unchanged.
    pub fn restrict(&self, left: &[usize], right: Option<&[usize]>) -> Result<ClauseSystem> {
        let mut l = Vec::with_capacity(left.len() * self.stride);
        for &v in left {
            check_index(Side::Left, v, self.n_left)?;
            l.extend_from_slice(self.left_words(v));
        }
        let (n_right, r) = match right {
            None => (self.n_right, self.right.clone()),
            Some(ws) => {
                let mut r = Vec::with_capacity(ws.len() * self.stride);
                for &w in ws {
                    check_index(Side::Right, w, self.n_right)?;
                    r.extend_from_slice(self.right_words(w));
                }
                (ws.len(), r)
            }
        };
        Ok(Self::from_raw(self.n, left.len(), n_right, l, r))
    }

    /// Indicator vectors of `A_i` and `B_i` rebuilt from the mask bits.
    #[doc(hidden)]
    pub fn clause_sets(&self, i: usize) -> (Vec<bool>, Vec<bool>) {
        assert!(i < self.n, "clause {i} out of range");
        let bit_clear = |words: &[u64]| (words[i / 64] >> (i % 64)) & 1 == 0;
        let a = (0..self.n_left).map(|v| bit_clear(self.left_words(v))).collect();
        let b = (0..self.n_right).map(|w| bit_clear(self.right_words(w))).collect();
        (a, b)
    }
}

fn check_width(n: usize, words: &[u64]) -> Result<()> {
    match mask::ones(words).find(|&b| b >= n) {
        Some(bit) => Err(Error::domain(format!(
            "mask has bit {bit} set but there are only {n} clauses"
        ))),
        None => Ok(()),
    }
}

/// Multiset of masks on one side of a clause system.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MaskHistogram {
    pub side: Side,
    pub entries: BTreeMap<Mask, u64>,
}

impl MaskHistogram {
    pub fn new(side: Side) -> Self {
        MaskHistogram {
            side,
            entries: BTreeMap::new(),
        }
    }

    pub fn total(&self) -> u64 {
        self.entries.values().sum()
    }

    /// Number of distinct masks.
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, m: &Mask) -> u64 {
        self.entries.get(m).copied().unwrap_or(0)
    }
}

/// Explicit edge-list bipartite graph. Edges are kept sorted and unique.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExplicitBipartiteGraph {
    n_left: usize,
    n_right: usize,
    edges: Vec<(usize, usize)>,
}

impl ExplicitBipartiteGraph {
    pub fn new(n_left: usize, n_right: usize, mut edges: Vec<(usize, usize)>) -> Result<Self> {
        for &(v, w) in &edges {
            check_index(Side::Left, v, n_left)?;
            check_index(Side::Right, w, n_right)?;
        }
        edges.sort_unstable();
        if let Some(pair) = edges.windows(2).find(|p| p[0] == p[1]) {
            return Err(Error::domain(format!("duplicate edge {:?}", pair[0])));
        }
        Ok(ExplicitBipartiteGraph {
            n_left,
            n_right,
            edges,
        })
    }

    pub fn complete(n_left: usize, n_right: usize) -> Self {
        let edges = (0..n_left)
            .flat_map(|v| (0..n_right).map(move |w| (v, w)))
            .collect();
        ExplicitBipartiteGraph {
            n_left,
            n_right,
            edges,
        }
    }

    pub fn n_left(&self) -> usize {
        self.n_left
    }

    pub fn n_right(&self) -> usize {
        self.n_right
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn has_edge(&self, v: usize, w: usize) -> bool {
        self.edges.binary_search(&(v, w)).is_ok()
    }

    pub fn neighborhood(&self, v: usize) -> Result<Vec<usize>> {
        check_index(Side::Left, v, self.n_left)?;
        let start = self.edges.partition_point(|&(a, _)| a < v);
        Ok(self.edges[start..]
            .iter()
            .take_while(|&&(a, _)| a == v)
            .map(|&(_, w)| w)
            .collect())
    }

    pub fn degrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.n_left];
        for &(v, _) in &self.edges {
            deg[v] += 1;
        }
        deg
    }

    /// Subgraph induced on the given left and right vertices, relabelled by
    /// position in the provided lists.
    pub fn induced(&self, left: &[usize], right: &[usize]) -> Result<Self> {
        let mut lmap = vec![usize::MAX; self.n_left];
        let mut rmap = vec![usize::MAX; self.n_right];
        for (i, &v) in left.iter().enumerate() {
            check_index(Side::Left, v, self.n_left)?;
            lmap[v] = i;
        }
        for (i, &w) in right.iter().enumerate() {
            check_index(Side::Right, w, self.n_right)?;
            rmap[w] = i;
        }
        let edges = self
            .edges
            .iter()
            .filter(|&&(v, w)| lmap[v] != usize::MAX && rmap[w] != usize::MAX)
            .map(|&(v, w)| (lmap[v], rmap[w]))
            .collect();
        Self::new(left.len(), right.len(), edges)
    }

    pub(crate) fn bit_rows(&self) -> BitRows {
        let mut rows = BitRows::new(self.n_left, self.n_right);
        for &(v, w) in &self.edges {
            rows.set(v, w);
        }
        rows
    }

    /// Text form: `p bip <n_left> <n_right> <edge_count>` then one `v w` per line.
    pub fn to_edge_list(&self) -> String {
        let mut out = format!(
            "p bip {} {} {}\n",
            self.n_left,
            self.n_right,
            self.edges.len()
        );
        for (v, w) in &self.edges {
            out.push_str(&format!("{v} {w}\n"));
        }
        out
    }

    pub fn from_edge_list(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty())
            .enumerate();
        let (_, header) = lines
            .next()
            .ok_or_else(|| Error::Parse("empty edge list".into()))?;
        let fields: Vec<&str> = header.split_whitespace().collect();
        if fields.len() != 5 || fields[0] != "p" || fields[1] != "bip" {
            return Err(Error::Parse(format!("bad edge-list header {header:?}")));
        }
        let num = |s: &str| {
            s.parse::<usize>()
                .map_err(|e| Error::Parse(format!("bad integer {s:?}: {e}")))
        };
        let (n_left, n_right, m) = (num(fields[2])?, num(fields[3])?, num(fields[4])?);
        let mut edges = Vec::with_capacity(m);
        for (lineno, line) in lines {
            let mut it = line.split_whitespace();
            let (Some(v), Some(w), None) = (it.next(), it.next(), it.next()) else {
                return Err(Error::Parse(format!(
                    "line {}: expected `v w`, got {line:?}",
                    lineno + 1
                )));
            };
            edges.push((num(v)?, num(w)?));
        }
        if edges.len() != m {
            return Err(Error::Parse(format!(
                "header announces {m} edges, found {}",
                edges.len()
            )));
        }
        Self::new(n_left, n_right, edges)
    }
}

/// Dense adjacency rows, one bit per right vertex.
#[derive(Debug, Clone)]
pub(crate) struct BitRows {
    stride: usize,
    data: Vec<u64>,
}

impl BitRows {
    pub(crate) fn new(rows: usize, cols: usize) -> Self {
        let stride = cols.div_ceil(64);
        BitRows {
            stride,
            data: vec![0; rows * stride],
        }
    }

    pub(crate) fn set(&mut self, r: usize, c: usize) {
        self.data[r * self.stride + c / 64] |= 1 << (c % 64);
    }

    pub(crate) fn get(&self, r: usize, c: usize) -> bool {
        (self.data[r * self.stride + c / 64] >> (c % 64)) & 1 == 1
    }

    pub(crate) fn row(&self, r: usize) -> &[u64] {
        &self.data[r * self.stride..(r + 1) * self.stride]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path() -> ClauseSystem {
        ClauseSystem::from_u64(1, &[1, 0], &[1, 0]).unwrap()
    }

    #[test]
    fn clause_graph_membership() {
        let none = [false; 3];
        let all = [true; 3];
        for v in 0..3 {
            for w in 0..3 {
                assert!(!clause_graph_contains(&none, &none, v, w).unwrap());
                assert!(clause_graph_contains(&all, &none, v, w).unwrap());
            }
        }
        let a = [true, false, false];
        let b = [false, true, false];
        assert!(clause_graph_contains(&a, &b, 2, 1).unwrap());
        assert!(!clause_graph_contains(&a, &b, 2, 0).unwrap());
        assert!(clause_graph_contains(&a, &b, 3, 0).is_err());
        assert!(clause_graph_contains(&a, &b, 0, 3).is_err());
    }

    #[test]
    fn adjacency_by_disjointness() {
        let cs = ClauseSystem::from_u64(4, &[0b0101, 0b0100], &[0b1010, 0b0110]).unwrap();
        assert!(cs.adjacent(0, 0).unwrap());
        assert!(!cs.adjacent(1, 1).unwrap());
        assert!(cs.adjacent(2, 0).is_err());
        assert!(cs.adjacent(0, 2).is_err());

        let empty = ClauseSystem::from_u64(0, &[0, 0], &[0, 0, 0]).unwrap();
        for v in 0..2 {
            for w in 0..3 {
                assert!(empty.adjacent(v, w).unwrap());
            }
        }
    }

    #[test]
    fn rejects_bits_beyond_n() {
        assert!(ClauseSystem::from_u64(2, &[0b100], &[]).is_err());
        assert!(ClauseSystem::from_u64(0, &[1], &[]).is_err());
        assert!(ClauseSystem::from_u64(65, &[], &[]).is_err());
        let wide = Mask::full(64);
        assert!(ClauseSystem::new(64, &[wide.clone()], &[wide]).is_ok());
        assert!(ClauseSystem::new(63, &[Mask::full(64)], &[]).is_err());
        assert!(ClauseSystem::new(65, &[Mask::full(64)], &[]).is_ok());
    }

    #[test]
    fn materialize_examples() {
        let cs = ClauseSystem::from_u64(0, &[0, 0], &[0, 0]).unwrap();
        assert_eq!(cs.materialize(&Caps::default()).unwrap().edge_count(), 4);

        let g = path().materialize(&Caps::default()).unwrap();
        assert_eq!(g.edges(), &[(0, 1), (1, 0), (1, 1)]);

        let cs = ClauseSystem::from_u64(3, &[], &[1, 2]).unwrap();
        assert_eq!(cs.materialize(&Caps::default()).unwrap().edge_count(), 0);

        let caps = Caps {
            max_pairs: 3,
            ..Caps::default()
        };
        let err = path().materialize(&caps).unwrap_err();
        assert!(err.is_cap());
    }

    #[test]
    fn histogram_examples() {
        let cs = ClauseSystem::from_u64(1, &[0, 0, 0], &[]).unwrap();
        let h = cs.mask_histogram(Side::Left);
        assert_eq!(h.len(), 1);
        assert_eq!(h.get(&Mask::from_u64(1, 0)), 3);

        let cs = ClauseSystem::from_u64(1, &[1, 0, 1], &[]).unwrap();
        let h = cs.mask_histogram(Side::Left);
        assert_eq!(h.get(&Mask::from_u64(1, 1)), 2);
        assert_eq!(h.get(&Mask::from_u64(1, 0)), 1);
        assert_eq!(h.total(), 3);

        assert!(cs.mask_histogram(Side::Right).is_empty());
    }

    #[test]
    fn neighborhood_examples() {
        let cs = ClauseSystem::from_u64(1, &[0, 1], &[1, 0]).unwrap();
        assert_eq!(cs.neighborhood(0).unwrap(), vec![0, 1]);
        assert_eq!(cs.neighborhood(1).unwrap(), vec![1]);
        assert!(cs.neighborhood(2).is_err());

        let no_right = ClauseSystem::from_u64(1, &[1], &[]).unwrap();
        assert!(no_right.neighborhood(0).unwrap().is_empty());
    }

    #[test]
    fn edge_list_text_format() {
        let g = path().materialize(&Caps::default()).unwrap();
        let text = g.to_edge_list();
        assert_eq!(text, "p bip 2 2 3\n0 1\n1 0\n1 1\n");
        assert_eq!(ExplicitBipartiteGraph::from_edge_list(&text).unwrap(), g);

        assert!(ExplicitBipartiteGraph::from_edge_list("p bip 2 2 2\n0 1\n").is_err());
        assert!(ExplicitBipartiteGraph::from_edge_list("p bip 2 2 1\n0 5\n").is_err());
        assert!(ExplicitBipartiteGraph::from_edge_list("p bip 2 2 2\n0 1\n0 1\n").is_err());
        assert!(ExplicitBipartiteGraph::from_edge_list("q bip 2 2 0\n").is_err());
    }

    #[test]
    fn explicit_neighborhood_and_induced() {
        let g = ExplicitBipartiteGraph::new(3, 3, vec![(2, 0), (0, 1), (2, 2)]).unwrap();
        assert_eq!(g.neighborhood(2).unwrap(), vec![0, 2]);
        assert!(g.neighborhood(1).unwrap().is_empty());
        let sub = g.induced(&[2], &[2, 0]).unwrap();
        assert_eq!(sub.edges(), &[(0, 0), (0, 1)]);
    }
}
