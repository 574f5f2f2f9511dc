//! Seeded sampling of random clause systems and Bernoulli baseline graphs.
//!
//! Every random stream is a ChaCha8 generator whose 256-bit key is expanded
//! from a 64-bit seed with SplitMix64 (four consecutive outputs, little-endian).
//! Replicate `r` of a run with master seed `s` uses seed
//! `splitmix64(s ^ splitmix64(r))`. Both rules are part of the instance
//! format and must not change.

use rand::distributions::{Bernoulli, Distribution};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{ClauseSystem, ExplicitBipartiteGraph};
use crate::mask;

const GOLDEN_GAMMA: u64 = 0x9e37_79b9_7f4a_7c15;

/// One SplitMix64 step: advances `x` by the golden gamma and mixes.
pub fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(GOLDEN_GAMMA);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

pub fn replicate_seed(master: u64, replicate: u64) -> u64 {
    splitmix64(master ^ splitmix64(replicate))
}

pub type StreamRng = ChaCha8Rng;

pub fn stream_rng(seed: u64) -> StreamRng {
    let mut key = [0u8; 32];
    let mut state = seed;
    for chunk in key.chunks_exact_mut(8) {
        chunk.copy_from_slice(&splitmix64(state).to_le_bytes());
        state = state.wrapping_add(GOLDEN_GAMMA);
    }
    ChaCha8Rng::from_seed(key)
}

/// Whether the degenerate probabilities `p = 0` and `p = 1` are accepted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Validation {
    #[default]
    Strict,
    AllowDegenerate,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    /// Target average degree.
    pub d: f64,
    /// Probability that a vertex is excluded from a given clause.
    pub p: f64,
    pub n_left: usize,
    pub n_right: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_clauses: Option<usize>,
    pub seed: u64,
}

impl ModelParams {
    pub const PAPER_P: f64 = 0.01;
    pub const PAPER_SIZE_EXPONENT: i32 = 10;

    /// Preset with `p = 1/100` and `N = d^10` on both sides.
    ///
    /// Only usable for analytic expectations: the side sizes are far beyond
    /// anything that can be sampled.
    pub fn asymptotic_preset(d: f64, seed: u64) -> Result<Self> {
        let size = d.powi(Self::PAPER_SIZE_EXPONENT);
        if !(size.is_finite() && size >= 1.0 && size <= usize::MAX as f64) {
            return Err(Error::domain(format!("d^10 is not a usable size for d = {d}")));
        }
        let size = size.round() as usize;
        Ok(ModelParams {
            d,
            p: Self::PAPER_P,
            n_left: size,
            n_right: size,
            n_clauses: None,
            seed,
        })
    }

    pub fn validate(&self, validation: Validation) -> Result<()> {
        let p_ok = match validation {
            Validation::Strict => self.p > 0.0 && self.p < 1.0,
            Validation::AllowDegenerate => (0.0..=1.0).contains(&self.p),
        };
        if !p_ok {
            return Err(Error::domain(format!(
                "p = {} is outside the allowed range",
                self.p
            )));
        }
        if self.n_left == 0 || self.n_right == 0 {
            return Err(Error::domain("side sizes must be positive"));
        }
        if !(self.d > 0.0 && self.d.is_finite()) {
            return Err(Error::domain(format!("d = {} must be positive", self.d)));
        }
        if self.n_clauses.is_none() && self.d >= self.n_left.min(self.n_right) as f64 {
            return Err(Error::domain(format!(
                "d = {} must be below min(n_left, n_right) = {} to derive the clause count",
                self.d,
                self.n_left.min(self.n_right)
            )));
        }
        Ok(())
    }

    /// The explicit override, or the derived count against the right side size.
    pub fn clause_count(&self) -> Result<usize> {
        match self.n_clauses {
            Some(n) => Ok(n),
            None => choose_clause_count(self.p, self.n_right as u64, self.d),
        }
    }
}

/// Nearest integer to `ln(N/d) / p^2`, so that `(1 - p^2)^n` is close to `d/N`.
pub fn choose_clause_count(p: f64, size: u64, d: f64) -> Result<usize> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::domain(format!("p = {p} must lie in (0, 1)")));
    }
    if size == 0 || d.is_nan() || d <= 0.0 || d > size as f64 {
        return Err(Error::domain(format!(
            "need 0 < d <= N, got d = {d}, N = {size}"
        )));
    }
    let n = (size as f64 / d).ln() / (p * p);
    if !n.is_finite() || n > usize::MAX as f64 {
        return Err(Error::domain(format!("clause count {n} is not representable")));
    }
    Ok(n.round() as usize)
}

#[derive(Debug, Clone, Copy)]
pub struct SampleOptions {
    pub validation: Validation,
    /// Largest clause count the sampler will produce.
    pub max_clauses: usize,
}

impl SampleOptions {
    pub const DEFAULT_MAX_CLAUSES: usize = 4096;
}

impl Default for SampleOptions {
    fn default() -> Self {
        SampleOptions {
            validation: Validation::Strict,
            max_clauses: Self::DEFAULT_MAX_CLAUSES,
        }
    }
}

/// Draws every mask bit as an independent Bernoulli(p).
///
/// Bits are drawn left vertices first, then right vertices; within a vertex
/// in ascending clause order.
pub fn sample_cnf<R: Rng + ?Sized>(
    params: &ModelParams,
    opts: &SampleOptions,
    rng: &mut R,
) -> Result<ClauseSystem> {
    params.validate(opts.validation)?;
    let n = params.clause_count()?;
    if n > opts.max_clauses {
        return Err(Error::CapExceeded {
            what: "clause count",
            requested: n as u128,
            limit: opts.max_clauses as u128,
        });
    }
    let bit = Bernoulli::new(params.p).map_err(|e| Error::domain(e.to_string()))?;
    let stride = mask::words_for(n);
    let mut draw_side = |count: usize| {
        let mut words = vec![0u64; count * stride];
        for v in 0..count {
            let row = &mut words[v * stride..(v + 1) * stride];
            for i in 0..n {
                if bit.sample(rng) {
                    row[i / 64] |= 1 << (i % 64);
                }
            }
        }
        words
    };
    let left = draw_side(params.n_left);
    let right = draw_side(params.n_right);
    Ok(ClauseSystem::from_raw(
        n,
        params.n_left,
        params.n_right,
        left,
        right,
    ))
}

/// Each pair is an edge independently with probability `q`; pairs are drawn
/// in lexicographic order.
pub fn sample_bernoulli_graph<R: Rng + ?Sized>(
    n_left: usize,
    n_right: usize,
    q: f64,
    rng: &mut R,
) -> Result<ExplicitBipartiteGraph> {
    let coin = Bernoulli::new(q).map_err(|_| Error::domain(format!("q = {q} must lie in [0, 1]")))?;
    let mut edges = Vec::new();
    for v in 0..n_left {
        for w in 0..n_right {
            if coin.sample(rng) {
                edges.push((v, w));
            }
        }
    }
    ExplicitBipartiteGraph::new(n_left, n_right, edges)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(p: f64, n: usize, size: usize) -> ModelParams {
        ModelParams {
            d: 1.0,
            p,
            n_left: size,
            n_right: size,
            n_clauses: Some(n),
            seed: 7,
        }
    }

    #[test]
    fn clause_count_examples() {
        // 4 ln 512 = 24.953...
        assert_eq!(choose_clause_count(0.5, 1024, 2.0).unwrap(), 25);
        // 100 ln 100 = 460.517...
        assert_eq!(choose_clause_count(0.1, 1000, 10.0).unwrap(), 461);
        assert_eq!(choose_clause_count(0.3, 77, 77.0).unwrap(), 0);
    }

    #[test]
    fn clause_count_domain() {
        assert!(choose_clause_count(0.0, 100, 2.0).is_err());
        assert!(choose_clause_count(1.0, 100, 2.0).is_err());
        assert!(choose_clause_count(0.5, 100, 200.0).is_err());
        assert!(choose_clause_count(0.5, 100, 0.0).is_err());
        assert!(choose_clause_count(0.5, 0, 1.0).is_err());
    }

    #[test]
    fn clause_count_monotone() {
        for size in [10u64, 100, 1000, 100_000] {
            let mut prev = usize::MAX;
            for d in [1.0, 2.0, 3.5, 5.0, 9.0] {
                let n = choose_clause_count(0.2, size, d).unwrap();
                assert!(n <= prev);
                prev = n;
            }
        }
        for d in [1.0, 4.0] {
            let mut prev = 0;
            for size in [10u64, 50, 1000, 1 << 20] {
                let n = choose_clause_count(0.2, size, d).unwrap();
                assert!(n >= prev);
                prev = n;
            }
        }
    }

    #[test]
    fn degenerate_probabilities() {
        let opts = SampleOptions {
            validation: Validation::AllowDegenerate,
            ..SampleOptions::default()
        };
        let zero = sample_cnf(&params(0.0, 5, 4), &opts, &mut stream_rng(1)).unwrap();
        assert!((0..4).all(|v| zero.left_words(v)[0] == 0 && zero.right_words(v)[0] == 0));
        let one = sample_cnf(&params(1.0, 5, 4), &opts, &mut stream_rng(1)).unwrap();
        assert!((0..4).all(|v| one.left_words(v)[0] == 0b11111));
        assert!(!one.adjacent(0, 0).unwrap());

        let strict = SampleOptions::default();
        assert!(sample_cnf(&params(0.0, 5, 4), &strict, &mut stream_rng(1)).is_err());
        assert!(sample_cnf(&params(1.0, 5, 4), &strict, &mut stream_rng(1)).is_err());
    }

    #[test]
    fn bit_frequency() {
        let cs = sample_cnf(&params(0.3, 20, 1000), &SampleOptions::default(), &mut stream_rng(11))
            .unwrap();
        let ones: u32 = (0..1000)
            .map(|v| cs.left_words(v)[0].count_ones() + cs.right_words(v)[0].count_ones())
            .sum();
        let frac = ones as f64 / 40_000.0;
        let sd = (0.3f64 * 0.7 / 40_000.0).sqrt();
        assert!((frac - 0.3).abs() <= 5.0 * sd, "fraction {frac}");
    }

    #[test]
    fn wide_masks_are_sampled() {
        let cs = sample_cnf(&params(0.5, 130, 3), &SampleOptions::default(), &mut stream_rng(2))
            .unwrap();
        assert_eq!(cs.n(), 130);
        assert_eq!(cs.left_words(0).len(), 3);
        assert_eq!(cs.left_words(0)[2] >> 2, 0);
    }

    #[test]
    fn clause_limit_reported() {
        let opts = SampleOptions {
            max_clauses: 10,
            ..SampleOptions::default()
        };
        let err = sample_cnf(&params(0.5, 11, 3), &opts, &mut stream_rng(2)).unwrap_err();
        assert!(err.is_cap());
    }

    #[test]
    fn determinism() {
        let p = params(0.3, 12, 50);
        let a = sample_cnf(&p, &SampleOptions::default(), &mut stream_rng(99)).unwrap();
        let b = sample_cnf(&p, &SampleOptions::default(), &mut stream_rng(99)).unwrap();
        let c = sample_cnf(&p, &SampleOptions::default(), &mut stream_rng(100)).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
        assert_ne!(replicate_seed(5, 0), replicate_seed(5, 1));
        assert_ne!(replicate_seed(5, 0), replicate_seed(6, 0));
    }

    #[test]
    fn bernoulli_graph() {
        let mut rng = stream_rng(3);
        assert_eq!(sample_bernoulli_graph(10, 10, 0.0, &mut rng).unwrap().edge_count(), 0);
        assert_eq!(sample_bernoulli_graph(10, 10, 1.0, &mut rng).unwrap().edge_count(), 100);
        let m = sample_bernoulli_graph(100, 100, 0.5, &mut rng).unwrap().edge_count() as f64;
        assert!((m - 5000.0).abs() <= 5.0 * 50.0);
        assert!(sample_bernoulli_graph(2, 2, 1.5, &mut rng).is_err());
    }

    #[test]
    fn preset_and_validation() {
        let preset = ModelParams::asymptotic_preset(4.0, 1).unwrap();
        assert_eq!(preset.n_left, 1 << 20);
        assert_eq!(preset.p, 0.01);
        let mut bad = params(0.3, 4, 10);
        bad.n_clauses = None;
        bad.d = 10.0;
        assert!(bad.validate(Validation::Strict).is_err());
        bad.d = 9.0;
        assert!(bad.validate(Validation::Strict).is_ok());
    }
}
