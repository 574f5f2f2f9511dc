//! Closed-form probabilities for the random clause model, the
//! Chernoff-Hoeffding tail bound and the distinct-neighborhood lower bound
//! on CNF size.

use serde::{Deserialize, Serialize};

use crate::analytics::distinct_neighborhood_count_explicit;
use crate::caps::choose2_u128;
use crate::error::{Error, Result};
use crate::graph::ExplicitBipartiteGraph;

fn check_p(p: f64) -> Result<()> {
    if (0.0..=1.0).contains(&p) {
        Ok(())
    } else {
        Err(Error::domain(format!("p = {p} must lie in [0, 1]")))
    }
}

/// `base^n`, switching to log space when `n` exceeds the `powi` range.
fn pow_u64(base: f64, n: u64) -> f64 {
    match i32::try_from(n) {
        Ok(k) => base.powi(k),
        Err(_) if base == 0.0 => 0.0,
        Err(_) => (n as f64 * base.ln()).exp(),
    }
}

/// `pairs * base^n`, evaluated in log space when `base^n` underflows.
fn scaled_pow(pairs: f64, base: f64, n: u64) -> f64 {
    let direct = pow_u64(base, n);
    if direct >= f64::MIN_POSITIVE || base == 0.0 || pairs == 0.0 {
        pairs * direct
    } else {
        (pairs.ln() + n as f64 * base.ln()).exp()
    }
}

/// Probability `(1 - p^2)^n` that a fixed pair is an edge.
pub fn edge_probability(p: f64, n: u64) -> Result<f64> {
    check_p(p)?;
    Ok(pow_u64(1.0 - p * p, n))
}

/// Probability that one clause leaves a fixed quadruple `{v1,v2} x {w1,w2}`
/// intact: `1 - (2p - p^2)^2`.
///
/// The clause destroys it iff it excludes one of the left vertices and one
/// of the right vertices, each an independent event of probability
/// `1 - (1-p)^2`.
pub fn k22_clause_survival(p: f64) -> Result<f64> {
    check_p(p)?;
    let hit = 2.0 * p - p * p;
    Ok(1.0 - hit * hit)
}

pub fn k22_probability(p: f64, n: u64) -> Result<f64> {
    Ok(pow_u64(k22_clause_survival(p)?, n))
}

/// `C(N_L,2) * C(N_R,2) * survival^n`.
pub fn expected_k22(n_left: u64, n_right: u64, p: f64, n: u64) -> Result<f64> {
    let pairs = choose2_u128(n_left as u128) as f64 * choose2_u128(n_right as u128) as f64;
    Ok(scaled_pow(pairs, k22_clause_survival(p)?, n))
}

/// `N_R * (1 - p^2)^n`.
pub fn expected_degree(n_right: u64, p: f64, n: u64) -> Result<f64> {
    check_p(p)?;
    Ok(scaled_pow(n_right as f64, 1.0 - p * p, n))
}

/// Expected K_{2,2} count of the independent-edge baseline with edge
/// probability `q`: `C(N_L,2) * C(N_R,2) * q^4`.
pub fn expected_k22_bernoulli(n_left: u64, n_right: u64, q: f64) -> Result<f64> {
    check_p(q)?;
    let pairs = choose2_u128(n_left as u128) as f64 * choose2_u128(n_right as u128) as f64;
    Ok(pairs * q.powi(4))
}

/// `min(1, 2 exp(-2 mu^2 M))`, bounding `Pr(|sum X_j - pM| >= mu M)` for `M`
/// i.i.d. Bernoulli variables.
pub fn chernoff_bound(samples: u64, mu: f64) -> Result<f64> {
    if samples == 0 {
        return Err(Error::domain("Chernoff bound needs at least one sample"));
    }
    if !(mu >= 0.0 && mu.is_finite()) {
        return Err(Error::domain(format!("mu = {mu} must be a nonnegative number")));
    }
    Ok((2.0 * (-2.0 * mu * mu * samples as f64).exp()).min(1.0))
}

/// The `delta` for which `(d/N)^(4 - delta)` equals the exact K_{2,2}
/// probability when `d/N = (1-p^2)^n`. Independent of `n`; undefined at
/// `p = 0` and `p = 1`.
pub fn implied_delta(p: f64) -> Result<Option<f64>> {
    let survival = k22_clause_survival(p)?;
    let edge = 1.0 - p * p;
    if p == 0.0 || survival == 0.0 || edge == 0.0 {
        return Ok(None);
    }
    Ok(Some(4.0 - survival.ln() / edge.ln()))
}

/// `ceil(log2 D)` for `D` distinct neighborhoods; 0 when `D <= 1`.
pub fn lower_bound_from_distinct(distinct: u64) -> u32 {
    if distinct <= 1 {
        0
    } else {
        u64::BITS - (distinct - 1).leading_zeros()
    }
}

/// Minimum clause count of any CNF for `g`: a CNF with `n` clauses gives
/// every left vertex one of at most `2^n` neighborhoods.
pub fn cnf_size_lower_bound(g: &ExplicitBipartiteGraph) -> u32 {
    lower_bound_from_distinct(distinct_neighborhood_count_explicit(g, 0))
}

/// Parameters for a batch of closed-form evaluations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundInputs {
    pub p: f64,
    pub n: u64,
    pub n_left: u64,
    pub n_right: u64,
    /// Sample count and deviation for the Chernoff bound; both or neither.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub samples: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mu: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Expectations {
    pub edge_probability: f64,
    pub k22_probability: f64,
    pub expected_degree: f64,
    pub expected_k22: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub chernoff_bound: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub implied_delta: Option<f64>,
}

impl BoundInputs {
    pub fn evaluate(&self) -> Result<Expectations> {
        let chernoff = match (self.samples, self.mu) {
            (Some(m), Some(mu)) => Some(chernoff_bound(m, mu)?),
            (None, None) => None,
            _ => return Err(Error::domain("Chernoff bound needs both samples and mu")),
        };
        Ok(Expectations {
            edge_probability: edge_probability(self.p, self.n)?,
            k22_probability: k22_probability(self.p, self.n)?,
            expected_degree: expected_degree(self.n_right, self.p, self.n)?,
            expected_k22: expected_k22(self.n_left, self.n_right, self.p, self.n)?,
            chernoff_bound: chernoff,
            implied_delta: implied_delta(self.p)?,
        })
    }
}
