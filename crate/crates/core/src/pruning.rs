//! Removal of low-degree and K_{2,2}-participating left vertices.
//!
//! The survivors `V'` keep their masks, so the pruned graph is the
//! intersection of the same `n` clause graphs restricted to `V'`.

use serde::{Deserialize, Serialize};

use crate::analytics::{count_k22, degrees, K22Report};
use crate::bounds::expected_degree;
use crate::caps::Caps;
use crate::error::{Error, Result};
use crate::graph::ClauseSystem;
use crate::random::ModelParams;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct PruneOptions {
    /// Minimum degree a left vertex needs to survive.
    pub threshold: u64,
    /// Also drop right vertices that lie in some K_{2,2}. Off by default.
    pub prune_right: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PruneStats {
    /// Left vertices below the threshold (counted here even if they are also
    /// in a K_{2,2}).
    pub removed_low_degree: usize,
    pub removed_k22: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub removed_right: Option<usize>,
    pub surviving_count: usize,
    pub surviving_average_degree: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PrunedGraph {
    pub base: ClauseSystem,
    pub surviving_left: Vec<usize>,
    pub surviving_right: Option<Vec<usize>>,
    pub threshold: u64,
    pub stats: PruneStats,
}

impl PrunedGraph {
    /// The survivor-restricted clause system, still with `n` clauses.
    pub fn restricted(&self) -> ClauseSystem {
        self.base
            .restrict(&self.surviving_left, self.surviving_right.as_deref())
            .expect("survivors are valid indices")
    }
}

pub fn prune(cs: &ClauseSystem, threshold: u64, caps: &Caps) -> Result<PrunedGraph> {
    prune_with(
        cs,
        &PruneOptions {
            threshold,
            ..PruneOptions::default()
        },
        caps,
    )
}

pub fn prune_with(cs: &ClauseSystem, opts: &PruneOptions, caps: &Caps) -> Result<PrunedGraph> {
    let report = count_k22(cs, caps)?;
    let deg = degrees(cs, caps);
    Ok(prune_from_report(cs, &deg, &report, opts, caps))
}

/// Pruning from precomputed degrees and K_{2,2} participation of `cs`.
pub fn prune_from_report(
    cs: &ClauseSystem,
    degrees_of: &[u64],
    report: &K22Report,
    opts: &PruneOptions,
    caps: &Caps,
) -> PrunedGraph {
    let mut removed_low_degree = 0;
    let mut removed_k22 = 0;
    let mut surviving_left = Vec::new();
    for (v, &deg) in degrees_of.iter().enumerate().take(cs.n_left()) {
        if deg < opts.threshold {
            removed_low_degree += 1;
        } else if report.left_participation[v] > 0 {
            removed_k22 += 1;
        } else {
            surviving_left.push(v);
        }
    }
    let surviving_right = opts.prune_right.then(|| {
        (0..cs.n_right())
            .filter(|&w| report.right_participation[w] == 0)
            .collect::<Vec<_>>()
    });

    let restricted = cs
        .restrict(&surviving_left, surviving_right.as_deref())
        .expect("survivors are valid indices");
    let surviving_average_degree = if surviving_left.is_empty() {
        0.0
    } else {
        let total: u64 = degrees(&restricted, caps).iter().sum();
        total as f64 / surviving_left.len() as f64
    };
    PrunedGraph {
        base: cs.clone(),
        threshold: opts.threshold,
        stats: PruneStats {
            removed_low_degree,
            removed_k22,
            removed_right: surviving_right.as_ref().map(|r| cs.n_right() - r.len()),
            surviving_count: surviving_left.len(),
            surviving_average_degree,
        },
        surviving_left,
        surviving_right,
    }
}

/// `floor(safety * N_R * (1 - p^2)^n)`.
pub fn default_threshold(params: &ModelParams, safety: f64) -> Result<u64> {
    if !(safety > 0.0 && safety <= 1.0) {
        return Err(Error::domain(format!("safety factor {safety} must lie in (0, 1]")));
    }
    let n = params.clause_count()?;
    let mean = expected_degree(params.n_right as u64, params.p, n as u64)?;
    Ok((safety * mean).floor() as u64)
}

pub const DEFAULT_SAFETY: f64 = 0.5;

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analytics::count_k22_explicit;
    use crate::random::{sample_cnf, stream_rng, SampleOptions};

    fn params(p: f64, n: usize, size: usize) -> ModelParams {
        ModelParams {
            d: 1.0,
            p,
            n_left: size,
            n_right: size,
            n_clauses: Some(n),
            seed: 0,
        }
    }

    #[test]
    fn path_keeps_everything() {
        let cs = ClauseSystem::from_u64(1, &[1, 0], &[1, 0]).unwrap();
        let pg = prune(&cs, 0, &Caps::default()).unwrap();
        assert_eq!(pg.surviving_left, vec![0, 1]);
        assert_eq!(pg.stats.surviving_count, 2);
        assert_eq!(pg.stats.surviving_average_degree, 1.5);
    }

    #[test]
    fn complete_2x2_loses_both() {
        let cs = ClauseSystem::from_u64(0, &[0, 0], &[0, 0]).unwrap();
        let pg = prune(&cs, 0, &Caps::default()).unwrap();
        assert!(pg.surviving_left.is_empty());
        assert_eq!(pg.stats.removed_k22, 2);
        assert_eq!(pg.stats.surviving_average_degree, 0.0);
    }

    #[test]
    fn low_degree_counted_first() {
        // vertex 0 has degree 2 and sits in the only K_{2,2}
        let cs = ClauseSystem::from_u64(0, &[0, 0], &[0, 0]).unwrap();
        let pg = prune(&cs, 3, &Caps::default()).unwrap();
        assert_eq!(pg.stats.removed_low_degree, 2);
        assert_eq!(pg.stats.removed_k22, 0);
    }

    #[test]
    fn random_instance_is_k22_free_after_pruning() {
        let caps = Caps::default();
        let cs = sample_cnf(&params(0.3, 4, 30), &SampleOptions::default(), &mut stream_rng(5)).unwrap();
        let pg = prune(&cs, 1, &caps).unwrap();
        let g = pg.restricted().materialize(&caps).unwrap();
        assert_eq!(count_k22_explicit(&g, &caps).unwrap().total, 0);
        for (i, &v) in pg.surviving_left.iter().enumerate() {
            assert_eq!(pg.restricted().neighborhood(i).unwrap(), cs.neighborhood(v).unwrap());
        }
    }

    #[test]
    fn right_pruning_flag() {
        let caps = Caps::default();
        let cs = sample_cnf(&params(0.3, 4, 30), &SampleOptions::default(), &mut stream_rng(6)).unwrap();
        let opts = PruneOptions {
            threshold: 0,
            prune_right: true,
        };
        let pg = prune_with(&cs, &opts, &caps).unwrap();
        let right = pg.surviving_right.as_ref().unwrap();
        assert_eq!(pg.stats.removed_right, Some(30 - right.len()));
        assert_eq!(count_k22(&pg.restricted(), &caps).unwrap().total, 0);
    }

    #[test]
    fn threshold_examples() {
        let mut p = params(0.5, 0, 40);
        assert_eq!(default_threshold(&p, 1.0).unwrap(), 40);
        p.n_right = 1000;
        p.n_clauses = Some(2);
        assert_eq!(default_threshold(&p, 0.5).unwrap(), 281);
        assert_eq!(default_threshold(&p, 1e-9).unwrap(), 0);
        assert!(default_threshold(&p, 0.0).is_err());
        assert!(default_threshold(&p, 1.5).is_err());
    }
}
