//! Monte Carlo replication of the random clause construction.
//!
//! Replicates run in parallel, each on its own stream derived from the master
//! seed, and are reassembled in replicate order, so reports are identical for
//! any thread count.

use std::io::Write;

use rand::distributions::{Bernoulli, Distribution};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analytics::{count_k22, count_k22_explicit, count_k22_wedge, degrees, distinct_neighborhood_count};
use crate::bounds::{
    chernoff_bound, edge_probability, expected_degree, expected_k22, expected_k22_bernoulli,
    k22_clause_survival, lower_bound_from_distinct,
};
use crate::caps::Caps;
use crate::error::{Error, Result};
use crate::pruning::{default_threshold, prune_from_report, PruneOptions, DEFAULT_SAFETY};
use crate::random::{
    replicate_seed, sample_bernoulli_graph, sample_cnf, stream_rng, ModelParams, SampleOptions,
    Validation,
};

/// XORed into the master seed to get the baseline model's streams.
const BASELINE_STREAM: u64 = 0x6261_7365_6c69_6e65;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

/// Desk-scale rendering of the degree concentration statement: a vertex is
/// in band when its degree lies in `[mean / band, mean * band]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DegreeBandConfig {
    /// Fixed band factor; when absent, `(N_R / mean)^epsilon`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub band: Option<f64>,
    /// Fraction of left vertices that must be in band for a replicate to pass.
    pub min_fraction: f64,
    /// Fraction of replicates that must pass.
    pub required_pass_rate: f64,
}

impl Default for DegreeBandConfig {
    fn default() -> Self {
        DegreeBandConfig {
            band: Some(4.0),
            min_fraction: 0.9,
            required_pass_rate: 0.9,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub params: ModelParams,
    pub replicates: usize,
    pub threshold_safety: f64,
    pub epsilon: f64,
    pub degree_band: DegreeBandConfig,
    pub format: OutputFormat,
    pub master_seed: u64,
    /// Accept `p = 0` or `p = 1`.
    #[serde(default)]
    pub allow_degenerate: bool,
}

impl ExperimentConfig {
    pub fn new(params: ModelParams, replicates: usize, master_seed: u64) -> Self {
        ExperimentConfig {
            params,
            replicates,
            threshold_safety: DEFAULT_SAFETY,
            epsilon: 0.1,
            degree_band: DegreeBandConfig::default(),
            format: OutputFormat::Csv,
            master_seed,
            allow_degenerate: false,
        }
    }

    /// 300 x 300, p = 0.3, n = 10, 100 replicates.
    pub fn expectation_default(master_seed: u64) -> Self {
        Self::new(fixed_clause_params(300, 0.3, 10), 100, master_seed)
    }

    /// 4096 x 4096, p = 0.3, n = 17, 50 replicates, factor-4 band.
    pub fn degree_band_default(master_seed: u64) -> Self {
        Self::new(fixed_clause_params(4096, 0.3, 17), 50, master_seed)
    }

    pub fn validate(&self) -> Result<()> {
        if self.replicates == 0 {
            return Err(Error::domain("replicates must be at least 1"));
        }
        if !(self.threshold_safety > 0.0 && self.threshold_safety <= 1.0) {
            return Err(Error::domain("threshold_safety must lie in (0, 1]"));
        }
        if let Some(b) = self.degree_band.band {
            if b.is_nan() || b < 1.0 {
                return Err(Error::domain("degree band factor must be at least 1"));
            }
        }
        self.params.validate(self.validation())
    }

    fn validation(&self) -> Validation {
        if self.allow_degenerate {
            Validation::AllowDegenerate
        } else {
            Validation::Strict
        }
    }
}

/// Square instance with an explicit clause count; `d` is set to the
/// expected degree.
pub fn fixed_clause_params(size: usize, p: f64, n: usize) -> ModelParams {
    let d = size as f64 * (1.0 - p * p).powi(n as i32);
    ModelParams {
        d,
        p,
        n_left: size,
        n_right: size,
        n_clauses: Some(n),
        seed: 0,
    }
}

/// One CSV row. Column order is fixed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReplicateRow {
    pub replicate: usize,
    pub seed: u64,
    pub edge_count: u64,
    pub average_degree: f64,
    pub k22_total: u64,
    pub surviving_count: usize,
    pub surviving_average_degree: f64,
    pub pruned_k22_total: u64,
    pub distinct_neighborhoods: u64,
    pub lower_bound: u32,
    pub n_clauses: usize,
    pub degree_band_fraction: f64,
    pub neighborhoods_preserved: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SkippedReplicate {
    pub replicate: usize,
    pub seed: u64,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Aggregate {
    pub completed: usize,
    pub mean: f64,
    pub std_dev: f64,
    pub expected: f64,
    /// `(mean - expected) / (std_dev / sqrt(completed))`; absent when the
    /// standard error is zero or fewer than two rows completed.
    pub z_score: Option<f64>,
}

impl Aggregate {
    pub fn from_samples(xs: &[f64], expected: f64) -> Self {
        let k = xs.len();
        let mean = if k == 0 { f64::NAN } else { xs.iter().sum::<f64>() / k as f64 };
        let std_dev = if k < 2 {
            0.0
        } else {
            (xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (k - 1) as f64).sqrt()
        };
        let se = std_dev / (k as f64).sqrt();
        let z_score = (k >= 2 && se > 0.0).then(|| (mean - expected) / se);
        Aggregate {
            completed: k,
            mean,
            std_dev,
            expected,
            z_score,
        }
    }

    pub fn standard_error(&self) -> f64 {
        self.std_dev / (self.completed as f64).sqrt()
    }

    /// `|mean - expected| <= k * standard error`; with zero spread the mean
    /// must equal the expectation to within rounding.
    pub fn within_standard_errors(&self, k: f64) -> bool {
        let tol = (k * self.standard_error()).max(1e-9 * self.expected.abs().max(1.0));
        (self.mean - self.expected).abs() <= tol
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DegreeBandSummary {
    pub expected_degree: f64,
    pub band: f64,
    pub lower: f64,
    pub upper: f64,
    pub min_fraction: f64,
    pub required_pass_rate: f64,
    pub mean_fraction: f64,
    pub replicates_passing: usize,
    pub pass_rate: f64,
}

impl DegreeBandSummary {
    pub fn passes(&self) -> bool {
        self.pass_rate >= self.required_pass_rate
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub config: ExperimentConfig,
    pub n_clauses: usize,
    pub threshold: u64,
    pub rows: Vec<ReplicateRow>,
    pub skipped: Vec<SkippedReplicate>,
    pub edge_density: Aggregate,
    pub k22_total: Aggregate,
    pub degree_band: DegreeBandSummary,
}

impl ExperimentReport {
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        write_rows_csv(&self.rows, out)
    }

    pub fn to_csv_string(&self) -> Result<String> {
        let mut buf = Vec::new();
        self.write_csv(&mut buf)?;
        Ok(String::from_utf8(buf).expect("csv output is utf-8"))
    }
}

fn write_rows_csv<W: Write, T: Serialize>(rows: &[T], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

struct Prepared {
    n: usize,
    threshold: u64,
    mean_degree: f64,
    band: f64,
}

fn prepare(config: &ExperimentConfig) -> Result<Prepared> {
    config.validate()?;
    let params = &config.params;
    let n = params.clause_count()?;
    let threshold = default_threshold(params, config.threshold_safety)?;
    let mean_degree = expected_degree(params.n_right as u64, params.p, n as u64)?;
    let band = match config.degree_band.band {
        Some(b) => b,
        None => (params.n_right as f64 / mean_degree).powf(config.epsilon),
    };
    Ok(Prepared {
        n,
        threshold,
        mean_degree,
        band,
    })
}

fn run_replicate(
    config: &ExperimentConfig,
    prep: &Prepared,
    caps: &Caps,
    replicate: usize,
    seed: u64,
) -> Result<ReplicateRow> {
    let mut params = config.params.clone();
    params.seed = seed;
    let pairs = params.n_left as u128 * params.n_right as u128;
    if pairs > caps.max_pairs as u128 {
        return Err(Error::CapExceeded {
            what: "replicate pair count",
            requested: pairs,
            limit: caps.max_pairs as u128,
        });
    }
    let opts = SampleOptions {
        validation: config.validation(),
        ..SampleOptions::default()
    };
    let cs = sample_cnf(&params, &opts, &mut stream_rng(seed))?;
    let deg = degrees(&cs, caps);
    let edge_count: u64 = deg.iter().sum();
    let report = count_k22(&cs, caps)?;

    let pruned = prune_from_report(
        &cs,
        &deg,
        &report,
        &PruneOptions {
            threshold: prep.threshold,
            prune_right: false,
        },
        caps,
    );
    let restricted = pruned.restricted();
    let pruned_k22_total = match restricted.materialize(caps).and_then(|g| count_k22_explicit(&g, caps)) {
        Ok(r) => r.total,
        Err(e) if e.is_cap() => count_k22(&restricted, caps)?.total,
        Err(e) => return Err(e),
    };
    let mut neighborhoods_preserved = true;
    for (i, &v) in pruned.surviving_left.iter().enumerate() {
        if restricted.neighborhood(i)? != cs.neighborhood(v)? {
            neighborhoods_preserved = false;
            break;
        }
    }

    let distinct = distinct_neighborhood_count(&cs, 0);
    let (lo, hi) = (prep.mean_degree / prep.band, prep.mean_degree * prep.band);
    let in_band = deg.iter().filter(|&&d| (d as f64) >= lo && (d as f64) <= hi).count();

    Ok(ReplicateRow {
        replicate,
        seed,
        edge_count,
        average_degree: edge_count as f64 / cs.n_left() as f64,
        k22_total: report.total,
        surviving_count: pruned.stats.surviving_count,
        surviving_average_degree: pruned.stats.surviving_average_degree,
        pruned_k22_total,
        distinct_neighborhoods: distinct,
        lower_bound: lower_bound_from_distinct(distinct),
        n_clauses: cs.n(),
        degree_band_fraction: in_band as f64 / cs.n_left() as f64,
        neighborhoods_preserved,
    })
}

pub fn run_experiment(config: &ExperimentConfig, caps: &Caps) -> Result<ExperimentReport> {
    let prep = prepare(config)?;
    let results: Vec<(usize, u64, Result<ReplicateRow>)> = (0..config.replicates)
        .into_par_iter()
        .map(|r| {
            let seed = replicate_seed(config.master_seed, r as u64);
            (r, seed, run_replicate(config, &prep, caps, r, seed))
        })
        .collect();

    let mut rows = Vec::new();
    let mut skipped = Vec::new();
    for (replicate, seed, res) in results {
        match res {
            Ok(row) => rows.push(row),
            Err(e) if e.is_cap() || matches!(e, Error::Overflow(_)) => skipped.push(SkippedReplicate {
                replicate,
                seed,
                reason: e.to_string(),
            }),
            Err(e) => return Err(e),
        }
    }

    let params = &config.params;
    let cells = params.n_left as f64 * params.n_right as f64;
    let densities: Vec<f64> = rows.iter().map(|r| r.edge_count as f64 / cells).collect();
    let k22s: Vec<f64> = rows.iter().map(|r| r.k22_total as f64).collect();
    let n = prep.n as u64;
    let edge_density = Aggregate::from_samples(&densities, edge_probability(params.p, n)?);
    let k22_total = Aggregate::from_samples(
        &k22s,
        expected_k22(params.n_left as u64, params.n_right as u64, params.p, n)?,
    );

    let band_cfg = &config.degree_band;
    let passing = rows
        .iter()
        .filter(|r| r.degree_band_fraction >= band_cfg.min_fraction)
        .count();
    let done = rows.len().max(1) as f64;
    let degree_band = DegreeBandSummary {
        expected_degree: prep.mean_degree,
        band: prep.band,
        lower: prep.mean_degree / prep.band,
        upper: prep.mean_degree * prep.band,
        min_fraction: band_cfg.min_fraction,
        required_pass_rate: band_cfg.required_pass_rate,
        mean_fraction: rows.iter().map(|r| r.degree_band_fraction).sum::<f64>() / done,
        replicates_passing: passing,
        pass_rate: passing as f64 / done,
    };

    Ok(ExperimentReport {
        config: config.clone(),
        n_clauses: prep.n,
        threshold: prep.threshold,
        rows,
        skipped,
        edge_density,
        k22_total,
        degree_band,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BaselineRow {
    pub replicate: usize,
    pub seed: u64,
    pub edge_count: u64,
    pub k22_total: u64,
    pub surviving_count: usize,
}

/// CNF ensemble next to the independent-edge baseline at the same edge
/// probability `q = (1 - p^2)^n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelComparison {
    pub q: f64,
    pub cnf: ExperimentReport,
    pub baseline_rows: Vec<BaselineRow>,
    pub baseline_edge_density: Aggregate,
    pub baseline_k22_total: Aggregate,
    /// Per-quadruple K_{2,2} probability in each model.
    pub cnf_quadruple_probability: f64,
    pub baseline_quadruple_probability: f64,
    /// Whether one clause's survival probability is at least `(1 - p^2)^4`
    /// at this `p`, which makes the CNF expectation dominate.
    pub clause_survival_dominates: bool,
    /// Baseline pruning uses the same participation rule as the CNF model;
    /// the independent-edge model itself specifies no removal rule.
    pub baseline_pruning_note: String,
}

pub fn compare_models(config: &ExperimentConfig, caps: &Caps) -> Result<ModelComparison> {
    let cnf = run_experiment(config, caps)?;
    let params = &config.params;
    let n = cnf.n_clauses as u64;
    let q = edge_probability(params.p, n)?;
    let (nl, nr) = (params.n_left, params.n_right);
    let threshold = (config.threshold_safety * q * nr as f64).floor() as u64;
    let baseline_master = config.master_seed ^ BASELINE_STREAM;

    let baseline_rows = (0..config.replicates)
        .into_par_iter()
        .map(|r| -> Result<BaselineRow> {
            let seed = replicate_seed(baseline_master, r as u64);
            let g = sample_bernoulli_graph(nl, nr, q, &mut stream_rng(seed))?;
            let report = count_k22_wedge(&g)?;
            let deg = g.degrees();
            let surviving_count = (0..nl)
                .filter(|&v| deg[v] as u64 >= threshold && report.left_participation[v] == 0)
                .count();
            Ok(BaselineRow {
                replicate: r,
                seed,
                edge_count: g.edge_count() as u64,
                k22_total: report.total,
                surviving_count,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let cells = nl as f64 * nr as f64;
    let densities: Vec<f64> = baseline_rows.iter().map(|r| r.edge_count as f64 / cells).collect();
    let k22s: Vec<f64> = baseline_rows.iter().map(|r| r.k22_total as f64).collect();
    let survival = k22_clause_survival(params.p)?;
    let edge_one = 1.0 - params.p * params.p;

    Ok(ModelComparison {
        q,
        baseline_edge_density: Aggregate::from_samples(&densities, q),
        baseline_k22_total: Aggregate::from_samples(
            &k22s,
            expected_k22_bernoulli(nl as u64, nr as u64, q)?,
        ),
        cnf_quadruple_probability: crate::bounds::k22_probability(params.p, n)?,
        baseline_quadruple_probability: q.powi(4),
        clause_survival_dominates: survival >= edge_one.powi(4),
        baseline_pruning_note: "participation-based pruning applied to the baseline by analogy".into(),
        baseline_rows,
        cnf,
    })
}

impl ModelComparison {
    pub fn baseline_csv_string(&self) -> Result<String> {
        let mut buf = Vec::new();
        write_rows_csv(&self.baseline_rows, &mut buf)?;
        Ok(String::from_utf8(buf).expect("csv output is utf-8"))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TailCheckRow {
    pub mu: f64,
    pub bound: f64,
    pub observed: f64,
    /// Three binomial standard errors of the bound at the trial count.
    pub tolerance: f64,
    pub passes: bool,
}

/// Empirical tail frequency of `|sum - pM| >= mu M` over `trials` binomial
/// sums of `samples` Bernoulli(p) draws, against the Chernoff bound.
pub fn chernoff_tail_check(
    samples: u64,
    p: f64,
    mus: &[f64],
    trials: usize,
    seed: u64,
) -> Result<Vec<TailCheckRow>> {
    if trials == 0 {
        return Err(Error::domain("need at least one trial"));
    }
    let coin = Bernoulli::new(p).map_err(|e| Error::domain(e.to_string()))?;
    let mut rng = stream_rng(seed);
    let sums: Vec<u64> = (0..trials)
        .map(|_| (0..samples).filter(|_| coin.sample(&mut rng)).count() as u64)
        .collect();
    let mean = p * samples as f64;
    mus.iter()
        .map(|&mu| {
            let bound = chernoff_bound(samples, mu)?;
            let hits = sums
                .iter()
                .filter(|&&s| (s as f64 - mean).abs() >= mu * samples as f64)
                .count();
            let observed = hits as f64 / trials as f64;
            let tolerance = 3.0 * (bound * (1.0 - bound) / trials as f64).sqrt();
            Ok(TailCheckRow {
                mu,
                bound,
                observed,
                tolerance,
                passes: observed <= bound + tolerance,
            })
        })
        .collect()
}
