use std::collections::BTreeMap;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use cnfgraph::bounds::{cnf_size_lower_bound, lower_bound_from_distinct, BoundInputs};
use cnfgraph::experiment::{
    compare_models, run_experiment, DegreeBandConfig, ExperimentConfig, OutputFormat,
};
use cnfgraph::pruning::DEFAULT_SAFETY;
use cnfgraph::{
    count_k22, default_threshold, degrees, distinct_neighborhood_count,
    distinct_neighborhood_count_explicit, prune_with, sample_cnf, stream_rng, Caps, Error,
    ExplicitBipartiteGraph, Instance, ModelParams, PruneOptions, SampleOptions, Side, Validation,
};

#[derive(Parser)]
#[command(name = "cnfgraph", version, about = "Random CNF bipartite graphs: sampling, K_{2,2} counting, pruning")]
struct Cli {
    /// Seed for sampling (master seed for experiments).
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Maximum N_L * N_R pair tests for materialization.
    #[arg(long, global = true, default_value_t = Caps::DEFAULT_MAX_PAIRS)]
    cap_pairs: u64,
    /// Largest clause count for the 2^n zeta table.
    #[arg(long, global = true, default_value_t = Caps::DEFAULT_MAX_SOS_BITS)]
    cap_sos_bits: u32,
    /// Maximum quadruples for brute-force K_{2,2} counting.
    #[arg(long, global = true, default_value_t = Caps::DEFAULT_MAX_QUADRUPLES)]
    cap_quadruples: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Sample a random clause system and write it as a JSON instance.
    Gen {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Degrees, average degree and mask histograms of an instance.
    Stats { instance: PathBuf },
    /// Exact K_{2,2} count with per-vertex participation.
    #[command(name = "count-k22")]
    CountK22 {
        instance: PathBuf,
        /// Omit the participation arrays.
        #[arg(long)]
        summary: bool,
    },
    /// Drop low-degree and K_{2,2}-participating left vertices.
    Prune {
        instance: PathBuf,
        /// Degree cutoff; defaults to safety * expected degree from the instance params.
        #[arg(long)]
        threshold: Option<u64>,
        #[arg(long, default_value_t = DEFAULT_SAFETY)]
        safety: f64,
        /// Also drop right vertices lying in a K_{2,2}.
        #[arg(long)]
        prune_right: bool,
        /// Write the survivor-restricted edge list here.
        #[arg(long)]
        edges: Option<PathBuf>,
    },
    /// Distinct-neighborhood lower bound on CNF size (JSON instance or edge list).
    Certify {
        input: PathBuf,
        #[arg(long, default_value_t = 0)]
        min_degree: u64,
    },
    /// Closed-form edge and K_{2,2} probabilities and expectations.
    Expect {
        #[arg(long)]
        p: f64,
        /// Clause count; derived from --d when absent.
        #[arg(long)]
        n_clauses: Option<u64>,
        #[arg(long)]
        d: Option<f64>,
        #[arg(long)]
        n_left: u64,
        #[arg(long)]
        n_right: u64,
        /// Sample count M for the Chernoff bound.
        #[arg(long, requires = "mu")]
        samples: Option<u64>,
        #[arg(long, requires = "samples")]
        mu: Option<f64>,
    },
    /// Monte Carlo ensemble with per-replicate rows and aggregates.
    Experiment(ExperimentArgs),
    /// CNF ensemble next to the independent-edge baseline at matched density.
    #[command(name = "compare-models")]
    CompareModels(ExperimentArgs),
}

#[derive(Args, Clone)]
struct ModelArgs {
    #[arg(long)]
    p: f64,
    /// Target average degree; required unless --n-clauses is given.
    #[arg(long)]
    d: Option<f64>,
    #[arg(long)]
    n_left: usize,
    #[arg(long)]
    n_right: usize,
    #[arg(long)]
    n_clauses: Option<usize>,
    /// Accept p = 0 and p = 1.
    #[arg(long)]
    allow_degenerate: bool,
}

impl ModelArgs {
    fn params(&self, seed: u64) -> Result<ModelParams, Error> {
        let d = match (self.d, self.n_clauses) {
            (Some(d), _) => d,
            (None, Some(n)) => self.n_right as f64 * (1.0 - self.p * self.p).powi(n as i32),
            (None, None) => {
                return Err(Error::Domain("one of --d or --n-clauses is required".into()))
            }
        };
        Ok(ModelParams {
            // d only feeds the derived clause count, so any positive value works
            // when the count is given explicitly
            d: if d > 0.0 { d } else { f64::MIN_POSITIVE },
            p: self.p,
            n_left: self.n_left,
            n_right: self.n_right,
            n_clauses: self.n_clauses,
            seed,
        })
    }

    fn validation(&self) -> Validation {
        if self.allow_degenerate {
            Validation::AllowDegenerate
        } else {
            Validation::Strict
        }
    }
}

#[derive(Args, Clone)]
struct ExperimentArgs {
    #[command(flatten)]
    model: ModelArgs,
    #[arg(long, default_value_t = 10)]
    replicates: usize,
    #[arg(long, default_value_t = DEFAULT_SAFETY)]
    safety: f64,
    /// Degree-band exponent, used when --band is not given.
    #[arg(long, default_value_t = 0.1)]
    epsilon: f64,
    /// Fixed degree-band factor.
    #[arg(long)]
    band: Option<f64>,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

impl ExperimentArgs {
    fn config(&self, seed: u64, format: OutputFormat) -> Result<ExperimentConfig, Error> {
        let mut params = self.model.params(seed)?;
        params.seed = seed;
        Ok(ExperimentConfig {
            params,
            replicates: self.replicates,
            threshold_safety: self.safety,
            epsilon: self.epsilon,
            degree_band: DegreeBandConfig {
                band: self.band,
                ..DegreeBandConfig::default()
            },
            format,
            master_seed: seed,
            allow_degenerate: self.model.allow_degenerate,
        })
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_validation() {
                ExitCode::from(2)
            } else if e.is_cap() {
                ExitCode::from(3)
            } else {
                ExitCode::FAILURE
            }
        }
    }
}

fn json<T: Serialize>(value: &T) -> Result<String, Error> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

fn emit(text: &str, output: Option<&Path>) -> Result<(), Error> {
    match output {
        Some(path) => fs::write(path, text)?,
        None => io::stdout().lock().write_all(text.as_bytes())?,
    }
    Ok(())
}

#[derive(Serialize)]
struct StatsOut {
    n: usize,
    n_left: usize,
    n_right: usize,
    edge_count: u64,
    average_degree: Option<f64>,
    degrees: Vec<u64>,
    left_histogram: BTreeMap<String, u64>,
    right_histogram: BTreeMap<String, u64>,
}

#[derive(Serialize)]
struct PruneOut {
    surviving_left: Vec<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    surviving_right: Option<Vec<usize>>,
    threshold: u64,
    stats: cnfgraph::PruneStats,
}

#[derive(Serialize)]
struct CertifyOut {
    n_left: usize,
    n_right: usize,
    min_degree: u64,
    distinct_neighborhoods: u64,
    lower_bound: u32,
    #[serde(skip_serializing_if = "Option::is_none")]
    n_clauses: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    consistent: Option<bool>,
}

#[derive(Serialize)]
struct PairedCsvRow {
    replicate: usize,
    cnf_seed: u64,
    cnf_edge_count: u64,
    cnf_k22_total: u64,
    baseline_seed: u64,
    baseline_edge_count: u64,
    baseline_k22_total: u64,
}

fn run(cli: &Cli) -> Result<(), Error> {
    let caps = Caps {
        max_pairs: cli.cap_pairs,
        max_sos_bits: cli.cap_sos_bits,
        max_quadruples: cli.cap_quadruples,
    };
    match &cli.command {
        Command::Gen { model, output } => {
            let params = model.params(cli.seed)?;
            let opts = SampleOptions {
                validation: model.validation(),
                ..SampleOptions::default()
            };
            let system = sample_cnf(&params, &opts, &mut stream_rng(cli.seed))?;
            let inst = Instance {
                system,
                params: Some(params),
                seed: Some(cli.seed),
            };
            emit(&(inst.to_json()? + "\n"), output.as_deref())
        }
        Command::Stats { instance } => {
            let cs = Instance::read(instance)?.system;
            let deg = degrees(&cs, &caps);
            if cli.format == Some(Format::Csv) {
                let mut out = String::from("vertex,degree\n");
                for (v, d) in deg.iter().enumerate() {
                    out.push_str(&format!("{v},{d}\n"));
                }
                return emit(&out, None);
            }
            let edge_count: u64 = deg.iter().sum();
            let hist = |side| {
                cs.mask_histogram(side)
                    .entries
                    .iter()
                    .map(|(m, &c)| (m.to_hex(cs.n()), c))
                    .collect()
            };
            let out = StatsOut {
                n: cs.n(),
                n_left: cs.n_left(),
                n_right: cs.n_right(),
                edge_count,
                average_degree: (cs.n_left() > 0).then(|| edge_count as f64 / cs.n_left() as f64),
                degrees: deg,
                left_histogram: hist(Side::Left),
                right_histogram: hist(Side::Right),
            };
            emit(&json(&out)?, None)
        }
        Command::CountK22 { instance, summary } => {
            let cs = Instance::read(instance)?.system;
            let report = count_k22(&cs, &caps)?;
            let mut value = serde_json::to_value(&report)?;
            if *summary {
                let obj = value.as_object_mut().expect("report is an object");
                obj.remove("left_participation");
                obj.remove("right_participation");
            }
            emit(&json(&value)?, None)
        }
        Command::Prune {
            instance,
            threshold,
            safety,
            prune_right,
            edges,
        } => {
            let inst = Instance::read(instance)?;
            let threshold = match (threshold, &inst.params) {
                (Some(t), _) => *t,
                (None, Some(params)) => default_threshold(params, *safety)?,
                (None, None) => {
                    return Err(Error::Domain(
                        "instance has no params; pass --threshold explicitly".into(),
                    ))
                }
            };
            let opts = PruneOptions {
                threshold,
                prune_right: *prune_right,
            };
            let pruned = prune_with(&inst.system, &opts, &caps)?;
            if let Some(path) = edges {
                let g = pruned.restricted().materialize(&caps)?;
                fs::write(path, g.to_edge_list())?;
            }
            let out = PruneOut {
                surviving_left: pruned.surviving_left,
                surviving_right: pruned.surviving_right,
                threshold,
                stats: pruned.stats,
            };
            emit(&json(&out)?, None)
        }
        Command::Certify { input, min_degree } => {
            let text = fs::read_to_string(input)?;
            let out = if text.trim_start().starts_with('{') {
                let cs = Instance::from_json(&text)?.system;
                let distinct = distinct_neighborhood_count(&cs, *min_degree);
                let lower_bound = if *min_degree == 0 {
                    match cs.materialize(&caps) {
                        Ok(g) => cnf_size_lower_bound(&g),
                        Err(e) if e.is_cap() => lower_bound_from_distinct(distinct),
                        Err(e) => return Err(e),
                    }
                } else {
                    lower_bound_from_distinct(distinct)
                };
                CertifyOut {
                    n_left: cs.n_left(),
                    n_right: cs.n_right(),
                    min_degree: *min_degree,
                    distinct_neighborhoods: distinct,
                    lower_bound,
                    n_clauses: Some(cs.n()),
                    consistent: Some(lower_bound as usize <= cs.n()),
                }
            } else {
                let g = ExplicitBipartiteGraph::from_edge_list(&text)?;
                let distinct = distinct_neighborhood_count_explicit(&g, *min_degree);
                CertifyOut {
                    n_left: g.n_left(),
                    n_right: g.n_right(),
                    min_degree: *min_degree,
                    distinct_neighborhoods: distinct,
                    lower_bound: lower_bound_from_distinct(distinct),
                    n_clauses: None,
                    consistent: None,
                }
            };
            emit(&json(&out)?, None)
        }
        Command::Expect {
            p,
            n_clauses,
            d,
            n_left,
            n_right,
            samples,
            mu,
        } => {
            let n = match (n_clauses, d) {
                (Some(n), _) => *n,
                (None, Some(d)) => cnfgraph::choose_clause_count(*p, *n_right, *d)? as u64,
                (None, None) => {
                    return Err(Error::Domain("one of --n-clauses or --d is required".into()))
                }
            };
            let inputs = BoundInputs {
                p: *p,
                n,
                n_left: *n_left,
                n_right: *n_right,
                samples: *samples,
                mu: *mu,
            };
            emit(&json(&inputs.evaluate()?)?, None)
        }
        Command::Experiment(args) => {
            let format = cli.format.unwrap_or(Format::Csv);
            let config = args.config(cli.seed, output_format(format))?;
            let report = run_experiment(&config, &caps)?;
            let text = match format {
                Format::Csv => report.to_csv_string()?,
                Format::Json => json(&report)?,
            };
            emit(&text, args.output.as_deref())
        }
        Command::CompareModels(args) => {
            let format = cli.format.unwrap_or(Format::Json);
            let config = args.config(cli.seed, output_format(format))?;
            let cmp = compare_models(&config, &caps)?;
            let text = match format {
                Format::Json => json(&cmp)?,
                Format::Csv => {
                    let mut w = csv_writer();
                    for c in &cmp.cnf.rows {
                        let b = &cmp.baseline_rows[c.replicate];
                        w.serialize(PairedCsvRow {
                            replicate: c.replicate,
                            cnf_seed: c.seed,
                            cnf_edge_count: c.edge_count,
                            cnf_k22_total: c.k22_total,
                            baseline_seed: b.seed,
                            baseline_edge_count: b.edge_count,
                            baseline_k22_total: b.k22_total,
                        })
                        .map_err(|e| Error::Io(io::Error::other(e)))?;
                    }
                    String::from_utf8(w.into_inner().map_err(|e| Error::Io(io::Error::other(e.to_string())))?)
                        .expect("csv output is utf-8")
                }
            };
            emit(&text, args.output.as_deref())
        }
    }
}

fn csv_writer() -> csv::Writer<Vec<u8>> {
    csv::Writer::from_writer(Vec::new())
}

fn output_format(f: Format) -> OutputFormat {
    match f {
        Format::Json => OutputFormat::Json,
        Format::Csv => OutputFormat::Csv,
    }
}
