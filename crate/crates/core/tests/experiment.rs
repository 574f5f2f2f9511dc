use cnfgraph::bounds::expected_k22_bernoulli;
use cnfgraph::experiment::{
    compare_models, fixed_clause_params, run_experiment, ExperimentConfig,
};
use cnfgraph::Caps;

#[test]
fn degenerate_p_gives_complete_graph() {
    let params = fixed_clause_params(12, 0.0, 5);
    let mut cfg = ExperimentConfig::new(params, 1, 3);
    cfg.allow_degenerate = true;
    let r = run_experiment(&cfg, &Caps::default()).unwrap();
    let row = &r.rows[0];
    assert_eq!(row.edge_count, 144);
    assert_eq!(row.k22_total, 66 * 66);
    assert_eq!(r.edge_density.mean, 1.0);
    assert_eq!(row.distinct_neighborhoods, 1);
    assert_eq!(row.lower_bound, 0);
    assert_eq!(row.surviving_count, 0);

    cfg.allow_degenerate = false;
    assert!(run_experiment(&cfg, &Caps::default()).is_err());
}

#[test]
fn identical_configs_give_identical_csv() {
    let cfg = ExperimentConfig::new(fixed_clause_params(60, 0.3, 7), 6, 11);
    let a = run_experiment(&cfg, &Caps::default()).unwrap().to_csv_string().unwrap();
    let b = run_experiment(&cfg, &Caps::default()).unwrap().to_csv_string().unwrap();
    assert_eq!(a, b);
    assert!(a.starts_with(
        "replicate,seed,edge_count,average_degree,k22_total,surviving_count,\
         surviving_average_degree,pruned_k22_total,distinct_neighborhoods,lower_bound,n_clauses,"
    ));
    let other = ExperimentConfig { master_seed: 12, ..cfg };
    let c = run_experiment(&other, &Caps::default()).unwrap().to_csv_string().unwrap();
    assert_ne!(a, c);
}

#[test]
fn cap_violations_skip_replicates() {
    let cfg = ExperimentConfig::new(fixed_clause_params(50, 0.3, 5), 3, 1);
    let caps = Caps {
        max_pairs: 100,
        ..Caps::default()
    };
    let r = run_experiment(&cfg, &caps).unwrap();
    assert!(r.rows.is_empty());
    assert_eq!(r.skipped.len(), 3);
    assert_eq!(r.edge_density.completed, 0);
}

#[test]
fn wide_clause_counts_fall_back() {
    // n above the zeta cap still yields full reports
    let cfg = ExperimentConfig::new(fixed_clause_params(40, 0.15, 30), 3, 5);
    let r = run_experiment(&cfg, &Caps::default()).unwrap();
    assert_eq!(r.rows.len(), 3);
    assert!(r.rows.iter().all(|row| row.pruned_k22_total == 0 && row.n_clauses == 30));
}

#[test]
fn invalid_configs_rejected() {
    let mut cfg = ExperimentConfig::new(fixed_clause_params(20, 0.3, 5), 0, 1);
    assert!(run_experiment(&cfg, &Caps::default()).is_err());
    cfg.replicates = 2;
    cfg.threshold_safety = 0.0;
    assert!(run_experiment(&cfg, &Caps::default()).is_err());
}

#[test]
fn no_clauses_makes_models_coincide() {
    let cfg = ExperimentConfig::new(fixed_clause_params(10, 0.3, 0), 2, 8);
    let cmp = compare_models(&cfg, &Caps::default()).unwrap();
    assert_eq!(cmp.q, 1.0);
    for (c, b) in cmp.cnf.rows.iter().zip(&cmp.baseline_rows) {
        assert_eq!(c.k22_total, b.k22_total);
        assert_eq!(c.k22_total, 45 * 45);
    }
}

#[test]
fn baseline_matches_its_expectation() {
    let cfg = ExperimentConfig::new(fixed_clause_params(300, 0.3, 10), 100, 2024);
    let cmp = compare_models(&cfg, &Caps::default()).unwrap();
    let q = 0.91f64.powi(10);
    assert!((cmp.q - q).abs() < 1e-15);
    let expected = expected_k22_bernoulli(300, 300, q).unwrap();
    // C(300,2)^2 * q^4, frozen from a high-precision evaluation
    assert!((expected - 46_257_332.788_053_93).abs() < 1e-3);
    assert!(cmp.baseline_k22_total.within_standard_errors(5.0));
    assert!(cmp.baseline_edge_density.within_standard_errors(5.0));
    assert!(cmp.clause_survival_dominates);
    assert!(cmp.cnf_quadruple_probability >= cmp.baseline_quadruple_probability);
    assert!(cmp.cnf.k22_total.mean > cmp.baseline_k22_total.mean);
}
