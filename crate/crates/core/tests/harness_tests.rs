use ldpgof::harness::emit::{to_csv, CSV_COLUMNS};
use ldpgof::harness::{emit, run, Executor, ExperimentConfig, ExperimentKind, ExperimentResult, Format, PinnedConstants};
use ldpgof::Error;

fn small_level() -> ExperimentConfig {
    let mut cfg = ExperimentConfig::new(ExperimentKind::Level);
    cfg.n = vec![50, 80];
    cfg.alpha = vec![1.0];
    cfg.resolution = vec![4];
    cfg.gamma = vec![0.05, 0.5];
    cfg.trials = 200;
    cfg.replicates = 199;
    cfg.seed = 17;
    cfg
}

#[test]
fn empty_grid_gives_header_only_csv() {
    let csv = to_csv(&[]);
    assert_eq!(csv, format!("{}\n", CSV_COLUMNS.join(",")));
    assert!(csv.starts_with("n,alpha,gamma,beta,s,R,d,L,epsilon,rate,se,"));
}

#[test]
fn results_round_trip_through_json() {
    let exec = Executor::new(2).unwrap();
    let pinned = PinnedConstants::pinned().unwrap();
    let result = run(&small_level(), &exec, &pinned).unwrap();
    assert_eq!(result.records.len(), 4);
    let dir = tempfile::tempdir().unwrap();
    let path = emit(&result, dir.path(), Format::Json).unwrap();
    let back = ExperimentResult::from_json(&std::fs::read_to_string(path).unwrap()).unwrap();
    assert_eq!(back, result);
    let csv = std::fs::read_to_string(emit(&result, dir.path(), Format::Csv).unwrap()).unwrap();
    assert_eq!(csv.lines().count(), 5);
    for r in &result.records {
        let rate = r.rate.unwrap();
        assert!((0.0..=1.0).contains(&rate));
        assert_eq!(r.se.unwrap(), (rate * (1.0 - rate) / r.trials as f64).sqrt());
    }
}

#[test]
fn results_do_not_depend_on_worker_count() {
    let pinned = PinnedConstants::pinned().unwrap();
    let mut cfgs = vec![small_level()];
    let mut power = ExperimentConfig::new(ExperimentKind::PowerCurve);
    power.n = vec![100];
    power.alpha = vec![2.0];
    power.resolution = vec![4];
    power.epsilon = vec![0.0, 0.2, 0.4];
    power.at_separation = true;
    power.trials = 150;
    power.replicates = 99;
    cfgs.push(power);
    let mut adaptive = ExperimentConfig::new(ExperimentKind::Adaptive);
    adaptive.n = vec![30];
    adaptive.alpha = vec![3.0];
    adaptive.trials = 120;
    adaptive.replicates = 299;
    adaptive.max_level = Some(5);
    adaptive.epsilon = vec![0.5];
    cfgs.push(adaptive);
    for cfg in cfgs {
        let runs: Vec<ExperimentResult> = [1, 3, 8]
            .iter()
            .map(|&w| {
                let mut r = run(&cfg, &Executor::new(w).unwrap(), &pinned).unwrap();
                r.workers = 0;
                r
            })
            .collect();
        assert_eq!(runs[0], runs[1]);
        assert_eq!(runs[0], runs[2]);
    }
}

#[test]
fn invalid_configs_are_config_errors() {
    let mut cfg = small_level();
    cfg.trials = 50;
    assert!(matches!(cfg.validate(), Err(Error::Config(_))));
    let mut cfg = small_level();
    cfg.gamma = vec![1.5];
    assert!(matches!(cfg.validate(), Err(Error::Config(_))));
    let mut cfg = small_level();
    cfg.replicates = 10;
    assert!(matches!(cfg.validate(), Err(Error::Config(_))));
    let mut cfg = small_level();
    cfg.kind = ExperimentKind::RateRegression;
    assert!(matches!(cfg.validate(), Err(Error::Config(_))));
    assert!(matches!(ExperimentConfig::from_json(r#"{"kind": "nope"}"#), Err(Error::Config(_))));
    assert!(matches!(ExperimentConfig::from_json(r#"{"kind": "level", "n": [10], "alpha": [1], "bogus": 1}"#), Err(Error::Config(_))));
}

#[test]
fn infeasible_power_points_are_skipped_with_warning() {
    let mut cfg = ExperimentConfig::new(ExperimentKind::PowerCurve);
    cfg.n = vec![60];
    cfg.alpha = vec![1.0];
    cfg.resolution = vec![4];
    cfg.alternative = ldpgof::harness::alternatives::AlternativeFamily::Haar;
    cfg.epsilon = vec![0.0, 0.3, 0.9];
    cfg.trials = 100;
    cfg.replicates = 99;
    let result = run(&cfg, &Executor::new(1).unwrap(), &PinnedConstants::pinned().unwrap()).unwrap();
    assert_eq!(result.records.len(), 3);
    assert_eq!(result.records[2].flag.as_deref(), Some("infeasible"));
    assert!(result.records[2].rate.is_none());
    assert!(!result.warnings.is_empty());
}

#[test]
fn pinned_constants_parse() {
    let pinned = PinnedConstants::pinned().unwrap();
    for c in [&pinned.continuous, &pinned.discrete, &pinned.adaptive] {
        assert!(c.constant > 0.0);
    }
}
