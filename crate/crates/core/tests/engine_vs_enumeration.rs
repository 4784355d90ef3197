//! Monte Carlo engine against exact laws from path enumeration.

use geohazard_core::hazard::{self, PoissonTarget};
use geohazard_core::oracle;
use geohazard_core::process::IidModel;
use geohazard_core::{HazardConfig, PoissonConfig, ProcessModel, ReturnSchedule, TargetSets, Targets};

const WEIGHTS: [f64; 3] = [0.5, 0.3, 0.2];

fn within_five_sigma(counts: &[u64], exact: &[f64], trials: u64) {
    let n = trials as f64;
    for (k, &p) in exact.iter().enumerate() {
        let c = counts.get(k).copied().unwrap_or(0) as f64;
        let sd = (n * p * (1.0 - p)).sqrt().max(1.0);
        assert!(
            (c - n * p).abs() <= 5.0 * sd,
            "bin {k}: observed {c}, expected {:.1} (sd {sd:.1})",
            n * p
        );
    }
}

#[test]
fn stopped_count_matches_enumeration() {
    let model = ProcessModel::Iid(IidModel::new(vec![0, 1, 2], WEIGHTS.to_vec()).unwrap());
    for coeffs in [vec![1u64], vec![1, 2], vec![1, 3]] {
        let schedule = ReturnSchedule::linear_multiples(&coeffs).unwrap();
        let steps = if coeffs.len() == 1 { 9 } else { 4 };
        let exact = oracle::exact_stopped_law_iid(&WEIGHTS, &schedule, &[0], &[1], steps).unwrap();
        let targets = Targets::Sets(TargetSets::new(&model, vec![0], vec![1]).unwrap());
        let mut cfg = HazardConfig::new(model.clone(), schedule, targets, 200_000, 5);
        cfg.step_cap = Some(steps);
        let hist = hazard::run_shard(&cfg, 0..cfg.trials).unwrap();
        // the censored bin holds the no-hazard mass
        let mut counts = hist.counts.clone();
        counts.resize(steps as usize + 1, 0);
        counts.push(hist.censored);
        within_five_sigma(&counts, &exact, hist.trials);
    }
}

#[test]
fn fixed_horizon_sum_matches_enumeration() {
    let model = ProcessModel::Iid(IidModel::new(vec![0, 1, 2], WEIGHTS.to_vec()).unwrap());
    let schedule = ReturnSchedule::linear_multiples(&[1, 2]).unwrap();
    let exact = oracle::exact_sum_law_iid(&WEIGHTS, &schedule, &[1, 2], 5).unwrap();
    let cfg = PoissonConfig::new(model, schedule, PoissonTarget::Set(vec![1, 2]), 5, 200_000, 9);
    let report = hazard::run_poisson_experiment(&cfg).unwrap();
    assert_eq!(report.histogram.censored, 0);
    within_five_sigma(&report.histogram.counts, &exact, report.trials);
}

#[test]
fn sharded_equals_unsharded() {
    let model = ProcessModel::Iid(IidModel::uniform(5).unwrap());
    let targets = Targets::Sets(TargetSets::new(&model, vec![0], vec![1, 2]).unwrap());
    let cfg = HazardConfig::new(model, ReturnSchedule::linear_multiples(&[1, 2]).unwrap(), targets, 4000, 21);
    let whole = hazard::run_shard(&cfg, 0..4000).unwrap();
    let mut merged = hazard::run_shard(&cfg, 0..1000).unwrap();
    for r in [1000..2000, 2000..3000, 3000..4000] {
        merged = geohazard_core::empirical_merge(&merged, &hazard::run_shard(&cfg, r).unwrap()).unwrap();
    }
    assert_eq!(whole, merged);
}
