//! Parallel trial execution.
//!
//! Trials are cut into fixed chunks regardless of the worker count, each
//! chunk runs on its own, and chunk histograms are merged in trial order.
//! Every trial draws from a stream keyed by its index, so the result does not
//! depend on how many threads ran it.

use std::ops::Range;
use std::time::Instant;

use geohazard_core::hazard::{self, ExperimentReport};
use geohazard_core::{empirical_merge, Error, HazardConfig, Histogram, PoissonConfig};
use rayon::prelude::*;

pub const CHUNK: u64 = 1024;

pub fn chunks(trials: u64) -> Vec<Range<u64>> {
    (0..trials)
        .step_by(CHUNK as usize)
        .map(|s| s..(s + CHUNK).min(trials))
        .collect()
}

/// Worker count: explicit value, else every available core.
pub fn resolve_workers(workers: Option<usize>) -> usize {
    workers
        .filter(|&w| w > 0)
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
}

fn pool(workers: usize) -> rayon::ThreadPool {
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .expect("building a thread pool")
}

fn run_chunks<F>(id: u64, trials: u64, workers: usize, shard: F) -> Result<Histogram, Error>
where
    F: Fn(Range<u64>) -> Result<Histogram, Error> + Sync,
{
    let parts: Vec<Result<Histogram, Error>> =
        pool(workers).install(|| chunks(trials).into_par_iter().map(&shard).collect());
    let mut total = Histogram::empty(id);
    for part in parts {
        total = empirical_merge(&total, &part?)?;
    }
    Ok(total)
}

/// A finished run and how long it took.
pub struct Timed {
    pub report: ExperimentReport,
    pub wall_time_seconds: f64,
    pub workers: usize,
}

pub fn run_hazard(cfg: &HazardConfig, workers: usize) -> Result<Timed, Error> {
    cfg.validate()?;
    let start = Instant::now();
    let hist = run_chunks(cfg.identity(), cfg.trials, workers, |r| hazard::run_shard(cfg, r))?;
    let report = hazard::hazard_report(cfg, hist)?;
    Ok(Timed {
        report,
        wall_time_seconds: start.elapsed().as_secs_f64(),
        workers,
    })
}

pub fn run_poisson(cfg: &PoissonConfig, workers: usize) -> Result<Timed, Error> {
    cfg.validate()?;
    let start = Instant::now();
    let hist = run_chunks(cfg.identity(), cfg.trials, workers, |r| hazard::run_poisson_shard(cfg, r))?;
    let report = hazard::poisson_report(cfg, hist)?;
    Ok(Timed {
        report,
        wall_time_seconds: start.elapsed().as_secs_f64(),
        workers,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use geohazard_core::process::IidModel;
    use geohazard_core::{ProcessModel, ReturnSchedule, TargetSets, Targets};

    fn cfg(trials: u64) -> HazardConfig {
        let model = ProcessModel::Iid(IidModel::uniform(4).unwrap());
        let targets = Targets::Sets(TargetSets::new(&model, vec![0], vec![1]).unwrap());
        HazardConfig::new(model, ReturnSchedule::linear_multiples(&[1, 2]).unwrap(), targets, trials, 3)
    }

    #[test]
    fn chunks_cover_trials() {
        let c = chunks(2500);
        assert_eq!(c, vec![0..1024, 1024..2048, 2048..2500]);
        assert!(chunks(0).is_empty());
    }

    #[test]
    fn parallel_matches_sequential() {
        let cfg = cfg(3000);
        let seq = hazard::run_experiment(&cfg).unwrap();
        for w in [1, 3] {
            assert_eq!(run_hazard(&cfg, w).unwrap().report, seq);
        }
    }
}
