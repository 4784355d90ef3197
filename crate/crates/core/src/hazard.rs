//! The simulation engine: hazard-stopped counts, fixed-horizon counts, and
//! their empirical laws.
//!
//! At step `k` the engine probes the path at `q_1(k), ..., q_l(k)`. The
//! hazard indicator fires when every probe lands in the hazard target, the
//! count indicator when every probe lands in the count target. A trial stops
//! at the first hazard; the count at that step is not added.

use alloc::collections::VecDeque;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::ops::Range;

use rand_distr::{Binomial, Distribution};
use serde::{Deserialize, Serialize};

use crate::law::{self, DiscreteLaw, TailKind, TvdInterval};
use crate::process::{PathSampler, ProcessModel, TargetSets};
use crate::rng::{auxiliary_stream, trial_stream, TrialRng};
use crate::schedule::{ReturnSchedule, ScheduleKind};
use crate::words::CylinderWord;
use crate::{Error, Result, Symbol};

/// Default probability budget for a trial to run past the step cap.
pub const DEFAULT_TRUNCATION_BUDGET: f64 = 1e-6;
pub const MIN_AUTO_CAP: u64 = 1_000;
pub const MAX_AUTO_CAP: u64 = 100_000_000;
pub const DEFAULT_BOOTSTRAP_RESAMPLES: usize = 1000;
pub const DEFAULT_CENSOR_BUDGET: f64 = 1e-4;
pub const BOOTSTRAP_LEVEL: f64 = 0.95;

/// What the hazard and count indicators look for.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Targets {
    /// Single-symbol membership in disjoint sets.
    Sets(TargetSets),
    /// Full word match starting at each probe.
    Words {
        hazard: CylinderWord,
        count: CylinderWord,
    },
}

/// Target of a fixed-horizon count.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PoissonTarget {
    Set(Vec<Symbol>),
    Word(CylinderWord),
}

#[derive(Debug, Clone)]
pub struct HazardConfig {
    pub model: ProcessModel,
    pub schedule: ReturnSchedule,
    pub targets: Targets,
    pub trials: u64,
    /// Steps scanned before a trial is censored; `None` picks it from the
    /// hazard probability.
    pub step_cap: Option<u64>,
    /// First step at which indicators are evaluated (0 or 1).
    pub start_index: u64,
    pub seed: u64,
    pub censor_budget: f64,
    pub strict: bool,
    pub bootstrap_resamples: usize,
}

impl HazardConfig {
    pub fn new(model: ProcessModel, schedule: ReturnSchedule, targets: Targets, trials: u64, seed: u64) -> Self {
        Self {
            model,
            schedule,
            targets,
            trials,
            step_cap: None,
            start_index: 0,
            seed,
            censor_budget: DEFAULT_CENSOR_BUDGET,
            strict: false,
            bootstrap_resamples: DEFAULT_BOOTSTRAP_RESAMPLES,
        }
    }

    /// Probability that the hazard indicator fires at a given step:
    /// `Q(hazard)^l` or `P(hazard word)^l`.
    pub fn hazard_step_probability(&self) -> Result<f64> {
        let base = match &self.targets {
            Targets::Sets(t) => self.model.marginal_prob(&t.gamma0)?,
            Targets::Words { hazard, .. } => self.model.cylinder_prob(hazard.symbols())?,
        };
        Ok(libm::pow(base, self.schedule.ell() as f64))
    }

    /// Geometric parameter `a^l / (a^l + b^l)` from the hazard and count
    /// masses `a` and `b`.
    pub fn rho(&self) -> Result<f64> {
        let (a, b) = match &self.targets {
            Targets::Sets(t) => (
                self.model.marginal_prob(&t.gamma0)?,
                self.model.marginal_prob(&t.gamma1)?,
            ),
            Targets::Words { hazard, count } => (
                self.model.cylinder_prob(hazard.symbols())?,
                self.model.cylinder_prob(count.symbols())?,
            ),
        };
        law::hazard_parameter(a, b, self.schedule.ell() as u32)
    }

    /// The configured step cap, or `ceil(ln(budget) / ln(1 - p))` clamped to
    /// `[1e3, 1e8]` with `p` the per-step hazard probability.
    pub fn effective_step_cap(&self) -> Result<u64> {
        if let Some(cap) = self.step_cap {
            return Ok(cap);
        }
        let p = self.hazard_step_probability()?;
        Ok(auto_step_cap(p, DEFAULT_TRUNCATION_BUDGET))
    }

    pub fn validate(&self) -> Result<()> {
        validate_common(self.trials, self.bootstrap_resamples)?;
        if self.start_index > 1 {
            return Err(Error::Config(format!(
                "start_index must be 0 or 1, got {}",
                self.start_index
            )));
        }
        if !(self.censor_budget >= 0.0 && self.censor_budget <= 1.0) {
            return Err(Error::Parameter {
                name: "censor_budget",
                value: self.censor_budget,
                allowed: "[0, 1]",
            });
        }
        match &self.targets {
            Targets::Sets(t) => {
                // re-run the set checks against this model
                TargetSets::new(&self.model, t.gamma0.clone(), t.gamma1.clone())?;
            }
            Targets::Words { hazard, count } => {
                if hazard == count {
                    return Err(Error::Hypothesis(
                        "hazard and count words must differ".into(),
                    ));
                }
                for (name, w) in [("hazard", hazard), ("count", count)] {
                    if self.model.cylinder_prob(w.symbols())? <= 0.0 {
                        return Err(Error::Hypothesis(format!(
                            "the {name} word has probability zero"
                        )));
                    }
                }
            }
        }
        let cap = self.effective_step_cap()?;
        if cap == 0 {
            return Err(Error::Config("step_cap must be positive".into()));
        }
        check_table_covers(&self.schedule, self.start_index + cap)?;
        if let ProcessModel::GaussDigits(g) = &self.model {
            let need = self.schedule.eval(self.schedule.ell() - 1, self.start_index)? as usize
                + word_span(&self.targets);
            if g.max_digits < need {
                return Err(Error::Config(format!(
                    "max_digits = {} cannot cover the first probe window of {need} digits",
                    g.max_digits
                )));
            }
        }
        Ok(())
    }

    /// Fingerprint shared by all shards of this experiment.
    pub fn identity(&self) -> u64 {
        fnv1a(
            format!(
                "hazard|{:?}|{:?}|{:?}|{}|{:?}|{}|{}",
                self.model_fingerprint(),
                self.schedule,
                self.targets,
                self.trials,
                self.effective_step_cap().ok(),
                self.start_index,
                self.seed
            )
            .as_bytes(),
        )
    }

    fn model_fingerprint(&self) -> String {
        model_fingerprint(&self.model)
    }
}

fn model_fingerprint(model: &ProcessModel) -> String {
    match model {
        ProcessModel::Iid(m) => format!("iid{:?}{:?}", model.alphabet(), m.weights()),
        ProcessModel::Markov(m) => format!("markov{:?}{:?}", model.alphabet(), m.matrix()),
        ProcessModel::GaussDigits(g) => format!("gauss{}/{}", g.precision_bits, g.max_digits),
    }
}

fn word_span(targets: &Targets) -> usize {
    match targets {
        Targets::Sets(_) => 1,
        Targets::Words { hazard, count } => hazard.len().max(count.len()),
    }
}

fn check_table_covers(schedule: &ReturnSchedule, steps: u64) -> Result<()> {
    if schedule.kind() == ScheduleKind::ExplicitTable {
        let len = schedule.table_len().unwrap_or(0);
        if (len as u64) < steps {
            return Err(Error::TableTooShort {
                len,
                horizon: steps,
            });
        }
    }
    Ok(())
}

fn validate_common(trials: u64, resamples: usize) -> Result<()> {
    if trials == 0 {
        return Err(Error::Config("trials must be at least 1".into()));
    }
    if resamples == 0 {
        return Err(Error::Config("bootstrap resamples must be at least 1".into()));
    }
    Ok(())
}

pub fn auto_step_cap(p_hazard: f64, budget: f64) -> u64 {
    if p_hazard >= 1.0 {
        return MIN_AUTO_CAP;
    }
    if p_hazard <= 0.0 {
        return MAX_AUTO_CAP;
    }
    let cap = libm::ceil(libm::log(budget) / libm::log1p(-p_hazard));
    (cap as u64).clamp(MIN_AUTO_CAP, MAX_AUTO_CAP)
}

#[derive(Debug, Clone)]
pub struct PoissonConfig {
    pub model: ProcessModel,
    pub schedule: ReturnSchedule,
    pub target: PoissonTarget,
    pub horizon: u64,
    pub trials: u64,
    pub seed: u64,
    pub bootstrap_resamples: usize,
}

impl PoissonConfig {
    pub fn new(model: ProcessModel, schedule: ReturnSchedule, target: PoissonTarget, horizon: u64, trials: u64, seed: u64) -> Self {
        Self {
            model,
            schedule,
            target,
            horizon,
            trials,
            seed,
            bootstrap_resamples: DEFAULT_BOOTSTRAP_RESAMPLES,
        }
    }

    /// `P(target)` for one probe.
    pub fn target_probability(&self) -> Result<f64> {
        match &self.target {
            PoissonTarget::Set(s) => self.model.marginal_prob(s),
            PoissonTarget::Word(w) => self.model.cylinder_prob(w.symbols()),
        }
    }

    /// `lambda = N P(target)^l`.
    pub fn lambda(&self) -> Result<f64> {
        Ok(self.horizon as f64 * libm::pow(self.target_probability()?, self.schedule.ell() as f64))
    }

    pub fn validate(&self) -> Result<()> {
        validate_common(self.trials, self.bootstrap_resamples)?;
        if self.target_probability()? <= 0.0 {
            return Err(Error::Hypothesis("the target must have positive probability".into()));
        }
        if let PoissonTarget::Set(s) = &self.target {
            if s.is_empty() {
                return Err(Error::Config("the target set is empty".into()));
            }
        }
        check_table_covers(&self.schedule, self.horizon)
    }

    pub fn identity(&self) -> u64 {
        fnv1a(
            format!(
                "poisson|{}|{:?}|{:?}|{}|{}|{}",
                model_fingerprint(&self.model),
                self.schedule,
                self.target,
                self.horizon,
                self.trials,
                self.seed
            )
            .as_bytes(),
        )
    }
}

fn fnv1a(bytes: &[u8]) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in bytes {
        h ^= *b as u64;
        h = h.wrapping_mul(0x0100_0000_01b3);
    }
    h
}

/// Result of one trial.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrialOutcome {
    pub stopped_count: u64,
    /// `false` when the trial was censored: step cap reached without a hazard
    /// or the source ran out of precision.
    pub hazard_hit: bool,
    pub steps_used: u64,
}

/// Symbol-code membership.
#[derive(Debug, Clone)]
enum SymbolSet {
    Table(Vec<bool>),
    Sorted(Vec<u64>),
}

const TABLE_LIMIT: u64 = 1 << 16;

impl SymbolSet {
    fn new(mut codes: Vec<u64>) -> Self {
        codes.sort_unstable();
        codes.dedup();
        match codes.last() {
            Some(&max) if max < TABLE_LIMIT => {
                let mut table = vec![false; max as usize + 1];
                for c in codes {
                    table[c as usize] = true;
                }
                SymbolSet::Table(table)
            }
            _ => SymbolSet::Sorted(codes),
        }
    }

    #[inline]
    fn contains(&self, code: u64) -> bool {
        match self {
            SymbolSet::Table(t) => t.get(code as usize).copied().unwrap_or(false),
            SymbolSet::Sorted(s) => s.binary_search(&code).is_ok(),
        }
    }
}

#[derive(Debug, Clone)]
enum Matcher {
    Set(SymbolSet),
    Word(Vec<u64>),
    /// Never fires (fixed-horizon runs have no hazard).
    Never,
}

impl Matcher {
    /// Whether every probe matches; `None` if the source ran dry.
    #[inline]
    fn all_match(&self, path: &mut PathBuffer<'_>, rng: &mut TrialRng, probes: &[u64]) -> Option<bool> {
        match self {
            Matcher::Never => Some(false),
            Matcher::Set(set) => {
                for &p in probes {
                    if !set.contains(path.get(p, rng)?) {
                        return Some(false);
                    }
                }
                Some(true)
            }
            Matcher::Word(word) => {
                for &p in probes {
                    for (j, &c) in word.iter().enumerate() {
                        if path.get(p + j as u64, rng)? != c {
                            return Some(false);
                        }
                    }
                }
                Some(true)
            }
        }
    }
}

const UNSAMPLED: u64 = u64::MAX;

/// Window of the sample path indexed by absolute position. Sequential
/// sources fill every position in order; independent sources draw only the
/// positions that are actually probed.
struct PathBuffer<'m> {
    base: u64,
    buf: VecDeque<u64>,
    sampler: PathSampler<'m>,
    sparse: bool,
}

impl<'m> PathBuffer<'m> {
    fn new(model: &'m ProcessModel, rng: &mut TrialRng) -> Self {
        Self {
            base: 0,
            buf: VecDeque::new(),
            sampler: model.path_sampler(rng),
            sparse: matches!(model, ProcessModel::Iid(_)),
        }
    }

    #[inline]
    fn get(&mut self, pos: u64, rng: &mut TrialRng) -> Option<u64> {
        debug_assert!(pos >= self.base, "position {pos} already released");
        let idx = (pos - self.base) as usize;
        if self.sparse {
            if idx >= self.buf.len() {
                self.buf.resize(idx + 1, UNSAMPLED);
            }
            let slot = &mut self.buf[idx];
            if *slot == UNSAMPLED {
                *slot = self.sampler.next_code(rng)?;
            }
            Some(*slot)
        } else {
            while self.buf.len() <= idx {
                let c = self.sampler.next_code(rng)?;
                self.buf.push_back(c);
            }
            Some(self.buf[idx])
        }
    }

    /// Forgets positions below `pos`; sequential sources still advance
    /// through them.
    fn release_before(&mut self, pos: u64) {
        let drop = (pos.saturating_sub(self.base) as usize).min(self.buf.len());
        if self.sparse || drop > 0 {
            self.buf.drain(..drop);
            self.base += drop as u64;
            if self.sparse && self.base < pos {
                self.base = pos;
            }
        }
    }
}

/// Compiled engine for one configuration.
struct Engine<'c> {
    model: &'c ProcessModel,
    schedule: &'c ReturnSchedule,
    hazard: Matcher,
    count: Matcher,
    start: u64,
    steps: u64,
    seed: u64,
    stop_on_hazard: bool,
}

fn compile_set(model: &ProcessModel, symbols: &[Symbol]) -> Result<Matcher> {
    let codes = symbols
        .iter()
        .map(|&s| model.code_of(s))
        .collect::<Result<Vec<_>>>()?;
    Ok(Matcher::Set(SymbolSet::new(codes)))
}

fn compile_word(model: &ProcessModel, word: &CylinderWord) -> Result<Matcher> {
    Ok(Matcher::Word(
        word.symbols()
            .iter()
            .map(|&s| model.code_of(s))
            .collect::<Result<Vec<_>>>()?,
    ))
}

impl<'c> Engine<'c> {
    fn hazard(cfg: &'c HazardConfig) -> Result<Self> {
        let (hazard, count) = match &cfg.targets {
            Targets::Sets(t) => (compile_set(&cfg.model, &t.gamma0)?, compile_set(&cfg.model, &t.gamma1)?),
            Targets::Words { hazard, count } => (
                compile_word(&cfg.model, hazard)?,
                compile_word(&cfg.model, count)?,
            ),
        };
        Ok(Self {
            model: &cfg.model,
            schedule: &cfg.schedule,
            hazard,
            count,
            start: cfg.start_index,
            steps: cfg.effective_step_cap()?,
            seed: cfg.seed,
            stop_on_hazard: true,
        })
    }

    fn poisson(cfg: &'c PoissonConfig) -> Result<Self> {
        let count = match &cfg.target {
            PoissonTarget::Set(s) => compile_set(&cfg.model, s)?,
            PoissonTarget::Word(w) => compile_word(&cfg.model, w)?,
        };
        Ok(Self {
            model: &cfg.model,
            schedule: &cfg.schedule,
            hazard: Matcher::Never,
            count,
            start: 0,
            steps: cfg.horizon,
            seed: cfg.seed,
            stop_on_hazard: false,
        })
    }

    /// Runs one trial; `trace` sees `(k, hazard fired, count added)` for
    /// every scanned step.
    fn run<F: FnMut(u64, bool, bool)>(&self, trial: u64, mut trace: F) -> Result<TrialOutcome> {
        let mut rng = trial_stream(self.seed, trial);
        let mut path = PathBuffer::new(self.model, &mut rng);
        let mut probes = vec![0u64; self.schedule.ell()];
        let mut count = 0u64;
        for (used, k) in (self.start..self.start + self.steps).enumerate() {
            self.schedule.positions(k, &mut probes)?;
            path.release_before(probes[0]);
            let Some(hit) = self.hazard.all_match(&mut path, &mut rng, &probes) else {
                return Ok(censored(count, used as u64));
            };
            if hit && self.stop_on_hazard {
                trace(k, true, false);
                return Ok(TrialOutcome {
                    stopped_count: count,
                    hazard_hit: true,
                    steps_used: used as u64 + 1,
                });
            }
            let Some(c) = self.count.all_match(&mut path, &mut rng, &probes) else {
                return Ok(censored(count, used as u64));
            };
            count += c as u64;
            trace(k, false, c);
        }
        // a fixed-horizon run completes; a hazard run that gets here is censored
        Ok(TrialOutcome {
            stopped_count: count,
            hazard_hit: !self.stop_on_hazard,
            steps_used: self.steps,
        })
    }
}

fn censored(count: u64, used: u64) -> TrialOutcome {
    TrialOutcome {
        stopped_count: count,
        hazard_hit: false,
        steps_used: used,
    }
}

pub fn run_trial(cfg: &HazardConfig, trial: u64) -> Result<TrialOutcome> {
    Engine::hazard(cfg)?.run(trial, |_, _, _| {})
}

/// Step-by-step record of one trial: `(k, hazard fired, count added)`.
pub fn trace_trial(cfg: &HazardConfig, trial: u64) -> Result<(TrialOutcome, Vec<(u64, bool, bool)>)> {
    let mut steps = Vec::new();
    let out = Engine::hazard(cfg)?.run(trial, |k, h, c| steps.push((k, h, c)))?;
    Ok((out, steps))
}

pub fn run_poisson_trial(cfg: &PoissonConfig, trial: u64) -> Result<TrialOutcome> {
    Engine::poisson(cfg)?.run(trial, |_, _, _| {})
}

/// Indicator of a single step on a given path of symbols. Errors when the
/// path is too short for the probes.
pub fn indicator(model: &ProcessModel, path: &[Symbol], schedule: &ReturnSchedule, k: u64, target: &PoissonTarget) -> Result<bool> {
    let mut probes = vec![0u64; schedule.ell()];
    schedule.positions(k, &mut probes)?;
    let word: Vec<Symbol> = match target {
        PoissonTarget::Set(_) => vec![],
        PoissonTarget::Word(w) => w.symbols().to_vec(),
    };
    let span = word.len().max(1) as u64;
    let need = probes[probes.len() - 1] + span;
    if (path.len() as u64) < need {
        return Err(Error::TableTooShort {
            len: path.len(),
            horizon: need,
        });
    }
    for s in path {
        model.code_of(*s)?;
    }
    Ok(probes.iter().all(|&p| match target {
        PoissonTarget::Set(set) => set.contains(&path[p as usize]),
        PoissonTarget::Word(_) => word
            .iter()
            .enumerate()
            .all(|(j, w)| path[p as usize + j] == *w),
    }))
}

/// Counts of stopped values from a set of trials.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Histogram {
    pub id: u64,
    pub counts: Vec<u64>,
    pub censored: u64,
    pub trials: u64,
}

impl Histogram {
    pub fn empty(id: u64) -> Self {
        Self {
            id,
            counts: Vec::new(),
            censored: 0,
            trials: 0,
        }
    }

    pub fn record(&mut self, outcome: &TrialOutcome) {
        self.trials += 1;
        if !outcome.hazard_hit {
            self.censored += 1;
            return;
        }
        let k = outcome.stopped_count as usize;
        if self.counts.len() <= k {
            self.counts.resize(k + 1, 0);
        }
        self.counts[k] += 1;
    }

    pub fn completed(&self) -> u64 {
        self.trials - self.censored
    }

    /// Empirical law: `count / trials` on the support, censored mass as an
    /// unknown tail.
    pub fn law(&self) -> Result<DiscreteLaw> {
        law_from_counts(&self.counts, self.censored, self.trials)
    }
}

fn law_from_counts(counts: &[u64], censored: u64, trials: u64) -> Result<DiscreteLaw> {
    if trials == 0 {
        return Err(Error::Config("empty histogram".into()));
    }
    let n = trials as f64;
    let pmf = counts.iter().map(|&c| c as f64 / n).collect();
    if censored == 0 {
        DiscreteLaw::new(pmf, 0.0, TailKind::ExactZero)
    } else {
        DiscreteLaw::new(pmf, censored as f64 / n, TailKind::Unknown)
    }
}

/// Pointwise sum of two histograms of the same experiment.
pub fn empirical_merge(a: &Histogram, b: &Histogram) -> Result<Histogram> {
    if a.id != b.id {
        return Err(Error::IdentityMismatch);
    }
    let len = a.counts.len().max(b.counts.len());
    let counts = (0..len)
        .map(|k| a.counts.get(k).copied().unwrap_or(0) + b.counts.get(k).copied().unwrap_or(0))
        .collect();
    Ok(Histogram {
        id: a.id,
        counts,
        censored: a.censored + b.censored,
        trials: a.trials + b.trials,
    })
}

/// Runs the trials in `range` sequentially.
pub fn run_shard(cfg: &HazardConfig, range: Range<u64>) -> Result<Histogram> {
    let engine = Engine::hazard(cfg)?;
    let mut h = Histogram::empty(cfg.identity());
    for t in range {
        h.record(&engine.run(t, |_, _, _| {})?);
    }
    Ok(h)
}

pub fn run_poisson_shard(cfg: &PoissonConfig, range: Range<u64>) -> Result<Histogram> {
    let engine = Engine::poisson(cfg)?;
    let mut h = Histogram::empty(cfg.identity());
    for t in range {
        h.record(&engine.run(t, |_, _, _| {})?);
    }
    Ok(h)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BootstrapCi {
    pub level: f64,
    pub lo: f64,
    pub hi: f64,
    pub resamples: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentKind {
    Hazard,
    Poisson,
}

/// Empirical law of the stopped (or fixed-horizon) count against its limit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub kind: ExperimentKind,
    pub histogram: Histogram,
    pub empirical: DiscreteLaw,
    pub target: DiscreteLaw,
    /// Geometric parameter (hazard runs).
    pub rho_used: Option<f64>,
    /// Poisson parameter (fixed-horizon runs).
    pub lambda_used: Option<f64>,
    pub tvd_interval: TvdInterval,
    pub bootstrap_ci: BootstrapCi,
    pub censored_fraction: f64,
    pub trials: u64,
    pub seed: u64,
    /// Steps scanned per trial: the step cap or the horizon.
    pub steps: u64,
    pub start_index: u64,
    pub warnings: Vec<String>,
    /// Filled in by callers that can read a clock.
    pub wall_time_seconds: Option<f64>,
}

impl ExperimentReport {
    pub fn budget_violated(&self, budget: f64) -> bool {
        self.censored_fraction > budget
    }
}

/// Target law with enough explicit support to compare against `hist`.
fn geometric_target(rho: f64, hist: &Histogram) -> Result<DiscreteLaw> {
    let quantile = if rho >= 1.0 {
        0
    } else {
        libm::ceil(libm::log(1e-12) / libm::log1p(-rho)) as usize
    };
    DiscreteLaw::geometric(rho, quantile.max(hist.counts.len()).min(10_000_000))
}

fn poisson_target(lambda: f64, hist: &Histogram) -> Result<DiscreteLaw> {
    let cap = law::poisson_cap(lambda, law::POISSON_TAIL_TARGET).max(hist.counts.len());
    DiscreteLaw::poisson(lambda, cap)
}

/// Percentile bootstrap of the upper TVD end: multinomial resamples of the
/// histogram (censored bin included) drawn from the auxiliary stream.
fn bootstrap(hist: &Histogram, target: &DiscreteLaw, resamples: usize, seed: u64) -> Result<BootstrapCi> {
    let mut rng = auxiliary_stream(seed);
    let n = hist.trials;
    let mut stats = Vec::with_capacity(resamples);
    let mut counts = vec![0u64; hist.counts.len()];
    for _ in 0..resamples {
        let mut remaining = n;
        let mut remaining_p = 1.0f64;
        for (slot, &c) in counts.iter_mut().zip(&hist.counts) {
            let p = c as f64 / n as f64;
            *slot = if remaining == 0 || p <= 0.0 {
                0
            } else if p >= remaining_p {
                remaining
            } else {
                let b = Binomial::new(remaining, (p / remaining_p).min(1.0))
                    .map_err(|e| Error::Model(format!("bootstrap binomial: {e}")))?;
                b.sample(&mut rng)
            };
            remaining -= *slot;
            remaining_p -= p;
        }
        // whatever is left falls in the censored bin
        let law = law_from_counts(&counts, remaining, n)?;
        stats.push(law::tvd(&law, target).hi);
    }
    stats.sort_by(f64::total_cmp);
    let q = |level: f64| {
        let idx = libm::floor(level * (resamples - 1) as f64) as usize;
        stats[idx.min(resamples - 1)]
    };
    let alpha = (1.0 - BOOTSTRAP_LEVEL) / 2.0;
    Ok(BootstrapCi {
        level: BOOTSTRAP_LEVEL,
        lo: q(alpha),
        hi: q(1.0 - alpha),
        resamples,
    })
}

/// Report for a finished hazard histogram.
pub fn hazard_report(cfg: &HazardConfig, hist: Histogram) -> Result<ExperimentReport> {
    if hist.id != cfg.identity() {
        return Err(Error::IdentityMismatch);
    }
    let rho = cfg.rho()?;
    let target = geometric_target(rho, &hist)?;
    let empirical = hist.law()?;
    let tvd = law::tvd(&empirical, &target);
    let ci = bootstrap(&hist, &target, cfg.bootstrap_resamples, cfg.seed)?;
    let censored_fraction = hist.censored as f64 / hist.trials as f64;
    let mut warnings = Vec::new();
    if censored_fraction > cfg.censor_budget {
        warnings.push(format!(
            "censored fraction {censored_fraction} exceeds the budget {}",
            cfg.censor_budget
        ));
    }
    Ok(ExperimentReport {
        kind: ExperimentKind::Hazard,
        empirical,
        target,
        rho_used: Some(rho),
        lambda_used: None,
        tvd_interval: tvd,
        bootstrap_ci: ci,
        censored_fraction,
        trials: hist.trials,
        seed: cfg.seed,
        steps: cfg.effective_step_cap()?,
        start_index: cfg.start_index,
        histogram: hist,
        warnings,
        wall_time_seconds: None,
    })
}

pub fn poisson_report(cfg: &PoissonConfig, hist: Histogram) -> Result<ExperimentReport> {
    if hist.id != cfg.identity() {
        return Err(Error::IdentityMismatch);
    }
    let lambda = cfg.lambda()?;
    let target = poisson_target(lambda, &hist)?;
    let empirical = hist.law()?;
    let tvd = law::tvd(&empirical, &target);
    let ci = bootstrap(&hist, &target, cfg.bootstrap_resamples, cfg.seed)?;
    let censored_fraction = hist.censored as f64 / hist.trials as f64;
    let mut warnings = Vec::new();
    if hist.censored > 0 {
        warnings.push(format!("{} trials ran out of source precision", hist.censored));
    }
    Ok(ExperimentReport {
        kind: ExperimentKind::Poisson,
        empirical,
        target,
        rho_used: None,
        lambda_used: Some(lambda),
        tvd_interval: tvd,
        bootstrap_ci: ci,
        censored_fraction,
        trials: hist.trials,
        seed: cfg.seed,
        steps: cfg.horizon,
        start_index: 0,
        histogram: hist,
        warnings,
        wall_time_seconds: None,
    })
}

/// Sequential run of every trial, then the report. Strict configurations
/// fail when censoring exceeds the budget.
pub fn run_experiment(cfg: &HazardConfig) -> Result<ExperimentReport> {
    cfg.validate()?;
    let hist = run_shard(cfg, 0..cfg.trials)?;
    let report = hazard_report(cfg, hist)?;
    if cfg.strict && report.budget_violated(cfg.censor_budget) {
        return Err(Error::CensoringBudget {
            fraction: report.censored_fraction,
            budget: cfg.censor_budget,
        });
    }
    Ok(report)
}

pub fn run_poisson_experiment(cfg: &PoissonConfig) -> Result<ExperimentReport> {
    cfg.validate()?;
    let hist = run_poisson_shard(cfg, 0..cfg.trials)?;
    poisson_report(cfg, hist)
}
