//! Experiment configuration files.
//!
//! A config is one JSON document describing the source, the return schedule,
//! the targets and the run parameters. Validation collects every problem it
//! finds instead of stopping at the first.

use std::collections::BTreeMap;
use std::fmt;

use geohazard_core::bounds::{self, BoundInputs, PoissonBoundInputs, ShiftBoundInputs};
use geohazard_core::gauss::{DEFAULT_MAX_DIGITS, DEFAULT_PRECISION_BITS};
use geohazard_core::hazard::{PoissonTarget, DEFAULT_BOOTSTRAP_RESAMPLES, DEFAULT_CENSOR_BUDGET};
use geohazard_core::process::{IidModel, MarkovModel};
use geohazard_core::schedule::DEFAULT_HORIZON;
use geohazard_core::{
    words, CylinderWord, GaussModel, HazardConfig, MixingProfile, PoissonConfig, ProcessModel,
    ReturnSchedule, Symbol, TargetSets, Targets,
};
use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawConfig {
    pub model: RawModel,
    pub schedule: RawSchedule,
    #[serde(default)]
    pub targets: Option<RawTargets>,
    #[serde(default)]
    pub poisson: Option<RawPoissonTarget>,
    #[serde(default)]
    pub horizon: Option<u64>,
    #[serde(default = "default_trials")]
    pub trials: u64,
    #[serde(default)]
    pub step_cap: Option<u64>,
    #[serde(default)]
    pub start_index: u64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub censor_budget: Option<f64>,
    #[serde(default)]
    pub strict: bool,
    #[serde(default)]
    pub unsafe_schedule: bool,
    #[serde(default = "yes")]
    pub check_hypotheses: bool,
    #[serde(default)]
    pub bounds: Option<RawBounds>,
    #[serde(default)]
    pub bootstrap_resamples: Option<usize>,
}

fn default_trials() -> u64 {
    10_000
}

fn yes() -> bool {
    true
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "variant", rename_all = "snake_case", deny_unknown_fields)]
pub enum RawModel {
    Iid {
        #[serde(default)]
        weights: Option<BTreeMap<String, f64>>,
        /// Shorthand for equal weights on `0..uniform`.
        #[serde(default)]
        uniform: Option<usize>,
    },
    Markov {
        matrix: Vec<Vec<f64>>,
        #[serde(default)]
        states: Option<Vec<Symbol>>,
    },
    Gauss {
        #[serde(default)]
        precision_bits: Option<usize>,
        #[serde(default)]
        max_digits: Option<usize>,
        #[serde(default)]
        psi_envelope: Option<(f64, f64)>,
    },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum RawSchedule {
    LinearMultiples { coeffs: Vec<u64> },
    Polynomial { terms: Vec<(usize, u32, u64)> },
    ExplicitTable { values: Vec<Vec<u64>> },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged, deny_unknown_fields)]
pub enum RawTargets {
    Sets {
        gamma0: Vec<Symbol>,
        gamma1: Vec<Symbol>,
    },
    Words {
        hazard_word: Vec<Symbol>,
        count_word: Vec<Symbol>,
    },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged, deny_unknown_fields)]
pub enum RawPoissonTarget {
    Set { set: Vec<Symbol> },
    Word { word: Vec<Symbol> },
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawBounds {
    #[serde(rename = "C", default)]
    pub c: Option<f64>,
    #[serde(rename = "M", default)]
    pub m: Option<u64>,
    #[serde(rename = "R", default)]
    pub r: Option<u64>,
}

/// Every problem found in a config.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigErrors(pub Vec<String>);

impl fmt::Display for ConfigErrors {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{} configuration error(s):", self.0.len())?;
        for e in &self.0 {
            writeln!(f, "  - {e}")?;
        }
        Ok(())
    }
}

impl std::error::Error for ConfigErrors {}

/// Parses JSON text, applying command-line overrides of `seed` and `trials`
/// before anything else so the hash covers the effective config.
pub fn parse(text: &str, seed: Option<u64>, trials: Option<u64>) -> Result<(Value, RawConfig), ConfigErrors> {
    let mut value: Value =
        serde_json::from_str(text).map_err(|e| ConfigErrors(vec![format!("not valid JSON: {e}")]))?;
    if let Value::Object(map) = &mut value {
        if let Some(s) = seed {
            map.insert("seed".into(), s.into());
        }
        if let Some(t) = trials {
            map.insert("trials".into(), t.into());
        }
    }
    let raw: RawConfig = serde_json::from_value(value.clone())
        .map_err(|e| ConfigErrors(vec![format!("config does not match the expected shape: {e}")]))?;
    Ok((value, raw))
}

/// SHA-256 of the config with object keys sorted.
pub fn config_hash(value: &Value) -> String {
    // serde_json's default map is ordered by key, so a round trip through
    // Value canonicalizes member order
    let canonical = serde_json::to_string(value).expect("serializing a Value cannot fail");
    let digest = Sha256::digest(canonical.as_bytes());
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

/// A config checked against every module invariant.
#[derive(Debug, Clone)]
pub struct Validated {
    pub model: ProcessModel,
    pub schedule: ReturnSchedule,
    pub hazard: Option<HazardConfig>,
    pub poisson: Option<PoissonConfig>,
    pub c_user: f64,
    pub m: Option<u64>,
    pub r: Option<u64>,
    pub strict: bool,
    pub censor_budget: f64,
    pub warnings: Vec<String>,
}

fn build_model(raw: &RawModel) -> Result<ProcessModel, String> {
    match raw {
        RawModel::Iid { weights, uniform } => match (weights, uniform) {
            (Some(w), None) => {
                let mut labels = Vec::new();
                let mut probs = Vec::new();
                for (k, p) in w {
                    labels.push(k.parse::<Symbol>().map_err(|_| {
                        format!("i.i.d. weight key {k:?} is not a nonnegative integer symbol")
                    })?);
                    probs.push(*p);
                }
                IidModel::new(labels, probs).map(ProcessModel::Iid).map_err(|e| e.to_string())
            }
            (None, Some(k)) => IidModel::uniform(*k).map(ProcessModel::Iid).map_err(|e| e.to_string()),
            _ => Err("an i.i.d. model needs exactly one of \"weights\" or \"uniform\"".into()),
        },
        RawModel::Markov { matrix, states } => {
            let states = states.clone().unwrap_or_else(|| (0..matrix.len() as Symbol).collect());
            MarkovModel::new(states, matrix.clone())
                .map(ProcessModel::Markov)
                .map_err(|e| e.to_string())
        }
        RawModel::Gauss {
            precision_bits,
            max_digits,
            psi_envelope,
        } => GaussModel::new(
            precision_bits.unwrap_or(DEFAULT_PRECISION_BITS),
            max_digits.unwrap_or(DEFAULT_MAX_DIGITS),
            *psi_envelope,
        )
        .map(ProcessModel::GaussDigits)
        .map_err(|e| e.to_string()),
    }
}

fn build_schedule(raw: &RawSchedule, unsafe_schedule: bool) -> Result<ReturnSchedule, String> {
    match raw {
        RawSchedule::LinearMultiples { coeffs } => ReturnSchedule::linear_multiples(coeffs),
        RawSchedule::Polynomial { terms } => ReturnSchedule::polynomial(terms, unsafe_schedule),
        RawSchedule::ExplicitTable { values } => ReturnSchedule::explicit_table(values.clone()),
    }
    .map_err(|e| e.to_string())
}

fn word(symbols: &[Symbol], what: &str) -> Result<CylinderWord, String> {
    CylinderWord::new(symbols.to_vec()).map_err(|e| format!("{what}: {e}"))
}

impl RawConfig {
    pub fn validate(&self) -> Result<Validated, ConfigErrors> {
        let mut errors = Vec::new();
        let mut warnings = Vec::new();

        let model = build_model(&self.model).map_err(|e| errors.push(format!("model: {e}"))).ok();
        let schedule = build_schedule(&self.schedule, self.unsafe_schedule)
            .map_err(|e| errors.push(format!("schedule: {e}")))
            .ok();
        if self.unsafe_schedule {
            warnings.push("unsafe_schedule: bounded schedule gaps are allowed; the limit laws assume they grow".into());
        }
        if self.targets.is_none() && self.poisson.is_none() {
            errors.push("give \"targets\" (hazard runs) and/or \"poisson\" with \"horizon\"".into());
        }
        if self.poisson.is_some() != self.horizon.is_some() {
            errors.push("\"poisson\" and \"horizon\" must be given together".into());
        }
        let bounds = self.bounds.clone().unwrap_or_default();
        let c_user = bounds.c.unwrap_or(1.0);
        if !(c_user > 0.0 && c_user.is_finite()) {
            errors.push(format!("bounds.C = {c_user} must be positive"));
        }
        if bounds.m == Some(0) || bounds.r == Some(0) {
            errors.push("bounds.M and bounds.R must be at least 1".into());
        }
        let censor_budget = self.censor_budget.unwrap_or(DEFAULT_CENSOR_BUDGET);

        let (Some(model), Some(schedule)) = (model, schedule) else {
            return Err(ConfigErrors(errors));
        };

        let mut hazard = None;
        if let Some(t) = &self.targets {
            let targets = match t {
                RawTargets::Sets { gamma0, gamma1 } => {
                    TargetSets::new(&model, gamma0.clone(), gamma1.clone())
                        .map(Targets::Sets)
                        .map_err(|e| match e {
                            geohazard_core::Error::Hypothesis(m) => format!(
                                "targets: {m} (hazard and count sets Gamma_0, Gamma_1 must be disjoint)"
                            ),
                            other => format!("targets: {other}"),
                        })
                }
                RawTargets::Words {
                    hazard_word,
                    count_word,
                } => word(hazard_word, "hazard_word").and_then(|h| {
                    word(count_word, "count_word").map(|c| Targets::Words { hazard: h, count: c })
                }),
            };
            match targets {
                Ok(targets) => {
                    let mut cfg = HazardConfig::new(model.clone(), schedule.clone(), targets, self.trials, self.seed);
                    cfg.step_cap = self.step_cap;
                    cfg.start_index = self.start_index;
                    cfg.censor_budget = censor_budget;
                    cfg.strict = self.strict;
                    cfg.bootstrap_resamples = self.bootstrap_resamples.unwrap_or(DEFAULT_BOOTSTRAP_RESAMPLES);
                    match cfg.validate() {
                        Ok(()) => hazard = Some(cfg),
                        Err(e) => errors.push(format!("hazard experiment: {e}")),
                    }
                }
                Err(e) => errors.push(e),
            }
        }

        let mut poisson = None;
        if let (Some(p), Some(horizon)) = (&self.poisson, self.horizon) {
            let target = match p {
                RawPoissonTarget::Set { set } => Ok(PoissonTarget::Set(set.clone())),
                RawPoissonTarget::Word { word: w } => word(w, "poisson.word").map(PoissonTarget::Word),
            };
            match target {
                Ok(target) => {
                    let mut cfg = PoissonConfig::new(model.clone(), schedule.clone(), target, horizon, self.trials, self.seed);
                    cfg.bootstrap_resamples = self.bootstrap_resamples.unwrap_or(DEFAULT_BOOTSTRAP_RESAMPLES);
                    match cfg.validate() {
                        Ok(()) => poisson = Some(cfg),
                        Err(e) => errors.push(format!("poisson experiment: {e}")),
                    }
                }
                Err(e) => errors.push(e),
            }
        }

        let v = Validated {
            model,
            schedule,
            hazard,
            poisson,
            c_user,
            m: bounds.m,
            r: bounds.r,
            strict: self.strict,
            censor_budget,
            warnings,
        };
        if errors.is_empty() && self.check_hypotheses {
            match v.hypothesis_violations() {
                Ok((errs, warns)) => {
                    errors.extend(errs);
                    let mut v = v;
                    v.warnings.extend(warns);
                    if errors.is_empty() {
                        return Ok(v);
                    }
                }
                Err(e) => errors.push(e),
            }
            return Err(ConfigErrors(errors));
        }
        if errors.is_empty() {
            Ok(v)
        } else {
            Err(ConfigErrors(errors))
        }
    }
}

/// Every evaluable bound for a validated config.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub note: String,
    pub c_user: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub choose_mr: Option<(u64, u64)>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub thm21_rhs: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub thm23_rhs: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub main_thm_rhs: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub shift_inputs: Option<ShiftBoundInputs>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub schedule_terms: Option<bounds::ScheduleTerms>,
    pub skipped: Vec<String>,
}

pub const BOUND_NOTE: &str = "bound shape, constant not certified";

impl Validated {
    fn ell(&self) -> u32 {
        self.schedule.ell() as u32
    }

    fn profile(&self) -> Result<MixingProfile, String> {
        self.model.mixing_profile().map_err(|e| e.to_string())
    }

    /// `(M, R)` from the config, filling gaps from the `(M, R)` schedule.
    fn m_r(&self, q0: f64, psi: &MixingProfile) -> Result<(u64, u64), String> {
        match (self.m, self.r) {
            (Some(m), Some(r)) => Ok((m, r)),
            (m, r) => {
                let (am, ar) = bounds::choose_m_r(q0, self.ell(), psi).map_err(|e| e.to_string())?;
                Ok((m.unwrap_or(am), r.unwrap_or(ar)))
            }
        }
    }

    /// Mixing hypotheses of the bounds: errors for violations, warnings
    /// where a check cannot be made.
    fn hypothesis_violations(&self) -> Result<(Vec<String>, Vec<String>), String> {
        let mut errors = Vec::new();
        let mut warnings = Vec::new();
        let psi = match self.profile() {
            Ok(p) => p,
            Err(e) => {
                warnings.push(format!("mixing hypotheses not checked: {e}"));
                return Ok((errors, warnings));
            }
        };
        let ell = self.ell();
        if let Some(h) = &self.hazard {
            match &h.targets {
                Targets::Sets(t) => {
                    let q0 = self.model.marginal_prob(&t.gamma0).map_err(|e| e.to_string())?;
                    match self.m_r(q0, &psi) {
                        Ok((_, r)) => {
                            let (v, thr) = (psi.psi(r), bounds::psi_threshold(ell));
                            if v >= thr {
                                errors.push(format!(
                                    "psi(R) = {v:.6} at R = {r} violates psi(R) < 2^(1/(l+1)) - 1 = {thr:.6}"
                                ));
                            }
                        }
                        Err(e) => warnings.push(format!("psi(R) hypothesis not checked: {e}")),
                    }
                }
                Targets::Words { hazard, .. } => {
                    let m = hazard.len() as u64;
                    let (v, thr) = (psi.psi(m), bounds::shift_psi_threshold(ell));
                    if v >= thr {
                        errors.push(format!(
                            "psi(m) = {v:.6} at m = {m} violates psi(m) < (3/2)^(1/(l+1)) - 1 = {thr:.6}"
                        ));
                    }
                }
            }
        }
        if let Some(p) = &self.poisson {
            let q = p.target_probability().map_err(|e| e.to_string())?;
            if q < 1.0 {
                match self.m_r(q, &psi) {
                    Ok((_, r)) => {
                        let (v, thr) = (psi.psi(r), bounds::psi_threshold(ell));
                        if v >= thr {
                            errors.push(format!(
                                "psi(R) = {v:.6} at R = {r} violates psi(R) < 2^(1/(l+1)) - 1 = {thr:.6}"
                            ));
                        }
                    }
                    Err(e) => warnings.push(format!("psi(R) hypothesis not checked: {e}")),
                }
            }
        }
        Ok((errors, warnings))
    }

    /// Evaluates every bound the config supports; failures are listed, not
    /// fatal.
    pub fn bound_report(&self) -> BoundReport {
        let mut out = BoundReport {
            note: BOUND_NOTE.into(),
            c_user: self.c_user,
            ..Default::default()
        };
        let psi = match self.profile() {
            Ok(p) => p,
            Err(e) => {
                out.skipped.push(e);
                return out;
            }
        };
        let ell = self.ell();
        if let Some(h) = &self.hazard {
            match &h.targets {
                Targets::Sets(t) => {
                    let q0 = self.model.marginal_prob(&t.gamma0).unwrap_or(f64::NAN);
                    let q1 = self.model.marginal_prob(&t.gamma1).unwrap_or(f64::NAN);
                    match self.m_r(q0, &psi) {
                        Ok((m, r)) => {
                            out.choose_mr = Some((m, r));
                            let b = BoundInputs {
                                q0,
                                q1,
                                ell,
                                m,
                                r,
                                psi: &psi,
                                schedule: &self.schedule,
                                c_user: self.c_user,
                            };
                            match bounds::thm21_rhs(&b) {
                                Ok(v) => out.thm21_rhs = Some(v),
                                Err(e) => out.skipped.push(format!("thm21_rhs: {e}")),
                            }
                            match bounds::schedule_terms(q0, ell, m, r, &psi, &self.schedule) {
                                Ok(t) => out.schedule_terms = Some(t),
                                Err(e) => out.skipped.push(format!("schedule terms: {e}")),
                            }
                        }
                        Err(e) => out.skipped.push(format!("choose_MR: {e}")),
                    }
                }
                Targets::Words { hazard, count } => match self.shift_inputs(hazard, count, &psi) {
                    Ok(inputs) => {
                        match bounds::main_thm_rhs(&inputs) {
                            Ok(v) => out.main_thm_rhs = Some(v),
                            Err(e) => out.skipped.push(format!("main_thm_rhs: {e}")),
                        }
                        out.shift_inputs = Some(inputs);
                    }
                    Err(e) => out.skipped.push(format!("main_thm_rhs: {e}")),
                },
            }
        }
        if let Some(p) = &self.poisson {
            let q = p.target_probability().unwrap_or(f64::NAN);
            let r = match self.r {
                Some(r) => Ok(r),
                None => bounds::choose_m_r(q, ell, &psi).map(|mr| mr.1).map_err(|e| e.to_string()),
            };
            match r {
                Ok(r) => {
                    let b = PoissonBoundInputs {
                        q,
                        ell,
                        horizon: p.horizon,
                        r,
                        psi: &psi,
                        schedule: &self.schedule,
                        c_user: self.c_user,
                    };
                    match bounds::thm23_rhs(&b) {
                        Ok(v) => out.thm23_rhs = Some(v),
                        Err(e) => out.skipped.push(format!("thm23_rhs: {e}")),
                    }
                }
                Err(e) => out.skipped.push(format!("thm23_rhs: {e}")),
            }
        }
        out
    }

    fn shift_inputs(&self, hazard: &CylinderWord, count: &CylinderWord, psi: &MixingProfile) -> Result<ShiftBoundInputs, String> {
        let (n, m) = (count.len() as u64, hazard.len() as u64);
        let upsilon = self.model.upsilon_rate(12).map_err(|e| e.to_string())?;
        let gamma_nm = self
            .schedule
            .gamma(n.max(m), DEFAULT_HORIZON)
            .map_err(|e| e.to_string())?;
        Ok(ShiftBoundInputs {
            p_omega: self.model.cylinder_prob(count.symbols()).map_err(|e| e.to_string())?,
            p_eta: self.model.cylinder_prob(hazard.symbols()).map_err(|e| e.to_string())?,
            kappa: words::kappa(count.symbols(), hazard.symbols()) as u64,
            n,
            m,
            ell: self.ell(),
            upsilon,
            gamma_nm,
            psi_m: psi.psi(m),
            c_user: self.c_user,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn a1() -> &'static str {
        r#"{
            "model": {"variant": "iid", "uniform": 10},
            "schedule": {"kind": "linear_multiples", "coeffs": [1, 2]},
            "targets": {"gamma0": [0], "gamma1": [1]},
            "trials": 1000,
            "seed": 7
        }"#
    }

    #[test]
    fn well_formed_config_passes() {
        let (_, raw) = parse(a1(), None, None).unwrap();
        let v = raw.validate().unwrap();
        assert!(v.hazard.is_some());
        let b = v.bound_report();
        assert_eq!(b.choose_mr, Some((231, 1)));
        assert!(b.thm21_rhs.is_some());
    }

    #[test]
    fn overlapping_sets_cite_disjointness() {
        let text = a1().replace(r#""gamma1": [1]"#, r#""gamma1": [0, 1]"#);
        let (_, raw) = parse(&text, None, None).unwrap();
        let err = raw.validate().unwrap_err();
        assert!(err.0.iter().any(|e| e.contains("disjoint")), "{err}");
    }

    #[test]
    fn errors_are_aggregated() {
        let text = r#"{
            "model": {"variant": "iid", "weights": {"0": 0.5, "1": 0.6}},
            "schedule": {"kind": "linear_multiples", "coeffs": [2, 1]},
            "targets": {"gamma0": [0], "gamma1": [1]},
            "bounds": {"C": -1}
        }"#;
        let (_, raw) = parse(text, None, None).unwrap();
        let err = raw.validate().unwrap_err();
        assert!(err.0.len() >= 3, "{err}");
    }

    #[test]
    fn psi_threshold_violation_reported() {
        let text = r#"{
            "model": {"variant": "markov", "matrix": [[0.95, 0.05], [0.05, 0.95]]},
            "schedule": {"kind": "linear_multiples", "coeffs": [1, 2]},
            "targets": {"gamma0": [0], "gamma1": [1]},
            "bounds": {"M": 100, "R": 2}
        }"#;
        let (_, raw) = parse(text, None, None).unwrap();
        let err = raw.validate().unwrap_err();
        assert!(err.0.iter().any(|e| e.contains("2^(1/(l+1)) - 1")), "{err}");
    }

    #[test]
    fn hash_ignores_key_order() {
        let reordered = r#"{
            "seed": 7,
            "trials": 1000,
            "targets": {"gamma1": [1], "gamma0": [0]},
            "schedule": {"coeffs": [1, 2], "kind": "linear_multiples"},
            "model": {"uniform": 10, "variant": "iid"}
        }"#;
        let (a, _) = parse(a1(), None, None).unwrap();
        let (b, _) = parse(reordered, None, None).unwrap();
        assert_eq!(config_hash(&a), config_hash(&b));
        let (c, _) = parse(a1(), Some(8), None).unwrap();
        assert_ne!(config_hash(&a), config_hash(&c));
    }

    #[test]
    fn unknown_fields_rejected() {
        let text = a1().replace(r#""seed": 7"#, r#""seed": 7, "sead": 8"#);
        assert!(parse(&text, None, None).is_err());
    }
}
