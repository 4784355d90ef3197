//! Right-hand sides of the total-variation error bounds.
//!
//! The universal constants in these bounds are not known; callers supply
//! `c_user` and every value here is a bound *shape*, not a certified bound.

use alloc::format;

use serde::{Deserialize, Serialize};

use crate::process::MixingProfile;
use crate::schedule::{Gap, ReturnSchedule, DEFAULT_HORIZON};
use crate::{Error, Result};

/// Largest `R` examined by [`choose_m_r`].
pub const R_SEARCH_CAP: u64 = 1 << 20;

/// Inputs of the geometric-law bound.
#[derive(Debug, Clone, Copy)]
pub struct BoundInputs<'a> {
    /// `Q(hazard set)`.
    pub q0: f64,
    /// `Q(count set)`.
    pub q1: f64,
    pub ell: u32,
    pub m: u64,
    pub r: u64,
    pub psi: &'a MixingProfile,
    pub schedule: &'a ReturnSchedule,
    pub c_user: f64,
}

/// Inputs of the Poisson-law bound.
#[derive(Debug, Clone, Copy)]
pub struct PoissonBoundInputs<'a> {
    pub q: f64,
    pub ell: u32,
    pub horizon: u64,
    pub r: u64,
    pub psi: &'a MixingProfile,
    pub schedule: &'a ReturnSchedule,
    pub c_user: f64,
}

/// `2^(1/(l+1)) - 1`, the mixing threshold of the geometric and Poisson
/// bounds.
pub fn psi_threshold(ell: u32) -> f64 {
    libm::pow(2.0, 1.0 / (ell as f64 + 1.0)) - 1.0
}

/// `(3/2)^(1/(l+1)) - 1`, the mixing threshold of the shift bound.
pub fn shift_psi_threshold(ell: u32) -> f64 {
    libm::pow(1.5, 1.0 / (ell as f64 + 1.0)) - 1.0
}

fn check_probability(name: &'static str, v: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&v) {
        return Err(Error::Parameter {
            name,
            value: v,
            allowed: "[0, 1]",
        });
    }
    Ok(())
}

fn check_c(c: f64) -> Result<()> {
    if !(c > 0.0 && c.is_finite()) {
        return Err(Error::Parameter {
            name: "c_user",
            value: c,
            allowed: "(0, inf)",
        });
    }
    Ok(())
}

fn check_psi_r(psi_r: f64, r: u64, threshold: f64, which: &str) -> Result<()> {
    if psi_r >= threshold {
        return Err(Error::Hypothesis(format!(
            "{which} needs psi(R) < {threshold:.12} but psi({r}) = {psi_r:.12}"
        )));
    }
    Ok(())
}

/// `sum_{n=0}^{upto} psi(gap(n))`; an infinite gap contributes nothing.
pub fn psi_gap_sum(psi: &MixingProfile, schedule: &ReturnSchedule, upto: u64) -> Result<f64> {
    let horizon = DEFAULT_HORIZON.max(upto);
    let mut sum = 0.0;
    for n in 0..=upto {
        let gap = schedule.gap(n, horizon)?;
        if gap == Gap::Infinite {
            break;
        }
        let v = psi.psi_at_gap(gap);
        if v == 0.0 && n > 0 {
            // the running gap only grows and psi is nonincreasing for every
            // built-in profile, so the rest of the sum vanishes
            break;
        }
        sum += v;
    }
    Ok(sum)
}

/// `C [ (1 - q0^l)^M + (q0^l + q1^l) ((q0 + q1) M R + M psi(R)
///   + sum_{n=0}^M psi(gap(n))) ] + 2 q1^l`.
pub fn thm21_rhs(b: &BoundInputs<'_>) -> Result<f64> {
    check_probability("q0", b.q0)?;
    check_probability("q1", b.q1)?;
    check_c(b.c_user)?;
    if b.m == 0 || b.r == 0 || b.ell == 0 {
        return Err(Error::Config("M, R and l must be positive".into()));
    }
    let psi_r = b.psi.psi(b.r);
    check_psi_r(psi_r, b.r, psi_threshold(b.ell), "the geometric bound")?;
    let l = b.ell as f64;
    let a0 = libm::pow(b.q0, l);
    let a1 = libm::pow(b.q1, l);
    let (m, r) = (b.m as f64, b.r as f64);
    let inner = (b.q0 + b.q1) * m * r + m * psi_r + psi_gap_sum(b.psi, b.schedule, b.m)?;
    Ok(b.c_user * (libm::pow(1.0 - a0, m) + (a0 + a1) * inner) + 2.0 * a1)
}

/// `wp(x) = x e^{-x}`.
pub fn wp(x: f64) -> f64 {
    x * libm::exp(-x)
}

/// `C N q^l (R q + psi(R)) + wp(C q^l sum_{n=0}^N psi(gap(n)))`.
pub fn thm23_rhs(b: &PoissonBoundInputs<'_>) -> Result<f64> {
    check_probability("q", b.q)?;
    check_c(b.c_user)?;
    if b.r == 0 || b.ell == 0 {
        return Err(Error::Config("R and l must be positive".into()));
    }
    if b.horizon < b.r {
        return Err(Error::Config(format!(
            "the horizon N = {} must be at least R = {}",
            b.horizon, b.r
        )));
    }
    let psi_r = b.psi.psi(b.r);
    check_psi_r(psi_r, b.r, psi_threshold(b.ell), "the Poisson bound")?;
    let a = libm::pow(b.q, b.ell as f64);
    let sum = psi_gap_sum(b.psi, b.schedule, b.horizon)?;
    Ok(b.c_user * b.horizon as f64 * a * (b.r as f64 * b.q + psi_r) + wp(b.c_user * a * sum))
}

/// Inputs of the shift-space bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ShiftBoundInputs {
    /// Cylinder mass of the count word.
    pub p_omega: f64,
    /// Cylinder mass of the hazard word.
    pub p_eta: f64,
    pub kappa: u64,
    pub n: u64,
    pub m: u64,
    pub ell: u32,
    pub upsilon: f64,
    /// `gamma(max(n, m))` of the schedule.
    pub gamma_nm: u64,
    /// `psi(m)`.
    pub psi_m: f64,
    pub c_user: f64,
}

/// `C [ e^{-u k / 2} gamma(n v m) + (1 + (p_omega / p_eta)^l)
///   ((n v m) e^{-u k / 2} + psi(m)^{1/2}) ]`.
pub fn main_thm_rhs(b: &ShiftBoundInputs) -> Result<f64> {
    check_probability("p_omega", b.p_omega)?;
    check_probability("p_eta", b.p_eta)?;
    check_c(b.c_user)?;
    if !(b.p_eta > 0.0) {
        return Err(Error::Parameter {
            name: "p_eta",
            value: b.p_eta,
            allowed: "(0, 1]",
        });
    }
    if !(b.upsilon > 0.0) {
        return Err(Error::Parameter {
            name: "upsilon",
            value: b.upsilon,
            allowed: "(0, inf)",
        });
    }
    let threshold = shift_psi_threshold(b.ell);
    if b.psi_m >= threshold {
        return Err(Error::Hypothesis(format!(
            "the shift bound needs psi(m) < {threshold:.12} but psi({}) = {:.12}",
            b.m, b.psi_m
        )));
    }
    let decay = libm::exp(-0.5 * b.upsilon * b.kappa as f64);
    let nm = b.n.max(b.m) as f64;
    let ratio = libm::pow(b.p_omega / b.p_eta, b.ell as f64);
    Ok(b.c_user * (decay * b.gamma_nm as f64 + (1.0 + ratio) * (nm * decay + libm::sqrt(b.psi_m))))
}

/// `M = ceil(q0^{-l} ln(1/q0))` and the least `R >= 1` with `psi(R) <= q0`,
/// required to satisfy `R <= q0^{-1/2}`.
pub fn choose_m_r(q0: f64, ell: u32, psi: &MixingProfile) -> Result<(u64, u64)> {
    if !(q0 > 0.0 && q0 < 1.0) {
        return Err(Error::Parameter {
            name: "q0",
            value: q0,
            allowed: "(0, 1)",
        });
    }
    let m = libm::ceil(libm::pow(q0, -(ell as f64)) * libm::log(1.0 / q0));
    if !(m >= 1.0 && m < u64::MAX as f64) {
        return Err(Error::Parameter {
            name: "q0",
            value: q0,
            allowed: "values giving 1 <= M < 2^64",
        });
    }
    let r_max = (libm::floor(libm::pow(q0, -0.5)) as u64).min(R_SEARCH_CAP);
    let r = (1..=r_max.max(1))
        .find(|&r| psi.psi(r) <= q0 && r <= r_max)
        .ok_or_else(|| {
            Error::SearchExhausted(format!(
                "no R <= {r_max} has psi(R) <= q0 = {q0}"
            ))
        })?;
    Ok((m as u64, r))
}

/// The four quantities whose limits the `(M, R)` schedule must control:
/// `M q^l` (to infinity), `q^l sum psi(gap)`, `M psi(R) q^l` and
/// `M R q^{l+1}` (to zero).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScheduleTerms {
    pub m_q_ell: f64,
    pub q_ell_psi_sum: f64,
    pub m_psi_r_q_ell: f64,
    pub m_r_q_ell1: f64,
}

pub fn schedule_terms(q0: f64, ell: u32, m: u64, r: u64, psi: &MixingProfile, schedule: &ReturnSchedule) -> Result<ScheduleTerms> {
    let a = libm::pow(q0, ell as f64);
    let (mf, rf) = (m as f64, r as f64);
    Ok(ScheduleTerms {
        m_q_ell: mf * a,
        q_ell_psi_sum: a * psi_gap_sum(psi, schedule, m)?,
        m_psi_r_q_ell: mf * psi.psi(r) * a,
        m_r_q_ell1: mf * rf * a * q0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::process::{MarkovModel, ProcessModel};
    use alloc::vec;

    fn iid() -> MixingProfile {
        MixingProfile::independent()
    }

    fn lin() -> ReturnSchedule {
        ReturnSchedule::linear_multiples(&[1, 2]).unwrap()
    }

    #[test]
    fn thm21_example() {
        let (psi, s) = (iid(), lin());
        let b = BoundInputs { q0: 0.1, q1: 0.1, ell: 2, m: 1000, r: 1, psi: &psi, schedule: &s, c_user: 1.0 };
        // 0.99^1000 + 0.02 * (0.2 * 1000) + 2 * 0.01
        let expected = 4.317_124_741_065_786e-5 + 4.0 + 0.02;
        assert!((thm21_rhs(&b).unwrap() - expected).abs() < 1e-12);
    }

    #[test]
    fn thm21_without_count_mass() {
        let (psi, s) = (iid(), lin());
        let b = BoundInputs { q0: 0.2, q1: 0.0, ell: 1, m: 50, r: 3, psi: &psi, schedule: &s, c_user: 2.0 };
        let expected = 2.0 * (libm::pow(0.8, 50.0) + 0.2 * (0.2 * 50.0 * 3.0));
        assert!((thm21_rhs(&b).unwrap() - expected).abs() < 1e-12);
    }

    #[test]
    fn thm21_m_monotone_terms() {
        let (psi, s) = (iid(), lin());
        let mut prev_geo = f64::INFINITY;
        let mut prev_total = 0.0;
        for m in [10u64, 100, 1000, 10_000] {
            let b = BoundInputs { q0: 0.1, q1: 0.05, ell: 2, m, r: 2, psi: &psi, schedule: &s, c_user: 1.0 };
            let geo = libm::pow(1.0 - 0.01, m as f64);
            assert!(geo < prev_geo);
            let total = thm21_rhs(&b).unwrap();
            assert!(total - geo > prev_total);
            prev_geo = geo;
            prev_total = total - geo;
        }
    }

    #[test]
    fn hypothesis_rejected_with_threshold() {
        let chain = ProcessModel::Markov(
            MarkovModel::new(vec![0, 1], vec![vec![0.9, 0.1], vec![0.1, 0.9]]).unwrap(),
        );
        let psi = chain.mixing_profile().unwrap();
        let s = lin();
        let b = BoundInputs { q0: 0.5, q1: 0.5, ell: 2, m: 10, r: 1, psi: &psi, schedule: &s, c_user: 1.0 };
        let err = thm21_rhs(&b).unwrap_err();
        assert!(format!("{err}").contains("0.259921049895"));
        // 0.8^R drops below 2^(1/3) - 1 at R = 7
        let b = BoundInputs { r: 7, ..b };
        assert!(thm21_rhs(&b).is_ok());
    }

    #[test]
    fn thm23_examples() {
        let (psi, s) = (iid(), lin());
        let b = PoissonBoundInputs { q: 0.01, ell: 2, horizon: 10_000, r: 3, psi: &psi, schedule: &s, c_user: 1.5 };
        let expected = 1.5 * 10_000.0 * 1e-4 * 3.0 * 0.01;
        assert!((thm23_rhs(&b).unwrap() - expected).abs() < 1e-12);
        assert!((wp(1.0) - libm::exp(-1.0)).abs() < 1e-15);
        let b = PoissonBoundInputs { horizon: 2, ..b };
        assert!(thm23_rhs(&b).is_err());
    }

    #[test]
    fn wp_shape() {
        assert_eq!(wp(0.0), 0.0);
        let h = 1e-5;
        assert!(((wp(1.0 + h) - wp(1.0 - h)) / (2.0 * h)).abs() < 1e-6);
        for i in 0..=1000 {
            assert!(wp(i as f64 / 100.0) <= libm::exp(-1.0) + 1e-15);
        }
    }

    #[test]
    fn main_thm_example() {
        let b = ShiftBoundInputs {
            p_omega: 0.25,
            p_eta: 0.25,
            kappa: 20,
            n: 20,
            m: 20,
            ell: 2,
            upsilon: core::f64::consts::LN_2,
            gamma_nm: 40,
            psi_m: 0.0,
            c_user: 1.0,
        };
        assert!((main_thm_rhs(&b).unwrap() - 80.0 / 1024.0).abs() < 1e-12);
        let mut prev = f64::INFINITY;
        for kappa in 0..60 {
            let v = main_thm_rhs(&ShiftBoundInputs { kappa, ..b }).unwrap();
            assert!(v < prev);
            prev = v;
        }
        assert!(prev < 1e-6);
        assert!(main_thm_rhs(&ShiftBoundInputs { psi_m: 0.2, ..b }).is_err());
    }

    #[test]
    fn monotone_in_c() {
        let (psi, s) = (iid(), lin());
        let mut prev = 0.0;
        for c in [0.5, 1.0, 2.0, 4.0] {
            let v = thm21_rhs(&BoundInputs { q0: 0.1, q1: 0.2, ell: 1, m: 30, r: 1, psi: &psi, schedule: &s, c_user: c }).unwrap();
            assert!(v > prev && v >= 0.0);
            prev = v;
        }
    }

    #[test]
    fn choose_m_r_examples() {
        assert_eq!(choose_m_r(0.1, 2, &iid()).unwrap(), (231, 1));
        assert!(choose_m_r(1.0, 2, &iid()).is_err());
        assert!(choose_m_r(0.0, 2, &iid()).is_err());
        // a slowly mixing envelope has no admissible R at moderate q0
        assert!(choose_m_r(0.25, 1, &MixingProfile::envelope(1.0, 0.99)).is_err());
    }

    #[test]
    fn schedule_limits_along_dyadic_q0() {
        let s = lin();
        let chain = ProcessModel::Markov(
            MarkovModel::new(vec![0, 1], vec![vec![0.6, 0.4], vec![0.3, 0.7]]).unwrap(),
        );
        for psi in [iid(), chain.mixing_profile().unwrap()] {
            let mut prev: Option<ScheduleTerms> = None;
            for j in 4..=20 {
                let q0 = libm::pow(2.0, -(j as f64));
                let Ok((m, r)) = choose_m_r(q0, 1, &psi) else { continue };
                let t = schedule_terms(q0, 1, m, r, &psi, &s).unwrap();
                if let Some(p) = prev {
                    assert!(t.m_q_ell > p.m_q_ell);
                    assert!(t.m_r_q_ell1 < p.m_r_q_ell1 * 1.5);
                }
                prev = Some(t);
            }
            let t = prev.unwrap();
            assert!(t.m_q_ell > 13.0);
            assert!(t.q_ell_psi_sum < 1e-4);
            assert!(t.m_psi_r_q_ell < 1e-4);
            assert!(t.m_r_q_ell1 < 0.02);
        }
    }
}
