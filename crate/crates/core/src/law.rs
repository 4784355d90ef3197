//! Laws on the nonnegative integers with explicit tail accounting, total
//! variation distance, and the closed-form geometric/Poisson comparisons.

use alloc::format;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Tolerance on `sum(pmf) + tail_mass = 1`.
pub const MASS_TOLERANCE: f64 = 1e-12;

/// Default upper limit on the Poisson tail left outside the explicit support.
pub const POISSON_TAIL_TARGET: f64 = 1e-12;

/// Residual tail below which two closed-form laws are considered resolved.
const RESOLVED_TAIL: f64 = 1e-16;

const MAX_EXTENSION: usize = 50_000_000;

/// What is known about the mass above the explicit support.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "tail_kind", content = "tail_param", rename_all = "snake_case")]
pub enum TailKind {
    ExactZero,
    #[serde(rename = "geometric_tail")]
    Geometric(f64),
    #[serde(rename = "poisson_tail")]
    Poisson(f64),
    Unknown,
}

impl TailKind {
    fn is_closed_form(self) -> bool {
        !matches!(self, TailKind::Unknown)
    }
}

/// A probability mass function on `0..=cap` plus the mass above `cap`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "LawRepr", into = "LawRepr")]
pub struct DiscreteLaw {
    pmf: Vec<f64>,
    tail_mass: f64,
    tail: TailKind,
}

#[derive(Serialize, Deserialize)]
struct LawRepr {
    pmf: Vec<(u64, f64)>,
    tail_mass: f64,
    #[serde(flatten)]
    tail: TailKind,
}

impl From<DiscreteLaw> for LawRepr {
    fn from(law: DiscreteLaw) -> Self {
        LawRepr {
            pmf: law
                .pmf
                .iter()
                .enumerate()
                .filter(|(_, p)| **p != 0.0)
                .map(|(k, p)| (k as u64, *p))
                .collect(),
            tail_mass: law.tail_mass,
            tail: law.tail,
        }
    }
}

impl TryFrom<LawRepr> for DiscreteLaw {
    type Error = Error;

    fn try_from(repr: LawRepr) -> Result<Self> {
        let len = repr.pmf.iter().map(|(k, _)| *k as usize + 1).max().unwrap_or(0);
        let mut pmf = alloc::vec![0.0; len];
        for (k, p) in repr.pmf {
            pmf[k as usize] += p;
        }
        DiscreteLaw::new(pmf, repr.tail_mass, repr.tail)
    }
}

impl DiscreteLaw {
    pub fn new(pmf: Vec<f64>, tail_mass: f64, tail: TailKind) -> Result<Self> {
        if let Some((k, p)) = pmf
            .iter()
            .enumerate()
            .find(|(_, p)| !(0.0..=1.0).contains(*p))
        {
            return Err(Error::Model(format!("pmf({k}) = {p} is not a probability")));
        }
        if !(tail_mass >= 0.0) {
            return Err(Error::Parameter {
                name: "tail_mass",
                value: tail_mass,
                allowed: "[0, 1]",
            });
        }
        let total: f64 = pmf.iter().sum::<f64>() + tail_mass;
        if (total - 1.0).abs() > MASS_TOLERANCE {
            return Err(Error::Model(format!("total mass {total} differs from 1")));
        }
        if tail == TailKind::ExactZero && tail_mass != 0.0 {
            return Err(Error::Model("exact_zero tail carries mass".into()));
        }
        Ok(Self {
            pmf,
            tail_mass,
            tail,
        })
    }

    pub fn point_mass(k: usize) -> Self {
        let mut pmf = alloc::vec![0.0; k + 1];
        pmf[k] = 1.0;
        Self {
            pmf,
            tail_mass: 0.0,
            tail: TailKind::ExactZero,
        }
    }

    /// `Geo(rho){k} = rho (1 - rho)^k` on `0..=support_cap`.
    pub fn geometric(rho: f64, support_cap: usize) -> Result<Self> {
        if !(rho > 0.0 && rho <= 1.0) {
            return Err(Error::Parameter {
                name: "rho",
                value: rho,
                allowed: "(0, 1]",
            });
        }
        if rho == 1.0 {
            let mut pmf = alloc::vec![0.0; support_cap + 1];
            pmf[0] = 1.0;
            return Ok(Self {
                pmf,
                tail_mass: 0.0,
                tail: TailKind::Geometric(1.0),
            });
        }
        let pmf = (0..=support_cap).map(|k| geometric_pmf(rho, k)).collect();
        Ok(Self {
            pmf,
            tail_mass: geometric_tail(rho, support_cap),
            tail: TailKind::Geometric(rho),
        })
    }

    /// `Pois(lambda)` on `0..=support_cap`; the tail is `1 - sum(pmf)`.
    pub fn poisson(lambda: f64, support_cap: usize) -> Result<Self> {
        if !(lambda >= 0.0 && lambda.is_finite()) {
            return Err(Error::Parameter {
                name: "lambda",
                value: lambda,
                allowed: "[0, inf)",
            });
        }
        let pmf: Vec<f64> = (0..=support_cap).map(|k| poisson_pmf(lambda, k)).collect();
        let tail_mass = (1.0 - pmf.iter().sum::<f64>()).max(0.0);
        Ok(Self {
            pmf,
            tail_mass,
            tail: TailKind::Poisson(lambda),
        })
    }

    /// `Pois(lambda)` with the support chosen so the tail is below `1e-12`.
    pub fn poisson_auto(lambda: f64) -> Result<Self> {
        let cap = poisson_cap(lambda, POISSON_TAIL_TARGET);
        Self::poisson(lambda, cap)
    }

    /// Largest index of the explicit support.
    pub fn cap(&self) -> usize {
        self.pmf.len().saturating_sub(1)
    }

    pub fn pmf(&self) -> &[f64] {
        &self.pmf
    }

    pub fn tail_mass(&self) -> f64 {
        self.tail_mass
    }

    pub fn tail_kind(&self) -> TailKind {
        self.tail
    }

    /// Probability of `k`, including closed-form tails. `None` when `k` lies
    /// in an unknown tail.
    pub fn prob(&self, k: usize) -> Option<f64> {
        if let Some(p) = self.pmf.get(k) {
            return Some(*p);
        }
        match self.tail {
            TailKind::ExactZero => Some(0.0),
            TailKind::Geometric(rho) => Some(if rho == 1.0 { 0.0 } else { geometric_pmf(rho, k) }),
            TailKind::Poisson(lambda) => Some(poisson_pmf(lambda, k)),
            TailKind::Unknown => None,
        }
    }

    /// Mass strictly above `k`. Exact for closed-form tails and for `k`
    /// inside an unknown-tailed law's explicit support.
    pub fn mass_above(&self, k: usize) -> f64 {
        if k < self.pmf.len() {
            return (self.pmf[k + 1..].iter().sum::<f64>() + self.tail_mass).max(0.0);
        }
        match self.tail {
            TailKind::ExactZero => 0.0,
            TailKind::Geometric(rho) => {
                if rho == 1.0 {
                    0.0
                } else {
                    geometric_tail(rho, k)
                }
            }
            // summed forward: `tail_mass` minus the extra terms leaves a
            // rounding residue that never resolves
            TailKind::Poisson(lambda) => poisson_upper_tail(lambda, k).min(self.tail_mass),
            TailKind::Unknown => self.tail_mass,
        }
    }

    pub fn mean(&self) -> f64 {
        self.pmf
            .iter()
            .enumerate()
            .map(|(k, p)| k as f64 * p)
            .sum()
    }
}

/// Closed interval containing a total variation distance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TvdInterval {
    pub lo: f64,
    pub hi: f64,
}

impl TvdInterval {
    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }
}

/// Total variation distance `sup_G |a(G) - b(G)|` as an interval whose width
/// is the mass neither law resolves.
pub fn tvd(a: &DiscreteLaw, b: &DiscreteLaw) -> TvdInterval {
    let unknown_cap = [a, b]
        .iter()
        .filter(|l| !l.tail.is_closed_form())
        .map(|l| l.cap())
        .min();
    let zero_cap = [a, b]
        .iter()
        .filter(|l| l.tail == TailKind::ExactZero)
        .map(|l| l.cap())
        .max();

    let (cut, exact) = match (unknown_cap, zero_cap) {
        (Some(cut), _) => (cut, false),
        (None, Some(cut)) => (cut, true),
        (None, None) => {
            let mut cut = a.cap().max(b.cap());
            while cut < MAX_EXTENSION
                && (a.mass_above(cut) > RESOLVED_TAIL || b.mass_above(cut) > RESOLVED_TAIL)
            {
                cut = (cut + 1) * 2;
            }
            (cut, false)
        }
    };
    // With one law exactly zero above `cut`, the other's tail counts in full.
    let mut l1 = 0.0;
    for k in 0..=cut {
        let pa = a.prob(k).unwrap_or(0.0);
        let pb = b.prob(k).unwrap_or(0.0);
        l1 += (pa - pb).abs();
    }
    let ta = a.mass_above(cut);
    let tb = b.mass_above(cut);
    let (lo, hi) = if exact {
        (0.5 * (l1 + ta + tb), 0.5 * (l1 + ta + tb))
    } else {
        (0.5 * (l1 + (ta - tb).abs()), 0.5 * (l1 + ta + tb))
    };
    TvdInterval {
        lo: lo.clamp(0.0, 1.0),
        hi: hi.clamp(0.0, 1.0),
    }
}

fn geometric_pmf(rho: f64, k: usize) -> f64 {
    rho * libm::pow(1.0 - rho, k as f64)
}

/// `(1 - rho)^(cap + 1)`
fn geometric_tail(rho: f64, cap: usize) -> f64 {
    libm::pow(1.0 - rho, cap as f64 + 1.0)
}

pub(crate) fn poisson_pmf(lambda: f64, k: usize) -> f64 {
    if lambda == 0.0 {
        return if k == 0 { 1.0 } else { 0.0 };
    }
    let k = k as f64;
    libm::exp(-lambda + k * libm::log(lambda) - libm::lgamma(k + 1.0))
}

/// `P{Pois(lambda) > k}` by forward summation.
fn poisson_upper_tail(lambda: f64, k: usize) -> f64 {
    let mut acc = 0.0;
    for j in k + 1..k + 1 + MAX_EXTENSION {
        let term = poisson_pmf(lambda, j);
        acc += term;
        if j as f64 > lambda && (term == 0.0 || term < 1e-18 * acc) {
            break;
        }
    }
    acc
}

/// Smallest cap whose Poisson tail (computed by summation) is below `target`.
pub fn poisson_cap(lambda: f64, target: f64) -> usize {
    let mut acc = 0.0;
    let mut k = 0usize;
    loop {
        acc += poisson_pmf(lambda, k);
        if 1.0 - acc < target && k as f64 >= lambda {
            return k;
        }
        k += 1;
        if k > 10_000_000 {
            return k;
        }
    }
}

/// Hazard and count success probabilities of the independent reference chain.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HazardBernoulliParams {
    /// `P{hazard trial succeeds}`
    pub p: f64,
    /// `P{count trial succeeds}`
    pub q: f64,
}

impl HazardBernoulliParams {
    pub fn new(p: f64, q: f64) -> Result<Self> {
        if !(p > 0.0 && p <= 1.0) {
            return Err(Error::Parameter {
                name: "p",
                value: p,
                allowed: "(0, 1]",
            });
        }
        if !(0.0..=1.0).contains(&q) {
            return Err(Error::Parameter {
                name: "q",
                value: q,
                allowed: "[0, 1]",
            });
        }
        Ok(Self { p, q })
    }
}

/// Parameter `p / (p + q - pq)` of the geometric law of the count before the
/// first hazard in the independent chain.
pub fn lemma31_parameter(hp: HazardBernoulliParams) -> Result<f64> {
    let HazardBernoulliParams { p, q } = HazardBernoulliParams::new(hp.p, hp.q)?;
    Ok(p / (p + q - p * q))
}

/// Exact law of the count before the first hazard in the independent chain.
pub fn lemma31_exact_law(hp: HazardBernoulliParams, support_cap: usize) -> Result<DiscreteLaw> {
    DiscreteLaw::geometric(lemma31_parameter(hp)?, support_cap)
}

/// `2 (rho_big - rho_small) / (rho_small rho_big)`, an upper bound for
/// `d_TV(Geo(rho_big), Geo(rho_small))`.
pub fn geo_param_gap_bound(rho_small: f64, rho_big: f64) -> Result<f64> {
    if !(rho_small > 0.0 && rho_small < 1.0) {
        return Err(Error::Parameter {
            name: "rho_small",
            value: rho_small,
            allowed: "(0, 1)",
        });
    }
    if !(rho_big >= rho_small && rho_big < 1.0) {
        return Err(Error::Parameter {
            name: "rho_big",
            value: rho_big,
            allowed: "[rho_small, 1)",
        });
    }
    Ok(2.0 * (rho_big - rho_small) / (rho_small * rho_big))
}

/// `2 |l1 - l2| exp(-|l1 - l2|)`.
///
/// Dominates `d_TV(Pois(l1), Pois(l2))` only for moderate `|l1 - l2|`: the
/// expression vanishes as the gap grows while the distance tends to 1.
pub fn poisson_param_gap_bound(l1: f64, l2: f64) -> Result<f64> {
    for (name, v) in [("l1", l1), ("l2", l2)] {
        if !(v >= 0.0 && v.is_finite()) {
            return Err(Error::Parameter {
                name,
                value: v,
                allowed: "[0, inf)",
            });
        }
    }
    let d = (l1 - l2).abs();
    Ok(2.0 * d * libm::exp(-d))
}

/// `rho = q0^l / (q0^l + q1^l)`.
pub fn hazard_parameter(q0: f64, q1: f64, ell: u32) -> Result<f64> {
    for (name, v) in [("q0", q0), ("q1", q1)] {
        if !(0.0..=1.0).contains(&v) {
            return Err(Error::Parameter {
                name,
                value: v,
                allowed: "[0, 1]",
            });
        }
    }
    if q0 == 0.0 && q1 == 0.0 {
        return Err(Error::Parameter {
            name: "q0 + q1",
            value: 0.0,
            allowed: "positive",
        });
    }
    if ell == 0 {
        return Err(Error::Parameter {
            name: "ell",
            value: 0.0,
            allowed: "positive integer",
        });
    }
    // Ratio form stays accurate when both powers underflow.
    let ratio = libm::pow(q1 / q0, f64::from(ell));
    Ok(if q0 == 0.0 { 0.0 } else { 1.0 / (1.0 + ratio) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle;
    use alloc::vec;
    use proptest::prelude::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn geometric_examples() {
        let g = DiscreteLaw::geometric(1.0, 3).unwrap();
        assert_eq!(g.pmf()[0], 1.0);
        assert_eq!(g.tail_mass(), 0.0);

        let g = DiscreteLaw::geometric(0.5, 2).unwrap();
        assert_eq!(g.pmf(), &[0.5, 0.25, 0.125]);
        assert_eq!(g.tail_mass(), 0.125);
        assert_eq!(g.tail_kind(), TailKind::Geometric(0.5));

        let g = DiscreteLaw::geometric(0.2, 50).unwrap();
        let closed = libm::pow(0.8, 51.0);
        assert!(close(g.tail_mass(), closed, 1e-15));
        let summed: f64 = (51..5000).map(|k| 0.2 * libm::pow(0.8, k as f64)).sum();
        assert!(close(g.tail_mass(), summed, 1e-14));

        assert!(DiscreteLaw::geometric(0.0, 3).is_err());
        assert!(DiscreteLaw::geometric(1.5, 3).is_err());
    }

    #[test]
    fn poisson_examples() {
        let p = DiscreteLaw::poisson(0.0, 4).unwrap();
        assert_eq!(p.pmf()[0], 1.0);
        assert_eq!(p.tail_mass(), 0.0);

        let p = DiscreteLaw::poisson(1.0, 0).unwrap();
        assert!(close(p.pmf()[0], 0.367_879_441_171_442_3, 1e-15));
        assert!(close(p.tail_mass(), 1.0 - libm::exp(-1.0), 1e-15));

        let p = DiscreteLaw::poisson(2.0, 40).unwrap();
        assert!(p.tail_mass() < 1e-12);
        // summation oracle with the factorial recurrence
        let mut term = libm::exp(-2.0);
        let mut sum = term;
        for k in 1..=40 {
            term *= 2.0 / k as f64;
            sum += term;
        }
        assert!(1.0 - sum < 1e-12);

        assert!(DiscreteLaw::poisson(-1.0, 3).is_err());
    }

    #[test]
    fn law_invariants_enforced() {
        assert!(DiscreteLaw::new(vec![0.5, 0.4], 0.0, TailKind::ExactZero).is_err());
        assert!(DiscreteLaw::new(vec![0.5, 0.4], 0.1, TailKind::ExactZero).is_err());
        assert!(DiscreteLaw::new(vec![0.5, 0.4], 0.1, TailKind::Unknown).is_ok());
        assert!(DiscreteLaw::new(vec![1.5, -0.5], 0.0, TailKind::ExactZero).is_err());
        assert!(DiscreteLaw::new(vec![1.0], -0.0001, TailKind::Unknown).is_err());
    }

    #[test]
    fn tvd_examples() {
        let g = DiscreteLaw::geometric(0.5, 10).unwrap();
        let t = tvd(&g, &g);
        assert!(t.lo.abs() < 1e-12 && t.hi.abs() < 1e-12);

        for rho in [0.1, 0.3, 0.5, 0.9] {
            let t = tvd(&DiscreteLaw::point_mass(0), &DiscreteLaw::geometric(rho, 5).unwrap());
            assert!(close(t.lo, 1.0 - rho, 1e-15));
            assert_eq!(t.lo, t.hi);
        }

        let a = DiscreteLaw::poisson_auto(1.0).unwrap();
        let b = DiscreteLaw::poisson_auto(1.1).unwrap();
        let t = tvd(&a, &b);
        let v = oracle::poisson_tvd_by_summation(1.0, 1.1);
        assert!(close(t.lo, v, 1e-12) && close(t.hi, v, 1e-12));
        assert!(v <= 0.181);
    }

    #[test]
    fn tvd_with_unknown_tail_brackets() {
        let a = DiscreteLaw::new(vec![0.5, 0.3], 0.2, TailKind::Unknown).unwrap();
        let b = DiscreteLaw::geometric(0.5, 0).unwrap();
        let t = tvd(&a, &b);
        // explicit |0.5-0.5| + |0.3-0.25| = 0.05, tails 0.2 vs 0.25
        assert!(close(t.lo, 0.5 * (0.05 + 0.05), 1e-15));
        assert!(close(t.hi, 0.5 * (0.05 + 0.45), 1e-15));
    }

    #[test]
    fn independent_chain_examples() {
        let one = HazardBernoulliParams::new(1.0, 0.3).unwrap();
        assert_eq!(lemma31_parameter(one).unwrap(), 1.0);
        let half = HazardBernoulliParams::new(0.5, 0.5).unwrap();
        assert!(close(lemma31_parameter(half).unwrap(), 2.0 / 3.0, 1e-15));
        let law = lemma31_exact_law(half, 10).unwrap();
        assert!(close(law.pmf()[0], 2.0 / 3.0, 1e-15));
        assert!(close(law.pmf()[1], 2.0 / 9.0, 1e-15));

        let small = HazardBernoulliParams { p: 0.2, q: 0.2 };
        assert!(close(lemma31_parameter(small).unwrap(), 5.0 / 9.0, 1e-15));
        let dp = oracle::hazard_chain_law(0.2, 0.2, 200);
        let law = lemma31_exact_law(small, 200).unwrap();
        for k in 0..=200 {
            assert!(close(dp[k], law.pmf()[k], 1e-10));
        }

        let dp = oracle::hazard_chain_law(0.3, 0.7, 100);
        let law = lemma31_exact_law(HazardBernoulliParams { p: 0.3, q: 0.7 }, 100).unwrap();
        for k in 0..=100 {
            assert!(close(dp[k], law.pmf()[k], 1e-10));
        }

        assert!(lemma31_parameter(HazardBernoulliParams { p: 0.0, q: 0.5 }).is_err());
    }

    #[test]
    fn independent_chain_grid_matches_dp() {
        for i in 1..10 {
            for j in 1..10 {
                let (p, q) = (i as f64 / 10.0, j as f64 / 10.0);
                let dp = oracle::hazard_chain_law(p, q, 200);
                let law = lemma31_exact_law(HazardBernoulliParams { p, q }, 200).unwrap();
                let sup = (0..=200)
                    .map(|k| (dp[k] - law.pmf()[k]).abs())
                    .fold(0.0, f64::max);
                assert!(sup < 1e-10, "p={p} q={q} sup={sup}");
            }
        }
    }

    #[test]
    fn negative_binomial_identity() {
        // sum_n C(n+m, n) r^n (1-r)^(m+1) = 1
        for i in 1..10 {
            let r = i as f64 / 10.0;
            for m in 0..=20u32 {
                let mut term = libm::pow(1.0 - r, f64::from(m) + 1.0);
                let mut sum = term;
                let mut n = 0u32;
                while term > 1e-18 || n < 10 * (m + 1) {
                    n += 1;
                    term *= r * f64::from(n + m) / f64::from(n);
                    sum += term;
                }
                assert!(close(sum, 1.0, 1e-10), "r={r} m={m} sum={sum}");
            }
        }
    }

    #[test]
    fn geo_gap_bound_examples() {
        assert_eq!(geo_param_gap_bound(0.4, 0.4).unwrap(), 0.0);
        let b = geo_param_gap_bound(0.5, 0.6).unwrap();
        assert!(close(b, 2.0 / 3.0, 1e-15));
        let t = tvd(
            &DiscreteLaw::geometric(0.5, 10).unwrap(),
            &DiscreteLaw::geometric(0.6, 10).unwrap(),
        );
        assert!(t.hi <= b);
        assert!(close(t.lo, oracle::geometric_tvd_by_summation(0.5, 0.6), 1e-12));
        assert!(geo_param_gap_bound(0.6, 0.5).is_err());
        assert!(geo_param_gap_bound(0.0, 0.5).is_err());
    }

    #[test]
    fn geo_gap_bound_equals_twice_count_power() {
        // With varrho = q0^l / (q0^l + q1^l (1 - q0^l)) the bound collapses to 2 q1^l.
        for &(q0, q1, ell) in &[(0.1, 0.2, 2u32), (0.3, 0.05, 1), (0.5, 0.5, 3), (0.01, 0.02, 2)] {
            let a = libm::pow(q0, f64::from(ell));
            let c = libm::pow(q1, f64::from(ell));
            let rho = hazard_parameter(q0, q1, ell).unwrap();
            let varrho = a / (a + c * (1.0 - a));
            let bound = geo_param_gap_bound(rho, varrho).unwrap();
            assert!(close(bound, 2.0 * c, 1e-12 * (1.0 + 2.0 * c)), "{bound} vs {}", 2.0 * c);
        }
    }

    #[test]
    fn poisson_gap_bound_examples() {
        assert_eq!(poisson_param_gap_bound(1.3, 1.3).unwrap(), 0.0);
        let b = poisson_param_gap_bound(1.0, 1.1).unwrap();
        assert!(close(b, 0.2 * libm::exp(-0.1), 1e-15));
        assert!(close(b, 0.18097, 1e-5));
        for &l1 in &[0.5, 1.0, 2.0] {
            for &l2 in &[0.5, 1.0, 2.0] {
                let v = oracle::poisson_tvd_by_summation(l1, l2);
                assert!(v <= poisson_param_gap_bound(l1, l2).unwrap() + 1e-15, "{l1} {l2}");
            }
        }
    }

    #[test]
    fn poisson_gap_bound_fails_for_large_gaps() {
        let v = oracle::poisson_tvd_by_summation(0.5, 10.0);
        assert!(v > poisson_param_gap_bound(0.5, 10.0).unwrap());
    }

    #[test]
    fn hazard_parameter_examples() {
        for ell in 1..6 {
            assert!(close(hazard_parameter(0.3, 0.3, ell).unwrap(), 0.5, 1e-15));
        }
        // q1 / q0 = 2, l = 2: (1 + 2^2)^-1
        assert!(close(hazard_parameter(0.1, 0.2, 2).unwrap(), 0.2, 1e-15));
        assert!(close(hazard_parameter(0.1, 0.3, 1).unwrap(), 0.25, 1e-15));
        assert!(hazard_parameter(0.0, 0.0, 1).is_err());
        assert_eq!(hazard_parameter(0.2, 0.0, 2).unwrap(), 1.0);
    }

    #[test]
    fn law_json_shape() {
        extern crate std;
        let g = DiscreteLaw::geometric(0.5, 1).unwrap();
        let repr = LawRepr::from(g.clone());
        assert_eq!(repr.pmf, vec![(0, 0.5), (1, 0.25)]);
        let back = DiscreteLaw::try_from(repr).unwrap();
        assert_eq!(back, g);
    }

    fn arb_law() -> impl Strategy<Value = DiscreteLaw> {
        proptest::collection::vec(0.0f64..1.0, 1..12).prop_map(|w| {
            let total: f64 = w.iter().sum::<f64>() + 1e-9;
            let mut pmf: Vec<f64> = w.iter().map(|x| (x + 1e-9 / w.len() as f64) / total).collect();
            let s: f64 = pmf.iter().sum();
            let last = pmf.len() - 1;
            pmf[last] = (pmf[last] + 1.0 - s).max(0.0);
            DiscreteLaw::new(pmf, 0.0, TailKind::ExactZero).unwrap()
        })
    }

    proptest! {
        #[test]
        fn tvd_metric_properties(a in arb_law(), b in arb_law(), c in arb_law()) {
            let ab = tvd(&a, &b);
            let ba = tvd(&b, &a);
            prop_assert!((ab.lo - ba.lo).abs() < 1e-15 && (ab.hi - ba.hi).abs() < 1e-15);
            prop_assert!(ab.lo >= 0.0 && ab.hi <= 1.0);
            prop_assert!((ab.hi - ab.lo).abs() < 1e-15);
            let ac = tvd(&a, &c).lo;
            let cb = tvd(&c, &b).lo;
            prop_assert!(ab.lo <= ac + cb + 1e-12);
        }

        #[test]
        fn tvd_equals_sup_over_sets(a in arb_law(), b in arb_law()) {
            let sup = oracle::tvd_by_subsets(a.pmf(), b.pmf());
            prop_assert!((tvd(&a, &b).lo - sup).abs() < 1e-12);
        }
    }
}
