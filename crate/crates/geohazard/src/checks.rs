//! Brute-force oracle suites behind the `oracle` subcommand.
//!
//! Each suite compares a fast path against the slow reference in
//! `geohazard_core::oracle` on a fixed grid of cases.

use geohazard_core::gauss::{big_ratio, cylinder_gauss_measure};
use geohazard_core::law::{self, lemma31_exact_law};
use geohazard_core::process::{MarkovModel, MarkovPsi};
use geohazard_core::{oracle, words, CfDigits, DiscreteLaw, HazardBernoulliParams, ReturnSchedule, TailKind};
use serde::Serialize;

#[derive(Debug, Clone, Serialize)]
pub struct CheckResult {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

fn check(name: &'static str, worst: f64, tol: f64, what: &str) -> CheckResult {
    CheckResult {
        name,
        passed: worst < tol,
        detail: format!("{what}: worst {worst:.3e} (tolerance {tol:.0e})"),
    }
}

/// Exact geometric law of the independent hazard chain against the
/// step-by-step dynamic program.
pub fn independent_chain() -> CheckResult {
    let mut worst = 0.0f64;
    for i in 1..=9 {
        for j in 1..=9 {
            let (p, q) = (i as f64 / 10.0, j as f64 / 10.0);
            let dp = oracle::hazard_chain_law(p, q, 200);
            let exact = lemma31_exact_law(HazardBernoulliParams::new(p, q).unwrap(), 200).unwrap();
            for (k, v) in dp.iter().enumerate() {
                worst = worst.max((v - exact.prob(k).unwrap()).abs());
            }
        }
    }
    check("independent_chain", worst, 1e-10, "geometric law vs DP over 81 (p, q)")
}

/// Matrix `psi(n)` against the supremum over cylinder event pairs.
pub fn markov_psi() -> CheckResult {
    let mut worst = 0.0f64;
    for matrix in [
        vec![vec![0.9, 0.1], vec![0.1, 0.9]],
        vec![vec![0.3, 0.7], vec![0.6, 0.4]],
        vec![vec![0.99, 0.01], vec![0.2, 0.8]],
    ] {
        let m = MarkovModel::new((0..matrix.len() as u64).collect(), matrix.clone()).unwrap();
        let psi = MarkovPsi::new(&m);
        for n in 1..=3 {
            let brute = oracle::markov_psi_exhaustive(&matrix, m.stationary(), n);
            worst = worst.max((psi.psi(n as u64) - brute).abs() / brute.max(1e-300));
        }
    }
    check("markov_psi", worst, 1e-10, "relative error, 3 chains, n = 1..3")
}

/// Periods and `kappa` against definitions on every binary word pair up to
/// length 7.
pub fn word_periods() -> CheckResult {
    let all: Vec<Vec<u64>> = (1..=7usize)
        .flat_map(|n| (0..1u32 << n).map(move |m| (0..n).map(|i| (m >> i & 1) as u64).collect()))
        .collect();
    let mut bad = 0usize;
    for a in &all {
        if words::self_period(a) != oracle::self_period_brute(a) {
            bad += 1;
        }
        for b in &all {
            if words::cross_period(a, b) != oracle::cross_period_brute(a, b)
                || words::kappa(a, b) != oracle::kappa_brute(a, b)
            {
                bad += 1;
            }
        }
    }
    CheckResult {
        name: "word_periods",
        passed: bad == 0,
        detail: format!("{} words, {} pairs, {bad} mismatches", all.len(), all.len() * all.len()),
    }
}

/// Continuant cylinder measures against numeric integration.
pub fn gauss_measures() -> CheckResult {
    let mut worst = 0.0f64;
    for w in [vec![1u64], vec![2], vec![3, 1], vec![1, 1, 1], vec![2, 5, 1, 3]] {
        let d = CfDigits::new(w.clone()).unwrap();
        let ((a, b), (c, e)) = d.endpoints();
        let g = oracle::gauss_measure_by_integration(big_ratio(&a, &b), big_ratio(&c, &e));
        worst = worst.max((cylinder_gauss_measure(&d) - g).abs());
    }
    check("gauss_measures", worst, 1e-12, "cylinder measure vs Simpson integration")
}

/// Fixed-horizon sum law against enumeration of all `2^4` paths.
pub fn small_poisson_case() -> CheckResult {
    let schedule = ReturnSchedule::linear_multiples(&[1]).unwrap();
    let exact = oracle::exact_sum_law_iid(&[0.5, 0.5], &schedule, &[0], 4).unwrap();
    let binom = oracle::binomial_pmf(4, 0.5);
    let worst = exact
        .iter()
        .zip(&binom)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    check("small_poisson_case", worst, 1e-12, "N = 4 binary path enumeration vs Binomial(4, 1/2)")
}

/// Total-variation routine against subset enumeration and series sums.
pub fn tvd_routines() -> CheckResult {
    let mut worst = 0.0f64;
    let pairs = [
        (vec![0.2, 0.3, 0.5], vec![0.5, 0.5]),
        (vec![0.1; 10], vec![0.05, 0.15, 0.1, 0.1, 0.2, 0.1, 0.1, 0.05, 0.05, 0.1]),
        (vec![1.0], vec![0.0, 0.0, 1.0]),
    ];
    for (a, b) in pairs {
        let la = DiscreteLaw::new(a.clone(), 0.0, TailKind::ExactZero).unwrap();
        let lb = DiscreteLaw::new(b.clone(), 0.0, TailKind::ExactZero).unwrap();
        worst = worst.max((law::tvd(&la, &lb).hi - oracle::tvd_by_subsets(&a, &b)).abs());
    }
    for (l1, l2) in [(1.0, 1.5), (0.3, 3.0), (10.0, 10.5)] {
        let a = DiscreteLaw::poisson_auto(l1).unwrap();
        let b = DiscreteLaw::poisson_auto(l2).unwrap();
        let t = law::tvd(&a, &b);
        let s = oracle::poisson_tvd_by_summation(l1, l2);
        worst = worst.max((t.lo - s).max(s - t.hi).max(0.0)).max(t.hi - t.lo - 1e-9);
    }
    check("tvd_routines", worst, 1e-9, "interval vs subset scan and Poisson series")
}

pub fn all() -> Vec<CheckResult> {
    vec![
        independent_chain(),
        markov_psi(),
        word_periods(),
        gauss_measures(),
        small_poisson_case(),
        tvd_routines(),
    ]
}
