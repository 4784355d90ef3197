//! Slow, independent reference computations.
//!
//! Nothing here shares code with the fast paths it checks: every function is
//! a direct enumeration, summation or dynamic program written from the
//! definitions. Test suites and the `oracle` subcommand call these.

use alloc::vec;
use alloc::vec::Vec;

use crate::schedule::ReturnSchedule;
use crate::{Result, Symbol};

/// Poisson pmf by the product formula, independent of the log-gamma path.
fn poisson_pmf_product(lambda: f64, k: usize) -> f64 {
    let mut p = libm::exp(-lambda);
    for j in 1..=k {
        p *= lambda / j as f64;
    }
    p
}

/// Half-L1 distance between two Poisson laws, summed until both tails are
/// below `1e-15`.
pub fn poisson_tvd_by_summation(l1: f64, l2: f64) -> f64 {
    let mut sum = 0.0;
    let (mut ca, mut cb) = (0.0, 0.0);
    let mut k = 0;
    while (1.0 - ca > 1e-15 || 1.0 - cb > 1e-15) && k < 10_000 {
        let a = poisson_pmf_product(l1, k);
        let b = poisson_pmf_product(l2, k);
        ca += a;
        cb += b;
        sum += (a - b).abs();
        k += 1;
    }
    0.5 * (sum + (1.0 - ca).max(0.0) + (1.0 - cb).max(0.0))
}

/// Half-L1 distance between two geometric laws by truncated summation.
pub fn geometric_tvd_by_summation(r1: f64, r2: f64) -> f64 {
    let (mut sum, mut ta, mut tb) = (0.0, 1.0, 1.0);
    let mut k = 0;
    while (ta > 1e-16 || tb > 1e-16) && k < 10_000_000 {
        let a = r1 * libm::pow(1.0 - r1, k as f64);
        let b = r2 * libm::pow(1.0 - r2, k as f64);
        sum += (a - b).abs();
        ta -= a;
        tb -= b;
        k += 1;
    }
    0.5 * (sum + ta.max(0.0) + tb.max(0.0))
}

/// `max_G |a(G) - b(G)|` by enumerating every subset of the support.
pub fn tvd_by_subsets(a: &[f64], b: &[f64]) -> f64 {
    let n = a.len().max(b.len());
    assert!(n <= 20, "exhaustive subset scan is limited to 20 points");
    let get = |v: &[f64], i: usize| v.get(i).copied().unwrap_or(0.0);
    let mut best = 0.0f64;
    for mask in 0u32..(1 << n) {
        let diff: f64 = (0..n)
            .filter(|i| mask >> i & 1 == 1)
            .map(|i| get(a, i) - get(b, i))
            .sum();
        best = best.max(diff.abs());
    }
    best
}

/// Law of `S = #{k < tau : Y_{k,1} = 1}` for independent Bernoulli pairs,
/// `tau` the first `k` with `Y_{k,0} = 1`, by dynamic programming over
/// `(step, count)` with the hazard absorbing. Entry `m` is `P{S = m}` for
/// `m <= cap`.
pub fn hazard_chain_law(p: f64, q: f64, cap: usize) -> Vec<f64> {
    let mut law = vec![0.0; cap + 1];
    let mut alive = vec![0.0; cap + 2];
    alive[0] = 1.0;
    let mut survival = 1.0;
    let mut steps = 0;
    while survival > 1e-18 && steps < 1_000_000 {
        let mut next = vec![0.0; cap + 2];
        for (c, &mass) in alive.iter().enumerate() {
            if mass == 0.0 {
                continue;
            }
            if c <= cap {
                law[c] += mass * p;
            }
            next[c] += mass * (1.0 - p) * (1.0 - q);
            next[(c + 1).min(cap + 1)] += mass * (1.0 - p) * q;
        }
        alive = next;
        survival = alive.iter().sum();
        steps += 1;
    }
    law
}

/// Stationary law by repeated multiplication from the uniform start.
pub fn stationary_by_power(matrix: &[Vec<f64>], iterations: usize) -> Vec<f64> {
    let n = matrix.len();
    let mut pi = vec![1.0 / n as f64; n];
    for _ in 0..iterations {
        pi = (0..n)
            .map(|j| (0..n).map(|i| pi[i] * matrix[i][j]).sum())
            .collect();
    }
    pi
}

fn matrix_power(matrix: &[Vec<f64>], n: usize) -> Vec<Vec<f64>> {
    let k = matrix.len();
    let mut out: Vec<Vec<f64>> = (0..k)
        .map(|i| (0..k).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
        .collect();
    for _ in 0..n {
        out = (0..k)
            .map(|i| {
                (0..k)
                    .map(|j| (0..k).map(|l| out[i][l] * matrix[l][j]).sum())
                    .collect()
            })
            .collect();
    }
    out
}

/// All words of length `len` over `0..k`, most significant symbol first.
fn all_words(k: usize, len: usize) -> Vec<Vec<usize>> {
    let mut words = vec![Vec::new()];
    for _ in 0..len {
        words = words
            .into_iter()
            .flat_map(|w| {
                (0..k).map(move |s| {
                    let mut x = w.clone();
                    x.push(s);
                    x
                })
            })
            .collect();
    }
    words
}

/// `psi(n)` of a stationary chain as the supremum of
/// `|P(G n D) / (P(G) P(D)) - 1|` over every event `G` in coordinates
/// `0..=m` and `D` in coordinates `m + n ..= m + n + 2`, for `m` in `0..=2`.
pub fn markov_psi_exhaustive(matrix: &[Vec<f64>], pi: &[f64], n: usize) -> f64 {
    let k = pi.len();
    let bridge = matrix_power(matrix, n);
    let word_prob = |w: &[usize], start: f64| {
        let mut p = start;
        for s in w.windows(2) {
            p *= matrix[s[0]][s[1]];
        }
        p
    };
    let mut best = 0.0f64;
    for m in 0..=2usize {
        let left = all_words(k, m + 1);
        let right = all_words(k, 3);
        assert!(left.len() <= 16 && right.len() <= 16, "event algebra too large");
        // joint[x][y] = P(xi_{0..=m} = x, xi_{m+n..} = y)
        let joint: Vec<Vec<f64>> = left
            .iter()
            .map(|x| {
                let px = word_prob(x, pi[x[0]]);
                right
                    .iter()
                    .map(|y| px * bridge[x[m]][y[0]] * word_prob(y, 1.0))
                    .collect()
            })
            .collect();
        let p_left: Vec<f64> = joint.iter().map(|r| r.iter().sum()).collect();
        let p_right: Vec<f64> = (0..right.len())
            .map(|j| joint.iter().map(|r| r[j]).sum())
            .collect();
        for g in 1u32..(1 << left.len()) {
            let in_g: Vec<usize> = (0..left.len()).filter(|i| g >> i & 1 == 1).collect();
            let pg: f64 = in_g.iter().map(|&i| p_left[i]).sum();
            if pg <= 0.0 {
                continue;
            }
            let row: Vec<f64> = (0..right.len())
                .map(|j| in_g.iter().map(|&i| joint[i][j]).sum())
                .collect();
            for d in 1u32..(1 << right.len()) {
                let (mut pd, mut pgd) = (0.0, 0.0);
                for j in 0..right.len() {
                    if d >> j & 1 == 1 {
                        pd += p_right[j];
                        pgd += row[j];
                    }
                }
                if pd > 0.0 {
                    best = best.max((pgd / (pg * pd) - 1.0).abs());
                }
            }
        }
    }
    best
}

/// Largest cylinder measure at each length `1..=len`, by enumerating every
/// word.
pub fn max_cylinder_exhaustive(pi: &[f64], matrix: &[Vec<f64>], len: usize) -> Vec<f64> {
    (1..=len)
        .map(|n| {
            all_words(pi.len(), n)
                .iter()
                .map(|w| {
                    let mut p = pi[w[0]];
                    for s in w.windows(2) {
                        p *= matrix[s[0]][s[1]];
                    }
                    p
                })
                .fold(0.0, f64::max)
        })
        .collect()
}

/// Least shift `k` in `1..=n` with `w[k + j] = w[j]` wherever both exist.
pub fn self_period_brute(w: &[Symbol]) -> usize {
    let n = w.len();
    (1..=n)
        .find(|&k| (0..n - k).all(|j| w[k + j] == w[j]))
        .unwrap_or(n)
}

fn compatible_at(a: &[Symbol], b: &[Symbol], k: usize) -> bool {
    // a cylinder at 0, b cylinder at k: coordinates k + j hold b[j]
    (0..b.len()).all(|j| k + j >= a.len() || a[k + j] == b[j])
}

/// Least `k` in `0..=min(n, m)` with the cylinders intersecting at relative
/// shift `k` in either direction.
pub fn cross_period_brute(a: &[Symbol], b: &[Symbol]) -> usize {
    let limit = a.len().min(b.len());
    (0..=limit)
        .find(|&k| compatible_at(a, b, k) || compatible_at(b, a, k))
        .unwrap_or(limit)
}

pub fn kappa_brute(a: &[Symbol], b: &[Symbol]) -> usize {
    cross_period_brute(a, b)
        .min(self_period_brute(a))
        .min(self_period_brute(b))
}

/// `(1 / ln 2) int_lo^hi dx / (1 + x)` by composite Simpson's rule.
pub fn gauss_measure_by_integration(lo: f64, hi: f64) -> f64 {
    let (lo, hi) = if lo <= hi { (lo, hi) } else { (hi, lo) };
    let n = 20_000;
    let h = (hi - lo) / n as f64;
    let f = |x: f64| 1.0 / (1.0 + x);
    let mut s = f(lo) + f(hi);
    for i in 1..n {
        let x = lo + i as f64 * h;
        s += if i % 2 == 1 { 4.0 } else { 2.0 } * f(x);
    }
    s * h / 3.0 / core::f64::consts::LN_2
}

/// First `n` continued-fraction digits of `num / den` (fewer if the
/// expansion ends).
pub fn cf_digits_u128(mut num: u128, mut den: u128, n: usize) -> Vec<u64> {
    let mut out = Vec::new();
    while out.len() < n && num != 0 {
        out.push((den / num) as u64);
        let r = den % num;
        den = num;
        num = r;
    }
    out
}

/// Gauss measure of the points of `[w]` whose next digit exceeds `k`, by
/// numeric integration between the endpoint `p_n / q_n` and the point whose
/// remaining orbit value is `1 / (k + 1)`.
pub fn gauss_cylinder_tail(w: &[u64], k: u64) -> f64 {
    let (mut pp, mut p, mut qp, mut q) = (1.0f64, 0.0f64, 0.0f64, 1.0f64);
    for &c in w {
        let (np, nq) = (c as f64 * p + pp, c as f64 * q + qp);
        pp = p;
        p = np;
        qp = q;
        q = nq;
    }
    let t = 1.0 / (k as f64 + 1.0);
    let edge = (p + t * pp) / (q + t * qp);
    gauss_measure_by_integration(p / q, edge)
}

pub fn binomial_pmf(n: u64, p: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(n as usize + 1);
    let mut c = 1.0f64;
    for k in 0..=n {
        if k > 0 {
            c = c * (n - k + 1) as f64 / k as f64;
        }
        out.push(c * libm::pow(p, k as f64) * libm::pow(1.0 - p, (n - k) as f64));
    }
    out
}

/// Exact law of `S_N = sum_{k < N} prod_i 1{xi_{q_i(k)} in target}` for an
/// i.i.d. sequence, by enumerating every path over the probed window.
pub fn exact_sum_law_iid(
    weights: &[f64],
    schedule: &ReturnSchedule,
    target: &[usize],
    horizon: u64,
) -> Result<Vec<f64>> {
    let ell = schedule.ell();
    let mut positions = vec![0u64; ell];
    let mut probes = Vec::new();
    let mut window = 0usize;
    for k in 0..horizon {
        schedule.positions(k, &mut positions)?;
        window = window.max(positions[ell - 1] as usize + 1);
        probes.push(positions.clone());
    }
    assert!(
        libm::pow(weights.len() as f64, window as f64) <= 1e7,
        "path enumeration too large"
    );
    let mut law = vec![0.0; horizon as usize + 1];
    if horizon == 0 {
        law[0] = 1.0;
        return Ok(law);
    }
    for path in all_words(weights.len(), window) {
        let p: f64 = path.iter().map(|&s| weights[s]).product();
        let s = probes
            .iter()
            .filter(|pos| pos.iter().all(|&x| target.contains(&path[x as usize])))
            .count();
        law[s] += p;
    }
    Ok(law)
}

/// Exact law of the hazard-stopped count for an i.i.d. sequence with set
/// targets, enumerating all paths over the window probed by steps
/// `0..steps`. Entry `steps + 1` holds the mass that sees no hazard.
pub fn exact_stopped_law_iid(
    weights: &[f64],
    schedule: &ReturnSchedule,
    hazard: &[usize],
    count: &[usize],
    steps: u64,
) -> Result<Vec<f64>> {
    let ell = schedule.ell();
    let mut positions = vec![0u64; ell];
    let mut probes = Vec::new();
    let mut window = 0usize;
    for k in 0..steps {
        schedule.positions(k, &mut positions)?;
        window = window.max(positions[ell - 1] as usize + 1);
        probes.push(positions.clone());
    }
    assert!(
        libm::pow(weights.len() as f64, window as f64) <= 1e7,
        "path enumeration too large"
    );
    let mut law = vec![0.0; steps as usize + 2];
    for path in all_words(weights.len(), window) {
        let p: f64 = path.iter().map(|&s| weights[s]).product();
        let mut s = 0;
        let mut stopped = false;
        for pos in &probes {
            if pos.iter().all(|&x| hazard.contains(&path[x as usize])) {
                stopped = true;
                break;
            }
            if pos.iter().all(|&x| count.contains(&path[x as usize])) {
                s += 1;
            }
        }
        law[if stopped { s } else { steps as usize + 1 }] += p;
    }
    Ok(law)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn subset_scan_on_point_masses() {
        assert!((tvd_by_subsets(&[1.0], &[0.0, 1.0]) - 1.0).abs() < 1e-15);
        assert!((tvd_by_subsets(&[0.5, 0.5], &[0.5, 0.5])).abs() < 1e-15);
    }

    #[test]
    fn dp_sums_to_one() {
        let law = hazard_chain_law(0.3, 0.4, 500);
        assert!((law.iter().sum::<f64>() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn brute_periods() {
        assert_eq!(self_period_brute(&[1, 0, 0]), 3);
        assert_eq!(cross_period_brute(&[1, 0, 0], &[2, 0, 0]), 3);
        assert_eq!(cross_period_brute(&[0, 1], &[1, 0]), 1);
    }

    #[test]
    fn binomial_is_exhaustive_sum_law() {
        let s = ReturnSchedule::linear_multiples(&[1]).unwrap();
        let law = exact_sum_law_iid(&[0.5, 0.5], &s, &[0], 4).unwrap();
        let b = binomial_pmf(4, 0.5);
        for k in 0..=4 {
            assert!((law[k] - b[k]).abs() < 1e-15);
        }
    }
}
