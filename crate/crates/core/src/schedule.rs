//! Return-time schedules `q_1 < q_2 < ... < q_l` and the quantities derived
//! from them: the running gap `q(n)`, the burn-in `gamma(n)` and the pair
//! distance `delta(k, l)`.

use alloc::format;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Scan limit used when a gap or burn-in has to be found by search.
pub const DEFAULT_HORIZON: u64 = 1_000_000;

/// Value of the running gap. `Infinite` is the empty minimum of a single
/// return schedule.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Gap {
    Finite(u64),
    Infinite,
}

impl Gap {
    pub fn finite(self) -> Option<u64> {
        match self {
            Gap::Finite(g) => Some(g),
            Gap::Infinite => None,
        }
    }

    pub fn at_least(self, bound: u64) -> bool {
        match self {
            Gap::Finite(g) => g >= bound,
            Gap::Infinite => true,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScheduleKind {
    LinearMultiples,
    Polynomial,
    ExplicitTable,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
enum Functions {
    /// `q_i(n) = coeffs[i] * n`
    LinearMultiples { coeffs: Vec<u64> },
    /// `q_i(n) = sum_d polys[i][d] * n^d`
    Polynomial { polys: Vec<Vec<u64>> },
    /// `q_i(n) = values[i][n]`, defined only inside the table.
    ExplicitTable { values: Vec<Vec<u64>> },
}

/// A validated family of return-time functions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReturnSchedule {
    functions: Functions,
    /// Per adjacent pair, the index from which `q_{i+1} - q_i` is
    /// nondecreasing (polynomial kind only).
    #[serde(default)]
    monotone_from: Vec<u64>,
}

impl ReturnSchedule {
    /// `q_i(n) = a_i n` for strictly increasing positive `a_i`.
    pub fn linear_multiples(coeffs: &[u64]) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::Schedule("at least one coefficient is required".into()));
        }
        if coeffs[0] == 0 {
            return Err(Error::Schedule("q_1(n) = 0 is not strictly increasing".into()));
        }
        if let Some(w) = coeffs.windows(2).find(|w| w[1] <= w[0]) {
            return Err(Error::Schedule(format!(
                "coefficients must be strictly increasing, found {} then {}",
                w[0], w[1]
            )));
        }
        Ok(Self {
            functions: Functions::LinearMultiples {
                coeffs: coeffs.to_vec(),
            },
            monotone_from: Vec::new(),
        })
    }

    /// Polynomials with nonnegative integer coefficients given as
    /// `(function index starting at 1, degree, coefficient)` terms.
    ///
    /// Each adjacent difference must grow without bound unless
    /// `allow_bounded_gaps` is set.
    pub fn polynomial(terms: &[(usize, u32, u64)], allow_bounded_gaps: bool) -> Result<Self> {
        let ell = terms.iter().map(|t| t.0).max().unwrap_or(0);
        if ell == 0 || terms.iter().any(|t| t.0 == 0) {
            return Err(Error::Schedule(
                "polynomial terms need function indices starting at 1".into(),
            ));
        }
        let mut polys: Vec<Vec<u64>> = (0..ell).map(|_| Vec::new()).collect();
        for &(i, degree, coeff) in terms {
            let p = &mut polys[i - 1];
            let d = degree as usize;
            if p.len() <= d {
                p.resize(d + 1, 0);
            }
            p[d] = p[d]
                .checked_add(coeff)
                .ok_or_else(|| Error::Schedule("coefficient overflow".into()))?;
        }
        for (i, p) in polys.iter_mut().enumerate() {
            while p.last() == Some(&0) {
                p.pop();
            }
            if p.len() < 2 {
                return Err(Error::Schedule(format!(
                    "q_{} is constant, not strictly increasing",
                    i + 1
                )));
            }
        }

        let mut monotone_from = Vec::with_capacity(ell.saturating_sub(1));
        for i in 0..ell.saturating_sub(1) {
            let diff = poly_sub(&polys[i + 1], &polys[i]);
            let lead = *diff.last().unwrap_or(&0);
            if lead <= 0 {
                return Err(Error::Schedule(format!(
                    "q_{} - q_{} does not stay positive",
                    i + 2,
                    i + 1
                )));
            }
            if diff.len() == 1 && !allow_bounded_gaps {
                return Err(Error::Schedule(format!(
                    "q_{} - q_{} is bounded; set the unsafe flag to allow it",
                    i + 2,
                    i + 1
                )));
            }
            // Past the Cauchy root bound of the forward difference, the
            // difference polynomial is nondecreasing; past the root bound of
            // the difference itself it is positive.
            let forward = poly_forward_difference(&diff);
            let from = cauchy_bound(&forward).max(cauchy_bound(&diff));
            if from > DEFAULT_HORIZON {
                return Err(Error::Schedule(format!(
                    "q_{} - q_{} only becomes monotone beyond {from}",
                    i + 2,
                    i + 1
                )));
            }
            for n in 1..=from.max(1) {
                if poly_eval_i128(&diff, n) <= 0 {
                    return Err(Error::Schedule(format!(
                        "ordering q_{} < q_{} fails at n = {n}",
                        i + 1,
                        i + 2
                    )));
                }
            }
            if poly_eval_i128(&diff, 0) < 0 {
                return Err(Error::Schedule(format!(
                    "ordering q_{} <= q_{} fails at n = 0",
                    i + 1,
                    i + 2
                )));
            }
            monotone_from.push(from);
        }
        Ok(Self {
            functions: Functions::Polynomial { polys },
            monotone_from,
        })
    }

    /// Tabulated functions; `values[i][n] = q_{i+1}(n)`. The table is never
    /// extrapolated.
    pub fn explicit_table(values: Vec<Vec<u64>>) -> Result<Self> {
        let len = values.first().map(Vec::len).unwrap_or(0);
        if len == 0 {
            return Err(Error::Schedule("explicit table is empty".into()));
        }
        if values.iter().any(|row| row.len() != len) {
            return Err(Error::Schedule("table rows differ in length".into()));
        }
        for (i, row) in values.iter().enumerate() {
            if let Some(n) = row.windows(2).position(|w| w[1] <= w[0]) {
                return Err(Error::Schedule(format!(
                    "q_{} is not strictly increasing at n = {n}",
                    i + 1
                )));
            }
        }
        for i in 0..values.len() - 1 {
            for n in 0..len {
                let (lo, hi) = (values[i][n], values[i + 1][n]);
                if hi < lo || (n > 0 && hi == lo) {
                    return Err(Error::Schedule(format!(
                        "ordering q_{} < q_{} fails at n = {n}",
                        i + 1,
                        i + 2
                    )));
                }
            }
        }
        Ok(Self {
            functions: Functions::ExplicitTable { values },
            monotone_from: Vec::new(),
        })
    }

    pub fn kind(&self) -> ScheduleKind {
        match self.functions {
            Functions::LinearMultiples { .. } => ScheduleKind::LinearMultiples,
            Functions::Polynomial { .. } => ScheduleKind::Polynomial,
            Functions::ExplicitTable { .. } => ScheduleKind::ExplicitTable,
        }
    }

    /// Number of return functions.
    pub fn ell(&self) -> usize {
        match &self.functions {
            Functions::LinearMultiples { coeffs } => coeffs.len(),
            Functions::Polynomial { polys } => polys.len(),
            Functions::ExplicitTable { values } => values.len(),
        }
    }

    /// Number of tabulated indices, `None` for closed-form kinds.
    pub fn table_len(&self) -> Option<usize> {
        match &self.functions {
            Functions::ExplicitTable { values } => Some(values[0].len()),
            _ => None,
        }
    }

    /// `q_{i+1}(n)` (zero-based `i`).
    pub fn eval(&self, i: usize, n: u64) -> Result<u64> {
        match &self.functions {
            Functions::LinearMultiples { coeffs } => {
                coeffs[i].checked_mul(n).ok_or(Error::Overflow(n))
            }
            Functions::Polynomial { polys } => poly_eval_u64(&polys[i], n),
            Functions::ExplicitTable { values } => {
                let row = &values[i];
                usize::try_from(n)
                    .ok()
                    .and_then(|idx| row.get(idx).copied())
                    .ok_or(Error::TableTooShort {
                        len: row.len(),
                        horizon: n,
                    })
            }
        }
    }

    /// Writes `q_1(k), ..., q_l(k)` into `out`, which must hold `ell()` slots.
    pub fn positions(&self, k: u64, out: &mut [u64]) -> Result<()> {
        for (i, slot) in out.iter_mut().enumerate() {
            *slot = self.eval(i, k)?;
        }
        Ok(())
    }

    /// Running gap `q(n) = min_{k >= n} min_i (q_{i+1}(k) - q_i(k))`.
    ///
    /// The inner minimum over `k` is taken analytically when the differences
    /// are monotone, and by scanning up to `horizon` otherwise.
    pub fn gap(&self, n: u64, horizon: u64) -> Result<Gap> {
        if n > horizon {
            return Err(Error::Schedule(format!(
                "gap index {n} exceeds the horizon {horizon}"
            )));
        }
        if self.ell() == 1 {
            if let Some(len) = self.table_len() {
                if (len as u64) <= horizon {
                    return Err(Error::TableTooShort { len, horizon });
                }
            }
            return Ok(Gap::Infinite);
        }
        match &self.functions {
            Functions::LinearMultiples { coeffs } => {
                let min_diff = coeffs.windows(2).map(|w| w[1] - w[0]).min().unwrap_or(0);
                min_diff
                    .checked_mul(n)
                    .map(Gap::Finite)
                    .ok_or(Error::Overflow(n))
            }
            Functions::Polynomial { polys } => {
                let mut best = u64::MAX;
                for i in 0..polys.len() - 1 {
                    let diff = poly_sub(&polys[i + 1], &polys[i]);
                    let stop = n.max(self.monotone_from[i]);
                    for k in n..=stop {
                        let d = poly_eval_i128(&diff, k);
                        let d = u64::try_from(d).map_err(|_| Error::Overflow(k))?;
                        best = best.min(d);
                    }
                }
                Ok(Gap::Finite(best))
            }
            Functions::ExplicitTable { values } => {
                let len = values[0].len();
                if (len as u64) <= horizon {
                    return Err(Error::TableTooShort { len, horizon });
                }
                let best = (n as usize..=horizon as usize)
                    .flat_map(|k| values.windows(2).map(move |w| w[1][k] - w[0][k]))
                    .min()
                    .unwrap_or(u64::MAX);
                Ok(Gap::Finite(best))
            }
        }
    }

    /// `gamma(n) = min { k >= 0 : q(k) >= 2n }`, searched up to `search_bound`.
    pub fn gamma(&self, n: u64, search_bound: u64) -> Result<u64> {
        if self.ell() == 1 {
            return Ok(0);
        }
        let target = n.checked_mul(2).ok_or(Error::Overflow(n))?;
        if let Functions::LinearMultiples { coeffs } = &self.functions {
            let min_diff = coeffs.windows(2).map(|w| w[1] - w[0]).min().unwrap_or(1);
            let k = target.div_ceil(min_diff);
            return if k <= search_bound {
                Ok(k)
            } else {
                Err(Error::SearchExhausted(format!(
                    "gamma({n}) = {k} exceeds the search bound {search_bound}"
                )))
            };
        }
        // The running gap is nondecreasing, so bisect on the first k that
        // reaches the target.
        if self.gap(0, search_bound)?.at_least(target) {
            return Ok(0);
        }
        if !self.gap(search_bound, search_bound)?.at_least(target) {
            return Err(Error::SearchExhausted(format!(
                "no k <= {search_bound} has q(k) >= {target}"
            )));
        }
        let (mut lo, mut hi) = (0u64, search_bound);
        while hi - lo > 1 {
            let mid = lo + (hi - lo) / 2;
            if self.gap(mid, search_bound)?.at_least(target) {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        Ok(hi)
    }

    /// `delta(k, l) = min_{i,j} |q_i(k) - q_j(l)|`.
    pub fn pair_distance(&self, k: u64, l: u64) -> Result<u64> {
        let ell = self.ell();
        let mut best = u64::MAX;
        for i in 0..ell {
            let a = self.eval(i, k)?;
            for j in 0..ell {
                best = best.min(a.abs_diff(self.eval(j, l)?));
            }
        }
        Ok(best)
    }
}

fn poly_eval_u64(coeffs: &[u64], n: u64) -> Result<u64> {
    coeffs.iter().rev().try_fold(0u64, |acc, &c| {
        acc.checked_mul(n)
            .and_then(|v| v.checked_add(c))
            .ok_or(Error::Overflow(n))
    })
}

fn poly_eval_i128(coeffs: &[i128], n: u64) -> i128 {
    let n = i128::from(n);
    coeffs
        .iter()
        .rev()
        .fold(0i128, |acc, &c| acc.saturating_mul(n).saturating_add(c))
}

fn poly_sub(a: &[u64], b: &[u64]) -> Vec<i128> {
    let len = a.len().max(b.len());
    let mut out: Vec<i128> = (0..len)
        .map(|d| {
            i128::from(a.get(d).copied().unwrap_or(0)) - i128::from(b.get(d).copied().unwrap_or(0))
        })
        .collect();
    while out.last() == Some(&0) {
        out.pop();
    }
    out
}

/// Coefficients of `p(n + 1) - p(n)`.
fn poly_forward_difference(p: &[i128]) -> Vec<i128> {
    if p.len() <= 1 {
        return Vec::new();
    }
    // p(n + 1) = sum_d c_d sum_j C(d, j) n^j
    let mut shifted = alloc::vec![0i128; p.len()];
    for (d, &c) in p.iter().enumerate() {
        let mut binom = 1i128;
        for j in 0..=d {
            shifted[j] = shifted[j].saturating_add(c.saturating_mul(binom));
            binom = binom * (d - j) as i128 / (j + 1) as i128;
        }
    }
    let mut out: Vec<i128> = shifted.iter().zip(p).map(|(s, c)| s - c).collect();
    while out.last() == Some(&0) {
        out.pop();
    }
    out
}

/// Every real root of `p` has absolute value at most `1 + max |c_j / c_d|`.
fn cauchy_bound(p: &[i128]) -> u64 {
    let Some(&lead) = p.last() else { return 0 };
    if p.len() == 1 {
        return 0;
    }
    let lead = lead.unsigned_abs();
    let worst = p[..p.len() - 1]
        .iter()
        .map(|c| c.unsigned_abs().div_ceil(lead))
        .max()
        .unwrap_or(0);
    u64::try_from(worst.saturating_add(1)).unwrap_or(u64::MAX)
}
