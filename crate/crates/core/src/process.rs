//! Stationary sources: i.i.d. categorical sequences, finite Markov chains and
//! continued-fraction digits of Gauss-distributed points.
//!
//! Categorical models carry arbitrary integer labels. Internally a symbol is
//! replaced by its *code*, the index of the label in the sorted alphabet, and
//! sampled paths are sequences of codes. Continued-fraction digits are their
//! own codes.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;
use rand_distr::weighted::WeightedAliasIndex;
use rand_distr::Distribution;

use crate::gauss::{self, CfDigits, DigitStream, GaussModel};
use crate::rng::{trial_stream, TrialRng};
use crate::{Error, Result, Symbol};

/// Tolerance for row sums and the stationary equation.
pub const STOCHASTIC_TOLERANCE: f64 = 1e-12;

/// Largest chain solved by dense elimination; bigger chains use power
/// iteration.
const DENSE_SOLVE_LIMIT: usize = 64;

/// Number of mixing coefficients tabulated eagerly.
const PSI_TABLE_LEN: usize = 4096;

#[derive(Debug, Clone)]
pub struct IidModel {
    alphabet: Vec<Symbol>,
    weights: Vec<f64>,
    sampler: CategoricalSampler,
}

#[derive(Debug, Clone)]
pub struct MarkovModel {
    alphabet: Vec<Symbol>,
    matrix: Vec<Vec<f64>>,
    stationary: Vec<f64>,
    start: CategoricalSampler,
    rows: Vec<CategoricalSampler>,
}

#[derive(Debug, Clone)]
enum CategoricalSampler {
    Uniform(u64),
    Alias(WeightedAliasIndex<f64>),
}

impl CategoricalSampler {
    fn new(weights: &[f64]) -> Result<Self> {
        let first = weights[0];
        if weights.iter().all(|&w| w == first) {
            return Ok(Self::Uniform(weights.len() as u64));
        }
        WeightedAliasIndex::new(weights.to_vec())
            .map(Self::Alias)
            .map_err(|e| Error::Model(format!("weights rejected by the alias table: {e}")))
    }

    #[inline]
    fn sample(&self, rng: &mut TrialRng) -> usize {
        match self {
            Self::Uniform(k) => rng.random_range(0..*k) as usize,
            Self::Alias(alias) => alias.sample(rng),
        }
    }
}

/// A validated stationary source.
#[derive(Debug, Clone)]
pub enum ProcessModel {
    Iid(IidModel),
    Markov(MarkovModel),
    GaussDigits(GaussModel),
}

/// Disjoint hazard and count symbol sets.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TargetSets {
    pub gamma0: Vec<Symbol>,
    pub gamma1: Vec<Symbol>,
}

impl TargetSets {
    /// Sorts, deduplicates and checks disjointness and positive measure.
    pub fn new(model: &ProcessModel, mut gamma0: Vec<Symbol>, mut gamma1: Vec<Symbol>) -> Result<Self> {
        gamma0.sort_unstable();
        gamma0.dedup();
        gamma1.sort_unstable();
        gamma1.dedup();
        if let Some(s) = gamma0.iter().find(|s| gamma1.binary_search(s).is_ok()) {
            return Err(Error::Hypothesis(format!(
                "hazard and count sets share symbol {s}; the sets must be disjoint"
            )));
        }
        for (name, set) in [("hazard", &gamma0), ("count", &gamma1)] {
            if model.marginal_prob(set)? <= 0.0 {
                return Err(Error::Hypothesis(format!(
                    "the {name} set must have positive probability"
                )));
            }
        }
        Ok(Self { gamma0, gamma1 })
    }
}

fn validate_alphabet(alphabet: &[Symbol]) -> Result<()> {
    if alphabet.is_empty() {
        return Err(Error::Model("empty alphabet".into()));
    }
    if alphabet.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Model("alphabet labels must be distinct".into()));
    }
    Ok(())
}

fn validate_distribution(what: &str, weights: &[f64]) -> Result<()> {
    if let Some(w) = weights.iter().find(|w| !(**w >= 0.0 && w.is_finite())) {
        return Err(Error::Model(format!("{what} has invalid entry {w}")));
    }
    let total: f64 = weights.iter().sum();
    if (total - 1.0).abs() > STOCHASTIC_TOLERANCE {
        return Err(Error::Model(format!("{what} sums to {total}, not 1")));
    }
    Ok(())
}

impl IidModel {
    /// `weights[i]` is the probability of `alphabet[i]`; labels need not be
    /// sorted on input.
    pub fn new(alphabet: Vec<Symbol>, weights: Vec<f64>) -> Result<Self> {
        if alphabet.len() != weights.len() {
            return Err(Error::Model("alphabet and weights differ in length".into()));
        }
        let mut pairs: Vec<(Symbol, f64)> = alphabet.into_iter().zip(weights).collect();
        pairs.sort_by_key(|p| p.0);
        let (alphabet, weights): (Vec<_>, Vec<_>) = pairs.into_iter().unzip();
        validate_alphabet(&alphabet)?;
        validate_distribution("i.i.d. weights", &weights)?;
        let sampler = CategoricalSampler::new(&weights)?;
        Ok(Self {
            alphabet,
            weights,
            sampler,
        })
    }

    /// Uniform law on `0..k`.
    pub fn uniform(k: usize) -> Result<Self> {
        if k == 0 {
            return Err(Error::Model("empty alphabet".into()));
        }
        Self::new((0..k as Symbol).collect(), vec![1.0 / k as f64; k])
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }
}

impl MarkovModel {
    /// Row-stochastic `matrix` over `states`; must be irreducible and
    /// aperiodic.
    pub fn new(states: Vec<Symbol>, matrix: Vec<Vec<f64>>) -> Result<Self> {
        let n = states.len();
        if matrix.len() != n || matrix.iter().any(|r| r.len() != n) {
            return Err(Error::Model(format!("transition matrix must be {n} x {n}")));
        }
        // Sort states and permute the matrix accordingly.
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by_key(|&i| states[i]);
        let alphabet: Vec<Symbol> = order.iter().map(|&i| states[i]).collect();
        validate_alphabet(&alphabet)?;
        let matrix: Vec<Vec<f64>> = order
            .iter()
            .map(|&i| order.iter().map(|&j| matrix[i][j]).collect())
            .collect();
        for (i, row) in matrix.iter().enumerate() {
            validate_distribution(&format!("row {}", alphabet[i]), row)?;
        }
        let period = chain_period(&matrix)?;
        if period != 1 {
            return Err(Error::Model(format!("chain is periodic with period {period}")));
        }
        let stationary = stationary_law(&matrix)?;
        let residual = stationary_residual(&matrix, &stationary);
        if residual > STOCHASTIC_TOLERANCE {
            return Err(Error::Model(format!(
                "stationary law residual {residual} exceeds {STOCHASTIC_TOLERANCE}"
            )));
        }
        let start = CategoricalSampler::new(&stationary)?;
        let rows = matrix
            .iter()
            .map(|r| CategoricalSampler::new(r))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            alphabet,
            matrix,
            stationary,
            start,
            rows,
        })
    }

    pub fn matrix(&self) -> &[Vec<f64>] {
        &self.matrix
    }

    pub fn stationary(&self) -> &[f64] {
        &self.stationary
    }
}

/// Period of an irreducible chain; errors if it is reducible.
fn chain_period(matrix: &[Vec<f64>]) -> Result<u64> {
    let n = matrix.len();
    let reach = |forward: bool| {
        let mut level = vec![u64::MAX; n];
        level[0] = 0;
        let mut queue = alloc::collections::VecDeque::from([0usize]);
        while let Some(u) = queue.pop_front() {
            for v in 0..n {
                let edge = if forward { matrix[u][v] } else { matrix[v][u] };
                if edge > 0.0 && level[v] == u64::MAX {
                    level[v] = level[u] + 1;
                    queue.push_back(v);
                }
            }
        }
        level
    };
    let forward = reach(true);
    if forward.contains(&u64::MAX) || reach(false).contains(&u64::MAX) {
        return Err(Error::Model("chain is not irreducible".into()));
    }
    let mut period = 0u64;
    for u in 0..n {
        for v in 0..n {
            if matrix[u][v] > 0.0 {
                let d = (forward[u] + 1).abs_diff(forward[v]);
                period = num_integer::gcd(period, d);
            }
        }
    }
    Ok(period)
}

fn stationary_residual(matrix: &[Vec<f64>], pi: &[f64]) -> f64 {
    let n = pi.len();
    (0..n)
        .map(|j| ((0..n).map(|i| pi[i] * matrix[i][j]).sum::<f64>() - pi[j]).abs())
        .fold(0.0, f64::max)
}

/// Solves `pi P = pi`, `sum pi = 1`.
pub fn stationary_law(matrix: &[Vec<f64>]) -> Result<Vec<f64>> {
    let n = matrix.len();
    if n <= DENSE_SOLVE_LIMIT {
        // Rows of (P^T - I), with the last equation replaced by sum pi = 1.
        let mut a: Vec<Vec<f64>> = (0..n)
            .map(|i| {
                let mut row: Vec<f64> = (0..n).map(|j| matrix[j][i]).collect();
                row[i] -= 1.0;
                row.push(0.0);
                row
            })
            .collect();
        a[n - 1] = vec![1.0; n + 1];
        let mut pi = gaussian_solve(a)?;
        for p in &mut pi {
            if *p < 0.0 {
                *p = 0.0;
            }
        }
        let total: f64 = pi.iter().sum();
        pi.iter_mut().for_each(|p| *p /= total);
        Ok(pi)
    } else {
        let mut pi = vec![1.0 / n as f64; n];
        for _ in 0..1_000_000 {
            let next: Vec<f64> = (0..n)
                .map(|j| (0..n).map(|i| pi[i] * matrix[i][j]).sum())
                .collect();
            let delta = next
                .iter()
                .zip(&pi)
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max);
            pi = next;
            if delta < STOCHASTIC_TOLERANCE * 1e-2 {
                return Ok(pi);
            }
        }
        Err(Error::Model("power iteration did not converge".into()))
    }
}

/// Gaussian elimination with partial pivoting on an augmented matrix.
fn gaussian_solve(mut a: Vec<Vec<f64>>) -> Result<Vec<f64>> {
    let n = a.len();
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))
            .unwrap_or(col);
        if a[pivot][col].abs() < 1e-300 {
            return Err(Error::Model("singular stationary system".into()));
        }
        a.swap(col, pivot);
        for row in col + 1..n {
            let factor = a[row][col] / a[col][col];
            if factor != 0.0 {
                for k in col..=n {
                    a[row][k] -= factor * a[col][k];
                }
            }
        }
    }
    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let s: f64 = (row + 1..n).map(|k| a[row][k] * x[k]).sum();
        x[row] = (a[row][n] - s) / a[row][row];
    }
    Ok(x)
}

fn mat_mul(a: &[Vec<f64>], b: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let n = a.len();
    let mut out = vec![vec![0.0; n]; n];
    for i in 0..n {
        for k in 0..n {
            let aik = a[i][k];
            if aik != 0.0 {
                for j in 0..n {
                    out[i][j] += aik * b[k][j];
                }
            }
        }
    }
    out
}

impl ProcessModel {
    /// Label-to-code translation; continued-fraction digits map to themselves.
    pub fn code_of(&self, symbol: Symbol) -> Result<u64> {
        let alphabet = match self {
            ProcessModel::Iid(m) => &m.alphabet,
            ProcessModel::Markov(m) => &m.alphabet,
            ProcessModel::GaussDigits(_) => {
                return if symbol >= 1 {
                    Ok(symbol)
                } else {
                    Err(Error::UnknownSymbol(symbol))
                };
            }
        };
        alphabet
            .binary_search(&symbol)
            .map(|i| i as u64)
            .map_err(|_| Error::UnknownSymbol(symbol))
    }

    /// Inverse of [`ProcessModel::code_of`].
    pub fn symbol_of(&self, code: u64) -> Symbol {
        match self {
            ProcessModel::Iid(m) => m.alphabet[code as usize],
            ProcessModel::Markov(m) => m.alphabet[code as usize],
            ProcessModel::GaussDigits(_) => code,
        }
    }

    /// Finite alphabet, `None` for continued-fraction digits.
    pub fn alphabet(&self) -> Option<&[Symbol]> {
        match self {
            ProcessModel::Iid(m) => Some(&m.alphabet),
            ProcessModel::Markov(m) => Some(&m.alphabet),
            ProcessModel::GaussDigits(_) => None,
        }
    }

    /// Stationary one-dimensional marginal `Q`.
    fn marginal(&self) -> Option<&[f64]> {
        match self {
            ProcessModel::Iid(m) => Some(&m.weights),
            ProcessModel::Markov(m) => Some(&m.stationary),
            ProcessModel::GaussDigits(_) => None,
        }
    }

    /// `Q(set) = P{xi_0 in set}`.
    pub fn marginal_prob(&self, symbols: &[Symbol]) -> Result<f64> {
        let mut codes = symbols
            .iter()
            .map(|&s| self.code_of(s))
            .collect::<Result<Vec<_>>>()?;
        codes.sort_unstable();
        codes.dedup();
        match self.marginal() {
            Some(q) => Ok(codes.iter().map(|&c| q[c as usize]).sum()),
            None => Ok(codes
                .iter()
                .map(|&d| gauss::cylinder_gauss_measure(&CfDigits::new(vec![d]).expect("digit >= 1")))
                .sum()),
        }
    }

    /// Measure of the cylinder `[w_0 ... w_{n-1}]`.
    pub fn cylinder_prob(&self, word: &[Symbol]) -> Result<f64> {
        if word.is_empty() {
            return Err(Error::Model("cylinder words must be nonempty".into()));
        }
        let codes = word
            .iter()
            .map(|&s| self.code_of(s).map(|c| c as usize))
            .collect::<Result<Vec<_>>>()?;
        Ok(match self {
            ProcessModel::Iid(m) => codes.iter().map(|&c| m.weights[c]).product(),
            ProcessModel::Markov(m) => {
                let mut p = m.stationary[codes[0]];
                for w in codes.windows(2) {
                    p *= m.matrix[w[0]][w[1]];
                }
                p
            }
            ProcessModel::GaussDigits(_) => {
                gauss::cylinder_gauss_measure(&CfDigits::new(word.to_vec())?)
            }
        })
    }

    /// psi-mixing coefficient at gap `n >= 1`.
    ///
    /// For a stationary Markov chain the supremum over separated events is
    /// attained on single states at the two ends of the gap, giving
    /// `max_{i,j} |P^n(i,j) / pi(j) - 1|`.
    pub fn psi_coefficient(&self, n: u64) -> Result<f64> {
        if n == 0 {
            return Err(Error::Parameter {
                name: "n",
                value: 0.0,
                allowed: "positive integer",
            });
        }
        match self {
            ProcessModel::Iid(_) => Ok(0.0),
            ProcessModel::Markov(m) => Ok(MarkovPsi::new(m).psi(n)),
            ProcessModel::GaussDigits(_) => Err(Error::Model(
                "continued-fraction digits only carry an exponential psi envelope".into(),
            )),
        }
    }

    /// Mixing profile used by the bound evaluators. Continued-fraction
    /// digits need a caller-supplied envelope.
    pub fn mixing_profile(&self) -> Result<MixingProfile> {
        Ok(match self {
            ProcessModel::Iid(m) => MixingProfile {
                psi: PsiSource::Independent,
                decay_rate_beta: None,
                upsilon: max_positive(&m.weights).and_then(neg_log_below_one),
            },
            ProcessModel::Markov(m) => {
                let psi = MarkovPsi::new(m);
                let beta = psi.decay_rate();
                let upsilon = markov_upsilon_base(m).and_then(neg_log_below_one);
                MixingProfile {
                    psi: PsiSource::Markov(psi),
                    decay_rate_beta: beta,
                    upsilon,
                }
            }
            ProcessModel::GaussDigits(g) => {
                let (c, beta) = g.psi_envelope.ok_or_else(|| {
                    Error::Config("continued-fraction digits need a psi envelope (C, beta)".into())
                })?;
                let mut profile = MixingProfile::envelope(c, beta);
                profile.upsilon = self.upsilon_rate(1).ok();
                profile
            }
        })
    }

    /// Decay rate `upsilon` with `P(A) <= exp(-upsilon n)` for every
    /// `n`-cylinder, checked exactly for all lengths up to `validation_len`.
    pub fn upsilon_rate(&self, validation_len: usize) -> Result<f64> {
        let (base, best_cylinder) = match self {
            ProcessModel::Iid(m) => {
                let base = max_positive(&m.weights).unwrap_or(0.0);
                let w = m.weights.clone();
                (base, max_cylinder_masses(&w, &[], validation_len, true))
            }
            ProcessModel::Markov(m) => {
                let base = markov_upsilon_base(m).unwrap_or(0.0);
                (
                    base,
                    max_cylinder_masses(&m.stationary, &m.matrix, validation_len, false),
                )
            }
            ProcessModel::GaussDigits(_) => {
                // The largest n-cylinder is [1, 1, ..., 1]; its measure decays
                // like golden-ratio^(-2n).
                let base = gauss::cylinder_gauss_measure(&CfDigits::new(vec![1])?);
                let masses = (1..=validation_len)
                    .map(|n| gauss::cylinder_gauss_measure(&CfDigits::new(vec![1; n]).expect("ones")))
                    .collect();
                (base, masses)
            }
        };
        let upsilon = neg_log_below_one(base).ok_or_else(|| {
            Error::Model("a symbol or transition has probability 1; no cylinder decay".into())
        })?;
        for (idx, mass) in best_cylinder.iter().enumerate() {
            let len = idx + 1;
            let limit = libm::exp(-upsilon * len as f64);
            if *mass > limit * (1.0 + 1e-12) {
                return Err(Error::Model(format!(
                    "a cylinder of length {len} has measure {mass} > exp(-{upsilon} * {len})"
                )));
            }
        }
        Ok(upsilon)
    }

    /// Starts a fresh path of codes for one trial.
    pub fn path_sampler(&self, rng: &mut TrialRng) -> PathSampler<'_> {
        match self {
            ProcessModel::Iid(m) => PathSampler::Iid(m),
            ProcessModel::Markov(m) => PathSampler::Markov { model: m, state: None },
            ProcessModel::GaussDigits(g) => PathSampler::Gauss(g.digit_stream(rng)),
        }
    }
}

fn max_positive(weights: &[f64]) -> Option<f64> {
    weights.iter().copied().filter(|w| *w > 0.0).reduce(f64::max)
}

fn neg_log_below_one(base: f64) -> Option<f64> {
    (base > 0.0 && base < 1.0).then(|| -libm::log(base))
}

/// `max(max pi, max P(i,j))`.
fn markov_upsilon_base(m: &MarkovModel) -> Option<f64> {
    let mut best = max_positive(&m.stationary)?;
    for row in &m.matrix {
        best = best.max(max_positive(row)?);
    }
    Some(best)
}

/// Largest cylinder measure for each length `1..=len`, by max-product dynamic
/// programming over the last symbol.
fn max_cylinder_masses(initial: &[f64], matrix: &[Vec<f64>], len: usize, iid: bool) -> Vec<f64> {
    let n = initial.len();
    let mut best = initial.to_vec();
    let mut out = Vec::with_capacity(len);
    for step in 0..len {
        out.push(best.iter().copied().fold(0.0, f64::max));
        if step + 1 == len {
            break;
        }
        best = (0..n)
            .map(|j| {
                (0..n)
                    .map(|i| best[i] * if iid { initial[j] } else { matrix[i][j] })
                    .fold(0.0, f64::max)
            })
            .collect();
    }
    out
}

/// Tabulated `psi(n)` for a Markov chain, computed from powers of the
/// deviation matrix `E = P - 1 pi` (so `P^n - 1 pi = E^n` decays to zero
/// without a rounding floor).
#[derive(Debug, Clone)]
pub struct MarkovPsi {
    deviation: Vec<Vec<f64>>,
    stationary: Vec<f64>,
    table: Vec<f64>,
}

impl MarkovPsi {
    pub fn new(m: &MarkovModel) -> Self {
        let n = m.stationary.len();
        let deviation: Vec<Vec<f64>> = (0..n)
            .map(|i| (0..n).map(|j| m.matrix[i][j] - m.stationary[j]).collect())
            .collect();
        let mut table = Vec::with_capacity(PSI_TABLE_LEN);
        // psi(0) compares a coordinate with itself: |delta_ij / pi_j - 1|.
        table.push(
            (0..n)
                .flat_map(|i| (0..n).map(move |j| (i, j)))
                .filter(|&(_, j)| m.stationary[j] > 0.0)
                .map(|(i, j)| ((if i == j { 1.0 } else { 0.0 }) / m.stationary[j] - 1.0).abs())
                .fold(0.0, f64::max),
        );
        let mut power = deviation.clone();
        let mut this = Self {
            deviation,
            stationary: m.stationary.clone(),
            table: Vec::new(),
        };
        while table.len() < PSI_TABLE_LEN {
            let v = this.psi_of(&power);
            table.push(v);
            if v == 0.0 {
                break;
            }
            power = mat_mul(&power, &this.deviation);
        }
        this.table = table;
        this
    }

    fn psi_of(&self, power: &[Vec<f64>]) -> f64 {
        let n = self.stationary.len();
        let mut best = 0.0f64;
        for row in power.iter().take(n) {
            for (j, pi) in self.stationary.iter().enumerate() {
                if *pi > 0.0 {
                    best = best.max((row[j] / pi).abs());
                }
            }
        }
        best
    }

    pub fn psi(&self, n: u64) -> f64 {
        if let Some(v) = self.table.get(n as usize) {
            return *v;
        }
        if self.table.last() == Some(&0.0) {
            return 0.0;
        }
        // E^n by repeated squaring.
        let size = self.stationary.len();
        let mut result: Option<Vec<Vec<f64>>> = None;
        let mut base = self.deviation.clone();
        let mut e = n;
        while e > 0 {
            if e & 1 == 1 {
                result = Some(match result {
                    None => base.clone(),
                    Some(r) => mat_mul(&r, &base),
                });
            }
            e >>= 1;
            if e > 0 {
                base = mat_mul(&base, &base);
            }
        }
        self.psi_of(&result.unwrap_or_else(|| vec![vec![0.0; size]; size]))
    }

    /// Limiting ratio `psi(n + 1) / psi(n)`, `None` when psi vanishes.
    pub fn decay_rate(&self) -> Option<f64> {
        let nonzero: Vec<f64> = self.table.iter().skip(1).copied().take_while(|v| *v > 1e-250).collect();
        if nonzero.len() < 2 {
            return None;
        }
        let mut prev_ratio = f64::NAN;
        for w in nonzero.windows(2) {
            let ratio = w[1] / w[0];
            if (ratio - prev_ratio).abs() < 1e-9 {
                return Some(ratio);
            }
            prev_ratio = ratio;
        }
        Some(prev_ratio)
    }
}

#[derive(Debug, Clone)]
enum PsiSource {
    Independent,
    Markov(MarkovPsi),
    Envelope { c: f64, beta: f64 },
}

/// `psi(n)` together with the decay data the bound evaluators need.
#[derive(Debug, Clone)]
pub struct MixingProfile {
    psi: PsiSource,
    pub decay_rate_beta: Option<f64>,
    pub upsilon: Option<f64>,
}

impl MixingProfile {
    /// Independent sequence: `psi = 0`, including at gap 0 where the bound
    /// sums would otherwise pick up a coordinate shared with itself.
    pub fn independent() -> Self {
        Self {
            psi: PsiSource::Independent,
            decay_rate_beta: None,
            upsilon: None,
        }
    }

    /// Envelope `psi(n) <= c beta^n` supplied from outside.
    pub fn envelope(c: f64, beta: f64) -> Self {
        Self {
            psi: PsiSource::Envelope { c, beta },
            decay_rate_beta: Some(beta),
            upsilon: None,
        }
    }

    pub fn psi(&self, n: u64) -> f64 {
        match &self.psi {
            PsiSource::Independent => 0.0,
            PsiSource::Markov(m) => m.psi(n),
            PsiSource::Envelope { c, beta } => c * libm::pow(*beta, n as f64),
        }
    }

    /// `psi` at a running gap; the infinite gap of a single return
    /// contributes nothing.
    pub fn psi_at_gap(&self, gap: crate::Gap) -> f64 {
        match gap {
            crate::Gap::Finite(g) => self.psi(g),
            crate::Gap::Infinite => 0.0,
        }
    }

    pub fn describe(&self) -> String {
        match &self.psi {
            PsiSource::Independent => "independent".into(),
            PsiSource::Markov(_) => "markov (state-pair formula)".into(),
            PsiSource::Envelope { c, beta } => format!("envelope {c} * {beta}^n"),
        }
    }
}

/// Lazily generated path codes for one trial.
#[derive(Debug)]
pub enum PathSampler<'m> {
    Iid(&'m IidModel),
    Markov {
        model: &'m MarkovModel,
        state: Option<usize>,
    },
    Gauss(DigitStream),
}

impl PathSampler<'_> {
    /// Next code, or `None` once a finite-precision source is exhausted.
    #[inline]
    pub fn next_code(&mut self, rng: &mut TrialRng) -> Option<u64> {
        match self {
            PathSampler::Iid(m) => Some(m.sampler.sample(rng) as u64),
            PathSampler::Markov { model, state } => {
                let next = match *state {
                    None => model.start.sample(rng),
                    Some(s) => model.rows[s].sample(rng),
                };
                *state = Some(next);
                Some(next as u64)
            }
            PathSampler::Gauss(stream) => stream.next_digit(),
        }
    }
}

/// Stationary sample path of `length` symbols drawn from stream `(seed, 0)`.
pub fn sample_path(model: &ProcessModel, length: usize, seed: u64) -> Result<Vec<Symbol>> {
    if length == 0 {
        return Err(Error::Parameter {
            name: "length",
            value: 0.0,
            allowed: "positive integer",
        });
    }
    let mut rng = trial_stream(seed, 0);
    let mut sampler = model.path_sampler(&mut rng);
    let mut out = Vec::with_capacity(length);
    for _ in 0..length {
        match sampler.next_code(&mut rng) {
            Some(code) => out.push(model.symbol_of(code)),
            None => return Err(Error::PrecisionExhausted { achieved: out.len() }),
        }
    }
    Ok(out)
}
