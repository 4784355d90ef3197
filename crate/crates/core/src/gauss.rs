//! Continued fractions under the Gauss measure `G(dx) = dx / ((1 + x) ln 2)`.
//!
//! Starting points are dyadic cells `[m / 2^b, (m + 1) / 2^b)`. A digit is
//! emitted only when both ends of the cell agree on it, so every emitted digit
//! is exact for every point of the cell.

use alloc::vec::Vec;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::Rng;

use crate::rng::TrialRng;
use crate::{Error, Result};

pub const DEFAULT_PRECISION_BITS: usize = 512;
pub const DEFAULT_MAX_DIGITS: usize = 200;

/// Extra fixed-point bits carried through the exponential.
const GUARD_BITS: usize = 64;

/// `2 log2(golden ratio)`: bits consumed per digit by the slowest-shrinking
/// cylinder `[1, 1, ..., 1]`.
const MIN_BITS_PER_DIGIT: f64 = 1.388_423_851_356_214_6;

/// A finite continued-fraction word `[c_0, ..., c_{n-1}]`, all digits `>= 1`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CfDigits {
    digits: Vec<u64>,
}

impl CfDigits {
    pub fn new(digits: Vec<u64>) -> Result<Self> {
        if digits.is_empty() {
            return Err(Error::Config("continued-fraction words must be nonempty".into()));
        }
        if digits.contains(&0) {
            return Err(Error::Config("continued-fraction digits must be >= 1".into()));
        }
        Ok(Self { digits })
    }

    pub fn digits(&self) -> &[u64] {
        &self.digits
    }

    pub fn len(&self) -> usize {
        self.digits.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Last two continuant pairs `((p_n, q_n), (p_{n-1}, q_{n-1}))`.
    pub fn continuants(&self) -> ((BigUint, BigUint), (BigUint, BigUint)) {
        continuants(&self.digits)
    }

    /// Cylinder endpoints `p_n / q_n` and `(p_n + p_{n-1}) / (q_n + q_{n-1})`
    /// as (numerator, denominator) pairs.
    pub fn endpoints(&self) -> ((BigUint, BigUint), (BigUint, BigUint)) {
        let ((p, q), (pp, qp)) = self.continuants();
        let other = (&p + &pp, &q + &qp);
        ((p, q), other)
    }
}

/// `p_{-1} = 1, p_0 = 0, q_{-1} = 0, q_0 = 1`, then
/// `p_k = c_k p_{k-1} + p_{k-2}` and likewise for `q`.
fn continuants(digits: &[u64]) -> ((BigUint, BigUint), (BigUint, BigUint)) {
    let (mut p_prev, mut p) = (BigUint::one(), BigUint::zero());
    let (mut q_prev, mut q) = (BigUint::zero(), BigUint::one());
    for &c in digits {
        let p_next = &p * c + &p_prev;
        let q_next = &q * c + &q_prev;
        p_prev = core::mem::replace(&mut p, p_next);
        q_prev = core::mem::replace(&mut q, q_next);
    }
    ((p, q), (p_prev, q_prev))
}

/// `a / b` as a double, accurate even when both exceed the `f64` range.
pub fn big_ratio(a: &BigUint, b: &BigUint) -> f64 {
    fn split(x: &BigUint) -> (f64, i64) {
        let bits = x.bits() as i64;
        let shift = (bits - 64).max(0);
        ((x >> shift as usize).to_f64().unwrap_or(f64::NAN), shift)
    }
    let (ma, ea) = split(a);
    let (mb, eb) = split(b);
    libm::ldexp(ma / mb, (ea - eb) as i32)
}

/// `G[c_0, ..., c_{n-1}] = |log2((1 + u) / (1 + v))|` over the cylinder
/// endpoints `u, v`.
pub fn cylinder_gauss_measure(word: &CfDigits) -> f64 {
    let ((pu, qu), (pv, qv)) = word.endpoints();
    // (1 + u) / (1 + v) = (qu + pu) qv / (qu (qv + pv)); the ratio is
    // 1 + (num - den) / den with a small integer difference, so go through
    // log1p instead of dividing and taking a log.
    let num = (&qu + &pu) * &qv;
    let den = &qu * (&qv + &pv);
    let diff = BigInt::from(num) - BigInt::from(den.clone());
    let rel = big_ratio(diff.magnitude(), &den);
    let rel = if diff.is_negative() { -rel } else { rel };
    libm::fabs(libm::log1p(rel)) / core::f64::consts::LN_2
}

/// A point known to lie in the dyadic cell `[m / 2^bits, (m + 1) / 2^bits)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DyadicCell {
    pub mantissa: BigUint,
    pub bits: usize,
}

impl DyadicCell {
    pub fn to_f64(&self) -> f64 {
        big_ratio(&self.mantissa, &(BigUint::one() << self.bits))
    }

    /// `floor(sqrt(2) 2^bits) - 2^bits`, the cell containing `sqrt(2) - 1`.
    pub fn sqrt2_minus_one(bits: usize) -> Self {
        let two = BigUint::from(2u32) << (2 * bits);
        Self {
            mantissa: two.sqrt() - (BigUint::one() << bits),
            bits,
        }
    }
}

/// Exact rational `num / den`.
#[derive(Debug, Clone, PartialEq, Eq)]
struct Rational {
    num: BigUint,
    den: BigUint,
}

impl Rational {
    /// Gauss-map step `x -> 1/x - floor(1/x)`; returns the digit and whether
    /// the expansion continues.
    fn step(&mut self) -> Option<u64> {
        if self.num.is_zero() {
            return None;
        }
        let (digit, rem) = self.den.div_rem(&self.num);
        self.den = core::mem::replace(&mut self.num, rem);
        Some(digit.to_u64().unwrap_or(u64::MAX))
    }
}

/// Digits shared by every point of a dyadic cell, produced one at a time.
#[derive(Debug, Clone)]
pub struct DigitStream {
    lo: Rational,
    hi: Rational,
    emitted: usize,
    max_digits: usize,
    done: bool,
}

impl DigitStream {
    pub fn new(cell: &DyadicCell, max_digits: usize) -> Self {
        let den = BigUint::one() << cell.bits;
        Self {
            lo: Rational {
                num: cell.mantissa.clone(),
                den: den.clone(),
            },
            hi: Rational {
                num: &cell.mantissa + 1u32,
                den,
            },
            emitted: 0,
            max_digits,
            done: false,
        }
    }

    /// Next digit, or `None` once the cell no longer determines one (or the
    /// digit budget is spent).
    pub fn next_digit(&mut self) -> Option<u64> {
        if self.done || self.emitted >= self.max_digits {
            return None;
        }
        let a = self.lo.step();
        let b = self.hi.step();
        match (a, b) {
            // an endpoint whose expansion just ended sits on a cylinder
            // boundary, so the next digit is not determined
            (Some(x), Some(y)) if x == y && !self.lo.num.is_zero() && !self.hi.num.is_zero() => {
                self.emitted += 1;
                Some(x)
            }
            _ => {
                self.done = true;
                None
            }
        }
    }

    pub fn emitted(&self) -> usize {
        self.emitted
    }
}

/// First `n` digits common to the whole cell.
pub fn digits_of(x: &DyadicCell, n: usize) -> Result<CfDigits> {
    if n == 0 {
        return Err(Error::Parameter {
            name: "n",
            value: 0.0,
            allowed: "positive integer",
        });
    }
    let mut stream = DigitStream::new(x, n);
    let mut out = Vec::with_capacity(n);
    while let Some(d) = stream.next_digit() {
        out.push(d);
    }
    if out.len() < n {
        return Err(Error::PrecisionExhausted { achieved: out.len() });
    }
    CfDigits::new(out)
}

/// Digits of the exact rational `num / den` in `(0, 1)`; a finite expansion
/// shorter than `n` is reported with the digits it has.
pub fn digits_of_rational(num: u64, den: u64, n: usize) -> Result<CfDigits> {
    if num == 0 || num >= den {
        return Err(Error::Parameter {
            name: "x",
            value: num as f64 / den as f64,
            allowed: "(0, 1)",
        });
    }
    let mut r = Rational {
        num: num.into(),
        den: den.into(),
    };
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        match r.step() {
            Some(d) => out.push(d),
            None => return Err(Error::FiniteExpansion(out)),
        }
        if r.num.is_zero() && out.len() < n {
            return Err(Error::FiniteExpansion(out));
        }
    }
    CfDigits::new(out)
}

/// Sampling and digit-budget parameters for continued-fraction experiments.
#[derive(Debug, Clone)]
pub struct GaussModel {
    pub precision_bits: usize,
    pub max_digits: usize,
    /// `(C, beta)` with `psi(n) <= C beta^n`, supplied by the caller.
    pub psi_envelope: Option<(f64, f64)>,
    /// `ln 2` in fixed point with `precision_bits + GUARD_BITS` fraction bits.
    ln2: BigUint,
}

impl GaussModel {
    pub fn new(precision_bits: usize, max_digits: usize, psi_envelope: Option<(f64, f64)>) -> Result<Self> {
        if max_digits == 0 {
            return Err(Error::Parameter {
                name: "max_digits",
                value: 0.0,
                allowed: "positive integer",
            });
        }
        let needed = libm::ceil(max_digits as f64 * MIN_BITS_PER_DIGIT) as usize + 2;
        if precision_bits < needed {
            return Err(Error::Parameter {
                name: "precision_bits",
                value: precision_bits as f64,
                allowed: "at least 2 log2(golden ratio) bits per digit plus 2",
            });
        }
        if let Some((c, beta)) = psi_envelope {
            if !(c >= 0.0 && c.is_finite() && beta > 0.0 && beta < 1.0) {
                return Err(Error::Config("psi envelope needs C >= 0 and beta in (0, 1)".into()));
            }
        }
        Ok(Self {
            precision_bits,
            max_digits,
            psi_envelope,
            ln2: ln2_fixed(precision_bits + GUARD_BITS),
        })
    }

    pub fn with_defaults() -> Self {
        Self::new(DEFAULT_PRECISION_BITS, DEFAULT_MAX_DIGITS, None).expect("defaults are consistent")
    }

    /// Cell containing `2^u - 1` for `u = u_bits / 2^precision_bits`.
    pub fn point_from_uniform(&self, u_bits: &BigUint) -> DyadicCell {
        let frac = self.precision_bits + GUARD_BITS;
        let y = (u_bits << GUARD_BITS) * &self.ln2 >> frac;
        let e = exp_fixed(&y, frac);
        let one = BigUint::one() << frac;
        let x = if e > one { e - one } else { BigUint::zero() };
        DyadicCell {
            mantissa: x >> GUARD_BITS,
            bits: self.precision_bits,
        }
    }

    /// A Gauss-distributed starting point (inverse CDF of `log2(1 + x)`).
    pub fn sample_point(&self, rng: &mut TrialRng) -> DyadicCell {
        loop {
            let words = self.precision_bits.div_ceil(32);
            let raw: Vec<u32> = (0..words).map(|_| rng.random::<u32>()).collect();
            let u = BigUint::new(raw) >> (words * 32 - self.precision_bits);
            let cell = self.point_from_uniform(&u);
            // u = 0 gives the boundary point 0; measure zero, draw again
            if !cell.mantissa.is_zero() {
                return cell;
            }
        }
    }

    pub fn digit_stream(&self, rng: &mut TrialRng) -> DigitStream {
        DigitStream::new(&self.sample_point(rng), self.max_digits)
    }
}

/// `ln 2 = sum_{k >= 1} 1 / (k 2^k)` with `frac` fraction bits.
fn ln2_fixed(frac: usize) -> BigUint {
    let one = BigUint::one() << frac;
    let mut sum = BigUint::zero();
    for k in 1..=frac {
        sum += (&one >> k) / BigUint::from(k);
    }
    sum
}

/// `exp(y)` for fixed-point `y` in `[0, 1)` by its Taylor series.
fn exp_fixed(y: &BigUint, frac: usize) -> BigUint {
    let mut term = BigUint::one() << frac;
    let mut sum = term.clone();
    let mut k = 1u32;
    loop {
        term = (&term * y >> frac) / k;
        if term.is_zero() {
            return sum;
        }
        sum += &term;
        k += 1;
    }
}
