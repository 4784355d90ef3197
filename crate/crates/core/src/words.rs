//! Periods of cylinder words.
//!
//! Compatibility is a pure string condition on the full shift: two cylinders
//! at relative shift `k` intersect iff the words agree wherever they overlap.

use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::{Error, Result, Symbol};

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct CylinderWord {
    symbols: Vec<Symbol>,
}

impl CylinderWord {
    pub fn new(symbols: Vec<Symbol>) -> Result<Self> {
        if symbols.is_empty() {
            return Err(Error::Config("cylinder words must be nonempty".into()));
        }
        Ok(Self { symbols })
    }

    pub fn symbols(&self) -> &[Symbol] {
        &self.symbols
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// `pi(A)`.
    pub fn self_period(&self) -> usize {
        self_period(&self.symbols)
    }

    /// `pi(A, B)`.
    pub fn cross_period(&self, other: &CylinderWord) -> usize {
        cross_period(&self.symbols, &other.symbols)
    }

    /// `kappa = min(pi(A, B), pi(A), pi(B))`.
    pub fn kappa(&self, other: &CylinderWord) -> usize {
        kappa(&self.symbols, &other.symbols)
    }
}

/// Failure function: `border[i]` is the longest proper border of `w[..=i]`.
pub fn border_array(w: &[Symbol]) -> Vec<usize> {
    let mut border = alloc::vec![0usize; w.len()];
    let mut k = 0;
    for i in 1..w.len() {
        while k > 0 && w[i] != w[k] {
            k = border[k - 1];
        }
        if w[i] == w[k] {
            k += 1;
        }
        border[i] = k;
    }
    border
}

/// Least `k >= 1` with `w[k..]` a prefix of `w`; `w.len()` when `w` has no
/// proper border.
pub fn self_period(w: &[Symbol]) -> usize {
    match border_array(w).last() {
        Some(b) => w.len() - b,
        None => 0,
    }
}

/// Z-array of `b` matched against every suffix of `a`: `out[k]` is the length
/// of the longest common prefix of `a[k..]` and `b`.
fn prefix_matches(a: &[Symbol], b: &[Symbol]) -> Vec<usize> {
    let s: Vec<Option<Symbol>> = b
        .iter()
        .map(|&x| Some(x))
        .chain(core::iter::once(None))
        .chain(a.iter().map(|&x| Some(x)))
        .collect();
    let n = s.len();
    let mut z = alloc::vec![0usize; n];
    let (mut l, mut r) = (0, 0);
    for i in 1..n {
        if i < r {
            z[i] = z[i - l].min(r - i);
        }
        while i + z[i] < n && s[z[i]].is_some() && s[z[i]] == s[i + z[i]] {
            z[i] += 1;
        }
        if i + z[i] > r {
            l = i;
            r = i + z[i];
        }
    }
    z[b.len() + 1..].to_vec()
}

/// Least `k` in `[0, min(n, m)]` such that `a` shifted by `k` is compatible
/// with `b`, in either direction.
pub fn cross_period(a: &[Symbol], b: &[Symbol]) -> usize {
    let limit = a.len().min(b.len());
    let ab = prefix_matches(a, b);
    let ba = prefix_matches(b, a);
    (0..limit)
        .find(|&k| {
            // a[k + j] == b[j] on the overlap, or b[k + j] == a[j]
            ab[k] >= (a.len() - k).min(b.len()) || ba[k] >= (b.len() - k).min(a.len())
        })
        .unwrap_or(limit)
}

pub fn kappa(a: &[Symbol], b: &[Symbol]) -> usize {
    cross_period(a, b).min(self_period(a)).min(self_period(b))
}

/// The word `(lead, 0, ..., 0)` of length `n`.
pub fn lead_then_zeros(lead: Symbol, n: usize) -> Vec<Symbol> {
    let mut w = alloc::vec![0; n];
    if n > 0 {
        w[0] = lead;
    }
    w
}
