//! Exhaustive exact search for `B(n1) + B(n2) = 2^a1 + ... + 2^ak`,
//! `k` in `{1, 2, 3}`, over a bounded range of `n1`.

use std::fmt;
use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::realnum::{constants, PrecisionPolicy};
use crate::sequence::{balancing, BalancingTable};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SearchError {
    #[error("number of powers must be 1, 2 or 3, got {0}")]
    UnsupportedK(usize),
    #[error("n1_max must be at least 1")]
    EmptyRange,
    #[error("a1_max = {a1_max} is below the required bound {required} for n1_max = {n1_max}")]
    InconsistentBounds {
        n1_max: usize,
        a1_max: u32,
        required: u32,
    },
    #[error("cannot parse solution {text:?}: {reason}")]
    Parse { text: String, reason: String },
}

/// A tuple `(n1, n2, a1, ..., ak)` with `n1 >= n2` and `a1 >= ... >= ak`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Solution {
    pub n1: usize,
    pub n2: usize,
    pub exponents: Vec<u32>,
}

impl Solution {
    pub fn new(n1: usize, n2: usize, exponents: Vec<u32>) -> Self {
        Solution { n1, n2, exponents }
    }

    pub fn k(&self) -> usize {
        self.exponents.len()
    }

    /// Whether the index and exponent orderings hold.
    pub fn is_canonical(&self) -> bool {
        self.n1 >= self.n2 && self.exponents.windows(2).all(|w| w[0] >= w[1])
    }

    /// The tuple as a flat list of integers.
    pub fn as_tuple(&self) -> Vec<u64> {
        let mut out = vec![self.n1 as u64, self.n2 as u64];
        out.extend(self.exponents.iter().map(|&a| u64::from(a)));
        out
    }
}

impl fmt::Display for Solution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{}", self.n1, self.n2)?;
        for a in &self.exponents {
            write!(f, ",{a}")?;
        }
        write!(f, ")")
    }
}

impl FromStr for Solution {
    type Err = SearchError;

    /// Parses `n1,n2,a1[,a2[,a3]]`, optionally wrapped in parentheses.
    fn from_str(text: &str) -> Result<Self, Self::Err> {
        let err = |reason: &str| SearchError::Parse {
            text: text.to_string(),
            reason: reason.to_string(),
        };
        let inner = text.trim().trim_start_matches('(').trim_end_matches(')');
        let parts: Vec<u64> = inner
            .split(',')
            .map(|p| p.trim().parse::<u64>())
            .collect::<Result<_, _>>()
            .map_err(|_| err("expected comma-separated non-negative integers"))?;
        if !(3..=5).contains(&parts.len()) {
            return Err(err("expected between 3 and 5 entries"));
        }
        let n1 = usize::try_from(parts[0]).map_err(|_| err("n1 too large"))?;
        let n2 = usize::try_from(parts[1]).map_err(|_| err("n2 too large"))?;
        let exponents = parts[2..]
            .iter()
            .map(|&a| u32::try_from(a).map_err(|_| err("exponent too large")))
            .collect::<Result<_, _>>()?;
        Ok(Solution { n1, n2, exponents })
    }
}

/// Ranges covered by [`solve`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchBounds {
    pub n1_max: usize,
    pub a1_max: u32,
}

impl SearchBounds {
    /// Bounds with `a1_max = a1_bound(n1_max)`.
    pub fn auto(n1_max: usize) -> Result<Self, SearchError> {
        Ok(SearchBounds {
            n1_max,
            a1_max: a1_bound(n1_max)?,
        })
    }
}

/// Bound on `a1` for solutions with `n1 <= n1_max`.
///
/// Any solution satisfies `n1 > (a1 - 1) log 2 / log alpha`, i.e.
/// `a1 < 1 + n1 tau` with `tau = log alpha / log 2`. The returned value is
/// the certified ceiling of `1 + n1_max * tau`.
pub fn a1_bound(n1_max: usize) -> Result<u32, SearchError> {
    if n1_max == 0 {
        return Err(SearchError::EmptyRange);
    }
    let bits = 64 + 2 * usize::BITS;
    let tau = constants::tau()
        .eval(bits, &PrecisionPolicy::default())
        .expect("tau is certified at modest precision");
    let x = tau.mul_int(&BigInt::from(n1_max));
    let bound = x.ceil_hi() + BigInt::one();
    Ok(u32::try_from(bound).expect("a1 bound fits in u32"))
}

fn check_k(k: usize) -> Result<(), SearchError> {
    if (1..=3).contains(&k) {
        Ok(())
    } else {
        Err(SearchError::UnsupportedK(k))
    }
}

/// Every non-increasing `k`-tuple of exponents whose powers of two sum to
/// `s`, in lexicographic order.
///
/// The largest exponent `a` must satisfy `2^a <= s <= k 2^a`, which leaves
/// at most two candidates per level; each is peeled off and the remainder is
/// decomposed recursively with `k - 1` terms.
pub fn decompose_as_powers(s: &BigUint, k: usize) -> Vec<Vec<u32>> {
    assert!((1..=3).contains(&k), "k must be 1, 2 or 3");
    let mut out = Vec::new();
    if s.is_zero() {
        return out;
    }
    let mut prefix = Vec::with_capacity(k);
    peel(s, k, u32::MAX, &mut prefix, &mut out);
    out.sort();
    out
}

fn peel(s: &BigUint, k: usize, cap: u32, prefix: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
    if s.is_zero() {
        return;
    }
    let top = (s.bits() - 1) as u32;
    if k == 1 {
        if top <= cap && s.count_ones() == 1 {
            prefix.push(top);
            out.push(prefix.clone());
            prefix.pop();
        }
        return;
    }
    let mut a = top.min(cap);
    loop {
        let power = BigUint::one() << a;
        // The remaining k - 1 terms are each at most 2^a.
        if &power * (k as u32) < *s {
            break;
        }
        if &power < s {
            prefix.push(a);
            peel(&(s - &power), k - 1, a, prefix, out);
            prefix.pop();
        }
        if a == 0 {
            break;
        }
        a -= 1;
    }
}

/// All solutions with `n1 <= bounds.n1_max` and `a1 <= bounds.a1_max`,
/// sorted lexicographically by `(n1, n2, a1, ..., ak)`.
pub fn solve(k: usize, bounds: SearchBounds) -> Result<Vec<Solution>, SearchError> {
    check_k(k)?;
    let required = a1_bound(bounds.n1_max)?;
    if bounds.a1_max < required {
        return Err(SearchError::InconsistentBounds {
            n1_max: bounds.n1_max,
            a1_max: bounds.a1_max,
            required,
        });
    }
    let owned;
    let table = if bounds.n1_max <= BalancingTable::global().cap() {
        BalancingTable::global()
    } else {
        owned = BalancingTable::with_cap(bounds.n1_max);
        &owned
    };
    let values = &table.as_slice()[..=bounds.n1_max];
    let mut found: Vec<Solution> = (0..=bounds.n1_max)
        .into_par_iter()
        .flat_map_iter(|n1| {
            let mut local = Vec::new();
            for n2 in 0..=n1 {
                let s = &values[n1] + &values[n2];
                for exps in decompose_as_powers(&s, k) {
                    if exps[0] <= bounds.a1_max {
                        local.push(Solution::new(n1, n2, exps));
                    }
                }
            }
            local
        })
        .collect();
    found.sort();
    found.dedup();
    Ok(found)
}

/// Whether the exact identity holds for `sol`.
pub fn verify(sol: &Solution) -> bool {
    if sol.exponents.is_empty() {
        return false;
    }
    let lhs = balancing(sol.n1) + balancing(sol.n2);
    let rhs: BigUint = sol.exponents.iter().map(|&a| BigUint::one() << a).sum();
    lhs == rhs
}
