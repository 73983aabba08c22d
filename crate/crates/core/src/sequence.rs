//! Balancing numbers `B(0) = 0, B(1) = 1, B(n+1) = 6 B(n) - B(n-1)`.
//!
//! Exact values always come from the integer recurrence. The closed form
//! `(alpha^n - beta^n) / (4 sqrt 2)` with `alpha = 3 + sqrt 8` and
//! `beta = 3 - sqrt 8` is only evaluated as a cross-check, with interval
//! arithmetic.

use std::cmp::Ordering;
use std::sync::OnceLock;

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Zero};

use crate::realnum::{constants, Interval, PrecisionPolicy, RealError, RealOracle};

/// Number of terms kept in the shared memo table.
pub const DEFAULT_INDEX_CAP: usize = 1100;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BalancingNumber {
    pub index: usize,
    pub value: BigUint,
}

impl BalancingNumber {
    pub fn new(index: usize) -> Self {
        BalancingNumber {
            index,
            value: balancing(index),
        }
    }
}

/// Memoized prefix `B(0..=cap)`; read-only after construction.
#[derive(Clone, Debug)]
pub struct BalancingTable {
    values: Vec<BigUint>,
}

impl BalancingTable {
    pub fn with_cap(cap: usize) -> Self {
        let mut values = Vec::with_capacity(cap + 1);
        values.push(BigUint::zero());
        if cap >= 1 {
            values.push(BigUint::one());
        }
        while values.len() <= cap {
            let n = values.len();
            let next = &values[n - 1] * 6u32 - &values[n - 2];
            values.push(next);
        }
        BalancingTable { values }
    }

    /// Shared table with [`DEFAULT_INDEX_CAP`] entries.
    pub fn global() -> &'static BalancingTable {
        static TABLE: OnceLock<BalancingTable> = OnceLock::new();
        TABLE.get_or_init(|| BalancingTable::with_cap(DEFAULT_INDEX_CAP))
    }

    pub fn cap(&self) -> usize {
        self.values.len() - 1
    }

    pub fn get(&self, n: usize) -> Option<&BigUint> {
        self.values.get(n)
    }

    pub fn as_slice(&self) -> &[BigUint] {
        &self.values
    }
}

/// `B(n)`, exact.
pub fn balancing(n: usize) -> BigUint {
    let table = BalancingTable::global();
    if let Some(v) = table.get(n) {
        return v.clone();
    }
    let cap = table.cap();
    let mut prev = table.values[cap - 1].clone();
    let mut cur = table.values[cap].clone();
    for _ in cap..n {
        let next = &cur * 6u32 - &prev;
        prev = std::mem::replace(&mut cur, next);
    }
    cur
}

/// The closed form `(alpha^n - beta^n) / (4 sqrt 2)` as an oracle.
pub fn binet_oracle(n: usize) -> RealOracle {
    let k = i64::try_from(n).expect("index fits in i64");
    let a = constants::alpha().powi(k).expect("alpha > 0");
    let b = constants::beta().powi(k).expect("beta > 0");
    a.sub(&b)
        .div(&constants::four_sqrt2())
        .expect("4 sqrt 2 > 0")
        .with_label(format!("binet({n})"))
}

/// Enclosure of `|B(n) - (alpha^n - beta^n) / (4 sqrt 2)|` accurate to
/// `2^-precision` in absolute terms.
pub fn binet_residual(n: usize, precision: u32) -> Result<Interval, RealError> {
    const MIN_PRECISION: u32 = 64;
    assert!(n >= 1, "index must be positive");
    if precision < MIN_PRECISION {
        return Err(RealError::PrecisionTooSmall {
            requested: precision,
            minimum: MIN_PRECISION,
        });
    }
    let exact = RealOracle::integer(BigInt::from(balancing(n)));
    let diff = exact.sub(&binet_oracle(n));
    let policy = PrecisionPolicy {
        initial: precision,
        cap: PrecisionPolicy::default().cap.max(precision * 2),
    };
    Ok(diff.eval(precision, &policy)?.abs())
}

/// Whether `alpha^(n-1) < B(n) < alpha^n` is certified by interval
/// evaluation of the powers of alpha.
pub fn growth_bounds_hold(n: usize) -> bool {
    assert!(n > 1, "growth bounds are stated for n > 1");
    let k = i64::try_from(n).expect("index fits in i64");
    let value = BigInt::from(balancing(n));
    let alpha = constants::alpha();
    for bits in PrecisionPolicy::default().ladder().map(|b| b / 4) {
        let Ok(a) = alpha.enclosure_at(bits) else {
            continue;
        };
        let b = Interval::from_int(&value, bits);
        let (Ok(lower), Ok(upper)) = (a.powi(k - 1), a.powi(k)) else {
            continue;
        };
        match (lower.certain_cmp(&b), b.certain_cmp(&upper)) {
            (Some(Ordering::Less), Some(Ordering::Less)) => return true,
            (Some(_), Some(_)) => return false,
            _ => {}
        }
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seeds_and_first_terms() {
        let got: Vec<u64> = (0..6).map(|n| balancing(n).try_into().unwrap()).collect();
        assert_eq!(got, vec![0, 1, 6, 35, 204, 1189]);
    }

    #[test]
    fn beyond_the_memo_cap() {
        let t = BalancingTable::global();
        let n = t.cap() + 3;
        let expected = balancing(n - 1) * 6u32 - balancing(n - 2);
        assert_eq!(balancing(n), expected);
    }

    #[test]
    fn small_tables_agree_with_global() {
        let t = BalancingTable::with_cap(1);
        assert_eq!(t.as_slice(), &[BigUint::zero(), BigUint::one()]);
        let t = BalancingTable::with_cap(40);
        assert_eq!(t.as_slice(), &BalancingTable::global().as_slice()[..41]);
    }

    #[test]
    fn growth_examples() {
        assert!(growth_bounds_hold(2));
        assert!(growth_bounds_hold(3));
        assert!(growth_bounds_hold(100));
    }

    #[test]
    fn residual_examples() {
        let below = |iv: &Interval, e: u32| iv.hi_le_ratio(&BigInt::one(), &(BigInt::one() << e));
        assert!(below(&binet_residual(1, 128).unwrap(), 64));
        assert!(below(&binet_residual(3, 256).unwrap(), 128));
        assert!(below(&binet_residual(50, 512).unwrap(), 256));
        assert!(matches!(
            binet_residual(3, 32),
            Err(RealError::PrecisionTooSmall { .. })
        ));
    }
}
