use balpow::sequence::{balancing, binet_residual, growth_bounds_hold};
use num_bigint::{BigInt, BigUint};
use num_traits::One;

/// Recurrence over little-endian limbs in base `10^width`, independent of
/// the big-integer library.
fn decimal_recurrence(n: usize, width: u32) -> String {
    let base = 10u64.pow(width);
    let mut prev: Vec<u64> = vec![0];
    let mut cur: Vec<u64> = vec![1];
    if n == 0 {
        return "0".into();
    }
    for _ in 1..n {
        // next = 6 cur - prev
        let mut next = Vec::with_capacity(cur.len() + 1);
        let mut carry: i64 = 0;
        for i in 0..cur.len().max(prev.len()) {
            let c = *cur.get(i).unwrap_or(&0) as i64;
            let p = *prev.get(i).unwrap_or(&0) as i64;
            let mut v = 6 * c - p + carry;
            carry = 0;
            while v < 0 {
                v += base as i64;
                carry -= 1;
            }
            carry += v / base as i64;
            next.push((v % base as i64) as u64);
        }
        while carry > 0 {
            next.push((carry % base as i64) as u64);
            carry /= base as i64;
        }
        while next.len() > 1 && *next.last().unwrap() == 0 {
            next.pop();
        }
        prev = std::mem::replace(&mut cur, next);
    }
    let mut s = cur.last().unwrap().to_string();
    for limb in cur.iter().rev().skip(1) {
        s.push_str(&format!("{:0width$}", limb, width = width as usize));
    }
    s
}

#[test]
fn b100_matches_two_limb_widths() {
    let a = decimal_recurrence(100, 4);
    let b = decimal_recurrence(100, 9);
    assert_eq!(a, b);
    assert_eq!(balancing(100).to_string(), a);
}

#[test]
fn small_values_match_decimal_recurrence() {
    for n in 0..60 {
        assert_eq!(
            balancing(n).to_string(),
            decimal_recurrence(n, 3),
            "n = {n}"
        );
    }
}

#[test]
fn cassini_identity() {
    for n in 1..=500 {
        let lhs = BigInt::from(balancing(n)).pow(2);
        let rhs = BigInt::from(balancing(n + 1) * balancing(n - 1));
        assert_eq!(lhs - rhs, BigInt::one(), "n = {n}");
    }
}

#[test]
fn strictly_increasing() {
    for n in 1..600 {
        assert!(balancing(n + 1) > balancing(n));
    }
}

#[test]
fn growth_bounds_up_to_500() {
    for n in 2..=500 {
        assert!(growth_bounds_hold(n), "n = {n}");
    }
}

#[test]
fn binet_residual_shrinks_with_index() {
    for n in 1..=200usize {
        let p = 4 * n as u32 + 64;
        let r = binet_residual(n, p).unwrap();
        let bound = BigInt::one() << (2 * n);
        assert!(r.hi_le_ratio(&BigInt::one(), &bound), "n = {n}");
        let half = BigInt::one() << (p / 2);
        assert!(r.hi_le_ratio(&BigInt::one(), &half), "n = {n}");
    }
}

#[test]
fn value_is_natural_number() {
    let _: BigUint = balancing(1100);
}
