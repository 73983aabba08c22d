use std::collections::HashMap;

use balpow::search::{a1_bound, decompose_as_powers, solve, verify, SearchBounds, Solution};
use num_bigint::BigUint;
use proptest::prelude::*;

fn u128_balancing(n_max: usize) -> Vec<u128> {
    let mut v = vec![0u128, 1];
    while v.len() <= n_max {
        let n = v.len();
        v.push(6 * v[n - 1] - v[n - 2]);
    }
    v
}

/// Full-grid enumeration over (n1, n2, a1, ..., ak) with plain machine
/// integers: every exponent tuple up to `a_max` is tabulated by its sum.
fn naive(k: usize, n1_max: usize, a_max: u32) -> Vec<Solution> {
    let b = u128_balancing(n1_max);
    let mut by_sum: HashMap<u128, Vec<Vec<u32>>> = HashMap::new();
    let mut push = |e: Vec<u32>| {
        let s: u128 = e.iter().map(|&a| 1u128 << a).sum();
        by_sum.entry(s).or_default().push(e);
    };
    for a1 in 0..=a_max {
        if k == 1 {
            push(vec![a1]);
            continue;
        }
        for a2 in 0..=a1 {
            if k == 2 {
                push(vec![a1, a2]);
                continue;
            }
            for a3 in 0..=a2 {
                push(vec![a1, a2, a3]);
            }
        }
    }
    let mut out = Vec::new();
    for n1 in 0..=n1_max {
        for n2 in 0..=n1 {
            if let Some(list) = by_sum.get(&(b[n1] + b[n2])) {
                for e in list {
                    out.push(Solution::new(n1, n2, e.clone()));
                }
            }
        }
    }
    out.sort();
    out
}

#[test]
fn matches_naive_grid_up_to_30() {
    let a_max = a1_bound(30).unwrap();
    assert!(a_max < 120);
    for k in 1..=3 {
        let got = solve(k, SearchBounds::auto(30).unwrap()).unwrap();
        assert_eq!(got, naive(k, 30, a_max), "k = {k}");
    }
}

fn parse_all(list: &[&str]) -> Vec<Solution> {
    let mut v: Vec<Solution> = list.iter().map(|s| s.parse().unwrap()).collect();
    v.sort();
    v
}

#[test]
fn three_powers_up_to_100() {
    let got = solve(3, SearchBounds::auto(100).unwrap()).unwrap();
    let expected = parse_all(&[
        "2,0,1,1,1",
        "2,0,2,0,0",
        "2,1,2,1,0",
        "2,2,2,2,2",
        "2,2,3,1,1",
        "3,0,5,1,0",
        "3,1,4,4,2",
        "3,1,5,1,1",
        "3,2,5,3,0",
        "3,3,6,2,1",
    ]);
    assert_eq!(got.len(), 10);
    assert_eq!(got, expected);
}

#[test]
fn two_powers_up_to_100() {
    let got = solve(2, SearchBounds::auto(100).unwrap()).unwrap();
    assert_eq!(
        got,
        parse_all(&["1,1,0,0", "2,0,2,1", "2,2,3,2", "3,1,5,2"])
    );
}

#[test]
fn one_power_up_to_100() {
    let got = solve(1, SearchBounds::auto(100).unwrap()).unwrap();
    assert_eq!(got, parse_all(&["1,0,0", "1,1,1"]));
    assert!(!verify(&"1,1,0".parse().unwrap()));
}

#[test]
fn every_solution_verifies_and_range_is_monotone() {
    for k in 1..=3 {
        let small = solve(k, SearchBounds::auto(50).unwrap()).unwrap();
        let large = solve(k, SearchBounds::auto(100).unwrap()).unwrap();
        for s in &large {
            assert!(verify(s) && s.is_canonical(), "{s}");
        }
        assert!(small.iter().all(|s| large.contains(s)));
    }
}

fn naive_decompose(s: u64, k: usize) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    for a1 in 0..=20u32 {
        if k == 1 {
            if 1u64 << a1 == s {
                out.push(vec![a1]);
            }
            continue;
        }
        for a2 in 0..=a1 {
            if k == 2 {
                if (1u64 << a1) + (1u64 << a2) == s {
                    out.push(vec![a1, a2]);
                }
                continue;
            }
            for a3 in 0..=a2 {
                if (1u64 << a1) + (1u64 << a2) + (1u64 << a3) == s {
                    out.push(vec![a1, a2, a3]);
                }
            }
        }
    }
    out.sort();
    out
}

#[test]
fn decomposition_exhaustive_small() {
    for s in 1..=4096u64 {
        for k in 1..=3 {
            assert_eq!(
                decompose_as_powers(&BigUint::from(s), k),
                naive_decompose(s, k)
            );
        }
    }
}

proptest! {
    #[test]
    fn decomposition_matches_nested_loops(s in 1u64..=(1 << 20), k in 1usize..=3) {
        prop_assert_eq!(decompose_as_powers(&BigUint::from(s), k), naive_decompose(s, k));
    }
}
