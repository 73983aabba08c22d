use balpow::realnum::{constants, PrecisionPolicy, RealOracle};
use balpow::reduction::{
    bd_reduce, bd_reduce_family, Axis, MuFamily, ReductionConfig, ReductionError, ReductionProblem,
};
use num_bigint::BigInt;
use proptest::prelude::*;

fn problem(tau: RealOracle, mu: MuFamily, a: i64, b: i64, m: i64) -> ReductionProblem {
    ReductionProblem {
        label: "toy".into(),
        tau,
        mu,
        a: RealOracle::integer(a),
        b: RealOracle::integer(b),
        m: BigInt::from(m),
        side_condition: None,
    }
}

fn sqrt_of(n: i64) -> RealOracle {
    RealOracle::integer(n).sqrt().unwrap()
}

/// Largest `w` with `|u tau - v + mu| < A B^-w` over `1 <= u <= M`, by brute force.
fn brute_max_w(tau: f64, mu: f64, a: f64, b: f64, m: i64) -> Option<i64> {
    let mut best = None;
    for u in 1..=m {
        let x = u as f64 * tau + mu;
        let lam = (x - x.round()).abs();
        if lam < 1e-9 {
            continue;
        }
        // w < log(a / lam) / log b
        let w = ((a / lam).ln() / b.ln()).ceil() as i64 - 1;
        if w >= 0 {
            best = best.max(Some(w));
        }
    }
    best
}

#[test]
fn scalar_bound_is_sound_on_toys() {
    let cfg = ReductionConfig::default();
    for (n, mu_num, mu_den, m) in [
        (2, 1, 3, 1000),
        (3, -5, 7, 500),
        (5, 2, 9, 200),
        (7, 1, 2, 1000),
    ] {
        let mu = RealOracle::rational(mu_num, mu_den).unwrap();
        let p = problem(sqrt_of(n), MuFamily::scalar(mu), 1, 2, m);
        let out = bd_reduce(&p, &cfg).unwrap();
        assert!(out.epsilon.is_positive());
        assert!(out.convergent_used.q > BigInt::from(6 * m));
        let brute = brute_max_w(
            (n as f64).sqrt(),
            mu_num as f64 / mu_den as f64,
            1.0,
            2.0,
            m,
        );
        assert!(
            brute.unwrap_or(-1) <= out.w_bound,
            "n={n}: {brute:?} > {}",
            out.w_bound
        );
        // the reduction leaves a bound of the expected size, log2(q / eps)
        let q = out.convergent_used.q.to_string().parse::<f64>().unwrap();
        let x = (q / out.epsilon.lo_f64()).log2();
        assert_eq!(out.w_bound, x.ceil() as i64 - 1);
    }
}

#[test]
fn mu_zero_never_certifies() {
    let p = problem(
        sqrt_of(2),
        MuFamily::scalar(RealOracle::integer(0)),
        1,
        2,
        100,
    );
    let cfg = ReductionConfig {
        max_convergents: 5,
        ..ReductionConfig::default()
    };
    match bd_reduce(&p, &cfg) {
        Err(ReductionError::NoConvergent { tried, .. }) => assert_eq!(tried, 5),
        other => panic!("unexpected {other:?}"),
    }
}

#[test]
fn rejects_bad_problems() {
    let cfg = ReductionConfig::default();
    let mu = MuFamily::scalar(RealOracle::rational(1, 3).unwrap());
    for (a, b, m) in [(1, 1, 10), (0, 2, 10), (1, 2, 0)] {
        let p = problem(sqrt_of(2), mu.clone(), a, b, m);
        assert!(matches!(
            bd_reduce(&p, &cfg),
            Err(ReductionError::InvalidProblem { .. })
        ));
    }
}

fn toy_family() -> MuFamily {
    let mut m_axis = Axis::new(&["m"], 1);
    for m in 0..6 {
        m_axis.push(
            vec![m],
            RealOracle::integer(m + 2)
                .sqrt()
                .unwrap()
                .with_label(format!("sqrt{}", m + 2)),
        );
    }
    let mut d_axis = Axis::new(&["d"], -1);
    for d in 1..5 {
        d_axis.push(vec![d], RealOracle::rational(1, d + 2).unwrap());
    }
    MuFamily {
        label: "toy family".into(),
        constant: RealOracle::rational(1, 7).unwrap(),
        axes: vec![m_axis, d_axis],
    }
}

#[test]
fn family_matches_memberwise_scalar_runs() {
    let cfg = ReductionConfig::default();
    let fam = toy_family();
    let tau = constants::tau();
    let out = bd_reduce_family(&problem(tau.clone(), fam.clone(), 3, 2, 5000), &cfg).unwrap();
    let mut max_w = i64::MIN;
    let mut min_eps = f64::INFINITY;
    for i in 0..fam.len() {
        let single = problem(tau.clone(), MuFamily::scalar(fam.member(i)), 3, 2, 5000);
        let s = bd_reduce(&single, &cfg).unwrap();
        max_w = max_w.max(s.w_bound);
        min_eps = min_eps.min(s.epsilon.lo_f64());
    }
    assert_eq!(out.members, 24);
    assert_eq!(out.w_bound, max_w);
    assert_eq!(out.epsilon.lo_f64(), min_eps);
    assert_eq!(out.groups.iter().map(|g| g.members).sum::<usize>(), 24);
}

#[test]
fn singleton_family_equals_scalar() {
    let cfg = ReductionConfig::default();
    let mu = RealOracle::integer(3).sqrt().unwrap();
    let fam = MuFamily::explicit("one", &["k"], vec![(vec![0], mu.clone())]);
    let a = bd_reduce_family(&problem(sqrt_of(2), fam, 1, 2, 900), &cfg).unwrap();
    let b = bd_reduce(&problem(sqrt_of(2), MuFamily::scalar(mu), 1, 2, 900), &cfg).unwrap();
    assert_eq!(a.w_bound, b.w_bound);
    assert_eq!(a.epsilon, b.epsilon);
    assert_eq!(a.convergent_used, b.convergent_used);
}

#[test]
fn bound_grows_with_a() {
    let cfg = ReductionConfig::default();
    let mu = MuFamily::scalar(RealOracle::rational(2, 5).unwrap());
    let mut last = i64::MIN;
    for a in [1, 10, 100, 1000, 100000] {
        let w = bd_reduce(&problem(sqrt_of(3), mu.clone(), a, 2, 700), &cfg)
            .unwrap()
            .w_bound;
        assert!(w >= last);
        last = w;
    }
}

#[test]
fn escalates_precision_for_huge_m() {
    let cfg = ReductionConfig::default();
    let m: BigInt = BigInt::from(10).pow(60);
    let mut p = problem(
        constants::tau(),
        MuFamily::scalar(RealOracle::rational(-5, 2).unwrap()),
        127,
        2,
        1,
    );
    p.m = m.clone();
    let out = bd_reduce(&p, &cfg).unwrap();
    assert!(out.precision_bits > PrecisionPolicy::default().initial);
    assert!(out.convergent_used.q > m * 6);
    assert!(out.w_bound > 150 && out.w_bound < 260, "{}", out.w_bound);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn reduction_never_excludes_a_real_solution(
        n in prop::sample::select(vec![2i64, 3, 5, 6, 7, 10, 11]),
        num in -40i64..40,
        den in 3i64..41,
        m in 10i64..1000,
        a in 1i64..50,
        b in 2i64..4,
    ) {
        prop_assume!(num % den != 0);
        let mu = RealOracle::rational(num, den).unwrap();
        let p = problem(sqrt_of(n), MuFamily::scalar(mu), a, b, m);
        let out = bd_reduce(&p, &ReductionConfig::default()).unwrap();
        let brute = brute_max_w((n as f64).sqrt(), num as f64 / den as f64, a as f64, b as f64, m);
        prop_assert!(brute.unwrap_or(-1) <= out.w_bound);
    }
}
