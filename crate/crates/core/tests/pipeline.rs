use std::sync::OnceLock;

use balpow::linforms::{BoundContext, Case, GapVar, StepId};
use balpow::pipeline::{
    absolute_n1_bound, build_certificate, derive_upper_bound, published, run_reduction,
    BoundReport, Certificate, PipelineConfig, ReductionReport, Target,
};
use balpow::realnum::{constants, PrecisionPolicy};
use num_bigint::BigInt;
use num_traits::{One, ToPrimitive, Zero};

struct Run {
    config: PipelineConfig,
    bounds: BoundReport,
    reduction: ReductionReport,
    certificate: Certificate,
}

fn run() -> &'static Run {
    static RUN: OnceLock<Run> = OnceLock::new();
    RUN.get_or_init(|| {
        let config = PipelineConfig::default();
        let bounds = derive_upper_bound(&config.bounds).unwrap();
        let m = config.reduction_m(&bounds);
        let reduction = run_reduction(&m, &config).unwrap();
        let certificate = build_certificate(&config, &bounds, &reduction).unwrap();
        Run {
            config,
            bounds,
            reduction,
            certificate,
        }
    })
}

fn upper_f64(b: &balpow::linforms::PolyLogBound) -> f64 {
    b.coefficient_enclosure().unwrap().to_f64()
}

#[test]
fn bound_table_layout_and_window() {
    let r = &run().bounds;
    let printed = [
        ["8.22e12", "8.22e12", "2e25"],
        ["4e25", "9.96e37", "9.96e37"],
        ["2e38", "4e25", "8.22e12"],
    ];
    let exponents = [[1, 1, 2], [2, 3, 3], [3, 2, 1]];
    for (i, row) in published::TABLE_ROWS.iter().enumerate() {
        for (j, col) in published::TABLE_COLUMNS.iter().enumerate() {
            let b = r.entry(*row, *col);
            assert_eq!(b.exponent, exponents[i][j], "{row:?} {col:?}");
            let p: f64 = printed[i][j].parse().unwrap();
            let c = upper_f64(b);
            assert!(
                c <= p * (1.0 + 1e-12) && c > 0.9 * p,
                "{row:?} {col:?}: {c} vs {p}"
            );
        }
    }
    assert!(r.checks.iter().all(|c| c.in_window()));
    assert_eq!(r.entry(GapVar::A1MinusA2, Case::C1A).exponent, 1);
}

#[test]
fn absolute_bound_is_sound_and_below_published() {
    let r = &run().bounds;
    let hi = r.n1_upper.to_f64();
    assert!(hi <= 7.9e59, "{hi}");
    // closed form, evaluated in floating point
    let c = upper_f64(&r.final_bound);
    let h = 3.0 * c / (3.0 + 8f64.sqrt()).ln();
    let expect = 16.0 * h * h.ln().powi(4) / 3.0;
    assert!((hi / expect - 1.0).abs() < 1e-9, "{hi} vs {expect}");
    // past the bound the inequality n1 log alpha < c (1 + log n1)^4 fails
    let ln_alpha = (3.0 + 8f64.sqrt()).ln();
    for x in [hi, 2.0 * hi, 1e70] {
        assert!(x * ln_alpha >= c * (1.0 + x.ln()).powi(4));
    }
}

#[test]
fn printed_final_coefficient_unwraps_above_printed_bound() {
    let b = balpow::linforms::PolyLogBound::from_decimal("4.73e50", 4).unwrap();
    let v = absolute_n1_bound(&b)
        .unwrap()
        .eval(128, &PrecisionPolicy::default())
        .unwrap();
    let lo = v.lo_f64();
    assert!(lo > 7.9e59 && lo < 8.2e59, "{lo}");
}

#[test]
fn reduction_table_near_published() {
    let red = &run().reduction;
    for i in 0..3 {
        for j in 0..3 {
            let got = red.table[i][j];
            let want = published::REDUCTION_TABLE[i][j];
            assert!(got <= want + 4, "entry ({i},{j}): {got} vs {want}");
            assert!(got >= want - 10, "entry ({i},{j}): {got} vs {want}");
        }
    }
    assert!(red.final_n1_bound <= 100);
    assert!(red.final_n1_bound >= 80);
    // every known solution respects every reduced bound
    for s in published::SOLUTIONS_K3 {
        assert!((s[0] as i64) <= red.final_n1_bound);
        assert!(((s[0] - s[1]) as i64) <= red.table[2].iter().copied().max().unwrap());
        assert!(((s[2] - s[3]) as i64) <= red.table[0].iter().copied().max().unwrap());
    }
}

/// Rounds `x * 2^-bits` to the nearest integer and returns the distance
/// as a fraction of `2^bits`, floored.
fn nearest_distance(x: &BigInt, bits: u32) -> BigInt {
    let one = BigInt::one() << bits;
    let r = ((x % &one) + &one) % &one;
    let other = &one - &r;
    r.min(other)
}

#[test]
fn step_one_epsilon_recomputed() {
    let run = run();
    let step = run.reduction.step(StepId::S1);
    let m = &run.reduction.m;
    for (target, out) in &step.results {
        let q = &out.convergent_used.q;
        assert!(q > &(BigInt::from(6) * m));
        // q odd makes ||-5q/2|| = 1/2; q even makes it 0
        let half_or_zero = if (q % 2u32).is_zero() { 0.0 } else { 0.5 };
        let bits = 600;
        let tau = constants::tau()
            .eval(bits, &PrecisionPolicy::default())
            .unwrap();
        let lo = nearest_distance(&(tau.lo_mantissa() * q), tau.prec());
        let hi = nearest_distance(&(tau.hi_mantissa() * q), tau.prec());
        let d = lo.max(hi) * m;
        let scale = BigInt::one() << tau.prec();
        let eps =
            half_or_zero - (d * BigInt::from(1u64 << 53) / scale).to_f64().unwrap() / 2f64.powi(53);
        let (elo, ehi) = (out.epsilon.lo_f64(), out.epsilon.to_f64());
        assert!(
            (eps - elo).abs() < 1e-12 && (eps - ehi).abs() < 1e-12,
            "{eps} vs [{elo}, {ehi}]"
        );
        let base = match target {
            Target::N1 | Target::Gap(GapVar::N1MinusN2) => (3.0 + 8f64.sqrt()).ln(),
            _ => 2f64.ln(),
        };
        let a = 2.0 * 43.72 / 2f64.ln();
        let x = (a * q.to_f64().unwrap() / eps).ln() / base;
        assert!(
            (x - x.round()).abs() > 1e-6,
            "too close to call in floating point"
        );
        assert_eq!(out.w_bound, x.ceil() as i64 - 1, "{target}");
    }
}

#[test]
fn side_conditions_all_discharged() {
    let cert = &run().certificate;
    assert!(!cert.side_conditions.is_empty());
    for sc in &cert.side_conditions {
        assert!(sc.discharged, "{} {}", sc.source, sc.condition);
        assert!(!sc.discharged_by.is_empty());
    }
    assert_eq!(run().reduction.side_conditions().len(), 7);
}

#[test]
fn default_certificate_is_complete() {
    let cert = &run().certificate;
    assert_eq!(cert.verdict, "complete");
    assert_eq!(cert.solutions["k3"].computed.len(), 10);
    assert_eq!(cert.solutions["k2"].computed.len(), 4);
    assert_eq!(
        cert.final_n1_bound,
        run().reduction.final_n1_bound.to_string()
    );
}

#[test]
fn k1_discrepancy_is_reported() {
    let cert = &run().certificate;
    let k1 = &cert.solutions["k1"];
    assert!(k1.computed.contains(&"(1,1,1)".to_string()));
    assert!(k1.computed.contains(&"(1,0,0)".to_string()));
    assert_eq!(
        k1.published_failing_verification,
        vec!["(1,1,0)".to_string()]
    );
    assert!(cert
        .discrepancies
        .iter()
        .any(|d| d.topic == "solutions k=1"));
}

#[test]
fn short_search_is_incomplete() {
    let run = run();
    let config = PipelineConfig {
        search_cutoff: 50,
        ..run.config.clone()
    };
    let cert = build_certificate(&config, &run.bounds, &run.reduction).unwrap();
    assert!(cert.verdict.starts_with("incomplete"), "{}", cert.verdict);
    assert!(cert.verdict.contains("50"), "{}", cert.verdict);
}

#[test]
fn certificate_is_deterministic_and_stringly_typed() {
    let run = run();
    let again = build_certificate(&run.config, &run.bounds, &run.reduction).unwrap();
    assert_eq!(again.to_json(), run.certificate.to_json());
    let v: serde_json::Value = serde_json::from_str(&run.certificate.to_json()).unwrap();
    let keys: Vec<_> = v.as_object().unwrap().keys().cloned().collect();
    for k in [
        "solutions",
        "bound_table",
        "n1_upper",
        "reduction_table",
        "final_n1_bound",
        "side_conditions",
        "discrepancies",
        "verdict",
    ] {
        assert!(keys.contains(&k.to_string()), "missing {k}");
    }
    fn no_numbers(v: &serde_json::Value) {
        match v {
            serde_json::Value::Number(n) => panic!("bare number {n}"),
            serde_json::Value::Array(a) => a.iter().for_each(no_numbers),
            serde_json::Value::Object(o) => o.values().for_each(no_numbers),
            _ => {}
        }
    }
    no_numbers(&v);
}

#[test]
fn paper_constants_mode_uses_printed_m() {
    let config = PipelineConfig {
        paper_constants: true,
        ..PipelineConfig::default()
    };
    let bounds = derive_upper_bound(&BoundContext::default()).unwrap();
    assert_eq!(config.reduction_m(&bounds), published::m());
    let over = PipelineConfig {
        m_override: Some(BigInt::from(12345)),
        ..config
    };
    assert_eq!(over.reduction_m(&bounds), BigInt::from(12345));
}
