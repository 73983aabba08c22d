use num_bigint::BigInt;

use super::ReductionError;
use crate::realnum::{constants, Interval, PrecisionPolicy, RealOracle};

const CHECK_BITS: u32 = 64;

fn at_most_half(x: &Interval) -> bool {
    x.hi_le_ratio(&BigInt::from(1), &BigInt::from(2))
}

/// From `|e^z - 1| < y` with `y <= 1/2` concludes `|z| < 2y` and returns `2y`.
///
/// Fails unless `y <= 1/2` is certified; the error names how many factors
/// of 2 (equivalently, how large a power-of-two gap) would bring `y` down
/// to `1/2`.
pub fn linearize_small_form(
    y: &RealOracle,
    policy: &PrecisionPolicy,
) -> Result<RealOracle, ReductionError> {
    let iv = y.eval(CHECK_BITS, policy)?;
    if !at_most_half(&iv) {
        let gap = required_gap(y, &RealOracle::integer(2), policy)?;
        return Err(ReductionError::NotSmall {
            y: iv.upper_decimal(4),
            gap,
        });
    }
    Ok(y.mul(&RealOracle::integer(2))
        .with_label(format!("2*({})", y.label())))
}

/// Least `g >= 0` with `c * base^-g <= 1/2`, certified.
pub fn required_gap(
    c: &RealOracle,
    base: &RealOracle,
    policy: &PrecisionPolicy,
) -> Result<u32, ReductionError> {
    let c = c.eval(CHECK_BITS, policy)?;
    let b = base.eval(CHECK_BITS, policy)?;
    if !b.lo_gt_ratio(&BigInt::from(1), &BigInt::from(1)) {
        return Err(ReductionError::InvalidProblem {
            label: base.label().to_string(),
            what: "gap base must exceed 1".into(),
        });
    }
    let mut g = 0u32;
    let mut scale = Interval::from_i64(1, b.prec());
    loop {
        let y = c.div(&scale).expect("positive scale");
        if at_most_half(&y) {
            return Ok(g);
        }
        g += 1;
        scale = scale.mul(&b);
    }
}

/// Side-condition threshold for a term `c * 2^-g` or `c * alpha^-g`.
pub fn required_gap_pow2(c: &RealOracle, policy: &PrecisionPolicy) -> Result<u32, ReductionError> {
    required_gap(c, &RealOracle::integer(2), policy)
}

pub fn required_gap_alpha(c: &RealOracle, policy: &PrecisionPolicy) -> Result<u32, ReductionError> {
    required_gap(c, &constants::alpha(), policy)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn d(s: &str) -> RealOracle {
        RealOracle::decimal(s).unwrap()
    }

    #[test]
    fn linearizes_small_values() {
        let p = PrecisionPolicy::default();
        let y = d("43.72").mul(&RealOracle::integer(2).powi(-7).unwrap());
        let two_y = linearize_small_form(&y, &p).unwrap().eval(64, &p).unwrap();
        assert!((two_y.to_f64() - 0.683125).abs() < 1e-12);
        assert!(linearize_small_form(&d("0.5"), &p).is_ok());
    }

    #[test]
    fn rejects_and_names_gap() {
        let p = PrecisionPolicy::default();
        match linearize_small_form(&d("0.6"), &p) {
            Err(ReductionError::NotSmall { gap, .. }) => assert_eq!(gap, 1),
            other => panic!("unexpected {other:?}"),
        }
        match linearize_small_form(&d("43.72"), &p) {
            Err(ReductionError::NotSmall { gap, .. }) => assert_eq!(gap, 7),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn gap_thresholds() {
        let p = PrecisionPolicy::default();
        assert_eq!(required_gap_pow2(&d("43.72"), &p).unwrap(), 7);
        assert_eq!(required_gap_pow2(&d("13.57"), &p).unwrap(), 5);
        assert_eq!(required_gap_pow2(&d("2.2"), &p).unwrap(), 3);
        assert_eq!(required_gap_pow2(&d("1.1"), &p).unwrap(), 2);
        assert_eq!(required_gap_alpha(&d("1.7"), &p).unwrap(), 1);
        assert_eq!(required_gap_alpha(&d("43.72"), &p).unwrap(), 3);
        assert_eq!(required_gap_pow2(&d("0.4"), &p).unwrap(), 0);
    }
}
