//! Turning `L / (log L)^r < H` into an explicit bound on `L`.

use num_bigint::BigInt;

use super::{LinformsError, BOUND_BITS};
use crate::realnum::{Interval, PrecisionPolicy, RealOracle};

/// `2^r H (log H)^r`, valid whenever `H > (4 r^2)^r` and `L / (log L)^r < H`.
pub fn guzman_oracle(r: u32, h: &RealOracle) -> Result<RealOracle, LinformsError> {
    if r == 0 {
        return Err(LinformsError::InvalidInput("r must be at least 1".into()));
    }
    let threshold = BigInt::from(4u64 * u64::from(r) * u64::from(r)).pow(r);
    let hv = h.eval(BOUND_BITS, &PrecisionPolicy::default())?;
    if !hv.lo_gt_ratio(&threshold, &BigInt::from(1)) {
        return Err(LinformsError::GuzmanPrecondition {
            r,
            h: hv.to_string(),
            threshold: threshold.to_string(),
        });
    }
    let r_i = i64::from(r);
    Ok(RealOracle::integer(2)
        .powi(r_i)?
        .mul(h)
        .mul(&h.ln()?.powi(r_i)?)
        .with_label(format!("2^{r} H (log H)^{r}")))
}

/// Enclosure of `2^r H (log H)^r`.
pub fn guzman_unwrap(r: u32, h: &RealOracle) -> Result<Interval, LinformsError> {
    Ok(guzman_oracle(r, h)?.eval(BOUND_BITS, &PrecisionPolicy::default())?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::realnum::constants;

    #[test]
    fn absolute_bound_from_last_step() {
        let h = RealOracle::decimal("4.73e50")
            .unwrap()
            .div(&constants::ln_alpha())
            .unwrap();
        let v = guzman_unwrap(4, &h).unwrap();
        assert!(v.lo_f64() >= 7.5e59 && v.hi_f64() <= 7.9e59, "{v}");
    }

    #[test]
    fn small_r() {
        let v = guzman_unwrap(1, &RealOracle::integer(1_000_000)).unwrap();
        let direct = 2e6 * 1e6f64.ln();
        assert!((v.to_f64() / direct - 1.0).abs() < 1e-12);
    }

    #[test]
    fn precondition_gate() {
        let err = guzman_unwrap(4, &RealOracle::integer(10)).unwrap_err();
        assert!(matches!(err, LinformsError::GuzmanPrecondition { .. }));
        // (4 * 16)^4 = 16777216 is not strictly exceeded
        assert!(guzman_unwrap(4, &RealOracle::integer(16_777_216)).is_err());
        assert!(guzman_unwrap(4, &RealOracle::integer(16_777_217)).is_ok());
    }
}
