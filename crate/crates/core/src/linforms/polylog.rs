use std::fmt;

use num_bigint::BigInt;

use super::{LinformsError, BOUND_BITS};
use crate::realnum::{
    format_dyadic, parse_decimal, Interval, PrecisionPolicy, RealOracle, Rounding,
};

/// The bound `c * (1 + log n1)^k`, symbolic in `n1`.
#[derive(Clone, Debug)]
pub struct PolyLogBound {
    pub coefficient: RealOracle,
    pub exponent: u32,
}

impl PolyLogBound {
    pub fn new(coefficient: RealOracle, exponent: u32) -> Self {
        PolyLogBound {
            coefficient,
            exponent,
        }
    }

    pub fn constant(coefficient: RealOracle) -> Self {
        PolyLogBound::new(coefficient, 0)
    }

    /// Parses a decimal coefficient such as `8.22e12`.
    pub fn from_decimal(text: &str, exponent: u32) -> Result<Self, LinformsError> {
        Ok(PolyLogBound::new(RealOracle::decimal(text)?, exponent))
    }

    /// Enclosure of the coefficient.
    pub fn coefficient_enclosure(&self) -> Result<Interval, LinformsError> {
        Ok(self
            .coefficient
            .eval(BOUND_BITS, &PrecisionPolicy::default())?)
    }

    /// Upper endpoint of the coefficient with `digits` significant digits.
    pub fn coefficient_upper(&self, digits: usize) -> Result<String, LinformsError> {
        Ok(self.coefficient_enclosure()?.upper_decimal(digits))
    }

    /// The same bound with its coefficient rounded up to `digits`
    /// significant decimal digits.
    pub fn round_up(&self, digits: usize) -> Result<PolyLogBound, LinformsError> {
        let iv = self.coefficient_enclosure()?;
        let text = format_dyadic(iv.hi_mantissa(), iv.prec(), digits, Rounding::Up);
        debug_assert!(parse_decimal(&text).is_some());
        Ok(PolyLogBound::new(
            RealOracle::decimal(&text)?,
            self.exponent,
        ))
    }

    /// Rewrites the bound with a larger exponent using `1 + log n1 >= l0`:
    /// `c (1+log n1)^k <= (c / l0^(e-k)) (1+log n1)^e`.
    pub fn lift(&self, exponent: u32, l0: &RealOracle) -> Result<PolyLogBound, LinformsError> {
        assert!(exponent >= self.exponent, "cannot lower the exponent");
        let gap = exponent - self.exponent;
        if gap == 0 {
            return Ok(self.clone());
        }
        let c = self.coefficient.div(&l0.powi(i64::from(gap))?)?;
        Ok(PolyLogBound::new(c, exponent))
    }

    pub fn scale(&self, factor: &RealOracle) -> PolyLogBound {
        PolyLogBound::new(self.coefficient.mul(factor), self.exponent)
    }

    /// Sum of bounds, all lifted to the largest exponent.
    pub fn sum(terms: &[PolyLogBound], l0: &RealOracle) -> Result<PolyLogBound, LinformsError> {
        let exponent = terms.iter().map(|t| t.exponent).max().unwrap_or(0);
        let mut acc: Option<RealOracle> = None;
        for t in terms {
            let lifted = t.lift(exponent, l0)?;
            acc = Some(match acc {
                Some(a) => a.add(&lifted.coefficient),
                None => lifted.coefficient,
            });
        }
        Ok(PolyLogBound::new(
            acc.unwrap_or_else(|| RealOracle::integer(0)),
            exponent,
        ))
    }

    /// Enclosure of `c * (1 + log n1)^k` at a concrete `n1 >= 1`.
    pub fn eval_at(&self, n1: &BigInt) -> Result<Interval, LinformsError> {
        let log_term = RealOracle::integer(n1.clone())
            .ln()?
            .add(&RealOracle::integer(1))
            .powi(i64::from(self.exponent))?;
        Ok(self
            .coefficient
            .mul(&log_term)
            .eval(BOUND_BITS, &PrecisionPolicy::default())?)
    }
}

impl fmt::Display for PolyLogBound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c = self
            .coefficient_upper(6)
            .unwrap_or_else(|_| self.coefficient.label().to_string());
        match self.exponent {
            0 => write!(f, "{c}"),
            1 => write!(f, "{c} (1+log n1)"),
            k => write!(f, "{c} (1+log n1)^{k}"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rounding_and_lifting() {
        let b = PolyLogBound::new(RealOracle::decimal("8.2129e12").unwrap(), 1);
        assert_eq!(
            b.round_up(3).unwrap().coefficient_upper(3).unwrap(),
            "8.22e12"
        );
        let l0 = RealOracle::integer(10);
        let lifted = b.lift(3, &l0).unwrap();
        assert_eq!(lifted.exponent, 3);
        assert_eq!(lifted.coefficient_upper(5).unwrap(), "8.2129e10");
        let s = PolyLogBound::sum(
            &[
                PolyLogBound::constant(RealOracle::integer(100)),
                PolyLogBound::new(RealOracle::integer(5), 1),
            ],
            &l0,
        )
        .unwrap();
        assert_eq!(
            (s.exponent, s.coefficient_upper(3).unwrap()),
            (1, "1.5e1".into())
        );
    }

    #[test]
    fn monotone_in_n1() {
        let b = PolyLogBound::new(RealOracle::decimal("4.73e50").unwrap(), 4);
        let mut prev = b.eval_at(&BigInt::from(3)).unwrap();
        for n in [4, 10, 101, 10_000] {
            let cur = b.eval_at(&BigInt::from(n)).unwrap();
            assert!(prev.certain_cmp(&cur) == Some(std::cmp::Ordering::Less));
            prev = cur;
        }
    }
}
