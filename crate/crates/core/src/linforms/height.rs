//! Upper bounds for logarithmic heights, assembled from
//! `h(x + y) <= h(x) + h(y) + log 2`, `h(x y^{+-1}) <= h(x) + h(y)` and
//! `h(x^k) = |k| h(x)`.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use super::LinformsError;
use crate::realnum::{constants, RealOracle};

/// Non-negative integer gaps that appear symbolically in exponents.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum GapVar {
    /// `a1 - a2`
    A1MinusA2,
    /// `a1 - a3`
    A1MinusA3,
    /// `n1 - n2`
    N1MinusN2,
}

impl GapVar {
    pub const ALL: [GapVar; 3] = [GapVar::A1MinusA2, GapVar::A1MinusA3, GapVar::N1MinusN2];

    pub fn name(self) -> &'static str {
        match self {
            GapVar::A1MinusA2 => "a1-a2",
            GapVar::A1MinusA3 => "a1-a3",
            GapVar::N1MinusN2 => "n1-n2",
        }
    }

    /// The logarithm that the gap is naturally measured in: bounds are
    /// stated for `(a1-a2) log 2`, `(a1-a3) log 2` and `(n1-n2) log alpha`.
    pub fn unit(self) -> RealOracle {
        match self {
            GapVar::A1MinusA2 | GapVar::A1MinusA3 => RealOracle::ln2(),
            GapVar::N1MinusN2 => constants::ln_alpha(),
        }
    }

    pub fn unit_name(self) -> &'static str {
        match self {
            GapVar::A1MinusA2 | GapVar::A1MinusA3 => "log 2",
            GapVar::N1MinusN2 => "log alpha",
        }
    }
}

impl fmt::Display for GapVar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Atom {
    Alpha,
    Two,
    FourSqrt2,
    /// `num / den` with `den > 0`.
    Rational(BigInt, BigInt),
}

impl Atom {
    /// Exact height of the atom.
    pub fn height(&self) -> Result<RealOracle, LinformsError> {
        Ok(match self {
            Atom::Alpha => constants::ln_alpha()
                .div(&RealOracle::integer(2))?
                .with_label("h(alpha)"),
            Atom::Two => RealOracle::ln2(),
            Atom::FourSqrt2 => constants::ln_four_sqrt2(),
            Atom::Rational(num, den) => {
                if !den.is_positive() {
                    return Err(LinformsError::InvalidInput(format!(
                        "rational atom {num}/{den} needs a positive denominator"
                    )));
                }
                if num.is_zero() {
                    return Err(LinformsError::InvalidInput("height of 0".into()));
                }
                let g = num.gcd(den);
                let m = (num / &g).abs().max(den / &g);
                RealOracle::integer(m).ln()?
            }
        })
    }

    pub fn value(&self) -> Result<RealOracle, LinformsError> {
        Ok(match self {
            Atom::Alpha => constants::alpha(),
            Atom::Two => RealOracle::integer(2),
            Atom::FourSqrt2 => constants::four_sqrt2(),
            Atom::Rational(num, den) => RealOracle::rational(num.clone(), den.clone())?,
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Exponent {
    Int(i64),
    /// `+gap` or `-gap`.
    Gap {
        var: GapVar,
        negated: bool,
    },
}

impl Exponent {
    pub fn gap(var: GapVar) -> Self {
        Exponent::Gap {
            var,
            negated: false,
        }
    }

    pub fn neg_gap(var: GapVar) -> Self {
        Exponent::Gap { var, negated: true }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum HeightExpr {
    Atom(Atom),
    Product(Box<HeightExpr>, Box<HeightExpr>),
    Quotient(Box<HeightExpr>, Box<HeightExpr>),
    Pow(Box<HeightExpr>, Exponent),
    /// `x1 + x2 + ... + xn`, costing `(n - 1) log 2` on top of the parts.
    Sum(Vec<HeightExpr>),
}

impl HeightExpr {
    pub fn atom(a: Atom) -> Self {
        HeightExpr::Atom(a)
    }

    pub fn one() -> Self {
        HeightExpr::Atom(Atom::Rational(BigInt::from(1), BigInt::from(1)))
    }

    pub fn alpha() -> Self {
        HeightExpr::Atom(Atom::Alpha)
    }

    pub fn two() -> Self {
        HeightExpr::Atom(Atom::Two)
    }

    pub fn four_sqrt2() -> Self {
        HeightExpr::Atom(Atom::FourSqrt2)
    }

    pub fn rational(num: i64, den: i64) -> Self {
        HeightExpr::Atom(Atom::Rational(BigInt::from(num), BigInt::from(den)))
    }

    pub fn times(self, other: HeightExpr) -> Self {
        HeightExpr::Product(Box::new(self), Box::new(other))
    }

    pub fn over(self, other: HeightExpr) -> Self {
        HeightExpr::Quotient(Box::new(self), Box::new(other))
    }

    pub fn pow(self, e: Exponent) -> Self {
        HeightExpr::Pow(Box::new(self), e)
    }

    pub fn sum(parts: Vec<HeightExpr>) -> Self {
        HeightExpr::Sum(parts)
    }

    /// Numeric value, for expressions without symbolic gaps.
    pub fn value(&self) -> Result<Option<RealOracle>, LinformsError> {
        Ok(match self {
            HeightExpr::Atom(a) => Some(a.value()?),
            HeightExpr::Product(a, b) => match (a.value()?, b.value()?) {
                (Some(x), Some(y)) => Some(x.mul(&y)),
                _ => None,
            },
            HeightExpr::Quotient(a, b) => match (a.value()?, b.value()?) {
                (Some(x), Some(y)) => Some(x.div(&y)?),
                _ => None,
            },
            HeightExpr::Pow(a, Exponent::Int(k)) => match a.value()? {
                Some(x) => Some(x.powi(*k)?),
                None => None,
            },
            HeightExpr::Pow(_, Exponent::Gap { .. }) => None,
            HeightExpr::Sum(parts) => {
                let mut acc: Option<RealOracle> = None;
                for p in parts {
                    let Some(v) = p.value()? else {
                        return Ok(None);
                    };
                    acc = Some(match acc {
                        Some(a) => a.add(&v),
                        None => v,
                    });
                }
                acc
            }
        })
    }

    fn has_gaps(&self) -> bool {
        match self {
            HeightExpr::Atom(_) => false,
            HeightExpr::Product(a, b) | HeightExpr::Quotient(a, b) => a.has_gaps() || b.has_gaps(),
            HeightExpr::Pow(a, e) => matches!(e, Exponent::Gap { .. }) || a.has_gaps(),
            HeightExpr::Sum(parts) => parts.iter().any(HeightExpr::has_gaps),
        }
    }
}

/// A height bound `constant + sum(coefficient_v * v)` over gap variables.
#[derive(Clone, Debug)]
pub struct LinearHeight {
    pub constant: RealOracle,
    pub coefficients: BTreeMap<GapVar, RealOracle>,
}

impl LinearHeight {
    fn constant(c: RealOracle) -> Self {
        LinearHeight {
            constant: c,
            coefficients: BTreeMap::new(),
        }
    }

    fn plus(mut self, other: LinearHeight) -> Self {
        self.constant = self.constant.add(&other.constant);
        for (v, c) in other.coefficients {
            let merged = match self.coefficients.remove(&v) {
                Some(prev) => prev.add(&c),
                None => c,
            };
            self.coefficients.insert(v, merged);
        }
        self
    }

    fn scaled(self, k: u64) -> Self {
        let f = RealOracle::integer(k);
        LinearHeight {
            constant: self.constant.mul(&f),
            coefficients: self
                .coefficients
                .into_iter()
                .map(|(v, c)| (v, c.mul(&f)))
                .collect(),
        }
    }

    pub fn is_constant(&self) -> bool {
        self.coefficients.is_empty()
    }

    /// Upper bound on the height at concrete gap values.
    pub fn at(&self, gaps: &BTreeMap<GapVar, u64>) -> Result<RealOracle, LinformsError> {
        let mut acc = self.constant.clone();
        for (v, c) in &self.coefficients {
            let g = gaps
                .get(v)
                .ok_or_else(|| LinformsError::InvalidInput(format!("no value for {v}")))?;
            acc = acc.add(&c.mul(&RealOracle::integer(*g)));
        }
        Ok(acc)
    }
}

/// Upper bound on the logarithmic height of `e`, linear in the gap
/// variables it mentions.
pub fn height_upper_bound(e: &HeightExpr) -> Result<LinearHeight, LinformsError> {
    Ok(match e {
        HeightExpr::Atom(a) => LinearHeight::constant(a.height()?),
        HeightExpr::Product(a, b) | HeightExpr::Quotient(a, b) => {
            height_upper_bound(a)?.plus(height_upper_bound(b)?)
        }
        HeightExpr::Pow(base, Exponent::Int(k)) => {
            height_upper_bound(base)?.scaled(k.unsigned_abs())
        }
        HeightExpr::Pow(base, Exponent::Gap { var, .. }) => {
            if base.has_gaps() {
                return Err(LinformsError::InvalidInput(
                    "symbolic power of a symbolic base is not linear".into(),
                ));
            }
            let h = height_upper_bound(base)?;
            let mut coefficients = BTreeMap::new();
            coefficients.insert(*var, h.constant);
            LinearHeight {
                constant: RealOracle::integer(0),
                coefficients,
            }
        }
        HeightExpr::Sum(parts) => {
            if parts.is_empty() {
                return Err(LinformsError::InvalidInput("empty sum".into()));
            }
            let mut acc = LinearHeight::constant(RealOracle::integer(0));
            for p in parts {
                acc = acc.plus(height_upper_bound(p)?);
            }
            let extra = RealOracle::ln2().mul(&RealOracle::integer(parts.len() as u64 - 1));
            acc.plus(LinearHeight::constant(extra))
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::realnum::PrecisionPolicy;

    fn f(o: &RealOracle) -> f64 {
        o.eval(64, &PrecisionPolicy::default()).unwrap().to_f64()
    }

    #[test]
    fn atoms() {
        let h = height_upper_bound(&HeightExpr::alpha()).unwrap();
        assert!((f(&h.constant) - 0.881373587).abs() < 1e-8);
        let h = height_upper_bound(&HeightExpr::rational(3, 2)).unwrap();
        assert!((f(&h.constant) - 3f64.ln()).abs() < 1e-12);
        let h = height_upper_bound(&HeightExpr::rational(6, 4)).unwrap();
        assert!((f(&h.constant) - 3f64.ln()).abs() < 1e-12);
        assert_eq!(
            f(&height_upper_bound(&HeightExpr::one()).unwrap().constant),
            0.0
        );
    }

    #[test]
    fn sum_and_product_rules() {
        // 4 sqrt2 (2^d + 1)
        let e = HeightExpr::four_sqrt2().times(HeightExpr::sum(vec![
            HeightExpr::two().pow(Exponent::gap(GapVar::A1MinusA2)),
            HeightExpr::one(),
        ]));
        let h = height_upper_bound(&e).unwrap();
        let l2 = 2f64.ln();
        assert!((f(&h.constant) - (32f64.sqrt().ln() + l2)).abs() < 1e-12);
        assert!((f(&h.coefficients[&GapVar::A1MinusA2]) - l2).abs() < 1e-12);
    }

    #[test]
    fn quotient_with_two_gaps() {
        // (1 + alpha^m) / (4 sqrt2 (2^d + 1))
        let e = HeightExpr::sum(vec![
            HeightExpr::one(),
            HeightExpr::alpha().pow(Exponent::gap(GapVar::N1MinusN2)),
        ])
        .over(HeightExpr::four_sqrt2().times(HeightExpr::sum(vec![
            HeightExpr::two().pow(Exponent::gap(GapVar::A1MinusA2)),
            HeightExpr::one(),
        ])));
        let h = height_upper_bound(&e).unwrap();
        let l2 = 2f64.ln();
        let la = (3.0 + 8f64.sqrt()).ln();
        assert!((f(&h.constant) - (32f64.sqrt().ln() + 2.0 * l2)).abs() < 1e-12);
        assert!((f(&h.coefficients[&GapVar::N1MinusN2]) - la / 2.0).abs() < 1e-12);
        assert!((f(&h.coefficients[&GapVar::A1MinusA2]) - l2).abs() < 1e-12);
    }

    #[test]
    fn integer_powers_scale() {
        let e = HeightExpr::alpha().pow(Exponent::Int(-3));
        let h = height_upper_bound(&e).unwrap();
        assert!((f(&h.constant) - 1.5 * (3.0 + 8f64.sqrt()).ln()).abs() < 1e-12);
        let bad = HeightExpr::sum(vec![
            HeightExpr::one(),
            HeightExpr::two().pow(Exponent::gap(GapVar::A1MinusA2)),
        ])
        .pow(Exponent::gap(GapVar::N1MinusN2));
        assert!(height_upper_bound(&bad).is_err());
    }
}
