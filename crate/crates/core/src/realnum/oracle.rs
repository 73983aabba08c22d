use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use super::decimal::parse_decimal;
use super::interval::{DomainFault, Interval};
use super::{PrecisionPolicy, RealError};

/// Lowest rung of the working-precision ladder; rungs are `32 * 2^j` bits.
const BASE_RUNG: u32 = 32;
/// Extra working bits requested above the target precision.
const EVAL_GUARD: u32 = 32;
/// Working precision ceiling used when validating a freshly built oracle.
const VALIDATION_CAP: u32 = 4096;

/// A fixed real constant that can be enclosed to any requested precision.
///
/// Oracles are immutable expression trees over exact rationals, `ln 2`,
/// square roots, logarithms, field operations and integer powers. They are
/// cheap to clone and safe to share between threads.
#[derive(Clone)]
pub struct RealOracle {
    label: Arc<str>,
    node: Arc<Node>,
}

enum Node {
    Rational(BigInt, BigInt),
    Ln2,
    Add(RealOracle, RealOracle),
    Sub(RealOracle, RealOracle),
    Mul(RealOracle, RealOracle),
    Div(RealOracle, RealOracle),
    Neg(RealOracle),
    Sqrt(RealOracle),
    Ln(RealOracle),
    Powi(RealOracle, i64),
    Max(RealOracle, RealOracle),
    Abs(RealOracle),
}

impl fmt::Debug for RealOracle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "RealOracle({})", self.label)
    }
}

impl RealOracle {
    fn new(label: String, node: Node) -> Self {
        RealOracle {
            label: label.into(),
            node: Arc::new(node),
        }
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn with_label(&self, label: impl Into<String>) -> Self {
        RealOracle {
            label: label.into().into(),
            node: Arc::clone(&self.node),
        }
    }

    pub fn integer(n: impl Into<BigInt>) -> Self {
        let n = n.into();
        RealOracle::new(n.to_string(), Node::Rational(n, BigInt::one()))
    }

    pub fn rational(num: impl Into<BigInt>, den: impl Into<BigInt>) -> Result<Self, RealError> {
        let (num, den): (BigInt, BigInt) = (num.into(), den.into());
        if den.is_zero() {
            return Err(RealError::Undefined {
                label: format!("{num}/0"),
            });
        }
        let (num, den) = if den.is_negative() {
            (-num, -den)
        } else {
            (num, den)
        };
        Ok(RealOracle::new(
            format!("{num}/{den}"),
            Node::Rational(num, den),
        ))
    }

    /// Exact decimal constant such as `43.72` or `7.9e59`.
    pub fn decimal(text: &str) -> Result<Self, RealError> {
        let (num, den) = parse_decimal(text).ok_or_else(|| RealError::Parse {
            text: text.to_string(),
        })?;
        Ok(RealOracle::new(text.to_string(), Node::Rational(num, den)))
    }

    pub fn ln2() -> Self {
        RealOracle::new("log 2".into(), Node::Ln2)
    }

    pub fn add(&self, other: &RealOracle) -> Self {
        RealOracle::new(
            format!("({} + {})", self.label, other.label),
            Node::Add(self.clone(), other.clone()),
        )
    }

    pub fn sub(&self, other: &RealOracle) -> Self {
        RealOracle::new(
            format!("({} - {})", self.label, other.label),
            Node::Sub(self.clone(), other.clone()),
        )
    }

    pub fn mul(&self, other: &RealOracle) -> Self {
        RealOracle::new(
            format!("{} * {}", self.label, other.label),
            Node::Mul(self.clone(), other.clone()),
        )
    }

    pub fn max(&self, other: &RealOracle) -> Self {
        RealOracle::new(
            format!("max({}, {})", self.label, other.label),
            Node::Max(self.clone(), other.clone()),
        )
    }

    pub fn abs(&self) -> Self {
        RealOracle::new(format!("|{}|", self.label), Node::Abs(self.clone()))
    }

    pub fn neg(&self) -> Self {
        RealOracle::new(format!("-{}", self.label), Node::Neg(self.clone()))
    }

    pub fn div(&self, other: &RealOracle) -> Result<Self, RealError> {
        other.validate_nonzero()?;
        Ok(RealOracle::new(
            format!("{} / {}", self.label, other.label),
            Node::Div(self.clone(), other.clone()),
        ))
    }

    pub fn sqrt(&self) -> Result<Self, RealError> {
        self.validate_sign(false)?;
        Ok(RealOracle::new(
            format!("sqrt({})", self.label),
            Node::Sqrt(self.clone()),
        ))
    }

    pub fn ln(&self) -> Result<Self, RealError> {
        self.validate_sign(true)?;
        Ok(RealOracle::new(
            format!("log({})", self.label),
            Node::Ln(self.clone()),
        ))
    }

    pub fn powi(&self, k: i64) -> Result<Self, RealError> {
        if k < 0 {
            self.validate_nonzero()?;
        }
        Ok(RealOracle::new(
            format!("{}^{}", self.label, k),
            Node::Powi(self.clone(), k),
        ))
    }

    /// Encloses the constant using working precision `work` directly, with
    /// no width guarantee and no nesting across precisions. This is the fast
    /// path for callers that manage precision themselves.
    pub fn enclosure_at(&self, work: u32) -> Result<Interval, RealError> {
        self.eval_raw(work)
            .map_err(|fault| self.fault_error(fault, work))
    }

    fn fault_error(&self, fault: DomainFault, work: u32) -> RealError {
        match fault {
            DomainFault::Undefined => RealError::Undefined {
                label: self.label.to_string(),
            },
            DomainFault::Straddles => RealError::PrecisionCap {
                label: self.label.to_string(),
                bits: work,
            },
        }
    }

    fn eval_raw(&self, w: u32) -> Result<Interval, DomainFault> {
        Ok(match &*self.node {
            Node::Rational(n, d) => Interval::from_ratio(n, d, w).ok_or(DomainFault::Undefined)?,
            Node::Ln2 => Interval::ln2(w),
            Node::Add(a, b) => a.eval_raw(w)?.add(&b.eval_raw(w)?),
            Node::Sub(a, b) => a.eval_raw(w)?.sub(&b.eval_raw(w)?),
            Node::Mul(a, b) => a.eval_raw(w)?.mul(&b.eval_raw(w)?),
            Node::Div(a, b) => a.eval_raw(w)?.div(&b.eval_raw(w)?)?,
            Node::Neg(a) => a.eval_raw(w)?.neg(),
            Node::Sqrt(a) => a.eval_raw(w)?.sqrt()?,
            Node::Ln(a) => a.eval_raw(w)?.ln()?,
            Node::Powi(a, k) => a.eval_raw(w)?.powi(*k)?,
            Node::Max(a, b) => a.eval_raw(w)?.max_upper(&b.eval_raw(w)?),
            Node::Abs(a) => a.eval_raw(w)?.abs(),
        })
    }

    /// Encloses the constant with `hi - lo <= 2^-precision * max(1, |hi|)`.
    ///
    /// Working precision climbs a fixed ladder of rungs and the result is
    /// intersected with every lower rung, so enclosures returned for larger
    /// precisions are always nested inside those for smaller ones.
    pub fn eval(&self, precision: u32, policy: &PrecisionPolicy) -> Result<Interval, RealError> {
        if precision < 16 {
            return Err(RealError::PrecisionTooSmall {
                requested: precision,
                minimum: 16,
            });
        }
        let target = precision + EVAL_GUARD;
        let mut rung = BASE_RUNG;
        let mut acc: Option<Interval> = None;
        loop {
            if rung > policy.cap.max(2 * target) {
                return Err(RealError::PrecisionCap {
                    label: self.label.to_string(),
                    bits: policy.cap,
                });
            }
            match self.eval_raw(rung) {
                Ok(iv) => {
                    let merged = match &acc {
                        Some(prev) => prev
                            .intersect(&iv)
                            .expect("valid enclosures of one constant must overlap"),
                        None => iv,
                    };
                    let done = rung >= target && width_ok(&merged, precision);
                    acc = Some(merged);
                    if done {
                        return Ok(acc.expect("just set"));
                    }
                }
                Err(DomainFault::Undefined) => {
                    return Err(RealError::Undefined {
                        label: self.label.to_string(),
                    })
                }
                Err(DomainFault::Straddles) => {}
            }
            rung = rung.checked_mul(2).ok_or(RealError::PrecisionCap {
                label: self.label.to_string(),
                bits: policy.cap,
            })?;
        }
    }

    fn validate_sign(&self, strict: bool) -> Result<(), RealError> {
        let mut w = 64;
        while w <= VALIDATION_CAP {
            match self.eval_raw(w) {
                Ok(iv) => {
                    if iv.is_positive() {
                        return Ok(());
                    }
                    if iv.is_negative() || (!strict && iv.is_point() && iv.lo_mantissa().is_zero())
                    {
                        return if iv.is_negative() {
                            Err(RealError::Undefined {
                                label: self.label.to_string(),
                            })
                        } else {
                            Ok(())
                        };
                    }
                }
                Err(DomainFault::Undefined) => {
                    return Err(RealError::Undefined {
                        label: self.label.to_string(),
                    })
                }
                Err(DomainFault::Straddles) => {}
            }
            w *= 2;
        }
        Err(RealError::Undefined {
            label: format!("{} (sign not certified)", self.label),
        })
    }

    fn validate_nonzero(&self) -> Result<(), RealError> {
        let mut w = 64;
        while w <= VALIDATION_CAP {
            match self.eval_raw(w) {
                Ok(iv) if !iv.contains_zero() => return Ok(()),
                Ok(iv) if iv.is_point() => break,
                Err(DomainFault::Undefined) => break,
                _ => {}
            }
            w *= 2;
        }
        Err(RealError::Undefined {
            label: format!("{} (not certified nonzero)", self.label),
        })
    }
}

fn width_ok(iv: &Interval, precision: u32) -> bool {
    // (hi - lo) * 2^-w <= 2^-p * max(1, |hi| * 2^-w)
    let scaled = iv.width_mantissa() << precision;
    let one = BigInt::one() << iv.prec();
    let mag = iv.hi_mantissa().abs().max(iv.lo_mantissa().abs());
    scaled <= one.max(mag)
}

/// Frequently used constants.
pub mod constants {
    use super::RealOracle;

    pub fn sqrt2() -> RealOracle {
        RealOracle::integer(2)
            .sqrt()
            .expect("2 > 0")
            .with_label("sqrt 2")
    }

    /// `alpha = 3 + sqrt 8`, the dominant root of `x^2 - 6x + 1`.
    pub fn alpha() -> RealOracle {
        RealOracle::integer(3)
            .add(&RealOracle::integer(8).sqrt().expect("8 > 0"))
            .with_label("alpha")
    }

    /// `beta = 3 - sqrt 8 = 1 / alpha`.
    pub fn beta() -> RealOracle {
        RealOracle::integer(3)
            .sub(&RealOracle::integer(8).sqrt().expect("8 > 0"))
            .with_label("beta")
    }

    pub fn four_sqrt2() -> RealOracle {
        RealOracle::integer(32)
            .sqrt()
            .expect("32 > 0")
            .with_label("4 sqrt 2")
    }

    pub fn ln_alpha() -> RealOracle {
        alpha().ln().expect("alpha > 0").with_label("log alpha")
    }

    pub fn ln_four_sqrt2() -> RealOracle {
        four_sqrt2()
            .ln()
            .expect("4 sqrt 2 > 0")
            .with_label("log(4 sqrt 2)")
    }

    /// `tau = log alpha / log 2`.
    pub fn tau() -> RealOracle {
        ln_alpha()
            .div(&RealOracle::ln2())
            .expect("log 2 > 0")
            .with_label("tau")
    }
}
