//! Certified continued-fraction expansion, convergents and the
//! nearest-integer distance.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::interval::Interval;
use super::oracle::RealOracle;
use super::{PrecisionPolicy, RealError};

/// A convergent `p/q` of a continued fraction; index 0 is the integer part.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Convergent {
    pub index: usize,
    pub p: BigInt,
    pub q: BigInt,
}

/// Partial quotients shared by every real number in `iv`, at most `limit`.
///
/// Both rational endpoints are run through Euclid's algorithm in lockstep.
/// The set of reals with a given quotient prefix is an interval, so once
/// both endpoints agree on a prefix so does everything between them.
pub fn expand_interval(iv: &Interval, limit: usize) -> Vec<BigInt> {
    let den = BigInt::one() << iv.prec();
    let (mut n1, mut d1) = (iv.lo_mantissa().clone(), den.clone());
    let (mut n2, mut d2) = (iv.hi_mantissa().clone(), den);
    let mut out = Vec::new();
    while out.len() < limit {
        let (a1, r1) = n1.div_mod_floor(&d1);
        let (a2, r2) = n2.div_mod_floor(&d2);
        if a1 != a2 || r1.is_zero() || r2.is_zero() {
            break;
        }
        out.push(a1);
        n1 = std::mem::replace(&mut d1, r1);
        n2 = std::mem::replace(&mut d2, r2);
    }
    out
}

/// The first `count` partial quotients of the oracle's constant, which the
/// caller asserts to be irrational.
///
/// Starts at `policy.initial` bits and doubles until all `count` quotients
/// are certified; fails at `policy.cap` naming the first quotient that could
/// not be certified.
pub fn cf_expand(
    oracle: &RealOracle,
    count: usize,
    policy: &PrecisionPolicy,
) -> Result<Vec<BigInt>, RealError> {
    assert!(count >= 1, "count must be positive");
    let mut bits = policy.initial.max(16);
    loop {
        let iv = oracle.eval(bits, policy)?;
        let qs = expand_interval(&iv, count);
        if qs.len() == count {
            return Ok(qs);
        }
        if bits >= policy.cap {
            return Err(RealError::PrecisionCap {
                label: format!("partial quotient #{} of {}", qs.len(), oracle.label()),
                bits: policy.cap,
            });
        }
        bits = (bits * 2).min(policy.cap);
    }
}

/// Convergents of a quotient list by the standard recurrence.
pub fn convergents(quotients: &[BigInt]) -> Vec<Convergent> {
    assert!(!quotients.is_empty(), "need at least one quotient");
    let mut out = Vec::with_capacity(quotients.len());
    let (mut p_prev, mut q_prev) = (BigInt::one(), BigInt::zero());
    let (mut p, mut q) = (quotients[0].clone(), BigInt::one());
    out.push(Convergent {
        index: 0,
        p: p.clone(),
        q: q.clone(),
    });
    for (i, a) in quotients.iter().enumerate().skip(1) {
        assert!(a.is_positive(), "quotient {i} must be positive");
        let p_next = a * &p + &p_prev;
        let q_next = a * &q + &q_prev;
        p_prev = std::mem::replace(&mut p, p_next);
        q_prev = std::mem::replace(&mut q, q_next);
        out.push(Convergent {
            index: i,
            p: p.clone(),
            q: q.clone(),
        });
    }
    out
}

/// Lazily extended sequence of certified convergents of one constant.
pub struct ConvergentStream {
    oracle: RealOracle,
    policy: PrecisionPolicy,
    bits: u32,
    quotients: Vec<BigInt>,
    convergents: Vec<Convergent>,
}

impl ConvergentStream {
    pub fn new(oracle: RealOracle, policy: PrecisionPolicy) -> Self {
        let bits = policy.initial.max(16);
        ConvergentStream {
            oracle,
            policy,
            bits,
            quotients: Vec::new(),
            convergents: Vec::new(),
        }
    }

    pub fn oracle(&self) -> &RealOracle {
        &self.oracle
    }

    /// Working precision reached so far.
    pub fn bits(&self) -> u32 {
        self.bits
    }

    pub fn get(&mut self, index: usize) -> Result<&Convergent, RealError> {
        while self.quotients.len() <= index {
            let iv = self.oracle.eval(self.bits, &self.policy)?;
            let qs = expand_interval(&iv, usize::MAX);
            if qs.len() > self.quotients.len() {
                debug_assert!(qs.starts_with(&self.quotients));
                self.quotients = qs;
            }
            if self.quotients.len() > index {
                break;
            }
            if self.bits >= self.policy.cap {
                return Err(RealError::PrecisionCap {
                    label: format!(
                        "partial quotient #{} of {}",
                        self.quotients.len(),
                        self.oracle.label()
                    ),
                    bits: self.policy.cap,
                });
            }
            self.bits = (self.bits * 2).min(self.policy.cap);
        }
        if self.convergents.len() <= index {
            self.convergents = convergents(&self.quotients);
        }
        Ok(&self.convergents[index])
    }

    /// The convergent of least index whose denominator exceeds `threshold`.
    pub fn first_q_exceeding(&mut self, threshold: &BigInt) -> Result<Convergent, RealError> {
        let mut i = 0;
        loop {
            let c = self.get(i)?;
            if &c.q > threshold {
                return Ok(c.clone());
            }
            i += 1;
        }
    }
}

/// The convergent of least index whose denominator exceeds `threshold`.
pub fn first_convergent_q_exceeding(
    oracle: &RealOracle,
    threshold: &BigInt,
    policy: &PrecisionPolicy,
) -> Result<Convergent, RealError> {
    assert!(threshold >= &BigInt::one(), "threshold must be at least 1");
    ConvergentStream::new(oracle.clone(), *policy).first_q_exceeding(threshold)
}

/// Certified enclosure of `||x||`, the distance from `x` to the nearest
/// integer.
///
/// When the enclosure of `x` straddles a half-integer the result is
/// `[min distance at the endpoints, 1/2]`, which is still a valid lower
/// bound. Inputs of width `1/2` or more are rejected.
pub fn nearest_int_distance(x: &Interval) -> Result<Interval, RealError> {
    let x = if x.prec() == 0 {
        x.with_prec(1)
    } else {
        x.clone()
    };
    let prec = x.prec();
    let one = BigInt::one() << prec;
    let half = BigInt::one() << (prec - 1);
    if x.width_mantissa() >= half {
        return Err(RealError::Undecided {
            what: "nearest-integer distance: enclosure too wide".into(),
        });
    }
    let nearest = |m: &BigInt| (m + &half).div_floor(&one);
    let z_lo = nearest(x.lo_mantissa());
    let z_hi = nearest(x.hi_mantissa());
    if z_lo == z_hi {
        let shifted = x.sub(&Interval::from_int(&z_lo, prec));
        return Ok(shifted.abs());
    }
    let d_lo = (x.lo_mantissa() - (&z_lo << prec)).abs();
    let d_hi = (x.hi_mantissa() - (&z_hi << prec)).abs();
    Ok(Interval::from_mantissas(d_lo.min(d_hi), half, prec))
}

/// Whether `|x - p/q| < 1/q^2` is certified for the oracle's constant.
pub fn certify_approximation(
    oracle: &RealOracle,
    c: &Convergent,
    policy: &PrecisionPolicy,
) -> Result<bool, RealError> {
    let bits = (2 * c.q.bits() as u32 + 64).max(policy.initial);
    let x = oracle.eval(bits, policy)?;
    // |x q - p| * q < 1
    let err = x
        .mul_int(&c.q)
        .sub(&Interval::from_int(&c.p, x.prec()))
        .abs();
    Ok(err.mul_int(&c.q).hi_mantissa() < &(BigInt::one() << x.prec()))
}
