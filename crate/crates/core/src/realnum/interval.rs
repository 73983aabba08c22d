//! Outward-rounded interval arithmetic over dyadic fixed-point numbers.
//!
//! An [`Interval`] stores two arbitrary-precision mantissas `lo` and `hi`
//! together with a binary scale `prec`; the enclosed set is
//! `[lo * 2^-prec, hi * 2^-prec]`. Every operation rounds its lower endpoint
//! toward negative infinity and its upper endpoint toward positive infinity,
//! so the true result of the corresponding real operation is always enclosed.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;
use std::sync::{Mutex, OnceLock};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::decimal::{format_dyadic, Rounding};

/// Why an operation could not produce an enclosure.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DomainFault {
    /// The operation is certainly undefined on the whole input (log of a
    /// non-positive number, division by zero).
    Undefined,
    /// The input straddles the edge of the domain; more precision may help.
    Straddles,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Interval {
    lo: BigInt,
    hi: BigInt,
    prec: u32,
}

pub(crate) fn floor_shr(x: &BigInt, k: u32) -> BigInt {
    x >> k
}

pub(crate) fn ceil_shr(x: &BigInt, k: u32) -> BigInt {
    -((-x) >> k)
}

pub(crate) fn floor_div(n: &BigInt, d: &BigInt) -> BigInt {
    n.div_floor(d)
}

pub(crate) fn ceil_div(n: &BigInt, d: &BigInt) -> BigInt {
    -((-n).div_floor(d))
}

fn ceil_sqrt(x: &BigInt) -> BigInt {
    let r = x.sqrt();
    if &(&r * &r) == x {
        r
    } else {
        r + 1
    }
}

// Guard bits used internally by the transcendental kernels.
const GUARD: u32 = 40;

impl Interval {
    /// Builds an interval from raw mantissas. Panics if `lo > hi`.
    pub fn from_mantissas(lo: BigInt, hi: BigInt, prec: u32) -> Self {
        assert!(lo <= hi, "interval endpoints out of order");
        Interval { lo, hi, prec }
    }

    pub fn from_int(n: &BigInt, prec: u32) -> Self {
        let m = n << prec;
        Interval {
            lo: m.clone(),
            hi: m,
            prec,
        }
    }

    pub fn from_i64(n: i64, prec: u32) -> Self {
        Self::from_int(&BigInt::from(n), prec)
    }

    /// Encloses `num / den`. Returns `None` when `den` is zero.
    pub fn from_ratio(num: &BigInt, den: &BigInt, prec: u32) -> Option<Self> {
        if den.is_zero() {
            return None;
        }
        let (num, den) = if den.is_negative() {
            (-num, -den)
        } else {
            (num.clone(), den.clone())
        };
        let scaled = num << prec;
        Some(Interval {
            lo: floor_div(&scaled, &den),
            hi: ceil_div(&scaled, &den),
            prec,
        })
    }

    /// `2^k`, exact whenever `k >= -prec`.
    pub fn pow2(k: i64, prec: u32) -> Self {
        let e = k + i64::from(prec);
        if e >= 0 {
            Self::from_mantissas(BigInt::one() << e as u64, BigInt::one() << e as u64, prec)
        } else {
            Self::from_mantissas(BigInt::zero(), BigInt::one(), prec)
        }
    }

    pub fn prec(&self) -> u32 {
        self.prec
    }

    pub fn lo_mantissa(&self) -> &BigInt {
        &self.lo
    }

    pub fn hi_mantissa(&self) -> &BigInt {
        &self.hi
    }

    pub fn is_point(&self) -> bool {
        self.lo == self.hi
    }

    /// Width as a mantissa at this interval's precision.
    pub fn width_mantissa(&self) -> BigInt {
        &self.hi - &self.lo
    }

    /// Re-expresses the interval at another binary precision, rounding outward
    /// when precision is dropped.
    pub fn with_prec(&self, prec: u32) -> Self {
        match prec.cmp(&self.prec) {
            Ordering::Equal => self.clone(),
            Ordering::Greater => {
                let k = prec - self.prec;
                Interval {
                    lo: &self.lo << k,
                    hi: &self.hi << k,
                    prec,
                }
            }
            Ordering::Less => {
                let k = self.prec - prec;
                Interval {
                    lo: floor_shr(&self.lo, k),
                    hi: ceil_shr(&self.hi, k),
                    prec,
                }
            }
        }
    }

    fn aligned(&self, other: &Interval) -> (Interval, Interval) {
        let p = self.prec.max(other.prec);
        (self.with_prec(p), other.with_prec(p))
    }

    pub fn lower(&self) -> Interval {
        Interval {
            lo: self.lo.clone(),
            hi: self.lo.clone(),
            prec: self.prec,
        }
    }

    pub fn upper(&self) -> Interval {
        Interval {
            lo: self.hi.clone(),
            hi: self.hi.clone(),
            prec: self.prec,
        }
    }

    pub fn add(&self, other: &Interval) -> Interval {
        let (a, b) = self.aligned(other);
        Interval {
            lo: a.lo + b.lo,
            hi: a.hi + b.hi,
            prec: a.prec,
        }
    }

    pub fn sub(&self, other: &Interval) -> Interval {
        let (a, b) = self.aligned(other);
        Interval {
            lo: a.lo - b.hi,
            hi: a.hi - b.lo,
            prec: a.prec,
        }
    }

    pub fn neg(&self) -> Interval {
        Interval {
            lo: -&self.hi,
            hi: -&self.lo,
            prec: self.prec,
        }
    }

    pub fn abs(&self) -> Interval {
        if !self.lo.is_negative() {
            self.clone()
        } else if !self.hi.is_positive() {
            self.neg()
        } else {
            Interval {
                lo: BigInt::zero(),
                hi: self.hi.clone().max(-&self.lo),
                prec: self.prec,
            }
        }
    }

    pub fn mul(&self, other: &Interval) -> Interval {
        let (a, b) = self.aligned(other);
        let p = a.prec;
        if !a.lo.is_negative() && !b.lo.is_negative() {
            return Interval {
                lo: floor_shr(&(&a.lo * &b.lo), p),
                hi: ceil_shr(&(&a.hi * &b.hi), p),
                prec: p,
            };
        }
        let products = [&a.lo * &b.lo, &a.lo * &b.hi, &a.hi * &b.lo, &a.hi * &b.hi];
        let min = products.iter().min().expect("four products");
        let max = products.iter().max().expect("four products");
        Interval {
            lo: floor_shr(min, p),
            hi: ceil_shr(max, p),
            prec: p,
        }
    }

    pub fn mul_int(&self, k: &BigInt) -> Interval {
        let (lo, hi) = (&self.lo * k, &self.hi * k);
        if k.is_negative() {
            Interval {
                lo: hi,
                hi: lo,
                prec: self.prec,
            }
        } else {
            Interval {
                lo,
                hi,
                prec: self.prec,
            }
        }
    }

    /// Multiplies by `2^k` (exact for `k >= 0`).
    pub fn mul_pow2(&self, k: i64) -> Interval {
        if k >= 0 {
            Interval {
                lo: &self.lo << k as u64,
                hi: &self.hi << k as u64,
                prec: self.prec,
            }
        } else {
            let s = (-k) as u32;
            Interval {
                lo: floor_shr(&self.lo, s),
                hi: ceil_shr(&self.hi, s),
                prec: self.prec,
            }
        }
    }

    pub fn div(&self, other: &Interval) -> Result<Interval, DomainFault> {
        if other.lo.is_zero() && other.hi.is_zero() {
            return Err(DomainFault::Undefined);
        }
        if !other.lo.is_positive() && !other.hi.is_negative() {
            return Err(DomainFault::Straddles);
        }
        let (a, b) = self.aligned(other);
        let p = a.prec;
        let alo = &a.lo << p;
        let ahi = &a.hi << p;
        if !a.lo.is_negative() && b.lo.is_positive() {
            return Ok(Interval {
                lo: floor_div(&alo, &b.hi),
                hi: ceil_div(&ahi, &b.lo),
                prec: p,
            });
        }
        let pairs = [(&alo, &b.lo), (&alo, &b.hi), (&ahi, &b.lo), (&ahi, &b.hi)];
        let lo = pairs
            .iter()
            .map(|(n, d)| floor_div(n, d))
            .min()
            .expect("four quotients");
        let hi = pairs
            .iter()
            .map(|(n, d)| ceil_div(n, d))
            .max()
            .expect("four quotients");
        Ok(Interval { lo, hi, prec: p })
    }

    pub fn div_int(&self, k: &BigInt) -> Result<Interval, DomainFault> {
        if k.is_zero() {
            return Err(DomainFault::Undefined);
        }
        let (lo, hi) = if k.is_negative() {
            (-&self.hi, -&self.lo)
        } else {
            (self.lo.clone(), self.hi.clone())
        };
        let k = k.abs();
        Ok(Interval {
            lo: floor_div(&lo, &k),
            hi: ceil_div(&hi, &k),
            prec: self.prec,
        })
    }

    pub fn recip(&self) -> Result<Interval, DomainFault> {
        Interval::from_i64(1, self.prec).div(self)
    }

    pub fn sqrt(&self) -> Result<Interval, DomainFault> {
        if self.hi.is_negative() {
            return Err(DomainFault::Undefined);
        }
        if self.lo.is_negative() {
            return Err(DomainFault::Straddles);
        }
        let p = self.prec;
        Ok(Interval {
            lo: (&self.lo << p).sqrt(),
            hi: ceil_sqrt(&(&self.hi << p)),
            prec: p,
        })
    }

    /// Integer power; negative exponents require an interval that excludes zero.
    pub fn powi(&self, k: i64) -> Result<Interval, DomainFault> {
        if k < 0 {
            return self.powi(-k)?.recip();
        }
        let mut result = Interval::from_i64(1, self.prec);
        let mut base = self.clone();
        let mut e = k as u64;
        while e > 0 {
            if e & 1 == 1 {
                result = result.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        if k % 2 == 0 && k > 0 && result.lo.is_negative() {
            result.lo = BigInt::zero();
        }
        Ok(result)
    }

    /// Natural logarithm; the input must be certainly positive.
    pub fn ln(&self) -> Result<Interval, DomainFault> {
        if !self.hi.is_positive() {
            return Err(DomainFault::Undefined);
        }
        if !self.lo.is_positive() {
            return Err(DomainFault::Straddles);
        }
        let p = self.prec;
        let (lo, lo_upper) = ln_dyadic(&self.lo, p, p);
        if self.is_point() {
            return Ok(Interval {
                lo,
                hi: lo_upper,
                prec: p,
            });
        }
        // ln(hi) - ln(lo) <= (hi - lo) / lo; use it while the ratio is small.
        let width = &self.hi - &self.lo;
        let hi = if (&width << 16u32) <= self.lo {
            lo_upper + ceil_div(&(width << p), &self.lo)
        } else {
            ln_dyadic(&self.hi, p, p).1
        };
        Ok(Interval { lo, hi, prec: p })
    }

    /// Encloses `ln 2` at the given precision (memoized per precision).
    pub fn ln2(prec: u32) -> Interval {
        let (lo, hi) = ln2_mantissas(prec + GUARD);
        Interval {
            lo: floor_shr(&lo, GUARD),
            hi: ceil_shr(&hi, GUARD),
            prec,
        }
    }

    pub fn is_positive(&self) -> bool {
        self.lo.is_positive()
    }

    pub fn is_negative(&self) -> bool {
        self.hi.is_negative()
    }

    pub fn contains_zero(&self) -> bool {
        !self.lo.is_positive() && !self.hi.is_negative()
    }

    /// Certified ordering: `Some` only when the two intervals are disjoint
    /// (or both are the same point).
    pub fn certain_cmp(&self, other: &Interval) -> Option<Ordering> {
        let (a, b) = self.aligned(other);
        if a.hi < b.lo {
            Some(Ordering::Less)
        } else if a.lo > b.hi {
            Some(Ordering::Greater)
        } else if a.is_point() && b.is_point() && a.lo == b.lo {
            Some(Ordering::Equal)
        } else {
            None
        }
    }

    /// Whether `other` lies entirely within `self`.
    pub fn contains(&self, other: &Interval) -> bool {
        let (a, b) = self.aligned(other);
        a.lo <= b.lo && b.hi <= a.hi
    }

    pub fn intersect(&self, other: &Interval) -> Option<Interval> {
        let (a, b) = self.aligned(other);
        let lo = a.lo.max(b.lo);
        let hi = a.hi.min(b.hi);
        (lo <= hi).then_some(Interval {
            lo,
            hi,
            prec: a.prec,
        })
    }

    /// Exact comparison of the upper endpoint against a rational `num/den`
    /// (`den > 0`): is `hi <= num/den`?
    pub fn hi_le_ratio(&self, num: &BigInt, den: &BigInt) -> bool {
        &self.hi * den <= num << self.prec
    }

    /// Exact comparison of the lower endpoint: is `lo > num/den`?
    pub fn lo_gt_ratio(&self, num: &BigInt, den: &BigInt) -> bool {
        &self.lo * den > num << self.prec
    }

    pub fn floor_lo(&self) -> BigInt {
        floor_shr(&self.lo, self.prec)
    }

    pub fn ceil_hi(&self) -> BigInt {
        ceil_shr(&self.hi, self.prec)
    }

    /// The common floor of every enclosed value, when there is one.
    pub fn certified_floor(&self) -> Option<BigInt> {
        let a = floor_shr(&self.lo, self.prec);
        let b = floor_shr(&self.hi, self.prec);
        (a == b).then_some(a)
    }

    /// Enclosure of the pointwise maximum.
    pub fn max_upper(&self, other: &Interval) -> Interval {
        let (a, b) = self.aligned(other);
        let lo = a.lo.max(b.lo);
        let hi = a.hi.max(b.hi);
        Interval {
            lo,
            hi,
            prec: a.prec,
        }
    }

    pub fn to_f64(&self) -> f64 {
        let mid: BigInt = (&self.lo + &self.hi) >> 1u32;
        dyadic_to_f64(&mid, self.prec)
    }

    pub fn lo_f64(&self) -> f64 {
        dyadic_to_f64(&self.lo, self.prec)
    }

    pub fn hi_f64(&self) -> f64 {
        dyadic_to_f64(&self.hi, self.prec)
    }

    /// Decimal rendering of the lower endpoint rounded down to `digits`
    /// significant digits.
    pub fn lower_decimal(&self, digits: usize) -> String {
        format_dyadic(&self.lo, self.prec, digits, Rounding::Down)
    }

    /// Decimal rendering of the upper endpoint rounded up to `digits`
    /// significant digits.
    pub fn upper_decimal(&self, digits: usize) -> String {
        format_dyadic(&self.hi, self.prec, digits, Rounding::Up)
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "[{}, {}]",
            self.lower_decimal(12),
            self.upper_decimal(12)
        )
    }
}

pub(crate) fn dyadic_to_f64(m: &BigInt, prec: u32) -> f64 {
    let bits = m.bits();
    if bits <= 1000 {
        return m.to_f64().unwrap_or(f64::NAN) * 2f64.powi(-(prec as i32));
    }
    let drop = (bits - 60) as u32;
    let top = (m >> drop).to_f64().unwrap_or(f64::NAN);
    top * 2f64.powf(f64::from(drop) - f64::from(prec))
}

fn ln2_cache() -> &'static Mutex<HashMap<u32, (BigInt, BigInt)>> {
    static CACHE: OnceLock<Mutex<HashMap<u32, (BigInt, BigInt)>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// Mantissas of an enclosure of `ln 2 = 2 atanh(1/3)` at precision `prec`.
fn ln2_mantissas(prec: u32) -> (BigInt, BigInt) {
    if let Some(hit) = ln2_cache().lock().expect("ln2 cache").get(&prec) {
        return hit.clone();
    }
    let one = BigInt::one() << prec;
    let three = BigInt::from(3);
    let nine = BigInt::from(9);
    let mut t_lo = floor_div(&one, &three);
    let mut t_hi = ceil_div(&one, &three);
    let mut s_lo = BigInt::zero();
    let mut s_hi = BigInt::zero();
    let mut k = 0u64;
    loop {
        let d = BigInt::from(2 * k + 1);
        s_lo += floor_div(&t_lo, &d);
        s_hi += ceil_div(&t_hi, &d);
        k += 1;
        t_lo = floor_div(&t_lo, &nine);
        t_hi = ceil_div(&t_hi, &nine);
        if t_hi <= BigInt::one() {
            break;
        }
    }
    // Remaining terms sum to less than 2 * t_hi.
    s_hi += &t_hi * 2;
    let out = (s_lo * 2, s_hi * 2);
    ln2_cache()
        .lock()
        .expect("ln2 cache")
        .insert(prec, out.clone());
    out
}

/// Encloses `ln(x * 2^-xprec)` for a positive mantissa `x`, returning
/// mantissas at precision `prec`.
fn ln_dyadic(x: &BigInt, xprec: u32, prec: u32) -> (BigInt, BigInt) {
    debug_assert!(x.is_positive());
    let wp = prec + GUARD + 8;
    let bits = x.bits();
    // y = x / 2^shift in [1/sqrt 2, sqrt 2]
    let mut shift = bits - 1;
    if x * x > BigInt::from(2) << (2 * shift) {
        shift += 1;
    }
    let k = shift as i64 - i64::from(xprec);
    let den = BigInt::one() << shift;
    let z_num = x - &den;
    let z_den = x + &den;
    let negative = z_num.is_negative();
    let z_num = z_num.abs();

    let scaled = &z_num << wp;
    let z_lo = floor_div(&scaled, &z_den);
    let z_hi = ceil_div(&scaled, &z_den);
    let z2_lo = floor_shr(&(&z_lo * &z_lo), wp);
    let z2_hi = ceil_shr(&(&z_hi * &z_hi), wp);

    let mut t_lo = z_lo;
    let mut t_hi = z_hi;
    let mut s_lo = BigInt::zero();
    let mut s_hi = BigInt::zero();
    let mut i = 0u64;
    while t_hi > BigInt::one() {
        let d = BigInt::from(2 * i + 1);
        s_lo += floor_div(&t_lo, &d);
        s_hi += ceil_div(&t_hi, &d);
        t_lo = floor_shr(&(&t_lo * &z2_lo), wp);
        t_hi = ceil_shr(&(&t_hi * &z2_hi), wp);
        i += 1;
    }
    // |z| <= 0.172 so the tail is below 2 * t_hi.
    s_hi += &t_hi * 2;

    let (mut lo, mut hi) = if negative {
        (-(s_hi << 1u32), -(s_lo << 1u32))
    } else {
        (s_lo * 2, s_hi * 2)
    };
    if k != 0 {
        let (l2_lo, l2_hi) = ln2_mantissas(wp);
        let kb = BigInt::from(k);
        if k > 0 {
            lo += &l2_lo * &kb;
            hi += &l2_hi * &kb;
        } else {
            lo += &l2_hi * &kb;
            hi += &l2_lo * &kb;
        }
    }
    let drop = wp - prec;
    (floor_shr(&lo, drop), ceil_shr(&hi, drop))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn approx(iv: &Interval, x: f64, tol: f64) {
        assert!(
            iv.lo_f64() - tol <= x && x <= iv.hi_f64() + tol,
            "{iv} does not contain {x}"
        );
    }

    #[test]
    fn shifts_round_outward_on_negatives() {
        let m = BigInt::from(-5);
        assert_eq!(floor_shr(&m, 1), BigInt::from(-3));
        assert_eq!(ceil_shr(&m, 1), BigInt::from(-2));
        assert_eq!(floor_div(&m, &BigInt::from(2)), BigInt::from(-3));
        assert_eq!(ceil_div(&m, &BigInt::from(2)), BigInt::from(-2));
    }

    #[test]
    fn ln2_matches_known_digits() {
        let l = Interval::ln2(128);
        approx(&l, std::f64::consts::LN_2, 1e-15);
        assert!(l.width_mantissa() <= BigInt::from(2));
        assert!(l.lower_decimal(20).starts_with("6.931471805599453094"));
    }

    #[test]
    fn ln_of_points_and_intervals() {
        for &x in &[0.001f64, 0.5, 0.7, 1.0, 1.3, 2.0, 3.0, 10.0, 12345.678] {
            let iv = Interval::from_ratio(
                &BigInt::from((x * 1e6).round() as i64),
                &BigInt::from(1_000_000),
                96,
            )
            .unwrap();
            let l = iv.ln().unwrap();
            approx(&l, x.ln(), 1e-12);
            assert!(l.width_mantissa() < BigInt::from(1u64 << 40));
        }
        let one = Interval::from_i64(1, 64);
        let l = one.ln().unwrap();
        assert!(l.contains_zero());
        assert!(l.width_mantissa() <= BigInt::from(4));
    }

    #[test]
    fn ln_rejects_non_positive() {
        assert_eq!(Interval::from_i64(-1, 32).ln(), Err(DomainFault::Undefined));
        let straddle = Interval::from_mantissas(BigInt::from(-1), BigInt::from(1), 32);
        assert_eq!(straddle.ln(), Err(DomainFault::Straddles));
    }

    #[test]
    fn sqrt_and_division() {
        let two = Interval::from_i64(2, 100);
        let r = two.sqrt().unwrap();
        approx(&r, std::f64::consts::SQRT_2, 1e-15);
        let sq = r.mul(&r);
        assert!(sq.contains(&two));
        let q = Interval::from_i64(1, 100)
            .div(&Interval::from_i64(3, 100))
            .unwrap();
        assert!(q
            .mul_int(&BigInt::from(3))
            .contains(&Interval::from_i64(1, 100)));
        assert_eq!(
            Interval::from_i64(1, 10).div(&Interval::from_i64(0, 10)),
            Err(DomainFault::Undefined)
        );
    }

    #[test]
    fn mixed_sign_products_enclose() {
        let a = Interval::from_mantissas(BigInt::from(-3), BigInt::from(2), 0);
        let b = Interval::from_mantissas(BigInt::from(-5), BigInt::from(7), 0);
        let p = a.mul(&b);
        assert_eq!(p.lo_mantissa(), &BigInt::from(-21));
        assert_eq!(p.hi_mantissa(), &BigInt::from(15));
    }

    #[test]
    fn powers() {
        let a = Interval::from_ratio(&BigInt::from(3), &BigInt::from(2), 80).unwrap();
        approx(&a.powi(10).unwrap(), 1.5f64.powi(10), 1e-9);
        approx(&a.powi(-3).unwrap(), 1.5f64.powi(-3), 1e-12);
        assert_eq!(Interval::pow2(-3, 10).lo_f64(), 0.125);
    }
}
