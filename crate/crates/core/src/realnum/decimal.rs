//! Decimal rendering and parsing for dyadic and rational values.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Pow, Signed, Zero};

use super::interval::{ceil_div, floor_div};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Rounding {
    /// Toward negative infinity.
    Down,
    /// Toward positive infinity.
    Up,
}

fn pow10(e: u32) -> BigInt {
    BigInt::from(10u32).pow(e)
}

/// Renders `m * 2^-prec` in scientific notation with `digits` significant
/// digits, rounded in the requested direction, e.g. `8.22e12`.
pub fn format_dyadic(m: &BigInt, prec: u32, digits: usize, rounding: Rounding) -> String {
    format_ratio(m, &(BigInt::one() << prec), digits, rounding)
}

/// Renders `num / den` (`den > 0`) in scientific notation.
pub fn format_ratio(num: &BigInt, den: &BigInt, digits: usize, rounding: Rounding) -> String {
    assert!(digits >= 1 && den.is_positive());
    if num.is_zero() {
        return "0".to_string();
    }
    let negative = num.is_negative();
    let mag = num.abs();
    // Rounding direction on the magnitude.
    let up = matches!(
        (rounding, negative),
        (Rounding::Up, false) | (Rounding::Down, true)
    );

    // Initial guess for the decimal exponent from bit lengths.
    let approx = (mag.bits() as f64 - den.bits() as f64) * std::f64::consts::LOG10_2;
    let mut e10 = approx.floor() as i64;
    let lo_bound = pow10(digits as u32 - 1);
    let hi_bound = pow10(digits as u32);
    let mantissa = loop {
        let t = digits as i64 - 1 - e10;
        let (n, d) = if t >= 0 {
            (&mag * pow10(t as u32), den.clone())
        } else {
            (mag.clone(), den * pow10((-t) as u32))
        };
        let m = if up {
            ceil_div(&n, &d)
        } else {
            floor_div(&n, &d)
        };
        if m >= hi_bound {
            // A ceiling that lands exactly on 10^digits renormalises to 10^(digits-1).
            if up && m == hi_bound {
                e10 += 1;
                break lo_bound.clone();
            }
            e10 += 1;
        } else if m < lo_bound {
            e10 -= 1;
        } else {
            break m;
        }
    };
    let s = mantissa.to_string();
    let (head, tail) = s.split_at(1);
    let tail = tail.trim_end_matches('0');
    let sign = if negative { "-" } else { "" };
    if tail.is_empty() {
        format!("{sign}{head}e{e10}")
    } else {
        format!("{sign}{head}.{tail}e{e10}")
    }
}

/// Parses decimal text such as `43.72`, `-1.25`, `7.9e59` or `1E-3` into an
/// exact reduced fraction `(num, den)` with `den > 0`.
pub fn parse_decimal(text: &str) -> Option<(BigInt, BigInt)> {
    let text = text.trim();
    let (mantissa, exponent) = match text.find(['e', 'E']) {
        Some(i) => (&text[..i], text[i + 1..].parse::<i64>().ok()?),
        None => (text, 0),
    };
    let (negative, mantissa) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = match mantissa.split_once('.') {
        Some((i, f)) => (i, f),
        None => (mantissa, ""),
    };
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part
        .chars()
        .chain(frac_part.chars())
        .all(|c| c.is_ascii_digit())
    {
        return None;
    }
    let digits = format!("{int_part}{frac_part}");
    let mut num: BigInt = digits.parse().ok()?;
    if negative {
        num = -num;
    }
    let scale = exponent - frac_part.len() as i64;
    if exponent.abs() > 100_000 {
        return None;
    }
    let (num, den) = if scale >= 0 {
        (num * pow10(scale as u32), BigInt::one())
    } else {
        (num, pow10((-scale) as u32))
    };
    let g = num.gcd(&den);
    if g.is_zero() {
        return Some((BigInt::zero(), BigInt::one()));
    }
    Some((num / &g, den / g))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn formats_with_directed_rounding() {
        let n = BigInt::from(82129061954665u64);
        let d = BigInt::from(10);
        assert_eq!(format_ratio(&n, &d, 3, Rounding::Up), "8.22e12");
        assert_eq!(format_ratio(&n, &d, 3, Rounding::Down), "8.21e12");
        assert_eq!(format_ratio(&-n, &d, 3, Rounding::Up), "-8.21e12");
        assert_eq!(
            format_ratio(&BigInt::from(1), &BigInt::from(8), 4, Rounding::Down),
            "1.25e-1"
        );
        assert_eq!(
            format_ratio(&BigInt::from(999_999), &BigInt::from(1), 3, Rounding::Up),
            "1e6"
        );
        assert_eq!(
            format_ratio(&BigInt::from(2), &BigInt::from(1), 5, Rounding::Up),
            "2e0"
        );
    }

    #[test]
    fn parses_decimal_text() {
        assert_eq!(
            parse_decimal("43.72"),
            Some((BigInt::from(1093), BigInt::from(25)))
        );
        assert_eq!(
            parse_decimal("-1.25"),
            Some((BigInt::from(-5), BigInt::from(4)))
        );
        let (n, d) = parse_decimal("7.9e59").unwrap();
        assert_eq!(d, BigInt::one());
        assert_eq!(n.to_string().len(), 60);
        assert_eq!(
            parse_decimal("1E-3"),
            Some((BigInt::one(), BigInt::from(1000)))
        );
        assert_eq!(parse_decimal("abc"), None);
        assert_eq!(parse_decimal(""), None);
        assert_eq!(parse_decimal("."), None);
    }
}
