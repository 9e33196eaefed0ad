//! Decimal parsing and scientific formatting for big numbers.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Pow, Signed, Zero};

use crate::error::{Error, Result};
use crate::real::Dyadic;

/// Parse `123`, `-0.25`, `2.1e178`, `1.3E867` into an exact rational.
pub fn parse_decimal(s: &str) -> Result<BigRational> {
    let bad = || Error::Config(format!("not a decimal number: {s:?}"));
    let t = s.trim();
    let (mant, exp) = match t.find(['e', 'E']) {
        Some(i) => (&t[..i], t[i + 1..].parse::<i64>().map_err(|_| bad())?),
        None => (t, 0),
    };
    let (neg, mant) = match mant.strip_prefix('-') {
        Some(r) => (true, r),
        None => (false, mant.strip_prefix('+').unwrap_or(mant)),
    };
    let (ip, fp) = match mant.split_once('.') {
        Some((a, b)) => (a, b),
        None => (mant, ""),
    };
    if ip.is_empty() && fp.is_empty() {
        return Err(bad());
    }
    if !ip.chars().chain(fp.chars()).all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let digits = format!("{ip}{fp}");
    let mut num: BigInt = digits.parse().map_err(|_| bad())?;
    if neg {
        num = -num;
    }
    let e10 = exp - fp.len() as i64;
    if e10.unsigned_abs() > 100_000 {
        return Err(bad());
    }
    let p = BigInt::from(10).pow(e10.unsigned_abs() as u32);
    Ok(if e10 >= 0 {
        BigRational::from_integer(num * p)
    } else {
        BigRational::new(num, p)
    })
}

/// Parse a decimal that must denote an integer, e.g. `2.1e178`.
pub fn parse_integer(s: &str) -> Result<BigInt> {
    let r = parse_decimal(s)?;
    if !r.is_integer() {
        return Err(Error::Config(format!("expected an integer, got {s:?}")));
    }
    Ok(r.to_integer())
}

fn pow10(e: u64) -> BigInt {
    BigInt::from(10).pow(e as u32)
}

/// `round(|r| * 10^s)` as an integer, halves rounded up.
fn scaled_round(r: &BigRational, s: i64) -> BigInt {
    let r = r.abs();
    let (n, d) = if s >= 0 {
        (r.numer() * pow10(s as u64), r.denom().clone())
    } else {
        (r.numer().clone(), r.denom() * pow10(s.unsigned_abs()))
    };
    ((n << 1u32) + &d).div_floor(&(d << 1u32))
}

/// Scientific notation with `sig` significant digits, e.g. `1.810e59`.
pub fn sci_rational(r: &BigRational, sig: usize) -> String {
    if r.is_zero() {
        return "0".to_string();
    }
    let sig = sig.max(1);
    let approx_log2 = r.numer().bits() as f64 - r.denom().bits() as f64;
    let mut e10 = (approx_log2 * std::f64::consts::LOG10_2).floor() as i64;
    let lo = pow10(sig as u64 - 1);
    let hi = pow10(sig as u64);
    let digits = loop {
        let n = scaled_round(r, sig as i64 - 1 - e10);
        if n >= hi {
            e10 += 1;
        } else if n < lo {
            e10 -= 1;
        } else {
            break n;
        }
    };
    let ds = digits.to_string();
    let sign = if r.is_negative() { "-" } else { "" };
    if sig == 1 {
        format!("{sign}{ds}e{e10}")
    } else {
        format!("{sign}{}.{}e{e10}", &ds[..1], &ds[1..])
    }
}

pub fn sci_dyadic(d: &Dyadic, sig: usize) -> String {
    sci_rational(&d.to_rational(), sig)
}

pub fn sci_int(n: &BigInt, sig: usize) -> String {
    sci_rational(&BigRational::from_integer(n.clone()), sig)
}

/// Fixed-point decimal with `digits` fractional digits, truncated toward
/// the requested side (`up = true` rounds toward +inf).
pub fn fixed_dyadic(d: &Dyadic, digits: usize, up: bool) -> String {
    let r = d.to_rational() * BigRational::from_integer(pow10(digits as u64));
    let n = if up { r.ceil() } else { r.floor() }.to_integer();
    let neg = n.is_negative();
    let mut s = n.abs().to_string();
    if digits > 0 {
        if s.len() <= digits {
            s = format!("{}{s}", "0".repeat(digits + 1 - s.len()));
        }
        s.insert(s.len() - digits, '.');
    }
    if neg {
        s.insert(0, '-');
    }
    s
}

/// `10^e` as an exact rational (negative exponents allowed).
pub fn pow10_rational(e: i64) -> BigRational {
    let p = pow10(e.unsigned_abs());
    if e >= 0 {
        BigRational::from_integer(p)
    } else {
        BigRational::new(BigInt::one(), p)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_scientific_integers() {
        let c = parse_integer("2.1e178").unwrap();
        assert_eq!(c, BigInt::from(21) * pow10(177));
        assert_eq!(parse_integer("1.3E867").unwrap(), BigInt::from(13) * pow10(866));
        assert_eq!(parse_integer("-42").unwrap(), BigInt::from(-42));
        assert!(parse_integer("0.5").is_err());
        assert!(parse_integer("1.2.3").is_err());
        assert!(parse_decimal("e5").is_err());
    }

    #[test]
    fn sci_format_rounds_and_normalizes() {
        let r = parse_decimal("1.8149e59").unwrap();
        assert_eq!(sci_rational(&r, 3), "1.81e59");
        let r = parse_decimal("9.996").unwrap();
        assert_eq!(sci_rational(&r, 3), "1.00e1");
        let r = parse_decimal("-0.00012345").unwrap();
        assert_eq!(sci_rational(&r, 2), "-1.2e-4");
        assert_eq!(sci_int(&BigInt::from(7), 1), "7e0");
    }

    #[test]
    fn fixed_format_directed() {
        let d = Dyadic::from_f64(-1.5).unwrap();
        assert_eq!(fixed_dyadic(&d, 2, false), "-1.50");
        let d = Dyadic::from_f64(0.125).unwrap();
        assert_eq!(fixed_dyadic(&d, 2, false), "0.12");
        assert_eq!(fixed_dyadic(&d, 2, true), "0.13");
    }
}
