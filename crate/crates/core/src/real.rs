//! Certified real arithmetic.
//!
//! A real number is carried as a closed [`Interval`] whose endpoints are
//! [`Dyadic`] rationals `m * 2^e` with big-integer mantissas. Every
//! operation rounds the lower endpoint toward -inf and the upper endpoint
//! toward +inf, so the exact result always lies inside the returned
//! interval. Predicates that cannot be decided at the current width report
//! [`Error::Precision`] instead of guessing.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::{Mutex, OnceLock};

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Smallest working precision accepted anywhere in the crate.
pub const MIN_PRECISION: u32 = 128;

/// Working mantissa precision. Interval endpoints are always rounded
/// outward, so the rounding direction is not configurable.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct PrecisionContext {
    bits: u32,
}

impl PrecisionContext {
    pub fn new(bits: u32) -> Result<Self> {
        if bits < MIN_PRECISION {
            return Err(Error::domain(format!(
                "precision must be at least {MIN_PRECISION} bits, got {bits}"
            )));
        }
        Ok(PrecisionContext { bits })
    }

    /// `max(256, ceil(log2 C) + 64)`: enough to floor `C * eta` for any
    /// moderately sized `eta`.
    pub fn for_constant(c: &BigInt) -> Self {
        let bits = (c.bits() as u32 + 64).max(256);
        PrecisionContext { bits }
    }

    pub fn bits(&self) -> u32 {
        self.bits
    }

    pub fn doubled(&self) -> Self {
        PrecisionContext { bits: self.bits * 2 }
    }
}

impl Default for PrecisionContext {
    fn default() -> Self {
        PrecisionContext { bits: 256 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Round {
    Down,
    Up,
}

fn floor_shr(x: &BigInt, s: u64) -> BigInt {
    if s == 0 {
        return x.clone();
    }
    if x.sign() != Sign::Minus {
        x >> s
    } else {
        let t: BigInt = (-x - 1u32) >> s;
        -t - 1u32
    }
}

fn ceil_shr(x: &BigInt, s: u64) -> BigInt {
    -floor_shr(&-x, s)
}

fn div_dir(a: &BigInt, b: &BigInt, dir: Round) -> BigInt {
    match dir {
        Round::Down => a.div_floor(b),
        Round::Up => -((-a).div_floor(b)),
    }
}

/// Exact dyadic rational `man * 2^exp`, kept with an odd mantissa.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Dyadic {
    man: BigInt,
    exp: i64,
}

impl Dyadic {
    pub fn zero() -> Self {
        Dyadic { man: BigInt::zero(), exp: 0 }
    }

    pub fn one() -> Self {
        Dyadic { man: BigInt::one(), exp: 0 }
    }

    pub fn new(man: BigInt, exp: i64) -> Self {
        if man.is_zero() {
            return Self::zero();
        }
        let tz = man.trailing_zeros().unwrap_or(0);
        if tz > 0 {
            Dyadic { man: man >> tz, exp: exp + tz as i64 }
        } else {
            Dyadic { man, exp }
        }
    }

    pub fn from_int<T: Into<BigInt>>(v: T) -> Self {
        Self::new(v.into(), 0)
    }

    pub fn pow2(e: i64) -> Self {
        Dyadic { man: BigInt::one(), exp: e }
    }

    /// Exact conversion of a finite double.
    pub fn from_f64(x: f64) -> Option<Self> {
        if !x.is_finite() {
            return None;
        }
        if x == 0.0 {
            return Some(Self::zero());
        }
        let bits = x.to_bits();
        let sign = if bits >> 63 == 0 { 1i64 } else { -1i64 };
        let raw_exp = ((bits >> 52) & 0x7ff) as i64;
        let frac = bits & 0x000f_ffff_ffff_ffff;
        let (m, e) = if raw_exp == 0 {
            (frac, -1074)
        } else {
            (frac | (1u64 << 52), raw_exp - 1075)
        };
        Some(Self::new(BigInt::from(m) * sign, e))
    }

    pub fn mantissa(&self) -> &BigInt {
        &self.man
    }

    pub fn exponent(&self) -> i64 {
        self.exp
    }

    pub fn is_zero(&self) -> bool {
        self.man.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.man.is_negative()
    }

    pub fn is_positive(&self) -> bool {
        self.man.is_positive()
    }

    /// Exponent `e` with `|self| < 2^e`; `i64::MIN` for zero.
    pub fn magnitude_exp(&self) -> i64 {
        if self.is_zero() {
            i64::MIN
        } else {
            self.exp + self.man.bits() as i64
        }
    }

    pub fn abs(&self) -> Self {
        Dyadic { man: self.man.abs(), exp: self.exp }
    }

    pub fn mul_pow2(&self, s: i64) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        Dyadic { man: self.man.clone(), exp: self.exp + s }
    }

    pub fn mul(&self, other: &Dyadic) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        Dyadic { man: &self.man * &other.man, exp: self.exp + other.exp }
    }

    pub fn add(&self, other: &Dyadic) -> Self {
        if self.is_zero() {
            return other.clone();
        }
        if other.is_zero() {
            return self.clone();
        }
        let e = self.exp.min(other.exp);
        let a = &self.man << (self.exp - e) as u64;
        let b = &other.man << (other.exp - e) as u64;
        Self::new(a + b, e)
    }

    pub fn sub(&self, other: &Dyadic) -> Self {
        self.add(&-other)
    }

    /// Round to at most `prec` mantissa bits in the given direction.
    pub fn round(&self, prec: u32, dir: Round) -> Self {
        let bits = self.man.bits();
        if bits <= prec as u64 {
            return self.clone();
        }
        let shift = bits - prec as u64;
        let m = match dir {
            Round::Down => floor_shr(&self.man, shift),
            Round::Up => ceil_shr(&self.man, shift),
        };
        Self::new(m, self.exp + shift as i64)
    }

    pub fn floor(&self) -> BigInt {
        if self.exp >= 0 {
            &self.man << self.exp as u64
        } else {
            floor_shr(&self.man, (-self.exp) as u64)
        }
    }

    pub fn ceil(&self) -> BigInt {
        if self.exp >= 0 {
            &self.man << self.exp as u64
        } else {
            ceil_shr(&self.man, (-self.exp) as u64)
        }
    }

    /// Quotient rounded to `prec` bits. `other` must be nonzero.
    pub fn div(&self, other: &Dyadic, prec: u32, dir: Round) -> Self {
        assert!(!other.is_zero(), "division by zero");
        if self.is_zero() {
            return Self::zero();
        }
        let need = prec as i64 + 2 + other.man.bits() as i64 - self.man.bits() as i64;
        let s = need.max(0) as u64;
        let q = div_dir(&(&self.man << s), &other.man, dir);
        Self::new(q, self.exp - other.exp - s as i64).round(prec, dir)
    }

    pub fn div_int(&self, n: &BigInt, prec: u32, dir: Round) -> Self {
        self.div(&Dyadic::from_int(n.clone()), prec, dir)
    }

    /// Square root rounded to `prec` bits. `self` must be nonnegative.
    pub fn sqrt(&self, prec: u32, dir: Round) -> Self {
        assert!(!self.is_negative(), "square root of a negative number");
        if self.is_zero() {
            return Self::zero();
        }
        let want = 2 * (prec as i64 + 2);
        let mut s = (want - self.man.bits() as i64).max(0);
        if (self.exp - s).rem_euclid(2) != 0 {
            s += 1;
        }
        let m = &self.man << s as u64;
        let mut r = m.sqrt();
        if dir == Round::Up && &r * &r != m {
            r += 1u32;
        }
        Self::new(r, (self.exp - s) / 2).round(prec, dir)
    }

    pub fn to_rational(&self) -> BigRational {
        if self.exp >= 0 {
            BigRational::from_integer(&self.man << self.exp as u64)
        } else {
            BigRational::new(self.man.clone(), BigInt::one() << (-self.exp) as u64)
        }
    }

    pub fn from_rational(r: &BigRational, prec: u32, dir: Round) -> Self {
        Dyadic::from_int(r.numer().clone()).div(&Dyadic::from_int(r.denom().clone()), prec, dir)
    }

    /// Nearest-ish double (truncated mantissa). Overflows to infinity.
    pub fn to_f64(&self) -> f64 {
        if self.is_zero() {
            return 0.0;
        }
        let bits = self.man.bits();
        let shift = bits.saturating_sub(64);
        let top = (&self.man >> shift).to_f64().unwrap_or(f64::NAN);
        ldexp(top, self.exp + shift as i64)
    }

    /// Double rounded in the given direction.
    pub fn to_f64_dir(&self, dir: Round) -> f64 {
        let mut f = self.to_f64();
        if f.is_nan() {
            return f;
        }
        match dir {
            Round::Down => {
                while f.is_finite() && Dyadic::from_f64(f).map(|d| d > *self).unwrap_or(false) {
                    f = f.next_down();
                }
            }
            Round::Up => {
                while f.is_finite() && Dyadic::from_f64(f).map(|d| d < *self).unwrap_or(false) {
                    f = f.next_up();
                }
            }
        }
        f
    }

    /// Approximate base-2 logarithm of `|self|`, valid far beyond the f64 range.
    pub fn log2_approx(&self) -> f64 {
        if self.is_zero() {
            return f64::NEG_INFINITY;
        }
        let bits = self.man.bits();
        let shift = bits.saturating_sub(64);
        let top = (&self.man >> shift).abs().to_f64().unwrap_or(f64::NAN);
        top.log2() + (self.exp + shift as i64) as f64
    }
}

fn ldexp(mut x: f64, mut e: i64) -> f64 {
    while e > 1000 {
        x *= 2f64.powi(1000);
        e -= 1000;
        if x.is_infinite() {
            return x;
        }
    }
    while e < -1000 {
        x *= 2f64.powi(-1000);
        e += 1000;
        if x == 0.0 {
            return x;
        }
    }
    x * 2f64.powi(e as i32)
}

impl Neg for &Dyadic {
    type Output = Dyadic;
    fn neg(self) -> Dyadic {
        Dyadic { man: -&self.man, exp: self.exp }
    }
}

impl Neg for Dyadic {
    type Output = Dyadic;
    fn neg(self) -> Dyadic {
        Dyadic { man: -self.man, exp: self.exp }
    }
}

impl Ord for Dyadic {
    fn cmp(&self, other: &Self) -> Ordering {
        let (sa, sb) = (self.man.sign(), other.man.sign());
        if sa != sb {
            return sa.cmp(&sb);
        }
        match self.sub(other).man.sign() {
            Sign::Minus => Ordering::Less,
            Sign::NoSign => Ordering::Equal,
            Sign::Plus => Ordering::Greater,
        }
    }
}

impl PartialOrd for Dyadic {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&crate::numfmt::sci_dyadic(self, 6))
    }
}

/// Closed interval `[lo, hi]` with dyadic endpoints and a working precision.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Interval {
    lo: Dyadic,
    hi: Dyadic,
    prec: u32,
}

impl Interval {
    /// Smallest interval of `prec`-bit endpoints containing `d`.
    pub fn point(d: Dyadic, prec: u32) -> Self {
        let lo = d.round(prec, Round::Down);
        let hi = d.round(prec, Round::Up);
        Interval { lo, hi, prec }
    }

    pub fn from_int<T: Into<BigInt>>(v: T, prec: u32) -> Self {
        Self::point(Dyadic::from_int(v), prec)
    }

    pub fn from_ratio(num: &BigInt, den: &BigInt, prec: u32) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::domain("zero denominator"));
        }
        let n = Dyadic::from_int(num.clone());
        let d = Dyadic::from_int(den.clone());
        Ok(Interval { lo: n.div(&d, prec, Round::Down), hi: n.div(&d, prec, Round::Up), prec })
    }

    pub fn from_rational(r: &BigRational, prec: u32) -> Self {
        Interval {
            lo: Dyadic::from_rational(r, prec, Round::Down),
            hi: Dyadic::from_rational(r, prec, Round::Up),
            prec,
        }
    }

    pub fn from_bounds(lo: Dyadic, hi: Dyadic, prec: u32) -> Result<Self> {
        if lo > hi {
            return Err(Error::domain("interval lower bound exceeds upper bound"));
        }
        Ok(Interval { lo: lo.round(prec, Round::Down), hi: hi.round(prec, Round::Up), prec })
    }

    pub fn lo(&self) -> &Dyadic {
        &self.lo
    }

    pub fn hi(&self) -> &Dyadic {
        &self.hi
    }

    pub fn prec(&self) -> u32 {
        self.prec
    }

    /// Re-round to a new working precision (outward).
    pub fn with_prec(&self, prec: u32) -> Self {
        Interval {
            lo: self.lo.round(prec, Round::Down),
            hi: self.hi.round(prec, Round::Up),
            prec,
        }
    }

    fn mk(lo: Dyadic, hi: Dyadic, prec: u32) -> Self {
        Interval { lo: lo.round(prec, Round::Down), hi: hi.round(prec, Round::Up), prec }
    }

    pub fn width(&self) -> Dyadic {
        self.hi.sub(&self.lo)
    }

    pub fn mid(&self) -> Dyadic {
        self.lo.add(&self.hi).mul_pow2(-1)
    }

    /// Upper bound on `|x|` over the interval.
    pub fn mag(&self) -> Dyadic {
        let a = self.lo.abs();
        let b = self.hi.abs();
        if a > b {
            a
        } else {
            b
        }
    }

    /// Lower bound on `|x|` over the interval (zero if it straddles zero).
    pub fn mig(&self) -> Dyadic {
        if self.contains_zero() {
            Dyadic::zero()
        } else if self.lo.is_positive() {
            self.lo.clone()
        } else {
            self.hi.abs()
        }
    }

    pub fn contains_zero(&self) -> bool {
        !self.lo.is_positive() && !self.hi.is_negative()
    }

    pub fn is_positive(&self) -> bool {
        self.lo.is_positive()
    }

    pub fn is_negative(&self) -> bool {
        self.hi.is_negative()
    }

    pub fn contains(&self, x: &Dyadic) -> bool {
        self.lo <= *x && *x <= self.hi
    }

    /// True iff `self` lies inside `outer`.
    pub fn is_subset_of(&self, outer: &Interval) -> bool {
        outer.lo <= self.lo && self.hi <= outer.hi
    }

    /// `Some(true)` when every point of `self` is below every point of
    /// `other`, `Some(false)` when certainly not, `None` when undecided.
    pub fn certainly_lt(&self, other: &Interval) -> Option<bool> {
        if self.hi < other.lo {
            Some(true)
        } else if self.lo >= other.hi {
            Some(false)
        } else {
            None
        }
    }

    pub fn abs(&self) -> Self {
        if self.lo.is_negative() && self.hi.is_positive() {
            Interval { lo: Dyadic::zero(), hi: self.mag(), prec: self.prec }
        } else if self.hi.is_negative() || self.hi.is_zero() {
            -self
        } else {
            self.clone()
        }
    }

    fn p(&self, other: &Interval) -> u32 {
        self.prec.max(other.prec)
    }

    pub fn mul_int(&self, n: &BigInt) -> Self {
        let d = Dyadic::from_int(n.clone());
        let a = self.lo.mul(&d);
        let b = self.hi.mul(&d);
        if n.is_negative() {
            Self::mk(b, a, self.prec)
        } else {
            Self::mk(a, b, self.prec)
        }
    }

    pub fn mul_pow2(&self, s: i64) -> Self {
        Interval { lo: self.lo.mul_pow2(s), hi: self.hi.mul_pow2(s), prec: self.prec }
    }

    /// Division by a positive machine integer.
    pub fn div_u64(&self, n: u64) -> Self {
        let d = Dyadic::from_int(n);
        Interval {
            lo: self.lo.div(&d, self.prec, Round::Down),
            hi: self.hi.div(&d, self.prec, Round::Up),
            prec: self.prec,
        }
    }

    pub fn sqr(&self) -> Self {
        let a = self.abs();
        Self::mk(a.lo.mul(&a.lo), a.hi.mul(&a.hi), self.prec)
    }

    pub fn pow(&self, mut n: u64) -> Self {
        let mut result = Interval::from_int(1, self.prec);
        let mut base = self.clone();
        if n == 0 {
            return result;
        }
        // Odd powers preserve sign, so square-and-multiply on intervals is exact
        // up to rounding except for dependency widening, which is harmless here.
        loop {
            if n & 1 == 1 {
                result = &result * &base;
            }
            n >>= 1;
            if n == 0 {
                break;
            }
            base = base.sqr();
        }
        result
    }

    /// Integer power, negative exponents via the reciprocal.
    pub fn powi(&self, n: i64) -> Result<Self> {
        if n >= 0 {
            Ok(self.pow(n as u64))
        } else {
            self.pow(n.unsigned_abs()).recip()
        }
    }

    pub fn recip(&self) -> Result<Self> {
        Interval::from_int(1, self.prec).div(self)
    }

    pub fn div(&self, other: &Interval) -> Result<Self> {
        if other.contains_zero() {
            return Err(Error::precision("divisor interval contains zero"));
        }
        let p = self.p(other);
        if !self.lo.is_negative() && other.lo.is_positive() {
            return Ok(Interval {
                lo: self.lo.div(&other.hi, p, Round::Down),
                hi: self.hi.div(&other.lo, p, Round::Up),
                prec: p,
            });
        }
        let cands = [
            (&self.lo, &other.lo),
            (&self.lo, &other.hi),
            (&self.hi, &other.lo),
            (&self.hi, &other.hi),
        ];
        let lo = cands.iter().map(|(a, b)| a.div(b, p, Round::Down)).min().unwrap();
        let hi = cands.iter().map(|(a, b)| a.div(b, p, Round::Up)).max().unwrap();
        Ok(Interval { lo, hi, prec: p })
    }

    pub fn sqrt(&self) -> Result<Self> {
        if self.hi.is_negative() {
            return Err(Error::domain("square root of a negative interval"));
        }
        if self.lo.is_negative() {
            return Err(Error::precision("square root argument straddles zero"));
        }
        Ok(Interval {
            lo: self.lo.sqrt(self.prec, Round::Down),
            hi: self.hi.sqrt(self.prec, Round::Up),
            prec: self.prec,
        })
    }

    /// `floor(x)` when it is the same integer across the whole interval.
    pub fn floor(&self) -> Result<BigInt> {
        let a = self.lo.floor();
        let b = self.hi.floor();
        if a == b {
            Ok(a)
        } else {
            Err(Error::precision("interval straddles an integer; floor is undetermined"))
        }
    }

    pub fn hull(&self, other: &Interval) -> Self {
        Interval {
            lo: if self.lo < other.lo { self.lo.clone() } else { other.lo.clone() },
            hi: if self.hi > other.hi { self.hi.clone() } else { other.hi.clone() },
            prec: self.p(other),
        }
    }

    /// Natural logarithm. The interval must be strictly positive.
    pub fn ln(&self) -> Result<Self> {
        if !self.hi.is_positive() {
            return Err(Error::domain("logarithm of a nonpositive number"));
        }
        if !self.lo.is_positive() {
            return Err(Error::precision("logarithm argument straddles zero"));
        }
        if self.lo == self.hi {
            return Ok(ln_dyadic(&self.lo, self.prec));
        }
        let a = ln_dyadic(&self.lo, self.prec);
        let b = ln_dyadic(&self.hi, self.prec);
        Ok(Interval { lo: a.lo, hi: b.hi, prec: self.prec })
    }

    /// `log(num / den)` for positive integers, accurate when the ratio is
    /// close to a power of two (series argument shrinks with the distance).
    pub fn ln_ratio(num: &BigInt, den: &BigInt, prec: u32) -> Result<Self> {
        if !num.is_positive() || !den.is_positive() {
            return Err(Error::domain("logarithm of a nonpositive ratio"));
        }
        let wp = prec + 40;
        // Find e with num / (den * 2^e) in [1/sqrt 2, sqrt 2).
        let mut e = num.bits() as i64 - den.bits() as i64;
        let (mut a, mut b);
        loop {
            a = if e < 0 { num << (-e) as u64 } else { num.clone() };
            b = if e > 0 { den << e as u64 } else { den.clone() };
            // a/b < 1/sqrt2  <=>  2a^2 < b^2
            let a2 = &a * &a;
            let b2 = &b * &b;
            if (&a2 << 1u32) < b2 {
                e -= 1;
            } else if a2 >= (&b2 << 1u32) {
                e += 1;
            } else {
                break;
            }
        }
        let at = atanh_ratio(&(&a - &b), &(&a + &b), wp)?;
        let mut sum = at.mul_pow2(1);
        if e != 0 {
            sum = &sum + &ln2(wp).mul_int(&BigInt::from(e));
        }
        Ok(sum.with_prec(prec))
    }

    pub fn to_f64(&self) -> f64 {
        self.mid().to_f64()
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.lo, self.hi)
    }
}

impl Add for &Interval {
    type Output = Interval;
    fn add(self, other: &Interval) -> Interval {
        Interval::mk(self.lo.add(&other.lo), self.hi.add(&other.hi), self.p(other))
    }
}

impl Sub for &Interval {
    type Output = Interval;
    fn sub(self, other: &Interval) -> Interval {
        Interval::mk(self.lo.sub(&other.hi), self.hi.sub(&other.lo), self.p(other))
    }
}

impl Neg for &Interval {
    type Output = Interval;
    fn neg(self) -> Interval {
        Interval { lo: -&self.hi, hi: -&self.lo, prec: self.prec }
    }
}

impl Mul for &Interval {
    type Output = Interval;
    fn mul(self, other: &Interval) -> Interval {
        let p = self.p(other);
        if !self.lo.is_negative() && !other.lo.is_negative() {
            return Interval::mk(self.lo.mul(&other.lo), self.hi.mul(&other.hi), p);
        }
        let c = [
            self.lo.mul(&other.lo),
            self.lo.mul(&other.hi),
            self.hi.mul(&other.lo),
            self.hi.mul(&other.hi),
        ];
        let lo = c.iter().min().unwrap().clone();
        let hi = c.iter().max().unwrap().clone();
        Interval::mk(lo, hi, p)
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for Interval {
            type Output = Interval;
            fn $m(self, other: Interval) -> Interval {
                (&self).$m(&other)
            }
        }
        impl $tr<&Interval> for Interval {
            type Output = Interval;
            fn $m(self, other: &Interval) -> Interval {
                (&self).$m(other)
            }
        }
    };
}

forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for Interval {
    type Output = Interval;
    fn neg(self) -> Interval {
        -&self
    }
}

/// `sum_{j>=0} z^(2j+1) / (2j+1)` for the exact rational `z = num/den`,
/// `|z| <= 1/2`.
fn atanh_ratio(num: &BigInt, den: &BigInt, wp: u32) -> Result<Interval> {
    if num.is_zero() {
        return Ok(Interval::from_int(0, wp));
    }
    if (num.abs() << 1u32) > den.abs() {
        return Err(Error::domain("atanh series argument too large"));
    }
    let z = Interval::from_ratio(&num.abs(), &den.abs(), wp)?;
    let z2 = z.sqr();
    let mut term = z.clone();
    let mut sum = z;
    let mut j: u64 = 1;
    loop {
        term = &term * &z2;
        sum = &sum + &term.div_u64(2 * j + 1);
        if term.hi.magnitude_exp() < -(wp as i64) {
            break;
        }
        j += 1;
    }
    // Tail is bounded by the last power when z^2 <= 1/2.
    sum.hi = sum.hi.add(&term.hi).round(wp, Round::Up);
    if num.sign() != den.sign() {
        sum = -sum;
    }
    Ok(sum)
}

fn ln2_uncached(wp: u32) -> Interval {
    atanh_ratio(&BigInt::one(), &BigInt::from(3), wp + 16)
        .expect("constant series argument")
        .mul_pow2(1)
        .with_prec(wp)
}

/// Cached enclosure of `ln 2`.
pub fn ln2(prec: u32) -> Interval {
    static CACHE: OnceLock<Mutex<HashMap<u32, Interval>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(v) = cache.lock().unwrap().get(&prec) {
        return v.clone();
    }
    let v = ln2_uncached(prec);
    cache.lock().unwrap().insert(prec, v.clone());
    v
}

/// Cached enclosure of `ln n` for a small positive integer.
pub fn ln_small(n: u64, prec: u32) -> Interval {
    static CACHE: OnceLock<Mutex<HashMap<(u64, u32), Interval>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(v) = cache.lock().unwrap().get(&(n, prec)) {
        return v.clone();
    }
    let v = Interval::ln_ratio(&BigInt::from(n), &BigInt::one(), prec).expect("positive");
    cache.lock().unwrap().insert((n, prec), v.clone());
    v
}

fn ln_dyadic(d: &Dyadic, prec: u32) -> Interval {
    let (num, den) = if d.exp >= 0 {
        (&d.man << d.exp as u64, BigInt::one())
    } else {
        (d.man.clone(), BigInt::one() << (-d.exp) as u64)
    };
    Interval::ln_ratio(&num, &den, prec).expect("positive argument")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn iv(x: f64, p: u32) -> Interval {
        Interval::point(Dyadic::from_f64(x).unwrap(), p)
    }

    #[test]
    fn shifts_round_toward_minus_infinity() {
        assert_eq!(floor_shr(&BigInt::from(-5), 1), BigInt::from(-3));
        assert_eq!(ceil_shr(&BigInt::from(-5), 1), BigInt::from(-2));
        assert_eq!(floor_shr(&BigInt::from(5), 1), BigInt::from(2));
        assert_eq!(ceil_shr(&BigInt::from(5), 1), BigInt::from(3));
    }

    #[test]
    fn rounding_brackets_value() {
        let third = Interval::from_ratio(&BigInt::from(1), &BigInt::from(3), 200).unwrap();
        let three = Interval::from_int(3, 200);
        let back = &third * &three;
        assert!(back.contains(&Dyadic::one()));
        assert!(back.width().magnitude_exp() < -190);
    }

    #[test]
    fn f64_roundtrip_and_directed_conversion() {
        for x in [1.5, -0.1, 3.0e300, 1e-300, 123456.789] {
            assert_eq!(Dyadic::from_f64(x).unwrap().to_f64(), x);
        }
        let third = Interval::from_ratio(&BigInt::from(1), &BigInt::from(3), 300).unwrap();
        let lo = third.lo().to_f64_dir(Round::Down);
        let hi = third.hi().to_f64_dir(Round::Up);
        assert!(Dyadic::from_f64(lo).unwrap() <= *third.lo());
        assert!(Dyadic::from_f64(hi).unwrap() >= *third.hi());
        assert!(lo < hi);
    }

    #[test]
    fn ln2_matches_known_digits() {
        let l = ln2(256);
        // 60 correct digits, truncated
        let known = crate::numfmt::parse_decimal("0.693147180559945309417232121458176568075500134360255254120680").unwrap();
        let err = crate::numfmt::parse_decimal("1e-60").unwrap();
        assert!(l.lo().to_rational() <= &known + &err && l.hi().to_rational() >= known);
        assert!(l.width().magnitude_exp() < -250);
    }

    #[test]
    fn ln_of_e_power_identity() {
        // ln(a*b) = ln a + ln b on enclosures
        let p = 300;
        let a = ln_small(10, p);
        let b = &ln_small(2, p) + &ln_small(5, p);
        assert!(a.certainly_lt(&b).is_none());
        assert!((a.to_f64() - 10f64.ln()).abs() < 1e-14);
    }

    #[test]
    fn ln_interval_is_monotone_hull() {
        let x = Interval::from_bounds(
            Dyadic::from_f64(1.25).unwrap(),
            Dyadic::from_f64(1.75).unwrap(),
            200,
        )
        .unwrap();
        let l = x.ln().unwrap();
        assert!(l.lo().to_f64() <= 1.25f64.ln() + 1e-15);
        assert!(l.hi().to_f64() >= 1.75f64.ln() - 1e-15);
    }

    #[test]
    fn ln_of_huge_and_tiny() {
        let big = BigInt::from(10).pow(500);
        let l = Interval::ln_ratio(&big, &BigInt::one(), 256).unwrap();
        assert!((l.to_f64() - 500.0 * 10f64.ln()).abs() < 1e-10);
        let l = Interval::ln_ratio(&BigInt::one(), &big, 256).unwrap();
        assert!((l.to_f64() + 500.0 * 10f64.ln()).abs() < 1e-10);
    }

    #[test]
    fn sqrt_brackets() {
        let two = Interval::from_int(2, 256);
        let r = two.sqrt().unwrap();
        let sq = r.sqr();
        assert!(sq.contains(&Dyadic::from_int(2)));
        assert!((r.to_f64() - 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn floor_detects_straddle() {
        let x = Interval::from_bounds(Dyadic::from_f64(0.9).unwrap(), Dyadic::from_f64(1.1).unwrap(), 128)
            .unwrap();
        assert!(x.floor().unwrap_err().is_precision());
        assert_eq!(iv(-2.5, 128).floor().unwrap(), BigInt::from(-3));
    }

    #[test]
    fn division_sign_cases() {
        let a = iv(-3.0, 128);
        let b = iv(2.0, 128);
        let q = a.div(&b).unwrap();
        assert!(q.contains(&Dyadic::from_f64(-1.5).unwrap()));
        let z = Interval::from_bounds(Dyadic::from_f64(-1.0).unwrap(), Dyadic::one(), 128).unwrap();
        assert!(a.div(&z).unwrap_err().is_precision());
    }

    #[test]
    fn precision_context_floor() {
        assert!(PrecisionContext::new(64).is_err());
        assert_eq!(PrecisionContext::new(128).unwrap().bits(), 128);
        let c = BigInt::from(10).pow(867);
        assert_eq!(PrecisionContext::for_constant(&c).bits(), c.bits() as u32 + 64);
    }
}
