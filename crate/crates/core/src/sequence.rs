//! Exact k-generalized Lucas numbers.

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::algebraic::AlgebraicContext;
use crate::error::{Error, Result};
use crate::real::{Dyadic, Interval};

/// Memoized terms of the order-`k` Lucas sequence, `L_0 = 2`, `L_1 = 1`,
/// zeros at indices `2-k .. -1`, each later term the sum of the previous `k`.
#[derive(Clone, Debug)]
pub struct KLucasContext {
    k: u32,
    // slot i holds index i + (2 - k)
    terms: Vec<BigInt>,
}

impl KLucasContext {
    pub fn new(k: u32) -> Result<Self> {
        if k < 2 {
            return Err(Error::domain(format!("order k must be at least 2, got {k}")));
        }
        let mut terms = vec![BigInt::zero(); k as usize - 2];
        terms.push(BigInt::from(2));
        terms.push(BigInt::one());
        Ok(KLucasContext { k, terms })
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    /// Smallest valid index, `2 - k`.
    pub fn first_index(&self) -> i64 {
        2 - self.k as i64
    }

    /// Largest index currently cached.
    pub fn last_index(&self) -> i64 {
        self.first_index() + self.terms.len() as i64 - 1
    }

    fn slot(&self, n: i64) -> Result<usize> {
        if n < self.first_index() {
            return Err(Error::domain(format!(
                "index {n} is below the first index {} for k = {}",
                self.first_index(),
                self.k
            )));
        }
        Ok((n - self.first_index()) as usize)
    }

    /// Extend the table through index `n`.
    pub fn extend_to(&mut self, n: i64) -> Result<()> {
        let target = self.slot(n)?;
        let k = self.k as usize;
        self.terms.reserve(target.saturating_sub(self.terms.len()) + 1);
        while self.terms.len() <= target {
            let len = self.terms.len();
            // L_n = 2 L_{n-1} - L_{n-1-k} once index n-1-k is in the table
            let next = if len > k {
                (&self.terms[len - 1] << 1u32) - &self.terms[len - 1 - k]
            } else {
                self.terms[len - k..].iter().sum()
            };
            self.terms.push(next);
        }
        Ok(())
    }

    /// `L_n`, extending the cache as needed.
    pub fn lucas_term(&mut self, n: i64) -> Result<BigInt> {
        self.extend_to(n)?;
        Ok(self.terms[self.slot(n)?].clone())
    }

    /// Cached `L_n` without extension; `None` if not yet computed.
    pub fn get(&self, n: i64) -> Option<&BigInt> {
        let s = self.slot(n).ok()?;
        self.terms.get(s)
    }

    /// Cached terms from index `from` through the last cached index.
    pub fn iter_from(&self, from: i64) -> impl Iterator<Item = (i64, &BigInt)> {
        let start = (from - self.first_index()).max(0) as usize;
        let base = self.first_index();
        self.terms.iter().enumerate().skip(start).map(move |(i, v)| (base + i as i64, v))
    }

    /// Checks `L_n = 3 * 2^(n-2)` for `2 <= n <= k`.
    pub fn power_identity_check(&mut self, n: i64) -> Result<bool> {
        if n < 2 || n > self.k as i64 {
            return Err(Error::domain(format!("power identity needs 2 <= n <= k, got n = {n}")));
        }
        let v = self.lucas_term(n)?;
        Ok(v == BigInt::from(3) << (n - 2) as u64)
    }
}

/// `f_k(alpha)(2 alpha - 1) alpha^(n-1)`, the dominant Binet term.
pub fn dominant_term(alg: &AlgebraicContext, n: i64) -> Result<Interval> {
    let p = alg.alpha().powi(n - 1)?;
    Ok(&alg.binet_coefficient() * &p)
}

/// `e_k(n) = L_n - f_k(alpha)(2 alpha - 1) alpha^(n-1)` as an enclosure.
/// Fails with a precision error unless `|e_k(n)| < 1.5` is certified.
pub fn binet_residual(ctx: &mut KLucasContext, alg: &AlgebraicContext, n: i64) -> Result<Interval> {
    if ctx.k() != alg.k() {
        return Err(Error::domain("sequence and root contexts use different k"));
    }
    let l = ctx.lucas_term(n)?;
    let prec = alg.precision().bits() + (l.bits() as u32);
    let li = Interval::from_int(l, prec);
    let e = &li - &dominant_term(alg, n)?;
    let bound = Dyadic::from_int(3).mul_pow2(-1);
    if e.mag() < bound {
        Ok(e)
    } else if e.mig() >= bound {
        Err(Error::domain(format!("residual at n = {n} is not below 1.5")))
    } else {
        Err(Error::precision("residual enclosure too wide to compare with 1.5"))
    }
}

/// Certifies `|f(2 alpha - 1) alpha^(n-1) - 3 * 2^(n-2)| < 3 * 2^(n-2) * 36 / 2^(k/2)`
/// for `n < 2^(k/2)`.
pub fn sharp_estimate_check(ctx: &KLucasContext, alg: &AlgebraicContext, n: i64) -> Result<bool> {
    let k = ctx.k();
    if k != alg.k() {
        return Err(Error::domain("sequence and root contexts use different k"));
    }
    if n < 2 {
        return Err(Error::domain("estimate needs n >= 2"));
    }
    // n < 2^(k/2)  <=>  n^2 < 2^k
    let n2 = BigInt::from(n) * BigInt::from(n);
    if n2 >= BigInt::one() << k as u64 {
        return Err(Error::domain(format!("estimate needs n < 2^(k/2), got n = {n}, k = {k}")));
    }
    let prec = alg.precision().bits();
    let y = Interval::from_int(BigInt::from(3) << (n - 2) as u64, prec);
    let diff = (&dominant_term(alg, n)? - &y).abs();
    // |diff| < Y * 36 / 2^(k/2)  <=>  |diff|^2 * 2^k < 1296 * Y^2
    let lhs_hi = diff.hi().mul(diff.hi()).mul_pow2(k as i64);
    let lhs_lo = diff.lo().mul(diff.lo()).mul_pow2(k as i64);
    let rhs = y.lo().mul(y.lo()).mul(&Dyadic::from_int(1296));
    if lhs_hi < rhs {
        Ok(true)
    } else if lhs_lo >= rhs {
        Ok(false)
    } else {
        Err(Error::precision("sharp estimate undecided at this precision"))
    }
}
