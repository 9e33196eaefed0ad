//! Integers whose decimal string is `d1^ell d2^m d1^ell` with `d1 != d2`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Witness `(d1, d2, ell, m)` for the digit shape `d1^ell d2^m d1^ell`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct PalindromeDecomposition {
    pub d1: u8,
    pub d2: u8,
    pub ell: u32,
    pub m: u32,
}

impl PalindromeDecomposition {
    pub fn new(d1: u8, d2: u8, ell: u32, m: u32) -> Result<Self> {
        let dec = PalindromeDecomposition { d1, d2, ell, m };
        dec.validate()?;
        Ok(dec)
    }

    pub fn validate(&self) -> Result<()> {
        if !(1..=9).contains(&self.d1) {
            return Err(Error::domain(format!("leading digit must be 1..9, got {}", self.d1)));
        }
        if self.d2 > 9 {
            return Err(Error::domain(format!("middle digit must be 0..9, got {}", self.d2)));
        }
        if self.d1 == self.d2 {
            return Err(Error::domain("the two repdigit blocks must use distinct digits"));
        }
        if self.ell == 0 || self.m == 0 {
            return Err(Error::domain("block lengths must be at least 1"));
        }
        Ok(())
    }

    /// Number of decimal digits, `2 ell + m`.
    pub fn digit_count(&self) -> u64 {
        2 * self.ell as u64 + self.m as u64
    }
}

/// `d (10^len - 1) / 9`.
pub fn repdigit(d: u8, len: u32) -> BigInt {
    (num_traits::pow(BigInt::from(10), len as usize) - 1u32) / 9u32 * d
}

/// The integer with digit string `d1^ell d2^m d1^ell`.
pub fn compose(dec: &PalindromeDecomposition) -> Result<BigInt> {
    dec.validate()?;
    let ten = BigInt::from(10);
    let outer = repdigit(dec.d1, dec.ell);
    let shift_outer = num_traits::pow(ten.clone(), (dec.ell + dec.m) as usize);
    let shift_inner = num_traits::pow(ten, dec.ell as usize);
    Ok(&outer * shift_outer + repdigit(dec.d2, dec.m) * shift_inner + outer)
}

/// Reads the shape off the decimal string of `v`. When several block
/// lengths fit, the smallest `ell` is returned.
pub fn decompose(v: &BigInt) -> Option<PalindromeDecomposition> {
    if !v.is_positive() {
        return None;
    }
    decompose_digits(v.to_str_radix(10).as_bytes())
}

/// Same as [`decompose`] on an ASCII digit string.
pub fn decompose_digits(s: &[u8]) -> Option<PalindromeDecomposition> {
    let len = s.len();
    if len < 3 || s[0] == b'0' {
        return None;
    }
    let d1 = s[0];
    let mut ell = 1;
    while 2 * ell < len {
        if s[ell - 1] != d1 || s[len - ell] != d1 {
            return None;
        }
        let mid = &s[ell..len - ell];
        let d2 = mid[0];
        if d2 != d1 && mid.iter().all(|&c| c == d2) {
            return Some(PalindromeDecomposition {
                d1: d1 - b'0',
                d2: d2 - b'0',
                ell: ell as u32,
                m: mid.len() as u32,
            });
        }
        ell += 1;
    }
    None
}

/// Divisibility screens for `L_n = 3 * 2^(n-2)` against the shape.
///
/// Returns `false` when the cell is ruled out: `ell >= 4` (16 divides
/// `27 * 2^(n-2)` and `10^ell` but not `d1 (10^ell - 1)`), or `n >= 16`
/// with `ell + m >= 14` (a power of 2 of size `2^14` would have to divide
/// `(d1 - d2) 10^ell - d1`, which is below `9 * 10^3 + 9`).
pub fn small_case_filter(n: u32, ell: u32, m: u32) -> bool {
    if ell >= 4 {
        return false;
    }
    !(n >= 16 && ell + m >= 14)
}

/// A shape whose value is `3 * 2^(n-2)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PowerCaseHit {
    pub decomposition: PalindromeDecomposition,
    pub n: u64,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PowerCaseReport {
    pub searched: u64,
    pub hits: Vec<PowerCaseHit>,
}

/// `Some(n)` when `v = 3 * 2^(n-2)` for some `n >= 2`.
pub fn power_case_index(v: &BigInt) -> Option<u64> {
    if !v.is_positive() {
        return None;
    }
    let (q, r) = v.div_rem(&BigInt::from(3));
    if !r.is_zero() {
        return None;
    }
    let tz = q.trailing_zeros()?;
    if (&q >> tz).is_one() {
        Some(tz + 2)
    } else {
        None
    }
}

/// Every shape with `ell <= ell_max` and `m <= m_max`, tested for equality
/// with `3 * 2^(n-2)`.
pub fn power_case_search(ell_max: u32, m_max: u32) -> PowerCaseReport {
    let mut report = PowerCaseReport::default();
    for d1 in 1..=9u8 {
        for d2 in (0..=9u8).filter(|&d| d != d1) {
            for ell in 1..=ell_max {
                for m in 1..=m_max {
                    let dec = PalindromeDecomposition { d1, d2, ell, m };
                    let v = compose(&dec).expect("valid by construction");
                    report.searched += 1;
                    if let Some(n) = power_case_index(&v) {
                        report.hits.push(PowerCaseHit { decomposition: dec, n });
                    }
                }
            }
        }
    }
    report
}
