//! Certified enclosures of the dominant root of `x^k - x^(k-1) - ... - 1`
//! and of the constants built from it.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::baker::FormKind;
use crate::constants as pc;
use crate::error::{Error, Result};
use crate::real::{Dyadic, Interval, PrecisionContext, Round};

/// Dominant root of the characteristic polynomial for one `k`, with the
/// derived constants used by the Binet-like formula.
#[derive(Clone, Debug)]
pub struct AlgebraicContext {
    k: u32,
    prec: PrecisionContext,
    alpha: Interval,
    f_alpha: Interval,
    two_alpha_minus_one: Interval,
    log_alpha: Interval,
}

impl AlgebraicContext {
    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn precision(&self) -> PrecisionContext {
        self.prec
    }

    pub fn alpha(&self) -> &Interval {
        &self.alpha
    }

    pub fn f_alpha(&self) -> &Interval {
        &self.f_alpha
    }

    pub fn two_alpha_minus_one(&self) -> &Interval {
        &self.two_alpha_minus_one
    }

    pub fn log_alpha(&self) -> &Interval {
        &self.log_alpha
    }

    /// `f_k(alpha) * (2 alpha - 1)`, the leading coefficient of the
    /// Binet-like expansion.
    pub fn binet_coefficient(&self) -> Interval {
        &self.f_alpha * &self.two_alpha_minus_one
    }
}

/// `x^k (x - 2) + 1`, which equals `(x - 1) * Psi_k(x)` and so has the
/// sign of `Psi_k` on `(1, 2)`.
fn g_point(k: u32, x: &Dyadic, prec: u32) -> Interval {
    let xi = Interval::point(x.clone(), prec);
    let xm2 = Interval::point(x.sub(&Dyadic::from_int(2)), prec);
    &(&xi.pow(k as u64) * &xm2) + &Interval::from_int(1, prec)
}

/// Newton step value and derivative in plain rounded dyadics.
fn newton_step(k: u32, x: &Dyadic, wp: u32) -> Dyadic {
    let xk1 = pow_round(x, k - 1, wp);
    let xk = xk1.mul(x).round(wp, Round::Down);
    let g = xk.mul(&x.sub(&Dyadic::from_int(2))).add(&Dyadic::one());
    // g'(x) = x^(k-1) * ((k+1) x - 2k)
    let lin = x.mul(&Dyadic::from_int(k + 1)).sub(&Dyadic::from_int(2 * k));
    let dg = xk1.mul(&lin).round(wp, Round::Down);
    x.sub(&g.div(&dg, wp, Round::Down)).round(wp, Round::Down)
}

fn pow_round(x: &Dyadic, mut n: u32, wp: u32) -> Dyadic {
    let mut acc = Dyadic::one();
    let mut base = x.clone();
    while n > 0 {
        if n & 1 == 1 {
            acc = acc.mul(&base).round(wp, Round::Down);
        }
        n >>= 1;
        if n > 0 {
            base = base.mul(&base).round(wp, Round::Down);
        }
    }
    acc
}

/// Enclose the unique root of `Psi_k` in `(1, 2)`.
///
/// Newton's method started at 2 decreases monotonically to the root since
/// `x^k (x - 2) + 1` is convex to the right of it; the candidate is then
/// certified by a sign change across a `2^-bits` neighbourhood.
pub fn isolate_alpha(k: u32, prec: PrecisionContext) -> Result<AlgebraicContext> {
    if k < 2 {
        return Err(Error::domain(format!("order k must be at least 2, got {k}")));
    }
    // alpha sits within 2^(1-k) of 2, so the endpoints need more than k bits
    let prec = PrecisionContext::new(prec.bits().max(k + 64))?;
    let bits = prec.bits();
    let wp = bits + 64;
    let mut x = Dyadic::from_int(2);
    let tol = -(wp as i64) + 12;
    let mut converged = false;
    for _ in 0..(4 * wp + 64) {
        let next = newton_step(k, &x, wp);
        let step = x.sub(&next);
        x = next;
        if step.is_zero() || step.magnitude_exp() < tol {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::precision("Newton iteration for alpha did not settle"));
    }
    let r = Dyadic::pow2(-(bits as i64));
    let lo = x.sub(&r);
    let hi = x.add(&r);
    let cp = wp + 32;
    if !(g_point(k, &lo, cp).is_negative() && g_point(k, &hi, cp).is_positive()) {
        return Err(Error::precision("could not certify a sign change around alpha"));
    }
    let alpha = Interval::from_bounds(lo, hi, bits)?;
    let lower = Dyadic::from_int(2).sub(&Dyadic::pow2(1 - k as i64));
    if !(alpha.lo() > &lower && alpha.hi() < &Dyadic::from_int(2)) {
        return Err(Error::precision("alpha enclosure not inside 2(1 - 2^-k) .. 2"));
    }
    let f_alpha = f_k(k, &alpha)?;
    let two_alpha_minus_one = &alpha.mul_pow2(1) - &Interval::from_int(1, bits);
    let log_alpha = alpha.ln()?;
    let ctx = AlgebraicContext { k, prec, alpha, f_alpha, two_alpha_minus_one, log_alpha };
    evaluate_f(&ctx)?;
    Ok(ctx)
}

/// `f_k(x) = (x - 1) / (2 + (k + 1)(x - 2))` on an interval.
pub fn f_k(k: u32, x: &Interval) -> Result<Interval> {
    let p = x.prec();
    let num = x - &Interval::from_int(1, p);
    let den = &Interval::from_int(2, p) + &(x - &Interval::from_int(2, p)).mul_int(&BigInt::from(k + 1));
    num.div(&den)
}

/// Enclosure of `f_k(alpha)`, certified to lie strictly inside `(1/2, 3/4)`.
pub fn evaluate_f(ctx: &AlgebraicContext) -> Result<Interval> {
    let f = ctx.f_alpha.clone();
    let half = Dyadic::pow2(-1);
    let three_quarters = Dyadic::from_int(3).mul_pow2(-2);
    if f.lo() > &half && f.hi() < &three_quarters {
        Ok(f)
    } else {
        Err(Error::precision("f_k(alpha) enclosure not inside (1/2, 3/4)"))
    }
}

/// Checks that `Psi_k` has exactly one positive root and that it lies in
/// `(2(1 - 2^-k), 2)`: one sign change in the coefficient list (Descartes)
/// plus opposite signs at the two endpoints.
pub fn root_is_isolated(k: u32) -> bool {
    if k < 2 {
        return false;
    }
    // Coefficients 1, -1, -1, ..., -1: exactly one sign change.
    let coeffs: Vec<i32> = std::iter::once(1).chain(std::iter::repeat(-1).take(k as usize)).collect();
    let changes = coeffs.windows(2).filter(|w| (w[0] > 0) != (w[1] > 0)).count();
    let lower = Dyadic::from_int(2).sub(&Dyadic::pow2(1 - k as i64));
    let at_lower = g_point(k, &lower, 192);
    // Psi_k(2) = 1 exactly.
    changes == 1 && at_lower.is_negative()
}

/// Logarithmic height `log max(|p|, q)` of the rational `p/q`.
pub fn log_height_rational(p: &BigInt, q: &BigInt) -> Result<f64> {
    if q.is_zero() {
        return Err(Error::domain("zero denominator"));
    }
    let g = p.gcd(q);
    let (mut p, mut q) = (p / &g, q / &g);
    if q.is_negative() {
        p = -p;
        q = -q;
    }
    let m = std::cmp::max(p.abs(), q);
    if m.is_zero() {
        return Ok(0.0);
    }
    Ok(Interval::ln_ratio(&m, &BigInt::one(), 128)?.hi().to_f64_dir(Round::Up))
}

/// Integer whose absolute value bounds `k^k` times the leading
/// coefficient of the minimal polynomial of `f_k(alpha)`: the norm of
/// `2 + (k+1)(alpha - 2)` from `Q(alpha)` to `Q`, which equals
/// `((k+1)^(k+1) - 2 (2k)^k) / (k - 1)` up to sign.
pub fn f_denominator_norm(k: u32) -> BigInt {
    if k == 2 {
        return BigInt::from(-5);
    }
    let k1 = BigInt::from(k + 1);
    let a = num_traits::pow(k1, (k + 1) as usize);
    let b = num_traits::pow(BigInt::from(2 * k), k as usize) * 2;
    (a - b) / BigInt::from(k - 1)
}

/// `(1/k) log |N_k|`, an upper bound for `h(f_k(alpha))` since every
/// conjugate of `f_k(alpha)` has absolute value below 1.
pub fn height_f_bound(k: u32) -> f64 {
    let n = f_denominator_norm(k).abs();
    let l = Interval::ln_ratio(&n, &BigInt::one(), 128).expect("nonzero norm");
    l.hi().to_f64_dir(Round::Up) / k as f64
}

/// The `A_1` value used for the first logarithm of each linear form.
pub fn height_bound_gamma1_case(kind: FormKind, k: u32, log_n_bound: f64) -> Result<f64> {
    let kf = k as f64;
    let lk = kf.ln();
    Ok(match kind {
        FormKind::G1 => pc::G1_A1_SLOPE * kf * lk + pc::G1_A1_OFFSET,
        FormKind::G2 => pc::G2_A1_COEFF * kf.powi(5) * lk * lk * log_n_bound,
        FormKind::G3 => 243f64.ln(),
        FormKind::G4 => pc::G4_A1_COEFF * log_n_bound,
    })
}

/// Decimal approximation helper for reports.
pub fn interval_mid_f64(x: &Interval) -> f64 {
    x.mid().to_f64()
}

/// Number of bits needed so `floor(C * eta)` can be certified for `|eta| < 2^e`.
pub fn bits_for_scaled_floor(c: &BigInt, eta_bound_exp: i64) -> u32 {
    (c.bits() as i64 + eta_bound_exp.max(0) + 80).to_u32().unwrap_or(u32::MAX)
}
