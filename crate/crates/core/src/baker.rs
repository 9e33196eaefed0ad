//! The four linear forms in logarithms and Matveev's lower bound for them.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::algebraic::{height_bound_gamma1_case, height_f_bound, AlgebraicContext};
use crate::constants as pc;
use crate::error::{Error, Result};
use crate::real::{ln_small, Interval, Round};

/// Which linear form is meant.
///
/// * `G1`: `log(9 f (2a-1) / d1) + (n-1) log a - (2l+m) log 10`
/// * `G2`: `log(9 f (2a-1) / (d1 10^l - (d1-d2))) + (n-1) log a - (l+m) log 10`
/// * `G3`: `log(d1 / 27) + (2l+m) log 10 - (n-2) log 2`
/// * `G4`: `log((d1 10^l - (d1-d2)) / 27) + (l+m) log 10 - (n-2) log 2`
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize, PartialOrd, Ord)]
pub enum FormKind {
    G1,
    G2,
    G3,
    G4,
}

impl FormKind {
    pub const ALL: [FormKind; 4] = [FormKind::G1, FormKind::G2, FormKind::G3, FormKind::G4];

    /// Forms whose first logarithm involves `alpha`.
    pub fn uses_alpha(self) -> bool {
        matches!(self, FormKind::G1 | FormKind::G2)
    }

    /// Forms that depend on the second digit and the block length.
    pub fn uses_inner_block(self) -> bool {
        matches!(self, FormKind::G2 | FormKind::G4)
    }
}

impl fmt::Display for FormKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            FormKind::G1 => "G1",
            FormKind::G2 => "G2",
            FormKind::G3 => "G3",
            FormKind::G4 => "G4",
        };
        f.write_str(s)
    }
}

impl FromStr for FormKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "G1" => Ok(FormKind::G1),
            "G2" => Ok(FormKind::G2),
            "G3" => Ok(FormKind::G3),
            "G4" => Ok(FormKind::G4),
            _ => Err(Error::domain(format!("unknown linear form {s:?}"))),
        }
    }
}

/// Integer parameters of a candidate solution.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FormParams {
    pub k: u32,
    pub d1: u32,
    pub d2: u32,
    pub ell: u64,
    pub m: u64,
    pub n: BigInt,
}

impl FormParams {
    /// `d1 * 10^ell - (d1 - d2)`.
    pub fn inner_block(&self) -> BigInt {
        inner_block(self.d1, self.d2, self.ell)
    }
}

pub fn inner_block(d1: u32, d2: u32, ell: u64) -> BigInt {
    BigInt::from(d1) * num_traits::pow(BigInt::from(10), ell as usize) - (d1 as i64 - d2 as i64)
}

/// One logarithm of a linear form.
#[derive(Clone, Debug)]
pub struct GammaTerm {
    pub label: String,
    /// Enclosure of `log gamma`.
    pub log: Interval,
    /// Upper bound for `D h(gamma)`.
    pub height: f64,
    /// Matveev parameter `A_i`.
    pub a: f64,
}

#[derive(Clone, Debug)]
pub struct LinearFormSpec {
    pub kind: FormKind,
    pub gammas: Vec<GammaTerm>,
    pub coeffs: Vec<BigInt>,
    pub t: u32,
    pub degree: u32,
    pub b_bound: f64,
}

impl LinearFormSpec {
    /// Checks the admissibility conditions of Matveev's theorem.
    pub fn check(&self) -> Result<()> {
        if self.gammas.len() != self.t as usize || self.coeffs.len() != self.t as usize {
            return Err(Error::domain("linear form must have t logarithms and t coefficients"));
        }
        for g in &self.gammas {
            let abs_log = g.log.mag().to_f64_dir(Round::Up);
            let need = g.height.max(abs_log).max(0.16);
            if !(g.a >= need) {
                return Err(Error::domain(format!(
                    "A for {} is {} but must be at least {}",
                    g.label, g.a, need
                )));
            }
        }
        let max_b = self.coeffs.iter().map(|b| b.abs()).max().unwrap_or_default();
        let max_b = max_b.to_f64().unwrap_or(f64::INFINITY);
        if self.b_bound < max_b {
            return Err(Error::domain(format!(
                "B = {} is below the largest coefficient {}",
                self.b_bound, max_b
            )));
        }
        Ok(())
    }

    pub fn a_values(&self) -> Vec<f64> {
        self.gammas.iter().map(|g| g.a).collect()
    }

    /// Certified enclosure of `sum b_i log gamma_i`.
    pub fn value(&self) -> Interval {
        let prec = self.gammas[0].log.prec();
        let mut acc = Interval::from_int(0, prec);
        for (g, b) in self.gammas.iter().zip(&self.coeffs) {
            acc = &acc + &g.log.mul_int(b);
        }
        acc
    }
}

/// Matveev's bound `log|Gamma| > -1.4 30^(t+3) t^4.5 D^2 (1 + log D)(1 + log B) A_1...A_t`.
pub fn matveev_from_parts(t: u32, degree: u32, b_bound: f64, a: &[f64]) -> Result<f64> {
    if a.iter().any(|x| !(*x > 0.0)) {
        return Err(Error::domain("every A_i must be positive"));
    }
    if !(b_bound >= 2.0) {
        return Err(Error::domain("B must be at least 2"));
    }
    if degree < 1 {
        return Err(Error::domain("degree must be positive"));
    }
    let t_f = t as f64;
    let d = degree as f64;
    let prod: f64 = a.iter().product();
    Ok(-pc::MATVEEV_FACTOR
        * 30f64.powi(t as i32 + 3)
        * t_f.powf(4.5)
        * d
        * d
        * (1.0 + d.ln())
        * (1.0 + b_bound.ln())
        * prod)
}

pub fn matveev_lower_bound(spec: &LinearFormSpec) -> Result<f64> {
    matveev_from_parts(spec.t, spec.degree, spec.b_bound, &spec.a_values())
}

fn digit_ok(d: u32, lo: u32) -> bool {
    (lo..=9).contains(&d)
}

/// Build the linear form of the requested kind at the given parameters.
///
/// `alg` is required for `G1`/`G2` and must match `p.k`. `B` is set to `n`
/// and `log n` feeds the `A_1` formulas of `G2`/`G4`.
pub fn build_gamma(kind: FormKind, p: &FormParams, alg: Option<&AlgebraicContext>) -> Result<LinearFormSpec> {
    if !digit_ok(p.d1, 1) {
        return Err(Error::domain(format!("d1 must be a digit 1..9, got {}", p.d1)));
    }
    if kind.uses_inner_block() && (!digit_ok(p.d2, 0) || p.d1 == p.d2) {
        return Err(Error::domain(format!("d2 must be a digit 0..9 different from d1, got {}", p.d2)));
    }
    if p.ell < 1 || p.m < 1 {
        return Err(Error::domain("block lengths must be at least 1"));
    }
    if p.n < BigInt::from(8) {
        return Err(Error::domain("n must be at least 8"));
    }
    if p.k < 3 {
        return Err(Error::domain("k must be at least 3"));
    }
    if kind.uses_alpha() && p.n < BigInt::from(p.k + 1) {
        return Err(Error::domain("alpha forms need n >= k + 1"));
    }
    if kind == FormKind::G4 && p.k <= pc::K_SPLIT {
        return Err(Error::domain(format!("G4 applies only for k > {}", pc::K_SPLIT)));
    }
    let n_f = p.n.to_f64().unwrap_or(f64::INFINITY);
    let log_n = ln_bigint_f64(&p.n);
    let kf = p.k as f64;
    let ell_b = BigInt::from(p.ell);
    let m_b = BigInt::from(p.m);
    let spec = match kind {
        FormKind::G1 | FormKind::G2 => {
            let alg = alg.ok_or_else(|| Error::domain("alpha forms need an algebraic context"))?;
            if alg.k() != p.k {
                return Err(Error::domain("algebraic context built for a different k"));
            }
            let prec = alg.precision().bits();
            let coef = alg.binet_coefficient().mul_int(&BigInt::from(9));
            let (denom, b3) = if kind == FormKind::G1 {
                (BigInt::from(p.d1), -(BigInt::from(2u32) * &ell_b + &m_b))
            } else {
                (p.inner_block(), -(&ell_b + &m_b))
            };
            let log_g1 = &coef.ln()? - &Interval::ln_ratio(&denom, &BigInt::one(), prec)?;
            let log_alpha = alg.log_alpha().clone();
            let log_alpha_f = log_alpha.hi().to_f64_dir(Round::Up);
            // h(9) + h(denominator) + h(f) + h(2 alpha - 1), the last via
            // h(x + y) <= h(x) + h(y) + log 2.
            let h1 = 9f64.ln()
                + ln_bigint_f64(&denom.abs())
                + height_f_bound(p.k)
                + 2.0 * 2f64.ln()
                + log_alpha_f / kf;
            let a1 = height_bound_gamma1_case(kind, p.k, log_n)?;
            LinearFormSpec {
                kind,
                gammas: vec![
                    GammaTerm { label: "gamma1".into(), log: log_g1, height: kf * h1, a: a1 },
                    GammaTerm {
                        label: "alpha".into(),
                        log: log_alpha,
                        height: log_alpha_f,
                        a: pc::ALPHA_A,
                    },
                    GammaTerm {
                        label: "10".into(),
                        log: ln_small(10, prec),
                        height: kf * 10f64.ln(),
                        a: kf * 10f64.ln(),
                    },
                ],
                coeffs: vec![BigInt::one(), &p.n - 1, b3],
                t: pc::T,
                degree: p.k,
                b_bound: n_f,
            }
        }
        FormKind::G3 | FormKind::G4 => {
            let prec = 256;
            let (num, b2) = if kind == FormKind::G3 {
                (BigInt::from(p.d1), BigInt::from(2u32) * &ell_b + &m_b)
            } else {
                (p.inner_block(), &ell_b + &m_b)
            };
            let log_g1 = Interval::ln_ratio(&num, &BigInt::from(27), prec)?;
            let h1 = ln_bigint_f64(&std::cmp::max(num.clone(), BigInt::from(27)));
            let a1 = height_bound_gamma1_case(kind, p.k, log_n)?;
            LinearFormSpec {
                kind,
                gammas: vec![
                    GammaTerm { label: "gamma1".into(), log: log_g1, height: h1, a: a1 },
                    GammaTerm {
                        label: "10".into(),
                        log: ln_small(10, prec),
                        height: ln_up(10.0),
                        a: ln_up(10.0),
                    },
                    GammaTerm { label: "2".into(), log: ln_small(2, prec), height: ln_up(2.0), a: ln_up(2.0) },
                ],
                coeffs: vec![BigInt::one(), b2, -(&p.n - BigInt::from(2))],
                t: pc::T,
                degree: 1,
                b_bound: n_f,
            }
        }
    };
    spec.check()?;
    Ok(spec)
}

/// `ln x` nudged one relative epsilon upward, above the true value.
fn ln_up(x: f64) -> f64 {
    x.ln() * (1.0 + f64::EPSILON)
}

fn ln_bigint_f64(x: &BigInt) -> f64 {
    if x.is_zero() {
        return f64::NEG_INFINITY;
    }
    Interval::ln_ratio(&x.abs(), &BigInt::one(), 128).expect("nonzero").hi().to_f64_dir(Round::Up)
}

/// Certifies that the form is nonzero.
///
/// `G3`/`G4`: the form vanishes iff an integer divisible by 5 equals
/// `27 * 2^(n-2)`, which is not. `G1`/`G2`: the certified enclosure of the
/// logarithmic form must exclude zero.
pub fn nonvanishing_check(spec: &LinearFormSpec, p: &FormParams) -> Result<bool> {
    match spec.kind {
        FormKind::G3 | FormKind::G4 => {
            let five = BigInt::from(5);
            let lhs_factor = if spec.kind == FormKind::G3 {
                BigInt::from(p.d1)
            } else {
                p.inner_block()
            };
            let ten_exp = if spec.kind == FormKind::G3 { 2 * p.ell + p.m } else { p.ell + p.m };
            // lhs = factor * 10^ten_exp with ten_exp >= 1
            let lhs_div5 = ten_exp >= 1 || (&lhs_factor % &five).is_zero();
            let rhs_mod5 = (BigInt::from(27) * BigInt::from(2).modpow(&(&p.n - 2), &five)) % &five;
            Ok(lhs_div5 && !rhs_mod5.is_zero())
        }
        FormKind::G1 | FormKind::G2 => {
            let v = spec.value();
            if v.contains_zero() {
                Err(Error::precision("linear form enclosure contains zero"))
            } else {
                Ok(true)
            }
        }
    }
}

fn up(x: f64) -> f64 {
    x * (1.0 + 4.0 * f64::EPSILON)
}

fn check_k(k: f64) -> Result<()> {
    if k < 3.0 {
        Err(Error::domain(format!("k must be at least 3, got {k}")))
    } else {
        Ok(())
    }
}

/// `ell < 2.62e12 k^4 (log k)^2 log n`.
pub fn bound_ell(k: f64, n_bound: f64) -> Result<f64> {
    check_k(k)?;
    let lk = k.ln();
    Ok(up(pc::ELL_COEFF * k.powi(4) * lk * lk * n_bound.ln()))
}

/// `m < 1.73e24 k^8 (log k)^3 (log n)^2`.
pub fn bound_m(k: f64, n_bound: f64) -> Result<f64> {
    check_k(k)?;
    let lk = k.ln();
    let ln = n_bound.ln();
    Ok(up(pc::M_COEFF * k.powi(8) * lk.powi(3) * ln * ln))
}

/// `n < 1.63e29 k^8 (log k)^5`.
pub fn bound_n(k: f64) -> Result<f64> {
    check_k(k)?;
    Ok(up(pc::N_COEFF * k.powi(8) * k.ln().powi(5)))
}

/// `log10` of [`bound_n`], usable past the double range.
pub fn bound_n_log10(k: f64) -> Result<f64> {
    check_k(k)?;
    Ok(pc::N_COEFF.log10() + 8.0 * k.log10() + 5.0 * k.ln().log10())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Case2Branch {
    /// The minimum is `k/2`.
    A,
    /// The minimum is `ell log2 10`.
    B,
}

/// Branch bound on `k` at a given `log n`.
pub fn case2_k_bound_at(branch: Case2Branch, log_n: f64) -> f64 {
    match branch {
        Case2Branch::A => up(pc::CASE2_A_COEFF * log_n),
        Case2Branch::B => up(pc::CASE2_B_COEFF * log_n * log_n),
    }
}

/// Closes the branch bound with `log n < c log k` (`c = 23` or `24`) by
/// fixed-point iteration from `k = 1500`. Returns `(k bound, log10 of n bound)`.
pub fn case2_k_bounds(branch: Case2Branch) -> (f64, f64) {
    let c = match branch {
        Case2Branch::A => pc::CASE2_A_LOGN_PER_LOGK,
        Case2Branch::B => pc::CASE2_B_LOGN_PER_LOGK,
    };
    let mut k = pc::K_SPLIT as f64;
    for _ in 0..200 {
        let next = case2_k_bound_at(branch, c * k.ln());
        if (next - k).abs() <= 1e-12 * next {
            k = next;
            break;
        }
        k = next;
    }
    let k = up(k);
    (k, bound_n_log10(k).expect("k above 3"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn form_kind_parsing() {
        assert_eq!("g3".parse::<FormKind>().unwrap(), FormKind::G3);
        assert!("G5".parse::<FormKind>().is_err());
    }

    #[test]
    fn matveev_rejects_bad_parts() {
        assert!(matveev_from_parts(3, 1, 1.5, &[1.0, 1.0, 1.0]).is_err());
        assert!(matveev_from_parts(3, 1, 8.0, &[1.0, 0.0, 1.0]).is_err());
    }

    #[test]
    fn inner_block_digits() {
        assert_eq!(inner_block(2, 1, 1), BigInt::from(19));
        assert_eq!(inner_block(4, 9, 2), BigInt::from(405));
    }

    #[test]
    fn closure_values() {
        let (ka, _) = case2_k_bounds(Case2Branch::A);
        assert!(ka > 4.0e15 && ka < pc::CASE2_A_K_PRINTED);
        let (kb, log_n) = case2_k_bounds(Case2Branch::B);
        assert!(kb > 5.0e30 && kb < pc::CASE2_B_K_PRINTED);
        assert!(log_n < pc::CASE2_N_PRINTED.log10());
    }

    #[test]
    fn every_form_builds() {
        let alg = crate::isolate_alpha(5, crate::PrecisionContext::new(256).unwrap()).unwrap();
        for kind in FormKind::ALL {
            let k = if kind.uses_alpha() { 5 } else { 1501 };
            let p = FormParams { k, d1: 3, d2: 7, ell: 2, m: 4, n: BigInt::from(40) };
            let spec = build_gamma(kind, &p, Some(&alg)).unwrap();
            assert!(spec.check().is_ok());
            assert!(matveev_lower_bound(&spec).unwrap() < 0.0);
            assert!(nonvanishing_check(&spec, &p).unwrap());
        }
    }

    #[test]
    fn rational_form_at_eight() {
        let p = FormParams { k: 3, d1: 1, d2: 0, ell: 1, m: 1, n: BigInt::from(8) };
        let spec = build_gamma(FormKind::G3, &p, None).unwrap();
        let want = -1.4
            * 30f64.powi(6)
            * 3f64.powf(4.5)
            * (1.0 + 8f64.ln())
            * 243f64.ln()
            * 2f64.ln()
            * 10f64.ln();
        let got = matveev_lower_bound(&spec).unwrap();
        assert!(((got - want) / want).abs() < 1e-10, "{got} vs {want}");
    }
}
