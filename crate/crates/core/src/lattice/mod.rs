//! Lattices, LLL reduction, and the lower-bound certificate that turns a
//! reduced approximation lattice into a small bound on the exponents.

mod lll;
pub mod round;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::real::{Dyadic, Interval};

pub use lll::{lll_exact, lll_reduce, lll_reduce_with, LovaszConstant};
pub use round::{
    reduction_round, ReductionCertificate, RoundCell, RoundRecord, RoundSpec, RoundSummary,
};

/// Full-rank integer lattice given by its basis columns.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Lattice {
    cols: Vec<Vec<BigInt>>,
}

impl Lattice {
    /// Columns are basis vectors; all must have length equal to their count.
    pub fn from_columns(cols: Vec<Vec<BigInt>>) -> Result<Self> {
        let n = cols.len();
        if n == 0 || cols.iter().any(|c| c.len() != n) {
            return Err(Error::domain("lattice basis must be a nonempty square matrix"));
        }
        Ok(Lattice { cols })
    }

    /// Build from a row-major matrix whose columns are the basis vectors.
    pub fn from_rows(rows: &[Vec<BigInt>]) -> Result<Self> {
        let n = rows.len();
        if n == 0 || rows.iter().any(|r| r.len() != n) {
            return Err(Error::domain("lattice basis must be a nonempty square matrix"));
        }
        Self::from_columns((0..n).map(|j| rows.iter().map(|r| r[j].clone()).collect()).collect())
    }

    pub fn dim(&self) -> usize {
        self.cols.len()
    }

    pub fn columns(&self) -> &[Vec<BigInt>] {
        &self.cols
    }

    /// `sum_j coeffs[j] * b_j`.
    pub fn apply(&self, coeffs: &[BigInt]) -> Vec<BigInt> {
        let n = self.dim();
        let mut out = vec![BigInt::zero(); n];
        for (c, col) in coeffs.iter().zip(&self.cols) {
            if c.is_zero() {
                continue;
            }
            for (o, x) in out.iter_mut().zip(col) {
                *o += c * x;
            }
        }
        out
    }

    /// If the basis is `[I 0; a]` (identity on the top `dim-1` rows, zero
    /// top of the last column), returns the bottom row `a`.
    pub fn approx_row(&self) -> Option<Vec<BigInt>> {
        let n = self.dim();
        if n < 2 {
            return None;
        }
        for (j, col) in self.cols.iter().enumerate() {
            for (i, x) in col[..n - 1].iter().enumerate() {
                let want = if i == j { BigInt::one() } else { BigInt::zero() };
                if *x != want {
                    return None;
                }
            }
        }
        Some(self.cols.iter().map(|c| c[n - 1].clone()).collect())
    }

    /// Exact determinant (fraction-free elimination).
    pub fn det(&self) -> BigInt {
        det_columns(&self.cols)
    }
}

fn det_columns(cols: &[Vec<BigInt>]) -> BigInt {
    let n = cols.len();
    let mut m: Vec<Vec<BigInt>> = (0..n).map(|i| (0..n).map(|j| cols[j][i].clone()).collect()).collect();
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n {
        if m[k][k].is_zero() {
            match (k + 1..n).find(|&r| !m[r][k].is_zero()) {
                Some(r) => {
                    m.swap(k, r);
                    sign = -sign;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = (&m[i][j] * &m[k][k] - &m[i][k] * &m[k][j]) / &prev;
                m[i][j] = v;
            }
        }
        prev = m[k][k].clone();
    }
    sign * &m[n - 1][n - 1]
}

/// LLL-reduced basis with exact Gram-Schmidt data.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReducedBasis {
    /// Reduced basis columns.
    pub basis: Vec<Vec<BigInt>>,
    /// `mu[i][j]` for `j < i`.
    pub gram_mu: Vec<Vec<BigRational>>,
    /// `|b*_i|^2`.
    pub gso_norms: Vec<BigRational>,
    /// Columns of `U` with `basis = input * U`.
    pub transform: Vec<Vec<BigInt>>,
}

impl ReducedBasis {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn is_size_reduced(&self) -> bool {
        let half = BigRational::new(BigInt::one(), BigInt::from(2));
        self.gram_mu.iter().flatten().all(|m| m.abs() <= half)
    }

    /// `|b*_i|^2 >= (delta - mu_{i,i-1}^2) |b*_{i-1}|^2` for all `i`.
    pub fn satisfies_lovasz(&self, delta: LovaszConstant) -> bool {
        let d = BigRational::new(BigInt::from(delta.p), BigInt::from(delta.q));
        (1..self.dim()).all(|i| {
            let m = &self.gram_mu[i][i - 1];
            self.gso_norms[i] >= (&d - m * m) * &self.gso_norms[i - 1]
        })
    }

    pub fn lattice(&self) -> Lattice {
        Lattice { cols: self.basis.clone() }
    }

    pub fn first_norm_sq(&self) -> BigInt {
        self.basis[0].iter().map(|x| x * x).sum()
    }

    pub fn det(&self) -> BigInt {
        det_columns(&self.basis)
    }

    pub fn transform_det(&self) -> BigInt {
        det_columns(&self.transform)
    }
}

/// `C * eta_i` rounded to the nearest integer along the bottom row under
/// an identity block. Each rounding must be certified by the enclosure of
/// `eta_i`; nearest rounding keeps every entry within 1/2 of `C * eta_i`,
/// which is what the `T` term of the bound lemma accounts for.
pub fn build_approx_lattice(etas: &[Interval], c: &BigInt) -> Result<Lattice> {
    let n = etas.len();
    if n < 2 {
        return Err(Error::domain("approximation lattice needs at least two reals"));
    }
    if !c.is_positive() {
        return Err(Error::domain("scaling constant must be positive"));
    }
    let cd = Dyadic::from_int(c.clone());
    let half = Dyadic::pow2(-1);
    let mut cols = Vec::with_capacity(n);
    for (j, eta) in etas.iter().enumerate() {
        let lo = eta.lo().mul(&cd).add(&half).floor();
        let hi = eta.hi().mul(&cd).add(&half).floor();
        if lo != hi {
            return Err(Error::precision(format!(
                "nearest integer to C * eta_{} is not determined by the enclosure",
                j + 1
            )));
        }
        let mut col = vec![BigInt::zero(); n];
        if j < n - 1 {
            col[j] = BigInt::one();
        }
        col[n - 1] = lo;
        cols.push(col);
    }
    Lattice::from_columns(cols)
}

/// Output of the lower-bound lemma: `c1^2 = max_j |b1|^2 / |b*_j|^2` and
/// `delta^2 = lambda^2 |b1|^2 / c1^2`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LowerBound {
    pub c1_sq: BigRational,
    pub delta_sq: BigRational,
    pub lambda: BigRational,
}

impl LowerBound {
    pub fn c1(&self) -> f64 {
        rat_sqrt_f64(&self.c1_sq)
    }

    pub fn delta(&self) -> f64 {
        rat_sqrt_f64(&self.delta_sq)
    }
}

fn rat_sqrt_f64(r: &BigRational) -> f64 {
    let d = Interval::from_rational(r, 128);
    d.sqrt().map(|s| s.to_f64()).unwrap_or(f64::NAN)
}

fn solve_rational(cols: &[Vec<BigInt>], y: &[BigInt]) -> Result<Vec<BigRational>> {
    let n = cols.len();
    let mut m: Vec<Vec<BigRational>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| BigRational::from_integer(cols[j][i].clone()))
                .chain(std::iter::once(BigRational::from_integer(y[i].clone())))
                .collect()
        })
        .collect();
    for k in 0..n {
        let piv = (k..n).find(|&r| !m[r][k].is_zero()).ok_or_else(|| Error::domain("singular basis"))?;
        m.swap(k, piv);
        let p = m[k][k].clone();
        for j in k..=n {
            m[k][j] = &m[k][j] / &p;
        }
        for i in 0..n {
            if i != k && !m[i][k].is_zero() {
                let f = m[i][k].clone();
                for j in k..=n {
                    let t = &f * &m[k][j];
                    m[i][j] -= t;
                }
            }
        }
    }
    Ok(m.into_iter().map(|row| row[n].clone()).collect())
}

/// Lower bound for the distance from `y` to the lattice (shortest nonzero
/// vector when `y` is zero or a lattice point).
///
/// With `z = B^-1 y`, `i0` the last index where `z` is not integral and
/// `lambda` the distance from `z_i0` to the nearest integer, every lattice
/// vector `v` (nonzero if `y` is in the lattice) has `|v - y| >= delta`.
pub fn certificate(red: &ReducedBasis, y: Option<&[BigInt]>) -> Result<LowerBound> {
    let n = red.dim();
    let b1 = BigRational::from_integer(red.first_norm_sq());
    let c1_sq = red
        .gso_norms
        .iter()
        .map(|g| &b1 / g)
        .max()
        .ok_or_else(|| Error::domain("empty basis"))?;
    let lambda = match y {
        None => BigRational::one(),
        Some(y) => {
            if y.len() != n {
                return Err(Error::domain("target vector has the wrong dimension"));
            }
            if y.iter().all(|v| v.is_zero()) {
                BigRational::one()
            } else {
                let z = solve_rational(&red.basis, y)?;
                match z.iter().rposition(|zi| !zi.is_integer()) {
                    None => BigRational::one(),
                    Some(i0) => {
                        let f = &z[i0] - z[i0].floor();
                        let g = BigRational::one() - &f;
                        if f < g {
                            f
                        } else {
                            g
                        }
                    }
                }
            }
        }
    };
    let delta_sq = &lambda * &lambda * &b1 / &c1_sq;
    Ok(LowerBound { c1_sq, delta_sq, lambda })
}

/// `S = sum_{i<dim} X_i^2`, `T = (1 + sum X_i) / 2`.
pub fn s_and_t(x: &[BigInt]) -> (BigRational, BigRational) {
    let n = x.len();
    let s: BigInt = x[..n.saturating_sub(1)].iter().map(|v| v * v).sum();
    let t = BigRational::new(BigInt::one() + x.iter().sum::<BigInt>(), BigInt::from(2));
    (BigRational::from_integer(s), t)
}

/// `H <= (log(C c3) - log(sqrt(delta^2 - S) - T)) / c4`, provided
/// `delta^2 > T^2 + S`; `None` otherwise.
pub fn lemma_bound(
    c: &BigRational,
    c3: &BigRational,
    c4: &Interval,
    delta_sq: &BigRational,
    s: &BigRational,
    t: &BigRational,
) -> Result<Option<Interval>> {
    lemma_bound_perturbed(c, c3, c4, delta_sq, s, t, None)
}

/// As [`lemma_bound`] when the reduced form differs from the original one
/// by at most `err` in absolute value: the bound becomes
/// `(log(C c3) - log(sqrt(delta^2 - S) - T - C err)) / c4` and needs the
/// subtracted quantity to stay positive.
pub fn lemma_bound_perturbed(
    c: &BigRational,
    c3: &BigRational,
    c4: &Interval,
    delta_sq: &BigRational,
    s: &BigRational,
    t: &BigRational,
    err: Option<&Interval>,
) -> Result<Option<Interval>> {
    let q = delta_sq - s;
    let gap = &q - t * t;
    if !gap.is_positive() || !c4.is_positive() || !c3.is_positive() || !c.is_positive() {
        return Ok(None);
    }
    let prec = c4.prec().max(256);
    // sqrt(q) - T = (q - T^2) / (sqrt(q) + T), free of cancellation
    let denom = &Interval::from_rational(&q, prec).sqrt()? + &Interval::from_rational(t, prec);
    let mut margin = Interval::from_rational(&gap, prec).div(&denom)?;
    if let Some(e) = err {
        margin = &margin - &(&e.abs() * &Interval::from_rational(c, prec));
        if !margin.is_positive() {
            return Ok(None);
        }
    }
    let log_cc3 = Interval::from_rational(&(c * c3), prec).ln()?;
    Ok(Some((&log_cc3 - &margin.ln()?).div(c4)?))
}

/// Applies the bound lemma to a certificate with coefficient bounds `X_i`.
pub fn reduce_bound(
    cert: &LowerBound,
    x: &[BigInt],
    c3: &BigRational,
    c4: &Interval,
    c: &BigInt,
) -> Result<Option<Interval>> {
    let (s, t) = s_and_t(x);
    lemma_bound(&BigRational::from_integer(c.clone()), c3, c4, &cert.delta_sq, &s, &t)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bi(v: i64) -> BigInt {
        BigInt::from(v)
    }

    fn lat(rows: &[[i64; 3]]) -> Lattice {
        Lattice::from_rows(&rows.iter().map(|r| r.iter().map(|&x| bi(x)).collect()).collect::<Vec<_>>())
            .unwrap()
    }

    #[test]
    fn identity_is_fixed() {
        let l = lat(&[[1, 0, 0], [0, 1, 0], [0, 0, 1]]);
        let r = lll_reduce(&l).unwrap();
        assert_eq!(r.basis, l.columns());
        let cert = certificate(&r, None).unwrap();
        assert_eq!(cert.c1_sq, BigRational::one());
        assert_eq!(cert.delta_sq, BigRational::one());
    }

    #[test]
    fn determinant_and_shape() {
        let l = lat(&[[1, 0, 0], [0, 1, 0], [10, 10, 10]]);
        assert_eq!(l.det(), bi(10));
        assert_eq!(l.approx_row().unwrap(), vec![bi(10), bi(10), bi(10)]);
        let r = lll_reduce(&l).unwrap();
        assert_eq!(r.det().abs(), bi(10));
        assert_eq!(r.transform_det().abs(), bi(1));
    }

    #[test]
    fn dependent_columns_rejected() {
        let l = lat(&[[1, 2, 0], [1, 2, 0], [0, 0, 1]]);
        assert!(lll_reduce(&l).is_err());
    }

    #[test]
    fn fractional_target_uses_nearest_integer_distance() {
        let l = lat(&[[2, 0, 0], [0, 2, 0], [0, 0, 2]]);
        let r = lll_reduce(&l).unwrap();
        // y = (0, 0, 3): z = (0, 0, 1.5), lambda = 1/2
        let c = certificate(&r, Some(&[bi(0), bi(0), bi(3)])).unwrap();
        assert_eq!(c.lambda, BigRational::new(bi(1), bi(2)));
        assert_eq!(c.delta_sq, BigRational::from_integer(bi(1)));
        // y = (0, 0, 5): z3 = 2.5, nearest-integer distance 1/2
        let c = certificate(&r, Some(&[bi(0), bi(0), bi(5)])).unwrap();
        assert_eq!(c.lambda, BigRational::new(bi(1), bi(2)));
    }

    #[test]
    fn approx_lattice_rounds_to_nearest() {
        let etas = [Interval::from_ratio(&bi(6), &bi(10), 128).unwrap(), Interval::from_int(1, 128)];
        let l = build_approx_lattice(&etas, &bi(1)).unwrap();
        assert_eq!(l.columns()[0], vec![bi(1), bi(1)]);
        let etas = [Interval::from_ratio(&bi(4), &bi(10), 128).unwrap(), Interval::from_int(1, 128)];
        let l = build_approx_lattice(&etas, &bi(1)).unwrap();
        assert_eq!(l.columns()[0], vec![bi(1), bi(0)]);
    }

    #[test]
    fn perturbed_bound_is_weaker() {
        let r = |v: i64| BigRational::from_integer(bi(v));
        let c4 = crate::real::ln_small(2, 128);
        let (c, c3, d2, s, t) = (r(1_000_000), r(1), r(10_000), r(100), r(10));
        let plain = lemma_bound(&c, &c3, &c4, &d2, &s, &t).unwrap().unwrap();
        let zero = Interval::from_int(0, 128);
        let same = lemma_bound_perturbed(&c, &c3, &c4, &d2, &s, &t, Some(&zero)).unwrap().unwrap();
        assert!((plain.to_f64() - same.to_f64()).abs() < 1e-12);
        let small = Interval::from_ratio(&bi(1), &bi(1_000_000_000), 128).unwrap();
        let weaker = lemma_bound_perturbed(&c, &c3, &c4, &d2, &s, &t, Some(&small)).unwrap().unwrap();
        assert!(weaker.to_f64() > plain.to_f64());
        let big = Interval::from_int(1, 128);
        assert!(lemma_bound_perturbed(&c, &c3, &c4, &d2, &s, &t, Some(&big)).unwrap().is_none());
    }

    #[test]
    fn lemma_bound_failure_branch() {
        let one = BigRational::one();
        let c4 = crate::real::ln_small(10, 128);
        let r = lemma_bound(
            &BigRational::from_integer(bi(10)),
            &one,
            &c4,
            &BigRational::from_integer(bi(4)),
            &BigRational::from_integer(bi(2)),
            &BigRational::from_integer(bi(2)),
        )
        .unwrap();
        assert!(r.is_none());
    }
}
