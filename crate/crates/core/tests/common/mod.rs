#![allow(dead_code)]

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Gram-Schmidt of the columns in exact rationals: `(mu, |b*_i|^2)`.
pub fn gso(cols: &[Vec<BigInt>]) -> (Vec<Vec<BigRational>>, Vec<BigRational>) {
    let n = cols.len();
    let dot = |a: &[BigRational], b: &[BigRational]| -> BigRational {
        a.iter().zip(b).fold(BigRational::zero(), |s, (x, y)| s + x * y)
    };
    let b: Vec<Vec<BigRational>> =
        cols.iter().map(|c| c.iter().map(|x| BigRational::from_integer(x.clone())).collect()).collect();
    let mut star: Vec<Vec<BigRational>> = Vec::new();
    let mut norms: Vec<BigRational> = Vec::new();
    let mut mu = vec![vec![BigRational::zero(); n]; n];
    for i in 0..n {
        let mut v = b[i].clone();
        for j in 0..i {
            mu[i][j] = dot(&b[i], &star[j]) / &norms[j];
            for (vi, sj) in v.iter_mut().zip(&star[j]) {
                *vi -= &mu[i][j] * sj;
            }
        }
        norms.push(dot(&v, &v));
        star.push(v);
    }
    (mu, norms)
}

pub fn det3(c: &[Vec<BigInt>]) -> BigInt {
    let m = |i: usize, j: usize| &c[j][i];
    m(0, 0) * (m(1, 1) * m(2, 2) - m(1, 2) * m(2, 1)) - m(0, 1) * (m(1, 0) * m(2, 2) - m(1, 2) * m(2, 0))
        + m(0, 2) * (m(1, 0) * m(2, 1) - m(1, 1) * m(2, 0))
}

pub fn norm_sq(v: &[BigInt]) -> BigInt {
    v.iter().map(|x| x * x).sum()
}

/// Squared length of a shortest nonzero lattice vector by Fincke-Pohst
/// enumeration within the radius `|b_1|`.
pub fn shortest_norm_sq(cols: &[Vec<BigInt>]) -> BigInt {
    let n = cols.len();
    let (mu, norms) = gso(cols);
    let r2 = BigRational::from_integer(norm_sq(&cols[0]));
    let mut best = norm_sq(&cols[0]);
    let mut coeffs = vec![BigInt::zero(); n];
    enumerate(cols, &mu, &norms, &r2, n, &mut coeffs, &mut best);
    best
}

fn enumerate(
    cols: &[Vec<BigInt>],
    mu: &[Vec<BigRational>],
    norms: &[BigRational],
    r2: &BigRational,
    level: usize,
    coeffs: &mut Vec<BigInt>,
    best: &mut BigInt,
) {
    if level == 0 {
        if coeffs.iter().all(|c| c.is_zero()) {
            return;
        }
        let dim = cols[0].len();
        let v: Vec<BigInt> = (0..dim).map(|r| cols.iter().zip(coeffs.iter()).map(|(c, x)| &c[r] * x).sum()).collect();
        let nv = norm_sq(&v);
        if nv < *best {
            *best = nv;
        }
        return;
    }
    let i = level - 1;
    let n = cols.len();
    // partial squared length from levels above i
    let mut used = BigRational::zero();
    for j in (i + 1)..n {
        let mut t = BigRational::from_integer(coeffs[j].clone());
        for l in (j + 1)..n {
            t += &mu[l][j] * BigRational::from_integer(coeffs[l].clone());
        }
        used += &t * &t * &norms[j];
    }
    let rem = r2 - &used;
    if rem.is_negative() {
        return;
    }
    let mut center = BigRational::zero();
    for l in (i + 1)..n {
        center -= &mu[l][i] * BigRational::from_integer(coeffs[l].clone());
    }
    let width = (&rem / &norms[i]).to_f64().unwrap().sqrt() + 1.0;
    let c = center.to_f64().unwrap();
    let lo = (c - width).floor() as i64;
    let hi = (c + width).ceil() as i64;
    for x in lo..=hi {
        coeffs[i] = BigInt::from(x);
        enumerate(cols, mu, norms, r2, level - 1, coeffs, best);
    }
    coeffs[i] = BigInt::zero();
}

pub fn half() -> BigRational {
    BigRational::new(BigInt::one(), BigInt::from(2))
}

/// Floor of the decimal digit count law: `len(str(v))`.
pub fn decimal_len(v: &BigInt) -> usize {
    v.abs().to_string().len()
}
