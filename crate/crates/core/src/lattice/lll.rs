//! Exact integral LLL and a bit-feeding pre-reduction for lattices of the
//! form `[I 0; a]` with very large `a`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::{Lattice, ReducedBasis};
use crate::error::{Error, Result};

/// Lovász constant as an exact fraction `p / q`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct LovaszConstant {
    pub p: u32,
    pub q: u32,
}

impl Default for LovaszConstant {
    fn default() -> Self {
        LovaszConstant { p: 3, q: 4 }
    }
}

impl LovaszConstant {
    pub fn new(p: u32, q: u32) -> Result<Self> {
        // 1/4 < p/q < 1
        if q == 0 || 4 * p <= q || p >= q {
            return Err(Error::domain(format!("Lovász constant {p}/{q} must lie in (1/4, 1)")));
        }
        Ok(LovaszConstant { p, q })
    }
}

fn round_div(a: &BigInt, b: &BigInt) -> BigInt {
    // nearest integer to a/b, b > 0
    ((a << 1u32) + b).div_floor(&(b << 1u32))
}

fn dot(x: &[BigInt], y: &[BigInt]) -> BigInt {
    x.iter().zip(y).map(|(a, b)| a * b).sum()
}

fn axpy(y: &mut [BigInt], q: &BigInt, x: &[BigInt]) {
    // y -= q x
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi -= q * xi;
    }
}

/// Integral LLL on the columns of `basis` (Cohen, Algorithm 2.6.7).
/// Returns the reduced basis together with the exact Gram-Schmidt data and
/// the unimodular transform `U` with `reduced = input * U`.
pub fn lll_exact(lat: &Lattice, delta: LovaszConstant) -> Result<ReducedBasis> {
    let n = lat.dim();
    // 1-indexed working arrays
    let mut b: Vec<Vec<BigInt>> = std::iter::once(Vec::new()).chain(lat.columns().iter().cloned()).collect();
    let mut h: Vec<Vec<BigInt>> = std::iter::once(Vec::new())
        .chain((0..n).map(|j| (0..n).map(|i| if i == j { BigInt::one() } else { BigInt::zero() }).collect()))
        .collect();
    let mut d = vec![BigInt::zero(); n + 1];
    let mut lam = vec![vec![BigInt::zero(); n + 1]; n + 1];
    d[0] = BigInt::one();
    if n == 0 {
        return Err(Error::domain("empty lattice"));
    }
    d[1] = dot(&b[1], &b[1]);
    if d[1].is_zero() {
        return Err(Error::domain("basis vectors are linearly dependent"));
    }
    let (p, q) = (BigInt::from(delta.p), BigInt::from(delta.q));
    let mut k = 2usize;
    let mut kmax = 1usize;

    fn red(
        k: usize,
        l: usize,
        b: &mut [Vec<BigInt>],
        h: &mut [Vec<BigInt>],
        lam: &mut [Vec<BigInt>],
        d: &[BigInt],
    ) {
        if (lam[k][l].abs() << 1u32) > d[l] {
            let qq = round_div(&lam[k][l], &d[l]);
            let (lo, hi) = b.split_at_mut(k);
            axpy(&mut hi[0], &qq, &lo[l]);
            let (lo, hi) = h.split_at_mut(k);
            axpy(&mut hi[0], &qq, &lo[l]);
            let t = &qq * &d[l];
            lam[k][l] -= t;
            for i in 1..l {
                let t = &qq * &lam[l][i];
                lam[k][i] -= t;
            }
        }
    }

    while k <= n {
        if k > kmax {
            kmax = k;
            for j in 1..=k {
                let mut u = dot(&b[k], &b[j]);
                for i in 1..j {
                    u = (&d[i] * &u - &lam[k][i] * &lam[j][i]) / &d[i - 1];
                }
                if j < k {
                    lam[k][j] = u;
                } else {
                    if u.is_zero() {
                        return Err(Error::domain("basis vectors are linearly dependent"));
                    }
                    d[k] = u;
                }
            }
        }
        red(k, k - 1, &mut b, &mut h, &mut lam, &d);
        let lhs = &q * &d[k] * &d[k - 2];
        let rhs = &p * &d[k - 1] * &d[k - 1] - &q * &lam[k][k - 1] * &lam[k][k - 1];
        if lhs < rhs {
            // swap k and k-1
            b.swap(k, k - 1);
            h.swap(k, k - 1);
            for j in 1..k - 1 {
                let t = lam[k][j].clone();
                lam[k][j] = lam[k - 1][j].clone();
                lam[k - 1][j] = t;
            }
            let l = lam[k][k - 1].clone();
            let bb = (&d[k - 2] * &d[k] + &l * &l) / &d[k - 1];
            for i in k + 1..=kmax {
                let t = lam[i][k].clone();
                lam[i][k] = (&d[k] * &lam[i][k - 1] - &l * &t) / &d[k - 1];
                lam[i][k - 1] = (&bb * &t + &l * &lam[i][k]) / &d[k];
            }
            d[k - 1] = bb;
            k = std::cmp::max(2, k - 1);
        } else {
            for l in (1..k - 1).rev() {
                red(k, l, &mut b, &mut h, &mut lam, &d);
            }
            k += 1;
        }
    }

    let gram_mu = (0..n)
        .map(|i| (0..i).map(|j| BigRational::new(lam[i + 1][j + 1].clone(), d[j + 1].clone())).collect())
        .collect();
    let gso_norms = (0..n).map(|i| BigRational::new(d[i + 1].clone(), d[i].clone())).collect();
    Ok(ReducedBasis {
        basis: b.into_iter().skip(1).collect(),
        gram_mu,
        gso_norms,
        transform: h.into_iter().skip(1).collect(),
    })
}

/// Bits of the bottom row fed per pre-reduction stage.
const FEED_BITS: u64 = 32;
/// Bits kept when truncating the working basis to machine integers.
const KEEP_BITS: u64 = 52;
const FP_ITER_LIMIT: usize = 100_000;

fn shr_floor(x: &BigInt, s: u64) -> BigInt {
    if s == 0 {
        x.clone()
    } else {
        x >> s
    }
}

/// Floating-point LLL on a small integer basis, used only as a heuristic
/// preconditioner; returns the transform (columns) or `None` on trouble.
fn fp_lll(basis: &[Vec<i128>], delta: f64) -> Option<Vec<Vec<i128>>> {
    let n = basis.len();
    let mut b: Vec<Vec<i128>> = basis.to_vec();
    let mut v: Vec<Vec<i128>> = (0..n).map(|j| (0..n).map(|i| (i == j) as i128).collect()).collect();
    let dimv = b[0].len();
    let mut k = 1usize;
    let mut iters = 0usize;
    let mut bs = vec![vec![0f64; dimv]; n];
    let mut norms = vec![0f64; n];
    let mut mu = vec![vec![0f64; n]; n];
    let gso = |b: &[Vec<i128>], upto: usize, bs: &mut [Vec<f64>], norms: &mut [f64], mu: &mut [Vec<f64>]| -> bool {
        for i in 0..=upto {
            let bi: Vec<f64> = b[i].iter().map(|&x| x as f64).collect();
            bs[i].copy_from_slice(&bi);
            for j in 0..i {
                let m = bi.iter().zip(&bs[j]).map(|(a, c)| a * c).sum::<f64>() / norms[j];
                mu[i][j] = m;
                for t in 0..bi.len() {
                    bs[i][t] -= m * bs[j][t];
                }
            }
            norms[i] = bs[i].iter().map(|x| x * x).sum();
            if !(norms[i] > 0.0) || !norms[i].is_finite() {
                return false;
            }
        }
        true
    };
    while k < n {
        iters += 1;
        if iters > FP_ITER_LIMIT {
            return None;
        }
        // size reduction, repeated while large multipliers lose precision
        loop {
            if !gso(&b, k, &mut bs, &mut norms, &mut mu) {
                return None;
            }
            let mut big = false;
            for j in (0..k).rev() {
                let qf = mu[k][j].round();
                if qf == 0.0 {
                    continue;
                }
                if qf.abs() > 1e30 {
                    return None;
                }
                if qf.abs() > (1u64 << 30) as f64 {
                    big = true;
                }
                let qi = qf as i128;
                for t in 0..dimv {
                    b[k][t] = b[k][t].checked_sub(qi.checked_mul(b[j][t])?)?;
                }
                for t in 0..n {
                    v[k][t] = v[k][t].checked_sub(qi.checked_mul(v[j][t])?)?;
                }
                for i in 0..j {
                    mu[k][i] -= qf * mu[j][i];
                }
                mu[k][j] -= qf;
            }
            if !big {
                break;
            }
        }
        if !gso(&b, k, &mut bs, &mut norms, &mut mu) {
            return None;
        }
        let m = mu[k][k - 1];
        if norms[k] < (delta - m * m) * norms[k - 1] {
            b.swap(k, k - 1);
            v.swap(k, k - 1);
            k = std::cmp::max(k - 1, 1);
        } else {
            k += 1;
        }
    }
    Some(v)
}

/// Pre-reduce `[I 0; a]` by feeding the bits of `a` a few at a time and
/// reducing a truncated copy in machine arithmetic after each step.
/// Returns the accumulated unimodular transform (columns).
pub(crate) fn feed_prereduce(a: &[BigInt]) -> Vec<Vec<BigInt>> {
    let n = a.len();
    let id = |j: usize| -> Vec<BigInt> { (0..n).map(|i| if i == j { BigInt::one() } else { BigInt::zero() }).collect() };
    let mut u: Vec<Vec<BigInt>> = (0..n).map(id).collect();
    let total = a.iter().map(|x| x.bits()).max().unwrap_or(0);
    if total <= FEED_BITS {
        return u;
    }
    // w[j] = (a >> shift) . u[j]
    let mut shift = total - FEED_BITS;
    let mut w: Vec<BigInt> = a.iter().map(|x| shr_floor(x, shift)).collect();
    loop {
        // visible basis: top n-1 coordinates of u, then w
        let cols: Vec<Vec<&BigInt>> =
            (0..n).map(|j| u[j][..n - 1].iter().chain(std::iter::once(&w[j])).collect()).collect();
        let emax = cols.iter().flatten().map(|x| x.bits()).max().unwrap_or(0);
        let t = emax.saturating_sub(KEEP_BITS);
        let small: Vec<Vec<i128>> = cols
            .iter()
            .map(|c| c.iter().map(|x| shr_floor(x, t).to_i128().unwrap_or(0)).collect())
            .collect();
        if let Some(v) = fp_lll(&small, 0.99) {
            let vb: Vec<Vec<BigInt>> = v.iter().map(|c| c.iter().map(|&x| BigInt::from(x)).collect()).collect();
            let combine = |src: &[Vec<BigInt>]| -> Vec<Vec<BigInt>> {
                vb.iter()
                    .map(|coef| {
                        let mut out = vec![BigInt::zero(); src[0].len()];
                        for (c, s) in coef.iter().zip(src) {
                            if !c.is_zero() {
                                for (o, x) in out.iter_mut().zip(s) {
                                    *o += c * x;
                                }
                            }
                        }
                        out
                    })
                    .collect()
            };
            u = combine(&u);
            let wv: Vec<Vec<BigInt>> = w.iter().map(|x| vec![x.clone()]).collect();
            w = combine(&wv).into_iter().map(|mut x| x.pop().unwrap()).collect();
        }
        if shift == 0 {
            break;
        }
        let step = std::cmp::min(FEED_BITS, shift);
        let next_shift = shift - step;
        // (a >> next) = 2^step (a >> shift) + r, 0 <= r < 2^step
        let r: Vec<BigInt> = a
            .iter()
            .map(|x| shr_floor(x, next_shift) - (shr_floor(x, shift) << step))
            .collect();
        for j in 0..n {
            let extra: BigInt = r.iter().zip(&u[j]).map(|(ri, ui)| ri * ui).sum();
            w[j] = (&w[j] << step) + extra;
        }
        shift = next_shift;
    }
    u
}

/// LLL-reduce a lattice. Lattices of the approximation shape `[I 0; a]`
/// with large entries are pre-reduced by bit feeding; the result is always
/// certified by a final exact pass.
pub fn lll_reduce_with(lat: &Lattice, delta: LovaszConstant) -> Result<ReducedBasis> {
    if let Some(a) = lat.approx_row() {
        if a.iter().map(|x| x.bits()).max().unwrap_or(0) > 2 * KEEP_BITS {
            let u = feed_prereduce(&a);
            let cols: Vec<Vec<BigInt>> = u.iter().map(|uj| lat.apply(uj)).collect();
            let mid = Lattice::from_columns(cols)?;
            let mut red = lll_exact(&mid, delta)?;
            // compose transforms: reduced = lat * U * V
            red.transform = red
                .transform
                .iter()
                .map(|vj| {
                    let mut out = vec![BigInt::zero(); u.len()];
                    for (c, uj) in vj.iter().zip(&u) {
                        for (o, x) in out.iter_mut().zip(uj) {
                            *o += c * x;
                        }
                    }
                    out
                })
                .collect();
            return Ok(red);
        }
    }
    lll_exact(lat, delta)
}

pub fn lll_reduce(lat: &Lattice) -> Result<ReducedBasis> {
    lll_reduce_with(lat, LovaszConstant::default())
}
