//! One reduction round: build the approximation lattice for every cell of
//! a parameter grid, certify a lower bound, and collect the exponent bounds.

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{build_approx_lattice, certificate, lemma_bound_perturbed, lll_reduce_with, s_and_t};
use super::{Lattice, LovaszConstant, LowerBound, ReducedBasis};
use crate::algebraic::isolate_alpha;
use crate::baker::{inner_block, FormKind};
use crate::error::{Error, Result};
use crate::numfmt::{sci_dyadic, sci_int, sci_rational};
use crate::real::{ln_small, Interval, PrecisionContext, Round};

/// Everything produced while certifying one lattice.
#[derive(Clone, Debug)]
pub struct ReductionCertificate {
    pub c: BigInt,
    pub etas: Vec<Interval>,
    pub lattice: Lattice,
    pub reduced: ReducedBasis,
    pub lower: LowerBound,
    pub s: BigRational,
    pub t: BigRational,
    pub h: Option<Interval>,
}

/// Reduce one lattice built from `etas` and apply the bound lemma with
/// coefficient bounds `xs`. `perturbation` bounds the distance between the
/// linear form being reduced and the one the bound `c3 exp(-c4 H)` holds for.
pub fn certify(
    etas: &[Interval],
    c: &BigInt,
    xs: &[BigInt],
    c3: &BigRational,
    c4: &Interval,
    delta: LovaszConstant,
    perturbation: Option<&Interval>,
) -> Result<ReductionCertificate> {
    if xs.len() != etas.len() {
        return Err(Error::domain("one coefficient bound per real is required"));
    }
    let lattice = build_approx_lattice(etas, c)?;
    let reduced = lll_reduce_with(&lattice, delta)?;
    let lower = certificate(&reduced, None)?;
    let (s, t) = s_and_t(xs);
    let cr = BigRational::from_integer(c.clone());
    let h = lemma_bound_perturbed(&cr, c3, c4, &lower.delta_sq, &s, &t, perturbation)?;
    Ok(ReductionCertificate { c: c.clone(), etas: etas.to_vec(), lattice, reduced, lower, s, t, h })
}

/// One point of the parameter grid. Fields a form does not use are `None`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct RoundCell {
    pub k: Option<u32>,
    pub d1: u32,
    pub d2: Option<u32>,
    pub ell: Option<u64>,
}

/// Parameters shared by every cell of a round.
#[derive(Clone, Debug)]
pub struct RoundSpec {
    pub form: FormKind,
    /// Starting scaling constant.
    pub c: BigInt,
    /// Bound on every integer coefficient.
    pub n_bound: BigInt,
    pub c3: BigRational,
    /// Retries with a larger constant when the lemma does not apply.
    pub escalations: u32,
    pub escalation_factor: BigInt,
    pub delta: LovaszConstant,
    /// Keep every per-cell record (otherwise only the worst and unresolved).
    pub keep_records: bool,
}

impl RoundSpec {
    pub fn new(form: FormKind, c: BigInt, n_bound: BigInt, c3: BigRational) -> Self {
        RoundSpec {
            form,
            c,
            n_bound,
            c3,
            escalations: 5,
            escalation_factor: BigInt::from(1000),
            delta: LovaszConstant::default(),
            keep_records: true,
        }
    }

    /// `log 10` for the alpha forms, `log 2` for the rational ones.
    pub fn c4(&self, prec: u32) -> Interval {
        if self.form.uses_alpha() {
            ln_small(10, prec)
        } else {
            ln_small(2, prec)
        }
    }
}

/// Grid of cells for a form: `k` over `ks` (alpha forms only), `d1` over
/// 1..9, and for the inner-block forms every `d2 != d1` and `ell` over `ells`.
pub fn grid(form: FormKind, ks: &[u32], ells: &[u64]) -> Vec<RoundCell> {
    let ks: Vec<Option<u32>> = if form.uses_alpha() { ks.iter().map(|&k| Some(k)).collect() } else { vec![None] };
    let mut out = Vec::new();
    for &k in &ks {
        if form.uses_inner_block() {
            for &ell in ells {
                for d1 in 1..=9 {
                    for d2 in (0..=9).filter(|&d| d != d1) {
                        out.push(RoundCell { k, d1, d2: Some(d2), ell: Some(ell) });
                    }
                }
            }
        } else {
            for d1 in 1..=9 {
                out.push(RoundCell { k, d1, d2: None, ell: None });
            }
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RoundRecord {
    pub k: Option<u32>,
    pub d1: u32,
    pub d2: Option<u32>,
    pub ell: Option<u64>,
    #[serde(rename = "C_used")]
    pub c_used: String,
    pub delta: Option<String>,
    #[serde(rename = "S")]
    pub s: String,
    #[serde(rename = "T")]
    pub t: String,
    /// Upper bound from the lemma, rounded up.
    #[serde(rename = "H")]
    pub h: Option<f64>,
    pub escalations: u32,
    /// Dimension of the lattice that produced `H`.
    pub rank: u32,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub error: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RoundSummary {
    pub form: FormKind,
    pub cells_total: usize,
    pub cells: Vec<RoundRecord>,
    #[serde(rename = "max_H")]
    pub max_h: Option<f64>,
    /// Cell attaining `max_H`.
    pub worst: Option<RoundRecord>,
    pub unresolved: Vec<RoundRecord>,
}

impl RoundSummary {
    pub fn resolved(&self) -> bool {
        self.unresolved.is_empty() && self.max_h.is_some()
    }

    /// `floor(max_H)`.
    pub fn floor_max_h(&self) -> Option<u64> {
        self.max_h.map(|h| h.floor() as u64)
    }
}

/// Logs of the alpha-dependent reals for one `k` at one precision.
struct AlphaLogs {
    log_alpha: Interval,
    log_nine_coef: Interval,
}

fn alpha_logs(k: u32, prec: u32) -> Result<AlphaLogs> {
    let alg = isolate_alpha(k, PrecisionContext::new(prec)?)?;
    let nine = alg.binet_coefficient().mul_int(&BigInt::from(9));
    Ok(AlphaLogs { log_alpha: alg.log_alpha().clone(), log_nine_coef: nine.ln()? })
}

/// `log(d1 10^ell - (d1 - d2))` via `ell log 10 + log d1 + log(q / (d1 10^ell))`.
fn log_inner_block(d1: u32, d2: u32, ell: u64, prec: u32) -> Result<Interval> {
    let q = inner_block(d1, d2, ell);
    let lead = BigInt::from(d1) * num_traits::pow(BigInt::from(10), ell as usize);
    let tail = Interval::ln_ratio(&q, &lead, prec)?;
    let head = &ln_small(10, prec).mul_int(&BigInt::from(ell)) + &ln_small(d1 as u64, prec);
    Ok(&head + &tail)
}

fn cell_inner_block(cell: &RoundCell) -> Result<(u32, u64)> {
    let d2 = cell.d2.ok_or_else(|| Error::domain("cell needs d2"))?;
    let ell = cell.ell.ok_or_else(|| Error::domain("cell needs ell"))?;
    Ok((d2, ell))
}

fn etas_for(form: FormKind, cell: &RoundCell, prec: u32, alpha: Option<&AlphaLogs>) -> Result<Vec<Interval>> {
    let ln10 = ln_small(10, prec);
    let ln2 = ln_small(2, prec);
    let ln27 = ln_small(27, prec);
    let inner = || -> Result<Interval> {
        let (d2, ell) = cell_inner_block(cell)?;
        log_inner_block(cell.d1, d2, ell, prec)
    };
    Ok(match form {
        FormKind::G1 | FormKind::G2 => {
            let a = alpha.ok_or_else(|| Error::domain("alpha forms need k"))?;
            let denom = if form == FormKind::G1 { ln_small(cell.d1 as u64, prec) } else { inner()? };
            vec![a.log_alpha.clone(), -&ln10, &a.log_nine_coef - &denom]
        }
        FormKind::G3 => vec![&ln_small(cell.d1 as u64, prec) - &ln27, ln10, -&ln2],
        FormKind::G4 => vec![&inner()? - &ln27, ln10, -&ln2],
    })
}

/// `(i, j)` with `q = 27 * 2^i * 5^j`, if such exponents exist.
pub fn smooth_over_27(q: &BigInt) -> Option<(u32, u32)> {
    use num_integer::Integer;
    use num_traits::{One, Signed, Zero};
    let (mut r, rem) = q.div_rem(&BigInt::from(27));
    if !rem.is_zero() || !r.is_positive() {
        return None;
    }
    let i = r.trailing_zeros().unwrap_or(0) as u32;
    r >>= i;
    let five = BigInt::from(5);
    let mut j = 0;
    while (&r % &five).is_zero() {
        r /= &five;
        j += 1;
    }
    r.is_one().then_some((i, j))
}

/// Reals, coefficient bounds and perturbation for one lattice.
struct Prepared {
    etas: Vec<Interval>,
    xs: Vec<BigInt>,
    perturbation: Option<Interval>,
}

fn prepare_full(spec: &RoundSpec, cell: &RoundCell, prec: u32, alpha: Option<&AlphaLogs>) -> Result<Prepared> {
    Ok(Prepared {
        etas: etas_for(spec.form, cell, prec, alpha)?,
        xs: vec![spec.n_bound.clone(); 3],
        perturbation: None,
    })
}

/// Exponents `(i, j)` when the cell's inner block is `27 * 2^i * 5^j`.
///
/// For such blocks `log(q / 27)` is an integer combination of `log 2` and
/// `log 10`, and once `alpha` is close to 2 the constant of the alpha form
/// is too (`9 f_k(alpha)(2 alpha - 1)` tends to `27 / 2`). The three-term
/// lattice then contains a genuinely short vector and cannot certify
/// anything, so the form is rewritten over `log 2` and `log 10` alone.
fn dependent_block(spec: &RoundSpec, cell: &RoundCell) -> Option<(u32, u32)> {
    if !matches!(spec.form, FormKind::G2 | FormKind::G4) {
        return None;
    }
    let (d2, ell) = cell_inner_block(cell).ok()?;
    smooth_over_27(&inner_block(cell.d1, d2, ell))
}

fn prepare_collapsed(
    spec: &RoundSpec,
    cell: &RoundCell,
    (i, j): (u32, u32),
    prec: u32,
    alpha: Option<&AlphaLogs>,
) -> Result<Prepared> {
    let x = &spec.n_bound;
    let ln2 = ln_small(2, prec);
    let ln10 = ln_small(10, prec);
    let (i, j) = (i as i64, j as i64);
    let bound = |m: i64| x * BigInt::from(1 + m.abs());
    match spec.form {
        FormKind::G4 => {
            // log(q/27) = j log 10 + (j - i)(-log 2), exactly
            Ok(Prepared { etas: vec![ln10, -&ln2], xs: vec![bound(j), bound(j - i)], perturbation: None })
        }
        FormKind::G2 => {
            let full = etas_for(spec.form, cell, prec, alpha)?;
            // 27 / (2q) = 2^(j-i-1) 10^(-j)
            let (a, b) = (j - i - 1, j);
            let approx = &ln2.mul_int(&BigInt::from(a)) - &ln10.mul_int(&BigInt::from(b));
            let rho1 = &full[0] - &ln2;
            let rho3 = &full[2] - &approx;
            let err = (&rho1.abs() + &rho3.abs()).mul_int(x);
            Ok(Prepared { etas: vec![ln2, -&ln10], xs: vec![bound(a), bound(b)], perturbation: Some(err) })
        }
        _ => Err(Error::domain("only inner-block forms collapse")),
    }
}

type AlphaCache = Mutex<HashMap<u32, Arc<AlphaLogs>>>;

fn cached_alpha(cache: &AlphaCache, k: u32, prec: u32) -> Result<Arc<AlphaLogs>> {
    if let Some(v) = cache.lock().unwrap().get(&prec) {
        return Ok(v.clone());
    }
    let v = Arc::new(alpha_logs(k, prec)?);
    cache.lock().unwrap().insert(prec, v.clone());
    Ok(v)
}

/// Tries `c_start` and its escalations; fills `rec` and reports success.
fn escalate(
    spec: &RoundSpec,
    cell: &RoundCell,
    cache: &AlphaCache,
    rec: &mut RoundRecord,
    c_start: &BigInt,
    prepare: &dyn Fn(u32, Option<&AlphaLogs>) -> Result<Prepared>,
) -> bool {
    let mut c = c_start.clone();
    for attempt in 0..=spec.escalations {
        rec.escalations = attempt;
        rec.c_used = sci_int(&c, 3);
        let mut extra = 0u32;
        let outcome = loop {
            let prec = c.bits() as u32 + 96 + extra;
            let mut attempt_once = || -> Result<ReductionCertificate> {
                let alpha = match cell.k {
                    Some(k) if spec.form.uses_alpha() => Some(cached_alpha(cache, k, prec)?),
                    _ => None,
                };
                let p = prepare(prec, alpha.as_deref())?;
                let (s, t) = s_and_t(&p.xs);
                rec.s = sci_rational(&s, 4);
                rec.t = sci_rational(&t, 4);
                certify(&p.etas, &c, &p.xs, &spec.c3, &spec.c4(prec), spec.delta, p.perturbation.as_ref())
            };
            match attempt_once() {
                Err(e) if e.is_precision() && extra < 256 => extra += 64,
                other => break other,
            }
        };
        match outcome {
            Ok(cert) => {
                rec.delta = Interval::from_rational(&cert.lower.delta_sq, 128)
                    .sqrt()
                    .ok()
                    .map(|x| sci_dyadic(x.lo(), 4));
                if let Some(h) = cert.h {
                    rec.h = Some(h.hi().to_f64_dir(Round::Up));
                    rec.error = None;
                    return true;
                }
                rec.error = Some("delta^2 < T^2 + S".into());
            }
            Err(e) => {
                rec.error = Some(e.to_string());
                if !e.is_precision() {
                    return false;
                }
            }
        }
        c *= &spec.escalation_factor;
    }
    false
}

fn run_cell(spec: &RoundSpec, cell: &RoundCell, cache: &AlphaCache) -> RoundRecord {
    let mut rec = RoundRecord {
        k: cell.k,
        d1: cell.d1,
        d2: cell.d2,
        ell: cell.ell,
        c_used: sci_int(&spec.c, 3),
        delta: None,
        s: String::new(),
        t: String::new(),
        h: None,
        escalations: 0,
        rank: 3,
        error: None,
    };
    if let Some(ij) = dependent_block(spec, cell) {
        // scale for a rank-2 lattice: about (sum of bounds)^2, with room
        let prepare = |prec: u32, alpha: Option<&AlphaLogs>| prepare_collapsed(spec, cell, ij, prec, alpha);
        let ys = prepare_collapsed_bounds(spec, ij);
        let c2 = &ys * &ys * BigInt::from(1000);
        rec.rank = 2;
        if escalate(spec, cell, cache, &mut rec, &c2, &prepare) {
            return rec;
        }
        rec.rank = 3;
    }
    let prepare = |prec: u32, alpha: Option<&AlphaLogs>| prepare_full(spec, cell, prec, alpha);
    escalate(spec, cell, cache, &mut rec, &spec.c, &prepare);
    rec
}

/// Sum of the rank-2 coefficient bounds.
fn prepare_collapsed_bounds(spec: &RoundSpec, (i, j): (u32, u32)) -> BigInt {
    let (i, j) = (i as i64, j as i64);
    let (a, b) = match spec.form {
        FormKind::G4 => (j, j - i),
        _ => (j - i - 1, j),
    };
    &spec.n_bound * BigInt::from(2 + a.abs() + b.abs())
}

/// Runs every cell (in parallel on the current rayon pool) and merges the
/// results deterministically in grid order.
pub fn reduction_round(spec: &RoundSpec, cells: &[RoundCell]) -> Result<RoundSummary> {
    if cells.is_empty() {
        return Err(Error::domain("reduction round needs at least one cell"));
    }
    if spec.form.uses_alpha() && cells.iter().any(|c| c.k.is_none()) {
        return Err(Error::domain("alpha forms need k in every cell"));
    }
    // group consecutive cells by k so alpha is isolated once per k
    let mut groups: Vec<(Option<u32>, Vec<RoundCell>)> = Vec::new();
    for c in cells {
        match groups.last_mut() {
            Some((k, v)) if *k == c.k => v.push(*c),
            _ => groups.push((c.k, vec![*c])),
        }
    }
    let keep = spec.keep_records;
    let partial: Vec<(Vec<RoundRecord>, Option<RoundRecord>, Vec<RoundRecord>)> = groups
        .par_iter()
        .map(|(_, group)| {
            let cache: AlphaCache = Mutex::new(HashMap::new());
            let recs: Vec<RoundRecord> = group.par_iter().map(|cell| run_cell(spec, cell, &cache)).collect();
            let worst = recs
                .iter()
                .filter(|r| r.h.is_some())
                .max_by(|a, b| a.h.partial_cmp(&b.h).unwrap())
                .cloned();
            let unresolved: Vec<RoundRecord> = recs.iter().filter(|r| r.h.is_none()).cloned().collect();
            (if keep { recs } else { Vec::new() }, worst, unresolved)
        })
        .collect();
    let mut summary = RoundSummary {
        form: spec.form,
        cells_total: cells.len(),
        cells: Vec::new(),
        max_h: None,
        worst: None,
        unresolved: Vec::new(),
    };
    for (recs, worst, unresolved) in partial {
        summary.cells.extend(recs);
        summary.unresolved.extend(unresolved);
        if let Some(w) = worst {
            // strict comparison keeps the first cell in grid order on ties
            if summary.max_h.is_none_or(|m| w.h.unwrap() > m) {
                summary.max_h = w.h;
                summary.worst = Some(w);
            }
        }
    }
    if !summary.unresolved.is_empty() {
        summary.max_h = None;
    }
    Ok(summary)
}

/// Convert an `f64` bound such as `8.8e58` to the next integer up.
pub fn ceil_f64_to_int(x: f64) -> BigInt {
    let d = crate::real::Dyadic::from_f64(x.ceil()).expect("finite bound");
    d.ceil()
}

/// `floor(H / log2 10)`: the cap on `ell` from `ell log2 10 <= H`.
pub fn ell_cap_from_log2_bound(h: f64) -> u64 {
    let l = (h * std::f64::consts::LN_2 / std::f64::consts::LN_10).floor();
    l.to_u64().unwrap_or(0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::One;
    use crate::constants as pc;
    use crate::numfmt::parse_integer;

    #[test]
    fn grid_sizes() {
        assert_eq!(grid(FormKind::G1, &[3, 4], &[]).len(), 18);
        assert_eq!(grid(FormKind::G2, &[3], &[1, 2]).len(), 162);
        assert_eq!(grid(FormKind::G3, &[], &[]).len(), 9);
        assert_eq!(grid(FormKind::G4, &[], &[1]).len(), 81);
    }

    #[test]
    fn inner_block_log_matches_direct() {
        let a = log_inner_block(2, 1, 1, 256).unwrap();
        assert!((a.to_f64() - 19f64.ln()).abs() < 1e-14);
        let b = log_inner_block(9, 0, 30, 256).unwrap();
        let direct = Interval::ln_ratio(&inner_block(9, 0, 30), &BigInt::one(), 256).unwrap();
        assert!(a.width().magnitude_exp() < -200);
        assert!(b.certainly_lt(&direct).is_none());
    }

    #[test]
    fn smooth_parts() {
        assert_eq!(smooth_over_27(&BigInt::from(27)), Some((0, 0)));
        assert_eq!(smooth_over_27(&BigInt::from(108)), Some((2, 0)));
        assert_eq!(smooth_over_27(&BigInt::from(2700)), Some((2, 2)));
        assert_eq!(smooth_over_27(&BigInt::from(81)), None);
        assert_eq!(smooth_over_27(&BigInt::from(28)), None);
        assert_eq!(smooth_over_27(&BigInt::from(-27)), None);
    }

    #[test]
    fn dependent_cells_are_the_known_five() {
        let mut found = Vec::new();
        for ell in 1..=578u64 {
            for d1 in 1..=9u32 {
                for d2 in (0..=9u32).filter(|&d| d != d1) {
                    if smooth_over_27(&inner_block(d1, d2, ell)).is_some() {
                        found.push((ell, d1, d2));
                    }
                }
            }
        }
        assert_eq!(found, vec![(1, 2, 9), (1, 3, 0), (1, 5, 9), (1, 6, 0), (2, 1, 9)]);
    }

    #[test]
    fn dependent_cells_resolve_in_rank_two() {
        let spec = RoundSpec::new(
            FormKind::G4,
            parse_integer(pc::CASE2_R2_C).unwrap(),
            parse_integer(pc::CASE2_R2_N_BOUND).unwrap(),
            BigRational::from_integer(BigInt::from(11)),
        );
        let cells = [RoundCell { k: None, d1: 3, d2: Some(0), ell: Some(1) }];
        let s = reduction_round(&spec, &cells).unwrap();
        assert!(s.resolved());
        assert_eq!(s.cells[0].rank, 2);
        let cells = [RoundCell { k: None, d1: 3, d2: Some(1), ell: Some(1) }];
        let s = reduction_round(&spec, &cells).unwrap();
        assert!(s.resolved());
        assert_eq!(s.cells[0].rank, 3);
    }

    #[test]
    fn ell_cap() {
        assert_eq!(ell_cap_from_log2_bound(1921.0), 578);
        assert_eq!(ell_cap_from_log2_bound(419.0), 126);
    }
}
