//! End-to-end driver: digit-count consistency, the power case `n <= k`,
//! the reduction rounds and exhaustive search for `k <= 1500`, the
//! symbolic bound chain for `k > 1500`, and a JSON report.

use std::path::{Path, PathBuf};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::algebraic::isolate_alpha;
use crate::baker::{bound_n, bound_n_log10, case2_k_bounds, Case2Branch, FormKind};
use crate::constants as pc;
use crate::error::{Error, Result};
use crate::lattice::round::{ceil_f64_to_int, ell_cap_from_log2_bound, grid};
use crate::lattice::{reduction_round, RoundRecord, RoundSpec, RoundSummary};
use crate::numfmt::{parse_integer, sci_int};
use crate::palindrome::{
    compose, decompose, power_case_search, small_case_filter, PalindromeDecomposition, PowerCaseHit,
};
use crate::real::{Interval, PrecisionContext};
use crate::sequence::KLucasContext;

pub const REPORT_VERSION: u32 = 1;

/// Decimal values longer than this are replaced by a digest in reports.
pub const ELIDE_DIGITS: usize = 10_000;

fn default_precision() -> u32 {
    256
}

/// Run configuration. Read from a flat TOML table; the `gamma*` keys
/// restrict the reduction sweeps to samples.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub k_min: u32,
    pub k_max: u32,
    /// Largest `n` searched. Absent: the cap derived from the reductions.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_cap: Option<u64>,
    #[serde(default = "default_precision")]
    pub precision_bits: u32,
    /// Worker threads; 0 uses every core.
    #[serde(default)]
    pub parallelism: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    /// `k` values for the first alpha form; default every `k` in range.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma1_ks: Option<Vec<u32>>,
    /// `k` values for the second alpha form; default every `k` in range.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma2_ks: Option<Vec<u32>>,
    /// Stride through `ell` for the second alpha form.
    #[serde(default = "one")]
    pub gamma2_ell_step: u64,
    /// Stride through `ell` for the rational inner-block form.
    #[serde(default = "one")]
    pub gamma4_ell_step: u64,
}

fn one() -> u64 {
    1
}

impl RunConfig {
    /// `k` in 3..=60, `n <= 400`, reductions sampled.
    pub fn desk() -> Self {
        RunConfig {
            k_min: 3,
            k_max: 60,
            n_cap: Some(400),
            precision_bits: 256,
            parallelism: 0,
            out: None,
            gamma1_ks: None,
            gamma2_ks: Some(vec![3, 60]),
            gamma2_ell_step: 10,
            gamma4_ell_step: 50,
        }
    }

    /// The whole range `k <= 1500` with every reduction cell.
    pub fn full() -> Self {
        RunConfig {
            k_min: 3,
            k_max: pc::K_SPLIT,
            n_cap: None,
            precision_bits: 256,
            parallelism: 0,
            out: None,
            gamma1_ks: None,
            gamma2_ks: None,
            gamma2_ell_step: 1,
            gamma4_ell_step: 1,
        }
    }

    pub fn preset(name: &str) -> Result<Self> {
        match name {
            "desk" => Ok(Self::desk()),
            "full" => Ok(Self::full()),
            other => Err(Error::Config(format!("unknown preset {other:?} (expected desk or full)"))),
        }
    }

    pub fn from_toml_str(s: &str) -> Result<Self> {
        let cfg: RunConfig = toml::from_str(s).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        Self::from_toml_str(&std::fs::read_to_string(path)?)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(m));
        if self.k_min < 3 {
            return bad(format!("k_min must be at least 3, got {}", self.k_min));
        }
        if self.k_max < self.k_min {
            return bad(format!("k_max {} is below k_min {}", self.k_max, self.k_min));
        }
        if let Some(n) = self.n_cap {
            if n < 8 {
                return bad(format!("n_cap must be at least 8, got {n}"));
            }
        }
        if self.precision_bits < crate::real::MIN_PRECISION {
            return bad(format!("precision_bits must be at least {}", crate::real::MIN_PRECISION));
        }
        if self.gamma2_ell_step == 0 || self.gamma4_ell_step == 0 {
            return bad("ell steps must be positive".into());
        }
        for ks in [&self.gamma1_ks, &self.gamma2_ks].into_iter().flatten() {
            if ks.is_empty() || ks.iter().any(|&k| !(3..=pc::K_SPLIT).contains(&k)) {
                return bad(format!("reduction k lists must be nonempty and within 3..={}", pc::K_SPLIT));
            }
        }
        Ok(())
    }

    /// Search range for `k` within the first case.
    fn case1_ks(&self) -> Option<(u32, u32)> {
        let hi = self.k_max.min(pc::K_SPLIT);
        (self.k_min <= hi).then_some((self.k_min, hi))
    }

    /// Every cell of every round and the full search range are covered.
    pub fn is_full_scale(&self) -> bool {
        let all_ks = |ks: &Option<Vec<u32>>| match ks {
            None => true,
            Some(v) => (3..=pc::K_SPLIT).all(|k| v.contains(&k)),
        };
        self.k_min == 3
            && self.k_max >= pc::K_SPLIT
            && self.n_cap.is_none()
            && all_ks(&self.gamma1_ks)
            && all_ks(&self.gamma2_ks)
            && self.gamma2_ell_step == 1
            && self.gamma4_ell_step == 1
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StageStatus {
    Passed,
    Failed,
    Skipped,
}

/// `2 ell + m - 3 < n < 5 (2 ell + m) + 1`.
pub fn digit_bound_check(_k: u32, n: u64, ell: u64, m: u64) -> bool {
    let d = 2 * ell + m;
    d < n + 3 && n < 5 * d + 1
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DigitBoundViolation {
    pub k: u32,
    pub n: u64,
    pub digits: u64,
    pub reason: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DigitBoundStage {
    pub status: StageStatus,
    pub checked: u64,
    pub violations: Vec<DigitBoundViolation>,
}

/// For `k` in range (at most the first 60 values) and `8 <= n <= 300`:
/// certified `alpha^(n-1) <= L_n <= 2 alpha^n`, and the digit count of
/// `L_n` satisfies the digit-window inequality.
pub fn run_digit_bounds(cfg: &RunConfig) -> Result<DigitBoundStage> {
    let hi = cfg.k_max.min(cfg.k_min + 59);
    let ks: Vec<u32> = (cfg.k_min..=hi).collect();
    let per_k: Vec<Result<(u64, Vec<DigitBoundViolation>)>> = ks
        .par_iter()
        .map(|&k| {
            let alg = isolate_alpha(k, PrecisionContext::new(cfg.precision_bits)?)?;
            let mut seq = KLucasContext::new(k)?;
            seq.extend_to(300)?;
            let mut checked = 0;
            let mut bad = Vec::new();
            for n in 8..=300u64 {
                let l = seq.get(n as i64).expect("extended").clone();
                let digits = l.to_str_radix(10).len() as u64;
                let prec = cfg.precision_bits + 64 + l.bits() as u32;
                let li = Interval::from_int(l, prec);
                let lower = alg.alpha().with_prec(prec).powi(n as i64 - 1)?;
                let upper = alg.alpha().with_prec(prec).powi(n as i64)?.mul_pow2(1);
                checked += 1;
                if !(lower.hi() <= li.lo() && li.hi() <= upper.lo()) {
                    bad.push(DigitBoundViolation { k, n, digits, reason: "growth envelope".into() });
                }
                if digits >= 3 && !digit_bound_check(k, n, 1, digits - 2) {
                    bad.push(DigitBoundViolation { k, n, digits, reason: "digit window".into() });
                }
            }
            Ok((checked, bad))
        })
        .collect();
    let mut stage = DigitBoundStage { status: StageStatus::Passed, checked: 0, violations: Vec::new() };
    for r in per_k {
        let (c, v) = r?;
        stage.checked += c;
        stage.violations.extend(v);
    }
    if !stage.violations.is_empty() {
        stage.status = StageStatus::Failed;
    }
    Ok(stage)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SmallCaseStage {
    pub status: StageStatus,
    /// The two divisibility screens re-derived digit by digit.
    pub screens_verified: bool,
    pub searched: u64,
    pub hits: Vec<PowerCaseHit>,
    /// Same search with `ell <= 4`, `m <= 13` and no screens.
    pub widened_searched: u64,
    pub widened_hits: Vec<PowerCaseHit>,
}

/// Checks the arithmetic behind the screens: `16` never divides
/// `d1 (10^ell - 1)`, and `|(d1 - d2) 10^ell - d1| < 2^14` for `ell <= 3`,
/// so `ell <= 3` and (for `n >= 16`) `ell + m <= 13`.
fn screens_hold() -> bool {
    let ten = BigInt::from(10);
    for d1 in 1..=9i64 {
        for ell in 1..=12u32 {
            let v: BigInt = BigInt::from(d1) * (num_traits::pow(ten.clone(), ell as usize) - 1);
            if (&v % BigInt::from(16)).is_zero() {
                return false;
            }
        }
        for d2 in (0..=9i64).filter(|&d| d != d1) {
            for ell in 1..=3u32 {
                let v: BigInt = BigInt::from(d1 - d2) * num_traits::pow(ten.clone(), ell as usize) - d1;
                if v.magnitude() >= &(num_bigint::BigUint::from(1u32) << 14) {
                    return false;
                }
            }
        }
    }
    (4..=12).all(|ell| !small_case_filter(20, ell, 1))
        && (1..=3).all(|ell| (14 - ell..20).all(|m| !small_case_filter(16, ell, m)))
}

pub fn run_small_case() -> SmallCaseStage {
    let main = power_case_search(3, 12);
    let wide = power_case_search(4, 13);
    let screens_verified = screens_hold();
    let ok = screens_verified && main.hits.is_empty() && wide.hits.is_empty();
    SmallCaseStage {
        status: if ok { StageStatus::Passed } else { StageStatus::Failed },
        screens_verified,
        searched: main.searched,
        hits: main.hits,
        widened_searched: wide.searched,
        widened_hits: wide.hits,
    }
}

/// Report view of one reduction round.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RoundBrief {
    pub form: FormKind,
    #[serde(rename = "C")]
    pub c: String,
    pub n_bound: String,
    pub c3: String,
    pub cells_total: usize,
    #[serde(rename = "max_H")]
    pub max_h: Option<f64>,
    pub worst: Option<RoundRecord>,
    pub unresolved: Vec<RoundRecord>,
}

impl RoundBrief {
    fn new(spec: &RoundSpec, s: &RoundSummary) -> Self {
        RoundBrief {
            form: s.form,
            c: sci_int(&spec.c, 3),
            n_bound: sci_int(&spec.n_bound, 3),
            c3: spec.c3.to_string(),
            cells_total: s.cells_total,
            max_h: s.max_h,
            worst: s.worst.clone(),
            unresolved: s.unresolved.clone(),
        }
    }
}

fn round_spec(form: FormKind, c: &str, n_bound: BigInt, c3: f64) -> Result<RoundSpec> {
    let mut spec = RoundSpec::new(
        form,
        parse_integer(c)?,
        n_bound,
        BigRational::from_integer(BigInt::from(c3 as i64)),
    );
    spec.keep_records = false;
    Ok(spec)
}

fn run_round(spec: &RoundSpec, ks: &[u32], ells: &[u64]) -> Result<(RoundBrief, Option<f64>)> {
    let cells = grid(spec.form, ks, ells);
    let s = reduction_round(spec, &cells)?;
    Ok((RoundBrief::new(spec, &s), s.max_h))
}

/// `1, 1 + step, ...` up to `cap`, always ending at `cap`.
pub fn ell_sample(cap: u64, step: u64) -> Vec<u64> {
    let mut v: Vec<u64> = (1..=cap).step_by(step.max(1) as usize).collect();
    if v.last() != Some(&cap) && cap >= 1 {
        v.push(cap);
    }
    v
}

/// Decimal value, or a digest when it is very long.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValueDigest {
    pub digits: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub value: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub leading: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trailing: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sha256: Option<String>,
}

impl ValueDigest {
    pub fn of(v: &BigInt) -> Self {
        let s = v.to_str_radix(10);
        if s.len() <= ELIDE_DIGITS {
            return ValueDigest { digits: s.len(), value: Some(s), leading: None, trailing: None, sha256: None };
        }
        let hash = Sha256::digest(s.as_bytes());
        let hex: String = hash.iter().map(|b| format!("{b:02x}")).collect();
        ValueDigest {
            digits: s.len(),
            value: None,
            leading: Some(s[..20].to_string()),
            trailing: Some(s[s.len() - 20..].to_string()),
            sha256: Some(hex),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchHit {
    pub k: u32,
    pub n: u64,
    pub decomposition: PalindromeDecomposition,
    pub value: ValueDigest,
    /// Plain `k`-term summation and `compose` both reproduce the value.
    pub confirmed: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchStage {
    pub k_min: u32,
    pub k_max: u32,
    pub n_min: u64,
    pub n_max: u64,
    pub checked: u64,
    pub hits: Vec<SearchHit>,
}

/// `L_n` by summing the previous `k` terms directly, without the sliding
/// window used by [`KLucasContext`].
fn lucas_by_summation(k: u32, n: u64) -> BigInt {
    let k = k as usize;
    let mut v: Vec<BigInt> = vec![BigInt::zero(); k - 2];
    v.push(BigInt::from(2));
    v.push(BigInt::from(1));
    let target = n as usize + k - 2;
    while v.len() <= target {
        let s: BigInt = v[v.len() - k..].iter().sum();
        v.push(s);
    }
    v.swap_remove(target)
}

/// Decomposes every `L_n` for `k` in `[k_min, k_max]`, `n` in `[n_min, n_max]`.
pub fn exhaustive_search(k_min: u32, k_max: u32, n_min: u64, n_max: u64) -> Result<SearchStage> {
    if k_min < 2 || k_max < k_min || n_max < n_min {
        return Err(Error::domain("empty or invalid search range"));
    }
    let per_k: Vec<Result<(u64, Vec<SearchHit>)>> = (k_min..=k_max)
        .into_par_iter()
        .map(|k| {
            let mut seq = KLucasContext::new(k)?;
            seq.extend_to(n_max as i64)?;
            let mut hits = Vec::new();
            let mut checked = 0;
            for (n, v) in seq.iter_from(n_min as i64) {
                if n as u64 > n_max {
                    break;
                }
                checked += 1;
                if let Some(dec) = decompose(v) {
                    let confirmed = lucas_by_summation(k, n as u64) == *v && compose(&dec)? == *v;
                    hits.push(SearchHit { k, n: n as u64, decomposition: dec, value: ValueDigest::of(v), confirmed });
                }
            }
            Ok((checked, hits))
        })
        .collect();
    let mut stage = SearchStage { k_min, k_max, n_min, n_max, checked: 0, hits: Vec::new() };
    for r in per_k {
        let (c, h) = r?;
        stage.checked += c;
        stage.hits.extend(h);
    }
    Ok(stage)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Case1Stage {
    pub status: StageStatus,
    pub gamma1: Option<RoundBrief>,
    pub ell_cap: Option<u64>,
    pub gamma2: Option<RoundBrief>,
    pub m_cap: Option<u64>,
    /// `5 (2 ell + m) + 1` at the caps.
    pub n_cap_derived: Option<u64>,
    pub search: Option<SearchStage>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl Case1Stage {
    fn empty(status: StageStatus) -> Self {
        Case1Stage {
            status,
            gamma1: None,
            ell_cap: None,
            gamma2: None,
            m_cap: None,
            n_cap_derived: None,
            search: None,
            error: None,
        }
    }
}

/// `k <= 1500`: reduce `ell` and `m`, derive the `n` cap and search.
pub fn run_case1(cfg: &RunConfig) -> Result<Case1Stage> {
    let Some((k_lo, k_hi)) = cfg.case1_ks() else {
        return Ok(Case1Stage::empty(StageStatus::Skipped));
    };
    let mut stage = Case1Stage::empty(StageStatus::Failed);
    let x = ceil_f64_to_int(pc::CASE1_N_BOUND);
    let range: Vec<u32> = (k_lo..=k_hi).collect();

    let ks1 = cfg.gamma1_ks.clone().unwrap_or_else(|| range.clone());
    let spec1 = round_spec(FormKind::G1, pc::CASE1_G1_C, x.clone(), pc::CASE1_G1_C3)?;
    let (brief1, h1) = run_round(&spec1, &ks1, &[])?;
    stage.gamma1 = Some(brief1);
    let Some(h1) = h1 else {
        stage.error = Some("first alpha form left cells unresolved".into());
        return Ok(stage);
    };
    let ell_cap = (h1.floor() as u64).max(1);
    stage.ell_cap = Some(ell_cap);

    let ks2 = cfg.gamma2_ks.clone().unwrap_or(range);
    let spec2 = round_spec(FormKind::G2, pc::CASE1_G2_C, x, pc::CASE1_G2_C3)?;
    let (brief2, h2) = run_round(&spec2, &ks2, &ell_sample(ell_cap, cfg.gamma2_ell_step))?;
    stage.gamma2 = Some(brief2);
    let Some(h2) = h2 else {
        stage.error = Some("second alpha form left cells unresolved".into());
        return Ok(stage);
    };
    let m_cap = (h2.floor() as u64).max(1);
    stage.m_cap = Some(m_cap);
    let derived = 5 * (2 * ell_cap + m_cap) + 1;
    stage.n_cap_derived = Some(derived);

    let n_max = cfg.n_cap.unwrap_or(derived);
    let search = exhaustive_search(k_lo, k_hi, 7, n_max)?;
    let clean = search.hits.is_empty();
    stage.search = Some(search);
    stage.status = if clean { StageStatus::Passed } else { StageStatus::Failed };
    Ok(stage)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Case2Closure {
    pub k_branch_a: f64,
    pub k_branch_b: f64,
    pub log10_n_bound: f64,
    /// The starting `n` bound is at least the closed one.
    pub start_bound_covers: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Case2Round {
    pub round: u32,
    pub n_bound: String,
    pub gamma3: RoundBrief,
    /// `min(k/2, ell log2 10) <= bound`.
    pub min_bound: Option<f64>,
    pub branch_a_k: Option<u64>,
    pub ell_cap: Option<u64>,
    pub gamma4: Option<RoundBrief>,
    pub branch_b_k: Option<u64>,
    pub k_bound: Option<u64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Case2Stage {
    pub status: StageStatus,
    pub closure: Case2Closure,
    pub rounds: Vec<Case2Round>,
    pub k_final: Option<u64>,
    /// The final bound contradicts `k > 1500`.
    pub contradiction: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

fn case2_round(cfg: &RunConfig, round: u32, c: &str, x: BigInt) -> Result<Case2Round> {
    let spec3 = round_spec(FormKind::G3, c, x.clone(), pc::CASE2_G3_C3)?;
    let (gamma3, h3) = run_round(&spec3, &[], &[])?;
    let mut r = Case2Round {
        round,
        n_bound: sci_int(&x, 3),
        gamma3,
        min_bound: h3,
        branch_a_k: None,
        ell_cap: None,
        gamma4: None,
        branch_b_k: None,
        k_bound: None,
    };
    let Some(h3) = h3 else { return Ok(r) };
    // the form bound is c3 2^(-H) with H = min(k/2, ell log2 10)
    r.branch_a_k = Some((2.0 * h3).floor() as u64);
    let ell_cap = ell_cap_from_log2_bound(h3);
    r.ell_cap = Some(ell_cap);
    let spec4 = round_spec(FormKind::G4, c, x, pc::CASE2_G4_C3)?;
    let (gamma4, h4) = run_round(&spec4, &[], &ell_sample(ell_cap, cfg.gamma4_ell_step))?;
    r.gamma4 = Some(gamma4);
    let Some(h4) = h4 else { return Ok(r) };
    // here H = k/2
    r.branch_b_k = Some((2.0 * h4).floor() as u64);
    r.k_bound = r.branch_a_k.max(r.branch_b_k);
    Ok(r)
}

/// `k > 1500`: close the Baker bounds, then two reduction rounds, the
/// second using the `n` bound implied by the first.
pub fn run_case2(cfg: &RunConfig) -> Result<Case2Stage> {
    let (ka, _) = case2_k_bounds(Case2Branch::A);
    let (kb, log_n_b) = case2_k_bounds(Case2Branch::B);
    let log_n = bound_n_log10(ka)?.max(log_n_b);
    let closure = Case2Closure {
        k_branch_a: ka,
        k_branch_b: kb,
        log10_n_bound: log_n,
        start_bound_covers: log_n < pc::CASE2_N_PRINTED.log10(),
    };
    let mut stage = Case2Stage {
        status: StageStatus::Failed,
        closure,
        rounds: Vec::new(),
        k_final: None,
        contradiction: false,
        error: None,
    };
    if !stage.closure.start_bound_covers {
        stage.error = Some("closed n bound exceeds the starting bound".into());
        return Ok(stage);
    }
    let r1 = case2_round(cfg, 1, pc::CASE2_R1_C, parse_integer(pc::CASE2_R1_N_BOUND)?)?;
    let k1 = r1.k_bound;
    stage.rounds.push(r1);
    let Some(k1) = k1 else {
        stage.error = Some("first round left cells unresolved".into());
        return Ok(stage);
    };
    let x2 = ceil_f64_to_int(bound_n(k1 as f64)?);
    let r2 = case2_round(cfg, 2, pc::CASE2_R2_C, x2)?;
    let k2 = r2.k_bound;
    stage.rounds.push(r2);
    let Some(k2) = k2 else {
        stage.error = Some("second round left cells unresolved".into());
        return Ok(stage);
    };
    stage.k_final = Some(k2);
    stage.contradiction = k2 <= pc::K_SPLIT as u64;
    stage.status = if stage.contradiction { StageStatus::Passed } else { StageStatus::Failed };
    Ok(stage)
}

pub const VERDICT_NONE: &str = "no solutions";
pub const VERDICT_NONE_DESK: &str = "no solutions (desk scale)";
pub const VERDICT_INCONCLUSIVE: &str = "inconclusive";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProofReport {
    pub version: u32,
    /// Seconds since the Unix epoch; the only field that varies between
    /// identical runs.
    pub timestamp: u64,
    pub config: RunConfig,
    pub digit_bounds: Option<DigitBoundStage>,
    pub small_case: Option<SmallCaseStage>,
    pub case1: Option<Case1Stage>,
    pub case2: Option<Case2Stage>,
    pub errors: Vec<String>,
    pub verdict: String,
}

impl ProofReport {
    pub fn passed(&self) -> bool {
        self.verdict != VERDICT_INCONCLUSIVE
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json()? + "\n")?;
        Ok(())
    }
}

fn verdict(cfg: &RunConfig, r: &ProofReport) -> &'static str {
    let ok = |s: Option<StageStatus>| matches!(s, Some(StageStatus::Passed));
    let case1_ok = match &r.case1 {
        Some(c) => c.status == StageStatus::Passed || (c.status == StageStatus::Skipped && cfg.case1_ks().is_none()),
        None => false,
    };
    let all = r.errors.is_empty()
        && ok(r.digit_bounds.as_ref().map(|s| s.status))
        && ok(r.small_case.as_ref().map(|s| s.status))
        && case1_ok
        && ok(r.case2.as_ref().map(|s| s.status));
    if !all {
        return VERDICT_INCONCLUSIVE;
    }
    let case1_covers = r
        .case1
        .as_ref()
        .and_then(|c| Some(c.search.as_ref()?.n_max >= c.n_cap_derived?))
        .unwrap_or(false);
    if cfg.is_full_scale() && case1_covers {
        VERDICT_NONE
    } else {
        VERDICT_NONE_DESK
    }
}

/// Runs every stage in order on a pool of `cfg.parallelism` threads and
/// writes the report to `cfg.out` when set. Stage failures are recorded
/// in the report, not returned.
pub fn run_all(cfg: &RunConfig) -> Result<ProofReport> {
    cfg.validate()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.parallelism)
        .build()
        .map_err(|e| Error::Config(e.to_string()))?;
    let mut report = pool.install(|| {
        let mut r = ProofReport {
            version: REPORT_VERSION,
            timestamp: 0,
            config: cfg.clone(),
            digit_bounds: None,
            small_case: None,
            case1: None,
            case2: None,
            errors: Vec::new(),
            verdict: String::new(),
        };
        match run_digit_bounds(cfg) {
            Ok(s) => r.digit_bounds = Some(s),
            Err(e) => r.errors.push(format!("digit bounds: {e}")),
        }
        r.small_case = Some(run_small_case());
        match run_case1(cfg) {
            Ok(s) => r.case1 = Some(s),
            Err(e) => r.errors.push(format!("case k <= 1500: {e}")),
        }
        match run_case2(cfg) {
            Ok(s) => r.case2 = Some(s),
            Err(e) => r.errors.push(format!("case k > 1500: {e}")),
        }
        r
    });
    report.verdict = verdict(cfg, &report).to_string();
    report.timestamp = std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0);
    if let Some(path) = &cfg.out {
        report.write(path)?;
    }
    Ok(report)
}

/// `ceil` of an `f64` bound as `u64`, saturating.
pub fn ceil_u64(x: f64) -> u64 {
    x.ceil().to_u64().unwrap_or(u64::MAX)
}
