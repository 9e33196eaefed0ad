//! Published numeric constants of the argument, gathered in one place.
//!
//! Each value is the rounded constant as it appears in the original
//! derivation. Envelope tests and the pipeline read them from here so a
//! single edit changes every consumer.

/// Leading factor of Matveev's lower bound.
pub const MATVEEV_FACTOR: f64 = 1.4;
/// Number of logarithms in every linear form handled here.
pub const T: u32 = 3;

/// `A_1 = 9 k log k + 0.7` for the first form.
pub const G1_A1_SLOPE: f64 = 9.0;
pub const G1_A1_OFFSET: f64 = 0.7;
/// `A_2 = 0.7` bounds `k h(alpha) = log alpha` for both `alpha` forms.
pub const ALPHA_A: f64 = 0.7;
/// `A_1 = 6.04e12 k^5 (log k)^2 log n` for the second form.
pub const G2_A1_COEFF: f64 = 6.04e12;
/// `A_1 = 1.9e12 log n` for the fourth form.
pub const G4_A1_COEFF: f64 = 1.9e12;

/// `log |Gamma_1| > -6.02e12 k^4 (log k)^2 log n`.
pub const G1_ENVELOPE: f64 = 6.02e12;
/// `log |Gamma_2| > -3.95e24 k^8 (log k)^3 (log n)^2`.
pub const G2_ENVELOPE: f64 = 3.95e24;
/// `log |Gamma_3| > -1.9e12 log n`.
pub const G3_ENVELOPE: f64 = 1.9e12;
/// `log |Gamma_4| > -6.5e23 (log n)^2`.
pub const G4_ENVELOPE: f64 = 6.5e23;

/// `ell < 2.62e12 k^4 (log k)^2 log n`.
pub const ELL_COEFF: f64 = 2.62e12;
/// `m < 1.73e24 k^8 (log k)^3 (log n)^2`.
pub const M_COEFF: f64 = 1.73e24;
/// `n < 8.66e24 k^8 (log k)^3 (log n)^2` before solving for `n`.
pub const N_IMPLICIT_COEFF: f64 = 8.66e24;
/// `n < 1.63e29 k^8 (log k)^5`.
pub const N_COEFF: f64 = 1.63e29;

/// Branch (a) of the large-`k` case: `k < 5.5e12 log n`.
pub const CASE2_A_COEFF: f64 = 5.5e12;
/// Branch (b) of the large-`k` case: `k < 1.9e24 (log n)^2`.
pub const CASE2_B_COEFF: f64 = 1.9e24;
/// `ell < 8.3e11 log n` inside branch (b).
pub const CASE2_ELL_COEFF: f64 = 8.3e11;
/// `log n < 23 log k` (branch a) and `log n < 24 log k` (branch b), `k > 1500`.
pub const CASE2_A_LOGN_PER_LOGK: f64 = 23.0;
pub const CASE2_B_LOGN_PER_LOGK: f64 = 24.0;
/// Printed closures of the two branches.
pub const CASE2_A_K_PRINTED: f64 = 8.3e15;
pub const CASE2_B_K_PRINTED: f64 = 1.8e31;
pub const CASE2_N_PRINTED: f64 = 3.5e288;

/// Boundary between the two main cases.
pub const K_SPLIT: u32 = 1500;
/// Global bound on `n` for `k <= 1500`.
pub const CASE1_N_BOUND: f64 = 8.8e58;

/// Reduction rounds: scaling constant and linear-form numerators.
pub const CASE1_G1_C: &str = "2.1e178";
pub const CASE1_G1_C3: f64 = 18.0;
pub const CASE1_G2_C: &str = "3.0e178";
pub const CASE1_G2_C3: f64 = 19.0;
pub const CASE2_R1_C: &str = "1.3e867";
pub const CASE2_R1_N_BOUND: &str = "3.5e288";
pub const CASE2_G3_C3: f64 = 59.0;
pub const CASE2_G4_C3: f64 = 11.0;
pub const CASE2_R2_C: &str = "9.0e188";
pub const CASE2_R2_N_BOUND: &str = "3.0e62";

/// Published reduction outputs: `(C, delta, S, T, c3)`, with `c4` implied
/// by the round (`log 10` for the first case, `log 2` for the second).
pub struct PublishedReduction {
    pub name: &'static str,
    pub c: &'static str,
    pub delta: &'static str,
    pub s: &'static str,
    pub t: &'static str,
    pub c3: f64,
    pub base: u32,
    pub printed_bound: u32,
}

pub const PUBLISHED_REDUCTIONS: [PublishedReduction; 6] = [
    PublishedReduction {
        name: "case1-gamma1",
        c: "2.1e178",
        delta: "1.81e59",
        s: "1.53e118",
        t: "1.32e59",
        c3: 18.0,
        base: 10,
        printed_bound: 121,
    },
    PublishedReduction {
        name: "case1-gamma2",
        c: "3.0e178",
        delta: "2.0e59",
        s: "1.53e118",
        t: "1.32e59",
        c3: 19.0,
        base: 10,
        printed_bound: 122,
    },
    PublishedReduction {
        name: "case2-round1-gamma3",
        c: "1.3e867",
        delta: "5.6e290",
        s: "2.5e578",
        t: "5.3e289",
        c3: 59.0,
        base: 2,
        printed_bound: 1921,
    },
    PublishedReduction {
        name: "case2-round1-gamma4",
        c: "1.3e867",
        delta: "5.6e290",
        s: "2.5e578",
        t: "5.3e289",
        c3: 11.0,
        base: 2,
        printed_bound: 1919,
    },
    PublishedReduction {
        name: "case2-round2-gamma3",
        c: "9.0e188",
        delta: "6.0e64",
        s: "1.9e126",
        t: "5.0e63",
        c3: 59.0,
        base: 2,
        printed_bound: 419,
    },
    PublishedReduction {
        name: "case2-round2-gamma4",
        c: "9.0e188",
        delta: "6.0e64",
        s: "1.9e126",
        t: "5.0e63",
        c3: 11.0,
        base: 2,
        printed_bound: 417,
    },
];

/// Published final bounds.
pub const CASE1_ELL_PRINTED: u64 = 121;
pub const CASE1_M_PRINTED: u64 = 122;
pub const CASE1_N_PRINTED: u64 = 1821;
pub const CASE2_R1_K_PRINTED: u64 = 3838;
pub const CASE2_R2_A_K_PRINTED: u64 = 838;
pub const CASE2_R2_B_ELL_PRINTED: u64 = 127;
pub const CASE2_R2_B_K_PRINTED: u64 = 834;
