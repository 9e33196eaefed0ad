//! Verification toolkit for palindromic concatenations of two repdigits in
//! k-generalized Lucas sequences.
//!
//! The crate provides exact sequence arithmetic ([`sequence`]), certified
//! enclosures of the dominant root ([`algebraic`]), digit-shape predicates
//! ([`palindrome`]), Matveev-type bounds ([`baker`]), LLL-based bound
//! reduction ([`lattice`]) and the end-to-end driver ([`pipeline`]).

pub mod algebraic;
pub mod baker;
pub mod constants;
pub mod error;
pub mod lattice;
pub mod numfmt;
pub mod palindrome;
pub mod pipeline;
pub mod real;
pub mod sequence;

pub use algebraic::{evaluate_f, isolate_alpha, AlgebraicContext};
pub use baker::{build_gamma, matveev_lower_bound, FormKind, FormParams, LinearFormSpec};
pub use error::{Error, Result};
pub use lattice::{lll_reduce, Lattice, ReducedBasis, ReductionCertificate};
pub use palindrome::{compose, decompose, PalindromeDecomposition};
pub use pipeline::{run_all, ProofReport, RunConfig};
pub use real::{Dyadic, Interval, PrecisionContext, Round};
pub use sequence::KLucasContext;
