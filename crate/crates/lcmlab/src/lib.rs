//! Exact workbench for the prime anatomy of consecutive polynomial values.
//!
//! For a monic integer polynomial `f` of degree `d >= 2` and a range `1..=N`,
//! this crate computes the complete prime factorization of every `|f(n)|`,
//! aggregates per-prime valuation statistics, and checks the divisibility
//! inequalities that relate the product `Q = |f(1)···f(N)|`, the least common
//! multiple `L = lcm{f(1),...,f(N)}`, and its radical `ℓ = rad Q`.
//!
//! The main entry points are:
//!
//! - [`poly::Polynomial`] — parsing, evaluation, evenness, squarefreeness,
//!   and a mod-p irreducibility witness;
//! - [`valuation::build_table`] — a sieve over polynomial values plus
//!   deterministic Pollard rho for the parts the sieve cannot reach;
//! - [`zerosum`] — complex roots, negation pairing, and exhaustive
//!   small-coefficient zero sums among the roots;
//! - [`tuples`] — enumeration of weakly decreasing valuation profiles under
//!   pluggable admissibility filters, with exact extremal statistics;
//! - [`experiments`] — the assembled inequality checks and growth scans,
//!   exportable as CSV/JSON reports.

pub mod dd;
pub mod error;
pub mod experiments;
pub mod factoring;
pub mod numeric;
pub mod poly;
pub mod sieve;
pub mod tuples;
pub mod valuation;
pub mod zerosum;

pub use error::Error;
pub use experiments::{BoundReport, ExperimentConfig, GrowthTrends};
pub use poly::{IrreducibilityVerdict, Polynomial};
pub use tuples::{AdmissibilityFilter, ValuationProfile};
pub use valuation::{FactorizationTable, MassSplit, MuBoundReport, PrimeStats, TableStore};
pub use zerosum::{MinimalU, RootSet, ZeroSum, ZeroSumReport};

pub type Result<T> = std::result::Result<T, Error>;
