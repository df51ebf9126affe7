//! Exact extreme box volumes of `k`-increasing `d`-variate quasi-copulas.
//!
//! The crate computes the maximal negative and maximal positive volume that a
//! `k`-increasing quasi-copula can assign to a box in `[0,1]^d`, builds a
//! quasi-copula attaining it, and ships independent checks: an exact rational
//! simplex solver for the underlying linear programs and brute-force face
//! enumeration for the piecewise-multilinear extension.
//!
//! Every number is an exact [`Rational`]; there is no floating point anywhere.

pub mod construction;
pub mod error;
pub mod exact;
pub mod extremes;
pub mod lp;
pub mod recursions;
pub mod verify;

pub use construction::{build_profile, DensityField, GridFunction, SymmetricVertexProfile};
pub use error::{Error, Result};
pub use exact::{alt_binom_tail, binom, format_rational, parse_rational, rat, BigInt, Rational};
pub use extremes::{extreme_table, extreme_volume, ExtremeTable, ExtremeVolume, Sign};
pub use recursions::{build_tables, verify_alpha_beta_gamma, RecursionTables};
