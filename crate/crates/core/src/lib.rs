//! Transfinite-diameter estimates for discretized compact sets in ℂⁿ.
//!
//! The crate is organised bottom-up:
//!
//! - [`multiindex`]: graded-lexicographic enumeration of ℕⁿ, the dimensions
//!   `h_d` and `l_d`, and the lowering maps `∂_i`.
//! - [`polyspace`]: polynomials as coefficient vectors over the graded-lex
//!   monomial basis, evaluation and exact differentiation.
//! - [`setmodel`]: finite point clouds standing in for compact sets.
//! - [`vandermonde`]: log-domain generalized Vandermonde determinants, greedy
//!   Leja sequences, a brute-force Fekete oracle and `δ_d` curves.
//! - [`extremal`]: discrete Markov/Bernstein factors and the inequality
//!   verification harnesses.
//!
//! Coordinates are 0-based throughout the library: coordinate `0` is `z₁`.

pub mod error;
pub mod extremal;
pub mod multiindex;
pub mod polyspace;
pub mod setmodel;
pub mod vandermonde;

pub use error::{Error, Result};
pub use num_complex::Complex64;
