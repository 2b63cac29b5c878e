//! Markov/Bernstein factors on point clouds and the inequality harnesses.
//!
//! A compact `K ⊂ ℂⁿ` is a Markov set with parameters `(M, r)` when
//! `‖∂P/∂z_m‖_K ≤ M·dʳ·‖P‖_K` for all `P ∈ 𝒫_d(ℂⁿ)` and all coordinates; a
//! Bernstein set is the case `r = 1`.

mod lp;
mod markov;
mod verify;

use num_bigint::BigUint;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::multiindex::{factorial, MultiIndex};

pub use markov::{
    bernstein_estimate, markov_factor, BernsteinEstimate, BernsteinRow, FactorInterval, DEFAULT_PHASE_COUNT,
};
pub use verify::{
    verify_lemma1, verify_lemma3, verify_theorem, DegreeCheck, HarnessOptions, Statement, TheoremFlavor,
    TrialRecord, VerificationReport, LEMMA_SLACK, THEOREM_LOG_TOLERANCE,
};

/// Markov inequality parameters `(M, r)`, both positive.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MarkovParams {
    #[serde(rename = "M")]
    pub constant: f64,
    pub r: f64,
}

impl MarkovParams {
    pub fn new(constant: f64, r: f64) -> Result<Self> {
        if !(constant > 0.0 && constant.is_finite()) || !(r > 0.0 && r.is_finite()) {
            return Err(Error::invalid(
                "extremal",
                format!("Markov parameters must be positive, got M = {constant}, r = {r}"),
            ));
        }
        Ok(Self { constant, r })
    }

    /// Bernstein parameters `(M, 1)`.
    pub fn bernstein(constant: f64) -> Result<Self> {
        Self::new(constant, 1.0)
    }

    pub fn is_bernstein(&self) -> bool {
        self.r == 1.0
    }
}

/// Parameters valid for a Cartesian product given parameters for each
/// factor: the componentwise maximum.
pub fn combine_markov_params(params: &[MarkovParams]) -> Result<MarkovParams> {
    let first = params
        .first()
        .ok_or_else(|| Error::invalid("extremal", "parameter list must be nonempty"))?;
    Ok(params.iter().skip(1).fold(*first, |acc, p| MarkovParams {
        constant: acc.constant.max(p.constant),
        r: acc.r.max(p.r),
    }))
}

/// `α! · n^{|α|} ≥ |α|!`, checked in exact integers.
pub fn multinomial_step_holds(alpha: &MultiIndex) -> bool {
    let n = BigUint::from(alpha.dim());
    alpha.multi_factorial() * n.pow(alpha.length() as u32) >= factorial(alpha.length())
}
