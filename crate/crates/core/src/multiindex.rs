//! Exact combinatorics of ℕⁿ under the graded lexicographic order.
//!
//! Multi-indices are ordered first by total degree and then, inside a degree
//! block, lexicographically with the *larger* leading exponent first:
//!
//! ```text
//! n = 2:  (0,0) ≺ (1,0) ≺ (0,1) ≺ (2,0) ≺ (1,1) ≺ (0,2) ≺ (3,0) ≺ …
//! ```
//!
//! The enumeration `α` is 0-based, so `α(0) = (0,…,0)` and `e_0 ≡ 1`.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// An exponent vector `β ∈ ℕⁿ` with `n ≥ 1`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<u32>", into = "Vec<u32>")]
pub struct MultiIndex(Vec<u32>);

impl TryFrom<Vec<u32>> for MultiIndex {
    type Error = Error;

    fn try_from(exponents: Vec<u32>) -> Result<Self> {
        MultiIndex::new(exponents)
    }
}

impl From<MultiIndex> for Vec<u32> {
    fn from(value: MultiIndex) -> Self {
        value.0
    }
}

impl MultiIndex {
    pub fn new(exponents: Vec<u32>) -> Result<Self> {
        if exponents.is_empty() {
            return Err(Error::invalid("multiindex", "dimension must be at least 1"));
        }
        Ok(MultiIndex(exponents))
    }

    pub fn zero(n: usize) -> Self {
        assert!(n >= 1, "dimension must be at least 1");
        MultiIndex(vec![0; n])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn exponents(&self) -> &[u32] {
        &self.0
    }

    /// Total degree `|β| = β₁ + ⋯ + βₙ`.
    pub fn length(&self) -> u64 {
        self.0.iter().map(|&e| e as u64).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    /// `β! = β₁!⋯βₙ!` exactly.
    pub fn multi_factorial(&self) -> BigUint {
        self.0
            .iter()
            .fold(BigUint::one(), |acc, &e| acc * factorial(e as u64))
    }

    /// The lowering map `∂_i` for a 0-based coordinate `i`: decrements `β_i`,
    /// collapsing to the zero index when `β_i = 0`.
    pub fn lower(&self, i: usize) -> Result<MultiIndex> {
        if i >= self.dim() {
            return Err(Error::CoordinateOutOfRange {
                coordinate: i,
                n: self.dim(),
            });
        }
        if self.0[i] == 0 {
            return Ok(MultiIndex::zero(self.dim()));
        }
        let mut out = self.0.clone();
        out[i] -= 1;
        Ok(MultiIndex(out))
    }

    /// Componentwise `self ≤ other`.
    pub fn divides(&self, other: &MultiIndex) -> bool {
        self.dim() == other.dim() && self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    fn cmp_same_dim(&self, other: &MultiIndex) -> Ordering {
        self.length().cmp(&other.length()).then_with(|| {
            // higher leading exponent comes first inside a degree block
            for (a, b) in self.0.iter().zip(&other.0) {
                match b.cmp(a) {
                    Ordering::Equal => continue,
                    ord => return ord,
                }
            }
            Ordering::Equal
        })
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (k, e) in self.0.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{e}")?;
        }
        write!(f, ")")
    }
}

/// Compares two multi-indices in the graded lexicographic order.
pub fn graded_lex_compare(beta: &MultiIndex, gamma: &MultiIndex) -> Result<Ordering> {
    if beta.dim() != gamma.dim() {
        return Err(Error::DimensionMismatch {
            left: beta.dim(),
            right: gamma.dim(),
        });
    }
    Ok(beta.cmp_same_dim(gamma))
}

pub fn factorial(k: u64) -> BigUint {
    (2..=k).fold(BigUint::one(), |acc, j| acc * j)
}

pub fn binomial(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for j in 0..k {
        acc *= n - j;
        acc /= j + 1;
    }
    acc
}

/// `h_d` and `l_d` for `𝒫_d(ℂⁿ)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpaceDims {
    pub n: usize,
    pub d: usize,
    /// `dim 𝒫_d(ℂⁿ) = C(n+d, n)`.
    pub h: BigUint,
    /// Total degree of the `h_d`-point Vandermonde determinant, `n·C(n+d, n+1)`.
    pub l: BigUint,
}

impl SpaceDims {
    pub fn h_usize(&self) -> Result<usize> {
        self.h
            .to_usize()
            .ok_or_else(|| Error::invalid("multiindex", format!("h_{} does not fit in usize", self.d)))
    }

    pub fn l_u64(&self) -> Result<u64> {
        self.l
            .to_u64()
            .ok_or_else(|| Error::invalid("multiindex", format!("l_{} does not fit in u64", self.d)))
    }
}

pub fn dims(n: usize, d: usize) -> Result<SpaceDims> {
    if n == 0 {
        return Err(Error::invalid("multiindex", "dimension must be at least 1"));
    }
    let (nn, dd) = (n as u64, d as u64);
    Ok(SpaceDims {
        n,
        d,
        h: binomial(nn + dd, nn),
        l: binomial(nn + dd, nn + 1) * nn,
    })
}

/// Number of multi-indices in ℕⁿ of total degree exactly `s`.
fn block_size(n: usize, s: u64) -> BigUint {
    binomial(s + n as u64 - 1, n as u64 - 1)
}

/// Appends the degree-`s` block in graded-lex order.
fn push_block(n: usize, s: u32, prefix: &mut Vec<u32>, out: &mut Vec<MultiIndex>) {
    if prefix.len() + 1 == n {
        prefix.push(s);
        out.push(MultiIndex(prefix.clone()));
        prefix.pop();
        return;
    }
    for first in (0..=s).rev() {
        prefix.push(first);
        push_block(n, s - first, prefix, out);
        prefix.pop();
    }
}

/// The enumeration `α : ℕ → ℕⁿ` with a growable cache.
#[derive(Clone, Debug)]
pub struct Enumeration {
    n: usize,
    indices: Vec<MultiIndex>,
    positions: HashMap<MultiIndex, usize>,
    next_degree: u32,
}

impl Enumeration {
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::invalid("multiindex", "dimension must be at least 1"));
        }
        Ok(Self {
            n,
            indices: Vec::new(),
            positions: HashMap::new(),
            next_degree: 0,
        })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// Makes sure at least `count` multi-indices are cached.
    pub fn extend_to(&mut self, count: usize) {
        while self.indices.len() < count {
            let start = self.indices.len();
            let mut prefix = Vec::with_capacity(self.n);
            push_block(self.n, self.next_degree, &mut prefix, &mut self.indices);
            for (k, beta) in self.indices[start..].iter().enumerate() {
                self.positions.insert(beta.clone(), start + k);
            }
            self.next_degree += 1;
        }
    }

    /// `α(i)`.
    pub fn get(&mut self, i: usize) -> &MultiIndex {
        self.extend_to(i + 1);
        &self.indices[i]
    }

    /// The first `count` multi-indices.
    pub fn prefix(&mut self, count: usize) -> &[MultiIndex] {
        self.extend_to(count);
        &self.indices[..count]
    }

    /// Cached inverse lookup; `None` if `β` has not been enumerated yet.
    pub fn cached_index(&self, beta: &MultiIndex) -> Option<usize> {
        self.positions.get(beta).copied()
    }

    /// `α⁻¹(β)`, computed combinatorially without touching the cache.
    pub fn index_of(&self, beta: &MultiIndex) -> Result<usize> {
        if beta.dim() != self.n {
            return Err(Error::DimensionMismatch {
                left: beta.dim(),
                right: self.n,
            });
        }
        rank(beta)
    }
}

/// Closed-form position of `β` in the graded-lex enumeration.
pub fn rank(beta: &MultiIndex) -> Result<usize> {
    let n = beta.dim();
    let s = beta.length();
    let mut pos = if s == 0 {
        BigUint::zero()
    } else {
        binomial(n as u64 + s - 1, n as u64)
    };
    let mut remaining = s;
    for (t, &bt) in beta.exponents().iter().enumerate().take(n - 1) {
        // indices sharing the prefix but with a larger t-th exponent come first
        for v in (bt as u64 + 1)..=remaining {
            pos += block_size(n - t - 1, remaining - v);
        }
        remaining -= bt as u64;
    }
    pos.to_usize()
        .ok_or_else(|| Error::invalid("multiindex", format!("index of {beta} does not fit in usize")))
}

/// The first `count` multi-indices of ℕⁿ in graded-lex order.
pub fn enumerate(n: usize, count: usize) -> Result<Vec<MultiIndex>> {
    if count == 0 {
        return Err(Error::invalid("multiindex", "count must be at least 1"));
    }
    let mut e = Enumeration::new(n)?;
    Ok(e.prefix(count).to_vec())
}

/// Witness for the translation-invariance property of the order: given
/// `β ≺ γ` and `γ_i ≥ 1`, returns whether `∂_iβ ≺ ∂_iγ` or both collapse to
/// zero.
pub fn check_lemma2(beta: &MultiIndex, gamma: &MultiIndex, i: usize) -> Result<bool> {
    if graded_lex_compare(beta, gamma)? != Ordering::Less {
        return Err(Error::Precondition(format!("{beta} is not below {gamma}")));
    }
    if i >= gamma.dim() {
        return Err(Error::CoordinateOutOfRange {
            coordinate: i,
            n: gamma.dim(),
        });
    }
    if gamma.exponents()[i] == 0 {
        return Err(Error::Precondition(format!(
            "coordinate {i} of {gamma} must be positive"
        )));
    }
    let lb = beta.lower(i)?;
    let lg = gamma.lower(i)?;
    Ok(lb.cmp_same_dim(&lg) == Ordering::Less || (lb.is_zero() && lg.is_zero()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mi(v: &[u32]) -> MultiIndex {
        MultiIndex::new(v.to_vec()).unwrap()
    }

    #[test]
    fn compare_examples() {
        assert_eq!(graded_lex_compare(&mi(&[1, 0]), &mi(&[0, 1])).unwrap(), Ordering::Less);
        assert_eq!(graded_lex_compare(&mi(&[0, 2]), &mi(&[1, 0])).unwrap(), Ordering::Greater);
        assert_eq!(graded_lex_compare(&mi(&[2, 3]), &mi(&[2, 3])).unwrap(), Ordering::Equal);
        assert!(matches!(
            graded_lex_compare(&mi(&[1]), &mi(&[1, 0])),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn enumerate_examples() {
        assert_eq!(
            enumerate(1, 4).unwrap(),
            vec![mi(&[0]), mi(&[1]), mi(&[2]), mi(&[3])]
        );
        assert_eq!(
            enumerate(2, 6).unwrap(),
            vec![
                mi(&[0, 0]),
                mi(&[1, 0]),
                mi(&[0, 1]),
                mi(&[2, 0]),
                mi(&[1, 1]),
                mi(&[0, 2])
            ]
        );
        let mut e = Enumeration::new(2).unwrap();
        e.extend_to(3);
        assert_eq!(e.cached_index(&mi(&[0, 1])), Some(2));
        assert_eq!(e.index_of(&mi(&[0, 1])).unwrap(), 2);
        assert!(enumerate(2, 0).is_err());
    }

    #[test]
    fn dims_examples() {
        let d = dims(1, 3).unwrap();
        assert_eq!((d.h_usize().unwrap(), d.l_u64().unwrap()), (4, 6));
        let d = dims(2, 1).unwrap();
        assert_eq!((d.h_usize().unwrap(), d.l_u64().unwrap()), (3, 2));
        let d = dims(2, 5).unwrap();
        assert_eq!((d.h_usize().unwrap(), d.l_u64().unwrap()), (21, 70));
        let total: u64 = enumerate(2, 21).unwrap().iter().map(|b| b.length()).sum();
        assert_eq!(total, 70);
    }

    #[test]
    fn lower_examples() {
        assert_eq!(mi(&[2, 3]).lower(0).unwrap(), mi(&[1, 3]));
        assert_eq!(mi(&[2, 0]).lower(1).unwrap(), mi(&[0, 0]));
        assert_eq!(mi(&[1, 0, 0]).lower(0).unwrap(), mi(&[0, 0, 0]));
        assert!(matches!(
            mi(&[1, 0]).lower(2),
            Err(Error::CoordinateOutOfRange { .. })
        ));
    }

    #[test]
    fn lemma2_examples() {
        assert!(check_lemma2(&mi(&[1, 0]), &mi(&[1, 1]), 1).unwrap());
        assert!(check_lemma2(&mi(&[0, 2]), &mi(&[2, 1]), 0).unwrap());
        // precondition failures are reported, not answered
        assert!(matches!(
            check_lemma2(&mi(&[1, 1]), &mi(&[1, 0]), 0),
            Err(Error::Precondition(_))
        ));
        assert!(matches!(
            check_lemma2(&mi(&[1, 0]), &mi(&[1, 1]), 0).and(check_lemma2(&mi(&[1, 0]), &mi(&[2, 0]), 1)),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn multi_factorial_exact() {
        assert_eq!(mi(&[3, 2, 0]).multi_factorial(), BigUint::from(12u32));
        assert_eq!(mi(&[25]).multi_factorial(), factorial(25));
    }

    #[test]
    fn serde_rejects_empty() {
        assert!(serde_json::from_str::<MultiIndex>("[]").is_err());
        assert_eq!(serde_json::from_str::<MultiIndex>("[1,2]").unwrap(), mi(&[1, 2]));
    }
}
