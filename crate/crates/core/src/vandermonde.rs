//! Generalized Vandermonde determinants and Leja/Fekete configurations.
//!
//! Determinants are carried as [`LogComplex`] values because their moduli
//! span hundreds of orders of magnitude once the degree reaches the tens.
//!
//! A Leja sequence is grown by Gaussian elimination with row pivoting on the
//! cloud-by-basis evaluation matrix. After `N` steps the updated column `N`
//! holds, at every unused cloud point `z`, the value of the Newton polynomial
//!
//! ```text
//! P_N(z) = VDM(ξ_0, …, ξ_{N-1}, z) / VDM(ξ_0, …, ξ_{N-1})
//! ```
//!
//! so choosing the row of largest modulus is exactly the greedy Leja step and
//! `VDM(ξ_0, …, ξ_N) = ∏_{j ≤ N} P_j(ξ_j)`.

use std::f64::consts::PI;
use std::fmt::Write as _;

use num_bigint::BigUint;
use num_complex::Complex64;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::multiindex::{binomial, dims, Enumeration};
use crate::polyspace::{monomial_eval, Basis};
use crate::setmodel::{SetDescriptor, SetModel};

/// Pivots at or below this fraction of the column scale count as zero.
pub const RANK_TOLERANCE: f64 = 1e-13;
/// Relative window inside which candidate values are treated as tied.
pub const TIE_TOLERANCE: f64 = 1e-12;
/// Default cap on determinant evaluations for [`fekete_bruteforce`].
pub const DEFAULT_FEKETE_BUDGET: u64 = 1_000_000;

/// A complex number stored as `exp(log_mag) · e^{i·phase}`.
///
/// `log_mag = −∞` encodes zero, in which case `phase` is `0`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(from = "LogComplexRepr", into = "LogComplexRepr")]
pub struct LogComplex {
    pub log_mag: f64,
    pub phase: f64,
}

#[derive(Serialize, Deserialize)]
struct LogComplexRepr {
    /// `null` for zero.
    log_mag: Option<f64>,
    phase: f64,
}

impl From<LogComplexRepr> for LogComplex {
    fn from(r: LogComplexRepr) -> Self {
        match r.log_mag {
            Some(l) => LogComplex::new(l, r.phase),
            None => LogComplex::ZERO,
        }
    }
}

impl From<LogComplex> for LogComplexRepr {
    fn from(v: LogComplex) -> Self {
        LogComplexRepr {
            log_mag: (!v.is_zero()).then_some(v.log_mag),
            phase: v.phase,
        }
    }
}

/// Wraps an angle into `(−π, π]`.
fn wrap_phase(x: f64) -> f64 {
    let mut y = x % (2.0 * PI);
    if y <= -PI {
        y += 2.0 * PI;
    } else if y > PI {
        y -= 2.0 * PI;
    }
    y
}

impl LogComplex {
    pub const ZERO: LogComplex = LogComplex {
        log_mag: f64::NEG_INFINITY,
        phase: 0.0,
    };
    pub const ONE: LogComplex = LogComplex {
        log_mag: 0.0,
        phase: 0.0,
    };

    pub fn new(log_mag: f64, phase: f64) -> Self {
        if log_mag == f64::NEG_INFINITY {
            return Self::ZERO;
        }
        Self {
            log_mag,
            phase: wrap_phase(phase),
        }
    }

    pub fn from_complex(z: Complex64) -> Self {
        if z.is_zero() {
            return Self::ZERO;
        }
        Self::new(z.norm().ln(), z.arg())
    }

    pub fn is_zero(&self) -> bool {
        self.log_mag == f64::NEG_INFINITY
    }

    /// `|z|`; overflows to `inf` for huge values.
    pub fn magnitude(&self) -> f64 {
        self.log_mag.exp()
    }

    pub fn to_complex(&self) -> Complex64 {
        if self.is_zero() {
            return Complex64::zero();
        }
        Complex64::from_polar(self.log_mag.exp(), self.phase)
    }
}

impl std::ops::Mul for LogComplex {
    type Output = LogComplex;

    fn mul(self, rhs: LogComplex) -> LogComplex {
        if self.is_zero() || rhs.is_zero() {
            return LogComplex::ZERO;
        }
        LogComplex::new(self.log_mag + rhs.log_mag, self.phase + rhs.phase)
    }
}

impl std::ops::MulAssign for LogComplex {
    fn mul_assign(&mut self, rhs: LogComplex) {
        *self = *self * rhs;
    }
}

/// `det[e_i(ξ_j)]` for `k` points against a basis of size `k`.
///
/// Columns are normalised to unit max-modulus and factored by Gaussian
/// elimination with partial pivoting, accumulating the log-modulus and phase
/// of every pivot. A pivot below [`RANK_TOLERANCE`] yields an exact zero.
pub fn vdm_logdet(points: &[&[Complex64]], basis: &Basis) -> Result<LogComplex> {
    let k = basis.len();
    if points.len() != k {
        return Err(Error::SizeMismatch {
            expected: k,
            got: points.len(),
        });
    }
    // a[r][c] = e_c(ξ_r)
    let mut a = vec![Complex64::zero(); k * k];
    for (r, z) in points.iter().enumerate() {
        if z.len() != basis.dim() {
            return Err(Error::DimensionMismatch {
                left: z.len(),
                right: basis.dim(),
            });
        }
        basis.eval_into(z, &mut a[r * k..(r + 1) * k]);
    }
    let mut acc = LogComplex::ONE;
    for c in 0..k {
        let scale = (0..k).map(|r| a[r * k + c].norm()).fold(0.0, f64::max);
        if scale == 0.0 {
            return Ok(LogComplex::ZERO);
        }
        for r in 0..k {
            a[r * k + c] /= scale;
        }
        acc.log_mag += scale.ln();
    }
    for c in 0..k {
        let (piv, pmag) = (c..k)
            .map(|r| (r, a[r * k + c].norm()))
            .fold((c, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
        if pmag <= RANK_TOLERANCE {
            return Ok(LogComplex::ZERO);
        }
        if piv != c {
            for j in 0..k {
                a.swap(c * k + j, piv * k + j);
            }
            acc.phase += PI;
        }
        let pivot = a[c * k + c];
        acc *= LogComplex::from_complex(pivot);
        for r in (c + 1)..k {
            let f = a[r * k + c] / pivot;
            if f.is_zero() {
                continue;
            }
            for j in (c + 1)..k {
                let upd = f * a[c * k + j];
                a[r * k + j] -= upd;
            }
        }
    }
    Ok(LogComplex::new(acc.log_mag, acc.phase))
}

/// Index of the largest value, treating values within [`TIE_TOLERANCE`] of
/// the maximum as tied and resolving ties to the lowest index.
fn argmax_lowest<I: Iterator<Item = (usize, f64)> + Clone>(values: I) -> Option<(usize, f64)> {
    let best = values.clone().map(|(_, v)| v).fold(f64::NEG_INFINITY, f64::max);
    if best == f64::NEG_INFINITY {
        return None;
    }
    let floor = best * (1.0 - TIE_TOLERANCE);
    values.filter(|&(_, v)| v >= floor).min_by_key(|&(i, _)| i)
}

/// An extendable greedy Leja configuration on a point cloud.
#[derive(Clone, Debug)]
pub struct LejaState<'a> {
    set: &'a SetModel,
    enumeration: Enumeration,
    chosen: Vec<usize>,
    used: Vec<bool>,
    /// `P_j(ξ_j)` for every chosen point.
    pivots: Vec<Complex64>,
    /// `log |P_j(ξ_j)|`.
    log_increments: Vec<f64>,
    /// Elimination multipliers `P_s(z_r) / P_s(ξ_s)`, zero on used rows.
    multipliers: Vec<Vec<Complex64>>,
    /// `P_N` on the cloud for the next index `N`, zero on used rows.
    candidates: Vec<Complex64>,
    /// Largest `|e_N|` over unused rows; the scale for the rank tolerance.
    raw_scale: f64,
    running: LogComplex,
}

impl<'a> LejaState<'a> {
    /// Starts at the cloud point of largest Euclidean norm (ties to the
    /// lowest index).
    pub fn new(set: &'a SetModel) -> Result<Self> {
        let norms = set
            .points()
            .map(|z| z.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt())
            .enumerate();
        let (start, _) = argmax_lowest(norms).expect("set models are nonempty");
        Self::with_start(set, start)
    }

    pub fn with_start(set: &'a SetModel, start: usize) -> Result<Self> {
        if start >= set.len() {
            return Err(Error::invalid(
                "vandermonde",
                format!("start index {start} outside cloud of {} points", set.len()),
            ));
        }
        let mut state = Self {
            set,
            enumeration: Enumeration::new(set.dim())?,
            chosen: Vec::new(),
            used: vec![false; set.len()],
            pivots: Vec::new(),
            log_increments: Vec::new(),
            multipliers: Vec::new(),
            candidates: vec![Complex64::new(1.0, 0.0); set.len()],
            raw_scale: 1.0,
            running: LogComplex::ONE,
        };
        state.accept(start);
        Ok(state)
    }

    /// Records `row` as the next Leja point and prepares the candidate
    /// table for the following step.
    fn accept(&mut self, row: usize) {
        let pivot = self.candidates[row];
        self.used[row] = true;
        self.chosen.push(row);
        self.pivots.push(pivot);
        self.log_increments.push(pivot.norm().ln());
        self.running *= LogComplex::from_complex(pivot);
        let l: Vec<Complex64> = self
            .candidates
            .iter()
            .zip(&self.used)
            .map(|(&v, &u)| if u { Complex64::zero() } else { v / pivot })
            .collect();
        self.multipliers.push(l);

        let next = self.chosen.len();
        if next >= self.set.len() {
            self.candidates.iter_mut().for_each(|v| *v = Complex64::zero());
            self.raw_scale = 0.0;
            return;
        }
        let beta = self.enumeration.get(next).clone();
        let mut col: Vec<Complex64> = self
            .set
            .points()
            .map(|z| monomial_eval(&beta, z).expect("dimension checked at construction"))
            .collect();
        self.raw_scale = col
            .iter()
            .zip(&self.used)
            .filter(|(_, &u)| !u)
            .map(|(v, _)| v.norm())
            .fold(0.0, f64::max);
        for (s, l) in self.multipliers.iter().enumerate() {
            let u = col[self.chosen[s]];
            if u.is_zero() {
                continue;
            }
            for (c, m) in col.iter_mut().zip(l) {
                *c -= m * u;
            }
        }
        for (c, &u) in col.iter_mut().zip(&self.used) {
            if u {
                *c = Complex64::zero();
            }
        }
        self.candidates = col;
    }

    /// Appends `steps` greedy Leja points.
    pub fn extend(&mut self, steps: usize) -> Result<&mut Self> {
        let requested = self.chosen.len() + steps;
        if requested > self.set.len() {
            return Err(Error::CloudExhausted {
                available: self.set.len(),
                requested,
            });
        }
        for _ in 0..steps {
            let step = self.chosen.len();
            let values = self
                .candidates
                .iter()
                .zip(&self.used)
                .enumerate()
                .filter(|(_, (_, &u))| !u)
                .map(|(r, (v, _))| (r, v.norm()));
            let (row, best) = argmax_lowest(values).ok_or(Error::DegenerateCloud { step })?;
            if !(best > RANK_TOLERANCE * self.raw_scale) {
                return Err(Error::DegenerateCloud { step });
            }
            self.accept(row);
        }
        Ok(self)
    }

    /// Extends until `count` points are chosen.
    pub fn extend_to(&mut self, count: usize) -> Result<&mut Self> {
        let steps = count.saturating_sub(self.chosen.len());
        self.extend(steps)
    }

    pub fn set(&self) -> &'a SetModel {
        self.set
    }

    pub fn len(&self) -> usize {
        self.chosen.len()
    }

    pub fn is_empty(&self) -> bool {
        self.chosen.is_empty()
    }

    /// Cloud indices of `ξ_0, ξ_1, …`.
    pub fn chosen(&self) -> &[usize] {
        &self.chosen
    }

    pub fn points(&self) -> Vec<&'a [Complex64]> {
        self.chosen.iter().map(|&i| self.set.point(i)).collect()
    }

    /// `P_j(ξ_j)`; the first entry is `e_0(ξ_0) = 1`.
    pub fn pivots(&self) -> &[Complex64] {
        &self.pivots
    }

    /// `log g_j = log |P_j(ξ_j)|`.
    pub fn log_increments(&self) -> &[f64] {
        &self.log_increments
    }

    /// Current candidate table: `P_N` on the cloud, zero on used points.
    pub fn candidates(&self) -> &[Complex64] {
        &self.candidates
    }

    /// Running `VDM(ξ_0, …, ξ_{N-1})` from the product of increments.
    pub fn running_vdm(&self) -> LogComplex {
        self.running
    }

    /// `log |VDM(ξ_0, …, ξ_{N-1})|` as the sum of `log g_j`.
    pub fn log_vdm(&self) -> f64 {
        self.log_increments.iter().sum()
    }

    /// Rebuilds the determinant of the current prefix from scratch.
    pub fn recompute(&self) -> Result<LogComplex> {
        self.recompute_prefix(self.len())
    }

    pub fn recompute_prefix(&self, count: usize) -> Result<LogComplex> {
        let basis = Basis::prefix(self.set.dim(), count)?;
        let pts: Vec<&[Complex64]> = self.chosen[..count].iter().map(|&i| self.set.point(i)).collect();
        vdm_logdet(&pts, &basis)
    }

    /// The chosen points as a standalone set, in selection order.
    pub fn configuration(&self) -> Result<SetModel> {
        self.set.subset(&self.chosen)
    }
}

/// Convenience wrapper: grow `state` by `steps` points.
pub fn leja_extend<'a>(mut state: LejaState<'a>, steps: usize) -> Result<LejaState<'a>> {
    state.extend(steps)?;
    Ok(state)
}

/// An exact maximiser of `|VDM|` over `k`-subsets of a cloud.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FeketeConfig {
    pub indices: Vec<usize>,
    pub value: LogComplex,
}

/// Exhaustive search over all `k`-subsets of the cloud, refusing when
/// `C(|cloud|, k)` exceeds `budget`. The first maximiser in lexicographic
/// subset order is returned.
pub fn fekete_bruteforce(set: &SetModel, k: usize, budget: u64) -> Result<FeketeConfig> {
    let size = set.len();
    if k == 0 || k > size {
        return Err(Error::invalid(
            "vandermonde",
            format!("k = {k} must lie in 1..={size}"),
        ));
    }
    let required = binomial(size as u64, k as u64);
    if required > BigUint::from(budget) {
        return Err(Error::BudgetExceeded {
            required: required.to_string(),
            budget,
        });
    }
    let basis = Basis::prefix(set.dim(), k)?;
    let mut idx: Vec<usize> = (0..k).collect();
    let mut best: Option<FeketeConfig> = None;
    loop {
        let pts: Vec<&[Complex64]> = idx.iter().map(|&i| set.point(i)).collect();
        let v = vdm_logdet(&pts, &basis)?;
        let better = match &best {
            None => true,
            Some(b) => v.log_mag > b.value.log_mag,
        };
        if better {
            best = Some(FeketeConfig {
                indices: idx.clone(),
                value: v,
            });
        }
        // next k-subset in lexicographic order
        let mut t = k;
        while t > 0 && idx[t - 1] == size - k + t - 1 {
            t -= 1;
        }
        if t == 0 {
            break;
        }
        idx[t - 1] += 1;
        for u in t..k {
            idx[u] = idx[u - 1] + 1;
        }
    }
    Ok(best.expect("at least one subset"))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurveRow {
    pub d: usize,
    pub h_d: u64,
    pub l_d: u64,
    /// `log |VDM|` of the `h_d`-point Leja prefix.
    pub log_vdm: f64,
    /// `exp(log_vdm / l_d)`; absent for `d = 0` where `l_0 = 0`.
    pub delta_d: Option<f64>,
}

/// `δ_d` estimates from one Leja run, one row per completed degree block.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiameterCurve {
    pub n: usize,
    pub set: SetDescriptor,
    pub rows: Vec<CurveRow>,
    /// Cloud indices of the Leja points, in selection order.
    pub chosen: Vec<usize>,
}

impl DiameterCurve {
    /// CSV with header `d,h_d,l_d,log_vdm,delta_d`. Rows without a defined
    /// `δ_d` are omitted.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("d,h_d,l_d,log_vdm,delta_d\n");
        for r in &self.rows {
            if let Some(delta) = r.delta_d {
                writeln!(out, "{},{},{},{},{}", r.d, r.h_d, r.l_d, r.log_vdm, delta).unwrap();
            }
        }
        out
    }

    pub fn last_delta(&self) -> Option<f64> {
        self.rows.iter().rev().find_map(|r| r.delta_d)
    }
}

/// Runs a Leja sequence to `h_{d_max}` points and reports `δ_d` for every
/// `d ≤ d_max`.
pub fn diameter_curve(set: &SetModel, d_max: usize) -> Result<DiameterCurve> {
    let n = set.dim();
    let target = dims(n, d_max)?.h_usize()?;
    if set.len() < target {
        return Err(Error::CloudExhausted {
            available: set.len(),
            requested: target,
        });
    }
    let mut state = LejaState::new(set)?;
    let mut rows = Vec::with_capacity(d_max + 1);
    for d in 0..=d_max {
        let sd = dims(n, d)?;
        let h = sd.h_usize()?;
        state.extend_to(h)?;
        let l = sd.l_u64()?;
        let log_vdm = state.log_vdm();
        rows.push(CurveRow {
            d,
            h_d: h as u64,
            l_d: l,
            log_vdm,
            delta_d: (l > 0).then(|| (log_vdm / l.to_f64().unwrap()).exp()),
        });
    }
    Ok(DiameterCurve {
        n,
        set: set.descriptor().clone(),
        rows,
        chosen: state.chosen().to_vec(),
    })
}
