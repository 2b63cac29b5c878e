//! Discrete Markov factors
//!
//! For a cloud with evaluation matrix `V` and derivative-evaluation matrix
//! `W = V·D_m`, the discrete factor is
//!
//! ```text
//! ρ = sup_{c ≠ 0} ‖W c‖_∞ / ‖V c‖_∞ = max_p max_{‖Vc‖_∞ ≤ 1} |⟨w_p, c⟩|.
//! ```
//!
//! Each inner problem maximises a modulus over an intersection of discs. The
//! discs are replaced by circumscribed `T`-gons (constraint phases `2πt/T`).
//! The relaxed feasible set is invariant under `c ↦ e^{2πi/T}c`, so the set of
//! attainable values of `⟨w_p, c⟩` lies in a regular `T`-gon of inradius
//! `L = max Re⟨w_p, c⟩`, and `L·sec(π/T)` is a rigorous upper bound. Every LP
//! optimum is also a concrete polynomial whose exact cloud ratio gives a lower
//! bound.
//!
//! When the whole cloud is real, real coefficients are enough (rotating a
//! complex extremal polynomial and taking its real part loses nothing), the
//! phases collapse to `{0, π}` and the bound is exact up to LP round-off.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::lp::PhasePolytope;
use super::MarkovParams;
use crate::error::{Error, Result};
use crate::polyspace::{eval_matrix, Basis, DiffOperator};
use crate::setmodel::{SetDescriptor, SetModel};

pub const DEFAULT_PHASE_COUNT: usize = 64;
/// Rows per warm-started chain. Fixed so results do not depend on the
/// number of worker threads.
const ROW_CHUNK: usize = 16;
/// Relative singular-value floor for the unisolvence check.
const RANK_FLOOR: f64 = 1e-11;

/// Bracket `[lower, upper]` around the discrete Markov factor for one degree
/// and coordinate.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FactorInterval {
    pub degree: usize,
    /// 0-based coordinate.
    pub coordinate: usize,
    pub lower: f64,
    pub upper: f64,
    /// Phases actually used; 2 in the real shortcut.
    pub phase_count: usize,
    pub real_mode: bool,
    /// Coefficients (graded-lex basis of degree `degree`) of a polynomial
    /// attaining `lower`, scaled to unit cloud sup-norm.
    pub witness: Vec<Complex64>,
    /// Cloud row where the witness's derivative peaks.
    pub witness_row: usize,
}

struct ChunkOutcome {
    upper: f64,
    lower: f64,
    witness: Option<(Vec<Complex64>, usize)>,
}

fn sup_abs(v: &DVector<Complex64>) -> (usize, f64) {
    v.iter()
        .map(|z| z.norm())
        .enumerate()
        .fold((0, 0.0), |best, (i, x)| if x > best.1 { (i, x) } else { best })
}

fn check_unisolvent(v: &DMatrix<Complex64>, degree: usize) -> Result<()> {
    let err = Error::NonUnisolvent {
        degree,
        points: v.nrows(),
        basis: v.ncols(),
    };
    if v.nrows() < v.ncols() {
        return Err(err);
    }
    let mut scaled = v.clone();
    for mut col in scaled.column_iter_mut() {
        let s = col.iter().map(|z| z.norm()).fold(0.0, f64::max);
        if s == 0.0 {
            return Err(err);
        }
        col /= Complex64::new(s, 0.0);
    }
    let sv = scaled.singular_values();
    let max = sv.max();
    let min = sv.min();
    if !(min > RANK_FLOOR * max) {
        return Err(err);
    }
    Ok(())
}

/// Brackets `sup_{P ∈ 𝒫_d} ‖∂P/∂z_m‖ / ‖P‖` over the cloud (0-based `m`).
///
/// `phase_count ≥ 3` is required for complex clouds; real clouds always use
/// the exact `{0, π}` shortcut.
pub fn markov_factor(set: &SetModel, degree: usize, m: usize, phase_count: usize) -> Result<FactorInterval> {
    let basis = Basis::total_degree(set.dim(), degree)?;
    let dop = DiffOperator::new(&basis, m)?;
    let v = eval_matrix(&basis, set.points())?;
    check_unisolvent(&v, degree)?;
    let real = set.is_real();
    if degree == 0 {
        return Ok(FactorInterval {
            degree,
            coordinate: m,
            lower: 0.0,
            upper: 0.0,
            phase_count: if real { 2 } else { phase_count },
            real_mode: real,
            witness: vec![Complex64::new(1.0, 0.0)],
            witness_row: 0,
        });
    }
    if !real && phase_count < 3 {
        return Err(Error::invalid(
            "extremal",
            "complex clouds need at least 3 phases",
        ));
    }
    let w = &v * dop.to_matrix();
    let tcount = if real { 2 } else { phase_count };
    let phases: Vec<f64> = (0..tcount).map(|t| 2.0 * PI * t as f64 / tcount as f64).collect();
    let poly = PhasePolytope::new(&v, &phases, real);
    // c ↦ e^{iθ_u}c permutes the phase constraints, so every support value
    // of ⟨w_p, ·⟩ on the grid equals the phase-0 one and a single LP per row
    // determines the whole support polygon
    let widen = if real { 1.0 } else { 1.0 / (PI / tcount as f64).cos() };

    let rows: Vec<usize> = (0..set.len()).collect();
    let outcomes: Vec<ChunkOutcome> = rows
        .par_chunks(ROW_CHUNK)
        .map(|chunk| -> Result<ChunkOutcome> {
            let mut out = ChunkOutcome {
                upper: 0.0,
                lower: 0.0,
                witness: None,
            };
            let mut vertex = None;
            for &p in chunk {
                let wp: Vec<Complex64> = w.row(p).iter().copied().collect();
                if wp.iter().all(|z| *z == Complex64::new(0.0, 0.0)) {
                    continue;
                }
                let g = poly.objective(&wp);
                let vx = match vertex.as_mut() {
                    Some(vx) => vx,
                    None => vertex.insert(poly.crash(&g)?),
                };
                let support = poly.maximize(&g, vx)?;
                out.upper = out.upper.max(support * widen);
                let c = poly.coeffs(&vx.x);
                let (_, vsup) = sup_abs(poly.vertex_values(vx));
                if vsup > 0.0 {
                    let (row, wsup) = sup_abs(&(&w * &c));
                    let ratio = wsup / vsup;
                    if ratio > out.lower {
                        out.lower = ratio;
                        let scaled = c.iter().map(|z| z / vsup).collect();
                        out.witness = Some((scaled, row));
                    }
                }
            }
            Ok(out)
        })
        .collect::<Result<Vec<_>>>()?;

    let mut upper: f64 = 0.0;
    let mut lower = 0.0;
    let mut witness = (vec![Complex64::new(0.0, 0.0); basis.len()], 0);
    for o in outcomes {
        upper = upper.max(o.upper);
        if o.lower > lower {
            lower = o.lower;
            if let Some(wt) = o.witness {
                witness = wt;
            }
        }
    }
    Ok(FactorInterval {
        degree,
        coordinate: m,
        lower,
        // ρ ≥ lower holds exactly; only LP round-off can push upper below it
        upper: upper.max(lower),
        phase_count: tcount,
        real_mode: real,
        witness: witness.0,
        witness_row: witness.1,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BernsteinRow {
    pub d: usize,
    /// 0-based coordinate.
    pub coordinate: usize,
    pub lower: f64,
    pub upper: f64,
    /// `upper / dʳ`.
    pub m_hat: f64,
}

/// Empirical Markov constant over a degree range.
///
/// The discrete factor restricts both sup-norms to the cloud, so `M̂` is
/// neither a guaranteed upper nor lower bound for the true constant of the
/// underlying compact set; `cloud_restricted` is always set to say so.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BernsteinEstimate {
    pub params: MarkovParams,
    pub table: Vec<BernsteinRow>,
    /// `(d, max_m upper/dʳ)`.
    pub per_degree: Vec<(usize, f64)>,
    pub set: SetDescriptor,
    pub phase_count: usize,
    pub cloud_restricted: bool,
}

/// `M̂ = max_d max_m upper(ρ_{d,m}) / dʳ` over the positive degrees given.
pub fn bernstein_estimate(set: &SetModel, degrees: &[usize], r: f64, phase_count: usize) -> Result<BernsteinEstimate> {
    let degrees: Vec<usize> = degrees.iter().copied().filter(|&d| d > 0).collect();
    if degrees.is_empty() {
        return Err(Error::invalid("extremal", "degree range must contain a positive degree"));
    }
    if !(r > 0.0) {
        return Err(Error::invalid("extremal", "exponent r must be positive"));
    }
    let mut table = Vec::new();
    let mut per_degree = Vec::new();
    let mut used_phases = phase_count;
    for &d in &degrees {
        let mut best: f64 = 0.0;
        for m in 0..set.dim() {
            let f = markov_factor(set, d, m, phase_count)?;
            used_phases = f.phase_count;
            let m_hat = f.upper / (d as f64).powf(r);
            best = best.max(m_hat);
            table.push(BernsteinRow {
                d,
                coordinate: m,
                lower: f.lower,
                upper: f.upper,
                m_hat,
            });
        }
        per_degree.push((d, best));
    }
    let constant = per_degree.iter().map(|&(_, v)| v).fold(0.0, f64::max);
    let params = MarkovParams::new(constant, r)?;
    Ok(BernsteinEstimate {
        params,
        table,
        per_degree,
        set: set.descriptor().clone(),
        phase_count: used_phases,
        cloud_restricted: true,
    })
}
