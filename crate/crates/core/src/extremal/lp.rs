//! Linear maximization over the phase-sampled polytope
//!
//! ```text
//! Poly = { c ∈ ℂ^k : Re(e^{iθ_t} ⟨v_p, c⟩) ≤ 1  for every cloud row p and phase θ_t }
//! ```
//!
//! in real coordinates `x = (Re c, Im c)` (or `x = c` for real data). The
//! solver is a vertex-following primal simplex on the inequality form
//! `max gᵀx, Ax ≤ 1`. The feasible region depends only on the cloud, so a
//! vertex returned for one objective is a valid warm start for the next.
//!
//! Constraint `id = p·T + t` is never materialised as a dense row of `A`
//! during ratio tests: `a_id · d = Re(e^{iθ_t} ⟨v_p, d⟩)`, so one
//! matrix-vector product with the evaluation matrix serves all phases.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

const OPT_TOL: f64 = 1e-11;
const PIVOT_TOL: f64 = 1e-11;
const MAX_ITERATIONS: usize = 20_000;
/// Degenerate pivots tolerated before switching to Bland's rule.
const DEGENERATE_LIMIT: usize = 50;

pub(crate) struct PhasePolytope<'a> {
    values: &'a DMatrix<Complex64>,
    cos: Vec<f64>,
    sin: Vec<f64>,
    real: bool,
    row_norms: Vec<f64>,
}

/// A vertex of the polytope together with cached row values `⟨v_p, c⟩`.
#[derive(Clone, Debug)]
pub(crate) struct Vertex {
    pub x: Vec<f64>,
    active: Vec<usize>,
    vals: DVector<Complex64>,
}

impl<'a> PhasePolytope<'a> {
    /// `values` is the cloud-by-basis evaluation matrix. In real mode the
    /// phases are `{0, π}` and the unknowns are real.
    pub fn new(values: &'a DMatrix<Complex64>, phases: &[f64], real: bool) -> Self {
        let row_norms = (0..values.nrows())
            .map(|p| values.row(p).iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt())
            .collect();
        Self {
            values,
            cos: phases.iter().map(|t| t.cos()).collect(),
            sin: phases.iter().map(|t| t.sin()).collect(),
            real,
            row_norms,
        }
    }

    pub fn basis_len(&self) -> usize {
        self.values.ncols()
    }

    pub fn nvars(&self) -> usize {
        if self.real {
            self.basis_len()
        } else {
            2 * self.basis_len()
        }
    }

    fn phase_count(&self) -> usize {
        self.cos.len()
    }

    /// Complex coefficients represented by `x`.
    pub fn coeffs(&self, x: &[f64]) -> DVector<Complex64> {
        let k = self.basis_len();
        DVector::from_iterator(
            k,
            (0..k).map(|j| {
                if self.real {
                    Complex64::new(x[j], 0.0)
                } else {
                    Complex64::new(x[j], x[k + j])
                }
            }),
        )
    }

    /// Real gradient of `c ↦ Re⟨w, c⟩`.
    pub fn objective(&self, w: &[Complex64]) -> Vec<f64> {
        if self.real {
            w.iter().map(|z| z.re).collect()
        } else {
            w.iter().map(|z| z.re).chain(w.iter().map(|z| -z.im)).collect()
        }
    }

    fn constraint_row(&self, id: usize) -> Vec<f64> {
        let (p, t) = (id / self.phase_count(), id % self.phase_count());
        let (c, s) = (self.cos[t], self.sin[t]);
        let k = self.basis_len();
        let mut row = vec![0.0; self.nvars()];
        for j in 0..k {
            let v = self.values[(p, j)];
            let re = c * v.re - s * v.im;
            row[j] = re;
            if !self.real {
                let im = s * v.re + c * v.im;
                row[k + j] = -im;
            }
        }
        row
    }

    /// Smallest step along `d` (with row values `u = V·c(d)`) that makes a
    /// constraint outside `active` tight. Ties go to the lowest id.
    fn ratio_test(&self, vals: &DVector<Complex64>, u: &DVector<Complex64>, dnorm: f64) -> Option<(usize, f64)> {
        let tcount = self.phase_count();
        let mut best: Option<(usize, f64)> = None;
        for p in 0..self.values.nrows() {
            let (ur, ui) = (u[p].re, u[p].im);
            let (sr, si) = (vals[p].re, vals[p].im);
            let tol = PIVOT_TOL * self.row_norms[p] * dnorm;
            for t in 0..tcount {
                let den = self.cos[t] * ur - self.sin[t] * ui;
                if den <= tol {
                    continue;
                }
                let slack = (1.0 - (self.cos[t] * sr - self.sin[t] * si)).max(0.0);
                let ratio = slack / den;
                if best.map_or(true, |(_, b)| ratio < b) {
                    best = Some((p * tcount + t, ratio));
                }
            }
        }
        best
    }

    fn step(&self, vertex: &mut Vertex, d: &[f64], t: f64) {
        let dc = self.coeffs(d);
        let u = self.values * &dc;
        for (xi, di) in vertex.x.iter_mut().zip(d) {
            *xi += t * di;
        }
        vertex.vals += u * Complex64::new(t, 0.0);
    }

    /// Walks from the origin to a vertex, ascending `g` where possible.
    pub fn crash(&self, g: &[f64]) -> Result<Vertex> {
        let k = self.nvars();
        let mut vertex = Vertex {
            x: vec![0.0; k],
            active: Vec::with_capacity(k),
            vals: DVector::zeros(self.values.nrows()),
        };
        let mut q: Vec<Vec<f64>> = Vec::with_capacity(k);
        let project = |v: &[f64], q: &[Vec<f64>]| -> Vec<f64> {
            let mut r = v.to_vec();
            for _ in 0..2 {
                for qi in q {
                    let dot: f64 = r.iter().zip(qi).map(|(a, b)| a * b).sum();
                    for (ri, qv) in r.iter_mut().zip(qi) {
                        *ri -= dot * qv;
                    }
                }
            }
            r
        };
        let gnorm = norm(g);
        while vertex.active.len() < k {
            let mut d = project(g, &q);
            if norm(&d) <= 1e-12 * gnorm.max(1.0) {
                // objective is flat on this face; move along any free direction
                d = (0..k)
                    .map(|j| {
                        let mut e = vec![0.0; k];
                        e[j] = 1.0;
                        project(&e, &q)
                    })
                    .max_by(|a, b| norm(a).total_cmp(&norm(b)))
                    .expect("k ≥ 1");
            }
            let dn = norm(&d);
            let u = self.values * self.coeffs(&d);
            let (id, t) = self
                .ratio_test(&vertex.vals, &u, dn)
                .ok_or_else(|| Error::Lp("polytope is unbounded (rank-deficient cloud)".into()))?;
            self.step(&mut vertex, &d, t);
            vertex.active.push(id);
            let mut row = project(&self.constraint_row(id), &q);
            let rn = norm(&row);
            row.iter_mut().for_each(|r| *r /= rn);
            q.push(row);
        }
        Ok(vertex)
    }

    /// Maximises `gᵀx` starting from `vertex`, which is updated in place.
    pub fn maximize(&self, g: &[f64], vertex: &mut Vertex) -> Result<f64> {
        let k = self.nvars();
        let gv = DVector::from_column_slice(g);
        let mut degenerate_run = 0usize;
        for _ in 0..MAX_ITERATIONS {
            let rows: Vec<Vec<f64>> = vertex.active.iter().map(|&id| self.constraint_row(id)).collect();
            let ab = DMatrix::from_fn(k, k, |i, j| rows[i][j]);
            let lu_t = ab.transpose().lu();
            let y = lu_t
                .solve(&gv)
                .ok_or_else(|| Error::Lp("singular active set".into()))?;
            let ymax = y.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            let tol = OPT_TOL * (1.0 + ymax);
            let bland = degenerate_run >= DEGENERATE_LIMIT;
            let leaving = if bland {
                (0..k)
                    .filter(|&j| y[j] < -tol)
                    .min_by_key(|&j| vertex.active[j])
            } else {
                (0..k)
                    .filter(|&j| y[j] < -tol)
                    .min_by(|&a, &b| y[a].total_cmp(&y[b]))
            };
            let Some(j) = leaving else {
                return Ok(g.iter().zip(&vertex.x).map(|(a, b)| a * b).sum());
            };
            let mut rhs = DVector::zeros(k);
            rhs[j] = -1.0;
            let d = ab
                .lu()
                .solve(&rhs)
                .ok_or_else(|| Error::Lp("singular active set".into()))?;
            let d: Vec<f64> = d.iter().copied().collect();
            let u = self.values * self.coeffs(&d);
            let (id, t) = self
                .ratio_test(&vertex.vals, &u, norm(&d))
                .ok_or_else(|| Error::Lp("objective unbounded on polytope".into()))?;
            if t <= 1e-14 {
                degenerate_run += 1;
            } else {
                degenerate_run = 0;
            }
            self.step(vertex, &d, t);
            vertex.active[j] = id;
        }
        Err(Error::Lp(format!("no convergence after {MAX_ITERATIONS} pivots")))
    }

    /// Row values `⟨v_p, c⟩` at the vertex.
    pub fn vertex_values<'v>(&self, vertex: &'v Vertex) -> &'v DVector<Complex64> {
        &vertex.vals
    }
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn real_box() {
        // |x0| ≤ 1, |x1| ≤ 1, |x0 + x1| ≤ 1.5 ; max x0 + 2 x1 = 0.5 + 2 = 2.5
        let v = DMatrix::from_row_slice(3, 2, &[c(1., 0.), c(0., 0.), c(0., 0.), c(1., 0.), c(1., 0.), c(1., 0.)]);
        let v = v.map(|z| z);
        let scaled = DMatrix::from_fn(3, 2, |i, j| if i == 2 { v[(i, j)] / 1.5 } else { v[(i, j)] });
        let poly = PhasePolytope::new(&scaled, &[0.0, PI], true);
        let g = [1.0, 2.0];
        let mut vx = poly.crash(&g).unwrap();
        let val = poly.maximize(&g, &mut vx).unwrap();
        assert!((val - 2.5).abs() < 1e-12, "{val}");
        // warm start with another objective
        let g2 = [1.0, -1.0];
        let val = poly.maximize(&g2, &mut vx).unwrap();
        assert!((val - 2.0).abs() < 1e-12, "{val}");
    }

    #[test]
    fn complex_disc_polygon() {
        // one row v = 1: the constraints cut out a regular T-gon of inradius 1
        // around the unit disc; the phase-0 face bounds Re c by exactly 1 and
        // the vertex in direction e^{iπ/T} sits at radius sec(π/T)
        let v = DMatrix::from_element(1, 1, c(1., 0.));
        for tcount in [4usize, 5, 8] {
            let phases: Vec<f64> = (0..tcount).map(|t| 2.0 * PI * t as f64 / tcount as f64).collect();
            let poly = PhasePolytope::new(&v, &phases, false);
            let g = poly.objective(&[c(1., 0.)]);
            let mut vx = poly.crash(&g).unwrap();
            let val = poly.maximize(&g, &mut vx).unwrap();
            assert!((val - 1.0).abs() < 1e-12, "T={tcount}: {val}");
            // objective Re(e^{-iπ/T} c) picks the vertex between faces 0 and T−1
            let rot = Complex64::from_polar(1.0, -PI / tcount as f64);
            let g = poly.objective(&[rot]);
            let val = poly.maximize(&g, &mut vx).unwrap();
            let expect = 1.0 / (PI / tcount as f64).cos();
            assert!((val - expect).abs() < 1e-12, "T={tcount}: {val} vs {expect}");
        }
    }
}
