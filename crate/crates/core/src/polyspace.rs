//! Polynomials over the truncated graded-lex monomial basis.
//!
//! A [`PolyCoeffs`] stores a dense complex coefficient vector against a shared
//! [`Basis`]; basis element `j` is the monomial `e_j(z) = z^{α(j)}`.

use std::collections::HashMap;
use std::sync::Arc;

use nalgebra::DMatrix;
use num_complex::Complex64;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::multiindex::{dims, Enumeration, MultiIndex};
use crate::setmodel::SetModel;

/// The first `k` monomials `e_0, …, e_{k-1}` in graded-lex order.
#[derive(Clone, Debug, PartialEq)]
pub struct Basis {
    n: usize,
    indices: Vec<MultiIndex>,
    positions: HashMap<MultiIndex, usize>,
}

impl Basis {
    pub fn prefix(n: usize, k: usize) -> Result<Self> {
        if k == 0 {
            return Err(Error::invalid("polyspace", "basis must be nonempty"));
        }
        let mut e = Enumeration::new(n)?;
        let indices = e.prefix(k).to_vec();
        let positions = indices
            .iter()
            .enumerate()
            .map(|(j, b)| (b.clone(), j))
            .collect();
        Ok(Self {
            n,
            indices,
            positions,
        })
    }

    /// Basis of `𝒫_d(ℂⁿ)`, of size `h_d`.
    pub fn total_degree(n: usize, d: usize) -> Result<Self> {
        Self::prefix(n, dims(n, d)?.h_usize()?)
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn indices(&self) -> &[MultiIndex] {
        &self.indices
    }

    pub fn index(&self, j: usize) -> &MultiIndex {
        &self.indices[j]
    }

    pub fn position_of(&self, beta: &MultiIndex) -> Option<usize> {
        self.positions.get(beta).copied()
    }

    /// Largest total degree present.
    pub fn max_degree(&self) -> u64 {
        self.indices.last().map(|b| b.length()).unwrap_or(0)
    }

    /// `Σ_j |α(j)|`, the total degree of the Vandermonde determinant on this basis.
    pub fn vdm_degree(&self) -> u64 {
        self.indices.iter().map(|b| b.length()).sum()
    }

    /// Evaluates every basis monomial at `z` into `out`.
    pub fn eval_into(&self, z: &[Complex64], out: &mut [Complex64]) {
        debug_assert_eq!(z.len(), self.n);
        let max_deg = self.max_degree() as usize;
        // powers[t][e] = z_t^e
        let powers: Vec<Vec<Complex64>> = z
            .iter()
            .map(|&zt| {
                let mut p = Vec::with_capacity(max_deg + 1);
                p.push(Complex64::new(1.0, 0.0));
                for e in 1..=max_deg {
                    let prev = p[e - 1];
                    p.push(prev * zt);
                }
                p
            })
            .collect();
        for (slot, beta) in out.iter_mut().zip(&self.indices) {
            *slot = beta
                .exponents()
                .iter()
                .zip(&powers)
                .fold(Complex64::new(1.0, 0.0), |acc, (&e, p)| acc * p[e as usize]);
        }
    }
}

/// `z^β` with `0⁰ = 1`.
pub fn monomial_eval(beta: &MultiIndex, z: &[Complex64]) -> Result<Complex64> {
    if beta.dim() != z.len() {
        return Err(Error::DimensionMismatch {
            left: beta.dim(),
            right: z.len(),
        });
    }
    Ok(beta
        .exponents()
        .iter()
        .zip(z)
        .fold(Complex64::new(1.0, 0.0), |acc, (&e, &zt)| acc * zt.powu(e)))
}

/// Matrix with entry `(p, j) = e_j(ξ_p)`.
pub fn eval_matrix<'a, I>(basis: &Basis, points: I) -> Result<DMatrix<Complex64>>
where
    I: IntoIterator<Item = &'a [Complex64]>,
{
    let rows: Vec<&[Complex64]> = points.into_iter().collect();
    let k = basis.len();
    let mut m = DMatrix::zeros(rows.len(), k);
    let mut buf = vec![Complex64::zero(); k];
    for (p, z) in rows.iter().enumerate() {
        if z.len() != basis.dim() {
            return Err(Error::DimensionMismatch {
                left: z.len(),
                right: basis.dim(),
            });
        }
        basis.eval_into(z, &mut buf);
        for (j, v) in buf.iter().enumerate() {
            m[(p, j)] = *v;
        }
    }
    Ok(m)
}

/// Complex coefficients against a shared basis.
#[derive(Clone, Debug, PartialEq)]
pub struct PolyCoeffs {
    basis: Arc<Basis>,
    coeffs: Vec<Complex64>,
}

impl PolyCoeffs {
    pub fn new(basis: Arc<Basis>, coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.len() != basis.len() {
            return Err(Error::SizeMismatch {
                expected: basis.len(),
                got: coeffs.len(),
            });
        }
        Ok(Self { basis, coeffs })
    }

    pub fn zero(basis: Arc<Basis>) -> Self {
        let coeffs = vec![Complex64::zero(); basis.len()];
        Self { basis, coeffs }
    }

    /// The basis monomial `e_j`.
    pub fn monomial(basis: Arc<Basis>, j: usize) -> Self {
        let mut p = Self::zero(basis);
        p.coeffs[j] = Complex64::new(1.0, 0.0);
        p
    }

    /// A member of `𝒫^i`: unit coefficient on `e_i`, the given coefficients on
    /// `e_0, …, e_{i-1}` and zero above.
    pub fn monic(basis: Arc<Basis>, lower: &[Complex64]) -> Result<Self> {
        let i = lower.len();
        if i >= basis.len() {
            return Err(Error::invalid(
                "polyspace",
                format!("index {i} outside basis of size {}", basis.len()),
            ));
        }
        let mut p = Self::zero(basis);
        p.coeffs[..i].copy_from_slice(lower);
        p.coeffs[i] = Complex64::new(1.0, 0.0);
        Ok(p)
    }

    pub fn basis(&self) -> &Arc<Basis> {
        &self.basis
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<Complex64> {
        self.coeffs
    }

    /// Whether this is a member of `𝒫^i` for its highest nonzero index `i`.
    pub fn is_monic(&self) -> bool {
        self.leading_index()
            .map(|i| self.coeffs[i] == Complex64::new(1.0, 0.0))
            .unwrap_or(false)
    }

    pub fn leading_index(&self) -> Option<usize> {
        self.coeffs.iter().rposition(|c| !c.is_zero())
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    pub fn eval(&self, z: &[Complex64]) -> Result<Complex64> {
        if z.len() != self.basis.dim() {
            return Err(Error::DimensionMismatch {
                left: z.len(),
                right: self.basis.dim(),
            });
        }
        let mut buf = vec![Complex64::zero(); self.basis.len()];
        self.basis.eval_into(z, &mut buf);
        Ok(buf.iter().zip(&self.coeffs).map(|(e, c)| e * c).sum())
    }

    fn combine(&self, other: &PolyCoeffs, a: Complex64, b: Complex64) -> Result<PolyCoeffs> {
        if self.basis != other.basis {
            return Err(Error::invalid("polyspace", "polynomials live on different bases"));
        }
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(x, y)| a * x + b * y)
            .collect();
        Ok(PolyCoeffs {
            basis: self.basis.clone(),
            coeffs,
        })
    }

    /// `a·self + b·other`.
    pub fn linear_combination(
        &self,
        a: Complex64,
        other: &PolyCoeffs,
        b: Complex64,
    ) -> Result<PolyCoeffs> {
        self.combine(other, a, b)
    }
}

/// `∂/∂z_m` on a graded-lex prefix basis: `z^β ↦ β_m z^{∂_mβ}`.
///
/// The image of a prefix basis stays inside the prefix because lowering
/// strictly decreases the degree.
#[derive(Clone, Debug)]
pub struct DiffOperator {
    coordinate: usize,
    size: usize,
    /// `(source, target, factor)` triples.
    entries: Vec<(usize, usize, u32)>,
}

impl DiffOperator {
    pub fn new(basis: &Basis, m: usize) -> Result<Self> {
        if m >= basis.dim() {
            return Err(Error::CoordinateOutOfRange {
                coordinate: m,
                n: basis.dim(),
            });
        }
        let mut entries = Vec::new();
        for (j, beta) in basis.indices().iter().enumerate() {
            let e = beta.exponents()[m];
            if e == 0 {
                continue;
            }
            let target = basis
                .position_of(&beta.lower(m)?)
                .expect("lowered index precedes its source in a prefix basis");
            entries.push((j, target, e));
        }
        Ok(Self {
            coordinate: m,
            size: basis.len(),
            entries,
        })
    }

    pub fn coordinate(&self) -> usize {
        self.coordinate
    }

    pub fn apply(&self, coeffs: &[Complex64]) -> Vec<Complex64> {
        let mut out = vec![Complex64::zero(); self.size];
        for &(src, tgt, factor) in &self.entries {
            out[tgt] += coeffs[src] * factor as f64;
        }
        out
    }

    /// Dense `k×k` matrix `D` with `D·c` the derivative's coefficients.
    pub fn to_matrix(&self) -> DMatrix<Complex64> {
        let mut m = DMatrix::zeros(self.size, self.size);
        for &(src, tgt, factor) in &self.entries {
            m[(tgt, src)] = Complex64::new(factor as f64, 0.0);
        }
        m
    }
}

/// `∂P/∂z_m` for a 0-based coordinate `m`.
pub fn differentiate(p: &PolyCoeffs, m: usize) -> Result<PolyCoeffs> {
    let op = DiffOperator::new(&p.basis, m)?;
    Ok(PolyCoeffs {
        basis: p.basis.clone(),
        coeffs: op.apply(&p.coeffs),
    })
}

/// `D^α P = ∂^{|α|}P / ∂z₁^{α₁}⋯∂zₙ^{αₙ}`, applied coordinate by coordinate.
pub fn higher_diff(p: &PolyCoeffs, alpha: &MultiIndex) -> Result<PolyCoeffs> {
    higher_diff_ordered(p, alpha, &(0..alpha.dim()).collect::<Vec<_>>())
}

/// `D^α P` with the coordinates visited in the given order.
pub fn higher_diff_ordered(p: &PolyCoeffs, alpha: &MultiIndex, order: &[usize]) -> Result<PolyCoeffs> {
    if alpha.dim() != p.basis.dim() {
        return Err(Error::DimensionMismatch {
            left: alpha.dim(),
            right: p.basis.dim(),
        });
    }
    let mut out = p.clone();
    for &m in order {
        let op = DiffOperator::new(&p.basis, m)?;
        for _ in 0..alpha.exponents()[m] {
            out.coeffs = op.apply(&out.coeffs);
        }
    }
    Ok(out)
}

/// Largest modulus over an explicit list of points.
pub fn sup_norm_points<'a, I>(p: &PolyCoeffs, points: I) -> Result<f64>
where
    I: IntoIterator<Item = &'a [Complex64]>,
{
    let mut buf = vec![Complex64::zero(); p.basis.len()];
    let mut best: Option<f64> = None;
    for z in points {
        if z.len() != p.basis.dim() {
            return Err(Error::DimensionMismatch {
                left: z.len(),
                right: p.basis.dim(),
            });
        }
        p.basis.eval_into(z, &mut buf);
        let v: Complex64 = buf.iter().zip(&p.coeffs).map(|(e, c)| e * c).sum();
        best = Some(best.map_or(v.norm(), |b| b.max(v.norm())));
    }
    best.ok_or(Error::EmptySet)
}

/// Discrete sup-norm of `P` over the set's cloud. This is a lower bound for
/// the sup over the underlying compact set; refine the cloud for tighter
/// values.
pub fn sup_norm(p: &PolyCoeffs, set: &SetModel) -> Result<f64> {
    sup_norm_points(p, set.points())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn mi(v: &[u32]) -> MultiIndex {
        MultiIndex::new(v.to_vec()).unwrap()
    }

    #[test]
    fn monomial_examples() {
        assert_eq!(monomial_eval(&mi(&[0, 0]), &[c(3.0, 1.0), c(-2.0, 0.0)]).unwrap(), c(1.0, 0.0));
        assert_eq!(monomial_eval(&mi(&[2, 1]), &[c(2.0, 0.0), c(0.0, 1.0)]).unwrap(), c(0.0, 4.0));
        let w = Complex64::from_polar(1.0, 2.0 * PI / 3.0);
        let v = monomial_eval(&mi(&[3]), &[w]).unwrap();
        assert!((v - c(1.0, 0.0)).norm() < 1e-14);
        assert_eq!(monomial_eval(&mi(&[0]), &[c(0.0, 0.0)]).unwrap(), c(1.0, 0.0));
    }

    #[test]
    fn eval_matrix_examples() {
        let b = Basis::prefix(1, 2).unwrap();
        let pts = [[c(0.0, 0.0)], [c(1.0, 0.0)]];
        let m = eval_matrix(&b, pts.iter().map(|p| &p[..])).unwrap();
        assert_eq!(m, DMatrix::from_row_slice(2, 2, &[c(1., 0.), c(0., 0.), c(1., 0.), c(1., 0.)]));

        let b = Basis::prefix(2, 3).unwrap();
        let z = [c(2.0, 1.0), c(-3.0, 0.5)];
        let m = eval_matrix(&b, [&z[..]]).unwrap();
        assert_eq!(m.row(0).iter().copied().collect::<Vec<_>>(), vec![c(1., 0.), z[0], z[1]]);

        let b = Basis::prefix(1, 3).unwrap();
        let roots: Vec<[Complex64; 1]> = (0..3)
            .map(|k| [Complex64::from_polar(1.0, 2.0 * PI * k as f64 / 3.0)])
            .collect();
        let m = eval_matrix(&b, roots.iter().map(|p| &p[..])).unwrap();
        // direct cofactor expansion
        let det = m[(0, 0)] * (m[(1, 1)] * m[(2, 2)] - m[(1, 2)] * m[(2, 1)])
            - m[(0, 1)] * (m[(1, 0)] * m[(2, 2)] - m[(1, 2)] * m[(2, 0)])
            + m[(0, 2)] * (m[(1, 0)] * m[(2, 1)] - m[(1, 1)] * m[(2, 0)]);
        assert!((det.norm() - 27f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn differentiate_examples() {
        let b = Arc::new(Basis::total_degree(2, 3).unwrap());
        let j = b.position_of(&mi(&[2, 1])).unwrap();
        let p = PolyCoeffs::monomial(b.clone(), j);
        let dp = differentiate(&p, 0).unwrap();
        let mut expect = PolyCoeffs::zero(b.clone());
        expect.coeffs[b.position_of(&mi(&[1, 1])).unwrap()] = c(2.0, 0.0);
        assert_eq!(dp, expect);

        let p = PolyCoeffs::monomial(b.clone(), b.position_of(&mi(&[0, 3])).unwrap());
        assert!(differentiate(&p, 0).unwrap().is_zero());
        assert!(differentiate(&p, 2).is_err());
    }

    #[test]
    fn monic_top_derivative_is_multi_factorial() {
        let b = Arc::new(Basis::total_degree(3, 4).unwrap());
        for i in 0..b.len() {
            let lower: Vec<Complex64> = (0..i).map(|j| c(j as f64 - 3.0, (j % 5) as f64)).collect();
            let p = PolyCoeffs::monic(b.clone(), &lower).unwrap();
            let alpha = b.index(i).clone();
            let d = higher_diff(&p, &alpha).unwrap();
            let fact = num_traits::ToPrimitive::to_f64(&alpha.multi_factorial()).unwrap();
            let mut expect = PolyCoeffs::zero(b.clone());
            expect.coeffs[0] = c(fact, 0.0);
            assert_eq!(d, expect, "i = {i}");
        }
    }

    #[test]
    fn higher_diff_examples() {
        let b = Arc::new(Basis::total_degree(1, 2).unwrap());
        let p = PolyCoeffs::new(b.clone(), vec![c(1., 2.), c(3., 0.), c(-1., 1.)]).unwrap();
        assert_eq!(higher_diff(&p, &mi(&[0])).unwrap(), p);
        let z2 = PolyCoeffs::monomial(b.clone(), 2);
        assert_eq!(higher_diff(&z2, &mi(&[2])).unwrap().coeffs(), &[c(2., 0.), c(0., 0.), c(0., 0.)]);

        let b = Arc::new(Basis::total_degree(2, 2).unwrap());
        let mut p = PolyCoeffs::zero(b.clone());
        p.coeffs[b.position_of(&mi(&[1, 1])).unwrap()] = c(1., 0.);
        p.coeffs[b.position_of(&mi(&[1, 0])).unwrap()] = c(1., 0.);
        let d = higher_diff(&p, &mi(&[1, 1])).unwrap();
        assert_eq!(d.coeffs()[0], c(1., 0.));
        assert!(d.coeffs()[1..].iter().all(|x| x.is_zero()));
    }

    #[test]
    fn sup_norm_examples() {
        let circle = SetModel::circle(c(0., 0.), 1.0, 256).unwrap();
        let b = Arc::new(Basis::total_degree(1, 7).unwrap());
        let p = PolyCoeffs::monomial(b.clone(), 7);
        assert!((sup_norm(&p, &circle).unwrap() - 1.0).abs() < 1e-14);
        let one = PolyCoeffs::monomial(b.clone(), 0);
        assert_eq!(sup_norm(&one, &circle).unwrap(), 1.0);
        assert!(matches!(sup_norm_points(&one, std::iter::empty()), Err(Error::EmptySet)));

        // T_4 through the three-term recurrence, expressed in the monomial basis
        let b = Arc::new(Basis::total_degree(1, 4).unwrap());
        let mut t_prev = vec![0.0; 5];
        let mut t_cur = vec![0.0; 5];
        t_prev[0] = 1.0;
        t_cur[1] = 1.0;
        for _ in 2..=4 {
            let mut next = vec![0.0; 5];
            for k in 0..4 {
                next[k + 1] += 2.0 * t_cur[k];
            }
            for k in 0..5 {
                next[k] -= t_prev[k];
            }
            t_prev = std::mem::replace(&mut t_cur, next);
        }
        let t4 = PolyCoeffs::new(b, t_cur.iter().map(|&x| c(x, 0.0)).collect()).unwrap();
        let seg = SetModel::segment(-1.0, 1.0, 1000).unwrap();
        assert!((sup_norm(&t4, &seg).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn eval_matrix_intertwines_derivative() {
        let set = SetModel::segment(-1.0, 2.0, 17).unwrap();
        let torus = SetModel::product(vec![
            SetModel::circle(c(0., 0.), 1.0, 5).unwrap(),
            SetModel::circle(c(0.5, 0.), 0.7, 6).unwrap(),
        ])
        .unwrap();
        for (s, d) in [(&set, 6), (&torus, 4)] {
            let b = Arc::new(Basis::total_degree(s.dim(), d).unwrap());
            let v = eval_matrix(&b, s.points()).unwrap();
            for m in 0..s.dim() {
                let op = DiffOperator::new(&b, m).unwrap();
                let coeffs: Vec<Complex64> = (0..b.len()).map(|j| c(1.0 + j as f64, -0.5 * j as f64)).collect();
                let p = PolyCoeffs::new(b.clone(), coeffs.clone()).unwrap();
                let dp = differentiate(&p, m).unwrap();
                let lhs = &v * nalgebra::DVector::from_vec(dp.coeffs().to_vec());
                let rhs = &v * op.to_matrix() * nalgebra::DVector::from_vec(coeffs);
                assert!((lhs - rhs).norm() < 1e-12);
            }
        }
    }
}
