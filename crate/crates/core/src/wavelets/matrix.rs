//! Deformed norms on `Q_p^d`, the companion dilation `A`, and wavelets with
//! matrix dilation `Ψ_{k;jn}(x) = p^{-j/2} Ψ_k(A^j x − n)`.
//!
//! `A x = (x_2, …, x_d, p x_1)`. The quotient `Z_p^d / A^T Z_p^d` has order `p`
//! and is detected by `k_1 mod p`, so the nontrivial classes are `k = r e_1`
//! with `r = 1..p-1`. For those, `k·A^{-1} y = r y_d / p` and
//! `Ψ_k(y) = χ(r y_d / p) Ω(|y|_p)` (the unit `‖·‖`-ball is `Z_p^d`).

use super::transform::SparseSample;
use super::{ipow, GramReport, Grid, PRat, Translation};
use crate::error::{invalid, Error, Result};
use crate::padic::{additive_character, check_prime, rational_valuation};
use crate::{PAdic, Rational};
use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;

/// The companion-form dilation of `Q_p^d`.
pub fn dilation_matrix(p: u64, d: usize) -> Vec<Vec<i64>> {
    let mut a = vec![vec![0i64; d]; d];
    for (l, row) in a.iter_mut().enumerate().take(d.saturating_sub(1)) {
        row[l + 1] = 1;
    }
    if d > 0 {
        a[d - 1][0] = p as i64;
    }
    a
}

/// `s(x, y) = max_l q_l |x_l − y_l|_p`, optionally composed with a linear map `U`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeformedNorm {
    pub p: u64,
    pub weights: Vec<f64>,
    pub u: Option<Vec<Vec<Rational>>>,
}

impl DeformedNorm {
    /// Requires `p^{-1} < q_1 < … < q_d ≤ 1` and, if given, an invertible `U`.
    pub fn new(p: u64, weights: Vec<f64>, u: Option<Vec<Vec<Rational>>>) -> Result<Self> {
        check_prime(p)?;
        if weights.is_empty() {
            return Err(invalid("need at least one weight"));
        }
        let lo = 1.0 / p as f64;
        if weights[0] <= lo || *weights.last().unwrap() > 1.0 {
            return Err(invalid("weights must lie in (1/p, 1]"));
        }
        if weights.windows(2).any(|w| w[0] >= w[1]) {
            return Err(invalid("weights must increase strictly"));
        }
        if let Some(m) = &u {
            let d = weights.len();
            if m.len() != d || m.iter().any(|r| r.len() != d) {
                return Err(Error::ShapeMismatch(format!("U must be {d}×{d}")));
            }
            if determinant(m).is_zero() {
                return Err(invalid("U is singular"));
            }
        }
        Ok(Self { p, weights, u })
    }

    /// Evenly spaced weights in `(1/p, 1]`.
    pub fn standard(p: u64, d: usize) -> Result<Self> {
        let lo = 1.0 / p as f64;
        let w = (1..=d).map(|l| lo + (1.0 - lo) * l as f64 / d as f64).collect();
        Self::new(p, w, None)
    }

    pub fn dim(&self) -> usize {
        self.weights.len()
    }

    pub fn norm(&self, x: &[Rational]) -> Result<f64> {
        if x.len() != self.dim() {
            return Err(Error::ShapeMismatch(format!("point of dimension {}", x.len())));
        }
        let y: Vec<Rational> = match &self.u {
            None => x.to_vec(),
            Some(m) => m
                .iter()
                .map(|row| row.iter().zip(x).map(|(a, b)| a * b).sum())
                .collect(),
        };
        Ok(y.iter()
            .zip(&self.weights)
            .filter_map(|(yl, q)| {
                rational_valuation(yl, self.p).map(|v| q * (self.p as f64).powi(-(v as i32)))
            })
            .fold(0.0, f64::max))
    }

    /// Radius of the unit ball, `max q_l`.
    pub fn unit_radius(&self) -> f64 {
        *self.weights.last().unwrap()
    }

    /// Largest attainable norm value below the unit radius.
    pub fn subball_radius(&self) -> f64 {
        let r = self.unit_radius();
        let pf = self.p as f64;
        self.weights
            .iter()
            .flat_map(|&q| (0..3).map(move |k| q * pf.powi(-k)))
            .filter(|&v| v < r)
            .fold(0.0, f64::max)
    }
}

fn determinant(m: &[Vec<Rational>]) -> Rational {
    let n = m.len();
    let mut a = m.to_vec();
    let mut det = Rational::one();
    for c in 0..n {
        let Some(piv) = (c..n).find(|&r| !a[r][c].is_zero()) else {
            return Rational::zero();
        };
        if piv != c {
            a.swap(piv, c);
            det = -det;
        }
        det *= &a[c][c];
        for r in c + 1..n {
            let f = &a[r][c] / &a[c][c];
            for k in c..n {
                let t = &f * &a[c][k];
                a[r][k] -= t;
            }
        }
    }
    det
}

fn apply_a(x: &[PRat]) -> Vec<PRat> {
    let d = x.len();
    let mut y: Vec<PRat> = x[1..].to_vec();
    y.push(x[0].shift(1));
    debug_assert_eq!(y.len(), d);
    y
}

fn apply_a_inv(y: &[PRat]) -> Vec<PRat> {
    let d = y.len();
    let mut x = Vec::with_capacity(d);
    x.push(y[d - 1].shift(-1));
    x.extend_from_slice(&y[..d - 1]);
    x
}

fn a_pow(x: &[PRat], j: i32) -> Vec<PRat> {
    let mut v = x.to_vec();
    for _ in 0..j.unsigned_abs() {
        v = if j > 0 { apply_a(&v) } else { apply_a_inv(&v) };
    }
    v
}

fn a_pow_rational(p: u64, x: &[Rational], j: i32) -> Vec<Rational> {
    let pr = Rational::from_integer(BigInt::from(p));
    let d = x.len();
    let mut v = x.to_vec();
    for _ in 0..j.unsigned_abs() {
        v = if j > 0 {
            let mut y: Vec<Rational> = v[1..].to_vec();
            y.push(&v[0] * &pr);
            y
        } else {
            let mut y = vec![&v[d - 1] / &pr];
            y.extend_from_slice(&v[..d - 1]);
            y
        };
    }
    v
}

/// Exponents `e` with `A^m Z_p^d = Π_l p^{e_l} Z_p`.
fn lattice_exps(d: usize, m: i32) -> Vec<i32> {
    let mut e = vec![0i32; d];
    for _ in 0..m.unsigned_abs() {
        e = if m > 0 {
            let mut n: Vec<i32> = e[1..].to_vec();
            n.push(e[0] + 1);
            n
        } else {
            let mut n = vec![e[d - 1] - 1];
            n.extend_from_slice(&e[..d - 1]);
            n
        };
    }
    e
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct MatrixWaveletIndex {
    pub j: i32,
    pub n: Vec<Translation>,
    /// Representative `k = r e_1`, `r = 1..p-1`.
    pub r: u32,
}

impl MatrixWaveletIndex {
    pub fn new(p: u64, j: i32, n: Vec<Translation>, r: u32) -> Result<Self> {
        if r == 0 || r as u64 >= p {
            return Err(invalid(format!("representative r = {r} must lie in 1..{p}")));
        }
        if n.is_empty() {
            return Err(invalid("empty translation"));
        }
        Ok(Self { j, n, r })
    }

    fn amplitude(&self, p: u64) -> f64 {
        (p as f64).powf(-self.j as f64 / 2.0)
    }

    pub fn eval_prat(&self, p: u64, x: &[PRat]) -> Result<Complex64> {
        if x.len() != self.n.len() {
            return Err(Error::ShapeMismatch(format!("point of dimension {}", x.len())));
        }
        let ax = a_pow(x, self.j);
        let mut y = Vec::with_capacity(ax.len());
        for (a, t) in ax.iter().zip(&self.n) {
            let v = a.sub(&t.to_prat(p))?;
            if !v.in_zp() {
                return Ok(Complex64::zero());
            }
            y.push(v);
        }
        let phase = y.last().unwrap().mul_int(self.r as i128)?.shift(-1);
        Ok(phase.character()? * self.amplitude(p))
    }

    /// Support `A^{-j}(n + Z_p^d)` as a centre and per-coordinate exponents.
    pub fn support(&self, p: u64) -> (Vec<PRat>, Vec<i32>) {
        let n: Vec<PRat> = self.n.iter().map(|t| t.to_prat(p)).collect();
        (a_pow(&n, -self.j), lattice_exps(self.n.len(), -self.j))
    }
}

pub fn eval_matrix_wavelet(idx: &MatrixWaveletIndex, x: &[PAdic]) -> Result<Complex64> {
    let p = x.first().map(PAdic::prime).ok_or_else(|| invalid("empty point"))?;
    let d = idx.n.len();
    if x.len() != d {
        return Err(Error::ShapeMismatch(format!("point of dimension {}", x.len())));
    }
    // Ψ_{k;jn} is constant on cosets of A^{1-j} Z_p^d.
    let needed = lattice_exps(d, 1 - idx.j);
    for (xi, &e) in x.iter().zip(&needed) {
        if xi.prime() != p {
            return Err(Error::PrimeMismatch { left: p, right: xi.prime() });
        }
        if let Some(a) = xi.absolute_precision() {
            if a < e as i64 {
                return Err(Error::InsufficientPrecision { needed: e as i64, available: a });
            }
        }
    }
    let xr: Vec<Rational> = x.iter().map(PAdic::to_rational).collect();
    let ax = a_pow_rational(p, &xr, idx.j);
    let mut last = Rational::zero();
    for (a, t) in ax.iter().zip(&idx.n) {
        let v = a - t.to_rational(p);
        if rational_valuation(&v, p).is_some_and(|v| v < 0) {
            return Ok(Complex64::zero());
        }
        last = v;
    }
    let phase = last * Rational::new(BigInt::from(idx.r), BigInt::from(p));
    Ok(additive_character(&phase, p)? * idx.amplitude(p))
}

pub fn sample_matrix_wavelet(idx: &MatrixWaveletIndex, grid: Grid) -> Result<SparseSample> {
    let p = grid.p;
    let d = grid.d as usize;
    if idx.n.len() != d {
        return Err(Error::ShapeMismatch("index and grid dimensions differ".into()));
    }
    if lattice_exps(d, 1 - idx.j).iter().any(|&e| e > grid.m) {
        return Err(Error::ResolutionOverflow(format!("scale {} is finer than the grid", idx.j)));
    }
    let (center, exps) = idx.support(p);
    let cells = grid.box_cells(&center, &exps)?;
    let values = cells
        .iter()
        .map(|&c| idx.eval_prat(p, &grid.point(c)))
        .collect::<Result<Vec<_>>>()?;
    Ok(SparseSample { cells, values })
}

/// All matrix wavelets with scale in `js` whose support lies in the grid.
pub fn enumerate_matrix_wavelets(grid: Grid, js: std::ops::RangeInclusive<i32>) -> Result<Vec<MatrixWaveletIndex>> {
    let p = grid.p;
    let d = grid.d as usize;
    let mut out = Vec::new();
    for j in js {
        let exps = lattice_exps(d, -j);
        if exps.iter().any(|&e| e < -grid.n) || lattice_exps(d, 1 - j).iter().any(|&e| e > grid.m) {
            continue;
        }
        // Coset centres of A^{-j} Z_p^d inside (p^{-N} Z_p)^d.
        let mut centers: Vec<Vec<PRat>> = vec![Vec::new()];
        for &e in &exps {
            let count = ipow(p, (grid.n + e) as u32)?;
            centers = centers
                .into_iter()
                .flat_map(|c| {
                    (0..count).map(move |t| {
                        let mut v = c.clone();
                        v.push(PRat::new(p, t, grid.n));
                        v
                    })
                })
                .collect();
        }
        for c in centers {
            let n = a_pow(&c, j)
                .iter()
                .map(Translation::from_prat)
                .collect::<Result<Vec<_>>>()?;
            for r in 1..p as u32 {
                out.push(MatrixWaveletIndex { j, n: n.clone(), r });
            }
        }
    }
    out.sort();
    Ok(out)
}

pub fn matrix_wavelet_gram(grid: Grid, js: std::ops::RangeInclusive<i32>) -> Result<GramReport> {
    let samples = enumerate_matrix_wavelets(grid, js)?
        .par_iter()
        .map(|idx| sample_matrix_wavelet(idx, grid))
        .collect::<Result<Vec<_>>>()?;
    Ok(super::gram(&samples, grid.cell_measure()))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubballReport {
    pub cells: usize,
    pub unit_radius: f64,
    pub subball_radius: f64,
    pub max_image_norm: f64,
    /// The image cells are exactly the cells of the maximal subball.
    pub onto: bool,
}

/// Checks on every cell of `Z_p^d` at resolution `M` that `A` maps the unit
/// ball onto its maximal subball.
pub fn dilation_subball_check(norm: &DeformedNorm, m: i32) -> Result<SubballReport> {
    if norm.u.is_some() {
        return Err(invalid("the companion dilation is checked for the weighted norm without U"));
    }
    let p = norm.p;
    let grid = Grid::new(p, norm.dim() as u32, 0, m)?;
    let rsub = norm.subball_radius();
    let mut images = BTreeSet::new();
    let mut sub = BTreeSet::new();
    let mut max_image_norm = 0.0f64;
    for c in 0..grid.len() {
        let x = grid.point(c);
        let xr: Vec<Rational> = x.iter().map(PRat::to_rational).collect();
        if norm.norm(&xr)? <= rsub * (1.0 + 1e-12) {
            sub.insert(c);
        }
        let y = apply_a(&x);
        let yr: Vec<Rational> = y.iter().map(PRat::to_rational).collect();
        max_image_norm = max_image_norm.max(norm.norm(&yr)?);
        if let Some(i) = grid.index_of(&y)? {
            images.insert(i);
        }
    }
    Ok(SubballReport {
        cells: grid.len(),
        unit_radius: norm.unit_radius(),
        subball_radius: rsub,
        max_image_norm,
        onto: images == sub,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn det_i64(m: &[Vec<i64>]) -> Rational {
        let r: Vec<Vec<Rational>> = m
            .iter()
            .map(|row| row.iter().map(|&v| Rational::from_integer(BigInt::from(v))).collect())
            .collect();
        determinant(&r)
    }

    #[test]
    fn companion_matrix() {
        assert_eq!(dilation_matrix(5, 1), vec![vec![5]]);
        assert_eq!(dilation_matrix(2, 2), vec![vec![0, 1], vec![2, 0]]);
        for d in 1..6 {
            let det = det_i64(&dilation_matrix(3, d));
            assert_eq!(det.numer().magnitude(), &3u32.into());
        }
    }

    #[test]
    fn lattices() {
        assert_eq!(lattice_exps(2, 1), vec![0, 1]);
        assert_eq!(lattice_exps(2, 2), vec![1, 1]);
        assert_eq!(lattice_exps(3, -1), vec![-1, 0, 0]);
        assert_eq!(lattice_exps(1, 3), vec![3]);
        let x = vec![PRat::integer(3, 1), PRat::integer(3, 2)];
        assert_eq!(a_pow(&a_pow(&x, 3), -3), x);
    }

    #[test]
    fn norm_validation() {
        assert!(DeformedNorm::new(2, vec![0.4, 0.8], None).is_err());
        assert!(DeformedNorm::new(2, vec![0.8, 0.6], None).is_err());
        let sing = vec![vec![Rational::one(), Rational::one()]; 2];
        assert!(DeformedNorm::new(2, vec![0.6, 0.8], Some(sing)).is_err());
        let n = DeformedNorm::new(2, vec![0.6, 0.8], None).unwrap();
        let x = vec![Rational::new(1.into(), 2.into()), Rational::from_integer(4.into())];
        assert!((n.norm(&x).unwrap() - 1.2).abs() < 1e-15);
        assert!((n.subball_radius() - 0.6).abs() < 1e-15);
    }

    #[test]
    fn mother_matrix_wavelet() {
        let idx = MatrixWaveletIndex::new(2, 0, vec![Translation::zero(); 2], 1).unwrap();
        let zero = vec![PAdic::zero(2).unwrap(); 2];
        assert_eq!(eval_matrix_wavelet(&idx, &zero).unwrap(), Complex64::new(1.0, 0.0));
        let x = vec![PAdic::zero(2).unwrap(), PAdic::from_integer(1, 2, 4).unwrap()];
        assert_eq!(eval_matrix_wavelet(&idx, &x).unwrap(), Complex64::new(-1.0, 0.0));
    }

    #[test]
    fn basis_vectors_off_the_first_axis_give_constants() {
        // k = e_2 gives k·A^{-1}y = y_1 ∈ Z_p: χ ≡ 1 on the unit ball.
        let g = Grid::new(3, 2, 0, 2).unwrap();
        for c in 0..g.len() {
            let y = apply_a_inv(&g.point(c));
            assert!(y[1].character().unwrap() == Complex64::new(1.0, 0.0));
        }
    }

    #[test]
    fn gram_and_completeness() {
        let g = Grid::new(2, 2, 1, 2).unwrap();
        let idx = enumerate_matrix_wavelets(g, -2..=2).unwrap();
        assert_eq!(idx.len(), 31);
        let r = matrix_wavelet_gram(g, -2..=2).unwrap();
        assert!(r.max_deviation() < 1e-12, "{r:?}");
        // Inside the unit ball: 7 wavelets plus the indicator span all 8 cosets of A^3 Z_2^2.
        let unit = Grid::new(2, 2, 0, 2).unwrap();
        assert_eq!(enumerate_matrix_wavelets(unit, -2..=0).unwrap().len(), 7);
        for (p, d) in [(3, 2), (2, 3)] {
            let g = Grid::new(p, d, 0, 2).unwrap();
            let r = matrix_wavelet_gram(g, -3..=0).unwrap();
            assert!(r.max_deviation() < 1e-12, "p={p} d={d}: {r:?}");
        }
    }

    #[test]
    fn dilation_hits_maximal_subball() {
        for (p, d) in [(2, 2), (3, 2), (2, 3), (5, 1)] {
            let n = DeformedNorm::standard(p, d).unwrap();
            let r = dilation_subball_check(&n, 3.min(6 / d as i32)).unwrap();
            assert!(r.onto, "p={p} d={d}");
            assert!(r.max_image_norm <= r.subball_radius + 1e-15);
        }
    }
}
