//! Sampling, analysis/synthesis and Gram checks for the Kozyrev families.

use super::{BallFunction, Grid, PRat, Translation, WaveletIndex};
use crate::error::{Error, Result};
use num_complex::Complex64;
use num_traits::Zero;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, HashMap};

/// Nonzero cells of one basis function.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseSample {
    pub cells: Vec<usize>,
    pub values: Vec<Complex64>,
}

impl SparseSample {
    pub fn to_dense(&self, grid: Grid) -> BallFunction {
        let mut f = BallFunction::zeros(grid);
        for (&c, &v) in self.cells.iter().zip(&self.values) {
            f.values_mut()[c] = v;
        }
        f
    }
}

fn check_representable(idx: &WaveletIndex, grid: Grid) -> Result<()> {
    if idx.dim() != grid.d {
        return Err(Error::ShapeMismatch(format!(
            "index of dimension {} on a grid of dimension {}",
            idx.dim(),
            grid.d
        )));
    }
    if idx.gamma > grid.n {
        return Err(Error::ResolutionOverflow(format!(
            "scale {} exceeds the grid support exponent {}",
            idx.gamma, grid.n
        )));
    }
    if grid.m + idx.gamma < 1 {
        return Err(Error::ResolutionOverflow(format!(
            "scale {} needs resolution M ≥ {}",
            idx.gamma,
            1 - idx.gamma
        )));
    }
    let max_b = (grid.n - idx.gamma) as u32;
    if idx.n.iter().any(|t| t.denominator_exp() > max_b) {
        return Err(Error::ResolutionOverflow(format!(
            "translation denominators beyond p^{max_b} leave the grid"
        )));
    }
    Ok(())
}

/// The wavelet on its support cells.
pub fn sample_sparse(idx: &WaveletIndex, grid: Grid) -> Result<SparseSample> {
    check_representable(idx, grid)?;
    let center = idx.center(grid.p);
    let exps = vec![-idx.gamma; grid.d as usize];
    let cells = grid.box_cells(&center, &exps)?;
    let values = cells
        .iter()
        .map(|&c| idx.eval_prat(grid.p, &grid.point(c)))
        .collect::<Result<Vec<_>>>()?;
    Ok(SparseSample { cells, values })
}

pub fn sample_wavelet(idx: &WaveletIndex, grid: Grid) -> Result<BallFunction> {
    Ok(sample_sparse(idx, grid)?.to_dense(grid))
}

/// Nonzero vectors in `{0..p-1}^d`, lexicographic.
pub(crate) fn rotation_vectors(p: u64, d: u32) -> Vec<Vec<u32>> {
    let total = (p as usize).pow(d);
    (1..total)
        .map(|mut r| {
            let mut k = vec![0u32; d as usize];
            for slot in k.iter_mut().rev() {
                *slot = (r % p as usize) as u32;
                r /= p as usize;
            }
            k
        })
        .collect()
}

/// Cartesian power of a translation list.
fn translation_tuples(list: &[Translation], d: u32) -> Vec<Vec<Translation>> {
    let mut out = vec![Vec::new()];
    for _ in 0..d {
        out = out
            .into_iter()
            .flat_map(|prefix: Vec<Translation>| {
                list.iter().map(move |t| {
                    let mut v = prefix.clone();
                    v.push(t.clone());
                    v
                })
            })
            .collect();
    }
    out
}

/// Every wavelet whose support lies in the grid and which the grid resolves:
/// `1 − M ≤ γ ≤ N`, all translations with denominator up to `p^{N-γ}`.
/// There are `p^{d(N+M)} − 1` of them.
pub fn enumerate_wavelets(grid: Grid) -> Result<Vec<WaveletIndex>> {
    let mut out = Vec::new();
    for gamma in (1 - grid.m)..=grid.n {
        let ts = Translation::all(grid.p, (grid.n - gamma) as u32)?;
        for n in translation_tuples(&ts, grid.d) {
            for k in rotation_vectors(grid.p, grid.d) {
                out.push(WaveletIndex { gamma, n: n.clone(), k });
            }
        }
    }
    Ok(out)
}

/// Scale range and translation cap for [`analyze`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnalyzeOptions {
    pub gamma_min: i32,
    pub gamma_max: i32,
    /// Largest translation denominator exponent considered; `None` = all that meet the grid.
    pub n_bound: Option<u32>,
}

impl AnalyzeOptions {
    /// All scales the grid resolves, plus `extra` coarser ones.
    pub fn full(grid: Grid, extra: i32) -> Self {
        Self { gamma_min: 1 - grid.m, gamma_max: grid.n + extra, n_bound: None }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Analysis {
    pub coeffs: BTreeMap<WaveletIndex, Complex64>,
    pub norm_sq: f64,
    /// `Σ |c|²`.
    pub captured: f64,
    /// `‖f‖² − Σ |c|²`.
    pub defect: f64,
}

/// `c_idx = ⟨ψ_idx, f⟩` for every index in range whose support meets `supp f`.
///
/// Scales finer than the grid resolution are skipped (those coefficients
/// vanish). Scales coarser than the grid only see `n = 0`, where the wavelet
/// is the constant `p^{-dγ/2}` on the grid.
pub fn analyze(f: &BallFunction, opts: AnalyzeOptions) -> Result<Analysis> {
    let grid = f.grid();
    let p = grid.p;
    let h = grid.cell_measure();
    let vals = f.values();
    let gmin = opts.gamma_min.max(1 - grid.m);

    let mut groups = Vec::new();
    for gamma in gmin..=opts.gamma_max.min(grid.n) {
        let mut b = (grid.n - gamma) as u32;
        if let Some(cap) = opts.n_bound {
            b = b.min(cap);
        }
        let ts = Translation::all(p, b)?;
        for n in translation_tuples(&ts, grid.d) {
            groups.push((gamma, n));
        }
    }
    let ks = rotation_vectors(p, grid.d);

    let fine: Vec<Vec<(WaveletIndex, Complex64)>> = groups
        .par_iter()
        .map(|(gamma, n)| -> Result<Vec<(WaveletIndex, Complex64)>> {
            let probe = WaveletIndex { gamma: *gamma, n: n.clone(), k: ks[0].clone() };
            let cells = grid.box_cells(&probe.center(p), &vec![-gamma; grid.d as usize])?;
            if cells.iter().all(|&c| vals[c].is_zero()) {
                return Ok(Vec::new());
            }
            let points: Vec<Vec<PRat>> = cells.iter().map(|&c| grid.point(c)).collect();
            ks.iter()
                .map(|k| {
                    let idx = WaveletIndex { gamma: *gamma, n: n.clone(), k: k.clone() };
                    let mut acc = Complex64::zero();
                    for (&c, x) in cells.iter().zip(&points) {
                        acc += idx.eval_prat(p, x)?.conj() * vals[c];
                    }
                    Ok((idx, acc * h))
                })
                .collect()
        })
        .collect::<Result<_>>()?;

    let mut coeffs: BTreeMap<WaveletIndex, Complex64> = fine.into_iter().flatten().collect();

    let total = f.integral();
    if !vals.iter().all(Complex64::is_zero) {
        for gamma in (grid.n + 1).max(gmin)..=opts.gamma_max {
            for k in &ks {
                let idx = WaveletIndex { gamma, n: vec![Translation::zero(); grid.d as usize], k: k.clone() };
                let c = total * idx.amplitude(p);
                coeffs.insert(idx, c);
            }
        }
    }

    let norm_sq = f.norm_sq();
    let captured: f64 = coeffs.values().map(|c| c.norm_sqr()).sum();
    Ok(Analysis { coeffs, norm_sq, captured, defect: norm_sq - captured })
}

/// `Σ c·ψ` on the grid.
pub fn synthesize(coeffs: &BTreeMap<WaveletIndex, Complex64>, grid: Grid) -> Result<BallFunction> {
    let mut f = BallFunction::zeros(grid);
    for (idx, &c) in coeffs {
        let s = sample_sparse(idx, grid)?;
        let vals = f.values_mut();
        for (&cell, &v) in s.cells.iter().zip(&s.values) {
            vals[cell] += c * v;
        }
    }
    Ok(f)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GramReport {
    pub size: usize,
    /// Number of pairs with overlapping supports (the rest are exactly orthogonal).
    pub overlapping_pairs: usize,
    pub max_diag_deviation: f64,
    pub max_offdiag: f64,
}

impl GramReport {
    pub fn max_deviation(&self) -> f64 {
        self.max_diag_deviation.max(self.max_offdiag)
    }
}

/// `max |G − I|` for sampled functions, accumulating only overlapping pairs.
pub fn gram(samples: &[SparseSample], cell_measure: f64) -> GramReport {
    let mut by_cell: BTreeMap<usize, Vec<(usize, Complex64)>> = BTreeMap::new();
    for (i, s) in samples.iter().enumerate() {
        for (&c, &v) in s.cells.iter().zip(&s.values) {
            if !v.is_zero() {
                by_cell.entry(c).or_default().push((i, v));
            }
        }
    }
    let mut acc: HashMap<(usize, usize), Complex64> = HashMap::new();
    for list in by_cell.values() {
        for &(a, va) in list {
            for &(b, vb) in list {
                if a <= b {
                    *acc.entry((a, b)).or_default() += va.conj() * vb;
                }
            }
        }
    }
    let mut diag = vec![0.0; samples.len()];
    let mut max_offdiag = 0.0f64;
    for (&(a, b), &g) in &acc {
        let g = g * cell_measure;
        if a == b {
            diag[a] = g.re;
        } else {
            max_offdiag = max_offdiag.max(g.norm());
        }
    }
    let max_diag_deviation = diag.iter().map(|d| (d - 1.0).abs()).fold(0.0, f64::max);
    GramReport { size: samples.len(), overlapping_pairs: acc.len(), max_diag_deviation, max_offdiag }
}

/// Gram check of every wavelet the grid holds.
pub fn wavelet_gram(grid: Grid) -> Result<GramReport> {
    let samples = enumerate_wavelets(grid)?
        .par_iter()
        .map(|idx| sample_sparse(idx, grid))
        .collect::<Result<Vec<_>>>()?;
    Ok(gram(&samples, grid.cell_measure()))
}

/// One line of a coefficient file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoefficientRecord {
    pub gamma: i32,
    pub n_digits: Vec<Vec<u32>>,
    /// Rotation of a one-dimensional index.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub j: Option<u32>,
    /// Rotation vector of a multidimensional index.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub k: Option<Vec<u32>>,
    pub re: f64,
    pub im: f64,
}

pub fn coefficients_to_records(coeffs: &BTreeMap<WaveletIndex, Complex64>) -> Vec<CoefficientRecord> {
    coeffs
        .iter()
        .map(|(idx, c)| {
            let one_d = idx.dim() == 1;
            CoefficientRecord {
                gamma: idx.gamma,
                n_digits: idx.n.iter().map(|t| t.digits().to_vec()).collect(),
                j: one_d.then(|| idx.j()),
                k: (!one_d).then(|| idx.k.clone()),
                re: c.re,
                im: c.im,
            }
        })
        .collect()
}

pub fn coefficients_from_records(
    p: u64,
    records: &[CoefficientRecord],
) -> Result<BTreeMap<WaveletIndex, Complex64>> {
    records
        .iter()
        .map(|r| {
            let n = r
                .n_digits
                .iter()
                .map(|d| Translation::new(p, d.clone()))
                .collect::<Result<Vec<_>>>()?;
            let k = match (&r.j, &r.k) {
                (Some(j), None) => vec![*j],
                (None, Some(k)) => k.clone(),
                _ => return Err(Error::Parse("record needs exactly one of j and k".into())),
            };
            Ok((WaveletIndex::new(p, r.gamma, n, k)?, Complex64::new(r.re, r.im)))
        })
        .collect()
}
