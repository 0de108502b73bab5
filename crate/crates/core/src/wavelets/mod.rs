//! Kozyrev wavelets on `Q_p` and `Q_p^d`, matrix-dilation wavelets, and the
//! coset-grid representation of locally constant functions they act on.
//!
//! One formula covers the one- and multidimensional families:
//!
//! ```text
//! ψ_{γ,n,k}(x) = p^{-dγ/2} χ(p^{-1} k·(p^γ x − n)) Ω(|p^γ x − n|_p)
//! ```
//!
//! In one dimension `k = (j)` and this is `p^{-γ/2} χ(p^{γ-1} j (x − p^{-γ} n)) Ω(|p^γ x − n|_p)`.
//! Its support is the ball of radius `p^γ` around `p^{-γ} n`.

mod grid;
mod matrix;
mod monna;
mod transform;

pub use grid::{BallFunction, Grid, PRat};
pub use matrix::{
    dilation_matrix, dilation_subball_check, enumerate_matrix_wavelets, eval_matrix_wavelet,
    matrix_wavelet_gram, sample_matrix_wavelet, DeformedNorm, MatrixWaveletIndex, SubballReport,
};
pub use monna::{haar, monna_conjugate_check, MonnaReport};
pub use transform::{
    analyze, coefficients_from_records, coefficients_to_records, enumerate_wavelets, gram,
    sample_sparse, sample_wavelet, synthesize, wavelet_gram, AnalyzeOptions, Analysis,
    CoefficientRecord, GramReport, SparseSample,
};

pub(crate) use grid::ipow;

use crate::error::{invalid, Error, Result};
use crate::padic::{additive_character, rational_valuation};
use crate::{PAdic, Rational};
use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

/// A representative `n = Σ_t digits[t] p^{-(t+1)}` of `Q_p/Z_p`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Translation {
    digits: Vec<u32>,
}

impl Translation {
    pub fn new(p: u64, mut digits: Vec<u32>) -> Result<Self> {
        if let Some(d) = digits.iter().find(|&&d| d as u64 >= p) {
            return Err(invalid(format!("translation digit {d} out of range for p = {p}")));
        }
        while digits.last() == Some(&0) {
            digits.pop();
        }
        Ok(Self { digits })
    }

    pub fn zero() -> Self {
        Self::default()
    }

    pub fn digits(&self) -> &[u32] {
        &self.digits
    }

    /// `B` with denominator `p^B`.
    pub fn denominator_exp(&self) -> u32 {
        self.digits.len() as u32
    }

    /// `{x}_p` as a translation.
    pub fn from_prat(x: &PRat) -> Result<Self> {
        let (r, _) = x.frac()?;
        let b = x.exp.max(0) as usize;
        let pi = x.p as i128;
        let mut digits = vec![0u32; b];
        let mut rest = r;
        // r = Σ_t digits[t] p^{b-1-t}
        for t in (0..b).rev() {
            digits[t] = (rest % pi) as u32;
            rest /= pi;
        }
        Self::new(x.p, digits)
    }

    pub fn to_prat(&self, p: u64) -> PRat {
        let b = self.digits.len() as i32;
        let num = self.digits.iter().fold(0i128, |acc, &d| acc * p as i128 + d as i128);
        PRat::new(p, num, b)
    }

    pub fn to_rational(&self, p: u64) -> Rational {
        self.to_prat(p).to_rational()
    }

    /// All translations with denominator dividing `p^b`, in increasing order of `p^b n`.
    pub fn all(p: u64, b: u32) -> Result<Vec<Self>> {
        let count = ipow(p, b)?;
        (0..count).map(|r| Self::from_prat(&PRat::new(p, r, b as i32))).collect()
    }

    /// Monna image `Σ_t digits[t] p^t`.
    pub fn monna(&self, p: u64) -> f64 {
        self.digits.iter().rev().fold(0.0, |acc, &d| acc * p as f64 + d as f64)
    }
}

/// `(γ, n, k)`; in one dimension `k = (j)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct WaveletIndex {
    pub gamma: i32,
    pub n: Vec<Translation>,
    pub k: Vec<u32>,
}

impl WaveletIndex {
    pub fn new(p: u64, gamma: i32, n: Vec<Translation>, k: Vec<u32>) -> Result<Self> {
        if n.len() != k.len() || k.is_empty() {
            return Err(Error::ShapeMismatch(format!(
                "translation of dimension {} with k of dimension {}",
                n.len(),
                k.len()
            )));
        }
        if k.iter().all(|&c| c == 0) {
            return Err(invalid("k must have a nonzero component"));
        }
        if let Some(&c) = k.iter().find(|&&c| c as u64 >= p) {
            return Err(invalid(format!("k component {c} out of range for p = {p}")));
        }
        if let Some(t) = n.iter().flat_map(|t| t.digits()).find(|&&d| d as u64 >= p) {
            return Err(invalid(format!("translation digit {t} out of range for p = {p}")));
        }
        Ok(Self { gamma, n, k })
    }

    pub fn one_d(p: u64, gamma: i32, n: Translation, j: u32) -> Result<Self> {
        Self::new(p, gamma, vec![n], vec![j])
    }

    pub fn mother() -> Self {
        Self { gamma: 0, n: vec![Translation::zero()], k: vec![1] }
    }

    pub fn dim(&self) -> u32 {
        self.k.len() as u32
    }

    /// Rotation `j` of a one-dimensional index.
    pub fn j(&self) -> u32 {
        self.k[0]
    }

    /// `p^{-dγ/2}`.
    pub fn amplitude(&self, p: u64) -> f64 {
        (p as f64).powf(-(self.dim() as f64) * self.gamma as f64 / 2.0)
    }

    /// Centre `p^{-γ} n` of the support ball, per coordinate.
    pub fn center(&self, p: u64) -> Vec<PRat> {
        self.n.iter().map(|t| t.to_prat(p).shift(-self.gamma)).collect()
    }

    /// Value at a grid point.
    pub fn eval_prat(&self, p: u64, x: &[PRat]) -> Result<Complex64> {
        if x.len() != self.k.len() {
            return Err(Error::ShapeMismatch(format!("point of dimension {}", x.len())));
        }
        let mut phase = PRat::zero(p);
        for ((xl, nl), &kl) in x.iter().zip(&self.n).zip(&self.k) {
            let y = xl.shift(self.gamma).sub(&nl.to_prat(p))?;
            if !y.in_zp() {
                return Ok(Complex64::zero());
            }
            phase = phase.add(&y.mul_int(kl as i128)?)?;
        }
        Ok(phase.shift(-1).character()? * self.amplitude(p))
    }

    /// Value at an exact rational point.
    pub fn eval_rational(&self, p: u64, x: &[Rational]) -> Result<Complex64> {
        if x.len() != self.k.len() {
            return Err(Error::ShapeMismatch(format!("point of dimension {}", x.len())));
        }
        let pg = crate::padic::p_power(p, self.gamma as i64);
        let mut phase = Rational::zero();
        for ((xl, nl), &kl) in x.iter().zip(&self.n).zip(&self.k) {
            let y = xl * &pg - nl.to_rational(p);
            if rational_valuation(&y, p).is_some_and(|v| v < 0) {
                return Ok(Complex64::zero());
            }
            phase += y * Rational::from_integer(BigInt::from(kl));
        }
        let phase = phase / Rational::from_integer(BigInt::from(p));
        Ok(additive_character(&phase, p)? * self.amplitude(p))
    }
}

/// Absolute precision a coordinate needs so that `ψ` at scale `γ` is determined.
fn check_precision(x: &PAdic, gamma: i32) -> Result<()> {
    let needed = 1 - gamma as i64;
    match x.absolute_precision() {
        Some(a) if a < needed => Err(Error::InsufficientPrecision { needed, available: a }),
        _ => Ok(()),
    }
}

/// Mother wavelet `ψ(x) = χ(p^{-1} x) Ω(|x|_p)`.
pub fn eval_mother_wavelet(x: &PAdic) -> Result<Complex64> {
    eval_wavelet(&WaveletIndex::mother(), x)
}

/// `ψ_{γnj}(x)` for a one-dimensional index.
pub fn eval_wavelet(idx: &WaveletIndex, x: &PAdic) -> Result<Complex64> {
    eval_wavelet_md(idx, std::slice::from_ref(x))
}

/// `ψ_{k;γn}(x) = p^{-dγ/2} ψ_k(p^γ x − n)` on `Q_p^d`.
pub fn eval_wavelet_md(idx: &WaveletIndex, x: &[PAdic]) -> Result<Complex64> {
    let p = x.first().map(PAdic::prime).ok_or_else(|| invalid("empty point"))?;
    if let Some(bad) = x.iter().find(|xi| xi.prime() != p) {
        return Err(Error::PrimeMismatch { left: p, right: bad.prime() });
    }
    for xi in x {
        check_precision(xi, idx.gamma)?;
    }
    let xr: Vec<Rational> = x.iter().map(PAdic::to_rational).collect();
    idx.eval_rational(p, &xr)
}
