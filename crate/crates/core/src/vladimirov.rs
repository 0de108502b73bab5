//! The Vladimirov operator `D^α` on locally constant functions, and the
//! p-adic heat equation `∂f/∂t + D^α f = 0` on a ball.
//!
//! For `f` supported in `B_N = p^{-N} Z_p` and constant on cosets of `p^M Z_p`,
//!
//! ```text
//! D^α f(x) = Γ · [ Σ_{cells c' ≠ c} w(c, c') (f_c − f_{c'}) + T_ext f_c ]
//! ```
//!
//! with `Γ = (p^α − 1)/(1 − p^{-1-α})`, `w = p^{-M} |x − y|^{-1-α}` and the
//! exterior integral `T_ext = ∫_{|y|>p^N} |y|^{-1-α} dy`. Distances between
//! cells only depend on the first differing digit, so the sum is evaluated
//! through nested ball sums.

use crate::error::{invalid, Error, Result};
use crate::wavelets::{analyze, synthesize, AnalyzeOptions, BallFunction, Grid, PRat, WaveletIndex};
use crate::PAdic;
use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

/// How the domain ball `B_N` couples to the rest of `Q_p`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExteriorPolicy {
    /// Mass that jumps out of the domain is lost.
    #[default]
    Absorbing,
    /// The whole line; the domain only limits what is reported.
    FullSpaceTail,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OperatorSpec {
    pub alpha: f64,
    pub p: u64,
    /// Domain ball `p^{-N} Z_p`.
    pub n: i32,
    pub policy: ExteriorPolicy,
}

impl OperatorSpec {
    pub fn new(alpha: f64, p: u64, n: i32, policy: ExteriorPolicy) -> Result<Self> {
        crate::padic::check_prime(p)?;
        if !(alpha > 0.0 && alpha.is_finite()) {
            return Err(invalid(format!("alpha must be positive, got {alpha}")));
        }
        Ok(Self { alpha, p, n, policy })
    }

    pub fn gamma(&self) -> f64 {
        gamma_p(self.alpha, self.p).expect("validated at construction")
    }

    /// `∫_{|y|>p^N} |y|^{-1-α} dy = (1 − 1/p) p^{-(N+1)α} / (1 − p^{-α})`.
    pub fn exterior_tail(&self) -> f64 {
        let p = self.p as f64;
        let a = self.alpha;
        (1.0 - 1.0 / p) * p.powf(-(self.n as f64 + 1.0) * a) / (1.0 - p.powf(-a))
    }
}

/// `(p^α − 1)/(1 − p^{-1-α})`.
pub fn gamma_p(alpha: f64, p: u64) -> Result<f64> {
    if !(alpha > 0.0) {
        return Err(invalid(format!("alpha must be positive, got {alpha}")));
    }
    let pf = p as f64;
    let den = 1.0 - pf.powf(-1.0 - alpha);
    if den == 0.0 {
        return Err(invalid("degenerate denominator"));
    }
    Ok((pf.powf(alpha) - 1.0) / den)
}

/// `p^{α(1−γ)}`.
pub fn eigenvalue(p: u64, alpha: f64, gamma: i32) -> f64 {
    (p as f64).powf(alpha * (1.0 - gamma as f64))
}

fn domain_grid(f: &BallFunction, spec: &OperatorSpec) -> Result<Grid> {
    let g = f.grid();
    if g.d != 1 {
        return Err(Error::ShapeMismatch("the Vladimirov operator acts on one-dimensional functions".into()));
    }
    if g.p != spec.p {
        return Err(Error::PrimeMismatch { left: spec.p, right: g.p });
    }
    if g.n > spec.n {
        return Err(Error::OutsideDomain(format!(
            "function grid p^{}Z_p exceeds the domain p^{}Z_p",
            -g.n, -spec.n
        )));
    }
    Grid::new(g.p, 1, spec.n, g.m)
}

/// Per-level weights `w_t = p^{-M} p^{-(N−t)(1+α)}` and pair counts
/// `p^{L−t} − p^{L−t−1}` for cells whose indices first differ at digit `t`.
fn level_weights(grid: Grid, alpha: f64) -> Vec<(f64, f64)> {
    let p = grid.p as f64;
    let levels = grid.n + grid.m;
    (0..levels)
        .map(|t| {
            let w = p.powi(-grid.m) * p.powf(-((grid.n - t) as f64) * (1.0 + alpha));
            let cnt = p.powi(levels - t) - p.powi(levels - t - 1);
            (w, cnt)
        })
        .collect()
}

/// `D^α f` on the domain ball, cell by cell.
pub fn apply_direct(f: &BallFunction, spec: &OperatorSpec) -> Result<BallFunction> {
    let grid = domain_grid(f, spec)?;
    let f = f.refine(grid.n, grid.m)?;
    let vals = f.values();
    let p = grid.p as usize;
    let levels = (grid.n + grid.m) as usize;

    // sums[t][r] = Σ_{c ≡ r mod p^t} f_c
    let mut sums: Vec<Vec<Complex64>> = vec![Vec::new(); levels + 1];
    sums[levels] = vals.to_vec();
    for t in (0..levels).rev() {
        let size = p.pow(t as u32);
        let finer = &sums[t + 1];
        sums[t] = (0..size).map(|r| (0..p).map(|a| finer[r + a * size]).sum()).collect();
    }

    let weights = level_weights(grid, spec.alpha);
    let gamma = spec.gamma();
    let tail = spec.exterior_tail();
    let mut out = BallFunction::zeros(grid);
    for (c, slot) in out.values_mut().iter_mut().enumerate() {
        let fc = vals[c];
        let mut acc = fc * tail;
        for (t, &(w, cnt)) in weights.iter().enumerate() {
            let ring = sums[t][c % p.pow(t as u32)] - sums[t + 1][c % p.pow(t as u32 + 1)];
            acc += (fc * cnt - ring) * w;
        }
        *slot = acc * gamma;
    }
    Ok(out)
}

/// The symmetric cell matrix of `D^α` on the domain grid at resolution `M`.
pub fn operator_matrix(spec: &OperatorSpec, m: i32) -> Result<DMatrix<f64>> {
    let grid = Grid::new(spec.p, 1, spec.n, m)?;
    let size = grid.len();
    if size > 4096 {
        return Err(Error::ResolutionOverflow(format!("{size} cells exceed the dense limit 4096")));
    }
    let weights = level_weights(grid, spec.alpha);
    let gamma = spec.gamma();
    let diag: f64 = weights.iter().map(|(w, c)| w * c).sum::<f64>() + spec.exterior_tail();
    let p = grid.p as usize;
    Ok(DMatrix::from_fn(size, size, |a, b| {
        if a == b {
            return gamma * diag;
        }
        let mut diff = a.abs_diff(b);
        let mut t = 0;
        while diff % p == 0 {
            diff /= p;
            t += 1;
        }
        -gamma * weights[t].0
    }))
}

/// Multiplies each coefficient by its eigenvalue `p^{α(1−γ)}`.
pub fn apply_spectral(
    coeffs: &BTreeMap<WaveletIndex, Complex64>,
    p: u64,
    alpha: f64,
) -> BTreeMap<WaveletIndex, Complex64> {
    coeffs
        .iter()
        .map(|(idx, c)| (idx.clone(), c * eigenvalue(p, alpha, idx.gamma)))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CompositeReport {
    /// `|a|_p^α`.
    pub factor: f64,
    pub max_deviation: f64,
    pub cells: usize,
}

/// Compares `D^α[f∘φ]` with `|a|_p^α (D^α f)∘φ` for `φ(x) = a x + b` on every
/// cell of the grid of `f∘φ`.
pub fn composite_rule_check(f: &BallFunction, a: &PAdic, b: &PAdic, alpha: f64) -> Result<CompositeReport> {
    let fg = f.grid();
    let p = fg.p;
    if a.is_zero() {
        return Err(invalid("a must be nonzero"));
    }
    if a.prime() != p || b.prime() != p {
        return Err(Error::PrimeMismatch { left: p, right: if a.prime() != p { a.prime() } else { b.prime() } });
    }
    let va = a.valuation() as i32;
    let vb = if b.is_zero() { fg.n.max(0) } else { (-b.valuation() as i32).max(fg.n) };
    let ng = vb + va;
    let mg = fg.m - va;

    // Truncations of a and b that are exact at the working resolution.
    let need = |x: &PAdic, below: i32| -> Result<PRat> {
        if x.is_exact_zero() {
            return Ok(PRat::zero(p));
        }
        let abs = x.absolute_precision().unwrap();
        if abs < below as i64 {
            return Err(Error::InsufficientPrecision { needed: below as i64, available: abs });
        }
        let mut acc = PRat::zero(p);
        for (i, d) in x.expansion() {
            if i >= below as i64 {
                break;
            }
            acc = acc.add(&PRat::integer(p, d as i128).shift(i as i32))?;
        }
        Ok(acc)
    };
    let at = need(a, fg.m + ng + 1)?;
    let bt = need(b, fg.m)?;

    let g_grid = Grid::new(p, 1, ng, mg)?;
    let phi = |x: &PRat| -> Result<PRat> {
        let ax = PRat::new(p, at.num.checked_mul(x.num).ok_or_else(|| Error::ResolutionOverflow("a·x".into()))?, at.exp + x.exp);
        ax.add(&bt)
    };
    let g = BallFunction::from_fn(g_grid, |x| f.eval(&[phi(&x[0])?]))?;

    let lhs = apply_direct(&g, &OperatorSpec::new(alpha, p, ng, ExteriorPolicy::FullSpaceTail)?)?;
    // D^α f is needed wherever φ lands, which may lie outside f's own grid.
    let reach = ng - va;
    let big_n = fg.n.max(reach).max(vb);
    let df = apply_direct(f, &OperatorSpec::new(alpha, p, big_n, ExteriorPolicy::FullSpaceTail)?)?;
    let factor = (p as f64).powf(-(va as f64) * alpha);

    let mut max_deviation = 0.0f64;
    for c in 0..g_grid.len() {
        let y = phi(&g_grid.point(c)[0])?;
        let rhs = df.eval(&[y])? * factor;
        max_deviation = max_deviation.max((lhs.values()[c] - rhs).norm());
    }
    Ok(CompositeReport { factor, max_deviation, cells: g_grid.len() })
}

#[derive(Debug, Clone)]
enum Modes {
    /// `f(t) = V e^{-Λt} Vᵀ f0` on the domain cells.
    Absorbing { rates: DVector<f64>, vectors: DMatrix<f64>, re: DVector<f64>, im: DVector<f64> },
    /// Wavelet coefficients inside the domain plus the domain mean, which
    /// spreads over the coarse scales `γ > N`.
    Spectral { coeffs: BTreeMap<WaveletIndex, Complex64>, mean: Complex64 },
}

#[derive(Debug, Clone)]
pub struct HeatSolution {
    pub spec: OperatorSpec,
    pub initial: BallFunction,
    pub times: Vec<f64>,
    pub states: Vec<BallFunction>,
    modes: Modes,
}

impl HeatSolution {
    /// Decay rates of the modes present in the solution.
    pub fn rates(&self) -> Vec<f64> {
        match &self.modes {
            Modes::Absorbing { rates, .. } => rates.iter().copied().collect(),
            Modes::Spectral { coeffs, .. } => {
                let s = &self.spec;
                let mut r: Vec<f64> = coeffs.keys().map(|i| eigenvalue(s.p, s.alpha, i.gamma)).collect();
                r.push(eigenvalue(s.p, s.alpha, s.n + 1));
                r
            }
        }
    }

    /// The solution at an arbitrary time.
    pub fn at(&self, t: f64) -> Result<BallFunction> {
        if !(t >= 0.0) {
            return Err(invalid(format!("time must be nonnegative, got {t}")));
        }
        let grid = self.initial.grid();
        match &self.modes {
            Modes::Absorbing { rates, vectors, re, im } => {
                let decay = rates.map(|l| (-l * t).exp());
                let vr = vectors * re.component_mul(&decay);
                let vi = vectors * im.component_mul(&decay);
                let vals = vr.iter().zip(vi.iter()).map(|(&a, &b)| Complex64::new(a, b)).collect();
                BallFunction::new(grid, vals)
            }
            Modes::Spectral { coeffs, mean } => {
                let s = &self.spec;
                let decayed: BTreeMap<_, _> = coeffs
                    .iter()
                    .map(|(i, c)| (i.clone(), c * (-eigenvalue(s.p, s.alpha, i.gamma) * t).exp()))
                    .collect();
                let mut f = synthesize(&decayed, grid)?;
                let m = mean * coarse_mean_factor(s, t);
                f.values_mut().iter_mut().for_each(|v| *v += m);
                Ok(f)
            }
        }
    }
}

/// `Σ_{γ>N} (p−1) p^{N−γ} e^{−p^{α(1−γ)} t}`: how the indicator of `B_N`
/// evolves on `B_N` under the full-line flow.
fn coarse_mean_factor(spec: &OperatorSpec, t: f64) -> f64 {
    let p = spec.p as f64;
    let mut acc = 0.0;
    for k in 1..200 {
        let w = (p - 1.0) * p.powi(-k);
        acc += w * (-eigenvalue(spec.p, spec.alpha, spec.n + k) * t).exp();
        if w < 1e-18 {
            break;
        }
    }
    acc
}

/// Solves `∂f/∂t + D^α f = 0` on the domain ball.
pub fn heat_solve(f0: &BallFunction, spec: &OperatorSpec, times: &[f64]) -> Result<HeatSolution> {
    if let Some(&t) = times.iter().find(|&&t| !(t >= 0.0)) {
        return Err(invalid(format!("time must be nonnegative, got {t}")));
    }
    let grid = domain_grid(f0, spec)?;
    let initial = f0.refine(grid.n, grid.m)?;
    let modes = match spec.policy {
        ExteriorPolicy::Absorbing => {
            let eig = SymmetricEigen::new(operator_matrix(spec, grid.m)?);
            let re = DVector::from_iterator(initial.len(), initial.values().iter().map(|z| z.re));
            let im = DVector::from_iterator(initial.len(), initial.values().iter().map(|z| z.im));
            let vt = eig.eigenvectors.transpose();
            Modes::Absorbing { re: &vt * re, im: &vt * im, rates: eig.eigenvalues, vectors: eig.eigenvectors }
        }
        ExteriorPolicy::FullSpaceTail => {
            let opts = AnalyzeOptions { gamma_min: 1 - grid.m, gamma_max: grid.n, n_bound: None };
            let coeffs = analyze(&initial, opts)?.coeffs;
            let mean = initial.integral() * (grid.p as f64).powi(-grid.n);
            Modes::Spectral { coeffs, mean }
        }
    };
    let mut sol = HeatSolution { spec: *spec, initial, times: times.to_vec(), states: Vec::new(), modes };
    sol.states = times.iter().map(|&t| sol.at(t)).collect::<Result<_>>()?;
    Ok(sol)
}

/// Mass left in the domain at time `t` under the absorbing flow.
pub fn survival(sol: &HeatSolution, t: f64) -> Result<f64> {
    if sol.spec.policy != ExteriorPolicy::Absorbing {
        return Err(Error::Precondition("survival needs the absorbing policy".into()));
    }
    let f0 = &sol.initial;
    if f0.values().iter().any(|v| v.im != 0.0 || v.re < 0.0) {
        return Err(Error::Precondition("initial data is not a nonnegative real density".into()));
    }
    let mass = f0.integral().re;
    if (mass - 1.0).abs() > 1e-9 {
        return Err(Error::Precondition(format!("initial density has mass {mass}, not 1")));
    }
    Ok(sol.at(t)?.integral().re)
}
