//! Invariant suites. Each suite draws its random inputs from a ChaCha stream
//! keyed by the seed and the suite, and reports findings without timing
//! information so that reruns are byte-identical.

use anyhow::{anyhow, Result};
use clap::ValueEnum;
use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use std::collections::BTreeSet;
use ultrametra::genetic::{self, CodeTable, Codon};
use ultrametra::padic::{additive_product_check, factorial_norm, mult_product_check, padic_norm};
use ultrametra::series::{self, Epsilon, InvariantSolution};
use ultrametra::strings::{self, AmplitudeParams};
use ultrametra::ultrametric::{self, UltrametricTree, ZpDensity};
use ultrametra::vladimirov::{self, ExteriorPolicy, OperatorSpec};
use ultrametra::wavelets::{self, BallFunction, Grid, Translation, WaveletIndex};
use ultrametra::{PAdic, Rational};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    Adelic,
    Series,
    Invariant,
    Wavelets,
    Vladimirov,
    Tree,
    Iid,
    Amplitudes,
    Genetic,
    All,
}

impl Suite {
    pub const EACH: [Suite; 9] = [
        Suite::Adelic,
        Suite::Series,
        Suite::Invariant,
        Suite::Wavelets,
        Suite::Vladimirov,
        Suite::Tree,
        Suite::Iid,
        Suite::Amplitudes,
        Suite::Genetic,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Adelic => "adelic",
            Suite::Series => "series",
            Suite::Invariant => "invariant",
            Suite::Wavelets => "wavelets",
            Suite::Vladimirov => "vladimirov",
            Suite::Tree => "tree",
            Suite::Iid => "iid",
            Suite::Amplitudes => "amplitudes",
            Suite::Genetic => "genetic",
            Suite::All => "all",
        }
    }

    fn stream(self) -> u64 {
        Suite::EACH.iter().position(|&s| s == self).unwrap_or(0) as u64 + 1
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Finding {
    pub name: String,
    pub passed: bool,
    /// The measured quantity: a deviation, a count of failures, or a value.
    pub measured: f64,
    /// The threshold `measured` was held to, if any.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub limit: Option<f64>,
    #[serde(skip_serializing_if = "String::is_empty")]
    pub detail: String,
}

impl Finding {
    fn at_most(name: &str, measured: f64, limit: f64) -> Self {
        Self { name: name.into(), passed: measured <= limit, measured, limit: Some(limit), detail: String::new() }
    }

    fn failures(name: &str, count: usize, of: usize) -> Self {
        Self {
            name: name.into(),
            passed: count == 0,
            measured: count as f64,
            limit: Some(0.0),
            detail: format!("{count} of {of} failed"),
        }
    }

    fn holds(name: &str, ok: bool, detail: impl Into<String>) -> Self {
        Self { name: name.into(), passed: ok, measured: f64::from(u8::from(ok)), limit: None, detail: detail.into() }
    }

    fn detail(mut self, d: impl Into<String>) -> Self {
        self.detail = d.into();
        self
    }

    fn error(name: &str, e: anyhow::Error) -> Self {
        Self { name: name.into(), passed: false, measured: f64::NAN, limit: None, detail: format!("error: {e:#}") }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub seed: u64,
    pub passed: bool,
    pub findings: Vec<Finding>,
}

#[derive(Debug, Clone, Serialize)]
pub struct FindingRow {
    pub suite: String,
    pub name: String,
    pub passed: bool,
    pub measured: f64,
    pub limit: Option<f64>,
    pub detail: String,
}

impl SuiteReport {
    pub fn rows(&self) -> Vec<FindingRow> {
        self.findings
            .iter()
            .map(|f| FindingRow {
                suite: self.suite.clone(),
                name: f.name.clone(),
                passed: f.passed,
                measured: f.measured,
                limit: f.limit,
                detail: f.detail.clone(),
            })
            .collect()
    }
}

/// Runs `suite` (or every suite for [`Suite::All`]).
pub fn run(suite: Suite, seed: u64) -> Vec<SuiteReport> {
    if suite == Suite::All {
        return Suite::EACH.iter().map(|&s| run_one(s, seed)).collect();
    }
    vec![run_one(suite, seed)]
}

pub fn run_one(suite: Suite, seed: u64) -> SuiteReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(suite.stream());
    let findings = match suite {
        Suite::Adelic => adelic(&mut rng),
        Suite::Series => series_suite(),
        Suite::Invariant => invariant(&mut rng),
        Suite::Wavelets => wavelet_suite(),
        Suite::Vladimirov => vladimirov_suite(&mut rng),
        Suite::Tree => tree_suite(&mut rng),
        Suite::Iid => iid(&mut rng),
        Suite::Amplitudes => amplitudes(&mut rng),
        Suite::Genetic => genetic_suite(),
        Suite::All => unreachable!("expanded by run"),
    };
    SuiteReport { suite: suite.name().into(), seed, passed: findings.iter().all(|f| f.passed), findings }
}

/// Turns a fallible finding into a failing one on error.
fn guard(name: &str, f: impl FnOnce() -> Result<Finding>) -> Finding {
    f().unwrap_or_else(|e| Finding::error(name, e))
}

fn q(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

fn nonzero(rng: &mut ChaCha8Rng, bound: i64) -> i64 {
    loop {
        let v = rng.random_range(-bound..=bound);
        if v != 0 {
            return v;
        }
    }
}

// ---------------------------------------------------------------- 1

fn adelic(rng: &mut ChaCha8Rng) -> Vec<Finding> {
    let mult = guard("multiplicative product formula", || {
        let mut bad = 0;
        for _ in 0..1000 {
            let r = q(nonzero(rng, 1_000_000), rng.random_range(1..=1_000_000));
            if mult_product_check(&r)? != Rational::one() {
                bad += 1;
            }
        }
        Ok(Finding::failures("multiplicative product formula", bad, 1000))
    });
    let add = guard("additive product formula", || {
        let mut worst = 0.0f64;
        for _ in 0..1000 {
            let r = q(rng.random_range(-1_000_000..=1_000_000), rng.random_range(1..=10_000));
            worst = worst.max((additive_product_check(&r)? - Complex64::new(1.0, 0.0)).norm());
        }
        Ok(Finding::at_most("additive product formula", worst, 1e-12))
    });
    vec![mult, add]
}

// ---------------------------------------------------------------- 2

fn series_suite() -> Vec<Finding> {
    let partial = guard("partial sums Σ_{n<N} n!·n = N! − 1", || {
        let bad = (1..=200u64).filter(|&n| !series::partial_sum_identity_check(n).unwrap_or(false)).count();
        Ok(Finding::failures("partial sums Σ_{n<N} n!·n = N! − 1", bad, 200))
    });
    let minus_one = guard("Σ n!·n = −1 to 30 digits", || {
        let mut bad = Vec::new();
        for p in [2u64, 3, 5, 7] {
            let r = series::sum_factorial_linear(p, 30)?;
            let target = PAdic::from_integer(-1, p, 30)?;
            if !(r.value.approx_eq(&target)? && r.value.absolute_precision().unwrap_or(i64::MAX) >= 30) {
                bad.push(p);
            }
        }
        Ok(Finding::failures("Σ n!·n = −1 to 30 digits", bad.len(), 4).detail(format!("primes failing: {bad:?}")))
    });
    let decay = guard("|S_N + 1|_p = |(N+1)!|_p ≤ |N!|_p", || {
        let mut bad = 0;
        let mut fact = BigInt::one();
        let mut s = BigInt::zero();
        for n in 1..=200u64 {
            fact *= n;
            s += &fact * n;
            let err = Rational::from_integer(&s + 1);
            for p in [2u64, 3, 5, 7] {
                let d = padic_norm(&err, p);
                if d != factorial_norm(n + 1, p)? || d > factorial_norm(n, p)? {
                    bad += 1;
                }
            }
        }
        Ok(Finding::failures("|S_N + 1|_p = |(N+1)!|_p ≤ |N!|_p", bad, 800))
    });
    vec![partial, minus_one, decay]
}

// ---------------------------------------------------------------- 3

/// `Σ_{i<n} ε^i i! ((ix)^k + U(x)) x^i − V(x) − ε^n n! A(n;x) x^n`, term by term.
fn invariant_defect(sol: &InvariantSolution, x: i64, n: u64) -> BigInt {
    let x = BigInt::from(x);
    let sign = |i: u64| if sol.epsilon == Epsilon::Minus && i % 2 == 1 { -1 } else { 1 };
    let fact = |i: u64| (1..=i).fold(BigInt::one(), |acc, j| acc * j);
    let mut lhs = BigInt::zero();
    for i in 0..n {
        let ix = BigInt::from(i) * &x;
        lhs += fact(i) * (num_traits::pow(ix, sol.k as usize) + sol.u.eval(&x)) * num_traits::pow(x.clone(), i as usize) * sign(i);
    }
    let rhs = sol.v.eval(&x) + fact(n) * sol.a.eval(&BigInt::from(n), &x) * num_traits::pow(x.clone(), n as usize) * sign(n);
    lhs - rhs
}

fn invariant(rng: &mut ChaCha8Rng) -> Vec<Finding> {
    let xs: Vec<i64> = (0..10).map(|_| rng.random_range(-1000..=1000)).collect();
    let mut out = Vec::new();
    out.push(guard("k=1 solution is (x − 1, −1, 1)", || {
        let s = series::solve_invariant_summation(1, Epsilon::Plus, 20)?;
        let got = (s.u.display("x"), s.v.display("x"), s.a.display());
        let ok = got == ("x - 1".into(), "-1".into(), "1".into());
        Ok(Finding::holds("k=1 solution is (x − 1, −1, 1)", ok, format!("U = {}, V = {}, A = {}", got.0, got.1, got.2)))
    }));
    for (k, eps) in [(1u32, Epsilon::Plus), (2, Epsilon::Plus)] {
        let name = format!("k={k} identity at 10 random x, n ≤ 20");
        out.push(guard(&name, || {
            let s = series::solve_invariant_summation(k, eps, 20)?;
            let bad = xs.iter().filter(|&&x| (0..=20).any(|n| !invariant_defect(&s, x, n).is_zero())).count();
            Ok(Finding::failures(&name, bad, xs.len()).detail(format!(
                "U = {}, V = {}, A = {}; x = {xs:?}",
                s.u.display("x"),
                s.v.display("x"),
                s.a.display()
            )))
        }));
    }
    out
}

// ---------------------------------------------------------------- 4

fn wavelet_suite() -> Vec<Finding> {
    let mut out = Vec::new();
    for p in [2u64, 3, 5] {
        let name = format!("1D Gram, p={p}, scales p^-2 … p^2");
        out.push(guard(&name, || {
            let r = wavelets::wavelet_gram(Grid::new(p, 1, 2, 3)?)?;
            Ok(Finding::at_most(&name, r.max_deviation(), 1e-10).detail(format!("{} wavelets", r.size)))
        }));
    }
    out.push(guard("2D Gram, p=2", || {
        let r = wavelets::wavelet_gram(Grid::new(2, 2, 2, 2)?)?;
        Ok(Finding::at_most("2D Gram, p=2", r.max_deviation(), 1e-10).detail(format!("{} wavelets", r.size)))
    }));
    out.push(guard("matrix-dilation Gram, p=2, d=2, |j| ≤ 2", || {
        let r = wavelets::matrix_wavelet_gram(Grid::new(2, 2, 1, 2)?, -2..=2)?;
        Ok(Finding::at_most("matrix-dilation Gram, p=2, d=2, |j| ≤ 2", r.max_deviation(), 1e-10)
            .detail(format!("{} wavelets", r.size)))
    }));
    out.push(guard("mean zero and p^γ|ψ|²ψ = ψ", || {
        let mut worst = 0.0f64;
        for p in [2u64, 3, 5] {
            let g = Grid::new(p, 1, 1, 2)?;
            for idx in wavelets::enumerate_wavelets(g)? {
                let psi = wavelets::sample_wavelet(&idx, g)?;
                worst = worst.max(psi.integral().norm());
                let scale = (p as f64).powi(idx.gamma);
                for v in psi.values() {
                    worst = worst.max((v * v.norm_sqr() * scale - v).norm());
                }
            }
        }
        Ok(Finding::at_most("mean zero and p^γ|ψ|²ψ = ψ", worst, 1e-12))
    }));
    out.push(guard("Monna conjugation at resolution 4", || {
        let g = Grid::new(2, 1, 0, 4)?;
        let mut worst = 0.0f64;
        for idx in wavelets::enumerate_wavelets(g)? {
            worst = worst.max(wavelets::monna_conjugate_check(&idx, g)?.max_deviation);
        }
        let wide = Grid::new(2, 1, 2, 4)?;
        for n in Translation::all(2, 1)? {
            worst = worst.max(wavelets::monna_conjugate_check(&WaveletIndex::one_d(2, 1, n, 1)?, wide)?.max_deviation);
        }
        Ok(Finding::at_most("Monna conjugation at resolution 4", worst, 0.0))
    }));
    out
}

// ---------------------------------------------------------------- 5

fn random_function(grid: Grid, rng: &mut ChaCha8Rng) -> Result<BallFunction> {
    let vals = (0..grid.len()).map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))).collect();
    Ok(BallFunction::new(grid, vals)?)
}

fn vladimirov_suite(rng: &mut ChaCha8Rng) -> Vec<Finding> {
    let eigen = guard("wavelets are eigenfunctions (27 cases)", || {
        let mut worst = 0.0f64;
        for p in [2u64, 3, 5] {
            for alpha in [0.5, 1.0, 2.0] {
                for gamma in [-1, 0, 1] {
                    let grid = Grid::new(p, 1, 2, 2)?;
                    let idx = WaveletIndex::one_d(p, gamma, Translation::new(p, vec![1])?, 1)?;
                    let psi = wavelets::sample_wavelet(&idx, grid)?;
                    let spec = OperatorSpec::new(alpha, p, 2, ExteriorPolicy::FullSpaceTail)?;
                    let lam = vladimirov::eigenvalue(p, alpha, gamma);
                    let d = vladimirov::apply_direct(&psi, &spec)?;
                    worst = worst.max(d.max_abs_diff(&psi.scale(Complex64::new(lam, 0.0)))?);
                }
            }
        }
        Ok(Finding::at_most("wavelets are eigenfunctions (27 cases)", worst, 1e-8))
    });
    let composite = guard("composite rule, 100 affine maps", || {
        let mut worst = 0.0f64;
        for _ in 0..100 {
            let p = [2u64, 3, 5][rng.random_range(0..3)];
            let grid = Grid::new(p, 1, rng.random_range(0..2), rng.random_range(1..3))?;
            let f = random_function(grid, rng)?;
            let v = rng.random_range(-1..=1);
            let unit = loop {
                let u: i64 = rng.random_range(1..30);
                if u % p as i64 != 0 {
                    break u;
                }
            };
            let a = Rational::from_integer(unit.into()) * Rational::from_integer((p as i64).into()).pow(v);
            let a = PAdic::from_rational(&a, p, 12)?;
            let den = [1i64, p as i64, 7 * (p * p) as i64][rng.random_range(0..3)];
            let b = PAdic::from_rational(&q(rng.random_range(-20..20), den), p, 12)?;
            let alpha = rng.random_range(0.3..2.5);
            worst = worst.max(vladimirov::composite_rule_check(&f, &a, &b, alpha)?.max_deviation);
        }
        Ok(Finding::at_most("composite rule, 100 affine maps", worst, 1e-8))
    });
    let heat = guard("spectral vs direct heat flow, t ≤ 0.1", || {
        let f0 = BallFunction::unit_ball(Grid::new(2, 1, 0, 4)?)?;
        let times = [0.0, 0.02, 0.05, 0.1];
        let direct = vladimirov::heat_solve(&f0, &OperatorSpec::new(1.0, 2, 3, ExteriorPolicy::Absorbing)?, &times)?;
        let spectral = vladimirov::heat_solve(&f0, &OperatorSpec::new(1.0, 2, 3, ExteriorPolicy::FullSpaceTail)?, &times)?;
        let mut worst = 0.0f64;
        for (a, b) in direct.states.iter().zip(&spectral.states) {
            worst = worst.max(a.max_abs_diff(b)?);
        }
        Ok(Finding::at_most("spectral vs direct heat flow, t ≤ 0.1", worst, 1e-4))
    });
    vec![eigen, composite, heat]
}

// ---------------------------------------------------------------- 6

/// The tree operator assembled entry by entry from ancestor chains.
fn dense_tree_operator(tree: &UltrametricTree) -> Result<DMatrix<f64>> {
    let chain = |leaf: usize| {
        let mut n = tree.leaf(leaf);
        let mut out = vec![n];
        while let Some(p) = tree.node(n).parent {
            out.push(p);
            n = p;
        }
        out
    };
    let chains: Vec<Vec<usize>> = (0..tree.leaf_count()).map(chain).collect();
    let nu = tree.leaf_measures();
    let n = tree.leaf_count();
    let mut m = DMatrix::zeros(n, n);
    for x in 0..n {
        for y in (0..n).filter(|&y| y != x) {
            let lca = *chains[x].iter().find(|a| chains[y].contains(a)).ok_or_else(|| anyhow!("disconnected tree"))?;
            let t = tree.node(lca).kernel.ok_or_else(|| anyhow!("node {lca} has no kernel"))?;
            m[(x, y)] -= t * nu[y];
            m[(x, x)] += t * nu[y];
        }
    }
    Ok(m)
}

fn tree_suite(rng: &mut ChaCha8Rng) -> Vec<Finding> {
    let trees: Vec<UltrametricTree> = (0..50).filter_map(|_| UltrametricTree::random(rng, 64).ok()).collect();
    let spectra = guard("tree eigenvalues vs dense diagonalisation", || {
        let mut worst = 0.0f64;
        for tree in &trees {
            let nu = tree.leaf_measures();
            let m = dense_tree_operator(tree)?;
            let n = tree.leaf_count();
            let sym = DMatrix::from_fn(n, n, |a, b| m[(a, b)] * nu[a].sqrt() / nu[b].sqrt());
            let sym = (&sym + sym.transpose()) * 0.5;
            let mut dense: Vec<f64> = SymmetricEigen::new(sym).eigenvalues.iter().copied().collect();
            let mut ours = vec![0.0];
            for id in tree.internal_nodes() {
                let lam = ultrametric::tree_eigenvalue(tree, id)?;
                ours.extend(std::iter::repeat_n(lam, tree.node(id).children.len() - 1));
            }
            if dense.len() != ours.len() {
                return Err(anyhow!("{} dense eigenvalues, {} predicted", dense.len(), ours.len()));
            }
            dense.sort_by(f64::total_cmp);
            ours.sort_by(f64::total_cmp);
            for (a, b) in dense.iter().zip(&ours) {
                worst = worst.max((a - b).abs());
            }
        }
        Ok(Finding::at_most("tree eigenvalues vs dense diagonalisation", worst, 1e-10).detail(format!("{} trees", trees.len())))
    });
    let vectors = guard("tree wavelets are eigenvectors", || {
        let mut worst = 0.0f64;
        for tree in &trees {
            for w in ultrametric::tree_wavelets(tree) {
                let lam = ultrametric::tree_eigenvalue(tree, w.node)?;
                let f: Vec<Complex64> = w.values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
                let d = ultrametric::pdo_apply(tree, &f)?;
                for (dv, v) in d.iter().zip(&w.values) {
                    worst = worst.max((dv - lam * v).norm());
                }
            }
        }
        Ok(Finding::at_most("tree wavelets are eigenvectors", worst, 1e-10))
    });
    let gibbs = guard("Gibbs density is stationary", || {
        let mut worst = 0.0f64;
        for _ in 0..50 {
            let tree = UltrametricTree::random(rng, 64)?;
            let beta = rng.random_range(0.0..3.0);
            let l = ultrametric::drift_generator(&tree, beta)?;
            let g = DVector::from_vec(ultrametric::gibbs_density(&tree, beta)?);
            let scale = l.abs().max() * g.abs().max();
            worst = worst.max((&l * &g).abs().max() / scale.max(1.0));
        }
        Ok(Finding::at_most("Gibbs density is stationary", worst, 1e-12)
            .detail("max |L g| relative to max |L| · max g, 50 landscapes"))
    });
    vec![spectra, vectors, gibbs]
}

// ---------------------------------------------------------------- 7

/// A density on `p^r Z_p` that is positive there and constant on cosets of `p^s Z_p`.
fn random_density(rng: &mut ChaCha8Rng) -> Result<(ZpDensity, u32, u32)> {
    let p = [2u64, 3][rng.random_range(0..2)];
    let m = rng.random_range(1..=4u32);
    let r = rng.random_range(0..m);
    let s = rng.random_range(r + 1..=m);
    let classes = p.pow(s - r) as usize;
    let w: Vec<f64> = (0..classes).map(|_| 1.0 - rng.random::<f64>()).collect();
    let (step, block) = (p.pow(r) as usize, p.pow(s) as usize);
    let weights: Vec<f64> =
        (0..p.pow(m) as usize).map(|a| if a % step == 0 { w[(a % block) / step] } else { 0.0 }).collect();
    Ok((ZpDensity::from_weights(p, m, &weights)?, r, s))
}

fn iid(rng: &mut ChaCha8Rng) -> Vec<Finding> {
    let mut violations = 0;
    let mut non_monotone = 0;
    let mut worst_ratio = 0.0f64;
    let mut cases = Vec::new();
    for _ in 0..20 {
        let (d, r, s) = match random_density(rng) {
            Ok(v) => v,
            Err(e) => return vec![Finding::error("iid convergence", e)],
        };
        let report = match ultrametric::convergence_report(&d, r, s, 100) {
            Ok(v) => v,
            Err(e) => return vec![Finding::error("iid convergence", e.into())],
        };
        violations += report.violations;
        non_monotone += usize::from(!report.monotone);
        let ratio = report.rows.iter().filter(|row| row.bound > 0.0).map(|row| row.scaled / row.bound).fold(0.0, f64::max);
        worst_ratio = worst_ratio.max(ratio);
        if report.violations > 0 {
            let w: Vec<String> = d.values().iter().map(|v| format!("{v:.4}")).collect();
            cases.push(format!(
                "p={} M={} r={r} s={s} values [{}]: {} violations, first at n={}",
                d.p(),
                d.resolution(),
                w.join(" "),
                report.violations,
                report.rows.iter().find(|row| row.violated).map_or(0, |row| row.n)
            ));
        }
    }
    vec![
        Finding::failures("D·distance ≤ (D/Δ − 1) e^{−n(Δ/D)³/3}, n ≤ 100", violations, 2000)
            .detail(if cases.is_empty() {
                format!("max D·distance/bound {worst_ratio:.4}")
            } else {
                format!("max D·distance/bound {worst_ratio:.4}; violating densities: {}", cases.join("; "))
            }),
        Finding::failures("distance non-increasing in n", non_monotone, 20),
    ]
}

// ---------------------------------------------------------------- 8

fn amplitudes(rng: &mut ChaCha8Rng) -> Vec<Finding> {
    let grid = guard("integral vs closed form, 5×5 grid", || {
        let mut worst = 0.0f64;
        for p in [2u64, 3, 5] {
            for i in 0..5 {
                for j in 0..5 {
                    let a = Complex64::new(0.08 + 0.09 * i as f64, 0.0);
                    let b = Complex64::new(0.05 + 0.1 * j as f64, 0.3 * (j as f64 - 2.0));
                    let params = AmplitudeParams::new(a, b);
                    let closed = strings::amplitude_closed(&params, p)?;
                    worst = worst.max((strings::amplitude_integral(&params, p, 30)?.value - closed).norm());
                }
            }
        }
        Ok(Finding::at_most("integral vs closed form, 5×5 grid", worst, 1e-8))
    });
    let exact = guard("A_2(2, 2) = −5/21", || {
        let v = strings::amplitude_exact(&q(2, 1), &q(2, 1), 2)?;
        let r = v.as_rational();
        Ok(Finding::holds(
            "A_2(2, 2) = −5/21",
            r == Some(q(-5, 21)),
            r.map_or_else(|| "irrational".to_string(), |r| r.to_string()),
        ))
    });
    let identity = guard("per-prime ζ-ratio identity, 100 rationals", || {
        let primes = [2u64, 3, 5, 7, 11, 13];
        let mut bad = 0;
        let mut n = 0;
        while n < 100 {
            let a = q(rng.random_range(-20..=20), rng.random_range(1..=6));
            if a.is_zero() || a.is_one() {
                continue;
            }
            let p = primes[rng.random_range(0..primes.len())];
            if !strings::local_zeta_identity(&a, p)? {
                bad += 1;
            }
            n += 1;
        }
        Ok(Finding::failures("per-prime ζ-ratio identity, 100 rationals", bad, 100))
    });
    let product = guard("Π_{p≤10^5} A_p(2, 2.5) vs ζ ratio", || {
        let params = AmplitudeParams::real(2.0, 2.5);
        let prod = strings::product_zeta_ratio(&params, 100_000)?;
        let ratio = strings::zeta_ratio(2.0, 2.5)?;
        let rows = strings::product_rows(&params, 200)?;
        let at_200 = rows.last().map_or(Complex64::new(1.0, 0.0), |r| r.running);
        Ok(Finding::at_most("Π_{p≤10^5} A_p(2, 2.5) vs ζ ratio", (prod - ratio).norm(), 1e-3).detail(format!(
            "product {:e} (already {:e} at P = 200), ζ ratio {ratio}",
            prod.re, at_200.re
        )))
    });
    vec![grid, exact, identity, product]
}

// ---------------------------------------------------------------- 9

fn genetic_suite() -> Vec<Finding> {
    let table = CodeTable::vertebrate_mitochondrial();
    let all = Codon::all();
    let mut out = Vec::new();

    let numbers: BTreeSet<u32> = all.iter().map(genetic::encode_codon).collect();
    let round_trip = all.iter().all(|c| genetic::decode_codon(genetic::encode_codon(c)).ok() == Some(*c));
    out.push(Finding::holds("64-codon bijection", numbers.len() == 64 && round_trip, format!("{} distinct numbers", numbers.len())));

    let quads = genetic::quadruplets();
    let quads_ok = quads.len() == 16
        && quads.iter().all(|quad| {
            let lead: BTreeSet<_> = quad.iter().map(|c| (c.0[0], c.0[1])).collect();
            let third: BTreeSet<_> = quad.iter().map(|c| c.0[2]).collect();
            let close = quad.iter().all(|a| quad.iter().all(|b| genetic::distance_5adic(a, b) <= q(1, 25)));
            lead.len() == 1 && third.len() == 4 && close
        });
    out.push(Finding::holds("16 quadruplets share their first two letters", quads_ok, format!("{} quadruplets", quads.len())));

    let r = genetic::doublet_degeneracy_check(&table);
    out.push(
        Finding::failures("doublet degeneracy", r.violations.len(), r.doublets.len())
            .detail(format!("{}/{} doublets consistent", r.consistent, r.doublets.len())),
    );

    let ter: BTreeSet<String> = table.preimage(genetic::TER).iter().map(ToString::to_string).collect();
    let want: BTreeSet<String> = ["UAA", "UAG", "AGA", "AGG"].map(String::from).into();
    out.push(Finding::holds("Ter preimage is {UAA, UAG, AGA, AGG}", ter == want, format!("{ter:?}")));

    let d: Vec<Vec<Rational>> = all.iter().map(|a| all.iter().map(|b| genetic::distance_5adic(a, b)).collect()).collect();
    let mut bad = 0;
    for x in 0..64 {
        for y in 0..64 {
            for z in 0..64 {
                if d[x][z] > d[x][y].clone().max(d[y][z].clone()) {
                    bad += 1;
                }
            }
        }
    }
    out.push(Finding::failures("ultrametric inequality over 64³ triples", bad, 64 * 64 * 64));
    out
}
