use crate::{check, usage, Command, Output, Report};
use anyhow::{Context, Result};
use clap::{Args, Subcommand, ValueEnum};
use num_bigint::BigInt;
use num_complex::Complex64;
use serde::Serialize;
use std::path::{Path, PathBuf};
use ultrametra::genetic::{self, CodeTable, Codon};
use ultrametra::padic::{additive_product_check, mult_product_check};
use ultrametra::series::{self, Epsilon, IntPolynomial, NxPolynomial};
use ultrametra::strings::{self, AmplitudeParams};
use ultrametra::ultrametric::{self, UltrametricTree, ZpDensity};
use ultrametra::vladimirov::{self, ExteriorPolicy, OperatorSpec};
use ultrametra::wavelets::{self, AnalyzeOptions, BallFunction, Grid};
use ultrametra::{PAdic, Rational};

pub(crate) fn dispatch(cmd: Command) -> (Result<Report>, Output) {
    match cmd {
        Command::Padic { op, output } => (padic(op), output),
        Command::Series { op, output } => (series(op), output),
        Command::Wavelet { op, output } => (wavelet(op), output),
        Command::Heat { op, output } => (heat(op), output),
        Command::Tree { op, output } => (tree(op), output),
        Command::Amplitude { op, output } => (amplitude(op), output),
        Command::Genetic { op, output } => (genetic(op), output),
        Command::Check { suite, seed, output } => (check_suite(suite, seed), output),
    }
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| usage(format!("cannot read {}: {e}", path.display())))
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    serde_json::from_str(&read(path)?).map_err(|e| usage(format!("malformed {}: {e}", path.display())))
}

fn rational(s: &str) -> Result<Rational> {
    s.trim().parse().map_err(|_| usage(format!("not a rational number: {s:?}")))
}

fn complex(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

// ---------------------------------------------------------------- padic

#[derive(Debug, Subcommand)]
pub enum PadicOp {
    /// Expand a rational in Q_p.
    Eval {
        #[arg(long)]
        p: u64,
        #[arg(long = "K", visible_alias = "precision", default_value_t = 20)]
        k: usize,
        /// A rational such as `-7/250`.
        #[arg(long, allow_hyphen_values = true)]
        q: String,
    },
    /// Rebuild the rational approximation from digits.
    Convert {
        #[arg(long)]
        p: u64,
        #[arg(long, default_value_t = 0, allow_hyphen_values = true)]
        valuation: i64,
        #[arg(long, value_delimiter = ',', required = true)]
        digits: Vec<u64>,
    },
    /// Multiplicative and additive adelic product formulas.
    CheckProducts {
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
        q: Vec<String>,
        #[arg(long, default_value_t = 1e-12)]
        tol: f64,
    },
}

#[derive(Serialize)]
struct PadicView {
    p: u64,
    expansion: String,
    valuation: i64,
    norm: String,
    monna: f64,
    value: PAdic,
}

impl PadicView {
    fn new(x: PAdic) -> Self {
        Self {
            p: x.prime(),
            expansion: x.to_string(),
            valuation: x.valuation(),
            norm: x.norm().to_string(),
            monna: x.monna(),
            value: x,
        }
    }
}

fn padic(op: PadicOp) -> Result<Report> {
    match op {
        PadicOp::Eval { p, k, q } => {
            let x = PAdic::from_rational(&rational(&q)?, p, k)?;
            Report::json(PadicView::new(x))
        }
        PadicOp::Convert { p, valuation, digits } => {
            let x = PAdic::from_digits(p, valuation, digits)?;
            #[derive(Serialize)]
            struct Out {
                rational: String,
                #[serde(flatten)]
                view: PadicView,
            }
            Report::json(Out { rational: x.to_rational().to_string(), view: PadicView::new(x) })
        }
        PadicOp::CheckProducts { q, tol } => {
            #[derive(Serialize)]
            struct Row {
                q: String,
                multiplicative: String,
                additive_deviation: f64,
                passed: bool,
            }
            let mut rows = Vec::new();
            for s in &q {
                let r = rational(s)?;
                let mult = mult_product_check(&r)?;
                let dev = (additive_product_check(&r)? - complex(1.0, 0.0)).norm();
                let passed = mult == Rational::from_integer(1.into()) && dev <= tol;
                rows.push(Row { q: r.to_string(), multiplicative: mult.to_string(), additive_deviation: dev, passed });
            }
            let failed = rows.iter().filter(|r| !r.passed).count();
            let summary = format!("{}/{} rationals satisfy both product formulas", rows.len() - failed, rows.len());
            let report = Report::json(&rows)?.summary(summary).ok(failed == 0);
            report.with_csv(rows)
        }
    }
}

// ---------------------------------------------------------------- series

#[derive(Debug, Subcommand)]
pub enum SeriesOp {
    /// `Σ ε^n n! n^k x^n` in Z_p.
    Sum {
        #[arg(long)]
        p: u64,
        #[arg(long = "K", visible_alias = "precision", default_value_t = 20)]
        k_digits: usize,
        #[arg(long, default_value_t = 1)]
        k: u32,
        #[arg(long, default_value_t = 1, allow_hyphen_values = true)]
        x: i64,
        #[arg(long, default_value_t = 1, allow_hyphen_values = true)]
        eps: i64,
    },
    /// Solve for U, V, A in the invariant summation identity.
    Invariant {
        #[arg(long)]
        k: u32,
        #[arg(long, default_value_t = 1, allow_hyphen_values = true)]
        eps: i64,
        /// Verify the identity for n up to this bound.
        #[arg(long, default_value_t = 20)]
        n_max: u64,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, default_values_t = [-3i64, -1, 0, 1, 2, 5, 10])]
        verify_x: Vec<i64>,
    },
    /// Truncated Dirichlet series and Euler product for ζ(s).
    Zeta {
        #[arg(long, allow_hyphen_values = true)]
        s: f64,
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        s_im: f64,
        #[arg(long, default_value_t = 100_000)]
        terms: u64,
        #[arg(long, default_value_t = 10_000)]
        prime_bound: u64,
    },
    /// Rationals matching `Σ n! n^k x^n` in every listed Q_p.
    Scan {
        #[arg(long)]
        k: u32,
        #[arg(long, default_value_t = 1)]
        x: u64,
        #[arg(long, value_delimiter = ',', default_values_t = [2u64, 3, 5, 7])]
        primes: Vec<u64>,
        #[arg(long = "K", visible_alias = "precision", default_value_t = 10)]
        k_digits: usize,
        #[arg(long, default_value_t = 20)]
        height: u64,
    },
}

fn series(op: SeriesOp) -> Result<Report> {
    match op {
        SeriesOp::Sum { p, k_digits, k, x, eps } => {
            let eps = Epsilon::try_from(eps)?;
            let poly = NxPolynomial::in_n(IntPolynomial::monomial(k as usize));
            let xp = PAdic::from_integer(x, p, k_digits)?;
            let r = series::evaluate_s_k(eps, &poly, &xp, k_digits)?;
            let digits = r.value.absolute_precision().unwrap_or(k_digits as i64).max(0) as u32;
            let modulus = BigInt::from(p).pow(digits);
            let residue = {
                let q = r.value.to_rational();
                let v = (q.numer() * modinv(q.denom(), &modulus)?) % &modulus;
                (v + &modulus) % &modulus
            };
            #[derive(Serialize)]
            struct Out {
                p: u64,
                precision: usize,
                expansion: String,
                residue: String,
                modulus: String,
                terms_used: u64,
                tail_bound: String,
                value: PAdic,
            }
            Report::json(Out {
                p,
                precision: k_digits,
                expansion: r.value.to_string(),
                residue: residue.to_string(),
                modulus: modulus.to_string(),
                terms_used: r.terms_used,
                tail_bound: r.tail_bound.to_string(),
                value: r.value,
            })
        }
        SeriesOp::Invariant { k, eps, n_max, verify_x } => {
            let sol = series::solve_invariant_summation(k, Epsilon::try_from(eps)?, n_max)?;
            let verified: Vec<(i64, bool)> =
                verify_x.iter().map(|&x| (x, series::verify_invariant(&sol, &BigInt::from(x), n_max))).collect();
            let ok = verified.iter().all(|v| v.1);
            #[derive(Serialize)]
            struct Out<'a> {
                u: String,
                v: String,
                a: String,
                verified: &'a [(i64, bool)],
                solution: &'a series::InvariantSolution,
            }
            let out = Out { u: sol.u.display("x"), v: sol.v.display("x"), a: sol.a.display(), verified: &verified, solution: &sol };
            let summary = format!("U = {}, V = {}, A = {}", out.u, out.v, out.a);
            Ok(Report::json(out)?.summary(summary).ok(ok))
        }
        SeriesOp::Zeta { s, s_im, terms, prime_bound } => {
            let sc = complex(s, s_im);
            let d = series::zeta_dirichlet(sc, terms)?;
            let e = series::zeta_euler(sc, prime_bound)?;
            let reference = if s_im == 0.0 { Some(series::zeta_reference(s)?) } else { None };
            #[derive(Serialize)]
            struct Out {
                dirichlet: series::DirichletSum,
                euler: Complex64,
                reference: Option<f64>,
            }
            Report::json(Out { dirichlet: d, euler: e, reference })
        }
        SeriesOp::Scan { k, x, primes, k_digits, height } => {
            let r = series::non_invariance_scan(k, x, &primes, k_digits, height)?;
            #[derive(Serialize)]
            struct Out {
                k: u32,
                x: u64,
                sums: Vec<(u64, String)>,
                candidates_checked: usize,
                common: Vec<String>,
            }
            Report::json(Out {
                k,
                x,
                sums: r.sums.iter().map(|(p, s)| (*p, s.value.to_string())).collect(),
                candidates_checked: r.candidates.len(),
                common: r.common.iter().map(ToString::to_string).collect(),
            })
        }
    }
}

fn modinv(a: &BigInt, m: &BigInt) -> Result<BigInt> {
    use num_integer::Integer;
    let e = a.extended_gcd(m);
    if e.gcd != BigInt::from(1) {
        return Err(usage("value is not a p-adic integer"));
    }
    Ok(((e.x % m) + m) % m)
}

// ---------------------------------------------------------------- wavelets

#[derive(Debug, Subcommand)]
pub enum WaveletOp {
    /// Wavelet coefficients of a ball function given as JSON.
    Analyze {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        gamma_min: Option<i32>,
        #[arg(long, allow_hyphen_values = true)]
        gamma_max: Option<i32>,
        #[arg(long)]
        n_bound: Option<u32>,
    },
    /// Rebuild a ball function from coefficient records.
    Synthesize {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        p: u64,
        #[arg(long, default_value_t = 1)]
        d: u32,
        #[arg(long, default_value_t = 0, allow_hyphen_values = true)]
        n: i32,
        #[arg(long, default_value_t = 3)]
        m: i32,
    },
    /// Gram matrix of every wavelet at scales p^{-range} … p^{range}.
    Gram {
        #[arg(long)]
        p: u64,
        #[arg(long, default_value_t = 1)]
        d: u32,
        #[arg(long, default_value_t = 2)]
        range: i32,
        /// Use the matrix-dilation family instead.
        #[arg(long)]
        matrix: bool,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
    },
}

#[derive(Serialize)]
struct CoefficientRow {
    gamma: i32,
    n: String,
    k: String,
    re: f64,
    im: f64,
}

fn wavelet(op: WaveletOp) -> Result<Report> {
    match op {
        WaveletOp::Analyze { input, gamma_min, gamma_max, n_bound } => {
            let f: BallFunction = read_json(&input)?;
            let full = AnalyzeOptions::full(f.grid(), 0);
            let opts = AnalyzeOptions {
                gamma_min: gamma_min.unwrap_or(full.gamma_min),
                gamma_max: gamma_max.unwrap_or(full.gamma_max),
                n_bound,
            };
            let a = wavelets::analyze(&f, opts)?;
            let records = wavelets::coefficients_to_records(&a.coeffs);
            let rows: Vec<CoefficientRow> = records
                .iter()
                .map(|r| CoefficientRow {
                    gamma: r.gamma,
                    n: r.n_digits.iter().map(|d| d.iter().map(ToString::to_string).collect::<Vec<_>>().join(" ")).collect::<Vec<_>>().join("|"),
                    k: match (&r.j, &r.k) {
                        (Some(j), _) => j.to_string(),
                        (_, Some(k)) => k.iter().map(ToString::to_string).collect::<Vec<_>>().join(" "),
                        _ => String::new(),
                    },
                    re: r.re,
                    im: r.im,
                })
                .collect();
            #[derive(Serialize)]
            struct Out {
                norm_sq: f64,
                captured: f64,
                defect: f64,
                coefficients: Vec<wavelets::CoefficientRecord>,
            }
            Report::json(Out { norm_sq: a.norm_sq, captured: a.captured, defect: a.defect, coefficients: records })?
                .with_csv(rows)
        }
        WaveletOp::Synthesize { input, p, d, n, m } => {
            #[derive(serde::Deserialize)]
            #[serde(untagged)]
            enum Input {
                Bare(Vec<wavelets::CoefficientRecord>),
                Wrapped { coefficients: Vec<wavelets::CoefficientRecord> },
            }
            let records = match read_json::<Input>(&input)? {
                Input::Bare(r) | Input::Wrapped { coefficients: r } => r,
            };
            let coeffs = wavelets::coefficients_from_records(p, &records)?;
            let f = wavelets::synthesize(&coeffs, Grid::new(p, d, n, m)?)?;
            Report::json(f)
        }
        WaveletOp::Gram { p, d, range, matrix, tol } => {
            if range < 0 {
                return Err(usage("--range must be nonnegative"));
            }
            let (grid, report) = if matrix {
                let g = Grid::new(p, d, range, range + 1)?;
                (g, wavelets::matrix_wavelet_gram(g, -range..=range)?)
            } else {
                let g = Grid::new(p, d, range, range + 1)?;
                (g, wavelets::wavelet_gram(g)?)
            };
            let dev = report.max_deviation();
            #[derive(Serialize)]
            struct Out {
                p: u64,
                d: u32,
                cells: usize,
                tol: f64,
                max_deviation: f64,
                report: wavelets::GramReport,
            }
            let summary = format!("{} wavelets, max |G − I| = {dev:.3e}", report.size);
            Ok(Report::json(Out { p, d, cells: grid.len(), tol, max_deviation: dev, report })?.summary(summary).ok(dev <= tol))
        }
    }
}

// ---------------------------------------------------------------- heat

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum Policy {
    Absorbing,
    FullSpaceTail,
}

#[derive(Debug, Args)]
pub struct HeatArgs {
    #[arg(long)]
    p: u64,
    #[arg(long, default_value_t = 1.0)]
    alpha: f64,
    /// Domain ball p^{-n} Z_p.
    #[arg(long, default_value_t = 0, allow_hyphen_values = true)]
    n: i32,
    /// Resolution p^m of the default initial density.
    #[arg(long, default_value_t = 3)]
    m: i32,
    #[arg(long, value_enum, default_value_t = Policy::Absorbing)]
    policy: Policy,
    #[arg(long, default_value_t = 1.0)]
    t_max: f64,
    #[arg(long, default_value_t = 20)]
    steps: usize,
    /// Initial data as a ball-function JSON file; defaults to the normalised indicator of Z_p.
    #[arg(long)]
    input: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum HeatOp {
    /// Solve ∂_t f + D^α f = 0 on a ball.
    Solve(HeatArgs),
    /// Mass remaining in the domain under absorbing boundary conditions.
    Survival(HeatArgs),
}

fn heat(op: HeatOp) -> Result<Report> {
    let (args, survival) = match op {
        HeatOp::Solve(a) => (a, false),
        HeatOp::Survival(a) => (a, true),
    };
    if !(args.t_max >= 0.0) || args.steps == 0 {
        return Err(usage("--t-max must be nonnegative and --steps positive"));
    }
    let policy = match args.policy {
        Policy::Absorbing => ExteriorPolicy::Absorbing,
        Policy::FullSpaceTail => ExteriorPolicy::FullSpaceTail,
    };
    let f0 = match &args.input {
        Some(path) => read_json::<BallFunction>(path)?,
        None => BallFunction::unit_ball(Grid::new(args.p, 1, 0, args.m)?)?,
    };
    let spec = OperatorSpec::new(args.alpha, args.p, args.n.max(f0.grid().n), policy)?;
    let times: Vec<f64> = (0..=args.steps).map(|i| args.t_max * i as f64 / args.steps as f64).collect();
    let sol = vladimirov::heat_solve(&f0, &spec, &times)?;

    #[derive(Serialize)]
    struct Row {
        time: f64,
        #[serde(skip_serializing_if = "Option::is_none")]
        survival: Option<f64>,
        mass: f64,
        l2: f64,
        sup: f64,
    }
    let mut rows = Vec::new();
    for (t, s) in times.iter().zip(&sol.states) {
        rows.push(Row {
            time: *t,
            survival: if survival { Some(vladimirov::survival(&sol, *t)?) } else { None },
            mass: s.integral().re,
            l2: s.norm_sq().sqrt(),
            sup: s.sup_norm(),
        });
    }
    if survival {
        return Report::json(&rows)?.with_csv(rows);
    }
    #[derive(Serialize)]
    struct Out<'a> {
        spec: OperatorSpec,
        times: &'a [f64],
        rates: Vec<f64>,
        states: &'a [BallFunction],
    }
    let out = Out { spec, times: &times, rates: sol.rates(), states: &sol.states };
    Report::json(out)?.with_csv(rows)
}

// ---------------------------------------------------------------- trees

#[derive(Debug, Subcommand)]
pub enum TreeOp {
    /// Eigenvalues of the tree operator, one per internal node.
    Spectrum {
        #[arg(long)]
        input: PathBuf,
    },
    /// Generator of the energy-landscape dynamics and its Gibbs density.
    Drift {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value_t = 1.0)]
        beta: f64,
    },
    /// Parisi matrix from level values or from a tree's kernels.
    Parisi {
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        q: Vec<f64>,
        #[arg(long, default_value_t = 2)]
        p: u64,
        #[arg(long, default_value_t = 2)]
        m: u32,
        #[arg(long, conflicts_with = "q")]
        input: Option<PathBuf>,
    },
    /// Convergence of iid sums on Z_p to the uniform distribution.
    Converge {
        #[arg(long)]
        p: u64,
        #[arg(long)]
        m: u32,
        /// Weights on the cosets a + p^m Z_p, a = 0 … p^m − 1.
        #[arg(long, value_delimiter = ',', required = true)]
        weights: Vec<f64>,
        #[arg(long)]
        s: Option<u32>,
        #[arg(long, default_value_t = 100)]
        n_max: usize,
    },
}

fn load_tree(path: &Path) -> Result<UltrametricTree> {
    UltrametricTree::from_json(&read(path)?).with_context(|| format!("loading {}", path.display()))
}

fn rows_of(m: &nalgebra::DMatrix<f64>) -> Vec<Vec<f64>> {
    (0..m.nrows()).map(|i| m.row(i).iter().copied().collect()).collect()
}

fn tree(op: TreeOp) -> Result<Report> {
    match op {
        TreeOp::Spectrum { input } => {
            let t = load_tree(&input)?;
            #[derive(Serialize)]
            struct Row {
                node: usize,
                label: String,
                eigenvalue: f64,
                multiplicity: usize,
            }
            let mut rows = vec![Row { node: t.root(), label: "constant".into(), eigenvalue: 0.0, multiplicity: 1 }];
            for id in t.internal_nodes() {
                let n = t.node(id);
                rows.push(Row {
                    node: id,
                    label: n.label.clone().unwrap_or_default(),
                    eigenvalue: ultrametric::tree_eigenvalue(&t, id)?,
                    multiplicity: n.children.len() - 1,
                });
            }
            Report::json(&rows)?.with_csv(rows)
        }
        TreeOp::Drift { input, beta } => {
            let t = load_tree(&input)?;
            let l = ultrametric::drift_generator(&t, beta)?;
            let g = ultrametric::gibbs_density(&t, beta)?;
            let residual = (&l * nalgebra::DVector::from_column_slice(&g)).abs().max();
            #[derive(Serialize)]
            struct Out {
                beta: f64,
                gibbs: Vec<f64>,
                stationarity_residual: f64,
                generator: Vec<Vec<f64>>,
            }
            Report::json(Out { beta, gibbs: g, stationarity_residual: residual, generator: rows_of(&l) })
        }
        TreeOp::Parisi { q, p, m, input } => {
            let (matrix, order) = match input {
                Some(path) => (ultrametric::parisi_matrix_tree(&load_tree(&path)?)?, None),
                None => {
                    if q.is_empty() {
                        return Err(usage("give --q values or a tree --input"));
                    }
                    (ultrametric::parisi_matrix(&q, p, m)?, Some(ultrametric::monna_order(p, m)))
                }
            };
            #[derive(Serialize)]
            struct Out {
                #[serde(skip_serializing_if = "Option::is_none")]
                monna_order: Option<Vec<usize>>,
                matrix: Vec<Vec<f64>>,
            }
            Report::json(Out { monna_order: order, matrix: rows_of(&matrix) })
        }
        TreeOp::Converge { p, m, weights, s, n_max } => {
            let d = ZpDensity::from_weights(p, m, &weights)?;
            let r = d.support_exponent();
            let s = match s {
                Some(s) => s,
                None => (r + 1..=m).find(|&s| d.is_constant_at(s)).ok_or_else(|| usage("the density has a point mass"))?,
            };
            let report = ultrametric::convergence_report(&d, r, s, n_max)?;
            let ok = report.violations == 0 && report.monotone;
            let summary = format!("{} bound violations in {} steps, monotone: {}", report.violations, n_max, report.monotone);
            let rows = report.rows.clone();
            Ok(Report::json(report)?.summary(summary).ok(ok).with_csv(rows)?)
        }
    }
}

// ---------------------------------------------------------------- amplitudes

#[derive(Debug, Args)]
pub struct AmpArgs {
    #[arg(long, allow_hyphen_values = true)]
    a: String,
    #[arg(long, allow_hyphen_values = true)]
    b: String,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    a_im: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    b_im: f64,
}

impl AmpArgs {
    fn params(&self) -> Result<AmplitudeParams> {
        let f = |s: &str| -> Result<f64> {
            if let Ok(v) = s.parse::<f64>() {
                return Ok(v);
            }
            let q = rational(s)?;
            use num_traits::ToPrimitive;
            q.to_f64().ok_or_else(|| usage(format!("{s} is out of range")))
        };
        Ok(AmplitudeParams::new(complex(f(&self.a)?, self.a_im), complex(f(&self.b)?, self.b_im)))
    }
}

#[derive(Debug, Subcommand)]
pub enum AmplitudeOp {
    /// Closed form A_p(a, b).
    Closed {
        #[command(flatten)]
        args: AmpArgs,
        #[arg(long)]
        p: u64,
        /// Exact arithmetic in Q(p^{1/s}) for rational a, b.
        #[arg(long)]
        exact: bool,
    },
    /// A_p(a, b) from the defining integral.
    Integral {
        #[command(flatten)]
        args: AmpArgs,
        #[arg(long)]
        p: u64,
        #[arg(long, default_value_t = 40)]
        terms: u32,
    },
    /// Running product Π_{p≤P} A_p against the ζ ratio.
    Product {
        #[command(flatten)]
        args: AmpArgs,
        #[arg(long, default_value_t = 1000)]
        bound: u64,
    },
}

fn amplitude(op: AmplitudeOp) -> Result<Report> {
    match op {
        AmplitudeOp::Closed { args, p, exact: true } => {
            if args.a_im != 0.0 || args.b_im != 0.0 {
                return Err(usage("exact mode takes rational parameters"));
            }
            let v = strings::amplitude_exact(&rational(&args.a)?, &rational(&args.b)?, p)?;
            #[derive(Serialize)]
            struct Out {
                p: u64,
                rational: Option<String>,
                approx: f64,
                field: strings::PowerField,
            }
            Report::json(Out { p, rational: v.as_rational().map(|q| q.to_string()), approx: v.to_f64(), field: v })
        }
        AmplitudeOp::Closed { args, p, exact: false } => {
            let params = args.params()?;
            Report::json(serde_json::json!({ "p": p, "value": strings::amplitude_closed(&params, p)? }))
        }
        AmplitudeOp::Integral { args, p, terms } => {
            let params = args.params()?;
            let r = strings::amplitude_integral(&params, p, terms)?;
            let closed = strings::amplitude_closed(&params, p)?;
            #[derive(Serialize)]
            struct Out {
                p: u64,
                integral: strings::IntegralResult,
                closed: Complex64,
                deviation: f64,
            }
            Report::json(Out { p, integral: r, closed, deviation: (r.value - closed).norm() })
        }
        AmplitudeOp::Product { args, bound } => {
            let params = args.params()?;
            let ratio = if params.a.im == 0.0 && params.b.im == 0.0 {
                Some(strings::zeta_ratio(params.a.re, params.b.re)?)
            } else {
                None
            };
            #[derive(Serialize)]
            struct Row {
                p: u64,
                a_p: f64,
                a_p_im: f64,
                running: f64,
                running_im: f64,
                zeta_ratio: Option<f64>,
                deviation: Option<f64>,
            }
            let rows: Vec<Row> = strings::product_rows(&params, bound)?
                .into_iter()
                .map(|r| Row {
                    p: r.p,
                    a_p: r.factor.re,
                    a_p_im: r.factor.im,
                    running: r.running.re,
                    running_im: r.running.im,
                    zeta_ratio: ratio,
                    deviation: ratio.map(|z| (r.running - complex(z, 0.0)).norm()),
                })
                .collect();
            let summary = match (rows.last(), ratio) {
                (Some(last), Some(z)) => format!("Π_(p≤{bound}) A_p = {:e}, ζ ratio = {z}", last.running),
                _ => format!("{} primes", rows.len()),
            };
            Ok(Report::json(&rows)?.summary(summary).with_csv(rows)?)
        }
    }
}

// ---------------------------------------------------------------- genetic code

#[derive(Debug, Subcommand)]
pub enum GeneticOp {
    /// p-adic distance between codons, or modified Hamming distance between sequences.
    Dist {
        #[arg(long)]
        a: String,
        #[arg(long)]
        b: String,
        #[arg(long, default_value_t = 5)]
        p: u64,
    },
    /// Image, stop codons and doublet degeneracy of a code table.
    Check {
        /// TSV table (`digits  codon  amino_acid`); defaults to the built-in vertebrate mitochondrial code.
        #[arg(long)]
        table: Option<PathBuf>,
    },
    /// Constancy of the code on the 2-adic plane.
    Plane {
        #[arg(long)]
        table: Option<PathBuf>,
    },
}

fn load_table(path: Option<&Path>) -> Result<CodeTable> {
    match path {
        Some(p) => {
            let name = p.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
            CodeTable::from_tsv(&name, &read(p)?).with_context(|| format!("loading {}", p.display()))
        }
        None => Ok(CodeTable::vertebrate_mitochondrial()),
    }
}

fn genetic(op: GeneticOp) -> Result<Report> {
    match op {
        GeneticOp::Dist { a, b, p } => {
            let sa = genetic::parse_codon_sequence(&a)?;
            let sb = genetic::parse_codon_sequence(&b)?;
            let d = if sa.len() == 1 && sb.len() == 1 {
                genetic::codon_distance(&sa[0], &sb[0], p)?
            } else {
                genetic::modified_hamming(&sa, &sb, p)?
            };
            use num_traits::ToPrimitive;
            Report::json(serde_json::json!({ "p": p, "codons": sa.len(), "distance": d.to_string(), "value": d.to_f64() }))
        }
        GeneticOp::Check { table } => {
            let t = load_table(table.as_deref())?;
            let r = genetic::doublet_degeneracy_check(&t);
            let ter: Vec<String> = t.preimage(genetic::TER).iter().map(Codon::to_string).collect();
            #[derive(Serialize)]
            struct Out<'a> {
                table: &'a str,
                outputs: usize,
                ter: Vec<String>,
                doublets: usize,
                consistent: usize,
                violations: &'a [genetic::Doublet],
            }
            let summary = format!("{}/{} doublets consistent", r.consistent, r.doublets.len());
            let out =
                Out { table: &t.name, outputs: t.image().len(), ter, doublets: r.doublets.len(), consistent: r.consistent, violations: &r.violations };
            Ok(Report::json(out)?.summary(summary).ok(r.violations.is_empty()))
        }
        GeneticOp::Plane { table } => {
            let t = load_table(table.as_deref())?;
            let r = genetic::plane_constancy_check(&t);
            let summary = format!(
                "{} whole and {} split cells, {} mismatches",
                r.constant_cells,
                r.split_cells,
                r.mismatches.len()
            );
            let ok = r.mismatches.is_empty();
            Ok(Report::json(r)?.summary(summary).ok(ok))
        }
    }
}

// ---------------------------------------------------------------- check

fn check_suite(suite: check::Suite, seed: u64) -> Result<Report> {
    let reports = check::run(suite, seed);
    let passed = reports.iter().all(|r| r.passed);
    let summary = reports
        .iter()
        .map(|r| format!("{} {}", if r.passed { "PASS" } else { "FAIL" }, r.suite))
        .collect::<Vec<_>>()
        .join("\n");
    let rows: Vec<check::FindingRow> = reports.iter().flat_map(check::SuiteReport::rows).collect();
    Report::json(&reports)?.summary(summary).ok(passed).with_csv(rows)
}
