//! p-adic summation of `n!`-series, invariant rational summation, and
//! truncated Riemann zeta evaluations.
//!
//! All `n!`-series here are evaluated exactly modulo `p^A` and cut off at the
//! first `N` with `ν_p(N!) > K`: every later term is divisible by `N!`, so the
//! tail has norm at most `|N!|_p`.

mod invariant;
mod poly;
mod zeta;

pub use invariant::{solve_invariant_summation, verify_invariant, InvariantSolution, RelationReport};
pub(crate) use invariant::solve_exact;
pub use poly::{IntPolynomial, NxPolynomial};
pub use zeta::{zeta_dirichlet, zeta_euler, zeta_reference, DirichletSum};

use crate::error::{invalid, Error, Result};
use crate::padic::{big_pow, check_prime, factorial_norm, factorial_valuation, serde_rational};
use crate::{PAdic, Rational};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Sign `ε` in front of `n!`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Epsilon {
    Plus,
    Minus,
}

impl Epsilon {
    pub fn value(self) -> i64 {
        match self {
            Epsilon::Plus => 1,
            Epsilon::Minus => -1,
        }
    }

    /// `ε^n`.
    pub fn pow(self, n: u64) -> i64 {
        if self == Epsilon::Minus && n % 2 == 1 {
            -1
        } else {
            1
        }
    }
}

impl TryFrom<i64> for Epsilon {
    type Error = Error;
    fn try_from(v: i64) -> Result<Self> {
        match v {
            1 => Ok(Epsilon::Plus),
            -1 => Ok(Epsilon::Minus),
            _ => Err(invalid(format!("epsilon must be ±1, got {v}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeriesResult {
    pub value: PAdic,
    /// Number of terms summed (`n = 0 .. terms_used-1`).
    pub terms_used: u64,
    /// `|terms_used!|_p`, which bounds every omitted term.
    #[serde(with = "serde_rational")]
    pub tail_bound: Rational,
}

/// First `N` with `ν_p(N!) > K`.
pub fn truncation_point(p: u64, precision: usize) -> u64 {
    let mut n = 0;
    while factorial_valuation(n, p) <= precision as u64 {
        n += 1;
    }
    n
}

/// `S(x) = Σ_{n≥0} ε^n n! P(n;x) x^n` in `Z_p`, accurate modulo `p^A` with
/// `A = min(K, absolute precision of x)`.
pub fn evaluate_s_k(eps: Epsilon, poly: &NxPolynomial, x: &PAdic, precision: usize) -> Result<SeriesResult> {
    if precision == 0 {
        return Err(invalid("precision must be at least 1"));
    }
    let p = x.prime();
    if !x.is_exact_zero() && x.valuation() < 0 {
        return Err(Error::NotInZp { valuation: x.valuation() });
    }
    let abs = match x.absolute_precision() {
        None => precision as i64,
        Some(a) => a.min(precision as i64),
    };
    let n_terms = truncation_point(p, precision);
    let xr = x.to_rational().to_integer();
    let modulus = big_pow(p, abs.max(0) as usize);
    let mut fact = BigInt::one();
    let mut xpow = BigInt::one();
    let mut sum = BigInt::zero();
    for n in 0..n_terms {
        let nb = BigInt::from(n);
        if n > 0 {
            fact = (fact * &nb).mod_floor(&modulus);
            xpow = (xpow * &xr).mod_floor(&modulus);
        }
        let term = &fact * poly.eval(&nb, &xr) * &xpow * eps.pow(n);
        sum = (sum + term).mod_floor(&modulus);
    }
    Ok(SeriesResult {
        value: PAdic::from_parts(p, 0, &sum, abs.max(0) as usize),
        terms_used: n_terms,
        tail_bound: factorial_norm(n_terms, p)?,
    })
}

/// `Σ_{n≥1} n!·n` in `Z_p`; the sum is −1 for every prime.
pub fn sum_factorial_linear(p: u64, precision: usize) -> Result<SeriesResult> {
    let one = PAdic::from_integer(1, p, precision)?;
    let poly = NxPolynomial::in_n(IntPolynomial::from_i64(&[0, 1]));
    evaluate_s_k(Epsilon::Plus, &poly, &one, precision)
}

/// `Σ_{n=1}^{N-1} n!·n = N! − 1`, checked in exact integers.
pub fn partial_sum_identity_check(n: u64) -> Result<bool> {
    if n == 0 {
        return Err(invalid("N must be at least 1"));
    }
    let mut fact = BigInt::one();
    let mut sum = BigInt::zero();
    for i in 1..n {
        fact *= i;
        sum += &fact * i;
    }
    // fact = (N-1)! here
    Ok(sum == fact * n - 1)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CandidateCheck {
    #[serde(with = "serde_rational")]
    pub candidate: Rational,
    /// Primes whose p-adic sum differs from the candidate modulo `p^K`.
    pub mismatched: Vec<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NonInvarianceReport {
    pub k: u32,
    pub x: u64,
    pub precision: usize,
    pub height: u64,
    pub sums: Vec<(u64, SeriesResult)>,
    pub candidates: Vec<CandidateCheck>,
    /// Candidates that agree with the sum at every prime.
    #[serde(with = "rational_list")]
    pub common: Vec<Rational>,
}

/// Sums `Σ n! n^k x^n` in each `Q_p` and compares against every rational `a/b`
/// with `|a|, b ≤ height`.
pub fn non_invariance_scan(
    k: u32,
    x: u64,
    primes: &[u64],
    precision: usize,
    height: u64,
) -> Result<NonInvarianceReport> {
    if x == 0 {
        return Err(invalid("x must be positive"));
    }
    for &p in primes {
        check_prime(p)?;
    }
    let poly = NxPolynomial::in_n(IntPolynomial::monomial(k as usize));
    let sums = primes
        .par_iter()
        .map(|&p| {
            let xp = PAdic::from_integer(x as i64, p, precision)?;
            Ok((p, evaluate_s_k(Epsilon::Plus, &poly, &xp, precision)?))
        })
        .collect::<Result<Vec<_>>>()?;

    let h = height as i64;
    let mut candidates = Vec::new();
    let mut common = Vec::new();
    for b in 1..=h {
        for a in -h..=h {
            if a.gcd(&b) != 1 {
                continue;
            }
            let r = Rational::new(BigInt::from(a), BigInt::from(b));
            let mut mismatched = Vec::new();
            for (p, s) in &sums {
                if !candidate_matches(&r, *p, &s.value)? {
                    mismatched.push(*p);
                }
            }
            if mismatched.is_empty() {
                common.push(r.clone());
            }
            candidates.push(CandidateCheck { candidate: r, mismatched });
        }
    }
    Ok(NonInvarianceReport { k, x, precision, height, sums, candidates, common })
}

fn candidate_matches(r: &Rational, p: u64, sum: &PAdic) -> Result<bool> {
    if r.denom().is_multiple_of(&BigInt::from(p)) {
        return Ok(false);
    }
    let digits = sum.absolute_precision().unwrap_or(1).max(1) as usize;
    let rp = PAdic::from_rational(r, p, digits)?;
    rp.approx_eq(sum)
}

mod rational_list {
    use crate::Rational;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    #[derive(Serialize, Deserialize)]
    struct W(#[serde(with = "crate::padic::serde_rational")] Rational);

    pub fn serialize<S: Serializer>(v: &[Rational], s: S) -> Result<S::Ok, S::Error> {
        let w: Vec<W> = v.iter().cloned().map(W).collect();
        w.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Rational>, D::Error> {
        Ok(Vec::<W>::deserialize(d)?.into_iter().map(|w| w.0).collect())
    }
}
