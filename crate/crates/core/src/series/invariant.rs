//! Invariant rational summation by telescoping.
//!
//! We look for integer polynomials `U(x)`, `A(n;x)` with
//!
//! ```text
//! Σ_{i=0}^{n-1} ε^i i! [i^k x^k + U(x)] x^i = V(x) + ε^n n! A(n;x) x^n
//! ```
//!
//! for every `n`. Writing `g(n) = ε^n n! A(n;x) x^n`, the summand must equal
//! `g(i+1) − g(i)`, i.e. `ε(i+1) x A(i+1;x) − A(i;x) = i^k x^k + U(x)` as a
//! polynomial identity in `(i, x)`, and `V = −g(0) = −A(0;x)`. With `A` of
//! x-degree `< k` and n-degree `≤ k` this is a finite linear system.

use super::{Epsilon, IntPolynomial, NxPolynomial};
use crate::error::{invalid, Error, Result};
use crate::Rational;
use num_bigint::BigInt;
use num_integer::binomial;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InvariantSolution {
    pub k: u32,
    pub epsilon: Epsilon,
    pub u: IntPolynomial,
    pub v: IntPolynomial,
    /// `A(n; x)` as coefficients of `x^j`, each a polynomial in `n`.
    pub a: NxPolynomial,
    pub relations: RelationReport,
}

/// Comparison with the boundary relations
/// `U = x A(1;x) − ε A(0;x)` and `V = −ε A(0;x)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RelationReport {
    pub u_matches: bool,
    pub v_matches: bool,
}

pub fn solve_invariant_summation(k: u32, eps: Epsilon, n_check: u64) -> Result<InvariantSolution> {
    if k == 0 {
        return Err(invalid("k must be at least 1"));
    }
    let k = k as usize;
    let e = Rational::from_integer(BigInt::from(eps.value()));

    // Unknowns: a[j][m] (x^j n^m, j < k, m ≤ k), then u[j] (j ≤ k).
    let a_idx = |j: usize, m: usize| j * (k + 1) + m;
    let u_idx = |j: usize| k * (k + 1) + j;
    let n_unknowns = (k + 1) * (k + 1);
    // Equations: coefficient of i^r x^s, r ≤ k+1, s ≤ k.
    let eq_idx = |r: usize, s: usize| s * (k + 2) + r;
    let n_eqs = (k + 1) * (k + 2);

    let mut mat = vec![vec![Rational::zero(); n_unknowns]; n_eqs];
    let mut rhs = vec![Rational::zero(); n_eqs];
    for j in 0..k {
        for m in 0..=k {
            // ε (i+1)^{m+1} x^{j+1}
            for r in 0..=m + 1 {
                let c = Rational::from_integer(binomial(BigInt::from(m + 1), BigInt::from(r)));
                mat[eq_idx(r, j + 1)][a_idx(j, m)] += &e * c;
            }
            // −i^m x^j
            mat[eq_idx(m, j)][a_idx(j, m)] -= Rational::one();
        }
    }
    for j in 0..=k {
        mat[eq_idx(0, j)][u_idx(j)] -= Rational::one();
    }
    rhs[eq_idx(k, k)] = Rational::one();

    let sol = solve_exact(mat, rhs).ok_or_else(|| {
        Error::UnsolvableAnsatz(format!("no solution with deg_x A < {k}, deg_n A ≤ {k}"))
    })?;
    if let Some(bad) = sol.iter().find(|q| !q.is_integer()) {
        return Err(Error::UnsolvableAnsatz(format!("rational coefficient {bad}")));
    }
    let int = |q: &Rational| q.to_integer();

    let a = NxPolynomial::new(
        (0..k)
            .map(|j| IntPolynomial::new((0..=k).map(|m| int(&sol[a_idx(j, m)])).collect()))
            .collect(),
    );
    let u = IntPolynomial::new((0..=k).map(|j| int(&sol[u_idx(j)])).collect());
    let a0 = a.at_n(&BigInt::zero());
    let a1 = a.at_n(&BigInt::one());
    let v = a0.scale(&BigInt::from(-1));

    let eps_b = BigInt::from(eps.value());
    let x_a1 = IntPolynomial::monomial(1).mul(&a1);
    let relations = RelationReport {
        u_matches: u == x_a1.add(&a0.scale(&-&eps_b)),
        v_matches: v == a0.scale(&-&eps_b),
    };

    let solution = InvariantSolution { k: k as u32, epsilon: eps, u, v, a, relations };
    for x in -5..=5 {
        if !verify_invariant(&solution, &BigInt::from(x), n_check) {
            return Err(Error::UnsolvableAnsatz(format!("identity fails at x = {x}")));
        }
    }
    Ok(solution)
}

/// Checks the summation identity at integer `x` for every `0 ≤ n ≤ n_max`.
pub fn verify_invariant(sol: &InvariantSolution, x: &BigInt, n_max: u64) -> bool {
    let k = sol.k;
    let u = sol.u.eval(x);
    let v = sol.v.eval(x);
    let mut lhs = BigInt::zero();
    let mut fact = BigInt::one();
    let mut xpow = BigInt::one();
    for n in 0..=n_max {
        let nb = BigInt::from(n);
        let rhs = &v + &fact * sol.a.eval(&nb, x) * &xpow * sol.epsilon.pow(n);
        if lhs != rhs {
            return false;
        }
        let term = num_traits::pow(&nb * x, k as usize) + &u;
        lhs += &fact * term * &xpow * sol.epsilon.pow(n);
        fact *= n + 1;
        xpow *= x;
    }
    true
}

/// Gaussian elimination over `Q`. `None` if inconsistent; free variables are 0.
pub(crate) fn solve_exact(mut mat: Vec<Vec<Rational>>, mut rhs: Vec<Rational>) -> Option<Vec<Rational>> {
    let rows = mat.len();
    let cols = mat.first().map_or(0, Vec::len);
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..cols {
        let Some(piv) = (row..rows).find(|&r| !mat[r][col].is_zero()) else {
            continue;
        };
        mat.swap(row, piv);
        rhs.swap(row, piv);
        let inv = mat[row][col].recip();
        for c in col..cols {
            mat[row][c] = &mat[row][c] * &inv;
        }
        rhs[row] = &rhs[row] * &inv;
        for r in 0..rows {
            if r != row && !mat[r][col].is_zero() {
                let f = mat[r][col].clone();
                for c in col..cols {
                    let t = &f * &mat[row][c];
                    mat[r][c] -= t;
                }
                let t = &f * &rhs[row];
                rhs[r] -= t;
            }
        }
        pivots.push(col);
        row += 1;
        if row == rows {
            break;
        }
    }
    if rhs[row..].iter().any(|q| !q.is_zero()) {
        return None;
    }
    let mut x = vec![Rational::zero(); cols];
    for (r, &c) in pivots.iter().enumerate() {
        x[c] = rhs[r].clone();
    }
    Some(x)
}
