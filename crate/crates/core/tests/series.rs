use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use ultrametra::padic::{factorial_norm, padic_norm};
use ultrametra::series::*;
use ultrametra::{PAdic, Rational};

#[test]
fn factorial_series_is_minus_one() {
    for p in [2u64, 3, 5, 7] {
        let r = sum_factorial_linear(p, 30).unwrap();
        let minus_one = PAdic::from_integer(-1, p, 30).unwrap();
        assert!(r.value.approx_eq(&minus_one).unwrap());
        assert!(r.value.absolute_precision().unwrap() >= 30);
        assert!(r.tail_bound <= padic_norm(&Rational::from_integer(BigInt::from(p).pow(30)), p));
    }
}

#[test]
fn partial_sums_approach_minus_one() {
    let mut fact = BigInt::one();
    let mut s = BigInt::zero();
    for n in 1..=200u64 {
        assert!(partial_sum_identity_check(n).unwrap());
        fact *= n;
        s += &fact * n;
        // s = Σ_{i≤n} i!·i = (n+1)! − 1
        let err = Rational::from_integer(&s + 1);
        for p in [2u64, 3, 5, 7] {
            let d = padic_norm(&err, p);
            assert_eq!(d, factorial_norm(n + 1, p).unwrap());
            assert!(d <= factorial_norm(n, p).unwrap());
        }
    }
}

#[test]
fn invariant_solutions_verify_at_random_points() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for (k, eps) in [(1, Epsilon::Plus), (2, Epsilon::Plus), (1, Epsilon::Minus), (2, Epsilon::Minus), (3, Epsilon::Plus)] {
        let sol = solve_invariant_summation(k, eps, 10).unwrap();
        for _ in 0..10 {
            let x = BigInt::from(rng.random_range(-1000i64..1000));
            assert!(verify_invariant(&sol, &x, 20), "k={k} ε={eps:?} x={x}");
        }
    }
    let k1 = solve_invariant_summation(1, Epsilon::Plus, 20).unwrap();
    assert_eq!(k1.u.display("x"), "x - 1");
    assert_eq!(k1.v.display("x"), "-1");
    assert_eq!(k1.a.display(), "1");
}

#[test]
fn invariant_sum_agrees_with_padic_evaluation() {
    // Σ n!((n+1)x − 1)x^n telescopes to −1 for every x ∈ Z_p
    let sol = solve_invariant_summation(1, Epsilon::Plus, 10).unwrap();
    for p in [2u64, 3, 5] {
        for x in [1i64, 2, 6, 10] {
            let xp = PAdic::from_integer(x, p, 20).unwrap();
            let poly = NxPolynomial::new(vec![
                IntPolynomial::from_i64(&[-1]),
                IntPolynomial::from_i64(&[1, 1]),
            ]);
            let r = evaluate_s_k(Epsilon::Plus, &poly, &xp, 20).unwrap();
            let v = PAdic::from_integer(sol.v.eval(&BigInt::from(x)).try_into().unwrap(), p, 20).unwrap();
            assert!(r.value.approx_eq(&v).unwrap(), "p={p} x={x}");
        }
    }
}

#[test]
fn no_common_rational_for_squares() {
    let r = non_invariance_scan(2, 1, &[2, 3, 5, 7], 10, 20).unwrap();
    assert!(r.common.is_empty());
    let r = non_invariance_scan(1, 1, &[2, 3, 5, 7], 10, 5).unwrap();
    assert_eq!(r.common, vec![-Rational::one()]);
}

#[test]
fn euler_product_increases_towards_zeta() {
    for s in [1.5f64, 2.0, 3.0] {
        let sc = Complex64::new(s, 0.0);
        let reference = zeta_reference(s).unwrap();
        let mut last = 1.0;
        for bound in [2u64, 10, 100, 1000, 10_000] {
            let e = zeta_euler(sc, bound).unwrap().re;
            assert!(e > last && e < reference);
            last = e;
        }
        let d = zeta_dirichlet(sc, 100_000).unwrap();
        assert!((d.value.re + d.tail_bound - reference).abs() < d.tail_bound);
        assert!(reference - last < 10.0 * (reference - d.value.re) + 0.1);
    }
}
