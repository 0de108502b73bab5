//! Exact rational helpers: valuations, norms, fractional parts, additive
//! characters and the adelic product identities.

use super::{big_pow, check_prime, distinct_prime_factors, p_power, split_power};
use crate::error::{invalid, Result};
use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::f64::consts::TAU;

/// Arbitrary-size rational, always reduced with positive denominator.
pub type Rational = num_rational::BigRational;

/// `ν_p(q)`, or `None` for zero.
pub fn rational_valuation(q: &Rational, p: u64) -> Option<i64> {
    if q.is_zero() {
        return None;
    }
    let (vn, _) = split_power(q.numer(), p);
    let (vd, _) = split_power(q.denom(), p);
    Some(vn as i64 - vd as i64)
}

/// `|q|_p` as an exact rational.
pub fn padic_norm(q: &Rational, p: u64) -> Rational {
    match rational_valuation(q, p) {
        None => Rational::zero(),
        Some(v) => p_power(p, -v),
    }
}

/// p-adic fractional part `{q}_p = Σ_{i<0} q_i p^i ∈ [0, 1)`.
pub fn fractional_part(q: &Rational, p: u64) -> Result<Rational> {
    check_prime(p)?;
    if q.is_zero() {
        return Ok(Rational::zero());
    }
    let (m, w) = split_power(q.denom(), p);
    if m == 0 {
        return Ok(Rational::zero());
    }
    // q = A / (p^m w): the residue r with A/w ≡ r (mod p^m).
    let modulus = big_pow(p, m as usize);
    let inv = w.mod_floor(&modulus).modinv(&modulus).expect("w is a unit mod p^m");
    let r = (q.numer() * inv).mod_floor(&modulus);
    Ok(Rational::new(r, modulus))
}

/// `exp(2πi·num/den)`, exact at quarter turns so that ±1, ±i carry no
/// rounding noise.
pub fn unit_root(num: &BigInt, den: &BigInt) -> Complex64 {
    let r = num.mod_floor(den);
    if r.is_zero() {
        return Complex64::new(1.0, 0.0);
    }
    let four = BigInt::from(4);
    if (&r * &four).mod_floor(den).is_zero() {
        return match (&r * &four / den).to_u8().unwrap() {
            1 => Complex64::new(0.0, 1.0),
            2 => Complex64::new(-1.0, 0.0),
            _ => Complex64::new(0.0, -1.0),
        };
    }
    let frac = Rational::new(r, den.clone()).to_f64().unwrap();
    Complex64::from_polar(1.0, TAU * frac)
}

/// Same as [`unit_root`] for machine-sized arguments.
pub(crate) fn unit_root_i128(num: i128, den: i128) -> Complex64 {
    let r = num.rem_euclid(den);
    if r == 0 {
        return Complex64::new(1.0, 0.0);
    }
    if (4 * r) % den == 0 {
        return match 4 * r / den {
            1 => Complex64::new(0.0, 1.0),
            2 => Complex64::new(-1.0, 0.0),
            _ => Complex64::new(0.0, -1.0),
        };
    }
    Complex64::from_polar(1.0, TAU * (r as f64 / den as f64))
}

/// `χ_p(q) = exp(2πi {q}_p)`.
pub fn additive_character(q: &Rational, p: u64) -> Result<Complex64> {
    let f = fractional_part(q, p)?;
    Ok(unit_root(f.numer(), f.denom()))
}

/// `|q|_∞ · Π_{p | num·den} |q|_p`, exactly. Equals 1 for every nonzero rational.
pub fn mult_product_check(q: &Rational) -> Result<Rational> {
    if q.is_zero() {
        return Err(invalid("the multiplicative product formula needs q ≠ 0"));
    }
    let mut primes = distinct_prime_factors(q.numer().magnitude())?;
    primes.extend(distinct_prime_factors(q.denom().magnitude())?);
    Ok(primes.iter().fold(q.abs(), |acc, &p| acc * padic_norm(q, p)))
}

/// Total phase `−q + Σ_{p | den} {q}_p` as an exact rational; always an integer.
pub fn additive_product_phase(q: &Rational) -> Result<Rational> {
    let primes = distinct_prime_factors(q.denom().magnitude())?;
    primes
        .iter()
        .try_fold(-q.clone(), |acc, &p| Ok(acc + fractional_part(q, p)?))
}

/// `exp(−2πiq) · Π_{p | den} exp(2πi{q}_p)` in floating point; equals 1.
pub fn additive_product_check(q: &Rational) -> Result<Complex64> {
    let real = q - q.floor();
    let mut acc = unit_root(&-real.numer(), real.denom());
    for p in distinct_prime_factors(q.denom().magnitude())? {
        acc *= additive_character(q, p)?;
    }
    Ok(acc)
}

/// `ν_p(n!) = (n − s_n)/(p − 1)` with `s_n` the base-p digit sum.
pub fn factorial_valuation(n: u64, p: u64) -> u64 {
    let mut s = 0;
    let mut m = n;
    while m > 0 {
        s += m % p;
        m /= p;
    }
    (n - s) / (p - 1)
}

/// `|n!|_p = p^{-(n − s_n)/(p − 1)}`.
pub fn factorial_norm(n: u64, p: u64) -> Result<Rational> {
    check_prime(p)?;
    Ok(Rational::new(BigInt::one(), big_pow(p, factorial_valuation(n, p) as usize)))
}

/// Serde adapter writing rationals as `{num, den}` decimal strings.
pub mod serde_rational {
    use super::Rational;
    use num_bigint::BigInt;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    #[derive(Serialize, Deserialize)]
    struct Wire {
        num: String,
        den: String,
    }

    pub fn serialize<S: Serializer>(q: &Rational, s: S) -> Result<S::Ok, S::Error> {
        Wire { num: q.numer().to_string(), den: q.denom().to_string() }.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
        use serde::de::Error;
        let w = Wire::deserialize(d)?;
        let num: BigInt = w.num.parse().map_err(D::Error::custom)?;
        let den: BigInt = w.den.parse().map_err(D::Error::custom)?;
        if den == BigInt::from(0) {
            return Err(D::Error::custom("zero denominator"));
        }
        Ok(Rational::new(num, den))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn fractional_parts() {
        assert_eq!(fractional_part(&q(3, 2), 2).unwrap(), q(1, 2));
        assert_eq!(fractional_part(&q(7, 1), 5).unwrap(), q(0, 1));
        assert_eq!(fractional_part(&q(1, 25), 5).unwrap(), q(1, 25));
        // 5/6 = 1/2 + (1/3) mod Z_2 : 5·3^{-1} ≡ 1 (mod 2)
        assert_eq!(fractional_part(&q(5, 6), 2).unwrap(), q(1, 2));
        assert_eq!(fractional_part(&q(5, 6), 3).unwrap(), q(1, 3));
        assert_eq!(fractional_part(&q(-1, 4), 2).unwrap(), q(3, 4));
    }

    #[test]
    fn characters() {
        assert_eq!(additive_character(&q(3, 2), 2).unwrap(), Complex64::new(-1.0, 0.0));
        assert_eq!(additive_character(&q(12, 1), 7).unwrap(), Complex64::new(1.0, 0.0));
        let z = additive_character(&q(1, 5), 5).unwrap();
        let expected = Complex64::from_polar(1.0, TAU / 5.0);
        assert!((z - expected).norm() < 1e-15);
    }

    #[test]
    fn multiplicative_product() {
        assert_eq!(mult_product_check(&q(24, 1)).unwrap(), q(1, 1));
        assert_eq!(mult_product_check(&q(-5, 7)).unwrap(), q(1, 1));
        assert_eq!(mult_product_check(&q(1, 1)).unwrap(), q(1, 1));
        assert!(mult_product_check(&q(0, 1)).is_err());
    }

    #[test]
    fn additive_product() {
        for r in [q(1, 2), q(3, 1), q(5, 6), q(-7, 12), q(1_000_001, 9_973)] {
            let z = additive_product_check(&r).unwrap();
            assert!((z - Complex64::new(1.0, 0.0)).norm() < 1e-12, "{r}: {z}");
            assert!(additive_product_phase(&r).unwrap().is_integer());
        }
    }

    #[test]
    fn factorial_norms() {
        // 10! = 2^8 · 3^4 · 5^2 · 7
        assert_eq!(factorial_norm(10, 3).unwrap(), q(1, 81));
        assert_eq!(factorial_valuation(10, 2), 8);
        assert_eq!(factorial_valuation(10, 5), 2);
        assert_eq!(factorial_norm(0, 7).unwrap(), q(1, 1));
        assert_eq!(factorial_norm(7, 7).unwrap(), q(1, 7));
    }

    #[test]
    fn rational_json() {
        #[derive(serde::Serialize, serde::Deserialize, PartialEq, Debug)]
        struct W {
            #[serde(with = "serde_rational")]
            r: Rational,
        }
        let w = W { r: q(-5, 7) };
        let s = serde_json::to_string(&w).unwrap();
        assert_eq!(s, r#"{"r":{"num":"-5","den":"7"}}"#);
        assert_eq!(serde_json::from_str::<W>(&s).unwrap(), w);
    }
}
