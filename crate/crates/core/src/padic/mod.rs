//! Exact p-adic arithmetic at finite precision.
//!
//! A [`PAdic`] stores `p^v · (d_0 + d_1 p + … + d_{K-1} p^{K-1})` with the
//! digits least significant first. `K` is the relative precision; the value is
//! known modulo `p^{v+K}` (the absolute precision).
//!
//! Besides nonzero values there are two kinds of zero:
//!
//! - the exact zero (`exact_zero = true`), infinitely precise;
//! - an inexact zero `O(p^A)`, produced when cancellation consumes every
//!   significant digit. It has no digits and `valuation == A`.

mod adele;
mod primes;
mod rational;

pub use adele::Adele;
pub use primes::{distinct_prime_factors, is_prime, primes_up_to};
pub use rational::{
    additive_character, additive_product_check, additive_product_phase, factorial_norm,
    factorial_valuation, fractional_part, mult_product_check, padic_norm, rational_valuation,
    unit_root, Rational,
};
pub use rational::serde_rational;
pub(crate) use rational::unit_root_i128;

use crate::error::{invalid, Error, Result};
use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use std::fmt;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PAdic {
    prime: u64,
    valuation: i64,
    digits: Vec<u64>,
    exact_zero: bool,
}

/// Wire form: `{p, valuation, digits[], precision}` (+ `exact_zero` when set).
#[derive(Serialize, Deserialize)]
struct PAdicWire {
    p: u64,
    valuation: i64,
    digits: Vec<u64>,
    precision: usize,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    exact_zero: bool,
}

impl Serialize for PAdic {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        PAdicWire {
            p: self.prime,
            valuation: self.valuation,
            digits: self.digits.clone(),
            precision: self.digits.len(),
            exact_zero: self.exact_zero,
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for PAdic {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let w = PAdicWire::deserialize(d)?;
        if w.precision != w.digits.len() {
            return Err(D::Error::custom("precision must equal the digit count"));
        }
        if w.exact_zero {
            return PAdic::zero(w.p).map_err(D::Error::custom);
        }
        PAdic::from_digits(w.p, w.valuation, w.digits).map_err(D::Error::custom)
    }
}

pub(crate) fn check_prime(p: u64) -> Result<()> {
    if is_prime(p) {
        Ok(())
    } else {
        Err(invalid(format!("{p} is not prime")))
    }
}

pub(crate) fn big_pow(p: u64, e: usize) -> BigInt {
    num_traits::pow(BigInt::from(p), e)
}

/// Splits `n = p^v · m` with `p ∤ m`. `n` must be nonzero.
pub(crate) fn split_power(n: &BigInt, p: u64) -> (u64, BigInt) {
    debug_assert!(!n.is_zero());
    let bp = BigInt::from(p);
    let mut m = n.clone();
    let mut v = 0;
    loop {
        let (q, r) = m.div_rem(&bp);
        if !r.is_zero() {
            return (v, m);
        }
        m = q;
        v += 1;
    }
}

impl PAdic {
    pub fn zero(p: u64) -> Result<Self> {
        check_prime(p)?;
        Ok(Self { prime: p, valuation: 0, digits: Vec::new(), exact_zero: true })
    }

    /// Builds a value from a valuation and unit digits (least significant
    /// first). The leading digit must be nonzero.
    pub fn from_digits(p: u64, valuation: i64, digits: Vec<u64>) -> Result<Self> {
        check_prime(p)?;
        if digits.is_empty() {
            return Err(invalid("a nonzero p-adic number needs at least one digit"));
        }
        if let Some(d) = digits.iter().find(|&&d| d >= p) {
            return Err(invalid(format!("digit {d} out of range for p = {p}")));
        }
        if digits[0] == 0 {
            return Err(invalid("leading digit must be nonzero"));
        }
        Ok(Self { prime: p, valuation, digits, exact_zero: false })
    }

    /// `p^offset · unit`, known to `precision` digits counted from `offset`.
    /// Strips powers of `p` from `unit`; full cancellation yields `O(p^{offset+precision})`.
    pub(crate) fn from_parts(p: u64, offset: i64, unit: &BigInt, precision: usize) -> Self {
        let modulus = big_pow(p, precision);
        let mut u = unit.mod_floor(&modulus);
        if u.is_zero() {
            return Self::inexact_zero(p, offset + precision as i64);
        }
        let (v, rest) = split_power(&u, p);
        u = rest;
        let rel = precision - v as usize;
        Self {
            prime: p,
            valuation: offset + v as i64,
            digits: to_digits(&u, p, rel),
            exact_zero: false,
        }
    }

    fn inexact_zero(p: u64, absolute: i64) -> Self {
        Self { prime: p, valuation: absolute, digits: Vec::new(), exact_zero: false }
    }

    /// Embeds a rational number with `precision` significant digits.
    pub fn from_rational(q: &Rational, p: u64, precision: usize) -> Result<Self> {
        check_prime(p)?;
        if precision == 0 {
            return Err(invalid("precision must be at least 1"));
        }
        if q.is_zero() {
            return Self::zero(p);
        }
        let (vn, num) = split_power(q.numer(), p);
        let (vd, den) = split_power(q.denom(), p);
        let modulus = big_pow(p, precision);
        let inv = den
            .mod_floor(&modulus)
            .modinv(&modulus)
            .expect("denominator unit is invertible modulo p^K");
        let unit = (num * inv).mod_floor(&modulus);
        Ok(Self::from_parts(p, vn as i64 - vd as i64, &unit, precision))
    }

    pub fn from_integer(n: i64, p: u64, precision: usize) -> Result<Self> {
        Self::from_rational(&Rational::from_integer(BigInt::from(n)), p, precision)
    }

    pub fn prime(&self) -> u64 {
        self.prime
    }

    /// Exponent `γ` of the leading digit. For an inexact zero `O(p^A)` this is `A`.
    pub fn valuation(&self) -> i64 {
        self.valuation
    }

    pub fn digits(&self) -> &[u64] {
        &self.digits
    }

    /// Relative precision `K` (number of significant digits).
    pub fn precision(&self) -> usize {
        self.digits.len()
    }

    /// Exponent `A` such that the value is known modulo `p^A`; `None` for the exact zero.
    pub fn absolute_precision(&self) -> Option<i64> {
        if self.exact_zero {
            None
        } else {
            Some(self.valuation + self.digits.len() as i64)
        }
    }

    pub fn is_exact_zero(&self) -> bool {
        self.exact_zero
    }

    /// True for both the exact zero and `O(p^A)`.
    pub fn is_zero(&self) -> bool {
        self.exact_zero || self.digits.is_empty()
    }

    /// Unit part `Σ d_i p^i` as an integer.
    pub fn unit(&self) -> BigInt {
        let p = BigInt::from(self.prime);
        self.digits
            .iter()
            .rev()
            .fold(BigInt::zero(), |acc, &d| acc * &p + BigInt::from(d))
    }

    /// `|x|_p = p^{-γ}`; zero for the exact zero. For `O(p^A)` this is the
    /// bound `p^{-A}`.
    pub fn norm(&self) -> Rational {
        if self.exact_zero {
            return Rational::zero();
        }
        p_power(self.prime, -self.valuation)
    }

    /// The rational representative `p^γ · Σ d_i p^i`.
    pub fn to_rational(&self) -> Rational {
        if self.is_zero() {
            return Rational::zero();
        }
        Rational::from_integer(self.unit()) * p_power(self.prime, self.valuation)
    }

    /// `(power, digit)` pairs of the expansion `Σ x_i p^i`.
    pub fn expansion(&self) -> impl Iterator<Item = (i64, u64)> + '_ {
        self.digits.iter().enumerate().map(|(i, &d)| (self.valuation + i as i64, d))
    }

    fn same_prime(&self, other: &Self) -> Result<()> {
        if self.prime == other.prime {
            Ok(())
        } else {
            Err(Error::PrimeMismatch { left: self.prime, right: other.prime })
        }
    }

    pub fn neg(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let k = self.precision();
        let u = big_pow(self.prime, k) - self.unit();
        Self::from_parts(self.prime, self.valuation, &u, k)
    }

    /// Sum, known to the smaller absolute precision of the operands.
    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.same_prime(other)?;
        if self.exact_zero {
            return Ok(other.clone());
        }
        if other.exact_zero {
            return Ok(self.clone());
        }
        let p = self.prime;
        let abs = self.absolute_precision().unwrap().min(other.absolute_precision().unwrap());
        let base = self.valuation.min(other.valuation);
        let shift = |x: &Self| x.unit() * big_pow(p, (x.valuation - base) as usize);
        let sum = shift(self) + shift(other);
        Ok(Self::from_parts(p, base, &sum, (abs - base) as usize))
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.try_add(&other.neg())
    }

    /// Product; relative precision is the smaller of the two.
    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        self.same_prime(other)?;
        let p = self.prime;
        if self.exact_zero || other.exact_zero {
            return Self::zero(p);
        }
        let v = self.valuation + other.valuation;
        if self.digits.is_empty() || other.digits.is_empty() {
            // O(p^A)·y = O(p^{A+v(y)}); an inexact zero stores A as its valuation.
            return Ok(Self::inexact_zero(p, v));
        }
        let k = self.precision().min(other.precision());
        Ok(Self::from_parts(p, v, &(self.unit() * other.unit()), k))
    }

    pub fn try_div(&self, other: &Self) -> Result<Self> {
        self.same_prime(other)?;
        if other.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let p = self.prime;
        if self.exact_zero {
            return Self::zero(p);
        }
        let v = self.valuation - other.valuation;
        if self.digits.is_empty() {
            return Ok(Self::inexact_zero(p, v));
        }
        let k = self.precision().min(other.precision());
        let modulus = big_pow(p, k);
        let inv = other
            .unit()
            .mod_floor(&modulus)
            .modinv(&modulus)
            .expect("unit is invertible");
        Ok(Self::from_parts(p, v, &(self.unit() * inv), k))
    }

    /// Agreement modulo `p^{min absolute precision}`.
    pub fn approx_eq(&self, other: &Self) -> Result<bool> {
        Ok(self.try_sub(other)?.is_zero())
    }

    /// Monna map `Σ x_i p^i ↦ Σ x_i p^{-i-1}` over the represented digits.
    pub fn monna(&self) -> f64 {
        let p = self.prime as f64;
        self.expansion()
            .map(|(i, d)| d as f64 * p.powi(-(i as i32) - 1))
            .sum()
    }
}

pub fn monna_map(x: &PAdic) -> f64 {
    x.monna()
}

/// `p^e` as an exact rational, `e` of either sign.
pub(crate) fn p_power(p: u64, e: i64) -> Rational {
    let m = big_pow(p, e.unsigned_abs() as usize);
    if e >= 0 {
        Rational::from_integer(m)
    } else {
        Rational::new(BigInt::one(), m)
    }
}

fn to_digits(u: &BigInt, p: u64, len: usize) -> Vec<u64> {
    debug_assert!(u.sign() != Sign::Minus);
    let bp = BigUint::from(p);
    let mut rest = u.magnitude().clone();
    let mut out = Vec::with_capacity(len);
    for _ in 0..len {
        let (q, r) = rest.div_rem(&bp);
        out.push(r.to_u64().unwrap());
        rest = q;
    }
    out
}

impl fmt::Display for PAdic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.exact_zero {
            return write!(f, "0");
        }
        if self.digits.is_empty() {
            return write!(f, "O({}^{})", self.prime, self.valuation);
        }
        let body: Vec<String> = self.digits.iter().rev().map(|d| d.to_string()).collect();
        let sep = if self.prime > 10 { " " } else { "" };
        write!(f, "…{} × {}^{}", body.join(sep), self.prime, self.valuation)?;
        write!(f, " + O({}^{})", self.prime, self.valuation + self.digits.len() as i64)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn five_thirds_in_z2() {
        let x = PAdic::from_rational(&q(5, 3), 2, 4).unwrap();
        assert_eq!(x.valuation(), 0);
        assert_eq!(x.digits(), &[1, 1, 1, 0]);
        // 7 · 3 ≡ 5 (mod 16)
        assert_eq!(x.unit(), BigInt::from(7));
    }

    #[test]
    fn zero_and_twenty_four() {
        assert!(PAdic::from_rational(&q(0, 1), 5, 8).unwrap().is_exact_zero());
        let x = PAdic::from_integer(24, 2, 4).unwrap();
        assert_eq!(x.valuation(), 3);
        assert_eq!(x.digits(), &[1, 1, 0, 0]);
    }

    #[test]
    fn rejects_composite_prime() {
        assert!(matches!(PAdic::from_integer(3, 4, 4), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn norms() {
        assert_eq!(PAdic::from_integer(24, 2, 4).unwrap().norm(), q(1, 8));
        assert_eq!(PAdic::from_rational(&q(1, 3), 3, 4).unwrap().norm(), q(3, 1));
        assert_eq!(PAdic::zero(7).unwrap().norm(), q(0, 1));
    }

    #[test]
    fn seven_plus_nine() {
        // With 8 digits the sum 16 keeps 4 significant digits.
        let a = PAdic::from_integer(7, 2, 8).unwrap();
        let b = PAdic::from_integer(9, 2, 8).unwrap();
        let s = a.try_add(&b).unwrap();
        assert_eq!(s.valuation(), 4);
        assert_eq!(s.digits(), &[1, 0, 0, 0]);
        assert_eq!(s.absolute_precision(), Some(8));
        // With 4 digits every digit cancels: O(2^4).
        let a = PAdic::from_integer(7, 2, 4).unwrap();
        let b = PAdic::from_integer(9, 2, 4).unwrap();
        let s = a.try_add(&b).unwrap();
        assert!(s.is_zero() && !s.is_exact_zero());
        assert_eq!(s.valuation(), 4);
    }

    #[test]
    fn third_times_three() {
        let a = PAdic::from_rational(&q(1, 3), 5, 6).unwrap();
        let b = PAdic::from_integer(3, 5, 6).unwrap();
        let one = PAdic::from_integer(1, 5, 6).unwrap();
        assert_eq!(a.try_mul(&b).unwrap(), one);
    }

    #[test]
    fn mismatched_primes_and_zero_division() {
        let a = PAdic::from_integer(3, 5, 4).unwrap();
        let b = PAdic::from_integer(3, 7, 4).unwrap();
        assert_eq!(a.try_add(&b), Err(Error::PrimeMismatch { left: 5, right: 7 }));
        let z = PAdic::zero(5).unwrap();
        assert_eq!(a.try_div(&z), Err(Error::DivisionByZero));
    }

    #[test]
    fn negative_one_is_all_top_digits() {
        let x = PAdic::from_integer(-1, 3, 5).unwrap();
        assert_eq!(x.digits(), &[2, 2, 2, 2, 2]);
        assert_eq!(x.neg(), PAdic::from_integer(1, 3, 5).unwrap());
    }

    #[test]
    fn monna_values() {
        assert_eq!(PAdic::from_integer(1, 2, 4).unwrap().monna(), 0.5);
        assert_eq!(PAdic::from_rational(&q(1, 2), 2, 4).unwrap().monna(), 1.0);
        assert_eq!(PAdic::zero(2).unwrap().monna(), 0.0);
    }

    #[test]
    fn json_shape() {
        let x = PAdic::from_integer(24, 2, 4).unwrap();
        let s = serde_json::to_string(&x).unwrap();
        assert_eq!(s, r#"{"p":2,"valuation":3,"digits":[1,1,0,0],"precision":4}"#);
        let back: PAdic = serde_json::from_str(&s).unwrap();
        assert_eq!(back, x);
        let z = serde_json::to_string(&PAdic::zero(3).unwrap()).unwrap();
        assert!(z.contains("\"exact_zero\":true"));
    }
}
