//! Complex-valued p-adic Veneziano amplitudes
//!
//! ```text
//! A_p(a, b) = ∫_{Q_p} |x|_p^{a−1} |1−x|_p^{b−1} dx = Π_{s ∈ {a,b,c}} (1 − p^{s−1})/(1 − p^{−s}),  a + b + c = 1
//! ```
//!
//! evaluated in closed form, as a sum over spheres, and as a product over
//! primes. Rational parameters `a = r/s` are handled exactly in `Q(p^{1/s})`.

use crate::error::{invalid, Error, Result};
use crate::padic::{check_prime, primes_up_to};
use crate::series::{solve_exact, zeta_reference};
use crate::Rational;
use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AmplitudeParams {
    pub a: Complex64,
    pub b: Complex64,
}

impl AmplitudeParams {
    pub fn new(a: Complex64, b: Complex64) -> Self {
        Self { a, b }
    }

    pub fn real(a: f64, b: f64) -> Self {
        Self::new(Complex64::new(a, 0.0), Complex64::new(b, 0.0))
    }

    pub fn c(&self) -> Complex64 {
        Complex64::new(1.0, 0.0) - self.a - self.b
    }
}

fn ppow(p: u64, s: Complex64) -> Complex64 {
    (s * (p as f64).ln()).exp()
}

/// `(1 − p^{s−1})/(1 − p^{−s}) = ζ_p(s)/ζ_p(1−s)`.
pub fn local_factor(s: Complex64, p: u64) -> Result<Complex64> {
    let den = Complex64::new(1.0, 0.0) - ppow(p, -s);
    if den.norm() < 1e-14 {
        return Err(Error::Pole(format!("1 − {p}^(−s) vanishes at s = {s}")));
    }
    Ok((Complex64::new(1.0, 0.0) - ppow(p, s - 1.0)) / den)
}

pub fn amplitude_closed(params: &AmplitudeParams, p: u64) -> Result<Complex64> {
    check_prime(p)?;
    Ok(local_factor(params.a, p)? * local_factor(params.b, p)? * local_factor(params.c(), p)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntegralResult {
    /// Partial sum plus tail.
    pub value: Complex64,
    /// Spheres of radius down to `p^{-N}` (and up to `p^N`).
    pub partial: Complex64,
    pub tail: Complex64,
}

/// The integral split into the sphere families around 0, around 1 and at
/// infinity, each a geometric series, plus the unit sphere minus its two
/// residue discs, where the integrand is 1.
pub fn amplitude_integral(params: &AmplitudeParams, p: u64, n: u32) -> Result<IntegralResult> {
    check_prime(p)?;
    let (a, b, c) = (params.a, params.b, params.c());
    if !(a.re > 0.0 && b.re > 0.0 && c.re > 0.0) {
        return Err(Error::OutsideDomain(format!(
            "the integral converges for Re a, Re b > 0 and Re(a + b) < 1, got a = {a}, b = {b}"
        )));
    }
    let pf = p as f64;
    let w = 1.0 - 1.0 / pf;
    let mut partial = Complex64::new(1.0 - 2.0 / pf, 0.0);
    let mut tail = Complex64::zero();
    for s in [a, b, c] {
        // Σ_{k≥1} (1 − 1/p) r^k with r = p^{-s}
        let r = ppow(p, -s);
        let mut rk = Complex64::new(1.0, 0.0);
        for _ in 0..n {
            rk *= r;
            partial += rk * w;
        }
        tail += rk * r * w / (Complex64::new(1.0, 0.0) - r);
    }
    Ok(IntegralResult { value: partial + tail, partial, tail })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProductRow {
    pub p: u64,
    pub factor: Complex64,
    pub running: Complex64,
}

/// Per-prime factors and running products in ascending prime order.
pub fn product_rows(params: &AmplitudeParams, bound: u64) -> Result<Vec<ProductRow>> {
    let mut running = Complex64::new(1.0, 0.0);
    primes_up_to(bound)
        .into_iter()
        .map(|p| {
            let factor = amplitude_closed(params, p)?;
            running *= factor;
            Ok(ProductRow { p, factor, running })
        })
        .collect()
}

/// `Π_{p≤P} A_p(a, b)`.
pub fn product_zeta_ratio(params: &AmplitudeParams, bound: u64) -> Result<Complex64> {
    Ok(product_rows(params, bound)?.last().map_or(Complex64::new(1.0, 0.0), |r| r.running))
}

/// `ζ(a)ζ(b)ζ(c) / (ζ(1−a)ζ(1−b)ζ(1−c))` for real parameters, from the
/// analytically continued ζ.
pub fn zeta_ratio(a: f64, b: f64) -> Result<f64> {
    let c = 1.0 - a - b;
    let mut out = 1.0;
    for s in [a, b, c] {
        let den = zeta_reference(1.0 - s)?;
        if den == 0.0 {
            return Err(Error::Pole(format!("ζ(1 − s) vanishes at s = {s}")));
        }
        out *= zeta_reference(s)? / den;
    }
    Ok(out)
}

/// An element `Σ_i c_i θ^i` of `Q(θ)`, `θ^s = p`. The polynomial `X^s − p`
/// is Eisenstein, so this is a field.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PowerField {
    p: u64,
    s: u32,
    #[serde(with = "rational_vec")]
    coeffs: Vec<Rational>,
}

mod rational_vec {
    use crate::Rational;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(v: &[Rational], s: S) -> Result<S::Ok, S::Error> {
        v.iter().map(|q| q.to_string()).collect::<Vec<_>>().serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Rational>, D::Error> {
        Vec::<String>::deserialize(d)?
            .into_iter()
            .map(|s| s.parse().map_err(serde::de::Error::custom))
            .collect()
    }
}

impl PowerField {
    pub fn from_rational(p: u64, s: u32, q: Rational) -> Self {
        let mut coeffs = vec![Rational::zero(); s as usize];
        coeffs[0] = q;
        Self { p, s, coeffs }
    }

    pub fn one(p: u64, s: u32) -> Self {
        Self::from_rational(p, s, Rational::one())
    }

    /// `θ^k = p^{⌊k/s⌋} θ^{k mod s}`.
    pub fn theta_pow(p: u64, s: u32, k: i64) -> Self {
        let (q, r) = k.div_mod_floor(&(s as i64));
        let base = Rational::from_integer(BigInt::from(p));
        let scale = if q >= 0 { base.pow(q as i32) } else { base.recip().pow((-q) as i32) };
        let mut coeffs = vec![Rational::zero(); s as usize];
        coeffs[r as usize] = scale;
        Self { p, s, coeffs }
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    /// The value when it lies in `Q`.
    pub fn as_rational(&self) -> Option<Rational> {
        self.coeffs[1..].iter().all(Zero::is_zero).then(|| self.coeffs[0].clone())
    }

    pub fn to_f64(&self) -> f64 {
        let theta = (self.p as f64).powf(1.0 / self.s as f64);
        self.coeffs.iter().rev().fold(0.0, |acc, c| acc * theta + c.to_f64().unwrap_or(f64::NAN))
    }

    pub fn sub(&self, o: &Self) -> Self {
        let coeffs = self.coeffs.iter().zip(&o.coeffs).map(|(x, y)| x - y).collect();
        Self { coeffs, ..*self }
    }

    pub fn mul(&self, o: &Self) -> Self {
        let s = self.s as usize;
        let p = Rational::from_integer(BigInt::from(self.p));
        let mut coeffs = vec![Rational::zero(); s];
        for (i, x) in self.coeffs.iter().enumerate().filter(|(_, x)| !x.is_zero()) {
            for (j, y) in o.coeffs.iter().enumerate() {
                let t = x * y;
                if i + j >= s {
                    coeffs[i + j - s] += t * &p;
                } else {
                    coeffs[i + j] += t;
                }
            }
        }
        Self { coeffs, ..*self }
    }

    /// Solves `self · y = 1` through the multiplication matrix.
    pub fn inv(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let s = self.s as usize;
        let cols: Vec<Self> = (0..s).map(|j| self.mul(&Self::theta_pow(self.p, self.s, j as i64))).collect();
        let mat = (0..s).map(|i| cols.iter().map(|c| c.coeffs[i].clone()).collect()).collect();
        let mut rhs = vec![Rational::zero(); s];
        rhs[0] = Rational::one();
        let coeffs = solve_exact(mat, rhs).ok_or(Error::DivisionByZero)?;
        Ok(Self { coeffs, ..*self })
    }
}

/// Common root order `s` with `a s, b s ∈ Z`.
fn root_order(a: &Rational, b: &Rational) -> Result<u32> {
    a.denom().lcm(b.denom()).to_u32().filter(|&s| s <= 64).ok_or_else(|| invalid("parameter denominators too large"))
}

fn exact_factor(p: u64, s: u32, e: &Rational) -> Result<PowerField> {
    // e s is an integer by choice of s
    let k = (e * Rational::from_integer(BigInt::from(s))).to_integer();
    let k = k.to_i64().filter(|k| k.abs() < 1 << 20).ok_or_else(|| invalid("parameter too large"))?;
    let one = PowerField::one(p, s);
    let num = one.sub(&PowerField::theta_pow(p, s, k - s as i64));
    let den = one.sub(&PowerField::theta_pow(p, s, -k));
    if den.is_zero() {
        return Err(Error::Pole(format!("1 − {p}^(−s) vanishes at s = {e}")));
    }
    Ok(num.mul(&den.inv()?))
}

/// `A_p(a, b)` in `Q(p^{1/s})` for rational `a`, `b`.
pub fn amplitude_exact(a: &Rational, b: &Rational, p: u64) -> Result<PowerField> {
    check_prime(p)?;
    let s = root_order(a, b)?;
    let c = Rational::one() - a - b;
    let mut out = PowerField::one(p, s);
    for e in [a, b, &c] {
        out = out.mul(&exact_factor(p, s, e)?);
    }
    Ok(out)
}

/// Checks `(1 − p^{a−1})/(1 − p^{−a}) = ζ_p(a)/ζ_p(1−a)` in `Q(p^{1/s})`,
/// with `ζ_p(s) = 1/(1 − p^{−s})` formed and divided exactly.
pub fn local_zeta_identity(a: &Rational, p: u64) -> Result<bool> {
    check_prime(p)?;
    let s = root_order(a, &Rational::one())?;
    let scale = Rational::from_integer(BigInt::from(s));
    let k = (a * &scale).to_integer().to_i64().ok_or_else(|| invalid("parameter too large"))?;
    let one = PowerField::one(p, s);
    let zeta_p = |m: i64| -> Result<PowerField> {
        if m == 0 {
            return Err(Error::Pole("ζ_p has a pole at 0".into()));
        }
        one.sub(&PowerField::theta_pow(p, s, -m)).inv()
    };
    let ratio = zeta_p(k)?.mul(&zeta_p(s as i64 - k)?.inv()?);
    Ok(ratio == exact_factor(p, s, a)?)
}
