//! Integer polynomials in one variable, and in two (`n` and `x`).

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::fmt;

/// Polynomial with integer coefficients, ascending degree, trailing zeros trimmed.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct IntPolynomial {
    coeffs: Vec<BigInt>,
}

impl IntPolynomial {
    pub fn new(mut coeffs: Vec<BigInt>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn from_i64(coeffs: &[i64]) -> Self {
        Self::new(coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::from_i64(&[1])
    }

    /// `t^k`.
    pub fn monomial(k: usize) -> Self {
        let mut c = vec![BigInt::zero(); k + 1];
        c[k] = BigInt::one();
        Self::new(c)
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn eval(&self, t: &BigInt) -> BigInt {
        self.coeffs.iter().rev().fold(BigInt::zero(), |acc, c| acc * t + c)
    }

    pub fn scale(&self, s: &BigInt) -> Self {
        Self::new(self.coeffs.iter().map(|c| c * s).collect())
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        let get = |v: &[BigInt], i: usize| v.get(i).cloned().unwrap_or_default();
        Self::new((0..n).map(|i| get(&self.coeffs, i) + get(&other.coeffs, i)).collect())
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        let mut c = vec![BigInt::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                c[i + j] += a * b;
            }
        }
        Self::new(c)
    }

    /// Human-readable form in the variable `var`, highest degree first.
    pub fn display(&self, var: &str) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let mut out = String::new();
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let mag = c.abs();
            if out.is_empty() {
                if c.is_negative() {
                    out.push('-');
                }
            } else {
                out.push_str(if c.is_negative() { " - " } else { " + " });
            }
            let unit = mag.is_one();
            match i {
                0 => out.push_str(&mag.to_string()),
                _ => {
                    if !unit {
                        out.push_str(&mag.to_string());
                    }
                    out.push_str(var);
                    if i > 1 {
                        out.push_str(&format!("^{i}"));
                    }
                }
            }
        }
        out
    }
}

impl fmt::Display for IntPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.display("x"))
    }
}

// Coefficients travel as decimal strings so that big integers survive JSON.
impl Serialize for IntPolynomial {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let v: Vec<String> = self.coeffs.iter().map(|c| c.to_string()).collect();
        v.serialize(s)
    }
}

impl<'de> Deserialize<'de> for IntPolynomial {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        use serde::de::Error;
        let v = Vec::<String>::deserialize(d)?;
        let c = v
            .iter()
            .map(|s| s.parse::<BigInt>().map_err(D::Error::custom))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Self::new(c))
    }
}

/// `P(n; x) = Σ_j C_j(n) x^j`, stored as the list of `C_j` (polynomials in `n`).
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct NxPolynomial {
    by_x: Vec<IntPolynomial>,
}

impl NxPolynomial {
    pub fn new(mut by_x: Vec<IntPolynomial>) -> Self {
        while by_x.last().is_some_and(IntPolynomial::is_zero) {
            by_x.pop();
        }
        Self { by_x }
    }

    /// A polynomial in `n` alone.
    pub fn in_n(c0: IntPolynomial) -> Self {
        Self::new(vec![c0])
    }

    /// `C_j(n)`, zero past the x-degree.
    pub fn coeff(&self, j: usize) -> IntPolynomial {
        self.by_x.get(j).cloned().unwrap_or_default()
    }

    pub fn x_coeffs(&self) -> &[IntPolynomial] {
        &self.by_x
    }

    pub fn x_degree(&self) -> Option<usize> {
        self.by_x.len().checked_sub(1)
    }

    pub fn eval(&self, n: &BigInt, x: &BigInt) -> BigInt {
        self.by_x.iter().rev().fold(BigInt::zero(), |acc, c| acc * x + c.eval(n))
    }

    /// Specializes `n`, leaving a polynomial in `x`.
    pub fn at_n(&self, n: &BigInt) -> IntPolynomial {
        IntPolynomial::new(self.by_x.iter().map(|c| c.eval(n)).collect())
    }

    pub fn display(&self) -> String {
        let terms: Vec<String> = self
            .by_x
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(j, c)| {
                let cn = c.display("n");
                match j {
                    0 => cn,
                    1 => format!("({cn})x"),
                    _ => format!("({cn})x^{j}"),
                }
            })
            .collect();
        if terms.is_empty() {
            "0".into()
        } else {
            terms.join(" + ")
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trims_and_evaluates() {
        let p = IntPolynomial::from_i64(&[-1, 1, 0, 0]);
        assert_eq!(p.degree(), Some(1));
        assert_eq!(p.eval(&BigInt::from(5)), BigInt::from(4));
        assert_eq!(p.to_string(), "x - 1");
        assert_eq!(IntPolynomial::from_i64(&[-1, 3, -1]).to_string(), "-x^2 + 3x - 1");
        assert!(IntPolynomial::from_i64(&[0, 0]).is_zero());
    }

    #[test]
    fn arithmetic() {
        let a = IntPolynomial::from_i64(&[1, 1]);
        let b = IntPolynomial::from_i64(&[-1, 1]);
        assert_eq!(a.mul(&b), IntPolynomial::from_i64(&[-1, 0, 1]));
        assert_eq!(a.add(&b), IntPolynomial::from_i64(&[0, 2]));
    }

    #[test]
    fn two_variables() {
        // 1 + (n - 2) x
        let p = NxPolynomial::new(vec![IntPolynomial::one(), IntPolynomial::from_i64(&[-2, 1])]);
        assert_eq!(p.eval(&BigInt::from(3), &BigInt::from(4)), BigInt::from(5));
        assert_eq!(p.at_n(&BigInt::from(0)), IntPolynomial::from_i64(&[1, -2]));
        assert_eq!(p.display(), "1 + (n - 2)x");
    }

    #[test]
    fn json_round_trip() {
        let p = IntPolynomial::from_i64(&[-1, 3, -1]);
        let s = serde_json::to_string(&p).unwrap();
        assert_eq!(s, r#"["-1","3","-1"]"#);
        assert_eq!(serde_json::from_str::<IntPolynomial>(&s).unwrap(), p);
    }
}
