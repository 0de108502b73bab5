use super::{check_prime, distinct_prime_factors, PAdic, Rational};
use crate::error::{invalid, Result};
use num_traits::ToPrimitive;
use serde::Serialize;
use std::collections::{BTreeMap, BTreeSet};

/// An adele `(x_∞, x_2, x_3, …)` with explicit components on a finite prime
/// set `S`; every prime outside `S` carries a `Z_p` component.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Adele {
    pub real: f64,
    pub finite: BTreeMap<u64, PAdic>,
    pub support: BTreeSet<u64>,
}

impl Adele {
    /// Diagonal embedding of `q`. `primes` must contain every prime dividing
    /// the denominator of `q`.
    pub fn from_rational(q: &Rational, primes: &BTreeSet<u64>, precision: usize) -> Result<Self> {
        for &p in primes {
            check_prime(p)?;
        }
        let missing: Vec<u64> = distinct_prime_factors(q.denom().magnitude())?
            .into_iter()
            .filter(|p| !primes.contains(p))
            .collect();
        if !missing.is_empty() {
            return Err(invalid(format!(
                "support set too small: q has negative valuation at {missing:?}"
            )));
        }
        let finite = primes
            .iter()
            .map(|&p| Ok((p, PAdic::from_rational(q, p, precision)?)))
            .collect::<Result<_>>()?;
        Ok(Self { real: q.to_f64().unwrap_or(f64::NAN), finite, support: primes.clone() })
    }

    /// Whether the component at `p` lies in `Z_p` (implicitly true off the support).
    pub fn is_integral_at(&self, p: u64) -> bool {
        self.finite.get(&p).is_none_or(|x| x.is_zero() || x.valuation() >= 0)
    }
}
