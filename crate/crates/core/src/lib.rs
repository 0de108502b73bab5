//! Numerics on p-adic and general ultrametric spaces.
//!
//! The crate is organised by subsystem:
//!
//! - [`padic`]: exact p-adic numbers at finite precision, norms, additive
//!   characters, the Monna map, factorial norms and adelic product identities.
//! - [`series`]: p-adic summation of factorial series, invariant rational
//!   summation and truncated Riemann zeta evaluations.
//! - [`wavelets`]: locally constant functions on `Q_p^d`, Haar integration and
//!   the Kozyrev wavelet bases (scalar, multidimensional, matrix dilation).
//! - [`vladimirov`]: the fractional operator `D^α`, its spectral form and
//!   ultrametric heat flow.
//! - [`ultrametric`]: trees of balls, tree pseudodifferential operators,
//!   energy-landscape generators, Parisi matrices and iid sums on `Z_p`.
//! - [`strings`]: p-adic Veneziano amplitudes.
//! - [`genetic`]: the 5-adic / 2-adic model of the genetic code.

pub mod error;
pub mod genetic;
pub mod padic;
pub mod series;
pub mod strings;
pub mod ultrametric;
pub mod vladimirov;
pub mod wavelets;

pub use error::{Error, Result};
pub use padic::{PAdic, Rational};
