//! Points with p-power denominators and locally constant functions on a
//! finite grid of cosets.

use crate::error::{Error, Result};
use crate::padic::{check_prime, unit_root_i128};
use crate::Rational;
use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

fn overflow() -> Error {
    Error::ResolutionOverflow("point arithmetic exceeds 128-bit range".into())
}

pub(crate) fn ipow(p: u64, e: u32) -> Result<i128> {
    (p as i128).checked_pow(e).ok_or_else(overflow)
}

/// `num · p^{-exp}`, a rational whose denominator is a power of `p`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PRat {
    pub p: u64,
    pub num: i128,
    pub exp: i32,
}

impl PRat {
    pub fn new(p: u64, num: i128, exp: i32) -> Self {
        let mut r = Self { p, num, exp };
        if num == 0 {
            r.exp = 0;
            return r;
        }
        let pi = p as i128;
        while r.exp > 0 && r.num % pi == 0 {
            r.num /= pi;
            r.exp -= 1;
        }
        r
    }

    pub fn zero(p: u64) -> Self {
        Self { p, num: 0, exp: 0 }
    }

    pub fn integer(p: u64, n: i128) -> Self {
        Self { p, num: n, exp: 0 }
    }

    pub fn is_zero(&self) -> bool {
        self.num == 0
    }

    /// `ν_p`, `None` for zero.
    pub fn valuation(&self) -> Option<i64> {
        if self.num == 0 {
            return None;
        }
        let pi = self.p as i128;
        let mut n = self.num;
        let mut v = 0i64;
        while n % pi == 0 {
            n /= pi;
            v += 1;
        }
        Some(v - self.exp as i64)
    }

    pub fn in_zp(&self) -> bool {
        self.valuation().is_none_or(|v| v >= 0)
    }

    /// Multiplies by `p^e`.
    pub fn shift(&self, e: i32) -> Self {
        Self::new(self.p, self.num, self.exp - e)
    }

    fn with_exp(&self, exp: i32) -> Result<i128> {
        debug_assert!(exp >= self.exp);
        self.num.checked_mul(ipow(self.p, (exp - self.exp) as u32)?).ok_or_else(overflow)
    }

    pub fn add(&self, o: &Self) -> Result<Self> {
        let e = self.exp.max(o.exp);
        let s = self.with_exp(e)?.checked_add(o.with_exp(e)?).ok_or_else(overflow)?;
        Ok(Self::new(self.p, s, e))
    }

    pub fn sub(&self, o: &Self) -> Result<Self> {
        self.add(&o.mul_int(-1)?)
    }

    pub fn mul_int(&self, k: i128) -> Result<Self> {
        Ok(Self::new(self.p, self.num.checked_mul(k).ok_or_else(overflow)?, self.exp))
    }

    /// Fractional part `{x}_p` as `(r, p^m)` with `0 ≤ r < p^m`.
    pub fn frac(&self) -> Result<(i128, i128)> {
        if self.exp <= 0 {
            return Ok((0, 1));
        }
        let m = ipow(self.p, self.exp as u32)?;
        Ok((self.num.rem_euclid(m), m))
    }

    /// `x − {x}_p`, an integer.
    pub fn int_part(&self) -> Result<i128> {
        if self.exp <= 0 {
            return self.num.checked_mul(ipow(self.p, (-self.exp) as u32)?).ok_or_else(overflow);
        }
        let (r, m) = self.frac()?;
        Ok((self.num - r) / m)
    }

    /// `χ(x) = exp(2πi {x}_p)`.
    pub fn character(&self) -> Result<Complex64> {
        let (r, m) = self.frac()?;
        Ok(unit_root_i128(r, m))
    }

    pub fn to_rational(&self) -> Rational {
        let pe = num_traits::pow(BigInt::from(self.p), self.exp.unsigned_abs() as usize);
        if self.exp >= 0 {
            Rational::new(BigInt::from(self.num), pe)
        } else {
            Rational::from_integer(BigInt::from(self.num) * pe)
        }
    }

    /// Monna image `Σ x_i p^{-i-1}` of the base-p digits of a nonnegative
    /// representative (`num ≥ 0`).
    pub fn monna(&self) -> f64 {
        debug_assert!(self.num >= 0);
        let pi = self.p as i128;
        let pf = self.p as f64;
        let mut n = self.num;
        let mut i = -self.exp;
        let mut acc = 0.0;
        while n > 0 {
            acc += (n % pi) as f64 * pf.powi(-i - 1);
            n /= pi;
            i += 1;
        }
        acc
    }
}

/// Geometry of a coset grid: `(p^{-N} Z_p)^d` cut into cosets of `(p^M Z_p)^d`.
///
/// In one dimension the cell of `x` is `(p^N x) mod p^{N+M}`, i.e. the digits
/// `x_{-N} … x_{M-1}` with `x_{-N}` least significant. In `d` dimensions the
/// per-coordinate indices are combined row-major, first coordinate slowest.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Grid {
    pub p: u64,
    pub d: u32,
    /// Support exponent: the grid covers `|x|_p ≤ p^N`.
    pub n: i32,
    /// Resolution: cells are cosets of `p^M Z_p`.
    pub m: i32,
}

impl Grid {
    pub fn new(p: u64, d: u32, n: i32, m: i32) -> Result<Self> {
        check_prime(p)?;
        if d == 0 {
            return Err(crate::error::invalid("dimension must be at least 1"));
        }
        if n + m < 0 {
            return Err(crate::error::invalid("need N + M ≥ 0"));
        }
        let g = Self { p, d, n, m };
        let side = ipow(p, (n + m) as u32)?;
        let len = side.checked_pow(d).ok_or_else(overflow)?;
        if len > 1 << 26 {
            return Err(Error::ResolutionOverflow(format!("{len} cells")));
        }
        Ok(g)
    }

    /// Cells per coordinate, `p^{N+M}`.
    pub fn side(&self) -> usize {
        (self.p as usize).pow((self.n + self.m) as u32)
    }

    pub fn len(&self) -> usize {
        self.side().pow(self.d)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Haar measure `p^{-dM}` of one cell.
    pub fn cell_measure(&self) -> f64 {
        (self.p as f64).powi(-(self.d as i32) * self.m)
    }

    /// Per-coordinate indices of cell `c`.
    pub fn coords(&self, c: usize) -> Vec<usize> {
        let side = self.side();
        let mut out = vec![0; self.d as usize];
        let mut rest = c;
        for slot in out.iter_mut().rev() {
            *slot = rest % side;
            rest /= side;
        }
        out
    }

    pub fn cell_of_coords(&self, coords: &[usize]) -> usize {
        let side = self.side();
        coords.iter().fold(0, |acc, &i| acc * side + i)
    }

    /// Representative point `p^{-N}·i` of each coordinate of cell `c`.
    pub fn point(&self, c: usize) -> Vec<PRat> {
        self.coords(c).into_iter().map(|i| PRat::new(self.p, i as i128, self.n)).collect()
    }

    /// Coordinate index of `x`, or `None` when `|x|_p > p^N`.
    pub fn coord_index(&self, x: &PRat) -> Result<Option<usize>> {
        let y = x.shift(self.n);
        if !y.in_zp() {
            return Ok(None);
        }
        let modulus = ipow(self.p, (self.n + self.m) as u32)?;
        Ok(Some(y.int_part()?.rem_euclid(modulus) as usize))
    }

    /// Cell containing the point, or `None` outside the support ball.
    pub fn index_of(&self, x: &[PRat]) -> Result<Option<usize>> {
        if x.len() != self.d as usize {
            return Err(Error::ShapeMismatch(format!("point of dimension {}", x.len())));
        }
        let mut coords = Vec::with_capacity(x.len());
        for xi in x {
            match self.coord_index(xi)? {
                Some(i) => coords.push(i),
                None => return Ok(None),
            }
        }
        Ok(Some(self.cell_of_coords(&coords)))
    }

    /// Cells of the box `Π_l (c_l + p^{e_l} Z_p)`, ascending. Empty when the
    /// box misses the grid; an error when it is finer than a cell or wider
    /// than the grid.
    pub fn box_cells(&self, center: &[PRat], exps: &[i32]) -> Result<Vec<usize>> {
        if center.len() != self.d as usize || exps.len() != self.d as usize {
            return Err(Error::ShapeMismatch("box dimension".into()));
        }
        let side = self.side();
        let mut per_coord = Vec::with_capacity(center.len());
        for (c, &e) in center.iter().zip(exps) {
            if e > self.m {
                return Err(Error::ResolutionOverflow(format!(
                    "ball p^{e}Z_p is finer than the resolution p^{}",
                    self.m
                )));
            }
            if e < -self.n {
                return Err(Error::OutsideDomain(format!(
                    "ball p^{e}Z_p is wider than the grid p^{}Z_p",
                    -self.n
                )));
            }
            let Some(i) = self.coord_index(c)? else {
                return Ok(Vec::new());
            };
            let stride = (self.p as usize).pow((self.n + e) as u32);
            let base = i % stride;
            per_coord.push((0..side / stride).map(|t| base + t * stride).collect::<Vec<_>>());
        }
        let mut cells = vec![0usize];
        for list in &per_coord {
            cells = cells.iter().flat_map(|&c| list.iter().map(move |&i| c * side + i)).collect();
        }
        Ok(cells)
    }
}

/// A locally constant function with values on the cells of a [`Grid`].
#[derive(Debug, Clone, PartialEq)]
pub struct BallFunction {
    grid: Grid,
    values: Vec<Complex64>,
}

#[derive(Serialize, Deserialize)]
struct BallWire {
    p: u64,
    d: u32,
    #[serde(rename = "N")]
    n: i32,
    #[serde(rename = "M")]
    m: i32,
    re: Vec<f64>,
    im: Vec<f64>,
}

impl Serialize for BallFunction {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let g = self.grid;
        BallWire {
            p: g.p,
            d: g.d,
            n: g.n,
            m: g.m,
            re: self.values.iter().map(|z| z.re).collect(),
            im: self.values.iter().map(|z| z.im).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for BallFunction {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let w = BallWire::deserialize(d)?;
        if w.re.len() != w.im.len() {
            return Err(D::Error::custom("re and im lengths differ"));
        }
        let values = w.re.iter().zip(&w.im).map(|(&r, &i)| Complex64::new(r, i)).collect();
        let grid = Grid::new(w.p, w.d, w.n, w.m).map_err(D::Error::custom)?;
        BallFunction::new(grid, values).map_err(D::Error::custom)
    }
}

impl BallFunction {
    pub fn new(grid: Grid, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::ShapeMismatch(format!(
                "expected {} cell values, got {}",
                grid.len(),
                values.len()
            )));
        }
        Ok(Self { grid, values })
    }

    pub fn zeros(grid: Grid) -> Self {
        Self { grid, values: vec![Complex64::zero(); grid.len()] }
    }

    /// Samples `f` at one representative per cell.
    pub fn from_fn(grid: Grid, mut f: impl FnMut(&[PRat]) -> Result<Complex64>) -> Result<Self> {
        let mut out = Self::zeros(grid);
        for c in 0..out.values.len() {
            out.values[c] = f(&grid.point(c))?;
        }
        Ok(out)
    }

    /// The indicator of `Z_p^d`.
    pub fn unit_ball(grid: Grid) -> Result<Self> {
        Self::from_fn(grid, |x| {
            Ok(if x.iter().all(PRat::in_zp) { Complex64::new(1.0, 0.0) } else { Complex64::zero() })
        })
    }

    pub fn grid(&self) -> Grid {
        self.grid
    }
    pub fn p(&self) -> u64 {
        self.grid.p
    }
    pub fn values(&self) -> &[Complex64] {
        &self.values
    }
    pub fn values_mut(&mut self) -> &mut [Complex64] {
        &mut self.values
    }
    pub fn len(&self) -> usize {
        self.values.len()
    }
    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Value at an arbitrary point (zero outside the support ball).
    pub fn eval(&self, x: &[PRat]) -> Result<Complex64> {
        Ok(self.grid.index_of(x)?.map_or(Complex64::zero(), |c| self.values[c]))
    }

    pub fn integral(&self) -> Complex64 {
        self.values.iter().sum::<Complex64>() * self.grid.cell_measure()
    }

    pub fn norm_sq(&self) -> f64 {
        self.values.iter().map(|z| z.norm_sqr()).sum::<f64>() * self.grid.cell_measure()
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    fn same_space(&self, other: &Self) -> Result<()> {
        if self.grid.p != other.grid.p {
            return Err(Error::PrimeMismatch { left: self.grid.p, right: other.grid.p });
        }
        if self.grid.d != other.grid.d {
            return Err(Error::ShapeMismatch(format!(
                "dimensions {} and {}",
                self.grid.d, other.grid.d
            )));
        }
        Ok(())
    }

    /// The same function on a finer and/or larger grid.
    pub fn refine(&self, n: i32, m: i32) -> Result<Self> {
        let g = self.grid;
        if n < g.n || m < g.m {
            return Err(crate::error::invalid("refinement cannot shrink the grid"));
        }
        if n == g.n && m == g.m {
            return Ok(self.clone());
        }
        Self::from_fn(Grid::new(g.p, g.d, n, m)?, |x| self.eval(x))
    }

    /// Both operands on the common grid `(max N, max M)`.
    pub fn common_refinement(&self, other: &Self) -> Result<(Self, Self)> {
        self.same_space(other)?;
        let n = self.grid.n.max(other.grid.n);
        let m = self.grid.m.max(other.grid.m);
        Ok((self.refine(n, m)?, other.refine(n, m)?))
    }

    /// `⟨f, g⟩ = ∫ conj(f) g`.
    pub fn inner_product(&self, other: &Self) -> Result<Complex64> {
        let (a, b) = self.common_refinement(other)?;
        let s: Complex64 = a.values.iter().zip(&b.values).map(|(x, y)| x.conj() * y).sum();
        Ok(s * a.grid.cell_measure())
    }

    pub fn scale(&self, s: Complex64) -> Self {
        let mut out = self.clone();
        out.values.iter_mut().for_each(|v| *v *= s);
        out
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        let (mut a, b) = self.common_refinement(other)?;
        a.values.iter_mut().zip(&b.values).for_each(|(x, y)| *x += y);
        Ok(a)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.scale(Complex64::new(-1.0, 0.0)))
    }

    /// `max |f − g|` over the common grid.
    pub fn max_abs_diff(&self, other: &Self) -> Result<f64> {
        Ok(self.sub(other)?.sup_norm())
    }
}
