use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex;
use num_traits::Float;

use super::{cone, czero, lit, CMat, Real, Tolerances};
use crate::error::{Error, Result};

/// Univariate complex polynomial, coefficients in ascending degree.
///
/// The zero polynomial has no coefficients; otherwise the leading
/// coefficient is nonzero.
#[derive(Debug, Clone, PartialEq)]
pub struct Poly<T: Real> {
    coeffs: Vec<Complex<T>>,
}

impl<T: Real> Poly<T> {
    pub fn new(mut coeffs: Vec<Complex<T>>) -> Self {
        while coeffs.last().is_some_and(|c| *c == czero()) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn from_real(coeffs: &[f64]) -> Self {
        Self::new(coeffs.iter().map(|&c| Complex::new(lit(c), T::zero())).collect())
    }

    pub fn zero() -> Self {
        Self { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Self::constant(cone())
    }

    pub fn constant(c: Complex<T>) -> Self {
        Self::new(vec![c])
    }

    /// `c · s^k`.
    pub fn monomial(c: Complex<T>, k: usize) -> Self {
        let mut coeffs = vec![czero(); k + 1];
        coeffs[k] = c;
        Self::new(coeffs)
    }

    /// Monic polynomial `∏ (s − r)`.
    pub fn from_roots(roots: &[Complex<T>]) -> Self {
        roots.iter().fold(Self::one(), |acc, &r| {
            acc * Self::new(vec![-r, cone()])
        })
    }

    pub fn coeffs(&self) -> &[Complex<T>] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<Complex<T>> {
        self.coeffs
    }

    /// Coefficient of `s^k` (zero beyond the degree).
    pub fn coeff(&self, k: usize) -> Complex<T> {
        self.coeffs.get(k).copied().unwrap_or_else(czero)
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn leading(&self) -> Complex<T> {
        self.coeffs.last().copied().unwrap_or_else(czero)
    }

    pub fn eval(&self, s: Complex<T>) -> Complex<T> {
        self.coeffs
            .iter()
            .rev()
            .fold(czero(), |acc, &c| acc * s + c)
    }

    pub fn scale(&self, c: Complex<T>) -> Self {
        Self::new(self.coeffs.iter().map(|&a| a * c).collect())
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, &c)| c * Complex::new(lit::<T>(k as f64), T::zero()))
                .collect(),
        )
    }

    /// `p(−s)`.
    pub fn reflect(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .map(|(k, &c)| if k % 2 == 1 { -c } else { c })
                .collect(),
        )
    }

    /// Max-abs coefficient norm.
    pub fn coeff_norm(&self) -> T {
        self.coeffs
            .iter()
            .fold(T::zero(), |acc, c| Float::max(acc, c.norm()))
    }

    /// `‖self − other‖ / max(‖self‖, ‖other‖)` in the coefficient max norm.
    pub fn relative_distance(&self, other: &Self) -> T {
        let scale = Float::max(self.coeff_norm(), other.coeff_norm());
        if scale <= T::min_positive_value() {
            return T::zero();
        }
        (self.clone() - other.clone()).coeff_norm() / scale
    }

    /// Largest imaginary part among the coefficients.
    pub fn max_imag(&self) -> T {
        self.coeffs
            .iter()
            .fold(T::zero(), |acc, c| Float::max(acc, Float::abs(c.im)))
    }
}

impl<T: Real> Add for Poly<T> {
    type Output = Poly<T>;
    fn add(self, rhs: Self) -> Self {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Poly::new((0..n).map(|k| self.coeff(k) + rhs.coeff(k)).collect())
    }
}

impl<T: Real> Sub for Poly<T> {
    type Output = Poly<T>;
    fn sub(self, rhs: Self) -> Self {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Poly::new((0..n).map(|k| self.coeff(k) - rhs.coeff(k)).collect())
    }
}

impl<T: Real> Neg for Poly<T> {
    type Output = Poly<T>;
    fn neg(self) -> Self {
        Poly::new(self.coeffs.into_iter().map(|c| -c).collect())
    }
}

impl<T: Real> Mul for Poly<T> {
    type Output = Poly<T>;
    fn mul(self, rhs: Self) -> Self {
        &self * &rhs
    }
}

impl<T: Real> Mul for &Poly<T> {
    type Output = Poly<T>;
    fn mul(self, rhs: Self) -> Poly<T> {
        if self.is_zero() || rhs.is_zero() {
            return Poly::zero();
        }
        let mut out = vec![czero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            for (j, &b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Poly::new(out)
    }
}

/// Monic square root of a monic even-degree polynomial.
///
/// Coefficients of `q` are solved from the top down by matching the upper
/// half of `q²` against `p`; the lower half is then checked as a residual.
pub fn poly_sqrt<T: Real>(p: &Poly<T>, tol: &Tolerances) -> Result<Poly<T>> {
    let deg = p.degree().ok_or(Error::NotASquare(f64::INFINITY))?;
    if deg % 2 == 1 {
        return Err(Error::DegreeMismatch {
            expected: deg + 1,
            got: deg,
        });
    }
    let lead = p.leading();
    let tol_t = lit::<T>(tol.residual_tol);
    if (lead - cone::<T>()).norm() > tol_t {
        return Err(Error::NotASquare(f64::INFINITY));
    }
    let half = deg / 2;
    let two = Complex::new(lit::<T>(2.0), T::zero());
    let mut q = vec![czero::<T>(); half + 1];
    q[half] = cone();
    for k in 1..=half {
        // coefficient of s^{deg-k} in q² is 2 q_half q_{half-k} + Σ_{i+j=deg-k, i,j>half-k} q_i q_j
        let target = deg - k;
        let mut acc = czero::<T>();
        for i in (half - k + 1)..=half {
            let j = target - i;
            if j > half - k && j <= half {
                acc += q[i] * q[j];
            }
        }
        q[half - k] = (p.coeff(target) - acc) / two;
    }
    let q = Poly::new(q);
    let residual = (p.clone() - &q * &q).coeff_norm() / p.coeff_norm();
    let residual_f = <T as num_traits::ToPrimitive>::to_f64(&residual).unwrap_or(f64::INFINITY);
    if residual > tol_t {
        return Err(Error::NotASquare(residual_f));
    }
    Ok(q)
}

/// Matrix of polynomials, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct PolyMatrix<T: Real> {
    rows: usize,
    cols: usize,
    entries: Vec<Poly<T>>,
}

impl<T: Real> PolyMatrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            entries: vec![Poly::zero(); rows * cols],
        }
    }

    pub fn from_entries(rows: usize, cols: usize, entries: Vec<Poly<T>>) -> Result<Self> {
        if entries.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!(
                "{} polynomial entries for a {rows}x{cols} matrix",
                entries.len()
            )));
        }
        Ok(Self {
            rows,
            cols,
            entries,
        })
    }

    pub fn nrows(&self) -> usize {
        self.rows
    }

    pub fn ncols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &Poly<T> {
        &self.entries[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, p: Poly<T>) {
        self.entries[i * self.cols + j] = p;
    }

    pub fn entries(&self) -> &[Poly<T>] {
        &self.entries
    }

    /// Columns `start..start+count` as a new matrix.
    pub fn columns(&self, start: usize, count: usize) -> Self {
        let mut out = Self::zeros(self.rows, count);
        for i in 0..self.rows {
            for j in 0..count {
                out.set(i, j, self.get(i, start + j).clone());
            }
        }
        out
    }

    pub fn eval(&self, s: Complex<T>) -> CMat<T> {
        CMat::from_fn(self.rows, self.cols, |i, j| self.get(i, j).eval(s))
    }

    /// Highest degree in each row (`None` for a zero row).
    pub fn row_degrees(&self) -> Vec<Option<usize>> {
        (0..self.rows)
            .map(|i| (0..self.cols).filter_map(|j| self.get(i, j).degree()).max())
            .collect()
    }
}
