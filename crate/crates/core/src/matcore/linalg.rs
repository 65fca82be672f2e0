//! Thin wrappers over `nalgebra` decompositions with the crate's rank and
//! singularity conventions.

use num_complex::Complex;
use num_traits::Float;

use super::{czero, require_square, CMat, Real};
use crate::error::{Error, Result};

pub fn is_finite<T: Real>(m: &CMat<T>) -> bool {
    m.iter()
        .all(|z| Float::is_finite(z.re) && Float::is_finite(z.im))
}

pub fn max_abs<T: Real>(m: &CMat<T>) -> T {
    m.iter().fold(T::zero(), |acc, z| Float::max(acc, z.norm()))
}

/// `‖a − b‖_F / max(‖a‖_F, ‖b‖_F)`, zero when both vanish.
pub fn relative_defect<T: Real>(a: &CMat<T>, b: &CMat<T>) -> T {
    let scale = Float::max(a.norm(), b.norm());
    if scale <= T::min_positive_value() {
        return T::zero();
    }
    (a - b).norm() / scale
}

/// Singular values in decreasing order.
pub fn singular_values<T: Real>(m: &CMat<T>) -> Vec<T> {
    if m.nrows() == 0 || m.ncols() == 0 {
        return Vec::new();
    }
    let mut sv: Vec<T> = m.clone().singular_values().iter().copied().collect();
    sv.sort_by(|a, b| b.partial_cmp(a).unwrap_or(std::cmp::Ordering::Equal));
    sv
}

/// Numerical rank: singular values above `rel_tol · σ_max`.
pub fn rank<T: Real>(m: &CMat<T>, rel_tol: T) -> usize {
    let sv = singular_values(m);
    match sv.first() {
        Some(&top) if top > T::zero() => sv.iter().filter(|&&s| s > rel_tol * top).count(),
        _ => 0,
    }
}

fn lu_is_singular<T: Real>(lu: &nalgebra::LU<Complex<T>, nalgebra::Dyn, nalgebra::Dyn>) -> bool {
    let u = lu.u();
    let diag: Vec<T> = (0..u.nrows()).map(|i| u[(i, i)].norm()).collect();
    let top = diag.iter().fold(T::zero(), |a, &b| Float::max(a, b));
    let floor = top * T::epsilon() * super::lit(16.0);
    top == T::zero() || diag.iter().any(|&d| d <= floor)
}

/// Solve `a · x = b`.
pub fn solve<T: Real>(a: &CMat<T>, b: &CMat<T>) -> Result<CMat<T>> {
    let n = require_square(a)?;
    if b.nrows() != n {
        return Err(Error::DimensionMismatch(format!(
            "solve: {}x{} system with {} right-hand rows",
            n,
            n,
            b.nrows()
        )));
    }
    if n == 0 {
        return Ok(CMat::zeros(0, b.ncols()));
    }
    let lu = a.clone().lu();
    if lu_is_singular(&lu) {
        return Err(Error::Singular);
    }
    lu.solve(b).ok_or(Error::Singular)
}

pub fn inverse<T: Real>(a: &CMat<T>) -> Result<CMat<T>> {
    let n = require_square(a)?;
    solve(a, &CMat::identity(n, n))
}

pub fn det<T: Real>(a: &CMat<T>) -> Result<Complex<T>> {
    require_square(a)?;
    if a.nrows() == 0 {
        return Ok(super::cone());
    }
    Ok(a.clone().lu().determinant())
}

/// Moore–Penrose pseudo-inverse with relative singular-value cutoff.
pub fn pinv<T: Real>(m: &CMat<T>, rel_tol: T) -> CMat<T> {
    let (r, c) = m.shape();
    if r == 0 || c == 0 {
        return CMat::zeros(c, r);
    }
    let svd = m.clone().svd(true, true);
    let top = svd
        .singular_values
        .iter()
        .fold(T::zero(), |a, &b| Float::max(a, b));
    let u = svd.u.expect("u requested");
    let v_t = svd.v_t.expect("v_t requested");
    let mut out = CMat::<T>::zeros(c, r);
    for (k, &s) in svd.singular_values.iter().enumerate() {
        if s > rel_tol * top && s > T::zero() {
            let inv = Complex::new(T::one() / s, T::zero());
            // v_k · s⁻¹ · u_kᴴ
            for i in 0..c {
                let vik = v_t[(k, i)].conj() * inv;
                if vik == czero() {
                    continue;
                }
                for j in 0..r {
                    out[(i, j)] += vik * u[(j, k)].conj();
                }
            }
        }
    }
    out
}

/// Rows spanning `{v : m · v = 0}`, orthonormal in the Hermitian sense.
pub fn null_space_rows<T: Real>(m: &CMat<T>, rel_tol: T) -> CMat<T> {
    let (r, c) = m.shape();
    if c == 0 {
        return CMat::zeros(0, 0);
    }
    // pad to a square matrix so the SVD returns a full right basis
    let size = r.max(c);
    let mut padded = CMat::<T>::zeros(size, c);
    padded.rows_mut(0, r).copy_from(m);
    let svd = padded.svd(false, true);
    let v_t = svd.v_t.expect("v_t requested");
    let sv = &svd.singular_values;
    let top = sv.iter().fold(T::zero(), |a, &b| Float::max(a, b));
    let keep: Vec<usize> = (0..sv.len())
        .filter(|&k| top == T::zero() || sv[k] <= rel_tol * top)
        .collect();
    let mut out = CMat::<T>::zeros(keep.len(), c);
    for (row, &k) in keep.iter().enumerate() {
        for j in 0..c {
            out[(row, j)] = v_t[(k, j)].conj();
        }
    }
    out
}
