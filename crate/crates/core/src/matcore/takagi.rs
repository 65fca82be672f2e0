//! Congruence factorizations `X = YᵀY` (complex symmetric) and `Z = YᵀJY`
//! (complex skew-symmetric) by pivoted elimination.
//!
//! Both routines reduce the input by congruences `W ← EᵀWE` and accumulate
//! `Y ← E⁻¹Y`, so that `input = Yᵀ W Y` holds throughout; once `W` is the
//! identity (resp. `J`) the accumulated `Y` is the factor.

use num_complex::Complex;
use num_traits::Float;

use super::{cone, lit, require_square, CMat, Real, Tolerances};
use crate::error::{Error, Result};

fn to_f64<T: Real>(x: T) -> f64 {
    num_traits::ToPrimitive::to_f64(&x).unwrap_or(f64::INFINITY)
}

fn swap_sym<T: Real>(w: &mut CMat<T>, y: &mut CMat<T>, i: usize, j: usize) {
    if i != j {
        w.swap_rows(i, j);
        w.swap_columns(i, j);
        y.swap_rows(i, j);
    }
}

/// Symmetric congruence factorization: returns invertible `Y` with `YᵀY = X`.
///
/// Diagonal pivoting; when every remaining diagonal entry is small against
/// the off-diagonal ones, a column is first combined with another
/// (`col_i ± col_j`) so a diagonal pivot of at least twice the largest
/// off-diagonal magnitude appears. Pivot square roots use the principal branch.
pub fn takagi_symmetric<T: Real>(x: &CMat<T>, tol: &Tolerances) -> Result<CMat<T>> {
    let n = require_square(x)?;
    let scale = x.norm();
    let defect = (x - x.transpose()).norm();
    if defect > lit::<T>(tol.rank_tol) * scale {
        return Err(Error::NotSymmetric(to_f64(defect / scale)));
    }
    let floor = lit::<T>(tol.rank_tol) * scale;
    let mut w = x.clone();
    let mut y = CMat::<T>::identity(n, n);
    for k in 0..n {
        let (mut piv, mut best_diag) = (k, T::zero());
        for i in k..n {
            let d = w[(i, i)].norm();
            if d > best_diag {
                best_diag = d;
                piv = i;
            }
        }
        let (mut oi, mut oj, mut best_off) = (k, k, T::zero());
        for i in k..n {
            for j in (i + 1)..n {
                let v = w[(i, j)].norm();
                if v > best_off {
                    best_off = v;
                    oi = i;
                    oj = j;
                }
            }
        }
        if best_diag < lit::<T>(0.5) * best_off {
            // col_i ← col_i + σ col_j (and the matching row operation)
            let plus = w[(oi, oi)] + w[(oi, oj)] * lit::<T>(2.0) + w[(oj, oj)];
            let minus = w[(oi, oi)] - w[(oi, oj)] * lit::<T>(2.0) + w[(oj, oj)];
            let sigma: Complex<T> = if plus.norm() >= minus.norm() { cone() } else { -cone::<T>() };
            for r in k..n {
                let v = w[(r, oj)] * sigma;
                w[(r, oi)] += v;
            }
            for c in k..n {
                let v = w[(oj, c)] * sigma;
                w[(oi, c)] += v;
            }
            // E = I + σ e_j e_iᵀ, E⁻¹ = I − σ e_j e_iᵀ: row_j(Y) −= σ row_i(Y)
            for c in 0..n {
                let v = y[(oi, c)] * sigma;
                y[(oj, c)] -= v;
            }
            piv = oi;
        }
        swap_sym(&mut w, &mut y, k, piv);
        let p = w[(k, k)];
        if p.norm() <= floor || p.norm() == T::zero() {
            return Err(Error::Singular);
        }
        let l: Vec<Complex<T>> = ((k + 1)..n).map(|j| w[(k, j)] / p).collect();
        for (a, i) in ((k + 1)..n).enumerate() {
            for j in (k + 1)..n {
                let upd = l[a] * w[(k, j)];
                w[(i, j)] -= upd;
            }
        }
        for j in (k + 1)..n {
            w[(k, j)] = Complex::new(T::zero(), T::zero());
            w[(j, k)] = Complex::new(T::zero(), T::zero());
        }
        // E = I − e_k lᵀ, E⁻¹ = I + e_k lᵀ: row_k(Y) += Σ l_j row_j(Y)
        for c in 0..n {
            let mut acc = y[(k, c)];
            for (a, j) in ((k + 1)..n).enumerate() {
                acc += l[a] * y[(j, c)];
            }
            y[(k, c)] = acc;
        }
        let r = p.sqrt();
        w[(k, k)] = cone();
        for c in 0..n {
            y[(k, c)] *= r;
        }
    }
    Ok(y)
}

/// Skew congruence factorization: returns invertible `Y` with `YᵀJY = Z`
/// where `J = [[0, I], [-I, 0]]`.
///
/// The elimination reduces `Z` to a direct sum of `[[0, p], [-p, 0]]`
/// blocks; each block is scaled by `diag(√|p|, p/√|p|)` (real whenever `p`
/// is real) and the blocks are interleaved into the `J` layout.
pub fn takagi_skew<T: Real>(z: &CMat<T>, tol: &Tolerances) -> Result<CMat<T>> {
    let n = require_square(z)?;
    if n % 2 == 1 {
        return Err(Error::OddDimension(n));
    }
    let scale = z.norm();
    let defect = (z + z.transpose()).norm();
    if defect > lit::<T>(tol.rank_tol) * scale {
        return Err(Error::NotSkewSymmetric(to_f64(defect / scale)));
    }
    let floor = lit::<T>(tol.rank_tol) * scale;
    let mut w = z.clone();
    let mut y = CMat::<T>::identity(n, n);
    let mut pivots = Vec::with_capacity(n / 2);
    let mut k = 0;
    while k < n {
        let (mut bi, mut bj, mut best) = (k, k + 1, T::zero());
        for i in k..n {
            for j in (i + 1)..n {
                let v = w[(i, j)].norm();
                if v > best {
                    best = v;
                    bi = i;
                    bj = j;
                }
            }
        }
        if best <= floor || best == T::zero() {
            return Err(Error::Singular);
        }
        swap_sym(&mut w, &mut y, k, bi);
        let bj = if bj == k { bi } else { bj };
        swap_sym(&mut w, &mut y, k + 1, bj);
        let p = w[(k, k + 1)];
        // col_j ← col_j − a_j col_k − b_j col_{k+1} zeroes rows k, k+1 beyond the block
        let a: Vec<Complex<T>> = ((k + 2)..n).map(|j| -w[(k + 1, j)] / p).collect();
        let b: Vec<Complex<T>> = ((k + 2)..n).map(|j| w[(k, j)] / p).collect();
        for (t, j) in ((k + 2)..n).enumerate() {
            for r in 0..n {
                let v = a[t] * w[(r, k)] + b[t] * w[(r, k + 1)];
                w[(r, j)] -= v;
            }
        }
        for (t, j) in ((k + 2)..n).enumerate() {
            for c in 0..n {
                let v = a[t] * w[(k, c)] + b[t] * w[(k + 1, c)];
                w[(j, c)] -= v;
            }
        }
        for j in (k + 2)..n {
            for r in [k, k + 1] {
                w[(r, j)] = Complex::new(T::zero(), T::zero());
                w[(j, r)] = Complex::new(T::zero(), T::zero());
            }
        }
        // E⁻¹ = I + e_k aᵀ + e_{k+1} bᵀ
        for c in 0..n {
            let mut acc_k = y[(k, c)];
            let mut acc_k1 = y[(k + 1, c)];
            for (t, j) in ((k + 2)..n).enumerate() {
                acc_k += a[t] * y[(j, c)];
                acc_k1 += b[t] * y[(j, c)];
            }
            y[(k, c)] = acc_k;
            y[(k + 1, c)] = acc_k1;
        }
        pivots.push(p);
        k += 2;
    }
    let half = n / 2;
    let mut out = CMat::<T>::zeros(n, n);
    for (t, &p) in pivots.iter().enumerate() {
        let sigma = Float::sqrt(p.norm());
        let s0 = Complex::new(sigma, T::zero());
        let s1 = p / s0;
        for c in 0..n {
            out[(t, c)] = s0 * y[(2 * t, c)];
            out[(half + t, c)] = s1 * y[(2 * t + 1, c)];
        }
    }
    Ok(out)
}
