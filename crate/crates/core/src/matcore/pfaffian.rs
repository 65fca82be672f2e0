use num_complex::Complex;
use num_traits::Float;

use super::{cone, czero, lit, require_square, CMat, Real, Tolerances};
use crate::error::{Error, Result};

/// Pfaffian of a skew-symmetric matrix, `pf(M)² = det(M)`.
///
/// Skew-symmetric elimination: at step `k` the largest entry of row `k`
/// beyond the diagonal is swapped into position `(k, k+1)` (each swap flips
/// the sign), the pivot is multiplied into the result, and the trailing block
/// is replaced by its skew Schur complement.
pub fn pfaffian<T: Real>(m: &CMat<T>, tol: &Tolerances) -> Result<Complex<T>> {
    let n = require_square(m)?;
    if n % 2 == 1 {
        return Err(Error::OddDimension(n));
    }
    let scale = m.norm();
    let defect = (m + m.transpose()).norm();
    if defect > lit::<T>(tol.rank_tol) * scale {
        let rel = if scale > T::zero() { defect / scale } else { defect };
        return Err(Error::NotSkewSymmetric(
            num_traits::ToPrimitive::to_f64(&rel).unwrap_or(f64::INFINITY),
        ));
    }
    Ok(pfaffian_unchecked(m.clone()))
}

/// Pfaffian without the symmetry checks; only the strict upper triangle is read.
pub(crate) fn pfaffian_unchecked<T: Real>(mut a: CMat<T>) -> Complex<T> {
    let n = a.nrows();
    let mut result = cone::<T>();
    let mut k = 0;
    while k < n {
        let mut piv = k + 1;
        let mut best = a[(k, k + 1)].norm();
        for j in (k + 2)..n {
            let v = a[(k, j)].norm();
            if v > best {
                best = v;
                piv = j;
            }
        }
        if best == T::zero() {
            return czero();
        }
        if piv != k + 1 {
            a.swap_rows(k + 1, piv);
            a.swap_columns(k + 1, piv);
            result = -result;
        }
        let p = a[(k, k + 1)];
        result *= p;
        let inv = cone::<T>() / p;
        // M' ← M' + (v uᵀ − u vᵀ)/p with u = row k, v = row k+1 (trailing parts)
        for i in (k + 2)..n {
            let ui = a[(k, i)];
            let vi = a[(k + 1, i)];
            for j in (i + 1)..n {
                let uj = a[(k, j)];
                let vj = a[(k + 1, j)];
                let upd = a[(i, j)] + (vi * uj - ui * vj) * inv;
                a[(i, j)] = upd;
                a[(j, i)] = -upd;
            }
        }
        k += 2;
    }
    if Float::is_nan(result.re) {
        return czero();
    }
    result
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matcore::{standard_form, FormKind};
    use num_complex::Complex64;

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    #[test]
    fn two_by_two() {
        let a = Complex64::new(1.5, -2.0);
        let m = CMat::<f64>::from_row_slice(2, 2, &[Complex64::new(0.0, 0.0), a, -a, Complex64::new(0.0, 0.0)]);
        assert_eq!(pfaffian(&m, &tol()).unwrap(), a);
    }

    #[test]
    fn symplectic_form_four() {
        // a12 a34 − a13 a24 + a14 a23 with a13 = a24 = 1
        let j = standard_form::<f64>(FormKind::Symplectic, 2);
        assert_eq!(pfaffian(&j, &tol()).unwrap(), Complex64::new(-1.0, 0.0));
    }

    #[test]
    fn errors() {
        let odd = CMat::<f64>::zeros(3, 3);
        assert_eq!(pfaffian(&odd, &tol()), Err(Error::OddDimension(3)));
        let sym = CMat::<f64>::identity(2, 2);
        assert!(matches!(pfaffian(&sym, &tol()), Err(Error::NotSkewSymmetric(_))));
    }

    #[test]
    fn empty_and_zero() {
        assert_eq!(pfaffian(&CMat::<f64>::zeros(0, 0), &tol()).unwrap(), Complex64::new(1.0, 0.0));
        assert_eq!(pfaffian(&CMat::<f64>::zeros(4, 4), &tol()).unwrap(), Complex64::new(0.0, 0.0));
    }
}
