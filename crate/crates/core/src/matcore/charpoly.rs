use num_complex::Complex;
use serde::{Deserialize, Serialize};

use super::{cone, czero, lit, require_square, CMat, Poly, Real};
use crate::error::{Error, Result};

/// `det(sI − A)`, monic of degree `n`.
///
/// Balanced, reduced to Hessenberg form, then expanded by La Budde's
/// recurrence. Unlike Faddeev–LeVerrier this stays accurate when `‖A‖` is
/// far larger than the spectrum.
pub fn char_poly<T: Real>(a: &CMat<T>) -> Result<Poly<T>> {
    require_square(a)?;
    char_poly_hessenberg(&balance(a))
}

/// Osborne balancing: a diagonal similarity `D⁻¹AD`, `D` of powers of two,
/// that roughly equalizes the 1-norms of matching rows and columns.
pub fn balance<T: Real>(a: &CMat<T>) -> CMat<T> {
    let n = a.nrows();
    let mut b = a.clone();
    let two = lit::<T>(2.0);
    let four = lit::<T>(4.0);
    let threshold = lit::<T>(0.95);
    for _ in 0..100 {
        let mut changed = false;
        for i in 0..n {
            let mut c = T::zero();
            let mut r = T::zero();
            for j in 0..n {
                if j != i {
                    c += b[(j, i)].norm();
                    r += b[(i, j)].norm();
                }
            }
            if c == T::zero() || r == T::zero() {
                continue;
            }
            let total = c + r;
            let mut f = T::one();
            let (mut cs, mut rs) = (c, r);
            while cs < rs / two {
                cs *= four;
                rs /= four;
                f *= two;
            }
            while cs >= rs * two {
                cs /= four;
                rs *= four;
                f /= two;
            }
            if (c * f + r / f) < threshold * total {
                changed = true;
                let cf = Complex::new(f, T::zero());
                let rf = Complex::new(T::one() / f, T::zero());
                for j in 0..n {
                    b[(i, j)] *= rf;
                    b[(j, i)] *= cf;
                }
            }
        }
        if !changed {
            break;
        }
    }
    b
}

/// Hessenberg reduction followed by La Budde's recurrence on the leading
/// principal submatrices.
pub fn char_poly_hessenberg<T: Real>(a: &CMat<T>) -> Result<Poly<T>> {
    let n = require_square(a)?;
    if n == 0 {
        return Ok(Poly::one());
    }
    let h = nalgebra::linalg::Hessenberg::new(a.clone()).h();
    let s = Poly::monomial(cone::<T>(), 1);
    let mut p: Vec<Poly<T>> = Vec::with_capacity(n + 1);
    p.push(Poly::one());
    for i in 0..n {
        let mut next = &(s.clone() - Poly::constant(h[(i, i)])) * &p[i];
        let mut sub = cone::<T>();
        for k in 1..=i {
            // product of subdiagonal entries h[i−k+1..=i]
            sub *= h[(i - k + 1, i - k)];
            let c = h[(i - k, i)] * sub;
            next = next - p[i - k].scale(c);
        }
        p.push(next);
    }
    let mut coeffs = p.pop().expect("n + 1 entries").into_coeffs();
    coeffs.resize(n + 1, czero());
    coeffs[n] = cone();
    Ok(Poly::new(coeffs))
}

/// Faddeev–LeVerrier recursion: `M_k = A M_{k−1} + c_{n−k+1} I`,
/// `c_{n−k} = −tr(A M_k)/k`.
pub fn char_poly_faddeev_leverrier<T: Real>(a: &CMat<T>) -> Result<Poly<T>> {
    let n = require_square(a)?;
    let mut coeffs = vec![czero::<T>(); n + 1];
    coeffs[n] = cone();
    let mut m = CMat::<T>::zeros(n, n);
    for k in 1..=n {
        m = a * &m;
        for i in 0..n {
            m[(i, i)] += coeffs[n - k + 1];
        }
        let am = a * &m;
        let tr = am.trace();
        coeffs[n - k] = -tr / Complex::new(lit::<T>(k as f64), T::zero());
    }
    // keep the exact-degree monic representation even when low coefficients vanish
    Ok(Poly::new(coeffs))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NewtonDirection {
    CoeffsToPowerSums,
    PowerSumsToCoeffs,
}

/// Newton identities between a monic polynomial and the power sums of its roots.
///
/// * `CoeffsToPowerSums`: `input` holds the `degree + 1` ascending
///   coefficients of a monic polynomial; returns `p_1, …, p_degree`.
/// * `PowerSumsToCoeffs`: `input` holds `p_1, …, p_degree`; returns the
///   `degree + 1` ascending coefficients of the monic polynomial.
pub fn newton_convert<T: Real>(
    direction: NewtonDirection,
    input: &[Complex<T>],
    degree: usize,
) -> Result<Vec<Complex<T>>> {
    let idx = |k: usize| Complex::new(lit::<T>(k as f64), T::zero());
    match direction {
        NewtonDirection::CoeffsToPowerSums => {
            if input.len() != degree + 1 {
                return Err(Error::DegreeMismatch {
                    expected: degree + 1,
                    got: input.len(),
                });
            }
            let lead = input[degree];
            // a_j is the coefficient of s^{n−j} of the monic polynomial
            let a: Vec<Complex<T>> = (0..=degree).map(|j| input[degree - j] / lead).collect();
            let mut p = vec![czero::<T>(); degree + 1];
            for k in 1..=degree {
                let mut acc = a[k] * idx(k);
                for j in 1..k {
                    acc += a[j] * p[k - j];
                }
                p[k] = -acc;
            }
            Ok(p[1..].to_vec())
        }
        NewtonDirection::PowerSumsToCoeffs => {
            if input.len() != degree {
                return Err(Error::DegreeMismatch {
                    expected: degree,
                    got: input.len(),
                });
            }
            let mut a = vec![czero::<T>(); degree + 1];
            a[0] = cone();
            for k in 1..=degree {
                let mut acc = input[k - 1];
                for j in 1..k {
                    acc += a[j] * input[k - j - 1];
                }
                a[k] = -acc / idx(k);
            }
            Ok(a.into_iter().rev().collect())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    #[test]
    fn small_examples() {
        let z = CMat::<f64>::zeros(2, 2);
        assert_eq!(char_poly(&z).unwrap().coeffs(), &[c(0.0), c(0.0), c(1.0)]);
        let d = CMat::<f64>::from_diagonal(&nalgebra::DVector::from_vec(vec![c(1.0), c(2.0)]));
        assert_eq!(char_poly(&d).unwrap(), Poly::from_real(&[2.0, -3.0, 1.0]));
    }

    #[test]
    fn companion_matrix() {
        // s³ + 2s + 5
        let comp = CMat::<f64>::from_row_slice(3, 3, &[
            c(0.0), c(0.0), c(-5.0),
            c(1.0), c(0.0), c(-2.0),
            c(0.0), c(1.0), c(0.0),
        ]);
        let p = char_poly(&comp).unwrap();
        assert!(p.relative_distance(&Poly::from_real(&[5.0, 2.0, 0.0, 1.0])) < 1e-14);
    }

    #[test]
    fn eigenvalue_route_for_large_matrices() {
        let n = 32;
        let d = CMat::<f64>::from_fn(n, n, |i, j| if i == j { c((i % 3) as f64 * 0.1) } else { c(0.0) });
        let p = char_poly(&d).unwrap();
        assert_eq!(p.degree(), Some(n));
        assert!(p.eval(c(0.1)).norm() < 1e-12);
    }

    #[test]
    fn newton_examples() {
        let p = newton_convert(NewtonDirection::CoeffsToPowerSums, &[c(2.0), c(-3.0), c(1.0)], 2).unwrap();
        assert_eq!(p, vec![c(3.0), c(5.0)]);
        let z = newton_convert(NewtonDirection::CoeffsToPowerSums, &[c(0.0), c(0.0), c(0.0), c(1.0)], 3).unwrap();
        assert!(z.iter().all(|v| *v == c(0.0)));
        let back = newton_convert(NewtonDirection::PowerSumsToCoeffs, &[c(3.0), c(5.0)], 2).unwrap();
        assert_eq!(back, vec![c(2.0), c(-3.0), c(1.0)]);
        assert!(matches!(
            newton_convert(NewtonDirection::PowerSumsToCoeffs, &[c(3.0)], 2),
            Err(Error::DegreeMismatch { .. })
        ));
    }
}
