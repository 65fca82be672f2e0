//! Complex dense linear algebra shared by every other module.
//!
//! Everything here is generic over the real scalar `T` (see [`Real`]); matrices
//! are `nalgebra` dense matrices of `Complex<T>`. The rest of the crate works in
//! double precision through the aliases at the crate root.

mod charpoly;
mod forms;
mod linalg;
mod pfaffian;
mod poly;
mod takagi;

pub use charpoly::{balance, char_poly, char_poly_hessenberg, char_poly_faddeev_leverrier, newton_convert, NewtonDirection};
pub use forms::{standard_form, FormKind};
pub use linalg::{
    det, inverse, is_finite, max_abs, null_space_rows, pinv, rank, relative_defect,
    singular_values, solve,
};
pub use pfaffian::pfaffian;
pub(crate) use pfaffian::pfaffian_unchecked;
pub use poly::{poly_sqrt, Poly, PolyMatrix};
pub use takagi::{takagi_skew, takagi_symmetric};

use nalgebra::{DMatrix, RealField};
use num_complex::Complex;
use num_traits::{Float, FromPrimitive};
use serde::{Deserialize, Serialize};
use std::fmt::Debug;

use crate::error::{Error, Result};

/// Real scalar the linear algebra is generic over (`f32` or `f64`).
pub trait Real:
    RealField + Float + FromPrimitive + Copy + Default + Debug + Send + Sync + 'static
{
}

impl<T> Real for T where
    T: RealField + Float + FromPrimitive + Copy + Default + Debug + Send + Sync + 'static
{
}

/// Dense complex matrix over the real scalar `T`.
pub type CMat<T> = DMatrix<Complex<T>>;

/// Lift an `f64` constant into `T`.
#[inline]
pub fn lit<T: Real>(x: f64) -> T {
    <T as FromPrimitive>::from_f64(x).expect("constant representable in T")
}

#[inline]
pub(crate) fn czero<T: Real>() -> Complex<T> {
    Complex::new(T::zero(), T::zero())
}

#[inline]
pub(crate) fn cone<T: Real>() -> Complex<T> {
    Complex::new(T::one(), T::zero())
}

/// Numerical tolerances. All of them are relative.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Relative singular-value cutoff used for every rank decision.
    pub rank_tol: f64,
    /// Relative residual accepted for factorizations and verifications.
    pub residual_tol: f64,
    /// Radius under which two feedback solutions are the same.
    pub dedupe_radius: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            rank_tol: 1e-10,
            residual_tol: 1e-8,
            dedupe_radius: 1e-6,
        }
    }
}

impl Tolerances {
    pub fn new(rank_tol: f64, residual_tol: f64, dedupe_radius: f64) -> Result<Self> {
        let tol = Self {
            rank_tol,
            residual_tol,
            dedupe_radius,
        };
        tol.validate()?;
        Ok(tol)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("rank_tol", self.rank_tol),
            ("residual_tol", self.residual_tol),
            ("dedupe_radius", self.dedupe_radius),
        ] {
            if !(v.is_finite() && v >= 0.0) {
                return Err(Error::InvalidParams(format!(
                    "{name} must be a finite nonnegative number, got {v}"
                )));
            }
        }
        Ok(())
    }
}

pub(crate) fn require_square<T: Real>(m: &CMat<T>) -> Result<usize> {
    if m.nrows() != m.ncols() {
        return Err(Error::NotSquare {
            rows: m.nrows(),
            cols: m.ncols(),
        });
    }
    Ok(m.nrows())
}
