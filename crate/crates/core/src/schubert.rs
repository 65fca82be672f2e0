//! Bilinear forms on `C^{2m}`, annihilators, isotropy, the intersection
//! condition behind pole placement, and the feedback-law count `d_m`.

use num_bigint::BigUint;
use num_complex::Complex64;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::feedback::SkewFeedback;
use crate::matcore::{det, null_space_rows, rank, singular_values, standard_form, Tolerances};
use crate::sysreal::{transfer_eval, Realization};
use crate::CMatrix;

pub use crate::matcore::FormKind;

/// Row space of a full-rank `k × 2m` matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct PlaneBasis {
    basis: CMatrix,
}

impl PlaneBasis {
    pub fn new(basis: CMatrix, tol: &Tolerances) -> Result<Self> {
        if basis.ncols() % 2 == 1 {
            return Err(Error::OddDimension(basis.ncols()));
        }
        if basis.nrows() > 0 && rank(&basis, tol.rank_tol) != basis.nrows() {
            return Err(Error::DimensionMismatch(format!(
                "{} rows are not linearly independent",
                basis.nrows()
            )));
        }
        Ok(Self { basis })
    }

    /// Row space of `[I : F]`.
    pub fn graph(f: &CMatrix) -> Self {
        let m = f.nrows();
        let mut basis = CMatrix::zeros(m, m + f.ncols());
        basis.view_mut((0, 0), (m, m)).fill_with_identity();
        basis.view_mut((0, m), f.shape()).copy_from(f);
        Self { basis }
    }

    pub fn basis(&self) -> &CMatrix {
        &self.basis
    }

    pub fn rows(&self) -> usize {
        self.basis.nrows()
    }

    pub fn ambient(&self) -> usize {
        self.basis.ncols()
    }
}

fn form(kind: FormKind, ambient: usize) -> CMatrix {
    standard_form::<f64>(kind, ambient / 2)
}

/// `{v : vᵀ A hᵀ = 0 for every row h of H}`.
pub fn annihilator(h: &PlaneBasis, kind: FormKind, tol: &Tolerances) -> PlaneBasis {
    let a = form(kind, h.ambient());
    let pairing = h.basis() * a.transpose();
    PlaneBasis {
        basis: null_space_rows(&pairing, tol.rank_tol),
    }
}

/// Orthonormal basis of the row space, as columns.
fn orthonormal_columns(h: &CMatrix, rel_tol: f64) -> CMatrix {
    let ht = h.adjoint();
    if ht.ncols() == 0 || ht.nrows() == 0 {
        return CMatrix::zeros(ht.nrows(), 0);
    }
    let svd = ht.clone().svd(true, false);
    let u = svd.u.expect("requested");
    let top = svd.singular_values.iter().cloned().fold(0.0, f64::max);
    let keep: Vec<usize> = (0..svd.singular_values.len())
        .filter(|&i| svd.singular_values[i] > rel_tol * top)
        .collect();
    CMatrix::from_fn(ht.nrows(), keep.len(), |i, j| u[(i, keep[j])])
}

/// Sine of the largest principal angle between two row spaces; `1` when the
/// dimensions differ.
pub fn subspace_distance(h1: &PlaneBasis, h2: &PlaneBasis, tol: &Tolerances) -> f64 {
    let q1 = orthonormal_columns(h1.basis(), tol.rank_tol);
    let q2 = orthonormal_columns(h2.basis(), tol.rank_tol);
    if q1.ncols() != q2.ncols() || h1.ambient() != h2.ambient() {
        return 1.0;
    }
    if q1.ncols() == 0 {
        return 0.0;
    }
    let residual = &q2 - &q1 * (q1.adjoint() * &q2);
    singular_values(&residual).first().copied().unwrap_or(0.0).min(1.0)
}

/// `‖H A Hᵀ‖ ≤ tol · ‖H‖²`.
pub fn isotropic_check(h: &PlaneBasis, kind: FormKind, tol: f64) -> bool {
    let a = form(kind, h.ambient());
    let gram = h.basis() * a * h.basis().transpose();
    let scale = h.basis().norm();
    gram.norm() <= tol * scale * scale
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntersectionResult {
    pub meets: bool,
    /// `σ_min / σ_max` of the stacked matrix.
    pub margin: f64,
}

/// Whether `K` meets `rowspace[F : I]`: the stack `[K; F I]` is singular.
pub fn intersection_test(k: &PlaneBasis, f: &SkewFeedback, tol: f64) -> Result<IntersectionResult> {
    let m = f.m;
    if k.rows() != m || k.ambient() != 2 * m {
        return Err(Error::DimensionMismatch(format!(
            "K is {}x{}, expected {m}x{}",
            k.rows(),
            k.ambient(),
            2 * m
        )));
    }
    let mut stack = CMatrix::zeros(2 * m, 2 * m);
    stack.view_mut((0, 0), (m, 2 * m)).copy_from(k.basis());
    stack.view_mut((m, 0), (m, m)).copy_from(&f.matrix());
    stack.view_mut((m, m), (m, m)).fill_with_identity();
    let sv = singular_values(&stack);
    let top = sv[0];
    let margin = if top > 0.0 { sv[2 * m - 1] / top } else { 0.0 };
    Ok(IntersectionResult {
        meets: margin <= tol,
        margin,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeometryReport {
    pub samples: Vec<Complex64>,
    /// `|φ(s) − det(sI − A)·det[[I, G(s)], [F, I]]| / max(|φ(s)|, |rhs|)`.
    pub deviations: Vec<f64>,
    pub max_deviation: f64,
}

/// Evaluate both sides of `φ(s) = det(sI − A)·det[[I, G(s)], [F, I]]`.
pub fn geometry_identity_check(r: &Realization, f: &SkewFeedback, samples: &[Complex64]) -> Result<GeometryReport> {
    if !r.is_strictly_proper() {
        return Err(Error::NotStrictlyProper);
    }
    let n = r.n();
    let m = r.m();
    if f.m != m {
        return Err(Error::DimensionMismatch(format!("feedback m = {}, system m = {m}", f.m)));
    }
    let fm = f.matrix();
    let closed = &r.a + &r.b * &fm * &r.c;
    let id = CMatrix::identity(n, n);
    let mut deviations = Vec::with_capacity(samples.len());
    for &s in samples {
        let g = transfer_eval(r, s)?;
        let lhs = det(&(&id * s - &closed))?;
        let open = det(&(&id * s - &r.a))?;
        let mut block = CMatrix::identity(2 * m, 2 * m);
        block.view_mut((0, m), (m, m)).copy_from(&g);
        block.view_mut((m, 0), (m, m)).copy_from(&fm);
        let rhs = open * det(&block)?;
        let scale = lhs.norm().max(rhs.norm());
        deviations.push(if scale > 0.0 { (lhs - rhs).norm() / scale } else { 0.0 });
    }
    let max_deviation = deviations.iter().cloned().fold(0.0, f64::max);
    Ok(GeometryReport {
        samples: samples.to_vec(),
        deviations,
        max_deviation,
    })
}

fn factorial(k: u64) -> BigUint {
    (1..=k).fold(BigUint::one(), |acc, i| acc * i)
}

/// `d_m = C(m,2)! · 1!2!⋯(m−2)! / (1!3!5!⋯(2m−3)!)`, exactly.
pub fn dm(m: usize) -> Result<BigUint> {
    if m < 2 {
        return Err(Error::InvalidParams(format!("d_m needs m >= 2, got {m}")));
    }
    let m = m as u64;
    let mut num = factorial(m * (m - 1) / 2);
    for k in 1..=m - 2 {
        num *= factorial(k);
    }
    let mut den = BigUint::one();
    for k in 1..=m - 1 {
        den *= factorial(2 * k - 1);
    }
    if !(&num % &den).is_zero() {
        return Err(Error::InternalNonIntegral(m as usize));
    }
    Ok(num / den)
}
