//! Static skew-symmetric output feedback `u = F y`, `Fᵀ = −F`.
//!
//! Two system classes are handled: skew-symmetric realizations (closed-loop
//! characteristic polynomial is a square, `n/2` placeable poles) and
//! skew-Hamiltonian ones (roots come in `±λ` pairs, `⌊n/2⌋` placeable pairs).

mod solver;

pub use solver::{place_poles, place_poles_with, SolutionSet, SolverOptions, DEFAULT_SEED};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matcore::{char_poly, poly_sqrt, standard_form, FormKind, Tolerances};
use crate::sysreal::{classify_realization, Realization, SymmetryType};
use crate::{CMatrix, Poly};

/// Number of unordered pairs, `C(k, 2)`.
pub fn pairs(k: usize) -> usize {
    k * k.saturating_sub(1) / 2
}

/// Pairs `(i, j)`, `i < j`, in coordinate order.
pub fn pair_index(m: usize) -> Vec<(usize, usize)> {
    (0..m).flat_map(|i| (i + 1..m).map(move |j| (i, j))).collect()
}

/// Skew-symmetric `m × m` feedback in the basis `e_i ∧ e_j = E_ij − E_ji`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SkewFeedback {
    pub m: usize,
    pub coords: Vec<Complex64>,
}

impl SkewFeedback {
    pub fn new(m: usize, coords: Vec<Complex64>) -> Result<Self> {
        if coords.len() != pairs(m) {
            return Err(Error::DimensionMismatch(format!(
                "m = {m} needs {} coordinates, got {}",
                pairs(m),
                coords.len()
            )));
        }
        if coords.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Self { m, coords })
    }

    pub fn zero(m: usize) -> Self {
        Self {
            m,
            coords: vec![Complex64::new(0.0, 0.0); pairs(m)],
        }
    }

    /// Single basis element `h · e_i ∧ e_j`.
    pub fn basis(m: usize, i: usize, j: usize, h: Complex64) -> Self {
        let mut f = Self::zero(m);
        let k = pair_index(m)
            .iter()
            .position(|&p| p == (i.min(j), i.max(j)))
            .expect("i != j and both below m");
        f.coords[k] = if i < j { h } else { -h };
        f
    }

    /// Read the strict upper triangle of a skew-symmetric matrix.
    pub fn from_matrix(f: &CMatrix, tol: &Tolerances) -> Result<Self> {
        if f.nrows() != f.ncols() {
            return Err(Error::NotSquare {
                rows: f.nrows(),
                cols: f.ncols(),
            });
        }
        let scale = f.norm();
        let defect = (f + f.transpose()).norm();
        if defect > tol.rank_tol * scale {
            return Err(Error::NotSkewSymmetric(defect / scale));
        }
        let m = f.nrows();
        Self::new(m, pair_index(m).into_iter().map(|(i, j)| f[(i, j)]).collect())
    }

    pub fn matrix(&self) -> CMatrix {
        let mut f = CMatrix::zeros(self.m, self.m);
        for ((i, j), &x) in pair_index(self.m).into_iter().zip(&self.coords) {
            f[(i, j)] = x;
            f[(j, i)] = -x;
        }
        f
    }

    pub fn max_imag(&self) -> f64 {
        self.coords.iter().fold(0.0, |acc, z| acc.max(z.im.abs()))
    }

    pub fn norm_inf(&self) -> f64 {
        self.coords.iter().fold(0.0, |acc, z| acc.max(z.norm()))
    }
}

/// The two system classes with skew-symmetric feedback.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Variant {
    SkewSymmetric,
    SkewHamiltonian,
}

impl Variant {
    pub fn symmetry(self) -> SymmetryType {
        match self {
            Variant::SkewSymmetric => SymmetryType::SkewSymmetric,
            Variant::SkewHamiltonian => SymmetryType::SkewHamiltonian,
        }
    }

    /// Placeable poles (resp. pole pairs) for state dimension `n`.
    pub fn ell(self, n: usize) -> Result<usize> {
        match self {
            Variant::SkewSymmetric if n % 2 == 1 => Err(Error::ParityError {
                kind: "skew-symmetric".into(),
                n,
            }),
            _ => Ok(n / 2),
        }
    }

    /// The closed-loop characteristic polynomial expected for `poles`.
    pub fn target_poly(self, n: usize, poles: &[Complex64]) -> Poly {
        let x = Complex64::new(1.0, 0.0);
        match self {
            Variant::SkewSymmetric => {
                let q = Poly::from_roots(poles);
                &q * &q
            }
            Variant::SkewHamiltonian => {
                let mut p = if n % 2 == 1 {
                    Poly::monomial(x, 1)
                } else {
                    Poly::one()
                };
                for &s in poles {
                    p = p * Poly::new(vec![-s * s, Complex64::new(0.0, 0.0), x]);
                }
                p
            }
        }
    }
}

impl std::fmt::Display for Variant {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Variant::SkewSymmetric => "skew-symmetric",
            Variant::SkewHamiltonian => "skew-hamiltonian",
        })
    }
}

impl std::str::FromStr for Variant {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().replace('_', "-").as_str() {
            "skew-symmetric" => Ok(Variant::SkewSymmetric),
            "skew-hamiltonian" => Ok(Variant::SkewHamiltonian),
            _ => Err(Error::InvalidParams(format!("unknown variant '{s}'"))),
        }
    }
}

/// Relative tolerance under which two parameters count as equal.
const COINCIDENCE: f64 = 1e-12;

fn coincide(a: Complex64, b: Complex64) -> bool {
    (a - b).norm() <= COINCIDENCE * a.norm().max(b.norm()).max(1.0)
}

fn all_distinct(xs: &[Complex64]) -> bool {
    xs.iter()
        .enumerate()
        .all(|(k, &a)| xs[k + 1..].iter().all(|&b| !coincide(a, b)))
}

/// A pole-placement instance.
#[derive(Debug, Clone, PartialEq)]
pub struct FeedbackProblem {
    pub system: Realization,
    pub variant: Variant,
    pub ell: usize,
    pub target_poles: Vec<Complex64>,
}

impl FeedbackProblem {
    pub fn new(system: Realization, variant: Variant, target_poles: Vec<Complex64>, tol: &Tolerances) -> Result<Self> {
        if !system.is_strictly_proper() {
            return Err(Error::NotStrictlyProper);
        }
        let ell = variant.ell(system.n())?;
        if target_poles.len() != ell {
            return Err(Error::DegreeMismatch {
                expected: ell,
                got: target_poles.len(),
            });
        }
        if target_poles.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite);
        }
        if !all_distinct(&target_poles) {
            return Err(Error::InvalidParams("target poles must be distinct".into()));
        }
        if variant == Variant::SkewHamiltonian {
            let squares: Vec<Complex64> = target_poles.iter().map(|s| s * s).collect();
            if !all_distinct(&squares) || squares.iter().any(|q| q.norm() == 0.0) {
                return Err(Error::InvalidParams(
                    "skew-Hamiltonian targets must be nonzero with distinct squares".into(),
                ));
            }
        }
        if !classify_realization(&system, tol.residual_tol).contains(&variant.symmetry()) {
            return Err(Error::SymmetryMismatch(format!("system is not realized as {variant}")));
        }
        Ok(Self {
            system,
            variant,
            ell,
            target_poles,
        })
    }

    pub fn target_poly(&self) -> Poly {
        self.variant.target_poly(self.system.n(), &self.target_poles)
    }
}

fn check_feedback(r: &Realization, f: &SkewFeedback) -> Result<()> {
    if f.m != r.m() {
        return Err(Error::DimensionMismatch(format!(
            "feedback is {}x{}, system has m = {}",
            f.m,
            f.m,
            r.m()
        )));
    }
    Ok(())
}

/// `A + BFC`.
pub fn closed_loop_matrix(r: &Realization, f: &SkewFeedback) -> Result<CMatrix> {
    check_feedback(r, f)?;
    Ok(&r.a + &r.b * f.matrix() * &r.c)
}

/// `φ(s) = det(sI − (A + BFC))`.
pub fn closed_loop_charpoly(r: &Realization, f: &SkewFeedback) -> Result<Poly> {
    if !r.is_strictly_proper() {
        return Err(Error::NotStrictlyProper);
    }
    char_poly(&closed_loop_matrix(r, f)?)
}

fn check_ab(a: &CMatrix, b: &CMatrix, f_m: Option<usize>, variant: Variant) -> Result<usize> {
    let n = a.nrows();
    if a.ncols() != n || b.nrows() != n {
        return Err(Error::DimensionMismatch(format!(
            "A {:?}, B {:?}",
            a.shape(),
            b.shape()
        )));
    }
    if let Some(m) = f_m {
        if m != b.ncols() {
            return Err(Error::DimensionMismatch(format!("feedback m = {m}, B has {} columns", b.ncols())));
        }
    }
    if variant == Variant::SkewSymmetric && n % 2 == 1 {
        return Err(Error::ParityError {
            kind: variant.to_string(),
            n,
        });
    }
    Ok(n)
}

/// Closed-loop matrix in terms of `B` alone: `A + BFBᵀJ` or `A + BFBᵀ`.
fn psi_matrix(a: &CMatrix, b: &CMatrix, f: &SkewFeedback, variant: Variant) -> CMatrix {
    let bfb = b * f.matrix() * b.transpose();
    match variant {
        Variant::SkewSymmetric => a + bfb * standard_form::<f64>(FormKind::Symplectic, a.nrows() / 2),
        Variant::SkewHamiltonian => a + bfb,
    }
}

/// Power sums of the closed-loop spectrum: `tr Mᵏ`, `k = 1..ℓ`
/// (skew-symmetric) or `tr M²ᵏ` (skew-Hamiltonian, odd traces vanish).
pub fn psi_map(a: &CMatrix, b: &CMatrix, f: &SkewFeedback, ell: usize, variant: Variant) -> Result<Vec<Complex64>> {
    check_ab(a, b, Some(f.m), variant)?;
    let m = psi_matrix(a, b, f, variant);
    let step = match variant {
        Variant::SkewSymmetric => m.clone(),
        Variant::SkewHamiltonian => &m * &m,
    };
    let mut power = step.clone();
    let mut out = Vec::with_capacity(ell);
    for _ in 0..ell {
        out.push(power.trace());
        power = &power * &step;
    }
    Ok(out)
}

/// Differential of [`psi_map`] at `F = 0`; column `(i, j)` is the image of
/// `e_i ∧ e_j`, which `B` sends to `b_i ∧ b_j = b_i b_jᵀ − b_j b_iᵀ`.
pub fn dpsi0(a: &CMatrix, b: &CMatrix, ell: usize, variant: Variant) -> Result<CMatrix> {
    let n = check_ab(a, b, None, variant)?;
    let m = b.ncols();
    let idx = pair_index(m);
    let mut out = CMatrix::zeros(ell, idx.len());
    // P_k = A^{k−1} (skew-symmetric) or A^{2k−1} (skew-Hamiltonian), premultiplied by J when needed
    let (mut power, step) = match variant {
        Variant::SkewSymmetric => (CMatrix::identity(n, n), a.clone()),
        Variant::SkewHamiltonian => (a.clone(), a * a),
    };
    let j = (variant == Variant::SkewSymmetric && n > 0)
        .then(|| standard_form::<f64>(FormKind::Symplectic, n / 2));
    for k in 1..=ell {
        let p = match &j {
            Some(j) => j * &power,
            None => power.clone(),
        };
        let pb = &p * b;
        let factor = match variant {
            Variant::SkewSymmetric => k as f64,
            Variant::SkewHamiltonian => 2.0 * k as f64,
        };
        for (col, &(bi, bj)) in idx.iter().enumerate() {
            // tr(P (b_i b_jᵀ − b_j b_iᵀ)) = b_jᵀ P b_i − b_iᵀ P b_j
            let t = b.column(bj).dot(&pb.column(bi)) - b.column(bi).dot(&pb.column(bj));
            out[(k - 1, col)] = t * factor;
        }
        power = &power * &step;
    }
    Ok(out)
}

/// Parameters of the generic witness systems.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenericParams {
    pub alphas: Vec<Complex64>,
    pub betas: Vec<Complex64>,
}

impl GenericParams {
    /// `α = (1, …, ℓ)` and `β` the first `m` primes.
    pub fn standard(m: usize, ell: usize) -> Self {
        let mut primes = Vec::with_capacity(m);
        let mut k = 2u64;
        while primes.len() < m {
            if (2..k).take_while(|d| d * d <= k).all(|d| !k.is_multiple_of(d)) {
                primes.push(k);
            }
            k += 1;
        }
        Self {
            alphas: (1..=ell).map(|a| Complex64::new(a as f64, 0.0)).collect(),
            betas: primes.into_iter().map(|p| Complex64::new(p as f64, 0.0)).collect(),
        }
    }

    /// The skew-Hamiltonian differential is a Vandermonde matrix in `α²`
    /// weighted by `α`, so that variant also needs the `α²` distinct and
    /// nonzero.
    pub fn validate(&self, m: usize, ell: usize, variant: Variant) -> Result<()> {
        if self.alphas.len() != ell || self.betas.len() != m {
            return Err(Error::InvalidParams(format!(
                "need {ell} alphas and {m} betas, got {} and {}",
                self.alphas.len(),
                self.betas.len()
            )));
        }
        if !all_distinct(&self.alphas) {
            return Err(Error::InvalidParams("alphas must be distinct".into()));
        }
        if variant == Variant::SkewHamiltonian {
            let squares: Vec<Complex64> = self.alphas.iter().map(|a| a * a).collect();
            if !all_distinct(&squares) || squares.iter().any(|&q| coincide(q, Complex64::new(0.0, 0.0))) {
                return Err(Error::InvalidParams("alpha squares must be distinct and nonzero".into()));
            }
        }
        let products: Vec<Complex64> = pair_index(m)
            .into_iter()
            .map(|(i, j)| self.betas[i] * self.betas[j])
            .collect();
        if !all_distinct(&products) {
            return Err(Error::InvalidParams("products beta_i beta_j must be distinct".into()));
        }
        let powers: Vec<Complex64> = self.betas.iter().map(|b| b.powu(ell as u32)).collect();
        if !all_distinct(&powers) {
            return Err(Error::InvalidParams(format!("powers beta_i^{ell} must be distinct")));
        }
        Ok(())
    }
}

/// Witness system with `A` built from `D = diag(α)` and a Vandermonde-type `B`
/// (`B_ij = β_j^i`).
///
/// Skew-symmetric: `A = diag(D, D)`, `C = (JB)ᵀ`. Skew-Hamiltonian:
/// `A = [[0, D], [−D, 0]]`, `C = Bᵀ`; odd `n` adds a zero first row and
/// column to `A` and a first row `β_j^{2ℓ}` to `B`.
pub fn generic_system(m: usize, n: usize, variant: Variant, params: &GenericParams) -> Result<Realization> {
    if m == 0 {
        return Err(Error::InvalidParams("m must be positive".into()));
    }
    let ell = variant.ell(n)?;
    params.validate(m, ell, variant)?;
    let odd = n % 2 == 1;
    let off = usize::from(odd);
    let mut a = CMatrix::zeros(n, n);
    for (k, &alpha) in params.alphas.iter().enumerate() {
        match variant {
            Variant::SkewSymmetric => {
                a[(k, k)] = alpha;
                a[(ell + k, ell + k)] = alpha;
            }
            Variant::SkewHamiltonian => {
                a[(off + k, off + ell + k)] = alpha;
                a[(off + ell + k, off + k)] = -alpha;
            }
        }
    }
    let mut b = CMatrix::zeros(n, m);
    for (j, &beta) in params.betas.iter().enumerate() {
        if odd {
            b[(0, j)] = beta.powu(2 * ell as u32);
        }
        for i in 0..2 * ell {
            b[(off + i, j)] = beta.powu(i as u32);
        }
    }
    let c = match variant {
        Variant::SkewSymmetric => (standard_form::<f64>(FormKind::Symplectic, ell) * &b).transpose(),
        Variant::SkewHamiltonian => b.transpose(),
    };
    Realization::strictly_proper(a, b, c)
}

/// Closed-loop structure figures from [`verify_structure`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StructureReport {
    pub variant: Variant,
    /// Defect of the closed-loop matrix identity relative to `‖A‖ + ‖B‖‖F‖‖C‖`.
    pub closed_loop_defect: f64,
    /// `‖φ − q²‖ / ‖φ‖` (skew-symmetric) or `‖φ(s) − (−1)ⁿφ(−s)‖ / ‖φ‖`.
    pub charpoly_defect: f64,
}

/// Check that feedback preserves the realization structure: `(A+BFC)J` stays
/// skew with square `φ`, or `A+BFC` stays skew with `φ(s) = (−1)ⁿφ(−s)`.
pub fn verify_structure(r: &Realization, f: &SkewFeedback, variant: Variant, tol: &Tolerances) -> Result<StructureReport> {
    let n = r.n();
    let m = closed_loop_matrix(r, f)?;
    let phi = closed_loop_charpoly(r, f)?;
    // measured against the ingredients, since A + BFC itself may vanish
    let scale = (r.a.norm() + r.b.norm() * f.matrix().norm() * r.c.norm()).max(f64::MIN_POSITIVE);
    let (closed_loop_defect, charpoly_defect) = match variant {
        Variant::SkewSymmetric => {
            variant.ell(n)?;
            let mj = &m * standard_form::<f64>(FormKind::Symplectic, n / 2);
            let defect = (mj.transpose() + &mj).norm() / scale;
            let root = poly_sqrt(&phi, tol).map_err(|e| {
                Error::StructureViolated(format!("closed-loop characteristic polynomial is not a square: {e}"))
            })?;
            (defect, phi.relative_distance(&(&root * &root)))
        }
        Variant::SkewHamiltonian => {
            let defect = (m.transpose() + &m).norm() / scale;
            let mirrored = if n % 2 == 1 { -phi.reflect() } else { phi.reflect() };
            (defect, phi.relative_distance(&mirrored))
        }
    };
    if closed_loop_defect > tol.residual_tol {
        return Err(Error::StructureViolated(format!(
            "closed-loop matrix identity off by {closed_loop_defect:.3e}"
        )));
    }
    if charpoly_defect > tol.residual_tol {
        return Err(Error::StructureViolated(format!(
            "characteristic polynomial identity off by {charpoly_defect:.3e}"
        )));
    }
    Ok(StructureReport {
        variant,
        closed_loop_defect,
        charpoly_defect,
    })
}
