//! State-space realizations `(A, B, C, D)`, their transfer functions
//! `G(s) = C(sI − A)⁻¹B + D`, and the four symmetry types.

mod hankel;
mod synthesis;

pub use hankel::{block_hankel, ho_kalman, markov_parameters, mcmillan_degree};
pub use synthesis::{
    kalman_transform, symmetrize, transform_group_check, GroupCheck, GroupKind,
};

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fixtures;
use crate::matcore::{is_finite, rank, relative_defect, solve, standard_form, FormKind, Tolerances};
use crate::CMatrix;

/// Transfer-function / realization symmetry.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SymmetryType {
    /// `G(s)ᵀ = G(s)`
    Symmetric,
    /// `G(s)ᵀ = G(−s)`
    Hamiltonian,
    /// `G(s)ᵀ = −G(−s)`
    SkewHamiltonian,
    /// `G(s)ᵀ = −G(s)`
    SkewSymmetric,
}

impl SymmetryType {
    pub const ALL: [SymmetryType; 4] = [
        SymmetryType::Symmetric,
        SymmetryType::Hamiltonian,
        SymmetryType::SkewHamiltonian,
        SymmetryType::SkewSymmetric,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            SymmetryType::Symmetric => "symmetric",
            SymmetryType::Hamiltonian => "hamiltonian",
            SymmetryType::SkewHamiltonian => "skew-hamiltonian",
            SymmetryType::SkewSymmetric => "skew-symmetric",
        }
    }

    /// Hamiltonian and skew-symmetric realizations live on even state spaces.
    pub fn needs_even_state(self) -> bool {
        matches!(self, SymmetryType::Hamiltonian | SymmetryType::SkewSymmetric)
    }
}

impl fmt::Display for SymmetryType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SymmetryType {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let norm = s.trim().to_ascii_lowercase().replace('_', "-");
        SymmetryType::ALL
            .into_iter()
            .find(|t| t.as_str() == norm)
            .ok_or_else(|| Error::InvalidParams(format!("unknown symmetry type '{s}'")))
    }
}

/// State-space quadruple with `A: n×n`, `B: n×m`, `C: m×n`, `D: m×m`.
#[derive(Debug, Clone, PartialEq)]
pub struct Realization {
    pub a: CMatrix,
    pub b: CMatrix,
    pub c: CMatrix,
    pub d: CMatrix,
}

impl Realization {
    pub fn new(a: CMatrix, b: CMatrix, c: CMatrix, d: CMatrix) -> Result<Self> {
        let n = a.nrows();
        let m = d.nrows();
        let ok = a.ncols() == n
            && b.shape() == (n, m)
            && c.shape() == (m, n)
            && d.ncols() == m
            && m >= 1;
        if !ok {
            return Err(Error::DimensionMismatch(format!(
                "A {:?}, B {:?}, C {:?}, D {:?}",
                a.shape(),
                b.shape(),
                c.shape(),
                d.shape()
            )));
        }
        if ![&a, &b, &c, &d].iter().all(|x| is_finite(x)) {
            return Err(Error::NonFinite);
        }
        Ok(Self { a, b, c, d })
    }

    /// `(A, B, C, 0)`.
    pub fn strictly_proper(a: CMatrix, b: CMatrix, c: CMatrix) -> Result<Self> {
        let m = b.ncols();
        Self::new(a, b, c, CMatrix::zeros(m, m))
    }

    pub fn n(&self) -> usize {
        self.a.nrows()
    }

    pub fn m(&self) -> usize {
        self.d.nrows()
    }

    pub fn is_strictly_proper(&self) -> bool {
        self.d.iter().all(|z| *z == Complex64::new(0.0, 0.0))
    }

    /// `X.(A, B, C, D) = (X⁻¹AX, X⁻¹B, CX, D)`.
    pub fn transform(&self, x: &CMatrix) -> Result<Self> {
        let xa = solve(x, &(&self.a * x))?;
        let xb = solve(x, &self.b)?;
        Self::new(xa, xb, &self.c * x, self.d.clone())
    }

    /// Congruence on inputs and outputs: `(A, B·S, S·C, S·D·S)`.
    pub fn scale_io(&self, s: &CMatrix) -> Result<Self> {
        Self::new(self.a.clone(), &self.b * s, s * &self.c, s * &self.d * s)
    }

    pub fn max_imag(&self) -> f64 {
        [&self.a, &self.b, &self.c, &self.d]
            .iter()
            .flat_map(|m| m.iter())
            .fold(0.0, |acc, z| acc.max(z.im.abs()))
    }

    /// Zero every imaginary part whose magnitude is at most `threshold`.
    pub fn real_cleanup(&mut self, threshold: f64) {
        for m in [&mut self.a, &mut self.b, &mut self.c, &mut self.d] {
            for z in m.iter_mut() {
                if z.im.abs() <= threshold {
                    z.im = 0.0;
                }
            }
        }
    }
}

/// `[B, AB, …, A^{n−1}B]`.
pub fn controllability_matrix(a: &CMatrix, b: &CMatrix) -> CMatrix {
    let n = a.nrows();
    let m = b.ncols();
    let mut out = CMatrix::zeros(n, n * m);
    let mut block = b.clone();
    for k in 0..n {
        out.columns_mut(k * m, m).copy_from(&block);
        block = a * block;
    }
    out
}

/// `[C; CA; …; CA^{n−1}]`.
pub fn observability_matrix(a: &CMatrix, c: &CMatrix) -> CMatrix {
    controllability_matrix(&a.transpose(), &c.transpose()).transpose()
}

/// Controllable and observable, ranks decided with `tol.rank_tol`.
pub fn is_minimal(r: &Realization, tol: &Tolerances) -> bool {
    let n = r.n();
    if n == 0 {
        return true;
    }
    rank(&controllability_matrix(&r.a, &r.b), tol.rank_tol) == n
        && rank(&observability_matrix(&r.a, &r.c), tol.rank_tol) == n
}

/// `G(s) = C(sI − A)⁻¹B + D`.
pub fn transfer_eval(r: &Realization, s: Complex64) -> Result<CMatrix> {
    let n = r.n();
    if n == 0 {
        return Ok(r.d.clone());
    }
    let resolvent = CMatrix::identity(n, n) * s - &r.a;
    let x = solve(&resolvent, &r.b).map_err(|e| match e {
        Error::Singular => Error::SingularAtSample(s),
        other => other,
    })?;
    Ok(&r.c * x + &r.d)
}

/// Every symmetry type whose realization identities hold within `tol`
/// (relative Frobenius defect):
///
/// * symmetric: `A = Aᵀ`, `B = Cᵀ`, `D = Dᵀ`
/// * Hamiltonian: `(AJ)ᵀ = AJ`, `JB = Cᵀ`, `D = Dᵀ`, `n` even
/// * skew-Hamiltonian: `A = −Aᵀ`, `B = Cᵀ`, `D = −Dᵀ`
/// * skew-symmetric: `(AJ)ᵀ = −AJ`, `JB = Cᵀ`, `D = −Dᵀ`, `n` even
pub fn classify_realization(r: &Realization, tol: f64) -> BTreeSet<SymmetryType> {
    let mut out = BTreeSet::new();
    let (a, b, c, d) = (&r.a, &r.b, &r.c, &r.d);
    let ok = |x: &CMatrix, y: &CMatrix| relative_defect(x, y) <= tol;
    let ct = c.transpose();
    if ok(a, &a.transpose()) && ok(b, &ct) && ok(d, &d.transpose()) {
        out.insert(SymmetryType::Symmetric);
    }
    if ok(a, &-a.transpose()) && ok(b, &ct) && ok(d, &-d.transpose()) {
        out.insert(SymmetryType::SkewHamiltonian);
    }
    let n = r.n();
    if n.is_multiple_of(2) {
        let j = standard_form::<f64>(FormKind::Symplectic, n / 2);
        let aj = a * &j;
        let jb = &j * b;
        if ok(&aj, &aj.transpose()) && ok(&jb, &ct) && ok(d, &d.transpose()) {
            out.insert(SymmetryType::Hamiltonian);
        }
        if ok(&aj, &-aj.transpose()) && ok(&jb, &ct) && ok(d, &-d.transpose()) {
            out.insert(SymmetryType::SkewSymmetric);
        }
    }
    out
}

/// Sample points standing in for "for all s" in transfer-function identities.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransferProbe {
    pub sample_points: Vec<Complex64>,
    pub tol: f64,
    /// Seed for replacement points when a sample hits a pole.
    pub seed: u64,
}

/// Attempts at replacing a sample point that lands on a pole.
const RESAMPLE_ATTEMPTS: usize = 8;

impl TransferProbe {
    /// `count` random points at the scale of `A`'s spectrum.
    pub fn random(r: &Realization, count: usize, tol: f64, seed: u64) -> Self {
        let mut rng = fixtures::rng(seed);
        let radius = probe_radius(r);
        let sample_points = (0..count).map(|_| random_point(&mut rng, radius)).collect();
        Self {
            sample_points,
            tol,
            seed,
        }
    }

    /// Evaluate `f` at every sample point, resampling points where `f`
    /// reports `SingularAtSample`.
    pub fn try_each<F>(&self, r: &Realization, mut f: F) -> Result<()>
    where
        F: FnMut(Complex64) -> Result<()>,
    {
        let mut rng = fixtures::rng(self.seed ^ 0x5e_ed0f_9a11);
        let radius = probe_radius(r);
        for &s0 in &self.sample_points {
            let mut s = s0;
            let mut attempt = 0;
            loop {
                match f(s) {
                    Ok(()) => break,
                    Err(Error::SingularAtSample(_)) if attempt < RESAMPLE_ATTEMPTS => {
                        attempt += 1;
                        s = random_point(&mut rng, radius);
                    }
                    Err(e) => return Err(e),
                }
            }
        }
        Ok(())
    }
}

fn probe_radius(r: &Realization) -> f64 {
    let n = r.n().max(1) as f64;
    (r.a.norm() / n.sqrt()).max(1.0)
}

fn random_point<R: Rng>(rng: &mut R, radius: f64) -> Complex64 {
    let rho: f64 = rng.random_range(0.5..1.5);
    let theta: f64 = rng.random_range(0.0..std::f64::consts::TAU);
    Complex64::from_polar(radius * rho, theta)
}

/// Every symmetry type whose transfer identity holds at all probe points.
pub fn classify_transfer(r: &Realization, probe: &TransferProbe) -> Result<BTreeSet<SymmetryType>> {
    let mut holds = [true; 4];
    probe.try_each(r, |s| {
        let g = transfer_eval(r, s)?;
        let g_neg = transfer_eval(r, -s)?;
        let gt = g.transpose();
        let checks = [
            relative_defect(&gt, &g),
            relative_defect(&gt, &g_neg),
            relative_defect(&gt, &-g_neg.clone()),
            relative_defect(&gt, &-g.clone()),
        ];
        for (h, d) in holds.iter_mut().zip(checks) {
            *h &= d <= probe.tol;
        }
        Ok(())
    })?;
    Ok(SymmetryType::ALL
        .into_iter()
        .zip(holds)
        .filter(|&(t, h)| h && !(t.needs_even_state() && r.n() % 2 == 1 && !is_zero_transfer(r)))
        .map(|(t, _)| t)
        .collect())
}

fn is_zero_transfer(r: &Realization) -> bool {
    r.d.norm() == 0.0 && (r.b.norm() == 0.0 || r.c.norm() == 0.0)
}

/// Largest relative deviation `‖G₁(s) − G₂(s)‖ / ‖G₁(s)‖` over the probe.
pub fn transfer_mismatch(r1: &Realization, r2: &Realization, probe: &TransferProbe) -> Result<f64> {
    let mut worst: f64 = 0.0;
    probe.try_each(r1, |s| {
        let g1 = transfer_eval(r1, s)?;
        let g2 = transfer_eval(r2, s)?;
        worst = worst.max(relative_defect(&g1, &g2));
        Ok(())
    })?;
    Ok(worst)
}

fn binom2(k: usize) -> usize {
    k * k.saturating_sub(1) / 2
}

/// Dimension of the space of `m × m` transfer functions of McMillan degree
/// `n` with the given symmetry.
pub fn moduli_dimension(ty: SymmetryType, m: usize, n: usize) -> Result<usize> {
    if ty.needs_even_state() && n % 2 == 1 {
        return Err(Error::ParityError {
            kind: ty.to_string(),
            n,
        });
    }
    Ok(match ty {
        SymmetryType::Symmetric => (m + 1) * n + binom2(m + 1),
        SymmetryType::Hamiltonian => m * n + binom2(m + 1),
        SymmetryType::SkewHamiltonian => m * n + binom2(m),
        SymmetryType::SkewSymmetric => (m - 1) * n + binom2(m),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    fn scalar(a: f64, b: f64, cc: f64, d: f64) -> Realization {
        let m = |x: f64| CMatrix::from_element(1, 1, c(x));
        Realization::new(m(a), m(b), m(cc), m(d)).unwrap()
    }

    #[test]
    fn minimality_examples() {
        let tol = Tolerances::default();
        assert!(is_minimal(&scalar(0.0, 1.0, 1.0, 0.0), &tol));
        let mut rng = fixtures::rng(3);
        let mut r = fixtures::realization(&mut rng, 4, 2, false);
        r.b = CMatrix::zeros(4, 2);
        assert!(!is_minimal(&r, &tol));
    }

    #[test]
    fn decoupled_unobservable_block() {
        let mut rng = fixtures::rng(11);
        let mut r = fixtures::realization(&mut rng, 4, 1, false);
        // A block upper triangular with the last two states invisible at the output
        for i in 2..4 {
            for j in 0..2 {
                r.a[(i, j)] = c(0.0);
            }
            r.c[(0, i)] = c(0.0);
        }
        // states 2,3 feed into nothing observable: make them unreachable from C
        for i in 0..2 {
            for j in 2..4 {
                r.a[(i, j)] = c(0.0);
            }
        }
        assert!(!is_minimal(&r, &Tolerances::default()));
    }

    #[test]
    fn transfer_examples() {
        let r = scalar(1.0, 1.0, 1.0, 0.0);
        let g = transfer_eval(&r, c(2.0)).unwrap();
        assert!((g[(0, 0)] - c(1.0)).norm() < 1e-15);
        assert!(matches!(transfer_eval(&r, c(1.0)), Err(Error::SingularAtSample(_))));
        let r = scalar(-1.0, 2.0, 3.0, 0.5);
        let g = transfer_eval(&r, c(1e8)).unwrap();
        assert!((g[(0, 0)] - c(0.5)).norm() / 0.5 < 1e-6);
    }

    #[test]
    fn realization_classes() {
        let id = CMatrix::identity(2, 2);
        let r = Realization::new(CMatrix::zeros(2, 2), id.clone(), id.clone(), CMatrix::zeros(2, 2)).unwrap();
        let cls = classify_realization(&r, 1e-12);
        assert!(cls.contains(&SymmetryType::Symmetric));
        assert!(cls.contains(&SymmetryType::SkewHamiltonian));

        let mut rng = fixtures::rng(5);
        for ty in SymmetryType::ALL {
            let r = fixtures::structured_realization(&mut rng, ty, 4, 2, true);
            assert!(classify_realization(&r, 1e-12).contains(&ty), "{ty}");
        }
        let r = fixtures::realization(&mut rng, 4, 2, true);
        assert!(classify_realization(&r, 1e-8).is_empty());
    }

    #[test]
    fn transfer_classes() {
        // G(s) = 1/s
        let r = scalar(0.0, 1.0, 1.0, 0.0);
        let probe = TransferProbe::random(&r, 10, 1e-10, 1);
        let cls = classify_transfer(&r, &probe).unwrap();
        assert!(cls.contains(&SymmetryType::Symmetric));
        assert!(cls.contains(&SymmetryType::SkewHamiltonian));
        assert!(!cls.contains(&SymmetryType::SkewSymmetric));
        assert!(!cls.contains(&SymmetryType::Hamiltonian));
    }

    #[test]
    fn realization_identities_imply_transfer_identities() {
        let mut rng = fixtures::rng(9);
        for ty in SymmetryType::ALL {
            for _ in 0..3 {
                let r = fixtures::structured_realization(&mut rng, ty, 6, 3, true);
                let probe = TransferProbe::random(&r, 10, 1e-8, 17);
                assert!(classify_transfer(&r, &probe).unwrap().contains(&ty), "{ty}");
            }
        }
    }

    #[test]
    fn moduli_examples() {
        assert_eq!(moduli_dimension(SymmetryType::Symmetric, 2, 3).unwrap(), 12);
        assert_eq!(moduli_dimension(SymmetryType::SkewSymmetric, 3, 6).unwrap(), 15);
        assert!(matches!(
            moduli_dimension(SymmetryType::SkewSymmetric, 3, 5),
            Err(Error::ParityError { .. })
        ));
    }

    #[test]
    fn moduli_match_orbit_dimension() {
        // realization space minus group dimension
        for m in 1..=10 {
            for n in 0..=10 {
                let skew_space = binom2(n) + n * m + binom2(m);
                let sym_space = binom2(n + 1) + n * m + binom2(m + 1);
                assert_eq!(
                    moduli_dimension(SymmetryType::SkewHamiltonian, m, n).unwrap(),
                    skew_space - binom2(n)
                );
                assert_eq!(
                    moduli_dimension(SymmetryType::Symmetric, m, n).unwrap(),
                    sym_space - binom2(n)
                );
                if n % 2 == 0 {
                    assert_eq!(
                        moduli_dimension(SymmetryType::SkewSymmetric, m, n).unwrap(),
                        skew_space - binom2(n + 1)
                    );
                    assert_eq!(
                        moduli_dimension(SymmetryType::Hamiltonian, m, n).unwrap(),
                        sym_space - binom2(n + 1)
                    );
                }
            }
        }
    }
}
