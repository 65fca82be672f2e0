//! State-space equivalence and symmetry-respecting realizations.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{
    classify_realization, classify_transfer, controllability_matrix, is_minimal, transfer_mismatch,
    Realization, SymmetryType, TransferProbe,
};
use crate::error::{Error, Result};
use crate::matcore::{
    inverse, pinv, rank, relative_defect, standard_form, takagi_skew, takagi_symmetric, FormKind,
    Tolerances,
};
use crate::CMatrix;

/// Probe points used for transfer-function checks inside [`symmetrize`].
pub const PROBE_POINTS: usize = 10;

/// `Ctrb(A, B)` with block `k` divided by `ρ^k`.
fn scaled_ctrb(a: &CMatrix, b: &CMatrix, rho: f64) -> CMatrix {
    let a = a * Complex64::new(1.0 / rho, 0.0);
    controllability_matrix(&a, b)
}

/// The unique `X` with `X⁻¹A₁X = A₂`, `X⁻¹B₁ = B₂`, `C₁X = C₂`, `D₁ = D₂`.
///
/// Solved from `X·Ctrb(A₂, B₂) = Ctrb(A₁, B₁)` by least squares, then checked
/// on all four identities against `tol.residual_tol`.
pub fn kalman_transform(r1: &Realization, r2: &Realization, tol: &Tolerances) -> Result<CMatrix> {
    if r1.n() != r2.n() || r1.m() != r2.m() {
        return Err(Error::DimensionMismatch(format!(
            "(n, m) = ({}, {}) vs ({}, {})",
            r1.n(),
            r1.m(),
            r2.n(),
            r2.m()
        )));
    }
    let n = r1.n();
    if n == 0 {
        let d = relative_defect(&r1.d, &r2.d);
        return if d <= tol.residual_tol {
            Ok(CMatrix::zeros(0, 0))
        } else {
            Err(Error::NotEquivalent(d))
        };
    }
    if !is_minimal(r1, tol) || !is_minimal(r2, tol) {
        return Err(Error::NotMinimal);
    }
    // similar matrices: one scale serves both sides
    let rho = (r2.a.norm() / (n as f64).sqrt()).max(1.0);
    let k1 = scaled_ctrb(&r1.a, &r1.b, rho);
    let k2 = scaled_ctrb(&r2.a, &r2.b, rho);
    if rank(&k2, tol.rank_tol) < n {
        return Err(Error::NotMinimal);
    }
    let x = k1 * pinv(&k2, tol.rank_tol);
    let worst = equivalence_defect(r1, r2, &x)?;
    if worst > tol.residual_tol {
        return Err(Error::NotEquivalent(worst));
    }
    Ok(x)
}

/// Largest relative defect among the four equivalence identities.
fn equivalence_defect(r1: &Realization, r2: &Realization, x: &CMatrix) -> Result<f64> {
    let xi = inverse(x).map_err(|_| Error::NotEquivalent(f64::INFINITY))?;
    let defects = [
        relative_defect(&(&xi * &r1.a * x), &r2.a),
        relative_defect(&(&xi * &r1.b), &r2.b),
        relative_defect(&(&r1.c * x), &r2.c),
        relative_defect(&r1.d, &r2.d),
    ];
    Ok(defects.into_iter().fold(0.0, f64::max))
}

/// Realization of the same transfer function obtained from the symmetry
/// identity by transposition.
fn companion(r: &Realization, ty: SymmetryType) -> Result<Realization> {
    let (a, b, c, d) = (&r.a, &r.b, &r.c, &r.d);
    let (at, bt, ct, dt) = (a.transpose(), b.transpose(), c.transpose(), d.transpose());
    match ty {
        SymmetryType::Symmetric => Realization::new(at, ct, bt, dt),
        SymmetryType::SkewHamiltonian => Realization::new(-at, ct, bt, -dt),
        SymmetryType::Hamiltonian => Realization::new(-at, -ct, bt, dt),
        SymmetryType::SkewSymmetric => Realization::new(at, -ct, bt, -dt),
    }
}

/// Replace each structured block by its exact projection.
fn project(r: &Realization, ty: SymmetryType) -> Result<Realization> {
    let half = Complex64::new(0.5, 0.0);
    let sym = |m: &CMatrix| (m + m.transpose()) * half;
    let skew = |m: &CMatrix| (m - m.transpose()) * half;
    let n = r.n();
    match ty {
        SymmetryType::Symmetric | SymmetryType::SkewHamiltonian => {
            let b = (&r.b + r.c.transpose()) * half;
            let (a, d) = if ty == SymmetryType::Symmetric {
                (sym(&r.a), sym(&r.d))
            } else {
                (skew(&r.a), skew(&r.d))
            };
            let c = b.transpose();
            Realization::new(a, b, c, d)
        }
        SymmetryType::Hamiltonian | SymmetryType::SkewSymmetric => {
            let j = standard_form::<f64>(FormKind::Symplectic, n / 2);
            // JB = Cᵀ  <=>  B = −J Cᵀ
            let b = (&r.b - &j * r.c.transpose()) * half;
            let c = (&j * &b).transpose();
            let aj = &r.a * &j;
            let (aj, d) = if ty == SymmetryType::Hamiltonian {
                (sym(&aj), sym(&r.d))
            } else {
                (skew(&aj), skew(&r.d))
            };
            // A = (AJ)·J⁻¹ = −(AJ)·J
            Realization::new(-aj * &j, b, c, d)
        }
    }
}

/// Equivalent realization `(YAY⁻¹, YB, CY⁻¹, D)` that carries the structural
/// identities of `target`.
///
/// `seed` drives the probe points of the pre- and postcondition checks.
pub fn symmetrize(r: &Realization, target: SymmetryType, tol: &Tolerances, seed: u64) -> Result<Realization> {
    let n = r.n();
    if target.needs_even_state() && n % 2 == 1 {
        return Err(Error::SymmetryMismatch(format!("{target} realizations need even n, got {n}")));
    }
    let probe = TransferProbe::random(r, PROBE_POINTS, tol.residual_tol, seed);
    if !classify_transfer(r, &probe)?.contains(&target) {
        return Err(Error::SymmetryMismatch(format!("transfer function is not {target}")));
    }
    let y = if n == 0 {
        CMatrix::zeros(0, 0)
    } else {
        if !is_minimal(r, tol) {
            return Err(Error::NotMinimal);
        }
        let x = kalman_transform(r, &companion(r, target)?, tol)?;
        let xi = inverse(&x)?;
        // X⁻¹ = YᵀY (resp. −YᵀJY) puts (YAY⁻¹, YB, CY⁻¹) in structured form
        match target {
            SymmetryType::Symmetric | SymmetryType::SkewHamiltonian => takagi_symmetric(&xi, tol)?,
            SymmetryType::Hamiltonian | SymmetryType::SkewSymmetric => takagi_skew(&-xi, tol)?,
        }
    };
    let out = if n == 0 {
        r.clone()
    } else {
        let yi = inverse(&y)?;
        Realization::new(&y * &r.a * &yi, &y * &r.b, &r.c * &yi, r.d.clone())?
    };
    if !classify_realization(&out, tol.residual_tol).contains(&target) {
        return Err(Error::VerificationFailed(format!(
            "output realization does not satisfy the {target} identities"
        )));
    }
    let out = project(&out, target)?;
    let mismatch = transfer_mismatch(r, &out, &probe)?;
    if mismatch > tol.residual_tol {
        return Err(Error::VerificationFailed(format!(
            "transfer function moved by {mismatch:.3e}"
        )));
    }
    Ok(out)
}

/// Group a state-space equivalence falls in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GroupKind {
    Orthogonal,
    Symplectic,
    Neither,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupCheck {
    pub kind: GroupKind,
    /// `‖XᵀX − I‖ / ‖I‖`
    pub orthogonal_defect: f64,
    /// `‖XᵀJX − J‖ / ‖J‖`, infinite for odd `n`.
    pub symplectic_defect: f64,
}

/// Classify the equivalence `X` between two realizations as orthogonal or
/// symplectic. When both hold, the group expected for `target` is reported.
pub fn transform_group_check(
    r1: &Realization,
    r2: &Realization,
    target: SymmetryType,
    tol: &Tolerances,
) -> Result<GroupCheck> {
    let x = kalman_transform(r1, r2, tol)?;
    let n = x.nrows();
    let id = CMatrix::identity(n, n);
    let xt = x.transpose();
    let orthogonal_defect = relative_defect(&(&xt * &x), &id);
    let symplectic_defect = if n % 2 == 0 {
        let j = standard_form::<f64>(FormKind::Symplectic, n / 2);
        relative_defect(&(&xt * &j * &x), &j)
    } else {
        f64::INFINITY
    };
    let orth = orthogonal_defect <= tol.residual_tol;
    let symp = symplectic_defect <= tol.residual_tol;
    let kind = match (orth, symp) {
        (true, true) if target.needs_even_state() => GroupKind::Symplectic,
        (true, _) => GroupKind::Orthogonal,
        (false, true) => GroupKind::Symplectic,
        (false, false) => GroupKind::Neither,
    };
    Ok(GroupCheck {
        kind,
        orthogonal_defect,
        symplectic_defect,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    fn scalar(a: f64, b: f64, c: f64) -> Realization {
        let m = |x: f64| CMatrix::from_element(1, 1, Complex64::new(x, 0.0));
        Realization::new(m(a), m(b), m(c), m(0.0)).unwrap()
    }

    #[test]
    fn scalar_transform() {
        let tol = Tolerances::default();
        let x = kalman_transform(&scalar(-1.0, 1.0, 3.0), &scalar(-1.0, 2.0, 1.5), &tol).unwrap();
        assert!((x[(0, 0)] - Complex64::new(0.5, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn recovers_known_transform() {
        let mut rng = fixtures::rng(31);
        let tol = Tolerances::default();
        let r1 = fixtures::realization(&mut rng, 5, 2, true);
        let x0 = fixtures::invertible(&mut rng, 5);
        let r2 = r1.transform(&x0).unwrap();
        let x = kalman_transform(&r1, &r2, &tol).unwrap();
        assert!(relative_defect(&x, &x0) < 1e-8);
        let id = kalman_transform(&r1, &r1, &tol).unwrap();
        assert!(relative_defect(&id, &CMatrix::identity(5, 5)) < 1e-10);
    }

    #[test]
    fn inequivalent_systems_rejected() {
        let mut rng = fixtures::rng(32);
        let tol = Tolerances::default();
        let r1 = fixtures::realization(&mut rng, 3, 1, false);
        let r2 = fixtures::realization(&mut rng, 3, 1, false);
        assert!(matches!(kalman_transform(&r1, &r2, &tol), Err(Error::NotEquivalent(_))));
    }

    #[test]
    fn symmetrize_round_trips() {
        let tol = Tolerances::default();
        let mut rng = fixtures::rng(33);
        for ty in SymmetryType::ALL {
            for trial in 0..3 {
                let base = fixtures::structured_realization(&mut rng, ty, 6, 3, trial % 2 == 0);
                let x0 = fixtures::invertible(&mut rng, 6);
                let scrambled = base.transform(&x0).unwrap();
                let out = symmetrize(&scrambled, ty, &tol, 7).unwrap();
                assert!(classify_realization(&out, 1e-12).contains(&ty), "{ty}");
            }
        }
    }

    #[test]
    fn symmetrize_rejects_wrong_target() {
        let tol = Tolerances::default();
        let mut rng = fixtures::rng(34);
        let r = fixtures::structured_realization(&mut rng, SymmetryType::SkewSymmetric, 4, 2, false);
        assert!(matches!(
            symmetrize(&r, SymmetryType::Symmetric, &tol, 1),
            Err(Error::SymmetryMismatch(_))
        ));
    }

    #[test]
    fn group_of_equivalence() {
        let tol = Tolerances::default();
        let mut rng = fixtures::rng(35);
        let r = fixtures::structured_realization(&mut rng, SymmetryType::SkewHamiltonian, 4, 2, false);
        let q = fixtures::orthogonal(&mut rng, 4);
        let g = transform_group_check(&r, &r.transform(&q).unwrap(), SymmetryType::SkewHamiltonian, &tol).unwrap();
        assert_eq!(g.kind, GroupKind::Orthogonal);

        let r = fixtures::structured_realization(&mut rng, SymmetryType::SkewSymmetric, 4, 2, false);
        let s = fixtures::symplectic(&mut rng, 4);
        let g = transform_group_check(&r, &r.transform(&s).unwrap(), SymmetryType::SkewSymmetric, &tol).unwrap();
        assert_eq!(g.kind, GroupKind::Symplectic);
    }
}
