//! Seeded random matrices and structured realizations.
//!
//! Used by the test suites, the acceptance harness and the CLI's example
//! generators; everything is driven by an explicit RNG so runs reproduce.

use num_complex::Complex64;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::matcore::{inverse, singular_values, standard_form, FormKind};
use crate::sysreal::{Realization, SymmetryType};
use crate::CMatrix;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Standard complex Gaussian (`E|z|² = 1`).
pub fn complex_normal<R: Rng>(rng: &mut R) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

pub fn complex_matrix<R: Rng>(rng: &mut R, rows: usize, cols: usize) -> CMatrix {
    CMatrix::from_fn(rows, cols, |_, _| complex_normal(rng))
}

pub fn real_matrix<R: Rng>(rng: &mut R, rows: usize, cols: usize) -> CMatrix {
    CMatrix::from_fn(rows, cols, |_, _| {
        let x: f64 = rng.sample(StandardNormal);
        Complex64::new(x, 0.0)
    })
}

pub fn symmetric_matrix<R: Rng>(rng: &mut R, n: usize) -> CMatrix {
    let g = complex_matrix(rng, n, n);
    (&g + g.transpose()) * Complex64::new(0.5, 0.0)
}

pub fn skew_matrix<R: Rng>(rng: &mut R, n: usize) -> CMatrix {
    let g = complex_matrix(rng, n, n);
    (&g - g.transpose()) * Complex64::new(0.5, 0.0)
}

pub fn condition_number(m: &CMatrix) -> f64 {
    let sv = singular_values(m);
    match (sv.first(), sv.last()) {
        (Some(&hi), Some(&lo)) if lo > 0.0 => hi / lo,
        (None, None) => 1.0,
        _ => f64::INFINITY,
    }
}

/// Random invertible matrix with condition number below `1e3`.
pub fn invertible<R: Rng>(rng: &mut R, n: usize) -> CMatrix {
    loop {
        let x = complex_matrix(rng, n, n);
        if condition_number(&x) < 1e3 {
            return x;
        }
    }
}

/// Complex orthogonal matrix (`QᵀQ = I`) via the Cayley transform of a
/// skew-symmetric matrix.
pub fn orthogonal<R: Rng>(rng: &mut R, n: usize) -> CMatrix {
    let id = CMatrix::identity(n, n);
    loop {
        let k = skew_matrix(rng, n) * Complex64::new(0.5, 0.0);
        if let Ok(inv) = inverse(&(&id + &k)) {
            let q = (&id - &k) * inv;
            if condition_number(&q) < 1e3 {
                return q;
            }
        }
    }
}

/// Complex symplectic matrix (`SᵀJS = J`) via the Cayley transform of a
/// Hamiltonian matrix.
pub fn symplectic<R: Rng>(rng: &mut R, n: usize) -> CMatrix {
    assert!(n.is_multiple_of(2), "symplectic matrices need even size");
    let id = CMatrix::identity(n, n);
    let j = standard_form::<f64>(FormKind::Symplectic, n / 2);
    loop {
        // H J symmetric  <=>  H = S J⁻¹ = −S J
        let h = -(symmetric_matrix(rng, n) * Complex64::new(0.5, 0.0)) * &j;
        if let Ok(inv) = inverse(&(&id - &h)) {
            let s = (&id + &h) * inv;
            if condition_number(&s) < 1e3 {
                return s;
            }
        }
    }
}

/// Random realization satisfying the structural identities of `ty`.
///
/// `proper` adds a feedthrough term of the matching symmetry; otherwise
/// `D = 0`. `n` must be even for the Hamiltonian and skew-symmetric types.
pub fn structured_realization<R: Rng>(
    rng: &mut R,
    ty: SymmetryType,
    n: usize,
    m: usize,
    proper: bool,
) -> Realization {
    let b = complex_matrix(rng, n, m);
    let half = Complex64::new(0.5, 0.0);
    let (a, c, d) = match ty {
        SymmetryType::Symmetric => {
            let a = symmetric_matrix(rng, n);
            (a, b.transpose(), symmetric_matrix(rng, m))
        }
        SymmetryType::SkewHamiltonian => {
            let a = skew_matrix(rng, n);
            (a, b.transpose(), skew_matrix(rng, m))
        }
        SymmetryType::Hamiltonian => {
            let j = standard_form::<f64>(FormKind::Symplectic, n / 2);
            let a = -symmetric_matrix(rng, n) * &j;
            (a, (&j * &b).transpose(), symmetric_matrix(rng, m))
        }
        SymmetryType::SkewSymmetric => {
            let j = standard_form::<f64>(FormKind::Symplectic, n / 2);
            let a = -skew_matrix(rng, n) * &j;
            (a, (&j * &b).transpose(), skew_matrix(rng, m))
        }
    };
    let d = if proper { d * half } else { CMatrix::zeros(m, m) };
    Realization::new(a, b, c, d).expect("consistent dimensions")
}

/// Unstructured random realization.
pub fn realization<R: Rng>(rng: &mut R, n: usize, m: usize, proper: bool) -> Realization {
    let a = complex_matrix(rng, n, n);
    let b = complex_matrix(rng, n, m);
    let c = complex_matrix(rng, m, n);
    let d = if proper {
        complex_matrix(rng, m, m)
    } else {
        CMatrix::zeros(m, m)
    };
    Realization::new(a, b, c, d).expect("consistent dimensions")
}
