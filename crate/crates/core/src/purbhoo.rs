//! A real skew-symmetric system built from osculating flags of the rational
//! normal curve, for which every pole-placing skew-symmetric feedback is real.
//!
//! `γ(s) ∈ C^{2m}` is a rational normal curve isotropic for the split form
//! `O_{2m}`; its first `m − 1` derivatives together with a corrected `m`-th
//! derivative span an isotropic `m`-plane. Clearing `s⁻¹` gives the polynomial
//! matrix `K(s) = [D(s) : N(s)]` and the transfer function `G = D⁻¹N`.

use num_complex::Complex64;
use std::f64::consts::SQRT_2;

use crate::error::{Error, Result};
use crate::feedback::{pairs, place_poles_with, FeedbackProblem, SolutionSet, SolverOptions, Variant};
use crate::matcore::{solve, Tolerances};
use crate::sysreal::{
    classify_transfer, ho_kalman, mcmillan_degree, symmetrize, Realization, SymmetryType,
    TransferProbe,
};
use crate::{CMatrix, Poly, PolyMatrix};

/// Imaginary parts below this are zeroed after real constructions.
pub const REAL_CLEANUP: f64 = 1e-10;

fn factorial(k: u32) -> f64 {
    (1..=k).map(f64::from).product()
}

/// Component `k` (0-based) of `γ` as `c · s^p`.
fn gamma_term(m: usize, k: usize) -> (f64, u32) {
    let m32 = m as u32;
    if k + 1 < m {
        (1.0 / factorial(k as u32), k as u32)
    } else if k + 1 == m {
        (1.0 / (factorial(m32 - 1) * SQRT_2), m32 - 1)
    } else if k + 1 < 2 * m {
        // (−s)^p / p!
        let p = 2 * m32 - 1 - (k as u32 - m32 + 1);
        let sign = if p.is_multiple_of(2) { 1.0 } else { -1.0 };
        (sign / factorial(p), p)
    } else {
        let p = m32 - 1;
        let sign = if p.is_multiple_of(2) { 1.0 } else { -1.0 };
        (sign / (factorial(p) * SQRT_2), p)
    }
}

fn check_m(m: usize) -> Result<()> {
    if m < 2 {
        return Err(Error::InvalidParams(format!("need m >= 2, got {m}")));
    }
    Ok(())
}

/// `γ(s) = (1, s, …, s^{m−1}/((m−1)!√2), (−s)^{2m−2}/(2m−2)!, …, (−s)^{m−1}/((m−1)!√2))`.
pub fn gamma(m: usize, s: Complex64) -> Result<Vec<Complex64>> {
    derivative(m, 0, s)
}

/// `d^order/ds^order γ(s)`, evaluated on the closed-form monomials.
fn derivative(m: usize, order: u32, s: Complex64) -> Result<Vec<Complex64>> {
    check_m(m)?;
    Ok((0..2 * m)
        .map(|k| {
            let (c, p) = gamma_term(m, k);
            if order > p {
                Complex64::new(0.0, 0.0)
            } else {
                s.powu(p - order) * (c * factorial(p) / factorial(p - order))
            }
        })
        .collect())
}

/// Sign of `e_{2m}` in the correction `(e_m ± e_{2m})/√2` of the last frame
/// vector; `(−1)^m` is the choice that keeps the frame isotropic.
fn correction_sign(m: usize) -> f64 {
    if m.is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

/// `v_i(s) = γ^{(i−1)}(s)` for `i < m`, `v_m(s) = γ^{(m−1)}(s) + (e_m + (−1)^m e_{2m})/√2`.
pub fn osculating_frame(m: usize, s: Complex64) -> Result<Vec<Vec<Complex64>>> {
    check_m(m)?;
    let mut frame: Vec<Vec<Complex64>> = (0..m as u32).map(|i| derivative(m, i, s)).collect::<Result<_>>()?;
    let last = &mut frame[m - 1];
    last[m - 1] += 1.0 / SQRT_2;
    last[2 * m - 1] += correction_sign(m) / SQRT_2;
    Ok(frame)
}

/// `m × 2m` polynomial matrix with rows `s^{2m−1−i} v_i(1/s)`.
pub fn k_matrix(m: usize) -> Result<PolyMatrix> {
    check_m(m)?;
    let mut out = PolyMatrix::zeros(m, 2 * m);
    for i in 1..=m {
        let order = (i - 1) as u32;
        for k in 0..2 * m {
            let (c, p) = gamma_term(m, k);
            if p >= order {
                let coeff = c * factorial(p) / factorial(p - order);
                let power = 2 * m - 2 - p as usize;
                out.set(i - 1, k, Poly::monomial(Complex64::new(coeff, 0.0), power));
            }
        }
    }
    let x = Complex64::new(1.0 / SQRT_2, 0.0);
    let row = m - 1;
    let bump = |p: &Poly, c: Complex64| p.clone() + Poly::monomial(c, m - 1);
    let d = bump(out.get(row, m - 1), x);
    out.set(row, m - 1, d);
    let n = bump(out.get(row, 2 * m - 1), x * correction_sign(m));
    out.set(row, 2 * m - 1, n);
    Ok(out)
}

/// The Purbhoo system and its data.
#[derive(Debug, Clone, PartialEq)]
pub struct OsculatingSystem {
    pub m: usize,
    pub k: PolyMatrix,
    pub dpart: PolyMatrix,
    pub npart: PolyMatrix,
    /// `C A^k B`, the expansion of `D⁻¹N` at infinity.
    pub markov: Vec<CMatrix>,
    pub mcmillan_degree: usize,
    pub realization: Realization,
}

impl OsculatingSystem {
    /// `G(s) = D(s)⁻¹N(s)` evaluated directly from the polynomial matrices.
    pub fn transfer_direct(&self, s: Complex64) -> Result<CMatrix> {
        solve(&self.dpart.eval(s), &self.npart.eval(s)).map_err(|e| match e {
            Error::Singular => Error::SingularAtSample(s),
            other => other,
        })
    }
}

/// First `count` Markov parameters of `D⁻¹N` for row-reduced `D` with
/// invertible row-leading matrix and strictly proper rows of `N`.
pub fn markov_from_fraction(dpart: &PolyMatrix, npart: &PolyMatrix, count: usize) -> Result<Vec<CMatrix>> {
    let m = dpart.nrows();
    let degrees: Vec<usize> = dpart
        .row_degrees()
        .into_iter()
        .map(|d| d.ok_or_else(|| Error::InvalidParams("D has a zero row".into())))
        .collect::<Result<_>>()?;
    // coefficient of s^{d_i − k} in row i, as an m × cols matrix
    let shifted = |p: &PolyMatrix, k: usize| {
        CMatrix::from_fn(m, p.ncols(), |i, j| {
            degrees[i].checked_sub(k).map_or(Complex64::new(0.0, 0.0), |e| p.get(i, j).coeff(e))
        })
    };
    let lead = shifted(dpart, 0);
    if shifted(npart, 0).norm() > 0.0 {
        return Err(Error::NotStrictlyProper);
    }
    let dk: Vec<CMatrix> = (0..=count).map(|k| shifted(dpart, k)).collect();
    let mut g: Vec<CMatrix> = Vec::with_capacity(count);
    for k in 1..=count {
        let mut rhs = shifted(npart, k);
        for j in 1..k {
            rhs -= &dk[j] * &g[k - j - 1];
        }
        g.push(solve(&lead, &rhs)?);
    }
    Ok(g)
}

fn max_imag(ms: &[CMatrix]) -> f64 {
    ms.iter()
        .flat_map(|m| m.iter())
        .fold(0.0, |acc, z| acc.max(z.im.abs()))
}

/// Build `K`, split it into `[D : N]`, realize `G = D⁻¹N` minimally with a
/// skew-symmetric structured realization, and verify reality, properness,
/// skew-symmetry and the McMillan degree `2·C(m,2)`.
pub fn purbhoo_transfer(m: usize, tol: &Tolerances, seed: u64) -> Result<OsculatingSystem> {
    check_m(m)?;
    let k = k_matrix(m)?;
    let dpart = k.columns(0, m);
    let npart = k.columns(m, m);
    let n = 2 * pairs(m);
    let markov = markov_from_fraction(&dpart, &npart, 2 * n + 2)
        .map_err(|e| Error::VerificationFailed(format!("series expansion of D^-1 N: {e}")))?;
    let imag = max_imag(&markov);
    if imag > REAL_CLEANUP {
        return Err(Error::VerificationFailed(format!("G is not real: imaginary part {imag:.3e}")));
    }
    let degree = mcmillan_degree(&markov, tol)?;
    if degree != n {
        return Err(Error::VerificationFailed(format!(
            "McMillan degree {degree}, expected {n}"
        )));
    }
    let raw = ho_kalman(&markov, n, tol)?;
    let mut realization = symmetrize(&raw, SymmetryType::SkewSymmetric, tol, seed)?;
    let imag = realization.max_imag();
    if imag > REAL_CLEANUP * (1.0 + realization.a.norm()) {
        return Err(Error::VerificationFailed(format!(
            "realization is not real: imaginary part {imag:.3e}"
        )));
    }
    realization.real_cleanup(f64::INFINITY);
    let probe = TransferProbe::random(&realization, 10, tol.residual_tol, seed);
    if !classify_transfer(&realization, &probe)?.contains(&SymmetryType::SkewSymmetric) {
        return Err(Error::VerificationFailed("G is not skew-symmetric".into()));
    }
    Ok(OsculatingSystem {
        m,
        k,
        dpart,
        npart,
        markov,
        mcmillan_degree: degree,
        realization,
    })
}

/// Place `C(m,2)` distinct nonzero real poles on the Purbhoo system.
pub fn reality_experiment(m: usize, poles: &[f64], opts: &SolverOptions) -> Result<SolutionSet> {
    let sys = purbhoo_transfer(m, &opts.tol, opts.seed)?;
    reality_experiment_on(&sys, poles, opts)
}

/// As [`reality_experiment`], reusing an already built system.
pub fn reality_experiment_on(sys: &OsculatingSystem, poles: &[f64], opts: &SolverOptions) -> Result<SolutionSet> {
    if poles.iter().any(|&p| p == 0.0 || !p.is_finite()) {
        return Err(Error::InvalidParams("poles must be finite and nonzero".into()));
    }
    let targets = poles.iter().map(|&p| Complex64::new(p, 0.0)).collect();
    let problem = FeedbackProblem::new(sys.realization.clone(), Variant::SkewSymmetric, targets, &opts.tol)?;
    place_poles_with(&problem, opts)
}
