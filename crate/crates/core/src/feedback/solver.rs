//! Multistart damped Newton on the pole conditions.
//!
//! Skew-symmetric systems: one equation `pf(sᵢJ − MJ) = 0` per pole, with
//! `M = A + BFC`; since `φ(s) = pf(sJ − MJ)²` each pole becomes a double root.
//! Skew-Hamiltonian systems: `φ(sᵢ) = 0`, which forces `φ(−sᵢ) = 0` as well.

use num_complex::Complex64;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::{closed_loop_charpoly, pair_index, pairs, FeedbackProblem, SkewFeedback, Variant};
use crate::error::{Error, Result};
use crate::fixtures::complex_normal;
use crate::matcore::{det, pfaffian_unchecked, pinv, solve, standard_form, FormKind, Tolerances};
use crate::sysreal::{transfer_eval, Realization};
use crate::{CMatrix, Poly};

/// Seed used when the caller does not choose one.
pub const DEFAULT_SEED: u64 = 0x5_4e4d_c0de;

const MAX_ITER: usize = 200;
const MAX_HALVINGS: usize = 40;
const CONVERGED: f64 = 1e-12;
const STALLED: f64 = 1e-9;
const FD_STEP: f64 = 1e-7;
const REAL_FLAG: f64 = 1e-7;
const DIVERGED: f64 = 1e14;

#[derive(Debug, Clone, PartialEq)]
pub struct SolverOptions {
    pub seed: u64,
    /// Defaults to `64 · max(1, d_m)`.
    pub max_starts: Option<usize>,
    pub tol: Tolerances,
    /// Diagonal input/output scaling before solving (see [`io_balance`]).
    pub balance: bool,
    pub max_iter: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            seed: DEFAULT_SEED,
            max_starts: None,
            tol: Tolerances::default(),
            balance: true,
            max_iter: MAX_ITER,
        }
    }
}

/// Deduplicated, verified feedback laws in lexicographic coordinate order.
#[derive(Debug, Clone, PartialEq)]
pub struct SolutionSet {
    pub solutions: Vec<SkewFeedback>,
    /// Largest normalized pole-condition residual per solution.
    pub residuals: Vec<f64>,
    /// Relative coefficient distance of `φ` to the target polynomial.
    pub charpoly_errors: Vec<f64>,
    pub char_polys: Vec<Poly>,
    pub is_real: Vec<bool>,
    pub starts_used: usize,
    pub converged_starts: usize,
    /// Converged starts whose characteristic polynomial failed verification.
    pub rejected_starts: usize,
    /// Fewer poles than unknowns: the solutions are samples of a positive
    /// dimensional family.
    pub underdetermined: bool,
    /// Input/output scaling `σ` used during the solve.
    pub scaling: Vec<f64>,
}

impl SolutionSet {
    pub fn len(&self) -> usize {
        self.solutions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.solutions.is_empty()
    }

    pub fn all_real(&self) -> bool {
        self.is_real.iter().all(|&r| r)
    }
}

/// `place_poles_with` using default options apart from `seed`, `max_starts`
/// and `tol`.
pub fn place_poles(
    problem: &FeedbackProblem,
    seed: u64,
    max_starts: Option<usize>,
    tol: &Tolerances,
) -> Result<SolutionSet> {
    let opts = SolverOptions {
        seed,
        max_starts,
        tol: *tol,
        ..SolverOptions::default()
    };
    place_poles_with(problem, &opts)
}

/// Exact `d_m` for the default start count, saturating for huge `m`.
fn default_starts(m: usize) -> usize {
    let d = crate::schubert::dm(m.max(2))
        .ok()
        .and_then(|d| u64::try_from(d).ok())
        .unwrap_or(u64::MAX);
    (d.max(1).saturating_mul(64)).min(1 << 16) as usize
}

/// Positive diagonal `σ` with `σᵢσⱼ|Gᵢⱼ(s*)| ≈ 1` in the least-squares sense
/// on `log`s, `s*` a non-real point at the geometric mean modulus of the
/// poles. The map `(B, C, F) ↦ (BΣ, ΣC, Σ⁻¹FΣ⁻¹)` preserves both the
/// structure and the closed loop.
pub fn io_balance(r: &Realization, poles: &[Complex64]) -> Vec<f64> {
    let m = r.m();
    let ones = vec![1.0; m];
    let idx = pair_index(m);
    if idx.is_empty() {
        return ones;
    }
    let moduli: Vec<f64> = poles.iter().map(|p| p.norm()).filter(|&x| x > 0.0).collect();
    let radius = if moduli.is_empty() {
        1.0
    } else {
        (moduli.iter().map(|x| x.ln()).sum::<f64>() / moduli.len() as f64).exp()
    };
    let Ok(g) = transfer_eval(r, Complex64::from_polar(radius, 1.0)) else {
        return ones;
    };
    let mut rows = Vec::new();
    let mut rhs = Vec::new();
    for &(i, j) in &idx {
        let v = g[(i, j)].norm();
        if v > 0.0 && v.is_finite() {
            let mut row = vec![0.0; m];
            row[i] = 1.0;
            row[j] = 1.0;
            rows.push(row);
            rhs.push(-v.ln());
        }
    }
    if rows.is_empty() {
        return ones;
    }
    let a = CMatrix::from_fn(rows.len(), m, |i, j| Complex64::new(rows[i][j], 0.0));
    let b = CMatrix::from_fn(rhs.len(), 1, |i, _| Complex64::new(rhs[i], 0.0));
    let x = pinv(&a, 1e-12) * b;
    x.iter().map(|z| z.re.exp()).collect()
}

/// The pole conditions as a function of the feedback coordinates.
struct Equations {
    a: CMatrix,
    b: CMatrix,
    c: CMatrix,
    j: Option<CMatrix>,
    poles: Vec<Complex64>,
    scales: Vec<f64>,
    m: usize,
}

impl Equations {
    fn new(r: &Realization, variant: Variant, poles: &[Complex64]) -> Self {
        let n = r.n();
        let j = (variant == Variant::SkewSymmetric).then(|| standard_form::<f64>(FormKind::Symplectic, n / 2));
        let degree = match variant {
            Variant::SkewSymmetric => n / 2,
            Variant::SkewHamiltonian => n,
        } as i32;
        Self {
            a: r.a.clone(),
            b: r.b.clone(),
            c: r.c.clone(),
            j,
            poles: poles.to_vec(),
            scales: poles.iter().map(|s| (1.0 + s.norm()).powi(degree)).collect(),
            m: r.m(),
        }
    }

    fn closed_loop(&self, x: &[Complex64]) -> CMatrix {
        let f = SkewFeedback {
            m: self.m,
            coords: x.to_vec(),
        };
        &self.a + &self.b * f.matrix() * &self.c
    }

    fn eval(&self, x: &[Complex64]) -> Vec<Complex64> {
        let cl = self.closed_loop(x);
        let n = cl.nrows();
        match &self.j {
            Some(j) => {
                let mj = cl * j;
                self.poles
                    .iter()
                    .zip(&self.scales)
                    .map(|(&s, &w)| pfaffian_unchecked(j * s - &mj) / w)
                    .collect()
            }
            None => self
                .poles
                .iter()
                .zip(&self.scales)
                .map(|(&s, &w)| {
                    let shifted = CMatrix::identity(n, n) * s - &cl;
                    det(&shifted).unwrap_or(Complex64::new(0.0, 0.0)) / w
                })
                .collect(),
        }
    }

    fn jacobian(&self, x: &[Complex64], fx: &[Complex64]) -> CMatrix {
        let mut jac = CMatrix::zeros(fx.len(), x.len());
        let mut y = x.to_vec();
        for k in 0..x.len() {
            let h = FD_STEP * x[k].norm().max(1.0);
            y[k] = x[k] + h;
            let fy = self.eval(&y);
            for (i, (a, b)) in fy.iter().zip(fx).enumerate() {
                jac[(i, k)] = (a - b) / h;
            }
            y[k] = x[k];
        }
        jac
    }
}

fn sup_norm(v: &[Complex64]) -> f64 {
    v.iter().fold(0.0, |acc, z| acc.max(z.norm()))
}

fn finite(v: &[Complex64]) -> bool {
    v.iter().all(|z| z.re.is_finite() && z.im.is_finite())
}

/// Damped Newton from `x`; `Some(root)` on convergence.
fn newton(eq: &Equations, mut x: Vec<Complex64>, max_iter: usize) -> Option<Vec<Complex64>> {
    let square = eq.poles.len() == x.len();
    let mut fx = eq.eval(&x);
    let mut res = sup_norm(&fx);
    for _ in 0..max_iter {
        if !res.is_finite() {
            return None;
        }
        if res <= CONVERGED {
            return Some(x);
        }
        let jac = eq.jacobian(&x, &fx);
        let rhs = CMatrix::from_fn(fx.len(), 1, |i, _| -fx[i]);
        let step = if square {
            solve(&jac, &rhs).ok()?
        } else {
            pinv(&jac, 1e-14) * rhs
        };
        let step: Vec<Complex64> = step.iter().copied().collect();
        let mut t = 1.0;
        let mut accepted = false;
        for _ in 0..MAX_HALVINGS {
            let trial: Vec<Complex64> = x.iter().zip(&step).map(|(a, d)| a + d * t).collect();
            let ft = eq.eval(&trial);
            let rt = sup_norm(&ft);
            if finite(&ft) && rt < res {
                x = trial;
                fx = ft;
                res = rt;
                accepted = true;
                break;
            }
            t *= 0.5;
        }
        let step_size = sup_norm(&step) * t;
        let xnorm = sup_norm(&x).max(1.0);
        if xnorm > DIVERGED {
            return None;
        }
        if !accepted || step_size <= 1e-15 * xnorm {
            return (res <= STALLED).then_some(x);
        }
    }
    (res <= STALLED).then_some(x)
}

fn start_rng(seed: u64, index: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64);
    rng
}

fn random_start<R: Rng>(rng: &mut R, len: usize, scale: f64) -> Vec<Complex64> {
    (0..len).map(|_| complex_normal(rng) * scale).collect()
}

fn lex_cmp(a: &[Complex64], b: &[Complex64]) -> std::cmp::Ordering {
    for (x, y) in a.iter().zip(b) {
        let o = x.re.total_cmp(&y.re).then(x.im.total_cmp(&y.im));
        if o.is_ne() {
            return o;
        }
    }
    a.len().cmp(&b.len())
}

/// Multistart Newton on the pole conditions; every returned solution has
/// been checked against the target characteristic polynomial.
pub fn place_poles_with(problem: &FeedbackProblem, opts: &SolverOptions) -> Result<SolutionSet> {
    opts.tol.validate()?;
    let r = &problem.system;
    let m = r.m();
    let unknowns = pairs(m);
    let ell = problem.ell;
    if ell > unknowns {
        return Err(Error::InvalidParams(format!(
            "{ell} poles exceed the {unknowns} feedback coordinates"
        )));
    }
    let starts = opts.max_starts.unwrap_or_else(|| default_starts(m));
    if starts == 0 {
        return Err(Error::InvalidParams("max_starts must be positive".into()));
    }
    let sigma = if opts.balance {
        io_balance(r, &problem.target_poles)
    } else {
        vec![1.0; m]
    };
    let s = CMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
        m,
        sigma.iter().map(|&x| Complex64::new(x, 0.0)),
    ));
    let scaled = r.scale_io(&s)?;
    let eq = Equations::new(&scaled, problem.variant, &problem.target_poles);
    let bnorm = scaled.b.norm();
    let spread = if bnorm > 0.0 {
        (scaled.a.norm() / (bnorm * bnorm)).max(1.0)
    } else {
        1.0
    };

    let runs: Vec<Option<Vec<Complex64>>> = (0..starts)
        .into_par_iter()
        .map(|k| {
            let mut rng = start_rng(opts.seed, k);
            let x0 = random_start(&mut rng, unknowns, spread);
            newton(&eq, x0, opts.max_iter)
        })
        .collect();
    let converged: Vec<Vec<Complex64>> = runs.into_iter().flatten().collect();
    let converged_starts = converged.len();
    if converged_starts == 0 {
        return Err(Error::NoConvergence { starts });
    }

    let idx = pair_index(m);
    let unscale = |x: &[Complex64]| -> Vec<Complex64> {
        x.iter()
            .zip(&idx)
            .map(|(z, &(i, j))| z * (sigma[i] * sigma[j]))
            .collect()
    };
    let mut distinct: Vec<Vec<Complex64>> = Vec::new();
    for x in converged.iter().map(|x| unscale(x)) {
        let scale = sup_norm(&x).max(1.0);
        let dup = distinct.iter().any(|y| {
            let d = x.iter().zip(y).fold(0.0f64, |acc, (a, b)| acc.max((a - b).norm()));
            d <= opts.tol.dedupe_radius * scale
        });
        if !dup {
            distinct.push(x);
        }
    }

    let target = problem.target_poly();
    let original = Equations::new(r, problem.variant, &problem.target_poles);
    let mut out: Vec<(Vec<Complex64>, f64, f64, Poly)> = Vec::new();
    let mut rejected_starts = 0;
    for x in distinct {
        let f = SkewFeedback::new(m, x.clone())?;
        let phi = closed_loop_charpoly(r, &f)?;
        let err = phi.relative_distance(&target);
        if err > opts.tol.residual_tol {
            rejected_starts += 1;
            continue;
        }
        let residual = sup_norm(&original.eval(&x));
        out.push((x, residual, err, phi));
    }
    out.sort_by(|a, b| lex_cmp(&a.0, &b.0));

    let mut set = SolutionSet {
        solutions: Vec::with_capacity(out.len()),
        residuals: Vec::with_capacity(out.len()),
        charpoly_errors: Vec::with_capacity(out.len()),
        char_polys: Vec::with_capacity(out.len()),
        is_real: Vec::with_capacity(out.len()),
        starts_used: starts,
        converged_starts,
        rejected_starts,
        underdetermined: ell < unknowns,
        scaling: sigma,
    };
    for (x, residual, err, phi) in out {
        let f = SkewFeedback::new(m, x)?;
        set.is_real.push(f.max_imag() <= REAL_FLAG * f.norm_inf().max(1.0));
        set.solutions.push(f);
        set.residuals.push(residual);
        set.charpoly_errors.push(err);
        set.char_polys.push(phi);
    }
    if set.is_empty() {
        return Err(Error::VerificationFailed(format!(
            "{converged_starts} starts converged but no solution matched the target characteristic polynomial"
        )));
    }
    Ok(set)
}
