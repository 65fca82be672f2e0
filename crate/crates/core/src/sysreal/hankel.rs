//! Markov parameters, block-Hankel rank and Ho–Kalman realization.

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::Realization;
use crate::error::{Error, Result};
use crate::matcore::{singular_values, Tolerances};
use crate::CMatrix;

/// `C A^k B` for `k = 0, …, count − 1`.
pub fn markov_parameters(r: &Realization, count: usize) -> Vec<CMatrix> {
    let mut out = Vec::with_capacity(count);
    let mut ab = r.b.clone();
    for _ in 0..count {
        out.push(&r.c * &ab);
        ab = &r.a * ab;
    }
    out
}

/// `[M_{i+j+shift}]` with `rows × cols` blocks.
pub fn block_hankel(markov: &[CMatrix], rows: usize, cols: usize, shift: usize) -> Result<CMatrix> {
    let needed = rows + cols + shift - 1;
    if rows == 0 || cols == 0 || markov.len() < needed {
        return Err(Error::InsufficientData(format!(
            "{rows}x{cols} block Hankel needs {needed} Markov parameters, got {}",
            markov.len()
        )));
    }
    let (p, q) = markov[0].shape();
    if markov.iter().any(|m| m.shape() != (p, q)) {
        return Err(Error::DimensionMismatch("Markov parameters differ in shape".into()));
    }
    let mut h = CMatrix::zeros(rows * p, cols * q);
    for i in 0..rows {
        for j in 0..cols {
            h.view_mut((i * p, j * q), (p, q)).copy_from(&markov[i + j + shift]);
        }
    }
    Ok(h)
}

/// Growth rate of the sequence, used to rescale `M_k ← M_k / ρ^k`.
/// This is the Markov sequence of `(A/ρ, B, C)`, which has the same Hankel rank.
///
/// `log ρ` is the least-squares slope of `log ‖M_k‖`, so one small
/// leading term does not dominate the estimate.
fn growth_rate(markov: &[CMatrix]) -> f64 {
    // terms at roundoff level are zeros of a finite sequence, not decay
    let floor = 1e-14 * markov.iter().map(|m| m.norm()).fold(0.0, f64::max);
    let points: Vec<(f64, f64)> = markov
        .iter()
        .enumerate()
        .filter_map(|(k, m)| {
            let x = m.norm();
            (x > floor).then(|| (k as f64, x.ln()))
        })
        .collect();
    if points.len() < 2 {
        return 1.0;
    }
    let count = points.len() as f64;
    let mean_k = points.iter().map(|p| p.0).sum::<f64>() / count;
    let mean_y = points.iter().map(|p| p.1).sum::<f64>() / count;
    let sxx: f64 = points.iter().map(|p| (p.0 - mean_k).powi(2)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - mean_k) * (p.1 - mean_y)).sum();
    let rho = (sxy / sxx).exp();
    if rho > 0.0 && rho.is_finite() {
        rho
    } else {
        1.0
    }
}

fn rescaled(markov: &[CMatrix], rho: f64) -> Vec<CMatrix> {
    markov
        .iter()
        .enumerate()
        .map(|(k, m)| m * Complex64::new(rho.powi(-(k as i32)), 0.0))
        .collect()
}

/// McMillan degree as the numerical rank of the largest square-ish block
/// Hankel matrix the data supports.
pub fn mcmillan_degree(markov: &[CMatrix], tol: &Tolerances) -> Result<usize> {
    let k = markov.len();
    if k == 0 {
        return Err(Error::InsufficientData("no Markov parameters".into()));
    }
    let rows = k.div_ceil(2);
    let cols = k + 1 - rows;
    let scaled = rescaled(markov, growth_rate(markov));
    let h = block_hankel(&scaled, rows, cols, 0)?;
    let sv = singular_values(&h);
    let top = sv.first().copied().unwrap_or(0.0);
    if top == 0.0 {
        return Ok(0);
    }
    let r = sv.iter().filter(|&&s| s > tol.rank_tol * top).count();
    if r == h.nrows().min(h.ncols()) {
        return Err(Error::InsufficientData(format!(
            "Hankel rank saturated at {r}; supply more Markov parameters"
        )));
    }
    Ok(r)
}

fn is_real(m: &CMatrix) -> bool {
    m.iter().all(|z| z.im == 0.0)
}

/// Truncated SVD `(U_n, σ_1..σ_n, V_nᴴ)`; real arithmetic for real input.
fn truncated_svd(h: &CMatrix, n: usize) -> (CMatrix, Vec<f64>, CMatrix) {
    if is_real(h) {
        let hr = DMatrix::from_fn(h.nrows(), h.ncols(), |i, j| h[(i, j)].re);
        let svd = hr.svd(true, true);
        let mut idx: Vec<usize> = (0..svd.singular_values.len()).collect();
        idx.sort_by(|&a, &b| svd.singular_values[b].total_cmp(&svd.singular_values[a]));
        let u = svd.u.expect("requested");
        let vt = svd.v_t.expect("requested");
        let uc = CMatrix::from_fn(h.nrows(), n, |i, j| Complex64::new(u[(i, idx[j])], 0.0));
        let vc = CMatrix::from_fn(n, h.ncols(), |i, j| Complex64::new(vt[(idx[i], j)], 0.0));
        let s = idx[..n].iter().map(|&i| svd.singular_values[i]).collect();
        (uc, s, vc)
    } else {
        let svd = h.clone().svd(true, true);
        let mut idx: Vec<usize> = (0..svd.singular_values.len()).collect();
        idx.sort_by(|&a, &b| svd.singular_values[b].total_cmp(&svd.singular_values[a]));
        let u = svd.u.expect("requested");
        let vt = svd.v_t.expect("requested");
        let uc = CMatrix::from_fn(h.nrows(), n, |i, j| u[(i, idx[j])]);
        let vc = CMatrix::from_fn(n, h.ncols(), |i, j| vt[(idx[i], j)]);
        let s = idx[..n].iter().map(|&i| svd.singular_values[i]).collect();
        (uc, s, vc)
    }
}

/// Order-`n` strictly proper realization of a Markov sequence
/// (`M_k = C A^k B`). Real data gives a real realization.
pub fn ho_kalman(markov: &[CMatrix], n: usize, tol: &Tolerances) -> Result<Realization> {
    let k = markov.len();
    let Some(first) = markov.first() else {
        return Err(Error::InsufficientData("no Markov parameters".into()));
    };
    let (p, q) = first.shape();
    if p != q {
        return Err(Error::DimensionMismatch(format!("Markov parameters are {p}x{q}")));
    }
    let m = p;
    if n == 0 {
        return Realization::strictly_proper(CMatrix::zeros(0, 0), CMatrix::zeros(0, m), CMatrix::zeros(m, 0));
    }
    if k < 2 {
        return Err(Error::InsufficientData("need at least two Markov parameters".into()));
    }
    let rows = k / 2;
    let cols = k - rows;
    if rows * m < n || cols * m < n {
        return Err(Error::InsufficientData(format!(
            "{k} Markov parameters cannot determine an order-{n} realization"
        )));
    }
    let rho = growth_rate(markov);
    let scaled = rescaled(markov, rho);
    let h0 = block_hankel(&scaled, rows, cols, 0)?;
    let h1 = block_hankel(&scaled, rows, cols, 1)?;
    let (u, s, vt) = truncated_svd(&h0, n);
    if s[n - 1] <= tol.rank_tol * s[0] {
        return Err(Error::InvalidParams(format!(
            "requested order {n} exceeds the numerical Hankel rank"
        )));
    }
    let sqrt_s: Vec<f64> = s.iter().map(|x| x.sqrt()).collect();
    let obs = CMatrix::from_fn(u.nrows(), n, |i, j| u[(i, j)] * sqrt_s[j]);
    let ctr = CMatrix::from_fn(n, vt.ncols(), |i, j| vt[(i, j)] * sqrt_s[i]);
    let a_scaled = CMatrix::from_fn(n, n, |i, j| Complex64::new(1.0 / (sqrt_s[i] * sqrt_s[j]), 0.0))
        .component_mul(&(u.adjoint() * h1 * vt.adjoint()));
    let a = a_scaled * Complex64::new(rho, 0.0);
    let b = ctr.columns(0, m).into_owned();
    let c = obs.rows(0, m).into_owned();
    Realization::strictly_proper(a, b, c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::sysreal::{transfer_mismatch, TransferProbe};

    #[test]
    fn integrator_has_degree_one() {
        let one = CMatrix::from_element(1, 1, Complex64::new(1.0, 0.0));
        let zero = CMatrix::zeros(1, 1);
        let mut markov = vec![one];
        markov.extend(std::iter::repeat_n(zero, 4));
        assert_eq!(mcmillan_degree(&markov, &Tolerances::default()).unwrap(), 1);
    }

    #[test]
    fn minimal_system_degree() {
        let mut rng = fixtures::rng(21);
        let r = fixtures::realization(&mut rng, 4, 2, false);
        let markov = markov_parameters(&r, 9);
        assert_eq!(mcmillan_degree(&markov, &Tolerances::default()).unwrap(), 4);
    }

    #[test]
    fn saturated_rank_is_reported() {
        let mut rng = fixtures::rng(22);
        let r = fixtures::realization(&mut rng, 6, 1, false);
        let markov = markov_parameters(&r, 5);
        assert!(matches!(
            mcmillan_degree(&markov, &Tolerances::default()),
            Err(Error::InsufficientData(_))
        ));
    }

    #[test]
    fn ho_kalman_reproduces_transfer() {
        let mut rng = fixtures::rng(23);
        let r = fixtures::realization(&mut rng, 5, 2, false);
        let markov = markov_parameters(&r, 12);
        let tol = Tolerances::default();
        let r2 = ho_kalman(&markov, 5, &tol).unwrap();
        let probe = TransferProbe::random(&r, 10, 1e-8, 4);
        assert!(transfer_mismatch(&r, &r2, &probe).unwrap() < 1e-8);
    }

    #[test]
    fn ho_kalman_real_data_gives_real_realization() {
        let mut rng = fixtures::rng(24);
        let mut r = fixtures::realization(&mut rng, 4, 2, false);
        for m in [&mut r.a, &mut r.b, &mut r.c] {
            m.iter_mut().for_each(|z| z.im = 0.0);
        }
        let r2 = ho_kalman(&markov_parameters(&r, 10), 4, &Tolerances::default()).unwrap();
        assert_eq!(r2.max_imag(), 0.0);
    }
}
