//! Block Lanczos with full reorthogonalization for extremal eigenpairs of a
//! Hermitian operator given only through its action on vectors.

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{domain, Error, Result};
use crate::grid::dot;

pub trait HermitianOp: Sync {
    fn dim(&self) -> usize;
    fn apply(&self, x: &[C64], y: &mut [C64]);
}

#[derive(Debug, Clone, Copy)]
pub struct LanczosOpts {
    /// Required `||A v - mu v|| <= tol * ||A||` per returned pair (`||A||` estimated from the Krylov products).
    pub tol: f64,
    /// Cap on the Krylov basis size.
    pub max_dim: usize,
    pub block: usize,
    pub seed: u64,
}

impl Default for LanczosOpts {
    fn default() -> Self {
        Self { tol: 1e-8, max_dim: 900, block: 2, seed: 0x5eed }
    }
}

#[derive(Debug, Clone)]
pub struct EigPairs {
    /// Largest eigenvalues, descending.
    pub top: Vec<f64>,
    /// Lowest eigenvalues, ascending.
    pub bottom: Vec<f64>,
    /// Unit (Euclidean) eigenvectors matching `top` and `bottom`.
    pub top_vecs: Vec<Vec<C64>>,
    pub bottom_vecs: Vec<Vec<C64>>,
    pub top_residuals: Vec<f64>,
    pub bottom_residuals: Vec<f64>,
    pub matvecs: usize,
}

fn axpy(alpha: C64, x: &[C64], y: &mut [C64]) {
    y.iter_mut().zip(x).for_each(|(yi, xi)| *yi += alpha * xi);
}

fn norm(x: &[C64]) -> f64 {
    x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Two passes of classical Gram-Schmidt against `basis`; returns the accumulated coefficients.
fn orthogonalize(basis: &[Vec<C64>], v: &mut [C64]) -> Vec<C64> {
    let mut coef = vec![C64::default(); basis.len()];
    for _ in 0..2 {
        let c: Vec<C64> = basis.iter().map(|q| dot(q, v)).collect();
        for (q, ci) in basis.iter().zip(&c) {
            axpy(-ci, q, v);
        }
        coef.iter_mut().zip(&c).for_each(|(a, b)| *a += b);
    }
    coef
}

fn random_vector(rng: &mut ChaCha8Rng, n: usize) -> Vec<C64> {
    (0..n).map(|_| C64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5)).collect()
}

/// Computes the `k_top` largest and `k_bottom` smallest eigenpairs of `op`.
/// `start` vectors (for instance eigenvectors from a nearby problem) seed the first block.
pub fn extremal_eigs(
    op: &dyn HermitianOp,
    k_top: usize,
    k_bottom: usize,
    opts: &LanczosOpts,
    start: &[Vec<C64>],
) -> Result<EigPairs> {
    let n = op.dim();
    let want = k_top + k_bottom;
    if want == 0 {
        return domain("no eigenvalues requested");
    }
    if want > n {
        return domain(format!("{want} eigenpairs requested from an operator of dimension {n}"));
    }
    let b = opts.block.max(1).min(n);
    let max_dim = opts.max_dim.min(n).max(want + b);
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);

    let mut basis: Vec<Vec<C64>> = Vec::with_capacity(max_dim + b);
    // Rows/columns of the projected matrix, grown as basis vectors get processed.
    let mut h = DMatrix::<C64>::zeros(max_dim + b, max_dim + b);
    let mut scale: f64 = 0.0;

    let push_block = |basis: &mut Vec<Vec<C64>>, cands: Vec<Vec<C64>>, rng: &mut ChaCha8Rng, scale: f64| -> Vec<Vec<C64>> {
        // Returns the coupling coefficients (one column per candidate) against the new vectors.
        let first_new = basis.len();
        let mut couplings = Vec::with_capacity(cands.len());
        for mut v in cands {
            let coef = orthogonalize(basis, &mut v);
            let mut nv = norm(&v);
            let mut col = coef[first_new.min(coef.len())..].to_vec();
            if nv <= 1e-12 * scale.max(1e-300) || nv == 0.0 {
                // Invariant subspace reached: continue with a fresh random direction.
                let mut w = random_vector(rng, v.len());
                orthogonalize(basis, &mut w);
                nv = 0.0;
                let nw = norm(&w);
                w.iter_mut().for_each(|z| *z /= nw);
                v = w;
            } else {
                v.iter_mut().for_each(|z| *z /= nv);
            }
            col.push(C64::from(nv));
            couplings.push(col);
            basis.push(v);
        }
        couplings
    };

    let mut first: Vec<Vec<C64>> = start.iter().filter(|s| s.len() == n).take(b).cloned().collect();
    while first.len() < b {
        first.push(random_vector(&mut rng, n));
    }
    push_block(&mut basis, first, &mut rng, 1.0);

    let mut processed = 0usize;
    let mut matvecs = 0usize;
    let mut next_check = 0usize;
    let mut best_residual = f64::INFINITY;
    let mut av = vec![C64::default(); n];
    loop {
        // Expand with A applied to the newest unprocessed block.
        let block_lo = processed;
        let block_hi = basis.len();
        let mut cands = Vec::with_capacity(block_hi - block_lo);
        for j in block_lo..block_hi {
            op.apply(&basis[j], &mut av);
            matvecs += 1;
            let mut w = av.clone();
            let coef = orthogonalize(&basis, &mut w);
            for (i, c) in coef.iter().enumerate() {
                h[(i, j)] = *c;
            }
            scale = scale.max(norm(&av));
            cands.push(w);
        }
        processed = block_hi;
        let room = basis.len() + (block_hi - block_lo) <= max_dim + b && basis.len() < n;
        // Coupling block B: new vectors against the block just processed.
        let mut coupling: Vec<Vec<C64>> = Vec::new();
        if room {
            let first_new = basis.len();
            let col_sets = push_block(&mut basis, cands, &mut rng, scale);
            for (jj, col) in col_sets.iter().enumerate() {
                // Column jj of the candidate block expands into the new vectors (upper triangular).
                let j = block_lo + jj;
                for (r, c) in col.iter().enumerate() {
                    h[(first_new + r, j)] = *c;
                }
            }
            coupling = col_sets;
        }
        let exhausted = !room || basis.len() >= n;
        if processed < want + 1 && !exhausted {
            continue;
        }
        // Rayleigh-Ritz costs O(k^3): check at geometrically spaced sizes.
        if processed < next_check && !exhausted && processed < max_dim {
            continue;
        }
        next_check = (processed + 4 * b).max(processed * 5 / 4);

        // Rayleigh-Ritz on the processed part.
        let k = processed;
        let (evals, evecs) = hermitian_eigen(&h.view((0, 0), (k, k)).into_owned())?;
        // descending
        let order: Vec<usize> = (0..k).rev().collect();
        let picks: Vec<usize> = order[..k_top.min(k)].iter().chain(order[k - k_bottom.min(k)..].iter().rev()).copied().collect();
        // Residual estimate: || B y_last ||, B being the coupling to the not-yet-processed block.
        let mut worst_ratio: f64 = 0.0;
        for &ix in &picks {
            let y = &evecs[ix];
            let mut r2 = 0.0;
            if !coupling.is_empty() {
                let nb = coupling.len();
                for row in 0..nb {
                    let mut acc = C64::default();
                    for (jj, col) in coupling.iter().enumerate() {
                        if row < col.len() {
                            acc += col[row] * y[block_lo + jj];
                        }
                    }
                    r2 += acc.norm_sqr();
                }
            }
            let r = r2.sqrt();
            worst_ratio = worst_ratio.max(r / (opts.tol * scale));
        }
        if worst_ratio <= 1.0 || exhausted {
            // Form Ritz vectors and verify residuals with explicit products.
            let mut vecs = Vec::with_capacity(picks.len());
            let mut res = Vec::with_capacity(picks.len());
            let mut ok = true;
            for &ix in &picks {
                let y = &evecs[ix];
                let mut x = vec![C64::default(); n];
                for (i, q) in basis.iter().take(k).enumerate() {
                    axpy(y[i], q, &mut x);
                }
                let nx = norm(&x);
                x.iter_mut().for_each(|z| *z /= nx);
                op.apply(&x, &mut av);
                matvecs += 1;
                let theta = evals[ix];
                let r = av.iter().zip(&x).map(|(a, xi)| (a - xi * theta).norm_sqr()).sum::<f64>().sqrt();
                if r > opts.tol * scale {
                    ok = false;
                }
                res.push(r);
                vecs.push(x);
            }
            let worst = res.iter().cloned().fold(0.0, f64::max);
            best_residual = best_residual.min(worst);
            if ok {
                let vals: Vec<f64> = picks.iter().map(|&ix| evals[ix]).collect();
                let bottom_vecs = vecs.split_off(k_top.min(k));
                let bottom_residuals = res.split_off(k_top.min(k));
                return Ok(EigPairs {
                    top: vals[..k_top.min(k)].to_vec(),
                    bottom: vals[k_top.min(k)..].to_vec(),
                    top_vecs: vecs,
                    bottom_vecs,
                    top_residuals: res,
                    bottom_residuals,
                    matvecs,
                });
            }
            if exhausted {
                return Err(Error::Convergence { what: "Lanczos eigensolver".into(), residual: best_residual });
            }
        }
    }
}

/// Dense Hermitian operator, mostly useful as an oracle in tests.
pub struct DenseOp(pub DMatrix<C64>);

impl HermitianOp for DenseOp {
    fn dim(&self) -> usize {
        self.0.nrows()
    }
    fn apply(&self, x: &[C64], y: &mut [C64]) {
        let n = self.0.nrows();
        for i in 0..n {
            let mut acc = C64::default();
            for j in 0..n {
                acc += self.0[(i, j)] * x[j];
            }
            y[i] = acc;
        }
    }
}

/// Assembles the matrix of `op` column by column.
pub fn assemble(op: &dyn HermitianOp) -> DMatrix<C64> {
    let n = op.dim();
    let mut m = DMatrix::<C64>::zeros(n, n);
    let mut e = vec![C64::default(); n];
    let mut col = vec![C64::default(); n];
    for j in 0..n {
        e[j] = C64::from(1.0);
        op.apply(&e, &mut col);
        e[j] = C64::default();
        for i in 0..n {
            m[(i, j)] = col[i];
        }
    }
    m
}

/// All eigenvalues of a dense Hermitian matrix, ascending.
pub fn dense_eigenvalues(m: &DMatrix<C64>) -> Vec<f64> {
    let n = m.nrows();
    let a = faer::Mat::<C64>::from_fn(n, n, |i, j| 0.5 * (m[(i, j)] + m[(j, i)].conj()));
    let mut v: Vec<f64> = a.self_adjoint_eigenvalues(faer::Side::Lower).expect("dense Hermitian eigenvalues");
    v.sort_by(|a, b| a.partial_cmp(b).unwrap());
    v
}

/// Eigenvalues (ascending) and unit eigenvectors of the Hermitian part of `m`.
fn hermitian_eigen(m: &DMatrix<C64>) -> Result<(Vec<f64>, Vec<Vec<C64>>)> {
    let n = m.nrows();
    let a = faer::Mat::<C64>::from_fn(n, n, |i, j| 0.5 * (m[(i, j)] + m[(j, i)].conj()));
    let e = a
        .self_adjoint_eigen(faer::Side::Lower)
        .map_err(|_| Error::Convergence { what: "projected eigenproblem".into(), residual: f64::NAN })?;
    let (u, s) = (e.U(), e.S());
    let vals = (0..n).map(|i| s[i].re).collect();
    let vecs = (0..n).map(|c| (0..n).map(|i| u[(i, c)]).collect()).collect();
    Ok((vals, vecs))
}
