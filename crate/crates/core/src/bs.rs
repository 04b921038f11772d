//! Pseudospectral Birman-Schwinger operators `sqrt(V) g(-i grad) sqrt(V)` on a periodic box.

use num_complex::Complex64 as C64;
use rayon::prelude::*;

use crate::dirac::{CliffordRep, ResolventParams};
use crate::error::{domain, Error, Result};
use crate::grid::{FftNd, GridSpec, PotentialField, SpinorField};
use crate::lanczos::{extremal_eigs, EigPairs, HermitianOp, LanczosOpts};

/// `sqrt(V) F^{-1} S(k) F sqrt(V)` with an `n x n` matrix symbol per wavevector.
#[derive(Debug, Clone)]
pub struct BsOperator {
    pub grid: GridSpec,
    pub n: usize,
    sqrt_v: Vec<f64>,
    symbol: Vec<C64>,
    fft: FftNd,
}

impl BsOperator {
    fn build(v: &PotentialField, n: usize, sym: impl Fn(&[f64]) -> Vec<C64> + Sync) -> Self {
        let grid = v.grid;
        let symbol: Vec<C64> = (0..grid.len())
            .into_par_iter()
            .flat_map_iter(|i| sym(&grid.wavevector(i)[..grid.d]))
            .collect();
        Self { grid, n, sqrt_v: v.values.iter().map(|x| x.sqrt()).collect(), symbol, fft: FftNd::new(&grid) }
    }

    /// `K_V(lambda)` for the free Dirac operator with mass `m`, `lambda` in the gap.
    pub fn dirac(rep: &CliffordRep, v: &PotentialField, m: f64, lambda: f64) -> Result<Self> {
        ResolventParams::new(m, lambda)?;
        Self::dirac_complex(rep, v, m, C64::from(lambda))
    }

    /// `K_V(z)` at a complex energy off the real axis or inside the gap (not Hermitian in general).
    pub fn dirac_complex(rep: &CliffordRep, v: &PotentialField, m: f64, z: C64) -> Result<Self> {
        if rep.d != v.grid.d {
            return domain("Clifford representation and grid disagree on dimension");
        }
        if z.im == 0.0 && z.re.abs() >= m {
            return domain(format!("real energy {} not inside the gap", z.re));
        }
        Ok(Self::build(v, rep.n_components, |k| rep.resolvent_symbol_complex(m, z, k).transpose().iter().copied().collect()))
    }

    /// Scalar operator with symbol `f(|k|^2)`.
    pub fn scalar(v: &PotentialField, f: impl Fn(f64) -> f64 + Sync) -> Self {
        Self::build(v, 1, |k| vec![C64::from(f(k.iter().map(|x| x * x).sum()))])
    }

    /// Schrodinger comparison `sqrt(V)(-Delta - lambda)^{-1} sqrt(V)`, `lambda < 0`.
    pub fn schrodinger(v: &PotentialField, lambda: f64) -> Result<Self> {
        if !(lambda < 0.0) {
            return domain(format!("Schrodinger energy must be negative, got {lambda}"));
        }
        Ok(Self::scalar(v, move |k2| 1.0 / (k2 - lambda)))
    }

    /// Pseudo-relativistic `sqrt(V)(sqrt(-Delta + m^2) - m + e)^{-1} sqrt(V)`, `e > 0`.
    pub fn pseudo_relativistic(v: &PotentialField, m: f64, e: f64) -> Result<Self> {
        if !(e > 0.0) {
            return domain(format!("energy offset must be positive, got {e}"));
        }
        Ok(Self::scalar(v, move |k2| 1.0 / ((k2 + m * m).sqrt() - m + e)))
    }

    pub fn apply_into(&self, x: &[C64], y: &mut [C64]) {
        let np = self.grid.len();
        let n = self.n;
        let mut work = vec![C64::default(); np * n];
        for c in 0..n {
            for i in 0..np {
                work[c * np + i] = x[c * np + i] * self.sqrt_v[i];
            }
            self.fft.forward(&mut work[c * np..(c + 1) * np]);
        }
        let mut tmp = [C64::default(); 4];
        for i in 0..np {
            let s = &self.symbol[i * n * n..(i + 1) * n * n];
            for r in 0..n {
                let mut acc = C64::default();
                for c in 0..n {
                    acc += s[r * n + c] * work[c * np + i];
                }
                tmp[r] = acc;
            }
            for r in 0..n {
                work[r * np + i] = tmp[r];
            }
        }
        for c in 0..n {
            self.fft.inverse(&mut work[c * np..(c + 1) * np]);
            for i in 0..np {
                y[c * np + i] = work[c * np + i] * self.sqrt_v[i];
            }
        }
    }

    /// Adjoint action; the symbol is replaced by its pointwise adjoint.
    pub fn apply_adjoint_into(&self, x: &[C64], y: &mut [C64]) {
        let mut adj = self.clone();
        let n = self.n;
        for blk in adj.symbol.chunks_mut(n * n) {
            let orig: Vec<C64> = blk.to_vec();
            for r in 0..n {
                for c in 0..n {
                    blk[r * n + c] = orig[c * n + r].conj();
                }
            }
        }
        adj.apply_into(x, y);
    }

    pub fn apply(&self, phi: &SpinorField) -> Result<SpinorField> {
        if phi.grid != self.grid || phi.n_components != self.n {
            return domain("spinor field does not match operator layout");
        }
        let mut out = SpinorField::zeros(self.grid, self.n);
        self.apply_into(&phi.values, &mut out.values);
        Ok(out)
    }

    /// Largest singular value by power iteration on `K^* K`.
    pub fn op_norm(&self, iters: usize, seed: u64) -> f64 {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let dim = self.grid.len() * self.n;
        let mut x: Vec<C64> = (0..dim).map(|_| C64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5)).collect();
        let mut y = vec![C64::default(); dim];
        let mut z = vec![C64::default(); dim];
        let mut sigma = 0.0;
        for _ in 0..iters {
            let nx = x.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
            if nx == 0.0 {
                return 0.0;
            }
            x.iter_mut().for_each(|v| *v /= nx);
            self.apply_into(&x, &mut y);
            self.apply_adjoint_into(&y, &mut z);
            sigma = z.iter().zip(&x).map(|(a, b)| (b.conj() * a).re).sum::<f64>().max(0.0).sqrt();
            std::mem::swap(&mut x, &mut z);
        }
        sigma
    }
}

impl HermitianOp for BsOperator {
    fn dim(&self) -> usize {
        self.grid.len() * self.n
    }
    fn apply(&self, x: &[C64], y: &mut [C64]) {
        self.apply_into(x, y)
    }
}

/// `K_V(lambda) phi`.
pub fn apply_kv(rep: &CliffordRep, v: &PotentialField, m: f64, lambda: f64, phi: &SpinorField) -> Result<SpinorField> {
    BsOperator::dirac(rep, v, m, lambda)?.apply(phi)
}

/// Extremal eigenpairs of `K_V(lambda)`; eigenvectors are returned as unit vectors in `L^2` of the box.
pub fn kv_extremal(
    rep: &CliffordRep,
    v: &PotentialField,
    m: f64,
    lambda: f64,
    k_top: usize,
    k_bottom: usize,
    opts: &LanczosOpts,
) -> Result<EigPairs> {
    let op = BsOperator::dirac(rep, v, m, lambda)?;
    if k_top + k_bottom > op.dim() / 4 {
        return domain("too many eigenpairs requested for the grid size");
    }
    let mut r = extremal_eigs(&op, k_top, k_bottom, opts, &[])?;
    let s = 1.0 / v.grid.cell().sqrt();
    for vecs in [&mut r.top_vecs, &mut r.bottom_vecs] {
        for x in vecs.iter_mut() {
            x.iter_mut().for_each(|z| *z *= s);
        }
    }
    Ok(r)
}

/// Number of eigenvalues `>= threshold` of a Hermitian operator, growing the request as needed.
pub fn count_at_least(op: &dyn HermitianOp, threshold: f64, opts: &LanczosOpts) -> Result<usize> {
    let mut k = 4usize;
    loop {
        let k_eff = k.min(op.dim());
        let r = extremal_eigs(op, k_eff, 0, opts, &[])?;
        let c = r.top.iter().filter(|&&mu| mu >= threshold).count();
        if c < k_eff || k_eff == op.dim() {
            return Ok(c);
        }
        k *= 2;
    }
}

/// `mu_j(K_V(lambda))`, `j` counted from 1.
pub fn mu_j(rep: &CliffordRep, v: &PotentialField, m: f64, lambda: f64, j: usize, opts: &LanczosOpts) -> Result<f64> {
    let op = BsOperator::dirac(rep, v, m, lambda)?;
    Ok(extremal_eigs(&op, j, 0, opts, &[])?.top[j - 1])
}

/// Root of the increasing branch `mu_j(lambda) = 1` on `[lo, hi]` by bisection.
pub fn bisect_branch(
    rep: &CliffordRep,
    v: &PotentialField,
    m: f64,
    j: usize,
    mut lo: f64,
    mut hi: f64,
    tol: f64,
    opts: &LanczosOpts,
) -> Result<f64> {
    for _ in 0..60 {
        if hi - lo <= tol {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if mu_j(rep, v, m, mid, j, opts)? >= 1.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Ground-state energy in the gap: the smallest `lambda` with `mu_1(K_V(lambda)) = 1`.
pub fn lambda_d(rep: &CliffordRep, v: &PotentialField, m: f64, tol: f64, opts: &LanczosOpts) -> Result<Option<f64>> {
    if !(tol > 0.0) {
        return domain("tolerance must be positive");
    }
    let lo = -m + 10.0 * tol;
    let hi = m - 10.0 * tol;
    if v.values.iter().all(|&x| x == 0.0) {
        return Ok(None);
    }
    let mu_lo = mu_j(rep, v, m, lo, 1, opts)?;
    if mu_lo > 1.0 {
        return Err(Error::Supercritical(format!("mu_1(K_V({lo})) = {mu_lo} > 1: the ground state left the gap")));
    }
    if mu_j(rep, v, m, hi, 1, opts)? < 1.0 {
        return Ok(None);
    }
    bisect_branch(rep, v, m, 1, lo, hi, tol, opts).map(Some)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Crossing {
    /// Branch index counted from 1.
    pub branch: usize,
    pub lambda: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectralCurve {
    pub lambdas: Vec<f64>,
    /// `top[i][j]` is `mu_{j+1}(lambdas[i])`.
    pub top: Vec<Vec<f64>>,
    /// `bottom[i][j]` is `nu_{j+1}(lambdas[i])`.
    pub bottom: Vec<Vec<f64>>,
    pub crossings: Vec<Crossing>,
    /// `(lambda, j)` where `mu_j` and `mu_{j+1}` are closer than 1e-6.
    pub near_degenerate: Vec<(f64, usize)>,
}

impl SpectralCurve {
    /// Worst decrease of any branch between consecutive samples (0 when all are nondecreasing).
    pub fn worst_decrease(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for rows in [&self.top, &self.bottom] {
            for w in rows.windows(2) {
                for (a, b) in w[0].iter().zip(&w[1]) {
                    worst = worst.max(a - b);
                }
            }
        }
        worst
    }
}

/// Samples the `k` largest and `k` lowest branches over `lambdas` and locates crossings of 1.
pub fn sweep_branches(
    rep: &CliffordRep,
    v: &PotentialField,
    m: f64,
    lambdas: &[f64],
    k: usize,
    crossing_tol: f64,
    opts: &LanczosOpts,
) -> Result<SpectralCurve> {
    if lambdas.windows(2).any(|w| w[1] <= w[0]) {
        return domain("lambda grid must be strictly increasing");
    }
    let samples: Vec<Result<(Vec<f64>, Vec<f64>)>> = lambdas
        .par_iter()
        .map(|&lam| {
            let op = BsOperator::dirac(rep, v, m, lam)?;
            let r = extremal_eigs(&op, k, k, opts, &[])?;
            Ok((r.top, r.bottom))
        })
        .collect();
    let mut top = Vec::with_capacity(lambdas.len());
    let mut bottom = Vec::with_capacity(lambdas.len());
    for s in samples {
        let (t, b) = s?;
        top.push(t);
        bottom.push(b);
    }
    let mut near_degenerate = Vec::new();
    for (i, t) in top.iter().enumerate() {
        for j in 0..t.len().saturating_sub(1) {
            if (t[j] - t[j + 1]).abs() < 1e-6 {
                near_degenerate.push((lambdas[i], j + 1));
            }
        }
    }
    let mut brackets = Vec::new();
    for j in 0..k {
        for i in 0..lambdas.len() - 1 {
            if top[i][j] < 1.0 && top[i + 1][j] >= 1.0 {
                brackets.push((j + 1, lambdas[i], lambdas[i + 1]));
            }
        }
    }
    let crossings: Vec<Result<Crossing>> = brackets
        .par_iter()
        .map(|&(j, lo, hi)| Ok(Crossing { branch: j, lambda: bisect_branch(rep, v, m, j, lo, hi, crossing_tol, opts)? }))
        .collect();
    let crossings = crossings.into_iter().collect::<Result<Vec<_>>>()?;
    Ok(SpectralCurve { lambdas: lambdas.to_vec(), top, bottom, crossings, near_degenerate })
}

/// Gap eigenvalues of `D_m - V` on the grid, ascending, excluding those within `e_floor` of `m`.
pub fn gap_eigenvalues(rep: &CliffordRep, v: &PotentialField, m: f64, e_floor: f64, tol: f64, opts: &LanczosOpts) -> Result<Vec<f64>> {
    let lo = -m + 10.0 * tol;
    let hi = m - e_floor;
    let op_lo = BsOperator::dirac(rep, v, m, lo)?;
    let dived = count_at_least(&op_lo, 1.0, opts)?;
    if dived > 0 {
        return Err(Error::Supercritical(format!("{dived} branch(es) of K_V exceed 1 at the bottom of the gap")));
    }
    let op_hi = BsOperator::dirac(rep, v, m, hi)?;
    let count = count_at_least(&op_hi, 1.0, opts)?;
    let roots: Vec<Result<f64>> = (1..=count).into_par_iter().map(|j| bisect_branch(rep, v, m, j, lo, hi, tol, opts)).collect();
    let mut out = roots.into_iter().collect::<Result<Vec<_>>>()?;
    out.sort_by(|a, b| a.partial_cmp(b).unwrap());
    Ok(out)
}

/// `(N_e, B_e)`: eigenvalues at or below `m - e` (from `gap`), and eigenvalues of `K_V(m - e)` at least 1.
pub fn count_gap_eigenvalues(rep: &CliffordRep, v: &PotentialField, m: f64, e: f64, gap: &[f64], opts: &LanczosOpts) -> Result<(usize, usize)> {
    if !(e > 0.0 && e < 2.0 * m) {
        return domain(format!("energy offset {e} outside (0, 2m)"));
    }
    let n_e = gap.iter().filter(|&&l| l <= m - e).count();
    let op = BsOperator::dirac(rep, v, m, m - e)?;
    let b_e = count_at_least(&op, 1.0, opts)?;
    Ok((n_e, b_e))
}
