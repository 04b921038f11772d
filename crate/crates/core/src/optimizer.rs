//! Self-consistent iteration `W_{k+1} = |phi_k|^{2/p}` for optimal two-dimensional potentials.

use num_complex::Complex64 as C64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::bs::BsOperator;
use crate::dirac::CliffordRep;
use crate::error::{domain, Result};
use crate::grid::{lp_norm, FftNd, GridSpec, PotentialField, SpinorField};
use crate::lanczos::{extremal_eigs, LanczosOpts};

#[derive(Debug, Clone, Copy)]
pub struct ScfConfig {
    pub p: f64,
    pub lambda: f64,
    pub m: f64,
    pub seed: u64,
    pub max_iter: usize,
    pub conv_tol: f64,
    /// Gaussian cutoff (in wavenumber) of the random initial field.
    pub init_bandwidth: f64,
    pub lanczos: LanczosOpts,
}

impl Default for ScfConfig {
    fn default() -> Self {
        Self {
            p: 3.0,
            lambda: 0.5,
            m: 1.0,
            seed: 1,
            max_iter: 200,
            conv_tol: 1e-6,
            init_bandwidth: 1.0,
            lanczos: LanczosOpts { tol: 1e-10, ..LanczosOpts::default() },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScfRecord {
    pub iter: usize,
    pub mu1: f64,
    pub step_norm: f64,
    pub radiality: f64,
    /// Top gap of `K_W` below 1e-8; the eigenvector was picked by overlap.
    pub degenerate: bool,
}

#[derive(Debug, Clone)]
pub struct ScfState {
    pub iteration: usize,
    /// Current potential, `||W||_p = 1`.
    pub w: PotentialField,
    /// `mu_1(K_W(lambda))`.
    pub mu1: f64,
    /// Top eigenvector of `K_W`, unit in `L^2`.
    pub phi: SpinorField,
    pub history: Vec<ScfRecord>,
    pub converged: bool,
    /// Iteration at which `mu_1` decreased by more than 1e-8, if any.
    pub monotonicity_break: Option<usize>,
}

fn check(grid: &GridSpec, cfg: &ScfConfig) -> Result<()> {
    if grid.d != 2 {
        return domain("the self-consistent iteration is implemented for d = 2");
    }
    if !(cfg.p > grid.d as f64) {
        return domain(format!("need p > d, got p = {}", cfg.p));
    }
    if !(cfg.lambda.abs() < cfg.m) {
        return domain("lambda must lie inside the gap");
    }
    Ok(())
}

/// `|band-limited Gaussian noise|`, normalized in `L^p`.
pub fn random_initial_potential(grid: GridSpec, p: f64, bandwidth: f64, seed: u64) -> Result<PotentialField> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut data: Vec<C64> = (0..grid.len()).map(|_| { let z: f64 = StandardNormal.sample(&mut rng); C64::from(z) }).collect();
    let fft = FftNd::new(&grid);
    fft.forward(&mut data);
    for (i, z) in data.iter_mut().enumerate() {
        let k = grid.wavevector(i);
        let k2: f64 = k[..grid.d].iter().map(|x| x * x).sum();
        *z *= (-k2 / (2.0 * bandwidth * bandwidth)).exp();
    }
    fft.inverse(&mut data);
    let vals: Vec<f64> = data.iter().map(|z| z.re.abs()).collect();
    let n = lp_norm(&vals, p, grid.cell());
    PotentialField::new(grid, vals.into_iter().map(|v| v / n).collect())
}

/// Torus roll moving the (lexicographically first) maximum to the origin node.
pub fn recenter(w: &PotentialField) -> PotentialField {
    let g = w.grid;
    let (imax, _) = w.values.iter().enumerate().fold((0, f64::NEG_INFINITY), |b, (i, &v)| if v > b.1 { (i, v) } else { b });
    let from = g.unravel(imax);
    let mut out = vec![0.0; g.len()];
    for (i, &v) in w.values.iter().enumerate() {
        let ix = g.unravel(i);
        let mut jx = [0usize; 3];
        for ax in 0..g.d {
            jx[ax] = (ix[ax] + g.l + g.l / 2 - from[ax]) % g.l;
        }
        out[g.ravel(&jx)] = v;
    }
    PotentialField { grid: g, values: out }
}

fn top_pair(rep: &CliffordRep, w: &PotentialField, cfg: &ScfConfig, prev: Option<&SpinorField>) -> Result<(f64, SpinorField, bool)> {
    let op = BsOperator::dirac(rep, w, cfg.m, cfg.lambda)?;
    let start: Vec<Vec<C64>> = prev.map(|p| vec![p.values.clone()]).unwrap_or_default();
    let r = extremal_eigs(&op, 2, 0, &cfg.lanczos, &start)?;
    let degenerate = r.top[0] - r.top[1] < 1e-8;
    let mut pick = 0;
    if degenerate {
        if let Some(p) = prev {
            let ov = |v: &Vec<C64>| crate::grid::dot(&p.values, v).norm();
            pick = if ov(&r.top_vecs[1]) > ov(&r.top_vecs[0]) { 1 } else { 0 };
        }
    }
    let s = 1.0 / w.grid.cell().sqrt();
    let vals = r.top_vecs[pick].iter().map(|z| z * s).collect();
    Ok((r.top[pick], SpinorField::new(w.grid, rep.n_components, vals)?, degenerate))
}

/// Initial state: random `W_0` and its top eigenpair.
pub fn init_scf(rep: &CliffordRep, grid: GridSpec, cfg: &ScfConfig) -> Result<ScfState> {
    check(&grid, cfg)?;
    let w = random_initial_potential(grid, cfg.p, cfg.init_bandwidth, cfg.seed)?;
    let (mu1, phi, _) = top_pair(rep, &w, cfg, None)?;
    Ok(ScfState { iteration: 0, w, mu1, phi, history: Vec::new(), converged: false, monotonicity_break: None })
}

/// One update `W <- recenter(|phi|^{2/p})` followed by the new top eigenpair.
pub fn scf_step(rep: &CliffordRep, state: &ScfState, cfg: &ScfConfig) -> Result<ScfState> {
    check(&state.w.grid, cfg)?;
    let grid = state.w.grid;
    let dens = state.phi.density();
    let raw = PotentialField::new(grid, dens.iter().map(|r| r.powf(1.0 / cfg.p)).collect())?;
    let w_new = recenter(&raw);
    let diff: Vec<f64> = w_new.values.iter().zip(&state.w.values).map(|(a, b)| a - b).collect();
    let step_norm = lp_norm(&diff, cfg.p, grid.cell());
    // The previous eigenvector is rolled with the potential so it stays a good start vector.
    let shift_prev = roll_like(&state.phi, &raw, &w_new);
    let (mu1, phi, degenerate) = top_pair(rep, &w_new, cfg, Some(&shift_prev))?;
    let radiality = radiality_metric(&w_new, cfg.p)?;
    let iteration = state.iteration + 1;
    let mut history = state.history.clone();
    history.push(ScfRecord { iter: iteration, mu1, step_norm, radiality, degenerate });
    let monotonicity_break = state.monotonicity_break.or(if mu1 < state.mu1 - 1e-8 { Some(iteration) } else { None });
    Ok(ScfState { iteration, w: w_new, mu1, phi, history, converged: step_norm < cfg.conv_tol, monotonicity_break })
}

fn roll_like(phi: &SpinorField, before: &PotentialField, after: &PotentialField) -> SpinorField {
    let g = phi.grid;
    let arg = |w: &PotentialField| w.values.iter().enumerate().fold((0, f64::NEG_INFINITY), |b, (i, &v)| if v > b.1 { (i, v) } else { b }).0;
    let from = g.unravel(arg(before));
    let to = g.unravel(arg(after));
    let n = g.len();
    let mut out = SpinorField::zeros(g, phi.n_components);
    for c in 0..phi.n_components {
        for i in 0..n {
            let ix = g.unravel(i);
            let mut jx = [0usize; 3];
            for ax in 0..g.d {
                jx[ax] = (ix[ax] + g.l + to[ax] - from[ax]) % g.l;
            }
            out.values[c * n + g.ravel(&jx)] = phi.values[c * n + i];
        }
    }
    out
}

/// Iterates until `||W_{k+1} - W_k||_p < conv_tol`, `max_iter`, or a decrease of `mu_1`.
pub fn run_scf(rep: &CliffordRep, grid: GridSpec, cfg: &ScfConfig) -> Result<ScfState> {
    let mut state = init_scf(rep, grid, cfg)?;
    while state.iteration < cfg.max_iter {
        state = scf_step(rep, &state, cfg)?;
        if state.converged || state.monotonicity_break.is_some() {
            break;
        }
    }
    Ok(state)
}

fn spectral_gradient_2d(w: &PotentialField) -> (Vec<f64>, Vec<f64>) {
    let g = w.grid;
    let fft = FftNd::new(&g);
    let mut hat: Vec<C64> = w.values.iter().map(|&v| C64::from(v)).collect();
    fft.forward(&mut hat);
    let mut gx = hat.clone();
    let mut gy = hat;
    for i in 0..g.len() {
        let k = g.wavevector(i);
        // Drop the unpaired Nyquist mode so derivatives of real fields stay real.
        let nyq = |j: usize| j == g.l / 2;
        let ix = g.unravel(i);
        gx[i] *= if nyq(ix[0]) { C64::default() } else { C64::new(0.0, k[0]) };
        gy[i] *= if nyq(ix[1]) { C64::default() } else { C64::new(0.0, k[1]) };
    }
    fft.inverse(&mut gx);
    fft.inverse(&mut gy);
    (gx.iter().map(|z| z.re).collect(), gy.iter().map(|z| z.re).collect())
}

/// `||x d_y W - y d_x W||_p` about the grid origin.
pub fn radiality_metric(w: &PotentialField, p: f64) -> Result<f64> {
    radiality_metric_about(w, p, [0.0, 0.0])
}

/// Angular-derivative norm about an arbitrary center.
pub fn radiality_metric_about(w: &PotentialField, p: f64, center: [f64; 2]) -> Result<f64> {
    if w.grid.d != 2 {
        return domain("radiality metric is defined for d = 2");
    }
    let (gx, gy) = spectral_gradient_2d(w);
    let vals: Vec<f64> = (0..w.grid.len())
        .map(|i| {
            let x = w.grid.point(i);
            (x[0] - center[0]) * gy[i] - (x[1] - center[1]) * gx[i]
        })
        .collect();
    Ok(lp_norm(&vals, p, w.grid.cell()))
}

/// Center of mass of `W^p`.
pub fn lp_centroid(w: &PotentialField, p: f64) -> [f64; 2] {
    let mut c = [0.0; 2];
    let mut mass = 0.0;
    for (i, &v) in w.values.iter().enumerate() {
        let x = w.grid.point(i);
        let wp = v.powf(p);
        mass += wp;
        c[0] += wp * x[0];
        c[1] += wp * x[1];
    }
    [c[0] / mass, c[1] / mass]
}

/// `w = sqrt(W) phi`.
pub fn w_field(w: &PotentialField, phi: &SpinorField) -> SpinorField {
    let n = w.grid.len();
    let mut out = phi.clone();
    for c in 0..phi.n_components {
        for i in 0..n {
            out.values[c * n + i] *= w.values[i].sqrt();
        }
    }
    out
}

/// `||R_0(lambda) w - tau |w|^{-2/(p+1)} w||_2 / ||w||_2`.
pub fn el_residual(rep: &CliffordRep, w: &SpinorField, m: f64, lambda: f64, p: f64, tau: f64) -> Result<f64> {
    let ones = PotentialField::new(w.grid, vec![1.0; w.grid.len()])?;
    let r0 = BsOperator::dirac(rep, &ones, m, lambda)?;
    let rw = r0.apply(w)?;
    let n = w.grid.len();
    let amp: Vec<f64> = w.density().iter().map(|d| d.sqrt()).collect();
    let mut num = 0.0;
    for c in 0..w.n_components {
        for i in 0..n {
            let z = w.values[c * n + i];
            let nl = if amp[i] > 0.0 { z * (tau * amp[i].powf(-2.0 / (p + 1.0))) } else { C64::default() };
            num += (rw.values[c * n + i] - nl).norm_sqr();
        }
    }
    let den: f64 = w.values.iter().map(|z| z.norm_sqr()).sum();
    Ok((num / den).sqrt())
}
