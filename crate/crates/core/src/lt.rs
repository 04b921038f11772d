//! Lieb-Thirring bound for gap eigenvalues: constant, right-hand side and the counting chain.

use std::f64::consts::PI;

use rayon::prelude::*;

use crate::bs::{count_at_least, count_gap_eigenvalues, gap_eigenvalues, BsOperator};
use crate::dirac::CliffordRep;
use crate::error::{domain, Result};
use crate::grid::PotentialField;
use crate::lanczos::LanczosOpts;
use crate::quad::{integrate, QuadOpts};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LtParams {
    pub gamma: f64,
    pub p: f64,
    pub m: f64,
    pub d: usize,
}

impl LtParams {
    pub fn new(gamma: f64, p: f64, m: f64, d: usize) -> Result<Self> {
        let df = d as f64;
        if !(1..=3).contains(&d) {
            return domain(format!("unsupported dimension {d}"));
        }
        if !(gamma > df / 2.0) {
            return domain(format!("need gamma > d/2, got gamma = {gamma}"));
        }
        if !(p > df && p <= gamma + df / 2.0 + 1e-12) {
            return domain(format!("need d < p <= gamma + d/2, got p = {p}"));
        }
        if !(m > 0.0) {
            return domain("mass must be positive");
        }
        Ok(Self { gamma, p, m, d })
    }
}

fn sphere_area(d: usize) -> f64 {
    match d {
        1 => 2.0,
        2 => 2.0 * PI,
        _ => 4.0 * PI,
    }
}

/// `int_0^inf (X(eX + 2m))^{d/2-1} (eX + m) / (X+1)^p dX`.
pub fn x_integral(e: f64, m: f64, p: f64, d: usize) -> Result<f64> {
    if !(p > d as f64) {
        return domain("the X-integral converges only for p > d");
    }
    let df = d as f64;
    let f = move |x: f64| (x * (e * x + 2.0 * m)).powf(df / 2.0 - 1.0) * (e * x + m) / (x + 1.0).powf(p);
    // X = u^2 on [0, 1] absorbs the X^{-1/2} endpoint behaviour of d = 1.
    let head = integrate(|u: f64| 2.0 * u * f(u * u), 0.0, 1.0, QuadOpts::rel(1e-12))?;
    // The tail decays like X^{d-1-p}; X = u^{-1/s}, s = p - d, turns it into a bounded integrand on (0, 1].
    let s = p - df;
    let tail = integrate(|u: f64| f(u.powf(-1.0 / s)) * u.powf(-1.0 / s - 1.0) / s, 0.0, 1.0, QuadOpts::rel(1e-12))?;
    Ok(head.value + tail.value)
}

/// `C_{p,d} = (2 pi)^{-d} |S^{d-1}| J_0`, with `J_0` the X-integral at `e = 2m` divided by `m^{d/2}`.
pub fn c_pd(p: f64, d: usize) -> Result<f64> {
    Ok((2.0 * PI).powi(-(d as i32)) * sphere_area(d) * x_integral(2.0, 1.0, p, d)?)
}

fn n_components(d: usize) -> f64 {
    (1usize << ((d + 1) / 2)) as f64
}

/// Interior constant `gamma N C_{p,d} 2^gamma / (gamma + d/2 - p)`.
fn interior_constant(gamma: f64, d: usize, p: f64) -> Result<f64> {
    let q = gamma + d as f64 / 2.0 - p;
    Ok(gamma * n_components(d) * c_pd(p, d)? * 2f64.powf(gamma) / q)
}

#[derive(Debug, Clone, PartialEq)]
pub struct LtConstant {
    pub value: f64,
    /// Exponent whose interior constant was used (differs from `p` at the endpoint).
    pub p_used: f64,
    pub c_pd: f64,
    pub n_components: f64,
    pub assembly: String,
}

/// `L_{gamma,d,p}`; at `p = gamma + d/2` the minimum over interior exponents is used.
pub fn lt_constant(gamma: f64, d: usize, p: f64, m: f64) -> Result<LtConstant> {
    let prm = LtParams::new(gamma, p, m, d)?;
    let df = d as f64;
    let endpoint = (prm.p - (gamma + df / 2.0)).abs() < 1e-9;
    let p_used = if endpoint {
        // golden-section search of p' -> L(p') on (d, p)
        let f = |x: f64| interior_constant(gamma, d, x).unwrap_or(f64::INFINITY);
        let (mut a, mut b) = (df + 1e-6, p - 1e-6);
        let r = (5f64.sqrt() - 1.0) / 2.0;
        let mut c = b - r * (b - a);
        let mut e = a + r * (b - a);
        let (mut fc, mut fe) = (f(c), f(e));
        for _ in 0..80 {
            if fc < fe {
                b = e;
                e = c;
                fe = fc;
                c = b - r * (b - a);
                fc = f(c);
            } else {
                a = c;
                c = e;
                fc = fe;
                e = a + r * (b - a);
                fe = f(e);
            }
        }
        0.5 * (a + b)
    } else {
        prm.p
    };
    let c = c_pd(p_used, d)?;
    let value = interior_constant(gamma, d, p_used)?;
    let assembly = format!(
        "L = gamma * N * C_pd * 2^gamma / (gamma + d/2 - p') with gamma = {gamma}, N = {}, C_pd = (2pi)^-d |S^(d-1)| J0(p') = {c:.6e}, p' = {p_used:.6}{}",
        n_components(d),
        if endpoint { " (endpoint: minimum over p' in (d, p), valid since V_m^(p-p') V^p' <= V^p)" } else { "" }
    );
    Ok(LtConstant { value, p_used, c_pd: c, n_components: n_components(d), assembly })
}

/// `L m^{d/2} int V_m^{gamma + d/2 - p} V^p dx`.
pub fn lt_rhs(v: &PotentialField, params: &LtParams) -> Result<(f64, LtConstant)> {
    if v.grid.d != params.d {
        return domain("potential and parameters disagree on dimension");
    }
    let k = lt_constant(params.gamma, params.d, params.p, params.m)?;
    let q = params.gamma + params.d as f64 / 2.0 - params.p;
    let integral: f64 = v.values.iter().map(|&x| x.min(params.m).powf(q) * x.powf(params.p)).sum::<f64>() * v.grid.cell();
    Ok((k.value * params.m.powf(params.d as f64 / 2.0) * integral, k))
}

#[derive(Debug, Clone, PartialEq)]
pub struct RieszMean {
    pub eigenvalues: Vec<f64>,
    /// `sum_k (m - lambda_k)^gamma`.
    pub direct: f64,
    /// `gamma int_0^{2m} e^{gamma-1} N_e de` by the trapezoid rule on sampled `N_e`.
    pub layer_cake: f64,
}

pub fn riesz_mean_from(eigenvalues: &[f64], m: f64, gamma: f64) -> RieszMean {
    let direct = eigenvalues.iter().map(|l| (m - l).powf(gamma)).sum();
    let n = 4000;
    let h = 2.0 * m / n as f64;
    let integrand = |e: f64| gamma * e.powf(gamma - 1.0) * eigenvalues.iter().filter(|&&l| l <= m - e).count() as f64;
    let mut layer_cake = 0.5 * (integrand(0.0) + integrand(2.0 * m));
    for i in 1..n {
        layer_cake += integrand(i as f64 * h);
    }
    RieszMean { eigenvalues: eigenvalues.to_vec(), direct, layer_cake: layer_cake * h }
}

/// Riesz mean of the gap eigenvalues of `D_m - V` on the grid.
pub fn riesz_mean(rep: &CliffordRep, v: &PotentialField, m: f64, gamma: f64, tol: f64, opts: &LanczosOpts) -> Result<RieszMean> {
    if !(gamma > 0.0) {
        return domain("gamma must be positive");
    }
    let ev = gap_eigenvalues(rep, v, m, 1e-3 * m, tol, opts)?;
    Ok(riesz_mean_from(&ev, m, gamma))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChainRow {
    pub e: f64,
    pub n_e: usize,
    pub b_e: usize,
    pub n_times_bpr: usize,
}

impl ChainRow {
    pub fn holds(&self) -> bool {
        self.n_e <= self.b_e && self.b_e <= self.n_times_bpr
    }
}

/// 32 log-spaced offsets in `(1e-3 m, 2m)`.
pub fn default_e_samples(m: f64) -> Vec<f64> {
    let (a, b) = ((1e-3 * m).ln(), (1.999 * m).ln());
    (0..32).map(|i| (a + (b - a) * i as f64 / 31.0).exp()).collect()
}

/// `N_e <= B_e <= N B_e^pr` at each sample; `gap` are the grid gap eigenvalues.
pub fn verify_counting_chain(rep: &CliffordRep, v: &PotentialField, m: f64, e_samples: &[f64], gap: &[f64], opts: &LanczosOpts) -> Result<Vec<ChainRow>> {
    let n = rep.n_components;
    e_samples
        .par_iter()
        .map(|&e| {
            let (n_e, b_e) = count_gap_eigenvalues(rep, v, m, e, gap, opts)?;
            let pr = BsOperator::pseudo_relativistic(v, m, e)?;
            let b_pr = count_at_least(&pr, 1.0, opts)?;
            Ok(ChainRow { e, n_e, b_e, n_times_bpr: n * b_pr })
        })
        .collect()
}
