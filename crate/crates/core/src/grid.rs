//! Periodic boxes, nonnegative potentials, spinor fields and FFT plumbing.

use std::sync::Arc;

use num_complex::Complex64 as C64;
use rustfft::{Fft, FftPlanner};

use crate::error::{domain, Result};

/// The box `[-a, a]^d` sampled with `L` points per direction; node `j` sits at `-a + j h`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub d: usize,
    pub a: f64,
    pub l: usize,
}

impl GridSpec {
    pub fn new(d: usize, a: f64, l: usize) -> Result<Self> {
        if !(1..=3).contains(&d) {
            return domain(format!("unsupported dimension {d}"));
        }
        if !(a > 0.0) || !a.is_finite() {
            return domain(format!("half width must be positive, got {a}"));
        }
        if l < 16 || l % 2 != 0 {
            return domain(format!("points per dimension must be even and >= 16, got {l}"));
        }
        Ok(Self { d, a, l })
    }

    pub fn spacing(&self) -> f64 {
        2.0 * self.a / self.l as f64
    }

    /// Quadrature weight `h^d`.
    pub fn cell(&self) -> f64 {
        self.spacing().powi(self.d as i32)
    }

    pub fn len(&self) -> usize {
        self.l.pow(self.d as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn coord_1d(&self, j: usize) -> f64 {
        -self.a + j as f64 * self.spacing()
    }

    /// Angular wavenumber of FFT bin `j` (numpy `2 pi fftfreq` ordering).
    pub fn wavenumber_1d(&self, j: usize) -> f64 {
        let l = self.l as i64;
        let jj = j as i64;
        let f = if jj < l / 2 { jj } else { jj - l };
        std::f64::consts::PI * f as f64 / self.a
    }

    /// Multi-index of flat node `idx`, first axis slowest.
    pub fn unravel(&self, mut idx: usize) -> [usize; 3] {
        let mut out = [0; 3];
        for ax in (0..self.d).rev() {
            out[ax] = idx % self.l;
            idx /= self.l;
        }
        out
    }

    pub fn ravel(&self, ix: &[usize]) -> usize {
        ix.iter().take(self.d).fold(0, |acc, &j| acc * self.l + j)
    }

    pub fn point(&self, idx: usize) -> [f64; 3] {
        let ix = self.unravel(idx);
        let mut x = [0.0; 3];
        for ax in 0..self.d {
            x[ax] = self.coord_1d(ix[ax]);
        }
        x
    }

    pub fn wavevector(&self, idx: usize) -> [f64; 3] {
        let ix = self.unravel(idx);
        let mut k = [0.0; 3];
        for ax in 0..self.d {
            k[ax] = self.wavenumber_1d(ix[ax]);
        }
        k
    }

    /// Index of the node at the origin.
    pub fn origin(&self) -> usize {
        self.ravel(&[self.l / 2; 3])
    }
}

/// Nonnegative real field on a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct PotentialField {
    pub grid: GridSpec,
    pub values: Vec<f64>,
}

impl PotentialField {
    pub fn new(grid: GridSpec, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return domain(format!("potential has {} values, grid has {}", values.len(), grid.len()));
        }
        if let Some(v) = values.iter().find(|v| !(**v >= 0.0) || !v.is_finite()) {
            return domain(format!("potential must be finite and nonnegative, found {v}"));
        }
        Ok(Self { grid, values })
    }

    pub fn from_fn(grid: GridSpec, f: impl Fn(&[f64]) -> f64) -> Result<Self> {
        let values = (0..grid.len()).map(|i| f(&grid.point(i)[..grid.d])).collect();
        Self::new(grid, values)
    }

    pub fn zeros(grid: GridSpec) -> Self {
        Self { grid, values: vec![0.0; grid.len()] }
    }

    /// `||V||_p` by the equal-weight rule.
    pub fn lp_norm(&self, p: f64) -> f64 {
        lp_norm(&self.values, p, self.grid.cell())
    }

    pub fn scaled(&self, t: f64) -> Result<Self> {
        Self::new(self.grid, self.values.iter().map(|v| v * t).collect())
    }
}

pub fn lp_norm(values: &[f64], p: f64, cell: f64) -> f64 {
    if p.is_infinite() {
        return values.iter().fold(0.0, |m, v| m.max(v.abs()));
    }
    (values.iter().map(|v| v.abs().powf(p)).sum::<f64>() * cell).powf(1.0 / p)
}

/// `N`-component complex field; component `c` occupies `values[c*len .. (c+1)*len]`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpinorField {
    pub grid: GridSpec,
    pub n_components: usize,
    pub values: Vec<C64>,
}

impl SpinorField {
    pub fn new(grid: GridSpec, n_components: usize, values: Vec<C64>) -> Result<Self> {
        if values.len() != grid.len() * n_components {
            return domain("spinor length does not match grid and component count");
        }
        Ok(Self { grid, n_components, values })
    }

    pub fn zeros(grid: GridSpec, n_components: usize) -> Self {
        Self { grid, n_components, values: vec![C64::default(); grid.len() * n_components] }
    }

    pub fn inner(&self, other: &SpinorField) -> C64 {
        dot(&self.values, &other.values) * self.grid.cell()
    }

    pub fn l2_norm(&self) -> f64 {
        (self.values.iter().map(|z| z.norm_sqr()).sum::<f64>() * self.grid.cell()).sqrt()
    }

    /// Pointwise `sum_c |psi_c|^2`.
    pub fn density(&self) -> Vec<f64> {
        let n = self.grid.len();
        (0..n).map(|i| (0..self.n_components).map(|c| self.values[c * n + i].norm_sqr()).sum()).collect()
    }
}

/// `sum conj(x_i) y_i`.
pub fn dot(x: &[C64], y: &[C64]) -> C64 {
    x.iter().zip(y).fold(C64::default(), |acc, (a, b)| acc + a.conj() * b)
}

/// Multidimensional FFT over an `L^d` block stored first-axis-slowest.
#[derive(Clone)]
pub struct FftNd {
    l: usize,
    d: usize,
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
}

impl std::fmt::Debug for FftNd {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "FftNd(L={}, d={})", self.l, self.d)
    }
}

impl FftNd {
    pub fn new(grid: &GridSpec) -> Self {
        let mut planner = FftPlanner::new();
        Self { l: grid.l, d: grid.d, fwd: planner.plan_fft_forward(grid.l), inv: planner.plan_fft_inverse(grid.l) }
    }

    fn run(&self, data: &mut [C64], plan: &Arc<dyn Fft<f64>>) {
        let l = self.l;
        let total = l.pow(self.d as u32);
        debug_assert_eq!(data.len(), total);
        // Last axis is contiguous.
        plan.process(data);
        let mut line = vec![C64::default(); l];
        for ax in 0..self.d.saturating_sub(1) {
            let stride = l.pow((self.d - 1 - ax) as u32);
            let outer = total / (stride * l);
            for o in 0..outer {
                for inner in 0..stride {
                    let base = o * stride * l + inner;
                    for j in 0..l {
                        line[j] = data[base + j * stride];
                    }
                    plan.process(&mut line);
                    for j in 0..l {
                        data[base + j * stride] = line[j];
                    }
                }
            }
        }
    }

    pub fn forward(&self, data: &mut [C64]) {
        self.run(data, &self.fwd);
    }

    /// Normalized inverse, so that `inverse(forward(u)) = u`.
    pub fn inverse(&self, data: &mut [C64]) {
        self.run(data, &self.inv);
        let s = 1.0 / data.len() as f64;
        data.iter_mut().for_each(|z| *z *= s);
    }
}
