//! Clifford representations, free Dirac symbols and the resolvent kernel.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;

use crate::error::{domain, Error, Result};
use crate::specfun::bessel_k;

pub type CMat = DMatrix<C64>;

const I: C64 = C64 { re: 0.0, im: 1.0 };
const ONE: C64 = C64 { re: 1.0, im: 0.0 };
const ZERO: C64 = C64 { re: 0.0, im: 0.0 };

pub fn pauli(j: usize) -> CMat {
    match j {
        1 => CMat::from_row_slice(2, 2, &[ZERO, ONE, ONE, ZERO]),
        2 => CMat::from_row_slice(2, 2, &[ZERO, -I, I, ZERO]),
        3 => CMat::from_row_slice(2, 2, &[ONE, ZERO, ZERO, -ONE]),
        _ => panic!("Pauli index {j} out of range"),
    }
}

/// Matrices `alpha_1..alpha_d, beta` of the free Dirac operator.
#[derive(Debug, Clone, PartialEq)]
pub struct CliffordRep {
    pub d: usize,
    pub n_components: usize,
    pub alphas: Vec<CMat>,
    pub beta: CMat,
}

pub fn clifford_rep(d: usize) -> Result<CliffordRep> {
    let (alphas, beta) = match d {
        1 => (vec![pauli(2)], pauli(3)),
        2 => (vec![pauli(1), pauli(2)], pauli(3)),
        3 => {
            let block = |s: &CMat| {
                let mut m = CMat::zeros(4, 4);
                m.view_mut((0, 2), (2, 2)).copy_from(s);
                m.view_mut((2, 0), (2, 2)).copy_from(s);
                m
            };
            let mut beta = CMat::identity(4, 4);
            beta[(2, 2)] = -ONE;
            beta[(3, 3)] = -ONE;
            ((1..=3).map(|j| block(&pauli(j))).collect(), beta)
        }
        _ => return domain(format!("unsupported dimension {d}")),
    };
    let n_components = 1usize << ((d + 1) / 2);
    Ok(CliffordRep { d, n_components, alphas, beta })
}

impl CliffordRep {
    /// Largest entrywise violation of the anticommutation relations and Hermiticity.
    pub fn relation_defect(&self) -> f64 {
        let n = self.n_components;
        let id = CMat::identity(n, n);
        let mut worst: f64 = 0.0;
        let mut bump = |m: CMat| worst = worst.max(m.iter().map(|z| z.norm()).fold(0.0, f64::max));
        let mut all = self.alphas.clone();
        all.push(self.beta.clone());
        for (j, a) in all.iter().enumerate() {
            for (k, b) in all.iter().enumerate() {
                let target = if j == k { &id * C64::from(2.0) } else { CMat::zeros(n, n) };
                bump(a * b + b * a - target);
            }
            bump(a - a.adjoint());
        }
        worst
    }

    /// `alpha . k + m beta`.
    pub fn dirac_symbol(&self, m: f64, k: &[f64]) -> CMat {
        let mut s = &self.beta * C64::from(m);
        for (a, kj) in self.alphas.iter().zip(k) {
            s += a * C64::from(*kj);
        }
        s
    }

    /// `(alpha . k + m beta + z) / (|k|^2 + m^2 - z^2)` for any complex energy off the spectrum.
    pub fn resolvent_symbol_complex(&self, m: f64, z: C64, k: &[f64]) -> CMat {
        let k2: f64 = k.iter().map(|v| v * v).sum();
        let n = self.n_components;
        let num = self.dirac_symbol(m, k) + CMat::identity(n, n) * z;
        num / (C64::from(k2 + m * m) - z * z)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResolventParams {
    pub m: f64,
    pub lambda: f64,
}

impl ResolventParams {
    pub fn new(m: f64, lambda: f64) -> Result<Self> {
        if !(m > 0.0) {
            return domain(format!("mass must be positive, got {m}"));
        }
        if !(lambda.abs() < m) {
            return domain(format!("lambda = {lambda} outside the open gap (-{m}, {m})"));
        }
        Ok(Self { m, lambda })
    }

    pub fn kappa(&self) -> f64 {
        ((self.m - self.lambda) * (self.m + self.lambda)).sqrt()
    }
}

/// Fourier symbol of `(D_m - lambda)^{-1}`.
pub fn resolvent_symbol(rep: &CliffordRep, params: &ResolventParams, k: &[f64]) -> Result<CMat> {
    ResolventParams::new(params.m, params.lambda)?;
    Ok(rep.resolvent_symbol_complex(params.m, C64::from(params.lambda), k))
}

/// Position-space kernel of `(D_m - lambda)^{-1}` at `x != 0`, written with Bessel K.
pub fn resolvent_kernel(rep: &CliffordRep, params: &ResolventParams, x: &[f64]) -> Result<CMat> {
    let p = ResolventParams::new(params.m, params.lambda)?;
    let r = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    if r == 0.0 {
        return Err(Error::Singular("resolvent kernel evaluated at x = 0".into()));
    }
    let d = rep.d as f64;
    let kappa = p.kappa();
    let c = (kappa / (2.0 * PI)).powf(d / 2.0 - 1.0) / (2.0 * PI) / r.powf(d / 2.0 - 1.0);
    let k_odd = bessel_k(d / 2.0, kappa * r)?;
    let k_even = bessel_k((d / 2.0 - 1.0).abs(), kappa * r)?;
    let n = rep.n_components;
    let mut out = (&rep.beta * C64::from(p.m) + CMat::identity(n, n) * C64::from(p.lambda)) * C64::from(k_even);
    for (a, xj) in rep.alphas.iter().zip(x) {
        out += a * (I * (xj / r) * kappa * k_odd);
    }
    Ok(out * C64::from(c))
}
