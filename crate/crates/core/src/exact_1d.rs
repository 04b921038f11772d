//! Closed-form one-dimensional Keller optimizers and their consequences.

use std::f64::consts::PI;

use num_complex::Complex64 as C64;

use crate::error::{domain, Error, Result};
use crate::specfun::{beta, hyp2f1_nonpos};

/// `(m, p, lambda)` for the explicit one-dimensional optimizer, `p > 1` and `-m < lambda < m`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Keller1DParams {
    pub m: f64,
    pub p: f64,
    pub lambda: f64,
}

impl Keller1DParams {
    pub fn new(m: f64, p: f64, lambda: f64) -> Result<Self> {
        if !(m > 0.0) {
            return domain(format!("mass must be positive, got {m}"));
        }
        if !(p > 1.0) {
            return domain(format!("explicit optimizer needs p > 1, got {p}"));
        }
        if lambda <= -m {
            return domain("lambda = -m is the critical case, use potential_critical");
        }
        if !(lambda < m) {
            return domain(format!("lambda = {lambda} outside the gap"));
        }
        Ok(Self { m, p, lambda })
    }

    pub fn kappa(&self) -> f64 {
        ((self.m - self.lambda) * (self.m + self.lambda)).sqrt()
    }

    pub fn a_coef(&self) -> f64 {
        self.p / (self.p - 1.0) * (self.m - self.lambda) * (self.m + self.lambda)
    }

    /// Exponential decay rate of the optimal potential.
    pub fn b_coef(&self) -> f64 {
        2.0 / (self.p - 1.0) * self.kappa()
    }

    pub fn z0(&self) -> f64 {
        (self.m - self.lambda) / (self.m + self.lambda)
    }

    /// `V(x) = A / (m cosh(B x) + lambda)`.
    pub fn potential(&self, x: f64) -> f64 {
        let bx = (self.b_coef() * x).abs();
        // Written with exp(-Bx) so the far tail does not overflow.
        let e = (-bx).exp();
        2.0 * self.a_coef() * e / (self.m * (1.0 + e * e) + 2.0 * self.lambda * e)
    }

    /// Spinor `(phi, chi)` of the nonlinear equation with `chi(0) = 0`, `phi(0) > 0`.
    pub fn spinor(&self, x: f64) -> (f64, f64) {
        let (m, p, l) = (self.m, self.p, self.lambda);
        let v = self.potential(x);
        let vp = v.powf(p - 1.0);
        let phi = (vp * (m + l + (p - 1.0) / p * v) / (2.0 * m)).max(0.0).sqrt();
        let chi = (vp * (m - l - (p - 1.0) / p * v) / (2.0 * m)).max(0.0).sqrt();
        (phi, if x < 0.0 { -chi } else { chi })
    }
}

pub fn potential_subcritical(params: &Keller1DParams, x: f64) -> f64 {
    params.potential(x)
}

/// `V(x) = zeta p / (1 + zeta^2 x^2)` with `zeta = 2m/(p-1)`.
pub fn potential_critical(m: f64, p: f64, x: f64) -> Result<f64> {
    if !(p > 1.0) {
        return domain(format!("critical potential needs p > 1, got {p}"));
    }
    if !(m > 0.0) {
        return domain(format!("mass must be positive, got {m}"));
    }
    let zeta = 2.0 * m / (p - 1.0);
    Ok(zeta * p / (1.0 + zeta * zeta * x * x))
}

/// Optimal `L^p` norm for a ground state at `lambda`, including the `p = 1` law.
pub fn alpha_d(lambda: f64, p: f64, m: f64) -> Result<f64> {
    if !(m > 0.0) {
        return domain(format!("mass must be positive, got {m}"));
    }
    if !(lambda >= -m && lambda <= m) {
        return domain(format!("lambda = {lambda} outside [-m, m]"));
    }
    if p == 1.0 {
        return Ok((lambda / m).acos());
    }
    if !(p > 1.0) {
        return domain(format!("p must be >= 1, got {p}"));
    }
    if lambda == -m {
        return alpha_star(p, m);
    }
    if lambda == m {
        return Ok(0.0);
    }
    let z0 = (m - lambda) / (m + lambda);
    let ln = p * p.ln() + (p - 1.0) * ((m + lambda) / (p - 1.0)).ln() + (p - 0.5) * z0.ln() + beta(0.5, p)?.ln();
    let f = hyp2f1_nonpos(0.5, p, p + 0.5, -z0)?;
    Ok((ln / p).exp() * f.powf(1.0 / p))
}

/// Critical norm at which the ground state reaches `-m`.
pub fn alpha_star(p: f64, m: f64) -> Result<f64> {
    if !(p > 1.0) {
        return domain(format!("alpha_star needs p > 1, got {p}"));
    }
    if !(m > 0.0) {
        return domain(format!("mass must be positive, got {m}"));
    }
    Ok(p * (2.0 * m / (p - 1.0)).powf((p - 1.0) / p) * beta(0.5, p - 0.5)?.powf(1.0 / p))
}

/// The `p -> 1+` value of `alpha_star`.
pub const ALPHA_STAR_P1: f64 = PI;

/// Inverse of `lambda -> alpha_d(lambda, p)`: the optimal Keller lower bound on the ground state.
pub fn lambda_d_1d(alpha: f64, p: f64, m: f64) -> Result<f64> {
    if !(alpha > 0.0) {
        return domain(format!("alpha must be positive, got {alpha}"));
    }
    let crit = if p == 1.0 { PI } else { alpha_star(p, m)? };
    if alpha >= crit {
        return Err(Error::Supercritical(format!("alpha = {alpha} >= alpha_star = {crit}")));
    }
    if p == 1.0 {
        return Ok(m * alpha.cos());
    }
    let (mut lo, mut hi) = (-m, m);
    for _ in 0..200 {
        if hi - lo <= 1e-12 * m {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if alpha_d(mid, p, m)? > alpha {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Conserved quantities `(H, G)` of the one-dimensional nonlinear system.
pub fn conservation(phi: C64, chi: C64, m: f64, p: f64, lambda: f64) -> (f64, C64) {
    let s = chi.norm_sqr() + phi.norm_sqr();
    let h = m * (chi.norm_sqr() - phi.norm_sqr()) + lambda * s + (p - 1.0) / p * s.powf(p / (p - 1.0));
    let g = chi.conj() * phi - phi.conj() * chi;
    (h, g)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalConstants {
    pub hbar: f64,
    pub c: f64,
    pub m: f64,
}

impl PhysicalConstants {
    pub fn new(hbar: f64, c: f64, m: f64) -> Result<Self> {
        if !(hbar > 0.0 && c > 0.0 && m > 0.0) {
            return domain("hbar, c and m must be positive");
        }
        Ok(Self { hbar, c, m })
    }
}

/// Keller threshold with units restored; only the one-dimensional closed form is available.
pub fn nonrel_alpha(k: &PhysicalConstants, lambda: f64, p: f64, d: usize) -> Result<f64> {
    if d != 1 {
        return domain("the closed-form threshold exists only for d = 1");
    }
    let mc2 = k.m * k.c * k.c;
    if !(lambda.abs() < mc2) {
        return domain(format!("lambda = {lambda} outside (-mc^2, mc^2)"));
    }
    let df = d as f64;
    Ok(k.hbar.powf(df / p) * k.m.powf(1.0 - df / p) * k.c.powf(2.0 - df / p) * alpha_d(lambda / mc2, p, 1.0)?)
}

/// `K_p` of the small-alpha expansion.
pub fn nonrel_kp(p: f64) -> Result<f64> {
    let inner = p.powf(p) * (p - 1.0).powf(-(p - 1.0)) * beta(0.5, p)?;
    Ok(inner.powf(-2.0 / (2.0 * p - 1.0)))
}

/// Leading behaviour of `1 - Lambda_D(alpha, p)` (m = 1) as `alpha -> 0`.
pub fn nonrel_expansion(alpha: f64, p: f64, d: usize) -> Result<f64> {
    let df = d as f64;
    if !(2.0 * p > df) {
        return domain("expansion needs 2p > d");
    }
    let eta = 2.0 * p / (2.0 * p - df);
    Ok(2f64.powf(df / (2.0 * p - df)) * nonrel_kp(p)? * alpha.powf(eta))
}

/// Root `X >= 0` of `nu X^{p-1} = a + b / (c + X)^2`.
pub fn implicit_potential_pointwise(a: f64, b: f64, c: f64, nu: f64, p: f64) -> Result<f64> {
    if !(a >= 0.0 && b >= 0.0 && c >= 0.0) {
        return domain("a, b, c must be nonnegative");
    }
    if !(nu > 0.0 && p > 1.0) {
        return domain("need nu > 0 and p > 1");
    }
    if a == 0.0 && b == 0.0 {
        return Ok(0.0);
    }
    let f = |x: f64| nu * x.powf(p - 1.0) - a - b / ((c + x) * (c + x));
    let mut lo = 0.0;
    let mut hi = 1.0;
    while f(hi) < 0.0 {
        lo = hi;
        hi *= 2.0;
    }
    let target = 1e-12 * a.max(nu);
    for _ in 0..300 {
        let mid = 0.5 * (lo + hi);
        let v = f(mid);
        if v.abs() <= target || hi - lo <= f64::EPSILON * hi {
            return Ok(mid);
        }
        if v < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}
