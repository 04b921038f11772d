//! Angle formulation of the one-dimensional eigenvalue problem for compactly supported potentials.

use std::f64::consts::FRAC_PI_2;

use crate::error::{domain, Result};
use crate::ode::{dopri5, OdeOpts};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PruferOutcome {
    /// Angle at the right edge of the support.
    pub theta_end: f64,
    /// `pi/2 - theta_end`; zero exactly at a ground-state eigenvalue.
    pub theta_deficit: f64,
    /// `true` when the angle reached `pi/2` inside the support (lambda at or above the ground state).
    pub reaches_half_pi: bool,
}

/// Integrates `theta' = V - kappa sin(2 theta) + lambda (1 + cos(2 theta))` across `[left, right]`
/// starting from the free fixed point `arcsin(lambda/m)`. Equivalent to
/// `theta' = kappa [W - 2 kappa t / (m + 2 lambda t + m t^2)]` after writing `t` through `theta`.
pub fn prufer_angle(v: &dyn Fn(f64) -> f64, support: (f64, f64), m: f64, lambda: f64) -> Result<PruferOutcome> {
    if !(lambda.abs() < m) {
        return domain(format!("lambda = {lambda} outside the gap"));
    }
    let (left, right) = support;
    if !(right > left) {
        return domain("empty support");
    }
    let kappa = ((m - lambda) * (m + lambda)).sqrt();
    let theta0 = (lambda / m).asin();
    let rhs = |x: f64, y: &[f64], dy: &mut [f64]| {
        let t2 = 2.0 * y[0];
        dy[0] = v(x) - kappa * t2.sin() + lambda * (1.0 + t2.cos());
    };
    let opts = OdeOpts { abs_tol: 1e-12, rel_tol: 1e-12, h0: (right - left) * 1e-4, h_max: (right - left) / 40.0, ..OdeOpts::default() };
    let sol = dopri5(rhs, left, &[theta0], right, &opts, &[], false)?;
    let theta_end = sol.last().1[0];
    Ok(PruferOutcome { theta_end, theta_deficit: FRAC_PI_2 - theta_end, reaches_half_pi: theta_end >= FRAC_PI_2 })
}

/// Ground-state energy from the angle condition `theta(right) = pi/2`, by bisection in lambda.
/// Returns `None` when the potential is too weak on the sampled gap.
pub fn prufer_ground_state(v: &dyn Fn(f64) -> f64, support: (f64, f64), m: f64, tol: f64) -> Result<Option<f64>> {
    let mut lo = -m + 1e-12 * m;
    let mut hi = m - tol.min(1e-9 * m);
    if prufer_angle(v, support, m, hi)?.theta_end < FRAC_PI_2 {
        return Ok(None);
    }
    if prufer_angle(v, support, m, lo)?.theta_end > FRAC_PI_2 {
        return Err(crate::error::Error::Supercritical("angle exceeds pi/2 at the bottom of the gap".into()));
    }
    for _ in 0..200 {
        if hi - lo <= tol {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if prufer_angle(v, support, m, mid)?.theta_end >= FRAC_PI_2 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(Some(0.5 * (lo + hi)))
}

/// The strict Keller inequality `m cos(||V||_1) < lambda` for an eigenvalue `lambda`.
pub fn keller_cos_bound_holds(lambda: f64, l1_norm: f64, m: f64) -> bool {
    m * l1_norm.cos() < lambda
}
