//! Named analytic potential families.

use std::f64::consts::PI;

use crate::error::{domain, Result};
use crate::exact_1d::{potential_critical, Keller1DParams};
use crate::grid::{GridSpec, PotentialField};
use crate::quad::{integrate, QuadOpts};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PotentialFamily {
    /// `amplitude * exp(-|x|^2 / length^2)`.
    Gaussian { amplitude: f64, length: f64 },
    /// Compact `cos^2(pi |x| / (2 width))` bump on `|x| < width`, scaled to total mass `mass`.
    Bump { mass: f64, width: f64 },
    /// One-dimensional optimizer with ground state at `lambda`.
    Keller1dSubcritical { p: f64, lambda: f64, m: f64 },
    /// One-dimensional critical optimizer.
    Keller1dCritical { p: f64, m: f64 },
}

fn bump_profile_mass(d: usize, width: f64) -> Result<f64> {
    let area = match d {
        1 => 2.0,
        2 => 2.0 * PI,
        3 => 4.0 * PI,
        _ => return domain(format!("unsupported dimension {d}")),
    };
    let r = integrate(|r: f64| r.powi(d as i32 - 1) * (PI * r / (2.0 * width)).cos().powi(2), 0.0, width, QuadOpts::rel(1e-13))?;
    Ok(area * r.value)
}

impl PotentialFamily {
    pub fn validate(&self, d: usize) -> Result<()> {
        match *self {
            Self::Gaussian { amplitude, length } if amplitude >= 0.0 && length > 0.0 => Ok(()),
            Self::Bump { mass, width } if mass >= 0.0 && width > 0.0 => Ok(()),
            Self::Keller1dSubcritical { p, lambda, m } if d == 1 => Keller1DParams::new(m, p, lambda).map(|_| ()),
            Self::Keller1dCritical { p, m } if d == 1 => potential_critical(m, p, 0.0).map(|_| ()),
            Self::Keller1dSubcritical { .. } | Self::Keller1dCritical { .. } => domain("the explicit optimizers are one-dimensional"),
            _ => domain(format!("invalid parameters for {self:?}")),
        }
    }

    /// Pointwise evaluator for dimension `d`.
    pub fn evaluator(&self, d: usize) -> Result<Box<dyn Fn(&[f64]) -> f64 + Send + Sync>> {
        self.validate(d)?;
        Ok(match *self {
            Self::Gaussian { amplitude, length } => {
                Box::new(move |x: &[f64]| amplitude * (-x.iter().map(|v| v * v).sum::<f64>() / (length * length)).exp())
            }
            Self::Bump { mass, width } => {
                let c = mass / bump_profile_mass(d, width)?;
                Box::new(move |x: &[f64]| {
                    let r = x.iter().map(|v| v * v).sum::<f64>().sqrt();
                    if r < width { c * (PI * r / (2.0 * width)).cos().powi(2) } else { 0.0 }
                })
            }
            Self::Keller1dSubcritical { p, lambda, m } => {
                let k = Keller1DParams::new(m, p, lambda)?;
                Box::new(move |x: &[f64]| k.potential(x[0]))
            }
            Self::Keller1dCritical { p, m } => Box::new(move |x: &[f64]| potential_critical(m, p, x[0]).unwrap_or(0.0)),
        })
    }

    pub fn field(&self, grid: GridSpec) -> Result<PotentialField> {
        let f = self.evaluator(grid.d)?;
        PotentialField::from_fn(grid, |x| f(x))
    }

    /// Support interval in d = 1 for compactly supported families.
    pub fn support_1d(&self) -> Option<(f64, f64)> {
        match *self {
            Self::Bump { width, .. } => Some((-width, width)),
            _ => None,
        }
    }
}
