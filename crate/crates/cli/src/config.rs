//! JSON run configurations. Every field has a default, so `{}` is a valid config.

use std::path::PathBuf;

use dirac_gap::potentials::PotentialFamily;
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(tag = "family", rename_all = "kebab-case", deny_unknown_fields)]
pub enum PotentialSpec {
    Gaussian { amplitude: f64, length: f64 },
    Bump { mass: f64, width: f64 },
    #[serde(rename = "paper-1d-subcritical", alias = "keller-1d-subcritical")]
    Keller1dSubcritical { p: f64, lambda: f64, m: f64 },
    #[serde(rename = "paper-1d-critical", alias = "keller-1d-critical")]
    Keller1dCritical { p: f64, m: f64 },
    /// Columns `x1..xd, V` on exactly the run grid.
    Csv { path: PathBuf },
}

impl PotentialSpec {
    pub fn family(&self) -> Option<PotentialFamily> {
        Some(match *self {
            Self::Gaussian { amplitude, length } => PotentialFamily::Gaussian { amplitude, length },
            Self::Bump { mass, width } => PotentialFamily::Bump { mass, width },
            Self::Keller1dSubcritical { p, lambda, m } => PotentialFamily::Keller1dSubcritical { p, lambda, m },
            Self::Keller1dCritical { p, m } => PotentialFamily::Keller1dCritical { p, m },
            Self::Csv { .. } => return None,
        })
    }
}

fn default_gaussian() -> PotentialSpec {
    PotentialSpec::Gaussian { amplitude: 2.0, length: 2.0 }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Keller1dConfig {
    pub m: f64,
    /// Exponents for `alpha_star.csv`; defaults to 400 log-spaced points in `[1.0001, 500]`.
    pub p_grid: Vec<f64>,
    /// Exponents whose curves `alpha -> Lambda_D` go to `lambda_curves.csv`.
    pub curve_p: Vec<f64>,
    pub alpha_points: usize,
}

impl Default for Keller1dConfig {
    fn default() -> Self {
        let (a, b) = (1.0001f64.ln(), 500f64.ln());
        Self {
            m: 1.0,
            p_grid: (0..400).map(|i| (a + (b - a) * i as f64 / 399.0).exp()).collect(),
            curve_p: vec![1.0, 1.32, 2.0, 4.0, 10.0],
            alpha_points: 100,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BsSpectrumConfig {
    pub d: usize,
    pub a: f64,
    #[serde(rename = "L")]
    pub l: usize,
    pub m: f64,
    pub potential: PotentialSpec,
    /// Number of top and of bottom branches.
    pub branches: usize,
    pub lambda_grid: Vec<f64>,
    pub schrodinger_lambda_grid: Vec<f64>,
    pub crossing_tol: f64,
    pub tol: f64,
}

fn open_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (1..=n).map(|i| lo + (hi - lo) * i as f64 / (n + 1) as f64).collect()
}

impl Default for BsSpectrumConfig {
    fn default() -> Self {
        Self {
            d: 2,
            a: 6.0,
            l: 100,
            m: 1.0,
            potential: default_gaussian(),
            branches: 10,
            lambda_grid: open_grid(-1.0, 1.0, 64),
            schrodinger_lambda_grid: open_grid(-2.0, 0.0, 64),
            crossing_tol: 1e-6,
            tol: 1e-9,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RadialConfig {
    pub d: usize,
    /// `n` for d = 2, `kappa` for d = 3; ignored for d = 1.
    pub sector: Option<i32>,
    pub m: f64,
    /// Exponents for `alpha_star_rad.csv`; defaults to 40 points in `(d, d + 3]`.
    pub p_grid: Option<Vec<f64>>,
    pub curve_p: Vec<f64>,
    /// Defaults to 60 points in `[-m + 1e-3, m - 1e-3]`.
    pub lambda_grid: Option<Vec<f64>>,
    pub argmax_tol: f64,
    pub tol: f64,
}

impl Default for RadialConfig {
    fn default() -> Self {
        Self { d: 2, sector: None, m: 1.0, p_grid: None, curve_p: vec![], lambda_grid: None, argmax_tol: 1e-3, tol: 1e-10 }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScfRunConfig {
    pub p: f64,
    pub lambda: f64,
    pub m: f64,
    pub a: f64,
    #[serde(rename = "L")]
    pub l: usize,
    pub seed: u64,
    pub max_iter: usize,
    pub conv_tol: f64,
    pub tol: f64,
}

impl Default for ScfRunConfig {
    fn default() -> Self {
        Self { p: 3.0, lambda: 0.5, m: 1.0, a: 6.0, l: 100, seed: 1, max_iter: 200, conv_tol: 1e-6, tol: 1e-10 }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LtConfig {
    pub d: usize,
    pub a: f64,
    #[serde(rename = "L")]
    pub l: usize,
    pub m: f64,
    pub gamma: f64,
    pub p: f64,
    pub potential: PotentialSpec,
    /// Defaults to 32 log-spaced points in `(1e-3 m, 2m)`.
    pub e_samples: Option<Vec<f64>>,
    pub tol: f64,
}

impl Default for LtConfig {
    fn default() -> Self {
        Self { d: 2, a: 6.0, l: 64, m: 1.0, gamma: 2.0, p: 3.0, potential: default_gaussian(), e_samples: None, tol: 1e-9 }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct WpExactConfig {
    pub d: usize,
    pub delta: f64,
    pub p: f64,
    pub r_max: f64,
    pub points: usize,
    /// Also shoot at `lambda = -1` and compare.
    pub shoot: bool,
    pub tol: f64,
}

impl Default for WpExactConfig {
    fn default() -> Self {
        Self { d: 2, delta: 1.0, p: 3.0, r_max: 10.0, points: 201, shoot: true, tol: 1e-10 }
    }
}

pub fn load<T: Default + for<'de> Deserialize<'de>>(path: Option<&PathBuf>) -> Result<T, CliError> {
    match path {
        None => Ok(T::default()),
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|e| CliError::Validation(format!("cannot read {}: {e}", p.display())))?;
            serde_json::from_str(&text).map_err(|e| CliError::Validation(format!("bad config {}: {e}", p.display())))
        }
    }
}
