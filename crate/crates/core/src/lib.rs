//! Gap eigenvalues of Dirac operators `D_m - V`.
//!
//! The crate collects the numerical pieces needed to study Keller-type
//! estimates for Dirac operators: special functions, the free Dirac
//! symbol and resolvent, a periodic pseudospectral Birman-Schwinger
//! operator with a matrix-free Lanczos solver, the explicit
//! one-dimensional optimizers, radial shooting for the nonlinear Dirac
//! equation, the self-consistent potential iteration, and the pieces of
//! the Lieb-Thirring counting argument.

pub mod bs;
pub mod dirac;
pub mod error;
pub mod exact_1d;
pub mod grid;
pub mod lanczos;
pub mod lt;
pub mod ode;
pub mod optimizer;
pub mod potentials;
pub mod prufer;
pub mod quad;
pub mod radial;
pub mod specfun;

pub use error::{Error, Result};
