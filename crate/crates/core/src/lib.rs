//! Nonlinear Green's functions for second-order "oscillating" equations
//!
//! ```text
//! w″ + N(w, w′) = f(t),   w(0) = w′(0) = 0,
//! ```
//!
//! approximated by the scaled convolution `w(t) ≈ s2·∫₀ᵗ G(t − τ) f(τ) dτ`,
//! where `G` solves the same equation driven by `s1·δ(t)`.
//!
//! * [`specfun`]: Jacobi sn/cn/dn/am for any real parameter, Weierstrass ℘, erf and its inverse.
//! * [`kernels`]: the closed-form Green's function catalog and a numeric fallback.
//! * [`frasca`]: source functions and the convolution formula.
//! * [`oracle`]: adaptive and fixed-step reference integrators.
//! * [`calibrate`]: logarithmic error, s2 optimization, sweeps, and the source-family report.
//! * [`pdelift`]: the χ-transform lift to the exponential-nonlinearity wave equation.

pub mod calibrate;
#[cfg(feature = "cli")]
pub mod cli;
pub mod csv;
pub mod error;
pub mod frasca;
pub mod grid;
pub mod kernels;
pub mod oracle;
pub mod pdelift;
pub mod specfun;

mod par;

pub use error::{Error, Result};
pub use grid::{TimeGrid, Trajectory};
