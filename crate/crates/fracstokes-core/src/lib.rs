//! Constructive solvers for the integro-differential diffusion equation
//! u_t = D^{1-a} Lap u + f on a periodic box, its two-component system, and
//! the Fujita-type critical-exponent calculators that predict finite-time
//! blow-up of the semilinear problem.
//!
//! Module map:
//! * [`special`] - gamma and Mittag-Leffler functions with the bilateral
//!   envelope bounds;
//! * [`fractional`] - discrete Riemann-Liouville calculus and the scalar-mode
//!   Volterra stepper (the non-spectral oracle);
//! * [`grid`] - periodic-box fields, transforms, norms, FRDF binary I/O;
//! * [`propagator`] - the Mittag-Leffler Fourier multiplier, Green function
//!   and Duhamel solution of the linear equation;
//! * [`semilinear`] - mild-solution Picard marching with blow-up detection,
//!   scalar and two-component;
//! * [`fujita`] - critical-exponent calculators and the empirical sweep.

// Validations use `!(x > 0.0)` style comparisons on purpose: unlike the
// clippy-suggested `x <= 0.0`, they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod fractional;
pub mod fujita;
pub mod grid;
pub mod propagator;
pub mod semilinear;
pub mod special;

pub use error::{Error, Result};
pub use fractional::TimeGrid;
pub use grid::{GridSpec, Norm, ScalarField};
pub use semilinear::{RunOutcome, RunStatus, SolveConfig, SourceSpec};
