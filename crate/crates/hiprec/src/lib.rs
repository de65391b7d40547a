//! Test-support arbitrary-precision arithmetic.
//!
//! Provides just enough big-float machinery (gamma via Stirling + exact
//! Bernoulli numbers) to drive brute-force partial-sum oracles for special
//! functions. Not a user-facing feature of the library: this crate exists so
//! test suites can check f64 implementations against an independent,
//! high-precision evaluation of the defining series.

pub mod bigfloat;
pub mod gamma;
pub mod oracle;

pub use bigfloat::Bf;
pub use gamma::Ctx;
pub use oracle::MlOracle;
