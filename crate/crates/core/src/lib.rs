//! Spectral decomposition and bilinear expansion of sampled normal Carleman
//! kernels on the half line.
//!
//! The half line is truncated to `[0, L]` and discretized by a quadrature
//! [`Grid`]; every kernel is a dense complex matrix of samples and every
//! integral operator acts through the quadrature weights. On top of that the
//! crate provides:
//!
//! * [`spectral`]: diagonalization of normal kernels through the commuting
//!   Hermitian pair `(N + N*)/2`, `(N - N*)/2i`, sector fitting and synthesis
//!   of kernels in diagonal form;
//! * [`mercer`]: partial sums of the bilinear series and the inequalities
//!   that control its absolute and uniform convergence;
//! * [`calculus`]: spectral functions `E(s,t;ω)`, kernels of `φ(N)` for
//!   `φ(z) = z v(z)` with bounded `v`, and their principal-value limits;
//! * [`oracle`]: slow, independent reference implementations for testing.
//!
//! The crate is `no_std` and only needs `alloc`.
#![cfg_attr(not(any(test, feature = "std")), no_std)]
#![deny(missing_debug_implementations)]

extern crate alloc;

pub mod calculus;
mod error;
mod jacobi;
pub mod kernel;
pub mod laguerre;
pub mod mercer;
pub mod oracle;
pub mod quadrature;
pub mod spectral;

pub use error::{Error, Result};
pub use kernel::{K0Report, KernelMatrix};
pub use quadrature::{Grid, GridFn, Rule};
pub use spectral::{EigenSystem, Sector};

/// Complex scalar used throughout.
pub type C64 = num_complex::Complex<f64>;
