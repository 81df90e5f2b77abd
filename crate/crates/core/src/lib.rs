//! Solvers for the distributed-order time-fractional diffusion equation
//!
//! ```text
//! D_t^(μ) u − Δu + p(x) u = 0,   u(·, 0) = 0,
//! ```
//!
//! with nonhomogeneous Dirichlet or Neumann data on intervals and rectangles,
//! together with numerical checks of its maximum principle and Harnack
//! inequality, and recovery of the weight μ from one observation point.

pub mod analysis;
pub mod error;
pub mod forward;
pub mod frac;
pub mod inverse;
pub mod laplace;
pub mod quadrature;
pub mod spectral;

pub use error::{Error, Result};
pub use frac::{TimeGrid, TimeSeries, WeightFunction};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
