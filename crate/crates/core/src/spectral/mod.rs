//! Eigensystems of `−Δ + p`, boundary lifting and shifted elliptic solves.

pub mod assemble;
pub mod banded;
pub mod eigen;
pub mod export;
pub mod grid;
pub mod lift;
pub mod potential;

pub use assemble::{BoundaryKind, Operator};
pub use eigen::{eigensystem, EigenMethod, EigenSystem};
pub use grid::{Axis, SpatialGrid};
pub use lift::{elliptic_solve, lift_dirichlet, lift_dirichlet_series, lift_neumann, EllipticSolver};
pub use potential::Potential;
