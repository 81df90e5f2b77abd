//! The initial-boundary-value problem: spectral representation solvers, an
//! independent time-stepping scheme, and single-point observations.

pub mod boundary;
pub mod experiment;
pub mod field;
pub mod observe;
pub mod solve;
pub mod timestep;

pub use boundary::{edge_weights, BoundaryComponent, BoundaryData, Profile};
pub use experiment::{Experiment, ExperimentConfig, Generator, PotentialSpec};
pub use field::{Field, Provenance, FIELD_MAGIC};
pub use observe::{observe, ObservationRecord};
pub use solve::{
    default_modes, lag_times, solve_dirichlet, solve_neumann, solve_source, BoundaryForcing, ForcingRoute, SolverOptions,
};
pub use timestep::timestep_oracle;
