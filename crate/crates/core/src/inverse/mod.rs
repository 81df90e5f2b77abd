//! Recovery of the weight μ from a single-point observation `u(x₀, ·)` by
//! regularized, projected Gauss–Newton over piecewise-linear weights.

pub mod model;
pub mod probe;
pub mod recover;

pub use model::{residual, ForwardModel};
pub use probe::{identifiability_probe, IdentifiabilityReport};
pub use recover::{recover_weight, recovery_error, Convergence, InversionConfig, InversionResult};
