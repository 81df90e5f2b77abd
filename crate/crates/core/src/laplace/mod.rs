//! Numerical Laplace inversion and the kernels `v`, `κ`, `I^(μ)`.

pub mod contour;
pub mod kernels;
pub mod transform;

pub use contour::{invert_laplace, BasisSymbolTable, ContourKind, ContourRule, ContourSpec, SymbolTable};
pub use kernels::{
    i_mu_convolve, kappa_kernel, relaxation, relaxation_from, IMuKernel, KernelPrimitives, RelaxationTable,
};
pub use transform::{laplace_of_series, laplace_of_series_shifted};
