//! Fractional-calculus primitives.

pub mod grid;
pub mod ops;
pub mod weight;

pub use grid::{TimeGrid, TimeSeries};
pub use ops::{
    caputo_derivative, distributed_derivative, distributed_derivative_with, rl_integral, AlphaRule,
    MemoryKernel, DEFAULT_ALPHA_NODES,
};
pub use weight::{LevelSet, WeightFunction};
