//! Laplace-domain kernels of the distributed-order operator: the relaxation
//! functions `v`, the kernel `κ` and the convolution `I^(μ)`.

use std::fmt::Write as _;

use num_complex::Complex64;

use super::contour::{ContourSpec, SymbolTable};
use crate::error::{contract, domain, Error, Result};
use crate::frac::{TimeGrid, TimeSeries, WeightFunction};

/// Tolerance for the post-hoc relaxation-table invariants.
pub const RELAXATION_TOL: f64 = 1e-8;

/// `v(t)` solving `D^(μ) v = −λ v`, `v(0) = 1`, with `κ(t)` on the same grid.
#[derive(Debug, Clone, PartialEq)]
pub struct RelaxationTable {
    pub grid: TimeGrid,
    pub lambda: f64,
    pub values: Vec<f64>,
    /// `κ(t)`; the entry at `t = 0` is NaN (the kernel may be unbounded there).
    pub kappa_values: Vec<f64>,
}

impl RelaxationTable {
    /// Checks `v(0) = 1`, monotone decay and `0 ≤ v ≤ 1` to [`RELAXATION_TOL`].
    pub fn check(&self) -> Result<()> {
        let v = &self.values;
        if (v[0] - 1.0).abs() > RELAXATION_TOL {
            return Err(Error::Invariant(format!("v(0) = {} differs from 1", v[0])));
        }
        for (i, w) in v.windows(2).enumerate() {
            if w[1] > w[0] + RELAXATION_TOL {
                return Err(Error::Invariant(format!(
                    "relaxation (lambda = {}) increases at t = {}: {} -> {}",
                    self.lambda,
                    self.grid.values()[i + 1],
                    w[0],
                    w[1]
                )));
            }
        }
        if let Some((i, x)) = v
            .iter()
            .enumerate()
            .find(|(_, &x)| !(x >= -RELAXATION_TOL && x <= 1.0 + RELAXATION_TOL))
        {
            return Err(Error::Invariant(format!(
                "relaxation (lambda = {}) leaves [0, 1] at t = {}: {x}",
                self.lambda,
                self.grid.values()[i]
            )));
        }
        Ok(())
    }

    pub fn series(&self) -> TimeSeries {
        TimeSeries { grid: self.grid.clone(), samples: self.values.clone() }
    }

    /// Three columns `t v kappa`.
    pub fn to_text(&self) -> String {
        let mut s = format!("# lambda = {}\n# t v kappa\n", self.lambda);
        for ((t, v), k) in self.grid.values().iter().zip(&self.values).zip(&self.kappa_values) {
            let _ = writeln!(s, "{t} {v} {k}");
        }
        s
    }
}

/// Relaxation table for one `λ ≥ 0`, inverting `w/(s w + λ)`.
pub fn relaxation(
    lambda: f64,
    mu: &WeightFunction,
    grid: &TimeGrid,
    contour: &ContourSpec,
) -> Result<RelaxationTable> {
    let table = SymbolTable::for_grid(mu, grid, contour)?;
    relaxation_from(&table, lambda, grid)
}

/// As [`relaxation`], reusing a symbol table built on `grid`'s positive times.
pub fn relaxation_from(table: &SymbolTable, lambda: f64, grid: &TimeGrid) -> Result<RelaxationTable> {
    if !(lambda >= 0.0) || !lambda.is_finite() {
        return Err(domain(format!("relaxation needs lambda >= 0, got {lambda}")));
    }
    if table.times() != &grid.values()[1..] {
        return Err(contract("symbol table was built for a different grid"));
    }
    let mut values = vec![1.0];
    if lambda == 0.0 {
        values.resize(grid.len(), 1.0);
    } else {
        values.extend(table.invert(|s, w| w / (s * w + lambda))?);
    }
    let mut kappa_values = vec![f64::NAN];
    kappa_values.extend(table.invert(|s, w| 1.0 / (s * w))?);
    let out = RelaxationTable { grid: grid.clone(), lambda, values, kappa_values };
    out.check()?;
    Ok(out)
}

/// `κ(t)`, the inverse transform of `1/(s w(s))`, at the positive grid times;
/// the sample at `t = 0` is NaN.
pub fn kappa_kernel(mu: &WeightFunction, grid: &TimeGrid, contour: &ContourSpec) -> Result<TimeSeries> {
    let table = SymbolTable::for_grid(mu, grid, contour)?;
    let mut samples = vec![f64::NAN];
    samples.extend(table.invert(|s, w| 1.0 / (s * w))?);
    Ok(TimeSeries { grid: grid.clone(), samples })
}

/// Primitives of a convolution kernel `k` at every lag of a grid:
/// `K1(τ) = ∫₀^τ k` and `K2(τ) = ∫₀^τ K1`, which make product integration
/// against piecewise-linear data exact even when `k` is singular at 0.
#[derive(Debug, Clone)]
pub struct KernelPrimitives {
    grid: TimeGrid,
    lags: Lags,
    k1: Vec<f64>,
    k2: Vec<f64>,
}

#[derive(Debug, Clone)]
enum Lags {
    Uniform(f64),
    Pairs(Vec<f64>),
}

impl Lags {
    fn for_grid(grid: &TimeGrid) -> Self {
        if let Some(h) = grid.uniform_step() {
            return Lags::Uniform(h);
        }
        let t = grid.values();
        let mut lags: Vec<f64> = (0..t.len()).flat_map(|n| (0..n).map(move |j| t[n] - t[j])).collect();
        lags.sort_by(f64::total_cmp);
        lags.dedup();
        Lags::Pairs(lags)
    }

    fn positive(&self, count: usize) -> Vec<f64> {
        match self {
            Lags::Uniform(h) => (1..count).map(|k| k as f64 * h).collect(),
            Lags::Pairs(l) => l.clone(),
        }
    }
}

impl KernelPrimitives {
    /// Primitives of the kernel whose image is `image(s, w)`; the inverted
    /// functions are `image/s` and `image/s²`.
    pub fn new(
        mu: &WeightFunction,
        grid: &TimeGrid,
        contour: &ContourSpec,
        image: impl Fn(Complex64, Complex64) -> Complex64 + Sync,
    ) -> Result<Self> {
        let lags = Lags::for_grid(grid);
        let positive = lags.positive(grid.len());
        let table = SymbolTable::new(mu, &positive, contour)?;
        Self::from_table(&table, grid, image)
    }

    pub(crate) fn from_table(
        table: &SymbolTable,
        grid: &TimeGrid,
        image: impl Fn(Complex64, Complex64) -> Complex64 + Sync,
    ) -> Result<Self> {
        let lags = Lags::for_grid(grid);
        if table.times() != lags.positive(grid.len()).as_slice() {
            return Err(contract("symbol table does not match the grid lags"));
        }
        let mut k1 = vec![0.0];
        k1.extend(table.invert(|s, w| image(s, w) / s)?);
        let mut k2 = vec![0.0];
        k2.extend(table.invert(|s, w| image(s, w) / (s * s))?);
        Ok(Self { grid: grid.clone(), lags, k1, k2 })
    }

    /// Positive lags a symbol table must cover for [`Self::from_table`].
    pub fn lags_for(grid: &TimeGrid) -> Vec<f64> {
        Lags::for_grid(grid).positive(grid.len())
    }

    fn index(&self, lag: f64) -> usize {
        match &self.lags {
            Lags::Uniform(h) => (lag / h).round() as usize,
            Lags::Pairs(l) => {
                if lag <= 0.0 {
                    0
                } else {
                    1 + l.partition_point(|&x| x < lag - 1e-14 * x.max(1.0))
                }
            }
        }
    }

    /// `∫₀^{t_n} k(t_n − τ) φ(τ) dτ` for the piecewise-linear interpolant of `φ`.
    pub fn convolve(&self, phi: &TimeSeries) -> Result<TimeSeries> {
        if phi.grid != self.grid {
            return Err(contract("series and kernel live on different grids"));
        }
        let t = self.grid.values();
        let f = &phi.samples;
        let mut out = vec![0.0; t.len()];
        for n in 1..t.len() {
            let mut acc = 0.0;
            for j in 0..n {
                let h = t[j + 1] - t[j];
                let ia = self.index(t[n] - t[j]);
                let ib = self.index(t[n] - t[j + 1]);
                let dk2 = self.k2[ia] - self.k2[ib];
                acc += (f[j] * (h * self.k1[ia] - dk2) + f[j + 1] * (dk2 - h * self.k1[ib])) / h;
            }
            out[n] = acc;
        }
        Ok(TimeSeries { grid: self.grid.clone(), samples: out })
    }

    /// `K1` at the grid times (`∫₀^t k`).
    pub fn running_integral(&self) -> TimeSeries {
        let samples = self.grid.values().iter().map(|&t| self.k1[self.index(t)]).collect();
        TimeSeries { grid: self.grid.clone(), samples }
    }
}

/// Precomputed `I^(μ)` on a grid: convolution with `κ`.
#[derive(Debug, Clone)]
pub struct IMuKernel(KernelPrimitives);

impl IMuKernel {
    pub fn new(mu: &WeightFunction, grid: &TimeGrid, contour: &ContourSpec) -> Result<Self> {
        Ok(Self(KernelPrimitives::new(mu, grid, contour, |s, w| 1.0 / (s * w))?))
    }

    pub fn primitives(&self) -> &KernelPrimitives {
        &self.0
    }
}

/// `I^(μ)φ(t) = ∫₀ᵗ κ(t−τ) φ(τ) dτ`; the grid of `phi` must match the kernel's.
pub fn i_mu_convolve(kernel: &IMuKernel, phi: &TimeSeries) -> Result<TimeSeries> {
    kernel.0.convolve(phi)
}
