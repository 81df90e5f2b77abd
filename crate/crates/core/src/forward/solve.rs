//! Eigenfunction-expansion solvers.
//!
//! With the lift `L(t)` of the boundary data, `u = L − Σ_n z_n φ_n` where each
//! modal correction solves `D^(μ) z_n + λ_n z_n = D^(μ) ℓ_n`, `ℓ_n = (L, φ_n)`.
//! Two equivalent evaluations of `z_n` are available:
//!
//! * [`ForcingRoute::TimeDomain`]: `D^(μ)ℓ_n` by the L1 scheme, then
//!   `z_n = ∫ ∂_t D^(μ)ℓ_n(τ) (I^(μ)v_n)(t−τ) dτ`;
//! * [`ForcingRoute::Folded`]: `z_n = ∫ ℓ_n'(τ) v_n(t−τ) dτ`, the same
//!   convolution with the derivative moved onto the data, which needs no L1
//!   approximation.
//!
//! Both integrate piecewise-linear data exactly against kernel primitives
//! obtained by contour inversion.

use num_complex::Complex64;
use rayon::prelude::*;

use super::boundary::BoundaryData;
use super::field::{Field, Provenance};
use crate::error::{contract, Result};
use crate::frac::{AlphaRule, MemoryKernel, TimeGrid, TimeSeries, WeightFunction, DEFAULT_ALPHA_NODES};
use crate::laplace::{ContourSpec, SymbolTable};
use crate::spectral::{lift_dirichlet, lift_neumann, BoundaryKind, EigenSystem};

/// How the modal forcing `∂_t D^(μ)ℓ_n` is convolved.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ForcingRoute {
    Folded,
    TimeDomain,
}

impl ForcingRoute {
    pub fn name(self) -> &'static str {
        match self {
            ForcingRoute::Folded => "folded",
            ForcingRoute::TimeDomain => "time-domain",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "folded" => Some(ForcingRoute::Folded),
            "time-domain" => Some(ForcingRoute::TimeDomain),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverOptions {
    /// Number of modes used; `None` uses every mode of the eigensystem.
    pub modes: Option<usize>,
    pub contour: ContourSpec,
    pub route: ForcingRoute,
    /// α-quadrature budget of the L1 derivative (time-domain route only).
    pub alpha_nodes: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self { modes: None, contour: ContourSpec::default(), route: ForcingRoute::Folded, alpha_nodes: DEFAULT_ALPHA_NODES }
    }
}

impl SolverOptions {
    fn mode_count(&self, eig: &EigenSystem) -> usize {
        self.modes.unwrap_or(usize::MAX).min(eig.mode_count())
    }
}

/// Default truncation: 64 modes in 1-D, 32² in 2-D.
pub fn default_modes(dimension: usize) -> usize {
    if dimension == 1 {
        64
    } else {
        32 * 32
    }
}

fn uniform_step(grid: &TimeGrid) -> Result<f64> {
    grid.uniform_step()
        .ok_or_else(|| contract("the spectral solvers need a uniform time grid"))
}

/// Lags `h, 2h, …, T` of a uniform grid.
pub fn lag_times(grid: &TimeGrid) -> Result<Vec<f64>> {
    let h = uniform_step(grid)?;
    Ok((1..grid.len()).map(|k| k as f64 * h).collect())
}

fn lag_table(mu: &WeightFunction, grid: &TimeGrid, contour: &ContourSpec) -> Result<SymbolTable> {
    SymbolTable::new(mu, &lag_times(grid)?, contour)
}

/// Increments `P[k] − P[k−1]` of a kernel primitive with `P[0] = 0`.
fn increments(primitive: &[f64]) -> Vec<f64> {
    let mut q = Vec::with_capacity(primitive.len() + 1);
    q.push(0.0);
    let mut prev = 0.0;
    for &p in primitive {
        q.push(p - prev);
        prev = p;
    }
    q
}

/// `out[m] = Σ_{j<m} d_j q[m−j]`.
fn toeplitz(q: &[f64], d: &[f64]) -> Vec<f64> {
    let n = d.len() + 1;
    let mut out = vec![0.0; n];
    for m in 1..n {
        let mut acc = 0.0;
        for j in 0..m {
            acc += d[j] * q[m - j];
        }
        out[m] = acc;
    }
    out
}

fn slopes(samples: &[f64], h: f64) -> Vec<f64> {
    samples.windows(2).map(|w| (w[1] - w[0]) / h).collect()
}

/// The image whose primitive convolves the forcing slopes of a route.
fn route_image(route: ForcingRoute, s: Complex64, w: Complex64, lambda: f64) -> Complex64 {
    match route {
        // ∫v_n : w / (s (sw + λ))
        ForcingRoute::Folded => w / (s * (s * w + lambda)),
        // ∫ I^(μ)v_n : 1 / (s² (sw + λ))
        ForcingRoute::TimeDomain => 1.0 / (s * s * (s * w + lambda)),
    }
}

/// Precomputed lifts and modal projections of boundary data; reusable for
/// many weights μ on the same experiment.
#[derive(Debug, Clone)]
pub struct BoundaryForcing {
    pub eig: EigenSystem,
    pub data: BoundaryData,
    /// Lift of each component's spatial weights, on all grid nodes.
    pub lifts: Vec<Vec<f64>>,
    /// `(lift_c, φ_n)`, indexed `[c][n]`.
    pub projections: Vec<Vec<f64>>,
}

impl BoundaryForcing {
    pub fn new(eig: &EigenSystem, data: &BoundaryData) -> Result<Self> {
        uniform_step(&data.grid)?;
        let lifts = data
            .components
            .iter()
            .map(|c| match eig.kind {
                BoundaryKind::Dirichlet => lift_dirichlet(eig, &c.weights),
                BoundaryKind::Neumann => lift_neumann(eig, &c.weights),
            })
            .collect::<Result<Vec<_>>>()?;
        let projections = lifts.iter().map(|l| eig.project(l)).collect();
        Ok(Self { eig: eig.clone(), data: data.clone(), lifts, projections })
    }

    /// Forcing slopes per component for a route.
    fn forcing_slopes(&self, mu: &WeightFunction, options: &SolverOptions) -> Result<Vec<Vec<f64>>> {
        let grid = &self.data.grid;
        let h = uniform_step(grid)?;
        match options.route {
            ForcingRoute::Folded => Ok(self.data.samples.iter().map(|s| slopes(s, h)).collect()),
            ForcingRoute::TimeDomain => {
                let kernel = MemoryKernel::new(&AlphaRule::new(mu, options.alpha_nodes));
                Ok(self
                    .data
                    .samples
                    .iter()
                    .map(|s| {
                        let d = kernel.apply(&TimeSeries { grid: grid.clone(), samples: s.clone() });
                        slopes(&d.samples, h)
                    })
                    .collect())
            }
        }
    }

    /// Modal corrections `z_n(t_m)`, indexed `[n][m]`.
    fn corrections(&self, mu: &WeightFunction, options: &SolverOptions) -> Result<Vec<Vec<f64>>> {
        let n_modes = options.mode_count(&self.eig);
        let table = lag_table(mu, &self.data.grid, &options.contour)?;
        let forcing = self.forcing_slopes(mu, options)?;
        let route = options.route;
        let nt = self.data.grid.len();
        (0..n_modes)
            .into_par_iter()
            .map(|n| {
                let lambda = self.eig.eigenvalues[n];
                let prim = table.invert(|s, w| route_image(route, s, w, lambda))?;
                let q = increments(&prim);
                let mut z = vec![0.0; nt];
                for (d, proj) in forcing.iter().zip(&self.projections) {
                    if proj[n] == 0.0 {
                        continue;
                    }
                    for (zi, c) in z.iter_mut().zip(toeplitz(&q, d)) {
                        *zi += proj[n] * c;
                    }
                }
                Ok(z)
            })
            .collect()
    }

    pub fn solve(&self, mu: &WeightFunction, options: &SolverOptions) -> Result<Field> {
        let grid = &self.data.grid;
        let space = &self.eig.grid;
        let nodes = space.node_count();
        if self.data.is_zero() {
            return Ok(Field::zeros(space, grid, self.eig.kind, Provenance::Spectral));
        }
        let z = self.corrections(mu, options)?;
        let samples: Vec<f64> = (0..grid.len())
            .into_par_iter()
            .flat_map_iter(|m| {
                let mut u = vec![0.0; nodes];
                for (lift, g) in self.lifts.iter().zip(&self.data.samples) {
                    if g[m] != 0.0 {
                        for (o, l) in u.iter_mut().zip(lift) {
                            *o += g[m] * l;
                        }
                    }
                }
                for (zn, phi) in z.iter().zip(&self.eig.vectors) {
                    if zn[m] != 0.0 {
                        for (o, p) in u.iter_mut().zip(phi) {
                            *o -= zn[m] * p;
                        }
                    }
                }
                u
            })
            .collect();
        let field = Field {
            space: space.clone(),
            time: grid.clone(),
            kind: self.eig.kind,
            provenance: Provenance::Spectral,
            samples,
            tail_estimate: tail_estimate(&self.eig, &z),
        };
        field.check()?;
        Ok(field)
    }

    /// `u(x_node, ·)` without forming the whole field: the modal kernels are
    /// summed with weights `(lift_c, φ_n) φ_n(x)` before one convolution per
    /// component.
    pub fn observe(&self, mu: &WeightFunction, node: usize, options: &SolverOptions) -> Result<TimeSeries> {
        let grid = &self.data.grid;
        if node >= self.eig.grid.node_count() {
            return Err(contract(format!("node {node} is outside the grid")));
        }
        if self.data.is_zero() {
            return Ok(TimeSeries::zeros(grid));
        }
        let table = lag_table(mu, grid, &options.contour)?;
        self.observe_with_table(&table, mu, node, options)
    }

    /// As [`Self::observe`] with a prebuilt symbol table over [`lag_times`].
    pub fn observe_with_table(
        &self,
        table: &SymbolTable,
        mu: &WeightFunction,
        node: usize,
        options: &SolverOptions,
    ) -> Result<TimeSeries> {
        let grid = &self.data.grid;
        if node >= self.eig.grid.node_count() {
            return Err(contract(format!("node {node} is outside the grid")));
        }
        if table.times() != lag_times(grid)?.as_slice() {
            return Err(contract("symbol table does not cover the grid lags"));
        }
        if self.data.is_zero() {
            return Ok(TimeSeries::zeros(grid));
        }
        let n_modes = options.mode_count(&self.eig);
        let forcing = self.forcing_slopes(mu, options)?;
        let lambdas = &self.eig.eigenvalues[..n_modes];
        let route = options.route;
        let mut out = vec![0.0; grid.len()];
        for (c, (d, proj)) in forcing.iter().zip(&self.projections).enumerate() {
            let amp: Vec<f64> = (0..n_modes).map(|n| proj[n] * self.eig.vectors[n][node]).collect();
            let prim = table.invert(|s, w| {
                let mut acc = Complex64::new(0.0, 0.0);
                for (a, &lam) in amp.iter().zip(lambdas) {
                    if *a != 0.0 {
                        acc += *a * route_image(route, s, w, lam);
                    }
                }
                acc
            })?;
            let z = toeplitz(&increments(&prim), d);
            let lift = self.lifts[c][node];
            for ((o, g), zm) in out.iter_mut().zip(&self.data.samples[c]).zip(z) {
                *o += lift * g - zm;
            }
        }
        out[0] = 0.0;
        TimeSeries::new(grid.clone(), out)
    }
}

/// Size of the omitted modes, extrapolated from the decay of
/// `a_n = max_t |z_n| ‖φ_n‖_∞` over the last quarter of the computed modes.
fn tail_estimate(eig: &EigenSystem, z: &[Vec<f64>]) -> f64 {
    let used = z.len();
    let total = match eig.kind {
        BoundaryKind::Dirichlet => eig.grid.interior_nodes().len(),
        BoundaryKind::Neumann => eig.grid.node_count(),
    };
    if used >= total || used < 4 {
        return 0.0;
    }
    let amp: Vec<f64> = z
        .iter()
        .zip(&eig.vectors)
        .map(|(zn, phi)| {
            let zmax = zn.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            zmax * phi.iter().fold(0.0f64, |m, v| m.max(v.abs()))
        })
        .collect();
    let start = used - used / 4;
    let pts: Vec<(f64, f64)> = (start..used)
        .filter(|&n| amp[n] > 0.0)
        .map(|n| (((n + 1) as f64).ln(), amp[n].ln()))
        .collect();
    let last = amp[used - 1];
    if pts.len() < 2 {
        return last * (total - used) as f64;
    }
    let k = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / k;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / k;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    if slope >= 0.0 {
        return last * (total - used) as f64;
    }
    let c = (my - slope * mx).exp();
    ((used + 1)..=total).map(|n| c * (n as f64).powf(slope)).sum()
}

/// Dirichlet problem with data `g` (zero initial state, no source).
pub fn solve_dirichlet(
    eig: &EigenSystem,
    mu: &WeightFunction,
    g: &BoundaryData,
    options: &SolverOptions,
) -> Result<Field> {
    if eig.kind != BoundaryKind::Dirichlet {
        return Err(contract("solve_dirichlet needs a Dirichlet eigensystem"));
    }
    BoundaryForcing::new(eig, g)?.solve(mu, options)
}

/// Neumann problem with outward flux `g`; needs a certified `p ≥ c₀ > 0`.
pub fn solve_neumann(
    eig: &EigenSystem,
    mu: &WeightFunction,
    g: &BoundaryData,
    options: &SolverOptions,
) -> Result<Field> {
    if eig.kind != BoundaryKind::Neumann {
        return Err(contract("solve_neumann needs a Neumann eigensystem"));
    }
    if eig.potential.c0().is_none() {
        return Err(contract("the Neumann solver needs a certified lower bound p >= c0 > 0"));
    }
    BoundaryForcing::new(eig, g)?.solve(mu, options)
}

/// Homogeneous boundary data with source `F(x, t)` given time-major on all
/// nodes (`source[j][k]`); `F(·, 0)` must vanish.
pub fn solve_source(
    eig: &EigenSystem,
    mu: &WeightFunction,
    grid: &TimeGrid,
    source: &[Vec<f64>],
    options: &SolverOptions,
) -> Result<Field> {
    let h = uniform_step(grid)?;
    let nodes = eig.grid.node_count();
    if source.len() != grid.len() || source.iter().any(|f| f.len() != nodes) {
        return Err(contract("source samples do not match the grids"));
    }
    if source[0].iter().any(|&f| f != 0.0) {
        return Err(contract("source must vanish at t = 0"));
    }
    let n_modes = options.mode_count(eig);
    let coeffs: Vec<Vec<f64>> = source.par_iter().map(|f| eig.project(f)).collect();
    let table = lag_table(mu, grid, &options.contour)?;
    let z: Vec<Vec<f64>> = (0..n_modes)
        .into_par_iter()
        .map(|n| {
            let lambda = eig.eigenvalues[n];
            let series: Vec<f64> = coeffs.iter().map(|c| c[n]).collect();
            if series.iter().all(|&v| v == 0.0) {
                return Ok(vec![0.0; grid.len()]);
            }
            let prim = table.invert(|s, w| route_image(ForcingRoute::TimeDomain, s, w, lambda))?;
            Ok(toeplitz(&increments(&prim), &slopes(&series, h)))
        })
        .collect::<Result<_>>()?;
    let samples: Vec<f64> = (0..grid.len())
        .into_par_iter()
        .flat_map_iter(|m| {
            let c: Vec<f64> = z.iter().map(|zn| zn[m]).collect();
            eig.synthesize(&c)
        })
        .collect();
    let field = Field {
        space: eig.grid.clone(),
        time: grid.clone(),
        kind: eig.kind,
        provenance: Provenance::Spectral,
        samples,
        tail_estimate: tail_estimate(eig, &z),
    };
    field.check()?;
    Ok(field)
}
