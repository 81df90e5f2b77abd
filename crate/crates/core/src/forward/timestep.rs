//! Implicit L1 time-stepping on the finite-difference Laplacian, used as an
//! independent check of the spectral solvers.

use rayon::prelude::*;

use super::boundary::BoundaryData;
use super::field::{Field, Provenance};
use crate::error::{contract, Result};
use crate::frac::{AlphaRule, MemoryKernel, WeightFunction};
use crate::spectral::{BoundaryKind, Operator, Potential, SpatialGrid};

/// Solves `W D^(μ)U + (S + PW)U = b(g(t))` with `D^(μ)` replaced by the L1
/// scheme on the α-quadrature of `μ` and every step implicit.
pub fn timestep_oracle(
    mu: &WeightFunction,
    p: &Potential,
    g: &BoundaryData,
    space: &SpatialGrid,
    kind: BoundaryKind,
    alpha_nodes: usize,
) -> Result<Field> {
    if kind == BoundaryKind::Neumann && p.c0().is_none() {
        return Err(contract("the Neumann problem needs a certified lower bound p >= c0 > 0"));
    }
    let grid = &g.grid;
    let t = grid.values();
    let nt = t.len();
    let mut field = Field::zeros(space, grid, kind, Provenance::Timestep);
    if g.is_zero() {
        return Ok(field);
    }
    let op = Operator::new(space, p, kind)?;
    let n = op.size();
    let kernel = MemoryKernel::new(&AlphaRule::new(mu, alpha_nodes));
    let base = op.system(0.0);
    let uniform = grid.uniform_step();
    let mut factor = None;
    let mut factor_step = f64::NAN;
    let mut slopes: Vec<Vec<f64>> = Vec::with_capacity(nt);
    let mut prev = vec![0.0; n];
    let mut g_table = Vec::new();
    if let Some(h) = uniform {
        g_table = (0..nt).map(|k| kernel.eval(k as f64 * h)).collect();
    }
    let nodes = space.node_count();
    let bnodes = space.boundary_nodes();
    for m in 1..nt {
        let h = t[m] - t[m - 1];
        if factor.is_none() || h != factor_step {
            let mut a = base.clone();
            a.add_diagonal(&op.mass, kernel.eval(h) / h);
            factor = Some(a.cholesky()?);
            factor_step = h;
        }
        let a0 = kernel.eval(h) / h;
        // memory weights for the slopes of the earlier intervals
        let coef: Vec<f64> = (0..m - 1)
            .map(|j| match uniform {
                Some(_) => g_table[m - j] - g_table[m - j - 1],
                None => kernel.eval(t[m] - t[j]) - kernel.eval(t[m] - t[j + 1]),
            })
            .collect();
        let trace = g.trace_at(m);
        let load = op.boundary_load(&trace)?;
        let rhs: Vec<f64> = (0..n)
            .into_par_iter()
            .with_min_len(256)
            .map(|i| {
                let hist: f64 = coef.iter().zip(&slopes).map(|(c, s)| c * s[i]).sum();
                load[i] + op.mass[i] * (a0 * prev[i] - hist)
            })
            .collect();
        let next = factor.as_ref().unwrap().solve(&rhs);
        slopes.push(next.iter().zip(&prev).map(|(a, b)| (a - b) / h).collect());
        let mut fill = vec![0.0; nodes];
        if kind == BoundaryKind::Dirichlet {
            for (&k, &v) in bnodes.iter().zip(&trace) {
                fill[k] = v;
            }
        }
        field.samples[m * nodes..(m + 1) * nodes].copy_from_slice(&op.extend(&next, &fill));
        prev = next;
    }
    field.check()?;
    Ok(field)
}
