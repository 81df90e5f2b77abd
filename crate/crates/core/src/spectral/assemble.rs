//! Symmetric finite-difference assembly of `−Δ + p` on interval/rectangle grids.
//!
//! Both boundary kinds are written as `S u = λ W u`, with `W` a diagonal
//! quadrature mass and `S = W(−Δ_h + p)` symmetric. Dirichlet unknowns are the
//! interior nodes; Neumann unknowns are all nodes, with the ghost-node mirror
//! folded into halved boundary rows.

use super::banded::BandedSpd;
use super::grid::{Axis, SpatialGrid};
use super::potential::Potential;
use crate::error::{contract, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundaryKind {
    Dirichlet,
    Neumann,
}

impl BoundaryKind {
    pub fn name(self) -> &'static str {
        match self {
            BoundaryKind::Dirichlet => "dirichlet",
            BoundaryKind::Neumann => "neumann",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "dirichlet" => Some(BoundaryKind::Dirichlet),
            "neumann" => Some(BoundaryKind::Neumann),
            _ => None,
        }
    }
}

/// One-dimensional factor: tridiagonal stiffness and diagonal mass over the
/// unknowns of an axis.
#[derive(Debug, Clone)]
pub(crate) struct AxisOperator {
    /// Axis node index of each unknown.
    pub nodes: Vec<usize>,
    pub diag: Vec<f64>,
    /// `K[a][a+1]`.
    pub off: Vec<f64>,
    pub mass: Vec<f64>,
    pub step: f64,
}

impl AxisOperator {
    pub fn new(axis: &Axis, kind: BoundaryKind) -> Self {
        let h = axis.step();
        let n_all = axis.len();
        match kind {
            BoundaryKind::Dirichlet => {
                let n = axis.interior;
                Self {
                    nodes: (1..=n).collect(),
                    diag: vec![2.0 / h; n],
                    off: vec![-1.0 / h; n - 1],
                    mass: vec![h; n],
                    step: h,
                }
            }
            BoundaryKind::Neumann => {
                let mut diag = vec![2.0 / h; n_all];
                diag[0] = 1.0 / h;
                diag[n_all - 1] = 1.0 / h;
                Self {
                    nodes: (0..n_all).collect(),
                    diag,
                    off: vec![-1.0 / h; n_all - 1],
                    mass: axis.weights(),
                    step: h,
                }
            }
        }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }
}

/// Assembled operator over the unknowns of a grid.
#[derive(Debug, Clone)]
pub struct Operator {
    pub kind: BoundaryKind,
    pub grid: SpatialGrid,
    /// Grid node of each unknown.
    pub unknowns: Vec<usize>,
    /// Unknown index of each grid node.
    pub position: Vec<Option<usize>>,
    /// `W(−Δ_h)` without the potential.
    pub stiffness: BandedSpd,
    pub mass: Vec<f64>,
    /// `p` at the unknowns.
    pub potential: Vec<f64>,
    pub(crate) axes: Vec<AxisOperator>,
}

impl Operator {
    pub fn new(grid: &SpatialGrid, p: &Potential, kind: BoundaryKind) -> Result<Self> {
        if p.values().len() != grid.node_count() {
            return Err(contract("potential and grid differ in size"));
        }
        let axes: Vec<AxisOperator> = grid.axes().iter().map(|a| AxisOperator::new(a, kind)).collect();
        let ax = &axes[0];
        let unit = AxisOperator { nodes: vec![0], diag: vec![0.0], off: vec![], mass: vec![1.0], step: 1.0 };
        let ay = axes.get(1).unwrap_or(&unit);
        let (nxu, nyu) = (ax.len(), ay.len());
        let n = nxu * nyu;
        let bw = if nyu > 1 { nxu } else { 1 };
        let mut s = BandedSpd::zeros(n, bw);
        let mut mass = vec![0.0; n];
        let mut unknowns = vec![0; n];
        let mut position = vec![None; grid.node_count()];
        for b in 0..nyu {
            for a in 0..nxu {
                let u = a + nxu * b;
                let node = grid.index(ax.nodes[a], ay.nodes[b]);
                unknowns[u] = node;
                position[node] = Some(u);
                mass[u] = ax.mass[a] * ay.mass[b];
                s.add(u, u, ax.diag[a] * ay.mass[b] + ax.mass[a] * ay.diag[b]);
                if a + 1 < nxu {
                    s.add(u + 1, u, ax.off[a] * ay.mass[b]);
                }
                if b + 1 < nyu {
                    s.add(u + nxu, u, ax.mass[a] * ay.off[b]);
                }
            }
        }
        let potential = unknowns.iter().map(|&k| p.values()[k]).collect();
        Ok(Self { kind, grid: grid.clone(), unknowns, position, stiffness: s, mass, potential, axes })
    }

    pub fn size(&self) -> usize {
        self.unknowns.len()
    }

    /// `S + (P + q) W`.
    pub fn system(&self, q: f64) -> BandedSpd {
        let mut a = self.stiffness.clone();
        let d: Vec<f64> = self.mass.iter().zip(&self.potential).map(|(w, p)| w * (p + q)).collect();
        a.add_diagonal(&d, 1.0);
        a
    }

    /// Boundary contribution to the right-hand side for trace data given in
    /// `grid.boundary_nodes()` order: Dirichlet values or Neumann fluxes.
    pub fn boundary_load(&self, trace: &[f64]) -> Result<Vec<f64>> {
        let bnodes = self.grid.boundary_nodes();
        if trace.len() != bnodes.len() {
            return Err(contract(format!(
                "boundary data has {} values but the grid has {} boundary nodes",
                trace.len(),
                bnodes.len()
            )));
        }
        let mut load = vec![0.0; self.size()];
        match self.kind {
            BoundaryKind::Neumann => {
                for ((&node, &w), &g) in bnodes.iter().zip(&self.grid.boundary_weights()).zip(trace) {
                    load[self.position[node].unwrap()] += w * g;
                }
            }
            BoundaryKind::Dirichlet => {
                let (nx, ny) = self.grid.shape();
                for (&node, &g) in bnodes.iter().zip(trace) {
                    if g == 0.0 {
                        continue;
                    }
                    let (i, j) = self.grid.split(node);
                    let dim = self.grid.dimension();
                    let hx = self.axes[0].step;
                    // x-neighbour across a vertical edge
                    if (i == 0 || i == nx - 1) && (dim == 1 || (j > 0 && j < ny - 1)) {
                        let ii = if i == 0 { 1 } else { nx - 2 };
                        let u = self.position[self.grid.index(ii, j)].unwrap();
                        let wy = if dim == 2 { self.axes[1].step } else { 1.0 };
                        load[u] += g * wy / hx;
                    }
                    if dim == 2 && (j == 0 || j == ny - 1) && i > 0 && i < nx - 1 {
                        let jj = if j == 0 { 1 } else { ny - 2 };
                        let u = self.position[self.grid.index(i, jj)].unwrap();
                        load[u] += g * hx / self.axes[1].step;
                    }
                }
            }
        }
        Ok(load)
    }

    /// Restricts a grid field to the unknowns.
    pub fn restrict(&self, field: &[f64]) -> Vec<f64> {
        self.unknowns.iter().map(|&k| field[k]).collect()
    }

    /// Extends unknown values to a grid field, with `fill` at the other nodes.
    pub fn extend(&self, x: &[f64], fill: &[f64]) -> Vec<f64> {
        let mut out = fill.to_vec();
        for (&k, &v) in self.unknowns.iter().zip(x) {
            out[k] = v;
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stiffness_is_symmetric_and_annihilates_constants_for_neumann() {
        let g = SpatialGrid::rectangle((0.0, 1.0), (0.0, 2.0), (16, 17)).unwrap();
        let op = Operator::new(&g, &Potential::zero(&g), BoundaryKind::Neumann).unwrap();
        let ones = vec![1.0; op.size()];
        assert!(op.stiffness.matvec(&ones).iter().all(|v| v.abs() < 1e-12));
        assert!((op.mass.iter().sum::<f64>() - 2.0).abs() < 1e-13);
    }

    #[test]
    fn dirichlet_load_reproduces_linear_lift() {
        // S u = load for u = x on the interior, g = x on the boundary
        let g = SpatialGrid::rectangle((0.0, 1.0), (0.0, 1.0), (16, 16)).unwrap();
        let op = Operator::new(&g, &Potential::zero(&g), BoundaryKind::Dirichlet).unwrap();
        let exact = g.sample(|x, y| x + 2.0 * y);
        let trace: Vec<f64> = g.boundary_nodes().iter().map(|&k| exact[k]).collect();
        let load = op.boundary_load(&trace).unwrap();
        let su = op.stiffness.matvec(&op.restrict(&exact));
        for (a, b) in su.iter().zip(&load) {
            assert!((a - b).abs() < 1e-12);
        }
    }
}
