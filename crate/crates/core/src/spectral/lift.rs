//! Boundary lifting and the shifted elliptic solve.

use super::assemble::{BoundaryKind, Operator};
use super::banded::BandedCholesky;
use super::eigen::EigenSystem;
use super::grid::SpatialGrid;
use super::potential::Potential;
use crate::error::{contract, Result};

/// Factored `−Δ_h + p + q` with a given boundary kind, reusable across data.
#[derive(Debug, Clone)]
pub struct EllipticSolver {
    op: Operator,
    factor: BandedCholesky,
}

impl EllipticSolver {
    pub fn new(grid: &SpatialGrid, p: &Potential, q_shift: f64, kind: BoundaryKind) -> Result<Self> {
        if !(q_shift >= 0.0) || !q_shift.is_finite() {
            return Err(contract(format!("elliptic shift must be finite and nonnegative, got {q_shift}")));
        }
        if kind == BoundaryKind::Neumann && p.is_zero() && q_shift == 0.0 {
            return Err(contract("Neumann problem with p = 0 and no shift is singular"));
        }
        let op = Operator::new(grid, p, kind)?;
        let factor = op.system(q_shift).cholesky()?;
        Ok(Self { op, factor })
    }

    pub fn operator(&self) -> &Operator {
        &self.op
    }

    /// Solves `(−Δ + p + q)u = rhs` with Dirichlet values or outward Neumann
    /// fluxes `trace` (in `grid.boundary_nodes()` order).
    pub fn solve(&self, rhs: &[f64], trace: &[f64]) -> Result<Vec<f64>> {
        let grid = &self.op.grid;
        if rhs.len() != grid.node_count() {
            return Err(contract("right-hand side length differs from the grid node count"));
        }
        let mut b = self.op.boundary_load(trace)?;
        for (bi, (&k, w)) in b.iter_mut().zip(self.op.unknowns.iter().zip(&self.op.mass)) {
            *bi += w * rhs[k];
        }
        let x = self.factor.solve(&b);
        let mut fill = vec![0.0; grid.node_count()];
        if self.op.kind == BoundaryKind::Dirichlet {
            for (&k, &g) in grid.boundary_nodes().iter().zip(trace) {
                fill[k] = g;
            }
        }
        Ok(self.op.extend(&x, &fill))
    }
}

/// `(−Δ + p + q_shift)u = rhs` with boundary data `trace`.
pub fn elliptic_solve(
    grid: &SpatialGrid,
    p: &Potential,
    q_shift: f64,
    rhs: &[f64],
    kind: BoundaryKind,
    trace: &[f64],
) -> Result<Vec<f64>> {
    EllipticSolver::new(grid, p, q_shift, kind)?.solve(rhs, trace)
}

/// `Λg`: the `p`-harmonic field with Dirichlet trace `g`, by direct solve.
pub fn lift_dirichlet(eig: &EigenSystem, g_trace: &[f64]) -> Result<Vec<f64>> {
    if eig.kind != BoundaryKind::Dirichlet {
        return Err(contract("Dirichlet lifting needs a Dirichlet eigensystem"));
    }
    let zero = vec![0.0; eig.grid.node_count()];
    elliptic_solve(&eig.grid, &eig.potential, 0.0, &zero, BoundaryKind::Dirichlet, g_trace)
}

/// `Λg ≈ −Σ_n λ_n⁻¹ (g, ∂_ν φ_n)_{∂Ω} φ_n` over the modes of `eig`; interior
/// values only (the series vanishes on the boundary).
pub fn lift_dirichlet_series(eig: &EigenSystem, g_trace: &[f64]) -> Result<Vec<f64>> {
    if eig.kind != BoundaryKind::Dirichlet {
        return Err(contract("Dirichlet lifting needs a Dirichlet eigensystem"));
    }
    let bw = eig.grid.boundary_weights();
    if g_trace.len() != bw.len() {
        return Err(contract("boundary data length differs from the boundary node count"));
    }
    let coeffs: Vec<f64> = eig
        .normal_traces
        .iter()
        .zip(&eig.eigenvalues)
        .map(|(tr, lam)| -tr.iter().zip(g_trace).zip(&bw).map(|((d, g), w)| d * g * w).sum::<f64>() / lam)
        .collect();
    Ok(eig.synthesize(&coeffs))
}

/// `Λ̄g`: the `p`-harmonic field with outward flux `g`; needs `p ≥ c₀ > 0`.
pub fn lift_neumann(eig: &EigenSystem, g_trace: &[f64]) -> Result<Vec<f64>> {
    if eig.kind != BoundaryKind::Neumann {
        return Err(contract("Neumann lifting needs a Neumann eigensystem"));
    }
    if eig.potential.c0().is_none() {
        return Err(contract("Neumann lifting needs a certified lower bound p >= c0 > 0"));
    }
    let zero = vec![0.0; eig.grid.node_count()];
    elliptic_solve(&eig.grid, &eig.potential, 0.0, &zero, BoundaryKind::Neumann, g_trace)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::eigen::{eigensystem, EigenMethod};

    fn dirichlet(p: &Potential, grid: &SpatialGrid, modes: usize) -> EigenSystem {
        eigensystem(grid, p, BoundaryKind::Dirichlet, modes, EigenMethod::FiniteDifference).unwrap()
    }

    #[test]
    fn harmonic_lift_is_linear() {
        let g = SpatialGrid::interval(0.0, 1.0, 31).unwrap();
        let eig = dirichlet(&Potential::zero(&g), &g, 4);
        let u = lift_dirichlet(&eig, &[2.0, 5.0]).unwrap();
        for k in 0..g.node_count() {
            let x = g.coords(k).0;
            assert!((u[k] - (2.0 * (1.0 - x) + 5.0 * x)).abs() < 1e-10);
        }
        assert!(lift_dirichlet(&eig, &[0.0, 0.0]).unwrap().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn sinh_lift_converges_at_second_order() {
        let err = |n: usize| {
            let g = SpatialGrid::interval(0.0, 1.0, n).unwrap();
            let p = Potential::constant(&g, 1.0).unwrap();
            let eig = dirichlet(&p, &g, 1);
            let u = lift_dirichlet(&eig, &[0.0, 1.0]).unwrap();
            (0..g.node_count())
                .map(|k| (u[k] - g.coords(k).0.sinh() / 1f64.sinh()).abs())
                .fold(0.0, f64::max)
        };
        let (a, b) = (err(31), err(63));
        assert!(a < 1e-4 && (a / b) > 3.5, "{a} {b}");
    }

    #[test]
    fn neumann_cosh_lift() {
        let g = SpatialGrid::interval(0.0, 1.0, 127).unwrap();
        let p = Potential::constant(&g, 1.0).unwrap().certified().unwrap();
        let eig = eigensystem(&g, &p, BoundaryKind::Neumann, 4, EigenMethod::FiniteDifference).unwrap();
        let u = lift_neumann(&eig, &[0.0, 1.0]).unwrap();
        for k in 0..g.node_count() {
            let x = g.coords(k).0;
            assert!((u[k] - x.cosh() / 1f64.sinh()).abs() < 1e-4);
        }
        let u2 = lift_neumann(&eig, &[0.0, 2.0]).unwrap();
        assert!(u.iter().zip(&u2).all(|(a, b)| (2.0 * a - b).abs() < 1e-12));
        let bare = eigensystem(&g, &Potential::constant(&g, 1.0).unwrap(), BoundaryKind::Neumann, 4, EigenMethod::FiniteDifference).unwrap();
        assert!(lift_neumann(&bare, &[0.0, 1.0]).is_err());
    }

    #[test]
    fn shifted_solve_examples() {
        let g = SpatialGrid::interval(0.0, 1.0, 127).unwrap();
        let p = Potential::zero(&g);
        let zero = vec![0.0; g.node_count()];
        let u = elliptic_solve(&g, &p, 1.0, &zero, BoundaryKind::Dirichlet, &[0.0, 1.0]).unwrap();
        for k in 0..g.node_count() {
            let x = g.coords(k).0;
            assert!((u[k] - x.sinh() / 1f64.sinh()).abs() < 1e-5);
        }
        assert!(elliptic_solve(&g, &p, 0.0, &zero, BoundaryKind::Dirichlet, &[0.0, 0.0]).unwrap().iter().all(|&v| v == 0.0));
        assert!(matches!(
            elliptic_solve(&g, &p, 0.0, &zero, BoundaryKind::Neumann, &[0.0, 1.0]),
            Err(crate::Error::Contract(_))
        ));
        let eig = dirichlet(&p, &g, 2);
        let lift = lift_dirichlet(&eig, &[1.0, 3.0]).unwrap();
        let direct = elliptic_solve(&g, &p, 0.0, &zero, BoundaryKind::Dirichlet, &[1.0, 3.0]).unwrap();
        assert_eq!(lift, direct);
    }

    #[test]
    fn series_lift_approaches_direct() {
        let g = SpatialGrid::interval(0.0, 1.0, 511).unwrap();
        let p = Potential::constant(&g, 2.0).unwrap();
        let eig = dirichlet(&p, &g, 128);
        let direct = lift_dirichlet(&eig, &[1.0, 0.5]).unwrap();
        let middle = g.nodes_in_box(&[1.0 / 3.0], &[2.0 / 3.0]);
        let mut errs = Vec::new();
        for modes in [8, 16, 32, 64, 128] {
            let sub = EigenSystem {
                eigenvalues: eig.eigenvalues[..modes].to_vec(),
                vectors: eig.vectors[..modes].to_vec(),
                normal_traces: eig.normal_traces[..modes].to_vec(),
                ..eig.clone()
            };
            let s = lift_dirichlet_series(&sub, &[1.0, 0.5]).unwrap();
            errs.push(middle.iter().map(|&k| (direct[k] - s[k]).abs()).fold(0.0, f64::max));
        }
        // least-squares slope of log error against log N
        let xs: Vec<f64> = (0..errs.len()).map(|k| (8.0 * 2f64.powi(k as i32)).ln()).collect();
        let ys: Vec<f64> = errs.iter().map(|e| e.ln()).collect();
        let (mx, my) = (xs.iter().sum::<f64>() / 5.0, ys.iter().sum::<f64>() / 5.0);
        let slope = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum::<f64>()
            / xs.iter().map(|x| (x - mx).powi(2)).sum::<f64>();
        assert!(slope <= -0.9, "slope {slope}: {errs:?}");
    }
}
