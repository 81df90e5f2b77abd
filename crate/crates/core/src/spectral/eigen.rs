//! Eigenpairs of `−Δ_h + p` with Dirichlet or Neumann conditions.

use std::f64::consts::PI;

use nalgebra::{DMatrix, SymmetricEigen};

use super::assemble::{AxisOperator, BoundaryKind, Operator};
use super::grid::SpatialGrid;
use super::potential::Potential;
use crate::error::{contract, Error, Result};

/// Largest unknown count handled by the dense eigensolver.
pub const DENSE_LIMIT: usize = 1600;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EigenMethod {
    /// Continuous eigenpairs `(nπ/L)² + c` sampled on the grid; 1-D constant `p` only.
    Analytic,
    /// Eigenpairs of the finite-difference operator.
    FiniteDifference,
}

impl EigenMethod {
    pub fn name(self) -> &'static str {
        match self {
            EigenMethod::Analytic => "analytic",
            EigenMethod::FiniteDifference => "finite-difference",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "analytic" => Some(EigenMethod::Analytic),
            "finite-difference" | "fd" => Some(EigenMethod::FiniteDifference),
            _ => None,
        }
    }
}

/// Ascending eigenpairs, `W`-orthonormal, sampled on all grid nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenSystem {
    pub kind: BoundaryKind,
    pub method: EigenMethod,
    pub grid: SpatialGrid,
    pub potential: Potential,
    pub eigenvalues: Vec<f64>,
    /// Eigenvectors over all grid nodes (zero on the boundary for Dirichlet).
    pub vectors: Vec<Vec<f64>>,
    /// Outward normal derivatives at `grid.boundary_nodes()` (Dirichlet only;
    /// zero at rectangle corners).
    pub normal_traces: Vec<Vec<f64>>,
}

impl EigenSystem {
    pub fn mode_count(&self) -> usize {
        self.eigenvalues.len()
    }

    /// `(f, φ_n)` for every mode under the grid quadrature.
    pub fn project(&self, field: &[f64]) -> Vec<f64> {
        let w = self.grid.weights();
        self.vectors
            .iter()
            .map(|v| v.iter().zip(field).zip(&w).map(|((a, b), c)| a * b * c).sum())
            .collect()
    }

    /// `Σ c_n φ_n`.
    pub fn synthesize(&self, coefficients: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.grid.node_count()];
        for (c, v) in coefficients.iter().zip(&self.vectors) {
            if *c != 0.0 {
                for (o, x) in out.iter_mut().zip(v) {
                    *o += c * x;
                }
            }
        }
        out
    }

    /// Largest `|(φ_m, φ_n) − δ_mn|` over the first `limit` modes.
    pub fn orthonormality_defect(&self, limit: usize) -> f64 {
        let w = self.grid.weights();
        let n = self.mode_count().min(limit);
        let mut worst: f64 = 0.0;
        for a in 0..n {
            for b in a..n {
                let ip: f64 = self.vectors[a].iter().zip(&self.vectors[b]).zip(&w).map(|((x, y), c)| x * y * c).sum();
                let target = if a == b { 1.0 } else { 0.0 };
                worst = worst.max((ip - target).abs());
            }
        }
        worst
    }

    /// `‖(−Δ_h + p)φ_n − λ_n φ_n‖` in the discrete `L²` norm, per mode.
    pub fn residuals(&self) -> Result<Vec<f64>> {
        let op = Operator::new(&self.grid, &self.potential, self.kind)?;
        let a = op.system(0.0);
        Ok(self
            .vectors
            .iter()
            .zip(&self.eigenvalues)
            .map(|(v, &lam)| {
                let x = op.restrict(v);
                let ax = a.matvec(&x);
                ax.iter()
                    .zip(&x)
                    .zip(&op.mass)
                    .map(|((s, xi), w)| {
                        let r = s / w - lam * xi;
                        w * r * r
                    })
                    .sum::<f64>()
                    .sqrt()
            })
            .collect())
    }
}

/// Eigenpairs of `−Δ_h + p` (`n_modes` lowest).
pub fn eigensystem(
    grid: &SpatialGrid,
    p: &Potential,
    kind: BoundaryKind,
    n_modes: usize,
    method: EigenMethod,
) -> Result<EigenSystem> {
    let op = Operator::new(grid, p, kind)?;
    if n_modes == 0 || n_modes > op.size() {
        return Err(contract(format!(
            "requested {n_modes} modes but the operator has {} unknowns",
            op.size()
        )));
    }
    let (eigenvalues, vectors) = match method {
        EigenMethod::Analytic => {
            let c = match (grid.dimension(), p.constant_value()) {
                (1, Some(c)) => c,
                _ => return Err(contract("analytic eigenpairs need a 1-D grid with constant potential")),
            };
            let axis = grid.axis(0);
            closed_form(axis.length(), axis.len(), kind, c, n_modes, true)
        }
        EigenMethod::FiniteDifference => fd_pairs(&op, grid, p, n_modes)?,
    };
    let mut sys = EigenSystem {
        kind,
        method,
        grid: grid.clone(),
        potential: p.clone(),
        eigenvalues,
        vectors,
        normal_traces: Vec::new(),
    };
    if kind == BoundaryKind::Dirichlet {
        sys.normal_traces = normal_traces(&sys);
    }
    if method == EigenMethod::FiniteDifference {
        validate(&sys)?;
    }
    Ok(sys)
}

fn validate(sys: &EigenSystem) -> Result<()> {
    if sys.eigenvalues.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::Invariant("eigenvalues not ascending".into()));
    }
    let defect = sys.orthonormality_defect(64);
    if defect > 1e-10 {
        return Err(Error::Invariant(format!("eigenvectors not orthonormal: defect {defect:e}")));
    }
    let res = sys.residuals()?;
    let bad = res.iter().zip(&sys.eigenvalues).enumerate().find(|(_, (r, lam))| **r > 1e-8 * lam.abs().max(1.0));
    if let Some((n, (r, _))) = bad {
        return Err(Error::Invariant(format!("eigenpair {n} has residual {r:e}")));
    }
    Ok(())
}

/// Sine/cosine pairs on an axis with `nodes` nodes; `continuous` selects
/// `(nπ/L)²` over the discrete `(4/h²)sin²(nπh/2L)`.
fn closed_form(
    length: f64,
    nodes: usize,
    kind: BoundaryKind,
    c: f64,
    n_modes: usize,
    continuous: bool,
) -> (Vec<f64>, Vec<Vec<f64>>) {
    let cells = nodes - 1;
    let h = length / cells as f64;
    let first = if kind == BoundaryKind::Dirichlet { 1 } else { 0 };
    let mut values = Vec::with_capacity(n_modes);
    let mut vectors = Vec::with_capacity(n_modes);
    for n in first..first + n_modes {
        let k = n as f64 * PI / length;
        let lam = if continuous {
            k * k
        } else {
            let s = (0.5 * k * h).sin();
            4.0 * s * s / (h * h)
        };
        values.push(lam + c);
        let v: Vec<f64> = (0..nodes)
            .map(|i| {
                let theta = (n * i) as f64 * PI / cells as f64;
                match kind {
                    BoundaryKind::Dirichlet => if i == 0 || i == cells { 0.0 } else { theta.sin() },
                    BoundaryKind::Neumann => theta.cos(),
                }
            })
            .collect();
        let mut w = vec![h; nodes];
        w[0] = 0.5 * h;
        w[cells] = 0.5 * h;
        let norm: f64 = v.iter().zip(&w).map(|(x, c)| c * x * x).sum::<f64>().sqrt();
        vectors.push(v.into_iter().map(|x| x / norm).collect());
    }
    (values, vectors)
}

/// Full eigen-decomposition of a 1-D axis operator with potential `pa`,
/// returned over the axis unknowns.
fn axis_pairs(op: &AxisOperator, pa: &[f64]) -> (Vec<f64>, Vec<Vec<f64>>) {
    let n = op.len();
    let mut m = DMatrix::zeros(n, n);
    for a in 0..n {
        m[(a, a)] = op.diag[a] / op.mass[a] + pa[a];
        if a + 1 < n {
            let v = op.off[a] / (op.mass[a] * op.mass[a + 1]).sqrt();
            m[(a, a + 1)] = v;
            m[(a + 1, a)] = v;
        }
    }
    let inv_sqrt: Vec<f64> = op.mass.iter().map(|w| 1.0 / w.sqrt()).collect();
    sorted_pairs(m, &inv_sqrt, n)
}

fn sorted_pairs(m: DMatrix<f64>, inv_sqrt: &[f64], keep: usize) -> (Vec<f64>, Vec<Vec<f64>>) {
    let eig = SymmetricEigen::new(m);
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let mut values = Vec::with_capacity(keep);
    let mut vectors = Vec::with_capacity(keep);
    for &k in order.iter().take(keep) {
        values.push(eig.eigenvalues[k]);
        let col = eig.eigenvectors.column(k);
        let mut v: Vec<f64> = col.iter().zip(inv_sqrt).map(|(y, s)| y * s).collect();
        // fix the sign so the first significant entry is positive
        if let Some(x) = v.iter().find(|x| x.abs() > 1e-8) {
            if *x < 0.0 {
                v.iter_mut().for_each(|x| *x = -*x);
            }
        }
        vectors.push(v);
    }
    (values, vectors)
}

fn fd_pairs(op: &Operator, grid: &SpatialGrid, p: &Potential, n_modes: usize) -> Result<(Vec<f64>, Vec<Vec<f64>>)> {
    let zero_fill = vec![0.0; grid.node_count()];
    let to_grid = |u: Vec<f64>| op.extend(&u, &zero_fill);
    if grid.dimension() == 1 {
        if let Some(c) = p.constant_value() {
            let axis = grid.axis(0);
            return Ok(closed_form(axis.length(), axis.len(), op.kind, c, n_modes, false));
        }
        let (vals, vecs) = axis_pairs(&op.axes[0], &op.potential);
        return Ok((vals[..n_modes].to_vec(), vecs.into_iter().take(n_modes).map(to_grid).collect()));
    }
    if let Some((px, py)) = p.additive_split(grid) {
        let (ax, ay) = (&op.axes[0], &op.axes[1]);
        let pxu: Vec<f64> = ax.nodes.iter().map(|&i| px[i]).collect();
        let pyu: Vec<f64> = ay.nodes.iter().map(|&j| py[j]).collect();
        let (lx, vx) = axis_pairs(ax, &pxu);
        let (ly, vy) = axis_pairs(ay, &pyu);
        let mut pairs: Vec<(f64, usize, usize)> = Vec::with_capacity(lx.len() * ly.len());
        for (a, la) in lx.iter().enumerate() {
            for (b, lb) in ly.iter().enumerate() {
                pairs.push((la + lb, a, b));
            }
        }
        pairs.sort_by(|x, y| x.0.total_cmp(&y.0).then(x.1.cmp(&y.1)).then(x.2.cmp(&y.2)));
        let nxu = ax.len();
        let mut values = Vec::with_capacity(n_modes);
        let mut vectors = Vec::with_capacity(n_modes);
        for &(lam, a, b) in pairs.iter().take(n_modes) {
            values.push(lam);
            let mut u = vec![0.0; op.size()];
            for (jb, yb) in vy[b].iter().enumerate() {
                for (ia, xa) in vx[a].iter().enumerate() {
                    u[ia + nxu * jb] = xa * yb;
                }
            }
            vectors.push(to_grid(u));
        }
        return Ok((values, vectors));
    }
    let n = op.size();
    if n > DENSE_LIMIT {
        return Err(contract(format!(
            "non-separable potential on {n} unknowns exceeds the dense eigensolver limit {DENSE_LIMIT}"
        )));
    }
    let a = op.system(0.0);
    let inv_sqrt: Vec<f64> = op.mass.iter().map(|w| 1.0 / w.sqrt()).collect();
    let bw = a.bandwidth();
    let mut m = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in i.saturating_sub(bw)..=i {
            let v = a.get(i, j) * inv_sqrt[i] * inv_sqrt[j];
            m[(i, j)] = v;
            m[(j, i)] = v;
        }
    }
    let (vals, vecs) = sorted_pairs(m, &inv_sqrt, n_modes);
    Ok((vals, vecs.into_iter().map(to_grid).collect()))
}

fn normal_traces(sys: &EigenSystem) -> Vec<Vec<f64>> {
    let grid = &sys.grid;
    let bnodes = grid.boundary_nodes();
    if sys.method == EigenMethod::Analytic {
        let axis = grid.axis(0);
        let l = axis.length();
        return (0..sys.mode_count())
            .map(|m| {
                let n = (m + 1) as f64;
                let slope = (2.0 / l).sqrt() * n * PI / l;
                vec![-slope, slope * (n * PI).cos()]
            })
            .collect();
    }
    let (nx, ny) = grid.shape();
    sys.vectors
        .iter()
        .map(|v| {
            bnodes
                .iter()
                .map(|&k| {
                    if grid.is_corner(k) {
                        return 0.0;
                    }
                    let (i, j) = grid.split(k);
                    let (step, h): (isize, f64) = if i == 0 {
                        (1, grid.axis(0).step())
                    } else if i == nx - 1 {
                        (-1, grid.axis(0).step())
                    } else if j == 0 {
                        (nx as isize, grid.axis(1).step())
                    } else {
                        debug_assert_eq!(j, ny - 1);
                        (-(nx as isize), grid.axis(1).step())
                    };
                    let at = |m: isize| v[(k as isize + m * step) as usize];
                    (3.0 * at(0) - 4.0 * at(1) + at(2)) / (2.0 * h)
                })
                .collect()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit(n: usize) -> SpatialGrid {
        SpatialGrid::interval(0.0, 1.0, n).unwrap()
    }

    #[test]
    fn classical_dirichlet_spectrum() {
        let g = unit(63);
        let sys = eigensystem(&g, &Potential::zero(&g), BoundaryKind::Dirichlet, 5, EigenMethod::Analytic).unwrap();
        assert!((sys.eigenvalues[0] - PI * PI).abs() < 1e-12);
        for k in 0..g.node_count() {
            let x = g.coords(k).0;
            assert!((sys.vectors[0][k] - 2f64.sqrt() * (PI * x).sin()).abs() < 1e-12);
        }
        assert!(sys.orthonormality_defect(5) < 1e-12);
    }

    #[test]
    fn constant_shift() {
        let g = unit(63);
        let p = Potential::constant(&g, 1.0).unwrap();
        let a = eigensystem(&g, &p, BoundaryKind::Dirichlet, 4, EigenMethod::Analytic).unwrap();
        let fd = eigensystem(&g, &p, BoundaryKind::Dirichlet, 4, EigenMethod::FiniteDifference).unwrap();
        let h = 1.0 / 64.0;
        for n in 1..=4 {
            let exact = (n as f64 * PI).powi(2) + 1.0;
            assert!((a.eigenvalues[n - 1] - exact).abs() < 1e-8);
            let err = (fd.eigenvalues[n - 1] - exact).abs();
            assert!(err < (n as f64 * PI).powi(4) * h * h / 12.0 * 1.01 + 1e-12, "n={n} err={err}");
        }
    }

    #[test]
    fn neumann_ground_state() {
        let g = unit(31);
        let p = Potential::constant(&g, 1.0).unwrap();
        for method in [EigenMethod::Analytic, EigenMethod::FiniteDifference] {
            let sys = eigensystem(&g, &p, BoundaryKind::Neumann, 3, method).unwrap();
            assert!((sys.eigenvalues[0] - 1.0).abs() < 1e-12);
            assert!(sys.vectors[0].iter().all(|&v| (v - 1.0).abs() < 1e-12));
        }
    }

    #[test]
    fn dense_matches_closed_form() {
        // a tiny non-constant perturbation forces the dense path
        let g = unit(40);
        let p = Potential::from_fn(&g, |x, _| 1.0 + 1e-13 * x).unwrap();
        let q = Potential::constant(&g, 1.0).unwrap();
        for kind in [BoundaryKind::Dirichlet, BoundaryKind::Neumann] {
            let a = eigensystem(&g, &p, kind, 10, EigenMethod::FiniteDifference).unwrap();
            let b = eigensystem(&g, &q, kind, 10, EigenMethod::FiniteDifference).unwrap();
            for (x, y) in a.eigenvalues.iter().zip(&b.eigenvalues) {
                assert!((x - y).abs() < 1e-9 * y.max(1.0));
            }
            for (u, v) in a.vectors.iter().zip(&b.vectors) {
                let d = u.iter().zip(v).map(|(s, t)| (s - t).abs()).fold(0.0, f64::max);
                assert!(d < 1e-7, "{kind:?} {d}");
            }
        }
    }

    #[test]
    fn tensor_matches_dense_on_rectangle() {
        let g = SpatialGrid::rectangle((0.0, 1.0), (0.0, 1.5), (16, 17)).unwrap();
        let sep = Potential::from_fn(&g, |x, y| 1.0 + x + y * y).unwrap();
        let bent = Potential::from_fn(&g, |x, y| 1.0 + x + y * y + 1e-13 * x * y).unwrap();
        for kind in [BoundaryKind::Dirichlet, BoundaryKind::Neumann] {
            let a = eigensystem(&g, &sep, kind, 12, EigenMethod::FiniteDifference).unwrap();
            let b = eigensystem(&g, &bent, kind, 12, EigenMethod::FiniteDifference).unwrap();
            for (x, y) in a.eigenvalues.iter().zip(&b.eigenvalues) {
                assert!((x - y).abs() < 1e-8 * y.max(1.0), "{kind:?}: {x} vs {y}");
            }
        }
    }

    #[test]
    fn too_many_modes_is_contract_error() {
        let g = unit(16);
        let p = Potential::zero(&g);
        assert!(matches!(
            eigensystem(&g, &p, BoundaryKind::Dirichlet, 17, EigenMethod::FiniteDifference),
            Err(Error::Contract(_))
        ));
        assert!(eigensystem(&g, &p, BoundaryKind::Neumann, 18, EigenMethod::FiniteDifference).is_ok());
    }

    #[test]
    fn traces_of_first_sine() {
        let g = unit(127);
        let sys = eigensystem(&g, &Potential::zero(&g), BoundaryKind::Dirichlet, 1, EigenMethod::FiniteDifference).unwrap();
        let exact = 2f64.sqrt() * PI;
        assert!((sys.normal_traces[0][0] + exact).abs() < 1e-3);
        assert!((sys.normal_traces[0][1] + exact).abs() < 1e-3);
    }
}
