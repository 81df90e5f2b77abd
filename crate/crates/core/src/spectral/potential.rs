//! The nonnegative potential `p(x)`.

use super::grid::SpatialGrid;
use crate::error::{contract, Result};

/// Nodal values of `p ≥ 0`, optionally certified bounded below by `c₀ > 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct Potential {
    values: Vec<f64>,
    c0: Option<f64>,
}

impl Potential {
    pub fn new(grid: &SpatialGrid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.node_count() {
            return Err(contract("potential length differs from the grid node count"));
        }
        if let Some((i, v)) = values.iter().enumerate().find(|(_, v)| !(**v >= 0.0) || !v.is_finite()) {
            return Err(contract(format!("potential must be finite and nonnegative; node {i} has {v}")));
        }
        Ok(Self { values, c0: None })
    }

    pub fn zero(grid: &SpatialGrid) -> Self {
        Self { values: vec![0.0; grid.node_count()], c0: None }
    }

    pub fn constant(grid: &SpatialGrid, c: f64) -> Result<Self> {
        Self::new(grid, vec![c; grid.node_count()])
    }

    pub fn from_fn(grid: &SpatialGrid, f: impl Fn(f64, f64) -> f64) -> Result<Self> {
        Self::new(grid, grid.sample(f))
    }

    /// Attaches the certificate `p ≥ c₀` with `c₀ = min p`; fails if `min p = 0`.
    pub fn certified(mut self) -> Result<Self> {
        let c0 = self.min();
        if !(c0 > 0.0) {
            return Err(contract("potential cannot be certified: min p is not positive"));
        }
        self.c0 = Some(c0);
        Ok(self)
    }

    pub fn c0(&self) -> Option<f64> {
        self.c0
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|&v| v == 0.0)
    }

    /// The common value if `p` is constant.
    pub fn constant_value(&self) -> Option<f64> {
        let first = self.values[0];
        self.values.iter().all(|&v| (v - first).abs() <= 1e-14 * first.abs().max(1.0)).then_some(first)
    }

    /// `(px, py)` with `p(x_i, y_j) = px[i] + py[j]` when `p` splits additively.
    pub fn additive_split(&self, grid: &SpatialGrid) -> Option<(Vec<f64>, Vec<f64>)> {
        let (nx, ny) = grid.shape();
        let p = |i: usize, j: usize| self.values[grid.index(i, j)];
        let px: Vec<f64> = (0..nx).map(|i| p(i, 0)).collect();
        let py: Vec<f64> = (0..ny).map(|j| p(0, j) - p(0, 0)).collect();
        let scale = self.values.iter().fold(1.0f64, |m, v| m.max(v.abs()));
        for j in 0..ny {
            for i in 0..nx {
                if (p(i, j) - px[i] - py[j]).abs() > 1e-12 * scale {
                    return None;
                }
            }
        }
        Some((px, py))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validation_and_certificate() {
        let g = SpatialGrid::interval(0.0, 1.0, 16).unwrap();
        assert!(Potential::constant(&g, -1.0).is_err());
        assert!(Potential::zero(&g).certified().is_err());
        let p = Potential::from_fn(&g, |x, _| 1.0 + x).unwrap().certified().unwrap();
        assert_eq!(p.c0(), Some(1.0));
        assert_eq!(Potential::constant(&g, 2.0).unwrap().constant_value(), Some(2.0));
    }

    #[test]
    fn splits_additive_potentials() {
        let g = SpatialGrid::rectangle((0.0, 1.0), (0.0, 1.0), (16, 16)).unwrap();
        let p = Potential::from_fn(&g, |x, y| x * x + (3.0 * y).cos() + 1.0).unwrap();
        let (px, py) = p.additive_split(&g).unwrap();
        let k = g.index(3, 7);
        assert!((px[3] + py[7] - p.values()[k]).abs() < 1e-14);
        let q = Potential::from_fn(&g, |x, y| 1.0 + x * y).unwrap();
        assert!(q.additive_split(&g).is_none());
    }
}
