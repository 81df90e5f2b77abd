//! Uniform node grids on intervals and rectangles.

use crate::error::{contract, domain, Result};

/// Minimum number of interior nodes per axis.
pub const MIN_INTERIOR: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Axis {
    pub lo: f64,
    pub hi: f64,
    /// Interior nodes; the axis carries `interior + 2` nodes in total.
    pub interior: usize,
}

impl Axis {
    pub fn new(lo: f64, hi: f64, interior: usize) -> Result<Self> {
        if !(hi > lo) || !lo.is_finite() || !hi.is_finite() {
            return Err(domain(format!("axis needs lo < hi, got [{lo}, {hi}]")));
        }
        if interior < MIN_INTERIOR {
            return Err(contract(format!(
                "axis needs at least {MIN_INTERIOR} interior nodes, got {interior}"
            )));
        }
        Ok(Self { lo, hi, interior })
    }

    pub fn len(&self) -> usize {
        self.interior + 2
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn length(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn step(&self) -> f64 {
        self.length() / (self.interior + 1) as f64
    }

    pub fn node(&self, i: usize) -> f64 {
        if i == self.interior + 1 {
            self.hi
        } else {
            self.lo + i as f64 * self.step()
        }
    }

    /// Trapezoid weights over all nodes.
    pub fn weights(&self) -> Vec<f64> {
        let h = self.step();
        let mut w = vec![h; self.len()];
        w[0] = 0.5 * h;
        w[self.interior + 1] = 0.5 * h;
        w
    }

    fn locate(&self, x: f64) -> Option<usize> {
        let h = self.step();
        let k = ((x - self.lo) / h).round();
        if k < 0.0 || k > (self.interior + 1) as f64 {
            return None;
        }
        let k = k as usize;
        ((self.node(k) - x).abs() <= 1e-9 * h).then_some(k)
    }
}

/// Tensor grid over an interval (one axis) or rectangle (two axes), with
/// nodes numbered x-fastest.
#[derive(Debug, Clone, PartialEq)]
pub struct SpatialGrid {
    axes: Vec<Axis>,
}

impl SpatialGrid {
    pub fn interval(lo: f64, hi: f64, interior: usize) -> Result<Self> {
        Ok(Self { axes: vec![Axis::new(lo, hi, interior)?] })
    }

    pub fn rectangle(x: (f64, f64), y: (f64, f64), interior: (usize, usize)) -> Result<Self> {
        Ok(Self { axes: vec![Axis::new(x.0, x.1, interior.0)?, Axis::new(y.0, y.1, interior.1)?] })
    }

    pub fn from_axes(axes: Vec<Axis>) -> Result<Self> {
        if axes.is_empty() || axes.len() > 2 {
            return Err(contract("grids have one or two axes"));
        }
        for a in &axes {
            Axis::new(a.lo, a.hi, a.interior)?;
        }
        Ok(Self { axes })
    }

    pub fn dimension(&self) -> usize {
        self.axes.len()
    }

    pub fn axes(&self) -> &[Axis] {
        &self.axes
    }

    pub fn axis(&self, k: usize) -> &Axis {
        &self.axes[k]
    }

    /// Nodes per axis, `(nx, ny)` with `ny = 1` in one dimension.
    pub fn shape(&self) -> (usize, usize) {
        (self.axes[0].len(), self.axes.get(1).map_or(1, Axis::len))
    }

    pub fn node_count(&self) -> usize {
        let (nx, ny) = self.shape();
        nx * ny
    }

    pub fn index(&self, i: usize, j: usize) -> usize {
        i + self.shape().0 * j
    }

    pub fn split(&self, idx: usize) -> (usize, usize) {
        let nx = self.shape().0;
        (idx % nx, idx / nx)
    }

    /// Coordinates of a node; `y = 0` in one dimension.
    pub fn coords(&self, idx: usize) -> (f64, f64) {
        let (i, j) = self.split(idx);
        (self.axes[0].node(i), self.axes.get(1).map_or(0.0, |a| a.node(j)))
    }

    pub fn is_boundary(&self, idx: usize) -> bool {
        let (i, j) = self.split(idx);
        let (nx, ny) = self.shape();
        i == 0 || i == nx - 1 || (self.dimension() == 2 && (j == 0 || j == ny - 1))
    }

    pub fn is_corner(&self, idx: usize) -> bool {
        if self.dimension() == 1 {
            return false;
        }
        let (i, j) = self.split(idx);
        let (nx, ny) = self.shape();
        (i == 0 || i == nx - 1) && (j == 0 || j == ny - 1)
    }

    pub fn boundary_nodes(&self) -> Vec<usize> {
        (0..self.node_count()).filter(|&k| self.is_boundary(k)).collect()
    }

    pub fn interior_nodes(&self) -> Vec<usize> {
        (0..self.node_count()).filter(|&k| !self.is_boundary(k)).collect()
    }

    /// Trapezoid quadrature weights over all nodes.
    pub fn weights(&self) -> Vec<f64> {
        let wx = self.axes[0].weights();
        let wy = self.axes.get(1).map_or(vec![1.0], Axis::weights);
        wy.iter().flat_map(|b| wx.iter().map(move |a| a * b)).collect()
    }

    /// Arc-length weights of the boundary nodes, in `boundary_nodes` order:
    /// 1 at the ends of an interval; `h` along rectangle edges and
    /// `(hx + hy)/2` at corners.
    pub fn boundary_weights(&self) -> Vec<f64> {
        if self.dimension() == 1 {
            return vec![1.0, 1.0];
        }
        let (hx, hy) = (self.axes[0].step(), self.axes[1].step());
        let (nx, _) = self.shape();
        self.boundary_nodes()
            .into_iter()
            .map(|k| {
                if self.is_corner(k) {
                    0.5 * (hx + hy)
                } else {
                    let (i, _) = self.split(k);
                    if i == 0 || i == nx - 1 {
                        hy
                    } else {
                        hx
                    }
                }
            })
            .collect()
    }

    /// Node at `point`, if the point coincides with one.
    pub fn node_at(&self, point: &[f64]) -> Option<usize> {
        if point.len() != self.dimension() {
            return None;
        }
        let i = self.axes[0].locate(point[0])?;
        let j = match self.axes.get(1) {
            Some(a) => a.locate(point[1])?,
            None => 0,
        };
        Some(self.index(i, j))
    }

    /// Nodes whose coordinates lie in the closed box `[lo, hi]`.
    pub fn nodes_in_box(&self, lo: &[f64], hi: &[f64]) -> Vec<usize> {
        let eps = 1e-12;
        (0..self.node_count())
            .filter(|&k| {
                let (x, y) = self.coords(k);
                let c = [x, y];
                (0..self.dimension()).all(|d| c[d] >= lo[d] - eps && c[d] <= hi[d] + eps)
            })
            .collect()
    }

    /// Smallest distance, in cells, from a box to the boundary.
    pub fn margin_cells(&self, lo: &[f64], hi: &[f64]) -> f64 {
        self.axes
            .iter()
            .enumerate()
            .map(|(d, a)| ((lo[d] - a.lo) / a.step()).min((a.hi - hi[d]) / a.step()))
            .fold(f64::INFINITY, f64::min)
    }

    /// Field sampled from a function of `(x, y)`.
    pub fn sample(&self, f: impl Fn(f64, f64) -> f64) -> Vec<f64> {
        (0..self.node_count()).map(|k| {
            let (x, y) = self.coords(k);
            f(x, y)
        }).collect()
    }

    /// Discrete `L²(Ω)` inner product.
    pub fn inner(&self, a: &[f64], b: &[f64]) -> f64 {
        self.weights().iter().zip(a).zip(b).map(|((w, x), y)| w * x * y).sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn interval_layout() {
        let g = SpatialGrid::interval(0.0, 1.0, 19).unwrap();
        assert_eq!(g.node_count(), 21);
        assert_eq!(g.boundary_nodes(), vec![0, 20]);
        assert!((g.weights().iter().sum::<f64>() - 1.0).abs() < 1e-15);
        assert_eq!(g.node_at(&[0.25]), Some(5));
        assert_eq!(g.node_at(&[0.26]), None);
        assert!(SpatialGrid::interval(0.0, 1.0, 8).is_err());
    }

    #[test]
    fn rectangle_layout() {
        let g = SpatialGrid::rectangle((0.0, 2.0), (0.0, 1.0), (17, 16)).unwrap();
        assert_eq!(g.shape(), (19, 18));
        assert_eq!(g.boundary_nodes().len(), 2 * 19 + 2 * 16);
        assert!((g.weights().iter().sum::<f64>() - 2.0).abs() < 1e-14);
        let perimeter: f64 = g.boundary_weights().iter().sum();
        assert!((perimeter - 6.0).abs() < 1e-13);
        let k = g.node_at(&[1.0, 8.0 / 17.0]).unwrap();
        let (x, y) = g.coords(k);
        assert!((x - 1.0).abs() < 1e-14 && (y - 8.0 / 17.0).abs() < 1e-14);
        assert_eq!(g.node_at(&[1.0, 0.5]), None);
        assert!(g.is_corner(g.index(0, 17)));
    }
}
