//! Time-dependent boundary data built from smooth compactly supported profiles.

use crate::error::{contract, domain, Result};
use crate::frac::TimeGrid;
use crate::spectral::SpatialGrid;

/// Scalar time profile `≥ 0`, vanishing near `t = 0` and `t = T`.
#[derive(Debug, Clone, PartialEq)]
pub enum Profile {
    /// `A [(t−a)(b−t)/(w/2)²]⁴` on `[a, b] = [c − w/2, c + w/2]`.
    PolynomialBump { center: f64, width: f64, amplitude: f64 },
    /// `A [(1 + cos(2π(t−c)/w))/2]²` on `[c − w/2, c + w/2]`.
    RaisedCosine { center: f64, width: f64, amplitude: f64 },
    /// Piecewise-linear through `(t, value)` points, zero outside.
    Table(Vec<(f64, f64)>),
}

impl Profile {
    /// The bump `t⁴(T−t)⁴` scaled to peak `amplitude` at `T/2`.
    pub fn full_bump(horizon: f64, amplitude: f64) -> Self {
        Profile::PolynomialBump { center: 0.5 * horizon, width: horizon, amplitude }
    }

    pub fn eval(&self, t: f64) -> f64 {
        match self {
            Profile::PolynomialBump { center, width, amplitude } => {
                let half = 0.5 * width;
                let x = (t - center) / half;
                if x.abs() >= 1.0 {
                    0.0
                } else {
                    amplitude * (1.0 - x * x).powi(4)
                }
            }
            Profile::RaisedCosine { center, width, amplitude } => {
                let x = (t - center) / width;
                if x.abs() >= 0.5 {
                    0.0
                } else {
                    let c = 0.5 * (1.0 + (2.0 * std::f64::consts::PI * x).cos());
                    amplitude * c * c
                }
            }
            Profile::Table(points) => {
                if points.is_empty() || t <= points[0].0 || t >= points[points.len() - 1].0 {
                    return 0.0;
                }
                let k = points.partition_point(|p| p.0 <= t);
                let (a, b) = (points[k - 1], points[k]);
                a.1 + (b.1 - a.1) * (t - a.0) / (b.0 - a.0)
            }
        }
    }

    pub fn validate(&self, horizon: f64) -> Result<()> {
        match self {
            Profile::PolynomialBump { center, width, amplitude }
            | Profile::RaisedCosine { center, width, amplitude } => {
                if !(*width > 0.0) || !(*amplitude >= 0.0) {
                    return Err(domain("profile needs width > 0 and amplitude >= 0"));
                }
                let (a, b) = (center - 0.5 * width, center + 0.5 * width);
                if a < -1e-12 * horizon || b > horizon * (1.0 + 1e-12) {
                    return Err(domain(format!("profile support [{a}, {b}] leaves [0, {horizon}]")));
                }
            }
            Profile::Table(points) => {
                if points.len() < 3 {
                    return Err(domain("table profile needs at least three points"));
                }
                if points.windows(2).any(|w| !(w[1].0 > w[0].0)) {
                    return Err(domain("table times must increase"));
                }
                if points.iter().any(|p| !(p.1 >= 0.0)) {
                    return Err(domain("table values must be nonnegative"));
                }
                if points[0].1 != 0.0 || points[points.len() - 1].1 != 0.0 {
                    return Err(domain("table must start and end at zero"));
                }
                if points[0].0 < 0.0 || points[points.len() - 1].0 > horizon {
                    return Err(domain("table leaves [0, T]"));
                }
            }
        }
        Ok(())
    }

    pub fn descriptor(&self) -> String {
        match self {
            Profile::PolynomialBump { center, width, amplitude } => {
                format!("polynomial-bump center={center} width={width} amplitude={amplitude}")
            }
            Profile::RaisedCosine { center, width, amplitude } => {
                format!("raised-cosine center={center} width={width} amplitude={amplitude}")
            }
            Profile::Table(points) => {
                let body: Vec<String> = points.iter().map(|(t, v)| format!("{t}:{v}")).collect();
                format!("table {}", body.join(","))
            }
        }
    }
}

/// One separable piece `weights(x) · profile(t)` of the boundary data.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryComponent {
    /// Nonnegative spatial weights at `grid.boundary_nodes()`.
    pub weights: Vec<f64>,
    pub profile: Profile,
}

/// Boundary data `g(x, t) = Σ_c weights_c(x) profile_c(t)` on a time grid.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryData {
    pub grid: TimeGrid,
    pub components: Vec<BoundaryComponent>,
    /// `profile_c(t_j)`, indexed `[c][j]`.
    pub samples: Vec<Vec<f64>>,
}

impl BoundaryData {
    pub fn new(space: &SpatialGrid, grid: &TimeGrid, components: Vec<BoundaryComponent>) -> Result<Self> {
        let nb = space.boundary_nodes().len();
        for c in &components {
            if c.weights.len() != nb {
                return Err(contract(format!("boundary weights have {} entries, expected {nb}", c.weights.len())));
            }
            if c.weights.iter().any(|w| !(*w >= 0.0)) {
                return Err(contract("boundary weights must be nonnegative"));
            }
            c.profile.validate(grid.horizon())?;
        }
        let samples = components
            .iter()
            .map(|c| grid.values().iter().map(|&t| c.profile.eval(t)).collect())
            .collect();
        let out = Self { grid: grid.clone(), components, samples };
        out.check_vanishing()?;
        Ok(out)
    }

    /// Zero data on every boundary node.
    pub fn zero(space: &SpatialGrid, grid: &TimeGrid) -> Self {
        let _ = space;
        Self { grid: grid.clone(), components: Vec::new(), samples: Vec::new() }
    }

    /// Per-edge amplitudes (1-D: left, right; 2-D: left, right, bottom, top)
    /// times one profile. Corners take the mean of their two edges.
    pub fn edges(space: &SpatialGrid, grid: &TimeGrid, amplitudes: &[f64], profile: Profile) -> Result<Self> {
        let weights = edge_weights(space, amplitudes)?;
        Self::new(space, grid, vec![BoundaryComponent { weights, profile }])
    }

    /// Discrete proxy for compact support in `(0, T)`: `g = 0` at both ends and
    /// the first two differences at each end below `(h/T)·max g`.
    fn check_vanishing(&self) -> Result<()> {
        let n = self.grid.len();
        if n < 3 {
            return Ok(());
        }
        let horizon = self.grid.horizon();
        for (c, s) in self.samples.iter().enumerate() {
            let peak = s.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            if peak == 0.0 {
                continue;
            }
            if s[0] != 0.0 || s[n - 1] != 0.0 {
                return Err(contract(format!("boundary profile {c} does not vanish at t = 0 and t = T")));
            }
            let (h0, h1) = (self.grid.step(0), self.grid.step(n - 2));
            let tol0 = peak * h0 / horizon;
            let tol1 = peak * h1 / horizon;
            let d0 = [s[1] - s[0], s[2] - 2.0 * s[1] + s[0]];
            let d1 = [s[n - 2] - s[n - 1], s[n - 3] - 2.0 * s[n - 2] + s[n - 1]];
            if d0.iter().any(|d| d.abs() > tol0) || d1.iter().any(|d| d.abs() > tol1) {
                return Err(contract(format!(
                    "boundary profile {c} is not flat enough at the ends of [0, T]"
                )));
            }
        }
        Ok(())
    }

    /// `g(·, t_j)` at the boundary nodes.
    pub fn trace_at(&self, j: usize) -> Vec<f64> {
        let nb = self.components.first().map_or(0, |c| c.weights.len());
        let mut out = vec![0.0; nb];
        for (c, s) in self.components.iter().zip(&self.samples) {
            for (o, w) in out.iter_mut().zip(&c.weights) {
                *o += w * s[j];
            }
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.components.iter().zip(&self.samples).all(|(c, s)| {
            c.weights.iter().all(|&w| w == 0.0) || s.iter().all(|&v| v == 0.0)
        })
    }

    /// `a·self + b·other` as a combined component list (same grid).
    pub fn combine(&self, a: f64, other: &BoundaryData, b: f64) -> Result<Self> {
        if self.grid != other.grid {
            return Err(contract("boundary data on different time grids"));
        }
        let mut components = Vec::new();
        let mut samples = Vec::new();
        for (scale, src) in [(a, self), (b, other)] {
            for (c, s) in src.components.iter().zip(&src.samples) {
                components.push(BoundaryComponent { weights: c.weights.iter().map(|w| w * scale).collect(), profile: c.profile.clone() });
                samples.push(s.clone());
            }
        }
        Ok(Self { grid: self.grid.clone(), components, samples })
    }

    /// Scales every component's spatial weights.
    pub fn scaled(&self, factor: f64) -> Self {
        let mut out = self.clone();
        for c in &mut out.components {
            c.weights.iter_mut().for_each(|w| *w *= factor);
        }
        out
    }
}

pub fn edge_weights(space: &SpatialGrid, amplitudes: &[f64]) -> Result<Vec<f64>> {
    let edges = 2 * space.dimension();
    if amplitudes.len() != edges {
        return Err(contract(format!("expected {edges} edge amplitudes, got {}", amplitudes.len())));
    }
    if amplitudes.iter().any(|a| !(*a >= 0.0)) {
        return Err(contract("edge amplitudes must be nonnegative"));
    }
    let (nx, ny) = space.shape();
    Ok(space
        .boundary_nodes()
        .into_iter()
        .map(|k| {
            let (i, j) = space.split(k);
            let mut sides = Vec::with_capacity(2);
            if i == 0 {
                sides.push(amplitudes[0]);
            }
            if i == nx - 1 {
                sides.push(amplitudes[1]);
            }
            if space.dimension() == 2 {
                if j == 0 {
                    sides.push(amplitudes[2]);
                }
                if j == ny - 1 {
                    sides.push(amplitudes[3]);
                }
            }
            sides.iter().sum::<f64>() / sides.len() as f64
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bump_shapes() {
        let p = Profile::full_bump(2.0, 3.0);
        assert_eq!(p.eval(1.0), 3.0);
        assert_eq!(p.eval(0.0), 0.0);
        assert_eq!(p.eval(2.0), 0.0);
        let r = Profile::RaisedCosine { center: 1.0, width: 1.0, amplitude: 2.0 };
        assert_eq!(r.eval(1.0), 2.0);
        assert_eq!(r.eval(0.4), 0.0);
        let t = Profile::Table(vec![(0.2, 0.0), (0.5, 1.0), (0.8, 0.0)]);
        assert!((t.eval(0.35) - 0.5).abs() < 1e-15);
        assert_eq!(t.eval(0.1), 0.0);
    }

    #[test]
    fn vanishing_proxy() {
        let space = SpatialGrid::interval(0.0, 1.0, 16).unwrap();
        let grid = TimeGrid::uniform(1.0, 100).unwrap();
        assert!(BoundaryData::edges(&space, &grid, &[1.0, 0.5], Profile::full_bump(1.0, 1.0)).is_ok());
        // a table that jumps straight up from t = 0 is rejected
        let steep = Profile::Table(vec![(0.0, 0.0), (0.01, 1.0), (0.5, 0.0)]);
        assert!(BoundaryData::edges(&space, &grid, &[1.0, 0.0], steep).is_err());
        assert!(BoundaryData::edges(&space, &grid, &[-1.0, 0.0], Profile::full_bump(1.0, 1.0)).is_err());
        let wide = Profile::PolynomialBump { center: 0.5, width: 1.5, amplitude: 1.0 };
        assert!(BoundaryData::edges(&space, &grid, &[1.0, 0.0], wide).is_err());
    }

    #[test]
    fn corner_weights_average_edges() {
        let space = SpatialGrid::rectangle((0.0, 1.0), (0.0, 1.0), (16, 16)).unwrap();
        let w = edge_weights(&space, &[1.0, 0.0, 3.0, 0.0]).unwrap();
        let b = space.boundary_nodes();
        let corner = b.iter().position(|&k| k == 0).unwrap();
        assert_eq!(w[corner], 2.0);
    }
}
