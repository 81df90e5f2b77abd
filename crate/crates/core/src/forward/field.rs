//! Space-time solution samples.

use std::fmt::Write as _;

use crate::error::{contract, Error, Result};
use crate::frac::{TimeGrid, TimeSeries};
use crate::spectral::{BoundaryKind, SpatialGrid};

/// Which discretization produced a field.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Provenance {
    Spectral,
    Timestep,
}

impl Provenance {
    pub fn name(self) -> &'static str {
        match self {
            Provenance::Spectral => "spectral",
            Provenance::Timestep => "timestep",
        }
    }
}

/// `u(x_k, t_j)` stored time-major: `samples[j * nodes + k]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Field {
    pub space: SpatialGrid,
    pub time: TimeGrid,
    pub kind: BoundaryKind,
    pub provenance: Provenance,
    pub samples: Vec<f64>,
    /// Size estimate of the omitted eigenmodes (0 for the time-stepper or
    /// when every mode is used).
    pub tail_estimate: f64,
}

/// Magic bytes of the binary field layout.
pub const FIELD_MAGIC: &[u8; 8] = b"USFIELD1";

impl Field {
    pub fn zeros(space: &SpatialGrid, time: &TimeGrid, kind: BoundaryKind, provenance: Provenance) -> Self {
        Self {
            space: space.clone(),
            time: time.clone(),
            kind,
            provenance,
            samples: vec![0.0; space.node_count() * time.len()],
            tail_estimate: 0.0,
        }
    }

    /// Checks `u(·, 0) = 0` and finiteness.
    pub fn check(&self) -> Result<()> {
        let n = self.space.node_count();
        if self.samples.len() != n * self.time.len() {
            return Err(contract("field sample count does not match its grids"));
        }
        if let Some(k) = self.samples[..n].iter().position(|&v| v != 0.0) {
            return Err(Error::Invariant(format!("field is nonzero at t = 0 (node {k})")));
        }
        if let Some(i) = self.samples.iter().position(|v| !v.is_finite()) {
            return Err(Error::Invariant(format!(
                "field is not finite at node {} time index {}",
                i % n,
                i / n
            )));
        }
        Ok(())
    }

    pub fn node_count(&self) -> usize {
        self.space.node_count()
    }

    pub fn at(&self, j: usize, k: usize) -> f64 {
        self.samples[j * self.node_count() + k]
    }

    /// All nodes at time index `j`.
    pub fn slice(&self, j: usize) -> &[f64] {
        let n = self.node_count();
        &self.samples[j * n..(j + 1) * n]
    }

    pub fn node_series(&self, k: usize) -> TimeSeries {
        let n = self.node_count();
        let samples = (0..self.time.len()).map(|j| self.samples[j * n + k]).collect();
        TimeSeries { grid: self.time.clone(), samples }
    }

    pub fn max(&self) -> f64 {
        self.samples.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn min(&self) -> f64 {
        self.samples.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// `L²(Ω×(0,T))` norm: spatial grid quadrature, trapezoid in time.
    pub fn l2_norm(&self) -> f64 {
        let w = self.space.weights();
        let t = self.time.values();
        let level: Vec<f64> = (0..t.len())
            .map(|j| self.slice(j).iter().zip(&w).map(|(u, c)| c * u * u).sum())
            .collect();
        let mut acc = 0.0;
        for j in 0..t.len() - 1 {
            acc += 0.5 * (t[j + 1] - t[j]) * (level[j] + level[j + 1]);
        }
        acc.sqrt()
    }

    pub fn same_grids(&self, other: &Field) -> bool {
        self.space == other.space && self.time == other.time
    }

    /// `‖self − other‖ / ‖other‖` in `L²(Ω×(0,T))`.
    pub fn relative_l2_distance(&self, other: &Field) -> Result<f64> {
        if !self.same_grids(other) {
            return Err(contract("fields live on different grids"));
        }
        let mut diff = other.clone();
        for (d, a) in diff.samples.iter_mut().zip(&self.samples) {
            *d = a - *d;
        }
        Ok(diff.l2_norm() / other.l2_norm())
    }

    /// Samples on the time indices `0, stride, 2·stride, …` and the spatial
    /// nodes of `coarse` (which must be a subgrid).
    pub fn restrict_to(&self, coarse_space: &SpatialGrid, coarse_time: &TimeGrid) -> Result<Field> {
        let time_idx: Option<Vec<usize>> = coarse_time.values().iter().map(|&t| self.time.index_of(t)).collect();
        let time_idx = time_idx.ok_or_else(|| contract("coarse time grid is not a subgrid"))?;
        let node_idx: Option<Vec<usize>> = (0..coarse_space.node_count())
            .map(|k| {
                let (x, y) = coarse_space.coords(k);
                let p = if coarse_space.dimension() == 1 { vec![x] } else { vec![x, y] };
                self.space.node_at(&p)
            })
            .collect();
        let node_idx = node_idx.ok_or_else(|| contract("coarse spatial grid is not a subgrid"))?;
        let samples = time_idx
            .iter()
            .flat_map(|&j| node_idx.iter().map(move |&k| (j, k)))
            .map(|(j, k)| self.at(j, k))
            .collect();
        Ok(Field {
            space: coarse_space.clone(),
            time: coarse_time.clone(),
            kind: self.kind,
            provenance: self.provenance,
            samples,
            tail_estimate: self.tail_estimate,
        })
    }

    /// CSV with columns `x[,y],t,u`, time-major.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        let dim = self.space.dimension();
        out.push_str(if dim == 1 { "x,t,u\n" } else { "x,y,t,u\n" });
        for (j, &t) in self.time.values().iter().enumerate() {
            for k in 0..self.node_count() {
                let (x, y) = self.space.coords(k);
                if dim == 1 {
                    let _ = writeln!(out, "{x:e},{t:e},{:e}", self.at(j, k));
                } else {
                    let _ = writeln!(out, "{x:e},{y:e},{t:e},{:e}", self.at(j, k));
                }
            }
        }
        out
    }

    /// Little-endian binary layout:
    ///
    /// | bytes | content |
    /// |---|---|
    /// | 8 | magic `USFIELD1` |
    /// | 4 | `u32` dimension d |
    /// | 4·d | `u32` nodes per axis |
    /// | 16·d | `f64` axis bounds (lo, hi) |
    /// | 8 | `u64` time count m |
    /// | 8·m | `f64` times |
    /// | 8·m·n | `f64` samples, time-major |
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(64 + 8 * self.samples.len());
        out.extend_from_slice(FIELD_MAGIC);
        let axes = self.space.axes();
        out.extend_from_slice(&(axes.len() as u32).to_le_bytes());
        for a in axes {
            out.extend_from_slice(&(a.len() as u32).to_le_bytes());
        }
        for a in axes {
            out.extend_from_slice(&a.lo.to_le_bytes());
            out.extend_from_slice(&a.hi.to_le_bytes());
        }
        out.extend_from_slice(&(self.time.len() as u64).to_le_bytes());
        for t in self.time.values() {
            out.extend_from_slice(&t.to_le_bytes());
        }
        for v in &self.samples {
            out.extend_from_slice(&v.to_le_bytes());
        }
        out
    }
}
