//! Harnack ratios of the Laplace-transformed problem
//! `(−Δ + p + s·w(s)) û = 0`, `û = ĝ(s)` on the boundary.

use std::fmt::Write as _;

use rayon::prelude::*;

use crate::error::{contract, Result};
use crate::forward::BoundaryData;
use crate::frac::{TimeSeries, WeightFunction};
use crate::laplace::laplace_of_series_shifted;
use crate::spectral::{BoundaryKind, EllipticSolver, Potential, SpatialGrid};

pub const DEFAULT_HARNACK_S: [f64; 5] = [1.0, 10.0, 1e2, 1e3, 1e4];

/// Closed box `[lo, hi]` inside the domain.
#[derive(Debug, Clone, PartialEq)]
pub struct Subdomain {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
}

impl Subdomain {
    /// The middle third of every axis.
    pub fn middle_third(space: &SpatialGrid) -> Self {
        let lo = space.axes().iter().map(|a| a.lo + a.length() / 3.0).collect();
        let hi = space.axes().iter().map(|a| a.lo + 2.0 * a.length() / 3.0).collect();
        Self { lo, hi }
    }

    pub fn describe(&self) -> String {
        let parts: Vec<String> = self.lo.iter().zip(&self.hi).map(|(a, b)| format!("[{a}, {b}]")).collect();
        parts.join(" x ")
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct HarnackReport {
    pub s_values: Vec<f64>,
    pub sw_values: Vec<f64>,
    pub sups: Vec<f64>,
    pub infs: Vec<f64>,
    pub ratios: Vec<f64>,
    /// Least `C` with `log ratio ≤ C(1 + s·w(s))` at every `s`.
    pub fitted_c: f64,
    /// Unconstrained least-squares slope of `log ratio` against `1 + s·w(s)`.
    pub least_squares_c: f64,
    pub subdomain: Subdomain,
}

impl HarnackReport {
    pub fn log_ratios(&self) -> Vec<f64> {
        self.ratios.iter().map(|r| r.ln()).collect()
    }

    /// `log ratio ≤ C(1 + sw)` at every probe, with a relative slack of 1e-12.
    pub fn holds_with(&self, c: f64) -> bool {
        self.log_ratios()
            .iter()
            .zip(&self.sw_values)
            .all(|(l, sw)| *l <= c * (1.0 + sw) * (1.0 + 1e-12))
    }

    /// CSV `s,sw,sup,inf,log_ratio` and a summary comment line.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("s,sw,sup,inf,log_ratio\n");
        for i in 0..self.s_values.len() {
            let _ = writeln!(
                out,
                "{:e},{:e},{:e},{:e},{:e}",
                self.s_values[i],
                self.sw_values[i],
                self.sups[i],
                self.infs[i],
                self.ratios[i].ln()
            );
        }
        let _ = writeln!(
            out,
            "# fitted_C={:e} least_squares_C={:e} U={}",
            self.fitted_c,
            self.least_squares_c,
            self.subdomain.describe()
        );
        out
    }
}

/// Solves the transformed elliptic problem at every `s` and records the
/// Harnack ratio `sup_U û / inf_U û`.
pub fn harnack_scan(
    space: &SpatialGrid,
    p: &Potential,
    mu: &WeightFunction,
    kind: BoundaryKind,
    data: &BoundaryData,
    subdomain: &Subdomain,
    s_values: &[f64],
) -> Result<HarnackReport> {
    if subdomain.lo.len() != space.dimension() || subdomain.hi.len() != space.dimension() {
        return Err(contract("subdomain dimension differs from the grid"));
    }
    let margin = space.margin_cells(&subdomain.lo, &subdomain.hi);
    if margin < 2.0 - 1e-9 {
        return Err(contract(format!("subdomain is {margin} cells from the boundary; at least 2 are needed")));
    }
    let nodes = space.nodes_in_box(&subdomain.lo, &subdomain.hi);
    if nodes.is_empty() {
        return Err(contract("subdomain contains no grid nodes"));
    }
    if let Some(s) = s_values.iter().find(|s| !(**s > 0.0) || !s.is_finite()) {
        return Err(contract(format!("transform variables must be positive, got {s}")));
    }
    // every component is scaled by e^{s·shift}, a common positive factor
    let shift = data
        .samples
        .iter()
        .filter_map(|s| s.iter().position(|&v| v != 0.0))
        .min()
        .map_or(0.0, |j| data.grid.values()[j.saturating_sub(1)]);
    let rows: Vec<(f64, f64, f64)> = s_values
        .par_iter()
        .map(|&s| {
            let sw = s * mu.moment_w(s)?;
            let nb = space.boundary_nodes().len();
            let mut trace = vec![0.0; nb];
            for (c, samples) in data.components.iter().zip(&data.samples) {
                let series = TimeSeries { grid: data.grid.clone(), samples: samples.clone() };
                let (value, _) = laplace_of_series_shifted(&series, s, shift);
                for (t, w) in trace.iter_mut().zip(&c.weights) {
                    *t += w * value;
                }
            }
            let solver = EllipticSolver::new(space, p, sw, kind)?;
            let u = solver.solve(&vec![0.0; space.node_count()], &trace)?;
            let sup = nodes.iter().map(|&k| u[k]).fold(f64::NEG_INFINITY, f64::max);
            let inf = nodes.iter().map(|&k| u[k]).fold(f64::INFINITY, f64::min);
            if !(inf > 0.0) {
                return Err(contract(format!("transformed solution is not positive on the subdomain at s = {s}: inf = {inf:e}")));
            }
            Ok((sw, sup, inf))
        })
        .collect::<Result<_>>()?;
    let sw_values: Vec<f64> = rows.iter().map(|r| r.0).collect();
    let sups: Vec<f64> = rows.iter().map(|r| r.1).collect();
    let infs: Vec<f64> = rows.iter().map(|r| r.2).collect();
    let ratios: Vec<f64> = rows.iter().map(|r| (r.1 / r.2).max(1.0)).collect();
    let xs: Vec<f64> = sw_values.iter().map(|sw| 1.0 + sw).collect();
    let logs: Vec<f64> = ratios.iter().map(|r| r.ln()).collect();
    let fitted_c = xs.iter().zip(&logs).map(|(x, l)| l / x).fold(0.0, f64::max);
    let sxx: f64 = xs.iter().map(|x| x * x).sum();
    let least_squares_c = xs.iter().zip(&logs).map(|(x, l)| x * l).sum::<f64>() / sxx;
    Ok(HarnackReport {
        s_values: s_values.to_vec(),
        sw_values,
        sups,
        infs,
        ratios,
        fitted_c,
        least_squares_c,
        subdomain: subdomain.clone(),
    })
}
