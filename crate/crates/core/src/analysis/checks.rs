//! Pointwise sign checks on fields and series.

use std::fmt;

use crate::error::{contract, Result};
use crate::forward::Field;
use crate::frac::{distributed_derivative, TimeSeries, WeightFunction};

/// Relative tolerance of the discrete maximum principle.
pub const DEFAULT_MAX_PRINCIPLE_TOL: f64 = 1e-6;

/// One machine-readable check outcome.
#[derive(Debug, Clone, PartialEq)]
pub struct CheckRecord {
    pub name: String,
    pub value: f64,
    pub threshold: f64,
    pub pass: bool,
}

impl fmt::Display for CheckRecord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let verdict = if self.pass { "PASS" } else { "FAIL" };
        write!(f, "{},{:e},{:e},{verdict}", self.name, self.value, self.threshold)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MaxPrincipleReport {
    pub min_value: f64,
    pub max_value: f64,
    /// Node and time index of the minimum.
    pub node: usize,
    pub time_index: usize,
    pub location: (f64, f64),
    pub time: f64,
    pub pass: bool,
}

impl MaxPrincipleReport {
    pub fn record(&self, name: &str, tol: f64) -> CheckRecord {
        CheckRecord {
            name: name.to_string(),
            value: self.min_value,
            threshold: -tol * self.max_value.max(0.0),
            pass: self.pass,
        }
    }
}

/// Global minimum of a field; passes iff `min ≥ −tol·max(max u, 0)`.
pub fn check_max_principle(field: &Field, tol: f64) -> MaxPrincipleReport {
    let n = field.node_count();
    let (mut at, mut min) = (0, f64::INFINITY);
    for (i, &v) in field.samples.iter().enumerate() {
        if v < min {
            min = v;
            at = i;
        }
    }
    let max = field.max();
    let (node, time_index) = (at % n, at / n);
    MaxPrincipleReport {
        min_value: min,
        max_value: max,
        node,
        time_index,
        location: field.space.coords(node),
        time: field.time.values()[time_index],
        pass: min >= -tol * max.max(0.0),
    }
}

/// `D^(μ)f(t₀)` at the last grid time where `f` attains its minimum; that
/// time must be positive.
pub fn extremum_lemma_probe(series: &TimeSeries, mu: &WeightFunction) -> Result<f64> {
    let min = series.samples.iter().copied().fold(f64::INFINITY, f64::min);
    let t0 = series.samples.iter().rposition(|&v| v == min).unwrap();
    if t0 == 0 {
        return Err(contract("the minimum is attained only at t = 0"));
    }
    Ok(distributed_derivative(series, mu)?.samples[t0])
}

/// First grid time in `(0, delta)` with `u(x, t) > threshold`; the default
/// threshold is `1e-10·max u`.
pub fn positivity_hitting(field: &Field, x: &[f64], delta: f64, threshold: Option<f64>) -> Result<Option<f64>> {
    let node = field
        .space
        .node_at(x)
        .ok_or_else(|| contract(format!("point {x:?} is not a grid node")))?;
    let threshold = threshold.unwrap_or(1e-10 * field.max().max(0.0));
    Ok(field
        .time
        .values()
        .iter()
        .enumerate()
        .skip(1)
        .take_while(|(_, &t)| t < delta)
        .find(|(j, _)| field.at(*j, node) > threshold)
        .map(|(_, &t)| t))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forward::Provenance;
    use crate::frac::TimeGrid;
    use crate::spectral::{BoundaryKind, SpatialGrid};

    #[test]
    fn zero_field_passes_and_has_no_hitting_time() {
        let space = SpatialGrid::interval(0.0, 1.0, 17).unwrap();
        let time = TimeGrid::uniform(1.0, 10).unwrap();
        let f = Field::zeros(&space, &time, BoundaryKind::Dirichlet, Provenance::Spectral);
        let r = check_max_principle(&f, DEFAULT_MAX_PRINCIPLE_TOL);
        assert!(r.pass);
        assert_eq!(r.min_value, 0.0);
        assert_eq!(positivity_hitting(&f, &[0.5], 1.0, None).unwrap(), None);
        assert!(positivity_hitting(&f, &[0.52], 1.0, None).is_err());
        let line = r.record("max-principle", 1e-6).to_string();
        assert!(line.ends_with(",PASS"), "{line}");
    }

    #[test]
    fn constant_series_probe_is_zero() {
        let g = TimeGrid::uniform(1.0, 20).unwrap();
        let mu = WeightFunction::constant(1.0).unwrap();
        assert_eq!(extremum_lemma_probe(&TimeSeries::from_fn(&g, |_| 2.0), &mu).unwrap(), 0.0);
        assert!(extremum_lemma_probe(&TimeSeries::from_fn(&g, |t| t), &mu).is_err());
    }
}
