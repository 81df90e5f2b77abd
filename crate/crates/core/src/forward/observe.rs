//! Single-point observations and their file formats.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use super::experiment::ExperimentConfig;
use super::field::Field;
use crate::error::{contract, Error, Result};
use crate::frac::{TimeGrid, TimeSeries, WeightFunction};

/// `u(x₀, ·)` with the experiment that produced it.
#[derive(Debug, Clone, PartialEq)]
pub struct ObservationRecord {
    pub x0: Vec<f64>,
    pub series: TimeSeries,
    pub experiment: ExperimentConfig,
    /// The weight that generated synthetic data, when known.
    pub mu: Option<WeightFunction>,
}

/// Extracts the time series at the grid node `x0`.
pub fn observe(field: &Field, x0: &[f64], experiment: &ExperimentConfig) -> Result<ObservationRecord> {
    let node = field
        .space
        .node_at(x0)
        .ok_or_else(|| contract(format!("observation point {x0:?} is not a grid node")))?;
    Ok(ObservationRecord { x0: x0.to_vec(), series: field.node_series(node), experiment: experiment.clone(), mu: None })
}

impl ObservationRecord {
    /// Same record with data and boundary amplitudes multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Self {
        let mut out = self.clone();
        out.series.samples.iter_mut().for_each(|v| *v *= factor);
        out.experiment.edges.iter_mut().for_each(|v| *v *= factor);
        out
    }

    /// CSV `t,u`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("t,u\n");
        for (t, u) in self.series.times().iter().zip(&self.series.samples) {
            let _ = writeln!(out, "{t:e},{u:e}");
        }
        out
    }

    /// Sidecar `key=value` lines: the experiment plus the generating weight.
    pub fn sidecar(&self) -> String {
        let mut out = self.experiment.to_text();
        if let Some(mu) = &self.mu {
            let join = |v: &[f64]| v.iter().map(f64::to_string).collect::<Vec<_>>().join(",");
            let _ = writeln!(out, "mu_alpha={}", join(mu.alpha_grid()));
            let _ = writeln!(out, "mu_values={}", join(mu.values()));
        }
        out
    }

    pub fn parse(csv: &str, sidecar: &str) -> Result<Self> {
        let mut map = BTreeMap::new();
        for (lineno, raw) in sidecar.lines().enumerate() {
            let line = raw.split('#').next().unwrap().trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| Error::Parse {
                line: lineno + 1,
                message: format!("expected key=value, found {line:?}"),
            })?;
            map.insert(k.trim().to_string(), v.trim().to_string());
        }
        let mu = match (map.remove("mu_alpha"), map.remove("mu_values")) {
            (Some(a), Some(v)) => {
                let nums = |s: &str| -> Result<Vec<f64>> {
                    s.split(',')
                        .map(|x| x.trim().parse::<f64>().map_err(|e| Error::Parse { line: 0, message: format!("bad weight value {x:?}: {e}") }))
                        .collect()
                };
                Some(WeightFunction::new(nums(&a)?, nums(&v)?)?)
            }
            (None, None) => None,
            _ => return Err(Error::Parse { line: 0, message: "mu_alpha and mu_values must appear together".into() }),
        };
        let experiment = ExperimentConfig::from_map(&mut map)?;
        if let Some(k) = map.keys().next() {
            return Err(Error::Parse { line: 0, message: format!("unknown sidecar key {k}") });
        }
        let mut times = Vec::new();
        let mut values = Vec::new();
        for (lineno, raw) in csv.lines().enumerate().skip(1) {
            let line = raw.trim();
            if line.is_empty() {
                continue;
            }
            let (t, u) = line.split_once(',').ok_or_else(|| Error::Parse {
                line: lineno + 1,
                message: "expected t,u".into(),
            })?;
            let parse = |s: &str| {
                s.trim().parse::<f64>().map_err(|e| Error::Parse { line: lineno + 1, message: format!("bad number {s:?}: {e}") })
            };
            times.push(parse(t)?);
            values.push(parse(u)?);
        }
        let series = TimeSeries::new(TimeGrid::new(times)?, values)?;
        Ok(Self { x0: experiment.x0.clone(), series, experiment, mu })
    }
}
