//! The forward map μ ↦ u(x₀, ·) of a recorded experiment.

use crate::error::{contract, Result};
use crate::forward::{
    lag_times, BoundaryForcing, Experiment, ExperimentConfig, Generator, ObservationRecord, SolverOptions,
};
use crate::laplace::BasisSymbolTable;
use crate::frac::{TimeSeries, WeightFunction};

/// Spectral model of an experiment with the eigensystem and lifts cached.
#[derive(Debug, Clone)]
pub struct ForwardModel {
    pub experiment: Experiment,
    forcing: BoundaryForcing,
    options: SolverOptions,
    basis: Option<BasisSymbolTable>,
}

impl ForwardModel {
    pub fn new(config: &ExperimentConfig) -> Result<Self> {
        let experiment = config.build()?;
        let forcing = experiment.forcing()?;
        let options = experiment.options();
        Ok(Self { experiment, forcing, options, basis: None })
    }

    /// Precomputes the symbols of the hat basis on `alpha`; weights on that
    /// grid are then evaluated without new moment integrals.
    pub fn with_basis(mut self, alpha: &[f64]) -> Result<Self> {
        let lags = lag_times(&self.experiment.time)?;
        self.basis = Some(BasisSymbolTable::new(alpha, &lags, &self.options.contour)?);
        Ok(self)
    }

    /// Model for inverting `record`: the record's experiment, solved spectrally.
    pub fn for_record(record: &ObservationRecord) -> Result<Self> {
        let model = Self::new(&record.experiment)?;
        if record.series.grid != model.experiment.time {
            return Err(contract("record series does not match its experiment's time grid"));
        }
        Ok(model)
    }

    /// True when data from `config` would come from this very discretization.
    pub fn shares_discretization(&self, config: &ExperimentConfig) -> bool {
        config.generator == Generator::Spectral && {
            let mut a = config.clone();
            let mut b = self.experiment.config.clone();
            a.noise = 0.0;
            b.noise = 0.0;
            a.seed = 0;
            b.seed = 0;
            a.edges = vec![];
            b.edges = vec![];
            a == b
        }
    }

    pub fn observe(&self, mu: &WeightFunction) -> Result<TimeSeries> {
        if !(mu.sup_norm() > 0.0) {
            return Err(contract("the weight vanishes identically and is not admissible"));
        }
        match &self.basis {
            Some(b) if b.alpha_grid() == mu.alpha_grid() => {
                let table = b.table(mu)?;
                self.forcing.observe_with_table(&table, mu, self.experiment.node, &self.options)
            }
            _ => self.forcing.observe(mu, self.experiment.node, &self.options),
        }
    }
}

/// `‖u_μ(x₀, ·) − series‖_{L²(0,T)}` by the trapezoid rule.
pub fn residual(mu: &WeightFunction, record: &ObservationRecord) -> Result<f64> {
    let model = ForwardModel::for_record(record)?;
    let u = model.observe(mu)?;
    Ok(u.combine(1.0, &record.series, -1.0)?.l2_norm())
}
