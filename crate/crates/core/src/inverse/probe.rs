//! Twin forward runs showing that distinct weights give distinct data.

use crate::analysis::{default_s_grid, laplace_witness, Witness};
use crate::error::Result;
use crate::forward::ExperimentConfig;
use crate::frac::WeightFunction;

use super::model::ForwardModel;

#[derive(Debug, Clone, PartialEq)]
pub struct IdentifiabilityReport {
    /// `sup_t |u_a(x₀, t) − u_b(x₀, t)|`.
    pub data_gap: f64,
    pub witness: Option<Witness>,
}

pub fn identifiability_probe(
    mu_a: &WeightFunction,
    mu_b: &WeightFunction,
    config: &ExperimentConfig,
) -> Result<IdentifiabilityReport> {
    let model = ForwardModel::new(config)?;
    let (ua, ub) = rayon::join(|| model.observe(mu_a), || model.observe(mu_b));
    let data_gap = ua?.combine(1.0, &ub?, -1.0)?.max_abs();
    let witness = laplace_witness(mu_a, mu_b, &default_s_grid())?;
    Ok(IdentifiabilityReport { data_gap, witness })
}
