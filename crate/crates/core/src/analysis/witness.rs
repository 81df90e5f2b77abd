//! The two devices that tell different weights apart: iterated integrals of
//! observations and the Laplace symbol.

use crate::error::{contract, Result};
use crate::forward::ObservationRecord;
use crate::frac::{rl_integral, TimeSeries, WeightFunction};

/// Gaps below this are treated as numerically indistinct weights.
pub const WITNESS_FLOOR: f64 = 1e-12;

/// `J²a − J²b` of two observations on a shared grid.
pub fn j2_compare(a: &ObservationRecord, b: &ObservationRecord) -> Result<TimeSeries> {
    if a.series.grid != b.series.grid {
        return Err(contract("observations live on different time grids"));
    }
    let ja = rl_integral(&a.series, 2.0)?;
    let jb = rl_integral(&b.series, 2.0)?;
    ja.combine(1.0, &jb, -1.0)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Witness {
    pub s0: f64,
    /// `|∫₀¹ s₀^α (μ_a − μ_b) dα|`.
    pub gap: f64,
}

/// 91 points logarithmically spaced over `[10⁻³, 10⁶]`.
pub fn default_s_grid() -> Vec<f64> {
    (0..=90).map(|k| 10f64.powf(-3.0 + k as f64 / 10.0)).collect()
}

/// The grid point maximizing `s·|w_a(s) − w_b(s)|`, or `None` when the gap
/// stays below [`WITNESS_FLOOR`].
pub fn laplace_witness(mu_a: &WeightFunction, mu_b: &WeightFunction, s_grid: &[f64]) -> Result<Option<Witness>> {
    let mut best: Option<Witness> = None;
    for &s in s_grid {
        let gap = (s * (mu_a.moment_w(s)? - mu_b.moment_w(s)?)).abs();
        if best.is_none_or(|b| gap > b.gap) {
            best = Some(Witness { s0: s, gap });
        }
    }
    Ok(best.filter(|w| w.gap >= WITNESS_FLOOR))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identical_weights_have_no_witness() {
        let mu = WeightFunction::linear(0.3, 1.2).unwrap();
        assert_eq!(laplace_witness(&mu, &mu, &default_s_grid()).unwrap(), None);
    }

    #[test]
    fn ordered_weights_differ_everywhere() {
        let a = WeightFunction::constant(1.0).unwrap();
        let b = WeightFunction::constant(2.0).unwrap();
        let grid = default_s_grid();
        let w = laplace_witness(&a, &b, &grid).unwrap().unwrap();
        // gap(s) = ∫ s^α dα = (s − 1)/ln s, increasing, so the last grid point wins
        assert_eq!(w.s0, *grid.last().unwrap());
        let s = w.s0;
        assert!((w.gap - (s - 1.0) / s.ln()).abs() < 1e-9 * w.gap);
    }
}
