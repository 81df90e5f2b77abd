//! Projected Gauss–Newton with Levenberg damping and second-difference
//! Tikhonov smoothing over nonnegative nodal values of μ.

use std::fmt::Write as _;

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;

use super::model::ForwardModel;
use crate::analysis::{default_s_grid, laplace_witness, Witness};
use crate::error::{contract, Result};
use crate::forward::ObservationRecord;
use crate::frac::{TimeSeries, WeightFunction};

#[derive(Debug, Clone, PartialEq)]
pub struct InversionConfig {
    /// Number of equispaced α nodes of the piecewise-linear unknown.
    pub basis_node_count: usize,
    /// Weight of `‖Δ²c‖²` against the squared relative data misfit.
    pub tikhonov_weight: f64,
    pub max_iterations: usize,
    /// Stop when `‖c_{k+1} − c_k‖ ≤ step_tolerance·‖c_k‖`.
    pub step_tolerance: f64,
    /// Stop when the objective drops by less than this fraction.
    pub misfit_tolerance: f64,
    /// Relative finite-difference step of the Jacobian.
    pub fd_step: f64,
    /// Starting weight; `None` starts from μ ≡ 1.
    pub initial: Option<WeightFunction>,
}

impl Default for InversionConfig {
    fn default() -> Self {
        Self {
            basis_node_count: 17,
            tikhonov_weight: 1e-4,
            max_iterations: 50,
            step_tolerance: 1e-6,
            misfit_tolerance: 1e-10,
            fd_step: 1e-4,
            initial: None,
        }
    }
}

impl InversionConfig {
    pub fn validate(&self) -> Result<()> {
        if self.basis_node_count < 3 {
            return Err(contract("basis_node_count must be at least 3"));
        }
        if !(self.tikhonov_weight >= 0.0) || !self.tikhonov_weight.is_finite() {
            return Err(contract("tikhonov_weight must be finite and nonnegative"));
        }
        if !(self.fd_step > 0.0) {
            return Err(contract("fd_step must be positive"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Convergence {
    StepTolerance,
    MisfitTolerance,
    MaxIterations,
    /// Five consecutive rejected steps.
    Stalled,
}

impl Convergence {
    pub fn name(self) -> &'static str {
        match self {
            Convergence::StepTolerance => "converged-step",
            Convergence::MisfitTolerance => "converged-misfit",
            Convergence::MaxIterations => "max-iterations",
            Convergence::Stalled => "stalled",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct InversionResult {
    pub mu_hat: WeightFunction,
    /// Regularized misfit `‖d‖·√Φ` at the start and after every accepted step.
    pub misfit_history: Vec<f64>,
    /// `‖u_μ̂(x₀, ·) − data‖_{L²(0,T)}`.
    pub final_residual: f64,
    pub convergence: Convergence,
    pub iterations: usize,
    pub forward_evaluations: usize,
    /// Laplace witness of `μ̂` against the starting weight.
    pub witness: Option<Witness>,
    /// Isolated points of the level set of `μ̂` at its mean value.
    pub oscillation_count: usize,
    /// Expected `L²` size of the recorded noise, `σ‖data‖`.
    pub noise_floor: Option<f64>,
    /// Data and inversion share one discretization.
    pub inverse_crime: bool,
}

impl InversionResult {
    /// Plain-text run report.
    pub fn report(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "convergence={}", self.convergence.name());
        let _ = writeln!(out, "iterations={}", self.iterations);
        let _ = writeln!(out, "forward_evaluations={}", self.forward_evaluations);
        let _ = writeln!(out, "final_residual={:e}", self.final_residual);
        let _ = writeln!(out, "noise_floor={}", self.noise_floor.map_or("none".into(), |v| format!("{v:e}")));
        let _ = writeln!(out, "inverse_crime={}", self.inverse_crime);
        let _ = writeln!(out, "oscillation_count={}", self.oscillation_count);
        match self.witness {
            Some(w) => {
                let _ = writeln!(out, "witness_s0={:e}\nwitness_gap={:e}", w.s0, w.gap);
            }
            None => {
                let _ = writeln!(out, "witness=none");
            }
        }
        for (k, m) in self.misfit_history.iter().enumerate() {
            let _ = writeln!(out, "misfit[{k}]={m:e}");
        }
        out
    }
}

/// Relative `L²(0,1)` error of `μ̂`; refused for inverse-crime runs unless
/// explicitly allowed.
pub fn recovery_error(result: &InversionResult, truth: &WeightFunction, allow_inverse_crime: bool) -> Result<f64> {
    if result.inverse_crime && !allow_inverse_crime {
        return Err(contract(
            "data and inversion share the same discretization; recovery error is not meaningful",
        ));
    }
    Ok(result.mu_hat.relative_l2_distance(truth))
}

struct Problem<'a> {
    model: &'a ForwardModel,
    alpha: Vec<f64>,
    data: &'a TimeSeries,
    /// `√(trapezoid weight) / ‖d‖`.
    row_scale: Vec<f64>,
    beta: f64,
}

impl Problem<'_> {
    fn weight(&self, c: &[f64]) -> Result<WeightFunction> {
        WeightFunction::new(self.alpha.clone(), c.to_vec())
    }

    fn residual(&self, c: &[f64]) -> Result<Vec<f64>> {
        let u = self.model.observe(&self.weight(c)?)?;
        Ok(u.samples
            .iter()
            .zip(&self.data.samples)
            .zip(&self.row_scale)
            .map(|((a, b), w)| w * (a - b))
            .collect())
    }

    fn smoothing(&self, c: &[f64]) -> Vec<f64> {
        c.windows(3).map(|w| w[0] - 2.0 * w[1] + w[2]).collect()
    }

    fn objective(&self, r: &[f64], c: &[f64]) -> f64 {
        r.iter().map(|x| x * x).sum::<f64>() + self.beta * self.smoothing(c).iter().map(|x| x * x).sum::<f64>()
    }
}

pub fn recover_weight(record: &ObservationRecord, config: &InversionConfig) -> Result<InversionResult> {
    config.validate()?;
    let k = config.basis_node_count;
    let alpha: Vec<f64> = (0..k).map(|i| i as f64 / (k - 1) as f64).collect();
    let model = ForwardModel::for_record(record)?.with_basis(&alpha)?;
    let inverse_crime = model.shares_discretization(&record.experiment);
    let data = &record.series;
    let norm = data.l2_norm();
    if !(norm > 0.0) {
        return Err(contract("the observation carries no signal"));
    }
    let t = data.times();
    let nt = t.len();
    let row_scale: Vec<f64> = (0..nt)
        .map(|j| {
            let left = if j > 0 { t[j] - t[j - 1] } else { 0.0 };
            let right = if j + 1 < nt { t[j + 1] - t[j] } else { 0.0 };
            (0.5 * (left + right)).sqrt() / norm
        })
        .collect();
    let problem = Problem { model: &model, alpha: alpha.clone(), data, row_scale, beta: config.tikhonov_weight };

    let mut c: Vec<f64> = match &config.initial {
        Some(mu) => alpha.iter().map(|&a| mu.eval(a)).collect::<Result<_>>()?,
        None => vec![1.0; k],
    };
    let start = problem.weight(&c)?;
    let mut r = problem.residual(&c)?;
    let mut evaluations = 1;
    let mut phi = problem.objective(&r, &c);
    let mut history = vec![norm * phi.sqrt()];
    let mut damping = 1e-3;
    let mut rejected = 0;
    let mut iterations = 0;
    let mut convergence = Convergence::MaxIterations;

    // LᵀL for second differences
    let mut ltl = DMatrix::<f64>::zeros(k, k);
    for i in 0..k - 2 {
        let row = [(i, 1.0), (i + 1, -2.0), (i + 2, 1.0)];
        for &(a, x) in &row {
            for &(b, y) in &row {
                ltl[(a, b)] += x * y;
            }
        }
    }

    'outer: while iterations < config.max_iterations {
        iterations += 1;
        let scale = c.iter().copied().fold(0.0, f64::max).max(1e-3);
        let columns: Vec<Vec<f64>> = (0..k)
            .into_par_iter()
            .map(|i| {
                let step = config.fd_step * c[i].max(0.1 * scale);
                let mut cp = c.clone();
                cp[i] += step;
                let rp = problem.residual(&cp)?;
                Ok(rp.iter().zip(&r).map(|(a, b)| (a - b) / step).collect())
            })
            .collect::<Result<_>>()?;
        evaluations += k;
        let jac = DMatrix::from_fn(nt, k, |row, col| columns[col][row]);
        let jtj = jac.transpose() * &jac;
        let cv = DVector::from_column_slice(&c);
        let grad = jac.transpose() * DVector::from_column_slice(&r) + problem.beta * &ltl * &cv;
        let normal = &jtj + problem.beta * &ltl;
        let diag_floor = 1e-12 * (0..k).map(|i| normal[(i, i)]).fold(0.0, f64::max);
        loop {
            let mut a = normal.clone();
            for i in 0..k {
                a[(i, i)] += damping * (normal[(i, i)] + diag_floor);
            }
            let Some(chol) = a.cholesky() else {
                damping *= 10.0;
                rejected += 1;
                if rejected >= 5 {
                    convergence = Convergence::Stalled;
                    break 'outer;
                }
                continue;
            };
            let delta = chol.solve(&(-&grad));
            let trial: Vec<f64> = c.iter().zip(delta.iter()).map(|(x, d)| (x + d).max(0.0)).collect();
            let accepted = if trial.iter().all(|&v| v == 0.0) {
                None
            } else {
                let rt = problem.residual(&trial)?;
                evaluations += 1;
                let phit = problem.objective(&rt, &trial);
                (phit < phi).then_some((rt, phit))
            };
            match accepted {
                Some((rt, phit)) => {
                    let moved: f64 = c.iter().zip(&trial).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
                    let size: f64 = c.iter().map(|a| a * a).sum::<f64>().sqrt();
                    let drop = phi - phit;
                    c = trial;
                    r = rt;
                    phi = phit;
                    history.push(norm * phi.sqrt());
                    damping = (damping / 3.0).max(1e-12);
                    rejected = 0;
                    if moved <= config.step_tolerance * size {
                        convergence = Convergence::StepTolerance;
                        break 'outer;
                    }
                    if drop <= config.misfit_tolerance * phi {
                        convergence = Convergence::MisfitTolerance;
                        break 'outer;
                    }
                    break;
                }
                None => {
                    damping *= 10.0;
                    rejected += 1;
                    if rejected >= 5 {
                        convergence = Convergence::Stalled;
                        break 'outer;
                    }
                }
            }
        }
    }

    let mu_hat = problem.weight(&c)?;
    let data_residual = norm * r.iter().map(|x| x * x).sum::<f64>().sqrt();
    let mean = mu_hat.mass();
    let noise = record.experiment.noise;
    Ok(InversionResult {
        oscillation_count: mu_hat.level_set(mean).count(),
        witness: laplace_witness(&mu_hat, &start, &default_s_grid())?,
        mu_hat,
        misfit_history: history,
        final_residual: data_residual,
        convergence,
        iterations,
        forward_evaluations: evaluations,
        noise_floor: (noise > 0.0).then(|| noise * norm),
        inverse_crime,
    })
}
