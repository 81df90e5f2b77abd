//! The scenario-driven subcommands.

use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use ultraslow_core::analysis::{check_max_principle, harnack_scan, CheckRecord, Subdomain};
use ultraslow_core::forward::{ExperimentConfig, ObservationRecord};
use ultraslow_core::frac::rl_integral;
use ultraslow_core::inverse::{identifiability_probe, recover_weight, recovery_error};
use ultraslow_core::laplace::relaxation;
use ultraslow_core::{TimeGrid, TimeSeries};

use crate::error::{CliError, EXIT_CHECK_FAILED, EXIT_OK};
use crate::output::Outputs;
use crate::scenario::{sidecar_path, Scenario};

/// Outcome of a task that ran to completion.
pub struct TaskOutcome {
    pub status: i32,
    pub message: String,
}

impl TaskOutcome {
    fn ok(message: impl Into<String>) -> Self {
        Self { status: EXIT_OK, message: message.into() }
    }
}

pub struct Context<'a> {
    pub scenario: &'a Scenario,
    pub config: ExperimentConfig,
    pub inverse_crime_ok: bool,
}

fn write_record(out: &mut Outputs, rec: &ObservationRecord) -> Result<(), CliError> {
    out.write("observation.csv", rec.to_csv())?;
    out.write("observation.csv.sidecar", rec.sidecar())
}

pub fn forward(ctx: &Context, out: &mut Outputs) -> Result<TaskOutcome, CliError> {
    let mu = ctx.scenario.mu(&ctx.scenario.problem.mu)?;
    let exp = ctx.config.build()?;
    let field = exp.solve(&mu)?;
    field.check()?;
    out.write("mu.txt", mu.to_text())?;
    out.write("field.csv", field.to_csv())?;
    out.write("field.bin", field.to_bytes())?;
    let rec = exp.record_from_field(&field, Some(&mu))?;
    write_record(out, &rec)?;
    Ok(TaskOutcome::ok(format!("solved {} modes, tail estimate {:e}", exp.mode_count(), field.tail_estimate)))
}

pub fn invert(ctx: &Context, out: &mut Outputs) -> Result<TaskOutcome, CliError> {
    let s = ctx.scenario;
    let rec = match &s.invert.record {
        Some(path) => {
            let path = s.resolve(path);
            let side = sidecar_path(&path);
            let csv = std::fs::read_to_string(&path).map_err(|e| CliError::io(&path, e))?;
            let sidecar = std::fs::read_to_string(&side).map_err(|e| CliError::io(&side, e))?;
            ObservationRecord::parse(&csv, &sidecar)?
        }
        None => {
            let mu = s.mu(&s.problem.mu)?;
            let rec = ctx.config.build()?.record(&mu)?;
            write_record(out, &rec)?;
            rec
        }
    };
    let result = recover_weight(&rec, &s.inversion()?)?;
    out.write("mu_hat.txt", result.mu_hat.to_text())?;
    let mut report = result.report();
    if let Some(truth) = &rec.mu {
        out.write("mu_true.txt", truth.to_text())?;
        match recovery_error(&result, truth, ctx.inverse_crime_ok) {
            Ok(err) => {
                let _ = writeln!(report, "recovery_error={err:e}");
            }
            Err(_) => {
                let _ = writeln!(report, "recovery_error=withheld (inverse crime; rerun with --inverse-crime-ok)");
            }
        }
    }
    out.write("report.txt", report)?;
    Ok(TaskOutcome::ok(format!(
        "{} after {} iterations, residual {:e}",
        result.convergence.name(),
        result.iterations,
        result.final_residual
    )))
}

/// Smooth test function built from a few seeded harmonics.
fn smooth_sample(rng: &mut ChaCha8Rng, grid: &TimeGrid) -> TimeSeries {
    let terms: Vec<(f64, f64, f64)> = (0..3)
        .map(|_| (rng.random_range(-1.0..1.0), rng.random_range(0.5..4.0), rng.random_range(0.0..6.3)))
        .collect();
    let c = rng.random_range(-1.0..1.0);
    TimeSeries::from_fn(grid, |t| c + terms.iter().map(|(a, w, p)| a * (w * t + p).sin()).sum::<f64>())
}

/// `max_φ ‖J^{1/2}J^{1/2}φ − J¹φ‖_∞` on the graded grid `t_j = (j/N)²`.
pub fn semigroup_defect(seed: u64, samples: usize, steps: usize) -> Result<f64, CliError> {
    let grid = TimeGrid::graded(1.0, steps, 2.0)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    for _ in 0..samples {
        let phi = smooth_sample(&mut rng, &grid);
        let half = rl_integral(&rl_integral(&phi, 0.5)?, 0.5)?;
        let one = rl_integral(&phi, 1.0)?;
        worst = worst.max(half.combine(1.0, &one, -1.0)?.max_abs());
    }
    Ok(worst)
}

pub fn check(ctx: &Context, out: &mut Outputs) -> Result<TaskOutcome, CliError> {
    let s = ctx.scenario;
    let c = &s.check;
    let mu = s.mu(&s.problem.mu)?;
    let exp = ctx.config.build()?;
    let mut records = Vec::new();

    let field = exp.solve(&mu)?;
    records.push(check_max_principle(&field, c.max_principle_tol).record("max_principle", c.max_principle_tol));

    let oracle = exp.oracle(&mu)?;
    let gap = field.relative_l2_distance(&oracle)?;
    records.push(CheckRecord { name: "cross_discretization".into(), value: gap, threshold: c.cross_tol, pass: gap <= c.cross_tol });

    let fine = ctx.config.refined(2).build()?;
    let scan = |e: &ultraslow_core::forward::Experiment| {
        harnack_scan(
            &e.space,
            &e.potential,
            &mu,
            e.config.kind,
            &e.boundary,
            &Subdomain::middle_third(&e.space),
            &c.harnack_s,
        )
    };
    let coarse_report = scan(&exp)?;
    let fine_report = scan(&fine)?;
    out.write("harnack.csv", coarse_report.to_csv())?;
    out.write("harnack_refined.csv", fine_report.to_csv())?;
    let min_ratio = coarse_report.ratios.iter().chain(&fine_report.ratios).copied().fold(f64::INFINITY, f64::min);
    records.push(CheckRecord { name: "harnack_ratio_min".into(), value: min_ratio, threshold: 1.0, pass: min_ratio >= 1.0 });
    let holds = coarse_report.holds_with(coarse_report.fitted_c);
    records.push(CheckRecord {
        name: "harnack_fitted_c".into(),
        value: coarse_report.fitted_c,
        threshold: f64::INFINITY,
        pass: holds && coarse_report.fitted_c.is_finite(),
    });
    let drift = (coarse_report.fitted_c - fine_report.fitted_c).abs() / fine_report.fitted_c;
    records.push(CheckRecord { name: "harnack_c_drift".into(), value: drift, threshold: c.harnack_drift, pass: drift <= c.harnack_drift });

    let mut worst_sw: f64 = 0.0;
    for &sv in c.harnack_s.iter().filter(|&&sv| sv > 1.0) {
        worst_sw = worst_sw.max(sv * mu.moment_w(sv)? / mu.sw_upper_bound(sv)?);
    }
    records.push(CheckRecord { name: "sw_bound_ratio".into(), value: worst_sw, threshold: 1.0, pass: worst_sw <= 1.0 + 1e-12 });

    let defect = semigroup_defect(s.seed, c.semigroup_samples, c.semigroup_steps)?;
    records.push(CheckRecord { name: "semigroup".into(), value: defect, threshold: c.semigroup_tol, pass: defect <= c.semigroup_tol });

    let mut text = String::from("name,value,threshold,verdict\n");
    for r in &records {
        let _ = writeln!(text, "{r}");
    }
    out.write("checks.csv", text)?;
    let failed: Vec<&str> = records.iter().filter(|r| !r.pass).map(|r| r.name.as_str()).collect();
    Ok(if failed.is_empty() {
        TaskOutcome::ok(format!("{} checks passed", records.len()))
    } else {
        TaskOutcome { status: EXIT_CHECK_FAILED, message: format!("failed checks: {}", failed.join(", ")) }
    })
}

pub fn spectra(ctx: &Context, out: &mut Outputs) -> Result<TaskOutcome, CliError> {
    let s = ctx.scenario;
    let mu = s.mu(&s.problem.mu)?;
    let exp = ctx.config.build()?;
    let eig = exp.eigensystem()?;
    out.write("eigen.txt", eig.to_text())?;
    out.write("eigen.bin", eig.to_bytes())?;
    let grid = TimeGrid::uniform(s.spectra.relaxation_horizon, s.spectra.relaxation_steps)?;
    let count = s.spectra.relaxation_modes.min(eig.mode_count());
    for (n, &lambda) in eig.eigenvalues.iter().take(count).enumerate() {
        let table = relaxation(lambda, &mu, &grid, &ctx.config.contour)?;
        table.check()?;
        out.write(&format!("relaxation_{}.txt", n + 1), table.to_text())?;
    }
    Ok(TaskOutcome::ok(format!("{} modes, {count} relaxation tables", eig.mode_count())))
}

pub fn probe(ctx: &Context, out: &mut Outputs) -> Result<TaskOutcome, CliError> {
    let s = ctx.scenario;
    let spec = s.probe.as_ref().ok_or_else(|| CliError::usage("the probe task needs a [probe] block with mu_b"))?;
    let a = s.mu(&s.problem.mu)?;
    let b = s.mu(&spec.mu_b)?;
    let report = identifiability_probe(&a, &b, &ctx.config)?;
    let mut text = format!("data_gap={:e}\n", report.data_gap);
    match report.witness {
        Some(w) => {
            let _ = writeln!(text, "witness_s0={:e}\nwitness_gap={:e}", w.s0, w.gap);
        }
        None => text.push_str("witness=none\n"),
    }
    out.write("probe.txt", text)?;
    out.write("mu_a.txt", a.to_text())?;
    out.write("mu_b.txt", b.to_text())?;
    Ok(TaskOutcome::ok(format!("data gap {:e}", report.data_gap)))
}
