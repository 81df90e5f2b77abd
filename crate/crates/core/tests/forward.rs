mod common;

use common::{heat_dirichlet, heat_neumann, relative_l2};
use proptest::prelude::*;
use ultraslow_core::forward::*;
use ultraslow_core::spectral::*;
use ultraslow_core::{TimeGrid, WeightFunction};

fn interval(interior: usize) -> SpatialGrid {
    SpatialGrid::interval(0.0, 1.0, interior).unwrap()
}

fn table(field: &Field) -> Vec<Vec<f64>> {
    (0..field.time.len()).map(|j| field.slice(j).to_vec()).collect()
}

fn bump() -> Profile {
    Profile::full_bump(1.0, 1.0)
}

#[test]
fn zero_data_gives_zero_fields() {
    let space = interval(31);
    let time = TimeGrid::uniform(1.0, 50).unwrap();
    let mu = WeightFunction::linear(0.5, 1.0).unwrap();
    let p = Potential::constant(&space, 1.0).unwrap().certified().unwrap();
    let g = BoundaryData::zero(&space, &time);
    for kind in [BoundaryKind::Dirichlet, BoundaryKind::Neumann] {
        let eig = eigensystem(&space, &p, kind, 20, EigenMethod::FiniteDifference).unwrap();
        let opts = SolverOptions::default();
        let f = match kind {
            BoundaryKind::Dirichlet => solve_dirichlet(&eig, &mu, &g, &opts).unwrap(),
            BoundaryKind::Neumann => solve_neumann(&eig, &mu, &g, &opts).unwrap(),
        };
        assert!(f.samples.iter().all(|&v| v == 0.0));
        let o = timestep_oracle(&mu, &p, &g, &space, kind, 32).unwrap();
        assert!(o.samples.iter().all(|&v| v == 0.0));
        let rec = observe(&f, &[0.5], &ExperimentConfig::interval_default()).unwrap();
        assert!(rec.series.samples.iter().all(|&v| v == 0.0));
    }
    let eig = eigensystem(&space, &p, BoundaryKind::Dirichlet, 20, EigenMethod::FiniteDifference).unwrap();
    let zero_src = vec![vec![0.0; space.node_count()]; time.len()];
    let f = solve_source(&eig, &mu, &time, &zero_src, &SolverOptions::default()).unwrap();
    assert!(f.samples.iter().all(|&v| v == 0.0));
}

#[test]
fn source_must_vanish_initially() {
    let space = interval(31);
    let time = TimeGrid::uniform(1.0, 10).unwrap();
    let eig = eigensystem(&space, &Potential::zero(&space), BoundaryKind::Dirichlet, 8, EigenMethod::FiniteDifference).unwrap();
    let src = vec![vec![1.0; space.node_count()]; time.len()];
    let mu = WeightFunction::constant(1.0).unwrap();
    assert!(solve_source(&eig, &mu, &time, &src, &SolverOptions::default()).is_err());
}

#[test]
fn single_mode_source_stays_single_mode() {
    let space = interval(63);
    let time = TimeGrid::uniform(1.0, 100).unwrap();
    let eig = eigensystem(&space, &Potential::zero(&space), BoundaryKind::Dirichlet, 30, EigenMethod::FiniteDifference).unwrap();
    let mu = WeightFunction::linear(1.0, 0.5).unwrap();
    let src: Vec<Vec<f64>> = time
        .values()
        .iter()
        .map(|&t| eig.vectors[0].iter().map(|v| v * bump().eval(t)).collect())
        .collect();
    let f = solve_source(&eig, &mu, &time, &src, &SolverOptions::default()).unwrap();
    for j in 0..time.len() {
        let c = eig.project(f.slice(j));
        assert!(c[1..].iter().all(|x| x.abs() < 1e-10), "t index {j}: {:?}", &c[1..4]);
    }
    assert!(f.max() > 1e-3);
}

/// `u' + λu = f` by the trapezoid rule on a fine step.
fn stiff_ode(lambda: f64, f: impl Fn(f64) -> f64, horizon: f64, steps: usize) -> Vec<f64> {
    let dt = horizon / steps as f64;
    let mut u = 0.0;
    let mut out = vec![0.0];
    for m in 1..=steps {
        let (t0, t1) = ((m - 1) as f64 * dt, m as f64 * dt);
        u = (u * (1.0 - 0.5 * dt * lambda) + 0.5 * dt * (f(t0) + f(t1))) / (1.0 + 0.5 * dt * lambda);
        out.push(u);
    }
    out
}

#[test]
fn source_classical_limit_matches_ode() {
    let space = interval(63);
    let time = TimeGrid::uniform(1.0, 100).unwrap();
    let eig = eigensystem(&space, &Potential::zero(&space), BoundaryKind::Dirichlet, 10, EigenMethod::FiniteDifference).unwrap();
    let mu = WeightFunction::narrow_hat(1.0, 1e-5).unwrap();
    let src: Vec<Vec<f64>> = time
        .values()
        .iter()
        .map(|&t| eig.vectors[0].iter().map(|v| v * bump().eval(t)).collect())
        .collect();
    let f = solve_source(&eig, &mu, &time, &src, &SolverOptions::default()).unwrap();
    let sub = 100;
    let oracle = stiff_ode(eig.eigenvalues[0], |t| bump().eval(t), 1.0, 100 * sub);
    for j in 0..time.len() {
        let u1 = eig.project(f.slice(j))[0];
        assert!((u1 - oracle[j * sub]).abs() < 1e-4, "t index {j}: {u1} vs {}", oracle[j * sub]);
    }
}

#[test]
fn dirichlet_classical_limit_matches_heat_equation() {
    let mut c = ExperimentConfig::interval_default();
    c.axes = vec![Axis::new(0.0, 1.0, 63).unwrap()];
    c.edges = vec![1.0, 0.4];
    c.potential = PotentialSpec::constant(2.0);
    let e = c.build().unwrap();
    let mu = WeightFunction::narrow_hat(1.0, 0.01).unwrap();
    let f = e.solve(&mu).unwrap();
    let sub = 10;
    let heat = heat_dirichlet(65, 2.0, |t| bump().eval(t), |t| 0.4 * bump().eval(t), 1.0, c.steps * sub);
    let heat: Vec<Vec<f64>> = heat.into_iter().step_by(sub).collect();
    let err = relative_l2(&table(&f), &heat);
    assert!(err < 1e-2, "{err}");
}

#[test]
fn neumann_classical_limit_matches_heat_equation() {
    let mut c = ExperimentConfig::interval_default();
    c.axes = vec![Axis::new(0.0, 1.0, 63).unwrap()];
    c.kind = BoundaryKind::Neumann;
    c.potential = PotentialSpec::constant(1.0);
    c.edges = vec![1.0, 0.0];
    c.x0 = vec![0.0];
    let e = c.build().unwrap();
    let mu = WeightFunction::narrow_hat(1.0, 0.01).unwrap();
    let f = e.solve(&mu).unwrap();
    let sub = 10;
    let heat = heat_neumann(65, 1.0, |t| bump().eval(t), |_| 0.0, 1.0, c.steps * sub);
    let heat: Vec<Vec<f64>> = heat.into_iter().step_by(sub).collect();
    let err = relative_l2(&table(&f), &heat);
    assert!(err < 1e-2, "{err}");
}

#[test]
fn dirichlet_trace_and_initial_state() {
    let c = ExperimentConfig { edges: vec![1.0, 0.3], ..ExperimentConfig::interval_default() };
    let e = c.build().unwrap();
    let f = e.solve(&WeightFunction::linear(1.0, 2.0).unwrap()).unwrap();
    let last = e.space.node_count() - 1;
    for (j, &t) in e.time.values().iter().enumerate() {
        assert!((f.at(j, 0) - bump().eval(t)).abs() < 1e-12);
        assert!((f.at(j, last) - 0.3 * bump().eval(t)).abs() < 1e-12);
    }
    assert!(f.slice(0).iter().all(|&v| v == 0.0));
}

#[test]
fn neumann_flux_matches_data() {
    let mut c = ExperimentConfig::interval_default();
    c.kind = BoundaryKind::Neumann;
    c.potential = PotentialSpec::constant(1.0);
    c.x0 = vec![1.0];
    for interior in [63usize, 127] {
        c.axes = vec![Axis::new(0.0, 1.0, interior).unwrap()];
        let e = c.build().unwrap();
        let f = e.solve(&WeightFunction::constant(1.0).unwrap()).unwrap();
        let h = e.space.axis(0).step();
        let mut worst: f64 = 0.0;
        for (j, &t) in e.time.values().iter().enumerate() {
            let u = f.slice(j);
            // outward derivative at x = 0 by a second-order one-sided difference
            let flux = (3.0 * u[0] - 4.0 * u[1] + u[2]) / (2.0 * h);
            worst = worst.max((flux - bump().eval(t)).abs());
        }
        assert!(worst < 20.0 * h, "interior {interior}: {worst}");
    }
}

#[test]
fn routes_agree_and_observation_matches_field() {
    let mut c = ExperimentConfig::interval_default();
    c.edges = vec![0.7, 1.0];
    let mu = WeightFunction::raised_cosine(9, 0.5, 1.0, 0.2, 0.8).unwrap();
    let e = c.build().unwrap();
    let folded = e.solve(&mu).unwrap();
    let series = e.forcing().unwrap().observe(&mu, e.node, &e.options()).unwrap();
    let direct = folded.node_series(e.node);
    for (a, b) in series.samples.iter().zip(&direct.samples) {
        assert!((a - b).abs() < 1e-12);
    }
    c.route = ForcingRoute::TimeDomain;
    let td = c.build().unwrap().solve(&mu).unwrap();
    assert!(td.relative_l2_distance(&folded).unwrap() < 2e-2);
}

#[test]
fn observation_needs_a_grid_node() {
    let e = ExperimentConfig::interval_default().build().unwrap();
    let f = Field::zeros(&e.space, &e.time, BoundaryKind::Dirichlet, Provenance::Spectral);
    assert!(observe(&f, &[0.123], &e.config).is_err());
    assert!(observe(&f, &[0.5], &e.config).is_ok());
}

#[test]
fn record_files_round_trip() {
    let mut c = ExperimentConfig::interval_default();
    c.noise = 0.01;
    c.seed = 7;
    let e = c.build().unwrap();
    let mu = WeightFunction::linear(1.0, 1.5).unwrap();
    let rec = e.record(&mu).unwrap();
    let back = ObservationRecord::parse(&rec.to_csv(), &rec.sidecar()).unwrap();
    assert_eq!(back.experiment, rec.experiment);
    assert_eq!(back.mu, rec.mu);
    for (a, b) in back.series.samples.iter().zip(&rec.series.samples) {
        assert!((a - b).abs() <= 1e-15 * b.abs().max(1e-300));
    }
    // the same seed reproduces the noise exactly
    assert_eq!(e.record(&mu).unwrap(), rec);
    let bad = rec.sidecar() + "mystery=1\n";
    assert!(ObservationRecord::parse(&rec.to_csv(), &bad).is_err());
}

#[test]
fn oracle_agreement_improves_under_refinement() {
    let mu = WeightFunction::linear(1.0, 1.5).unwrap();
    let mut c = ExperimentConfig::interval_default();
    c.steps = 50;
    let mut last = f64::INFINITY;
    for level in 0..3 {
        let e = c.refined(1 << level).build().unwrap();
        let d = e.oracle(&mu).unwrap().relative_l2_distance(&e.solve(&mu).unwrap()).unwrap();
        assert!(d < last, "level {level}: {d} !< {last}");
        last = d;
    }
    assert!(last < 2e-2);
}

#[test]
fn rectangle_solvers_agree() {
    let x = Axis::new(0.0, 1.0, 19).unwrap();
    let mu = WeightFunction::linear(0.5, 1.0).unwrap();
    for (kind, p) in [
        (BoundaryKind::Dirichlet, PotentialSpec { base: 0.5, slope_x: 1.0, slope_y: 0.0, bilinear: 2.0 }),
        (BoundaryKind::Neumann, PotentialSpec { base: 1.0, slope_x: 0.0, slope_y: 1.0, bilinear: 0.0 }),
    ] {
        let c = ExperimentConfig {
            axes: vec![x, x],
            kind,
            potential: p,
            edges: vec![1.0, 0.0, 0.5, 0.2],
            x0: vec![0.5, 0.5],
            steps: 100,
            ..ExperimentConfig::interval_default()
        };
        let e = c.build().unwrap();
        let f = e.solve(&mu).unwrap();
        let o = e.oracle(&mu).unwrap();
        let d = o.relative_l2_distance(&f).unwrap();
        assert!(d < 2e-2, "{kind:?}: {d}");
        assert!(f.min() >= -1e-6 * f.max(), "{kind:?}: {}", f.min());
    }
}

#[test]
fn timestep_needs_certificate_for_neumann() {
    let space = interval(31);
    let time = TimeGrid::uniform(1.0, 20).unwrap();
    let g = BoundaryData::edges(&space, &time, &[1.0, 0.0], bump()).unwrap();
    let mu = WeightFunction::constant(1.0).unwrap();
    let p = Potential::constant(&space, 1.0).unwrap();
    assert!(timestep_oracle(&mu, &p, &g, &space, BoundaryKind::Neumann, 32).is_err());
    let eig = eigensystem(&space, &p, BoundaryKind::Neumann, 10, EigenMethod::FiniteDifference).unwrap();
    assert!(solve_neumann(&eig, &mu, &g, &SolverOptions::default()).is_err());
}

fn weight_strategy() -> impl Strategy<Value = WeightFunction> {
    prop::collection::vec(0.0f64..2.0, 5).prop_filter_map("nonzero weight", |v| {
        if v.iter().sum::<f64>() < 0.2 {
            return None;
        }
        WeightFunction::new(vec![0.0, 0.25, 0.5, 0.75, 1.0], v).ok()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn linear_in_boundary_data(mu in weight_strategy(), a in -2.0f64..2.0, b in -2.0f64..2.0) {
        let e = ExperimentConfig { steps: 60, ..ExperimentConfig::interval_default() }.build().unwrap();
        let eig = e.eigensystem().unwrap();
        let g1 = BoundaryData::edges(&e.space, &e.time, &[1.0, 0.0], bump()).unwrap();
        let g2 = BoundaryData::edges(&e.space, &e.time, &[0.0, 1.0],
            Profile::RaisedCosine { center: 0.6, width: 0.6, amplitude: 1.0 }).unwrap();
        let opts = SolverOptions::default();
        let u1 = solve_dirichlet(&eig, &mu, &g1, &opts).unwrap();
        let u2 = solve_dirichlet(&eig, &mu, &g2, &opts).unwrap();
        let u = solve_dirichlet(&eig, &mu, &g1.combine(a, &g2, b).unwrap(), &opts).unwrap();
        for ((x, y), z) in u.samples.iter().zip(&u1.samples).zip(&u2.samples) {
            prop_assert!((x - (a * y + b * z)).abs() <= 1e-10);
        }
    }

    #[test]
    fn nonnegative_for_nonnegative_data(
        mu in weight_strategy(),
        left in 0.0f64..1.0,
        right in 0.0f64..1.0,
        center in 0.3f64..0.7,
        neumann in any::<bool>(),
    ) {
        let kind = if neumann { BoundaryKind::Neumann } else { BoundaryKind::Dirichlet };
        let c = ExperimentConfig {
            kind,
            potential: PotentialSpec::constant(if neumann { 0.5 } else { 0.0 }),
            edges: vec![left, right + 0.01],
            profile: Profile::PolynomialBump { center, width: 0.5, amplitude: 1.0 },
            steps: 80,
            modes: 1000,
            ..ExperimentConfig::interval_default()
        };
        let f = c.build().unwrap().solve(&mu).unwrap();
        prop_assert!(f.min() >= -1e-6 * f.max(), "min {} max {}", f.min(), f.max());
    }
}
