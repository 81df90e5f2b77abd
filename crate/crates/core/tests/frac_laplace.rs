use num_complex::Complex64;
use proptest::prelude::*;
use statrs::function::gamma::gamma;
use ultraslow_core::frac::{caputo_derivative, rl_integral};
use ultraslow_core::laplace::{invert_laplace, relaxation, ContourSpec};
use ultraslow_core::{TimeGrid, TimeSeries, WeightFunction};

fn weight() -> impl Strategy<Value = WeightFunction> {
    (2usize..8).prop_flat_map(|n| prop::collection::vec(0.0f64..3.0, n)).prop_filter_map("nonzero", |v| {
        let n = v.len();
        let alpha = (0..n).map(|i| i as f64 / (n - 1) as f64).collect();
        WeightFunction::new(alpha, v).ok()
    })
}

#[test]
fn l1_is_exact_on_linear_functions() {
    let grid = TimeGrid::graded(2.0, 64, 1.5).unwrap();
    let series = TimeSeries::from_fn(&grid, |t| 3.0 * t);
    for alpha in [0.2, 0.5, 0.9] {
        let d = caputo_derivative(&series, alpha).unwrap();
        for (t, v) in grid.values().iter().zip(&d.samples).skip(1) {
            let exact = 3.0 * t.powf(1.0 - alpha) / gamma(2.0 - alpha);
            assert!((v - exact).abs() < 1e-10 * exact.max(1.0), "alpha {alpha} t {t}");
        }
    }
}

#[test]
fn integral_of_constant() {
    let grid = TimeGrid::uniform(1.0, 100).unwrap();
    let series = TimeSeries::from_fn(&grid, |_| 2.0);
    for alpha in [0.3, 0.5, 1.0, 1.7] {
        let j = rl_integral(&series, alpha).unwrap();
        for (t, v) in grid.values().iter().zip(&j.samples) {
            let exact = 2.0 * t.powf(alpha) / gamma(1.0 + alpha);
            assert!((v - exact).abs() < 1e-12, "alpha {alpha} t {t}");
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn talbot_exponential(a in 0.0f64..5.0, t in 0.01f64..10.0) {
        let v = invert_laplace(|s: Complex64| 1.0 / (s + a), t, &ContourSpec::default()).unwrap();
        prop_assert!((v - (-a * t).exp()).abs() < 1e-9);
    }

    #[test]
    fn rl_integral_is_linear(a in -2.0f64..2.0, b in -2.0f64..2.0, alpha in 0.1f64..1.5) {
        let grid = TimeGrid::uniform(1.0, 50).unwrap();
        let f = TimeSeries::from_fn(&grid, |t| (3.0 * t).sin());
        let g = TimeSeries::from_fn(&grid, |t| t * t);
        let lhs = rl_integral(&f.combine(a, &g, b).unwrap(), alpha).unwrap();
        let rhs = rl_integral(&f, alpha).unwrap().combine(a, &rl_integral(&g, alpha).unwrap(), b).unwrap();
        prop_assert!(lhs.combine(1.0, &rhs, -1.0).unwrap().max_abs() < 1e-12);
    }

    #[test]
    fn sw_is_increasing_and_bounded(mu in weight(), s in 1.001f64..1e6) {
        let sw = s * mu.moment_w(s).unwrap();
        let sw2 = 2.0 * s * mu.moment_w(2.0 * s).unwrap();
        prop_assert!(sw2 >= sw);
        prop_assert!(sw <= mu.sw_upper_bound(s).unwrap() * (1.0 + 1e-12));
    }

    #[test]
    fn relaxation_is_monotone(mu in weight(), lambda in 0.1f64..20.0) {
        let grid = TimeGrid::logarithmic(0.01, 10.0, 30).unwrap();
        let contour = ContourSpec::default();
        let v = relaxation(lambda, &mu, &grid, &contour).unwrap().values;
        let w = relaxation(2.0 * lambda, &mu, &grid, &contour).unwrap().values;
        prop_assert!((v[0] - 1.0).abs() < 1e-12);
        for j in 1..v.len() {
            prop_assert!(v[j] > 0.0 && v[j] <= v[j - 1] + 1e-9);
            prop_assert!(w[j] <= v[j] + 1e-9);
        }
    }

    #[test]
    fn weight_text_roundtrip(mu in weight()) {
        prop_assert_eq!(WeightFunction::parse(&mu.to_text()).unwrap(), mu);
    }
}
