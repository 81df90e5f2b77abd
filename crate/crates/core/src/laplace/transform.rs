//! Forward Laplace transform of a sampled series.

use crate::frac::TimeSeries;

/// `∫₀ᵀ φ(t) e^{−st} dt` for the piecewise-linear interpolant of `φ`,
/// with the truncation bound `|φ(T)| e^{−sT} / s`.
pub fn laplace_of_series(series: &TimeSeries, s: f64) -> (f64, f64) {
    laplace_of_series_shifted(series, s, 0.0)
}

/// As [`laplace_of_series`] but multiplied by `e^{s·shift}`, which keeps
/// the value representable for large `s` when the series starts late.
pub fn laplace_of_series_shifted(series: &TimeSeries, s: f64, shift: f64) -> (f64, f64) {
    let t = series.times();
    let f = &series.samples;
    let mut acc = 0.0;
    for j in 0..t.len() - 1 {
        if f[j] == 0.0 && f[j + 1] == 0.0 {
            continue;
        }
        let h = t[j + 1] - t[j];
        let (g1, g2) = moments(s * h);
        acc += h * (-s * (t[j] - shift)).exp() * (f[j] * (g1 - g2) + f[j + 1] * g2);
    }
    let horizon = series.grid.horizon();
    let bound = f.last().unwrap().abs() * (-s * (horizon - shift)).exp() / s;
    (acc, bound)
}

/// `(∫₀¹ e^{−xσ} dσ, ∫₀¹ σ e^{−xσ} dσ)`.
fn moments(x: f64) -> (f64, f64) {
    if x < 1.0 {
        let (mut g1, mut g2) = (0.0, 0.0);
        let mut term = 1.0; // (−x)^k / k!
        for k in 0..30 {
            g1 += term / (k + 1) as f64;
            g2 += term / (k + 2) as f64;
            term *= -x / (k + 1) as f64;
        }
        return (g1, g2);
    }
    let e = (-x).exp();
    (-(-x).exp_m1() / x, (1.0 - e * (1.0 + x)) / (x * x))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frac::TimeGrid;

    #[test]
    fn examples() {
        let g = TimeGrid::uniform(5.0, 50).unwrap();
        let (v, _) = laplace_of_series(&TimeSeries::from_fn(&g, |_| 1.0), 1.0);
        assert!((v - (1.0 - (-5f64).exp())).abs() < 1e-12);
        assert_eq!(laplace_of_series(&TimeSeries::zeros(&g), 1.0).0, 0.0);
        let g = TimeGrid::uniform(20.0, 20000).unwrap();
        let (v, bound) = laplace_of_series(&TimeSeries::from_fn(&g, |t| (-t).exp()), 1.0);
        assert!((v - 0.5).abs() < 1e-6);
        assert!(bound < 1e-17);
    }

    #[test]
    fn moments_are_continuous_across_branch() {
        let (a1, a2) = moments(1.0 - 1e-12);
        let (b1, b2) = moments(1.0);
        assert!((a1 - b1).abs() < 1e-11 && (a2 - b2).abs() < 1e-11);
    }

    #[test]
    fn shift_rescales() {
        let g = TimeGrid::uniform(1.0, 10).unwrap();
        let s = TimeSeries::from_fn(&g, |t| t * (1.0 - t));
        let (a, _) = laplace_of_series(&s, 3.0);
        let (b, _) = laplace_of_series_shifted(&s, 3.0, 0.25);
        assert!((b - a * (0.75f64).exp()).abs() < 1e-14);
    }
}
