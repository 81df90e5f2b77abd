//! Riemann–Liouville integrals, Caputo derivatives and the distributed-order
//! derivative on (possibly nonuniform) time grids.

use statrs::function::gamma::gamma;

use super::grid::TimeSeries;
use super::weight::WeightFunction;
use crate::error::{domain, Result};
use crate::quadrature::GaussLegendre;

/// Default total number of Gauss nodes in the α-quadrature.
pub const DEFAULT_ALPHA_NODES: usize = 32;

/// J^α by product integration against the piecewise-linear interpolant.
///
/// Exact whenever the integrand is piecewise linear on the grid. Any `alpha > 0`
/// is accepted, so `J²` is available directly.
pub fn rl_integral(series: &TimeSeries, alpha: f64) -> Result<TimeSeries> {
    if !(alpha > 0.0) || !alpha.is_finite() {
        return Err(domain(format!("fractional integral needs alpha > 0, got {alpha}")));
    }
    let t = series.times();
    let phi = &series.samples;
    let norm = 1.0 / gamma(alpha);
    let (a1, a2) = (alpha, alpha + 1.0);
    let mut out = vec![0.0; t.len()];
    for n in 1..t.len() {
        let mut acc = 0.0;
        for j in 0..n {
            let a = t[n] - t[j];
            let b = t[n] - t[j + 1];
            let h = t[j + 1] - t[j];
            let (pa, pb) = (a.powf(a1), b.powf(a1));
            let (qa, qb) = (a * pa, b * pb);
            let i0 = (pa - pb) / a1;
            let i1 = (qa - qb) / a2;
            // ∫ u^{α-1}(u-B) and ∫ u^{α-1}(A-u) over u ∈ [B, A]
            let left = i1 - b * i0;
            let right = a * i0 - i1;
            acc += (phi[j] * left + phi[j + 1] * right) / h;
        }
        out[n] = norm * acc;
    }
    TimeSeries::new(series.grid.clone(), out)
}

/// Caputo derivative of order `alpha ∈ [0, 1]`.
///
/// `alpha = 0` is the identity, `alpha = 1` the backward difference (forward
/// at the first node), and `0 < alpha < 1` the L1 scheme with exact kernel
/// weights per interval.
pub fn caputo_derivative(series: &TimeSeries, alpha: f64) -> Result<TimeSeries> {
    if !(0.0..=1.0).contains(&alpha) {
        return Err(domain(format!("Caputo order {alpha} outside [0, 1]")));
    }
    let t = series.times();
    let phi = &series.samples;
    if alpha == 0.0 {
        return Ok(series.clone());
    }
    if alpha == 1.0 {
        let mut out = vec![0.0; t.len()];
        out[0] = (phi[1] - phi[0]) / (t[1] - t[0]);
        for n in 1..t.len() {
            out[n] = (phi[n] - phi[n - 1]) / (t[n] - t[n - 1]);
        }
        return TimeSeries::new(series.grid.clone(), out);
    }
    let beta = 1.0 - alpha;
    let norm = 1.0 / gamma(2.0 - alpha);
    let kernel = |x: f64| norm * x.powf(beta);
    Ok(apply_memory(series, kernel))
}

/// Gauss–Legendre rule in α with μ folded into the weights.
#[derive(Debug, Clone, PartialEq)]
pub struct AlphaRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl AlphaRule {
    /// Composite rule over the segments of μ using about `total` nodes in all,
    /// never fewer than two per segment.
    pub fn new(mu: &WeightFunction, total: usize) -> Self {
        let segments = mu.alpha_grid().len() - 1;
        let per = total.div_ceil(segments).max(2);
        let rule = GaussLegendre::new(per);
        let mut nodes = Vec::with_capacity(per * segments);
        let mut weights = Vec::with_capacity(per * segments);
        for ((a, b), (u, v)) in mu.segments() {
            for (x, w) in rule.mapped(a, b) {
                let m = u + (v - u) * (x - a) / (b - a);
                if m != 0.0 {
                    nodes.push(x);
                    weights.push(w * m);
                }
            }
        }
        Self { nodes, weights }
    }

    pub fn default_for(mu: &WeightFunction) -> Self {
        Self::new(mu, DEFAULT_ALPHA_NODES)
    }
}

/// The combined L1 memory function `G(x) = Σ_k c_k x^{1-α_k} / Γ(2-α_k)`.
///
/// With it, `D^(μ)φ(t_n) = Σ_j (Δφ_j / h_j) [G(t_n - t_j) - G(t_n - t_{j+1})]`.
#[derive(Debug, Clone)]
pub struct MemoryKernel {
    exponents: Vec<f64>,
    coefficients: Vec<f64>,
}

impl MemoryKernel {
    pub fn new(rule: &AlphaRule) -> Self {
        let exponents = rule.nodes.iter().map(|a| 1.0 - a).collect();
        let coefficients = rule
            .nodes
            .iter()
            .zip(&rule.weights)
            .map(|(a, w)| w / gamma(2.0 - a))
            .collect();
        Self { exponents, coefficients }
    }

    pub fn eval(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return 0.0;
        }
        let lx = x.ln();
        self.exponents
            .iter()
            .zip(&self.coefficients)
            .map(|(e, c)| c * (e * lx).exp())
            .sum()
    }

    pub fn apply(&self, series: &TimeSeries) -> TimeSeries {
        apply_memory(series, |x| self.eval(x))
    }
}

/// D^(μ) with the default α-rule.
pub fn distributed_derivative(series: &TimeSeries, mu: &WeightFunction) -> Result<TimeSeries> {
    distributed_derivative_with(series, &AlphaRule::default_for(mu))
}

pub fn distributed_derivative_with(series: &TimeSeries, rule: &AlphaRule) -> Result<TimeSeries> {
    if rule.nodes.iter().any(|a| !(0.0..=1.0).contains(a)) {
        return Err(domain("alpha rule nodes must lie in [0, 1]"));
    }
    Ok(MemoryKernel::new(rule).apply(series))
}

/// `Σ_j (Δφ_j/h_j)[G(t_n − t_j) − G(t_n − t_{j+1})]` for every n, with `D(t_0) = 0`.
fn apply_memory(series: &TimeSeries, g: impl Fn(f64) -> f64) -> TimeSeries {
    let t = series.times();
    let phi = &series.samples;
    let n_pts = t.len();
    let slopes: Vec<f64> = (0..n_pts - 1).map(|j| (phi[j + 1] - phi[j]) / (t[j + 1] - t[j])).collect();
    let mut out = vec![0.0; n_pts];
    if let Some(h) = series.grid.uniform_step() {
        let table: Vec<f64> = (0..n_pts).map(|k| g(k as f64 * h)).collect();
        for n in 1..n_pts {
            let mut acc = 0.0;
            for j in 0..n {
                acc += slopes[j] * (table[n - j] - table[n - j - 1]);
            }
            out[n] = acc;
        }
    } else {
        for n in 1..n_pts {
            let mut acc = 0.0;
            let mut upper = g(t[n]);
            for j in 0..n {
                let lower = g(t[n] - t[j + 1]);
                acc += slopes[j] * (upper - lower);
                upper = lower;
            }
            out[n] = acc;
        }
    }
    TimeSeries { grid: series.grid.clone(), samples: out }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frac::grid::TimeGrid;

    fn close(a: f64, b: f64, tol: f64) {
        assert!((a - b).abs() <= tol, "{a} vs {b}");
    }

    #[test]
    fn integral_examples() {
        let g = TimeGrid::uniform(1.0, 10).unwrap();
        let one = TimeSeries::from_fn(&g, |_| 1.0);
        close(rl_integral(&one, 1.0).unwrap().samples[5], 0.5, 1e-14);
        let lin = TimeSeries::from_fn(&g, |t| t);
        close(rl_integral(&lin, 1.0).unwrap().samples[10], 0.5, 1e-14);
        // oracle: ∫₀¹ (1-τ)^{-1/2} dτ with τ = 1 - v², smooth in v
        let oracle = GaussLegendre::new(20).integrate(0.0, 1.0, |_| 2.0) / gamma(0.5);
        close(rl_integral(&one, 0.5).unwrap().samples[10], oracle, 1e-13);
        assert!(rl_integral(&one, 0.0).is_err());
        assert!(rl_integral(&one, -1.0).is_err());
    }

    #[test]
    fn integral_exact_for_linear_on_nonuniform_grid() {
        let g = TimeGrid::graded(2.0, 13, 1.7).unwrap();
        let lin = TimeSeries::from_fn(&g, |t| 3.0 * t + 1.0);
        let j = rl_integral(&lin, 0.3).unwrap();
        for (&t, &v) in g.values().iter().zip(&j.samples) {
            let exact = t.powf(0.3) / gamma(1.3) + 3.0 * t.powf(1.3) / gamma(2.3);
            close(v, exact, 1e-13);
        }
    }

    #[test]
    fn caputo_examples() {
        let g = TimeGrid::uniform(1.0, 16).unwrap();
        let lin = TimeSeries::from_fn(&g, |t| t);
        close(caputo_derivative(&lin, 0.5).unwrap().samples[16], 1.0 / gamma(1.5), 1e-13);
        let c = TimeSeries::from_fn(&g, |_| 2.5);
        assert!(caputo_derivative(&c, 0.3).unwrap().samples.iter().all(|&v| v == 0.0));
        assert_eq!(caputo_derivative(&lin, 0.0).unwrap(), lin);
        let d1 = caputo_derivative(&lin, 1.0).unwrap();
        assert!(d1.samples.iter().all(|&v| (v - 1.0).abs() < 1e-12));
        assert!(caputo_derivative(&lin, 1.5).is_err());
    }

    #[test]
    fn caputo_l1_rate_on_smooth_input() {
        let alpha = 0.4;
        let err = |n: usize| {
            let g = TimeGrid::uniform(1.0, n).unwrap();
            let s = TimeSeries::from_fn(&g, |t| t * t);
            let d = caputo_derivative(&s, alpha).unwrap();
            (d.samples[n] - 2.0 / gamma(3.0 - alpha)).abs()
        };
        let rate = (err(64) / err(128)).log2();
        assert!(rate >= 2.0 - alpha - 0.1, "rate {rate}");
    }

    #[test]
    fn distributed_examples() {
        let g = TimeGrid::uniform(1.0, 20).unwrap();
        let one = WeightFunction::constant(1.0).unwrap();
        let c = TimeSeries::from_fn(&g, |_| 4.0);
        assert!(distributed_derivative(&c, &one).unwrap().samples.iter().all(|&v| v == 0.0));
        let lin = TimeSeries::from_fn(&g, |t| t);
        let oracle = GaussLegendre::new(64).integrate(0.0, 1.0, |a| 1.0 / gamma(2.0 - a));
        close(distributed_derivative(&lin, &one).unwrap().samples[20], oracle, 1e-12);
        let hat = WeightFunction::narrow_hat(0.5, 1e-3).unwrap();
        let got = distributed_derivative(&lin, &hat).unwrap();
        let target = caputo_derivative(&lin, 0.5).unwrap();
        for (a, b) in got.samples.iter().zip(&target.samples) {
            close(*a, *b, 1e-5);
        }
    }

    #[test]
    fn distributed_matches_nonuniform_path() {
        let mu = WeightFunction::linear(0.5, 2.0).unwrap();
        let g = TimeGrid::uniform(1.0, 30).unwrap();
        let nonuniform = TimeGrid::new(g.values().iter().map(|t| t * (1.0 + 1e-9 * t * t)).collect()).unwrap();
        assert!(nonuniform.uniform_step().is_none());
        let a = distributed_derivative(&TimeSeries::from_fn(&g, |t| t.sin()), &mu).unwrap();
        let b = distributed_derivative(&TimeSeries::from_fn(&nonuniform, |t| t.sin()), &mu).unwrap();
        for (x, y) in a.samples.iter().zip(&b.samples) {
            close(*x, *y, 1e-7);
        }
    }

    #[test]
    fn alpha_rule_integrates_weight() {
        let mu = WeightFunction::from_fn(17, |a| 1.0 + (3.0 * a).sin().abs()).unwrap();
        let rule = AlphaRule::default_for(&mu);
        let mass: f64 = rule.weights.iter().sum();
        close(mass, mu.mass(), 1e-13);
        assert!(rule.nodes.iter().all(|a| *a > 0.0 && *a < 1.0));
    }
}
