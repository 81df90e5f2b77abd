//! Contour quadratures for the Bromwich integral.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{contract, domain, Error, Result};
use crate::frac::{TimeGrid, WeightFunction};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ContourKind {
    /// Fixed Talbot contour.
    FixedTalbot,
    /// Vertical line `Re s = γ` with Euler-accelerated Fourier series.
    BromwichLine,
}

impl ContourKind {
    pub fn name(self) -> &'static str {
        match self {
            ContourKind::FixedTalbot => "fixed-talbot",
            ContourKind::BromwichLine => "bromwich-line",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "fixed-talbot" | "talbot" => Some(ContourKind::FixedTalbot),
            "bromwich-line" | "bromwich" => Some(ContourKind::BromwichLine),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContourSpec {
    pub kind: ContourKind,
    pub node_count: usize,
    /// Talbot: `r = scale · node_count / t`.
    pub scale: f64,
    /// Bromwich abscissa at `t = 1`; the line used at time `t` is `Re s = gamma / t`.
    pub gamma: Option<f64>,
}

impl Default for ContourSpec {
    fn default() -> Self {
        Self { kind: ContourKind::FixedTalbot, node_count: 48, scale: 0.25, gamma: None }
    }
}

/// Abscissa `γ·t` used by the Euler algorithm when none is given.
const DEFAULT_EULER_SHIFT: f64 = 9.2;

impl ContourSpec {
    pub fn bromwich(node_count: usize, gamma: Option<f64>) -> Self {
        Self { kind: ContourKind::BromwichLine, node_count, scale: 1.0, gamma }
    }

    pub fn validate(&self) -> Result<()> {
        if self.node_count < 8 {
            return Err(domain(format!("contour needs at least 8 nodes, got {}", self.node_count)));
        }
        if !(self.scale > 0.0) || !self.scale.is_finite() {
            return Err(domain(format!("contour scale must be positive, got {}", self.scale)));
        }
        if let Some(g) = self.gamma {
            if !(g > 0.0) || !g.is_finite() {
                return Err(domain(format!("Bromwich abscissa must lie right of 0, got {g}")));
            }
        }
        Ok(())
    }

    /// Nodes and weights with `f(1) ≈ Σ Re(w_k F(s_k))`; for time `t` use
    /// nodes `s_k / t` and weights `w_k / t`.
    pub fn unit_rule(&self) -> Result<ContourRule> {
        self.validate()?;
        let m = self.node_count;
        let mut nodes = Vec::with_capacity(m);
        let mut weights = Vec::with_capacity(m);
        match self.kind {
            ContourKind::FixedTalbot => {
                let r = self.scale * m as f64;
                let c = r / m as f64;
                nodes.push(Complex64::new(r, 0.0));
                weights.push(Complex64::new(0.5 * c * r.exp(), 0.0));
                for k in 1..m {
                    let theta = k as f64 * std::f64::consts::PI / m as f64;
                    let cot = theta.cos() / theta.sin();
                    let s = Complex64::new(r * theta * cot, r * theta);
                    let sigma = theta + (theta * cot - 1.0) * cot;
                    nodes.push(s);
                    weights.push(c * s.exp() * Complex64::new(1.0, sigma));
                }
            }
            ContourKind::BromwichLine => {
                let a = 2.0 * self.gamma.unwrap_or(DEFAULT_EULER_SHIFT);
                let euler = (m / 2).min(11);
                let plain = m - 1 - euler;
                let base = (0.5 * a).exp();
                let binom = binomial_tail(euler);
                for k in 0..m {
                    let s = Complex64::new(0.5 * a, k as f64 * std::f64::consts::PI);
                    let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
                    let half = if k == 0 { 0.5 } else { 1.0 };
                    let tail = if k <= plain { 1.0 } else { binom[k - plain] };
                    nodes.push(s);
                    weights.push(Complex64::new(base * sign * half * tail, 0.0));
                }
            }
        }
        Ok(ContourRule { nodes, weights })
    }
}

/// `Σ_{j≥i} C(m,j) 2^{-m}` for `i = 0..=m`.
fn binomial_tail(m: usize) -> Vec<f64> {
    let mut c = vec![1.0f64; m + 1];
    for j in 1..=m {
        c[j] = c[j - 1] * (m + 1 - j) as f64 / j as f64;
    }
    let scale = 0.5f64.powi(m as i32);
    let mut tail = vec![0.0; m + 2];
    for i in (0..=m).rev() {
        tail[i] = tail[i + 1] + c[i] * scale;
    }
    tail.truncate(m + 1);
    tail
}

#[derive(Debug, Clone, PartialEq)]
pub struct ContourRule {
    pub nodes: Vec<Complex64>,
    pub weights: Vec<Complex64>,
}

/// Contour-quadrature value of the inverse transform of `f_hat` at `t > 0`.
pub fn invert_laplace(
    f_hat: impl Fn(Complex64) -> Complex64,
    t: f64,
    contour: &ContourSpec,
) -> Result<f64> {
    if !(t > 0.0) || !t.is_finite() {
        return Err(domain(format!("inversion time must be positive, got {t}")));
    }
    let rule = contour.unit_rule()?;
    let mut acc = 0.0;
    for (k, (s1, w1)) in rule.nodes.iter().zip(&rule.weights).enumerate() {
        let s = s1 / t;
        let f = f_hat(s);
        if !f.re.is_finite() || !f.im.is_finite() {
            return Err(Error::Evaluation { node: k, s, t });
        }
        acc += (w1 * f).re / t;
    }
    Ok(acc)
}

/// The symbol `w(s)` tabulated at every contour node of every positive grid
/// time, so several images built from `(s, w(s))` can be inverted cheaply.
#[derive(Debug, Clone)]
pub struct SymbolTable {
    times: Vec<f64>,
    rule: ContourRule,
    symbols: Vec<Vec<Complex64>>,
}

impl SymbolTable {
    pub fn new(mu: &WeightFunction, times: &[f64], contour: &ContourSpec) -> Result<Self> {
        if let Some(&t) = times.iter().find(|&&t| !(t > 0.0) || !t.is_finite()) {
            return Err(domain(format!("inversion time must be positive, got {t}")));
        }
        let rule = contour.unit_rule()?;
        let symbols = times
            .par_iter()
            .map(|&t| rule.nodes.iter().map(|s| mu.moment_w_complex(s / t)).collect())
            .collect();
        Ok(Self { times: times.to_vec(), rule, symbols })
    }

    /// Table over the positive times of `grid`.
    pub fn for_grid(mu: &WeightFunction, grid: &TimeGrid, contour: &ContourSpec) -> Result<Self> {
        Self::new(mu, &grid.values()[1..], contour)
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    /// Inverts `image(s, w(s))` at every tabulated time.
    pub fn invert(&self, image: impl Fn(Complex64, Complex64) -> Complex64 + Sync) -> Result<Vec<f64>> {
        self.times
            .par_iter()
            .zip(&self.symbols)
            .map(|(&t, ws)| {
                let mut acc = 0.0;
                for (k, ((s1, w1), w)) in self.rule.nodes.iter().zip(&self.rule.weights).zip(ws).enumerate() {
                    let s = s1 / t;
                    let f = image(s, *w);
                    if !f.re.is_finite() || !f.im.is_finite() {
                        return Err(Error::Evaluation { node: k, s, t });
                    }
                    acc += (w1 * f).re;
                }
                Ok(acc / t)
            })
            .collect()
    }
}

/// Hat-basis symbols on a fixed α-grid, from which the [`SymbolTable`] of
/// any weight on that grid follows by a dot product.
#[derive(Debug, Clone)]
pub struct BasisSymbolTable {
    alpha: Vec<f64>,
    times: Vec<f64>,
    rule: ContourRule,
    /// `[time][contour node][basis]`.
    basis: Vec<Vec<Vec<Complex64>>>,
}

impl BasisSymbolTable {
    pub fn new(alpha: &[f64], times: &[f64], contour: &ContourSpec) -> Result<Self> {
        if let Some(&t) = times.iter().find(|&&t| !(t > 0.0) || !t.is_finite()) {
            return Err(domain(format!("inversion time must be positive, got {t}")));
        }
        let rule = contour.unit_rule()?;
        let basis = times
            .par_iter()
            .map(|&t| rule.nodes.iter().map(|s| WeightFunction::basis_moments(alpha, s / t)).collect())
            .collect();
        Ok(Self { alpha: alpha.to_vec(), times: times.to_vec(), rule, basis })
    }

    pub fn alpha_grid(&self) -> &[f64] {
        &self.alpha
    }

    pub fn table(&self, mu: &WeightFunction) -> Result<SymbolTable> {
        if mu.alpha_grid() != self.alpha.as_slice() {
            return Err(contract("weight does not live on the basis alpha grid"));
        }
        let c = mu.values();
        let symbols = self
            .basis
            .iter()
            .map(|per_t| per_t.iter().map(|b| b.iter().zip(c).map(|(x, y)| x * y).sum()).collect())
            .collect();
        Ok(SymbolTable { times: self.times.clone(), rule: self.rule.clone(), symbols })
    }
}
