//! The order-weight density μ(α) on [0, 1], its Laplace symbol
//! w(s) = ∫₀¹ μ(α) s^(α−1) dα, and the plain-text exchange format.

use std::fmt::Write as _;

use num_complex::Complex64;

use crate::error::{contract, domain, Error, Result};
use crate::quadrature::GaussLegendre;

/// Piecewise-linear nonnegative weight over orders α ∈ [0, 1].
#[derive(Debug, Clone, PartialEq)]
pub struct WeightFunction {
    alpha: Vec<f64>,
    values: Vec<f64>,
}

/// Level set `{α : μ(α) = level}` of a piecewise-linear weight.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct LevelSet {
    /// Isolated points of the level set.
    pub points: Vec<f64>,
    /// Maximal intervals on which μ is flat at the level.
    pub flat: Vec<(f64, f64)>,
}

impl LevelSet {
    /// Number of isolated components; flat intervals are not counted.
    pub fn count(&self) -> usize {
        self.points.len()
    }
}

impl WeightFunction {
    pub fn new(alpha: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        Self::validate(&alpha, &values)?;
        Ok(Self { alpha, values })
    }

    fn validate(alpha: &[f64], values: &[f64]) -> Result<()> {
        if alpha.len() != values.len() {
            return Err(contract("alpha grid and values differ in length"));
        }
        if alpha.len() < 2 {
            return Err(contract("a weight function needs at least two nodes"));
        }
        if alpha[0] != 0.0 || *alpha.last().unwrap() != 1.0 {
            return Err(contract("alpha grid must start at 0 and end at 1"));
        }
        if let Some(i) = alpha.windows(2).position(|w| !(w[1] > w[0])) {
            return Err(contract(format!("alpha grid not strictly increasing at node {}", i + 1)));
        }
        for (i, (&a, &v)) in alpha.iter().zip(values).enumerate() {
            if !v.is_finite() {
                return Err(contract(format!("weight value at node {i} (alpha = {a}) is not finite")));
            }
            if v < 0.0 {
                return Err(contract(format!(
                    "weight value at node {i} (alpha = {a}) is negative: {v}"
                )));
            }
        }
        if values.iter().all(|&v| v == 0.0) {
            return Err(contract("weight function vanishes identically"));
        }
        Ok(())
    }

    pub fn constant(c: f64) -> Result<Self> {
        Self::new(vec![0.0, 1.0], vec![c, c])
    }

    /// Linear weight through `(0, at_zero)` and `(1, at_one)`.
    pub fn linear(at_zero: f64, at_one: f64) -> Result<Self> {
        Self::new(vec![0.0, 1.0], vec![at_zero, at_one])
    }

    /// Samples `f` on `nodes` equispaced points of [0, 1].
    pub fn from_fn(nodes: usize, f: impl Fn(f64) -> f64) -> Result<Self> {
        if nodes < 2 {
            return Err(contract("need at least two nodes"));
        }
        let alpha = equispaced(nodes);
        let values = alpha.iter().map(|&a| f(a)).collect();
        Self::new(alpha, values)
    }

    /// Unit-mass hat centred at `center` with half-width `half_width`,
    /// truncated to [0, 1] and renormalised. Approximates a point mass.
    pub fn narrow_hat(center: f64, half_width: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&center) || !(half_width > 0.0 && half_width < 0.5) {
            return Err(domain("hat needs center in [0,1] and 0 < half_width < 0.5"));
        }
        let mut pts: Vec<(f64, f64)> = vec![(center, 1.0)];
        let left = center - half_width;
        let right = center + half_width;
        if left > 0.0 {
            pts.push((left, 0.0));
            pts.push((0.0, 0.0));
        } else if center > 0.0 {
            pts.push((0.0, 1.0 - center / half_width));
        }
        if right < 1.0 {
            pts.push((right, 0.0));
            pts.push((1.0, 0.0));
        } else if center < 1.0 {
            pts.push((1.0, 1.0 - (1.0 - center) / half_width));
        }
        pts.sort_by(|a, b| a.0.total_cmp(&b.0));
        pts.dedup_by(|a, b| a.0 == b.0);
        let (alpha, values): (Vec<f64>, Vec<f64>) = pts.into_iter().unzip();
        let raw = Self::new(alpha, values)?;
        let mass = raw.mass();
        raw.scaled(1.0 / mass)
    }

    /// `base + amplitude * (1 - cos(2π(α-a)/(b-a)))/2` on `[a, b]`, `base` elsewhere,
    /// sampled on `nodes` equispaced points.
    pub fn raised_cosine(nodes: usize, base: f64, amplitude: f64, a: f64, b: f64) -> Result<Self> {
        if !(b > a) {
            return Err(domain("raised cosine needs a < b"));
        }
        Self::from_fn(nodes, |x| {
            if x <= a || x >= b {
                base
            } else {
                base + amplitude * 0.5 * (1.0 - (2.0 * std::f64::consts::PI * (x - a) / (b - a)).cos())
            }
        })
    }

    pub fn scaled(&self, factor: f64) -> Result<Self> {
        Self::new(self.alpha.clone(), self.values.iter().map(|v| v * factor).collect())
    }

    pub fn alpha_grid(&self) -> &[f64] {
        &self.alpha
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn segments(&self) -> impl Iterator<Item = ((f64, f64), (f64, f64))> + '_ {
        self.alpha
            .windows(2)
            .zip(self.values.windows(2))
            .map(|(a, v)| ((a[0], a[1]), (v[0], v[1])))
    }

    /// Piecewise-linear interpolant at `alpha`.
    pub fn eval(&self, alpha: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&alpha) {
            return Err(domain(format!("order {alpha} outside [0, 1]")));
        }
        Ok(self.eval_unchecked(alpha))
    }

    pub(crate) fn eval_unchecked(&self, alpha: f64) -> f64 {
        let k = match self.alpha.partition_point(|&a| a <= alpha) {
            0 => 0,
            k if k >= self.alpha.len() => self.alpha.len() - 2,
            k => k - 1,
        };
        let (a0, a1) = (self.alpha[k], self.alpha[k + 1]);
        let (v0, v1) = (self.values[k], self.values[k + 1]);
        if alpha == a0 {
            return v0;
        }
        if alpha == a1 {
            return v1;
        }
        let theta = (alpha - a0) / (a1 - a0);
        v0 + theta * (v1 - v0)
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().fold(0.0, |m: f64, &v| m.max(v))
    }

    /// ∫₀¹ μ(α) dα (exact for the piecewise-linear model).
    pub fn mass(&self) -> f64 {
        self.segments().map(|((a, b), (u, v))| 0.5 * (b - a) * (u + v)).sum()
    }

    /// Level set of μ at `level`, separating isolated points from flat intervals.
    pub fn level_set(&self, level: f64) -> LevelSet {
        let mut out = LevelSet::default();
        let mut points = Vec::new();
        for ((a, b), (u, v)) in self.segments() {
            let (du, dv) = (u - level, v - level);
            if du == 0.0 && dv == 0.0 {
                match out.flat.last_mut() {
                    Some(last) if last.1 == a => last.1 = b,
                    _ => out.flat.push((a, b)),
                }
                continue;
            }
            if du == 0.0 {
                points.push(a);
            }
            if dv == 0.0 {
                points.push(b);
            }
            if du * dv < 0.0 {
                points.push(a + (b - a) * du / (du - dv));
            }
        }
        points.sort_by(f64::total_cmp);
        points.dedup();
        out.points = points
            .into_iter()
            .filter(|&p| !out.flat.iter().any(|&(a, b)| p >= a && p <= b))
            .collect();
        out
    }

    /// w(s) = ∫₀¹ μ(α) s^(α−1) dα for real `s > 0`.
    pub fn moment_w(&self, s: f64) -> Result<f64> {
        if !(s > 0.0) || !s.is_finite() {
            return Err(domain(format!("w(s) needs s > 0, got {s}")));
        }
        if s == 1.0 {
            return Ok(self.mass());
        }
        Ok(self.moment_w_complex(Complex64::new(s, 0.0)).re)
    }

    /// w(s) for complex `s` off the closed negative real axis (principal branch).
    pub fn moment_w_complex(&self, s: Complex64) -> Complex64 {
        let z = s.ln();
        let mut acc = Complex64::new(0.0, 0.0);
        for ((a, b), (u, v)) in self.segments() {
            acc += segment_moment(a, b, u, v, z);
        }
        acc
    }

    /// `∫ e_i(α) s^(α−1) dα` for every hat function `e_i` of the α-grid
    /// (the symbol is linear in the nodal values).
    pub fn basis_moments(alpha: &[f64], s: Complex64) -> Vec<Complex64> {
        let z = s.ln();
        let mut out = vec![Complex64::new(0.0, 0.0); alpha.len()];
        for (i, w) in alpha.windows(2).enumerate() {
            out[i] += segment_moment(w[0], w[1], 1.0, 0.0, z);
            out[i + 1] += segment_moment(w[0], w[1], 0.0, 1.0, z);
        }
        out
    }

    /// ‖μ‖_∞ (s−1)/log s, an upper bound for s·w(s) on s > 1.
    pub fn sw_upper_bound(&self, s: f64) -> Result<f64> {
        if !(s > 1.0) || !s.is_finite() {
            return Err(domain(format!("sw bound needs s > 1, got {s}")));
        }
        Ok(self.sup_norm() * (s - 1.0) / s.ln())
    }

    /// Two-column text: `alpha value`, `#` comments allowed.
    pub fn parse(text: &str) -> Result<Self> {
        let mut alpha = Vec::new();
        let mut values = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap().trim();
            if line.is_empty() {
                continue;
            }
            let cols: Vec<&str> = line
                .split(|c: char| c.is_whitespace() || c == ',')
                .filter(|c| !c.is_empty())
                .collect();
            if cols.len() != 2 {
                return Err(Error::Parse {
                    line: lineno + 1,
                    message: format!("expected two columns, found {}", cols.len()),
                });
            }
            let parse = |c: &str| {
                c.parse::<f64>().map_err(|e| Error::Parse {
                    line: lineno + 1,
                    message: format!("bad number {c:?}: {e}"),
                })
            };
            alpha.push(parse(cols[0])?);
            values.push(parse(cols[1])?);
        }
        Self::new(alpha, values)
    }

    pub fn to_text(&self) -> String {
        let mut s = String::from("# alpha value\n");
        for (a, v) in self.alpha.iter().zip(&self.values) {
            let _ = writeln!(s, "{a} {v}");
        }
        s
    }

    /// Relative L²(0,1) distance `‖self − other‖ / ‖other‖`, exact for
    /// piecewise-linear weights.
    pub fn relative_l2_distance(&self, other: &WeightFunction) -> f64 {
        let mut nodes: Vec<f64> = self.alpha.iter().chain(&other.alpha).copied().collect();
        nodes.sort_by(f64::total_cmp);
        nodes.dedup();
        let (mut diff, mut norm) = (0.0, 0.0);
        for w in nodes.windows(2) {
            let (a, b) = (w[0], w[1]);
            let m = 0.5 * (a + b);
            // Simpson is exact for the squared linear pieces
            let simpson = |f: &dyn Fn(f64) -> f64| (b - a) / 6.0 * (f(a) + 4.0 * f(m) + f(b));
            diff += simpson(&|x| (self.eval_unchecked(x) - other.eval_unchecked(x)).powi(2));
            norm += simpson(&|x| other.eval_unchecked(x).powi(2));
        }
        (diff / norm).sqrt()
    }
}

pub(crate) fn equispaced(nodes: usize) -> Vec<f64> {
    let mut alpha: Vec<f64> = (0..nodes).map(|k| k as f64 / (nodes - 1) as f64).collect();
    alpha[nodes - 1] = 1.0;
    alpha
}

/// ∫ₐᵇ ℓ(α) e^{(α−1)z} dα with ℓ linear from `u` at `a` to `v` at `b`.
fn segment_moment(a: f64, b: f64, u: f64, v: f64, z: Complex64) -> Complex64 {
    let h = b - a;
    let spread = z.norm() * h;
    if spread > 4.0 {
        // closed form; no cancellation once |z|h is bounded away from zero
        let ea = ((a - 1.0) * z).exp();
        let eb = ((b - 1.0) * z).exp();
        return (v * eb - u * ea) / z - (v - u) * (eb - ea) / (h * z * z);
    }
    let rule = GaussLegendre::order16();
    let panels = spread.ceil().max(1.0) as usize;
    let mut acc = Complex64::new(0.0, 0.0);
    for p in 0..panels {
        let lo = a + h * p as f64 / panels as f64;
        let hi = a + h * (p + 1) as f64 / panels as f64;
        for (x, w) in rule.mapped(lo, hi) {
            let mu = u + (v - u) * (x - a) / h;
            acc += w * mu * ((x - 1.0) * z).exp();
        }
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::E;

    fn nodes(pairs: &[(f64, f64)]) -> WeightFunction {
        let (a, v): (Vec<f64>, Vec<f64>) = pairs.iter().copied().unzip();
        WeightFunction::new(a, v).unwrap()
    }

    #[test]
    fn eval_examples() {
        assert_eq!(WeightFunction::constant(1.0).unwrap().eval(0.37).unwrap(), 1.0);
        assert_eq!(nodes(&[(0.0, 0.0), (1.0, 2.0)]).eval(0.5).unwrap(), 1.0);
        let tent = nodes(&[(0.0, 0.0), (0.5, 1.0), (1.0, 0.0)]);
        assert_eq!(tent.eval(0.25).unwrap(), 0.5);
        assert_eq!(tent.eval(0.5).unwrap(), 1.0);
        assert!(tent.eval(1.2).is_err());
        assert!(tent.eval(-0.1).is_err());
    }

    #[test]
    fn construction_rejects_inadmissible() {
        assert!(WeightFunction::new(vec![0.0, 1.0], vec![0.0, 0.0]).is_err());
        assert!(WeightFunction::new(vec![0.0, 0.5], vec![1.0, 1.0]).is_err());
        assert!(WeightFunction::new(vec![0.0, 0.5, 0.5, 1.0], vec![1.0; 4]).is_err());
        let err = WeightFunction::new(vec![0.0, 0.5, 1.0], vec![1.0, -0.1, 1.0]).unwrap_err();
        assert!(err.to_string().contains("node 1"), "{err}");
    }

    #[test]
    fn level_set_examples() {
        let one = WeightFunction::constant(1.0).unwrap();
        assert_eq!(one.level_set(0.5).count(), 0);
        let flat = one.level_set(1.0);
        assert_eq!(flat.count(), 0);
        assert_eq!(flat.flat, vec![(0.0, 1.0)]);
        let lin = WeightFunction::linear(0.0, 2.0).unwrap();
        let ls = lin.level_set(1.0);
        assert_eq!(ls.count(), 1);
        assert!((ls.points[0] - 0.5).abs() < 1e-15);
        // node touching the level counts once; flat piece is reported separately
        let w = nodes(&[(0.0, 0.0), (0.25, 1.0), (0.5, 0.0), (0.75, 0.0), (1.0, 1.0)]);
        let ls = w.level_set(0.0);
        assert_eq!(ls.points, vec![0.0]);
        assert_eq!(ls.flat, vec![(0.5, 0.75)]);
        assert_eq!(w.level_set(1.0).points, vec![0.25, 1.0]);
    }

    #[test]
    fn moment_examples() {
        let one = WeightFunction::constant(1.0).unwrap();
        assert_eq!(one.moment_w(1.0).unwrap(), 1.0);
        assert!((one.moment_w(E).unwrap() - (1.0 - 1.0 / E)).abs() < 1e-14);
        let exact = 3.0 / (4.0 * 4f64.ln());
        assert!((one.moment_w(4.0).unwrap() - exact).abs() < 1e-14);
        assert!(one.moment_w(0.0).is_err());
        assert!(one.moment_w(-2.0).is_err());
    }

    #[test]
    fn moment_paths_agree() {
        // closed form vs panelled quadrature on the same segment
        let z = Complex64::new(3.0, 2.5);
        let closed = segment_moment(0.1, 0.9, 0.3, 1.7, z);
        let rule = GaussLegendre::new(40);
        let mut quad = Complex64::new(0.0, 0.0);
        for p in 0..20 {
            let lo = 0.1 + 0.04 * p as f64;
            for (x, w) in rule.mapped(lo, lo + 0.04) {
                let mu = 0.3 + 1.4 * (x - 0.1) / 0.8;
                quad += w * mu * ((x - 1.0) * z).exp();
            }
        }
        assert!((closed - quad).norm() < 1e-13 * quad.norm());
    }

    #[test]
    fn moment_large_s_relative_accuracy() {
        let one = WeightFunction::constant(1.0).unwrap();
        for s in [10.0, 1e3, 1e6, 1e10] {
            let exact = (s - 1.0) / (s * f64::ln(s));
            let got = one.moment_w(s).unwrap();
            assert!(((got - exact) / exact).abs() < 1e-12, "s={s}");
        }
    }

    #[test]
    fn sw_bound_examples() {
        let one = WeightFunction::constant(1.0).unwrap();
        let b = one.sw_upper_bound(E).unwrap();
        assert!((b - (E - 1.0)).abs() < 1e-12);
        assert!((E * one.moment_w(E).unwrap() - b).abs() < 1e-9);
        let two = WeightFunction::linear(0.5, 2.0).unwrap();
        assert!((two.sw_upper_bound(4.0).unwrap() - 2.0 * 3.0 / 4f64.ln()).abs() < 1e-12);
        assert!(one.sw_upper_bound(1.0).is_err());
    }

    #[test]
    fn narrow_hat_has_unit_mass() {
        for c in [0.0, 0.3, 0.5, 1.0] {
            let h = WeightFunction::narrow_hat(c, 1e-3).unwrap();
            assert!((h.mass() - 1.0).abs() < 1e-12, "c={c}");
            assert_eq!(h.alpha_grid()[0], 0.0);
            assert_eq!(*h.alpha_grid().last().unwrap(), 1.0);
        }
    }

    #[test]
    fn text_roundtrip_and_errors() {
        let w = WeightFunction::from_fn(5, |a| 1.0 + a * a).unwrap();
        let back = WeightFunction::parse(&w.to_text()).unwrap();
        assert_eq!(w, back);
        let txt = "# comment\n0 1\n\n0.5, 2 # trailing\n1 3\n";
        assert_eq!(WeightFunction::parse(txt).unwrap().values(), &[1.0, 2.0, 3.0]);
        assert!(matches!(WeightFunction::parse("0 1\n1\n"), Err(Error::Parse { line: 2, .. })));
        assert!(WeightFunction::parse("0 1\n0.7 -1\n1 1\n").is_err());
    }

    #[test]
    fn relative_distance() {
        let a = WeightFunction::constant(1.0).unwrap();
        let b = WeightFunction::constant(1.1).unwrap();
        assert!((a.relative_l2_distance(&b) - 0.1 / 1.1).abs() < 1e-14);
        assert_eq!(a.relative_l2_distance(&a), 0.0);
    }
}
