use crate::error::{contract, domain, Result};

/// Strictly increasing time nodes starting at zero.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeGrid {
    t: Vec<f64>,
}

impl TimeGrid {
    pub fn new(t: Vec<f64>) -> Result<Self> {
        if t.len() < 2 {
            return Err(contract("a time grid needs at least two nodes"));
        }
        if t[0] != 0.0 {
            return Err(contract(format!("time grid must start at 0, got {}", t[0])));
        }
        if let Some(i) = t.windows(2).position(|w| !(w[1] > w[0]) || !w[1].is_finite()) {
            return Err(contract(format!(
                "time grid not strictly increasing at index {}",
                i + 1
            )));
        }
        Ok(Self { t })
    }

    /// `steps` equal intervals on `[0, horizon]`.
    pub fn uniform(horizon: f64, steps: usize) -> Result<Self> {
        if !(horizon > 0.0) || steps == 0 {
            return Err(domain("uniform grid needs horizon > 0 and steps >= 1"));
        }
        let h = horizon / steps as f64;
        let mut t: Vec<f64> = (0..=steps).map(|j| j as f64 * h).collect();
        t[steps] = horizon;
        Self::new(t)
    }

    /// Graded nodes `t_j = T (j/N)^r`, clustering near zero for `r > 1`.
    pub fn graded(horizon: f64, steps: usize, exponent: f64) -> Result<Self> {
        if !(horizon > 0.0) || steps == 0 || !(exponent >= 1.0) {
            return Err(domain("graded grid needs horizon > 0, steps >= 1, exponent >= 1"));
        }
        let n = steps as f64;
        Self::new((0..=steps).map(|j| horizon * (j as f64 / n).powf(exponent)).collect())
    }

    /// Zero followed by `count` log-spaced times in `[first, last]`.
    pub fn logarithmic(first: f64, last: f64, count: usize) -> Result<Self> {
        if !(first > 0.0 && last > first) || count < 2 {
            return Err(domain("log grid needs 0 < first < last and count >= 2"));
        }
        let (a, b) = (first.ln(), last.ln());
        let mut t = vec![0.0];
        t.extend((0..count).map(|k| (a + (b - a) * k as f64 / (count - 1) as f64).exp()));
        Self::new(t)
    }

    /// Uniform evaluation nodes `kT/steps` merged with geometric nodes
    /// `T·ratio^k` down to `floor`. Returns the grid and the indices of the
    /// evaluation nodes. Geometric nodes closer than `0.3(1−ratio)t` to a
    /// neighbour are dropped so no interval degenerates.
    pub fn geometric_refinement(
        horizon: f64,
        steps: usize,
        ratio: f64,
        floor: f64,
    ) -> Result<(Self, Vec<usize>)> {
        if !(horizon > 0.0) || steps == 0 || !(ratio > 0.0 && ratio < 1.0) || !(floor > 0.0 && floor < horizon) {
            return Err(domain("geometric refinement needs horizon > 0, steps >= 1, 0 < ratio < 1, 0 < floor < horizon"));
        }
        let h = horizon / steps as f64;
        let mut pts: Vec<(f64, bool)> = (1..=steps).map(|k| (k as f64 * h, true)).collect();
        pts[steps - 1].0 = horizon;
        let mut x = horizon * ratio;
        while x > floor {
            pts.push((x, false));
            x *= ratio;
        }
        pts.sort_by(|a, b| a.0.total_cmp(&b.0));
        let gap = 0.3 * (1.0 - ratio);
        let mut t = vec![0.0];
        let mut marks = vec![false];
        for (p, eval) in pts {
            let last = *t.last().unwrap();
            if p - last < gap * p {
                if eval {
                    *t.last_mut().unwrap() = p;
                    *marks.last_mut().unwrap() = true;
                }
                continue;
            }
            t.push(p);
            marks.push(eval);
        }
        let idx = marks.iter().enumerate().filter(|(_, &m)| m).map(|(i, _)| i).collect();
        Ok((Self::new(t)?, idx))
    }

    pub fn values(&self) -> &[f64] {
        &self.t
    }

    pub fn len(&self) -> usize {
        self.t.len()
    }

    pub fn is_empty(&self) -> bool {
        self.t.is_empty()
    }

    pub fn horizon(&self) -> f64 {
        *self.t.last().unwrap()
    }

    /// Length of the interval `[t_j, t_{j+1}]`.
    pub fn step(&self, j: usize) -> f64 {
        self.t[j + 1] - self.t[j]
    }

    /// The common step if every interval agrees to 1e-10 relative.
    pub fn uniform_step(&self) -> Option<f64> {
        let h = self.horizon() / (self.len() - 1) as f64;
        self.t
            .windows(2)
            .all(|w| ((w[1] - w[0]) - h).abs() <= 1e-10 * h)
            .then_some(h)
    }

    /// Index of the node equal to `t` (within 1e-12 relative), if any.
    pub fn index_of(&self, t: f64) -> Option<usize> {
        let tol = 1e-12 * self.horizon();
        self.t.iter().position(|&x| (x - t).abs() <= tol)
    }
}

/// Samples aligned with a time grid.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeries {
    pub grid: TimeGrid,
    pub samples: Vec<f64>,
}

impl TimeSeries {
    pub fn new(grid: TimeGrid, samples: Vec<f64>) -> Result<Self> {
        if samples.len() != grid.len() {
            return Err(contract(format!(
                "series has {} samples but grid has {} nodes",
                samples.len(),
                grid.len()
            )));
        }
        Ok(Self { grid, samples })
    }

    pub fn from_fn(grid: &TimeGrid, f: impl Fn(f64) -> f64) -> Self {
        let samples = grid.values().iter().map(|&t| f(t)).collect();
        Self { grid: grid.clone(), samples }
    }

    pub fn zeros(grid: &TimeGrid) -> Self {
        Self { grid: grid.clone(), samples: vec![0.0; grid.len()] }
    }

    pub fn times(&self) -> &[f64] {
        self.grid.values()
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn max_abs(&self) -> f64 {
        self.samples.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub(crate) fn require_same_grid(&self, other: &TimeSeries) -> Result<()> {
        if self.grid != other.grid {
            return Err(contract("time series are defined on different grids"));
        }
        Ok(())
    }

    /// Pointwise `a*self + b*other` on a shared grid.
    pub fn combine(&self, a: f64, other: &TimeSeries, b: f64) -> Result<TimeSeries> {
        self.require_same_grid(other)?;
        let samples = self.samples.iter().zip(&other.samples).map(|(x, y)| a * x + b * y).collect();
        Ok(TimeSeries { grid: self.grid.clone(), samples })
    }

    /// Trapezoidal `L²(0,T)` norm of the piecewise-linear interpolant's samples.
    pub fn l2_norm(&self) -> f64 {
        let t = self.times();
        let mut acc = 0.0;
        for j in 0..t.len() - 1 {
            let h = t[j + 1] - t[j];
            acc += 0.5 * h * (self.samples[j].powi(2) + self.samples[j + 1].powi(2));
        }
        acc.sqrt()
    }
}
