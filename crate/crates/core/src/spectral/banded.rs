//! Symmetric positive definite band matrices and their Cholesky factors.

use crate::error::{Error, Result};

/// Lower band storage: `band[i * (bw + 1) + k] = A[i][i - k]`.
#[derive(Debug, Clone, PartialEq)]
pub struct BandedSpd {
    n: usize,
    bw: usize,
    band: Vec<f64>,
}

impl BandedSpd {
    pub fn zeros(n: usize, bw: usize) -> Self {
        Self { n, bw, band: vec![0.0; n * (bw + 1)] }
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn bandwidth(&self) -> usize {
        self.bw
    }

    /// Adds `v` to `A[i][j]` (and by symmetry `A[j][i]`); needs `|i − j| ≤ bw`.
    pub fn add(&mut self, i: usize, j: usize, v: f64) {
        let (r, c) = if i >= j { (i, j) } else { (j, i) };
        debug_assert!(r - c <= self.bw);
        self.band[r * (self.bw + 1) + (r - c)] += v;
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let (r, c) = if i >= j { (i, j) } else { (j, i) };
        if r - c > self.bw {
            0.0
        } else {
            self.band[r * (self.bw + 1) + (r - c)]
        }
    }

    pub fn add_diagonal(&mut self, d: &[f64], scale: f64) {
        for (i, v) in d.iter().enumerate() {
            self.band[i * (self.bw + 1)] += scale * v;
        }
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.n];
        for i in 0..self.n {
            let row = &self.band[i * (self.bw + 1)..(i + 1) * (self.bw + 1)];
            y[i] += row[0] * x[i];
            for k in 1..=self.bw.min(i) {
                let j = i - k;
                y[i] += row[k] * x[j];
                y[j] += row[k] * x[i];
            }
        }
        y
    }

    /// Cholesky factor `L` with `A = L Lᵀ`.
    pub fn cholesky(&self) -> Result<BandedCholesky> {
        let (n, bw) = (self.n, self.bw);
        let w = bw + 1;
        let mut l = self.band.clone();
        for i in 0..n {
            for k in (0..=bw.min(i)).rev() {
                let j = i - k;
                // L[i][j] = (A[i][j] − Σ_m L[i][m] L[j][m]) / L[j][j]
                let lo = i.saturating_sub(bw).max(j.saturating_sub(bw));
                let mut sum = l[i * w + k];
                for m in lo..j {
                    sum -= l[i * w + (i - m)] * l[j * w + (j - m)];
                }
                if k == 0 {
                    if !(sum > 0.0) {
                        return Err(Error::Numerical(format!("matrix not positive definite at row {i}")));
                    }
                    l[i * w] = sum.sqrt();
                } else {
                    l[i * w + k] = sum / l[j * w];
                }
            }
        }
        Ok(BandedCholesky { n, bw, l })
    }
}

#[derive(Debug, Clone)]
pub struct BandedCholesky {
    n: usize,
    bw: usize,
    l: Vec<f64>,
}

impl BandedCholesky {
    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let (n, bw) = (self.n, self.bw);
        let w = bw + 1;
        let mut y = b.to_vec();
        for i in 0..n {
            let mut s = y[i];
            for k in 1..=bw.min(i) {
                s -= self.l[i * w + k] * y[i - k];
            }
            y[i] = s / self.l[i * w];
        }
        for i in (0..n).rev() {
            let mut s = y[i];
            for k in 1..=bw.min(n - 1 - i) {
                s -= self.l[(i + k) * w + k] * y[i + k];
            }
            y[i] = s / self.l[i * w];
        }
        y
    }
}
