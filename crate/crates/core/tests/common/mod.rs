#![allow(dead_code)]

/// Crank–Nicolson for `u' = −A u + b(t)` with tridiagonal `A` (rows
/// `lower[i] u[i−1] + diag[i] u[i] + upper[i] u[i+1]`), zero start.
pub fn crank_nicolson(
    lower: &[f64],
    diag: &[f64],
    upper: &[f64],
    b: impl Fn(f64) -> Vec<f64>,
    horizon: f64,
    steps: usize,
) -> Vec<Vec<f64>> {
    let n = diag.len();
    let dt = horizon / steps as f64;
    let apply = |u: &[f64]| -> Vec<f64> {
        (0..n)
            .map(|i| {
                let mut v = diag[i] * u[i];
                if i > 0 {
                    v += lower[i] * u[i - 1];
                }
                if i + 1 < n {
                    v += upper[i] * u[i + 1];
                }
                v
            })
            .collect()
    };
    let mut u = vec![0.0; n];
    let mut out = vec![u.clone()];
    for m in 1..=steps {
        let (t0, t1) = ((m - 1) as f64 * dt, m as f64 * dt);
        let au = apply(&u);
        let (b0, b1) = (b(t0), b(t1));
        let rhs: Vec<f64> = (0..n).map(|i| u[i] - 0.5 * dt * au[i] + 0.5 * dt * (b0[i] + b1[i])).collect();
        let lo: Vec<f64> = lower.iter().map(|x| 0.5 * dt * x).collect();
        let up: Vec<f64> = upper.iter().map(|x| 0.5 * dt * x).collect();
        let di: Vec<f64> = diag.iter().map(|x| 1.0 + 0.5 * dt * x).collect();
        u = thomas(&lo, &di, &up, &rhs);
        out.push(u.clone());
    }
    out
}

pub fn thomas(lower: &[f64], diag: &[f64], upper: &[f64], rhs: &[f64]) -> Vec<f64> {
    let n = diag.len();
    let mut cp = vec![0.0; n];
    let mut dp = vec![0.0; n];
    cp[0] = upper[0] / diag[0];
    dp[0] = rhs[0] / diag[0];
    for i in 1..n {
        let m = diag[i] - lower[i] * cp[i - 1];
        cp[i] = upper[i] / m;
        dp[i] = (rhs[i] - lower[i] * dp[i - 1]) / m;
    }
    let mut x = vec![0.0; n];
    x[n - 1] = dp[n - 1];
    for i in (0..n - 1).rev() {
        x[i] = dp[i] - cp[i] * x[i + 1];
    }
    x
}

/// Classical heat equation `u_t = u_xx − c u` on (0, 1) with `nodes` grid
/// nodes, Dirichlet values `(left(t), right(t))`; returns all nodes per step.
pub fn heat_dirichlet(
    nodes: usize,
    c: f64,
    left: impl Fn(f64) -> f64,
    right: impl Fn(f64) -> f64,
    horizon: f64,
    steps: usize,
) -> Vec<Vec<f64>> {
    let n = nodes - 2;
    let h = 1.0 / (nodes - 1) as f64;
    let k = 1.0 / (h * h);
    let lower = vec![-k; n];
    let upper = vec![-k; n];
    let diag = vec![2.0 * k + c; n];
    let inner = crank_nicolson(
        &lower,
        &diag,
        &upper,
        |t| {
            let mut b = vec![0.0; n];
            b[0] += k * left(t);
            b[n - 1] += k * right(t);
            b
        },
        horizon,
        steps,
    );
    let dt = horizon / steps as f64;
    inner
        .into_iter()
        .enumerate()
        .map(|(m, u)| {
            let t = m as f64 * dt;
            let mut v = vec![left(t)];
            v.extend(u);
            v.push(right(t));
            v
        })
        .collect()
}

/// Classical heat equation with outward fluxes `(left(t), right(t))`, by
/// ghost-point elimination.
pub fn heat_neumann(
    nodes: usize,
    c: f64,
    left: impl Fn(f64) -> f64,
    right: impl Fn(f64) -> f64,
    horizon: f64,
    steps: usize,
) -> Vec<Vec<f64>> {
    let n = nodes;
    let h = 1.0 / (n - 1) as f64;
    let k = 1.0 / (h * h);
    let mut lower = vec![-k; n];
    let mut upper = vec![-k; n];
    let diag = vec![2.0 * k + c; n];
    upper[0] = -2.0 * k;
    lower[n - 1] = -2.0 * k;
    crank_nicolson(
        &lower,
        &diag,
        &upper,
        |t| {
            let mut b = vec![0.0; n];
            b[0] += 2.0 * left(t) / h;
            b[n - 1] += 2.0 * right(t) / h;
            b
        },
        horizon,
        steps,
    )
}

/// Relative discrete L² distance of two node-by-time tables.
pub fn relative_l2(a: &[Vec<f64>], b: &[Vec<f64>]) -> f64 {
    let (mut num, mut den) = (0.0, 0.0);
    for (ra, rb) in a.iter().zip(b) {
        for (x, y) in ra.iter().zip(rb) {
            num += (x - y) * (x - y);
            den += y * y;
        }
    }
    (num / den).sqrt()
}
