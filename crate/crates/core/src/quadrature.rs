//! Gauss–Legendre rules and a small adaptive integrator.

use std::f64::consts::PI;

/// Nodes and weights of the `n`-point Gauss–Legendre rule on `[-1, 1]`.
pub(crate) fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut z = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp;
        loop {
            let (mut p1, mut p2) = (1.0, 0.0);
            for j in 1..=n {
                let p3 = p2;
                p2 = p1;
                p1 = ((2 * j - 1) as f64 * z * p2 - (j - 1) as f64 * p3) / j as f64;
            }
            dp = n as f64 * (z * p1 - p2) / (z * z - 1.0);
            let z_old = z;
            z = z_old - p1 / dp;
            if (z - z_old).abs() < 1e-15 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
        w[n - 1 - i] = w[i];
    }
    (x, w)
}

pub(crate) struct Rule {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl Rule {
    pub(crate) fn new(n: usize) -> Self {
        let (nodes, weights) = gauss_legendre(n);
        Self { nodes, weights }
    }

    pub(crate) fn integrate(&self, f: &impl Fn(f64) -> f64, a: f64, b: f64) -> f64 {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&t, &w)| w * f(mid + half * t))
            .sum::<f64>()
            * half
    }

    /// Tensor-product rule over `[x0, x1] × [y0, y1]` split into `sub × sub` panels.
    pub(crate) fn integrate_2d(
        &self,
        f: &impl Fn(f64, f64) -> f64,
        (x0, x1): (f64, f64),
        (y0, y1): (f64, f64),
        sub: usize,
    ) -> f64 {
        let dx = (x1 - x0) / sub as f64;
        let dy = (y1 - y0) / sub as f64;
        let mut total = 0.0;
        for a in 0..sub {
            let xa = x0 + a as f64 * dx;
            for b in 0..sub {
                let yb = y0 + b as f64 * dy;
                let mut panel = 0.0;
                for (&tx, &wx) in self.nodes.iter().zip(&self.weights) {
                    let x = xa + 0.5 * dx * (tx + 1.0);
                    for (&ty, &wy) in self.nodes.iter().zip(&self.weights) {
                        let y = yb + 0.5 * dy * (ty + 1.0);
                        panel += wx * wy * f(x, y);
                    }
                }
                total += panel * 0.25 * dx * dy;
            }
        }
        total
    }

    /// Recursive bisection until the one-panel and two-panel estimates agree.
    pub(crate) fn adaptive(&self, f: &impl Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
        let whole = self.integrate(f, a, b);
        self.refine(f, a, b, whole, tol, 0)
    }

    fn refine(&self, f: &impl Fn(f64) -> f64, a: f64, b: f64, whole: f64, tol: f64, depth: usize) -> f64 {
        let mid = 0.5 * (a + b);
        let left = self.integrate(f, a, mid);
        let right = self.integrate(f, mid, b);
        let split = left + right;
        if depth >= 40 || (split - whole).abs() <= tol.max(1e-15 * split.abs()) {
            return split;
        }
        self.refine(f, a, mid, left, 0.5 * tol, depth + 1)
            + self.refine(f, mid, b, right, 0.5 * tol, depth + 1)
    }
}
