//! Restarted Lanczos iteration for the largest eigenpair of a symmetric
//! operator given only through matrix-vector products.
//!
//! The basis is kept fully orthogonal (classical Gram–Schmidt applied twice)
//! and the projected matrix is formed from stored products, so a restart
//! simply keeps the leading Ritz vectors.

use nalgebra::{DMatrix, SymmetricEigen};

/// Steps without halving the best Ritz residual before the run is abandoned.
const STAGNATION_LIMIT: usize = 200;

pub(crate) struct LanczosConfig {
    pub max_matvecs: usize,
    pub max_basis: usize,
    pub keep: usize,
}

pub(crate) struct Converged {
    pub theta: f64,
    pub vector: Vec<f64>,
    pub matvecs: usize,
}

pub(crate) struct Failed {
    pub matvecs: usize,
    pub best: f64,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

/// Orthogonalize `w` against `basis` twice; returns the remaining norm ratio.
fn orthogonalize(basis: &[Vec<f64>], w: &mut [f64]) -> f64 {
    let before = norm(w);
    for _ in 0..2 {
        let coeffs: Vec<f64> = basis.iter().map(|v| dot(v, w)).collect();
        for (v, c) in basis.iter().zip(coeffs) {
            axpy(-c, v, w);
        }
    }
    if before == 0.0 {
        0.0
    } else {
        norm(w) / before
    }
}

/// Deterministic vector used when the Krylov space becomes invariant.
fn fallback_vector(n: usize, salt: usize) -> Vec<f64> {
    (0..n)
        .map(|i| {
            let k = (i as f64 + 1.0) * (salt as f64 + 1.618_033_988_75);
            (k * 12.9898).sin() + 0.5 * (k * 78.233).cos()
        })
        .collect()
}

/// Largest algebraic eigenpair of the operator `apply`.
///
/// `accept(θ, x)` is consulted whenever the Ritz residual
/// `‖C x − θ x‖` falls below `ritz_tol·|θ|`; it returns the caller's own
/// residual measure, and the run stops once that is `Ok`. On rejection the
/// Ritz tolerance is tightened and the iteration continues.
pub(crate) fn largest_eigenpair(
    n: usize,
    mut apply: impl FnMut(&[f64], &mut [f64]),
    start: &[f64],
    config: &LanczosConfig,
    mut ritz_tol: f64,
    mut accept: impl FnMut(f64, &[f64]) -> Result<f64, f64>,
) -> Result<Converged, Failed> {
    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(config.max_basis);
    let mut images: Vec<Vec<f64>> = Vec::with_capacity(config.max_basis);
    let mut matvecs = 0;
    let mut best = f64::INFINITY;
    let mut salt = 0;
    // give up once the Ritz residual stops improving
    let mut best_ritz = f64::INFINITY;
    let mut since_improvement = 0;

    let mut next = start.to_vec();
    if norm(&next) == 0.0 || !norm(&next).is_finite() {
        next = fallback_vector(n, salt);
    }
    loop {
        // expand the basis with `next`
        let ratio = orthogonalize(&basis, &mut next);
        if ratio < 1e-10 || basis.len() >= n {
            if basis.len() >= n {
                // full space spanned; the Ritz pair below is exact
            } else {
                salt += 1;
                next = fallback_vector(n, salt);
                orthogonalize(&basis, &mut next);
            }
        }
        if basis.len() < n {
            let nn = norm(&next);
            next.iter_mut().for_each(|v| *v /= nn);
            let mut w = vec![0.0; n];
            apply(&next, &mut w);
            matvecs += 1;
            basis.push(std::mem::take(&mut next));
            images.push(w);
        }

        // Rayleigh–Ritz on the current basis
        let k = basis.len();
        let h = DMatrix::from_fn(k, k, |i, j| {
            0.5 * (dot(&basis[i], &images[j]) + dot(&basis[j], &images[i]))
        });
        let eig = SymmetricEigen::new(h);
        let mut order: Vec<usize> = (0..k).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
        let top = order[0];
        let theta = eig.eigenvalues[top];
        let y = eig.eigenvectors.column(top);
        let mut x = vec![0.0; n];
        let mut cx = vec![0.0; n];
        for j in 0..k {
            axpy(y[j], &basis[j], &mut x);
            axpy(y[j], &images[j], &mut cx);
        }
        let mut r = cx;
        axpy(-theta, &x, &mut r);
        let ritz_residual = norm(&r);
        if ritz_residual < 0.5 * best_ritz {
            best_ritz = ritz_residual;
            since_improvement = 0;
        } else {
            since_improvement += 1;
        }

        let exhausted = k >= n;
        if ritz_residual <= ritz_tol * theta.abs().max(f64::MIN_POSITIVE) || exhausted {
            match accept(theta, &x) {
                Ok(_) => {
                    return Ok(Converged {
                        theta,
                        vector: x,
                        matvecs,
                    })
                }
                Err(res) => {
                    best = best.min(res);
                    ritz_tol = (ritz_tol * 0.1).max(1e-16);
                    if exhausted || ritz_residual == 0.0 {
                        return Err(Failed { matvecs, best });
                    }
                }
            }
        }
        if matvecs >= config.max_matvecs || since_improvement > STAGNATION_LIMIT {
            best = best.min(accept(theta, &x).err().unwrap_or(0.0));
            return Err(Failed { matvecs, best });
        }

        if k >= config.max_basis {
            // thick restart: keep the leading Ritz vectors
            let keep = config.keep.min(k - 1).max(1);
            let mut new_basis = Vec::with_capacity(config.max_basis);
            let mut new_images = Vec::with_capacity(config.max_basis);
            for &col in order.iter().take(keep) {
                let y = eig.eigenvectors.column(col);
                let mut v = vec![0.0; n];
                let mut w = vec![0.0; n];
                for j in 0..k {
                    axpy(y[j], &basis[j], &mut v);
                    axpy(y[j], &images[j], &mut w);
                }
                new_basis.push(v);
                new_images.push(w);
            }
            basis = new_basis;
            images = new_images;
        }
        next = r;
    }
}
