//! Principal eigenpairs of the weighted pencil `A u = λ B_ρ u`, where
//! `B_ρ = diag(ρ_i · m)` and `m` is the cell measure.
//!
//! Since `A` is positive definite, the pencil is equivalent to the symmetric
//! operator `C = L⁻¹ B_ρ L⁻ᵀ` with `A = L Lᵀ`. The eigenvalues `μ` of `C` are
//! the reciprocals of the pencil eigenvalues; `μ̃₁ = max(μ₁, 0)`.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::error::{Error, Result};
use crate::grid::CellFunction;
use crate::lanczos::{largest_eigenpair, LanczosConfig};
use crate::nonlocal_form::StiffnessOperator;

/// Largest problem accepted by [`dense_spectrum`].
pub const DENSE_CAP: usize = 512;

#[derive(Clone, Debug)]
pub struct SolverOptions {
    /// Relative residual bound: `max|B u − μ A u| ≤ tol · max|B u|`.
    pub tol: f64,
    /// Cap on operator applications.
    pub max_iter: usize,
    /// Previous eigenfunction to seed the iteration.
    pub warm_start: Option<CellFunction>,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            tol: 1e-10,
            max_iter: 10_000,
            warm_start: None,
        }
    }
}

impl SolverOptions {
    pub fn with_tol(tol: f64) -> Self {
        Self {
            tol,
            ..Self::default()
        }
    }
}

/// First positive eigenpair. The zero result (`mu1_tilde = 0`, zero
/// eigenfunction) stands for "no positive eigenvalue".
#[derive(Clone, Debug)]
pub struct EigenResult {
    pub mu1_tilde: f64,
    pub lambda1: Option<f64>,
    /// Normalized to `uᵀ A u = 1`, oriented so that its sum is positive.
    pub eigenfunction: CellFunction,
    pub residual: f64,
    pub iterations: usize,
}

impl EigenResult {
    fn zero(cells: usize, cell_measure: f64) -> Self {
        Self {
            mu1_tilde: 0.0,
            lambda1: None,
            eigenfunction: CellFunction::new(vec![0.0; cells], cell_measure),
            residual: 0.0,
            iterations: 0,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.mu1_tilde == 0.0
    }
}

/// First negative eigenpair, `λ₋₁(ρ) = −λ₁(−ρ)`.
#[derive(Clone, Debug)]
pub struct NegativeEigenResult {
    /// `μ₋₁(ρ) = −μ̃₁(−ρ) ≤ 0`.
    pub mu_neg1: f64,
    pub lambda_neg1: Option<f64>,
    /// Eigenfunction of `λ₁(−ρ)`.
    pub eigenfunction: CellFunction,
    pub residual: f64,
    pub iterations: usize,
}

#[derive(Clone, Debug)]
pub struct Eigenpair {
    pub mu: f64,
    pub eigenfunction: CellFunction,
}

impl Eigenpair {
    pub fn lambda(&self) -> f64 {
        1.0 / self.mu
    }
}

/// Nonzero pencil eigenvalues, each sign sorted by decreasing `|μ|`, so the
/// first entries give `λ₁` and `λ₋₁`.
#[derive(Clone, Debug)]
pub struct Spectrum {
    pub positive: Vec<Eigenpair>,
    pub negative: Vec<Eigenpair>,
}

impl Spectrum {
    /// `μ₁ − μ₂` when at least two positive eigenvalues exist.
    pub fn spectral_gap(&self) -> Option<f64> {
        match self.positive.as_slice() {
            [a, b, ..] => Some(a.mu - b.mu),
            _ => None,
        }
    }
}

fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

fn orient(u: &mut [f64]) {
    if u.iter().sum::<f64>() < 0.0 {
        u.iter_mut().for_each(|x| *x = -*x);
    }
}

/// `μ̃₁(ρ)` and its eigenfunction at the default tolerance.
pub fn solve_mu1(op: &StiffnessOperator, rho: &CellFunction, tol: f64) -> Result<EigenResult> {
    solve_mu1_with(op, rho, &SolverOptions::with_tol(tol))
}

pub fn solve_mu1_with(
    op: &StiffnessOperator,
    rho: &CellFunction,
    options: &SolverOptions,
) -> Result<EigenResult> {
    op.grid().check(rho)?;
    if !(options.tol > 0.0) {
        return Err(Error::InvalidArgument("tolerance must be positive".into()));
    }
    let n = op.size();
    let m = rho.cell_measure();
    if rho.values().iter().all(|&r| r <= 0.0) {
        return Ok(EigenResult::zero(n, m));
    }
    let l = op.cholesky_factor()?;
    let a = op.matrix();
    let b: Vec<f64> = rho.values().iter().map(|r| r * m).collect();

    // x ↦ L⁻¹ B L⁻ᵀ x
    let mut buf = DVector::zeros(n);
    let apply = |x: &[f64], y: &mut [f64]| {
        buf.as_mut_slice().copy_from_slice(x);
        l.tr_solve_lower_triangular_mut(&mut buf);
        for (v, bi) in buf.iter_mut().zip(&b) {
            *v *= bi;
        }
        l.solve_lower_triangular_mut(&mut buf);
        y.copy_from_slice(buf.as_slice());
    };

    // L⁻¹ (B ρ₊-part) has positive overlap with the top eigenvector
    let mut safe = DVector::from_iterator(n, b.iter().map(|v| v.max(0.0)));
    l.solve_lower_triangular_mut(&mut safe);
    safe /= safe.norm();
    let start = match &options.warm_start {
        Some(u) if u.len() == n && u.values().iter().any(|v| *v != 0.0) => {
            let mut x = l.tr_mul(&DVector::from_column_slice(u.values()));
            if x.dot(&safe) < 0.0 {
                x = -x;
            }
            x /= x.norm();
            x + safe * 1e-3
        }
        _ => safe,
    };

    let tol = options.tol;
    let residual_of = |mu: f64, x: &[f64]| -> (Vec<f64>, f64) {
        let mut u = DVector::from_column_slice(x);
        l.tr_solve_lower_triangular_mut(&mut u);
        let au = a * &u;
        let bu: Vec<f64> = u.iter().zip(&b).map(|(ui, bi)| ui * bi).collect();
        let diff: Vec<f64> = bu.iter().zip(au.iter()).map(|(p, q)| p - mu * q).collect();
        let scale = max_abs(&bu);
        (u.as_slice().to_vec(), max_abs(&diff) / scale.max(f64::MIN_POSITIVE))
    };
    let accept = |mu: f64, x: &[f64]| {
        let (_, r) = residual_of(mu, x);
        if r <= tol {
            Ok(r)
        } else {
            Err(r)
        }
    };
    let config = LanczosConfig {
        max_matvecs: options.max_iter,
        max_basis: 48,
        keep: 10,
    };
    let found = largest_eigenpair(n, apply, start.as_slice(), &config, tol, accept).map_err(
        |f| Error::NoConvergence {
            iterations: f.matvecs,
            residual: f.best,
        },
    )?;
    let mu = found.theta;
    if mu <= 0.0 {
        return Err(Error::Inconsistent(format!(
            "largest pencil eigenvalue {mu:e} is not positive although the weight has a positive part"
        )));
    }
    let mut x = found.vector;
    let xn = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    x.iter_mut().for_each(|v| *v /= xn);
    let (mut u, residual) = residual_of(mu, &x);
    orient(&mut u);
    Ok(EigenResult {
        mu1_tilde: mu,
        lambda1: Some(1.0 / mu),
        eigenfunction: CellFunction::new(u, m),
        residual,
        iterations: found.matvecs,
    })
}

/// `λ₋₁(ρ) = −λ₁(−ρ)`; the zero result when `ρ ≥ 0` everywhere.
pub fn solve_lambda_neg1(
    op: &StiffnessOperator,
    rho: &CellFunction,
    tol: f64,
) -> Result<NegativeEigenResult> {
    let r = solve_mu1(op, &rho.scaled(-1.0), tol)?;
    Ok(NegativeEigenResult {
        mu_neg1: -r.mu1_tilde,
        lambda_neg1: r.lambda1.map(|l| -l),
        eigenfunction: r.eigenfunction,
        residual: r.residual,
        iterations: r.iterations,
    })
}

/// `‖w‖² / Σ ρ_i w_i² m`, or `None` when the denominator is not positive.
pub fn rayleigh_quotient(
    op: &StiffnessOperator,
    rho: &CellFunction,
    w: &CellFunction,
) -> Result<Option<f64>> {
    op.grid().check(rho)?;
    let num = op.norm_sq(w)?;
    let den: f64 = rho
        .values()
        .iter()
        .zip(w.values())
        .map(|(r, x)| r * x * x)
        .sum::<f64>()
        * rho.cell_measure();
    Ok((den > 0.0).then(|| num / den))
}

/// Directional derivative of `ρ ↦ μ̃₁(ρ)` along `v`: `Σ u_ρ,i² v_i m`.
pub fn gateaux_differential(
    op: &StiffnessOperator,
    rho: &CellFunction,
    v: &CellFunction,
) -> Result<f64> {
    op.grid().check(v)?;
    let r = solve_mu1(op, rho, 1e-10)?;
    if r.is_zero() {
        return Err(Error::NotDifferentiable);
    }
    let u = r.eigenfunction.values();
    Ok(u.iter().zip(v.values()).map(|(ui, vi)| ui * ui * vi).sum::<f64>() * v.cell_measure())
}

/// Full pencil spectrum by dense symmetric eigendecompositions, independent of
/// the Cholesky/Lanczos path: `C' = A^{-1/2} B A^{-1/2}`. Returns at most `k`
/// eigenpairs of each sign.
pub fn dense_spectrum(op: &StiffnessOperator, rho: &CellFunction, k: usize) -> Result<Spectrum> {
    op.grid().check(rho)?;
    let n = op.size();
    if n > DENSE_CAP {
        return Err(Error::SizeCap {
            cells: n,
            cap: DENSE_CAP,
        });
    }
    let m = rho.cell_measure();
    let a = SymmetricEigen::new(op.matrix().clone());
    if a.eigenvalues.iter().any(|&e| e <= 0.0) {
        return Err(Error::Inconsistent("stiffness matrix is not positive definite".into()));
    }
    let q = &a.eigenvectors;
    let d = DMatrix::from_diagonal(&a.eigenvalues.map(|e| e.sqrt().recip()));
    let inv_sqrt = q * d * q.transpose();
    let inv_sqrt = (&inv_sqrt + inv_sqrt.transpose()) * 0.5;
    let b = DMatrix::from_diagonal(&DVector::from_iterator(n, rho.values().iter().map(|r| r * m)));
    let c = &inv_sqrt * b * &inv_sqrt;
    let c = (&c + c.transpose()) * 0.5;
    let eig = SymmetricEigen::new(c);
    let top = max_abs(eig.eigenvalues.as_slice());
    let mut pairs: Vec<Eigenpair> = Vec::new();
    for (j, &mu) in eig.eigenvalues.iter().enumerate() {
        if mu.abs() <= 1e-12 * top || mu == 0.0 {
            continue;
        }
        let u = &inv_sqrt * eig.eigenvectors.column(j);
        let mut u = u.as_slice().to_vec();
        orient(&mut u);
        pairs.push(Eigenpair {
            mu,
            eigenfunction: CellFunction::new(u, m),
        });
    }
    let (mut positive, mut negative): (Vec<_>, Vec<_>) = pairs.into_iter().partition(|p| p.mu > 0.0);
    positive.sort_by(|a, b| b.mu.total_cmp(&a.mu));
    negative.sort_by(|a, b| a.mu.total_cmp(&b.mu));
    positive.truncate(k);
    negative.truncate(k);
    Ok(Spectrum { positive, negative })
}
