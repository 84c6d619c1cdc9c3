//! Optimization of the first eigenvalue over a rearrangement class.
//!
//! Minimization of `λ₁` (maximization of `μ̃₁`) uses the ascent
//! `ρ^{k+1} = linear_maximize(class, u_k²)`: by convexity of `μ̃₁` and the
//! derivative formula, `μ̃₁(ρ^{k+1}) ≥ μ̃₁(ρ^k) + Σ(ρ^{k+1} − ρ^k) u_k² m ≥ μ̃₁(ρ^k)`.
//! Since `u_k > 0`, maximizing against `u_k²` and against `u_k` coincide.
//!
//! Maximization of `λ₁` runs Frank–Wolfe on the convex hull of the class.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::eigensolver::{solve_mu1_with, EigenResult, NegativeEigenResult, SolverOptions};
use crate::error::{Error, Result};
use crate::grid::{CellFunction, DomainShape, Grid};
use crate::nonlocal_form::StiffnessOperator;
use crate::rearrangement::{linear_maximize, linear_minimize, majorizes, symmetry_error, WeightClass};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OptimizerStatus {
    /// Two consecutive weight iterates agree cellwise.
    FixedPoint,
    /// `μ̃₁` rose by less than the tolerance without reaching a fixed point.
    Stalled,
    /// Frank–Wolfe duality gap fell below the tolerance.
    Converged,
    IterationCap,
    /// The class has a single value, so there is nothing to optimize.
    DegenerateClass,
}

impl OptimizerStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::FixedPoint => "fixed-point",
            Self::Stalled => "stalled",
            Self::Converged => "converged",
            Self::IterationCap => "iteration-cap",
            Self::DegenerateClass => "degenerate-class",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TraceRecord {
    pub iteration: usize,
    pub mu1: f64,
    pub lambda1: Option<f64>,
    /// `Σ ρ^k_i u_{k−1,i}² m`; for the first record, `Σ ρ⁰ u₀² m`.
    pub lin_obj: f64,
    pub cells_changed: usize,
    pub rho_sym_err: Option<f64>,
    pub u_sym_err: Option<f64>,
    /// Frank–Wolfe duality gap at this iterate.
    pub gap: Option<f64>,
    /// Frank–Wolfe: whether the iterate is majorized by the class.
    pub majorized: Option<bool>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct OptimizerTrace {
    pub records: Vec<TraceRecord>,
    pub status: OptimizerStatus,
}

impl OptimizerTrace {
    /// Whether `μ̃₁` never drops by more than `slack` between records.
    pub fn is_monotone(&self, slack: f64) -> bool {
        self.records.windows(2).all(|w| w[1].mu1 >= w[0].mu1 - slack)
    }

    pub fn final_gap(&self) -> Option<f64> {
        self.records.last().and_then(|r| r.gap)
    }
}

#[derive(Clone, Debug)]
pub struct OptimizerOutcome {
    pub weight: CellFunction,
    pub eigen: EigenResult,
    pub trace: OptimizerTrace,
}

/// Result of the multi-start driver.
#[derive(Clone, Debug)]
pub struct MultistartOutcome {
    /// Best run; ties go to the earliest restart.
    pub best: OptimizerOutcome,
    pub runs: Vec<OptimizerOutcome>,
    /// Distinct final weights whose `μ̃₁` matches the best to 1e-10 relative.
    pub equal_optima: Vec<CellFunction>,
}

/// Maximizer of `λ₋₁` over the class with its eigen data.
#[derive(Clone, Debug)]
pub struct NegativeOptimum {
    pub weight: CellFunction,
    pub lambda_neg1: f64,
    pub eigen: NegativeEigenResult,
    pub trace: OptimizerTrace,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct UpperBound {
    pub bound: f64,
    pub lambda1: f64,
    pub satisfied: bool,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SteinerReport {
    pub rho_sym_err: f64,
    pub u_sym_err: f64,
    /// Disk grids only: `max (ρ_j − ρ_i)₊` over cells with `|x_i| < |x_j|`.
    pub radial_defect: Option<f64>,
}

fn eigen_options(tol: f64, warm: Option<&EigenResult>) -> SolverOptions {
    SolverOptions {
        tol: tol.min(1e-10),
        max_iter: 10_000,
        warm_start: warm.filter(|r| !r.is_zero()).map(|r| r.eigenfunction.clone()),
    }
}

fn check_class(op: &StiffnessOperator, class: &WeightClass) -> Result<()> {
    if class.total_cells() != op.size() {
        return Err(Error::GridMismatch {
            expected: op.size(),
            got: class.total_cells(),
        });
    }
    Ok(())
}

fn weighted_square(rho: &CellFunction, u: &CellFunction) -> f64 {
    rho.values()
        .iter()
        .zip(u.values())
        .map(|(r, x)| r * x * x)
        .sum::<f64>()
        * rho.cell_measure()
}

fn squared(u: &CellFunction) -> CellFunction {
    u.map(|x| x * x)
}

fn sym_err(grid: &Grid, f: &CellFunction) -> Option<f64> {
    grid.steiner_axis().and_then(|_| symmetry_error(grid, f).ok())
}

/// Class values laid out in decreasing order by distance of the cell center
/// from the centroid of the active cells; ties go to the lower index.
pub fn canonical_layout(grid: &Grid, class: &WeightClass) -> Result<CellFunction> {
    let n = grid.active_count();
    if class.total_cells() != n {
        return Err(Error::GridMismatch {
            expected: n,
            got: class.total_cells(),
        });
    }
    // exact integer distances: n · offset − Σ offsets, in half-cell units
    let offsets: Vec<[i64; 2]> = (0..n).map(|i| grid.half_cell_offset(i)).collect();
    let sum = offsets
        .iter()
        .fold([0i128; 2], |acc, o| [acc[0] + o[0] as i128, acc[1] + o[1] as i128]);
    let key = |o: &[i64; 2]| {
        let dx = n as i128 * o[0] as i128 - sum[0];
        let dy = n as i128 * o[1] as i128 - sum[1];
        dx * dx + dy * dy
    };
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&i| (key(&offsets[i]), i));
    let values = class.values_desc();
    let mut rho = vec![0.0; n];
    for (rank, cell) in order.into_iter().enumerate() {
        rho[cell] = values[rank];
    }
    CellFunction::on(grid, rho)
}

/// Minimize `λ₁` over the class starting from the canonical layout.
pub fn minimize_lambda1(
    op: &StiffnessOperator,
    class: &WeightClass,
    tol: f64,
    max_iter: usize,
) -> Result<OptimizerOutcome> {
    check_class(op, class)?;
    let start = canonical_layout(op.grid(), class)?;
    minimize_lambda1_from(op, class, start, tol, max_iter)
}

/// Minimize `λ₁` over the class from a given element of the class.
pub fn minimize_lambda1_from(
    op: &StiffnessOperator,
    class: &WeightClass,
    start: CellFunction,
    tol: f64,
    max_iter: usize,
) -> Result<OptimizerOutcome> {
    check_class(op, class)?;
    if !class.has_positive() {
        return Err(Error::Infeasible(
            "the class has no positive value, so there is no positive eigenvalue".into(),
        ));
    }
    if !class.contains(&start) {
        return Err(Error::InvalidArgument("start weight is not in the class".into()));
    }
    let grid = op.grid();
    let mut rho = start;
    let mut eig = solve_mu1_with(op, &rho, &eigen_options(tol, None))?;
    let mut records = vec![TraceRecord {
        iteration: 0,
        mu1: eig.mu1_tilde,
        lambda1: eig.lambda1,
        lin_obj: weighted_square(&rho, &eig.eigenfunction),
        cells_changed: 0,
        rho_sym_err: sym_err(grid, &rho),
        u_sym_err: sym_err(grid, &eig.eigenfunction),
        gap: None,
        majorized: None,
    }];
    if class.is_constant() {
        return Ok(OptimizerOutcome {
            weight: rho,
            eigen: eig,
            trace: OptimizerTrace {
                records,
                status: OptimizerStatus::DegenerateClass,
            },
        });
    }

    let mut status = OptimizerStatus::IterationCap;
    for k in 1..=max_iter {
        let next = linear_maximize(class, &squared(&eig.eigenfunction))?;
        let changed = next
            .values()
            .iter()
            .zip(rho.values())
            .filter(|(a, b)| a != b)
            .count();
        if changed == 0 {
            status = OptimizerStatus::FixedPoint;
            break;
        }
        let next_eig = solve_mu1_with(op, &next, &eigen_options(tol, Some(&eig)))?;
        records.push(TraceRecord {
            iteration: k,
            mu1: next_eig.mu1_tilde,
            lambda1: next_eig.lambda1,
            lin_obj: weighted_square(&next, &eig.eigenfunction),
            cells_changed: changed,
            rho_sym_err: sym_err(grid, &next),
            u_sym_err: sym_err(grid, &next_eig.eigenfunction),
            gap: None,
            majorized: None,
        });
        let increase = next_eig.mu1_tilde - eig.mu1_tilde;
        rho = next;
        eig = next_eig;
        if increase < tol {
            let again = linear_maximize(class, &squared(&eig.eigenfunction))?;
            status = if again == rho {
                OptimizerStatus::FixedPoint
            } else {
                OptimizerStatus::Stalled
            };
            break;
        }
    }
    Ok(OptimizerOutcome {
        weight: rho,
        eigen: eig,
        trace: OptimizerTrace { records, status },
    })
}

/// Restart 0 uses the canonical layout; restart `r ≥ 1` a random permutation
/// drawn from the ChaCha stream `r` of `seed`. Runs execute in parallel and
/// the selection is deterministic.
pub fn minimize_lambda1_multistart(
    op: &StiffnessOperator,
    class: &WeightClass,
    tol: f64,
    max_iter: usize,
    restarts: usize,
    seed: u64,
) -> Result<MultistartOutcome> {
    check_class(op, class)?;
    let restarts = restarts.max(1);
    let canonical = canonical_layout(op.grid(), class)?;
    let runs: Vec<OptimizerOutcome> = (0..restarts)
        .into_par_iter()
        .map(|r| {
            let start = if r == 0 {
                canonical.clone()
            } else {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                rng.set_stream(r as u64);
                let mut values = class.values_desc();
                values.shuffle(&mut rng);
                CellFunction::new(values, class.cell_measure())
            };
            minimize_lambda1_from(op, class, start, tol, max_iter)
        })
        .collect::<Result<_>>()?;
    let mut best = 0;
    for (i, run) in runs.iter().enumerate() {
        if run.eigen.mu1_tilde > runs[best].eigen.mu1_tilde * (1.0 + 1e-12) {
            best = i;
        }
    }
    let top = runs[best].eigen.mu1_tilde;
    let mut equal_optima: Vec<CellFunction> = Vec::new();
    for run in &runs {
        if (run.eigen.mu1_tilde - top).abs() <= 1e-10 * top && !equal_optima.contains(&run.weight) {
            equal_optima.push(run.weight.clone());
        }
    }
    Ok(MultistartOutcome {
        best: runs[best].clone(),
        runs,
        equal_optima,
    })
}

/// Maximize `λ₋₁ = −λ₁(−ρ)` over the class by minimizing `λ₁` over the
/// negated class.
pub fn maximize_lambda_neg1(
    op: &StiffnessOperator,
    class: &WeightClass,
    tol: f64,
    max_iter: usize,
) -> Result<NegativeOptimum> {
    let negated = class.negated();
    if !negated.has_positive() {
        return Err(Error::Infeasible(
            "the class has no negative value, so there is no negative eigenvalue".into(),
        ));
    }
    let out = minimize_lambda1(op, &negated, tol, max_iter)?;
    let lambda = out.eigen.lambda1.expect("positive part present");
    Ok(NegativeOptimum {
        weight: out.weight.scaled(-1.0),
        lambda_neg1: -lambda,
        eigen: NegativeEigenResult {
            mu_neg1: -out.eigen.mu1_tilde,
            lambda_neg1: Some(-lambda),
            eigenfunction: out.eigen.eigenfunction,
            residual: out.eigen.residual,
            iterations: out.eigen.iterations,
        },
        trace: out.trace,
    })
}

/// Frank–Wolfe minimization of the convex map `μ̃₁` over the convex hull of
/// the class, i.e. maximization of `λ₁`. Stops when the duality gap
/// `Σ(ρ_k − σ_k) u_k² m` is at most `tol`.
pub fn maximize_lambda1_fw(
    op: &StiffnessOperator,
    class: &WeightClass,
    tol: f64,
    max_iter: usize,
) -> Result<OptimizerOutcome> {
    check_class(op, class)?;
    if !(class.mass() > 0.0) {
        return Err(Error::Unbounded(
            "class mass is not positive, so the supremum of the first eigenvalue is infinite"
                .into(),
        ));
    }
    let grid = op.grid();
    let reference = CellFunction::new(class.values_desc(), class.cell_measure());
    let mut rho = canonical_layout(grid, class)?;
    let mut records = Vec::new();
    let mut prev: Option<EigenResult> = None;
    let mut prev_rho: Option<CellFunction> = None;
    let mut status = OptimizerStatus::IterationCap;
    for k in 0..=max_iter {
        let eig = solve_mu1_with(op, &rho, &eigen_options(tol, prev.as_ref()))?;
        let w = squared(&eig.eigenfunction);
        let sigma = linear_minimize(class, &w)?;
        let gap = rho
            .combine(1.0, &sigma, -1.0)?
            .values()
            .iter()
            .zip(w.values())
            .map(|(d, x)| d * x)
            .sum::<f64>()
            * rho.cell_measure();
        let lin_obj = match &prev {
            Some(p) => weighted_square(&rho, &p.eigenfunction),
            None => weighted_square(&rho, &eig.eigenfunction),
        };
        let changed = prev_rho
            .as_ref()
            .map(|p| p.values().iter().zip(rho.values()).filter(|(a, b)| a != b).count())
            .unwrap_or(0);
        records.push(TraceRecord {
            iteration: k,
            mu1: eig.mu1_tilde,
            lambda1: eig.lambda1,
            lin_obj,
            cells_changed: changed,
            rho_sym_err: sym_err(grid, &rho),
            u_sym_err: sym_err(grid, &eig.eigenfunction),
            gap: Some(gap),
            majorized: Some(majorizes(&reference, &rho)?),
        });
        if class.is_constant() || gap <= tol {
            status = OptimizerStatus::Converged;
            prev = Some(eig);
            break;
        }
        if k == max_iter {
            prev = Some(eig);
            break;
        }
        let gamma = 2.0 / (k as f64 + 2.0);
        let next = rho.combine(1.0 - gamma, &sigma, gamma)?;
        prev_rho = Some(std::mem::replace(&mut rho, next));
        prev = Some(eig);
    }
    Ok(OptimizerOutcome {
        weight: rho,
        eigen: prev.expect("at least one iterate"),
        trace: OptimizerTrace { records, status },
    })
}

/// `λ₁(ρ̌) ≤ λ₁(1)·|Ω| / ∫ρ₀`; requires positive class mass.
pub fn check_upper_bound(
    op: &StiffnessOperator,
    class: &WeightClass,
    result: &EigenResult,
) -> Result<UpperBound> {
    check_class(op, class)?;
    let mass = class.mass();
    if !(mass > 0.0) {
        return Err(Error::NotApplicable(format!(
            "the bound needs positive class mass, got {mass}"
        )));
    }
    let lambda = result
        .lambda1
        .ok_or_else(|| Error::NotApplicable("result has no positive eigenvalue".into()))?;
    let unit = CellFunction::constant(op.grid(), 1.0);
    let lambda_unit = solve_mu1_with(op, &unit, &SolverOptions::default())?
        .lambda1
        .expect("unit weight has a positive eigenvalue");
    let bound = lambda_unit * op.grid().measure() / mass;
    Ok(UpperBound {
        bound,
        lambda1: lambda,
        satisfied: lambda <= bound + 1e-9,
    })
}

/// Whether `ρ` is an increasing function of `u` up to ties: no pair with
/// `u_i < u_j` and `ρ_i > ρ_j`.
pub fn verify_characterization(rho: &CellFunction, u: &CellFunction) -> Result<bool> {
    rho.same_shape(u)?;
    let mut order: Vec<usize> = (0..u.len()).collect();
    order.sort_by(|&a, &b| u.values()[a].total_cmp(&u.values()[b]));
    let mut below_max = f64::NEG_INFINITY;
    let mut k = 0;
    while k < order.len() {
        let level = u.values()[order[k]];
        let mut end = k;
        let mut group_min = f64::INFINITY;
        let mut group_max = f64::NEG_INFINITY;
        while end < order.len() && u.values()[order[end]] == level {
            let r = rho.values()[order[end]];
            group_min = group_min.min(r);
            group_max = group_max.max(r);
            end += 1;
        }
        if group_min < below_max {
            return Ok(false);
        }
        below_max = below_max.max(group_max);
        k = end;
    }
    Ok(true)
}

/// Symmetry errors of `ρ` and `u`, and on disks the radial-monotonicity
/// defect of `ρ`.
pub fn steiner_report(grid: &Grid, rho: &CellFunction, u: &CellFunction) -> Result<SteinerReport> {
    grid.steiner_axis().ok_or(Error::NoSteinerAxis)?;
    let rho_sym_err = symmetry_error(grid, rho)?;
    let u_sym_err = symmetry_error(grid, u)?;
    let radial_defect = (grid.shape() == DomainShape::Disk).then(|| radial_defect(grid, rho));
    Ok(SteinerReport {
        rho_sym_err,
        u_sym_err,
        radial_defect,
    })
}

fn radial_defect(grid: &Grid, rho: &CellFunction) -> f64 {
    let radius_key = |i: usize| {
        let [x, y] = grid.half_cell_offset(i);
        x * x + y * y
    };
    let mut order: Vec<usize> = (0..rho.len()).collect();
    order.sort_by_key(|&i| radius_key(i));
    let mut defect: f64 = 0.0;
    let mut inner_min = f64::INFINITY;
    let mut k = 0;
    while k < order.len() {
        let key = radius_key(order[k]);
        let mut end = k;
        let mut shell_min = f64::INFINITY;
        while end < order.len() && radius_key(order[end]) == key {
            let r = rho.values()[order[end]];
            defect = defect.max(r - inner_min);
            shell_min = shell_min.min(r);
            end += 1;
        }
        inner_min = inner_min.min(shell_min);
        k = end;
    }
    defect.max(0.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nonlocal_form::{assemble, KernelParams};

    fn op_interval(n: usize, s: f64) -> StiffnessOperator {
        let grid = Grid::interval(-1.0, 1.0, n).unwrap();
        assemble(&grid, KernelParams::new(s, 1).unwrap()).unwrap()
    }

    #[test]
    fn canonical_layout_is_centered() {
        let grid = Grid::interval(-1.0, 1.0, 8).unwrap();
        let class = WeightClass::from_counts(&[(1.0, 2), (-1.0, 6)], grid.cell_measure()).unwrap();
        let rho = canonical_layout(&grid, &class).unwrap();
        assert_eq!(rho.values(), &[-1.0, -1.0, -1.0, 1.0, 1.0, -1.0, -1.0, -1.0]);
        let odd = WeightClass::from_counts(&[(1.0, 3), (-1.0, 5)], grid.cell_measure()).unwrap();
        let rho = canonical_layout(&grid, &odd).unwrap();
        assert_eq!(rho.values(), &[-1.0, -1.0, 1.0, 1.0, 1.0, -1.0, -1.0, -1.0]);
    }

    #[test]
    fn constant_class_is_degenerate() {
        let op = op_interval(32, 0.5);
        let class = WeightClass::from_counts(&[(2.5, 32)], op.grid().cell_measure()).unwrap();
        let out = minimize_lambda1(&op, &class, 1e-10, 100).unwrap();
        assert_eq!(out.trace.status, OptimizerStatus::DegenerateClass);
        assert!(out.weight.values().iter().all(|&v| v == 2.5));
        let unit = solve_mu1_with(&op, &CellFunction::constant(op.grid(), 1.0), &SolverOptions::default())
            .unwrap();
        let l = out.eigen.lambda1.unwrap();
        assert!((unit.lambda1.unwrap() - 2.5 * l).abs() < 1e-10 * l);
    }

    #[test]
    fn infeasible_and_unbounded_classes() {
        let op = op_interval(8, 0.5);
        let m = op.grid().cell_measure();
        let neg = WeightClass::from_counts(&[(-1.0, 4), (0.0, 4)], m).unwrap();
        assert!(matches!(minimize_lambda1(&op, &neg, 1e-10, 10), Err(Error::Infeasible(_))));
        let zero_mass = WeightClass::from_counts(&[(1.0, 4), (-1.0, 4)], m).unwrap();
        assert!(matches!(
            maximize_lambda1_fw(&op, &zero_mass, 1e-6, 10),
            Err(Error::Unbounded(_))
        ));
        let r = solve_mu1_with(&op, &CellFunction::constant(op.grid(), 1.0), &SolverOptions::default())
            .unwrap();
        assert!(matches!(check_upper_bound(&op, &zero_mass, &r), Err(Error::NotApplicable(_))));
        let pos = WeightClass::from_counts(&[(1.0, 8)], m).unwrap();
        assert!(matches!(maximize_lambda_neg1(&op, &pos, 1e-10, 10), Err(Error::Infeasible(_))));
    }

    #[test]
    fn minimization_trace_is_monotone_and_characterized() {
        let op = op_interval(64, 0.5);
        let grid = op.grid().clone();
        let class = WeightClass::from_spec("w:1@0.25,-1@0.75", &grid).unwrap();
        let mut values = class.values_desc();
        values.rotate_left(5);
        let start = CellFunction::on(&grid, values).unwrap();
        let out = minimize_lambda1_from(&op, &class, start, 1e-10, 500).unwrap();
        assert!(out.trace.is_monotone(1e-12));
        assert_eq!(out.trace.status, OptimizerStatus::FixedPoint);
        assert!(verify_characterization(&out.weight, &out.eigen.eigenfunction).unwrap());
        assert!(class.contains(&out.weight));
    }

    #[test]
    fn characterization_examples() {
        let u = CellFunction::new(vec![0.1, 0.5, 0.3, 0.3], 1.0);
        assert!(verify_characterization(&u, &u).unwrap());
        assert!(!verify_characterization(&u.scaled(-1.0), &u).unwrap());
        // ties in u tolerate any order
        let rho = CellFunction::new(vec![-2.0, 2.0, 1.0, -1.0], 1.0);
        assert!(verify_characterization(&rho, &u).unwrap());
        let bad = CellFunction::new(vec![3.0, 2.0, 1.0, -1.0], 1.0);
        assert!(!verify_characterization(&bad, &u).unwrap());
    }

    #[test]
    fn steiner_report_detects_shift() {
        let op = op_interval(16, 0.5);
        let grid = op.grid().clone();
        let class = WeightClass::from_spec("w:1@0.25,-1@0.75", &grid).unwrap();
        let out = minimize_lambda1(&op, &class, 1e-10, 100).unwrap();
        let rep = steiner_report(&grid, &out.weight, &out.eigen.eigenfunction).unwrap();
        assert_eq!(rep.rho_sym_err, 0.0);
        assert!(rep.radial_defect.is_none());
        let mut shifted = out.weight.values().to_vec();
        shifted.rotate_left(2);
        let shifted = CellFunction::on(&grid, shifted).unwrap();
        let rep = steiner_report(&grid, &shifted, &out.eigen.eigenfunction).unwrap();
        assert!(rep.rho_sym_err > 0.0);
    }

    #[test]
    fn radial_defect_on_disk() {
        let grid = Grid::disk(1.0, 8).unwrap();
        let class = WeightClass::from_spec("w:1@0.25,-1@0.75", &grid).unwrap();
        let rho = canonical_layout(&grid, &class).unwrap();
        assert_eq!(radial_defect(&grid, &rho), 0.0);
        let inverted = rho.scaled(-1.0);
        assert_eq!(radial_defect(&grid, &inverted), 2.0);
    }

    #[test]
    fn frank_wolfe_constant_class() {
        let op = op_interval(16, 0.5);
        let class = WeightClass::from_counts(&[(1.5, 16)], op.grid().cell_measure()).unwrap();
        let out = maximize_lambda1_fw(&op, &class, 1e-8, 100).unwrap();
        assert_eq!(out.trace.status, OptimizerStatus::Converged);
        assert_eq!(out.trace.final_gap(), Some(0.0));
        assert_eq!(out.trace.records.len(), 1);
    }

    #[test]
    fn multistart_is_deterministic() {
        let op = op_interval(16, 0.5);
        let class = WeightClass::from_spec("w:1@0.25,-1@0.75", op.grid()).unwrap();
        let a = minimize_lambda1_multistart(&op, &class, 1e-10, 200, 4, 42).unwrap();
        let b = minimize_lambda1_multistart(&op, &class, 1e-10, 200, 4, 42).unwrap();
        assert_eq!(a.best.weight, b.best.weight);
        assert_eq!(a.runs.len(), 4);
        assert!(!a.equal_optima.is_empty());
        for run in &a.runs {
            assert!(run.eigen.mu1_tilde <= a.best.eigen.mu1_tilde * (1.0 + 1e-12));
        }
    }
}
