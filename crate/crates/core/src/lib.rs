//! Discrete integral fractional Laplacian with exterior Dirichlet condition,
//! principal eigenvalues of the indefinite-weight problem `(-Δ)^s u = λ ρ u`,
//! and optimization of the first eigenvalue over a rearrangement class.
//!
//! The pieces are layered bottom-up:
//!
//! * [`grid`] builds uniform-cell domains (intervals, rectangles, disks).
//! * [`nonlocal_form`] assembles the dense stiffness matrix of the discrete
//!   `H^s_0` inner product.
//! * [`rearrangement`] is the exact rearrangement calculus on equal cells.
//! * [`eigensolver`] solves the weighted pencil `A u = λ B_ρ u`.
//! * [`optimizer`] minimizes `λ₁` over a rearrangement class and maximizes it
//!   over the closed convex hull.

pub mod eigensolver;
pub mod error;
pub mod grid;
mod lanczos;
pub mod nonlocal_form;
pub mod optimizer;
mod quadrature;
pub mod rearrangement;

pub use eigensolver::{
    dense_spectrum, gateaux_differential, rayleigh_quotient, solve_lambda_neg1, solve_mu1,
    solve_mu1_with, EigenResult, Eigenpair, NegativeEigenResult, SolverOptions, Spectrum,
};
pub use error::{Error, Result};
pub use grid::{CellFunction, DomainShape, Grid, SteinerAxis};
pub use nonlocal_form::{assemble, KernelParams, MatrixDump, StiffnessOperator};
pub use optimizer::{
    canonical_layout, check_upper_bound, maximize_lambda1_fw, maximize_lambda_neg1, MultistartOutcome, NegativeOptimum,
    minimize_lambda1, minimize_lambda1_from, minimize_lambda1_multistart, steiner_report,
    verify_characterization, OptimizerOutcome, OptimizerStatus, OptimizerTrace, SteinerReport,
    TraceRecord, UpperBound,
};
pub use rearrangement::{
    decreasing_rearrangement, distribution_function, equimeasurable, linear_maximize,
    linear_minimize, majorizes, steiner_symmetrize, symmetry_error, StepFunction, WeightClass,
};
