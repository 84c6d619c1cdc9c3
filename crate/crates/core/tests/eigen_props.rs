use fracopt::{
    assemble, dense_spectrum, gateaux_differential, rayleigh_quotient, solve_mu1,
    steiner_symmetrize, CellFunction, Grid, KernelParams, StiffnessOperator,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn op(grid: &Grid, s: f64) -> StiffnessOperator {
    assemble(grid, KernelParams::new(s, grid.dim()).unwrap()).unwrap()
}

fn lambda_unit(op: &StiffnessOperator) -> f64 {
    let one = CellFunction::constant(op.grid(), 1.0);
    solve_mu1(op, &one, 1e-10).unwrap().lambda1.unwrap()
}

#[test]
fn interval_self_convergence() {
    for s in [0.25, 0.5, 0.75] {
        let coarse = lambda_unit(&op(&Grid::interval(-1.0, 1.0, 128).unwrap(), s));
        let fine = lambda_unit(&op(&Grid::interval(-1.0, 1.0, 256).unwrap(), s));
        assert!(((coarse - fine) / fine).abs() < 0.01, "s={s}: {coarse} vs {fine}");
    }
}

#[test]
fn unit_interval_half_laplacian_reference() {
    // the form here is ∬(u(x)−u(y))²|x−y|^{-1-2s} without the factor C(1,s)/2,
    // which is 1/(2π) at s = 1/2; the classical first eigenvalue of (−Δ)^{1/2}
    // on (−1,1) is 1.1577738836977...
    let l = lambda_unit(&op(&Grid::interval(-1.0, 1.0, 256).unwrap(), 0.5));
    let reference = 2.0 * std::f64::consts::PI * 1.157_773_883_697;
    assert!(((l - reference) / reference).abs() < 0.01, "{l} vs {reference}");
}

#[test]
fn domain_monotonicity_on_shared_lattice() {
    for s in [0.3, 0.7] {
        let big = lambda_unit(&op(&Grid::interval(-1.0, 1.0, 64).unwrap(), s));
        let small = lambda_unit(&op(&Grid::interval(-0.5, 0.5, 32).unwrap(), s));
        assert!(small > big);
    }
    let wide = lambda_unit(&op(&Grid::rectangle([2.0, 1.0], [16, 8]).unwrap(), 0.5));
    let square = lambda_unit(&op(&Grid::rectangle([1.0, 1.0], [8, 8]).unwrap(), 0.5));
    assert!(square > wide);
}

#[test]
fn dilation_law_in_two_dimensions() {
    let s = 0.4;
    let small = lambda_unit(&op(&Grid::disk(1.0, 12).unwrap(), s));
    let large = lambda_unit(&op(&Grid::disk(2.0, 12).unwrap(), s));
    let expected = 2f64.powf(-2.0 * s) * small;
    assert!(((large - expected) / expected).abs() < 1e-9);
}

#[test]
fn disk_matches_dense_oracle_and_gap_is_positive() {
    let grid = Grid::disk(1.0, 10).unwrap();
    let op = op(&grid, 0.5);
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..3 {
        let rho = CellFunction::from_fn(&grid, |_| rng.gen_range(-1.0..1.0));
        let it = solve_mu1(&op, &rho, 1e-12).unwrap();
        let spec = dense_spectrum(&op, &rho, 2).unwrap();
        assert!((it.mu1_tilde - spec.positive[0].mu).abs() <= 1e-10 * it.mu1_tilde);
        assert!(spec.spectral_gap().unwrap() > 1e-6 * it.mu1_tilde);
    }
}

#[test]
fn eigenfunction_positive_and_rayleigh_minimal() {
    let grid = Grid::interval(-1.0, 1.0, 96).unwrap();
    let op = op(&grid, 0.6);
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let rho = CellFunction::from_fn(&grid, |[x, _]| if x.abs() < 0.3 { 1.0 } else { -0.5 });
    let r = solve_mu1(&op, &rho, 1e-10).unwrap();
    assert!(r.eigenfunction.values().iter().all(|&u| u > 0.0));
    let lambda = r.lambda1.unwrap();
    let at_u = rayleigh_quotient(&op, &rho, &r.eigenfunction).unwrap().unwrap();
    assert!((at_u - lambda).abs() < 1e-9 * lambda);
    for _ in 0..20 {
        let w = CellFunction::from_fn(&grid, |_| rng.gen_range(-0.2..1.0));
        if let Some(q) = rayleigh_quotient(&op, &rho, &w).unwrap() {
            assert!(q >= lambda * (1.0 - 1e-12));
        }
    }
}

#[test]
fn subgradient_inequality() {
    let grid = Grid::interval(-1.0, 1.0, 48).unwrap();
    let op = op(&grid, 0.5);
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let base = CellFunction::from_fn(&grid, |_| rng.gen_range(-1.0..1.0));
    let mu_base = solve_mu1(&op, &base, 1e-12).unwrap().mu1_tilde;
    for _ in 0..10 {
        let rho = CellFunction::from_fn(&grid, |_| rng.gen_range(-1.0..1.0));
        let diff = rho.combine(1.0, &base, -1.0).unwrap();
        let d = gateaux_differential(&op, &base, &diff).unwrap();
        let mu_rho = solve_mu1(&op, &rho, 1e-12).unwrap().mu1_tilde;
        assert!(mu_rho >= mu_base + d - 1e-12);
    }
}

#[test]
fn polya_szego_on_disk() {
    let grid = Grid::disk(1.0, 16).unwrap();
    let op = op(&grid, 0.3);
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    for _ in 0..10 {
        let u = CellFunction::from_fn(&grid, |_| rng.gen_range(0.0..1.0));
        let sym = steiner_symmetrize(&grid, &u).unwrap();
        assert!(op.norm_sq(&sym).unwrap() <= op.norm_sq(&u).unwrap() * (1.0 + 1e-12));
    }
    // already symmetric input is unchanged
    let r = solve_mu1(&op, &CellFunction::constant(&grid, 1.0), 1e-12).unwrap();
    let sym = steiner_symmetrize(&grid, &r.eigenfunction).unwrap();
    let ratio = op.norm_sq(&sym).unwrap() / op.norm_sq(&r.eigenfunction).unwrap();
    assert!((ratio - 1.0).abs() < 1e-8);
}
