//! `verify-suite`: randomized checks of the inequalities and identities the
//! library is built on, evaluated on the configured domain and class.

use std::fmt::Write as _;
use std::fs;

use fracopt::{
    check_upper_bound, dense_spectrum, gateaux_differential, linear_maximize, linear_minimize,
    maximize_lambda_neg1, minimize_lambda1, solve_lambda_neg1, solve_mu1, steiner_symmetrize,
    verify_characterization, CellFunction,
};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::config::ExperimentConfig;
use crate::error::CliError;
use crate::report::{Report, Verdict};
use crate::run::{num, write_trace, Setup};

const SAMPLES: usize = 20;

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}

struct Row {
    name: &'static str,
    value: f64,
}

pub fn run(cfg: &ExperimentConfig, setup: &Setup, report: &mut Report) -> Result<(), CliError> {
    let Setup { grid, op, class } = setup;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let m = grid.cell_measure();
    let tol = cfg.tol.min(1e-10);
    let mut rows: Vec<Row> = Vec::new();
    let permuted = |rng: &mut ChaCha8Rng| {
        let mut v = class.values_desc();
        v.shuffle(rng);
        CellFunction::new(v, m)
    };

    // convexity of μ̃₁ along segments between rearrangements
    let mut violation = f64::NEG_INFINITY;
    let mut margin = f64::INFINITY;
    for _ in 0..SAMPLES {
        let rho = permuted(&mut rng);
        let eta = permuted(&mut rng);
        let t = [0.25, 0.5, 0.75][rng.gen_range(0..3)];
        let mix = rho.combine(t, &eta, 1.0 - t)?;
        let lhs = solve_mu1(op, &mix, tol)?.mu1_tilde;
        let rhs = t * solve_mu1(op, &rho, tol)?.mu1_tilde + (1.0 - t) * solve_mu1(op, &eta, tol)?.mu1_tilde;
        violation = violation.max(lhs - rhs);
        if rho != eta {
            margin = margin.min(rhs - lhs);
        }
    }
    report.check(
        "convexity",
        violation <= 1e-9,
        format!("max violation {violation:e} over {SAMPLES} segments (slack 1e-9)"),
    );
    rows.push(Row { name: "convexity", value: violation });
    if class.mass() > 0.0 && margin.is_finite() {
        report.check(
            "strict convexity",
            margin > 0.0,
            format!("min margin {margin:e} on distinct pairs"),
        );
        rows.push(Row { name: "strict convexity", value: margin });
    } else {
        report.info("strict convexity", "not checked, class mass is not positive or all pairs equal");
    }

    // Hardy–Littlewood and Pólya–Szegő for Steiner symmetrization
    let mut hl_gap = f64::INFINITY;
    let mut ps_excess = f64::NEG_INFINITY;
    for _ in 0..SAMPLES {
        // integers keep the products and sums exact
        let u = CellFunction::from_fn(grid, |_| rng.gen_range(0..16) as f64);
        let v = CellFunction::from_fn(grid, |_| rng.gen_range(0..16) as f64);
        let us = steiner_symmetrize(grid, &u)?;
        let vs = steiner_symmetrize(grid, &v)?;
        hl_gap = hl_gap.min(dot(us.values(), vs.values()) - dot(u.values(), v.values()));
        let w = CellFunction::from_fn(grid, |_| rng.gen_range(0.0..1.0));
        let ws = steiner_symmetrize(grid, &w)?;
        ps_excess = ps_excess.max(op.norm_sq(&ws)? / op.norm_sq(&w)? - 1.0);
    }
    report.check(
        "Hardy-Littlewood",
        hl_gap >= 0.0,
        format!("min of sum(u# v#) - sum(u v) = {hl_gap}"),
    );
    rows.push(Row { name: "Hardy-Littlewood", value: hl_gap });
    report.check(
        "Polya-Szego",
        ps_excess <= 1e-6,
        format!("max norm_sq(u#)/norm_sq(u) - 1 = {ps_excess:e} (slack 1e-6)"),
    );
    rows.push(Row { name: "Polya-Szego", value: ps_excess });

    // two-sided linear bound over the class, attained at both ends
    let mut bound_violation = f64::NEG_INFINITY;
    for _ in 0..SAMPLES {
        let u = CellFunction::from_fn(grid, |_| rng.gen_range(-1.0..1.0));
        let rho = permuted(&mut rng);
        let hi = dot(linear_maximize(class, &u)?.values(), u.values());
        let lo = dot(linear_minimize(class, &u)?.values(), u.values());
        let val = dot(rho.values(), u.values());
        let scale = 1e-12 * (1.0 + hi.abs() + lo.abs());
        bound_violation = bound_violation.max((val - hi).max(lo - val) - scale);
    }
    report.check(
        "two-sided rearrangement bound",
        bound_violation <= 0.0,
        "lower and upper linear bounds hold and are attained by the linear optimizers",
    );
    rows.push(Row { name: "two-sided rearrangement bound", value: bound_violation });

    // minimization: ascent, characterization, upper bound
    if class.has_positive() {
        let out = minimize_lambda1(op, class, cfg.tol, cfg.max_iter)?;
        write_trace(&cfg.out.join("trace.csv"), &out.trace, false)?;
        report.check(
            "monotone ascent",
            out.trace.is_monotone(1e-12),
            format!("{} iterations, status {}", out.trace.records.len() - 1, out.trace.status.as_str()),
        );
        let charac = verify_characterization(&out.weight, &out.eigen.eigenfunction)?;
        report.check("characterization", charac, "minimizer is an increasing function of its eigenfunction");
        if class.mass() > 0.0 {
            let b = check_upper_bound(op, class, &out.eigen)?;
            report.check(
                "upper bound",
                b.satisfied,
                format!("lambda1 = {} <= {}", num(b.lambda1), num(b.bound)),
            );
            rows.push(Row { name: "upper bound", value: b.lambda1 - b.bound });
        } else {
            report.info("upper bound", "not applicable, class mass is not positive");
        }

        // derivative formula against central differences
        let mut fd_err: f64 = 0.0;
        for _ in 0..5 {
            let rho = permuted(&mut rng);
            if solve_mu1(op, &rho, tol)?.is_zero() {
                continue;
            }
            let v = CellFunction::from_fn(grid, |_| rng.gen_range(-1.0..1.0));
            let t = 1e-5;
            let plus = solve_mu1(op, &rho.combine(1.0, &v, t)?, tol)?.mu1_tilde;
            let minus = solve_mu1(op, &rho.combine(1.0, &v, -t)?, tol)?.mu1_tilde;
            let exact = gateaux_differential(op, &rho, &v)?;
            fd_err = fd_err.max(rel((plus - minus) / (2.0 * t), exact));
        }
        report.check(
            "Gateaux derivative",
            fd_err < 1e-3,
            format!("max relative error vs central differences {fd_err:e}"),
        );
        rows.push(Row { name: "Gateaux derivative", value: fd_err });
    } else {
        report.info("minimization", "not applicable, class has no positive value");
    }

    // negative eigenvalue duality
    if class.min() < 0.0 {
        let mut err: f64 = 0.0;
        for _ in 0..5 {
            let rho = permuted(&mut rng);
            let neg = solve_lambda_neg1(op, &rho, tol)?;
            let flipped = solve_mu1(op, &rho.scaled(-1.0), tol)?;
            err = err.max(rel(neg.lambda_neg1.unwrap(), -flipped.lambda1.unwrap()));
            if op.size() <= 512 {
                let spec = dense_spectrum(op, &rho, 1)?;
                err = err.max(rel(neg.lambda_neg1.unwrap(), 1.0 / spec.negative[0].mu));
            }
        }
        let best_neg = maximize_lambda_neg1(op, class, cfg.tol, cfg.max_iter)?;
        let direct = minimize_lambda1(op, &class.negated(), cfg.tol, cfg.max_iter)?;
        let exact = best_neg.lambda_neg1 == -direct.eigen.lambda1.unwrap();
        report.check(
            "negative eigenvalue duality",
            err <= 1e-8 && exact,
            format!("max relative error {err:e}; max lambda_-1 over the class = -min lambda1 over the negated class: {exact}"),
        );
        rows.push(Row { name: "negative eigenvalue duality", value: err });
    } else {
        report.info("negative eigenvalue duality", "not applicable, class has no negative value");
    }

    let mut csv = String::from("check,verdict,value\n");
    for row in &rows {
        let verdict = report
            .checks()
            .find(|c| c.1 == row.name)
            .map(|c| if c.0 == Verdict::Fail { "FAIL" } else { "PASS" })
            .unwrap_or("INFO");
        let _ = writeln!(csv, "{},{verdict},{}", row.name, num(row.value));
    }
    fs::write(cfg.out.join("results.csv"), csv)?;
    Ok(())
}
