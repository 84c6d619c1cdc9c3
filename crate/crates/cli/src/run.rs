use std::fmt::Write as _;
use std::fs;
use std::io::BufWriter;
use std::path::Path;

use fracopt::{
    assemble, canonical_layout, check_upper_bound, dense_spectrum, maximize_lambda1_fw,
    minimize_lambda1_multistart, solve_lambda_neg1, solve_mu1, steiner_report, steiner_symmetrize,
    verify_characterization, CellFunction, DomainShape, Grid, KernelParams, OptimizerStatus,
    OptimizerTrace, StiffnessOperator, WeightClass,
};

use crate::config::{ExperimentConfig, Mode};
use crate::error::CliError;
use crate::report::Report;
use crate::suite;

/// Oracle-scale limit for the dense spectrum used in reports.
const DENSE_LIMIT: usize = 512;

pub fn num(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn opt(x: Option<f64>) -> String {
    x.map(num).unwrap_or_default()
}

pub struct Setup {
    pub grid: Grid,
    pub op: StiffnessOperator,
    pub class: WeightClass,
}

pub fn setup(cfg: &ExperimentConfig) -> Result<Setup, CliError> {
    let grid = Grid::from_spec(&cfg.domain).map_err(CliError::from_spec)?;
    let class = WeightClass::from_spec(cfg.weight_spec(), &grid).map_err(CliError::from_spec)?;
    let params = KernelParams::new(cfg.s, grid.dim()).map_err(CliError::from_spec)?;
    let op = assemble(&grid, params)?;
    Ok(Setup { grid, op, class })
}

/// Run one experiment, write its artifacts, and return the report.
pub fn run(cfg: &ExperimentConfig) -> Result<Report, CliError> {
    let setup = setup(cfg)?;
    fs::create_dir_all(&cfg.out)?;
    if cfg.dump_matrix {
        let file = fs::File::create(cfg.out.join("A.bin"))?;
        setup.op.dump().write_to(BufWriter::new(file))?;
    }
    let mut report = Report::new(cfg.canonical());
    report.info(
        "grid",
        format!(
            "{} active cells of width {}, measure {}",
            setup.grid.active_count(),
            setup.grid.cell_width(),
            setup.grid.measure()
        ),
    );
    match cfg.mode {
        Mode::Solve => solve(cfg, &setup, &mut report)?,
        Mode::Minimize => minimize(cfg, &setup, &mut report)?,
        Mode::Maximize => maximize(cfg, &setup, &mut report)?,
        Mode::VerifySuite => suite::run(cfg, &setup, &mut report)?,
    }
    fs::write(cfg.out.join("report.txt"), report.render())?;
    Ok(report)
}

fn write_solution(path: &Path, grid: &Grid, rho: &CellFunction, u: &CellFunction) -> Result<(), CliError> {
    let mut out = String::from("cell,x,y,rho,u\n");
    for i in 0..grid.active_count() {
        let [x, y] = grid.center(i);
        let _ = writeln!(
            out,
            "{i},{},{},{},{}",
            num(x),
            num(y),
            num(rho.values()[i]),
            num(u.values()[i])
        );
    }
    fs::write(path, out)?;
    Ok(())
}

pub fn write_trace(path: &Path, trace: &OptimizerTrace, frank_wolfe: bool) -> Result<(), CliError> {
    let mut out = String::from("iter,mu1,lambda1,lin_obj,cells_changed,rho_sym_err,u_sym_err");
    out.push_str(if frank_wolfe { ",gap,majorized\n" } else { "\n" });
    for r in &trace.records {
        let _ = write!(
            out,
            "{},{},{},{},{},{},{}",
            r.iteration,
            num(r.mu1),
            opt(r.lambda1),
            num(r.lin_obj),
            r.cells_changed,
            opt(r.rho_sym_err),
            opt(r.u_sym_err)
        );
        if frank_wolfe {
            let _ = write!(
                out,
                ",{},{}",
                opt(r.gap),
                r.majorized.map(|m| m.to_string()).unwrap_or_default()
            );
        }
        out.push('\n');
    }
    fs::write(path, out)?;
    Ok(())
}

fn spectral_gap_info(setup: &Setup, rho: &CellFunction, report: &mut Report) -> Result<(), CliError> {
    if setup.op.size() > DENSE_LIMIT {
        report.info("spectral gap", format!("skipped, more than {DENSE_LIMIT} cells"));
        return Ok(());
    }
    let spec = dense_spectrum(&setup.op, rho, 2)?;
    match spec.spectral_gap() {
        Some(gap) => report.info(
            "spectral gap",
            format!("mu1 - mu2 = {gap:e} (mu1 = {:e})", spec.positive[0].mu),
        ),
        None => report.info("spectral gap", "fewer than two positive eigenvalues"),
    }
    Ok(())
}

fn solve(cfg: &ExperimentConfig, setup: &Setup, report: &mut Report) -> Result<(), CliError> {
    let rho = canonical_layout(&setup.grid, &setup.class)?;
    let r = solve_mu1(&setup.op, &rho, cfg.tol)?;
    let neg = solve_lambda_neg1(&setup.op, &rho, cfg.tol)?;
    let csv = format!(
        "cells,mu1,lambda1,lambda_neg1,residual,iterations\n{},{},{},{},{},{}\n",
        setup.grid.active_count(),
        num(r.mu1_tilde),
        opt(r.lambda1),
        opt(neg.lambda_neg1),
        num(r.residual),
        r.iterations
    );
    fs::write(cfg.out.join("results.csv"), csv)?;
    write_solution(&cfg.out.join("solution.csv"), &setup.grid, &rho, &r.eigenfunction)?;

    if r.is_zero() {
        report.info("first eigenvalue", "the weight has no positive part, no positive eigenvalue");
        return Ok(());
    }
    report.info(
        "first eigenvalue",
        format!("lambda1 = {}, mu1 = {}", num(r.lambda1.unwrap()), num(r.mu1_tilde)),
    );
    report.check(
        "residual",
        r.residual <= cfg.tol,
        format!("max|B u - mu A u| / max|B u| = {:e} (tol {:e})", r.residual, cfg.tol),
    );
    let norm = setup.op.norm_sq(&r.eigenfunction)?;
    report.check(
        "normalization",
        (norm - 1.0).abs() <= 1e-10,
        format!("norm_sq(u) = {norm:.15}"),
    );
    let min_u = r.eigenfunction.min();
    report.check("eigenfunction positive", min_u > 0.0, format!("min u = {min_u:e}"));
    spectral_gap_info(setup, &rho, report)
}

fn minimize(cfg: &ExperimentConfig, setup: &Setup, report: &mut Report) -> Result<(), CliError> {
    let multi = minimize_lambda1_multistart(
        &setup.op,
        &setup.class,
        cfg.tol,
        cfg.max_iter,
        cfg.restarts,
        cfg.seed,
    )?;
    let mut csv = String::from("restart,status,iterations,mu1,lambda1,rho_sym_err,u_sym_err,characterized\n");
    for (i, run) in multi.runs.iter().enumerate() {
        let last = run.trace.records.last().expect("trace has a first record");
        let _ = writeln!(
            csv,
            "{i},{},{},{},{},{},{},{}",
            run.trace.status.as_str(),
            run.trace.records.len() - 1,
            num(run.eigen.mu1_tilde),
            opt(run.eigen.lambda1),
            opt(last.rho_sym_err),
            opt(last.u_sym_err),
            verify_characterization(&run.weight, &run.eigen.eigenfunction)?
        );
    }
    fs::write(cfg.out.join("results.csv"), csv)?;
    let best = &multi.best;
    write_trace(&cfg.out.join("trace.csv"), &best.trace, false)?;
    write_solution(
        &cfg.out.join("solution.csv"),
        &setup.grid,
        &best.weight,
        &best.eigen.eigenfunction,
    )?;

    report.info(
        "minimizer",
        format!(
            "lambda1 = {}, status {}, {} iterations",
            opt(best.eigen.lambda1),
            best.trace.status.as_str(),
            best.trace.records.len() - 1
        ),
    );
    let monotone = multi.runs.iter().all(|r| r.trace.is_monotone(1e-12));
    report.check(
        "monotone ascent",
        monotone,
        format!("mu1 non-decreasing in all {} runs (slack 1e-12)", multi.runs.len()),
    );
    if best.trace.status == OptimizerStatus::FixedPoint
        || best.trace.status == OptimizerStatus::DegenerateClass
    {
        let ok = verify_characterization(&best.weight, &best.eigen.eigenfunction)?;
        report.check(
            "characterization",
            ok,
            "weight is an increasing function of the eigenfunction",
        );
    } else {
        report.info(
            "characterization",
            format!("not checked, run ended with status {}", best.trace.status.as_str()),
        );
    }
    if setup.class.mass() > 0.0 {
        let b = check_upper_bound(&setup.op, &setup.class, &best.eigen)?;
        report.check(
            "upper bound",
            b.satisfied,
            format!("lambda1 = {} <= {} = lambda1(1)|Omega|/mass", num(b.lambda1), num(b.bound)),
        );
    } else {
        report.info("upper bound", "not applicable, class mass is not positive");
    }
    let sr = steiner_report(&setup.grid, &best.weight, &best.eigen.eigenfunction)?;
    // an odd cell count on even lines rules out exact symmetry; then the
    // symmetrized weight must do at least as well
    let sym_detail = format!(
        "symmetry_error(rho) = {:e}, symmetry_error(u) = {:e}",
        sr.rho_sym_err, sr.u_sym_err
    );
    if sr.rho_sym_err == 0.0 {
        report.check("steiner symmetry", true, sym_detail);
    } else {
        let sym = steiner_symmetrize(&setup.grid, &best.weight)?;
        let mu_sym = solve_mu1(&setup.op, &sym, cfg.tol.min(1e-10))?.mu1_tilde;
        let mu = best.eigen.mu1_tilde;
        report.check(
            "steiner symmetry",
            mu_sym >= mu * (1.0 - 1e-9),
            format!("{sym_detail}; mu1(rho#) = {} vs mu1(rho) = {}", num(mu_sym), num(mu)),
        );
    }
    if setup.grid.shape() == DomainShape::Disk {
        let defect = sr.radial_defect.unwrap_or(0.0);
        report.check(
            "radial monotonicity",
            defect == 0.0,
            format!("radial defect of rho = {defect:e}"),
        );
    }
    report.info(
        "equal optima",
        format!(
            "{} distinct weights attain the best lambda1 among {} runs",
            multi.equal_optima.len(),
            multi.runs.len()
        ),
    );
    spectral_gap_info(setup, &best.weight, report)
}

fn maximize(cfg: &ExperimentConfig, setup: &Setup, report: &mut Report) -> Result<(), CliError> {
    let out = maximize_lambda1_fw(&setup.op, &setup.class, cfg.tol, cfg.max_iter)?;
    let gap = out.trace.final_gap().unwrap_or(0.0);
    let csv = format!(
        "status,iterations,mu1,lambda1,gap\n{},{},{},{},{}\n",
        out.trace.status.as_str(),
        out.trace.records.len() - 1,
        num(out.eigen.mu1_tilde),
        opt(out.eigen.lambda1),
        num(gap)
    );
    fs::write(cfg.out.join("results.csv"), csv)?;
    write_trace(&cfg.out.join("trace.csv"), &out.trace, true)?;
    write_solution(
        &cfg.out.join("solution.csv"),
        &setup.grid,
        &out.weight,
        &out.eigen.eigenfunction,
    )?;
    report.info(
        "maximizer",
        format!(
            "lambda1 = {}, status {}, {} iterations",
            opt(out.eigen.lambda1),
            out.trace.status.as_str(),
            out.trace.records.len() - 1
        ),
    );
    report.check(
        "duality gap",
        gap <= cfg.tol,
        format!("final gap {gap:e} (tol {:e})", cfg.tol),
    );
    let majorized = out.trace.records.iter().all(|r| r.majorized == Some(true));
    report.check("hull membership", majorized, "every iterate is majorized by the class");
    Ok(())
}
