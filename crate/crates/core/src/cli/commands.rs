use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use super::{fmt_num, ExperimentConfig, LineChart, Status};
use crate::error::{Error, Result};
use crate::hjb::{compare_to_closed_form, default_window, solve_hjb_1d_with, Grid1D, HjbProblem1D};
use crate::mc::{run_ensemble, stability_sweep, Ensemble, SweepRow};
use crate::merton::{beta_stability_range, CostVariant, DebtProblem};
use crate::sde::{StateBounds, TimeGrid};
use crate::value_rhc::{check_assumptions, AssumptionCheckOptions, RhcPolicy};

/// Relative value error and minimiser deviation accepted by `hjb`.
pub const HJB_VALUE_TOL: f64 = 1e-2;
pub const HJB_MINIMIZER_TOL: f64 = 0.05;

/// The three figure ensembles: `(figure number, β, simulated years)`.
pub const FIGURES: [(u32, f64, f64); 3] = [(1, 2.1, 25.0), (2, 4.5, 100.0), (3, 7.8, 100.0)];

fn create_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::Config(format!("cannot create output directory {}: {e}", dir.display())))
}

fn create_file(path: &Path) -> Result<BufWriter<File>> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| Error::Config(format!("cannot write {}: {e}", path.display())))
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    let mut f = create_file(path)?;
    f.write_all(contents.as_bytes())?;
    f.flush()?;
    Ok(())
}

pub fn cmd_verify(cfg: &ExperimentConfig, out: &mut dyn Write) -> Result<Status> {
    let problem = cfg.debt_problem();
    let window = beta_stability_range(&problem.market);
    let feasibility = problem.feasibility();
    writeln!(out, "beta = {}, T = {}", problem.beta, problem.horizon)?;
    writeln!(out, "eta = {:.6}", problem.eta())?;
    writeln!(
        out,
        "stability window: ({}, {:.5}); beta {} it",
        window.lower,
        window.upper,
        if window.contains(problem.beta) { "inside" } else { "outside" }
    )?;
    writeln!(out, "constraint: {}", feasibility.describe())?;
    if !feasibility.feasible() {
        writeln!(out, "assumption checks skipped: the closed-loop law is not admissible")?;
        return Ok(Status::VerificationFailed);
    }

    let policy = problem.rhc_policy()?;
    let value = problem.value_function(CostVariant::Running);
    let cost = problem.cost(CostVariant::Running);
    let domain = StateBounds::interval(cfg.hjb.x_min, 0.0)?;
    let opts = AssumptionCheckOptions::new(problem.horizon, domain);
    let report = check_assumptions(&value, &cost, &policy, &problem.wealth_sde(), &opts)?;
    write!(out, "{}", report.render())?;
    Ok(if report.all_pass() {
        Status::Success
    } else {
        Status::VerificationFailed
    })
}

/// `path_id,t,wealth,control`; the control at the last grid point is the law's value there.
pub fn write_paths_csv(ensemble: &Ensemble, policy: &RhcPolicy, path: &Path) -> Result<()> {
    let mut f = create_file(path)?;
    writeln!(f, "path_id,t,wealth,control")?;
    for (id, p) in ensemble.paths.iter().enumerate() {
        for (k, (t, x)) in p.times.iter().zip(&p.states).enumerate() {
            let u = match p.controls.get(k) {
                Some(u) if !u.is_empty() => u[0],
                _ => policy.control(x)[0],
            };
            writeln!(f, "{id},{},{},{}", fmt_num(*t), fmt_num(x[0]), fmt_num(u))?;
        }
    }
    f.flush()?;
    Ok(())
}

pub fn paths_svg(ensemble: &Ensemble, title: &str) -> String {
    let series: Vec<Vec<(f64, f64)>> = ensemble
        .paths
        .iter()
        .map(|p| p.times.iter().zip(&p.states).map(|(t, x)| (*t, x[0])).collect())
        .collect();
    LineChart {
        title,
        x_label: "time (years)",
        y_label: "wealth",
        series: &series,
    }
    .render()
}

fn simulate_to(
    problem: &DebtProblem,
    cfg: &ExperimentConfig,
    grid: &TimeGrid,
    dir: &Path,
    stem: &str,
    out: &mut dyn Write,
) -> Result<Vec<PathBuf>> {
    let ensemble = run_ensemble(problem, cfg.mc.n_paths, grid, cfg.mc.master_seed, cfg.mc.integrator)?;
    let policy = problem.rhc_policy()?;
    let csv = dir.join(format!("{stem}.csv"));
    write_paths_csv(&ensemble, &policy, &csv)?;
    let mut written = vec![csv];
    if cfg.output.emit_svg {
        let svg = dir.join(format!("{stem}.svg"));
        let title = format!("Wealth process for beta = {} ({} simulations)", problem.beta, ensemble.len());
        write_file(&svg, &paths_svg(&ensemble, &title))?;
        written.push(svg);
    }
    for w in &written {
        writeln!(out, "wrote {}", w.display())?;
    }
    Ok(written)
}

pub fn cmd_simulate(cfg: &ExperimentConfig, out: &mut dyn Write) -> Result<Status> {
    let dir = &cfg.output.directory;
    create_dir(dir)?;
    simulate_to(&cfg.debt_problem(), cfg, &cfg.time_grid()?, dir, "paths", out)?;
    Ok(Status::Success)
}

pub fn cmd_hjb(cfg: &ExperimentConfig, out: &mut dyn Write) -> Result<Status> {
    let problem = cfg.debt_problem();
    let variant = cfg.problem.variant;
    let mut hjb = HjbProblem1D::from_debt(&problem, variant);
    hjb.n_u = cfg.hjb.n_u;
    let grid = match cfg.hjb.n_t {
        Some(n_t) => Grid1D::new(cfg.hjb.x_min, 0.0, cfg.hjb.n_x, problem.horizon, n_t)?,
        None => Grid1D::stable(&hjb, cfg.hjb.x_min, 0.0, cfg.hjb.n_x, problem.horizon)?,
    };
    let solution = solve_hjb_1d_with(&hjb, &grid, cfg.hjb.output_slices)?;

    let dir = &cfg.output.directory;
    create_dir(dir)?;
    let path = dir.join("hjb.csv");
    let mut f = create_file(&path)?;
    writeln!(f, "t,x,value,minimizer")?;
    let xs = grid.xs();
    for (k, t) in solution.times().iter().enumerate() {
        let mins = solution.minimizers.get(k);
        for (i, x) in xs.iter().enumerate() {
            let u = mins.map(|m| fmt_num(m[i])).unwrap_or_default();
            writeln!(f, "{},{},{},{u}", fmt_num(*t), fmt_num(*x), fmt_num(solution.values[k][i]))?;
        }
    }
    f.flush()?;
    writeln!(out, "wrote {}", path.display())?;

    let window = default_window(&grid);
    let report = compare_to_closed_form(&solution, &problem, variant, window);
    writeln!(
        out,
        "{variant:?} cost, n_x = {}, n_t = {}, window [{}, {}] ({} nodes)",
        grid.n_x,
        grid.n_t,
        fmt_num(window.0),
        fmt_num(window.1),
        report.nodes
    )?;
    writeln!(
        out,
        "value: max rel error {:.3e} (at x = {}), mean {:.3e}",
        report.max_rel_error,
        fmt_num(report.worst_x),
        report.mean_rel_error
    )?;
    writeln!(
        out,
        "minimizer: target {:.6}, max rel deviation {:.3e}, mean {:.3e}",
        report.target_minimizer, report.max_minimizer_rel_dev, report.mean_minimizer_rel_dev
    )?;
    let ok = report.within(HJB_VALUE_TOL, HJB_MINIMIZER_TOL);
    writeln!(
        out,
        "{} (tolerances {HJB_VALUE_TOL} value, {HJB_MINIMIZER_TOL} minimizer)",
        if ok { "within tolerance" } else { "OUTSIDE tolerance" }
    )?;
    Ok(if ok { Status::Success } else { Status::VerificationFailed })
}

pub fn write_sweep_csv(rows: &[SweepRow], path: &Path) -> Result<()> {
    let mut f = create_file(path)?;
    writeln!(
        f,
        "beta,eta,in_window,log_drift,merton_fraction,converged_fraction,median_hit_time,censored"
    )?;
    let opt = |v: Option<f64>| v.map(fmt_num).unwrap_or_default();
    for r in rows {
        writeln!(
            f,
            "{},{},{},{},{},{},{},{}",
            fmt_num(r.beta),
            fmt_num(r.eta),
            u8::from(r.in_window),
            fmt_num(r.log_drift),
            fmt_num(r.merton_fraction),
            opt(r.converged_fraction),
            opt(r.median_hit_time),
            r.censored
        )?;
    }
    f.flush()?;
    Ok(())
}

pub fn cmd_sweep(cfg: &ExperimentConfig, out: &mut dyn Write) -> Result<Status> {
    let dir = &cfg.output.directory;
    create_dir(dir)?;
    let rows = stability_sweep(&cfg.market, &cfg.sweep.betas, &cfg.sweep_options())?;
    let path = dir.join("sweep.csv");
    write_sweep_csv(&rows, &path)?;
    for r in &rows {
        writeln!(
            out,
            "beta {:>6}: eta {:+.6}{} converged {}",
            r.beta,
            r.eta,
            if r.in_window { " (in window)" } else if r.degenerate { " (degenerate)" } else { "" },
            r.converged_fraction.map(|f| format!("{f:.2}")).unwrap_or_else(|| "n/a (infeasible)".into())
        )?;
    }
    writeln!(out, "wrote {}", path.display())?;
    Ok(Status::Success)
}

pub fn cmd_figures(cfg: &ExperimentConfig, out: &mut dyn Write) -> Result<Status> {
    let dir = &cfg.output.directory;
    create_dir(dir)?;
    for (n, beta, years) in FIGURES {
        let problem = DebtProblem {
            beta,
            ..cfg.debt_problem()
        };
        let grid = TimeGrid::over(years, cfg.mc.dt)?;
        simulate_to(&problem, cfg, &grid, dir, &format!("fig{n}_beta{beta}"), out)?;
    }
    Ok(Status::Success)
}
