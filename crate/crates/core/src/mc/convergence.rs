//! Empirical stability: first entry into the ε-ball, undershoot (how much deeper than
//! `x0` the debt goes), and excursion probabilities `P[sup|X_t| ≥ ρ]`.
//!
//! A path counts as converged once it has entered `|x| < ε`, whether or not it stays.
//! Paths that never enter by the cut-off are censored, not imputed.

use nalgebra::DVector;
use rayon::prelude::*;
use serde::Serialize;

use super::{mean_se, run_ensemble, Ensemble, Integrator};
use crate::error::{Error, Result};
use crate::merton::{beta_stability_range, exact_solution_exponents, wealth_sde, DebtProblem, MarketParams};
use crate::sde::{
    coarsen_increments, simulate_closed_loop_with_increments, Absorption, NoiseSource, TimeGrid,
};

/// Summary of the per-path minimum wealth.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct UndershootStats {
    pub min: f64,
    pub median: f64,
    pub mean: f64,
    /// Fraction of paths with minimum wealth below `k·x0`, for `k` in `multiples`.
    pub multiples: Vec<f64>,
    pub fraction_below: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StabilityEstimate {
    pub epsilon: f64,
    /// Cut-off time of the estimate.
    pub horizon: f64,
    pub converged_fraction: f64,
    /// First time `|X| < ε` per path; `None` when censored at `horizon`.
    pub hitting_times: Vec<Option<f64>>,
    pub censored: usize,
    /// Median first-hitting time; `None` when half or more of the paths are censored.
    pub median_hit_time: Option<f64>,
    pub undershoot: UndershootStats,
    pub rho_grid: Vec<f64>,
    /// `P̂[max_t |X_t| ≥ ρ]` for each `ρ`.
    pub excursion_prob: Vec<f64>,
}

const UNDERSHOOT_MULTIPLES: [f64; 3] = [1.5, 2.0, 3.0];

/// Estimate over the whole ensemble grid.
pub fn estimate_convergence(ensemble: &Ensemble, epsilon: f64, rho_grid: &[f64]) -> Result<StabilityEstimate> {
    estimate_convergence_until(ensemble, epsilon, rho_grid, ensemble.grid.t_end())
}

/// Estimate using only grid points up to `t_cut`.
pub fn estimate_convergence_until(
    ensemble: &Ensemble,
    epsilon: f64,
    rho_grid: &[f64],
    t_cut: f64,
) -> Result<StabilityEstimate> {
    if !(epsilon > 0.0) {
        return Err(Error::invalid("epsilon", format!("must be positive, got {epsilon}")));
    }
    let grid = &ensemble.grid;
    if !(t_cut >= grid.t_start() && t_cut <= grid.t_end() + 1e-9 * grid.dt()) {
        return Err(Error::invalid(
            "horizon",
            format!("cut-off {t_cut} outside the grid [{}, {}]", grid.t_start(), grid.t_end()),
        ));
    }
    let k_cut = grid.index_of(t_cut);
    let x0 = ensemble.problem.x0;

    let mut hitting_times = Vec::with_capacity(ensemble.len());
    let mut minima = Vec::with_capacity(ensemble.len());
    let mut sup_abs = Vec::with_capacity(ensemble.len());
    for path in &ensemble.paths {
        let xs = &path.states[..path.len().min(k_cut + 1)];
        let hit = xs.iter().position(|x| x[0].abs() < epsilon);
        hitting_times.push(hit.map(|k| path.times[k]));
        minima.push(xs.iter().map(|x| x[0]).fold(f64::INFINITY, f64::min));
        sup_abs.push(xs.iter().map(|x| x[0].abs()).fold(0.0, f64::max));
    }

    let n = ensemble.len();
    let censored = hitting_times.iter().filter(|h| h.is_none()).count();
    let converged_fraction = if n == 0 { 0.0 } else { (n - censored) as f64 / n as f64 };
    let median_hit_time = censored_median(&hitting_times);

    let mut sorted = minima.clone();
    sorted.sort_by(f64::total_cmp);
    let fraction_below = UNDERSHOOT_MULTIPLES
        .iter()
        .map(|m| fraction(&minima, |v| v < m * x0))
        .collect();
    let undershoot = UndershootStats {
        min: sorted.first().copied().unwrap_or(f64::NAN),
        median: median_sorted(&sorted),
        mean: mean_se(&minima).0,
        multiples: UNDERSHOOT_MULTIPLES.to_vec(),
        fraction_below,
    };
    let excursion_prob = rho_grid.iter().map(|&rho| fraction(&sup_abs, |s| s >= rho)).collect();

    Ok(StabilityEstimate {
        epsilon,
        horizon: grid.time(k_cut),
        converged_fraction,
        hitting_times,
        censored,
        median_hit_time,
        undershoot,
        rho_grid: rho_grid.to_vec(),
        excursion_prob,
    })
}

fn fraction(xs: &[f64], pred: impl Fn(f64) -> bool) -> f64 {
    if xs.is_empty() {
        return 0.0;
    }
    xs.iter().filter(|&&x| pred(x)).count() as f64 / xs.len() as f64
}

fn median_sorted(sorted: &[f64]) -> f64 {
    let n = sorted.len();
    match n {
        0 => f64::NAN,
        _ if n % 2 == 1 => sorted[n / 2],
        _ => 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]),
    }
}

/// Median with censored entries treated as larger than every observed time.
fn censored_median(times: &[Option<f64>]) -> Option<f64> {
    let mut observed: Vec<f64> = times.iter().flatten().copied().collect();
    observed.sort_by(f64::total_cmp);
    let n = times.len();
    if n == 0 {
        return None;
    }
    if n % 2 == 1 {
        observed.get(n / 2).copied()
    } else {
        match (observed.get(n / 2 - 1), observed.get(n / 2)) {
            (Some(a), Some(b)) => Some(0.5 * (a + b)),
            _ => None,
        }
    }
}

/// Simulation settings for [`stability_sweep`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepOptions {
    /// Receding horizon `T` and constraint used for every β.
    pub horizon: f64,
    pub c1: f64,
    pub c2: f64,
    pub x0: f64,
    pub n_paths: usize,
    pub dt: f64,
    /// Simulated time span.
    pub sim_horizon: f64,
    pub master_seed: u64,
    pub epsilon: f64,
}

impl Default for SweepOptions {
    fn default() -> Self {
        let p = DebtProblem::default();
        Self {
            horizon: p.horizon,
            c1: p.c1,
            c2: p.c2,
            x0: p.x0,
            n_paths: 100,
            dt: 0.01,
            sim_horizon: 40.0,
            master_seed: 42,
            epsilon: 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub beta: f64,
    pub eta: f64,
    pub in_window: bool,
    /// `η` numerically zero: the window endpoint, where the certificate degenerates.
    pub degenerate: bool,
    pub log_drift: f64,
    pub merton_fraction: f64,
    /// `None` when the Merton fraction violates the constraint and nothing was simulated.
    pub converged_fraction: Option<f64>,
    pub median_hit_time: Option<f64>,
    pub censored: usize,
}

/// Per-β certificate quantities and exact-GBM convergence statistics.
pub fn stability_sweep(market: &MarketParams, betas: &[f64], opts: &SweepOptions) -> Result<Vec<SweepRow>> {
    market.validate()?;
    let window = beta_stability_range(market);
    let grid = TimeGrid::over(opts.sim_horizon, opts.dt)?;
    betas
        .iter()
        .map(|&beta| {
            let problem = DebtProblem {
                market: *market,
                beta,
                horizon: opts.horizon,
                c1: opts.c1,
                c2: opts.c2,
                x0: opts.x0,
            };
            problem.validate()?;
            let eta = problem.eta();
            let (log_drift, _) = exact_solution_exponents(market, beta);
            let mut row = SweepRow {
                beta,
                eta,
                in_window: window.contains(beta),
                degenerate: eta.abs() < 1e-12,
                log_drift,
                merton_fraction: problem.merton_fraction(),
                converged_fraction: None,
                median_hit_time: None,
                censored: 0,
            };
            if problem.feasibility().feasible() {
                let ensemble = run_ensemble(&problem, opts.n_paths, &grid, opts.master_seed, Integrator::Exact)?;
                let est = estimate_convergence(&ensemble, opts.epsilon, &[])?;
                row.converged_fraction = Some(est.converged_fraction);
                row.median_hit_time = est.median_hit_time;
                row.censored = est.censored;
            }
            Ok(row)
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StrongErrorReport {
    pub dt: f64,
    pub t_end: f64,
    pub n_paths: usize,
    /// `E|X^{EM,dt}_{t_end} - X_{t_end}|`.
    pub error_coarse: f64,
    /// Same with step `dt/2`.
    pub error_fine: f64,
    pub ratio: f64,
}

/// Strong error of Euler–Maruyama against the exact solution at steps `dt` and `dt/2`,
/// all three driven by one Brownian path per sample (fine increments, summed pairwise
/// for the coarse run). Order ½ gives a ratio near √2.
pub fn strong_error_ratio(
    problem: &DebtProblem,
    dt: f64,
    t_end: f64,
    n_paths: usize,
    master_seed: u64,
) -> Result<StrongErrorReport> {
    problem.validate()?;
    if n_paths == 0 {
        return Err(Error::invalid("n_paths", "need at least one path"));
    }
    let policy = problem.rhc_policy()?;
    let sde = wealth_sde(&problem.market, problem.control_set());
    let (a, s) = exact_solution_exponents(&problem.market, problem.beta);
    let coarse = TimeGrid::over(t_end, dt)?;
    let fine = TimeGrid::new(0.0, dt / 2.0, 2 * coarse.n_steps())?;
    let t = coarse.t_end();
    let x0 = DVector::from_element(1, problem.x0);

    let errors = (0..n_paths)
        .into_par_iter()
        .map(|i| {
            let dw = NoiseSource::new(master_seed, i as u64).increments(fine.dt(), fine.n_steps(), 1);
            let w: f64 = dw.iter().map(|d| d[0]).sum();
            let exact = problem.x0 * (a * t + s * w).exp();
            let end = |p: crate::sde::SamplePath| -> Result<f64> {
                if !p.is_complete() {
                    return Err(Error::Overflow { step: p.len() });
                }
                Ok(p.states[p.len() - 1][0])
            };
            let coarse_dw = coarsen_increments(&dw, 2);
            let xc = end(simulate_closed_loop_with_increments(&sde, &policy, &x0, &coarse, coarse_dw, Absorption::None)?)?;
            let xf = end(simulate_closed_loop_with_increments(&sde, &policy, &x0, &fine, dw, Absorption::None)?)?;
            Ok(((xc - exact).abs(), (xf - exact).abs()))
        })
        .collect::<Result<Vec<_>>>()?;
    let n = n_paths as f64;
    let error_coarse = errors.iter().map(|e| e.0).sum::<f64>() / n;
    let error_fine = errors.iter().map(|e| e.1).sum::<f64>() / n;
    Ok(StrongErrorReport {
        dt,
        t_end: t,
        n_paths,
        error_coarse,
        error_fine,
        ratio: error_coarse / error_fine,
    })
}
