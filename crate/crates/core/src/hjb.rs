//! Explicit finite-difference solver for the 1-D finite-horizon HJB equation
//!
//! ```text
//! -∂_t v = min_{u ∈ [c1,c2]} [ ½ σ(x,u)² ∂_xx v + b(x,u) ∂_x v + f(x,u) ],   v(T,x) = g(x)
//! ```
//!
//! marching backward from `t = T`. Diffusion is centred. The drift term is centred where
//! that keeps the scheme monotone (`σ² ≥ Δx|b|`) and upwinded on the sign of `b(x,u)`
//! elsewhere. The step obeys `Δt ≤ Δx² / max(σ² + Δx|b|)`, which makes either choice monotone.
//!
//! The minimisation at each node takes the better of a uniform search over `n_u`
//! control samples and, where `∂_xx v > 0`, the vertex of the Hamiltonian (quadratic in
//! `u` for drift affine and diffusion linear in the control), clamped to `[c1, c2]`.
//! Ties go to the smaller control.
//!
//! Boundaries: Dirichlet `v = g(x_max)` at the upper end (an equilibrium with zero
//! running cost, as `x = 0` is for the debt problem). At `x_min` there is no boundary
//! data; by default the node is updated with a one-sided second-order first derivative
//! and a linearly extrapolated second derivative. [`LowerBoundary::ValueExtrapolation`]
//! instead extrapolates the new value quadratically from the three nearest interior nodes.

use std::fmt;
use std::sync::Arc;

use nalgebra::DVector;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::merton::{value_closed_form, CostVariant, DebtProblem};
use crate::value_rhc::RhcPolicy;

pub type ScalarFn2 = Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>;
pub type ScalarFn1 = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

pub const DEFAULT_CONTROL_SAMPLES: usize = 101;
/// Upper bound on stored time slices; longer solves keep every k-th slice.
pub const DEFAULT_MAX_SLICES: usize = 1001;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Grid1D {
    pub x_min: f64,
    pub x_max: f64,
    /// Number of spatial intervals; there are `n_x + 1` nodes.
    pub n_x: usize,
    pub horizon: f64,
    pub n_t: usize,
}

impl Grid1D {
    pub fn new(x_min: f64, x_max: f64, n_x: usize, horizon: f64, n_t: usize) -> Result<Self> {
        if !(x_min < x_max) {
            return Err(Error::invalid("hjb.x_min", format!("need x_min < x_max, got {x_min} >= {x_max}")));
        }
        if n_x < 16 {
            return Err(Error::invalid("hjb.n_x", format!("need n_x >= 16, got {n_x}")));
        }
        if !(horizon > 0.0) {
            return Err(Error::invalid("problem.T", "horizon must be positive"));
        }
        if n_t == 0 {
            return Err(Error::invalid("hjb.n_t", "need at least one time step"));
        }
        Ok(Self {
            x_min,
            x_max,
            n_x,
            horizon,
            n_t,
        })
    }

    /// Grid whose `n_t` is the smallest satisfying the stability bound for `problem`.
    pub fn stable(problem: &HjbProblem1D, x_min: f64, x_max: f64, n_x: usize, horizon: f64) -> Result<Self> {
        let probe = Self::new(x_min, x_max, n_x, horizon, 1)?;
        let n_t = required_time_steps(problem, &probe);
        Self::new(x_min, x_max, n_x, horizon, n_t)
    }

    pub fn dx(&self) -> f64 {
        (self.x_max - self.x_min) / self.n_x as f64
    }

    pub fn dt(&self) -> f64 {
        self.horizon / self.n_t as f64
    }

    pub fn x(&self, i: usize) -> f64 {
        if i == self.n_x {
            self.x_max
        } else {
            self.x_min + i as f64 * self.dx()
        }
    }

    pub fn t(&self, n: usize) -> f64 {
        if n == self.n_t {
            self.horizon
        } else {
            n as f64 * self.dt()
        }
    }

    pub fn xs(&self) -> Vec<f64> {
        (0..=self.n_x).map(|i| self.x(i)).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub enum LowerBoundary {
    /// Update `v_0` from extrapolated derivatives.
    #[default]
    DerivativeExtrapolation,
    /// `v_0 = 3v_1 - 3v_2 + v_3` after each interior update.
    ValueExtrapolation,
}

#[derive(Clone)]
pub struct HjbProblem1D {
    pub drift: ScalarFn2,
    pub diffusion: ScalarFn2,
    pub running_cost: ScalarFn2,
    pub terminal_cost: ScalarFn1,
    pub control_interval: (f64, f64),
    /// Uniform control samples for the fallback search.
    pub n_u: usize,
    pub lower_boundary: LowerBoundary,
}

impl fmt::Debug for HjbProblem1D {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("HjbProblem1D")
            .field("control_interval", &self.control_interval)
            .field("n_u", &self.n_u)
            .field("lower_boundary", &self.lower_boundary)
            .finish_non_exhaustive()
    }
}

impl HjbProblem1D {
    pub fn new<B, S, F, G>(drift: B, diffusion: S, running_cost: F, terminal_cost: G, c1: f64, c2: f64) -> Self
    where
        B: Fn(f64, f64) -> f64 + Send + Sync + 'static,
        S: Fn(f64, f64) -> f64 + Send + Sync + 'static,
        F: Fn(f64, f64) -> f64 + Send + Sync + 'static,
        G: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        Self {
            drift: Arc::new(drift),
            diffusion: Arc::new(diffusion),
            running_cost: Arc::new(running_cost),
            terminal_cost: Arc::new(terminal_cost),
            control_interval: (c1, c2),
            n_u: DEFAULT_CONTROL_SAMPLES,
            lower_boundary: LowerBoundary::default(),
        }
    }

    /// The debt-repayment HJB for the given cost variant.
    pub fn from_debt(problem: &DebtProblem, variant: CostVariant) -> Self {
        let m = problem.market;
        let (r, b, sigma, beta) = (m.r, m.b_drift, m.sigma, problem.beta);
        let power = move |x: f64| crate::merton::debt_power(x, beta);
        let (running, terminal): (ScalarFn2, ScalarFn1) = match variant {
            CostVariant::Running => (Arc::new(move |x, _| power(x)), Arc::new(|_| 0.0)),
            CostVariant::Terminal => (Arc::new(|_, _| 0.0), Arc::new(power)),
        };
        Self {
            drift: Arc::new(move |x, u| (r + (b - r) * u) * x),
            diffusion: Arc::new(move |x, u| sigma * u * x),
            running_cost: running,
            terminal_cost: terminal,
            control_interval: (problem.c1, problem.c2),
            n_u: DEFAULT_CONTROL_SAMPLES,
            lower_boundary: LowerBoundary::default(),
        }
    }

    fn controls(&self) -> Vec<f64> {
        let (c1, c2) = self.control_interval;
        let n = self.n_u.max(2);
        (0..n)
            .map(|j| if j == n - 1 { c2 } else { c1 + (c2 - c1) * j as f64 / (n - 1) as f64 })
            .collect()
    }
}

/// Smallest `n_t` with `T/n_t ≤ Δx² / max(σ² + Δx|b|)` over grid nodes and control samples.
pub fn required_time_steps(problem: &HjbProblem1D, grid: &Grid1D) -> usize {
    let dx = grid.dx();
    let us = problem.controls();
    let worst = grid
        .xs()
        .iter()
        .flat_map(|&x| {
            us.iter().map(move |&u| {
                let s = (problem.diffusion)(x, u);
                s * s + dx * (problem.drift)(x, u).abs()
            })
        })
        .fold(0.0, f64::max);
    if worst == 0.0 {
        return 1;
    }
    let dt_max = dx * dx / worst;
    let n = (grid.horizon / dt_max).ceil() as usize;
    // guard against ceil landing exactly on the bound from below
    if grid.horizon / n as f64 > dt_max {
        n + 1
    } else {
        n.max(1)
    }
}

/// Grid-sampled value function and minimising control.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteHjbSolution {
    pub grid: Grid1D,
    /// Indices of the stored time slices (always includes 0 and `n_t`).
    pub slice_indices: Vec<usize>,
    /// `values[k][i]` is `v(t_{slice_indices[k]}, x_i)`.
    pub values: Vec<Vec<f64>>,
    /// Minimiser over the step starting at each stored slice; the final slice has none,
    /// so this has one row fewer than `values`.
    pub minimizers: Vec<Vec<f64>>,
    pub control_interval: (f64, f64),
}

impl DiscreteHjbSolution {
    pub fn times(&self) -> Vec<f64> {
        self.slice_indices.iter().map(|&n| self.grid.t(n)).collect()
    }

    pub fn initial_values(&self) -> &[f64] {
        &self.values[0]
    }

    pub fn initial_minimizers(&self) -> &[f64] {
        &self.minimizers[0]
    }
}

struct NodeTables {
    // row-major [node][control]
    drift: Vec<f64>,
    half_var: Vec<f64>,
    cost: Vec<f64>,
}

#[derive(Clone, Copy)]
struct NodeDerivs {
    d2: f64,
    central: f64,
    forward: f64,
    backward: f64,
}

pub fn solve_hjb_1d(problem: &HjbProblem1D, grid: &Grid1D) -> Result<DiscreteHjbSolution> {
    solve_hjb_1d_with(problem, grid, DEFAULT_MAX_SLICES)
}

/// As [`solve_hjb_1d`], storing at most about `max_slices` time slices.
pub fn solve_hjb_1d_with(problem: &HjbProblem1D, grid: &Grid1D, max_slices: usize) -> Result<DiscreteHjbSolution> {
    let (c1, c2) = problem.control_interval;
    if !(c1 <= c2) {
        return Err(Error::invalid("control_interval", format!("need c1 <= c2, got [{c1}, {c2}]")));
    }
    let required = required_time_steps(problem, grid);
    if grid.n_t < required {
        return Err(Error::StabilityBound {
            given: grid.n_t,
            required,
        });
    }

    let nx = grid.n_x;
    let dx = grid.dx();
    let dt = grid.dt();
    let xs = grid.xs();
    let us = problem.controls();
    let nu = us.len();

    let mut tables = NodeTables {
        drift: Vec::with_capacity(xs.len() * nu),
        half_var: Vec::with_capacity(xs.len() * nu),
        cost: Vec::with_capacity(xs.len() * nu),
    };
    for &x in &xs {
        for &u in &us {
            let s = (problem.diffusion)(x, u);
            let b = (problem.drift)(x, u);
            let f = (problem.running_cost)(x, u);
            if !(s.is_finite() && b.is_finite() && f.is_finite()) {
                return Err(Error::NonFinite {
                    what: "HJB coefficients",
                    x: vec![x],
                    u: vec![u],
                });
            }
            tables.drift.push(b);
            tables.half_var.push(0.5 * s * s);
            tables.cost.push(f);
        }
    }

    let stride = (grid.n_t + 1).div_ceil(max_slices.max(2) - 1).max(1);
    let stored = |n: usize| n == 0 || n == grid.n_t || n.is_multiple_of(stride);

    let mut v: Vec<f64> = xs.iter().map(|&x| (problem.terminal_cost)(x)).collect();
    let upper_value = v[nx];
    let mut values_rev = vec![v.clone()];
    let mut minimizers_rev = Vec::new();
    let mut slice_rev = vec![grid.n_t];

    let mut next = vec![0.0; nx + 1];
    let mut argmin = vec![0.0; nx + 1];

    for n in (0..grid.n_t).rev() {
        let derivs = |i: usize| -> NodeDerivs {
            if i == 0 {
                let d2_1 = (v[2] - 2.0 * v[1] + v[0]) / (dx * dx);
                let d2_2 = (v[3] - 2.0 * v[2] + v[1]) / (dx * dx);
                let d1 = (-3.0 * v[0] + 4.0 * v[1] - v[2]) / (2.0 * dx);
                NodeDerivs {
                    d2: 2.0 * d2_1 - d2_2,
                    central: d1,
                    forward: d1,
                    backward: d1,
                }
            } else if i == nx {
                let d1 = (v[nx] - v[nx - 1]) / dx;
                NodeDerivs {
                    d2: (v[nx] - 2.0 * v[nx - 1] + v[nx - 2]) / (dx * dx),
                    central: d1,
                    forward: d1,
                    backward: d1,
                }
            } else {
                NodeDerivs {
                    d2: (v[i + 1] - 2.0 * v[i] + v[i - 1]) / (dx * dx),
                    central: (v[i + 1] - v[i - 1]) / (2.0 * dx),
                    forward: (v[i + 1] - v[i]) / dx,
                    backward: (v[i] - v[i - 1]) / dx,
                }
            }
        };

        next.par_iter_mut()
            .zip(argmin.par_iter_mut())
            .enumerate()
            .for_each(|(i, (out, arg))| {
                let d = derivs(i);
                let (h, u) = minimize_node(problem, &tables, &us, xs[i], i, d, dx);
                *arg = u;
                *out = if i == nx { upper_value } else { v[i] + dt * h };
            });

        if problem.lower_boundary == LowerBoundary::ValueExtrapolation {
            next[0] = 3.0 * next[1] - 3.0 * next[2] + next[3];
        }
        if let Some(i) = next.iter().position(|val| !val.is_finite()) {
            return Err(Error::HjbDiverged { t_index: n, x: xs[i] });
        }
        std::mem::swap(&mut v, &mut next);
        if stored(n) {
            values_rev.push(v.clone());
            minimizers_rev.push(argmin.clone());
            slice_rev.push(n);
        }
    }

    values_rev.reverse();
    minimizers_rev.reverse();
    slice_rev.reverse();
    Ok(DiscreteHjbSolution {
        grid: *grid,
        slice_indices: slice_rev,
        values: values_rev,
        minimizers: minimizers_rev,
        control_interval: (c1, c2),
    })
}

fn upwind_hamiltonian(half_var: f64, drift: f64, cost: f64, d: NodeDerivs, dx: f64) -> f64 {
    let dv = if 2.0 * half_var >= dx * drift.abs() {
        d.central
    } else if drift > 0.0 {
        d.forward
    } else if drift < 0.0 {
        d.backward
    } else {
        0.0
    };
    half_var * d.d2 + drift * dv + cost
}

fn minimize_node(
    problem: &HjbProblem1D,
    tables: &NodeTables,
    us: &[f64],
    x: f64,
    i: usize,
    d: NodeDerivs,
    dx: f64,
) -> (f64, f64) {
    let nu = us.len();
    let row = i * nu;
    let mut best_h = f64::INFINITY;
    let mut best_u = us[0];
    for (j, &u) in us.iter().enumerate() {
        let h = upwind_hamiltonian(tables.half_var[row + j], tables.drift[row + j], tables.cost[row + j], d, dx);
        if h < best_h {
            best_h = h;
            best_u = u;
        }
    }

    if d.d2 > 0.0 {
        // Vertex of the centred Hamiltonian through three control samples.
        let (c1, c2) = problem.control_interval;
        let mid = 0.5 * (c1 + c2);
        let half = 0.5 * (c2 - c1);
        if half > 0.0 {
            let hc = |u: f64| {
                let s = (problem.diffusion)(x, u);
                0.5 * s * s * d.d2 + (problem.drift)(x, u) * d.central + (problem.running_cost)(x, u)
            };
            let (h_lo, h_mid, h_hi) = (hc(c1), hc(mid), hc(c2));
            let curvature = (h_lo - 2.0 * h_mid + h_hi) / (half * half);
            if curvature > 0.0 {
                let slope = (h_hi - h_lo) / (2.0 * half);
                let u_star = (mid - slope / curvature).clamp(c1, c2);
                let s = (problem.diffusion)(x, u_star);
                let h = upwind_hamiltonian(
                    0.5 * s * s,
                    (problem.drift)(x, u_star),
                    (problem.running_cost)(x, u_star),
                    d,
                    dx,
                );
                if h < best_h || (h == best_h && u_star < best_u) {
                    best_h = h;
                    best_u = u_star;
                }
            }
        }
    }
    (best_h, best_u)
}

/// `u^c(x;T)`: the `t = 0` minimiser slice, linearly interpolated in `x`, clamped to the
/// control interval, and held at the end values outside the grid.
pub fn extract_rhc(solution: &DiscreteHjbSolution) -> RhcPolicy {
    let grid = solution.grid;
    let slice = solution.initial_minimizers().to_vec();
    let (c1, c2) = solution.control_interval;
    let law = move |x: &DVector<f64>, _horizon: f64| {
        let u = interpolate(&grid, &slice, x[0]).clamp(c1, c2);
        DVector::from_element(1, u)
    };
    RhcPolicy::new(grid.horizon, law)
}

fn interpolate(grid: &Grid1D, ys: &[f64], x: f64) -> f64 {
    if x <= grid.x_min {
        return ys[0];
    }
    if x >= grid.x_max {
        return ys[grid.n_x];
    }
    let s = (x - grid.x_min) / grid.dx();
    let i = (s.floor() as usize).min(grid.n_x - 1);
    let w = s - i as f64;
    ys[i] * (1.0 - w) + ys[i + 1] * w
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComparisonReport {
    pub window: (f64, f64),
    pub nodes: usize,
    pub max_rel_error: f64,
    pub mean_rel_error: f64,
    pub worst_x: f64,
    pub target_minimizer: f64,
    pub max_minimizer_rel_dev: f64,
    pub mean_minimizer_rel_dev: f64,
}

impl ComparisonReport {
    pub fn within(&self, value_tol: f64, minimizer_tol: f64) -> bool {
        self.nodes > 0 && self.max_rel_error <= value_tol && self.max_minimizer_rel_dev <= minimizer_tol
    }
}

/// Default comparison window: drops 25% of the domain next to `x_min` and the
/// nodes closest to the Dirichlet end.
pub fn default_window(grid: &Grid1D) -> (f64, f64) {
    let width = grid.x_max - grid.x_min;
    (grid.x_min + 0.25 * width, grid.x_max - 0.025 * width)
}

/// Relative errors of the `t = 0` slice against the closed form, and of the `t = 0`
/// minimisers against the Merton fraction, over nodes inside `window`.
pub fn compare_to_closed_form(
    solution: &DiscreteHjbSolution,
    problem: &DebtProblem,
    variant: CostVariant,
    window: (f64, f64),
) -> ComparisonReport {
    let grid = solution.grid;
    let target = problem.merton_fraction();
    let mut errs = Vec::new();
    let mut devs = Vec::new();
    let mut worst_x = f64::NAN;
    let mut worst = 0.0;
    for (i, x) in grid.xs().into_iter().enumerate() {
        if x < window.0 || x > window.1 {
            continue;
        }
        let exact = value_closed_form(problem, 0.0, x, variant);
        let e = (solution.values[0][i] - exact).abs() / exact.abs();
        if e > worst {
            worst = e;
            worst_x = x;
        }
        errs.push(e);
        devs.push((solution.minimizers[0][i] - target).abs() / target.abs());
    }
    let mean = |v: &[f64]| if v.is_empty() { f64::NAN } else { v.iter().sum::<f64>() / v.len() as f64 };
    ComparisonReport {
        window,
        nodes: errs.len(),
        max_rel_error: errs.iter().copied().fold(0.0, f64::max),
        mean_rel_error: mean(&errs),
        worst_x,
        target_minimizer: target,
        max_minimizer_rel_dev: devs.iter().copied().fold(0.0, f64::max),
        mean_minimizer_rel_dev: mean(&devs),
    }
}
