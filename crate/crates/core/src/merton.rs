//! Debt repayment as a Merton-type portfolio problem.
//!
//! Wealth `X < 0` is split between a bank account (rate `r`) and a stock (drift `b`,
//! volatility `σ`), with `u` the fraction of wealth held in the stock:
//!
//! ```text
//! dX = [r + (b - r) u] X dt + σ u X dW,      u ∈ [c1, c2],  c1 < 0 ≤ c2
//! ```
//!
//! With cost `(-x)^β` (β > 2) on `x ≤ 0`, either as a running cost or as a terminal
//! cost, the value function is `(-x)^β` times a time profile and the minimiser is the
//! constant Merton fraction `-(b - r) / ((β - 1) σ²)`. Under that constant law the
//! closed loop is a geometric Brownian motion.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sde::{ControlSet, ControlledSde};
use crate::value_rhc::{RhcPolicy, RunningCost, ValueFunction};

/// Below this `|η|` the profile `w` uses its `η → 0` limit.
pub const ETA_DEGENERATE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MarketParams {
    /// Risk-free rate, per year.
    pub r: f64,
    /// Stock drift, per year.
    #[serde(rename = "b")]
    pub b_drift: f64,
    /// Stock volatility, per square-root year.
    pub sigma: f64,
}

impl Default for MarketParams {
    fn default() -> Self {
        Self {
            r: 0.03,
            b_drift: 0.1,
            sigma: 0.15,
        }
    }
}

impl MarketParams {
    pub fn new(r: f64, b_drift: f64, sigma: f64) -> Result<Self> {
        let m = Self { r, b_drift, sigma };
        m.validate()?;
        Ok(m)
    }

    /// Requires `b > r > 0` and `σ ≠ 0`.
    pub fn validate(&self) -> Result<()> {
        if !(self.r > 0.0 && self.r.is_finite()) {
            return Err(Error::invalid("market.r", format!("need r > 0, got {}", self.r)));
        }
        if !(self.b_drift > self.r && self.b_drift.is_finite()) {
            return Err(Error::invalid(
                "market.b",
                format!("need b > r = {}, got {}", self.r, self.b_drift),
            ));
        }
        if self.sigma == 0.0 || !self.sigma.is_finite() {
            return Err(Error::invalid("market.sigma", format!("need sigma != 0, got {}", self.sigma)));
        }
        Ok(())
    }

    pub fn excess_return(&self) -> f64 {
        self.b_drift - self.r
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum CostVariant {
    /// `f = (-x)^β`, `g = 0`.
    #[default]
    Running,
    /// `f = 0`, `g = (-x)^β`.
    Terminal,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DebtProblem {
    pub market: MarketParams,
    pub beta: f64,
    /// Receding horizon `T`, years.
    pub horizon: f64,
    pub c1: f64,
    pub c2: f64,
    pub x0: f64,
}

impl Default for DebtProblem {
    fn default() -> Self {
        Self {
            market: MarketParams::default(),
            beta: 2.1,
            horizon: 1.0,
            c1: -3.0,
            c2: 0.0,
            x0: -100.0,
        }
    }
}

impl DebtProblem {
    pub fn validate(&self) -> Result<()> {
        self.market.validate()?;
        if !(self.beta > 2.0 && self.beta.is_finite()) {
            return Err(Error::invalid("problem.beta", format!("need beta > 2, got {}", self.beta)));
        }
        if !(self.horizon > 0.0 && self.horizon.is_finite()) {
            return Err(Error::invalid("problem.T", format!("need T > 0, got {}", self.horizon)));
        }
        if !(self.c1 < 0.0) {
            return Err(Error::invalid("problem.c1", format!("need c1 < 0, got {}", self.c1)));
        }
        if !(self.c2 >= 0.0 && self.c2.is_finite()) {
            return Err(Error::invalid("problem.c2", format!("need c2 >= 0, got {}", self.c2)));
        }
        if !(self.x0 < 0.0 && self.x0.is_finite()) {
            return Err(Error::invalid("problem.x0", format!("need x0 < 0, got {}", self.x0)));
        }
        Ok(())
    }

    pub fn eta(&self) -> f64 {
        eta(&self.market, self.beta)
    }

    pub fn merton_fraction(&self) -> f64 {
        merton_fraction(&self.market, self.beta)
    }

    pub fn control_set(&self) -> ControlSet {
        ControlSet::interval(self.c1, self.c2).expect("validated c1 < 0 <= c2")
    }

    pub fn feasibility(&self) -> FeasibilityReport {
        constraint_feasible(&self.market, self.beta, self.c1, self.c2)
    }

    /// Closed loop under the constant Merton fraction; errors if the fraction is not admissible.
    pub fn rhc_policy(&self) -> Result<RhcPolicy> {
        let report = self.feasibility();
        if !report.fraction_in_bounds {
            return Err(Error::Infeasible(report.describe()));
        }
        Ok(RhcPolicy::constant(
            self.horizon,
            DVector::from_element(1, report.merton_fraction),
        ))
    }

    pub fn wealth_sde(&self) -> ControlledSde {
        wealth_sde(&self.market, self.control_set())
    }

    pub fn value_function(&self, variant: CostVariant) -> MertonValue {
        MertonValue {
            eta: self.eta(),
            beta: self.beta,
            variant,
        }
    }

    pub fn cost(&self, variant: CostVariant) -> RunningCost {
        debt_cost(self.beta, variant)
    }
}

/// `η = β(b-r)² / (2(β-1)σ²) - βr`.
pub fn eta(market: &MarketParams, beta: f64) -> f64 {
    let ex = market.excess_return();
    beta * ex * ex / (2.0 * (beta - 1.0) * market.sigma * market.sigma) - beta * market.r
}

/// `-(b - r) / ((β - 1) σ²)`, independent of state, time and horizon.
pub fn merton_fraction(market: &MarketParams, beta: f64) -> f64 {
    -market.excess_return() / ((beta - 1.0) * market.sigma * market.sigma)
}

/// `w(t) = (1 - e^{η(t-T)}) / η`, or `T - t` when `|η| < 1e-12`.
pub fn w_profile(eta: f64, t: f64, horizon: f64) -> f64 {
    let tau = t - horizon;
    if eta.abs() < ETA_DEGENERATE {
        -tau
    } else {
        -(eta * tau).exp_m1() / eta
    }
}

/// `(-x)^β` on `x ≤ 0`, zero on `x > 0`.
pub fn debt_power(x: f64, beta: f64) -> f64 {
    if x < 0.0 {
        (beta * (-x).ln()).exp()
    } else {
        0.0
    }
}

/// `v(t, x; T)` for the chosen cost variant.
pub fn value_closed_form(problem: &DebtProblem, t: f64, x: f64, variant: CostVariant) -> f64 {
    let eta = problem.eta();
    debt_power(x, problem.beta) * time_profile(eta, t, problem.horizon, variant)
}

fn time_profile(eta: f64, t: f64, horizon: f64, variant: CostVariant) -> f64 {
    match variant {
        CostVariant::Running => w_profile(eta, t, horizon),
        CostVariant::Terminal => (eta * (t - horizon)).exp(),
    }
}

fn time_profile_dt(eta: f64, t: f64, horizon: f64, variant: CostVariant) -> f64 {
    match variant {
        CostVariant::Running => -(eta * (t - horizon)).exp(),
        CostVariant::Terminal => eta * (eta * (t - horizon)).exp(),
    }
}

/// `v`, `∂_t v`, `Dv`, `D²v` of the closed form at `(t, x)`.
pub fn value_derivatives(problem: &DebtProblem, t: f64, x: f64, variant: CostVariant) -> [f64; 4] {
    if x >= 0.0 {
        return [0.0; 4];
    }
    let beta = problem.beta;
    let eta = problem.eta();
    let p = time_profile(eta, t, problem.horizon, variant);
    let dp = time_profile_dt(eta, t, problem.horizon, variant);
    let y = -x;
    [
        debt_power(x, beta) * p,
        debt_power(x, beta) * dp,
        -beta * y.powf(beta - 1.0) * p,
        beta * (beta - 1.0) * y.powf(beta - 2.0) * p,
    ]
}

/// Open interval of `β` where the stability assumptions hold for this market.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BetaWindow {
    pub lower: f64,
    pub upper: f64,
}

impl BetaWindow {
    pub fn is_empty(&self) -> bool {
        !(self.upper > self.lower)
    }

    pub fn contains(&self, beta: f64) -> bool {
        !self.is_empty() && beta > self.lower && beta < self.upper
    }
}

/// `(2, 1 + (b-r)² / (2rσ²))`; the upper end is where `η` changes sign.
pub fn beta_stability_range(market: &MarketParams) -> BetaWindow {
    let ex = market.excess_return();
    BetaWindow {
        lower: 2.0,
        upper: 1.0 + ex * ex / (2.0 * market.r * market.sigma * market.sigma),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FeasibilityReport {
    pub merton_fraction: f64,
    pub c1: f64,
    pub c2: f64,
    /// `ũ ∈ [c1, c2]`.
    pub fraction_in_bounds: bool,
    /// `1 + (b-r)/(|c1|σ²)`.
    pub beta_threshold: f64,
    /// `β > beta_threshold`.
    pub beta_above_threshold: bool,
    /// `2r/(b-r)`.
    pub c1_threshold: f64,
    /// `|c1| > c1_threshold`: some `β` in the stability window satisfies the constraint.
    pub c1_admits_stable_beta: bool,
}

impl FeasibilityReport {
    pub fn feasible(&self) -> bool {
        self.fraction_in_bounds
    }

    pub fn describe(&self) -> String {
        if self.fraction_in_bounds {
            format!(
                "merton fraction {:.6} lies in [{}, {}]",
                self.merton_fraction, self.c1, self.c2
            )
        } else {
            format!(
                "merton fraction {:.6} outside [{}, {}]; need beta > {:.6} for this c1",
                self.merton_fraction, self.c1, self.c2, self.beta_threshold
            )
        }
    }
}

/// The three constraint conditions, each computed on its own.
pub fn constraint_feasible(market: &MarketParams, beta: f64, c1: f64, c2: f64) -> FeasibilityReport {
    let u = merton_fraction(market, beta);
    let ex = market.excess_return();
    let s2 = market.sigma * market.sigma;
    let beta_threshold = 1.0 + ex / (c1.abs() * s2);
    let c1_threshold = 2.0 * market.r / ex;
    FeasibilityReport {
        merton_fraction: u,
        c1,
        c2,
        fraction_in_bounds: c1 <= u && u <= c2,
        beta_threshold,
        beta_above_threshold: beta > beta_threshold,
        c1_threshold,
        c1_admits_stable_beta: c1.abs() > c1_threshold,
    }
}

/// `(a, s)` with `X_t = x0·exp(a·t + s·W_t)` under the Merton fraction.
pub fn exact_solution_exponents(market: &MarketParams, beta: f64) -> (f64, f64) {
    let ex = market.excess_return();
    let s2 = market.sigma * market.sigma;
    let bm1 = beta - 1.0;
    let log_drift = market.r - (2.0 * beta - 1.0) * ex * ex / (2.0 * bm1 * bm1 * s2);
    let log_diffusion = -ex / (bm1 * market.sigma);
    (log_drift, log_diffusion)
}

/// `dX = [r + (b-r)u] X dt + σ u X dW`.
pub fn wealth_sde(market: &MarketParams, control_set: ControlSet) -> ControlledSde {
    let MarketParams { r, b_drift, sigma } = *market;
    ControlledSde::scalar(
        move |x, u| (r + (b_drift - r) * u) * x,
        move |x, u| sigma * u * x,
        control_set,
    )
}

pub fn debt_cost(beta: f64, variant: CostVariant) -> RunningCost {
    match variant {
        CostVariant::Running => RunningCost::scalar(move |x, _| debt_power(x, beta), |_| 0.0),
        CostVariant::Terminal => RunningCost::scalar(|_, _| 0.0, move |x| debt_power(x, beta)),
    }
}

/// `V(x;T) = v(0, x; T)` in closed form.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MertonValue {
    pub eta: f64,
    pub beta: f64,
    pub variant: CostVariant,
}

impl MertonValue {
    fn profile(&self, horizon: f64) -> f64 {
        time_profile(self.eta, 0.0, horizon, self.variant)
    }

    /// `φ(x;T) = (-x)^β (1 - e^{-ηT})` (running) or `η e^{-ηT} (-x)^β` (terminal).
    pub fn phi(&self, x: f64, horizon: f64) -> f64 {
        let p = debt_power(x, self.beta);
        match self.variant {
            CostVariant::Running => -p * (-self.eta * horizon).exp_m1(),
            CostVariant::Terminal => self.eta * (-self.eta * horizon).exp() * p,
        }
    }
}

impl ValueFunction for MertonValue {
    fn evaluate(&self, x: &DVector<f64>, horizon: f64) -> f64 {
        debt_power(x[0], self.beta) * self.profile(horizon)
    }

    fn gradient(&self, x: &DVector<f64>, horizon: f64) -> DVector<f64> {
        let g = if x[0] < 0.0 {
            -self.beta * (-x[0]).powf(self.beta - 1.0) * self.profile(horizon)
        } else {
            0.0
        };
        DVector::from_element(1, g)
    }

    fn hessian(&self, x: &DVector<f64>, horizon: f64) -> DMatrix<f64> {
        let h = if x[0] < 0.0 {
            self.beta * (self.beta - 1.0) * (-x[0]).powf(self.beta - 2.0) * self.profile(horizon)
        } else {
            0.0
        };
        DMatrix::from_element(1, 1, h)
    }

    fn horizon_derivative(&self, x: &DVector<f64>, horizon: f64) -> f64 {
        // ∂_T v(0,x;T) = -∂_t v(t,x;T) at t = 0
        let dp = match self.variant {
            CostVariant::Running => (-self.eta * horizon).exp(),
            CostVariant::Terminal => -self.eta * (-self.eta * horizon).exp(),
        };
        debt_power(x[0], self.beta) * dp
    }
}
