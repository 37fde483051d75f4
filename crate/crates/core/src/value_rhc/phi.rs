use nalgebra::DVector;

use super::{RhcPolicy, RunningCost, ValueFunction};
use crate::error::{Error, Result};

fn check_horizon(horizon: f64) -> Result<()> {
    if horizon > 0.0 && horizon.is_finite() {
        Ok(())
    } else {
        Err(Error::invalid("horizon", format!("must be positive, got {horizon}")))
    }
}

/// `φ(x;T) = -∂_H V(x;H)|_{H=T} + f(x, u^c(x;T))`, the rate at which `V` decreases along
/// the closed loop.
pub fn phi_of(
    value: &dyn ValueFunction,
    cost: &RunningCost,
    policy: &RhcPolicy,
    x: &DVector<f64>,
    horizon: f64,
) -> Result<f64> {
    let dh = horizon_monotonicity(value, x, horizon)?;
    let u = policy.control_at(x, horizon);
    let f = cost.running(x, &u);
    let phi = -dh + f;
    if !phi.is_finite() {
        return Err(Error::NonFinite {
            what: "phi",
            x: x.iter().copied().collect(),
            u: u.iter().copied().collect(),
        });
    }
    Ok(phi)
}

/// `∂_H V(x;H)` at `H = T`. A nonpositive value makes `φ(x;T) ≥ f(x,u^c)`.
pub fn horizon_monotonicity(value: &dyn ValueFunction, x: &DVector<f64>, horizon: f64) -> Result<f64> {
    check_horizon(horizon)?;
    let dh = value.horizon_derivative(x, horizon);
    if !dh.is_finite() {
        return Err(Error::NonFinite {
            what: "horizon derivative",
            x: x.iter().copied().collect(),
            u: Vec::new(),
        });
    }
    Ok(dh)
}
