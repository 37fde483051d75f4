use nalgebra::DVector;

use super::{euler_maruyama_step, ControlledSde, NoiseSource, TimeGrid};
use crate::error::{Error, Result};
use crate::value_rhc::RhcPolicy;

/// Post-step handling of a scalar state that crosses the origin.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Absorption {
    #[default]
    None,
    /// A scalar state stepping from `< 0` to `>= 0` is pinned at 0 for the rest of the path.
    /// Only discretisation overshoot triggers this; exact GBM paths never cross.
    AtOrigin,
}

/// A simulated trajectory on a [`TimeGrid`].
///
/// A complete path has `n_steps + 1` states and times and `n_steps` controls and noise
/// increments. A path whose state became non-finite is truncated after the last finite
/// state and carries `diverged_at`.
#[derive(Debug, Clone, PartialEq)]
pub struct SamplePath {
    pub times: Vec<f64>,
    pub states: Vec<DVector<f64>>,
    pub controls: Vec<DVector<f64>>,
    pub noise_increments: Vec<DVector<f64>>,
    /// Step index at which the state was absorbed at the origin.
    pub absorbed_at: Option<usize>,
    /// Step index whose update produced a non-finite state.
    pub diverged_at: Option<usize>,
}

impl SamplePath {
    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    /// First state component along the path.
    pub fn scalar_states(&self) -> Vec<f64> {
        self.states.iter().map(|s| s[0]).collect()
    }

    pub fn is_complete(&self) -> bool {
        self.diverged_at.is_none()
    }
}

/// Closed-loop Euler–Maruyama path under `policy`, driven by `noise`.
pub fn simulate_closed_loop(
    sde: &ControlledSde,
    policy: &RhcPolicy,
    x0: &DVector<f64>,
    grid: &TimeGrid,
    noise: &NoiseSource,
    absorption: Absorption,
) -> Result<SamplePath> {
    let increments = noise.increments(grid.dt(), grid.n_steps(), sde.noise_dim());
    simulate_closed_loop_with_increments(sde, policy, x0, grid, increments, absorption)
}

/// As [`simulate_closed_loop`], with caller-supplied Wiener increments (one per step).
pub fn simulate_closed_loop_with_increments(
    sde: &ControlledSde,
    policy: &RhcPolicy,
    x0: &DVector<f64>,
    grid: &TimeGrid,
    increments: Vec<DVector<f64>>,
    absorption: Absorption,
) -> Result<SamplePath> {
    if x0.len() != sde.state_dim() {
        return Err(Error::Dimension {
            what: "initial state",
            expected: sde.state_dim(),
            got: x0.len(),
        });
    }
    if increments.len() != grid.n_steps() {
        return Err(Error::Dimension {
            what: "noise increments",
            expected: grid.n_steps(),
            got: increments.len(),
        });
    }
    if absorption == Absorption::AtOrigin && sde.state_dim() != 1 {
        return Err(Error::invalid("absorption", "origin absorption needs a scalar state"));
    }

    let n = grid.n_steps();
    let mut states = Vec::with_capacity(n + 1);
    let mut controls = Vec::with_capacity(n);
    let mut absorbed_at = None;
    let mut diverged_at = None;
    states.push(x0.clone());

    for (k, dw) in increments.iter().enumerate() {
        let x = &states[k];
        let u = policy.control(x);
        if !sde.control_set().contains(&u) {
            return Err(Error::Infeasible(format!(
                "policy returned {:?} at x = {:?}, outside the control set",
                u.as_slice(),
                x.as_slice()
            )));
        }
        // Overflowing coefficients at a finite state count as divergence too.
        let step = match euler_maruyama_step(sde, x, &u, grid.dt(), dw) {
            Ok(next) => Some(next),
            Err(Error::NonFinite { .. }) => None,
            Err(e) => return Err(e),
        };
        controls.push(u);
        let mut next = match step {
            Some(next) if next.iter().all(|v| v.is_finite()) => next,
            _ => {
                diverged_at = Some(k);
                break;
            }
        };
        if absorption == Absorption::AtOrigin
            && absorbed_at.is_none()
            && x[0] < 0.0
            && next[0] >= 0.0
        {
            next[0] = 0.0;
            absorbed_at = Some(k + 1);
        }
        states.push(next);
    }

    let mut noise_increments = increments;
    noise_increments.truncate(controls.len());
    Ok(SamplePath {
        times: (0..states.len()).map(|k| grid.time(k)).collect(),
        states,
        controls,
        noise_increments,
        absorbed_at,
        diverged_at,
    })
}

/// Exact geometric Brownian motion `x0·exp(a·t + s·W_t)` sampled on the grid, with `W`
/// the cumulative sum of the noise stream's increments. Controls are left empty
/// (zero-dimensional); see [`SamplePath`].
pub fn simulate_exact_gbm(
    log_drift: f64,
    log_diffusion: f64,
    x0: f64,
    grid: &TimeGrid,
    noise: &NoiseSource,
) -> Result<SamplePath> {
    let increments = noise.increments(grid.dt(), grid.n_steps(), 1);
    simulate_exact_gbm_with_increments(log_drift, log_diffusion, x0, grid, increments)
}

pub fn simulate_exact_gbm_with_increments(
    log_drift: f64,
    log_diffusion: f64,
    x0: f64,
    grid: &TimeGrid,
    increments: Vec<DVector<f64>>,
) -> Result<SamplePath> {
    if increments.len() != grid.n_steps() {
        return Err(Error::Dimension {
            what: "noise increments",
            expected: grid.n_steps(),
            got: increments.len(),
        });
    }
    let mut states = Vec::with_capacity(grid.n_steps() + 1);
    states.push(DVector::from_element(1, x0));
    let mut w = 0.0;
    for (k, dw) in increments.iter().enumerate() {
        w += dw[0];
        // elapsed time since the grid start
        let t = (k + 1) as f64 * grid.dt();
        let exponent = log_drift * t + log_diffusion * w;
        let growth = exponent.exp();
        if !exponent.is_finite() || !growth.is_finite() {
            return Err(Error::Overflow { step: k + 1 });
        }
        states.push(DVector::from_element(1, x0 * growth));
    }
    Ok(SamplePath {
        times: grid.times(),
        states,
        controls: vec![DVector::zeros(0); grid.n_steps()],
        noise_increments: increments,
        absorbed_at: None,
        diverged_at: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sde::ControlSet;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn wealth(u_lo: f64) -> ControlledSde {
        let (r, b, sigma) = (0.03, 0.1, 0.15);
        ControlledSde::scalar(
            move |x, u| (r + (b - r) * u) * x,
            move |x, u| sigma * u * x,
            ControlSet::interval(u_lo, 0.0).unwrap(),
        )
    }

    fn v(x: f64) -> DVector<f64> {
        DVector::from_element(1, x)
    }

    #[test]
    fn origin_stays_put() {
        let sde = wealth(-3.0);
        let policy = RhcPolicy::constant(1.0, v(-2.828));
        let grid = TimeGrid::new(0.0, 0.01, 500).unwrap();
        let path = simulate_closed_loop(
            &sde,
            &policy,
            &v(0.0),
            &grid,
            &NoiseSource::new(1, 0),
            Absorption::None,
        )
        .unwrap();
        assert!(path.states.iter().all(|s| s[0] == 0.0));
        assert_eq!(path.states.len(), 501);
        assert_eq!(path.controls.len(), 500);
        assert_eq!(path.noise_increments.len(), 500);
    }

    #[test]
    fn same_noise_same_path() {
        let sde = wealth(-3.0);
        let policy = RhcPolicy::constant(1.0, v(-2.5));
        let grid = TimeGrid::new(0.0, 0.01, 300).unwrap();
        let run = || {
            simulate_closed_loop(
                &sde,
                &policy,
                &v(-100.0),
                &grid,
                &NoiseSource::new(42, 3),
                Absorption::AtOrigin,
            )
            .unwrap()
        };
        assert_eq!(run(), run());
    }

    #[test]
    fn divergence_truncates_with_flag() {
        let sde = ControlledSde::scalar(
            |x, _| x * x,
            |_, _| 0.0,
            ControlSet::interval(0.0, 0.0).unwrap(),
        );
        let policy = RhcPolicy::constant(1.0, v(0.0));
        let grid = TimeGrid::new(0.0, 1.0, 50).unwrap();
        let path = simulate_closed_loop(
            &sde,
            &policy,
            &v(10.0),
            &grid,
            &NoiseSource::new(0, 0),
            Absorption::None,
        )
        .unwrap();
        let k = path.diverged_at.expect("should diverge");
        assert_eq!(path.states.len(), k + 1);
        assert!(path.states.iter().all(|s| s[0].is_finite()));
    }

    #[test]
    fn overshoot_is_absorbed() {
        // A deliberately huge step drives the state across zero.
        let sde = ControlledSde::scalar(
            |_, _| 1.0,
            |_, _| 0.0,
            ControlSet::interval(0.0, 0.0).unwrap(),
        );
        let policy = RhcPolicy::constant(1.0, v(0.0));
        let grid = TimeGrid::new(0.0, 0.4, 10).unwrap();
        let path = simulate_closed_loop(
            &sde,
            &policy,
            &v(-1.0),
            &grid,
            &NoiseSource::new(0, 0),
            Absorption::AtOrigin,
        )
        .unwrap();
        assert_eq!(path.absorbed_at, Some(3));
        assert_eq!(path.states[3][0], 0.0);
    }

    #[test]
    fn infeasible_policy_is_rejected() {
        let sde = wealth(-2.0);
        let policy = RhcPolicy::constant(1.0, v(-2.828));
        let grid = TimeGrid::new(0.0, 0.01, 5).unwrap();
        assert!(simulate_closed_loop(
            &sde,
            &policy,
            &v(-1.0),
            &grid,
            &NoiseSource::new(0, 0),
            Absorption::None
        )
        .is_err());
    }

    #[test]
    fn exact_gbm_degenerate_and_zero_noise() {
        let grid = TimeGrid::new(0.0, 0.01, 100).unwrap();
        let flat = simulate_exact_gbm(0.0, 0.0, -100.0, &grid, &NoiseSource::new(1, 1)).unwrap();
        assert!(flat.states.iter().all(|s| s[0] == -100.0));

        let zero = vec![DVector::zeros(1); 100];
        let p = simulate_exact_gbm_with_increments(-0.257971, -0.424242, -100.0, &grid, zero)
            .unwrap();
        assert_relative_eq!(p.states[100][0], -100.0 * (-0.257971f64).exp(), max_relative = 1e-12);
        assert_relative_eq!(p.states[100][0], -77.2618, epsilon = 1e-4);
    }

    #[test]
    fn exact_gbm_overflow_raises() {
        let grid = TimeGrid::new(0.0, 1.0, 10).unwrap();
        let r = simulate_exact_gbm(1000.0, 0.0, -1.0, &grid, &NoiseSource::new(0, 0));
        assert!(matches!(r, Err(Error::Overflow { .. })));
    }

    proptest! {
        #[test]
        fn exact_gbm_keeps_sign(seed in any::<u64>(), a in -1.0..1.0f64, s in -1.0..1.0f64) {
            let grid = TimeGrid::new(0.0, 0.05, 200).unwrap();
            let p = simulate_exact_gbm(a, s, -100.0, &grid, &NoiseSource::new(seed, 0)).unwrap();
            prop_assert!(p.states.iter().all(|x| x[0] < 0.0));
        }
    }
}
