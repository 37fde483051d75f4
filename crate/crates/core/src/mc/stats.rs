//! Ensemble checks of the Lyapunov certificate: the mean of `V(X_t;T)` should not
//! increase, its running maximum should respect the supermartingale inequality, and
//! `E V(X_t) - V(x0) + ∫ E φ(X_s) ds` should vanish.
//!
//! Every reduction is a sequential sum over paths in index order, so results do not
//! depend on how paths were generated in parallel.

use nalgebra::DVector;
use serde::Serialize;

use super::Ensemble;
use crate::error::{Error, Result};
use crate::sde::SamplePath;
use crate::value_rhc::ValueFunction;

pub const DEFAULT_Z_THRESHOLD: f64 = 3.0;
pub const DEFAULT_BINOMIAL_SES: f64 = 2.0;

/// Mean and standard error of the mean.
pub(crate) fn mean_se(xs: &[f64]) -> (f64, f64) {
    let n = xs.len();
    if n == 0 {
        return (f64::NAN, f64::NAN);
    }
    let mean = xs.iter().sum::<f64>() / n as f64;
    if n == 1 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1) as f64;
    (mean, (var / n as f64).sqrt())
}

fn state_at(path: &SamplePath, index: usize, path_id: usize) -> Result<&DVector<f64>> {
    path.states.get(index).ok_or_else(|| {
        Error::invalid(
            "ensemble",
            format!("path {path_id} ends at step {} before step {index}", path.len().saturating_sub(1)),
        )
    })
}

fn grid_index(ensemble: &Ensemble, t: f64, what: &'static str) -> Result<usize> {
    let g = &ensemble.grid;
    let slack = 1e-9 * g.dt();
    if !(t >= g.t_start() - slack && t <= g.t_end() + slack) {
        return Err(Error::invalid(
            what,
            format!("time {t} outside the grid [{}, {}]", g.t_start(), g.t_end()),
        ));
    }
    Ok(g.index_of(t))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SupermartingaleTestResult {
    pub times: Vec<f64>,
    pub mean_v: Vec<f64>,
    pub std_err: Vec<f64>,
    /// Largest z-score of the paired mean increment between consecutive checkpoints.
    /// Negative when the mean decreases everywhere.
    pub max_violation_z: f64,
    pub z_threshold: f64,
    pub pass: bool,
}

/// Estimates `E V(X_t;T)` at the checkpoints (snapped to the grid) and flags any increase
/// between consecutive checkpoints whose paired z-score exceeds `z_threshold`.
pub fn test_supermartingale(
    ensemble: &Ensemble,
    value: &dyn ValueFunction,
    horizon: f64,
    checkpoints: &[f64],
    z_threshold: f64,
) -> Result<SupermartingaleTestResult> {
    if ensemble.is_empty() {
        return Err(Error::invalid("ensemble", "no paths"));
    }
    let mut indices = checkpoints
        .iter()
        .map(|&t| grid_index(ensemble, t, "checkpoints"))
        .collect::<Result<Vec<_>>>()?;
    indices.dedup();

    // v[c][i] = V at checkpoint c on path i
    let v = indices
        .iter()
        .map(|&k| {
            ensemble
                .paths
                .iter()
                .enumerate()
                .map(|(i, p)| Ok(value.evaluate(state_at(p, k, i)?, horizon)))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;

    let (mean_v, std_err): (Vec<_>, Vec<_>) = v.iter().map(|col| mean_se(col)).unzip();
    let mut max_z = f64::NEG_INFINITY;
    for pair in v.windows(2) {
        let diffs: Vec<f64> = pair[1].iter().zip(&pair[0]).map(|(b, a)| b - a).collect();
        let (m, se) = mean_se(&diffs);
        let z = if se > 0.0 {
            m / se
        } else if m > 0.0 {
            f64::INFINITY
        } else {
            0.0
        };
        max_z = max_z.max(z);
    }
    if !max_z.is_finite() && max_z < 0.0 {
        // a single checkpoint: nothing to compare
        max_z = 0.0;
    }
    Ok(SupermartingaleTestResult {
        times: indices.iter().map(|&k| ensemble.grid.time(k)).collect(),
        mean_v,
        std_err,
        max_violation_z: max_z,
        z_threshold,
        pass: max_z <= z_threshold,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TailBoundResult {
    pub lambdas: Vec<f64>,
    /// Fraction of paths whose grid maximum of `V` reaches `λ`.
    pub empirical_prob: Vec<f64>,
    pub std_err: Vec<f64>,
    /// `V(x0;T)/λ`.
    pub bound: Vec<f64>,
    pub pass: bool,
}

/// Compares `P[max_k V(X_{t_k};T) ≥ λ]` with `V(x0;T)/λ`, allowing `n_se` binomial
/// standard errors. The grid maximum can only under-estimate the continuous supremum.
pub fn test_tail_bound(
    ensemble: &Ensemble,
    value: &dyn ValueFunction,
    horizon: f64,
    lambdas: &[f64],
    n_se: f64,
) -> Result<TailBoundResult> {
    if ensemble.is_empty() {
        return Err(Error::invalid("ensemble", "no paths"));
    }
    if let Some(l) = lambdas.iter().find(|l| !(**l > 0.0)) {
        return Err(Error::invalid("lambdas", format!("must be positive, got {l}")));
    }
    let v0 = value.evaluate(&DVector::from_element(1, ensemble.problem.x0), horizon);
    let sups: Vec<f64> = ensemble
        .paths
        .iter()
        .map(|p| p.states.iter().map(|x| value.evaluate(x, horizon)).fold(f64::NEG_INFINITY, f64::max))
        .collect();
    let n = sups.len() as f64;
    let mut probs = Vec::with_capacity(lambdas.len());
    let mut ses = Vec::with_capacity(lambdas.len());
    let mut bounds = Vec::with_capacity(lambdas.len());
    let mut pass = true;
    for &lambda in lambdas {
        let p = sups.iter().filter(|&&s| s >= lambda).count() as f64 / n;
        let se = (p * (1.0 - p) / n).sqrt();
        let bound = v0 / lambda;
        pass &= p <= bound + n_se * se;
        probs.push(p);
        ses.push(se);
        bounds.push(bound);
    }
    Ok(TailBoundResult {
        lambdas: lambdas.to_vec(),
        empirical_prob: probs,
        std_err: ses,
        bound: bounds,
        pass,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PhiIdentityReport {
    pub t_end: f64,
    pub v0: f64,
    pub mean_terminal_v: f64,
    /// Trapezoidal `∫_0^{t_end} Ê φ(X_s) ds`.
    pub phi_integral: f64,
    pub residual: f64,
    /// `residual / V(x0;T)`; zero when `V(x0;T) = 0` and the residual vanishes.
    pub relative_residual: f64,
    /// Standard error of `relative_residual` across paths.
    pub relative_std_err: f64,
}

impl PhiIdentityReport {
    pub fn within(&self, tolerance: f64) -> bool {
        self.relative_residual.abs() <= tolerance
    }
}

/// `Ê V(X_{t_end};T) - V(x0;T) + ∫_0^{t_end} Ê φ(X_s;T) ds`.
pub fn test_phi_identity(
    ensemble: &Ensemble,
    value: &dyn ValueFunction,
    phi: &dyn Fn(&DVector<f64>) -> f64,
    horizon: f64,
    t_end: f64,
) -> Result<PhiIdentityReport> {
    if ensemble.is_empty() {
        return Err(Error::invalid("ensemble", "no paths"));
    }
    let k_end = grid_index(ensemble, t_end, "t_end")?;
    let dt = ensemble.grid.dt();
    let v0 = value.evaluate(&DVector::from_element(1, ensemble.problem.x0), horizon);

    let mut terminal = Vec::with_capacity(ensemble.len());
    let mut integrals = Vec::with_capacity(ensemble.len());
    for (i, p) in ensemble.paths.iter().enumerate() {
        terminal.push(value.evaluate(state_at(p, k_end, i)?, horizon));
        let mut integral = 0.0;
        for k in 0..k_end {
            integral += 0.5 * dt * (phi(&p.states[k]) + phi(&p.states[k + 1]));
        }
        integrals.push(integral);
    }
    let per_path: Vec<f64> = terminal.iter().zip(&integrals).map(|(v, s)| v - v0 + s).collect();
    let (mean_terminal_v, _) = mean_se(&terminal);
    let (phi_integral, _) = mean_se(&integrals);
    let (residual, se) = mean_se(&per_path);
    let (relative_residual, relative_std_err) = if v0 != 0.0 {
        (residual / v0, se / v0.abs())
    } else if residual == 0.0 {
        (0.0, 0.0)
    } else {
        (f64::INFINITY, f64::INFINITY)
    };
    Ok(PhiIdentityReport {
        t_end: ensemble.grid.time(k_end),
        v0,
        mean_terminal_v,
        phi_integral,
        residual,
        relative_residual,
        relative_std_err,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mc::{run_ensemble, Integrator};
    use crate::merton::{CostVariant, DebtProblem};
    use crate::sde::TimeGrid;
    use crate::value_rhc::ZeroValue;

    fn ensemble(n: usize, horizon: f64) -> Ensemble {
        let grid = TimeGrid::over(horizon, 0.01).unwrap();
        run_ensemble(&DebtProblem::default(), n, &grid, 42, Integrator::Exact).unwrap()
    }

    #[test]
    fn zero_value_is_a_trivial_supermartingale() {
        let e = ensemble(20, 1.0);
        let v = ZeroValue { dim: 1 };
        let r = test_supermartingale(&e, &v, 1.0, &[0.0, 0.5, 1.0], 3.0).unwrap();
        assert_eq!(r.max_violation_z, 0.0);
        assert!(r.pass);
        let t = test_tail_bound(&e, &v, 1.0, &[1.0], 2.0).unwrap();
        assert_eq!(t.empirical_prob, vec![0.0]);
        let phi = test_phi_identity(&e, &v, &|_| 0.0, 1.0, 1.0).unwrap();
        assert_eq!(phi.relative_residual, 0.0);
    }

    #[test]
    fn phi_identity_at_time_zero_is_exact() {
        let e = ensemble(10, 1.0);
        let p = e.problem;
        let v = p.value_function(CostVariant::Running);
        let r = test_phi_identity(&e, &v, &|x| v.phi(x[0], p.horizon), p.horizon, 0.0).unwrap();
        assert_eq!(r.residual, 0.0);
        assert_eq!(r.phi_integral, 0.0);
    }

    #[test]
    fn vacuous_tail_bound_passes() {
        let e = ensemble(50, 1.0);
        let v = e.problem.value_function(CostVariant::Running);
        let v0 = v.evaluate(&DVector::from_element(1, -100.0), 1.0);
        let r = test_tail_bound(&e, &v, 1.0, &[0.5 * v0, 1e300], 2.0).unwrap();
        assert_eq!(r.bound[0], 2.0);
        assert_eq!(r.empirical_prob[0], 1.0);
        assert_eq!(r.empirical_prob[1], 0.0);
        assert!(r.pass);
    }

    #[test]
    fn rejects_bad_inputs() {
        let e = ensemble(2, 1.0);
        let v = ZeroValue { dim: 1 };
        assert!(test_supermartingale(&e, &v, 1.0, &[2.0], 3.0).is_err());
        assert!(test_tail_bound(&e, &v, 1.0, &[0.0], 2.0).is_err());
        assert!(test_phi_identity(&e, &v, &|_| 0.0, 1.0, -0.5).is_err());
    }

    #[test]
    fn value_is_nonnegative_along_paths() {
        let e = ensemble(20, 2.0);
        let v = e.problem.value_function(CostVariant::Terminal);
        assert!(e.paths.iter().flat_map(|p| &p.states).all(|x| v.evaluate(x, 1.0) >= 0.0));
    }

    #[test]
    fn mean_se_basics() {
        let (m, se) = mean_se(&[1.0, 2.0, 3.0]);
        assert_eq!(m, 2.0);
        assert!((se - (1.0f64 / 3.0).sqrt()).abs() < 1e-15);
    }
}
