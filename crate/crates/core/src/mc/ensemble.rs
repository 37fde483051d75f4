use nalgebra::DVector;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::merton::{exact_solution_exponents, DebtProblem};
use crate::sde::{simulate_closed_loop, simulate_exact_gbm, Absorption, NoiseSource, SamplePath, TimeGrid};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Integrator {
    /// Sample the closed-form geometric Brownian motion on the grid.
    #[default]
    Exact,
    /// Euler–Maruyama on the wealth SDE, absorbing at the origin.
    Euler,
}

/// Closed-loop paths under the constant Merton fraction. Path `i` is driven by noise
/// stream `(master_seed, i)`.
#[derive(Debug, Clone)]
pub struct Ensemble {
    pub paths: Vec<SamplePath>,
    pub master_seed: u64,
    pub tag: String,
    pub grid: TimeGrid,
    pub problem: DebtProblem,
    pub integrator: Integrator,
}

impl Ensemble {
    pub fn len(&self) -> usize {
        self.paths.len()
    }

    pub fn is_empty(&self) -> bool {
        self.paths.is_empty()
    }

    /// Recomputes path `index` from the seed alone.
    pub fn regenerate_path(&self, index: usize) -> Result<SamplePath> {
        simulate_one(&self.problem, &self.grid, self.master_seed, index, self.integrator)
    }
}

pub fn run_ensemble(
    problem: &DebtProblem,
    n_paths: usize,
    grid: &TimeGrid,
    master_seed: u64,
    integrator: Integrator,
) -> Result<Ensemble> {
    problem.validate()?;
    let feasibility = problem.feasibility();
    if !feasibility.feasible() {
        return Err(Error::Infeasible(feasibility.describe()));
    }
    let paths = (0..n_paths)
        .into_par_iter()
        .map(|i| simulate_one(problem, grid, master_seed, i, integrator))
        .collect::<Result<Vec<_>>>()?;
    Ok(Ensemble {
        paths,
        master_seed,
        tag: format!(
            "beta={} T={} x0={} c1={} c2={} {:?}",
            problem.beta, problem.horizon, problem.x0, problem.c1, problem.c2, integrator
        ),
        grid: *grid,
        problem: *problem,
        integrator,
    })
}

fn simulate_one(
    problem: &DebtProblem,
    grid: &TimeGrid,
    master_seed: u64,
    index: usize,
    integrator: Integrator,
) -> Result<SamplePath> {
    let noise = NoiseSource::new(master_seed, index as u64);
    match integrator {
        Integrator::Exact => {
            let (a, s) = exact_solution_exponents(&problem.market, problem.beta);
            let mut path = simulate_exact_gbm(a, s, problem.x0, grid, &noise)?;
            let u = DVector::from_element(1, problem.merton_fraction());
            path.controls = vec![u; grid.n_steps()];
            Ok(path)
        }
        Integrator::Euler => {
            let policy = problem.rhc_policy()?;
            let x0 = DVector::from_element(1, problem.x0);
            simulate_closed_loop(&problem.wealth_sde(), &policy, &x0, grid, &noise, Absorption::AtOrigin)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid() -> TimeGrid {
        TimeGrid::over(1.0, 0.01).unwrap()
    }

    #[test]
    fn same_seed_same_paths() {
        let p = DebtProblem::default();
        for integrator in [Integrator::Exact, Integrator::Euler] {
            let a = run_ensemble(&p, 8, &grid(), 7, integrator).unwrap();
            let b = run_ensemble(&p, 8, &grid(), 7, integrator).unwrap();
            assert_eq!(a.paths, b.paths);
            assert_eq!(a.regenerate_path(5).unwrap(), a.paths[5]);
        }
    }

    #[test]
    fn different_seeds_differ() {
        let p = DebtProblem::default();
        let a = run_ensemble(&p, 2, &grid(), 1, Integrator::Exact).unwrap();
        let b = run_ensemble(&p, 2, &grid(), 2, Integrator::Exact).unwrap();
        assert_ne!(a.paths[0].states, b.paths[0].states);
        assert_ne!(a.paths[0].states, a.paths[1].states);
    }

    #[test]
    fn refuses_infeasible_constraint() {
        let p = DebtProblem { c1: -2.0, ..DebtProblem::default() };
        let err = run_ensemble(&p, 4, &grid(), 42, Integrator::Exact).unwrap_err();
        assert!(matches!(err, Error::Infeasible(ref m) if m.contains("-2.828")), "{err}");
    }

    #[test]
    fn exact_paths_carry_the_merton_fraction() {
        let p = DebtProblem::default();
        let e = run_ensemble(&p, 1, &grid(), 3, Integrator::Exact).unwrap();
        let path = &e.paths[0];
        assert_eq!(path.len(), 101);
        assert_eq!(path.controls.len(), 100);
        assert!((path.controls[0][0] + 2.828283).abs() < 1e-6);
        assert!(path.scalar_states().iter().all(|&x| x < 0.0));
    }

    #[test]
    fn zero_paths_is_empty() {
        let e = run_ensemble(&DebtProblem::default(), 0, &grid(), 42, Integrator::Euler).unwrap();
        assert!(e.is_empty());
    }
}
