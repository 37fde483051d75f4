use horizon_sde::mc::{
    estimate_convergence, estimate_convergence_until, run_ensemble, stability_sweep, test_supermartingale,
    test_tail_bound, Integrator, SweepOptions,
};
use horizon_sde::merton::{CostVariant, DebtProblem, MarketParams};
use horizon_sde::sde::TimeGrid;
use horizon_sde::value_rhc::ValueFunction;
use nalgebra::DVector;

fn debt(beta: f64) -> DebtProblem {
    DebtProblem {
        beta,
        ..DebtProblem::default()
    }
}

fn pool(n: usize) -> rayon::ThreadPool {
    rayon::ThreadPoolBuilder::new().num_threads(n).build().unwrap()
}

#[test]
fn ensembles_do_not_depend_on_worker_count() {
    let grid = TimeGrid::over(2.0, 0.01).unwrap();
    for integrator in [Integrator::Exact, Integrator::Euler] {
        let one = pool(1).install(|| run_ensemble(&debt(2.1), 16, &grid, 42, integrator).unwrap());
        let many = pool(4).install(|| run_ensemble(&debt(2.1), 16, &grid, 42, integrator).unwrap());
        assert_eq!(one.paths, many.paths);
        let v = one.problem.value_function(CostVariant::Running);
        let a = test_supermartingale(&one, &v, 1.0, &[0.0, 1.0, 2.0], 3.0).unwrap();
        let b = test_supermartingale(&many, &v, 1.0, &[0.0, 1.0, 2.0], 3.0).unwrap();
        assert_eq!(a, b);
    }
}

#[test]
fn euler_paths_track_exact_paths() {
    let grid = TimeGrid::over(1.0, 0.001).unwrap();
    let exact = run_ensemble(&debt(2.1), 20, &grid, 9, Integrator::Exact).unwrap();
    let euler = run_ensemble(&debt(2.1), 20, &grid, 9, Integrator::Euler).unwrap();
    for (a, b) in exact.paths.iter().zip(&euler.paths) {
        let (xa, xb) = (a.states.last().unwrap()[0], b.states.last().unwrap()[0]);
        assert!((xa - xb).abs() / xa.abs() < 0.05, "{xa} vs {xb}");
    }
}

#[test]
fn hitting_time_and_undershoot_for_beta_2_1() {
    let grid = TimeGrid::over(40.0, 0.01).unwrap();
    let e = run_ensemble(&debt(2.1), 100, &grid, 42, Integrator::Exact).unwrap();
    let est = estimate_convergence(&e, 1.0, &[150.0]).unwrap();
    let median = est.median_hit_time.unwrap();
    // mean first passage ln(100)/0.257971 = 17.85; the median of that law is 16.61
    assert!((median - 17.85).abs() / 17.85 < 0.2, "{median}");
    assert!((median - 16.61).abs() < 2.5, "{median}");
    assert!(est.excursion_prob[0] > 0.0);
    assert!(est.undershoot.fraction_below[0] > 0.0);
    assert!(est.hitting_times.iter().flatten().all(|t| *t >= 0.0));
    assert_eq!(est.censored, est.hitting_times.iter().filter(|h| h.is_none()).count());
}

#[test]
fn supremum_scale_invariance() {
    // sup|X|/|x0| has the same law for every x0 along exact paths
    let grid = TimeGrid::over(5.0, 0.01).unwrap();
    let near = run_ensemble(&DebtProblem { x0: -1.0, ..debt(2.1) }, 50, &grid, 3, Integrator::Exact).unwrap();
    let far = run_ensemble(&DebtProblem { x0: -100.0, ..debt(2.1) }, 50, &grid, 3, Integrator::Exact).unwrap();
    let a = estimate_convergence(&near, 1e-3, &[1.5]).unwrap();
    let b = estimate_convergence(&far, 1e-3, &[150.0]).unwrap();
    assert_eq!(a.excursion_prob, b.excursion_prob);
}

#[test]
fn tail_bound_at_twice_the_initial_value() {
    let grid = TimeGrid::over(1.0, 0.01).unwrap();
    let e = run_ensemble(&debt(2.1), 1000, &grid, 42, Integrator::Exact).unwrap();
    let v = e.problem.value_function(CostVariant::Running);
    let v0 = v.evaluate(&DVector::from_element(1, -100.0), 1.0);
    assert!((2.0 * v0 - 29508.7).abs() < 0.1);
    let r = test_tail_bound(&e, &v, 1.0, &[2.0 * v0], 2.0).unwrap();
    assert!(r.pass);
    assert!(r.empirical_prob[0] <= 0.5);
}

#[test]
fn negative_eta_case_is_reported() {
    let grid = TimeGrid::over(5.0, 0.01).unwrap();
    let e = run_ensemble(&debt(7.8), 200, &grid, 42, Integrator::Exact).unwrap();
    let v = e.problem.value_function(CostVariant::Running);
    let cps: Vec<f64> = (0..=10).map(|k| 0.5 * k as f64).collect();
    let r = test_supermartingale(&e, &v, 1.0, &cps, 3.0).unwrap();
    assert_eq!(r.times.len(), 11);
    assert!(r.max_violation_z.is_finite());
}

#[test]
fn sweep_orders_convergence_by_beta() {
    let opts = SweepOptions {
        sim_horizon: 40.0,
        ..SweepOptions::default()
    };
    let rows = stability_sweep(&MarketParams::default(), &[2.1, 4.5, 7.8], &opts).unwrap();
    let f: Vec<f64> = rows.iter().map(|r| r.converged_fraction.unwrap()).collect();
    assert!(f[0] >= f[1] && f[1] >= f[2], "{f:?}");
    assert_eq!(rows.iter().map(|r| r.in_window).collect::<Vec<_>>(), vec![true, true, false]);
    assert!((rows[2].log_drift + 0.004381).abs() < 1e-6);
}

#[test]
fn convergence_cut_off_matches_shorter_run() {
    let long = run_ensemble(&debt(2.1), 30, &TimeGrid::over(20.0, 0.01).unwrap(), 5, Integrator::Exact).unwrap();
    let short = run_ensemble(&debt(2.1), 30, &TimeGrid::over(10.0, 0.01).unwrap(), 5, Integrator::Exact).unwrap();
    let a = estimate_convergence_until(&long, 1.0, &[150.0], 10.0).unwrap();
    let b = estimate_convergence(&short, 1.0, &[150.0]).unwrap();
    assert_eq!(a, b);
}
