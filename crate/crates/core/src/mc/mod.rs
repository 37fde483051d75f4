//! Monte Carlo ensembles of the closed-loop debt problem and statistical checks of the
//! stability theory.
//!
//! Paths are generated in parallel from per-path noise streams and collected in index
//! order; all statistics reduce sequentially. Results are therefore identical for any
//! worker count. `HORIZON_SDE_THREADS` caps the count via [`with_thread_limit`].

mod convergence;
mod ensemble;
mod stats;

pub use convergence::{
    estimate_convergence, estimate_convergence_until, stability_sweep, strong_error_ratio, StabilityEstimate,
    StrongErrorReport, SweepOptions, SweepRow, UndershootStats,
};
pub use ensemble::{run_ensemble, Ensemble, Integrator};
pub use stats::{
    test_phi_identity, test_supermartingale, test_tail_bound, PhiIdentityReport, SupermartingaleTestResult,
    TailBoundResult, DEFAULT_BINOMIAL_SES, DEFAULT_Z_THRESHOLD,
};

pub(crate) use stats::mean_se;

use crate::error::{Error, Result};

pub const THREADS_ENV: &str = "HORIZON_SDE_THREADS";

/// Worker count requested through `HORIZON_SDE_THREADS`, if set.
pub fn thread_limit() -> Result<Option<usize>> {
    match std::env::var(THREADS_ENV) {
        Err(_) => Ok(None),
        Ok(s) if s.trim().is_empty() => Ok(None),
        Ok(s) => match s.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(Error::Config(format!("{THREADS_ENV} must be a positive integer, got {s:?}"))),
        },
    }
}

/// Runs `f` on a pool capped by `HORIZON_SDE_THREADS`, or on the global pool when unset.
pub fn with_thread_limit<R: Send>(f: impl FnOnce() -> R + Send) -> Result<R> {
    match thread_limit()? {
        None => Ok(f()),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
            Ok(pool.install(f))
        }
    }
}
