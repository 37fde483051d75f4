use std::fmt;
use std::sync::Arc;

use nalgebra::DVector;

type Law = Arc<dyn Fn(&DVector<f64>, f64) -> DVector<f64> + Send + Sync>;

/// Receding horizon feedback `u^c(x;T)`: the initial minimiser of the horizon-`T`
/// problem, applied at every state for all time.
#[derive(Clone)]
pub struct RhcPolicy {
    horizon: f64,
    law: Law,
}

impl fmt::Debug for RhcPolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("RhcPolicy")
            .field("horizon", &self.horizon)
            .finish_non_exhaustive()
    }
}

impl RhcPolicy {
    pub fn new<F>(horizon: f64, law: F) -> Self
    where
        F: Fn(&DVector<f64>, f64) -> DVector<f64> + Send + Sync + 'static,
    {
        Self {
            horizon,
            law: Arc::new(law),
        }
    }

    /// State- and horizon-independent law.
    pub fn constant(horizon: f64, u: DVector<f64>) -> Self {
        Self::new(horizon, move |_, _| u.clone())
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    /// `u^c(x;T)` at the policy's own horizon.
    pub fn control(&self, x: &DVector<f64>) -> DVector<f64> {
        (self.law)(x, self.horizon)
    }

    pub fn control_at(&self, x: &DVector<f64>, horizon: f64) -> DVector<f64> {
        (self.law)(x, horizon)
    }
}
