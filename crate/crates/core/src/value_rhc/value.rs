use std::fmt;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};

/// `V(x;T)`, the optimal cost-to-go over horizon `T` from state `x`, with its
/// spatial derivatives and its derivative in the horizon length.
pub trait ValueFunction: Send + Sync {
    fn evaluate(&self, x: &DVector<f64>, horizon: f64) -> f64;
    fn gradient(&self, x: &DVector<f64>, horizon: f64) -> DVector<f64>;
    fn hessian(&self, x: &DVector<f64>, horizon: f64) -> DMatrix<f64>;
    /// `∂_H V(x;H)` at `H = horizon`.
    fn horizon_derivative(&self, x: &DVector<f64>, horizon: f64) -> f64;
}

/// `V ≡ 0`.
#[derive(Debug, Clone, Copy)]
pub struct ZeroValue {
    pub dim: usize,
}

impl ValueFunction for ZeroValue {
    fn evaluate(&self, _x: &DVector<f64>, _horizon: f64) -> f64 {
        0.0
    }

    fn gradient(&self, _x: &DVector<f64>, _horizon: f64) -> DVector<f64> {
        DVector::zeros(self.dim)
    }

    fn hessian(&self, _x: &DVector<f64>, _horizon: f64) -> DMatrix<f64> {
        DMatrix::zeros(self.dim, self.dim)
    }

    fn horizon_derivative(&self, _x: &DVector<f64>, _horizon: f64) -> f64 {
        0.0
    }
}

type RunningFn = Arc<dyn Fn(&DVector<f64>, &DVector<f64>) -> f64 + Send + Sync>;
type TerminalFn = Arc<dyn Fn(&DVector<f64>) -> f64 + Send + Sync>;

/// Nonnegative running cost `f(x,u)` and terminal cost `g(x)`.
#[derive(Clone)]
pub struct RunningCost {
    running: RunningFn,
    terminal: TerminalFn,
}

impl fmt::Debug for RunningCost {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("RunningCost").finish_non_exhaustive()
    }
}

impl RunningCost {
    pub fn new<F, G>(running: F, terminal: G) -> Self
    where
        F: Fn(&DVector<f64>, &DVector<f64>) -> f64 + Send + Sync + 'static,
        G: Fn(&DVector<f64>) -> f64 + Send + Sync + 'static,
    {
        Self {
            running: Arc::new(running),
            terminal: Arc::new(terminal),
        }
    }

    pub fn scalar<F, G>(running: F, terminal: G) -> Self
    where
        F: Fn(f64, f64) -> f64 + Send + Sync + 'static,
        G: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        Self::new(move |x, u| running(x[0], u[0]), move |x| terminal(x[0]))
    }

    pub fn zero() -> Self {
        Self::new(|_, _| 0.0, |_| 0.0)
    }

    pub fn running(&self, x: &DVector<f64>, u: &DVector<f64>) -> f64 {
        (self.running)(x, u)
    }

    pub fn terminal(&self, x: &DVector<f64>) -> f64 {
        (self.terminal)(x)
    }
}
