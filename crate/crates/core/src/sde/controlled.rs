use std::fmt;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};

use super::ControlSet;
use crate::error::{Error, Result};

pub type DriftFn = Arc<dyn Fn(&DVector<f64>, &DVector<f64>) -> DVector<f64> + Send + Sync>;
pub type DiffusionFn = Arc<dyn Fn(&DVector<f64>, &DVector<f64>) -> DMatrix<f64> + Send + Sync>;

/// Time-homogeneous controlled SDE `dX = b(X,u) dt + σ(X,u) dW` with `u` in a compact box.
#[derive(Clone)]
pub struct ControlledSde {
    state_dim: usize,
    noise_dim: usize,
    drift: DriftFn,
    diffusion: DiffusionFn,
    control_set: ControlSet,
}

impl fmt::Debug for ControlledSde {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ControlledSde")
            .field("state_dim", &self.state_dim)
            .field("control_dim", &self.control_set.dim())
            .field("noise_dim", &self.noise_dim)
            .field("control_set", &self.control_set)
            .finish_non_exhaustive()
    }
}

impl ControlledSde {
    pub fn new(
        state_dim: usize,
        noise_dim: usize,
        drift: DriftFn,
        diffusion: DiffusionFn,
        control_set: ControlSet,
    ) -> Self {
        Self {
            state_dim,
            noise_dim,
            drift,
            diffusion,
            control_set,
        }
    }

    /// Scalar SDE from plain `f64` closures.
    pub fn scalar<B, S>(drift: B, diffusion: S, control_set: ControlSet) -> Self
    where
        B: Fn(f64, f64) -> f64 + Send + Sync + 'static,
        S: Fn(f64, f64) -> f64 + Send + Sync + 'static,
    {
        Self::new(
            1,
            1,
            Arc::new(move |x, u| DVector::from_element(1, drift(x[0], u[0]))),
            Arc::new(move |x, u| DMatrix::from_element(1, 1, diffusion(x[0], u[0]))),
            control_set,
        )
    }

    pub fn state_dim(&self) -> usize {
        self.state_dim
    }

    pub fn control_dim(&self) -> usize {
        self.control_set.dim()
    }

    pub fn noise_dim(&self) -> usize {
        self.noise_dim
    }

    pub fn control_set(&self) -> &ControlSet {
        &self.control_set
    }

    pub fn drift(&self, x: &DVector<f64>, u: &DVector<f64>) -> DVector<f64> {
        (self.drift)(x, u)
    }

    pub fn diffusion(&self, x: &DVector<f64>, u: &DVector<f64>) -> DMatrix<f64> {
        (self.diffusion)(x, u)
    }

    /// Drift and diffusion, failing if either is non-finite.
    pub fn coefficients(
        &self,
        x: &DVector<f64>,
        u: &DVector<f64>,
    ) -> Result<(DVector<f64>, DMatrix<f64>)> {
        let b = self.drift(x, u);
        if b.len() != self.state_dim {
            return Err(Error::Dimension {
                what: "drift",
                expected: self.state_dim,
                got: b.len(),
            });
        }
        let s = self.diffusion(x, u);
        if s.nrows() != self.state_dim || s.ncols() != self.noise_dim {
            return Err(Error::Dimension {
                what: "diffusion",
                expected: self.state_dim * self.noise_dim,
                got: s.nrows() * s.ncols(),
            });
        }
        if b.iter().chain(s.iter()).any(|v| !v.is_finite()) {
            return Err(Error::NonFinite {
                what: "drift/diffusion",
                x: x.iter().copied().collect(),
                u: u.iter().copied().collect(),
            });
        }
        Ok((b, s))
    }
}

/// One Euler–Maruyama step `x + b(x,u)·dt + σ(x,u)·dW`.
pub fn euler_maruyama_step(
    sde: &ControlledSde,
    x: &DVector<f64>,
    u: &DVector<f64>,
    dt: f64,
    dw: &DVector<f64>,
) -> Result<DVector<f64>> {
    if !(dt > 0.0) {
        return Err(Error::invalid("dt", format!("must be positive, got {dt}")));
    }
    if !sde.control_set().contains(u) {
        return Err(Error::invalid(
            "u",
            format!("control {:?} outside the control set", u.as_slice()),
        ));
    }
    let (b, s) = sde.coefficients(x, u)?;
    Ok(x + b * dt + s * dw)
}
