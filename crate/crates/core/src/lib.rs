//! Receding horizon control (RHC) of controlled stochastic differential equations.
//!
//! The crate is organised bottom-up:
//!
//! - [`sde`]: controlled SDEs, counter-based noise, Euler–Maruyama and exact GBM paths.
//! - [`value_rhc`]: value functions, running costs, RHC policies, the dissipation
//!   rate `φ(x;T)` and sampled checks of the stability assumptions.
//! - [`merton`]: closed forms for the debt-repayment portfolio problem.
//! - [`hjb`]: explicit finite-difference solver for the 1-D finite-horizon HJB equation.
//! - [`mc`]: Monte Carlo ensembles and statistical checks of the supermartingale
//!   property, the tail bound and the `φ`-integral identity.
//! - [`cli`]: configuration, CSV/SVG output and the `horizon-sde` subcommands.

// `!(a < b)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod error;
pub mod hjb;
pub mod mc;
pub mod merton;
pub mod sde;
pub mod value_rhc;

pub use error::{Error, Result};
