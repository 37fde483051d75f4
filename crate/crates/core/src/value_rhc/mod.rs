//! Value functions, running costs and receding horizon policies, plus the checks that
//! tie them to closed-loop stability: the dissipation rate `φ(x;T) = -∂_T V(x;T) + f(x, u^c(x;T))`,
//! the horizon-monotonicity condition and sampled checks of assumptions A1–A4.

mod assumptions;
mod phi;
mod policy;
mod probes;
mod value;

pub use assumptions::{
    check_assumptions, A3Entry, AssumptionCheckOptions, AssumptionReport, CheckOutcome,
    LowerBoundFn, RadiusValue,
};
pub use phi::{horizon_monotonicity, phi_of};
pub use policy::RhcPolicy;
pub use probes::{halton, probe_set, van_der_corput};
pub use value::{RunningCost, ValueFunction, ZeroValue};
