//! Sampled estimates of the linear-growth and Lipschitz constants of `(b, σ)`.
//! These are empirical lower estimates of the true constants, not proofs.

use nalgebra::DVector;
use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

use super::ControlledSde;
use crate::error::{Error, Result};

/// Axis-aligned box of states.
#[derive(Debug, Clone, PartialEq)]
pub struct StateBounds {
    pub lower: DVector<f64>,
    pub upper: DVector<f64>,
}

impl StateBounds {
    pub fn new(lower: DVector<f64>, upper: DVector<f64>) -> Result<Self> {
        if lower.len() != upper.len() {
            return Err(Error::Dimension {
                what: "state bounds",
                expected: lower.len(),
                got: upper.len(),
            });
        }
        if lower.iter().zip(upper.iter()).any(|(l, u)| !(l <= u)) {
            return Err(Error::invalid("state bounds", "need lower <= upper componentwise"));
        }
        Ok(Self { lower, upper })
    }

    pub fn interval(lo: f64, hi: f64) -> Result<Self> {
        Self::new(DVector::from_element(1, lo), DVector::from_element(1, hi))
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    pub fn contains(&self, x: &DVector<f64>) -> bool {
        x.iter()
            .zip(self.lower.iter().zip(self.upper.iter()))
            .all(|(v, (l, u))| *l <= *v && *v <= *u)
    }

    pub fn contains_origin(&self) -> bool {
        self.lower.iter().all(|l| *l <= 0.0) && self.upper.iter().all(|u| *u >= 0.0)
    }

    /// Map a point of the unit cube into the box.
    pub fn from_unit(&self, unit: &[f64]) -> DVector<f64> {
        DVector::from_iterator(
            self.dim(),
            unit.iter()
                .zip(self.lower.iter().zip(self.upper.iter()))
                .map(|(s, (l, u))| l + s * (u - l)),
        )
    }

    /// All `2^n` corners.
    pub fn corners(&self) -> Vec<DVector<f64>> {
        let n = self.dim();
        (0..1usize << n)
            .map(|mask| {
                DVector::from_iterator(
                    n,
                    (0..n).map(|i| if mask >> i & 1 == 1 { self.upper[i] } else { self.lower[i] }),
                )
            })
            .collect()
    }

    pub fn max_radius(&self) -> f64 {
        self.corners().iter().map(|c| c.norm()).fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProbePair {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub u: Vec<f64>,
    pub lipschitz_ratio: f64,
    pub growth_ratio: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RegularityReport {
    pub empirical_lipschitz: f64,
    pub empirical_growth: f64,
    pub probe_count: usize,
    /// Constant the probes were checked against, if one was claimed.
    pub claimed_constant: Option<f64>,
    pub violations: Vec<ProbePair>,
}

fn uniform(rng: &mut ChaCha8Rng) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Estimates `max |b(x,u)-b(y,u)| + |σ(x,u)-σ(y,u)|` over `|x-y|` and
/// `max (|b(x,u)| + |σ(x,u)|) / (1 + |x|)` from `n_probes` random triples.
pub fn check_regularity(
    sde: &ControlledSde,
    probe_box: &StateBounds,
    n_probes: usize,
    seed: u64,
) -> Result<RegularityReport> {
    check_regularity_against(sde, probe_box, n_probes, seed, None)
}

/// As [`check_regularity`]; probes whose ratios exceed `claimed` are returned as violations.
pub fn check_regularity_against(
    sde: &ControlledSde,
    probe_box: &StateBounds,
    n_probes: usize,
    seed: u64,
    claimed: Option<f64>,
) -> Result<RegularityReport> {
    if n_probes < 2 {
        return Err(Error::invalid("n_probes", "need at least 2 probes"));
    }
    if probe_box.dim() != sde.state_dim() {
        return Err(Error::Dimension {
            what: "probe box",
            expected: sde.state_dim(),
            got: probe_box.dim(),
        });
    }
    if probe_box
        .lower
        .iter()
        .zip(probe_box.upper.iter())
        .all(|(l, u)| l == u)
    {
        return Err(Error::invalid("probe_box", "degenerate box"));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let cset = sde.control_set();
    let n = sde.state_dim();
    let mut lip: f64 = 0.0;
    let mut growth: f64 = 0.0;
    let mut violations = Vec::new();

    for _ in 0..n_probes {
        let ux: Vec<f64> = (0..n).map(|_| uniform(&mut rng)).collect();
        let uy: Vec<f64> = (0..n).map(|_| uniform(&mut rng)).collect();
        let x = probe_box.from_unit(&ux);
        let y = probe_box.from_unit(&uy);
        let u = DVector::from_iterator(
            cset.dim(),
            cset.lower()
                .iter()
                .zip(cset.upper().iter())
                .map(|(l, h)| l + uniform(&mut rng) * (h - l)),
        );
        let (bx, sx) = sde.coefficients(&x, &u)?;
        let (by, sy) = sde.coefficients(&y, &u)?;

        let dist = (&x - &y).norm();
        let lip_ratio = if dist > 0.0 {
            ((&bx - &by).norm() + (&sx - &sy).norm()) / dist
        } else {
            0.0
        };
        let growth_ratio = (bx.norm() + sx.norm()) / (1.0 + x.norm());
        lip = lip.max(lip_ratio);
        growth = growth.max(growth_ratio);

        if let Some(c) = claimed {
            if lip_ratio > c || growth_ratio > c {
                violations.push(ProbePair {
                    x: x.iter().copied().collect(),
                    y: y.iter().copied().collect(),
                    u: u.iter().copied().collect(),
                    lipschitz_ratio: lip_ratio,
                    growth_ratio,
                });
            }
        }
    }

    Ok(RegularityReport {
        empirical_lipschitz: lip,
        empirical_growth: growth,
        probe_count: n_probes,
        claimed_constant: claimed,
        violations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sde::ControlSet;
    use approx::assert_relative_eq;

    #[test]
    fn linear_drift_gives_its_slope() {
        let sde = ControlledSde::scalar(
            |x, _| -1.7 * x,
            |_, _| 0.0,
            ControlSet::interval(0.0, 1.0).unwrap(),
        );
        let rep = check_regularity(&sde, &StateBounds::interval(-5.0, 5.0).unwrap(), 100, 3).unwrap();
        assert_relative_eq!(rep.empirical_lipschitz, 1.7, max_relative = 1e-9);
        assert!(rep.violations.is_empty());
    }

    #[test]
    fn wealth_sde_within_analytic_bound() {
        let (r, b, sigma) = (0.03, 0.1, 0.15);
        let sde = ControlledSde::scalar(
            move |x, u| (r + (b - r) * u) * x,
            move |x, u| sigma * u * x,
            ControlSet::interval(-3.0, 0.0).unwrap(),
        );
        let bound = 0.03 + 0.21 + 0.45;
        let rep = check_regularity_against(
            &sde,
            &StateBounds::interval(-200.0, 0.0).unwrap(),
            2000,
            11,
            Some(bound),
        )
        .unwrap();
        assert!(rep.empirical_lipschitz <= bound);
        assert!(rep.empirical_lipschitz > 0.5);
        assert!(rep.violations.is_empty());
    }

    #[test]
    fn constant_drift_growth_ratio() {
        let sde = ControlledSde::scalar(|_, _| 1.0, |_, _| 0.0, ControlSet::interval(0.0, 0.0).unwrap());
        let rep = check_regularity(&sde, &StateBounds::interval(-1.0, 1.0).unwrap(), 50, 0).unwrap();
        assert!(rep.empirical_growth <= 1.0);
        assert_eq!(rep.empirical_lipschitz, 0.0);
    }

    #[test]
    fn claimed_constant_reports_violations() {
        let sde = ControlledSde::scalar(|x, _| 2.0 * x, |_, _| 0.0, ControlSet::interval(0.0, 0.0).unwrap());
        let rep = check_regularity_against(&sde, &StateBounds::interval(-1.0, 1.0).unwrap(), 20, 0, Some(1.0))
            .unwrap();
        assert!(!rep.violations.is_empty());
    }

    #[test]
    fn deterministic_given_seed() {
        let sde = ControlledSde::scalar(|x, u| x.sin() * u, |x, _| x.cos(), ControlSet::interval(-1.0, 1.0).unwrap());
        let bx = StateBounds::interval(-3.0, 3.0).unwrap();
        assert_eq!(check_regularity(&sde, &bx, 64, 5).unwrap(), check_regularity(&sde, &bx, 64, 5).unwrap());
        assert!(check_regularity(&sde, &bx, 1, 5).is_err());
    }
}
