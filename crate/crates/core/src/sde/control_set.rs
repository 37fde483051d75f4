use nalgebra::DVector;

use crate::error::{Error, Result};

/// Compact box `[lower, upper]` of admissible controls.
#[derive(Debug, Clone, PartialEq)]
pub struct ControlSet {
    lower: DVector<f64>,
    upper: DVector<f64>,
}

impl ControlSet {
    pub fn new(lower: DVector<f64>, upper: DVector<f64>) -> Result<Self> {
        if lower.len() != upper.len() {
            return Err(Error::Dimension {
                what: "control set bounds",
                expected: lower.len(),
                got: upper.len(),
            });
        }
        for i in 0..lower.len() {
            if !(lower[i].is_finite() && upper[i].is_finite()) || lower[i] > upper[i] {
                return Err(Error::invalid(
                    format!("control_set[{i}]"),
                    format!("need finite lower <= upper, got [{}, {}]", lower[i], upper[i]),
                ));
            }
        }
        Ok(Self { lower, upper })
    }

    /// Scalar interval `[c1, c2]`.
    pub fn interval(c1: f64, c2: f64) -> Result<Self> {
        Self::new(DVector::from_element(1, c1), DVector::from_element(1, c2))
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    pub fn lower(&self) -> &DVector<f64> {
        &self.lower
    }

    pub fn upper(&self) -> &DVector<f64> {
        &self.upper
    }

    pub fn contains(&self, u: &DVector<f64>) -> bool {
        u.len() == self.dim()
            && u.iter()
                .zip(self.lower.iter().zip(self.upper.iter()))
                .all(|(v, (lo, hi))| *lo <= *v && *v <= *hi)
    }

    /// All `2^m` vertices of the box.
    pub fn corners(&self) -> Vec<DVector<f64>> {
        let m = self.dim();
        (0..1usize << m)
            .map(|mask| {
                DVector::from_iterator(
                    m,
                    (0..m).map(|i| if mask >> i & 1 == 1 { self.upper[i] } else { self.lower[i] }),
                )
            })
            .collect()
    }

    /// Componentwise clamp onto the box.
    pub fn project(&self, u: &DVector<f64>) -> DVector<f64> {
        DVector::from_iterator(
            self.dim(),
            u.iter()
                .zip(self.lower.iter().zip(self.upper.iter()))
                .map(|(v, (lo, hi))| v.clamp(*lo, *hi)),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn rejects_inverted_bounds() {
        assert!(ControlSet::interval(1.0, -1.0).is_err());
        assert!(ControlSet::interval(-3.0, 0.0).is_ok());
        assert!(ControlSet::interval(0.0, 0.0).is_ok());
    }

    proptest! {
        #[test]
        fn projection_lands_inside(lo in -10.0..0.0f64, width in 0.0..10.0f64, v in -100.0..100.0f64) {
            let set = ControlSet::interval(lo, lo + width).unwrap();
            let p = set.project(&DVector::from_element(1, v));
            prop_assert!(set.contains(&p));
            if set.contains(&DVector::from_element(1, v)) {
                prop_assert_eq!(p[0], v);
            }
        }
    }
}
