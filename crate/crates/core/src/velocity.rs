//! Piecewise-constant free-flow speed with a single jump at `x = 0`.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VelocityField {
    v_left: f64,
    v_right: f64,
}

impl VelocityField {
    pub fn new(v_left: f64, v_right: f64) -> Result<Self> {
        if !(v_left > 0.0) || !v_left.is_finite() {
            return Err(Error::InvalidScenario("v_left must be positive".into()));
        }
        if !(v_right > 0.0) || !v_right.is_finite() {
            return Err(Error::InvalidScenario("v_right must be positive".into()));
        }
        Ok(Self { v_left, v_right })
    }

    pub fn v_left(&self) -> f64 {
        self.v_left
    }

    pub fn v_right(&self) -> f64 {
        self.v_right
    }

    pub fn v_max(&self) -> f64 {
        self.v_left.max(self.v_right)
    }

    /// True when the speed increases across the interface, the regime in
    /// which the maximum principle is guaranteed.
    pub fn in_regime(&self) -> bool {
        self.v_left < self.v_right
    }

    /// Speed at `x`; the left value is used at `x = 0`.
    pub fn at(&self, x: f64) -> f64 {
        if x <= 0.0 {
            self.v_left
        } else {
            self.v_right
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn regime_flag() {
        assert!(VelocityField::new(1.0, 2.0).unwrap().in_regime());
        assert!(!VelocityField::new(2.0, 1.0).unwrap().in_regime());
        assert!(!VelocityField::new(1.0, 1.0).unwrap().in_regime());
    }

    #[test]
    fn rejects_non_positive_speeds() {
        let err = VelocityField::new(-1.0, 2.0).unwrap_err();
        assert_eq!(err.to_string(), "invalid scenario: v_left must be positive");
        assert!(VelocityField::new(1.0, 0.0).is_err());
    }

    #[test]
    fn upwind_value_at_interface() {
        let v = VelocityField::new(1.0, 2.0).unwrap();
        assert_eq!(v.at(0.0), 1.0);
        assert_eq!(v.at(1e-12), 2.0);
        assert_eq!(v.v_max(), 2.0);
    }
}
