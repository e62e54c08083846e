use serde::{Deserialize, Serialize};

use super::Point3;

/// Upper nappe of the circular cone `x1^2 + x2^2 <= R^2 x3^2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IceCreamCone {
    pub radius: f64,
}

impl IceCreamCone {
    pub fn new(radius: f64) -> Self {
        Self { radius }
    }

    pub fn contains(&self, x: Point3, slack: f64) -> bool {
        x.x3 >= -slack && x.x1 * x.x1 + x.x2 * x.x2 <= self.radius * self.radius * x.x3 * x.x3 + slack
    }

    /// Radius bound under which the basic body is invariant under cone shifts
    /// that stay below height 1.
    pub fn basic_monotonicity_radius(r: f64) -> f64 {
        r * r / (2.0 * (1.0 + r * r).sqrt())
    }

    /// Same bound for the four-quarter body.
    pub fn twisted_monotonicity_radius(r: f64) -> f64 {
        7.0 * r / 16.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Rotation;

    #[test]
    fn membership_examples() {
        let k = IceCreamCone::new(2f64.sqrt());
        assert!(k.contains(Point3::new(0.0, 0.0, 1.0), 0.0));
        assert!(!k.contains(Point3::new(2.0, 0.0, 1.0), 0.0));
        assert!(!k.contains(Point3::new(0.0, 0.0, -1.0), 0.0));
        let rot = Rotation::canonical();
        for i in 0..3 {
            assert!(k.contains(rot.inv_basis(i), 1e-12));
        }
    }

    #[test]
    fn sqrt2_fits_under_both_bounds() {
        assert!(2f64.sqrt() <= IceCreamCone::basic_monotonicity_radius(3.0));
        assert!(2f64.sqrt() <= IceCreamCone::twisted_monotonicity_radius(16.0));
    }
}
