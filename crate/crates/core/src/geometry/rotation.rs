use serde::{Deserialize, Serialize};

use super::Point3;

/// The fixed isometry mapping the rotated frame onto the position frame.
///
/// `apply` sends `(0, 0, √3)` to `(1, 1, 1)` and `(√2, 0, 0)` to `(1, -1, 0)`;
/// the inverse is the transpose.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Rotation {
    m: [[f64; 3]; 3],
}

impl Default for Rotation {
    fn default() -> Self {
        Self::canonical()
    }
}

impl Rotation {
    pub fn canonical() -> Self {
        let s2 = 2f64.sqrt();
        let s3 = 3f64.sqrt();
        let s6 = 6f64.sqrt();
        Self {
            m: [
                [1.0 / s2, 1.0 / s6, 1.0 / s3],
                [-1.0 / s2, 1.0 / s6, 1.0 / s3],
                [0.0, -s2 / s3, 1.0 / s3],
            ],
        }
    }

    pub fn matrix(&self) -> [[f64; 3]; 3] {
        self.m
    }

    pub fn apply(&self, x: Point3) -> Point3 {
        let v = x.to_array();
        let row = |i: usize| self.m[i][0] * v[0] + self.m[i][1] * v[1] + self.m[i][2] * v[2];
        Point3::new(row(0), row(1), row(2))
    }

    pub fn apply_inv(&self, x: Point3) -> Point3 {
        let v = x.to_array();
        let col = |j: usize| self.m[0][j] * v[0] + self.m[1][j] * v[1] + self.m[2][j] * v[2];
        Point3::new(col(0), col(1), col(2))
    }

    /// Preimage of the i-th canonical basis vector, i.e. the i-th row of the matrix.
    pub fn inv_basis(&self, i: usize) -> Point3 {
        Point3::from_array(self.m[i])
    }

    /// Largest entrywise deviation of `MᵀM` from the identity.
    pub fn orthogonality_defect(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..3 {
            for j in 0..3 {
                let dot: f64 = (0..3).map(|k| self.m[k][i] * self.m[k][j]).sum();
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((dot - target).abs());
            }
        }
        worst
    }

    pub fn determinant(&self) -> f64 {
        let m = &self.m;
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
            - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn anchor_images() {
        let rot = Rotation::canonical();
        let e = rot.apply(Point3::new(0.0, 0.0, 3f64.sqrt()));
        assert!((e - Point3::new(1.0, 1.0, 1.0)).norm_inf() < 1e-12);
        let d = rot.apply(Point3::new(2f64.sqrt(), 0.0, 0.0));
        assert!((d - Point3::new(1.0, -1.0, 0.0)).norm_inf() < 1e-12);
        assert_eq!(rot.apply(Point3::ZERO), Point3::ZERO);
    }

    #[test]
    fn orthogonal_with_unit_determinant() {
        let rot = Rotation::canonical();
        assert!(rot.orthogonality_defect() < 1e-12);
        assert!((rot.determinant() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn inverse_round_trip_preserves_norm() {
        let rot = Rotation::canonical();
        let x = Point3::new(0.3, -1.7, 2.25);
        let y = rot.apply(x);
        assert!((rot.apply_inv(y) - x).norm_inf() < 1e-12);
        assert!((y.norm() - x.norm()).abs() < 1e-12);
        for i in 0..3 {
            let mut e = [0.0; 3];
            e[i] = 1.0;
            assert!((rot.apply_inv(Point3::from_array(e)) - rot.inv_basis(i)).norm_inf() < 1e-15);
        }
    }
}
