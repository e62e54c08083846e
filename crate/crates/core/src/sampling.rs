//! Seeded random samplers shared by the verification suite and the tests.
//!
//! Each consumer draws from its own ChaCha stream, so adding samples to one
//! check never perturbs another.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::geometry::{EllipsePatch, Point3};

pub fn stream(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Uniform point of `[-half, half]^3`.
pub fn cube<R: Rng + ?Sized>(rng: &mut R, half: f64) -> Point3 {
    Point3::new(rng.random_range(-half..=half), rng.random_range(-half..=half), rng.random_range(-half..=half))
}

/// Point of the cone `x1^2 + x2^2 <= radius^2 x3^2` with `0 <= x3 <= max_height`.
pub fn cone_point<R: Rng + ?Sized>(rng: &mut R, radius: f64, max_height: f64) -> Point3 {
    let h = rng.random_range(0.0..=max_height.max(0.0));
    let theta = rng.random_range(0.0..std::f64::consts::TAU);
    // put a quarter of the mass on the lateral surface, where the test is sharp
    let rho = if rng.random_bool(0.25) { 1.0 } else { rng.random::<f64>().sqrt() };
    Point3::new(radius * h * rho * theta.cos(), radius * h * rho * theta.sin(), h)
}

/// Point on the ellipse of `patch` at a uniform parameter in `[phi_lo, phi_hi]`.
pub fn ellipse_arc_point<R: Rng + ?Sized>(rng: &mut R, patch: &EllipsePatch, phi_lo: f64, phi_hi: f64) -> (f64, f64) {
    patch.ellipse_point(rng.random_range(phi_lo..=phi_hi))
}

/// Height in `(0, 1)`, log-uniform on a quarter of the draws so small heights
/// are represented.
pub fn height<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    if rng.random_bool(0.25) {
        10f64.powf(rng.random_range(-8.0..0.0))
    } else {
        rng.random_range(1e-8..1.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::IceCreamCone;

    #[test]
    fn streams_are_reproducible_and_distinct() {
        let a: f64 = stream(3, 1).random();
        let b: f64 = stream(3, 1).random();
        let c: f64 = stream(3, 2).random();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn cone_points_are_in_the_cone() {
        let mut rng = stream(0, 0);
        let k = IceCreamCone::new(2.0);
        for _ in 0..1000 {
            let p = cone_point(&mut rng, 2.0, 0.7);
            assert!(k.contains(p, 1e-12) && p.x3 <= 0.7);
        }
    }
}
