//! The boat-shaped bodies `B_r(E)` and their lower boundary functions.

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{BoatProfile, Point3};
use crate::error::{Error, Result};

/// Slack accepted on every defining inequality of a membership predicate.
pub const MEMBERSHIP_TOL: f64 = 1e-9;

/// Boundary gradients are only reported at heights at or above this value.
pub const MIN_GRADIENT_HEIGHT: f64 = 1e-8;

const MAX_EXTENDED_HEIGHT: f64 = 1e8;

/// `B_r(E) = {(u sqrt(1 + r^2 x3), v r sqrt(x3), x3) : (u, v) in E, x3 in [0, 1]}`.
///
/// The slice at `x3 = 0` is the degenerate segment traced by the profile on
/// the `x1` axis; it is handled explicitly rather than as a limit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoatSet {
    r: f64,
    profile: BoatProfile,
}

impl BoatSet {
    pub fn new(r: f64, profile: BoatProfile) -> Result<Self> {
        if !(r.is_finite() && r > 0.0) {
            return Err(Error::InvalidModel(format!("shape parameter r must be positive, got {r}")));
        }
        Ok(Self { r, profile })
    }

    pub fn basic(r: f64) -> Result<Self> {
        Self::new(r, BoatProfile::basic())
    }

    pub fn twisted(r: f64) -> Result<Self> {
        Self::new(r, BoatProfile::twisted())
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    pub fn profile(&self) -> &BoatProfile {
        &self.profile
    }

    /// Profile coordinates of a point at positive height.
    #[inline]
    pub fn to_profile(&self, x1: f64, x2: f64, x3: f64) -> (f64, f64) {
        let r = self.r;
        (x1 / (1.0 + r * r * x3).sqrt(), x2 / (r * x3.sqrt()))
    }

    /// Inverse of [`to_profile`](Self::to_profile).
    pub fn lift(&self, u: f64, v: f64, x3: f64) -> Point3 {
        let r = self.r;
        Point3::new(u * (1.0 + r * r * x3).sqrt(), v * r * x3.max(0.0).sqrt(), x3)
    }

    /// Membership in the slice at height `x3` of the body extended to all
    /// heights `x3 >= 0` (no upper cap).
    pub fn slice_contains(&self, x1: f64, x2: f64, x3: f64, slack: f64) -> bool {
        if x3 < -slack {
            return false;
        }
        if x3 <= 0.0 {
            return x2.abs() <= slack && self.profile.zero_height_contains(x1, slack);
        }
        let (u, v) = self.to_profile(x1, x2, x3);
        self.profile.contains(u, v, slack)
    }

    pub fn contains(&self, x: Point3, slack: f64) -> bool {
        x.x3 <= 1.0 + slack && self.slice_contains(x.x1, x.x2, x.x3, slack)
    }

    /// Lowest height at which the column over `(x1, x2)` enters the body
    /// extended upward without cap; `+inf` if it never does.
    ///
    /// Computed by bisection on the exact (zero-slack) slice predicate, run
    /// until the bracket cannot be split further in floating point.
    pub fn boundary_height(&self, x1: f64, x2: f64) -> f64 {
        if self.slice_contains(x1, x2, 0.0, 0.0) {
            return 0.0;
        }
        let mut lo = 0.0;
        let mut hi = 1.0;
        while !self.slice_contains(x1, x2, hi, 0.0) {
            lo = hi;
            hi *= 2.0;
            if hi > MAX_EXTENDED_HEIGHT {
                return f64::INFINITY;
            }
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.slice_contains(x1, x2, mid, 0.0) {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        hi
    }

    /// Lower boundary function of the body: the minimal `x3` in `[0, 1]`
    /// with `(x1, x2, x3)` in the body.
    pub fn implicit_height(&self, x1: f64, x2: f64) -> Result<f64> {
        let h = self.boundary_height(x1, x2);
        if h <= 1.0 {
            Ok(h)
        } else {
            Err(Error::InfeasibleColumn { x1, x2 })
        }
    }

    /// Indices of patches whose elliptic arc carries the boundary point
    /// `(x1, x2, x3)`, closest arc first.
    pub fn active_patches(&self, x1: f64, x2: f64, x3: f64) -> Vec<usize> {
        let (u, v) = self.to_profile(x1, x2, x3);
        let mut hits: Vec<(usize, f64)> = self
            .profile
            .patches
            .iter()
            .enumerate()
            .filter(|(_, p)| p.in_range(u, v, MEMBERSHIP_TOL))
            .map(|(i, p)| (i, (p.level(u, v) - 1.0).abs()))
            .filter(|&(_, gap)| gap <= 1e-6)
            .collect();
        hits.sort_by(|a, b| a.1.total_cmp(&b.1));
        hits.into_iter().map(|(i, _)| i).collect()
    }

    /// Gradient of the boundary function at a boundary point of height `x3`,
    /// via the implicit-function quotient `-(dF/dx1, dF/dx2) / (dF/dx3)` of
    /// the active patch.
    pub fn boundary_gradient_at(&self, x1: f64, x2: f64, x3: f64) -> Result<[f64; 2]> {
        self.boundary_gradient_with_patch(x1, x2, x3).map(|(_, g)| g)
    }

    /// Like [`boundary_gradient_at`](Self::boundary_gradient_at), also
    /// returning the index of the patch used.
    pub fn boundary_gradient_with_patch(&self, x1: f64, x2: f64, x3: f64) -> Result<(usize, [f64; 2])> {
        if x3 < MIN_GRADIENT_HEIGHT {
            return Err(Error::DegenerateInput(format!("boundary height {x3:e} below {MIN_GRADIENT_HEIGHT:e}")));
        }
        let idx = *self
            .active_patches(x1, x2, x3)
            .first()
            .ok_or_else(|| Error::DegenerateInput(format!("no elliptic arc carries ({x1}, {x2}, {x3})")))?;
        let g = patch_gradient(&self.profile.patches[idx], self.r, [x1, x2, x3])?;
        Ok((idx, g))
    }

    /// Gradient of the lower boundary function at `(x1, x2)`.
    pub fn implicit_gradient(&self, x1: f64, x2: f64) -> Result<[f64; 2]> {
        let h = self.implicit_height(x1, x2)?;
        self.boundary_gradient_at(x1, x2, h)
    }

    /// Uniform point of the profile (rejection from its bounding box).
    pub fn sample_profile_interior<R: Rng + ?Sized>(&self, rng: &mut R) -> (f64, f64) {
        let (bu, bv) = self.profile.bounding_box();
        loop {
            let u = rng.random_range(bu.lo..=bu.hi);
            let v = rng.random_range(bv.lo..=bv.hi);
            if self.profile.contains(u, v, 0.0) {
                return (u, v);
            }
        }
    }

    /// Point of the profile boundary at a uniformly random polar angle.
    pub fn sample_profile_boundary<R: Rng + ?Sized>(&self, rng: &mut R) -> (f64, f64) {
        let theta = rng.random_range(0.0..std::f64::consts::TAU);
        let rho = self.profile.ray_radius(theta);
        (rho * theta.cos(), rho * theta.sin())
    }

    /// Random member of the body; on its lower boundary with probability
    /// `boundary_fraction`.
    pub fn sample_member<R: Rng + ?Sized>(&self, rng: &mut R, boundary_fraction: f64) -> Point3 {
        let t: f64 = rng.random();
        let (u, v) = if rng.random::<f64>() < boundary_fraction {
            self.sample_profile_boundary(rng)
        } else {
            self.sample_profile_interior(rng)
        };
        self.lift(u, v, t)
    }
}

/// Implicit-function gradient of the boundary carried by one patch.
pub fn patch_gradient(patch: &super::EllipsePatch, r: f64, x: [f64; 3]) -> Result<[f64; 2]> {
    let [d1, d2, d3] = patch.representation_grad(x, r);
    if d3 == 0.0 || !d3.is_finite() {
        return Err(Error::DegenerateInput(format!("dF/dx3 vanishes at {x:?}")));
    }
    Ok([-d1 / d3, -d2 / d3])
}

/// Closed-form lower boundary of the basic body (unit-disk profile):
/// `(s - 1 + sqrt((s - 1)^2 + 4 x2^2)) / (2 r^2)` with `s = x1^2 + x2^2`.
pub fn f_basic(x1: f64, x2: f64, r: f64) -> f64 {
    basic_numerator(x1, x2) / (2.0 * r * r)
}

// numerator evaluated without cancellation when s < 1
fn basic_numerator(x1: f64, x2: f64) -> f64 {
    let m = x1 * x1 + x2 * x2 - 1.0;
    let root = (m * m + 4.0 * x2 * x2).sqrt();
    if m >= 0.0 {
        m + root
    } else if root - m > 0.0 {
        4.0 * x2 * x2 / (root - m)
    } else {
        0.0
    }
}

/// Analytic gradient of [`f_basic`]. Degenerate where `f_basic` vanishes.
pub fn grad_f_basic(x1: f64, x2: f64, r: f64) -> Result<[f64; 2]> {
    let n = basic_numerator(x1, x2);
    if n <= 0.0 {
        return Err(Error::DegenerateInput(format!("f_r vanishes at ({x1}, {x2})")));
    }
    let m = x1 * x1 + x2 * x2 - 1.0;
    let root = (m * m + 4.0 * x2 * x2).sqrt();
    let r2 = r * r;
    Ok([x1 * n / (r2 * root), x2 * (n + 2.0) / (r2 * root)])
}

#[cfg(test)]
mod tests {
    use super::*;
    
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn central_diff(f: impl Fn(f64, f64) -> f64, x1: f64, x2: f64, h: f64) -> [f64; 2] {
        [(f(x1 + h, x2) - f(x1 - h, x2)) / (2.0 * h), (f(x1, x2 + h) - f(x1, x2 - h)) / (2.0 * h)]
    }

    #[test]
    fn f_basic_values() {
        assert_eq!(f_basic(1.0, 0.0, 3.0), 0.0);
        assert_eq!(f_basic(0.0, 0.0, 3.0), 0.0);
        assert!((f_basic(0.0, 2.0, 3.0) - 4.0 / 9.0).abs() < 1e-15);
        // (0, 2, 4/9) sits on the slice ellipse: x2^2 / (r^2 x3) = 1
        let x3 = f_basic(0.0, 2.0, 3.0);
        assert!((4.0 / (9.0 * x3) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn f_basic_is_nonnegative() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..10_000 {
            let x1: f64 = rng.random_range(-5.0..5.0);
            let x2: f64 = rng.random_range(-5.0..5.0);
            assert!(f_basic(x1, x2, 3.0) >= 0.0);
        }
    }

    #[test]
    fn basic_membership_examples() {
        let b = BoatSet::basic(3.0).unwrap();
        assert!(b.contains(Point3::new(0.0, 3.0, 1.0), MEMBERSHIP_TOL));
        assert!(b.contains(Point3::ZERO, MEMBERSHIP_TOL));
        assert!(!b.contains(Point3::new(2.0, 0.0, 0.0), MEMBERSHIP_TOL));
        assert!(!b.contains(Point3::new(0.0, 0.0, 1.1), MEMBERSHIP_TOL));
        assert!(!b.contains(Point3::new(0.0, 0.0, -0.1), MEMBERSHIP_TOL));
    }

    #[test]
    fn epigraph_matches_ellipsoid_definition() {
        // direct definition: x1^2/(1+r^2 x3) + x2^2/(r^2 x3) <= 1 for x3 in (0, 1]
        let r = 3.0;
        let b = BoatSet::basic(r).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..20_000 {
            let x = Point3::new(rng.random_range(-4.0..4.0), rng.random_range(-4.0..4.0), rng.random_range(1e-6..1.0));
            let direct = x.x1 * x.x1 / (1.0 + r * r * x.x3) + x.x2 * x.x2 / (r * r * x.x3) - 1.0;
            let epi = f_basic(x.x1, x.x2, r) - x.x3;
            if direct.abs() > 1e-7 && epi.abs() > 1e-7 {
                assert_eq!(direct <= 0.0, epi <= 0.0, "{x}");
                assert_eq!(b.contains(x, 0.0), direct <= 0.0, "{x}");
            }
        }
    }

    #[test]
    fn grad_f_basic_matches_finite_differences() {
        let r = 3.0;
        let g = grad_f_basic(0.0, 2.0, r).unwrap();
        assert_eq!(g[0], 0.0);
        assert!(g[1] > 0.0);
        let fd = central_diff(|a, b| f_basic(a, b, r), 0.0, 2.0, 1e-6);
        assert!((g[1] - fd[1]).abs() <= 1e-5 * fd[1].abs());

        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..2_000 {
            let x1: f64 = rng.random_range(-3.0..3.0);
            let x2: f64 = rng.random_range(0.05..3.0) * if rng.random::<bool>() { 1.0 } else { -1.0 };
            let g = grad_f_basic(x1, x2, r).unwrap();
            let fd = central_diff(|a, b| f_basic(a, b, r), x1, x2, 1e-6);
            let scale = g[0].hypot(g[1]).max(1e-3);
            assert!((g[0] - fd[0]).abs() <= 1e-5 * scale, "{x1} {x2}");
            assert!((g[1] - fd[1]).abs() <= 1e-5 * scale, "{x1} {x2}");
        }
        assert!(grad_f_basic(0.5, 0.0, r).is_err());
    }

    #[test]
    fn implicit_height_examples() {
        let basic = BoatSet::basic(3.0).unwrap();
        assert_eq!(basic.implicit_height(1.0, 0.0).unwrap(), 0.0);
        assert!((basic.implicit_height(0.0, 2.0).unwrap() - 4.0 / 9.0).abs() < 1e-12);
        assert!(matches!(basic.implicit_height(0.0, 3.5), Err(Error::InfeasibleColumn { .. })));

        let twisted = BoatSet::twisted(16.0).unwrap();
        let r = 16.0f64;
        for n in [1.0, 4.0, 16.0, 64.0, 256.0] {
            let x1 = 0.5 * (1.0 + r * r / n).sqrt();
            let x2 = r / n.sqrt();
            let h = twisted.implicit_height(x1, x2).unwrap();
            assert!((h - 1.0 / n).abs() < 1e-10, "n = {n}: {h}");
        }
    }

    #[test]
    fn implicit_height_agrees_with_closed_form() {
        let r = 3.0;
        let b = BoatSet::basic(r).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..5_000 {
            let x1: f64 = rng.random_range(-3.0..3.0);
            let x2: f64 = rng.random_range(-2.9..2.9);
            let exact = f_basic(x1, x2, r);
            if exact <= 1.0 {
                let h = b.implicit_height(x1, x2).unwrap();
                assert!((h - exact).abs() < 1e-9, "({x1}, {x2}): {h} vs {exact}");
            }
        }
    }

    #[test]
    fn representation_examples() {
        let r = 16.0f64;
        let e1 = BoatProfile::twisted().patches[0];
        for p in BoatProfile::twisted().patches {
            assert_eq!(p.representation([p.a, 0.0, 0.0], r), 0.0);
        }
        let h = 0.3;
        let x = [0.5 * (1.0 + r * r * h).sqrt(), r * h.sqrt(), h];
        assert!(e1.representation(x, r).abs() < 1e-9);
        assert!(e1.representation([0.0, 0.0, h], r).abs() < 1e-12);
    }

    #[test]
    fn representation_gradient_matches_finite_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let patches = BoatProfile::twisted().patches;
        for _ in 0..500 {
            let p = patches[rng.random_range(0..4)];
            let x = [rng.random_range(-3.0..3.0), rng.random_range(-3.0..3.0), rng.random_range(0.01..1.0)];
            let g = p.representation_grad(x, 16.0);
            for k in 0..3 {
                let h = 1e-6;
                let mut xp = x;
                let mut xm = x;
                xp[k] += h;
                xm[k] -= h;
                let fd = (p.representation(xp, 16.0) - p.representation(xm, 16.0)) / (2.0 * h);
                assert!((g[k] - fd).abs() <= 1e-5 * g[k].abs().max(1.0), "k = {k}");
            }
        }
    }

    #[test]
    fn implicit_gradient_matches_finite_differences_off_seams() {
        let set = BoatSet::twisted(16.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let mut checked = 0;
        while checked < 300 {
            let x = set.sample_member(&mut rng, 1.0);
            if x.x3 < 0.05 || x.x3 > 0.95 {
                continue;
            }
            let (u, v) = set.to_profile(x.x1, x.x2, x.x3);
            // stay away from the u = ±1/2 and v = 0 seams
            if (u.abs() - 0.5).abs() < 0.02 || v.abs() < 0.02 {
                continue;
            }
            let g = set.implicit_gradient(x.x1, x.x2).unwrap();
            let fd = central_diff(|a, b| set.boundary_height(a, b), x.x1, x.x2, 1e-6);
            let scale = g[0].hypot(g[1]).max(1e-3);
            assert!((g[0] - fd[0]).abs() <= 1e-4 * scale, "{x}: {g:?} vs {fd:?}");
            assert!((g[1] - fd[1]).abs() <= 1e-4 * scale, "{x}: {g:?} vs {fd:?}");
            checked += 1;
        }
    }

    #[test]
    fn basic_patch_gradient_agrees_with_closed_form() {
        let r = 3.0;
        let set = BoatSet::basic(r).unwrap();
        let g = set.implicit_gradient(0.4, 2.0).unwrap();
        let exact = grad_f_basic(0.4, 2.0, r).unwrap();
        assert!((g[0] - exact[0]).abs() < 1e-7 && (g[1] - exact[1]).abs() < 1e-7);
    }

    #[test]
    fn gradient_is_degenerate_at_zero_height() {
        let set = BoatSet::twisted(16.0).unwrap();
        assert!(matches!(set.implicit_gradient(0.3, 0.0), Err(Error::DegenerateInput(_))));
    }
}
