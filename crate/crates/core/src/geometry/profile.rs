//! Planar cross-section profiles: unions of (range-restricted) ellipses.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Closed interval `[lo, hi]`; serialized as a two-element array.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(from = "[f64; 2]", into = "[f64; 2]")]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl From<[f64; 2]> for Interval {
    fn from(a: [f64; 2]) -> Self {
        Interval { lo: a[0], hi: a[1] }
    }
}

impl From<Interval> for [f64; 2] {
    fn from(i: Interval) -> Self {
        [i.lo, i.hi]
    }
}

impl Interval {
    pub const fn new(lo: f64, hi: f64) -> Self {
        Self { lo, hi }
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn mid(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }

    pub fn contains(&self, x: f64, slack: f64) -> bool {
        x >= self.lo - slack && x <= self.hi + slack
    }

    pub fn is_empty(&self) -> bool {
        self.lo.is_nan() || self.hi.is_nan() || self.lo > self.hi
    }

    pub fn intersect(&self, other: &Interval) -> Option<Interval> {
        let i = Interval::new(self.lo.max(other.lo), self.hi.min(other.hi));
        (!i.is_empty()).then_some(i)
    }

    /// Distance from 0 to the interval.
    pub fn abs_min(&self) -> f64 {
        if self.lo > 0.0 {
            self.lo
        } else if self.hi < 0.0 {
            -self.hi
        } else {
            0.0
        }
    }
}

/// `{(u, v) : alpha (u - a)^2 + beta v^2 <= 1, u in u_range, v in v_range}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EllipsePatch {
    pub a: f64,
    pub alpha: f64,
    pub beta: f64,
    pub u_range: Interval,
    pub v_range: Interval,
}

impl EllipsePatch {
    /// The whole ellipse, with ranges equal to its bounding box.
    pub fn full(a: f64, alpha: f64, beta: f64) -> Self {
        let hu = 1.0 / alpha.sqrt();
        let hv = 1.0 / beta.sqrt();
        Self {
            a,
            alpha,
            beta,
            u_range: Interval::new(a - hu, a + hu),
            v_range: Interval::new(-hv, hv),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let finite = [self.a, self.alpha, self.beta, self.u_range.lo, self.u_range.hi, self.v_range.lo, self.v_range.hi]
            .iter()
            .all(|v| v.is_finite());
        if !finite {
            return Err(Error::InvalidModel("patch parameters must be finite".into()));
        }
        if self.alpha <= 0.0 || self.beta <= 0.0 {
            return Err(Error::InvalidModel(format!(
                "patch needs alpha > 0 and beta > 0 (got {}, {})",
                self.alpha, self.beta
            )));
        }
        if self.u_range.is_empty() || self.v_range.is_empty() {
            return Err(Error::InvalidModel("patch ranges must be nonempty".into()));
        }
        Ok(())
    }

    pub fn level(&self, u: f64, v: f64) -> f64 {
        let du = u - self.a;
        self.alpha * du * du + self.beta * v * v
    }

    pub fn in_range(&self, u: f64, v: f64, slack: f64) -> bool {
        self.u_range.contains(u, slack) && self.v_range.contains(v, slack)
    }

    pub fn contains(&self, u: f64, v: f64, slack: f64) -> bool {
        self.in_range(u, v, slack) && self.level(u, v) <= 1.0 + slack
    }

    /// `|a| < 1/sqrt(alpha)`, i.e. the ellipse center offset keeps 0 strictly inside.
    pub fn has_interior_origin(&self) -> bool {
        self.a.abs() * self.alpha.sqrt() < 1.0
    }

    /// Point of the (unrestricted) ellipse boundary at parameter `phi`.
    pub fn ellipse_point(&self, phi: f64) -> (f64, f64) {
        (self.a + phi.cos() / self.alpha.sqrt(), phi.sin() / self.beta.sqrt())
    }

    /// Values `u` reachable by the patch at `v` as close to 0 as its range allows;
    /// this is the trace of the patch on the degenerate slice at height 0.
    pub fn zero_height_extent(&self) -> Option<Interval> {
        let vmin = self.v_range.abs_min();
        let rem = 1.0 - self.beta * vmin * vmin;
        if rem < 0.0 {
            return None;
        }
        let half = (rem / self.alpha).sqrt();
        Interval::new(self.a - half, self.a + half).intersect(&self.u_range)
    }

    /// `u(x1, x3) = x1 / sqrt(1 + r^2 x3)`.
    #[inline]
    pub fn u_of(x1: f64, x3: f64, r: f64) -> f64 {
        x1 / (1.0 + r * r * x3).sqrt()
    }

    /// The representation function `F` whose sublevel set `{F <= 0}` is the
    /// body generated by the full ellipse, for `x3 >= 0`.
    pub fn representation(&self, x: [f64; 3], r: f64) -> f64 {
        let [x1, x2, x3] = x;
        let u = Self::u_of(x1, x3, r);
        let du = u - self.a;
        (r * r * x3 / self.beta) * (self.alpha * du * du - 1.0) + x2 * x2
    }

    /// Analytic gradient of [`representation`](Self::representation).
    pub fn representation_grad(&self, x: [f64; 3], r: f64) -> [f64; 3] {
        let [x1, x2, x3] = x;
        let r2 = r * r;
        let s = 1.0 + r2 * x3;
        let u = x1 / s.sqrt();
        let du = u - self.a;
        let du_dx1 = 1.0 / s.sqrt();
        let d1 = (r2 * x3 / self.beta) * 2.0 * self.alpha * du * du_dx1;
        let d2 = 2.0 * x2;
        let d3 = (r2 / self.beta) * ((self.alpha * du * du - 1.0) - self.alpha * r2 * x3 * du * u / s);
        [d1, d2, d3]
    }

    /// Support function of the sublevel slice `{(u sqrt(1+r^2 t), v r sqrt(t)) : (u,v) in ellipse}`
    /// in direction `s`.
    pub fn support(&self, s: [f64; 2], t: f64, r: f64) -> f64 {
        let w = 1.0 + r * r * t;
        (s[0] * s[0] * w / self.alpha + s[1] * s[1] * r * r * t / self.beta).sqrt() + self.a * s[0] * w.sqrt()
    }
}

/// Ordered union of ellipse patches.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoatProfile {
    pub patches: Vec<EllipsePatch>,
}

impl BoatProfile {
    pub fn new(patches: Vec<EllipsePatch>) -> Result<Self> {
        if patches.is_empty() {
            return Err(Error::InvalidModel("profile needs at least one patch".into()));
        }
        for p in &patches {
            p.validate()?;
        }
        let profile = Self { patches };
        if !profile.contains(0.0, 0.0, 0.0) {
            return Err(Error::InvalidModel("profile must contain the origin".into()));
        }
        Ok(profile)
    }

    /// The unit disk.
    pub fn basic() -> Self {
        Self { patches: vec![EllipsePatch::full(0.0, 1.0, 1.0)] }
    }

    /// Union of four quarter ellipses, point-symmetric about the origin and
    /// with a boundary that is smooth at every seam.
    pub fn twisted() -> Self {
        let narrow = 4.0;
        let wide = 4.0 / 9.0;
        Self {
            patches: vec![
                EllipsePatch { a: 0.5, alpha: narrow, beta: 1.0, u_range: Interval::new(0.5, 1.0), v_range: Interval::new(0.0, 1.0) },
                EllipsePatch { a: 0.5, alpha: wide, beta: 1.0, u_range: Interval::new(-1.0, 0.5), v_range: Interval::new(0.0, 1.0) },
                EllipsePatch { a: -0.5, alpha: narrow, beta: 1.0, u_range: Interval::new(-1.0, -0.5), v_range: Interval::new(-1.0, 0.0) },
                EllipsePatch { a: -0.5, alpha: wide, beta: 1.0, u_range: Interval::new(-0.5, 1.0), v_range: Interval::new(-1.0, 0.0) },
            ],
        }
    }

    pub fn contains(&self, u: f64, v: f64, slack: f64) -> bool {
        self.patches.iter().any(|p| p.contains(u, v, slack))
    }

    /// Whether `x1` lies on the degenerate slice the profile traces at height 0.
    pub fn zero_height_contains(&self, x1: f64, slack: f64) -> bool {
        self.patches
            .iter()
            .filter_map(|p| p.zero_height_extent())
            .any(|i| i.contains(x1, slack))
    }

    /// Axis-aligned box containing the profile, as `(u_range, v_range)`.
    pub fn bounding_box(&self) -> (Interval, Interval) {
        let mut u = Interval::new(f64::INFINITY, f64::NEG_INFINITY);
        let mut v = u;
        for p in &self.patches {
            let hu = 1.0 / p.alpha.sqrt();
            let hv = 1.0 / p.beta.sqrt();
            let pu = Interval::new(p.u_range.lo.max(p.a - hu), p.u_range.hi.min(p.a + hu));
            let pv = Interval::new(p.v_range.lo.max(-hv), p.v_range.hi.min(hv));
            u = Interval::new(u.lo.min(pu.lo), u.hi.max(pu.hi));
            v = Interval::new(v.lo.min(pv.lo), v.hi.max(pv.hi));
        }
        (u, v)
    }

    /// Largest `rho` with `rho (cos theta, sin theta)` in the profile.
    ///
    /// Assumes the profile is star-shaped about the origin, which holds for
    /// every convex profile containing 0.
    pub fn ray_radius(&self, theta: f64) -> f64 {
        let (c, s) = (theta.cos(), theta.sin());
        let (bu, bv) = self.bounding_box();
        let mut hi = bu.lo.abs().max(bu.hi.abs()).hypot(bv.lo.abs().max(bv.hi.abs())) * 1.01 + 1e-12;
        let mut lo = 0.0;
        while self.contains(hi * c, hi * s, 0.0) {
            lo = hi;
            hi *= 2.0;
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.contains(mid * c, mid * s, 0.0) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        lo
    }

    /// Whether this is exactly the unit disk.
    pub fn is_unit_disk(&self) -> bool {
        self.patches.len() == 1 && {
            let p = &self.patches[0];
            p.a == 0.0 && p.alpha == 1.0 && p.beta == 1.0 && p.u_range.lo <= -1.0 && p.u_range.hi >= 1.0 && p.v_range.lo <= -1.0 && p.v_range.hi >= 1.0
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn twisted_profile_contains_unit_segment_on_axis() {
        let c = BoatProfile::twisted();
        for k in 0..=40 {
            let u = -1.0 + k as f64 * 0.05;
            assert!(c.contains(u, 0.0, 1e-12), "u = {u}");
            assert!(c.zero_height_contains(u, 0.0), "u = {u}");
        }
        assert!(!c.contains(1.01, 0.0, 0.0));
        assert!(!c.zero_height_contains(1.01, 0.0));
        // top of the upper half sits at u = 1/2
        assert!(c.contains(0.5, 1.0, 0.0));
        assert!(!c.contains(0.4, 1.0, 1e-12));
    }

    #[test]
    fn twisted_profile_is_point_symmetric() {
        let c = BoatProfile::twisted();
        for i in 0..50 {
            for j in 0..50 {
                let u = -1.2 + 2.4 * i as f64 / 49.0;
                let v = -1.2 + 2.4 * j as f64 / 49.0;
                assert_eq!(c.contains(u, v, 0.0), c.contains(-u, -v, 0.0), "({u}, {v})");
            }
        }
    }

    #[test]
    fn ray_radius_on_disk_is_one() {
        let d = BoatProfile::basic();
        for k in 0..16 {
            let r = d.ray_radius(k as f64 * 0.4);
            assert!((r - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn zero_height_extent_respects_ranges() {
        let e = EllipsePatch { a: 0.5, alpha: 4.0, beta: 1.0, u_range: Interval::new(0.5, 1.0), v_range: Interval::new(0.0, 1.0) };
        assert_eq!(e.zero_height_extent(), Some(Interval::new(0.5, 1.0)));
        let shifted = EllipsePatch { v_range: Interval::new(2.0, 3.0), ..e };
        assert_eq!(shifted.zero_height_extent(), None);
    }

    #[test]
    fn profile_rejects_bad_patches() {
        let bad = EllipsePatch { alpha: -1.0, ..EllipsePatch::full(0.0, 1.0, 1.0) };
        assert!(BoatProfile::new(vec![bad]).is_err());
        let off = EllipsePatch::full(5.0, 1.0, 1.0);
        assert!(BoatProfile::new(vec![off]).is_err());
        assert!(BoatProfile::new(vec![]).is_err());
    }

    #[test]
    fn interval_serializes_as_pair() {
        let i = Interval::new(-0.5, 1.0);
        assert_eq!(serde_json::to_string(&i).unwrap(), "[-0.5,1.0]");
    }
}
