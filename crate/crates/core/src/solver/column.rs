//! Exact column heights of `B + Φ⁻¹(R^3_+)`.
//!
//! Writing a cone element as `Σ λ_i g_i` with `S = Σ λ_i`, its horizontal part
//! ranges over `S·T` for the triangle `T = conv{(g_i1, g_i2)}` and its height
//! is `S/√3`. Hence the lowest point of the column over `q` is
//!
//! `H(q) = min { f(y) + γ_T(q - y) / √3 : f(y) <= 1 }`
//!
//! with `f` the lower boundary of the body and `γ_T` the gauge of `T`. The
//! objective is convex in `y`, so nested golden-section searches over the top
//! slice `{f <= 1}` solve it; every value returned is attained by a feasible
//! `y`, so `H` is never underestimated.

use crate::geometry::{BoatSet, Rotation};

use super::search::golden_section;

const SQRT3: f64 = 1.732_050_807_568_877_2;

/// Gauge of the horizontal triangle of the cone generators.
#[derive(Debug, Clone, Copy)]
pub struct TriangleGauge {
    normals: [[f64; 2]; 3],
}

impl TriangleGauge {
    /// `T` spanned by the horizontal parts of `Φ⁻¹(e_i)`; the origin must be
    /// interior, which holds for the canonical rotation (it is the centroid).
    pub fn new(rotation: &Rotation) -> Self {
        let v: Vec<[f64; 2]> = (0..3).map(|i| rotation.inv_basis(i)).map(|g| [g.x1, g.x2]).collect();
        let mut normals = [[0.0; 2]; 3];
        for (k, n) in normals.iter_mut().enumerate() {
            let a = v[(k + 1) % 3];
            let b = v[(k + 2) % 3];
            // solve <n, a> = <n, b> = 1
            let det = a[0] * b[1] - a[1] * b[0];
            *n = [(b[1] - a[1]) / det, (a[0] - b[0]) / det];
        }
        Self { normals }
    }

    /// `min {S >= 0 : d ∈ S·T}`.
    pub fn eval(&self, d: [f64; 2]) -> f64 {
        self.normals.iter().map(|n| n[0] * d[0] + n[1] * d[1]).fold(0.0, f64::max)
    }
}

pub struct ColumnHeight<'a> {
    boat: &'a BoatSet,
    gauge: TriangleGauge,
    tol: f64,
}

impl<'a> ColumnHeight<'a> {
    pub fn new(boat: &'a BoatSet, rotation: &Rotation, tol: f64) -> Self {
        Self { boat, gauge: TriangleGauge::new(rotation), tol }
    }

    /// `v`-range of the profile over abscissa `u`, as the hull of the patch
    /// chords (the profile is assumed convex).
    fn chord(&self, u: f64) -> Option<(f64, f64)> {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for p in &self.boat.profile().patches {
            if !p.u_range.contains(u, 0.0) {
                continue;
            }
            let du = u - p.a;
            let rem = 1.0 - p.alpha * du * du;
            if rem < 0.0 {
                continue;
            }
            let half = (rem / p.beta).sqrt();
            let (a, b) = (p.v_range.lo.max(-half), p.v_range.hi.min(half));
            if a <= b {
                lo = lo.min(a);
                hi = hi.max(b);
            }
        }
        (lo <= hi).then_some((lo, hi))
    }

    /// `H(q1, q2)`.
    pub fn height(&self, q1: f64, q2: f64) -> f64 {
        let r = self.boat.r();
        let su = (1.0 + r * r).sqrt();
        let (bu, _) = self.boat.profile().bounding_box();
        let objective = |y1: f64, y2: f64| {
            let f = self.boat.boundary_height(y1, y2);
            f + self.gauge.eval([q1 - y1, q2 - y2]) / SQRT3
        };
        let inner = |y1: f64| match self.chord(y1 / su) {
            Some((vlo, vhi)) => golden_section(|y2| objective(y1, y2), r * vlo, r * vhi, self.tol).1,
            None => f64::INFINITY,
        };
        golden_section(inner, su * bu.lo, su * bu.hi, self.tol).1
    }
}
