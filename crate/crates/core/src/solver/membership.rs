//! Membership in `B + Φ⁻¹(R^3_+)`, decided in rotated coordinates.
//!
//! With generators `g_i = Φ⁻¹(e_i)` and `q(λ) = p - Σ λ_i g_i`, the point `p`
//! is a member iff `min_{λ >= 0} G(λ) <= tol` where
//! `G(λ) = max(f(q1, q2) - q3, q3 - 1)` and `f` is the (uncapped) lower
//! boundary of the body. `G` is convex, so a first-order certificate at
//! `λ = 0` settles most non-members without any search.

use crate::geometry::{patch_gradient, BoatSet, Point3, Rotation, MEMBERSHIP_TOL, MIN_GRADIENT_HEIGHT};
use crate::model::AdmissibleTriple;

const MAX_SWEEPS: usize = 200;
const MIN_STEP: f64 = 1e-12;
const INITIAL_STEP: f64 = 0.25;

// ±e_i, then e_i - e_j for ordered pairs; the latter keep q3 fixed because
// every generator has the same third coordinate.
const DIRECTIONS: [[f64; 3]; 12] = [
    [1.0, 0.0, 0.0],
    [-1.0, 0.0, 0.0],
    [0.0, 1.0, 0.0],
    [0.0, -1.0, 0.0],
    [0.0, 0.0, 1.0],
    [0.0, 0.0, -1.0],
    [1.0, -1.0, 0.0],
    [-1.0, 1.0, 0.0],
    [1.0, 0.0, -1.0],
    [-1.0, 0.0, 1.0],
    [0.0, 1.0, -1.0],
    [0.0, -1.0, 1.0],
];

/// The feasibility program for one body and rotation.
pub struct ConeSumProgram<'a> {
    boat: &'a BoatSet,
    generators: [Point3; 3],
}

impl<'a> ConeSumProgram<'a> {
    pub fn new(boat: &'a BoatSet, rotation: &Rotation) -> Self {
        Self { boat, generators: [rotation.inv_basis(0), rotation.inv_basis(1), rotation.inv_basis(2)] }
    }

    pub fn point(&self, p: Point3, lambda: [f64; 3]) -> Point3 {
        let g = &self.generators;
        p - (g[0] * lambda[0] + g[1] * lambda[1] + g[2] * lambda[2])
    }

    /// `G(λ)`.
    pub fn objective(&self, p: Point3, lambda: [f64; 3]) -> f64 {
        let q = self.point(p, lambda);
        let f = self.boat.boundary_height(q.x1, q.x2);
        (f - q.x3).max(q.x3 - 1.0)
    }

    /// Whether `λ = 0` provably minimizes `G` with a positive value, i.e.
    /// `p` is certainly outside.
    pub fn certifies_exclusion(&self, p: Point3) -> bool {
        let f = self.boat.boundary_height(p.x1, p.x2);
        let lower = f - p.x3;
        if !f.is_finite() || f < MIN_GRADIENT_HEIGHT || lower <= 1e-8 || lower <= p.x3 - 1.0 {
            return false;
        }
        // 0 ∈ ∂G(0) + normal cone of R^3_+ iff some subgradient is >= 0; any
        // active patch gradient gives one.
        self.boat.active_patches(p.x1, p.x2, f).into_iter().any(|idx| {
            let patch = &self.boat.profile().patches[idx];
            match patch_gradient(patch, self.boat.r(), [p.x1, p.x2, f]) {
                Ok(grad) => self
                    .generators
                    .iter()
                    .all(|g| g.x3 - (grad[0] * g.x1 + grad[1] * g.x2) >= 0.0),
                Err(_) => false,
            }
        })
    }

    /// Projected pattern search on `G` from `start`; returns the best value.
    pub fn descend(&self, p: Point3, start: [f64; 3], target: f64) -> f64 {
        let mut lambda = start.map(|l| l.max(0.0));
        let mut value = self.objective(p, lambda);
        let mut step = INITIAL_STEP;
        for _ in 0..MAX_SWEEPS {
            if value <= target {
                break;
            }
            let mut improved = false;
            for d in DIRECTIONS {
                let cand = [
                    (lambda[0] + step * d[0]).max(0.0),
                    (lambda[1] + step * d[1]).max(0.0),
                    (lambda[2] + step * d[2]).max(0.0),
                ];
                if cand == lambda {
                    continue;
                }
                let v = self.objective(p, cand);
                if v < value {
                    lambda = cand;
                    value = v;
                    improved = true;
                }
            }
            if !improved {
                step *= 0.5;
                if step < MIN_STEP {
                    break;
                }
            }
        }
        value
    }

    pub fn contains(&self, p: Point3) -> bool {
        self.contains_within(p, MEMBERSHIP_TOL)
    }

    /// Membership with slack `tol` on the body and on the optimal `G`.
    pub fn contains_within(&self, p: Point3, tol: f64) -> bool {
        if !p.is_finite() || p.x3 < -tol {
            return false;
        }
        if self.boat.contains(p, tol) {
            return true;
        }
        if self.certifies_exclusion(p) {
            return false;
        }
        // uniform shifts λ = c(1,1,1) lower q3 by c √3
        let c_unit = 1.0 / 3f64.sqrt();
        let top = p.x3.min(1.0);
        let starts = [0.0, (p.x3 - top) * c_unit, (p.x3 - 0.5 * top) * c_unit];
        starts.iter().any(|&c| self.descend(p, [c, c, c], tol) <= tol)
    }
}

/// `p ∈ B + Φ⁻¹(R^3_+)` for rotated coordinates `p`.
pub fn acceptance_membership(p: Point3, triple: &AdmissibleTriple) -> bool {
    ConeSumProgram::new(&triple.boat, &triple.rotation).contains(p)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid_search_feasible(triple: &AdmissibleTriple, p: Point3, step: f64, upper: f64) -> bool {
        let prog = ConeSumProgram::new(&triple.boat, &triple.rotation);
        let n = (upper / step).round() as usize;
        for i in 0..=n {
            for j in 0..=n {
                for k in 0..=n {
                    let l = [i as f64 * step, j as f64 * step, k as f64 * step];
                    if triple.boat.contains(prog.point(p, l), MEMBERSHIP_TOL) {
                        return true;
                    }
                }
            }
        }
        false
    }

    #[test]
    fn origin_and_sequence_points_are_members() {
        let t = AdmissibleTriple::basic_triple();
        assert!(acceptance_membership(Point3::ZERO, &t));
        for n in [1.0, 4.0, 16.0, 64.0, 256.0] {
            assert!(acceptance_membership(Point3::new(0.0, 3.0 / f64::sqrt(n), 1.0 / n), &t));
        }
    }

    #[test]
    fn below_the_floor_is_excluded_and_grid_agrees() {
        for t in [AdmissibleTriple::basic_triple(), AdmissibleTriple::twisted_triple()] {
            let p = Point3::new(0.0, 0.0, -0.1);
            assert!(!acceptance_membership(p, &t));
            assert!(!grid_search_feasible(&t, p, 0.05, 2.0));
        }
        let t = AdmissibleTriple::basic_triple();
        assert!(!t.contains(t.from_rotated(Point3::new(0.0, 0.0, -1.0))));
    }

    #[test]
    fn cone_shifts_of_members_stay_members() {
        let t = AdmissibleTriple::twisted_triple();
        for n in [1.0, 4.0, 16.0] {
            let r: f64 = 16.0;
            let x = t.from_rotated(Point3::new(-0.5 * (1.0 + r * r / n).sqrt(), -r / n.sqrt(), 1.0 / n));
            assert!(t.contains(x));
            assert!(t.contains(x + Point3::new(0.3, 2.0, 0.0)));
            assert!(t.contains(x + Point3::new(5.0, 5.0, 5.0)));
        }
    }

    #[test]
    fn points_above_the_band_need_the_search() {
        // far above the body: reachable only by moving down the cone
        let t = AdmissibleTriple::basic_triple();
        let prog = ConeSumProgram::new(&t.boat, &t.rotation);
        let p = Point3::new(4.0, 0.0, 5.0);
        assert!(!t.boat.contains(p, MEMBERSHIP_TOL));
        assert!(!prog.certifies_exclusion(p));
        assert!(acceptance_membership(p, &t));
        assert!(grid_search_feasible(&t, p, 0.25, 8.0));
    }

    #[test]
    fn exclusion_certificate_is_sound_against_grid() {
        let t = AdmissibleTriple::basic_triple();
        let prog = ConeSumProgram::new(&t.boat, &t.rotation);
        for p in [Point3::new(0.0, 2.0, 0.2), Point3::new(1.5, 0.0, 0.05), Point3::new(-0.5, -2.5, 0.5)] {
            assert!(prog.certifies_exclusion(p), "{p}");
            assert!(!grid_search_feasible(&t, p, 0.02, 0.6), "{p}");
        }
    }
}
