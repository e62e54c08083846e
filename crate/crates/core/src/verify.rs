//! Certification runner: every quantitative property of the two models as a
//! pass/fail check with its worst observed violation.
//!
//! A check's `worst_violation` is the largest amount by which the inequality
//! under test failed (negative when it held with margin); the check passes
//! iff that is at most its tolerance.

use std::f64::consts::{FRAC_PI_2, SQRT_2, TAU};

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::diagnostics::{lsc_probe, selection_oscillation, Schedule, SequenceSpec};
use crate::geometry::{f_basic, grad_f_basic, patch_gradient, BoatProfile, BoatSet, EllipsePatch, IceCreamCone, Point3, Rotation};
use crate::model::{check_no_arbitrage, AdmissibleTriple};
use crate::par;
use crate::sampling::{self, cone_point, cube, ellipse_arc_point, height};
use crate::solver::{rho, SolverConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClaimResult {
    pub claim_id: String,
    /// Short statement of the property checked.
    pub anchor: String,
    pub status: Status,
    pub worst_violation: f64,
    pub tolerance: f64,
    pub samples: usize,
    pub seed: u64,
}

impl ClaimResult {
    fn new(id: &str, anchor: &str, worst: f64, tolerance: f64, samples: usize, seed: u64) -> Self {
        let status = if worst <= tolerance { Status::Pass } else { Status::Fail };
        Self {
            claim_id: id.into(),
            anchor: anchor.into(),
            status,
            worst_violation: worst,
            tolerance,
            samples,
            seed,
        }
    }

    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub seed: u64,
    pub claims: Vec<ClaimResult>,
}

impl VerifyReport {
    pub fn all_passed(&self) -> bool {
        self.claims.iter().all(ClaimResult::passed)
    }
}

/// Sample sizes of the individual checks.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SampleSizes {
    pub convexity_pairs: usize,
    pub monotonicity_pairs: usize,
    pub basic_gradient: usize,
    pub twisted_gradient_per_patch: usize,
    pub cone: usize,
    pub sandwich: usize,
    pub no_arbitrage: usize,
    pub crouzeix_directions: usize,
    pub crouzeix_heights: usize,
    pub df3: usize,
    pub seam_heights: usize,
    pub lsc_terms: u64,
    pub selection_depth: u32,
}

impl Default for SampleSizes {
    fn default() -> Self {
        Self {
            convexity_pairs: 10_000,
            monotonicity_pairs: 10_000,
            basic_gradient: 100_000,
            twisted_gradient_per_patch: 20_000,
            cone: 10_000,
            sandwich: 1_000,
            no_arbitrage: 100_000,
            crouzeix_directions: 1_000,
            crouzeix_heights: 100,
            df3: 10_000,
            seam_heights: 1_000,
            lsc_terms: 100,
            selection_depth: 10,
        }
    }
}

const BASIC_R: f64 = 3.0;
const TWISTED_R: f64 = 16.0;

fn nan_to_inf(v: f64) -> f64 {
    if v.is_nan() {
        f64::INFINITY
    } else {
        v
    }
}

pub fn rotation_orthogonal(seed: u64) -> ClaimResult {
    let rot = Rotation::canonical();
    let a = rot.apply(Point3::new(0.0, 0.0, 3f64.sqrt())) - Point3::new(1.0, 1.0, 1.0);
    let b = rot.apply(Point3::new(SQRT_2, 0.0, 0.0)) - Point3::new(1.0, -1.0, 0.0);
    let worst = rot.orthogonality_defect().max((rot.determinant() - 1.0).abs()).max(a.norm_inf()).max(b.norm_inf());
    ClaimResult::new("rotation_orthogonal", "rotation is orthogonal with det 1 and maps the anchor vectors", worst, 1e-12, 1, seed)
}

/// Signed amount by which `x` lies outside `boat` (in height units).
fn outside_by(boat: &BoatSet, x: Point3) -> f64 {
    (boat.boundary_height(x.x1, x.x2) - x.x3).max(x.x3 - 1.0).max(-x.x3)
}

pub fn convexity(id: &str, anchor: &str, boat: &BoatSet, pairs: usize, seed: u64, stream: u64) -> ClaimResult {
    let mut rng = sampling::stream(seed, stream);
    let mids: Vec<Point3> =
        (0..pairs).map(|_| boat.sample_member(&mut rng, 0.5).midpoint(boat.sample_member(&mut rng, 0.5))).collect();
    let worst = nan_to_inf(par::max_of(&mids, |m| outside_by(boat, *m)));
    ClaimResult::new(id, anchor, worst, 1e-9, pairs, seed)
}

/// `b + k ∈ B` for `b ∈ B`, `k ∈ K_R`, `b3 + k3 <= 1`.
pub fn monotonicity(id: &str, anchor: &str, boat: &BoatSet, radius: f64, pairs: usize, seed: u64, stream: u64) -> ClaimResult {
    let mut rng = sampling::stream(seed, stream);
    let sums: Vec<Point3> = (0..pairs)
        .map(|_| {
            let b = boat.sample_member(&mut rng, 0.5);
            b + cone_point(&mut rng, radius, 1.0 - b.x3)
        })
        .collect();
    let worst = nan_to_inf(par::max_of(&sums, |x| outside_by(boat, *x)));
    ClaimResult::new(id, anchor, worst, 1e-9, pairs, seed)
}

/// `sup ||∇f_r||^2 <= 4(1 + r^2)/r^4` over lower-boundary points of `B_3`.
pub fn basic_gradient_bound(samples: usize, seed: u64) -> ClaimResult {
    let r = BASIC_R;
    let boat = BoatSet::basic(r).expect("valid");
    let mut rng = sampling::stream(seed, 3);
    let pts: Vec<Point3> = (0..samples)
        .map(|_| {
            let theta = rng.random_range(0.0..TAU);
            boat.lift(theta.cos(), theta.sin(), height(&mut rng))
        })
        .collect();
    let bound = 4.0 * (1.0 + r * r) / r.powi(4);
    let worst = par::max_of(&pts, |x| match grad_f_basic(x.x1, x.x2, r) {
        Ok(g) if f_basic(x.x1, x.x2, r) > 0.0 => g[0] * g[0] + g[1] * g[1] - bound,
        _ => f64::INFINITY,
    });
    ClaimResult::new("basic_gradient_bound", "squared gradient norm of the basic boundary is at most 4(1+r^2)/r^4", nan_to_inf(worst), 1e-9, samples, seed)
}

/// `Φ⁻¹(R^3_+) ⊂ K_√2`.
pub fn cone_inclusion(samples: usize, seed: u64) -> ClaimResult {
    let rot = Rotation::canonical();
    let mut rng = sampling::stream(seed, 4);
    let mut lams: Vec<Point3> = vec![Point3::new(1.0, 0.0, 0.0), Point3::new(0.0, 1.0, 0.0), Point3::new(0.0, 0.0, 1.0)];
    while lams.len() < samples {
        lams.push(Point3::new(rng.random(), rng.random(), rng.random()));
    }
    let worst = par::max_of(&lams, |l| {
        let p = rot.apply_inv(*l);
        let scale = l.dot(*l).max(f64::MIN_POSITIVE);
        ((p.x1 * p.x1 + p.x2 * p.x2 - 2.0 * p.x3 * p.x3) / scale).max(-p.x3)
    });
    ClaimResult::new("cone_inclusion", "rotated nonnegative orthant lies in the cone of radius sqrt(2)", nan_to_inf(worst), 1e-9, lams.len(), seed)
}

pub fn rho_zero(id: &str, triple: &AdmissibleTriple, seed: u64) -> ClaimResult {
    let worst = rho(Point3::ZERO, triple, &SolverConfig::default()).map(f64::abs).unwrap_or(f64::INFINITY);
    ClaimResult::new(id, "optimal value at the zero position is 0", worst, 1e-9, 1, seed)
}

/// `-||x||∞ <= ρ(x) <= ||x||∞` for `x ∈ [-0.5, 0.5]^3`.
pub fn sandwich(id: &str, triple: &AdmissibleTriple, samples: usize, seed: u64, stream: u64) -> ClaimResult {
    let mut rng = sampling::stream(seed, stream);
    let xs: Vec<Point3> = (0..samples).map(|_| cube(&mut rng, 0.5)).collect();
    let cfg = SolverConfig::default();
    let worst = par::max_of(&xs, |x| match rho(*x, triple, &cfg) {
        Ok(v) => (v - x.norm_inf()).max(-x.norm_inf() - v),
        Err(_) => f64::INFINITY,
    });
    ClaimResult::new(id, "optimal value lies between -||x||_inf and ||x||_inf", nan_to_inf(worst), 1e-6, samples, seed)
}

pub fn no_arbitrage(id: &str, triple: &AdmissibleTriple, samples: usize, seed: u64, stream: u64) -> ClaimResult {
    let c = check_no_arbitrage(triple, samples, seed ^ stream.rotate_left(32));
    let worst = if c.holds { -c.min_price } else { f64::INFINITY };
    ClaimResult::new(id, "nonzero nonnegative payoffs have positive price", worst, 0.0, samples, seed)
}

/// Patches whose ellipse keeps the origin strictly inside, with their `r`.
fn interior_origin_patches() -> Vec<(EllipsePatch, f64)> {
    let mut out: Vec<(EllipsePatch, f64)> =
        BoatProfile::basic().patches.into_iter().map(|p| (EllipsePatch::full(p.a, p.alpha, p.beta), BASIC_R)).collect();
    out.extend(
        BoatProfile::twisted()
            .patches
            .into_iter()
            .filter(EllipsePatch::has_interior_origin)
            .map(|p| (EllipsePatch::full(p.a, p.alpha, p.beta), TWISTED_R)),
    );
    out
}

/// Midpoint concavity of `t ↦ σ_s(t)` on `[0, 1]`.
pub fn crouzeix_concavity(directions: usize, heights: usize, seed: u64) -> ClaimResult {
    let patches = interior_origin_patches();
    let mut rng = sampling::stream(seed, 9);
    let mut cases = Vec::with_capacity(patches.len() * directions * heights);
    for &(patch, r) in &patches {
        for _ in 0..directions {
            let s = [rng.random_range(-1.0..=1.0), rng.random_range(-1.0..=1.0)];
            for _ in 0..heights {
                cases.push((patch, r, s, rng.random::<f64>(), rng.random::<f64>()));
            }
        }
    }
    let worst = par::max_of(&cases, |&(p, r, s, t1, t2)| {
        0.5 * (p.support(s, t1, r) + p.support(s, t2, r)) - p.support(s, 0.5 * (t1 + t2), r)
    });
    ClaimResult::new("crouzeix_concavity", "support function of the slices is concave in the height", nan_to_inf(worst), 1e-9, cases.len(), seed)
}

/// `|∂F/∂x3| >= 1e-12` on `B_r(E)` away from height 0.
pub fn df3_nonvanishing(samples: usize, seed: u64) -> ClaimResult {
    let patches = interior_origin_patches();
    let mut rng = sampling::stream(seed, 10);
    let pts: Vec<(EllipsePatch, f64, [f64; 3])> = (0..samples)
        .map(|i| {
            let (p, r) = patches[i % patches.len()];
            let (u, v) = loop {
                let u = p.a + rng.random_range(-1.0..=1.0) / p.alpha.sqrt();
                let v = rng.random_range(-1.0..=1.0) / p.beta.sqrt();
                if p.level(u, v) <= 1.0 {
                    break (u, v);
                }
            };
            let t = height(&mut rng);
            (p, r, [u * (1.0 + r * r * t).sqrt(), v * r * t.sqrt(), t])
        })
        .collect();
    let worst = par::max_of(&pts, |(p, r, x)| 1e-12 - p.representation_grad(*x, *r)[2].abs());
    ClaimResult::new("dF3_nonvanishing", "vertical derivative of the representation never vanishes above height 0", nan_to_inf(worst), 0.0, samples, seed)
}

/// Largest `||∇f|| - bound` over lower-boundary points of the body built on
/// the full ellipse of `patch`, at parameters in `[phi_lo, phi_hi]`.
fn gradient_excess(patch: EllipsePatch, r: f64, phi: (f64, f64), bound: f64, samples: usize, rng: &mut impl Rng) -> f64 {
    let full = EllipsePatch::full(patch.a, patch.alpha, patch.beta);
    let pts: Vec<[f64; 3]> = (0..samples)
        .map(|_| {
            let (u, v) = ellipse_arc_point(rng, &full, phi.0, phi.1);
            let t = height(rng);
            [u * (1.0 + r * r * t).sqrt(), v * r * t.sqrt(), t]
        })
        .collect();
    par::max_of(&pts, |x| match patch_gradient(&full, r, *x) {
        Ok(g) => g[0].hypot(g[1]) - bound,
        Err(_) => f64::INFINITY,
    })
}

/// `||∇f|| <= 2/r` on the side `u - a >= 0` (mirrored for `a < 0`).
pub fn twisted_gradient_bound_1(per_patch: usize, seed: u64) -> ClaimResult {
    let r = TWISTED_R;
    let mut rng = sampling::stream(seed, 11);
    let patches = BoatProfile::twisted().patches;
    let worst = [(patches[0], (-FRAC_PI_2, FRAC_PI_2)), (patches[2], (FRAC_PI_2, 3.0 * FRAC_PI_2))]
        .into_iter()
        .map(|(p, phi)| gradient_excess(p, r, phi, 2.0 / r, per_patch, &mut rng))
        .fold(f64::NEG_INFINITY, f64::max);
    ClaimResult::new("twisted_gradient_bound_1", "gradient norm at most 2/r on the outer side of the steep quarters", nan_to_inf(worst), 1e-9, 2 * per_patch, seed)
}

pub fn gradient_bound_2(patch: &EllipsePatch, r: f64) -> f64 {
    let (a, alpha) = (patch.a, patch.alpha);
    16.0 * (alpha * r * r / (r * r + 1.0)).max(1.0) / (r * (8.0 - 9.0 * alpha * a * a))
}

/// The second bound on the flat quarters, over the whole ellipse.
pub fn twisted_gradient_bound_2(per_patch: usize, seed: u64) -> ClaimResult {
    let r = TWISTED_R;
    let mut rng = sampling::stream(seed, 12);
    let patches = BoatProfile::twisted().patches;
    let worst = [patches[1], patches[3]]
        .into_iter()
        .map(|p| gradient_excess(p, r, (0.0, TAU), gradient_bound_2(&p, r), per_patch, &mut rng))
        .fold(f64::NEG_INFINITY, f64::max);
    ClaimResult::new(
        "twisted_gradient_bound_2",
        "gradient norm at most 16 max(alpha r^2/(r^2+1), 1) / (r (8 - 9 alpha a^2)) on the flat quarters",
        nan_to_inf(worst),
        1e-9,
        2 * per_patch,
        seed,
    )
}

/// Gradients of the representations agree across the seams of the profile.
pub fn seam_smoothness(heights: usize, seed: u64) -> ClaimResult {
    let r = TWISTED_R;
    let p = BoatProfile::twisted().patches;
    let mut rng = sampling::stream(seed, 14);
    let mut worst = f64::NEG_INFINITY;
    for _ in 0..heights {
        let t = rng.random_range(1e-6..=1.0);
        let s = (1.0 + r * r * t).sqrt();
        let x2 = rng.random_range(0.0..=1.0) * r * t.sqrt();
        // u = ±1/2 with v of matching sign: steep and flat quarters share the gradient
        for (steep, flat, sign) in [(p[0], p[1], 1.0), (p[2], p[3], -1.0)] {
            let x = [sign * 0.5 * s, sign * x2, t];
            let (g1, g2) = (steep.representation_grad(x, r), flat.representation_grad(x, r));
            worst = worst.max((0..3).map(|k| (g1[k] - g2[k]).abs()).fold(0.0, f64::max));
        }
        // v = 0 at u = ±1: the flat quarter's gradient is (-1/3, 0, +1/3) times the steep one's
        for (steep, flat, sign) in [(p[0], p[1], 1.0), (p[2], p[3], -1.0)] {
            let g1 = steep.representation_grad([sign * s, 0.0, t], r);
            let g2 = flat.representation_grad([-sign * s, 0.0, t], r);
            let d = [(g2[0] + g1[0] / 3.0).abs(), g1[1].abs().max(g2[1].abs()), (g2[2] - g1[2] / 3.0).abs()];
            worst = worst.max(d.into_iter().fold(0.0, f64::max));
        }
    }
    ClaimResult::new("seam_smoothness", "representation gradients match across the quarter seams", nan_to_inf(worst), 1e-9, heights, seed)
}

pub fn lsc_failure_basic(terms: u64, seed: u64) -> ClaimResult {
    let t = AdmissibleTriple::basic_triple();
    let worst = lsc_probe(Point3::ZERO, &SequenceSpec::basic_lsc(BASIC_R, terms), &t, &SolverConfig::default())
        .map(|rep| (rep.gap - 1.0).abs())
        .unwrap_or(f64::INFINITY);
    ClaimResult::new("lsc_failure_basic", "optimal set at 0 keeps a point at distance 1 from all perturbed sets", worst, 1e-2, terms as usize, seed)
}

/// Alternating sequence evaluated at `n = 4^k`, `k <= depth`.
pub fn selection_failure_twisted(depth: u32, seed: u64) -> ClaimResult {
    let t = AdmissibleTriple::twisted_triple();
    let seq = SequenceSpec::twisted_alternating(TWISTED_R, 4u64.pow(depth)).with_schedule(Schedule::Geometric { ratio: 4 });
    let worst = selection_oscillation(&seq, &t, &SolverConfig::default())
        .map(|rep| (rep.oscillation - 1.0).abs())
        .unwrap_or(f64::INFINITY);
    ClaimResult::new("selection_failure_twisted", "forced selections along the alternating sequence stay distance 1 apart", worst, 1e-2, 2 * (depth as usize + 1), seed)
}

/// `r > max(√2, 1/√(5 - α))` for the steep quarters.
pub fn param_r_gt_bound(seed: u64) -> ClaimResult {
    let patches = BoatProfile::twisted().patches;
    let worst = [patches[0], patches[2]]
        .iter()
        .map(|p| SQRT_2.max(1.0 / (5.0 - p.alpha).sqrt()) - TWISTED_R)
        .fold(f64::NEG_INFINITY, f64::max);
    ClaimResult::new("param_r_gt_bound", "r exceeds max(sqrt 2, 1/sqrt(5 - alpha))", worst, 0.0, 2, seed)
}

/// `8 > 9 α a^2` for the flat quarters.
pub fn param_8_gt_9aa(seed: u64) -> ClaimResult {
    let patches = BoatProfile::twisted().patches;
    let worst = [patches[1], patches[3]].iter().map(|p| 9.0 * p.alpha * p.a * p.a - 8.0).fold(f64::NEG_INFINITY, f64::max);
    ClaimResult::new("param_8_gt_9aa", "flat quarters satisfy 8 > 9 alpha a^2", worst, 0.0, 2, seed)
}

/// Runs every check in a fixed order; a failing check never stops the run.
pub fn run_all(seed: u64) -> Vec<ClaimResult> {
    run_with(seed, &SampleSizes::default())
}

pub fn run_with(seed: u64, n: &SampleSizes) -> Vec<ClaimResult> {
    let basic = AdmissibleTriple::basic_triple();
    let twisted = AdmissibleTriple::twisted_triple();
    let basic_r = IceCreamCone::basic_monotonicity_radius(BASIC_R);
    let twisted_r = IceCreamCone::twisted_monotonicity_radius(TWISTED_R);
    vec![
        rotation_orthogonal(seed),
        convexity("basic_convexity", "midpoints of basic body members are members", &basic.boat, n.convexity_pairs, seed, 1),
        monotonicity(
            "basic_monotonicity",
            "basic body is invariant under cone shifts below height 1, R = r^2/(2 sqrt(1+r^2))",
            &basic.boat,
            basic_r,
            n.monotonicity_pairs,
            seed,
            2,
        ),
        basic_gradient_bound(n.basic_gradient, seed),
        cone_inclusion(n.cone, seed),
        rho_zero("rho_zero_basic", &basic, seed),
        rho_zero("rho_zero_twisted", &twisted, seed),
        sandwich("sandwich_basic", &basic, n.sandwich, seed, 5),
        sandwich("sandwich_twisted", &twisted, n.sandwich, seed, 6),
        no_arbitrage("no_arbitrage_basic", &basic, n.no_arbitrage, seed, 7),
        no_arbitrage("no_arbitrage_twisted", &twisted, n.no_arbitrage, seed, 8),
        crouzeix_concavity(n.crouzeix_directions, n.crouzeix_heights, seed),
        df3_nonvanishing(n.df3, seed),
        twisted_gradient_bound_1(n.twisted_gradient_per_patch, seed),
        twisted_gradient_bound_2(n.twisted_gradient_per_patch, seed),
        convexity("twisted_convexity", "midpoints of four-quarter body members are members", &twisted.boat, n.convexity_pairs, seed, 13),
        seam_smoothness(n.seam_heights, seed),
        monotonicity(
            "twisted_monotonicity",
            "four-quarter body is invariant under cone shifts below height 1, R = 7r/16",
            &twisted.boat,
            twisted_r,
            n.monotonicity_pairs,
            seed,
            15,
        ),
        lsc_failure_basic(n.lsc_terms, seed),
        selection_failure_twisted(n.selection_depth, seed),
        param_r_gt_bound(seed),
        param_8_gt_9aa(seed),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parameter_checks_pass() {
        assert!(param_r_gt_bound(0).passed());
        let c = param_8_gt_9aa(0);
        assert!(c.passed());
        assert_eq!(c.worst_violation, -7.0);
        let e2 = BoatProfile::twisted().patches[1];
        assert!((gradient_bound_2(&e2, 16.0) - 1.0 / 7.0).abs() < 1e-15);
    }

    #[test]
    fn status_follows_tolerance() {
        assert!(ClaimResult::new("a", "", 1e-10, 1e-9, 1, 0).passed());
        assert!(!ClaimResult::new("a", "", 1e-8, 1e-9, 1, 0).passed());
        assert!(!ClaimResult::new("a", "", f64::INFINITY, 1e-9, 1, 0).passed());
    }

    #[test]
    fn seam_relations_hold() {
        assert!(seam_smoothness(50, 0).passed());
    }

    #[test]
    fn quick_geometry_checks_pass() {
        let basic = BoatSet::basic(BASIC_R).unwrap();
        assert!(convexity("c", "", &basic, 500, 1, 1).passed());
        assert!(cone_inclusion(500, 1).passed());
        assert!(crouzeix_concavity(20, 20, 1).passed());
    }
}
