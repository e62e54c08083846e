//! Admissible triples `(A, M, π)`: acceptance set, eligible payoffs and
//! their price.

use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{BoatProfile, BoatSet, EllipsePatch, Point3, Rotation, MEMBERSHIP_TOL};
use crate::solver::acceptance_membership;

/// The eligible payoffs `M = Φ({w : w2 = 0})`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PayoffSpace {
    pub basis: [Point3; 2],
}

impl PayoffSpace {
    /// Spanned by `(1, 1, 1) = Φ(0, 0, √3)` and `(1, -1, 0) = Φ(√2, 0, 0)`.
    pub fn canonical() -> Self {
        Self { basis: [Point3::new(1.0, 1.0, 1.0), Point3::new(1.0, -1.0, 0.0)] }
    }

    fn unit_normal(&self) -> Point3 {
        let [a, b] = self.basis;
        let n = Point3::new(a.x2 * b.x3 - a.x3 * b.x2, a.x3 * b.x1 - a.x1 * b.x3, a.x1 * b.x2 - a.x2 * b.x1);
        n * (1.0 / n.norm())
    }

    pub fn is_independent(&self) -> bool {
        let [a, b] = self.basis;
        let cross = Point3::new(a.x2 * b.x3 - a.x3 * b.x2, a.x3 * b.x1 - a.x1 * b.x3, a.x1 * b.x2 - a.x2 * b.x1);
        cross.norm() > 1e-12 * a.norm() * b.norm()
    }

    /// Euclidean distance from `z` to the plane `M`.
    pub fn distance(&self, z: Point3) -> f64 {
        z.dot(self.unit_normal()).abs()
    }

    pub fn contains(&self, z: Point3, tol: f64) -> bool {
        self.distance(z) <= tol
    }

    /// The payoff `Φ(w1, 0, w3)`.
    pub fn from_rotated(rotation: &Rotation, w1: f64, w3: f64) -> Point3 {
        rotation.apply(Point3::new(w1, 0.0, w3))
    }
}

/// `π(z) = z3` on the payoff space.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct PriceFunctional;

impl PriceFunctional {
    pub const SPAN_TOL: f64 = 1e-9;

    pub fn price(&self, payoffs: &PayoffSpace, z: Point3) -> Result<f64> {
        if !payoffs.contains(z, Self::SPAN_TOL) {
            return Err(Error::NotInPayoffSpace(z.x1, z.x2, z.x3));
        }
        Ok(z.x3)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelKind {
    Basic,
    Twisted,
    Custom,
}

/// `A = Φ(B) + R^3_+` together with `M` and `π`.
#[derive(Debug, Clone, PartialEq)]
pub struct AdmissibleTriple {
    pub kind: ModelKind,
    pub boat: BoatSet,
    pub rotation: Rotation,
    pub payoffs: PayoffSpace,
    pub price: PriceFunctional,
    /// Opening radius of the cone used to certify monotonicity.
    pub cone_radius: f64,
    /// Whether `(B + Φ⁻¹(R^3_+)) ∩ {x3 <= 1} = B` is known to hold, which
    /// licenses the band shortcut in the solver.
    pub band_certified: bool,
    /// Non-fatal remarks produced while building a custom triple.
    pub warnings: Vec<String>,
}

impl AdmissibleTriple {
    /// Unit-disk profile with `r = 3`.
    pub fn basic_triple() -> Self {
        Self::canonical(ModelKind::Basic, BoatSet::basic(3.0).expect("r = 3 is valid"))
    }

    /// Four-quarter profile with `r = 16`.
    pub fn twisted_triple() -> Self {
        Self::canonical(ModelKind::Twisted, BoatSet::twisted(16.0).expect("r = 16 is valid"))
    }

    fn canonical(kind: ModelKind, boat: BoatSet) -> Self {
        Self {
            kind,
            boat,
            rotation: Rotation::canonical(),
            payoffs: PayoffSpace::canonical(),
            price: PriceFunctional,
            cone_radius: std::f64::consts::SQRT_2,
            band_certified: true,
            warnings: Vec::new(),
        }
    }

    /// User-supplied profile. Admissibility is not assumed: the solver never
    /// takes the band shortcut for such triples.
    pub fn custom(r: f64, patches: Vec<EllipsePatch>, cone_radius: f64) -> Result<Self> {
        if !(cone_radius.is_finite() && cone_radius > 0.0) {
            return Err(Error::InvalidModel(format!("cone_R must be positive, got {cone_radius}")));
        }
        let warnings = patches
            .iter()
            .enumerate()
            .filter(|(_, p)| !p.has_interior_origin())
            .map(|(i, p)| {
                format!(
                    "patch {i}: |a| sqrt(alpha) = {:.6} >= 1, convexity of the body is not covered by the interior-origin argument",
                    p.a.abs() * p.alpha.sqrt()
                )
            })
            .collect();
        let boat = BoatSet::new(r, BoatProfile::new(patches)?)?;
        Ok(Self {
            kind: ModelKind::Custom,
            boat,
            rotation: Rotation::canonical(),
            payoffs: PayoffSpace::canonical(),
            price: PriceFunctional,
            cone_radius,
            band_certified: false,
            warnings,
        })
    }

    pub fn r(&self) -> f64 {
        self.boat.r()
    }

    /// Rotated coordinates `Φ⁻¹(x)`.
    pub fn to_rotated(&self, x: Point3) -> Point3 {
        self.rotation.apply_inv(x)
    }

    pub fn from_rotated(&self, p: Point3) -> Point3 {
        self.rotation.apply(p)
    }

    /// `x ∈ A`.
    pub fn contains(&self, x: Point3) -> bool {
        acceptance_membership(self.to_rotated(x), self)
    }

    pub fn price_of(&self, z: Point3) -> Result<f64> {
        self.price.price(&self.payoffs, z)
    }

    pub fn descriptor(&self) -> ModelDescriptor {
        match self.kind {
            ModelKind::Basic | ModelKind::Twisted => {
                ModelDescriptor { model: self.kind, r: None, patches: None, cone_r: None }
            }
            ModelKind::Custom => ModelDescriptor {
                model: ModelKind::Custom,
                r: Some(self.r()),
                patches: Some(self.boat.profile().patches.clone()),
                cone_r: Some(self.cone_radius),
            },
        }
    }
}

/// JSON form of a model: `{"model": "basic"|"twisted"|"custom", "r", "patches", "cone_R"}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelDescriptor {
    pub model: ModelKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub patches: Option<Vec<EllipsePatch>>,
    #[serde(default, rename = "cone_R", skip_serializing_if = "Option::is_none")]
    pub cone_r: Option<f64>,
}

impl ModelDescriptor {
    pub fn build(&self) -> Result<AdmissibleTriple> {
        match self.model {
            ModelKind::Basic | ModelKind::Twisted => {
                if self.r.is_some() || self.patches.is_some() || self.cone_r.is_some() {
                    return Err(Error::InvalidModel(
                        "canonical models take no parameter overrides; use \"custom\"".into(),
                    ));
                }
                Ok(if self.model == ModelKind::Basic {
                    AdmissibleTriple::basic_triple()
                } else {
                    AdmissibleTriple::twisted_triple()
                })
            }
            ModelKind::Custom => {
                let r = self.r.ok_or_else(|| Error::InvalidModel("custom model needs \"r\"".into()))?;
                let patches = self
                    .patches
                    .clone()
                    .ok_or_else(|| Error::InvalidModel("custom model needs \"patches\"".into()))?;
                AdmissibleTriple::custom(r, patches, self.cone_r.unwrap_or(std::f64::consts::SQRT_2))
            }
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }
}

/// Outcome of a sampled no-arbitrage check.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NoArbitrageCheck {
    pub holds: bool,
    /// Smallest price seen over the sampled nonzero nonnegative payoffs.
    pub min_price: f64,
    pub samples: usize,
}

/// Samples nonzero `z = a(1,1,1) + b(1,-1,0)` in `M ∩ R^3_+` (which forces
/// `|b| <= a`) and checks `π(z) > 0`.
pub fn check_no_arbitrage(triple: &AdmissibleTriple, samples: usize, seed: u64) -> NoArbitrageCheck {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let [e, d] = triple.payoffs.basis;
    let mut min_price = f64::INFINITY;
    let mut holds = true;
    let mut taken = 0;
    while taken < samples {
        let a: f64 = rng.random_range(0.0..=1.0);
        let b: f64 = rng.random_range(-a..=a);
        let z = e * a + d * b;
        if z.norm() == 0.0 || z.x1 < 0.0 || z.x2 < 0.0 || z.x3 < 0.0 {
            continue;
        }
        taken += 1;
        match triple.price_of(z) {
            Ok(p) => {
                min_price = min_price.min(p);
                holds &= p > 0.0;
            }
            Err(_) => holds = false,
        }
    }
    NoArbitrageCheck { holds, min_price, samples }
}

/// `0 ∈ A` at the membership tolerance.
pub fn contains_origin(triple: &AdmissibleTriple) -> bool {
    triple.boat.contains(Point3::ZERO, MEMBERSHIP_TOL) && triple.contains(Point3::ZERO)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_basis_lies_in_rotated_plane() {
        let m = PayoffSpace::canonical();
        let rot = Rotation::canonical();
        assert!(m.is_independent());
        for b in m.basis {
            assert!(rot.apply_inv(b).x2.abs() < 1e-12);
        }
        assert!(m.contains(PayoffSpace::from_rotated(&rot, 0.7, -0.2), 1e-12));
        assert!(!m.contains(rot.apply(Point3::new(0.0, 1.0, 0.0)), 1e-3));
    }

    #[test]
    fn price_examples() {
        let m = PayoffSpace::canonical();
        let pi = PriceFunctional;
        assert_eq!(pi.price(&m, Point3::new(1.0, 1.0, 1.0)).unwrap(), 1.0);
        assert_eq!(pi.price(&m, Point3::new(1.0, -1.0, 0.0)).unwrap(), 0.0);
        assert_eq!(pi.price(&m, Point3::new(3.0, 1.0, 2.0)).unwrap(), 2.0);
        assert!(matches!(pi.price(&m, Point3::new(1.0, 0.0, 0.0)), Err(Error::NotInPayoffSpace(..))));
    }

    #[test]
    fn price_is_linear_on_payoffs() {
        let m = PayoffSpace::canonical();
        let rot = Rotation::canonical();
        let z = PayoffSpace::from_rotated(&rot, 0.3, 1.2);
        let y = PayoffSpace::from_rotated(&rot, -2.0, 0.4);
        let lhs = PriceFunctional.price(&m, z * 2.0 + y * -0.5).unwrap();
        let rhs = 2.0 * z.x3 - 0.5 * y.x3;
        assert!((lhs - rhs).abs() < 1e-12);
    }

    #[test]
    fn no_arbitrage_holds_for_both_models() {
        for t in [AdmissibleTriple::basic_triple(), AdmissibleTriple::twisted_triple()] {
            let c = check_no_arbitrage(&t, 10_000, 1);
            assert!(c.holds && c.min_price > 0.0);
        }
        let m = PayoffSpace::canonical();
        assert_eq!(PriceFunctional.price(&m, Point3::new(2.0, 0.0, 1.0)).unwrap(), 1.0);
    }

    #[test]
    fn descriptor_round_trip_and_overrides() {
        let basic = ModelDescriptor::from_json(r#"{"model": "basic"}"#).unwrap().build().unwrap();
        assert_eq!(basic, AdmissibleTriple::basic_triple());
        assert!(ModelDescriptor::from_json(r#"{"model": "twisted", "r": 4}"#).unwrap().build().is_err());
        assert!(ModelDescriptor::from_json(r#"{"model": "basic", "bogus": 1}"#).is_err());

        let text = r#"{"model": "custom", "r": 2.0,
            "patches": [{"a": 0.0, "alpha": 1.0, "beta": 2.0, "u_range": [-1, 1], "v_range": [-1, 1]}],
            "cone_R": 1.5}"#;
        let t = ModelDescriptor::from_json(text).unwrap().build().unwrap();
        assert!(!t.band_certified && t.warnings.is_empty());
        assert_eq!(t.r(), 2.0);
        let again = serde_json::to_string(&t.descriptor()).unwrap();
        assert_eq!(ModelDescriptor::from_json(&again).unwrap().build().unwrap(), t);
    }

    #[test]
    fn custom_patch_on_the_boundary_is_flagged() {
        let patches = vec![EllipsePatch::full(0.0, 1.0, 1.0), EllipsePatch::full(0.5, 4.0, 1.0)];
        let t = AdmissibleTriple::custom(3.0, patches, 1.0).unwrap();
        assert_eq!(t.warnings.len(), 1);
        assert!(AdmissibleTriple::custom(3.0, vec![EllipsePatch::full(0.0, 1.0, 1.0)], -1.0).is_err());
    }
}
