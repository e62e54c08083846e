//! Optimal value `ρ(x)` and optimal set `R(x)`.
//!
//! In rotated coordinates `p = Φ⁻¹(x)` a payoff is `Φ(w1, 0, w3)` with price
//! `w3 / √3`, and `Φ(w) + x ∈ A` iff `p + w ∈ B + Φ⁻¹(R^3_+)`. Because the
//! acceptance set is upward closed along `(0, 0, 1)` in these coordinates,
//! each `w1` has a lowest admissible `w3`, the convex function `h(w1)`.
//! `ρ` is `min h / √3` and `R(x)` is the segment over the flat bottom of `h`.

mod column;
mod membership;
mod oracle;
mod search;

use serde::{Deserialize, Serialize};

pub use column::{ColumnHeight, TriangleGauge};
pub use membership::{acceptance_membership, ConeSumProgram};
pub use oracle::{brute_force_oracle, OracleResult, ORACLE_Q1_WINDOW, ORACLE_Q3_WINDOW};
pub use search::{golden_section, interval_extent};

use crate::error::{Error, Result};
use crate::geometry::{point_segment_distance, Interval, Point3};
use crate::model::AdmissibleTriple;
use crate::par;

const SQRT3: f64 = 1.732_050_807_568_877_2;
const MAX_BRACKET_DOUBLINGS: usize = 8;

/// How the column heights at the minimizer were obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SolverPath {
    /// Lower boundary of the body read off directly (height within the band).
    Band,
    /// Column heights from the cone-sum program (minimizer above the band).
    General,
}

impl std::fmt::Display for SolverPath {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            SolverPath::Band => "band",
            SolverPath::General => "general",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    /// Heights up to `1 + band_tol` count as inside the band.
    pub band_tol: f64,
    /// Final bracket width of the golden-section search on `w1`.
    pub search_tol: f64,
    /// Relative slack on the optimal column height defining the flat bottom.
    pub flat_tol: f64,
    /// Absolute part of the same slack.
    pub flat_abs_tol: f64,
    /// Absolute slack used instead when the minimizer lies above the band,
    /// where heights come from a nested search rather than a bisection.
    pub general_flat_tol: f64,
    /// Half-width of the initial `w1` bracket around `-p1`; derived from `x`
    /// when unset.
    pub bracket_half_width: Option<f64>,
    /// Largest `w3` tried before a column is declared infeasible.
    pub max_w3: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            band_tol: 1e-12,
            search_tol: 1e-10,
            flat_tol: 1e-12,
            flat_abs_tol: 1e-18,
            general_flat_tol: 1e-9,
            bracket_half_width: None,
            max_w3: 1e3,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        let positive = [self.band_tol, self.search_tol, self.flat_tol, self.flat_abs_tol, self.general_flat_tol, self.max_w3];
        if positive.iter().any(|v| !(v.is_finite() && *v > 0.0)) {
            return Err(Error::InvalidArgument("solver tolerances must be positive".into()));
        }
        if let Some(h) = self.bracket_half_width {
            if !(h.is_finite() && h > 0.0) {
                return Err(Error::InvalidArgument("bracket half-width must be positive".into()));
            }
        }
        Ok(())
    }
}

/// `R(x)` as a segment of payoffs at price `rho`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimalSet {
    pub rho: f64,
    pub w1_interval: Interval,
    pub w3_star: f64,
    /// Payoffs `Φ(w1, 0, w3*)` at the two ends of `w1_interval`.
    pub endpoints: [Point3; 2],
    /// The hedged positions `z + x` for the two endpoint payoffs.
    pub hedged: [Point3; 2],
    pub path: SolverPath,
}

impl OptimalSet {
    pub fn width(&self) -> f64 {
        self.w1_interval.width()
    }

    pub fn is_singleton(&self, tol: f64) -> bool {
        self.width() <= tol
    }

    pub fn center(&self) -> Point3 {
        self.endpoints[0].midpoint(self.endpoints[1])
    }

    /// Payoff at relative position `theta ∈ [0, 1]` along the segment.
    pub fn payoff_at(&self, theta: f64) -> Point3 {
        self.endpoints[0] * (1.0 - theta) + self.endpoints[1] * theta
    }

    pub fn distance_to(&self, z: Point3) -> f64 {
        point_segment_distance(z, self.endpoints[0], self.endpoints[1])
    }
}

/// Column heights `q3(w1) = p3 + h(w1)` for one position.
struct Columns<'a> {
    triple: &'a AdmissibleTriple,
    column: ColumnHeight<'a>,
    p: Point3,
    cfg: &'a SolverConfig,
}

impl<'a> Columns<'a> {
    fn new(triple: &'a AdmissibleTriple, p: Point3, cfg: &'a SolverConfig) -> Self {
        Self { triple, column: ColumnHeight::new(&triple.boat, &triple.rotation, 0.1 * cfg.search_tol), p, cfg }
    }

    fn height(&self, w1: f64) -> (f64, SolverPath) {
        let q1 = self.p.x1 + w1;
        if self.triple.band_certified {
            let t = self.triple.boat.boundary_height(q1, self.p.x2);
            if t <= 1.0 + self.cfg.band_tol {
                return (t, SolverPath::Band);
            }
        }
        (self.general_height(q1), SolverPath::General)
    }

    /// Exact column height above the band; `+inf` beyond `max_w3`.
    fn general_height(&self, q1: f64) -> f64 {
        let h = self.column.height(q1, self.p.x2);
        if h - self.p.x3 <= self.cfg.max_w3 {
            h
        } else {
            f64::INFINITY
        }
    }

    /// Minimizer of the column height, widening the bracket while the
    /// minimizer sits on its edge.
    fn minimize(&self, x: Point3) -> Result<(f64, f64, SolverPath)> {
        let center = -self.p.x1;
        let mut half = self.cfg.bracket_half_width.unwrap_or(x.norm_inf() * SQRT3 + 3.0);
        for _ in 0..=MAX_BRACKET_DOUBLINGS {
            let (lo, hi) = (center - half, center + half);
            let (w, q) = golden_section(|w| self.height(w).0, lo, hi, self.cfg.search_tol);
            let on_edge = w - lo <= 2.0 * self.cfg.search_tol || hi - w <= 2.0 * self.cfg.search_tol;
            if q.is_finite() && !on_edge {
                let (q, path) = self.height(w);
                return Ok((w, q, path));
            }
            half *= 2.0;
        }
        Err(Error::Infeasible(format!(
            "no admissible payoff with w3 <= {} found for x = {x}",
            self.cfg.max_w3
        )))
    }
}

/// `ρ(x)`.
pub fn rho(x: Point3, triple: &AdmissibleTriple, cfg: &SolverConfig) -> Result<f64> {
    rho_with_path(x, triple, cfg).map(|(r, _)| r)
}

/// `ρ(x)` and the evaluation path used at the minimizer.
pub fn rho_with_path(x: Point3, triple: &AdmissibleTriple, cfg: &SolverConfig) -> Result<(f64, SolverPath)> {
    check_point(x)?;
    let p = triple.to_rotated(x);
    let cols = Columns::new(triple, p, cfg);
    let (_, q, path) = cols.minimize(x)?;
    Ok(((q - p.x3) / SQRT3, path))
}

/// `R(x)`, with `ρ(x)` and the hedged endpoints.
pub fn optimal_set(x: Point3, triple: &AdmissibleTriple, cfg: &SolverConfig) -> Result<OptimalSet> {
    check_point(x)?;
    let p = triple.to_rotated(x);
    let cols = Columns::new(triple, p, cfg);
    let (w_min, q_star, path) = cols.minimize(x)?;
    let threshold = match path {
        SolverPath::Band => q_star + cfg.flat_abs_tol + cfg.flat_tol * q_star.abs(),
        SolverPath::General => q_star + cfg.general_flat_tol,
    };
    let inside = |w: f64| cols.height(w).0 <= threshold;
    let resolution = 0.1 * cfg.search_tol;
    let limit = cfg.bracket_half_width.unwrap_or(x.norm_inf() * SQRT3 + 3.0) * 2f64.powi(MAX_BRACKET_DOUBLINGS as i32);
    let left = interval_extent(inside, w_min, -1.0, resolution, limit);
    let right = interval_extent(inside, w_min, 1.0, resolution, limit);
    let w1_interval = Interval::new(w_min - left, w_min + right);
    let w3_star = q_star - p.x3;
    let rot = &triple.rotation;
    let endpoints = [
        rot.apply(Point3::new(w1_interval.lo, 0.0, w3_star)),
        rot.apply(Point3::new(w1_interval.hi, 0.0, w3_star)),
    ];
    Ok(OptimalSet {
        rho: w3_star / SQRT3,
        w1_interval,
        w3_star,
        endpoints,
        hedged: [endpoints[0] + x, endpoints[1] + x],
        path,
    })
}

/// `z + x + slack·(1,1,1) ∈ A`: feasibility of a payoff up to a price slack.
pub fn is_feasible(z: Point3, x: Point3, triple: &AdmissibleTriple, slack: f64) -> bool {
    triple.contains(z + x + Point3::new(slack, slack, slack))
}

/// Whether `z` belongs to `R(x)` at level `rho`, within `tol` in price and feasibility.
pub fn is_optimal(z: Point3, x: Point3, rho: f64, triple: &AdmissibleTriple, tol: f64) -> bool {
    match triple.price_of(z) {
        Ok(price) => (price - rho).abs() <= tol && is_feasible(z, x, triple, tol),
        Err(_) => false,
    }
}

/// `ρ` over many positions, in parallel when enabled. Output order follows input order.
pub fn rho_batch(xs: &[Point3], triple: &AdmissibleTriple, cfg: &SolverConfig) -> Vec<Result<f64>> {
    par::map(xs, |x| rho(*x, triple, cfg))
}

/// Sequential counterpart of [`rho_batch`].
pub fn rho_batch_seq(xs: &[Point3], triple: &AdmissibleTriple, cfg: &SolverConfig) -> Vec<Result<f64>> {
    par::map_seq(xs, |x| rho(*x, triple, cfg))
}

fn check_point(x: Point3) -> Result<()> {
    if x.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("position must be finite, got {x}")))
    }
}
