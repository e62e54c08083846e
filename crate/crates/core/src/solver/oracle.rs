//! Independent grid oracle for `ρ` and the `w1`-range of `R(x)`.
//!
//! It only ever asks the cone-sum membership test, on a fixed grid of
//! absolute rotated coordinates `(q1, q3)` with `q2 = p2`; it does not use the
//! band shortcut and does not assume the column heights are convex in `q1`.
//! The one structural fact it relies on is that membership is monotone
//! upward along each column, which holds by construction of the acceptance
//! set (adding a nonnegative vector keeps a position acceptable).

use serde::{Deserialize, Serialize};

use super::membership::ConeSumProgram;
use crate::geometry::{Interval, Point3};
use crate::model::AdmissibleTriple;

/// Grid window for `q1 = p1 + w1`.
pub const ORACLE_Q1_WINDOW: Interval = Interval::new(-3.0, 3.0);
/// Grid window for `q3 = p3 + w3`.
pub const ORACLE_Q3_WINDOW: Interval = Interval::new(-1.0, 2.0);

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleResult {
    /// Minimal grid price; `+inf` when no grid point is admissible.
    pub rho: f64,
    /// Range of `w1` over the columns attaining the minimal height.
    pub w1_range: Interval,
    pub grid_step: f64,
    pub probes: usize,
}

/// Exhaustive column-by-column grid search at spacing `grid_step`.
pub fn brute_force_oracle(x: Point3, triple: &AdmissibleTriple, grid_step: f64) -> OracleResult {
    let p = triple.to_rotated(x);
    let program = ConeSumProgram::new(&triple.boat, &triple.rotation);
    let n1 = (ORACLE_Q1_WINDOW.width() / grid_step).round() as i64;
    let n3 = (ORACLE_Q3_WINDOW.width() / grid_step).round() as i64;
    let q1_at = |j: i64| ORACLE_Q1_WINDOW.lo + j as f64 * grid_step;
    let q3_at = |k: i64| ORACLE_Q3_WINDOW.lo + k as f64 * grid_step;
    let mut probes = 0usize;
    let mut member = |j: i64, k: i64| {
        probes += 1;
        program.contains(Point3::new(q1_at(j), p.x2, q3_at(k)))
    };

    // lowest member index in [lo, hi] of column j, given that hi is a member
    fn lowest(member: &mut impl FnMut(i64, i64) -> bool, j: i64, mut lo: i64, mut hi: i64) -> i64 {
        if member(j, lo) {
            return lo;
        }
        while hi - lo > 1 {
            let mid = lo + (hi - lo) / 2;
            if member(j, mid) {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        hi
    }

    let mut best: Option<i64> = None;
    let mut attaining = (0i64, 0i64);
    for j in 0..=n1 {
        match best {
            None => {
                if member(j, n3) {
                    let k = lowest(&mut member, j, 0, n3);
                    best = Some(k);
                    attaining = (j, j);
                }
            }
            Some(k) => {
                if k > 0 && member(j, k - 1) {
                    let k_new = lowest(&mut member, j, 0, k - 1);
                    best = Some(k_new);
                    attaining = (j, j);
                } else if member(j, k) {
                    attaining.1 = j;
                }
            }
        }
    }

    match best {
        Some(k) => OracleResult {
            rho: (q3_at(k) - p.x3) / 3f64.sqrt(),
            w1_range: Interval::new(q1_at(attaining.0) - p.x1, q1_at(attaining.1) - p.x1),
            grid_step,
            probes,
        },
        None => OracleResult {
            rho: f64::INFINITY,
            w1_range: Interval::new(f64::NAN, f64::NAN),
            grid_step,
            probes,
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_position_basic() {
        let t = AdmissibleTriple::basic_triple();
        let o = brute_force_oracle(Point3::ZERO, &t, 1e-2);
        assert!(o.rho.abs() <= 2e-2);
        assert!((o.w1_range.lo + 1.0).abs() <= 2e-2 && (o.w1_range.hi - 1.0).abs() <= 2e-2, "{:?}", o.w1_range);
    }

    #[test]
    fn diagonal_position() {
        let t = AdmissibleTriple::basic_triple();
        let o = brute_force_oracle(Point3::new(1.0, 1.0, 1.0), &t, 1e-2);
        assert!((o.rho + 1.0).abs() <= 2e-2 / 3f64.sqrt(), "{}", o.rho);
    }

    #[test]
    fn off_axis_position() {
        let t = AdmissibleTriple::basic_triple();
        let x = t.from_rotated(Point3::new(0.0, 2.0, 0.0));
        let o = brute_force_oracle(x, &t, 1e-3);
        assert!((o.rho - 4.0 / (9.0 * 3f64.sqrt())).abs() <= 2e-3, "{}", o.rho);
    }
}
