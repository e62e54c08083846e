//! Optimal value function and optimal set mapping of a hedging problem with
//! a convex acceptance set in R^3.
//!
//! The acceptance set is `A = Φ(B) + R^3_+`, where `B` is a boat-shaped
//! convex body and `Φ` a fixed rotation; eligible payoffs form the plane
//! `M = Φ({w2 = 0})` priced by `π(z) = z3`. The crate evaluates
//! `ρ(x) = inf{π(z) : z ∈ M, z + x ∈ A}` and the full set of minimizers, and
//! measures how that set reacts to perturbations of `x`.

pub mod cli;
pub mod diagnostics;
pub mod error;
pub mod geometry;
pub mod mesh;
pub mod model;
pub mod par;
pub mod sampling;
pub mod solver;
pub mod verify;

pub use error::{Error, Result};
pub use geometry::Point3;
pub use model::AdmissibleTriple;
pub use solver::{OptimalSet, SolverConfig};
