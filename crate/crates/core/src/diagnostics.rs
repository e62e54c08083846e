//! Stability of the optimal set mapping along perturbation sequences.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::Point3;
use crate::model::AdmissibleTriple;
use crate::par;
use crate::solver::{optimal_set, OptimalSet, SolverConfig};

/// Optimal sets wider than this (in `w1`) are not treated as singletons.
pub const SINGLETON_WIDTH: f64 = 1e-4;

/// Which indices `n` of a sequence are evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "type")]
pub enum Schedule {
    /// `n = 1, 2, ..., n_max`.
    Linear,
    /// `n = 1, k, k^2, ...` up to `n_max`; reaches deep into the tail cheaply.
    Geometric { ratio: u64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum SequenceKind {
    /// `Φ(0, r/√n, 1/n)`.
    BasicLsc { r: f64 },
    /// `Φ(0, -r/√n, 0)` then `Φ(0, r/√n, 0)` for each `n`.
    TwistedAlternating { r: f64 },
    /// The same point for every `n`.
    Constant { point: Point3 },
    /// Explicit terms; `n` is the 1-based position in the list.
    Custom { points: Vec<Point3> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SequenceSpec {
    pub kind: SequenceKind,
    pub n_max: u64,
    pub schedule: Schedule,
}

/// One evaluated term: `index` is its position in the generated list.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Term {
    pub index: usize,
    pub n: u64,
    pub point: Point3,
}

impl SequenceSpec {
    pub fn basic_lsc(r: f64, n_max: u64) -> Self {
        Self { kind: SequenceKind::BasicLsc { r }, n_max, schedule: Schedule::Linear }
    }

    pub fn twisted_alternating(r: f64, n_max: u64) -> Self {
        Self { kind: SequenceKind::TwistedAlternating { r }, n_max, schedule: Schedule::Linear }
    }

    pub fn constant(point: Point3, n_max: u64) -> Self {
        Self { kind: SequenceKind::Constant { point }, n_max, schedule: Schedule::Linear }
    }

    pub fn with_schedule(mut self, schedule: Schedule) -> Self {
        self.schedule = schedule;
        self
    }

    fn indices(&self) -> Result<Vec<u64>> {
        if self.n_max < 1 {
            return Err(Error::InvalidArgument("sequence needs n_max >= 1".into()));
        }
        let n_max = match &self.kind {
            SequenceKind::Custom { points } => self.n_max.min(points.len() as u64),
            _ => self.n_max,
        };
        Ok(match self.schedule {
            Schedule::Linear => (1..=n_max).collect(),
            Schedule::Geometric { ratio } => {
                if ratio < 2 {
                    return Err(Error::InvalidArgument("geometric schedule needs ratio >= 2".into()));
                }
                std::iter::successors(Some(1u64), |n| n.checked_mul(ratio)).take_while(|&n| n <= n_max).collect()
            }
        })
    }

    /// The terms in the rotation of `triple`.
    pub fn terms(&self, triple: &AdmissibleTriple) -> Result<Vec<Term>> {
        let ns = self.indices()?;
        let rot = |w: Point3| triple.from_rotated(w);
        let mut out = Vec::new();
        for n in ns {
            let nf = n as f64;
            match &self.kind {
                SequenceKind::BasicLsc { r } => out.push((n, rot(Point3::new(0.0, r / nf.sqrt(), 1.0 / nf)))),
                SequenceKind::TwistedAlternating { r } => {
                    out.push((n, rot(Point3::new(0.0, -r / nf.sqrt(), 0.0))));
                    out.push((n, rot(Point3::new(0.0, r / nf.sqrt(), 0.0))));
                }
                SequenceKind::Constant { point } => out.push((n, *point)),
                SequenceKind::Custom { points } => out.push((n, points[(n - 1) as usize])),
            }
        }
        let terms: Vec<Term> = out.into_iter().enumerate().map(|(index, (n, point))| Term { index, n, point }).collect();
        if let (Some(first), Some(last)) = (terms.first(), terms.last()) {
            if !last.point.is_finite() || last.point.norm() > first.point.norm() + 1e-12 {
                return Err(Error::InvalidArgument("sequence terms must not grow in norm".into()));
            }
        }
        Ok(terms)
    }
}

/// `sup_{a ∈ points} dist(a, set)`.
pub fn excess(points: &[Point3], set: &OptimalSet) -> Result<f64> {
    if points.is_empty() {
        return Err(Error::InvalidArgument("excess needs at least one point".into()));
    }
    Ok(points.iter().map(|&a| set.distance_to(a)).fold(0.0, f64::max))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LscRow {
    pub index: usize,
    pub n: u64,
    pub position: Point3,
    /// Distance from the witness to the perturbed optimal set.
    pub distance: f64,
    pub width: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LscReport {
    pub x: Point3,
    pub base: OptimalSet,
    /// Endpoint of `R(x)` farthest (in the tail) from the perturbed sets.
    pub witness: Point3,
    /// Minimum over the tail half of the distances from the witness.
    pub gap: f64,
    pub per_n: Vec<LscRow>,
}

/// Probes lower semicontinuity of `R` at `x` along `x + term(n)`.
pub fn lsc_probe(x: Point3, seq: &SequenceSpec, triple: &AdmissibleTriple, cfg: &SolverConfig) -> Result<LscReport> {
    let base = optimal_set(x, triple, cfg)?;
    let terms = seq.terms(triple)?;
    let sets = par::map(&terms, |t| optimal_set(x + t.point, triple, cfg)).into_iter().collect::<Result<Vec<_>>>()?;
    let tail = terms.len() / 2;
    let tail_min = |w: Point3| sets[tail..].iter().map(|s| s.distance_to(w)).fold(f64::INFINITY, f64::min);
    let (witness, gap) = base
        .endpoints
        .iter()
        .map(|&e| (e, tail_min(e)))
        .fold((base.endpoints[0], f64::NEG_INFINITY), |best, cand| if cand.1 > best.1 { cand } else { best });
    let per_n = terms
        .iter()
        .zip(&sets)
        .map(|(t, s)| LscRow { index: t.index, n: t.n, position: x + t.point, distance: s.distance_to(witness), width: s.width() })
        .collect();
    Ok(LscReport { x, base, witness, gap, per_n })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelectionRow {
    pub index: usize,
    pub n: u64,
    pub odd: bool,
    pub position: Point3,
    /// The forced selection: the single payoff of the perturbed optimal set.
    pub value: Point3,
    pub width: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelectionReport {
    pub odd_limit: Point3,
    pub even_limit: Point3,
    pub oscillation: f64,
    pub per_n: Vec<SelectionRow>,
}

/// Measures how far apart any selection of `R` is forced to be along the
/// odd and even subsequences of `seq` (1-based odd/even term positions).
pub fn selection_oscillation(seq: &SequenceSpec, triple: &AdmissibleTriple, cfg: &SolverConfig) -> Result<SelectionReport> {
    let terms = seq.terms(triple)?;
    let sets = par::map(&terms, |t| optimal_set(t.point, triple, cfg)).into_iter().collect::<Result<Vec<_>>>()?;
    let mut per_n = Vec::with_capacity(terms.len());
    for (t, s) in terms.iter().zip(&sets) {
        if s.width() > SINGLETON_WIDTH {
            return Err(Error::NonSingleton { index: t.index, width: s.width() });
        }
        per_n.push(SelectionRow { index: t.index, n: t.n, odd: t.index % 2 == 0, position: t.point, value: s.center(), width: s.width() });
    }
    let limit = |odd: bool| {
        let values: Vec<Point3> = per_n.iter().filter(|r| r.odd == odd).map(|r| r.value).collect();
        tail_average(&values)
    };
    let odd_limit = limit(true);
    let even_limit = limit(false);
    Ok(SelectionReport { odd_limit, even_limit, oscillation: odd_limit.dist(even_limit), per_n })
}

/// Mean of the last quarter (at least one element) of `values`; the origin
/// for an empty list.
fn tail_average(values: &[Point3]) -> Point3 {
    if values.is_empty() {
        return Point3::ZERO;
    }
    let k = (values.len() / 4).max(1);
    let tail = &values[values.len() - k..];
    tail.iter().fold(Point3::ZERO, |acc, &v| acc + v) * (1.0 / k as f64)
}

/// JSON file with the full report.
pub fn write_json<T: Serialize>(report: &T, path: &Path) -> Result<()> {
    std::fs::write(path, serde_json::to_string_pretty(report)? + "\n")?;
    Ok(())
}

#[derive(Serialize, Deserialize, Debug, PartialEq)]
pub struct LscCsvRow {
    pub index: usize,
    pub n: u64,
    pub x1: f64,
    pub x2: f64,
    pub x3: f64,
    pub distance: f64,
    pub width: f64,
}

#[derive(Serialize, Deserialize, Debug, PartialEq)]
pub struct SelectionCsvRow {
    pub index: usize,
    pub n: u64,
    pub odd: bool,
    pub z1: f64,
    pub z2: f64,
    pub z3: f64,
    pub width: f64,
}

impl LscReport {
    pub fn csv_rows(&self) -> Vec<LscCsvRow> {
        self.per_n
            .iter()
            .map(|r| LscCsvRow {
                index: r.index,
                n: r.n,
                x1: r.position.x1,
                x2: r.position.x2,
                x3: r.position.x3,
                distance: r.distance,
                width: r.width,
            })
            .collect()
    }
}

impl SelectionReport {
    pub fn csv_rows(&self) -> Vec<SelectionCsvRow> {
        self.per_n
            .iter()
            .map(|r| SelectionCsvRow { index: r.index, n: r.n, odd: r.odd, z1: r.value.x1, z2: r.value.x2, z3: r.value.x3, width: r.width })
            .collect()
    }
}

/// CSV file with a header row.
pub fn write_csv<T: Serialize>(rows: &[T], path: &Path) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Interval;
    use crate::solver::SolverPath;

    fn segment(a: Point3, b: Point3) -> OptimalSet {
        OptimalSet {
            rho: 0.0,
            w1_interval: Interval::new(0.0, a.dist(b)),
            w3_star: 0.0,
            endpoints: [a, b],
            hedged: [a, b],
            path: SolverPath::Band,
        }
    }

    #[test]
    fn excess_examples() {
        let s = segment(Point3::new(-1.0, 0.0, 0.0), Point3::new(1.0, 0.0, 0.0));
        assert_eq!(excess(&[Point3::ZERO], &s).unwrap(), 0.0);
        let rot = crate::geometry::Rotation::canonical();
        let zero = segment(Point3::ZERO, Point3::ZERO);
        assert!((excess(&[rot.apply(Point3::new(1.0, 0.0, 0.0))], &zero).unwrap() - 1.0).abs() < 1e-12);
        assert!(excess(&[], &zero).is_err());
        assert_eq!(excess(&s.endpoints, &s).unwrap(), 0.0);
    }

    #[test]
    fn schedules() {
        let t = AdmissibleTriple::basic_triple();
        let lin = SequenceSpec::basic_lsc(3.0, 5).terms(&t).unwrap();
        assert_eq!(lin.iter().map(|t| t.n).collect::<Vec<_>>(), vec![1, 2, 3, 4, 5]);
        let geo = SequenceSpec::basic_lsc(3.0, 300).with_schedule(Schedule::Geometric { ratio: 4 }).terms(&t).unwrap();
        assert_eq!(geo.iter().map(|t| t.n).collect::<Vec<_>>(), vec![1, 4, 16, 64, 256]);
        let alt = SequenceSpec::twisted_alternating(16.0, 2).terms(&AdmissibleTriple::twisted_triple()).unwrap();
        assert_eq!(alt.len(), 4);
        assert!(SequenceSpec::basic_lsc(3.0, 0).terms(&t).is_err());
        let growing = SequenceSpec { kind: SequenceKind::Custom { points: vec![Point3::ZERO, Point3::new(1.0, 0.0, 0.0)] }, n_max: 2, schedule: Schedule::Linear };
        assert!(growing.terms(&t).is_err());
    }

    #[test]
    fn constant_sequence_has_no_gap() {
        let t = AdmissibleTriple::basic_triple();
        let rep = lsc_probe(Point3::ZERO, &SequenceSpec::constant(Point3::ZERO, 4), &t, &SolverConfig::default()).unwrap();
        assert!(rep.gap.abs() < 1e-9);
    }

    #[test]
    fn tail_average_uses_last_quarter() {
        let v: Vec<Point3> = (0..8).map(|i| Point3::new(i as f64, 0.0, 0.0)).collect();
        assert_eq!(tail_average(&v).x1, 6.5);
        assert_eq!(tail_average(&v[..1]).x1, 0.0);
    }
}
