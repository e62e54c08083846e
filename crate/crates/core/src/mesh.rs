//! Boundary meshes of the bodies and outlines of their profiles, as CSV.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{BoatSet, Point3};

pub const MIN_RESOLUTION: usize = 8;

/// Lower boundary surface sampled on `resolution + 1` rings of
/// `resolution` vertices each.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryMesh {
    pub vertices: Vec<Point3>,
    pub triangles: Vec<[usize; 3]>,
}

/// Outline point of a profile and the patch whose arc carries it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OutlinePoint {
    pub u: f64,
    pub v: f64,
    pub patch: usize,
}

#[derive(Serialize, Deserialize)]
struct VertexRow {
    index: usize,
    x1: f64,
    x2: f64,
    x3: f64,
}

#[derive(Serialize, Deserialize)]
struct TriangleRow {
    i: usize,
    j: usize,
    k: usize,
}

fn check_resolution(resolution: usize) -> Result<()> {
    if resolution < MIN_RESOLUTION {
        return Err(Error::InvalidArgument(format!("resolution must be at least {MIN_RESOLUTION}, got {resolution}")));
    }
    Ok(())
}

/// Rings at heights `(i / resolution)^2` (denser near the degenerate bottom),
/// vertices at polar angles `2πj / resolution` of the profile boundary.
pub fn boundary_mesh(boat: &BoatSet, resolution: usize) -> Result<BoundaryMesh> {
    check_resolution(resolution)?;
    let n = resolution;
    let rim: Vec<(f64, f64)> = (0..n)
        .map(|j| {
            let theta = std::f64::consts::TAU * j as f64 / n as f64;
            let rho = boat.profile().ray_radius(theta);
            (rho * theta.cos(), rho * theta.sin())
        })
        .collect();
    let mut vertices = Vec::with_capacity((n + 1) * n);
    for i in 0..=n {
        let t = (i as f64 / n as f64).powi(2);
        vertices.extend(rim.iter().map(|&(u, v)| boat.lift(u, v, t)));
    }
    let mut triangles = Vec::with_capacity(2 * n * n);
    for i in 0..n {
        for j in 0..n {
            let a = i * n + j;
            let b = i * n + (j + 1) % n;
            let c = (i + 1) * n + (j + 1) % n;
            let d = (i + 1) * n + j;
            triangles.push([a, b, c]);
            triangles.push([a, c, d]);
        }
    }
    Ok(BoundaryMesh { vertices, triangles })
}

/// Arc midpoints of each patch that lie on the outer boundary of the profile.
pub fn profile_outline(boat: &BoatSet, resolution: usize) -> Result<Vec<OutlinePoint>> {
    check_resolution(resolution)?;
    let patches = &boat.profile().patches;
    let mut out = Vec::new();
    for (idx, p) in patches.iter().enumerate() {
        for k in 0..resolution {
            let phi = std::f64::consts::TAU * (k as f64 + 0.5) / resolution as f64;
            let (u, v) = p.ellipse_point(phi);
            if !p.in_range(u, v, 1e-12) {
                continue;
            }
            let covered = patches
                .iter()
                .enumerate()
                .any(|(o, q)| o != idx && q.in_range(u, v, 1e-12) && q.level(u, v) <= 1.0 + 1e-12);
            if !covered {
                out.push(OutlinePoint { u, v, patch: idx });
            }
        }
    }
    Ok(out)
}

/// `foo.csv` -> `foo.<suffix>.csv`.
pub fn sibling_path(path: &Path, suffix: &str) -> PathBuf {
    let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    let ext = path.extension().map(|e| e.to_string_lossy().into_owned()).unwrap_or_else(|| "csv".into());
    path.with_file_name(format!("{stem}.{suffix}.{ext}"))
}

/// Writes vertices to `path`, triangles and the profile outline next to it.
/// Returns the three paths written.
pub fn write_mesh(boat: &BoatSet, resolution: usize, path: &Path) -> Result<[PathBuf; 3]> {
    let mesh = boundary_mesh(boat, resolution)?;
    let outline = profile_outline(boat, resolution)?;

    let mut w = csv::Writer::from_path(path)?;
    for (index, v) in mesh.vertices.iter().enumerate() {
        w.serialize(VertexRow { index, x1: v.x1, x2: v.x2, x3: v.x3 })?;
    }
    w.flush()?;

    let tri_path = sibling_path(path, "triangles");
    let mut w = csv::Writer::from_path(&tri_path)?;
    for t in &mesh.triangles {
        w.serialize(TriangleRow { i: t[0], j: t[1], k: t[2] })?;
    }
    w.flush()?;

    let outline_path = sibling_path(path, "outline");
    let mut w = csv::Writer::from_path(&outline_path)?;
    for p in &outline {
        w.serialize(p)?;
    }
    w.flush()?;
    Ok([path.to_path_buf(), tri_path, outline_path])
}

/// Reads back a vertex file written by [`write_mesh`].
pub fn read_vertices(path: &Path) -> Result<Vec<Point3>> {
    let mut r = csv::Reader::from_path(path)?;
    r.deserialize::<VertexRow>().map(|row| row.map(|v| Point3::new(v.x1, v.x2, v.x3)).map_err(Error::from)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::f_basic;

    #[test]
    fn basic_vertices_lie_on_the_boundary() {
        let boat = BoatSet::basic(2.0).unwrap();
        let mesh = boundary_mesh(&boat, 64).unwrap();
        assert_eq!(mesh.vertices.len(), 65 * 64);
        for v in &mesh.vertices {
            assert!((f_basic(v.x1, v.x2, 2.0) - v.x3).abs() <= 1e-6, "{v}");
        }
        // top ring reaches radius r along x2
        assert!(mesh.vertices.iter().any(|v| v.x3 == 1.0 && (v.x2 - 2.0).abs() < 1e-12 && v.x1.abs() < 1e-12));
        assert!(mesh.triangles.iter().flatten().all(|&i| i < mesh.vertices.len()));
    }

    #[test]
    fn twisted_outline_points_sit_on_exactly_one_arc() {
        let boat = BoatSet::twisted(16.0).unwrap();
        let outline = profile_outline(&boat, 64).unwrap();
        assert!(!outline.is_empty());
        let patches = &boat.profile().patches;
        for p in &outline {
            let on = patches.iter().filter(|q| q.in_range(p.u, p.v, 1e-12) && (q.level(p.u, p.v) - 1.0).abs() < 1e-9).count();
            assert_eq!(on, 1, "{p:?}");
        }
        for k in 0..4 {
            assert!(outline.iter().any(|p| p.patch == k));
        }
    }

    #[test]
    fn low_resolution_is_rejected() {
        assert!(boundary_mesh(&BoatSet::basic(2.0).unwrap(), 4).is_err());
    }

    #[test]
    fn sibling_names() {
        assert_eq!(sibling_path(Path::new("/tmp/m.csv"), "outline"), PathBuf::from("/tmp/m.outline.csv"));
        assert_eq!(sibling_path(Path::new("m"), "triangles"), PathBuf::from("m.triangles.csv"));
    }
}
