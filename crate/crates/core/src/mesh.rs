//! 1D interval partitions and 2D conforming triangulations of the unit
//! square, generated deterministically from a seed.

use crate::rng::SplitMix64;
use std::collections::HashMap;
use std::fmt::Write as _;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum MeshError {
    #[error("displaced triangle {0} degenerated (area <= 0) after retries")]
    InvalidMesh(usize),
}

/// Partition `0 = x_0 < x_1 < ... < x_N = 1` of the unit interval.
#[derive(Debug, Clone)]
pub struct Mesh1d {
    pub vertices: Vec<f64>,
}

impl Mesh1d {
    pub fn n_cells(&self) -> usize {
        self.vertices.len() - 1
    }

    pub fn cell(&self, j: usize) -> (f64, f64) {
        (self.vertices[j], self.vertices[j + 1])
    }

    pub fn h(&self) -> f64 {
        self.vertices
            .windows(2)
            .map(|w| w[1] - w[0])
            .fold(0.0, f64::max)
    }

    /// Index of the cell containing `x` (clamped to the domain).
    pub fn locate(&self, x: f64) -> usize {
        match self
            .vertices
            .binary_search_by(|v| v.partial_cmp(&x).unwrap())
        {
            Ok(j) => j.min(self.n_cells() - 1),
            Err(j) => j.saturating_sub(1).min(self.n_cells() - 1),
        }
    }

    /// Plain-text dump: one vertex per line, then one cell per line.
    pub fn export_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "vertices {}", self.vertices.len());
        for v in &self.vertices {
            let _ = writeln!(s, "{v}");
        }
        let _ = writeln!(s, "cells {}", self.n_cells());
        for j in 0..self.n_cells() {
            let _ = writeln!(s, "{} {}", j, j + 1);
        }
        s
    }
}

/// `N` equal cells on `(0, 1)`.
pub fn uniform_1d(n: usize) -> Mesh1d {
    assert!(n >= 1);
    let vertices = (0..=n).map(|j| j as f64 / n as f64).collect();
    Mesh1d { vertices }
}

/// Random partition with cell sizes `h_i = H_i / sum_j H_j`,
/// `H_i = 3 + rho_i`, `rho_i` uniform on `(0, 1)`.
pub fn random_1d(n: usize, seed: u64) -> Mesh1d {
    assert!(n >= 1);
    let mut rng = SplitMix64::new(seed);
    let sizes: Vec<f64> = (0..n).map(|_| 3.0 + rng.next_f64()).collect();
    let total: f64 = sizes.iter().sum();
    let mut vertices = Vec::with_capacity(n + 1);
    let mut acc = 0.0;
    vertices.push(0.0);
    for h in &sizes[..n - 1] {
        acc += h / total;
        vertices.push(acc);
    }
    vertices.push(1.0);
    Mesh1d { vertices }
}

/// Edge of a 2D mesh with its one or two incident triangles.
#[derive(Debug, Clone)]
pub struct Edge {
    pub v: [usize; 2],
    pub cells: Vec<usize>,
}

/// Conforming triangulation of the unit square. Triangles are stored with
/// positive (counter-clockwise) orientation.
#[derive(Debug, Clone)]
pub struct Mesh2d {
    pub vertices: Vec<[f64; 2]>,
    pub triangles: Vec<[usize; 3]>,
    pub edges: Vec<Edge>,
    /// Maps a triangle and its local edge (opposite the local vertex) to
    /// the global edge index.
    pub tri_edges: Vec<[usize; 3]>,
    pub boundary_vertex: Vec<bool>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family2d {
    Equilateral,
    SplitSquares,
    Randomized,
}

pub fn tri_area(p: &[[f64; 2]; 3]) -> f64 {
    0.5 * ((p[1][0] - p[0][0]) * (p[2][1] - p[0][1])
        - (p[2][0] - p[0][0]) * (p[1][1] - p[0][1]))
}

impl Mesh2d {
    pub fn n_cells(&self) -> usize {
        self.triangles.len()
    }

    pub fn tri_points(&self, t: usize) -> [[f64; 2]; 3] {
        let tri = self.triangles[t];
        [
            self.vertices[tri[0]],
            self.vertices[tri[1]],
            self.vertices[tri[2]],
        ]
    }

    pub fn area(&self, t: usize) -> f64 {
        tri_area(&self.tri_points(t))
    }

    pub fn h(&self) -> f64 {
        let mut h = 0.0f64;
        for t in 0..self.n_cells() {
            let p = self.tri_points(t);
            for (i, j) in [(0, 1), (1, 2), (2, 0)] {
                let d = ((p[i][0] - p[j][0]).powi(2) + (p[i][1] - p[j][1]).powi(2)).sqrt();
                h = h.max(d);
            }
        }
        h
    }

    /// Minimum over cells of inradius / diameter.
    pub fn shape_regularity(&self) -> f64 {
        let mut worst = f64::MAX;
        for t in 0..self.n_cells() {
            let p = self.tri_points(t);
            let mut lens = [0.0; 3];
            for (k, (i, j)) in [(1usize, 2usize), (2, 0), (0, 1)].iter().enumerate() {
                lens[k] = ((p[*i][0] - p[*j][0]).powi(2) + (p[*i][1] - p[*j][1]).powi(2)).sqrt();
            }
            let per = lens.iter().sum::<f64>();
            let inradius = 2.0 * self.area(t) / per;
            let diam = lens.iter().fold(0.0f64, |a, &b| a.max(b));
            worst = worst.min(inradius / diam);
        }
        worst
    }

    /// Rebuilds edge connectivity from the triangle list.
    fn build_topology(vertices: Vec<[f64; 2]>, triangles: Vec<[usize; 3]>) -> Mesh2d {
        let mut edge_map: HashMap<(usize, usize), usize> = HashMap::new();
        let mut edges: Vec<Edge> = Vec::new();
        let mut tri_edges = vec![[0usize; 3]; triangles.len()];
        for (t, tri) in triangles.iter().enumerate() {
            for loc in 0..3 {
                // Edge opposite local vertex `loc`.
                let a = tri[(loc + 1) % 3];
                let b = tri[(loc + 2) % 3];
                let key = (a.min(b), a.max(b));
                let e = *edge_map.entry(key).or_insert_with(|| {
                    edges.push(Edge {
                        v: [key.0, key.1],
                        cells: Vec::new(),
                    });
                    edges.len() - 1
                });
                edges[e].cells.push(t);
                tri_edges[t][loc] = e;
            }
        }
        let mut boundary_vertex = vec![false; vertices.len()];
        for e in &edges {
            if e.cells.len() == 1 {
                boundary_vertex[e.v[0]] = true;
                boundary_vertex[e.v[1]] = true;
            }
        }
        Mesh2d {
            vertices,
            triangles,
            edges,
            tri_edges,
            boundary_vertex,
        }
    }

    pub fn export_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "vertices {}", self.vertices.len());
        for v in &self.vertices {
            let _ = writeln!(s, "{} {}", v[0], v[1]);
        }
        let _ = writeln!(s, "triangles {}", self.triangles.len());
        for t in &self.triangles {
            let _ = writeln!(s, "{} {} {}", t[0], t[1], t[2]);
        }
        s
    }
}

/// Each of `N x N` squares split along the main (south-west to north-east)
/// diagonal.
fn split_squares(n: usize) -> Mesh2d {
    let idx = |i: usize, j: usize| j * (n + 1) + i;
    let mut vertices = Vec::with_capacity((n + 1) * (n + 1));
    for j in 0..=n {
        for i in 0..=n {
            vertices.push([i as f64 / n as f64, j as f64 / n as f64]);
        }
    }
    let mut triangles = Vec::with_capacity(2 * n * n);
    for j in 0..n {
        for i in 0..n {
            let (a, b, c, d) = (idx(i, j), idx(i + 1, j), idx(i + 1, j + 1), idx(i, j + 1));
            triangles.push([a, b, c]);
            triangles.push([a, c, d]);
        }
    }
    Mesh2d::build_topology(vertices, triangles)
}

/// Near-equilateral mesh: horizontal rows of height close to
/// `sqrt(3)/2 * (1/N)` (rounded so an integer number of rows fills the
/// square), with vertices of every other row shifted by half a cell and
/// clipped to the boundary, and each strip triangulated by the monotone
/// two-pointer sweep over the two vertex rows.
fn equilateral(n: usize) -> Mesh2d {
    let rows = ((n as f64) * 2.0 / 3f64.sqrt()).round().max(1.0) as usize;
    // Vertex rows: even rows have N+1 regular points, odd rows are shifted
    // by half a step and keep the endpoints, giving N+2 points.
    let mut row_pts: Vec<Vec<usize>> = Vec::with_capacity(rows + 1);
    let mut vertices: Vec<[f64; 2]> = Vec::new();
    for r in 0..=rows {
        let y = r as f64 / rows as f64;
        let mut ids = Vec::new();
        if r % 2 == 0 {
            for i in 0..=n {
                ids.push(vertices.len());
                vertices.push([i as f64 / n as f64, y]);
            }
        } else {
            ids.push(vertices.len());
            vertices.push([0.0, y]);
            for i in 0..n {
                ids.push(vertices.len());
                vertices.push([(i as f64 + 0.5) / n as f64, y]);
            }
            ids.push(vertices.len());
            vertices.push([1.0, y]);
        }
        row_pts.push(ids);
    }
    let mut triangles = Vec::new();
    for r in 0..rows {
        let lower = &row_pts[r];
        let upper = &row_pts[r + 1];
        let (mut i, mut j) = (0usize, 0usize);
        while i + 1 < lower.len() || j + 1 < upper.len() {
            let adv_lower = if i + 1 >= lower.len() {
                false
            } else if j + 1 >= upper.len() {
                true
            } else {
                vertices[lower[i + 1]][0] <= vertices[upper[j + 1]][0]
            };
            if adv_lower {
                triangles.push([lower[i], lower[i + 1], upper[j]]);
                i += 1;
            } else {
                triangles.push([lower[i], upper[j + 1], upper[j]]);
                j += 1;
            }
        }
    }
    Mesh2d::build_topology(vertices, triangles)
}

/// Split-squares mesh at resolution `2^level` whose interior vertices are
/// displaced by a random vector of magnitude at most a quarter of the
/// shortest incident edge.
fn randomized(level: usize, seed: u64) -> Result<Mesh2d, MeshError> {
    let n = 1usize << level;
    let base = split_squares(n);
    let mut vertices = base.vertices.clone();
    let mut incident_edges: Vec<Vec<usize>> = vec![Vec::new(); vertices.len()];
    for (e, edge) in base.edges.iter().enumerate() {
        incident_edges[edge.v[0]].push(e);
        incident_edges[edge.v[1]].push(e);
    }
    let mut incident_tris: Vec<Vec<usize>> = vec![Vec::new(); vertices.len()];
    for (t, tri) in base.triangles.iter().enumerate() {
        for &v in tri {
            incident_tris[v].push(t);
        }
    }
    let mut rng = SplitMix64::new(seed);
    for v in 0..vertices.len() {
        if base.boundary_vertex[v] {
            continue;
        }
        let min_edge = incident_edges[v]
            .iter()
            .map(|&e| {
                let [a, b] = base.edges[e].v;
                let pa = vertices[a];
                let pb = vertices[b];
                ((pa[0] - pb[0]).powi(2) + (pa[1] - pb[1]).powi(2)).sqrt()
            })
            .fold(f64::MAX, f64::min);
        let angle = rng.next_f64() * std::f64::consts::TAU;
        let mut mag = 0.25 * min_edge * rng.next_f64();
        let orig = vertices[v];
        let mut placed = false;
        for _ in 0..=5 {
            vertices[v] = [orig[0] + mag * angle.cos(), orig[1] + mag * angle.sin()];
            let ok = incident_tris[v].iter().all(|&t| {
                let tri = base.triangles[t];
                tri_area(&[vertices[tri[0]], vertices[tri[1]], vertices[tri[2]]]) > 0.0
            });
            if ok {
                placed = true;
                break;
            }
            mag *= 0.5;
        }
        if !placed {
            return Err(MeshError::InvalidMesh(v));
        }
    }
    let mesh = Mesh2d::build_topology(vertices, base.triangles);
    if let Some(t) = (0..mesh.n_cells()).find(|&t| mesh.area(t) <= 0.0) {
        return Err(MeshError::InvalidMesh(t));
    }
    Ok(mesh)
}

pub fn triangulate_2d(family: Family2d, n_or_level: usize, seed: u64) -> Result<Mesh2d, MeshError> {
    match family {
        Family2d::Equilateral => Ok(equilateral(n_or_level)),
        Family2d::SplitSquares => Ok(split_squares(n_or_level)),
        Family2d::Randomized => randomized(n_or_level, seed),
    }
}

/// Splits every triangle into four by connecting the edge midpoints.
pub fn refine_quarter(mesh: &Mesh2d) -> Mesh2d {
    let nv = mesh.vertices.len();
    let mut vertices = mesh.vertices.clone();
    // One new vertex per edge.
    let mut edge_mid = vec![0usize; mesh.edges.len()];
    for (e, edge) in mesh.edges.iter().enumerate() {
        let a = mesh.vertices[edge.v[0]];
        let b = mesh.vertices[edge.v[1]];
        edge_mid[e] = nv + e;
        vertices.push([0.5 * (a[0] + b[0]), 0.5 * (a[1] + b[1])]);
    }
    let mut triangles = Vec::with_capacity(4 * mesh.n_cells());
    for t in 0..mesh.n_cells() {
        let [v0, v1, v2] = mesh.triangles[t];
        // Midpoints opposite each local vertex.
        let m0 = edge_mid[mesh.tri_edges[t][0]]; // on edge (v1, v2)
        let m1 = edge_mid[mesh.tri_edges[t][1]]; // on edge (v2, v0)
        let m2 = edge_mid[mesh.tri_edges[t][2]]; // on edge (v0, v1)
        triangles.push([v0, m2, m1]);
        triangles.push([m2, v1, m0]);
        triangles.push([m1, m0, v2]);
        triangles.push([m2, m0, m1]);
    }
    Mesh2d::build_topology(vertices, triangles)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn uniform_vertices() {
        let m = uniform_1d(4);
        assert_eq!(m.vertices, vec![0.0, 0.25, 0.5, 0.75, 1.0]);
        let m1 = uniform_1d(1);
        assert_eq!(m1.vertices, vec![0.0, 1.0]);
        let big = uniform_1d(2048);
        assert!((big.h() - 1.0 / 2048.0).abs() < 1e-15);
    }

    #[test]
    fn random_1d_normalisation() {
        let m = random_1d(1, 99);
        assert_eq!(m.vertices, vec![0.0, 1.0]);

        let m = random_1d(2, 1);
        assert_eq!(m.vertices.len(), 3);
        let h0 = m.vertices[1];
        let h1 = 1.0 - m.vertices[1];
        assert!(h0 > 3.0 / 7.0 && h0 < 4.0 / 7.0);
        assert!((h0 + h1 - 1.0).abs() < 1e-14);
    }

    #[test]
    fn random_1d_ratio_bound() {
        // H_i in (3, 4) forces max/min cell ratio <= 4/3.
        let m = random_1d(16, 42);
        let sizes: Vec<f64> = m.vertices.windows(2).map(|w| w[1] - w[0]).collect();
        let max = sizes.iter().fold(0.0f64, |a, &b| a.max(b));
        let min = sizes.iter().fold(f64::MAX, |a, &b| a.min(b));
        assert!(max / min <= 4.0 / 3.0 + 1e-12);
        let total: f64 = sizes.iter().sum();
        assert!((total - 1.0).abs() < 1e-14);
    }

    #[test]
    fn split_squares_counts() {
        let m = triangulate_2d(Family2d::SplitSquares, 1, 0).unwrap();
        assert_eq!(m.triangles.len(), 2);
        assert_eq!(m.vertices.len(), 4);
        let m = triangulate_2d(Family2d::SplitSquares, 25, 0).unwrap();
        assert_eq!(m.triangles.len(), 1250);
    }

    fn check_mesh(m: &Mesh2d) {
        // Positive areas, conformity, and total area 1.
        let mut total = 0.0;
        for t in 0..m.n_cells() {
            assert!(m.area(t) > 0.0, "triangle {t} orientation");
            total += m.area(t);
        }
        assert!((total - 1.0).abs() < 1e-12);
        for e in &m.edges {
            assert!(matches!(e.cells.len(), 1 | 2));
        }
        let boundary_edges = m.edges.iter().filter(|e| e.cells.len() == 1).count();
        assert!(boundary_edges >= 4);
        assert!(m.shape_regularity() > 0.0);
    }

    #[test]
    fn families_valid() {
        check_mesh(&triangulate_2d(Family2d::SplitSquares, 7, 0).unwrap());
        check_mesh(&triangulate_2d(Family2d::Equilateral, 10, 0).unwrap());
        check_mesh(&triangulate_2d(Family2d::Randomized, 3, 7).unwrap());
        check_mesh(&triangulate_2d(Family2d::Randomized, 4, 123).unwrap());
    }

    #[test]
    fn determinism() {
        let a = triangulate_2d(Family2d::Randomized, 3, 7).unwrap();
        let b = triangulate_2d(Family2d::Randomized, 3, 7).unwrap();
        assert_eq!(a.triangles, b.triangles);
        for (x, y) in a.vertices.iter().zip(&b.vertices) {
            assert_eq!(x, y);
        }
        let c = triangulate_2d(Family2d::Randomized, 3, 8).unwrap();
        assert!(a.vertices.iter().zip(&c.vertices).any(|(x, y)| x != y));
    }

    #[test]
    fn quarter_refinement() {
        let m = triangulate_2d(Family2d::SplitSquares, 1, 0).unwrap();
        let r = refine_quarter(&m);
        assert_eq!(r.triangles.len(), 8);
        check_mesh(&r);

        // Vertex set of the refined mesh = vertices + edge midpoints of the
        // parent, i.e. the quadratic node set of the parent mesh.
        let m = triangulate_2d(Family2d::SplitSquares, 5, 0).unwrap();
        let r = refine_quarter(&m);
        assert_eq!(r.vertices.len(), m.vertices.len() + m.edges.len());
        let total: f64 = (0..r.n_cells()).map(|t| r.area(t)).sum();
        assert!((total - 1.0).abs() < 1e-12);
    }

    #[test]
    fn export_roundtrip_shape() {
        let m = uniform_1d(3);
        let text = m.export_text();
        assert!(text.starts_with("vertices 4"));
        let m2 = triangulate_2d(Family2d::SplitSquares, 2, 0).unwrap();
        let t = m2.export_text();
        assert!(t.contains("triangles 8"));
    }
}
