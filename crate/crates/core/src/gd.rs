//! Gradient discretisations: the discrete space, the piecewise-constant
//! function reconstruction on the lumping regions, the broken polynomial
//! reconstruction and its gradient, the per-cell quadrature operator and
//! the nodal interpolator.
//!
//! Two concrete families are built here: conforming Lagrange finite
//! elements (1D degrees 1..3, 2D degrees 1..2 on triangles) and
//! discontinuous Galerkin in 1D, where every cell owns its nodes and two
//! extra boundary indices carry the Dirichlet jumps.

use crate::mesh::{Mesh1d, Mesh2d};
use crate::model::Nonlinearity;
use crate::quadrature::{gauss_for_degree, triangle_quad, LumpingRule, RefNodes};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum GdError {
    #[error("rule `{rule}` is incompatible with degree {degree} in {dim}D: {reason}")]
    IncompatibleRule {
        rule: &'static str,
        degree: usize,
        dim: usize,
        reason: &'static str,
    },
    #[error("point ({0}, {1}) is outside the domain")]
    OutOfDomain(f64, f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GdKind {
    Fe,
    Dg,
}

#[derive(Debug, Clone)]
pub enum CellGeom {
    Interval { a: f64, b: f64 },
    Triangle { p: [[f64; 2]; 3] },
}

impl CellGeom {
    pub fn measure(&self) -> f64 {
        match self {
            CellGeom::Interval { a, b } => b - a,
            CellGeom::Triangle { p } => crate::mesh::tri_area(p),
        }
    }

    pub fn diameter(&self) -> f64 {
        match self {
            CellGeom::Interval { a, b } => b - a,
            CellGeom::Triangle { p } => {
                let mut h = 0.0f64;
                for (i, j) in [(0, 1), (1, 2), (2, 0)] {
                    h = h.max(
                        ((p[i][0] - p[j][0]).powi(2) + (p[i][1] - p[j][1]).powi(2)).sqrt(),
                    );
                }
                h
            }
        }
    }

    /// Barycentric coordinates of `x` (triangles only).
    pub fn barycentric(&self, x: [f64; 2]) -> [f64; 3] {
        match self {
            CellGeom::Triangle { p } => {
                let det = (p[1][0] - p[0][0]) * (p[2][1] - p[0][1])
                    - (p[2][0] - p[0][0]) * (p[1][1] - p[0][1]);
                let l1 = ((x[0] - p[0][0]) * (p[2][1] - p[0][1])
                    - (p[2][0] - p[0][0]) * (x[1] - p[0][1]))
                    / det;
                let l2 = ((p[1][0] - p[0][0]) * (x[1] - p[0][1])
                    - (x[0] - p[0][0]) * (p[1][1] - p[0][1]))
                    / det;
                [1.0 - l1 - l2, l1, l2]
            }
            CellGeom::Interval { .. } => panic!("barycentric on an interval"),
        }
    }

    fn contains(&self, x: [f64; 2]) -> bool {
        const EPS: f64 = 1e-12;
        match self {
            CellGeom::Interval { a, b } => x[0] >= a - EPS && x[0] <= b + EPS,
            CellGeom::Triangle { .. } => {
                let l = self.barycentric(x);
                l.iter().all(|&c| c >= -EPS)
            }
        }
    }
}

/// One cell of the discretisation: its global dof indices (ordered like the
/// rule's reference nodes), the lumping measures `|U_i ∩ K|`, and the
/// geometry.
#[derive(Debug, Clone)]
pub struct Cell {
    pub dofs: Vec<usize>,
    pub weights: Vec<f64>,
    pub geom: CellGeom,
}

/// Owned mesh behind a discretisation.
#[derive(Debug, Clone)]
pub enum MeshData {
    One(Mesh1d),
    Two(Mesh2d),
}

#[derive(Debug, Clone)]
pub struct GradientDiscretisation {
    pub dim: usize,
    pub kind: GdKind,
    pub degree: usize,
    pub rule: LumpingRule,
    /// Coordinates of every global node (second component 0 in 1D).
    pub nodes: Vec<[f64; 2]>,
    pub boundary: Vec<bool>,
    pub cells: Vec<Cell>,
    /// Global lumped measures `|U_i|`.
    pub lumped: Vec<f64>,
    /// SIPG penalisation parameter (DG only).
    pub penalty: f64,
    pub mesh: MeshData,
    pub h: f64,
}

fn rule_nodes_1d(rule: &LumpingRule) -> Option<&[f64]> {
    match &rule.nodes {
        RefNodes::Interval(v) => Some(v),
        _ => None,
    }
}

/// Lagrange basis values and derivatives at local coordinate `t` for the
/// given reference nodes.
fn lagrange_1d(ref_nodes: &[f64], t: f64) -> (Vec<f64>, Vec<f64>) {
    let n = ref_nodes.len();
    let mut vals = vec![0.0; n];
    let mut ders = vec![0.0; n];
    for k in 0..n {
        let mut v = 1.0;
        for m in 0..n {
            if m != k {
                v *= (t - ref_nodes[m]) / (ref_nodes[k] - ref_nodes[m]);
            }
        }
        vals[k] = v;
        let mut d = 0.0;
        for j in 0..n {
            if j == k {
                continue;
            }
            let mut term = 1.0 / (ref_nodes[k] - ref_nodes[j]);
            for m in 0..n {
                if m != k && m != j {
                    term *= (t - ref_nodes[m]) / (ref_nodes[k] - ref_nodes[m]);
                }
            }
            d += term;
        }
        ders[k] = d;
    }
    (vals, ders)
}

impl GradientDiscretisation {
    pub fn n_dofs(&self) -> usize {
        self.nodes.len()
    }

    pub fn n_cells(&self) -> usize {
        self.cells.len()
    }

    /// Number of unknowns (all indices, matching the regression abscissa).
    pub fn card_i(&self) -> usize {
        self.nodes.len()
    }

    /// Basis values and physical gradients of the cell's local basis at a
    /// physical point.
    pub fn basis_at(&self, cell: usize, x: [f64; 2]) -> (Vec<f64>, Vec<[f64; 2]>) {
        let c = &self.cells[cell];
        match &c.geom {
            CellGeom::Interval { a, b } => {
                let hk = b - a;
                let t = (x[0] - a) / hk;
                let ref_nodes = rule_nodes_1d(&self.rule).expect("1D rule");
                let (vals, ders) = lagrange_1d(ref_nodes, t);
                let grads = ders.iter().map(|&d| [d / hk, 0.0]).collect();
                (vals, grads)
            }
            CellGeom::Triangle { p } => {
                let l = c.geom.barycentric(x);
                let det = 2.0 * c.geom.measure();
                // Gradient of each barycentric coordinate is constant.
                let gl = [
                    [(p[1][1] - p[2][1]) / det, (p[2][0] - p[1][0]) / det],
                    [(p[2][1] - p[0][1]) / det, (p[0][0] - p[2][0]) / det],
                    [(p[0][1] - p[1][1]) / det, (p[1][0] - p[0][0]) / det],
                ];
                match self.degree {
                    1 => (l.to_vec(), gl.to_vec()),
                    2 => {
                        // Order: vertices then midpoints (01), (02), (12).
                        let mut vals = vec![0.0; 6];
                        let mut grads = vec![[0.0; 2]; 6];
                        for i in 0..3 {
                            vals[i] = l[i] * (2.0 * l[i] - 1.0);
                            grads[i] = [
                                gl[i][0] * (4.0 * l[i] - 1.0),
                                gl[i][1] * (4.0 * l[i] - 1.0),
                            ];
                        }
                        let pairs = [(0usize, 1usize), (0, 2), (1, 2)];
                        for (k, (i, j)) in pairs.iter().enumerate() {
                            vals[3 + k] = 4.0 * l[*i] * l[*j];
                            grads[3 + k] = [
                                4.0 * (gl[*i][0] * l[*j] + l[*i] * gl[*j][0]),
                                4.0 * (gl[*i][1] * l[*j] + l[*i] * gl[*j][1]),
                            ];
                        }
                        (vals, grads)
                    }
                    d => panic!("unsupported 2D degree {d}"),
                }
            }
        }
    }

    /// Value of the polynomial reconstruction on a given cell.
    pub fn pi_star_in_cell(&self, cell: usize, v: &[f64], x: [f64; 2]) -> f64 {
        let (vals, _) = self.basis_at(cell, x);
        self.cells[cell]
            .dofs
            .iter()
            .zip(vals)
            .map(|(&d, phi)| v[d] * phi)
            .sum()
    }

    /// Broken gradient of the polynomial reconstruction on a given cell.
    pub fn grad_in_cell(&self, cell: usize, v: &[f64], x: [f64; 2]) -> [f64; 2] {
        let (_, grads) = self.basis_at(cell, x);
        let mut g = [0.0, 0.0];
        for (&d, gr) in self.cells[cell].dofs.iter().zip(grads) {
            g[0] += v[d] * gr[0];
            g[1] += v[d] * gr[1];
        }
        g
    }

    /// Cell containing `x`. For points on interfaces the lowest-index cell
    /// wins, which is harmless for conforming reconstructions and a fixed
    /// convention for broken ones.
    pub fn locate(&self, x: [f64; 2]) -> Option<usize> {
        match &self.mesh {
            MeshData::One(m) => {
                if x[0] < -1e-12 || x[0] > 1.0 + 1e-12 {
                    None
                } else {
                    Some(m.locate(x[0]))
                }
            }
            MeshData::Two(_) => (0..self.cells.len()).find(|&t| self.cells[t].geom.contains(x)),
        }
    }

    pub fn pi_star(&self, v: &[f64], x: [f64; 2]) -> Result<f64, GdError> {
        let cell = self.locate(x).ok_or(GdError::OutOfDomain(x[0], x[1]))?;
        Ok(self.pi_star_in_cell(cell, v, x))
    }

    pub fn grad_d(&self, v: &[f64], x: [f64; 2]) -> Result<[f64; 2], GdError> {
        let cell = self.locate(x).ok_or(GdError::OutOfDomain(x[0], x[1]))?;
        Ok(self.grad_in_cell(cell, v, x))
    }

    /// Local index of the lumping region of `x` within the cell. Regions
    /// follow the rule's illustrated partitions: in 1D consecutive
    /// subintervals whose lengths are the weight fractions; in 2D the
    /// barycentric thirds (largest coordinate for the vertex rule, smallest
    /// coordinate picking the opposite edge midpoint for the six-node
    /// rule). Nodes with zero weight are never resolved.
    pub fn region_of(&self, cell: usize, x: [f64; 2]) -> usize {
        let c = &self.cells[cell];
        match &c.geom {
            CellGeom::Interval { a, b } => {
                let t = ((x[0] - a) / (b - a)).clamp(0.0, 1.0);
                let fr = &self.rule.weight_fractions;
                let mut acc = 0.0;
                for (i, &f) in fr.iter().enumerate() {
                    acc += f;
                    if t < acc || i == fr.len() - 1 {
                        return i;
                    }
                }
                fr.len() - 1
            }
            CellGeom::Triangle { .. } => {
                let l = c.geom.barycentric(x);
                match self.rule.node_count() {
                    3 => {
                        // Median-based thirds: region of the largest
                        // barycentric coordinate.
                        let mut best = 0;
                        for i in 1..3 {
                            if l[i] > l[best] {
                                best = i;
                            }
                        }
                        best
                    }
                    6 => {
                        // Quadrilateral around the midpoint of the edge
                        // opposite the smallest barycentric coordinate.
                        let mut worst = 0;
                        for i in 1..3 {
                            if l[i] < l[worst] {
                                worst = i;
                            }
                        }
                        5 - worst
                    }
                    n => panic!("no region map for a {n}-node 2D rule"),
                }
            }
        }
    }

    /// Value of the piecewise-constant reconstruction at `x`.
    pub fn pi_lumped(&self, v: &[f64], x: [f64; 2]) -> Result<f64, GdError> {
        let cell = self.locate(x).ok_or(GdError::OutOfDomain(x[0], x[1]))?;
        let loc = self.region_of(cell, x);
        Ok(v[self.cells[cell].dofs[loc]])
    }

    /// Nodal interpolator: `v_i = phi(cell, x_i)` where `phi` is evaluated
    /// per cell (one-sided for broken data). Boundary-only indices (the DG
    /// jump nodes) take the trace from their adjacent cell.
    pub fn interpolate_nodal(&self, phi: &dyn Fn(usize, [f64; 2]) -> f64) -> Vec<f64> {
        let mut v = vec![0.0; self.n_dofs()];
        let mut seen = vec![false; self.n_dofs()];
        for (ci, c) in self.cells.iter().enumerate() {
            for (loc, &d) in c.dofs.iter().enumerate() {
                v[d] = phi(ci, self.node_of(c, loc));
                seen[d] = true;
            }
        }
        for i in 0..self.n_dofs() {
            if !seen[i] {
                // Jump index: evaluate at its own coordinate using the
                // nearest cell.
                let cell = self.locate(self.nodes[i]).unwrap_or(0);
                v[i] = phi(cell, self.nodes[i]);
            }
        }
        v
    }

    /// Physical coordinates of a cell's local node.
    pub fn node_of(&self, cell: &Cell, loc: usize) -> [f64; 2] {
        self.nodes[cell.dofs[loc]]
    }

    /// Physical quadrature points and weights on a cell, exact to the given
    /// polynomial degree.
    pub fn quad_points(&self, cell: usize, degree: usize) -> Vec<([f64; 2], f64)> {
        match &self.cells[cell].geom {
            CellGeom::Interval { a, b } => {
                let g = gauss_for_degree(degree);
                g.nodes
                    .iter()
                    .zip(&g.weights)
                    .map(|(&t, &w)| ([a + (b - a) * t, 0.0], w * (b - a)))
                    .collect()
            }
            CellGeom::Triangle { p } => {
                let q = triangle_quad(degree);
                let jac = 2.0 * self.cells[cell].geom.measure();
                q.points
                    .iter()
                    .zip(&q.weights)
                    .map(|(&[u, w2], &w)| {
                        let x = p[0][0] + (p[1][0] - p[0][0]) * u + (p[2][0] - p[0][0]) * w2;
                        let y = p[0][1] + (p[1][1] - p[0][1]) * u + (p[2][1] - p[0][1]) * w2;
                        // Reference weights sum to 1/2; scale by 2|K|.
                        ([x, y], w * jac)
                    })
                    .collect()
            }
        }
    }
}

/// Applies a scalar function coefficient-by-coefficient. Requires
/// `g(0) = 0` so homogeneous boundary values are preserved.
pub fn apply_nonlinearity(g: &Nonlinearity, v: &[f64]) -> Vec<f64> {
    debug_assert!(g.eval(0.0) == 0.0);
    v.iter().map(|&s| g.eval(s)).collect()
}

/// The piecewise-constant field `Q_D g`, stored as the per-cell nodal
/// values `g|_K(x_i)`.
#[derive(Debug, Clone)]
pub struct QdField {
    pub values: Vec<Vec<f64>>,
}

/// Quadrature operator applied to a per-cell-continuous field.
pub fn q_d(gd: &GradientDiscretisation, g: &dyn Fn(usize, [f64; 2]) -> f64) -> QdField {
    let values = gd
        .cells
        .iter()
        .enumerate()
        .map(|(ci, c)| {
            (0..c.dofs.len())
                .map(|loc| g(ci, gd.node_of(c, loc)))
                .collect()
        })
        .collect();
    QdField { values }
}

impl QdField {
    pub fn eval(&self, gd: &GradientDiscretisation, x: [f64; 2]) -> Result<f64, GdError> {
        let cell = gd.locate(x).ok_or(GdError::OutOfDomain(x[0], x[1]))?;
        let loc = gd.region_of(cell, x);
        Ok(self.values[cell][loc])
    }
}

fn check_rule_1d(
    rule: &LumpingRule,
    degree: usize,
) -> Result<&LumpingRule, GdError> {
    let nodes = rule_nodes_1d(rule).ok_or(GdError::IncompatibleRule {
        rule: rule.name,
        degree,
        dim: 1,
        reason: "2D rule used in 1D",
    })?;
    if nodes.len() != degree + 1 {
        return Err(GdError::IncompatibleRule {
            rule: rule.name,
            degree,
            dim: 1,
            reason: "node count must be degree + 1",
        });
    }
    if nodes[0] != 0.0 || nodes[nodes.len() - 1] != 1.0 {
        return Err(GdError::IncompatibleRule {
            rule: rule.name,
            degree,
            dim: 1,
            reason: "rule must include the cell endpoints",
        });
    }
    Ok(rule)
}

/// Conforming mass-lumped finite elements on a 1D mesh. Global nodes are
/// the union of the rule's nodes over the cells; shared endpoints carry a
/// single index.
pub fn build_fe_1d(
    mesh: &Mesh1d,
    degree: usize,
    rule: LumpingRule,
) -> Result<GradientDiscretisation, GdError> {
    check_rule_1d(&rule, degree)?;
    let n = mesh.n_cells();
    let n_interior = degree - 1;
    let n_dofs = (n + 1) + n * n_interior;
    let mut nodes = vec![[0.0, 0.0]; n_dofs];
    for (j, &x) in mesh.vertices.iter().enumerate() {
        nodes[j] = [x, 0.0];
    }
    let ref_nodes = rule_nodes_1d(&rule).unwrap().to_vec();
    let mut cells = Vec::with_capacity(n);
    let mut lumped = vec![0.0; n_dofs];
    for j in 0..n {
        let (a, b) = mesh.cell(j);
        let hk = b - a;
        let mut dofs = Vec::with_capacity(degree + 1);
        for (loc, &t) in ref_nodes.iter().enumerate() {
            let d = if loc == 0 {
                j
            } else if loc == degree {
                j + 1
            } else {
                (n + 1) + j * n_interior + (loc - 1)
            };
            nodes[d] = [a + hk * t, 0.0];
            dofs.push(d);
        }
        let weights: Vec<f64> = rule.weight_fractions.iter().map(|f| f * hk).collect();
        for (&d, &w) in dofs.iter().zip(&weights) {
            lumped[d] += w;
        }
        cells.push(Cell {
            dofs,
            weights,
            geom: CellGeom::Interval { a, b },
        });
    }
    let mut boundary = vec![false; n_dofs];
    boundary[0] = true;
    boundary[n] = true;
    Ok(GradientDiscretisation {
        dim: 1,
        kind: GdKind::Fe,
        degree,
        rule,
        nodes,
        boundary,
        cells,
        lumped,
        penalty: 0.0,
        h: mesh.h(),
        mesh: MeshData::One(mesh.clone()),
    })
}

/// Conforming mass-lumped finite elements on a triangulation: degree 1 with
/// the vertex rule, degree 2 with the vertex + edge-midpoint rule.
pub fn build_fe_2d(
    mesh: &Mesh2d,
    degree: usize,
    rule: LumpingRule,
) -> Result<GradientDiscretisation, GdError> {
    let expected_nodes = match degree {
        1 => 3,
        2 => 6,
        _ => {
            return Err(GdError::IncompatibleRule {
                rule: rule.name,
                degree,
                dim: 2,
                reason: "only degrees 1 and 2 are supported on triangles",
            })
        }
    };
    if rule.dim() != 2 || rule.node_count() != expected_nodes {
        return Err(GdError::IncompatibleRule {
            rule: rule.name,
            degree,
            dim: 2,
            reason: "rule nodes must match the conformity node set",
        });
    }
    let nv = mesh.vertices.len();
    let n_dofs = if degree == 1 { nv } else { nv + mesh.edges.len() };
    let mut nodes = vec![[0.0, 0.0]; n_dofs];
    for (i, &v) in mesh.vertices.iter().enumerate() {
        nodes[i] = v;
    }
    if degree == 2 {
        for (e, edge) in mesh.edges.iter().enumerate() {
            let a = mesh.vertices[edge.v[0]];
            let b = mesh.vertices[edge.v[1]];
            nodes[nv + e] = [0.5 * (a[0] + b[0]), 0.5 * (a[1] + b[1])];
        }
    }
    let mut cells = Vec::with_capacity(mesh.n_cells());
    let mut lumped = vec![0.0; n_dofs];
    for t in 0..mesh.n_cells() {
        let tri = mesh.triangles[t];
        let p = mesh.tri_points(t);
        let area = crate::mesh::tri_area(&p);
        let mut dofs = vec![tri[0], tri[1], tri[2]];
        if degree == 2 {
            // Midpoints (01), (02), (12): edges opposite local 2, 1, 0.
            dofs.push(nv + mesh.tri_edges[t][2]);
            dofs.push(nv + mesh.tri_edges[t][1]);
            dofs.push(nv + mesh.tri_edges[t][0]);
        }
        let weights: Vec<f64> = rule.weight_fractions.iter().map(|f| f * area).collect();
        for (&d, &w) in dofs.iter().zip(&weights) {
            lumped[d] += w;
        }
        cells.push(Cell {
            dofs,
            weights,
            geom: CellGeom::Triangle { p },
        });
    }
    let mut boundary = vec![false; n_dofs];
    for (i, &b) in mesh.boundary_vertex.iter().enumerate() {
        boundary[i] = b;
    }
    if degree == 2 {
        for (e, edge) in mesh.edges.iter().enumerate() {
            if edge.cells.len() == 1 {
                boundary[nv + e] = true;
            }
        }
    }
    Ok(GradientDiscretisation {
        dim: 2,
        kind: GdKind::Fe,
        degree,
        rule,
        nodes,
        boundary,
        cells,
        lumped,
        penalty: 0.0,
        h: mesh.h(),
        mesh: MeshData::Two(mesh.clone()),
    })
}

/// Mass-lumped SIPG discontinuous Galerkin in 1D. Every cell owns its full
/// node set (mesh vertices are duplicated, one index per incident cell) and
/// two extra zero-weight indices at the endpoints encode the Dirichlet
/// jumps, so `card_i = (degree + 1) N + 2`.
pub fn build_dg_1d(
    mesh: &Mesh1d,
    degree: usize,
    rule: LumpingRule,
    penalty: f64,
) -> Result<GradientDiscretisation, GdError> {
    check_rule_1d(&rule, degree)?;
    let n = mesh.n_cells();
    let per_cell = degree + 1;
    let n_dofs = per_cell * n + 2;
    let mut nodes = vec![[0.0, 0.0]; n_dofs];
    nodes[0] = [0.0, 0.0];
    nodes[n_dofs - 1] = [1.0, 0.0];
    let ref_nodes = rule_nodes_1d(&rule).unwrap().to_vec();
    let mut cells = Vec::with_capacity(n);
    let mut lumped = vec![0.0; n_dofs];
    for j in 0..n {
        let (a, b) = mesh.cell(j);
        let hk = b - a;
        let base = 1 + j * per_cell;
        let dofs: Vec<usize> = (0..per_cell).map(|loc| base + loc).collect();
        for (loc, &t) in ref_nodes.iter().enumerate() {
            nodes[dofs[loc]] = [a + hk * t, 0.0];
        }
        let weights: Vec<f64> = rule.weight_fractions.iter().map(|f| f * hk).collect();
        for (&d, &w) in dofs.iter().zip(&weights) {
            lumped[d] += w;
        }
        cells.push(Cell {
            dofs,
            weights,
            geom: CellGeom::Interval { a, b },
        });
    }
    let mut boundary = vec![false; n_dofs];
    boundary[0] = true;
    boundary[n_dofs - 1] = true;
    Ok(GradientDiscretisation {
        dim: 1,
        kind: GdKind::Dg,
        degree,
        rule,
        nodes,
        boundary,
        cells,
        lumped,
        penalty,
        h: mesh.h(),
        mesh: MeshData::One(mesh.clone()),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{triangulate_2d, uniform_1d, Family2d};
    use crate::quadrature::{lumping_rule_1d, lumping_rule_2d, Rule1d, Rule2d};
    use crate::rng::SplitMix64;

    #[test]
    fn fe1d_trapezoidal_lumping() {
        let gd = build_fe_1d(&uniform_1d(2), 1, lumping_rule_1d(Rule1d::Trapezoidal)).unwrap();
        assert_eq!(gd.card_i(), 3);
        assert!(gd.boundary[0] && gd.boundary[2] && !gd.boundary[1]);
        assert_eq!(gd.lumped, vec![0.25, 0.5, 0.25]);
    }

    #[test]
    fn fe1d_simpson_midpoint_weight() {
        let gd = build_fe_1d(&uniform_1d(4), 2, lumping_rule_1d(Rule1d::Simpson)).unwrap();
        let h = 0.25;
        for c in &gd.cells {
            assert!((c.weights[1] - 2.0 * h / 3.0).abs() < 1e-15);
        }
        // Partition of each cell.
        for c in &gd.cells {
            let s: f64 = c.weights.iter().sum();
            assert!((s - h).abs() < 1e-14);
        }
    }

    #[test]
    fn fe2d_vertex_lumping_split_n1() {
        let mesh = triangulate_2d(Family2d::SplitSquares, 1, 0).unwrap();
        let gd = build_fe_2d(&mesh, 1, lumping_rule_2d(Rule2d::Vertex)).unwrap();
        // Diagonal vertices touch both triangles (1/3), the others one (1/6).
        let mut sorted = gd.lumped.clone();
        sorted.sort_by(f64::total_cmp);
        assert!((sorted[0] - 1.0 / 6.0).abs() < 1e-14);
        assert!((sorted[1] - 1.0 / 6.0).abs() < 1e-14);
        assert!((sorted[2] - 1.0 / 3.0).abs() < 1e-14);
        assert!((sorted[3] - 1.0 / 3.0).abs() < 1e-14);
        let total: f64 = gd.lumped.iter().sum();
        assert!((total - 1.0).abs() < 1e-14);
    }

    #[test]
    fn fe2d_p2_zero_vertex_weights() {
        let mesh = triangulate_2d(Family2d::SplitSquares, 3, 0).unwrap();
        let gd = build_fe_2d(&mesh, 2, lumping_rule_2d(Rule2d::VertexEdgeMidpoint)).unwrap();
        for i in 0..mesh.vertices.len() {
            assert_eq!(gd.lumped[i], 0.0);
        }
        let total: f64 = gd.lumped.iter().sum();
        assert!((total - 1.0).abs() < 1e-13);
    }

    #[test]
    fn dg_counts_and_weights() {
        let gd = build_dg_1d(&uniform_1d(8), 3, lumping_rule_1d(Rule1d::GaussLobatto), 0.6).unwrap();
        assert_eq!(gd.card_i(), 4 * 8 + 2);
        assert_eq!(gd.lumped[0], 0.0);
        assert_eq!(gd.lumped[gd.card_i() - 1], 0.0);

        let single = build_dg_1d(&uniform_1d(1), 3, lumping_rule_1d(Rule1d::GaussLobatto), 0.6)
            .unwrap();
        let w: Vec<f64> = single.cells[0].weights.clone();
        assert!((w[0] - 1.0 / 12.0).abs() < 1e-15);
        assert!((w[1] - 5.0 / 12.0).abs() < 1e-15);

        // Interior interfaces carry two coincident nodes.
        let gd2 = build_dg_1d(&uniform_1d(2), 1, lumping_rule_1d(Rule1d::Trapezoidal), 0.6)
            .unwrap();
        let x_left = gd2.nodes[gd2.cells[0].dofs[1]];
        let x_right = gd2.nodes[gd2.cells[1].dofs[0]];
        assert_eq!(x_left, x_right);
        assert_ne!(gd2.cells[0].dofs[1], gd2.cells[1].dofs[0]);
    }

    #[test]
    fn incompatible_rules_rejected() {
        let r = lumping_rule_1d(Rule1d::Simpson);
        assert!(build_fe_1d(&uniform_1d(2), 1, r).is_err());
        let mesh = triangulate_2d(Family2d::SplitSquares, 2, 0).unwrap();
        assert!(build_fe_2d(&mesh, 1, lumping_rule_2d(Rule2d::VertexEdgeMidpoint)).is_err());
        assert!(build_fe_2d(&mesh, 3, lumping_rule_2d(Rule2d::Vertex)).is_err());
    }

    #[test]
    fn pi_star_linear_and_cardinal() {
        let gd = build_fe_1d(&uniform_1d(1), 1, lumping_rule_1d(Rule1d::Trapezoidal)).unwrap();
        let v = vec![0.0, 1.0];
        assert!((gd.pi_star(&v, [0.5, 0.0]).unwrap() - 0.5).abs() < 1e-15);

        let gd = build_fe_1d(&uniform_1d(1), 2, lumping_rule_1d(Rule1d::Simpson)).unwrap();
        // Dof order in the cell is (vertex0, vertex1, midpoint) globally:
        // set midpoint to 1, endpoints 0.
        let mut v = vec![0.0; gd.n_dofs()];
        let mid = gd.cells[0].dofs[1];
        v[mid] = 1.0;
        assert!((gd.pi_star(&v, [0.5, 0.0]).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn unisolvence_cubic() {
        let gd = build_fe_1d(&uniform_1d(3), 3, lumping_rule_1d(Rule1d::GaussLobatto)).unwrap();
        let q = |x: f64| x * x * x;
        let v = gd.interpolate_nodal(&|_c, x| q(x[0]));
        let mut rng = SplitMix64::new(5);
        for _ in 0..20 {
            let x = rng.next_f64();
            assert!((gd.pi_star(&v, [x, 0.0]).unwrap() - q(x)).abs() < 1e-12);
        }
    }

    #[test]
    fn partition_and_gradient_of_constant() {
        let mesh = triangulate_2d(Family2d::Randomized, 3, 9).unwrap();
        for (deg, rule) in [
            (1, lumping_rule_2d(Rule2d::Vertex)),
            (2, lumping_rule_2d(Rule2d::VertexEdgeMidpoint)),
        ] {
            let gd = build_fe_2d(&mesh, deg, rule).unwrap();
            for c in &gd.cells {
                let s: f64 = c.weights.iter().sum();
                assert!((s - c.geom.measure()).abs() < 1e-12);
            }
            let ones = vec![1.0; gd.n_dofs()];
            let mut rng = SplitMix64::new(3);
            for _ in 0..50 {
                let cell = (rng.next_u64() % gd.n_cells() as u64) as usize;
                let pts = gd.quad_points(cell, 2);
                let (x, _) = pts[0];
                let g = gd.grad_in_cell(cell, &ones, x);
                assert!(g[0].abs() < 1e-12 && g[1].abs() < 1e-12);
            }
        }
    }

    #[test]
    fn fe_conformity_across_faces() {
        let mesh = triangulate_2d(Family2d::Randomized, 3, 21).unwrap();
        for (deg, rule) in [
            (1, lumping_rule_2d(Rule2d::Vertex)),
            (2, lumping_rule_2d(Rule2d::VertexEdgeMidpoint)),
        ] {
            let gd = build_fe_2d(&mesh, deg, rule).unwrap();
            let mut rng = SplitMix64::new(77);
            let v: Vec<f64> = (0..gd.n_dofs()).map(|_| rng.next_f64() - 0.5).collect();
            for e in &mesh.edges {
                if e.cells.len() != 2 {
                    continue;
                }
                let a = mesh.vertices[e.v[0]];
                let b = mesh.vertices[e.v[1]];
                for s in [0.21, 0.5, 0.83] {
                    let x = [a[0] + s * (b[0] - a[0]), a[1] + s * (b[1] - a[1])];
                    let u0 = gd.pi_star_in_cell(e.cells[0], &v, x);
                    let u1 = gd.pi_star_in_cell(e.cells[1], &v, x);
                    assert!((u0 - u1).abs() < 1e-10, "jump {}", (u0 - u1).abs());
                }
            }
        }
    }

    #[test]
    fn pi_lumped_regions_1d() {
        let gd = build_fe_1d(&uniform_1d(1), 2, lumping_rule_1d(Rule1d::Simpson)).unwrap();
        let mut v = vec![0.0; gd.n_dofs()];
        v[gd.cells[0].dofs[0]] = 10.0;
        v[gd.cells[0].dofs[1]] = 20.0;
        v[gd.cells[0].dofs[2]] = 30.0;
        // Midpoint region has measure 2/3 centered in the cell.
        assert_eq!(gd.pi_lumped(&v, [0.4, 0.0]).unwrap(), 20.0);
        assert_eq!(gd.pi_lumped(&v, [0.01, 0.0]).unwrap(), 10.0);
        assert_eq!(gd.pi_lumped(&v, [0.99, 0.0]).unwrap(), 30.0);
        // At a lumping node with positive measure the node's value returns.
        assert_eq!(gd.pi_lumped(&v, [0.5, 0.0]).unwrap(), 20.0);
    }

    #[test]
    fn region_measures_reconstruct_cell() {
        // Monte-Carlo reconstruction of |U_i ∩ K| for the 2D rules; also
        // verifies the centroid resolves to an edge-midpoint region.
        let mesh = triangulate_2d(Family2d::SplitSquares, 1, 0).unwrap();
        for (deg, rule) in [
            (1, lumping_rule_2d(Rule2d::Vertex)),
            (2, lumping_rule_2d(Rule2d::VertexEdgeMidpoint)),
        ] {
            let gd = build_fe_2d(&mesh, deg, rule).unwrap();
            let cell = 0;
            let c = &gd.cells[cell];
            let p = match &c.geom {
                CellGeom::Triangle { p } => *p,
                _ => unreachable!(),
            };
            let area = c.geom.measure();
            let mut rng = SplitMix64::new(4);
            let mut counts = vec![0usize; c.dofs.len()];
            let samples = 200_000;
            for _ in 0..samples {
                let mut u = rng.next_f64();
                let mut w = rng.next_f64();
                if u + w > 1.0 {
                    u = 1.0 - u;
                    w = 1.0 - w;
                }
                let x = [
                    p[0][0] + (p[1][0] - p[0][0]) * u + (p[2][0] - p[0][0]) * w,
                    p[0][1] + (p[1][1] - p[0][1]) * u + (p[2][1] - p[0][1]) * w,
                ];
                counts[gd.region_of(cell, x)] += 1;
            }
            for (loc, &w) in c.weights.iter().enumerate() {
                let measured = counts[loc] as f64 / samples as f64 * area;
                assert!(
                    (measured - w).abs() < 0.01 * area,
                    "{} region {loc}: {measured} vs {w}",
                    gd.rule.name
                );
            }
            // Centroid: zero-weight vertex regions must never resolve.
            let centroid = [
                (p[0][0] + p[1][0] + p[2][0]) / 3.0,
                (p[0][1] + p[1][1] + p[2][1]) / 3.0,
            ];
            let loc = gd.region_of(cell, centroid);
            assert!(c.weights[loc] > 0.0);
        }
    }

    #[test]
    fn qd_of_linear_and_constants() {
        let gd = build_fe_1d(&uniform_1d(1), 2, lumping_rule_1d(Rule1d::Simpson)).unwrap();
        let field = q_d(&gd, &|_c, x| x[0]);
        assert_eq!(field.values[0], vec![0.0, 0.5, 1.0]);
        let c = q_d(&gd, &|_c, _x| 3.5);
        assert_eq!(c.eval(&gd, [0.7, 0.0]).unwrap(), 3.5);
    }

    #[test]
    fn qd_integral_exact_to_doe() {
        // sum_i |U_i ∩ K| q(x_i) integrates per-cell polynomials of degree
        // <= doe exactly.
        let gd = build_fe_1d(&uniform_1d(5), 2, lumping_rule_1d(Rule1d::Simpson)).unwrap();
        let q3 = |x: f64| 2.0 * x * x * x - x + 0.5;
        let field = q_d(&gd, &|_c, x| q3(x[0]));
        let mut total = 0.0;
        for (c, vals) in gd.cells.iter().zip(&field.values) {
            for (w, v) in c.weights.iter().zip(vals) {
                total += w * v;
            }
        }
        // ∫_0^1 (2x^3 - x + 0.5) = 0.5.
        assert!((total - 0.5).abs() < 1e-12);
    }

    #[test]
    fn apply_nonlinearity_examples() {
        let v = vec![-1.0, 0.5, 2.0];
        let out = apply_nonlinearity(&Nonlinearity::Stefan, &v);
        assert_eq!(out, vec![-1.0, 0.0, 1.0]);
        let gd = build_fe_1d(&uniform_1d(4), 1, lumping_rule_1d(Rule1d::Trapezoidal)).unwrap();
        let mut rng = SplitMix64::new(8);
        let v: Vec<f64> = (0..gd.n_dofs()).map(|_| 4.0 * rng.next_f64() - 2.0).collect();
        let zv = apply_nonlinearity(&Nonlinearity::Stefan, &v);
        for _ in 0..100 {
            let x = [rng.next_f64(), 0.0];
            let a = gd.pi_lumped(&zv, x).unwrap();
            let b = crate::model::zeta_stefan(gd.pi_lumped(&v, x).unwrap());
            assert_eq!(a, b);
        }
    }

    #[test]
    fn out_of_domain() {
        let gd = build_fe_1d(&uniform_1d(4), 1, lumping_rule_1d(Rule1d::Trapezoidal)).unwrap();
        let v = vec![0.0; gd.n_dofs()];
        assert!(gd.pi_lumped(&v, [1.5, 0.0]).is_err());
    }
}
