//! Mass-lumping rules (nodes, weight fractions, degree of exactness) on the
//! reference interval `[0,1]` and reference triangle, plus the high-order
//! Gauss rules used for error integrals.

use serde::Serialize;

/// Nodes of a lumping rule on the reference cell.
#[derive(Debug, Clone, PartialEq)]
pub enum RefNodes {
    /// Affine coordinates in `[0, 1]`.
    Interval(Vec<f64>),
    /// Barycentric coordinates on the triangle.
    Triangle(Vec<[f64; 3]>),
}

/// A mass-lumping rule: reference nodes `x_i` together with the weight
/// fractions `|U_i ∩ K| / |K|` and the declared degree of exactness.
///
/// `doe` is the largest polynomial degree for which
/// `sum_i |U_i ∩ K| q(x_i) = ∫_K q` holds. `satisfies_kl` is false for the
/// one shipped rule (Equi6 paired with degree 3) whose exactness degree is
/// below its polynomial degree, so the high-order quadrature condition
/// fails outright.
#[derive(Debug, Clone)]
pub struct LumpingRule {
    pub name: &'static str,
    pub nodes: RefNodes,
    pub weight_fractions: Vec<f64>,
    pub doe: usize,
    pub satisfies_kl: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Rule1d {
    Trapezoidal,
    Simpson,
    Equi6,
    Equi8,
    GaussLobatto,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Rule2d {
    Vertex,
    VertexEdgeMidpoint,
}

impl LumpingRule {
    pub fn dim(&self) -> usize {
        match self.nodes {
            RefNodes::Interval(_) => 1,
            RefNodes::Triangle(_) => 2,
        }
    }

    pub fn node_count(&self) -> usize {
        match &self.nodes {
            RefNodes::Interval(v) => v.len(),
            RefNodes::Triangle(v) => v.len(),
        }
    }
}

/// The 1D rules on `K = [0,1]`.
pub fn lumping_rule_1d(rule: Rule1d) -> LumpingRule {
    let (name, nodes, fractions, doe, satisfies_kl) = match rule {
        Rule1d::Trapezoidal => (
            "trapezoidal",
            vec![0.0, 1.0],
            vec![0.5, 0.5],
            1,
            true,
        ),
        Rule1d::Simpson => (
            "simpson",
            vec![0.0, 0.5, 1.0],
            vec![1.0 / 6.0, 2.0 / 3.0, 1.0 / 6.0],
            3,
            true,
        ),
        Rule1d::Equi6 => (
            "equi6",
            vec![0.0, 1.0 / 3.0, 2.0 / 3.0, 1.0],
            vec![1.0 / 6.0, 1.0 / 3.0, 1.0 / 3.0, 1.0 / 6.0],
            1,
            // Degree of exactness 1 < polynomial degree 3: the pairing with
            // cubic elements violates the exactness condition entirely.
            false,
        ),
        Rule1d::Equi8 => (
            "equi8",
            vec![0.0, 1.0 / 3.0, 2.0 / 3.0, 1.0],
            vec![1.0 / 8.0, 3.0 / 8.0, 3.0 / 8.0, 1.0 / 8.0],
            3,
            true,
        ),
        Rule1d::GaussLobatto => {
            let s5 = 5f64.sqrt();
            (
                "gauss-lobatto",
                vec![0.0, (5.0 - s5) / 10.0, (5.0 + s5) / 10.0, 1.0],
                vec![1.0 / 12.0, 5.0 / 12.0, 5.0 / 12.0, 1.0 / 12.0],
                5,
                true,
            )
        }
    };
    LumpingRule {
        name,
        nodes: RefNodes::Interval(nodes),
        weight_fractions: fractions,
        doe,
        satisfies_kl,
    }
}

/// The 2D rules on the reference triangle.
pub fn lumping_rule_2d(rule: Rule2d) -> LumpingRule {
    let third = 1.0 / 3.0;
    match rule {
        Rule2d::Vertex => LumpingRule {
            name: "vertex",
            nodes: RefNodes::Triangle(vec![
                [1.0, 0.0, 0.0],
                [0.0, 1.0, 0.0],
                [0.0, 0.0, 1.0],
            ]),
            weight_fractions: vec![third, third, third],
            doe: 1,
            satisfies_kl: true,
        },
        Rule2d::VertexEdgeMidpoint => LumpingRule {
            name: "vertex-edge-midpoint",
            nodes: RefNodes::Triangle(vec![
                [1.0, 0.0, 0.0],
                [0.0, 1.0, 0.0],
                [0.0, 0.0, 1.0],
                [0.5, 0.5, 0.0],
                [0.5, 0.0, 0.5],
                [0.0, 0.5, 0.5],
            ]),
            weight_fractions: vec![0.0, 0.0, 0.0, third, third, third],
            doe: 2,
            satisfies_kl: true,
        },
    }
}

/// Exact integral of `x^p` over `[0,1]`.
fn monomial_integral_interval(p: u32) -> f64 {
    1.0 / (p as f64 + 1.0)
}

/// Exact integral of `x^a y^b` over the reference triangle
/// `{x, y >= 0, x + y <= 1}`: `a! b! / (a + b + 2)!`.
fn monomial_integral_triangle(a: u32, b: u32) -> f64 {
    let mut val = 1.0;
    // a! b! / (a+b+2)! computed as a product to stay exact in f64 range.
    let mut num: Vec<u64> = (1..=a as u64).chain(1..=b as u64).collect();
    let den: Vec<u64> = (1..=(a + b + 2) as u64).collect();
    for d in den {
        val /= d as f64;
        if let Some(n) = num.pop() {
            val *= n as f64;
        }
    }
    for n in num {
        val *= n as f64;
    }
    val
}

/// Checks `sum_i |U_i ∩ K| q(x_i) = ∫_K q` on the reference cell for every
/// monomial of total degree `<= k_plus_l`, to tolerance `1e-12`.
pub fn verify_exactness(rule: &LumpingRule, k_plus_l: usize) -> bool {
    const TOL: f64 = 1e-12;
    match &rule.nodes {
        RefNodes::Interval(nodes) => {
            for p in 0..=k_plus_l as u32 {
                let approx: f64 = nodes
                    .iter()
                    .zip(&rule.weight_fractions)
                    .map(|(&x, &w)| w * x.powi(p as i32))
                    .sum();
                if (approx - monomial_integral_interval(p)).abs() > TOL {
                    return false;
                }
            }
            true
        }
        RefNodes::Triangle(nodes) => {
            let area = 0.5;
            for deg in 0..=k_plus_l as u32 {
                for a in 0..=deg {
                    let b = deg - a;
                    let approx: f64 = nodes
                        .iter()
                        .zip(&rule.weight_fractions)
                        .map(|(bary, &w)| {
                            // Reference triangle (0,0), (1,0), (0,1):
                            // x = bary[1], y = bary[2].
                            let x = bary[1];
                            let y = bary[2];
                            w * area * x.powi(a as i32) * y.powi(b as i32)
                        })
                        .sum();
                    if (approx - monomial_integral_triangle(a, b)).abs() > TOL {
                        return false;
                    }
                }
            }
            true
        }
    }
}

/// Gauss-Legendre rule on `[0, 1]`, nodes and weights to machine accuracy.
#[derive(Debug, Clone)]
pub struct GaussInterval {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

/// Legendre polynomial P_n and its derivative at `x` (on `[-1,1]`).
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

/// `n`-point Gauss-Legendre rule mapped to `[0, 1]`; exact for polynomial
/// degree `2n - 1`.
pub fn gauss_legendre_01(n: usize) -> GaussInterval {
    assert!(n >= 1);
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n {
        // Chebyshev initial guess, then Newton on P_n.
        let mut x = -(std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        for _ in 0..100 {
            let (p, dp) = legendre(n, x);
            let dx = p / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, dp) = legendre(n, x);
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = 0.5 * (x + 1.0);
        weights[i] = 0.5 * w;
    }
    GaussInterval { nodes, weights }
}

/// Gauss rule on `[0,1]` exact for (at least) the given polynomial degree.
pub fn gauss_for_degree(degree: usize) -> GaussInterval {
    gauss_legendre_01(degree / 2 + 1)
}

/// Quadrature on the reference triangle `{x, y >= 0, x + y <= 1}`; weights
/// sum to the area `1/2`.
#[derive(Debug, Clone)]
pub struct TriangleQuad {
    pub points: Vec<[f64; 2]>,
    pub weights: Vec<f64>,
}

/// Rule exact for bivariate polynomials of total degree `<= degree`,
/// built by collapsing a tensor Gauss-Legendre grid onto the triangle
/// (x = u, y = v(1-u), Jacobian 1-u). A monomial x^a y^b with a+b = d
/// becomes a degree d+1 polynomial in u times degree d in v, so an
/// n-point rule per direction with 2n-1 >= d+1 integrates it exactly.
pub fn triangle_quad(degree: usize) -> TriangleQuad {
    let n = (degree + 1) / 2 + 1;
    let g = gauss_legendre_01(n);
    let mut points = Vec::with_capacity(n * n);
    let mut weights = Vec::with_capacity(n * n);
    for (&u, &wu) in g.nodes.iter().zip(&g.weights) {
        for (&v, &wv) in g.nodes.iter().zip(&g.weights) {
            points.push([u, v * (1.0 - u)]);
            weights.push(wu * wv * (1.0 - u));
        }
    }
    TriangleQuad { points, weights }
}
