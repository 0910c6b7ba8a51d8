//! The manufactured problems: six 1D cases with exact solution, source
//! data and boundary values, plus their 2D extensions along the diagonal
//! coordinate `s = (x + y) / sqrt(2)`.

use crate::model::{NonlinearModel, Nonlinearity};
use std::sync::Arc;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CaseError {
    #[error("matching-constants Newton did not converge (residual {0})")]
    ConstantsNotConverged(f64),
    #[error("2D extension requires F = 0")]
    Unsupported,
    #[error("unknown case `{0}`")]
    UnknownCase(String),
}

/// A scalar profile defined piecewise on the line. `breaks` are the
/// endpoints of the pieces; evaluation at an exact breakpoint picks the
/// piece on the side of `toward`, which is how one-sided (within-cell)
/// values are taken for discontinuous profiles.
#[derive(Clone)]
pub struct Piecewise {
    pub breaks: Vec<f64>,
    eval_piece: Arc<dyn Fn(usize, f64) -> f64 + Send + Sync>,
}

impl Piecewise {
    pub fn smooth(f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        Piecewise {
            breaks: Vec::new(),
            eval_piece: Arc::new(move |_, s| f(s)),
        }
    }

    pub fn with_breaks(
        breaks: Vec<f64>,
        f: impl Fn(usize, f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Piecewise {
            breaks,
            eval_piece: Arc::new(f),
        }
    }

    fn piece_index(&self, s: f64, toward: f64) -> usize {
        let mut idx = self.breaks.partition_point(|&b| b < s);
        // idx is the piece of (breaks[idx-1], breaks[idx]); at an exact
        // breakpoint resolve to the side of `toward`.
        if idx < self.breaks.len() && s == self.breaks[idx] && toward >= s {
            idx += 1;
        }
        idx
    }

    /// Value at `s`; exact breakpoints resolve to the right piece.
    pub fn eval(&self, s: f64) -> f64 {
        self.eval_toward(s, f64::MAX)
    }

    /// Value at `s` with breakpoint ties resolved toward `toward`.
    pub fn eval_toward(&self, s: f64, toward: f64) -> f64 {
        (self.eval_piece)(self.piece_index(s, toward), s)
    }
}

impl std::fmt::Debug for Piecewise {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Piecewise(breaks={:?})", self.breaks)
    }
}

/// Piecewise-constant 1D vector field (the divergence-form datum `F`),
/// described by its discontinuity locations and per-interval values.
#[derive(Debug, Clone)]
pub struct PiecewiseConstF {
    pub breaks: Vec<f64>,
    pub values: Vec<f64>,
}

impl PiecewiseConstF {
    pub fn value_in(&self, lo: f64, hi: f64) -> f64 {
        let mid = 0.5 * (lo + hi);
        let idx = self.breaks.partition_point(|&b| b < mid);
        self.values[idx]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CaseId {
    R1,
    P1,
    P2,
    S1,
    S2,
    S3,
}

impl CaseId {
    pub fn as_str(&self) -> &'static str {
        match self {
            CaseId::R1 => "r1",
            CaseId::P1 => "p1",
            CaseId::P2 => "p2",
            CaseId::S1 => "s1",
            CaseId::S2 => "s2",
            CaseId::S3 => "s3",
        }
    }
}

#[derive(Debug, Clone)]
pub struct TestCase {
    pub id: CaseId,
    pub dim2: bool,
    pub model: NonlinearModel,
    pub f: Piecewise,
    pub big_f: Option<PiecewiseConstF>,
    pub exact_u: Piecewise,
    pub exact_zeta_u: Piecewise,
    /// Derivative of `zeta(u)` with respect to the 1D coordinate.
    pub exact_dzeta_u: Piecewise,
    pub singular_points: Vec<f64>,
    /// Optional windows (in the 1D coordinate) excluded from error
    /// integration when requested.
    pub exclusion_windows: Vec<(f64, f64)>,
}

impl TestCase {
    pub fn name(&self) -> String {
        if self.dim2 {
            format!("{}-2d", self.id.as_str())
        } else {
            self.id.as_str().to_string()
        }
    }

    /// The 1D coordinate of a point: `x` itself, or the diagonal
    /// coordinate `(x + y)/sqrt(2)` in 2D.
    pub fn s_coord(&self, x: [f64; 2]) -> f64 {
        if self.dim2 {
            (x[0] + x[1]) / std::f64::consts::SQRT_2
        } else {
            x[0]
        }
    }

    pub fn u_at(&self, x: [f64; 2], toward_s: f64) -> f64 {
        self.exact_u.eval_toward(self.s_coord(x), toward_s)
    }

    pub fn zeta_u_at(&self, x: [f64; 2], toward_s: f64) -> f64 {
        self.exact_zeta_u.eval_toward(self.s_coord(x), toward_s)
    }

    pub fn f_at(&self, x: [f64; 2], toward_s: f64) -> f64 {
        self.f.eval_toward(self.s_coord(x), toward_s)
    }

    /// Gradient of `zeta(u)` at a point.
    pub fn grad_zeta_u_at(&self, x: [f64; 2], toward_s: f64) -> [f64; 2] {
        let d = self.exact_dzeta_u.eval_toward(self.s_coord(x), toward_s);
        if self.dim2 {
            let c = 1.0 / std::f64::consts::SQRT_2;
            [d * c, d * c]
        } else {
            [d, 0.0]
        }
    }

    /// Dirichlet value of `u` at a boundary point, taken as the limit from
    /// inside the domain.
    pub fn dirichlet_u(&self, x: [f64; 2]) -> f64 {
        let toward = if self.dim2 {
            std::f64::consts::FRAC_1_SQRT_2
        } else {
            0.5
        };
        self.u_at(x, toward)
    }
}

/// Regular linear problem: `zeta = Id`, `u(x) = x(1-x)e^x`, `f = 4x e^x`.
pub fn case_r1() -> TestCase {
    let u = |x: f64| x * (1.0 - x) * x.exp();
    TestCase {
        id: CaseId::R1,
        dim2: false,
        model: NonlinearModel::new(Nonlinearity::Identity, Nonlinearity::Identity),
        f: Piecewise::smooth(|x| 4.0 * x * x.exp()),
        big_f: None,
        exact_u: Piecewise::smooth(u),
        exact_zeta_u: Piecewise::smooth(u),
        exact_dzeta_u: Piecewise::smooth(|x| (1.0 - x - x * x) * x.exp()),
        singular_points: vec![],
        exclusion_windows: vec![],
    }
}

/// Porous-medium with source: `u = (y z)^{3/2}` for `y = max(x - 0.2, 0)`,
/// `z = max(0.8 - x, 0)`, homogeneous Dirichlet data.
pub fn case_p1() -> TestCase {
    let yz = |x: f64| (f64::max(x - 0.2, 0.0), f64::max(0.8 - x, 0.0));
    let u = move |x: f64| {
        let (y, z) = yz(x);
        (y * z).powf(1.5)
    };
    let zeta_u = move |x: f64| {
        let (y, z) = yz(x);
        (y * z).powi(3)
    };
    let dzeta_u = move |x: f64| {
        if x <= 0.2 || x >= 0.8 {
            0.0
        } else {
            let (y, z) = yz(x);
            3.0 * (y * z).powi(2) * (z - y)
        }
    };
    let f = move |x: f64| {
        let (y, z) = yz(x);
        (y * z).powf(1.5) - 6.0 * y * z * (z * z - 3.0 * y * z + y * y)
    };
    TestCase {
        id: CaseId::P1,
        dim2: false,
        model: NonlinearModel::new(Nonlinearity::Identity, Nonlinearity::PorousMedium),
        f: Piecewise::smooth(f),
        big_f: None,
        exact_u: Piecewise::with_breaks(vec![0.2, 0.8], move |_, x| u(x)),
        exact_zeta_u: Piecewise::with_breaks(vec![0.2, 0.8], move |_, x| zeta_u(x)),
        exact_dzeta_u: Piecewise::with_breaks(vec![0.2, 0.8], move |_, x| dzeta_u(x)),
        singular_points: vec![0.2, 0.8],
        exclusion_windows: vec![],
    }
}

/// Porous-medium with `f = 0`: `u = max(x - 1/5, 0)^2 / 12`,
/// non-homogeneous Dirichlet data at the right end.
pub fn case_p2() -> TestCase {
    let u = |x: f64| f64::max(x - 0.2, 0.0).powi(2) / 12.0;
    TestCase {
        id: CaseId::P2,
        dim2: false,
        model: NonlinearModel::new(Nonlinearity::Identity, Nonlinearity::PorousMedium),
        f: Piecewise::smooth(|_| 0.0),
        big_f: None,
        exact_u: Piecewise::with_breaks(vec![0.2], move |_, x| u(x)),
        exact_zeta_u: Piecewise::with_breaks(vec![0.2], |_, x| {
            f64::max(x - 0.2, 0.0).powi(4) / 144.0
        }),
        exact_dzeta_u: Piecewise::with_breaks(vec![0.2], |_, x| {
            f64::max(x - 0.2, 0.0).powi(3) / 36.0
        }),
        singular_points: vec![0.2],
        exclusion_windows: vec![],
    }
}

/// Solves the three matching conditions of the Stefan case with source:
///
/// ```text
/// 3(1/2 - g) - 1 + a e^g + b e^-g = 0
/// -3 + a e^g - b e^-g = 0
/// -3 + a - b = 0
/// ```
///
/// by Newton from `(0.3, 1.2, -1.7)` to residual `1e-13`.
pub fn solve_s1_constants() -> Result<(f64, f64, f64), CaseError> {
    let (mut g, mut a, mut b) = (0.3f64, 1.2f64, -1.7f64);
    for _ in 0..60 {
        let (eg, emg) = (g.exp(), (-g).exp());
        let r = [
            3.0 * (0.5 - g) - 1.0 + a * eg + b * emg,
            -3.0 + a * eg - b * emg,
            -3.0 + a - b,
        ];
        let res = r.iter().map(|v| v.abs()).fold(0.0f64, f64::max);
        if res < 1e-13 {
            return Ok((g, a, b));
        }
        // Jacobian rows in (g, a, b).
        let j = [
            [-3.0 + a * eg - b * emg, eg, emg],
            [a * eg + b * emg, eg, -emg],
            [0.0, 1.0, -1.0],
        ];
        let det3 = |m: &[[f64; 3]; 3]| {
            m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
                - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
                + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
        };
        let det = det3(&j);
        let solve_col = |col: usize| {
            let mut m = j;
            for row in 0..3 {
                m[row][col] = -r[row];
            }
            det3(&m) / det
        };
        let (dg, da, db) = (solve_col(0), solve_col(1), solve_col(2));
        g += dg;
        a += da;
        b += db;
    }
    let (eg, emg) = (g.exp(), (-g).exp());
    let res = (3.0 * (0.5 - g) - 1.0 + a * eg + b * emg)
        .abs()
        .max((-3.0 + a * eg - b * emg).abs());
    Err(CaseError::ConstantsNotConverged(res))
}

/// Stefan problem with source: `f(x) = 3(1/2 - g(x))`, `g(x) = |1/2 - x|`;
/// the solution jumps across the plateau at `1/2 ± gamma`.
pub fn case_s1() -> TestCase {
    let (gamma, a, b) = solve_s1_constants().expect("matching constants");
    let x_lo = 0.5 - gamma;
    let x_hi = 0.5 + gamma;
    let gabs = |x: f64| (0.5 - x).abs();
    let inner = move |x: f64| {
        let g = gabs(x);
        a * g.exp() + b * (-g).exp() + 3.0 * (0.5 - g)
    };
    let outer = move |x: f64| 3.0 * (0.5 - gabs(x));
    let u = move |p: usize, x: f64| if p == 1 { inner(x) } else { outer(x) };
    let zeta_u = move |p: usize, x: f64| if p == 1 { inner(x) - 1.0 } else { 0.0 };
    let dzeta_u = move |p: usize, x: f64| {
        if p == 1 {
            let g = gabs(x);
            let dg = if x < 0.5 { -1.0 } else { 1.0 };
            (a * g.exp() - b * (-g).exp() - 3.0) * dg
        } else {
            0.0
        }
    };
    TestCase {
        id: CaseId::S1,
        dim2: false,
        model: NonlinearModel::new(Nonlinearity::Identity, Nonlinearity::Stefan),
        f: Piecewise::smooth(move |x| 3.0 * (0.5 - gabs(x))),
        big_f: None,
        exact_u: Piecewise::with_breaks(vec![x_lo, x_hi], u),
        exact_zeta_u: Piecewise::with_breaks(vec![x_lo, x_hi], zeta_u),
        exact_dzeta_u: Piecewise::with_breaks(vec![x_lo, x_hi], dzeta_u),
        singular_points: vec![x_lo, 0.5, x_hi],
        exclusion_windows: vec![(x_lo - 0.1, x_lo + 0.1), (x_hi - 0.1, x_hi + 0.1)],
    }
}

/// Stefan problem with `f = 0`: `u = cosh(x - gamma)` past the free
/// boundary `gamma = 1/3`, zero before it; non-homogeneous Dirichlet at
/// `x = 1`.
pub fn case_s2() -> TestCase {
    let gamma = 1.0 / 3.0;
    TestCase {
        id: CaseId::S2,
        dim2: false,
        model: NonlinearModel::new(Nonlinearity::Identity, Nonlinearity::Stefan),
        f: Piecewise::smooth(|_| 0.0),
        big_f: None,
        exact_u: Piecewise::with_breaks(vec![gamma], move |p, x| {
            if p == 1 {
                (x - gamma).cosh()
            } else {
                0.0
            }
        }),
        exact_zeta_u: Piecewise::with_breaks(vec![gamma], move |p, x| {
            if p == 1 {
                (x - gamma).cosh() - 1.0
            } else {
                0.0
            }
        }),
        exact_dzeta_u: Piecewise::with_breaks(vec![gamma], move |p, x| {
            if p == 1 {
                (x - gamma).sinh()
            } else {
                0.0
            }
        }),
        singular_points: vec![gamma],
        exclusion_windows: vec![],
    }
}

/// Stefan problem with a discontinuous divergence datum `F`; the exact
/// `zeta(u)` has kinks at `1/4` and `3/4` and no regularity beyond H1.
pub fn case_s3() -> TestCase {
    let c = 1.0 / (0.25f64).cosh();
    let t = 4.0 * (0.25f64).tanh();
    let mid_u = move |x: f64| 5.0 - 4.0 * (x - 0.5).cosh() * c;
    TestCase {
        id: CaseId::S3,
        dim2: false,
        model: NonlinearModel::new(Nonlinearity::Identity, Nonlinearity::Stefan),
        f: Piecewise::with_breaks(vec![0.25, 0.75], |p, _| if p == 1 { 5.0 } else { 0.0 }),
        big_f: Some(PiecewiseConstF {
            breaks: vec![0.25, 0.75],
            values: vec![t, 0.0, -t],
        }),
        exact_u: Piecewise::with_breaks(vec![0.25, 0.75], move |p, x| {
            if p == 1 {
                mid_u(x)
            } else {
                0.0
            }
        }),
        exact_zeta_u: Piecewise::with_breaks(vec![0.25, 0.75], move |p, x| {
            if p == 1 {
                mid_u(x) - 1.0
            } else {
                0.0
            }
        }),
        exact_dzeta_u: Piecewise::with_breaks(vec![0.25, 0.75], move |p, x| {
            if p == 1 {
                -4.0 * (x - 0.5).sinh() * c
            } else {
                0.0
            }
        }),
        singular_points: vec![0.25, 0.75],
        exclusion_windows: vec![],
    }
}

/// Extends a 1D case to the unit square along the diagonal coordinate.
/// Valid because the Laplacian of `g((x+y)/sqrt(2))` is `g''` evaluated
/// there; requires `F = 0`.
pub fn lift_to_2d(case: &TestCase) -> Result<TestCase, CaseError> {
    if case.big_f.is_some() {
        return Err(CaseError::Unsupported);
    }
    let mut lifted = case.clone();
    lifted.dim2 = true;
    Ok(lifted)
}

/// Case lookup by CLI name (`r1`, `p1`, ..., `s2-2d`).
pub fn case_by_name(name: &str) -> Result<TestCase, CaseError> {
    let (base, dim2) = match name.strip_suffix("-2d") {
        Some(b) => (b, true),
        None => (name, false),
    };
    let case = match base {
        "r1" => case_r1(),
        "p1" => case_p1(),
        "p2" => case_p2(),
        "s1" => case_s1(),
        "s2" => case_s2(),
        "s3" => case_s3(),
        other => return Err(CaseError::UnknownCase(other.to_string())),
    };
    if dim2 {
        lift_to_2d(&case)
    } else {
        Ok(case)
    }
}

pub fn all_case_names() -> Vec<&'static str> {
    vec![
        "r1", "p1", "p2", "s1", "s2", "s3", "p1-2d", "p2-2d", "s1-2d", "s2-2d",
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::SplitMix64;

    fn fd_second_derivative(f: &dyn Fn(f64) -> f64, x: f64) -> f64 {
        let h = 1e-5;
        (f(x + h) - 2.0 * f(x) + f(x - h)) / (h * h)
    }

    /// PDE residual away from singular points for the F-free cases.
    fn check_residual(case: &TestCase) {
        let mut rng = SplitMix64::new(13);
        let mut checked = 0;
        while checked < 200 {
            let x = 0.01 + 0.98 * rng.next_f64();
            if case.singular_points.iter().any(|&s| (x - s).abs() < 1e-3) {
                continue;
            }
            checked += 1;
            let lap = fd_second_derivative(&|t| case.exact_zeta_u.eval(t), x);
            let res = case.model.beta.eval(case.exact_u.eval(x)) - lap - case.f.eval(x);
            assert!(
                res.abs() < 1e-4,
                "{} residual {res:.2e} at x = {x}",
                case.name()
            );
        }
    }

    #[test]
    fn residuals_vanish() {
        for case in [case_r1(), case_p1(), case_p2(), case_s1(), case_s2()] {
            check_residual(&case);
        }
    }

    #[test]
    fn r1_values() {
        let c = case_r1();
        assert!((c.exact_u.eval(0.5) - 0.412180317675032).abs() < 1e-12);
        assert_eq!(c.exact_u.eval(0.0), 0.0);
        assert_eq!(c.exact_u.eval(1.0), 0.0);
        // u - u'' = 4 x e^x from the closed form u'' = (-3x - x^2) e^x.
        let x = 0.5f64;
        let analytic = x * (1.0 - x) * x.exp() - (-3.0 * x - x * x) * x.exp();
        assert!((analytic - 4.0 * x * x.exp()).abs() < 1e-14);
    }

    #[test]
    fn p1_values() {
        let c = case_p1();
        assert!((c.exact_u.eval(0.5) - 0.027).abs() < 1e-15);
        assert_eq!(c.exact_u.eval(0.1), 0.0);
        // FD check of zeta(u)'' against u - f at x = 0.5.
        let lap = fd_second_derivative(&|t| c.exact_zeta_u.eval(t), 0.5);
        let res = c.exact_u.eval(0.5) - lap - c.f.eval(0.5);
        assert!(res.abs() < 1e-6);
    }

    #[test]
    fn p2_values() {
        let c = case_p2();
        assert_eq!(c.exact_u.eval(0.2), 0.0);
        assert_eq!(c.exact_u.eval(0.1), 0.0);
        assert!((c.exact_u.eval(1.0) - 0.0533333333333333).abs() < 1e-15);
        // Analytic: (zeta_p(u))'' = 12 (x-0.2)^2 / 144 = u.
        for x in [0.3, 0.5, 0.9] {
            let second = 12.0 * (x - 0.2f64).powi(2) / 144.0;
            assert!((second - c.exact_u.eval(x)).abs() < 1e-15);
        }
    }

    #[test]
    fn s1_constants_match_reference() {
        let (g, a, b) = solve_s1_constants().unwrap();
        assert!((g - 0.33036).abs() < 5e-5);
        assert!((a - 1.2545).abs() < 5e-5);
        assert!((b - (-1.7455)).abs() < 5e-5);
    }

    #[test]
    fn s1_matching_conditions() {
        let c = case_s1();
        let (gamma, _, _) = solve_s1_constants().unwrap();
        for x in [0.5 - gamma, 0.5 + gamma] {
            // zeta(u) vanishes to first order at the free boundaries.
            let inner_side = if x < 0.5 { x + 1e-9 } else { x - 1e-9 };
            assert!(c.exact_zeta_u.eval_toward(x, inner_side).abs() < 1e-10);
            assert!(c.exact_dzeta_u.eval_toward(x, inner_side).abs() < 1e-10);
        }
        // u equals f on the outer regions.
        let mut rng = SplitMix64::new(3);
        for _ in 0..50 {
            let t = rng.next_f64() * (0.5 - gamma - 0.002);
            for x in [t + 0.001, 1.0 - t - 0.001] {
                assert!((c.exact_u.eval(x) - c.f.eval(x)).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn s2_values() {
        let c = case_s2();
        assert!((c.exact_u.eval(1.0) - 1.230575580043634).abs() < 1e-12);
        assert_eq!(c.exact_u.eval(0.25), 0.0);
        // On (gamma, 1): u >= 1 so zeta(u) = u - 1 = cosh - 1, and
        // u - (zeta(u))'' = cosh - cosh = 0 = f.
        for x in [0.4, 0.7, 0.95] {
            let g = x - 1.0 / 3.0;
            assert!(c.exact_u.eval(x) >= 1.0);
            assert!((c.exact_zeta_u.eval(x) - (g.cosh() - 1.0)).abs() < 1e-14);
        }
    }

    #[test]
    fn s3_values() {
        let c = case_s3();
        // Evaluated from the closed form 5 - 4/cosh(1/4).
        assert!((c.exact_u.eval(0.5) - 1.1218254834391417).abs() < 1e-12);
        assert_eq!(c.exact_u.eval(0.1), 0.0);
        let f = c.big_f.as_ref().unwrap();
        assert!((f.value_in(0.0, 0.2) - 0.9796746496148365).abs() < 1e-12);
        // Continuity of u into the plateau at 1/4: inner limit is exactly 1.
        let inner = c.exact_u.eval_toward(0.25, 0.5);
        assert!((inner - 1.0).abs() < 1e-12);
        assert_eq!(crate::model::zeta_stefan(inner), 0.0);
    }

    #[test]
    fn zeta_u_continuous_at_singularities() {
        for case in [case_p1(), case_p2(), case_s1(), case_s2()] {
            for &s in &case.singular_points {
                let left = case.exact_zeta_u.eval_toward(s, s - 1.0);
                let right = case.exact_zeta_u.eval_toward(s, s + 1.0);
                assert!(
                    (left - right).abs() < 1e-10,
                    "{} at {s}: {left} vs {right}",
                    case.name()
                );
            }
        }
    }

    #[test]
    fn jumps_live_on_the_plateau() {
        for case in [case_s1(), case_s2()] {
            for &s in &case.singular_points {
                let left = case.exact_u.eval_toward(s, s - 1.0);
                let right = case.exact_u.eval_toward(s, s + 1.0);
                if (left - right).abs() > 1e-12 {
                    for v in [left, right] {
                        assert!((-1e-12..=1.0 + 1e-12).contains(&v), "{v} not in plateau");
                    }
                }
            }
        }
    }

    #[test]
    fn lift_to_2d_composition() {
        let c2 = lift_to_2d(&case_p2()).unwrap();
        let s = 0.6 / std::f64::consts::SQRT_2;
        assert_eq!(c2.u_at([0.3, 0.3], 0.5), case_p2().exact_u.eval(s));
        assert_eq!(c2.u_at([0.0, 0.0], 0.5), case_p2().exact_u.eval(0.0));
        assert!(lift_to_2d(&case_s3()).is_err());
    }

    #[test]
    fn lifted_residual_2d() {
        // 5-point FD Laplacian of the lifted solution against f.
        for case in [
            lift_to_2d(&case_p1()).unwrap(),
            lift_to_2d(&case_s2()).unwrap(),
        ] {
            let mut rng = SplitMix64::new(19);
            let h = 1e-5;
            let mut checked = 0;
            while checked < 100 {
                let x = [0.01 + 0.98 * rng.next_f64(), 0.01 + 0.98 * rng.next_f64()];
                let s = case.s_coord(x);
                if case.singular_points.iter().any(|&p| (s - p).abs() < 1e-3) {
                    continue;
                }
                checked += 1;
                let z = |p: [f64; 2]| case.zeta_u_at(p, s);
                let lap = (z([x[0] + h, x[1]]) + z([x[0] - h, x[1]]) + z([x[0], x[1] + h])
                    + z([x[0], x[1] - h])
                    - 4.0 * z(x))
                    / (h * h);
                let res = case.model.beta.eval(case.u_at(x, s)) - lap - case.f_at(x, s);
                assert!(res.abs() < 1e-4, "{} residual {res:.2e}", case.name());
            }
        }
    }

    #[test]
    fn case_lookup() {
        assert_eq!(case_by_name("s2-2d").unwrap().name(), "s2-2d");
        assert!(case_by_name("nope").is_err());
        assert!(case_by_name("s3-2d").is_err());
        for n in all_case_names() {
            assert!(case_by_name(n).is_ok(), "{n}");
        }
    }
}
