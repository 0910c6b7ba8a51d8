//! The nonlinearities `beta`, `zeta`, the diffusion tensor field `Lambda`,
//! the right-hand-side data, and the derived functions `mu`, `rho`, `nu`
//! of the change-of-unknown used by the conforming scheme.

use std::fmt;
use std::sync::Arc;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("beta + zeta is not strictly increasing near t = {0}")]
    NonInvertible(f64),
    #[error("Lambda is not symmetric positive definite on cell {0}")]
    BadTensor(usize),
    #[error("unknown nonlinearity name `{0}`")]
    UnknownName(String),
}

/// The porous-medium nonlinearity `max(s, 0)^2`.
pub fn zeta_porous(s: f64) -> f64 {
    let p = s.max(0.0);
    p * p
}

pub fn gderiv_porous(s: f64) -> f64 {
    2.0 * s.max(0.0)
}

/// The Stefan nonlinearity: identity below 0, plateau on `[0, 1]`,
/// `s - 1` above.
pub fn zeta_stefan(s: f64) -> f64 {
    if s < 0.0 {
        s
    } else if s <= 1.0 {
        0.0
    } else {
        s - 1.0
    }
}

/// Element of the generalized derivative of the Stefan nonlinearity.
/// At the kinks `s = 0` and `s = 1` the plateau value 0 is taken, which
/// keeps the Newton active set stable; the lumped mass supplies
/// invertibility of the Jacobian there.
pub fn gderiv_stefan(s: f64) -> f64 {
    if s < 0.0 || s > 1.0 {
        1.0
    } else {
        0.0
    }
}

type ScalarFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// A continuous non-decreasing scalar nonlinearity with `eval(0) = 0`,
/// together with an element of its generalized derivative and the list of
/// points where it is non-smooth.
#[derive(Clone)]
pub enum Nonlinearity {
    Identity,
    PorousMedium,
    Stefan,
    Custom {
        name: String,
        eval: ScalarFn,
        gderiv: ScalarFn,
        kinks: Vec<f64>,
    },
}

impl fmt::Debug for Nonlinearity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl Nonlinearity {
    pub fn eval(&self, s: f64) -> f64 {
        match self {
            Nonlinearity::Identity => s,
            Nonlinearity::PorousMedium => zeta_porous(s),
            Nonlinearity::Stefan => zeta_stefan(s),
            Nonlinearity::Custom { eval, .. } => eval(s),
        }
    }

    pub fn gderiv(&self, s: f64) -> f64 {
        match self {
            Nonlinearity::Identity => 1.0,
            Nonlinearity::PorousMedium => gderiv_porous(s),
            Nonlinearity::Stefan => gderiv_stefan(s),
            Nonlinearity::Custom { gderiv, .. } => gderiv(s),
        }
    }

    pub fn kinks(&self) -> Vec<f64> {
        match self {
            Nonlinearity::Identity => vec![],
            Nonlinearity::PorousMedium => vec![0.0],
            Nonlinearity::Stefan => vec![0.0, 1.0],
            Nonlinearity::Custom { kinks, .. } => kinks.clone(),
        }
    }

    pub fn name(&self) -> &str {
        match self {
            Nonlinearity::Identity => "id",
            Nonlinearity::PorousMedium => "porous",
            Nonlinearity::Stefan => "stefan",
            Nonlinearity::Custom { name, .. } => name,
        }
    }

    pub fn from_name(name: &str) -> Result<Self, ModelError> {
        match name {
            "id" => Ok(Nonlinearity::Identity),
            "porous" => Ok(Nonlinearity::PorousMedium),
            "stefan" => Ok(Nonlinearity::Stefan),
            other => Err(ModelError::UnknownName(other.to_string())),
        }
    }
}

/// Symmetric 2x2 tensor (used as a scalar `a11` in 1D).
#[derive(Debug, Clone, Copy)]
pub struct SymTensor {
    pub a11: f64,
    pub a12: f64,
    pub a22: f64,
}

impl SymTensor {
    pub fn identity() -> Self {
        SymTensor {
            a11: 1.0,
            a12: 0.0,
            a22: 1.0,
        }
    }

    pub fn eigenvalues(&self) -> (f64, f64) {
        let tr = self.a11 + self.a22;
        let det = self.a11 * self.a22 - self.a12 * self.a12;
        let disc = (tr * tr / 4.0 - det).max(0.0).sqrt();
        (tr / 2.0 - disc, tr / 2.0 + disc)
    }

    pub fn apply(&self, v: [f64; 2]) -> [f64; 2] {
        [
            self.a11 * v[0] + self.a12 * v[1],
            self.a12 * v[0] + self.a22 * v[1],
        ]
    }
}

/// Cell-wise constant diffusion tensor field. All the shipped test cases
/// use the identity, which is the default.
#[derive(Debug, Clone)]
pub enum Lambda {
    Identity,
    PerCell(Vec<SymTensor>),
}

impl Lambda {
    pub fn at_cell(&self, cell: usize) -> SymTensor {
        match self {
            Lambda::Identity => SymTensor::identity(),
            Lambda::PerCell(ts) => ts[cell],
        }
    }

    pub fn max_eigenvalue(&self) -> f64 {
        match self {
            Lambda::Identity => 1.0,
            Lambda::PerCell(ts) => ts
                .iter()
                .map(|t| t.eigenvalues().1)
                .fold(f64::MIN, f64::max),
        }
    }
}

/// The model pair `(beta, zeta)` with the diffusion field.
#[derive(Debug, Clone)]
pub struct NonlinearModel {
    pub beta: Nonlinearity,
    pub zeta: Nonlinearity,
    pub lambda: Lambda,
    pub strict_monotone_check: bool,
}

impl NonlinearModel {
    pub fn new(beta: Nonlinearity, zeta: Nonlinearity) -> Self {
        NonlinearModel {
            beta,
            zeta,
            lambda: Lambda::Identity,
            strict_monotone_check: true,
        }
    }

    pub fn with_lambda(mut self, lambda: Lambda) -> Result<Self, ModelError> {
        if let Lambda::PerCell(ts) = &lambda {
            for (k, t) in ts.iter().enumerate() {
                let (lo, _hi) = t.eigenvalues();
                if !(lo > 0.0) {
                    return Err(ModelError::BadTensor(k));
                }
            }
        }
        self.lambda = lambda;
        Ok(self)
    }

    pub fn beta_plus_zeta(&self, s: f64) -> f64 {
        self.beta.eval(s) + self.zeta.eval(s)
    }

    /// Verifies strict monotonicity of `beta + zeta` on a sample grid.
    pub fn check_strictly_increasing(&self, lo: f64, hi: f64) -> Result<(), ModelError> {
        let n = 512;
        let mut prev = self.beta_plus_zeta(lo);
        for i in 1..=n {
            let s = lo + (hi - lo) * i as f64 / n as f64;
            let v = self.beta_plus_zeta(s);
            if v <= prev {
                return Err(ModelError::NonInvertible(s));
            }
            prev = v;
        }
        Ok(())
    }
}

/// Inverts `t = (beta + zeta)(s)` by monotone bisection to absolute
/// tolerance `1e-12` on `s`.
pub fn invert_beta_plus_zeta(model: &NonlinearModel, t: f64) -> Result<f64, ModelError> {
    let g = |s: f64| model.beta_plus_zeta(s);
    // Bracket by doubling around 0.
    let (mut lo, mut hi) = (-1.0, 1.0);
    let mut tries = 0;
    while g(lo) > t {
        lo *= 2.0;
        tries += 1;
        if tries > 80 {
            return Err(ModelError::NonInvertible(t));
        }
    }
    tries = 0;
    while g(hi) < t {
        hi *= 2.0;
        tries += 1;
        if tries > 80 {
            return Err(ModelError::NonInvertible(t));
        }
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if g(mid) < t {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-12 {
            break;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Generalized derivative of `mu(t) = zeta((beta+zeta)^{-1}(t))` at `t`,
/// evaluated through the chain rule at `s = (beta+zeta)^{-1}(t)`.
pub fn mu_gderiv(model: &NonlinearModel, t: f64) -> Result<f64, ModelError> {
    let s = invert_beta_plus_zeta(model, t)?;
    let zb = model.beta.gderiv(s);
    let zz = model.zeta.gderiv(s);
    let denom = zb + zz;
    if denom <= 0.0 {
        return Err(ModelError::NonInvertible(t));
    }
    Ok(zz / denom)
}

/// `t`-locations at which `mu` and `rho` can be non-smooth: the images of
/// the kinks of `beta` and `zeta` under `beta + zeta`.
pub fn mu_breakpoints(model: &NonlinearModel) -> Vec<f64> {
    let mut pts: Vec<f64> = model
        .beta
        .kinks()
        .into_iter()
        .chain(model.zeta.kinks())
        .map(|s| model.beta_plus_zeta(s))
        .collect();
    pts.sort_by(f64::total_cmp);
    pts.dedup_by(|a, b| (*a - *b).abs() < 1e-14);
    pts
}

fn adaptive_simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64, depth: usize) -> f64 {
    let m = 0.5 * (a + b);
    let fa = f(a);
    let fm = f(m);
    let fb = f(b);
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    fn step(
        f: &dyn Fn(f64) -> f64,
        a: f64,
        m: f64,
        b: f64,
        fa: f64,
        fm: f64,
        fb: f64,
        whole: f64,
        tol: f64,
        depth: usize,
    ) -> f64 {
        let lm = 0.5 * (a + m);
        let rm = 0.5 * (m + b);
        let flm = f(lm);
        let frm = f(rm);
        let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        if depth == 0 || (left + right - whole).abs() < 15.0 * tol {
            left + right + (left + right - whole) / 15.0
        } else {
            step(f, a, lm, m, fa, flm, fm, left, tol / 2.0, depth - 1)
                + step(f, m, rm, b, fm, frm, fb, right, tol / 2.0, depth - 1)
        }
    }
    step(f, a, m, b, fa, fm, fb, whole, tol, depth)
}

/// Computes `mu(t) = zeta((beta+zeta)^{-1}(t))`, `rho(t) = t - mu(t)` and
/// `nu(t) = ∫_0^t sqrt(mu'(r)) dr` (adaptive quadrature on the
/// breakpoint-split pieces).
pub fn mu_rho_nu(model: &NonlinearModel, t: f64) -> Result<(f64, f64, f64), ModelError> {
    if model.strict_monotone_check {
        let span = t.abs().max(1.0) * 2.0;
        model.check_strictly_increasing(-span, span)?;
    }
    let s = invert_beta_plus_zeta(model, t)?;
    let mu = model.zeta.eval(s);
    let rho = t - mu;

    // Split [0, t] at the breakpoints of mu'.
    let (lo, hi) = if t >= 0.0 { (0.0, t) } else { (t, 0.0) };
    let mut cuts = vec![lo];
    for p in mu_breakpoints(model) {
        if p > lo + 1e-14 && p < hi - 1e-14 {
            cuts.push(p);
        }
    }
    cuts.push(hi);
    cuts.sort_by(f64::total_cmp);
    let integrand = |r: f64| mu_gderiv(model, r).map(|d| d.max(0.0).sqrt()).unwrap_or(0.0);
    let mut nu = 0.0;
    for pair in cuts.windows(2) {
        nu += adaptive_simpson(&integrand, pair[0], pair[1], 1e-11, 30);
    }
    if t < 0.0 {
        nu = -nu;
    }
    Ok((mu, rho, nu))
}
