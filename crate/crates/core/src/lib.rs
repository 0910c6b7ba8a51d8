//! Solver library for the stationary nonlinear degenerate elliptic equation
//!
//! ```text
//!   beta(u) - div(Lambda grad zeta(u)) = f + div(F)   in Omega,
//!   zeta(u) = 0                                       on the boundary,
//! ```
//!
//! discretised by mass-lumped gradient discretisations: conforming P^k
//! finite elements (1D k = 1..3, 2D k = 1..2 on triangles) and SIPG
//! discontinuous Galerkin (1D), where the function reconstruction is
//! piecewise constant on a node-indexed partition so that nonlinearities
//! commute with it. The crate also ships the manufactured porous-medium
//! and Stefan test problems and the convergence-rate benchmark driver
//! behind the `gdml` binary.

pub mod conforming;
pub mod driver;
pub mod gd;
pub mod linalg;
pub mod mesh;
pub mod metrics;
pub mod model;
pub mod quadrature;
pub mod rng;
pub mod solver;
pub mod system;
pub mod testcases;

pub use gd::GradientDiscretisation;
pub use mesh::{Mesh1d, Mesh2d};
// pub use metrics::{ErrorReport, RegressionFit};
pub use model::{NonlinearModel, Nonlinearity};
pub use quadrature::LumpingRule;
// pub use solver::{SolveResult, SolverConfig};
// pub use system::DiscreteSystem;
// pub use testcases::TestCase;
