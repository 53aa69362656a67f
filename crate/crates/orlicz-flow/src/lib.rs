//! Doubly nonlinear gradient flows on finite grids.
//!
//! The crate solves evolution inclusions of the form
//! `∂φ_{t,u}(u′) + ∂E_t(u) ∋ 0` by the minimizing-movement scheme: each step
//! minimizes `τ·φ(tₙ, Uⁿ⁻¹; (U − Uⁿ⁻¹)/τ) + E(tₙ, U)` over grid functions `U`.
//! Around that core it provides
//!
//! * weighted discrete measures and modular integrals ([`grid`]),
//! * a catalog of convex scalar functions with exact subdifferentials,
//!   analytic and numeric Legendre transforms, and growth probes ([`convex`]),
//! * Luxemburg and Amemiya norms with Hölder and conjugate-modular checks ([`norms`]),
//! * dissipation potentials and energy functionals built from the catalog
//!   ([`dissipation`], [`energy`]),
//! * the implicit solver with constant/affine/variational interpolants ([`solver`]),
//! * an energy-dissipation-balance verifier that classifies trajectories as
//!   energy or Lyapunov solutions ([`edb`]),
//! * a one-dimensional Allen–Cahn/Gurtin assembly with a spectral reference
//!   solution for the heat benchmark ([`allen_cahn`]),
//! * JSON-configured experiment presets and report writers behind the
//!   `orlicz-flow` binary ([`config`], [`runner`]).

// validation guards are written `!(x > 0.0)` on purpose: the negation makes
// NaN fail the check, which `x <= 0.0` would silently accept
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod allen_cahn;
pub mod check;
pub mod config;
pub mod convex;
pub mod dissipation;
pub mod edb;
pub mod energy;
mod error;
pub mod grid;
pub mod norms;
pub mod runner;
pub mod solver;

pub use crate::convex::{ConvexScalarFn, Delta2Report, SubdiffInterval, SuperlinearityReport};
pub use crate::dissipation::{DissipationPotential, TimeScale};
pub use crate::edb::{Classification, EdbReport, IntervalResidual};
pub use crate::energy::EnergyFunctional;
pub use crate::error::{Error, Result};
pub use crate::grid::{integrate, make_grid, GridFunction, GridMeasure};
pub use crate::norms::{amemiya_norm, luxemburg_norm, modular, OrliczIntegrand};
pub use crate::solver::{DiscreteSolution, Interpolant, Partition, StepDiagnostics, Tolerances};
