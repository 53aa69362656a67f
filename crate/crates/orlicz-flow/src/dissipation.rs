//! Dissipation potentials `φ_{t,u}(v)`: modular integrals of catalog
//! densities in the rate variable, optionally modulated by a positive
//! time scaling.
//!
//! The state slot `u` is part of the API (potentials may depend on the
//! current state) but the catalog kinds here do not read it; they validate
//! its shape and otherwise ignore it.

use std::sync::Arc;

use crate::convex::{ConvexScalarFn, SubdiffInterval};
use crate::error::{Error, Result};
use crate::grid::{integrate, GridMeasure};
use crate::norms::OrliczIntegrand;

type TimeFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// A C¹ positive scalar time scaling `a(t)`.
#[derive(Clone)]
pub enum TimeScale {
    Constant(f64),
    /// `base + rate·t`
    Affine { base: f64, rate: f64 },
    /// `exp(rate·t)`
    Exp { rate: f64 },
    /// User-supplied value and (optional) derivative; without a derivative a
    /// central difference with step `1e-6` is used.
    Custom { f: TimeFn, df: Option<TimeFn> },
}

impl TimeScale {
    pub fn value(&self, t: f64) -> f64 {
        match self {
            TimeScale::Constant(c) => *c,
            TimeScale::Affine { base, rate } => base + rate * t,
            TimeScale::Exp { rate } => (rate * t).exp(),
            TimeScale::Custom { f, .. } => f(t),
        }
    }

    pub fn derivative(&self, t: f64) -> f64 {
        match self {
            TimeScale::Constant(_) => 0.0,
            TimeScale::Affine { rate, .. } => *rate,
            TimeScale::Exp { rate } => rate * (rate * t).exp(),
            TimeScale::Custom { f, df } => match df {
                Some(d) => d(t),
                None => {
                    let h = 1e-6 * t.abs().max(1.0);
                    (f(t + h) - f(t - h)) / (2.0 * h)
                }
            },
        }
    }
}

impl std::fmt::Debug for TimeScale {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            TimeScale::Constant(c) => write!(f, "Constant({c})"),
            TimeScale::Affine { base, rate } => write!(f, "Affine({base} + {rate} t)"),
            TimeScale::Exp { rate } => write!(f, "Exp({rate} t)"),
            TimeScale::Custom { .. } => write!(f, "Custom"),
        }
    }
}

/// A dissipation potential over a fixed grid: `φ_t(v) = a(t)·Σ wᵢ fᵢ(vᵢ)`
/// with per-node convex densities and cached conjugates.
#[derive(Debug, Clone)]
pub struct DissipationPotential {
    per_node: Vec<ConvexScalarFn>,
    conj_per_node: Vec<ConvexScalarFn>,
    scale: Option<TimeScale>,
    grid: GridMeasure,
    label: String,
}

impl DissipationPotential {
    /// Autonomous nodewise potential from an integrand family.
    pub fn autonomous_nodewise(phi: OrliczIntegrand) -> Result<Self> {
        Self::build(phi, None, "autonomous_nodewise")
    }

    /// Superlinear kinetic potential `v·asinh(v) − √(v²+1) + 1` at every node.
    pub fn bp(grid: GridMeasure) -> Self {
        let phi = OrliczIntegrand::uniform(ConvexScalarFn::bp_primal(), grid);
        Self::build(phi, None, "bp").expect("catalog conjugates are analytic")
    }

    /// Unidirectional quadratic potential (rates constrained to `v ≤ 0`).
    pub fn damage(grid: GridMeasure) -> Self {
        let phi = OrliczIntegrand::uniform(ConvexScalarFn::damage_primal(), grid);
        Self::build(phi, None, "damage").expect("catalog conjugates are analytic")
    }

    /// `a(t)·base(v)` with a positive C¹ scaling.
    pub fn time_modulated(phi: OrliczIntegrand, scale: TimeScale) -> Result<Self> {
        if !(scale.value(0.0) > 0.0) {
            return Err(Error::Domain(format!(
                "time scaling must be positive, a(0) = {}",
                scale.value(0.0)
            )));
        }
        Self::build(phi, Some(scale), "time_modulated")
    }

    fn build(phi: OrliczIntegrand, scale: Option<TimeScale>, label: &str) -> Result<Self> {
        let conj = phi.conjugate()?;
        let grid = phi.grid().clone();
        let n = phi.node_count();
        let per_node = (0..n).map(|i| phi.node_fn(i).clone()).collect();
        let conj_per_node = (0..n).map(|i| conj.node_fn(i).clone()).collect();
        Ok(DissipationPotential {
            per_node,
            conj_per_node,
            scale,
            grid,
            label: label.into(),
        })
    }

    pub fn grid(&self) -> &GridMeasure {
        &self.grid
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn node_fn(&self, i: usize) -> &ConvexScalarFn {
        &self.per_node[i]
    }

    pub fn conj_node_fn(&self, i: usize) -> &ConvexScalarFn {
        &self.conj_per_node[i]
    }

    pub fn is_time_dependent(&self) -> bool {
        !matches!(self.scale, None | Some(TimeScale::Constant(_)))
    }

    /// The scaling factor `a(t)` (1 for autonomous potentials).
    pub fn scale_at(&self, t: f64) -> f64 {
        self.scale.as_ref().map_or(1.0, |s| s.value(t))
    }

    fn check_slots(&self, t: f64, u: &[f64]) -> Result<f64> {
        if !t.is_finite() {
            return Err(Error::Domain(format!("potential time {t}")));
        }
        self.grid.check_len(u)?;
        let a = self.scale_at(t);
        if !(a > 0.0) || !a.is_finite() {
            return Err(Error::Domain(format!("time scaling a({t}) = {a}")));
        }
        Ok(a)
    }

    /// `φ_{t,u}(v) = a(t)·Σ wᵢ fᵢ(vᵢ)` (extended-real).
    pub fn eval_primal(&self, t: f64, u: &[f64], v: &[f64]) -> Result<f64> {
        let a = self.check_slots(t, u)?;
        self.grid.check_len(v)?;
        let vals: Vec<f64> = v
            .iter()
            .enumerate()
            .map(|(i, x)| self.per_node[i].eval(*x))
            .collect();
        Ok(a * integrate(&vals, &self.grid)?)
    }

    /// Convex conjugate in the rate slot: `φ*_{t,u}(ξ) = Σ wᵢ a·fᵢ*(ξᵢ/a)`.
    pub fn eval_conjugate(&self, t: f64, u: &[f64], xi: &[f64]) -> Result<f64> {
        let a = self.check_slots(t, u)?;
        self.grid.check_len(xi)?;
        let vals: Vec<f64> = xi
            .iter()
            .enumerate()
            .map(|(i, x)| a * self.conj_per_node[i].eval(*x / a))
            .collect();
        integrate(&vals, &self.grid)
    }

    /// Minimal-norm selection `v ∈ ∂φ*_{t,u}(ξ)`, the rate reconstructed
    /// from a multiplier. Errors when some `ξᵢ` lies outside the conjugate's
    /// domain.
    pub fn invert_subdifferential(&self, t: f64, u: &[f64], xi: &[f64]) -> Result<Vec<f64>> {
        let a = self.check_slots(t, u)?;
        self.grid.check_len(xi)?;
        let mut v = Vec::with_capacity(xi.len());
        for (i, x) in xi.iter().enumerate() {
            // d/dξ [a f*(ξ/a)] = f*'(ξ/a)
            let s = self.conj_per_node[i].subdifferential(*x / a);
            if s.is_empty() {
                return Err(Error::Domain(format!(
                    "multiplier {x} outside the conjugate domain at node {i}"
                )));
            }
            v.push(s.minimal_norm());
        }
        Ok(v)
    }

    /// Scaled subdifferential of the primal density at one node:
    /// `∂_v [a(t) fᵢ(v)]`.
    pub fn primal_subdiff(&self, t: f64, node: usize, v: f64) -> SubdiffInterval {
        let a = self.scale_at(t);
        let s = self.per_node[node].subdifferential(v);
        if s.is_empty() {
            s
        } else {
            SubdiffInterval {
                lo: a * s.lo,
                hi: a * s.hi,
            }
        }
    }

    /// Scaled second derivative of the primal density where available.
    pub(crate) fn primal_second_derivative(&self, t: f64, node: usize, v: f64) -> Option<f64> {
        let a = self.scale_at(t);
        self.per_node[node].second_derivative(v).map(|d| a * d)
    }

    /// Effective rate domain at one node (scaled densities share the
    /// underlying domain).
    pub fn rate_domain(&self, node: usize) -> (f64, f64) {
        self.per_node[node].domain()
    }
}
