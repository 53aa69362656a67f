//! One-dimensional Allen–Cahn/Gurtin assembly.
//!
//! A problem couples a kinetic density `α` (penalizing the rate), a gradient
//! density `β` (penalizing forward differences, zero-flux boundary), and a
//! double-well term on a uniformly labeled interval grid. `assemble` turns it
//! into the potential/energy pair consumed by the step solver. The quadratic
//! specialization `α = β = |·|²/2`, well 0 is the semi-discrete Neumann heat
//! equation, for which [`reference_heat`] provides a spectral solution.

use std::f64::consts::PI;

use crate::convex::{ConvexScalarFn, DEFAULT_THETA_SEQ};
use crate::dissipation::DissipationPotential;
use crate::energy::EnergyFunctional;
use crate::error::{Error, Result};
use crate::grid::GridMeasure;
use crate::norms::OrliczIntegrand;

/// Problem data: grid with uniform labels on `[0, L]`, kinetic density `α`,
/// gradient density `β`, double-well coefficient, and initial state.
#[derive(Debug, Clone)]
pub struct ACGurtinProblem {
    pub spatial_grid: GridMeasure,
    pub alpha: ConvexScalarFn,
    pub beta: ConvexScalarFn,
    pub well: f64,
    pub u0: Vec<f64>,
}

/// Assembly output. `beta_superlinear = false` flags linear-growth gradient
/// densities (total-variation-like configurations are accepted but noted).
#[derive(Debug, Clone)]
pub struct AssembledProblem {
    pub potential: DissipationPotential,
    pub energy: EnergyFunctional,
    pub beta_superlinear: bool,
}

impl ACGurtinProblem {
    /// Builds the dissipation potential `∫ α(v) dμ` and the energy
    /// `Σⱼ h·β(Dⱼu) + well·∫ (u²−1)²/4 dμ + 1`.
    pub fn assemble(&self) -> Result<AssembledProblem> {
        let h = self.spatial_grid.uniform_spacing().ok_or_else(|| {
            Error::Config("spatial grid must carry uniformly spaced labels".into())
        })?;
        if self.u0.len() != self.spatial_grid.node_count() {
            return Err(Error::Config(format!(
                "initial state has {} nodes, the grid {}",
                self.u0.len(),
                self.spatial_grid.node_count()
            )));
        }
        if !(self.well >= 0.0) || !self.well.is_finite() {
            return Err(Error::Config(format!(
                "well coefficient {} (need ≥ 0)",
                self.well
            )));
        }
        let coercivity = self.beta.coercivity_probe(1.0)?;
        if !(coercivity > 0.0) {
            return Err(Error::Config(format!(
                "gradient density is not coercive: min(β(1), β(−1)) = {coercivity} (need > 0)"
            )));
        }
        let beta_superlinear = self
            .beta
            .superlinearity_probe(1.0, &DEFAULT_THETA_SEQ)?
            .superlinear;
        let phi = OrliczIntegrand::uniform(self.alpha.clone(), self.spatial_grid.clone());
        let potential = DissipationPotential::autonomous_nodewise(phi)?;
        let gradient_term =
            EnergyFunctional::gradient_integrand(self.spatial_grid.clone(), self.beta.clone(), h)?
                .with_offset(0.0);
        let well_term =
            EnergyFunctional::double_well(self.spatial_grid.clone(), self.well)?.with_offset(0.0);
        let energy = EnergyFunctional::composite(vec![gradient_term, well_term])?;
        Ok(AssembledProblem {
            potential,
            energy,
            beta_superlinear,
        })
    }
}

/// Spectral Neumann heat solution on `[0, length]` sampled at the `n` nodes
/// of `u0`: `Σₖ aₖ e^{−(kπ/L)²t} cos(kπx/L)` for `k = 0 … modes` (capped at
/// the grid's Nyquist index `n−1`), with coefficients from the
/// trapezoid-weighted cosine projection of `u0` (exactly orthogonal on a
/// uniform grid).
pub fn reference_heat(u0: &[f64], length: f64, t: f64, modes: usize) -> Result<Vec<f64>> {
    let n = u0.len();
    if n < 2 {
        return Err(Error::Domain(format!("need at least 2 nodes, got {n}")));
    }
    if !(length > 0.0) || !length.is_finite() {
        return Err(Error::Domain(format!("interval length {length}")));
    }
    if !t.is_finite() {
        return Err(Error::Domain(format!("time {t}")));
    }
    if modes == 0 {
        return Err(Error::Domain("need at least one mode".into()));
    }
    let h = length / (n - 1) as f64;
    let weight = |i: usize| if i == 0 || i == n - 1 { 0.5 * h } else { h };
    let mut out = vec![0.0; n];
    for k in 0..=modes.min(n - 1) {
        let basis: Vec<f64> = (0..n)
            .map(|i| (k as f64 * PI * i as f64 / (n - 1) as f64).cos())
            .collect();
        let mut num = 0.0;
        let mut den = 0.0;
        for i in 0..n {
            num += weight(i) * u0[i] * basis[i];
            den += weight(i) * basis[i] * basis[i];
        }
        let amp = num / den * (-(k as f64 * PI / length).powi(2) * t).exp();
        for (o, b) in out.iter_mut().zip(&basis) {
            *o += amp * b;
        }
    }
    Ok(out)
}
