//! Energy-dissipation-balance verification.
//!
//! For a trajectory `U⁰ … U^N` with multipliers `ξⁿ` on nodes
//! `t₀ < … < t_N`, each interval is scored by the residual
//!
//! ```text
//! rₙ = τₙ·φ(vⁿ) + τₙ·φ*(ξⁿ) + E(tₙ,Uⁿ) − E(tₙ₋₁,Uⁿ⁻¹) − τₙ·∂ₜE(tₙ₋₁,Uⁿ⁻¹)
//! ```
//!
//! (`vⁿ` the difference quotient, the power integral approximated by the
//! left-endpoint rectangle). A trajectory is classified as an *energy*
//! solution when every `|rₙ|` and the cumulative residual stay within the
//! tolerance, as a *Lyapunov* solution when the residuals are only bounded
//! above (dissipation may exceed the measured energy drop, never the other
//! way), and *neither* otherwise. Exactly solved minimizing-movement steps
//! of convex autonomous problems have `rₙ ≤ 0` with `|rₙ| = O(τₙ²)`, so
//! they classify as Lyapunov at practical tolerances and approach energy
//! balance under refinement.

use serde::{Deserialize, Serialize};

use crate::dissipation::DissipationPotential;
use crate::energy::EnergyFunctional;
use crate::error::{Error, Result};
use crate::grid::integrate;
use crate::solver::DiscreteSolution;

/// `1e-6 + 1e-8·|E(t₀, U⁰)|`: an absolute floor plus a relative part.
pub fn default_tolerance(initial_energy: f64) -> f64 {
    1e-6 + 1e-8 * initial_energy.abs()
}

/// Fenchel–Young gap `φ(v) + φ*(−ξ) − ∫(−ξ)·v dμ ≥ 0` of a rate `v`
/// against an energy-gradient selection `ξ ∈ ∂E`. Zero (up to rounding)
/// exactly when `−ξ ∈ ∂φ(v)`. Rounding can push the raw value slightly
/// negative; it is clamped at 0, and a clamp beyond rounding magnitude
/// (which would mean the conjugate pair is inconsistent) is an error.
pub fn fenchel_young_gap(
    pot: &DissipationPotential,
    t: f64,
    u: &[f64],
    v: &[f64],
    xi: &[f64],
) -> Result<f64> {
    let neg: Vec<f64> = xi.iter().map(|x| -x).collect();
    let primal = pot.eval_primal(t, u, v)?;
    let dual = pot.eval_conjugate(t, u, &neg)?;
    if primal.is_infinite() || dual.is_infinite() {
        return Ok(f64::INFINITY);
    }
    let prods: Vec<f64> = neg.iter().zip(v).map(|(a, b)| a * b).collect();
    let raw = primal + dual - integrate(&prods, pot.grid())?;
    let guard = 1e-8 * (1.0 + primal.abs() + dual.abs());
    if raw < -guard {
        return Err(Error::Numeric(format!(
            "gap clamp magnitude {:.3e} exceeds rounding tolerance {guard:.3e}",
            -raw
        )));
    }
    Ok(raw.max(0.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Classification {
    Energy,
    Lyapunov,
    Neither,
}

/// One interval's balance sheet; all terms already carry the factor `τₙ`.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct IntervalResidual {
    pub t_start: f64,
    pub t_end: f64,
    pub dissipation_primal: f64,
    pub dissipation_dual: f64,
    pub energy_drop: f64,
    pub p_integral: f64,
    pub residual: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EdbReport {
    pub tol_used: f64,
    pub classification: Classification,
    pub cumulative_residual: f64,
    pub max_interval_residual: f64,
    pub max_abs_interval_residual: f64,
    /// `E(tₙ, Uⁿ)` at every node.
    pub energies: Vec<f64>,
    /// Per-step Fenchel–Young gaps of `(vⁿ, ξⁿ)`.
    pub fy_gaps: Vec<f64>,
    pub per_interval: Vec<IntervalResidual>,
}

/// Scores a computed trajectory; `tol = None` uses [`default_tolerance`].
pub fn edb_report(sol: &DiscreteSolution, tol: Option<f64>) -> Result<EdbReport> {
    edb_report_from_parts(
        sol.potential(),
        sol.energy(),
        sol.partition().nodes(),
        sol.states(),
        sol.multipliers(),
        tol,
    )
}

/// Scores trajectory data directly (e.g. re-read from a report); the nodes
/// must be strictly increasing but need not be uniform.
pub fn edb_report_from_parts(
    pot: &DissipationPotential,
    energy: &EnergyFunctional,
    t_nodes: &[f64],
    states: &[Vec<f64>],
    multipliers: &[Vec<f64>],
    tol: Option<f64>,
) -> Result<EdbReport> {
    if t_nodes.is_empty() || states.len() != t_nodes.len() {
        return Err(Error::ShapeMismatch {
            expected: t_nodes.len().max(1),
            got: states.len(),
        });
    }
    if multipliers.len() + 1 != t_nodes.len() {
        return Err(Error::ShapeMismatch {
            expected: t_nodes.len() - 1,
            got: multipliers.len(),
        });
    }
    for pair in t_nodes.windows(2) {
        if !(pair[1] > pair[0]) {
            return Err(Error::Domain(format!(
                "nodes must increase strictly: {} then {}",
                pair[0], pair[1]
            )));
        }
    }
    let mut energies = Vec::with_capacity(t_nodes.len());
    for (t, u) in t_nodes.iter().zip(states) {
        let e = energy.energy_value(*t, u)?;
        if !e.is_finite() {
            return Err(Error::Domain(format!(
                "energy at t = {t} is not finite ({e})"
            )));
        }
        energies.push(e);
    }
    let tol_used = tol.unwrap_or_else(|| default_tolerance(energies[0]));
    if !(tol_used > 0.0) {
        return Err(Error::Domain(format!("tolerance {tol_used} (need > 0)")));
    }

    let steps = multipliers.len();
    let mut per_interval = Vec::with_capacity(steps);
    let mut fy_gaps = Vec::with_capacity(steps);
    let mut cumulative = 0.0f64;
    let mut max_r = f64::NEG_INFINITY;
    let mut max_abs = 0.0f64;
    for n in 1..=steps {
        let t_start = t_nodes[n - 1];
        let t_end = t_nodes[n];
        let tau = t_end - t_start;
        let u_prev = &states[n - 1];
        let u = &states[n];
        let xi = &multipliers[n - 1];
        let v: Vec<f64> = u.iter().zip(u_prev).map(|(a, b)| (a - b) / tau).collect();
        let primal = pot.eval_primal(t_end, u_prev, &v)?;
        let dual = pot.eval_conjugate(t_end, u_prev, xi)?;
        let gap = if primal.is_infinite() || dual.is_infinite() {
            f64::INFINITY
        } else {
            let prods: Vec<f64> = xi.iter().zip(&v).map(|(a, b)| a * b).collect();
            primal + dual - integrate(&prods, pot.grid())?
        };
        fy_gaps.push(gap);
        let dissipation_primal = tau * primal;
        let dissipation_dual = tau * dual;
        let energy_drop = energies[n] - energies[n - 1];
        let p_integral = tau * energy.time_slope(t_start, u_prev, xi)?;
        let residual = dissipation_primal + dissipation_dual + energy_drop - p_integral;
        cumulative += residual;
        max_r = max_r.max(residual);
        max_abs = max_abs.max(residual.abs());
        per_interval.push(IntervalResidual {
            t_start,
            t_end,
            dissipation_primal,
            dissipation_dual,
            energy_drop,
            p_integral,
            residual,
        });
    }
    if steps == 0 {
        max_r = 0.0;
    }

    let classification = if max_abs <= tol_used && cumulative.abs() <= tol_used {
        Classification::Energy
    } else if max_r <= tol_used && cumulative <= tol_used {
        Classification::Lyapunov
    } else {
        Classification::Neither
    };
    Ok(EdbReport {
        tol_used,
        classification,
        cumulative_residual: cumulative,
        max_interval_residual: max_r,
        max_abs_interval_residual: max_abs,
        energies,
        fy_gaps,
        per_interval,
    })
}
