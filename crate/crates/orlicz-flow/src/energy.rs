//! Energy functionals `E_t(u)` over a fixed grid.
//!
//! The catalog covers μ-weighted quadratic wells, double wells, discrete
//! Dirichlet (gradient) integrands with Neumann-style boundary closure,
//! linear tilts, sums, and C¹ positive time scalings of any of these.
//! Every functional carries an additive `offset` (default 1) so configured
//! energies stay bounded below by a positive constant.
//!
//! Gradients are μ-weighted: `gradient` returns the vector `ξ` with
//! `d/ds E(u + s e) = Σ wᵢ ξᵢ eᵢ`, i.e. the coordinate derivative divided
//! by the node weight.

use crate::convex::ConvexScalarFn;
use crate::dissipation::TimeScale;
use crate::error::{Error, Result};
use crate::grid::{integrate, GridMeasure};

#[derive(Debug, Clone)]
enum Kind {
    /// `λ/2 ∫ u² dμ`
    Quadratic { lambda: f64 },
    /// `scale ∫ (u²−1)²/4 dμ`
    DoubleWell { scale: f64 },
    /// `Σⱼ h·β((u_{j+1} − u_j)/h)` over the n−1 links of an interval grid.
    GradientIntegrand { beta: ConvexScalarFn, h: f64 },
    /// `∫ slope·u dμ`
    Linear { slope: Vec<f64> },
    Composite { parts: Vec<EnergyFunctional> },
    TimeScaled {
        base: Box<EnergyFunctional>,
        scale: TimeScale,
    },
}

/// A lower-semicontinuous energy over a fixed grid, time-dependent only
/// through C¹ positive scalings.
#[derive(Debug, Clone)]
pub struct EnergyFunctional {
    kind: Kind,
    grid: GridMeasure,
    offset: f64,
}

impl EnergyFunctional {
    pub fn quadratic(grid: GridMeasure, lambda: f64) -> Result<Self> {
        if !(lambda >= 0.0) || !lambda.is_finite() {
            return Err(Error::Domain(format!(
                "quadratic coefficient {lambda} (need λ ≥ 0)"
            )));
        }
        Ok(EnergyFunctional {
            kind: Kind::Quadratic { lambda },
            grid,
            offset: 1.0,
        })
    }

    pub fn double_well(grid: GridMeasure, scale: f64) -> Result<Self> {
        if !(scale >= 0.0) || !scale.is_finite() {
            return Err(Error::Domain(format!(
                "double-well scale {scale} (need scale ≥ 0)"
            )));
        }
        Ok(EnergyFunctional {
            kind: Kind::DoubleWell { scale },
            grid,
            offset: 1.0,
        })
    }

    /// Discrete p-Dirichlet energy: `gradient_integrand` with `β = |·|^p/p`.
    pub fn p_dirichlet(grid: GridMeasure, p: f64, h: f64) -> Result<Self> {
        Self::gradient_integrand(grid, ConvexScalarFn::power(p)?, h)
    }

    /// General gradient integrand `Σⱼ h·β(Dⱼu)` with forward differences
    /// `Dⱼu = (u_{j+1} − u_j)/h`. The omitted boundary links amount to a
    /// zero-flux (Neumann) closure.
    pub fn gradient_integrand(grid: GridMeasure, beta: ConvexScalarFn, h: f64) -> Result<Self> {
        if grid.node_count() < 2 {
            return Err(Error::Domain(
                "gradient integrand needs at least 2 nodes".into(),
            ));
        }
        if !(h > 0.0) || !h.is_finite() {
            return Err(Error::Domain(format!("link length {h} (need h > 0)")));
        }
        Ok(EnergyFunctional {
            kind: Kind::GradientIntegrand { beta, h },
            grid,
            offset: 1.0,
        })
    }

    pub fn linear(grid: GridMeasure, slope: Vec<f64>) -> Result<Self> {
        grid.check_len(&slope)?;
        Ok(EnergyFunctional {
            kind: Kind::Linear { slope },
            grid,
            offset: 1.0,
        })
    }

    /// Sum of energies on one common grid; the parts keep their own offsets.
    pub fn composite(parts: Vec<EnergyFunctional>) -> Result<Self> {
        let first = parts
            .first()
            .ok_or_else(|| Error::Domain("empty composite".into()))?;
        let grid = first.grid.clone();
        for p in &parts[1..] {
            if p.grid != grid {
                return Err(Error::Domain(
                    "composite parts must share one grid".into(),
                ));
            }
        }
        Ok(EnergyFunctional {
            kind: Kind::Composite { parts },
            grid,
            offset: 1.0,
        })
    }

    /// `a(t)·base + offset` with a positive C¹ scaling.
    pub fn time_scaled(base: EnergyFunctional, scale: TimeScale) -> Result<Self> {
        if !(scale.value(0.0) > 0.0) {
            return Err(Error::Domain(format!(
                "energy time scaling must be positive, a(0) = {}",
                scale.value(0.0)
            )));
        }
        let grid = base.grid.clone();
        Ok(EnergyFunctional {
            kind: Kind::TimeScaled {
                base: Box::new(base),
                scale,
            },
            grid,
            offset: 1.0,
        })
    }

    /// Replaces the additive offset (constructors default to 1).
    pub fn with_offset(mut self, offset: f64) -> Self {
        self.offset = offset;
        self
    }

    pub fn offset(&self) -> f64 {
        self.offset
    }

    pub fn grid(&self) -> &GridMeasure {
        &self.grid
    }

    pub fn is_time_dependent(&self) -> bool {
        match &self.kind {
            Kind::TimeScaled { base, scale } => {
                !matches!(scale, TimeScale::Constant(_)) || base.is_time_dependent()
            }
            Kind::Composite { parts } => parts.iter().any(|p| p.is_time_dependent()),
            _ => false,
        }
    }

    /// `E_t(u)` (extended-real).
    pub fn energy_value(&self, t: f64, u: &[f64]) -> Result<f64> {
        self.grid.check_len(u)?;
        let v = match &self.kind {
            Kind::Quadratic { lambda } => {
                let sq: Vec<f64> = u.iter().map(|x| x * x).collect();
                0.5 * lambda * integrate(&sq, &self.grid)?
            }
            Kind::DoubleWell { scale } => {
                let well: Vec<f64> = u
                    .iter()
                    .map(|x| {
                        let d = x * x - 1.0;
                        0.25 * d * d
                    })
                    .collect();
                scale * integrate(&well, &self.grid)?
            }
            Kind::GradientIntegrand { beta, h } => {
                let mut sum = 0.0;
                let mut inf = false;
                for j in 0..u.len() - 1 {
                    let b = beta.eval((u[j + 1] - u[j]) / h);
                    if b.is_infinite() {
                        inf = true;
                    } else {
                        sum += h * b;
                    }
                }
                if inf {
                    f64::INFINITY
                } else {
                    sum
                }
            }
            Kind::Linear { slope } => {
                let prods: Vec<f64> = slope.iter().zip(u).map(|(s, x)| s * x).collect();
                integrate(&prods, &self.grid)?
            }
            Kind::Composite { parts } => {
                let mut sum = 0.0;
                for p in parts {
                    sum += p.energy_value(t, u)?;
                }
                sum
            }
            Kind::TimeScaled { base, scale } => scale.value(t) * base.energy_value(t, u)?,
        };
        Ok(v + self.offset)
    }

    /// μ-weighted gradient; at kinks of a gradient integrand the minimal-norm
    /// subgradient selection is used. Errors when the energy is `+∞` at `u`.
    pub fn gradient(&self, t: f64, u: &[f64]) -> Result<Vec<f64>> {
        self.grid.check_len(u)?;
        match &self.kind {
            Kind::Quadratic { lambda } => Ok(u.iter().map(|x| lambda * x).collect()),
            Kind::DoubleWell { scale } => {
                Ok(u.iter().map(|x| scale * (x * x - 1.0) * x).collect())
            }
            Kind::GradientIntegrand { beta, h } => {
                let n = u.len();
                let mut slopes = Vec::with_capacity(n - 1);
                for j in 0..n - 1 {
                    let d = (u[j + 1] - u[j]) / h;
                    let s = beta.subdifferential(d);
                    if s.is_empty() {
                        return Err(Error::Domain(format!(
                            "gradient undefined: link {j} difference {d} outside the integrand domain"
                        )));
                    }
                    slopes.push(s.minimal_norm());
                }
                let w = self.grid.weights();
                let mut g = vec![0.0; n];
                for i in 0..n {
                    let from_left = if i > 0 { slopes[i - 1] } else { 0.0 };
                    let from_right = if i < n - 1 { slopes[i] } else { 0.0 };
                    g[i] = (from_left - from_right) / w[i];
                }
                Ok(g)
            }
            Kind::Linear { slope } => Ok(slope.clone()),
            Kind::Composite { parts } => {
                let mut g = vec![0.0; u.len()];
                for p in parts {
                    for (gi, pi) in g.iter_mut().zip(p.gradient(t, u)?) {
                        *gi += pi;
                    }
                }
                Ok(g)
            }
            Kind::TimeScaled { base, scale } => {
                let a = scale.value(t);
                Ok(base.gradient(t, u)?.into_iter().map(|x| a * x).collect())
            }
        }
    }

    /// Partial time derivative `∂_t E_t(u)`; the multiplier slot is part of
    /// the API for state-coupled extensions and is only shape-checked here.
    pub fn time_slope(&self, t: f64, u: &[f64], xi: &[f64]) -> Result<f64> {
        self.grid.check_len(u)?;
        self.grid.check_len(xi)?;
        self.time_slope_inner(t, u)
    }

    fn time_slope_inner(&self, t: f64, u: &[f64]) -> Result<f64> {
        match &self.kind {
            Kind::TimeScaled { base, scale } => Ok(scale.derivative(t) * base.energy_value(t, u)?
                + scale.value(t) * base.time_slope_inner(t, u)?),
            Kind::Composite { parts } => {
                let mut sum = 0.0;
                for p in parts {
                    sum += p.time_slope_inner(t, u)?;
                }
                Ok(sum)
            }
            _ => Ok(0.0),
        }
    }

    /// Largest curvature defect `Λ(t)`: `E + Λ/2‖·‖²_μ` is convex. Zero for
    /// the convex kinds; `scale` for the double well (its second derivative
    /// is bounded below by `−scale`).
    pub fn semiconvexity(&self, t: f64) -> f64 {
        match &self.kind {
            Kind::DoubleWell { scale } => *scale,
            Kind::Composite { parts } => parts.iter().map(|p| p.semiconvexity(t)).sum(),
            Kind::TimeScaled { base, scale } => scale.value(t) * base.semiconvexity(t),
            _ => 0.0,
        }
    }

    /// Sampled `sup_{s ∈ [t0, t1]} E_s(u)` on 129 points including the
    /// endpoints (exact for autonomous energies and monotone scalings).
    pub fn gronwall_envelope(&self, t0: f64, t1: f64, u: &[f64]) -> Result<f64> {
        if !(t0 <= t1) || !t0.is_finite() || !t1.is_finite() {
            return Err(Error::Domain(format!("envelope interval [{t0}, {t1}]")));
        }
        if !self.is_time_dependent() {
            return self.energy_value(t0, u);
        }
        let mut sup = f64::NEG_INFINITY;
        const SAMPLES: usize = 129;
        for k in 0..SAMPLES {
            let t = t0 + (t1 - t0) * k as f64 / (SAMPLES - 1) as f64;
            sup = sup.max(self.energy_value(t, u)?);
        }
        Ok(sup)
    }

    /// Whether `E` splits as `Σᵢ wᵢ eᵢ(uᵢ) + const` (enables the exact
    /// nodewise step solver).
    pub fn is_nodewise_separable(&self) -> bool {
        match &self.kind {
            Kind::Quadratic { .. } | Kind::DoubleWell { .. } | Kind::Linear { .. } => true,
            Kind::GradientIntegrand { .. } => false,
            Kind::Composite { parts } => parts.iter().all(|p| p.is_nodewise_separable()),
            Kind::TimeScaled { base, .. } => base.is_nodewise_separable(),
        }
    }

    /// Derivative of the density `eᵢ(s)` of a separable energy.
    pub(crate) fn nodewise_grad(&self, t: f64, i: usize, s: f64) -> f64 {
        match &self.kind {
            Kind::Quadratic { lambda } => lambda * s,
            Kind::DoubleWell { scale } => scale * (s * s - 1.0) * s,
            Kind::Linear { slope } => slope[i],
            Kind::Composite { parts } => parts.iter().map(|p| p.nodewise_grad(t, i, s)).sum(),
            Kind::TimeScaled { base, scale } => scale.value(t) * base.nodewise_grad(t, i, s),
            Kind::GradientIntegrand { .. } => f64::NAN,
        }
    }

    // the node index mirrors nodewise_grad's signature; only the linear kind
    // reads it there, and no current kind has a node-dependent curvature
    #[allow(clippy::only_used_in_recursion)]
    pub(crate) fn nodewise_second(&self, t: f64, i: usize, s: f64) -> f64 {
        match &self.kind {
            Kind::Quadratic { lambda } => *lambda,
            Kind::DoubleWell { scale } => scale * (3.0 * s * s - 1.0),
            Kind::Linear { .. } => 0.0,
            Kind::Composite { parts } => parts.iter().map(|p| p.nodewise_second(t, i, s)).sum(),
            Kind::TimeScaled { base, scale } => scale.value(t) * base.nodewise_second(t, i, s),
            Kind::GradientIntegrand { .. } => f64::NAN,
        }
    }
}
