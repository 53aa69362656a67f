//! The minimizing-movement scheme.
//!
//! One step from `Uⁿ⁻¹` at target time `tₙ` minimizes
//!
//! ```text
//! U ↦ τ·φ_{tₙ, Uⁿ⁻¹}((U − Uⁿ⁻¹)/τ) + E_{tₙ}(U)
//! ```
//!
//! and stores the multiplier `ξⁿ = −∇E_{tₙ}(Uⁿ)`, which by optimality is a
//! selection in `∂φ_{tₙ,Uⁿ⁻¹}(vⁿ)` for the step rate `vⁿ = (Uⁿ − Uⁿ⁻¹)/τ`.
//! Nodewise-separable energies are solved per node by safeguarded Newton
//! with bisection fallback; coupled smooth energies (gradient integrands)
//! use proximal-gradient iterations whose prox is the same exact nodewise
//! scalar solver.

use crate::dissipation::DissipationPotential;
use crate::energy::EnergyFunctional;
use crate::error::{Error, Result};
use crate::grid::integrate;

/// Uniform time grid on `[0, t_end]` with `steps` intervals; nodes are
/// computed as `t_end·n/steps`, so the endpoint is exact and the spacing is
/// uniform to machine precision.
#[derive(Debug, Clone, PartialEq)]
pub struct Partition {
    nodes: Vec<f64>,
    tau: f64,
}

impl Partition {
    pub fn uniform(t_end: f64, steps: usize) -> Result<Self> {
        if steps == 0 {
            return Err(Error::Domain("partition needs at least one step".into()));
        }
        if !(t_end > 0.0) || !t_end.is_finite() {
            return Err(Error::Domain(format!("horizon {t_end} (need T > 0)")));
        }
        let nodes = (0..=steps)
            .map(|n| t_end * n as f64 / steps as f64)
            .collect();
        Ok(Partition {
            nodes,
            tau: t_end / steps as f64,
        })
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn t_end(&self) -> f64 {
        *self.nodes.last().unwrap()
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn step_count(&self) -> usize {
        self.nodes.len() - 1
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }
}

/// Solver knobs. `inner_tol` bounds the sup-norm of the step-objective
/// optimality residual; `allow_multiminimizer` overrides the semiconvexity
/// time-step gate, accepting that the minimizer may not be unique (the
/// iterate is then seeded at the previous state).
#[derive(Debug, Clone)]
pub struct Tolerances {
    pub inner_tol: f64,
    pub max_inner_iterations: usize,
    pub semiconvexity_safety: f64,
    pub allow_multiminimizer: bool,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            inner_tol: 1e-10,
            max_inner_iterations: 100_000,
            semiconvexity_safety: 0.9,
            allow_multiminimizer: false,
        }
    }
}

/// Per-step record: the step functional value at the minimizer, the
/// Fenchel–Young gap of the pair `(vⁿ, ξⁿ)`, inner iterations spent, and the
/// Euler–Lagrange residual `‖vⁿ − v̂‖_∞` against the rate reconstructed from
/// the multiplier.
#[derive(Debug, Clone, Copy)]
pub struct StepDiagnostics {
    pub j_value: f64,
    pub fy_gap: f64,
    pub inner_iterations: usize,
    pub el_residual: f64,
}

/// Which interpolant of the discrete trajectory to evaluate.
///
/// `Left` is the left-continuous piecewise-constant interpolant (value `Uⁿ`
/// on `(tₙ₋₁, tₙ]`), `Right` the right-continuous one (value `Uⁿ⁻¹` on
/// `[tₙ₋₁, tₙ)`); `Variational` re-solves the step problem at query time `t`
/// with step length `θ = t − tₙ₋₁`. All four coincide at partition nodes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Interpolant {
    Left,
    Right,
    Affine,
    Variational,
}

/// A completed (or partial) minimizing-movement trajectory.
#[derive(Debug, Clone)]
pub struct DiscreteSolution {
    partition: Partition,
    states: Vec<Vec<f64>>,
    multipliers: Vec<Vec<f64>>,
    diagnostics: Vec<StepDiagnostics>,
    estimate_slack: Vec<f64>,
    pot: DissipationPotential,
    energy: EnergyFunctional,
    opts: Tolerances,
}

/// A failed run carrying the trajectory computed so far.
#[derive(Debug)]
pub struct SchemeFailure {
    pub error: Error,
    pub partial: DiscreteSolution,
}

impl DiscreteSolution {
    /// Reassembles a solution container from stored trajectory data (used to
    /// re-verify energy balance from written reports). Diagnostics and slack
    /// records are left empty.
    pub fn from_parts(
        pot: DissipationPotential,
        energy: EnergyFunctional,
        partition: Partition,
        states: Vec<Vec<f64>>,
        multipliers: Vec<Vec<f64>>,
        opts: Tolerances,
    ) -> Result<Self> {
        if states.len() != partition.node_count() {
            return Err(Error::ShapeMismatch {
                expected: partition.node_count(),
                got: states.len(),
            });
        }
        if multipliers.len() != partition.step_count() {
            return Err(Error::ShapeMismatch {
                expected: partition.step_count(),
                got: multipliers.len(),
            });
        }
        for u in states.iter().chain(multipliers.iter()) {
            pot.grid().check_len(u)?;
        }
        Ok(DiscreteSolution {
            partition,
            states,
            multipliers,
            diagnostics: Vec::new(),
            estimate_slack: Vec::new(),
            pot,
            energy,
            opts,
        })
    }

    pub fn partition(&self) -> &Partition {
        &self.partition
    }

    /// States `U⁰ … U^N` (one per partition node).
    pub fn states(&self) -> &[Vec<f64>] {
        &self.states
    }

    /// Multipliers `ξ¹ … ξ^N = −∇E(tₙ, Uⁿ)` (one per step).
    pub fn multipliers(&self) -> &[Vec<f64>] {
        &self.multipliers
    }

    pub fn diagnostics(&self) -> &[StepDiagnostics] {
        &self.diagnostics
    }

    /// Per-step slack of the discrete energy estimate (nonnegative up to
    /// solver tolerance for exactly solved steps).
    pub fn estimate_slack(&self) -> &[f64] {
        &self.estimate_slack
    }

    pub fn potential(&self) -> &DissipationPotential {
        &self.pot
    }

    pub fn energy(&self) -> &EnergyFunctional {
        &self.energy
    }

    pub fn tolerances(&self) -> &Tolerances {
        &self.opts
    }

    /// Evaluates the chosen interpolant at `t ∈ [0, T]`.
    pub fn interpolate(&self, t: f64, which: Interpolant) -> Result<Vec<f64>> {
        let t_end = self.partition.t_end();
        let near = 1e-12 * t_end.max(1.0);
        if !(t >= -near) || !(t <= t_end + near) {
            return Err(Error::Range(format!(
                "interpolation time {t} outside [0, {t_end}]"
            )));
        }
        let tau = self.partition.tau();
        let nodes = self.partition.nodes();
        let k_round = ((t / tau).round() as usize).min(self.partition.step_count());
        if (t - nodes[k_round]).abs() <= near {
            return Ok(self.states[k_round].clone());
        }
        let k = ((t / tau).floor() as usize).min(self.partition.step_count() - 1);
        match which {
            Interpolant::Right => Ok(self.states[k].clone()),
            Interpolant::Left => Ok(self.states[k + 1].clone()),
            Interpolant::Affine => {
                let lam = (t - nodes[k]) / tau;
                Ok(self.states[k]
                    .iter()
                    .zip(&self.states[k + 1])
                    .map(|(a, b)| a + lam * (b - a))
                    .collect())
            }
            Interpolant::Variational => {
                let theta = t - nodes[k];
                let (u, _, _) =
                    solve_step(&self.pot, &self.energy, t, theta, &self.states[k], &self.opts)?;
                Ok(u)
            }
        }
    }
}

struct ScalarProblem<'a> {
    pot: &'a DissipationPotential,
    node: usize,
    t: f64,
    tau: f64,
    up: f64,
}

/// Minimizes `s ↦ τ·a·f((s−up)/τ) + e(s)` for one node, where `e` is given
/// by its derivative `eg` and second derivative `esec` (NaN when
/// unavailable). Returns the minimizer and the iteration count.
fn solve_scalar(
    p: &ScalarProblem,
    eg: &dyn Fn(f64) -> f64,
    esec: &dyn Fn(f64) -> f64,
    inner_tol: f64,
    max_iter: usize,
) -> Result<(f64, usize)> {
    let f = p.pot.node_fn(p.node);
    let (dlo, dhi) = f.domain();
    let s_min = if dlo.is_finite() {
        p.up + p.tau * dlo
    } else {
        f64::NEG_INFINITY
    };
    let s_max = if dhi.is_finite() {
        p.up + p.tau * dhi
    } else {
        f64::INFINITY
    };
    let resid = |s: f64| -> (f64, f64) {
        let v = (s - p.up) / p.tau;
        let sd = p.pot.primal_subdiff(p.t, p.node, v);
        let g = eg(s);
        (sd.lo + g, sd.hi + g)
    };
    // quick exit at the previous state (v = 0): catches binding one-sided
    // constraints exactly
    let (r0_lo, r0_hi) = resid(p.up);
    if r0_lo <= 0.0 && 0.0 <= r0_hi {
        return Ok((p.up, 0));
    }
    // bracket the root of the monotone residual
    let (mut lo, mut hi);
    let mut delta = p.tau.max(1e-12);
    if r0_lo > 0.0 {
        // minimizer is left of up
        hi = p.up;
        lo = loop {
            let cand = (p.up - delta).max(s_min);
            let (c_lo, c_hi) = resid(cand);
            if c_hi < 0.0 {
                break cand;
            }
            if c_lo <= 0.0 {
                return Ok((cand, 0));
            }
            if cand <= s_min {
                // objective decreases into the boundary: constrained minimum
                return Ok((s_min, 0));
            }
            delta *= 2.0;
            if !delta.is_finite() {
                return Err(Error::Numeric(
                    "scalar step bracket expansion diverged".into(),
                ));
            }
        };
    } else {
        lo = p.up;
        hi = loop {
            let cand = (p.up + delta).min(s_max);
            let (c_lo, c_hi) = resid(cand);
            if c_lo > 0.0 {
                break cand;
            }
            if c_hi >= 0.0 {
                return Ok((cand, 0));
            }
            if cand >= s_max {
                return Ok((s_max, 0));
            }
            delta *= 2.0;
            if !delta.is_finite() {
                return Err(Error::Numeric(
                    "scalar step bracket expansion diverged".into(),
                ));
            }
        };
    }
    // safeguarded Newton on the residual
    let mut s = 0.5 * (lo + hi);
    let mut best = (f64::INFINITY, s);
    for iter in 1..=max_iter {
        let v = (s - p.up) / p.tau;
        let (r_lo, r_hi) = resid(s);
        if r_lo <= 0.0 && 0.0 <= r_hi {
            return Ok((s, iter));
        }
        let g = if r_lo > 0.0 { r_lo } else { r_hi };
        if g.abs() <= inner_tol {
            return Ok((s, iter));
        }
        if g.abs() < best.0 {
            best = (g.abs(), s);
        }
        if g > 0.0 {
            hi = s;
        } else {
            lo = s;
        }
        let width = hi - lo;
        if width <= 4.0 * f64::EPSILON * hi.abs().max(lo.abs()).max(1e-300) {
            // the bracket collapsed without meeting the tolerance
            return Err(Error::Numeric(format!(
                "scalar step stalled: residual {:.3e} at width {width:.3e}",
                best.0
            )));
        }
        let curv = p
            .pot
            .primal_second_derivative(p.t, p.node, v)
            .map(|c| c / p.tau)
            .map(|c| c + esec(s))
            .filter(|c| c.is_finite() && *c > 0.0);
        s = match curv {
            Some(c) => {
                let cand = s - g / c;
                if cand > lo && cand < hi {
                    cand
                } else {
                    0.5 * (lo + hi)
                }
            }
            None => 0.5 * (lo + hi),
        };
    }
    Err(Error::Numeric(format!(
        "scalar step did not converge: best residual {:.3e}",
        best.0
    )))
}

fn solve_separable(
    pot: &DissipationPotential,
    energy: &EnergyFunctional,
    t: f64,
    tau: f64,
    u_prev: &[f64],
    opts: &Tolerances,
) -> Result<(Vec<f64>, usize)> {
    let mut u = Vec::with_capacity(u_prev.len());
    let mut iters = 0usize;
    for (i, &up) in u_prev.iter().enumerate() {
        let prob = ScalarProblem {
            pot,
            node: i,
            t,
            tau,
            up,
        };
        let (s, it) = solve_scalar(
            &prob,
            &|s| energy.nodewise_grad(t, i, s),
            &|s| energy.nodewise_second(t, i, s),
            opts.inner_tol,
            opts.max_inner_iterations,
        )?;
        u.push(s);
        iters += it;
    }
    Ok((u, iters))
}

fn solve_coupled(
    pot: &DissipationPotential,
    energy: &EnergyFunctional,
    t: f64,
    tau: f64,
    u_prev: &[f64],
    opts: &Tolerances,
) -> Result<(Vec<f64>, usize)> {
    let n = u_prev.len();
    let weights = pot.grid().weights();
    let mut u = u_prev.to_vec();
    let mut e_cur = energy.energy_value(t, &u)?;
    let mut eta = 1.0f64;
    let mut total = 0usize;
    let prox_tol = (opts.inner_tol * 1e-2).max(1e-14);
    for _outer in 0..opts.max_inner_iterations {
        let g = energy.gradient(t, &u)?;
        let mut res = 0.0f64;
        for i in 0..n {
            let v = (u[i] - u_prev[i]) / tau;
            res = res.max(pot.primal_subdiff(t, i, v).dist(-g[i]));
        }
        if res <= opts.inner_tol {
            return Ok((u, total));
        }
        // Forward step on E, exact nodewise prox in the kinetic term, both in
        // the measure-weighted metric. The step size only ever shrinks: the
        // acceptance test is the descent-lemma bound
        //     E(w) ≤ E(u) + ⟨∇E(u), w−u⟩_μ + ‖w−u‖²_μ/(2η),
        // so once η is small enough for the local curvature it stays
        // accepted and the fixed-point iteration contracts. (Comparing raw
        // objective values instead lets η creep past the stability threshold
        // on stiff problems, because changes near the minimum drown in
        // rounding.)
        let mut accepted = false;
        for _bt in 0..200 {
            let mut w = vec![0.0; n];
            let mut step_iters = 0usize;
            for i in 0..n {
                let c = u[i] - eta * g[i];
                let prob = ScalarProblem {
                    pot,
                    node: i,
                    t,
                    tau,
                    up: u_prev[i],
                };
                let (s, it) = solve_scalar(
                    &prob,
                    &|s| (s - c) / eta,
                    &|_| 1.0 / eta,
                    prox_tol,
                    opts.max_inner_iterations,
                )?;
                w[i] = s;
                step_iters += it;
            }
            total += step_iters.max(1);
            let e_new = energy.energy_value(t, &w)?;
            let mut model = 0.0f64;
            let mut dist2 = 0.0f64;
            for i in 0..n {
                let d = w[i] - u[i];
                model += weights[i] * g[i] * d;
                dist2 += weights[i] * d * d;
            }
            model += dist2 / (2.0 * eta);
            if e_new <= e_cur + model + 4.0 * f64::EPSILON * (1.0 + e_cur.abs()) {
                u = w;
                e_cur = e_new;
                accepted = true;
                break;
            }
            eta *= 0.5;
            if eta < 1e-18 {
                return Err(Error::Numeric(
                    "proximal-gradient step size collapsed".into(),
                ));
            }
        }
        if !accepted {
            return Err(Error::Numeric(
                "proximal-gradient backtracking failed".into(),
            ));
        }
    }
    Err(Error::Numeric(format!(
        "step solver hit the iteration cap ({})",
        opts.max_inner_iterations
    )))
}

/// One minimizing-movement step toward target time `t` with step length
/// `tau`, starting from `u_prev`. Returns the new state, the multiplier
/// `ξ = −∇E(t, U)`, and diagnostics.
///
/// Nonconvex energies are gated: the step is refused when
/// `tau > safety/Λ(t)` (with `Λ` the energy's semiconvexity bound) unless
/// `opts.allow_multiminimizer` is set.
pub fn solve_step(
    pot: &DissipationPotential,
    energy: &EnergyFunctional,
    t: f64,
    tau: f64,
    u_prev: &[f64],
    opts: &Tolerances,
) -> Result<(Vec<f64>, Vec<f64>, StepDiagnostics)> {
    if !(tau > 0.0) || !tau.is_finite() {
        return Err(Error::Domain(format!("step length {tau} (need tau > 0)")));
    }
    if pot.grid().weights() != energy.grid().weights() {
        return Err(Error::Domain(
            "potential and energy live on different grids".into(),
        ));
    }
    pot.grid().check_len(u_prev)?;
    if !(opts.inner_tol > 0.0) {
        return Err(Error::Domain(format!("inner tolerance {}", opts.inner_tol)));
    }
    let e_prev = energy.energy_value(t, u_prev)?;
    if !e_prev.is_finite() {
        return Err(Error::Domain(
            "previous state outside the energy domain".into(),
        ));
    }
    let lam = energy.semiconvexity(t);
    if lam > 0.0 {
        let threshold = opts.semiconvexity_safety / lam;
        if tau > threshold && !opts.allow_multiminimizer {
            return Err(Error::Step {
                step: 0,
                message: format!(
                    "step length {tau:.6e} exceeds the semiconvexity gate {}/Λ = {threshold:.6e}; \
                     reduce tau or set allow_multiminimizer to accept non-unique minimizers",
                    opts.semiconvexity_safety
                ),
            });
        }
    }
    let separable = energy.is_nodewise_separable();
    let (u, inner_iterations) = (if separable {
        solve_separable(pot, energy, t, tau, u_prev, opts)
    } else {
        solve_coupled(pot, energy, t, tau, u_prev, opts)
    })
    .map_err(|e| match e {
        Error::Numeric(message) => Error::Step { step: 0, message },
        other => other,
    })?;
    let xi: Vec<f64> = energy.gradient(t, &u)?.into_iter().map(|g| -g).collect();
    let v: Vec<f64> = u
        .iter()
        .zip(u_prev)
        .map(|(x, y)| (x - y) / tau)
        .collect();
    let primal = pot.eval_primal(t, u_prev, &v)?;
    let dual = pot.eval_conjugate(t, u_prev, &xi)?;
    let pairing_vals: Vec<f64> = xi.iter().zip(&v).map(|(a, b)| a * b).collect();
    let pairing = integrate(&pairing_vals, pot.grid())?;
    let fy_gap = (primal + dual - pairing).max(0.0);
    let j_value = tau * primal + energy.energy_value(t, &u)?;
    let el_residual = match pot.invert_subdifferential(t, u_prev, &xi) {
        Ok(vhat) => v
            .iter()
            .zip(&vhat)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0f64, f64::max),
        Err(_) => f64::INFINITY,
    };
    Ok((
        u,
        xi,
        StepDiagnostics {
            j_value,
            fy_gap,
            inner_iterations,
            el_residual,
        },
    ))
}

/// Runs the scheme on the uniform partition of `[0, t_end]` with step `tau`
/// (which must divide the horizon within `1e-9` relative). On a step failure
/// the error carries the partial trajectory.
pub fn run_scheme(
    pot: &DissipationPotential,
    energy: &EnergyFunctional,
    u0: &[f64],
    t_end: f64,
    tau: f64,
    opts: &Tolerances,
) -> std::result::Result<DiscreteSolution, Box<SchemeFailure>> {
    let empty_failure = |error: Error, states: Vec<Vec<f64>>| {
        Box::new(SchemeFailure {
            error,
            partial: DiscreteSolution {
                partition: Partition {
                    nodes: vec![0.0],
                    tau,
                },
                states,
                multipliers: Vec::new(),
                diagnostics: Vec::new(),
                estimate_slack: Vec::new(),
                pot: pot.clone(),
                energy: energy.clone(),
                opts: opts.clone(),
            },
        })
    };
    if !(t_end > 0.0) || !t_end.is_finite() || !(tau > 0.0) || !tau.is_finite() {
        return Err(empty_failure(
            Error::Config(format!("invalid horizon {t_end} or step {tau}")),
            vec![],
        ));
    }
    let steps_f = t_end / tau;
    let steps = steps_f.round();
    if steps < 1.0 || (steps * tau - t_end).abs() > 1e-9 * t_end.max(1.0) {
        return Err(empty_failure(
            Error::Config(format!(
                "step {tau} does not divide the horizon {t_end} (|{steps}·tau − T| > 1e-9)"
            )),
            vec![],
        ));
    }
    let partition = match Partition::uniform(t_end, steps as usize) {
        Ok(p) => p,
        Err(e) => return Err(empty_failure(e, vec![])),
    };
    if let Err(e) = pot.grid().check_len(u0) {
        return Err(empty_failure(e, vec![]));
    }
    let mut states = vec![u0.to_vec()];
    let mut multipliers = Vec::new();
    let mut diagnostics = Vec::new();
    let mut estimate_slack = Vec::new();
    let fail = |error: Error,
                n: usize,
                states: Vec<Vec<f64>>,
                multipliers: Vec<Vec<f64>>,
                diagnostics: Vec<StepDiagnostics>,
                estimate_slack: Vec<f64>| {
        let message = match &error {
            Error::Step { message, .. } => message.clone(),
            other => other.to_string(),
        };
        Box::new(SchemeFailure {
            error: Error::Step { step: n, message },
            partial: DiscreteSolution {
                partition: Partition {
                    nodes: (0..states.len())
                        .map(|k| t_end * k as f64 / steps)
                        .collect(),
                    tau,
                },
                states,
                multipliers,
                diagnostics,
                estimate_slack,
                pot: pot.clone(),
                energy: energy.clone(),
                opts: opts.clone(),
            },
        })
    };
    for n in 1..=partition.step_count() {
        let t_n = partition.nodes()[n];
        let t_prev = partition.nodes()[n - 1];
        let u_prev = states[n - 1].clone();
        let (u, xi, diag) = match solve_step(pot, energy, t_n, tau, &u_prev, opts) {
            Ok(r) => r,
            Err(e) => {
                return Err(fail(e, n, states, multipliers, diagnostics, estimate_slack))
            }
        };
        // slack of the one-step energy estimate (≥ 0 up to solver tolerance):
        // E_prev + τ·∂ₜE − [τφ(v) + τφ*(ξ) + E_new]
        let slack = (|| -> Result<f64> {
            let v: Vec<f64> = u
                .iter()
                .zip(&u_prev)
                .map(|(x, y)| (x - y) / tau)
                .collect();
            let dp = tau * pot.eval_primal(t_n, &u_prev, &v)?;
            let dd = tau * pot.eval_conjugate(t_n, &u_prev, &xi)?;
            let e_new = energy.energy_value(t_n, &u)?;
            let e_prev = energy.energy_value(t_prev, &u_prev)?;
            let p_int = tau * energy.time_slope(t_prev, &u_prev, &xi)?;
            Ok(e_prev + p_int - dp - dd - e_new)
        })();
        let slack = match slack {
            Ok(s) => s,
            Err(e) => {
                return Err(fail(e, n, states, multipliers, diagnostics, estimate_slack))
            }
        };
        states.push(u);
        multipliers.push(xi);
        diagnostics.push(diag);
        estimate_slack.push(slack);
    }
    Ok(DiscreteSolution {
        partition,
        states,
        multipliers,
        diagnostics,
        estimate_slack,
        pot: pot.clone(),
        energy: energy.clone(),
        opts: opts.clone(),
    })
}
