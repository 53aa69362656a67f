//! Batch experiment driver: runs a resolved experiment once per step size,
//! writes the artifacts (trajectory CSV, balance report JSON, summary JSON),
//! and prints convergence tables and potential probes.
//!
//! Artifacts land in `output_dir/<preset>/tau_<τ>/`. Step sizes run in
//! parallel (each writes only its own directory); `ORLICZ_FLOW_THREADS`
//! caps the pool. All emitted bytes are a pure function of the config, so
//! repeated runs produce identical files.

use std::fmt::Write as _;
use std::fs;
use std::path::PathBuf;

use rayon::prelude::*;
use serde::Serialize;

use crate::config::ResolvedExperiment;
use crate::convex::{ConvexScalarFn, DEFAULT_THETA_SEQ};
use crate::edb::{edb_report_from_parts, Classification};
use crate::error::{Error, Result};
use crate::grid::integrate;
use crate::solver::run_scheme;

/// What happened for one step size. `failed` runs still leave partial
/// artifacts behind; the error text is both printed and recorded in the
/// summary JSON.
#[derive(Debug, Clone)]
pub struct RunRecord {
    pub tau: f64,
    pub dir: PathBuf,
    pub failed: bool,
    pub failure: Option<String>,
}

#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub records: Vec<RunRecord>,
}

impl RunOutcome {
    pub fn any_failed(&self) -> bool {
        self.records.iter().any(|r| r.failed)
    }
}

/// Build a thread pool honoring `ORLICZ_FLOW_THREADS` (unset → rayon default).
fn thread_pool() -> Result<rayon::ThreadPool> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Ok(raw) = std::env::var("ORLICZ_FLOW_THREADS") {
        let n: usize = raw.trim().parse().map_err(|_| {
            Error::Config(format!(
                "ORLICZ_FLOW_THREADS: cannot parse `{raw}` as a positive integer"
            ))
        })?;
        if n == 0 {
            return Err(Error::Config("ORLICZ_FLOW_THREADS: need at least 1".into()));
        }
        builder = builder.num_threads(n);
    }
    builder
        .build()
        .map_err(|e| Error::Config(format!("thread pool: {e}")))
}

pub fn run_experiment(exp: &ResolvedExperiment) -> Result<RunOutcome> {
    let pool = thread_pool()?;
    let records: Result<Vec<RunRecord>> = pool.install(|| {
        exp.tau_list
            .par_iter()
            .map(|&tau| write_one_run(exp, tau))
            .collect()
    });
    Ok(RunOutcome { records: records? })
}

/// The rendered artifact set for one step size, before any I/O.
pub(crate) struct Artifacts {
    pub trajectory_csv: String,
    pub edb_json: Option<String>,
    pub summary_json: String,
    pub failure: Option<String>,
}

fn write_one_run(exp: &ResolvedExperiment, tau: f64) -> Result<RunRecord> {
    let art = build_artifacts(exp, tau)?;
    let dir = exp.output_dir.join(&exp.name).join(format!("tau_{tau:e}"));
    fs::create_dir_all(&dir)?;
    fs::write(dir.join("trajectory.csv"), &art.trajectory_csv)?;
    if let Some(edb) = &art.edb_json {
        fs::write(dir.join("edb.json"), edb)?;
    }
    fs::write(dir.join("summary.json"), &art.summary_json)?;
    Ok(RunRecord {
        tau,
        dir,
        failed: art.failure.is_some(),
        failure: art.failure,
    })
}

#[derive(Serialize)]
struct RunSummary<'a> {
    problem: &'a str,
    tau: f64,
    steps_completed: usize,
    steps_requested: usize,
    nodes: usize,
    t_end: f64,
    seed: u64,
    failed: bool,
    failure: Option<&'a str>,
    classification: Option<Classification>,
    cumulative_residual: Option<f64>,
    max_interval_residual: Option<f64>,
    max_abs_interval_residual: Option<f64>,
    max_fy_gap: Option<f64>,
    energy_initial: Option<f64>,
    energy_final: Option<f64>,
    monotone_nonincreasing: Option<bool>,
    beta_superlinear: Option<bool>,
    final_error: Option<f64>,
    sup_error: Option<f64>,
}

pub(crate) fn build_artifacts(exp: &ResolvedExperiment, tau: f64) -> Result<Artifacts> {
    let scheme = run_scheme(
        &exp.potential,
        &exp.energy,
        &exp.u0,
        exp.t_end,
        tau,
        &exp.tolerances,
    );
    let (states, t_nodes, multipliers, failure) = match &scheme {
        Ok(sol) => (
            sol.states().to_vec(),
            sol.partition().nodes().to_vec(),
            sol.multipliers().to_vec(),
            None,
        ),
        Err(fail) => (
            fail.partial.states().to_vec(),
            fail.partial.partition().nodes().to_vec(),
            fail.partial.multipliers().to_vec(),
            Some(fail.error.to_string()),
        ),
    };

    let trajectory_csv = render_trajectory(exp, &t_nodes, &states, &multipliers)?;
    let report = if states.len() >= 2 {
        Some(edb_report_from_parts(
            &exp.potential,
            &exp.energy,
            &t_nodes[..states.len()],
            &states,
            &multipliers,
            None,
        )?)
    } else {
        None
    };
    let edb_json = match &report {
        Some(r) => Some(to_pretty(r)?),
        None => None,
    };

    let energies: Vec<f64> = states
        .iter()
        .zip(&t_nodes)
        .map(|(u, &t)| exp.energy.energy_value(t, u))
        .collect::<Result<_>>()?;
    let slack = 10.0 * exp.tolerances.inner_tol;
    let monotone = (!energies.is_empty()).then(|| energies.windows(2).all(|w| w[1] <= w[0] + slack));

    let (final_error, sup_error) = match &exp.oracle {
        Some(oracle) if !states.is_empty() => {
            let mut sup = 0.0f64;
            let mut last = 0.0f64;
            for (n, u) in states.iter().enumerate() {
                let reference = oracle(t_nodes[n]);
                let err = u
                    .iter()
                    .zip(&reference)
                    .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
                sup = sup.max(err);
                last = err;
            }
            (Some(last), Some(sup))
        }
        _ => (None, None),
    };

    let steps_requested = (exp.t_end / tau).round() as usize;
    let summary = RunSummary {
        problem: &exp.name,
        tau,
        steps_completed: states.len().saturating_sub(1),
        steps_requested,
        nodes: exp.potential.grid().node_count(),
        t_end: exp.t_end,
        seed: exp.seed,
        failed: failure.is_some(),
        failure: failure.as_deref(),
        classification: report.as_ref().map(|r| r.classification),
        cumulative_residual: report.as_ref().map(|r| r.cumulative_residual),
        max_interval_residual: report.as_ref().map(|r| r.max_interval_residual),
        max_abs_interval_residual: report.as_ref().map(|r| r.max_abs_interval_residual),
        max_fy_gap: report.as_ref().and_then(|r| {
            r.fy_gaps
                .iter()
                .copied()
                .fold(None, |m: Option<f64>, g| Some(m.map_or(g, |x| x.max(g))))
        }),
        energy_initial: energies.first().copied(),
        energy_final: energies.last().copied(),
        monotone_nonincreasing: monotone,
        beta_superlinear: exp.beta_superlinear,
        final_error,
        sup_error,
    };
    let summary_json = to_pretty(&summary)?;

    Ok(Artifacts {
        trajectory_csv,
        edb_json,
        summary_json,
        failure,
    })
}

/// CSV with one row per (time node, grid node). Step-level quantities
/// (E, the two dissipation terms, the duality gap) repeat on each node row
/// of their step; the t = 0 rows carry zeros for step-level columns.
fn render_trajectory(
    exp: &ResolvedExperiment,
    t_nodes: &[f64],
    states: &[Vec<f64>],
    multipliers: &[Vec<f64>],
) -> Result<String> {
    let grid = exp.potential.grid();
    let mut out = String::from("t,node,U,xi,E,phi_step,phistar_step,fy_gap\n");
    for (n, u) in states.iter().enumerate() {
        let t = t_nodes[n];
        let e = exp.energy.energy_value(t, u)?;
        let (xi, dp, dd, fy) = if n == 0 {
            (None, 0.0, 0.0, 0.0)
        } else {
            let tau = t_nodes[n] - t_nodes[n - 1];
            let prev = &states[n - 1];
            let xi = &multipliers[n - 1];
            let v: Vec<f64> = u.iter().zip(prev).map(|(a, b)| (a - b) / tau).collect();
            let primal = exp.potential.eval_primal(t, prev, &v)?;
            let dual = exp.potential.eval_conjugate(t, prev, xi)?;
            let prods: Vec<f64> = xi.iter().zip(&v).map(|(a, b)| a * b).collect();
            let pairing = integrate(&prods, grid)?;
            let fy = (primal + dual - pairing).max(0.0);
            (Some(xi), tau * primal, tau * dual, fy)
        };
        for i in 0..u.len() {
            let xi_i = xi.map_or(0.0, |x| x[i]);
            writeln!(
                out,
                "{t:.16e},{i},{:.16e},{xi_i:.16e},{e:.16e},{dp:.16e},{dd:.16e},{fy:.16e}",
                u[i]
            )
            .expect("string write");
        }
    }
    Ok(out)
}

/// Error-vs-oracle table over the configured step ladder.
///
/// Columns: `tau`, the sup-norm error against the closed-form reference,
/// the signed cumulative balance residual, the empirical convergence order
/// between consecutive rows, and a `plateau` note once the order falls
/// below 0.5 (the step error has dropped under some other error floor,
/// e.g. spatial discretization).
pub fn convergence_table(exp: &ResolvedExperiment) -> Result<String> {
    let oracle = exp.oracle.as_ref().ok_or_else(|| {
        Error::Config(format!(
            "table: preset `{}` has no closed-form reference (bp_ode, quadratic with p = 2, \
             and heat do)",
            exp.name
        ))
    })?;
    if exp.tau_list.len() < 3 {
        return Err(Error::Config(format!(
            "table: need at least 3 step sizes, got {}",
            exp.tau_list.len()
        )));
    }
    let mut rows: Vec<(f64, f64, f64)> = Vec::new();
    for &tau in &exp.tau_list {
        let sol = run_scheme(
            &exp.potential,
            &exp.energy,
            &exp.u0,
            exp.t_end,
            tau,
            &exp.tolerances,
        )
        .map_err(|fail| fail.error)?;
        let report = crate::edb::edb_report(&sol, None)?;
        let mut sup = 0.0f64;
        for (n, u) in sol.states().iter().enumerate() {
            let reference = oracle(sol.partition().nodes()[n]);
            for (a, b) in u.iter().zip(&reference) {
                sup = sup.max((a - b).abs());
            }
        }
        rows.push((tau, sup, report.cumulative_residual));
    }
    let mut out = String::from("tau,sup_error,edb_residual,empirical_order,note\n");
    for k in 0..rows.len() {
        let (tau, sup, resid) = rows[k];
        let order = if k == 0 {
            None
        } else {
            let (tp, ep, _) = rows[k - 1];
            (ep > 0.0 && sup > 0.0 && tp != tau).then(|| (ep / sup).ln() / (tp / tau).ln())
        };
        let order_str = order.map(|o| format!("{o:.16e}")).unwrap_or_default();
        let note = match order {
            Some(o) if o < 0.5 => "plateau",
            _ => "",
        };
        writeln!(out, "{tau:.16e},{sup:.16e},{resid:.16e},{order_str},{note}")
            .expect("string write");
    }
    Ok(out)
}

/// Parse a potential name like `power:2`, `bp_dual`, or `indicator_ball:1.5`.
pub fn parse_potential(spec: &str) -> Result<(String, ConvexScalarFn)> {
    let (head, arg) = match spec.split_once(':') {
        Some((h, a)) => (h, Some(a)),
        None => (spec, None),
    };
    let numeric = |arg: Option<&str>, example: &str| -> Result<f64> {
        let raw = arg.ok_or_else(|| {
            Error::Config(format!(
                "probe: `{head}` needs a numeric argument, e.g. `{head}:{example}`"
            ))
        })?;
        raw.trim()
            .parse::<f64>()
            .map_err(|_| Error::Config(format!("probe: cannot parse `{raw}` as a number")))
    };
    let bare = |f: ConvexScalarFn| -> Result<(String, ConvexScalarFn)> {
        if arg.is_some() {
            return Err(Error::Config(format!("probe: `{head}` takes no argument")));
        }
        Ok((head.to_string(), f))
    };
    match head {
        "power" => {
            let p = numeric(arg, "2")?;
            Ok((format!("power:{p}"), ConvexScalarFn::power(p)?))
        }
        "power_raw" => {
            let p = numeric(arg, "1.5")?;
            Ok((format!("power_raw:{p}"), ConvexScalarFn::power_raw(p)?))
        }
        "indicator_ball" => {
            let r = numeric(arg, "1")?;
            Ok((
                format!("indicator_ball:{r}"),
                ConvexScalarFn::indicator_ball(r)?,
            ))
        }
        "linear_abs" => bare(ConvexScalarFn::linear_abs()),
        "bp_primal" => bare(ConvexScalarFn::bp_primal()),
        "bp_dual" => bare(ConvexScalarFn::bp_dual()),
        "damage_primal" => bare(ConvexScalarFn::damage_primal()),
        "damage_dual" => bare(ConvexScalarFn::damage_dual()),
        other => Err(Error::Config(format!(
            "probe: unknown potential `{other}` (expected power:<p>, power_raw:<p>, linear_abs, \
             bp_primal, bp_dual, damage_primal, damage_dual, indicator_ball:<r>)"
        ))),
    }
}

/// Doubling, superlinearity, and coercivity probes as deterministic JSON.
/// Non-finite samples serialize as `null`; a doubling probe that cannot be
/// sampled (one-sided domain) reports the reason instead of failing.
pub fn probe_potential(spec: &str) -> Result<String> {
    let (canonical, f) = parse_potential(spec)?;
    let samples = [0.25, 0.5, 1.0, 2.0, 5.0, 10.0, 20.0];
    let delta2 = match f.delta2_probe(&samples) {
        Ok(d2) => serde_json::json!({
            "samples": samples.to_vec(),
            "passes": d2.passes,
            "k": d2.k,
            "ratio_trace": d2.ratio_trace,
        }),
        Err(e) => serde_json::json!({ "error": e.to_string() }),
    };
    let superlinearity: Vec<serde_json::Value> = [1.0f64, -1.0]
        .iter()
        .map(|&dir| {
            let sl = f.superlinearity_probe(dir, &DEFAULT_THETA_SEQ)?;
            Ok(serde_json::json!({
                "direction": dir,
                "theta_seq": DEFAULT_THETA_SEQ.to_vec(),
                "superlinear": sl.superlinear,
                "trace": sl.trace,
            }))
        })
        .collect::<Result<_>>()?;
    let coercivity = f.coercivity_probe(1.0)?;
    let value = serde_json::json!({
        "potential": canonical,
        "delta2": delta2,
        "superlinearity": superlinearity,
        "coercivity": {
            "radius": 1.0,
            "min_value": coercivity,
        },
    });
    to_pretty(&value)
}

fn to_pretty<T: Serialize>(value: &T) -> Result<String> {
    serde_json::to_string_pretty(value)
        .map(|s| s + "\n")
        .map_err(|e| Error::Io(format!("serialize: {e}")))
}
