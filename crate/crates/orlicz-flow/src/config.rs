//! JSON experiment configuration.
//!
//! A config names one of six problem presets and optionally overrides its
//! parameters, initial state, horizon `T`, step list, solver tolerances,
//! output directory, and RNG seed. Unknown keys are rejected. `resolve`
//! validates everything (errors carry the offending field path) and builds
//! the concrete potential/energy/initial-state triple plus, where a closed
//! form exists, the exact-solution oracle.

use std::f64::consts::PI;
use std::path::PathBuf;
use std::sync::Arc;

use serde::Deserialize;

use crate::allen_cahn::ACGurtinProblem;
use crate::convex::ConvexScalarFn;
use crate::dissipation::DissipationPotential;
use crate::energy::EnergyFunctional;
use crate::error::{Error, Result};
use crate::grid::{make_grid, GridMeasure};
use crate::norms::OrliczIntegrand;
use crate::solver::Tolerances;

/// Exact solution sampled at a time: node values in grid order.
pub type Oracle = Arc<dyn Fn(f64) -> Vec<f64> + Send + Sync>;

pub const PRESET_NAMES: [&str; 6] = [
    "bp_ode",
    "quadratic",
    "damage",
    "double_well",
    "heat",
    "ac_gurtin",
];

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub problem: String,
    #[serde(default)]
    pub params: Params,
    pub u0: Option<InitialState>,
    #[serde(rename = "T")]
    pub horizon: Option<f64>,
    pub tau_list: Option<Vec<f64>>,
    #[serde(default)]
    pub tolerances: ToleranceConfig,
    pub output_dir: Option<String>,
    pub seed: Option<u64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Params {
    pub lambda: Option<f64>,
    pub p: Option<f64>,
    pub well: Option<f64>,
    #[serde(rename = "L")]
    pub length: Option<f64>,
    pub nodes: Option<usize>,
}

#[derive(Debug, Default, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ToleranceConfig {
    pub inner_tol: Option<f64>,
    pub max_inner_iterations: Option<usize>,
    pub semiconvexity_safety: Option<f64>,
    pub allow_multiminimizer: Option<bool>,
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
pub enum InitialState {
    Inline(Vec<f64>),
    Preset(String),
}

/// A validated experiment ready to run.
pub struct ResolvedExperiment {
    pub name: String,
    pub potential: DissipationPotential,
    pub energy: EnergyFunctional,
    pub u0: Vec<f64>,
    pub t_end: f64,
    pub tau_list: Vec<f64>,
    pub tolerances: Tolerances,
    pub output_dir: PathBuf,
    pub seed: u64,
    pub oracle: Option<Oracle>,
    /// Present for the assembled presets (`heat`, `ac_gurtin`).
    pub beta_superlinear: Option<bool>,
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Config(format!("config parse: {e}")))
    }

    pub fn from_path(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn resolve(&self) -> Result<ResolvedExperiment> {
        let preset = Preset::parse(&self.problem)?;
        self.params.check_allowed(preset)?;
        let lambda = positive_or(self.params.lambda, preset.default_lambda(), "params.lambda")?;
        let p = self.params.p.unwrap_or(2.0);
        if !(p >= 1.0) || !p.is_finite() {
            return Err(Error::Config(format!("params.p: {p} (need p ≥ 1)")));
        }
        let well = match self.params.well {
            Some(w) if !(w >= 0.0) || !w.is_finite() => {
                return Err(Error::Config(format!("params.well: {w} (need ≥ 0)")))
            }
            Some(w) => w,
            None => 1.0,
        };
        let length = positive_or(self.params.length, 1.0, "params.L")?;
        let nodes = match self.params.nodes {
            Some(0) => return Err(Error::Config("params.nodes: need at least 1".into())),
            Some(n) if preset.interval_grid() && n < 2 => {
                return Err(Error::Config(format!(
                    "params.nodes: {n} (preset {} needs ≥ 2)",
                    preset.name()
                )))
            }
            Some(n) => n,
            None => preset.default_nodes(),
        };
        let t_end = positive_or(self.horizon, preset.default_horizon(), "T")?;
        let tau_list = match &self.tau_list {
            None => preset.default_taus(),
            Some(list) if list.is_empty() => {
                return Err(Error::Config("tau_list: must not be empty".into()))
            }
            Some(list) => {
                for (i, &tau) in list.iter().enumerate() {
                    if !(tau > 0.0) || !tau.is_finite() {
                        return Err(Error::Config(format!("tau_list[{i}]: {tau} (need > 0)")));
                    }
                    let steps = (t_end / tau).round();
                    if steps < 1.0 || (steps * tau - t_end).abs() > 1e-9 * t_end.max(1.0) {
                        return Err(Error::Config(format!(
                            "tau_list[{i}]: {tau} does not divide T = {t_end} within 1e-9"
                        )));
                    }
                }
                list.clone()
            }
        };
        let tolerances = self.tolerances.build()?;

        let grid = if preset.interval_grid() {
            GridMeasure::uniform_interval(nodes, length)?
        } else {
            make_grid(vec![1.0; nodes], None)?
        };
        let u0 = self.resolve_u0(preset, &grid, length)?;

        let (potential, energy, beta_superlinear) = match preset {
            Preset::BpOde => (
                DissipationPotential::bp(grid.clone()),
                EnergyFunctional::quadratic(grid, lambda)?,
                None,
            ),
            Preset::Quadratic => {
                let phi = OrliczIntegrand::uniform(ConvexScalarFn::power(p)?, grid.clone());
                (
                    DissipationPotential::autonomous_nodewise(phi)?,
                    EnergyFunctional::quadratic(grid, lambda)?,
                    None,
                )
            }
            Preset::Damage => (
                DissipationPotential::damage(grid.clone()),
                EnergyFunctional::quadratic(grid, lambda)?,
                None,
            ),
            Preset::DoubleWell => {
                let phi = OrliczIntegrand::uniform(ConvexScalarFn::power(2.0)?, grid.clone());
                (
                    DissipationPotential::autonomous_nodewise(phi)?,
                    EnergyFunctional::double_well(grid, well)?,
                    None,
                )
            }
            Preset::Heat | Preset::AcGurtin => {
                let prob = ACGurtinProblem {
                    spatial_grid: grid,
                    alpha: if preset == Preset::Heat {
                        ConvexScalarFn::power(2.0)?
                    } else {
                        ConvexScalarFn::bp_primal()
                    },
                    beta: ConvexScalarFn::power(if preset == Preset::Heat { 2.0 } else { p })?,
                    well: if preset == Preset::Heat { 0.0 } else { well },
                    u0: u0.clone(),
                };
                let asm = prob.assemble()?;
                (asm.potential, asm.energy, Some(asm.beta_superlinear))
            }
        };

        let oracle: Option<Oracle> = match preset {
            Preset::BpOde => {
                let start = u0.clone();
                Some(Arc::new(move |t: f64| {
                    start
                        .iter()
                        .map(|&x| 2.0 / lambda * ((-lambda * t).exp() * (lambda * x / 2.0).tanh()).atanh())
                        .collect()
                }))
            }
            Preset::Quadratic if p == 2.0 => {
                let start = u0.clone();
                Some(Arc::new(move |t: f64| {
                    start.iter().map(|&x| x * (-lambda * t).exp()).collect()
                }))
            }
            Preset::Heat => {
                let start = u0.clone();
                let modes = nodes - 1;
                Some(Arc::new(move |t: f64| {
                    crate::allen_cahn::reference_heat(&start, length, t, modes)
                        .expect("dimensions validated at resolve time")
                }))
            }
            _ => None,
        };

        Ok(ResolvedExperiment {
            name: preset.name().to_string(),
            potential,
            energy,
            u0,
            t_end,
            tau_list,
            tolerances,
            output_dir: PathBuf::from(self.output_dir.as_deref().unwrap_or("out")),
            seed: self.seed.unwrap_or(0),
            oracle,
            beta_superlinear,
        })
    }

    fn resolve_u0(&self, preset: Preset, grid: &GridMeasure, length: f64) -> Result<Vec<f64>> {
        let n = grid.node_count();
        match &self.u0 {
            None => Ok(preset.default_u0(grid, length)),
            Some(InitialState::Inline(v)) => {
                if v.len() != n {
                    return Err(Error::Config(format!(
                        "u0: {} values for a {n}-node grid",
                        v.len()
                    )));
                }
                for (i, x) in v.iter().enumerate() {
                    if !x.is_finite() {
                        return Err(Error::Config(format!("u0[{i}]: {x} is not finite")));
                    }
                }
                Ok(v.clone())
            }
            Some(InitialState::Preset(name)) => match name.as_str() {
                "zero" => Ok(vec![0.0; n]),
                "ones" => Ok(vec![1.0; n]),
                "cos_pi" => {
                    let labels = grid.labels().ok_or_else(|| {
                        Error::Config(format!(
                            "u0: preset `cos_pi` needs the labeled interval grid of \
                             heat/ac_gurtin, not `{}`",
                            preset.name()
                        ))
                    })?;
                    Ok(labels.iter().map(|&x| (PI * x / length).cos()).collect())
                }
                other => Err(Error::Config(format!(
                    "u0: unknown preset `{other}` (expected zero|ones|cos_pi or an inline vector)"
                ))),
            },
        }
    }
}

impl ToleranceConfig {
    pub fn build(&self) -> Result<Tolerances> {
        let mut t = Tolerances::default();
        if let Some(x) = self.inner_tol {
            if !(x > 0.0) || !x.is_finite() {
                return Err(Error::Config(format!(
                    "tolerances.inner_tol: {x} (need > 0)"
                )));
            }
            t.inner_tol = x;
        }
        if let Some(x) = self.max_inner_iterations {
            if x == 0 {
                return Err(Error::Config(
                    "tolerances.max_inner_iterations: need ≥ 1".into(),
                ));
            }
            t.max_inner_iterations = x;
        }
        if let Some(x) = self.semiconvexity_safety {
            if !(x > 0.0 && x <= 1.0) {
                return Err(Error::Config(format!(
                    "tolerances.semiconvexity_safety: {x} (need 0 < s ≤ 1)"
                )));
            }
            t.semiconvexity_safety = x;
        }
        if let Some(x) = self.allow_multiminimizer {
            t.allow_multiminimizer = x;
        }
        Ok(t)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Preset {
    BpOde,
    Quadratic,
    Damage,
    DoubleWell,
    Heat,
    AcGurtin,
}

impl Preset {
    fn parse(name: &str) -> Result<Self> {
        match name {
            "bp_ode" => Ok(Preset::BpOde),
            "quadratic" => Ok(Preset::Quadratic),
            "damage" => Ok(Preset::Damage),
            "double_well" => Ok(Preset::DoubleWell),
            "heat" => Ok(Preset::Heat),
            "ac_gurtin" => Ok(Preset::AcGurtin),
            other => Err(Error::Config(format!(
                "problem: unknown preset `{other}` (expected {})",
                PRESET_NAMES.join("|")
            ))),
        }
    }

    fn name(self) -> &'static str {
        match self {
            Preset::BpOde => "bp_ode",
            Preset::Quadratic => "quadratic",
            Preset::Damage => "damage",
            Preset::DoubleWell => "double_well",
            Preset::Heat => "heat",
            Preset::AcGurtin => "ac_gurtin",
        }
    }

    fn interval_grid(self) -> bool {
        matches!(self, Preset::Heat | Preset::AcGurtin)
    }

    fn default_lambda(self) -> f64 {
        1.0
    }

    fn default_nodes(self) -> usize {
        match self {
            Preset::BpOde | Preset::Quadratic => 1,
            Preset::Damage => 4,
            Preset::DoubleWell => 8,
            Preset::Heat => 65,
            Preset::AcGurtin => 33,
        }
    }

    fn default_horizon(self) -> f64 {
        match self {
            Preset::Heat | Preset::AcGurtin => 0.1,
            _ => 1.0,
        }
    }

    fn default_taus(self) -> Vec<f64> {
        match self {
            Preset::BpOde | Preset::Quadratic => vec![0.1, 0.05, 0.025],
            Preset::Damage | Preset::DoubleWell => vec![0.1],
            Preset::Heat | Preset::AcGurtin => vec![1e-3],
        }
    }

    fn default_u0(self, grid: &GridMeasure, length: f64) -> Vec<f64> {
        let n = grid.node_count();
        match self {
            Preset::BpOde => vec![2.0; n],
            Preset::Quadratic => vec![1.0; n],
            // a ramp crossing 0 exercises both moving and frozen nodes
            Preset::Damage => linspace(2.0, -1.0, n),
            Preset::DoubleWell => linspace(1.5, -1.5, n),
            Preset::Heat | Preset::AcGurtin => grid
                .labels()
                .expect("interval grids carry labels")
                .iter()
                .map(|&x| (PI * x / length).cos())
                .collect(),
        }
    }
}

impl Params {
    fn check_allowed(&self, preset: Preset) -> Result<()> {
        let allowed: &[&str] = match preset {
            Preset::BpOde | Preset::Damage => &["lambda", "nodes"],
            Preset::Quadratic => &["lambda", "p", "nodes"],
            Preset::DoubleWell => &["well", "nodes"],
            Preset::Heat => &["L", "nodes"],
            Preset::AcGurtin => &["p", "well", "L", "nodes"],
        };
        let present: [(&str, bool); 5] = [
            ("lambda", self.lambda.is_some()),
            ("p", self.p.is_some()),
            ("well", self.well.is_some()),
            ("L", self.length.is_some()),
            ("nodes", self.nodes.is_some()),
        ];
        for (key, is_set) in present {
            if is_set && !allowed.contains(&key) {
                return Err(Error::Config(format!(
                    "params.{key}: not used by preset `{}`",
                    preset.name()
                )));
            }
        }
        Ok(())
    }
}

fn positive_or(value: Option<f64>, default: f64, field: &str) -> Result<f64> {
    let v = value.unwrap_or(default);
    if !(v > 0.0) || !v.is_finite() {
        return Err(Error::Config(format!("{field}: {v} (need > 0)")));
    }
    Ok(v)
}

fn linspace(from: f64, to: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![from];
    }
    (0..n)
        .map(|i| from + (to - from) * i as f64 / (n - 1) as f64)
        .collect()
}
