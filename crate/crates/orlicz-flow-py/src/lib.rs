//! Python bindings for the gradient-flow toolkit: grids, the convex-function
//! catalog with growth probes, Orlicz modulars and norms, dissipation
//! potentials, energies, the minimizing-movement solver, and the
//! energy-dissipation-balance report.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;

use orlicz_flow::config::ExperimentConfig;
use orlicz_flow::edb::edb_report;
use orlicz_flow::norms::{conjugate_modular_gap, holder_check};
use orlicz_flow::runner::{parse_potential, probe_potential, run_experiment};
use orlicz_flow::solver::run_scheme;
use orlicz_flow::{
    amemiya_norm, check, integrate, luxemburg_norm, make_grid, modular, ConvexScalarFn,
    DiscreteSolution, DissipationPotential, EnergyFunctional, GridMeasure, Interpolant,
    OrliczIntegrand, TimeScale, Tolerances,
};

fn err(e: orlicz_flow::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

/// A finite weighted grid (discrete measure).
#[pyclass(name = "Grid", from_py_object)]
#[derive(Clone)]
struct PyGrid {
    inner: GridMeasure,
}

#[pymethods]
impl PyGrid {
    #[new]
    #[pyo3(signature = (weights, labels=None))]
    fn new(weights: Vec<f64>, labels: Option<Vec<f64>>) -> PyResult<Self> {
        Ok(PyGrid {
            inner: make_grid(weights, labels).map_err(err)?,
        })
    }

    /// Uniform interval grid with trapezoidal end weights and node labels.
    #[staticmethod]
    fn uniform_interval(n: usize, length: f64) -> PyResult<Self> {
        Ok(PyGrid {
            inner: GridMeasure::uniform_interval(n, length).map_err(err)?,
        })
    }

    #[getter]
    fn node_count(&self) -> usize {
        self.inner.node_count()
    }

    #[getter]
    fn weights(&self) -> Vec<f64> {
        self.inner.weights().to_vec()
    }

    #[getter]
    fn labels(&self) -> Option<Vec<f64>> {
        self.inner.labels().map(<[f64]>::to_vec)
    }

    #[getter]
    fn mass(&self) -> f64 {
        self.inner.mass()
    }

    /// Weighted sum `Σ wᵢ f[i]`.
    fn integrate(&self, f: Vec<f64>) -> PyResult<f64> {
        integrate(&f, &self.inner).map_err(err)
    }

    fn __repr__(&self) -> String {
        format!("Grid(nodes={}, mass={})", self.inner.node_count(), self.inner.mass())
    }
}

/// A convex scalar function from the catalog, with exact subdifferentials,
/// Legendre transforms, and growth probes.
#[pyclass(name = "ConvexFn", from_py_object)]
#[derive(Clone)]
struct PyConvexFn {
    inner: ConvexScalarFn,
}

#[pymethods]
impl PyConvexFn {
    /// Builds a catalog entry from its name, e.g. `"power:2"`, `"bp_primal"`,
    /// `"indicator_ball:1.5"`.
    #[new]
    fn new(spec: &str) -> PyResult<Self> {
        let (_, f) = parse_potential(spec).map_err(err)?;
        Ok(PyConvexFn { inner: f })
    }

    fn __call__(&self, x: f64) -> f64 {
        self.inner.eval(x)
    }

    #[getter]
    fn name(&self) -> String {
        self.inner.name()
    }

    #[getter]
    fn domain(&self) -> (f64, f64) {
        self.inner.domain()
    }

    #[getter]
    fn is_even(&self) -> bool {
        self.inner.is_even()
    }

    /// Subdifferential interval `[lo, hi]` at `x`, or `None` outside the
    /// effective domain.
    fn subdifferential(&self, x: f64) -> Option<(f64, f64)> {
        let s = self.inner.subdifferential(x);
        if s.is_empty() {
            None
        } else {
            Some((s.lo, s.hi))
        }
    }

    /// Exact convex conjugate.
    fn conjugate(&self) -> PyResult<Self> {
        Ok(PyConvexFn {
            inner: self.inner.conjugate().map_err(err)?,
        })
    }

    /// Numeric Legendre transform `sup_v (xi·v − f(v))` over a bracket.
    #[pyo3(signature = (xi, lo=-10.0, hi=10.0, tol=1e-11))]
    fn legendre_numeric(&self, xi: f64, lo: f64, hi: f64, tol: f64) -> PyResult<f64> {
        self.inner.legendre_numeric(xi, (lo, hi), tol).map_err(err)
    }

    /// Doubling-condition probe: dict with `passes`, `k`, `ratio_trace`.
    fn delta2<'py>(&self, py: Python<'py>, samples: Vec<f64>) -> PyResult<Bound<'py, PyDict>> {
        let r = self.inner.delta2_probe(&samples).map_err(err)?;
        let d = PyDict::new(py);
        d.set_item("passes", r.passes)?;
        d.set_item("k", r.k)?;
        d.set_item("ratio_trace", r.ratio_trace)?;
        Ok(d)
    }

    /// Whether `θ·f(v/θ) → ∞` along the default scaling sequence.
    fn superlinear(&self, direction: f64) -> PyResult<bool> {
        Ok(self
            .inner
            .superlinearity_probe(direction, &orlicz_flow::convex::DEFAULT_THETA_SEQ)
            .map_err(err)?
            .superlinear)
    }

    /// Minimum of `f` on `|x| = r`.
    fn coercivity(&self, r: f64) -> PyResult<f64> {
        self.inner.coercivity_probe(r).map_err(err)
    }

    fn __repr__(&self) -> String {
        format!("ConvexFn({})", self.inner.name())
    }
}

/// A modular space: one catalog density per grid node.
#[pyclass(name = "OrliczSpace", from_py_object)]
#[derive(Clone)]
struct PySpace {
    inner: OrliczIntegrand,
}

#[pymethods]
impl PySpace {
    #[new]
    fn new(f: PyConvexFn, grid: PyGrid) -> Self {
        PySpace {
            inner: OrliczIntegrand::uniform(f.inner, grid.inner),
        }
    }

    /// Modular `ρ(u) = Σ wᵢ f(uᵢ)`.
    fn modular(&self, u: Vec<f64>) -> PyResult<f64> {
        modular(&self.inner, &u).map_err(err)
    }

    /// Luxemburg norm `inf {λ > 0 : ρ(u/λ) ≤ 1}`.
    #[pyo3(signature = (u, tol=1e-10))]
    fn luxemburg(&self, u: Vec<f64>, tol: f64) -> PyResult<f64> {
        luxemburg_norm(&self.inner, &u, tol).map_err(err)
    }

    /// Amemiya norm `inf_{λ>0} λ(1 + ρ(u/λ))`.
    #[pyo3(signature = (u, tol=1e-10))]
    fn amemiya(&self, u: Vec<f64>, tol: f64) -> PyResult<f64> {
        amemiya_norm(&self.inner, &u, tol).map_err(err)
    }

    /// Hölder estimate `∫|uv| ≤ 2‖u‖_φ‖v‖_φ*`: returns `(lhs, rhs, holds)`.
    #[pyo3(signature = (u, v, tol=1e-10))]
    fn holder(&self, u: Vec<f64>, v: Vec<f64>, tol: f64) -> PyResult<(f64, f64, bool)> {
        let r = holder_check(&self.inner, &u, &v, tol).map_err(err)?;
        Ok((r.lhs, r.rhs, r.holds))
    }

    /// Gap of `ρ*(v) = sup_u (∫uv − ρ(u))` against the nodewise conjugate.
    #[pyo3(signature = (v, tol=1e-10))]
    fn conjugate_modular_gap(&self, v: Vec<f64>, tol: f64) -> PyResult<f64> {
        conjugate_modular_gap(&self.inner, &v, tol).map_err(err)
    }
}

/// A dissipation potential `φ_t(v)` over a fixed grid.
#[pyclass(name = "Potential", from_py_object)]
#[derive(Clone)]
struct PyPotential {
    inner: DissipationPotential,
}

#[pymethods]
impl PyPotential {
    /// Superlinear kinetic potential `v·asinh(v) − √(v²+1) + 1` nodewise.
    #[staticmethod]
    fn bp(grid: PyGrid) -> Self {
        PyPotential {
            inner: DissipationPotential::bp(grid.inner),
        }
    }

    /// Unidirectional quadratic potential (rates constrained to `v ≤ 0`).
    #[staticmethod]
    fn damage(grid: PyGrid) -> Self {
        PyPotential {
            inner: DissipationPotential::damage(grid.inner),
        }
    }

    /// Autonomous nodewise potential with one density at every node.
    #[staticmethod]
    fn nodewise(f: PyConvexFn, grid: PyGrid) -> PyResult<Self> {
        Ok(PyPotential {
            inner: DissipationPotential::autonomous_nodewise(OrliczIntegrand::uniform(
                f.inner, grid.inner,
            ))
            .map_err(err)?,
        })
    }

    /// Nodewise potential scaled by `exp(rate·t)`.
    #[staticmethod]
    fn nodewise_exp_scaled(f: PyConvexFn, grid: PyGrid, rate: f64) -> PyResult<Self> {
        Ok(PyPotential {
            inner: DissipationPotential::time_modulated(
                OrliczIntegrand::uniform(f.inner, grid.inner),
                TimeScale::Exp { rate },
            )
            .map_err(err)?,
        })
    }

    #[getter]
    fn label(&self) -> String {
        self.inner.label().to_string()
    }

    /// `φ_{t,u}(v)`.
    fn primal(&self, t: f64, u: Vec<f64>, v: Vec<f64>) -> PyResult<f64> {
        self.inner.eval_primal(t, &u, &v).map_err(err)
    }

    /// `φ*_{t,u}(xi)`.
    fn conjugate_value(&self, t: f64, u: Vec<f64>, xi: Vec<f64>) -> PyResult<f64> {
        self.inner.eval_conjugate(t, &u, &xi).map_err(err)
    }
}

/// An energy functional `E_t(u)` on a fixed grid.
#[pyclass(name = "Energy", from_py_object)]
#[derive(Clone)]
struct PyEnergy {
    inner: EnergyFunctional,
}

#[pymethods]
impl PyEnergy {
    /// `λ/2 ∫u² dμ + offset`.
    #[staticmethod]
    fn quadratic(grid: PyGrid, lam: f64) -> PyResult<Self> {
        Ok(PyEnergy {
            inner: EnergyFunctional::quadratic(grid.inner, lam).map_err(err)?,
        })
    }

    /// `scale/4 ∫(u² − 1)² dμ + offset`.
    #[staticmethod]
    fn double_well(grid: PyGrid, scale: f64) -> PyResult<Self> {
        Ok(PyEnergy {
            inner: EnergyFunctional::double_well(grid.inner, scale).map_err(err)?,
        })
    }

    /// `Σ h·|Δu/h|ᵖ/p + offset` over interval links.
    #[staticmethod]
    fn p_dirichlet(grid: PyGrid, p: f64, h: f64) -> PyResult<Self> {
        Ok(PyEnergy {
            inner: EnergyFunctional::p_dirichlet(grid.inner, p, h).map_err(err)?,
        })
    }

    /// `∫ slope·u dμ + offset`.
    #[staticmethod]
    fn linear(grid: PyGrid, slope: Vec<f64>) -> PyResult<Self> {
        Ok(PyEnergy {
            inner: EnergyFunctional::linear(grid.inner, slope).map_err(err)?,
        })
    }

    /// Same energy with the additive offset replaced.
    fn with_offset(&self, offset: f64) -> Self {
        PyEnergy {
            inner: self.inner.clone().with_offset(offset),
        }
    }

    fn value(&self, t: f64, u: Vec<f64>) -> PyResult<f64> {
        self.inner.energy_value(t, &u).map_err(err)
    }

    /// μ-weighted gradient (minimal-norm selection at kinks).
    fn gradient(&self, t: f64, u: Vec<f64>) -> PyResult<Vec<f64>> {
        self.inner.gradient(t, &u).map_err(err)
    }
}

/// A computed minimizing-movement trajectory.
#[pyclass(name = "Solution")]
struct PySolution {
    inner: DiscreteSolution,
}

#[pymethods]
impl PySolution {
    #[getter]
    fn times(&self) -> Vec<f64> {
        self.inner.partition().nodes().to_vec()
    }

    #[getter]
    fn states(&self) -> Vec<Vec<f64>> {
        self.inner.states().to_vec()
    }

    #[getter]
    fn multipliers(&self) -> Vec<Vec<f64>> {
        self.inner.multipliers().to_vec()
    }

    /// Evaluates an interpolant at time `t`; `which` is one of
    /// `"left"`, `"right"`, `"affine"`, `"variational"`.
    #[pyo3(signature = (t, which="affine"))]
    fn interpolate(&self, t: f64, which: &str) -> PyResult<Vec<f64>> {
        let kind = match which {
            "left" => Interpolant::Left,
            "right" => Interpolant::Right,
            "affine" => Interpolant::Affine,
            "variational" => Interpolant::Variational,
            other => {
                return Err(PyValueError::new_err(format!(
                    "unknown interpolant `{other}` (left|right|affine|variational)"
                )))
            }
        };
        self.inner.interpolate(t, kind).map_err(err)
    }

    /// Energy-dissipation-balance report as a dict: classification,
    /// residuals, per-step energies and duality gaps.
    #[pyo3(signature = (tol=None))]
    fn report<'py>(&self, py: Python<'py>, tol: Option<f64>) -> PyResult<Bound<'py, PyDict>> {
        let r = edb_report(&self.inner, tol).map_err(err)?;
        let d = PyDict::new(py);
        d.set_item("classification", format!("{:?}", r.classification).to_lowercase())?;
        d.set_item("tol_used", r.tol_used)?;
        d.set_item("cumulative_residual", r.cumulative_residual)?;
        d.set_item("max_interval_residual", r.max_interval_residual)?;
        d.set_item("max_abs_interval_residual", r.max_abs_interval_residual)?;
        d.set_item("energies", r.energies)?;
        d.set_item("fy_gaps", r.fy_gaps)?;
        let residuals: Vec<f64> = r.per_interval.iter().map(|iv| iv.residual).collect();
        d.set_item("interval_residuals", residuals)?;
        Ok(d)
    }

    fn __repr__(&self) -> String {
        format!(
            "Solution(steps={}, nodes={})",
            self.inner.partition().step_count(),
            self.inner.states().first().map_or(0, Vec::len)
        )
    }
}

/// Runs the minimizing-movement scheme on the uniform partition of
/// `[0, t_end]` with step `tau`.
#[pyfunction]
#[pyo3(signature = (potential, energy, u0, t_end, tau, inner_tol=None, allow_multiminimizer=false))]
fn solve(
    potential: PyPotential,
    energy: PyEnergy,
    u0: Vec<f64>,
    t_end: f64,
    tau: f64,
    inner_tol: Option<f64>,
    allow_multiminimizer: bool,
) -> PyResult<PySolution> {
    let mut opts = Tolerances::default();
    if let Some(x) = inner_tol {
        opts.inner_tol = x;
    }
    opts.allow_multiminimizer = allow_multiminimizer;
    let sol = run_scheme(&potential.inner, &energy.inner, &u0, t_end, tau, &opts)
        .map_err(|fail| err(fail.error))?;
    Ok(PySolution { inner: sol })
}

/// Doubling/superlinearity/coercivity probes for a named potential,
/// as a JSON string (same payload as the CLI `probe` subcommand).
#[pyfunction]
fn probe(spec: &str) -> PyResult<String> {
    probe_potential(spec).map_err(err)
}

/// Runs a JSON experiment config end to end, writing the trajectory CSV,
/// balance report, and summary per step size; returns
/// `[(tau, directory, failed), ...]`.
#[pyfunction]
#[pyo3(signature = (config_json, out_dir=None))]
fn run_config(config_json: &str, out_dir: Option<String>) -> PyResult<Vec<(f64, String, bool)>> {
    let mut exp = ExperimentConfig::from_json(config_json)
        .and_then(|c| c.resolve())
        .map_err(err)?;
    if let Some(dir) = out_dir {
        exp.output_dir = dir.into();
    }
    let outcome = run_experiment(&exp).map_err(err)?;
    Ok(outcome
        .records
        .into_iter()
        .map(|r| (r.tau, r.dir.display().to_string(), r.failed))
        .collect())
}

/// Runs the built-in acceptance suite; returns `[(name, pass, detail), ...]`.
#[pyfunction]
fn acceptance_check() -> Vec<(String, bool, String)> {
    check::run_all()
        .into_iter()
        .map(|r| (r.name.to_string(), r.pass, r.detail))
        .collect()
}

#[pymodule]
fn orlicz_flow_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyGrid>()?;
    m.add_class::<PyConvexFn>()?;
    m.add_class::<PySpace>()?;
    m.add_class::<PyPotential>()?;
    m.add_class::<PyEnergy>()?;
    m.add_class::<PySolution>()?;
    m.add_function(wrap_pyfunction!(solve, m)?)?;
    m.add_function(wrap_pyfunction!(probe, m)?)?;
    m.add_function(wrap_pyfunction!(run_config, m)?)?;
    m.add_function(wrap_pyfunction!(acceptance_check, m)?)?;
    Ok(())
}
