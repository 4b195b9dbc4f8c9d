//! Python bindings for `finbath`.
//!
//! States and spectra are passed as lists of floats. Structured results come
//! back as dicts; `run` returns the same JSON report as the binary.

use finbath::bath::{gamma_from, BathGrid, BathSpec};
use finbath::cli::{self, CommandName};
use finbath::detwork::{self, DEFAULT_ENERGY_GRID};
use finbath::flucwork::{self, Direction};
use finbath::lpopt;
use finbath::system::{self as sys, DiagonalState, Endpoint, SystemSpec};
use finbath::FinbathError;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

fn err(e: FinbathError) -> PyErr {
    match e {
        FinbathError::Argument(_) | FinbathError::Domain(_) | FinbathError::Size(_) => {
            PyValueError::new_err(e.to_string())
        }
        _ => PyRuntimeError::new_err(e.to_string()),
    }
}

fn direction(name: &str) -> PyResult<Direction> {
    match name {
        "extract" | "extraction" => Ok(Direction::Extraction),
        "form" | "formation" => Ok(Direction::Formation),
        other => Err(PyValueError::new_err(format!("direction must be 'extract' or 'form', got {other:?}"))),
    }
}

fn state(probs: Vec<f64>) -> PyResult<DiagonalState> {
    DiagonalState::new(probs).map_err(err)
}

fn spec(energies: Vec<f64>) -> PyResult<SystemSpec> {
    SystemSpec::new(energies).map_err(err)
}

/// A change of a diagonal system state, possibly with a new Hamiltonian.
#[pyclass(name = "Transition", frozen)]
struct PyTransition {
    inner: sys::Transition,
}

#[pymethods]
impl PyTransition {
    #[new]
    #[pyo3(signature = (energies, initial, target, target_energies=None))]
    fn new(energies: Vec<f64>, initial: Vec<f64>, target: Vec<f64>, target_energies: Option<Vec<f64>>) -> PyResult<Self> {
        let target_spec = spec(target_energies.unwrap_or_else(|| energies.clone()))?;
        let a = Endpoint::new(spec(energies)?, state(initial)?).map_err(err)?;
        let b = Endpoint::new(target_spec, state(target)?).map_err(err)?;
        Ok(Self {
            inner: sys::Transition::new(a, b),
        })
    }

    fn delta_entropy(&self) -> f64 {
        self.inner.delta_entropy()
    }

    fn delta_free_energy(&self, beta: f64) -> f64 {
        self.inner.delta_free_energy(beta)
    }

    fn second_law_bound(&self, beta: f64) -> f64 {
        flucwork::second_law_bound(&self.inner, beta)
    }

    fn theorem2_bound(&self, beta: f64, heat_capacity: f64) -> PyResult<f64> {
        flucwork::theorem2_bound(&self.inner, beta, heat_capacity).map_err(err)
    }

    fn theorem3_bound(&self, beta: f64, heat_capacity: f64, direction: &str) -> PyResult<f64> {
        flucwork::theorem3_bound(&self.inner, beta, heat_capacity, self::direction(direction)?).map_err(err)
    }

    /// Exact optimum over thermal operations on a discretized bath. The grid
    /// spans `span_sigmas` bath standard deviations, or `half_width` when
    /// given (required for an infinite heat capacity).
    #[pyo3(signature = (beta, heat_capacity, levels, span_sigmas=6.0, half_width=None))]
    fn optimize<'py>(
        &self,
        py: Python<'py>,
        beta: f64,
        heat_capacity: f64,
        levels: usize,
        span_sigmas: f64,
        half_width: Option<f64>,
    ) -> PyResult<Bound<'py, PyDict>> {
        let bath = BathSpec::new(beta, heat_capacity).map_err(err)?;
        let grid = match half_width {
            Some(h) => BathGrid::window(&bath, levels, h),
            None => BathGrid::discretize(&bath, levels, span_sigmas),
        }
        .map_err(err)?;
        let t = self.inner.clone();
        let sol = py.detach(|| lpopt::optimize(&t, &grid, beta)).map_err(err)?;
        let out = PyDict::new(py);
        out.set_item("status", sol.status.as_str())?;
        out.set_item("optimal_work", sol.optimal_work)?;
        out.set_item("iterations", sol.iterations)?;
        out.set_item("primal_residual", sol.primal_residual)?;
        out.set_item("duality_gap", sol.duality_gap)?;
        if sol.status != lpopt::LpStatus::Infeasible {
            let joint = lpopt::induced_joint(&sol.matrix, &t.initial.state, &grid);
            out.set_item("theorem1_bound", flucwork::theorem1_bound(&t, &joint, &grid, beta).map_err(err)?)?;
            out.set_item("bath_divergence", joint.divergence_from_product(&grid).map_err(err)?)?;
        }
        Ok(out)
    }

    /// Whether every scanned subspace allows the transition.
    #[pyo3(signature = (beta, gamma, epsilon, n_checks=DEFAULT_ENERGY_GRID))]
    fn possible(&self, beta: f64, gamma: f64, epsilon: f64, n_checks: usize) -> PyResult<bool> {
        let budget = detwork::EpsilonBudget::from_epsilon(beta, gamma, epsilon).map_err(err)?;
        Ok(detwork::transition_possible(&self.inner, beta, gamma, &budget, n_checks)
            .map_err(err)?
            .possible)
    }

    fn __repr__(&self) -> String {
        format!(
            "Transition({:?} -> {:?})",
            self.inner.initial.state.probs, self.inner.target.state.probs
        )
    }
}

#[pyfunction(name = "gamma_from")]
fn py_gamma_from(beta: f64, heat_capacity: f64) -> PyResult<f64> {
    gamma_from(beta, heat_capacity).map_err(err)
}

#[pyfunction]
fn reversibility_gap(probs: Vec<f64>, beta: f64, heat_capacity: f64) -> PyResult<f64> {
    flucwork::reversibility_gap(&state(probs)?, beta, heat_capacity).map_err(err)
}

#[pyfunction]
fn varentropy(probs: Vec<f64>) -> PyResult<f64> {
    Ok(sys::varentropy(&state(probs)?))
}

#[pyfunction]
fn thermal_state(energies: Vec<f64>, beta: f64) -> PyResult<Vec<f64>> {
    Ok(sys::thermal_state(&spec(energies)?, beta).probs)
}

#[pyfunction]
fn epsilon_of_estar(gamma: f64, e_star: f64) -> PyResult<f64> {
    detwork::epsilon_of_estar(gamma, e_star).map_err(err)
}

#[pyfunction]
fn estar_of_epsilon(gamma: f64, epsilon: f64) -> PyResult<f64> {
    detwork::estar_of_epsilon(gamma, epsilon).map_err(err)
}

#[pyfunction]
fn epsilon_asymptotic(gamma: f64, e_star: f64) -> PyResult<f64> {
    detwork::epsilon_asymptotic(gamma, e_star).map_err(err)
}

/// Vertices `(x, y)` of the thermomajorization curve in the subspace of
/// total energy `e_tot`.
#[pyfunction]
fn thermo_curve(probs: Vec<f64>, energies: Vec<f64>, beta: f64, gamma: f64, e_tot: f64) -> PyResult<Vec<(f64, f64)>> {
    Ok(detwork::thermo_curve(&state(probs)?, &spec(energies)?, beta, gamma, e_tot).vertices)
}

#[pyfunction]
fn dominates(p: Vec<f64>, q: Vec<f64>, energies: Vec<f64>, beta: f64, gamma: f64, e_tot: f64) -> PyResult<bool> {
    let s = spec(energies)?;
    let a = detwork::thermo_curve(&state(p)?, &s, beta, gamma, e_tot);
    let b = detwork::thermo_curve(&state(q)?, &s, beta, gamma, e_tot);
    detwork::dominates(&a, &b).map_err(err)
}

/// Deterministic work over the energy window fixed by `epsilon`.
#[pyfunction]
#[pyo3(signature = (probs, energies, beta, gamma, epsilon, direction="extract", n_grid=DEFAULT_ENERGY_GRID))]
#[allow(clippy::too_many_arguments)]
fn w_deterministic<'py>(
    py: Python<'py>,
    probs: Vec<f64>,
    energies: Vec<f64>,
    beta: f64,
    gamma: f64,
    epsilon: f64,
    direction: &str,
    n_grid: usize,
) -> PyResult<Bound<'py, PyDict>> {
    let r = detwork::w_deterministic(
        &state(probs)?,
        &spec(energies)?,
        beta,
        gamma,
        epsilon,
        self::direction(direction)?,
        n_grid,
    )
    .map_err(err)?;
    let out = PyDict::new(py);
    out.set_item("work", r.work)?;
    out.set_item("extremizer", r.extremizer)?;
    out.set_item("e_star", r.budget.e_star)?;
    out.set_item("monotonicity", format!("{:?}", r.monotonicity).to_lowercase())?;
    out.set_item("samples", r.samples)?;
    out.set_item("gaussian_ratio", r.gaussian_ratio)?;
    Ok(out)
}

/// Runs a CLI command on a JSON config string and returns the report text.
#[pyfunction]
fn run(py: Python<'_>, command: &str, config: &str) -> PyResult<String> {
    let cmd = match command {
        "bound" => CommandName::Bound,
        "optimize" => CommandName::Optimize,
        "detwork" => CommandName::Detwork,
        "epsilon" => CommandName::Epsilon,
        "curve" => CommandName::Curve,
        other => return Err(PyValueError::new_err(format!("unknown command {other:?}"))),
    };
    let (cfg, warnings) = cli::RunConfig::from_json(config).map_err(err)?;
    let report = py.detach(|| cli::run(cmd, &cfg, &warnings)).map_err(err)?;
    Ok(report.render())
}

#[pymodule]
fn finbath_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyTransition>()?;
    m.add_function(wrap_pyfunction!(py_gamma_from, m)?)?;
    m.add_function(wrap_pyfunction!(reversibility_gap, m)?)?;
    m.add_function(wrap_pyfunction!(varentropy, m)?)?;
    m.add_function(wrap_pyfunction!(thermal_state, m)?)?;
    m.add_function(wrap_pyfunction!(epsilon_of_estar, m)?)?;
    m.add_function(wrap_pyfunction!(estar_of_epsilon, m)?)?;
    m.add_function(wrap_pyfunction!(epsilon_asymptotic, m)?)?;
    m.add_function(wrap_pyfunction!(thermo_curve, m)?)?;
    m.add_function(wrap_pyfunction!(dominates, m)?)?;
    m.add_function(wrap_pyfunction!(w_deterministic, m)?)?;
    m.add_function(wrap_pyfunction!(run, m)?)?;
    Ok(())
}
