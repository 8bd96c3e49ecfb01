//! Python bindings for the epinet toolkit: the graph type, the generators,
//! the epidemic engines, and the threshold/bound calculators, plus a
//! JSON-in/JSON-out wrapper around the experiment harness.

use std::fmt::Display;
use std::sync::Arc;

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;

use epinet::epidemic::{self, EpidemicConfig, EpidemicOutcome, InfectiousPeriodLaw};
use epinet::generators;
use epinet::graph::Graph;
use epinet::harness;
use epinet::spectral::{self, ClosedFormFamily, SpectralOptions};
use epinet::theory;

fn value_error<E: Display>(err: E) -> PyErr {
    PyValueError::new_err(err.to_string())
}

fn parse_law(law: &str, contact_rate: f64) -> PyResult<InfectiousPeriodLaw> {
    let (kind, value) = law
        .split_once(':')
        .ok_or_else(|| PyValueError::new_err("law must look like det:<tau> or exp:<mu>"))?;
    let value: f64 = value.parse().map_err(value_error)?;
    match kind {
        "det" | "deterministic" => {
            InfectiousPeriodLaw::deterministic(contact_rate, value).map_err(value_error)
        }
        "exp" | "exponential" => {
            InfectiousPeriodLaw::exponential(contact_rate, value).map_err(value_error)
        }
        other => Err(PyValueError::new_err(format!("unknown law `{other}`"))),
    }
}

/// Immutable undirected simple graph.
#[pyclass(name = "Graph", module = "epinet_py", frozen)]
pub struct PyGraph {
    inner: Arc<Graph>,
}

impl PyGraph {
    fn wrap(graph: Graph) -> PyGraph {
        PyGraph {
            inner: Arc::new(graph),
        }
    }
}

#[pymethods]
impl PyGraph {
    #[new]
    fn new(n: usize, edges: Vec<(usize, usize)>) -> PyResult<Self> {
        Ok(PyGraph::wrap(Graph::build(n, &edges).map_err(value_error)?))
    }

    #[getter]
    fn node_count(&self) -> usize {
        self.inner.node_count()
    }

    #[getter]
    fn edge_count(&self) -> usize {
        self.inner.edge_count()
    }

    #[getter]
    fn dropped_self_loops(&self) -> usize {
        self.inner.dropped_self_loops()
    }

    fn degree(&self, u: usize) -> usize {
        self.inner.degree(u)
    }

    fn neighbors(&self, u: usize) -> Vec<usize> {
        self.inner.neighbors(u).iter().map(|&v| v as usize).collect()
    }

    fn has_edge(&self, u: usize, v: usize) -> bool {
        self.inner.has_edge(u, v)
    }

    /// `(min_degree, max_degree, mean_degree)` with mean exactly `2m/n`.
    fn degree_extremes(&self) -> (usize, usize, f64) {
        let stats = self.inner.degree_extremes();
        (stats.min, stats.max, stats.mean)
    }

    /// `(labels, sizes)`: per-node component id and per-component size.
    fn components(&self) -> (Vec<u32>, Vec<usize>) {
        let labeling = self.inner.components();
        (labeling.labels().to_vec(), labeling.sizes().to_vec())
    }

    fn largest_component(&self) -> (usize, Vec<usize>) {
        self.inner.largest_component()
    }

    fn edges(&self) -> Vec<(usize, usize)> {
        self.inner
            .edges()
            .map(|(u, v)| (u as usize, v as usize))
            .collect()
    }

    fn to_edge_list(&self) -> String {
        self.inner.format_edge_list()
    }

    #[staticmethod]
    fn from_edge_list(text: &str) -> PyResult<PyGraph> {
        Ok(PyGraph::wrap(
            Graph::parse_edge_list(text).map_err(value_error)?,
        ))
    }

    fn __repr__(&self) -> String {
        format!(
            "Graph(n={}, m={})",
            self.inner.node_count(),
            self.inner.edge_count()
        )
    }
}

#[pyfunction]
fn star(n: usize) -> PyResult<PyGraph> {
    Ok(PyGraph::wrap(generators::star(n).map_err(value_error)?))
}

#[pyfunction]
fn ring(n: usize) -> PyResult<PyGraph> {
    Ok(PyGraph::wrap(generators::ring(n).map_err(value_error)?))
}

#[pyfunction]
fn complete(n: usize) -> PyResult<PyGraph> {
    Ok(PyGraph::wrap(generators::complete(n).map_err(value_error)?))
}

#[pyfunction]
#[pyo3(signature = (n, p, seed = 0))]
fn erdos_renyi(n: usize, p: f64, seed: u64) -> PyResult<PyGraph> {
    Ok(PyGraph::wrap(
        generators::erdos_renyi(n, p, seed).map_err(value_error)?,
    ))
}

/// Power-law weight sequence; returns `(weights, scale_c, shift_i0)`.
#[pyfunction]
fn power_law_weights(
    n: usize,
    d: f64,
    max_degree: f64,
    gamma: f64,
) -> PyResult<(Vec<f64>, f64, f64)> {
    let w = generators::power_law_weights(n, d, max_degree, gamma).map_err(value_error)?;
    let params = w.params().expect("power-law weights carry parameters");
    Ok((w.weights().to_vec(), params.scale, params.shift))
}

/// Expected-degree graph with explicit power-law weights.
#[pyfunction]
#[pyo3(signature = (n, d, max_degree, gamma, seed = 0))]
fn chung_lu(n: usize, d: f64, max_degree: f64, gamma: f64, seed: u64) -> PyResult<PyGraph> {
    let w = generators::power_law_weights(n, d, max_degree, gamma).map_err(value_error)?;
    Ok(PyGraph::wrap(generators::chung_lu(&w, seed)))
}

/// Pareto kernel graph; returns `(graph, marks, clamp_activations)`.
#[pyfunction]
#[pyo3(signature = (n, gamma, seed = 0))]
fn pareto_kernel_graph(n: usize, gamma: f64, seed: u64) -> PyResult<(PyGraph, Vec<f64>, usize)> {
    let kernel = generators::KernelSpec::pareto(gamma, n).map_err(value_error)?;
    let sample = generators::kernel_graph(n, &kernel, seed).map_err(value_error)?;
    Ok((
        PyGraph::wrap(sample.graph),
        sample.marks,
        sample.clamp_activations,
    ))
}

/// Largest adjacency eigenvalue by power iteration; returns
/// `(lambda1, iterations, residual)`.
#[pyfunction]
#[pyo3(signature = (graph, tol = 1e-10, max_iter = None, seed = None))]
fn spectral_radius(
    graph: &PyGraph,
    tol: f64,
    max_iter: Option<usize>,
    seed: Option<u64>,
) -> PyResult<(f64, usize, f64)> {
    let report = spectral::spectral_radius(
        &graph.inner,
        &SpectralOptions {
            tol,
            max_iter,
            seed,
        },
    )
    .map_err(value_error)?;
    Ok((report.lambda1, report.iterations, report.residual))
}

#[pyfunction]
fn closed_form_radius(family: &str, n: usize) -> PyResult<f64> {
    let family = match family {
        "star" => ClosedFormFamily::Star,
        "ring" => ClosedFormFamily::Ring,
        "complete" => ClosedFormFamily::Complete,
        other => {
            return Err(PyValueError::new_err(format!("unknown family `{other}`")));
        }
    };
    spectral::closed_form_radius(family, n).map_err(value_error)
}

#[pyfunction]
fn clv_radius_estimate(d: f64, max_degree: f64, gamma: f64) -> PyResult<f64> {
    spectral::clv_radius_estimate(d, max_degree, gamma).map_err(value_error)
}

/// Quadrature norm of the Pareto kernel operator; returns
/// `(estimate, analytic)`.
#[pyfunction]
#[pyo3(signature = (gamma, n, resolution = 1024))]
fn kernel_operator_norm(gamma: f64, n: usize, resolution: usize) -> PyResult<(f64, f64)> {
    let kernel = generators::KernelSpec::pareto(gamma, n).map_err(value_error)?;
    let report = spectral::kernel_operator_norm(&kernel, resolution).map_err(value_error)?;
    Ok((report.value, report.analytic.unwrap_or(f64::NAN)))
}

fn outcome_dict<'py>(py: Python<'py>, outcome: &EpidemicOutcome) -> PyResult<Bound<'py, PyDict>> {
    let dict = PyDict::new(py);
    dict.set_item("final_removed", outcome.final_removed)?;
    dict.set_item("extinction_time", outcome.extinction_time)?;
    dict.set_item("removed", outcome.removed.clone())?;
    dict.set_item("trial_seed", outcome.trial_seed)?;
    Ok(dict)
}

#[pyfunction]
#[pyo3(signature = (graph, beta, initial, seed = 0))]
fn run_reed_frost<'py>(
    py: Python<'py>,
    graph: &PyGraph,
    beta: f64,
    initial: Vec<usize>,
    seed: u64,
) -> PyResult<Bound<'py, PyDict>> {
    let cfg = EpidemicConfig::new(beta, initial, seed).map_err(value_error)?;
    let outcome = epidemic::run_reed_frost(&graph.inner, &cfg).map_err(value_error)?;
    outcome_dict(py, &outcome)
}

#[pyfunction]
#[pyo3(signature = (graph, beta, initial, seed = 0))]
fn final_set_via_percolation<'py>(
    py: Python<'py>,
    graph: &PyGraph,
    beta: f64,
    initial: Vec<usize>,
    seed: u64,
) -> PyResult<Bound<'py, PyDict>> {
    let cfg = EpidemicConfig::new(beta, initial, seed).map_err(value_error)?;
    let outcome = epidemic::final_set_via_percolation(&graph.inner, &cfg).map_err(value_error)?;
    outcome_dict(py, &outcome)
}

#[pyfunction]
#[pyo3(signature = (graph, beta, seed = 0))]
fn percolate(graph: &PyGraph, beta: f64, seed: u64) -> PyResult<PyGraph> {
    Ok(PyGraph::wrap(
        epidemic::percolate(&graph.inner, beta, seed).map_err(value_error)?,
    ))
}

/// Continuous-time SIR with law "det:<tau>" or "exp:<mu>".
#[pyfunction]
#[pyo3(signature = (graph, contact_rate, law, initial, seed = 0))]
fn run_ct_sir<'py>(
    py: Python<'py>,
    graph: &PyGraph,
    contact_rate: f64,
    law: &str,
    initial: Vec<usize>,
    seed: u64,
) -> PyResult<Bound<'py, PyDict>> {
    let law = parse_law(law, contact_rate)?;
    let outcome = epidemic::run_ct_sir(&graph.inner, &law, &initial, seed).map_err(value_error)?;
    outcome_dict(py, &outcome)
}

/// `p_J = 1 - E[exp(-lambda J)]` for law "det:<tau>" or "exp:<mu>".
#[pyfunction]
fn effective_transmissibility(contact_rate: f64, law: &str) -> PyResult<f64> {
    Ok(epidemic::effective_transmissibility(&parse_law(
        law,
        contact_rate,
    )?))
}

#[pyfunction]
fn giant_fraction(c: f64) -> PyResult<f64> {
    theory::giant_fraction(c).map_err(value_error)
}

/// `None` when the bound's hypothesis fails.
#[pyfunction]
fn upper_bound_general(n: usize, lambda1: f64, beta: f64, x0: usize) -> Option<f64> {
    theory::upper_bound_general(n, lambda1, beta, x0)
        .value()
        .copied()
}

#[pyfunction]
fn upper_bound_regular(degree: f64, beta: f64, x0: usize) -> Option<f64> {
    theory::upper_bound_regular(degree, beta, x0).value().copied()
}

#[pyfunction]
fn epidemic_lower_bound_complete(n: usize, c: f64) -> PyResult<Option<f64>> {
    Ok(theory::epidemic_lower_bound_complete(n, c)
        .map_err(value_error)?
        .value()
        .copied())
}

/// `(size, vacuous)` or `None` when `gamma >= 3`.
#[pyfunction]
fn core_size(n: usize, beta: f64, d: f64, gamma: f64, delta: f64) -> PyResult<Option<(u64, bool)>> {
    Ok(theory::core_size(n, beta, d, gamma, delta)
        .map_err(value_error)?
        .value()
        .map(|core| (core.size, core.vacuous)))
}

/// `(beta_star, attainable)`.
#[pyfunction]
fn pareto_threshold(gamma: f64) -> PyResult<(f64, bool)> {
    let t = theory::pareto_threshold(gamma).map_err(value_error)?;
    Ok((t.beta_star, t.attainable))
}

/// Outbreak fraction of the Pareto kernel graph; returns
/// `(tau, criticality)`.
#[pyfunction]
#[pyo3(signature = (gamma, n, beta, resolution = 1024))]
fn kernel_outbreak_fraction(
    gamma: f64,
    n: usize,
    beta: f64,
    resolution: usize,
) -> PyResult<(f64, f64)> {
    let kernel = generators::KernelSpec::pareto(gamma, n).map_err(value_error)?;
    let sol = theory::kernel_outbreak_fraction(&kernel, beta, resolution).map_err(value_error)?;
    Ok((sol.tau, sol.criticality))
}

/// Asymptotic mean expected degree of the top-k subgraph.
#[pyfunction]
fn subgraph_mean_degree(k: usize, n: usize, beta: f64, d: f64, gamma: f64) -> PyResult<f64> {
    Ok(theory::subgraph_mean_degree(k, n, beta, d, gamma, None)
        .map_err(value_error)?
        .asymptotic)
}

/// Runs a full experiment from its JSON spec and returns the result JSON.
#[pyfunction]
fn run_experiment_json(spec_json: &str) -> PyResult<String> {
    let spec: harness::ExperimentSpec = serde_json::from_str(spec_json).map_err(value_error)?;
    let result = harness::run_experiment(&spec).map_err(value_error)?;
    serde_json::to_string(&result).map_err(value_error)
}

/// Runs the experiment and the theory comparison; returns the table JSON.
#[pyfunction]
fn compare_theory_json(spec_json: &str) -> PyResult<String> {
    let spec: harness::ExperimentSpec = serde_json::from_str(spec_json).map_err(value_error)?;
    let table = harness::compare_theory(&spec).map_err(value_error)?;
    serde_json::to_string(&table).map_err(value_error)
}

#[pymodule]
fn epinet_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyGraph>()?;
    m.add_function(wrap_pyfunction!(star, m)?)?;
    m.add_function(wrap_pyfunction!(ring, m)?)?;
    m.add_function(wrap_pyfunction!(complete, m)?)?;
    m.add_function(wrap_pyfunction!(erdos_renyi, m)?)?;
    m.add_function(wrap_pyfunction!(power_law_weights, m)?)?;
    m.add_function(wrap_pyfunction!(chung_lu, m)?)?;
    m.add_function(wrap_pyfunction!(pareto_kernel_graph, m)?)?;
    m.add_function(wrap_pyfunction!(spectral_radius, m)?)?;
    m.add_function(wrap_pyfunction!(closed_form_radius, m)?)?;
    m.add_function(wrap_pyfunction!(clv_radius_estimate, m)?)?;
    m.add_function(wrap_pyfunction!(kernel_operator_norm, m)?)?;
    m.add_function(wrap_pyfunction!(run_reed_frost, m)?)?;
    m.add_function(wrap_pyfunction!(final_set_via_percolation, m)?)?;
    m.add_function(wrap_pyfunction!(percolate, m)?)?;
    m.add_function(wrap_pyfunction!(run_ct_sir, m)?)?;
    m.add_function(wrap_pyfunction!(effective_transmissibility, m)?)?;
    m.add_function(wrap_pyfunction!(giant_fraction, m)?)?;
    m.add_function(wrap_pyfunction!(upper_bound_general, m)?)?;
    m.add_function(wrap_pyfunction!(upper_bound_regular, m)?)?;
    m.add_function(wrap_pyfunction!(epidemic_lower_bound_complete, m)?)?;
    m.add_function(wrap_pyfunction!(core_size, m)?)?;
    m.add_function(wrap_pyfunction!(pareto_threshold, m)?)?;
    m.add_function(wrap_pyfunction!(kernel_outbreak_fraction, m)?)?;
    m.add_function(wrap_pyfunction!(subgraph_mean_degree, m)?)?;
    m.add_function(wrap_pyfunction!(run_experiment_json, m)?)?;
    m.add_function(wrap_pyfunction!(compare_theory_json, m)?)?;
    Ok(())
}
