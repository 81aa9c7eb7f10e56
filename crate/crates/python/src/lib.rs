//! Python bindings: graphs, Gaussian and spin ground states, and scenario runs.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use entconn::cli::{self, Parsed};
use entconn::experiments;
use entconn::graph::{self, half_partition};
use entconn::{gaussian, numerics, spin, BondConvention, PartitionMask, PartitionScheme};

fn py_err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn parse_enum<T: std::str::FromStr<Err = String>>(s: &str) -> PyResult<T> {
    s.parse().map_err(py_err)
}

#[pyclass(name = "CouplingGraph", module = "entconn", frozen)]
struct PyGraph {
    inner: entconn::CouplingGraph,
}

#[pymethods]
impl PyGraph {
    #[staticmethod]
    #[pyo3(signature = (n, n_c, boundary = "open", bond_convention = "single"))]
    fn chain(n: usize, n_c: usize, boundary: &str, bond_convention: &str) -> PyResult<Self> {
        let inner = graph::build_chain_with(n, n_c, parse_enum(boundary)?, parse_enum(bond_convention)?)
            .map_err(py_err)?;
        Ok(PyGraph { inner })
    }

    #[staticmethod]
    fn random(n: usize, c_p: f64, seed: u64) -> PyResult<Self> {
        let inner = graph::build_random(n, c_p, &mut ChaCha8Rng::seed_from_u64(seed)).map_err(py_err)?;
        Ok(PyGraph { inner })
    }

    #[staticmethod]
    fn bipartite_random(n: usize, c_p: f64, seed: u64) -> PyResult<Self> {
        let inner =
            graph::build_bipartite_random(n, c_p, &mut ChaCha8Rng::seed_from_u64(seed)).map_err(py_err)?;
        Ok(PyGraph { inner })
    }

    #[staticmethod]
    fn bipartite_regular(n: usize, n_c: usize) -> PyResult<Self> {
        Ok(PyGraph {
            inner: graph::build_bipartite_regular(n, n_c).map_err(py_err)?,
        })
    }

    #[staticmethod]
    #[pyo3(signature = (n, bond_convention = "single"))]
    fn complete(n: usize, bond_convention: &str) -> PyResult<Self> {
        let conv: BondConvention = parse_enum(bond_convention)?;
        Ok(PyGraph {
            inner: entconn::CouplingGraph::complete(n, conv),
        })
    }

    #[staticmethod]
    fn from_weights(rows: Vec<Vec<f64>>) -> PyResult<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(py_err("weight matrix must be square"));
        }
        let m = nalgebra::DMatrix::from_fn(n, n, |i, j| rows[i][j]);
        Ok(PyGraph {
            inner: entconn::CouplingGraph::from_weights(m).map_err(py_err)?,
        })
    }

    #[staticmethod]
    fn from_edge_list(text: &str) -> PyResult<Self> {
        Ok(PyGraph {
            inner: entconn::CouplingGraph::from_edge_list(text).map_err(py_err)?,
        })
    }

    /// New graph with every edge weight drawn uniformly from `[lo, hi]`.
    fn with_random_weights(&self, lo: f64, hi: f64, seed: u64) -> PyResult<Self> {
        let inner = graph::assign_random_weights(&self.inner, &mut ChaCha8Rng::seed_from_u64(seed), lo, hi)
            .map_err(py_err)?;
        Ok(PyGraph { inner })
    }

    #[getter]
    fn n(&self) -> usize {
        self.inner.n()
    }

    fn edges(&self) -> Vec<(usize, usize, f64)> {
        self.inner.edges().collect()
    }

    fn weights(&self) -> Vec<Vec<f64>> {
        let w = self.inner.weights();
        (0..w.nrows()).map(|i| w.row(i).iter().copied().collect()).collect()
    }

    fn degree(&self, i: usize) -> PyResult<usize> {
        if i >= self.inner.n() {
            return Err(py_err(format!("site {i} out of range")));
        }
        Ok(self.inner.degree(i))
    }

    fn is_connected(&self) -> bool {
        self.inner.is_connected()
    }

    fn to_edge_list(&self) -> String {
        self.inner.to_edge_list()
    }

    fn __len__(&self) -> usize {
        self.inner.n()
    }

    fn __repr__(&self) -> String {
        format!("CouplingGraph(n={}, edges={})", self.inner.n(), self.inner.edge_count())
    }
}

/// A partition given either as a scheme name or as a list of ±1 signs.
fn mask_from(n: usize, partition: &Bound<'_, PyAny>) -> PyResult<PartitionMask> {
    if let Ok(name) = partition.extract::<String>() {
        let scheme: PartitionScheme = parse_enum(&name)?;
        return half_partition(n, scheme).map_err(py_err);
    }
    let signs: Vec<i8> = partition.extract()?;
    PartitionMask::new(signs).map_err(py_err)
}

#[pyfunction]
#[pyo3(signature = (graph, alpha, partition = None))]
fn log_negativity(graph: &PyGraph, alpha: f64, partition: Option<&Bound<'_, PyAny>>) -> PyResult<f64> {
    let n = graph.inner.n();
    let mask = match partition {
        Some(p) => mask_from(n, p)?,
        None => half_partition(n, PartitionScheme::Contiguous).map_err(py_err)?,
    };
    gaussian::logneg_of_graph(&graph.inner, alpha, &mask).map_err(py_err)
}

/// `(lhs, rhs, residual)` of the Gaussian tangle budget of one mode.
#[pyfunction]
#[pyo3(signature = (graph, alpha, mode = 0))]
fn gaussian_monogamy(graph: &PyGraph, alpha: f64, mode: usize) -> PyResult<(f64, f64, f64)> {
    let gs = gaussian::ground_state(&gaussian::build_potential(&graph.inner, alpha).map_err(py_err)?)
        .map_err(py_err)?;
    let b = gaussian::monogamy_budget_for(&gs, mode).map_err(py_err)?;
    Ok((b.lhs, b.rhs, b.residual))
}

#[pyfunction]
fn logneg_bipartite_exact(n: usize, n_c: usize, alpha: f64) -> PyResult<f64> {
    gaussian::logneg_bipartite_exact(n, n_c, alpha).map_err(py_err)
}

#[pyfunction]
fn logneg_bipartite_asymptotic(n: usize, n_c: usize, alpha: f64) -> PyResult<f64> {
    gaussian::logneg_bipartite_asymptotic(n, n_c, alpha).map_err(py_err)
}

#[pyfunction]
#[pyo3(signature = (n, alpha, bond_convention = "single"))]
fn logneg_complete_closed_form(n: usize, alpha: f64, bond_convention: &str) -> PyResult<f64> {
    Ok(gaussian::logneg_complete_closed_form(n, alpha, parse_enum(bond_convention)?))
}

#[pyfunction]
#[pyo3(signature = (alpha, n_c, tol = numerics::DEFAULT_QUAD_TOL))]
fn f_curve(alpha: f64, n_c: usize, tol: f64) -> PyResult<f64> {
    numerics::quad_abs_log(alpha, n_c, tol).map_err(py_err)
}

#[pyclass(name = "SpinState", module = "entconn", frozen)]
struct PySpinState {
    inner: entconn::SpinState,
    degeneracy: usize,
}

#[pymethods]
impl PySpinState {
    #[getter]
    fn n(&self) -> usize {
        self.inner.n()
    }

    #[getter]
    fn energy(&self) -> Option<f64> {
        self.inner.energy()
    }

    /// Number of up spins of the sector holding the state.
    #[getter]
    fn sector(&self) -> Option<usize> {
        self.inner.sector_k()
    }

    /// Additional ground levels within tolerance (0 = unique).
    #[getter]
    fn degeneracy(&self) -> usize {
        self.degeneracy
    }

    /// Amplitudes over all `2**n` configurations; bit `i` is site `i`.
    fn amplitudes(&self) -> Vec<f64> {
        self.inner.to_full()
    }

    fn entanglement_entropy(&self, subset: Vec<usize>) -> PyResult<f64> {
        spin::entanglement_entropy(&self.inner, &subset).map_err(py_err)
    }

    fn one_vs_rest_tangle(&self, site: usize) -> PyResult<f64> {
        spin::one_vs_rest_tangle(&self.inner, site).map_err(py_err)
    }

    fn two_qubit_tangle(&self, i: usize, j: usize) -> PyResult<f64> {
        let rho = spin::reduced_density(&self.inner, &[i, j]).map_err(py_err)?;
        spin::two_qubit_tangle(&rho).map_err(py_err)
    }

    /// `(lhs, rhs)` of the qubit tangle budget of one site.
    fn monogamy(&self, site: usize) -> PyResult<(f64, f64)> {
        let b = spin::monogamy_budget_spin(&self.inner, site).map_err(py_err)?;
        Ok((b.lhs, b.rhs))
    }

    fn __repr__(&self) -> String {
        format!(
            "SpinState(n={}, energy={:?}, sector={:?})",
            self.inner.n(),
            self.inner.energy(),
            self.inner.sector_k()
        )
    }
}

#[pyfunction]
fn spin_ground_state(graph: &PyGraph) -> PyResult<PySpinState> {
    let sol = spin::ground_state_with_degeneracy(&graph.inner).map_err(py_err)?;
    Ok(PySpinState {
        inner: sol.state,
        degeneracy: sol.degeneracy,
    })
}

#[pyfunction]
#[pyo3(signature = (graph, tol = None))]
fn spin_degeneracy(graph: &PyGraph, tol: Option<f64>) -> PyResult<usize> {
    spin::degeneracy(&graph.inner, tol).map_err(py_err)
}

/// Runs a scenario given command-line style arguments, e.g.
/// `run_scenario(["spin-random", "--n", "8"])`, and returns one dict per row
/// of the aggregated table.
#[pyfunction]
fn run_scenario<'py>(py: Python<'py>, args: Vec<String>) -> PyResult<Vec<Bound<'py, PyDict>>> {
    let argv = std::iter::once("entconn".to_string()).chain(args);
    let inv = match cli::parse(argv) {
        Ok(Parsed::Run(inv)) => inv,
        Ok(Parsed::Help(text)) => return Err(py_err(text)),
        Err(e) => return Err(py_err(e)),
    };
    let cfg = inv.config;
    let records = py.detach(|| experiments::run_scenario(&cfg)).map_err(py_err)?;
    let mut aggs = experiments::aggregate(&records);
    if cfg.normalize {
        experiments::normalize_series(&mut aggs);
    }
    aggs.iter()
        .map(|a| {
            let d = PyDict::new(py);
            d.set_item("alpha", a.alpha)?;
            d.set_item("sweep_value", a.sweep_value)?;
            d.set_item("mean", a.mean)?;
            d.set_item("max", a.max)?;
            d.set_item("stddev", a.stddev)?;
            d.set_item("n_seeds", a.n_seeds)?;
            d.set_item("filtered_mean", a.filtered_mean)?;
            d.set_item("energy_mean", a.energy_mean)?;
            d.set_item("degeneracy_mean", a.degeneracy_mean)?;
            d.set_item("monogamy_lhs_mean", a.monogamy_lhs_mean)?;
            d.set_item("monogamy_rhs_mean", a.monogamy_rhs_mean)?;
            d.set_item("normalized", a.normalized)?;
            Ok(d)
        })
        .collect()
}

#[pymodule]
#[pyo3(name = "entconn")]
fn entconn_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyGraph>()?;
    m.add_class::<PySpinState>()?;
    m.add_function(wrap_pyfunction!(log_negativity, m)?)?;
    m.add_function(wrap_pyfunction!(gaussian_monogamy, m)?)?;
    m.add_function(wrap_pyfunction!(logneg_bipartite_exact, m)?)?;
    m.add_function(wrap_pyfunction!(logneg_bipartite_asymptotic, m)?)?;
    m.add_function(wrap_pyfunction!(logneg_complete_closed_form, m)?)?;
    m.add_function(wrap_pyfunction!(f_curve, m)?)?;
    m.add_function(wrap_pyfunction!(spin_ground_state, m)?)?;
    m.add_function(wrap_pyfunction!(spin_degeneracy, m)?)?;
    m.add_function(wrap_pyfunction!(run_scenario, m)?)?;
    Ok(())
}
