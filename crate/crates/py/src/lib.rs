//! Python bindings.  The module mirrors the command layer: closed
//! presentations, Poincaré-series tables, chain-level oracle tables, and the
//! JSON documents of the terminal commands.

use std::collections::HashMap;

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use stable_hhh_core::cli::{
    cmd_compute, cmd_mf_simplify, cmd_verify_identities, CliError, RunConfig,
};
use stable_hhh_core::hhh::{
    full_hhh, hh0_specialize, permutation_of_cycle_type, poincare_series,
    stable_homology_presentation, Permutation, StableHomologyPresentation,
};
use stable_hhh_core::mf::build_mn;
use stable_hhh_core::oracle::{homology_with_exterior, DimensionTable, Window};
use stable_hhh_core::poly::TriDegree;

fn run_err(e: CliError) -> PyErr {
    match e {
        CliError::Usage(_) => PyValueError::new_err(e.to_string()),
        other => PyRuntimeError::new_err(other.to_string()),
    }
}

fn tri(d: TriDegree) -> (i32, i32, i32) {
    (d.q, d.t, d.a)
}

// `Vec<u8>` would cross into Python as `bytes`; widen cycle data to plain ints.
fn lengths_in(lengths: Vec<u32>) -> PyResult<Vec<u8>> {
    lengths
        .into_iter()
        .map(|l| u8::try_from(l).map_err(|_| PyValueError::new_err(format!("cycle length {l} is too large"))))
        .collect()
}

fn lengths_out(lengths: &[u8]) -> Vec<u32> {
    lengths.iter().map(|&l| l as u32).collect()
}

fn table_dict(t: &DimensionTable) -> HashMap<(i32, i32, i32), u64> {
    t.iter().map(|(d, v)| (tri(d), v)).collect()
}

fn config(
    n: u8,
    perm: Option<String>,
    cycle_type: Option<Vec<u32>>,
    q_window: Option<(i32, i32)>,
    t_max: Option<i32>,
    a_max: Option<i32>,
    jobs: usize,
) -> PyResult<RunConfig> {
    let mut cfg = RunConfig::new(n);
    cfg.perm = perm;
    cfg.cycle_type = cycle_type.map(lengths_in).transpose()?;
    cfg.q_window = q_window;
    cfg.t_max = t_max;
    cfg.a_max = a_max;
    cfg.jobs = jobs;
    Ok(cfg)
}

/// A permutation of `{1..n}` in cycle notation.
#[pyclass(name = "Permutation", eq, from_py_object)]
#[derive(PartialEq, Clone)]
struct PyPermutation {
    inner: Permutation,
}

#[pymethods]
impl PyPermutation {
    /// `Permutation(3)` is the identity; `Permutation(3, "(1 2 3)")` parses cycles.
    #[new]
    #[pyo3(signature = (n, cycles=None))]
    fn new(n: u8, cycles: Option<&str>) -> PyResult<Self> {
        let inner = match cycles {
            Some(s) => Permutation::parse_cycles(s, n).map_err(|e| PyValueError::new_err(e.to_string()))?,
            None => Permutation::identity(n),
        };
        Ok(PyPermutation { inner })
    }

    /// The standard block permutation with the given cycle lengths.
    #[staticmethod]
    fn of_cycle_type(n: u8, lengths: Vec<u32>) -> PyResult<Self> {
        let lengths = lengths_in(lengths)?;
        let total: u32 = lengths.iter().map(|&l| l as u32).sum();
        if total != n as u32 || lengths.iter().any(|&l| l == 0) {
            return Err(PyValueError::new_err(format!(
                "cycle type {lengths:?} does not partition {n}"
            )));
        }
        Ok(PyPermutation { inner: permutation_of_cycle_type(n, &lengths) })
    }

    #[getter]
    fn n(&self) -> u8 {
        self.inner.n()
    }

    fn cycle_type(&self) -> Vec<u32> {
        lengths_out(&self.inner.cycle_type())
    }

    fn apply(&self, i: u8) -> PyResult<u8> {
        if i == 0 || i > self.inner.n() {
            return Err(PyValueError::new_err(format!("{i} is outside 1..={}", self.inner.n())));
        }
        Ok(self.inner.apply(i))
    }

    fn inverse(&self) -> Self {
        PyPermutation { inner: self.inner.inverse() }
    }

    fn compose(&self, other: &PyPermutation) -> PyResult<Self> {
        if other.inner.n() != self.inner.n() {
            return Err(PyValueError::new_err("ranks differ"));
        }
        Ok(PyPermutation { inner: self.inner.compose(&other.inner) })
    }

    fn conjugate_by(&self, g: &PyPermutation) -> PyResult<Self> {
        if g.inner.n() != self.inner.n() {
            return Err(PyValueError::new_err("ranks differ"));
        }
        Ok(PyPermutation { inner: self.inner.conjugate_by(&g.inner) })
    }

    fn __str__(&self) -> String {
        self.inner.to_string()
    }

    fn __repr__(&self) -> String {
        format!("Permutation({}, \"{}\")", self.inner.n(), self.inner)
    }
}

/// Closed quotient-ring presentation of the stable homology of one twist.
#[pyclass(name = "Presentation")]
struct PyPresentation {
    inner: StableHomologyPresentation,
}

#[pymethods]
impl PyPresentation {
    #[getter]
    fn n(&self) -> u8 {
        self.inner.n
    }

    #[getter]
    fn cycle_type(&self) -> Vec<u32> {
        lengths_out(&self.inner.cycle_type)
    }

    /// Degree of the ring unit inside the full homology, as `(q, t, a)`.
    #[getter]
    fn unit_shift(&self) -> (i32, i32, i32) {
        tri(self.inner.unit_shift)
    }

    /// Degrees of the exterior generators tensored onto the ring.
    #[getter]
    fn exterior_degrees(&self) -> Vec<(i32, i32, i32)> {
        self.inner.exterior_degrees.iter().map(|&d| tri(d)).collect()
    }

    /// Polynomial variables of the ring with their degrees.
    fn variables(&self) -> Vec<(String, (i32, i32, i32))> {
        self.inner
            .ring
            .registry()
            .decls()
            .iter()
            .map(|d| (d.name.clone(), tri(d.degree)))
            .collect()
    }

    /// Defining relations of the quotient, printed as polynomials.
    fn relations(&self) -> Vec<String> {
        self.inner.ring.ideal.generators.iter().map(|p| p.to_string()).collect()
    }

    /// Dimension table of the full homology over a degree window.
    fn table(
        &self,
        q_min: i32,
        q_max: i32,
        t_max: i32,
        a_max: i32,
    ) -> PyResult<HashMap<(i32, i32, i32), u64>> {
        let w = Window { q_min, q_max, t_max, a_max };
        let t = full_hhh(&self.inner, &w).map_err(|e| PyRuntimeError::new_err(e.to_string()))?;
        Ok(table_dict(&t))
    }

    fn __repr__(&self) -> String {
        format!(
            "Presentation(n={}, cycle_type={:?}, unit_shift={:?})",
            self.inner.n,
            self.inner.cycle_type,
            tri(self.inner.unit_shift)
        )
    }
}

/// Closed presentation of the stable homology for a twist of rank `n`.
#[pyfunction]
#[pyo3(signature = (n, perm=None, cycle_type=None))]
fn presentation(
    n: u8,
    perm: Option<String>,
    cycle_type: Option<Vec<u32>>,
) -> PyResult<PyPresentation> {
    let cfg = config(n, perm, cycle_type, None, None, None, 0)?;
    let w = cfg.permutation().map_err(run_err)?;
    let inner = stable_homology_presentation(&w, &cfg.gb()).map_err(|e| run_err(e.into()))?;
    Ok(PyPresentation { inner })
}

/// Expand the closed Poincaré series of a cycle type over a window.
#[pyfunction]
fn series_table(
    n: u8,
    cycle_type: Vec<u32>,
    q_min: i32,
    q_max: i32,
    t_max: i32,
    a_max: i32,
) -> PyResult<HashMap<(i32, i32, i32), u64>> {
    let cfg = config(n, None, Some(cycle_type), None, None, None, 0)?;
    let w = cfg.permutation().map_err(run_err)?;
    let series = poincare_series(n, &w.cycle_type());
    let window = Window { q_min, q_max, t_max, a_max };
    let t = series.expand(&window).map_err(|e| PyRuntimeError::new_err(e.to_string()))?;
    Ok(table_dict(&t))
}

/// Brute-force chain-level homology table (the independent oracle route).
#[pyfunction]
#[pyo3(signature = (n, q_min, q_max, t_max, a_max, perm=None, cycle_type=None, jobs=1))]
#[allow(clippy::too_many_arguments)]
fn oracle_table(
    n: u8,
    q_min: i32,
    q_max: i32,
    t_max: i32,
    a_max: i32,
    perm: Option<String>,
    cycle_type: Option<Vec<u32>>,
    jobs: usize,
) -> PyResult<HashMap<(i32, i32, i32), u64>> {
    let cfg = config(n, perm, cycle_type, None, None, None, jobs)?;
    let w = cfg.permutation().map_err(run_err)?;
    let pres = stable_homology_presentation(&w, &cfg.gb()).map_err(|e| run_err(e.into()))?;
    let twist = (w != Permutation::identity(n)).then_some(&w);
    let mn = build_mn(n, twist, &cfg.gb()).map_err(|e| run_err(e.into()))?;
    let specialized = hh0_specialize(&mn).map_err(|e| run_err(e.into()))?;
    let window = Window { q_min, q_max, t_max, a_max };
    let t = homology_with_exterior(&specialized, &pres.exterior_degrees, &window, jobs)
        .map_err(|e| run_err(e.into()))?;
    Ok(table_dict(&t.restricted(&window)))
}

/// The full `compute` document of the terminal command, as a JSON string.
#[pyfunction]
#[pyo3(signature = (n, perm=None, cycle_type=None, q_window=None, t_max=None, a_max=None, jobs=0))]
fn compute_json(
    n: u8,
    perm: Option<String>,
    cycle_type: Option<Vec<u32>>,
    q_window: Option<(i32, i32)>,
    t_max: Option<i32>,
    a_max: Option<i32>,
    jobs: usize,
) -> PyResult<String> {
    let cfg = config(n, perm, cycle_type, q_window, t_max, a_max, jobs)?;
    let out = cmd_compute(&cfg).map_err(run_err)?;
    Ok(serde_json::to_string_pretty(&out.document).expect("document serializes"))
}

/// The row-move simplification trace document, as a JSON string.
#[pyfunction]
#[pyo3(signature = (n, perm=None))]
fn simplify_json(n: u8, perm: Option<String>) -> PyResult<String> {
    let cfg = config(n, perm, None, None, None, None, 0)?;
    let out = cmd_mf_simplify(&cfg).map_err(run_err)?;
    Ok(serde_json::to_string_pretty(&out.document).expect("document serializes"))
}

/// Run the polynomial identity suite at rank `n`; `True` when every check holds.
#[pyfunction]
fn verify_identities(n: u8) -> PyResult<bool> {
    let out = cmd_verify_identities(&RunConfig::new(n)).map_err(run_err)?;
    Ok(out.passed)
}

#[pymodule]
fn stable_hhh(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyPermutation>()?;
    m.add_class::<PyPresentation>()?;
    m.add_function(wrap_pyfunction!(presentation, m)?)?;
    m.add_function(wrap_pyfunction!(series_table, m)?)?;
    m.add_function(wrap_pyfunction!(oracle_table, m)?)?;
    m.add_function(wrap_pyfunction!(compute_json, m)?)?;
    m.add_function(wrap_pyfunction!(simplify_json, m)?)?;
    m.add_function(wrap_pyfunction!(verify_identities, m)?)?;
    Ok(())
}
