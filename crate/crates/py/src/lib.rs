//! Python bindings. Exact probabilities cross the boundary as `"num/den"`
//! strings so `fractions.Fraction` can read them without loss.

use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use jordanlab::chain::{exact_column_distribution, exact_distribution, DEFAULT_CAP};
use jordanlab::gfq::{jordan_type_incremental, sample_strict_upper, FiniteField};
use jordanlab::harness::{run, sample_chain_columns, sample_matrix_columns, ExperimentConfig};
use jordanlab::limit::{limit_pmf_contour, limit_pmf_k1, limit_pmf_series, ContourSpec, LimitQuery};
use jordanlab::prelimit::{prelimit_pmf_integral, residue_e_k1, TorusQuad};
use jordanlab::rng::stream;
use jordanlab::scalar::inverse_of;
use jordanlab::{ExactScalar, Partition};
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::{PyDict, PyTuple};

fn py_err(e: jordanlab::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

/// Dict keyed by tuples; Python lists are not hashable.
fn tuple_dict<'py, K, V>(py: Python<'py>, items: impl IntoIterator<Item = (Vec<K>, V)>) -> PyResult<Bound<'py, PyDict>>
where
    K: ToPyObject,
    V: ToPyObject,
{
    let d = PyDict::new_bound(py);
    for (k, v) in items {
        d.set_item(PyTuple::new_bound(py, k), v)?;
    }
    Ok(d)
}

fn fraction(p: &ExactScalar) -> String {
    format!("{}/{}", p.numer(), p.denom())
}

/// Exact law of the Jordan type at size `n`; keys are partitions as tuples.
#[pyfunction]
#[pyo3(name = "exact_distribution")]
fn exact_distribution_py(py: Python<'_>, n: usize, q: u64) -> PyResult<Bound<'_, PyDict>> {
    let d = exact_distribution(n, &inverse_of(q), DEFAULT_CAP).map_err(py_err)?;
    tuple_dict(py, d.iter().map(|(p, x)| (p.parts().to_vec(), fraction(x))))
}

/// Exact law of the first `k` column lengths at size `n`.
#[pyfunction]
fn exact_columns(py: Python<'_>, n: usize, k: usize, q: u64) -> PyResult<Bound<'_, PyDict>> {
    let d = exact_column_distribution(n, k, &inverse_of(q)).map_err(py_err)?;
    tuple_dict(py, d.iter().map(|(s, x)| (s.entries().to_vec(), fraction(x))))
}

/// Limit-law probability `(value, error)` by `series`, `contour` or `k1-explicit`.
#[pyfunction]
#[pyo3(signature = (t, chi, l, tol=1e-12, method="series"))]
fn limit_pmf(t: f64, chi: f64, l: Vec<i64>, tol: f64, method: &str) -> PyResult<(f64, f64)> {
    let query = LimitQuery::from_entries(t, chi, &l, tol).map_err(py_err)?;
    let e = match method {
        "series" => limit_pmf_series(&query),
        "contour" => limit_pmf_contour(&query, &ContourSpec::default()),
        "k1-explicit" if l.len() == 1 => limit_pmf_k1(t, chi, l[0], tol),
        other => return Err(PyValueError::new_err(format!("unknown method `{other}` for k = {}", l.len()))),
    }
    .map_err(py_err)?;
    Ok((e.value, e.error))
}

/// Finite-`n` column probability from the torus integral, `(value, error)`.
#[pyfunction]
#[pyo3(signature = (n, k, t, eta, tol=1e-12))]
fn prelimit_pmf(n: u64, k: usize, t: f64, eta: Vec<usize>, tol: f64) -> PyResult<(f64, f64)> {
    let eta = Partition::new(eta).map_err(py_err)?;
    let e = prelimit_pmf_integral(n, k, t, &eta, &TorusQuad::default(), tol).map_err(py_err)?;
    Ok((e.value, e.error))
}

/// One-column residue term.
#[pyfunction]
fn residue_one_column(n: u64, eta: u64, v: u64, t: f64) -> f64 {
    residue_e_k1(n, eta, v, t)
}

/// Empirical law of the first `k` column lengths, unshifted.
#[pyfunction]
#[pyo3(signature = (n, q, k, samples, seed, sampler="chain"))]
fn sample_columns<'py>(py: Python<'py>, n: u64, q: u64, k: usize, samples: usize, seed: u64, sampler: &str) -> PyResult<Bound<'py, PyDict>> {
    let pmf = match sampler {
        "chain" => sample_chain_columns(n, q, k, samples, seed, 0),
        "matrix" => sample_matrix_columns(n, q, k, samples, seed, 0),
        other => return Err(PyValueError::new_err(format!("unknown sampler `{other}`"))),
    }
    .map_err(py_err)?;
    tuple_dict(py, pmf.iter().map(|(s, p)| (s.entries().to_vec(), *p)))
}

/// Jordan type of one uniform strictly upper-triangular matrix.
#[pyfunction]
fn random_jordan_type(n: usize, q: usize, seed: u64) -> PyResult<Vec<usize>> {
    let field = Arc::new(FiniteField::new(q).map_err(py_err)?);
    let a = sample_strict_upper(n, &field, &mut stream(seed, 0));
    Ok(jordan_type_incremental(&a).map_err(py_err)?.into_parts())
}

/// Runs a harness command from `key -> value` settings; returns report JSON.
#[pyfunction]
fn run_experiment(settings: HashMap<String, String>) -> PyResult<String> {
    let map: BTreeMap<String, String> = settings.into_iter().map(|(k, v)| (k.replace('_', "-"), v)).collect();
    let cfg = ExperimentConfig::from_map(&map).map_err(py_err)?;
    Ok(run(&cfg).map_err(py_err)?.to_json())
}

#[pymodule]
fn jordanlab_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(exact_distribution_py, m)?)?;
    m.add_function(wrap_pyfunction!(exact_columns, m)?)?;
    m.add_function(wrap_pyfunction!(limit_pmf, m)?)?;
    m.add_function(wrap_pyfunction!(prelimit_pmf, m)?)?;
    m.add_function(wrap_pyfunction!(residue_one_column, m)?)?;
    m.add_function(wrap_pyfunction!(sample_columns, m)?)?;
    m.add_function(wrap_pyfunction!(random_jordan_type, m)?)?;
    m.add_function(wrap_pyfunction!(run_experiment, m)?)?;
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    Ok(())
}
