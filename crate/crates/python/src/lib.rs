use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

pub mod api;

fn py_err(e: polyhahn::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn spec(d: usize, n: u32, ell: Vec<u32>) -> PyResult<polyhahn::DomainSpec> {
    api::spec(d, n, &ell).map_err(py_err)
}

/// Number of lattice points |V| (equal to the number of indices |H|).
#[pyfunction]
fn size(d: usize, n: u32, ell: Vec<u32>) -> PyResult<u64> {
    Ok(api::size(&spec(d, n, ell)?))
}

/// Points of V in canonical order.
#[pyfunction]
fn domain(d: usize, n: u32, ell: Vec<u32>) -> PyResult<Vec<Vec<u32>>> {
    Ok(api::points(&spec(d, n, ell)?))
}

/// Indices of H in canonical order.
#[pyfunction]
fn index_set(d: usize, n: u32, ell: Vec<u32>) -> PyResult<Vec<Vec<u32>>> {
    Ok(api::indices(&spec(d, n, ell)?))
}

/// Weight at x as a "p/q" string.
#[pyfunction]
fn weight(d: usize, n: u32, ell: Vec<u32>, x: Vec<u32>) -> PyResult<String> {
    api::weight(&spec(d, n, ell)?, &x).map_err(py_err)
}

/// Hahn polynomial of index nu at x as a "p/q" string.
#[pyfunction]
fn hahn(d: usize, n: u32, ell: Vec<u32>, nu: Vec<u32>, x: Vec<u32>) -> PyResult<String> {
    api::hahn(&spec(d, n, ell)?, &nu, &x).map_err(py_err)
}

/// Squared norm of the polynomial of index nu as a "p/q" string.
#[pyfunction]
fn norm(d: usize, n: u32, ell: Vec<u32>, nu: Vec<u32>) -> PyResult<String> {
    api::norm(&spec(d, n, ell)?, &nu).map_err(py_err)
}

/// Column heights (v, h) of V and H for d = 2.
#[pyfunction]
fn heights(n: u32, ell: Vec<u32>) -> PyResult<(Vec<u32>, Vec<u32>)> {
    api::heights(&spec(2, n, ell)?).map_err(py_err)
}

/// (passed, report JSON) for a verification suite.
#[pyfunction]
#[pyo3(signature = (suite, d, n, ell, degree = 6))]
fn verify(suite: &str, d: usize, n: u32, ell: Vec<u32>, degree: u32) -> PyResult<(bool, String)> {
    api::verify(suite, &spec(d, n, ell)?, degree).map_err(py_err)
}

/// (passes, scan JSON) for a named limit scan.
#[pyfunction]
fn limit_scan(name: &str) -> PyResult<(bool, String)> {
    api::limit_scan(name).map_err(py_err)
}

#[pymodule]
fn polyhahn_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("SCHEMA", polyhahn::verify::SCHEMA)?;
    m.add_function(wrap_pyfunction!(size, m)?)?;
    m.add_function(wrap_pyfunction!(domain, m)?)?;
    m.add_function(wrap_pyfunction!(index_set, m)?)?;
    m.add_function(wrap_pyfunction!(weight, m)?)?;
    m.add_function(wrap_pyfunction!(hahn, m)?)?;
    m.add_function(wrap_pyfunction!(norm, m)?)?;
    m.add_function(wrap_pyfunction!(heights, m)?)?;
    m.add_function(wrap_pyfunction!(verify, m)?)?;
    m.add_function(wrap_pyfunction!(limit_scan, m)?)?;
    Ok(())
}
