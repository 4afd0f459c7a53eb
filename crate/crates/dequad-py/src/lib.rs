//! Python bindings: the quadrature pipeline as a handful of functions.
//!
//! Problems are referred to the same way as on the command line — a
//! built-in id like `"p51"` or a path to a problem JSON file.

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use dequad::problems::{builtin, load_problem, BuiltinId, Problem};
use dequad::quadrature::{self, setup, Method};
use dequad::transform::params_to_json;

fn to_py_err(e: dequad::Error) -> PyErr {
    match e {
        dequad::Error::Parse { .. } | dequad::Error::Validation(_) | dequad::Error::Domain(_) => {
            PyValueError::new_err(e.to_string())
        }
        _ => PyRuntimeError::new_err(e.to_string()),
    }
}

fn resolve_problem(spec: &str) -> PyResult<Problem> {
    if let Some(id) = BuiltinId::parse(spec) {
        return Ok(builtin(id));
    }
    load_problem(std::path::Path::new(spec)).map_err(to_py_err)
}

fn resolve_method(name: &str) -> PyResult<Method> {
    Method::parse(name)
        .ok_or_else(|| PyValueError::new_err(format!("unknown method {name:?}")))
}

/// Built-in problem ids, in presentation order.
#[pyfunction]
fn list_builtins() -> Vec<&'static str> {
    BuiltinId::ALL.iter().map(|id| id.as_str()).collect()
}

/// Solve the transformation parameters; returns the params as a JSON string.
#[pyfunction]
#[pyo3(signature = (problem, method = "new"))]
fn solve(problem: &str, method: &str) -> PyResult<String> {
    let p = resolve_problem(problem)?;
    let m = resolve_method(method)?;
    let s = setup(&p, m).map_err(to_py_err)?;
    Ok(params_to_json(&s.params))
}

/// Integrate; returns (value, h, abs_error or None).
#[pyfunction]
#[pyo3(signature = (problem, method, n))]
fn integrate(problem: &str, method: &str, n: usize) -> PyResult<(f64, f64, Option<f64>)> {
    if n == 0 {
        return Err(PyValueError::new_err("n must be at least 1"));
    }
    let p = resolve_problem(problem)?;
    let m = resolve_method(method)?;
    let s = setup(&p, m).map_err(to_py_err)?;
    let r = quadrature::integrate(&p, &s.params, s.beta2, n).map_err(to_py_err)?;
    Ok((r.value, r.h, p.reference.map(|re| (r.value - re).abs())))
}

/// The strip half-width available to the plain DE formula.
#[pyfunction]
fn d_de(problem: &str) -> PyResult<f64> {
    let p = resolve_problem(problem)?;
    quadrature::d_de(&p).map_err(to_py_err)
}

/// The decay coefficient β₂ of the solved (or plain DE) map.
#[pyfunction]
#[pyo3(signature = (problem, method = "new"))]
fn beta2(problem: &str, method: &str) -> PyResult<f64> {
    let p = resolve_problem(problem)?;
    let m = resolve_method(method)?;
    Ok(setup(&p, m).map_err(to_py_err)?.beta2)
}

/// Independent adaptive Gauss-Kronrod reference value.
#[pyfunction]
#[pyo3(signature = (problem, tol = 1e-8))]
fn oracle(problem: &str, tol: f64) -> PyResult<f64> {
    let p = resolve_problem(problem)?;
    dequad::oracle::reference_integrate(&p, tol).map_err(to_py_err)
}

#[pymodule]
fn dequad_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(list_builtins, m)?)?;
    m.add_function(wrap_pyfunction!(solve, m)?)?;
    m.add_function(wrap_pyfunction!(integrate, m)?)?;
    m.add_function(wrap_pyfunction!(d_de, m)?)?;
    m.add_function(wrap_pyfunction!(beta2, m)?)?;
    m.add_function(wrap_pyfunction!(oracle, m)?)?;
    Ok(())
}
