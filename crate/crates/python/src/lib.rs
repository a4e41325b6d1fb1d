//! Python bindings: JSON in, certificate JSON out.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use serde_json::Value;
use sigma_etale::cli;

fn parse(what: &str, s: &str) -> PyResult<Value> {
    serde_json::from_str(s).map_err(|e| PyValueError::new_err(format!("{what}: {e}")))
}

fn certify(py: Python<'_>, command: &str, params: Value, instance: Value) -> PyResult<String> {
    let o = py
        .detach(|| cli::execute(command, &params, &instance))
        .map_err(|e| PyValueError::new_err(e.to_string()))?;
    Ok(cli::certificate(command, &params, &instance, &o).to_string())
}

/// Run one command on a JSON instance and return its certificate as a JSON string.
#[pyfunction]
#[pyo3(signature = (command, instance, params = "{}"))]
fn execute(py: Python<'_>, command: &str, instance: &str, params: &str) -> PyResult<String> {
    certify(py, command, parse("params", params)?, parse("instance", instance)?)
}

/// Run a seeded property suite and return its certificate.
#[pyfunction]
#[pyo3(signature = (name, seed = 42))]
fn suite(py: Python<'_>, name: &str, seed: u64) -> PyResult<String> {
    certify(py, "suite", serde_json::json!({"name": name, "seed": seed}), Value::Null)
}

/// Recompute a certificate; the result reports the first differing path, if any.
#[pyfunction]
fn verify_certificate(py: Python<'_>, cert: &str) -> PyResult<String> {
    let cert = parse("certificate", cert)?;
    let o = py.detach(|| cli::verify_certificate(&cert)).map_err(|e| PyValueError::new_err(e.to_string()))?;
    Ok(o.result.to_string())
}

#[pymodule]
fn sigma_etale_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(execute, m)?)?;
    m.add_function(wrap_pyfunction!(suite, m)?)?;
    m.add_function(wrap_pyfunction!(verify_certificate, m)?)?;
    m.add("CERTIFICATE_TAG", cli::CERTIFICATE_TAG)?;
    Ok(())
}
