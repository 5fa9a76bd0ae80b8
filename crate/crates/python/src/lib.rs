//! Python bindings: `import qubit_heat_py`.

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::{PyDict, PyList};

use qubit_heat::lamb::{self, ShiftOptions};
use qubit_heat::transport::{self, Lamb};
use qubit_heat::validate::{self, Level, SuiteOptions};
use qubit_heat::{sweep as sweeps, BathSpec, Error, SpectralKind};

fn py_err(e: Error) -> PyErr {
    match e {
        Error::InvalidParameter { .. } | Error::Config(_) => PyValueError::new_err(e.to_string()),
        other => PyRuntimeError::new_err(other.to_string()),
    }
}

fn to_py(py: Python<'_>, value: &serde_json::Value) -> PyResult<Py<PyAny>> {
    use serde_json::Value;
    Ok(match value {
        Value::Null => py.None(),
        Value::Bool(b) => b.into_pyobject(py)?.to_owned().into_any().unbind(),
        Value::Number(n) => match n.as_i64() {
            Some(i) => i.into_pyobject(py)?.into_any().unbind(),
            None => n.as_f64().unwrap_or(f64::NAN).into_pyobject(py)?.into_any().unbind(),
        },
        Value::String(s) => s.into_pyobject(py)?.into_any().unbind(),
        Value::Array(items) => {
            let list = PyList::empty(py);
            for item in items {
                list.append(to_py(py, item)?)?;
            }
            list.into_any().unbind()
        }
        Value::Object(map) => {
            let dict = PyDict::new(py);
            for (k, v) in map {
                dict.set_item(k, to_py(py, v)?)?;
            }
            dict.into_any().unbind()
        }
    })
}

fn serialize<T: serde::Serialize>(py: Python<'_>, value: &T) -> PyResult<Py<PyAny>> {
    let json = serde_json::to_value(value).map_err(|e| PyRuntimeError::new_err(e.to_string()))?;
    to_py(py, &json)
}

/// Two coupled qubits, `eps1 >= eps2 > 0`, coupling `g > 0`.
#[pyclass(name = "System", frozen)]
struct PySystem {
    eig: qubit_heat::Eigensystem,
}

#[pymethods]
impl PySystem {
    #[new]
    fn new(eps1: f64, eps2: f64, g: f64) -> PyResult<Self> {
        let params = qubit_heat::SystemParams::new(eps1, eps2, g).map_err(py_err)?;
        let eig = qubit_heat::eigensystem(&params).map_err(py_err)?;
        Ok(Self { eig })
    }

    #[getter]
    fn eps1(&self) -> f64 {
        self.eig.params.eps1
    }

    #[getter]
    fn eps2(&self) -> f64 {
        self.eig.params.eps2
    }

    #[getter]
    fn g(&self) -> f64 {
        self.eig.params.g
    }

    #[getter]
    fn alpha(&self) -> f64 {
        self.eig.alpha
    }

    #[getter]
    fn beta(&self) -> f64 {
        self.eig.beta
    }

    #[getter]
    fn theta(&self) -> f64 {
        self.eig.theta
    }

    #[getter]
    fn phi(&self) -> f64 {
        self.eig.phi
    }

    /// `(omega1, omega2)`.
    #[getter]
    fn omega(&self) -> (f64, f64) {
        (self.eig.omega[0], self.eig.omega[1])
    }

    #[getter]
    fn levels(&self) -> Vec<f64> {
        self.eig.levels.to_vec()
    }

    fn __repr__(&self) -> String {
        let p = self.eig.params;
        format!("System(eps1={}, eps2={}, g={})", p.eps1, p.eps2, p.g)
    }
}

#[pyclass(name = "Bath", frozen)]
struct PyBath {
    spec: BathSpec,
}

#[pymethods]
impl PyBath {
    #[new]
    #[pyo3(signature = (temperature, gamma, omega_d, kind = "drude"))]
    fn new(temperature: f64, gamma: f64, omega_d: f64, kind: &str) -> PyResult<Self> {
        let kind: SpectralKind = kind.parse().map_err(py_err)?;
        let spec = BathSpec::new(temperature, gamma, omega_d, kind).map_err(py_err)?;
        Ok(Self { spec })
    }

    #[getter]
    fn temperature(&self) -> f64 {
        self.spec.temperature
    }

    #[getter]
    fn gamma(&self) -> f64 {
        self.spec.gamma
    }

    #[getter]
    fn omega_d(&self) -> f64 {
        self.spec.omega_d
    }

    #[getter]
    fn kind(&self) -> String {
        self.spec.kind.to_string()
    }

    fn with_temperature(&self, temperature: f64) -> PyResult<Self> {
        let spec = self.spec.with_temperature(temperature);
        spec.validate().map_err(py_err)?;
        Ok(Self { spec })
    }

    fn __repr__(&self) -> String {
        let b = self.spec;
        format!(
            "Bath(temperature={}, gamma={}, omega_d={}, kind='{}')",
            b.temperature, b.gamma, b.omega_d, b.kind
        )
    }
}

fn pair(bath1: &PyBath, bath2: &PyBath) -> [BathSpec; 2] {
    [bath1.spec, bath2.spec]
}

/// `(delta1, delta2)`, the shifts of the two transition frequencies.
#[pyfunction]
fn transition_shifts(system: &PySystem, bath1: &PyBath, bath2: &PyBath) -> PyResult<(f64, f64)> {
    let d = lamb::transition_shifts(&system.eig, &pair(bath1, bath2), &ShiftOptions::default()).map_err(py_err)?;
    Ok((d[0], d[1]))
}

/// Shifts of the four energy levels.
#[pyfunction]
fn level_shifts(system: &PySystem, bath1: &PyBath, bath2: &PyBath) -> PyResult<Vec<f64>> {
    let s = lamb::level_shifts(&system.eig, &pair(bath1, bath2), &ShiftOptions::default()).map_err(py_err)?;
    Ok(s.to_vec())
}

#[pyfunction]
fn lamb_shift_report(py: Python<'_>, system: &PySystem, bath1: &PyBath, bath2: &PyBath) -> PyResult<Py<PyAny>> {
    let r = lamb::lamb_shift_report(&system.eig, &pair(bath1, bath2), &ShiftOptions::default(), true)
        .map_err(py_err)?;
    serialize(py, &r)
}

#[pyfunction]
fn steady_state(py: Python<'_>, system: &PySystem, bath1: &PyBath, bath2: &PyBath) -> PyResult<Py<PyAny>> {
    let s = transport::steady_state(&system.eig, &pair(bath1, bath2)).map_err(py_err)?;
    serialize(py, &s)
}

/// Signed `J1`: positive when heat enters the qubits from bath 1.
#[pyfunction]
#[pyo3(signature = (system, bath1, bath2, lamb = true))]
fn heat_current(system: &PySystem, bath1: &PyBath, bath2: &PyBath, lamb: bool) -> PyResult<f64> {
    let flag = if lamb { Lamb::On } else { Lamb::Off };
    transport::heat_current(&system.eig, &pair(bath1, bath2), flag, &ShiftOptions::default()).map_err(py_err)
}

#[pyfunction]
fn current_report(py: Python<'_>, system: &PySystem, bath1: &PyBath, bath2: &PyBath) -> PyResult<Py<PyAny>> {
    let r = transport::current_report(&system.eig, &pair(bath1, bath2), &ShiftOptions::default()).map_err(py_err)?;
    serialize(py, &r)
}

#[pyfunction]
fn current_supremum(system: &PySystem, bath1: &PyBath) -> f64 {
    transport::current_supremum(&system.eig, &bath1.spec)
}

/// Rows for `T2 = T1 + dT` over `grid`, bath 2 otherwise copied from
/// `bath2`. Each row is a dict keyed like the sweep CSV header.
#[pyfunction]
#[pyo3(signature = (system, bath1, bath2, grid, lamb = true))]
fn sweep(
    py: Python<'_>,
    system: &PySystem,
    bath1: &PyBath,
    bath2: &PyBath,
    grid: Vec<f64>,
    lamb: bool,
) -> PyResult<Py<PyAny>> {
    let template = pair(bath1, bath2);
    let eig = system.eig;
    let rows = py
        .detach(|| {
            sweeps::sweep(&eig, &grid, |dt| sweeps::gradient_baths(&template, dt), lamb, &ShiftOptions::default())
        })
        .map_err(py_err)?;
    let list = PyList::empty(py);
    for row in rows {
        let dict = PyDict::new(py);
        for (k, v) in sweeps::SWEEP_HEADER.iter().zip(row.values()) {
            dict.set_item(*k, v)?;
        }
        list.append(dict)?;
    }
    Ok(list.into_any().unbind())
}

/// Runs the cross-check suite; returns `(passed, report_text)`.
#[pyfunction]
#[pyo3(signature = (level = "quick"))]
fn run_validation(py: Python<'_>, level: &str) -> PyResult<(bool, String)> {
    let level: Level = level.parse().map_err(py_err)?;
    let report = py.detach(|| validate::run(&SuiteOptions::new(level)));
    Ok((report.passed(), report.to_string()))
}

#[pymodule]
fn qubit_heat_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PySystem>()?;
    m.add_class::<PyBath>()?;
    m.add_function(wrap_pyfunction!(transition_shifts, m)?)?;
    m.add_function(wrap_pyfunction!(level_shifts, m)?)?;
    m.add_function(wrap_pyfunction!(lamb_shift_report, m)?)?;
    m.add_function(wrap_pyfunction!(steady_state, m)?)?;
    m.add_function(wrap_pyfunction!(heat_current, m)?)?;
    m.add_function(wrap_pyfunction!(current_report, m)?)?;
    m.add_function(wrap_pyfunction!(current_supremum, m)?)?;
    m.add_function(wrap_pyfunction!(sweep, m)?)?;
    m.add_function(wrap_pyfunction!(run_validation, m)?)?;
    m.add("SWEEP_HEADER", sweeps::SWEEP_HEADER.to_vec())?;
    Ok(())
}
