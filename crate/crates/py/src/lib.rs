//! Python bindings for the power allocation library.
//!
//! Exposes the scenario builder, both optimizers, the brute-force oracle
//! and the spectral helpers. Build with
//! `cargo build --release -p crpower-py`, then import the produced
//! `libcrpower_py.so` as `crpower_py` (see `python/smoke_test.py`).

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use crpower_core::dual::{brute_force, solve_dual, DualConfig};
use crpower_core::error::Error;
use crpower_core::harness::{self, build_reference_layout, parse_config};
use crpower_core::model::{sample_channels, PowerVector};
use crpower_core::result::AllocationResult;
use crpower_core::sa::{anneal, SaConfig};
use crpower_core::spectral::{InterferenceTables, TableGeometry};

fn to_py_err(err: Error) -> PyErr {
    match err {
        Error::InvalidArgument(_) | Error::Config { .. } => PyValueError::new_err(err.to_string()),
        _ => PyRuntimeError::new_err(err.to_string()),
    }
}

/// A spectrum-sharing scenario with the reference PU layout (PU `l`
/// occupies a subcarrier-wide band centred on subcarrier `l`).
#[pyclass(name = "Scenario", skip_from_py_object)]
#[derive(Clone)]
struct PyScenario {
    inner: crpower_core::model::Scenario,
}

#[pymethods]
impl PyScenario {
    /// Build a scenario. Arguments mirror the config file's `[scenario]`
    /// section.
    #[new]
    #[pyo3(signature = (
        total_bw_hz,
        k_count,
        fft_size,
        su_count,
        noise_var_w,
        p_max_w,
        pu_count = 0,
        pu_tx_power_w = 0.01,
        pu_interference_cap_w = 1e-3,
        base_freq_hz = 0.0,
    ))]
    #[allow(clippy::too_many_arguments)]
    fn new(
        total_bw_hz: f64,
        k_count: usize,
        fft_size: usize,
        su_count: usize,
        noise_var_w: f64,
        p_max_w: f64,
        pu_count: usize,
        pu_tx_power_w: f64,
        pu_interference_cap_w: f64,
        base_freq_hz: f64,
    ) -> PyResult<Self> {
        let inner = build_reference_layout(
            total_bw_hz,
            k_count,
            fft_size,
            base_freq_hz,
            pu_count,
            pu_tx_power_w,
            pu_interference_cap_w,
            su_count,
            noise_var_w,
            p_max_w,
        )
        .map_err(to_py_err)?;
        Ok(PyScenario { inner })
    }

    /// The reference simulation scenario: 32 subcarriers of 0.4 MHz,
    /// 2 PUs, 8 SUs, noise variance 1e-6 W, budget 5 dBW.
    #[staticmethod]
    fn reference() -> Self {
        PyScenario {
            inner: harness::reference_scenario(),
        }
    }

    /// Realize the scenario described by an experiment config (TOML text).
    #[staticmethod]
    fn from_config_toml(text: &str) -> PyResult<Self> {
        let spec = parse_config(text).map_err(to_py_err)?;
        Ok(PyScenario {
            inner: spec.realize_scenario().map_err(to_py_err)?,
        })
    }

    /// Copy of this scenario with a different power budget in watts.
    fn with_p_max(&self, p_max_w: f64) -> PyResult<Self> {
        let mut inner = self.inner.clone();
        inner.p_max = p_max_w;
        inner.validate().map_err(to_py_err)?;
        Ok(PyScenario { inner })
    }

    #[getter]
    fn k_count(&self) -> usize {
        self.inner.grid.k_count
    }

    #[getter]
    fn su_count(&self) -> usize {
        self.inner.su_count
    }

    #[getter]
    fn pu_count(&self) -> usize {
        self.inner.pus.len()
    }

    #[getter]
    fn p_max_w(&self) -> f64 {
        self.inner.p_max
    }

    #[getter]
    fn noise_var_w(&self) -> f64 {
        self.inner.noise_var
    }

    #[getter]
    fn subcarrier_bw_hz(&self) -> f64 {
        self.inner.grid.subcarrier_bw
    }

    fn __repr__(&self) -> String {
        format!(
            "Scenario(k_count={}, pu_count={}, su_count={}, p_max_w={})",
            self.inner.grid.k_count,
            self.inner.pus.len(),
            self.inner.su_count,
            self.inner.p_max
        )
    }
}

/// Result of one solver run.
#[pyclass(name = "Allocation")]
struct PyAllocation {
    #[pyo3(get)]
    powers_w: Vec<f64>,
    #[pyo3(get)]
    capacity: f64,
    #[pyo3(get)]
    feasible: bool,
    #[pyo3(get)]
    total_power_w: f64,
    #[pyo3(get)]
    evals: u64,
    /// Annealer only: (step, temperature, capacity, accepted) per step.
    #[pyo3(get)]
    trace: Vec<(usize, f64, f64, bool)>,
}

impl From<AllocationResult> for PyAllocation {
    fn from(r: AllocationResult) -> Self {
        PyAllocation {
            total_power_w: r.feasibility.total_power,
            feasible: r.feasibility.feasible,
            capacity: r.capacity,
            evals: r.evals,
            trace: r
                .trace
                .iter()
                .map(|t| (t.iter, t.temperature, t.capacity, t.accepted))
                .collect(),
            powers_w: r.powers.0,
        }
    }
}

#[pymethods]
impl PyAllocation {
    fn __repr__(&self) -> String {
        format!(
            "Allocation(capacity={:.4}, feasible={}, evals={})",
            self.capacity, self.feasible, self.evals
        )
    }
}

/// Solve a scenario. `method` is "sa", "dual" or "brute"; channels are
/// drawn from `seed`, which also seeds the annealer.
#[pyfunction]
#[pyo3(signature = (
    scenario,
    method = "sa",
    seed = 0,
    perturb_scale = 0.1,
    inner_sweeps = 1,
    max_iters = 2000,
    initial_temp = 100.0,
    brute_resolution_steps = 50,
))]
#[allow(clippy::too_many_arguments)]
fn solve(
    scenario: &PyScenario,
    method: &str,
    seed: u64,
    perturb_scale: f64,
    inner_sweeps: usize,
    max_iters: usize,
    initial_temp: f64,
    brute_resolution_steps: usize,
) -> PyResult<PyAllocation> {
    let s = &scenario.inner;
    let channels = sample_channels(s, seed);
    let tables = InterferenceTables::build(s, &channels).map_err(to_py_err)?;
    let result = match method {
        "sa" => {
            let cfg = SaConfig {
                perturb_scale,
                inner_sweeps,
                max_iters,
                initial_temp,
                ..SaConfig::default()
            }
            .with_seed(seed);
            anneal(s, &channels, &tables, &cfg)
        }
        "dual" => solve_dual(s, &channels, &tables, &DualConfig::default()),
        "brute" => brute_force(
            s,
            &channels,
            &tables,
            s.p_max / brute_resolution_steps as f64,
        ),
        other => {
            return Err(PyValueError::new_err(format!(
                "unknown method `{other}` (expected sa, dual or brute)"
            )))
        }
    };
    Ok(result.map_err(to_py_err)?.into())
}

/// Total spectral efficiency of a given allocation on a scenario whose
/// channels are drawn from `seed`.
#[pyfunction]
fn evaluate_capacity(scenario: &PyScenario, seed: u64, powers_w: Vec<f64>) -> PyResult<f64> {
    let s = &scenario.inner;
    if powers_w.len() != s.grid.k_count {
        return Err(PyValueError::new_err(format!(
            "expected {} powers, got {}",
            s.grid.k_count,
            powers_w.len()
        )));
    }
    let p = PowerVector(powers_w);
    p.validate().map_err(to_py_err)?;
    let channels = sample_channels(s, seed);
    let tables = InterferenceTables::build(s, &channels).map_err(to_py_err)?;
    Ok(crpower_core::capacity::total_capacity(
        &p, s, &channels, &tables,
    ))
}

/// Fraction of a subcarrier's power leaking into a band `band_hz` wide
/// centred `distance_hz` away, for symbol time `ts_s`.
#[pyfunction]
fn leakage_factor(ts_s: f64, distance_hz: f64, band_hz: f64) -> PyResult<f64> {
    crpower_core::spectral::leakage_factor(ts_s, distance_hz, band_hz).map_err(to_py_err)
}

/// OFDM subcarrier PSD at offset `freq_hz` from the subcarrier centre.
#[pyfunction]
fn ofdm_psd(power_w: f64, ts_s: f64, freq_hz: f64) -> f64 {
    crpower_core::spectral::ofdm_psd(power_w, ts_s, freq_hz)
}

/// Decibel-watts to watts.
#[pyfunction]
fn dbw_to_watts(dbw: f64) -> f64 {
    harness::dbw_to_watts(dbw)
}

/// Interference tables of a scenario at one channel draw, as CSV text.
#[pyfunction]
fn interference_tables_csv(scenario: &PyScenario, seed: u64) -> PyResult<String> {
    let s = &scenario.inner;
    let channels = sample_channels(s, seed);
    let geometry = TableGeometry::build(s).map_err(to_py_err)?;
    let tables = geometry.with_channels(&channels);
    let mut buf = Vec::new();
    tables.write_csv(&mut buf).map_err(to_py_err)?;
    String::from_utf8(buf).map_err(|e| PyRuntimeError::new_err(e.to_string()))
}

#[pymodule]
fn crpower_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    m.add_class::<PyScenario>()?;
    m.add_class::<PyAllocation>()?;
    m.add_function(wrap_pyfunction!(solve, m)?)?;
    m.add_function(wrap_pyfunction!(evaluate_capacity, m)?)?;
    m.add_function(wrap_pyfunction!(leakage_factor, m)?)?;
    m.add_function(wrap_pyfunction!(ofdm_psd, m)?)?;
    m.add_function(wrap_pyfunction!(dbw_to_watts, m)?)?;
    m.add_function(wrap_pyfunction!(interference_tables_csv, m)?)?;
    Ok(())
}
