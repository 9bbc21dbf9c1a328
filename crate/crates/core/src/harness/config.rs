//! Experiment configuration files.
//!
//! Configs are TOML key-value trees. Every key is optional and falls back
//! to the reference setup: the 32-subcarrier scenario with two PUs and the
//! transmit-power sweep. Unknown keys are rejected. `dump` emits the fully
//! resolved config, so `dump(load(x))` is a canonical form and loading it
//! back is idempotent.

use serde::{Deserialize, Serialize};

use crate::dual::DualConfig;
use crate::error::{Error, Result};
use crate::model::{build_grid, PrimaryUser, PsdShape, Scenario};
use crate::sa::SaConfig;

/// Serialized scenario section. PUs follow the reference layout: PU `l`
/// occupies a subcarrier-wide band centred on subcarrier `l`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ScenarioSection {
    pub total_bw_hz: f64,
    pub k_count: usize,
    pub fft_size: usize,
    pub base_freq_hz: f64,
    pub su_count: usize,
    pub noise_var_w: f64,
    pub p_max_w: f64,
    pub pu_count: usize,
    pub pu_tx_power_w: f64,
    pub pu_interference_cap_w: f64,
}

impl Default for ScenarioSection {
    fn default() -> Self {
        ScenarioSection {
            total_bw_hz: 12.8e6,
            k_count: 32,
            fft_size: 32,
            base_freq_hz: 0.0,
            su_count: 8,
            noise_var_w: 1e-6,
            p_max_w: 3.1622776601683795, // 5 dBW
            pu_count: 2,
            pu_tx_power_w: 0.01,
            pu_interference_cap_w: 1e-3,
        }
    }
}

/// Sweep axes the harness understands.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Axis {
    /// Sweep the SU power budget; values in dBW.
    PMaxDbw,
    /// Sweep the number of PUs; values are counts.
    PuCount,
    /// Sweep the number of SUs; values are counts.
    SuCount,
    /// Sweep the number of subcarriers (complexity table); values are counts.
    KCount,
    /// Single annealing run, iteration trace as CSV. `values[0]` is the
    /// budget in dBW.
    Trace,
    /// Per-subcarrier power snapshot. `values[0]` is the budget in dBW.
    Snapshot,
}

impl Axis {
    pub fn name(self) -> &'static str {
        match self {
            Axis::PMaxDbw => "p_max_dbw",
            Axis::PuCount => "pu_count",
            Axis::SuCount => "su_count",
            Axis::KCount => "k_count",
            Axis::Trace => "trace",
            Axis::Snapshot => "snapshot",
        }
    }
}

/// Solvers the harness can dispatch.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Sa,
    Dual,
    Brute,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Sa => "sa",
            Method::Dual => "dual",
            Method::Brute => "brute",
        }
    }
}

impl std::str::FromStr for Method {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sa" => Ok(Method::Sa),
            "dual" => Ok(Method::Dual),
            "brute" => Ok(Method::Brute),
            other => Err(Error::config(
                "method",
                format!("unknown method `{other}` (expected sa, dual or brute)"),
            )),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SweepSection {
    pub axis: Axis,
    pub values: Vec<f64>,
    pub methods: Vec<Method>,
    pub trials: usize,
    pub master_seed: u64,
    pub out: String,
}

impl Default for SweepSection {
    fn default() -> Self {
        // the transmit-power sweep: -20 to +15 dBW in 2.5 dB steps
        let values = (0..15).map(|i| -20.0 + 2.5 * i as f64).collect();
        SweepSection {
            axis: Axis::PMaxDbw,
            values,
            methods: vec![Method::Sa, Method::Dual],
            trials: 10,
            master_seed: 1,
            out: "fig3.csv".to_string(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SaSection {
    pub initial_temp: f64,
    pub cooling_factor: f64,
    pub epsilon: f64,
    pub max_iters: usize,
    pub perturb_scale: f64,
    pub inner_sweeps: usize,
}

impl Default for SaSection {
    fn default() -> Self {
        let d = SaConfig::default();
        SaSection {
            initial_temp: d.initial_temp,
            cooling_factor: d.cooling_factor,
            epsilon: d.epsilon,
            max_iters: d.max_iters,
            perturb_scale: d.perturb_scale,
            inner_sweeps: d.inner_sweeps,
        }
    }
}

impl SaSection {
    pub fn to_config(&self, seed: u64) -> SaConfig {
        SaConfig {
            initial_temp: self.initial_temp,
            cooling_factor: self.cooling_factor,
            epsilon: self.epsilon,
            max_iters: self.max_iters,
            perturb_scale: self.perturb_scale,
            inner_sweeps: self.inner_sweeps,
            temp_floor: None,
            seed,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DualSection {
    pub mu_min: f64,
    pub mu_max: f64,
    pub lambda_min: f64,
    pub lambda_max: f64,
    pub grid_points: usize,
    pub refine_iters: usize,
    pub inner_fixed_point_iters: usize,
    pub inner_tol: f64,
}

impl Default for DualSection {
    fn default() -> Self {
        let d = DualConfig::default();
        DualSection {
            mu_min: d.mu_range.0,
            mu_max: d.mu_range.1,
            lambda_min: d.lambda_range.0,
            lambda_max: d.lambda_range.1,
            grid_points: d.grid_points,
            refine_iters: d.refine_iters,
            inner_fixed_point_iters: d.inner_fixed_point_iters,
            inner_tol: d.inner_tol,
        }
    }
}

impl DualSection {
    pub fn to_config(&self) -> DualConfig {
        DualConfig {
            mu_range: (self.mu_min, self.mu_max),
            lambda_range: (self.lambda_min, self.lambda_max),
            grid_points: self.grid_points,
            refine_iters: self.refine_iters,
            inner_fixed_point_iters: self.inner_fixed_point_iters,
            inner_tol: self.inner_tol,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OracleSection {
    /// Brute-force lattice resolution: `delta = p_max / resolution_steps`.
    pub resolution_steps: usize,
}

impl Default for OracleSection {
    fn default() -> Self {
        OracleSection {
            resolution_steps: 50,
        }
    }
}

/// A full experiment description: scenario template, sweep definition and
/// solver parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields, default)]
pub struct ExperimentSpec {
    pub schema_version: u32,
    pub scenario: ScenarioSection,
    pub sweep: SweepSection,
    pub sa: SaSection,
    pub dual: DualSection,
    pub oracle: OracleSection,
}

pub const SCHEMA_VERSION: u32 = 1;

impl ExperimentSpec {
    pub fn validate(&self) -> Result<()> {
        if self.schema_version != 0 && self.schema_version != SCHEMA_VERSION {
            return Err(Error::config(
                "schema_version",
                format!(
                    "unsupported version {} (expected {SCHEMA_VERSION})",
                    self.schema_version
                ),
            ));
        }
        let s = &self.scenario;
        if !(s.total_bw_hz > 0.0) {
            return Err(Error::config("scenario.total_bw_hz", "must be > 0"));
        }
        if s.k_count == 0 {
            return Err(Error::config("scenario.k_count", "must be >= 1"));
        }
        if s.fft_size == 0 {
            return Err(Error::config("scenario.fft_size", "must be >= 1"));
        }
        if s.su_count == 0 {
            return Err(Error::config("scenario.su_count", "must be >= 1"));
        }
        if !(s.noise_var_w > 0.0) {
            return Err(Error::config("scenario.noise_var_w", "must be > 0"));
        }
        if !(s.p_max_w > 0.0) {
            return Err(Error::config("scenario.p_max_w", "must be > 0"));
        }
        if s.pu_count > s.k_count {
            return Err(Error::config(
                "scenario.pu_count",
                "cannot exceed scenario.k_count (one PU per subcarrier band)",
            ));
        }
        if s.pu_count > 0 && !(s.pu_interference_cap_w > 0.0) {
            return Err(Error::config(
                "scenario.pu_interference_cap_w",
                "must be > 0",
            ));
        }
        if s.pu_tx_power_w < 0.0 {
            return Err(Error::config("scenario.pu_tx_power_w", "must be >= 0"));
        }

        let w = &self.sweep;
        if w.values.is_empty() {
            return Err(Error::config("sweep.values", "must not be empty"));
        }
        if w.trials == 0 {
            return Err(Error::config("sweep.trials", "must be >= 1"));
        }
        if w.methods.is_empty() {
            return Err(Error::config("sweep.methods", "must not be empty"));
        }
        match w.axis {
            Axis::PuCount | Axis::SuCount | Axis::KCount => {
                for &v in &w.values {
                    if v < 0.0 || v.fract() != 0.0 {
                        return Err(Error::config(
                            "sweep.values",
                            format!("axis {} needs nonnegative integers, got {v}", w.axis.name()),
                        ));
                    }
                }
                if w.axis == Axis::SuCount || w.axis == Axis::KCount {
                    if w.values.iter().any(|&v| v == 0.0) {
                        return Err(Error::config("sweep.values", "counts must be >= 1"));
                    }
                }
            }
            Axis::Trace | Axis::Snapshot => {
                if w.values.len() != 1 {
                    return Err(Error::config(
                        "sweep.values",
                        format!("axis {} takes exactly one dBW value", w.axis.name()),
                    ));
                }
                if w.axis == Axis::Trace && w.methods != vec![Method::Sa] {
                    return Err(Error::config(
                        "sweep.methods",
                        "the trace axis records the annealer only; set methods = [\"sa\"]",
                    ));
                }
            }
            Axis::PMaxDbw => {}
        }

        if !(self.sa.cooling_factor > 0.0 && self.sa.cooling_factor < 1.0) {
            return Err(Error::config("sa.cooling_factor", "must be in (0, 1)"));
        }
        if !(self.sa.epsilon > 0.0) {
            return Err(Error::config("sa.epsilon", "must be > 0"));
        }
        if !(self.sa.initial_temp > 0.0) {
            return Err(Error::config("sa.initial_temp", "must be > 0"));
        }
        if !(self.sa.perturb_scale > 0.0) {
            return Err(Error::config("sa.perturb_scale", "must be > 0"));
        }
        if self.sa.max_iters == 0 || self.sa.inner_sweeps == 0 {
            return Err(Error::config(
                "sa.max_iters",
                "iteration counts must be >= 1",
            ));
        }
        if !(self.dual.mu_min > 0.0 && self.dual.mu_max >= self.dual.mu_min) {
            return Err(Error::config(
                "dual.mu_min",
                "range must be positive and ordered",
            ));
        }
        if !(self.dual.lambda_min > 0.0 && self.dual.lambda_max >= self.dual.lambda_min) {
            return Err(Error::config(
                "dual.lambda_min",
                "range must be positive and ordered",
            ));
        }
        if self.dual.grid_points < 2 {
            return Err(Error::config("dual.grid_points", "must be >= 2"));
        }
        if self.oracle.resolution_steps == 0 {
            return Err(Error::config("oracle.resolution_steps", "must be >= 1"));
        }
        Ok(())
    }

    /// Build the scenario template this spec describes.
    pub fn realize_scenario(&self) -> Result<Scenario> {
        let s = &self.scenario;
        build_reference_layout(
            s.total_bw_hz,
            s.k_count,
            s.fft_size,
            s.base_freq_hz,
            s.pu_count,
            s.pu_tx_power_w,
            s.pu_interference_cap_w,
            s.su_count,
            s.noise_var_w,
            s.p_max_w,
        )
    }
}

/// Grid plus the reference PU layout: PU `l` occupies a subcarrier-wide
/// band centred on subcarrier `l`, each with its own interference cap.
#[allow(clippy::too_many_arguments)]
pub fn build_reference_layout(
    total_bw: f64,
    k_count: usize,
    fft_size: usize,
    base_freq: f64,
    pu_count: usize,
    pu_tx_power: f64,
    pu_cap: f64,
    su_count: usize,
    noise_var: f64,
    p_max: f64,
) -> Result<Scenario> {
    let grid = build_grid(total_bw, k_count, fft_size, base_freq)?;
    let pus: Vec<PrimaryUser> = (0..pu_count)
        .map(|l| PrimaryUser {
            band_center: grid.center_freq(l),
            band_width: grid.subcarrier_bw,
            tx_power: pu_tx_power,
            interference_cap: pu_cap,
            psd_shape: PsdShape::Flat,
        })
        .collect();
    Scenario::new(grid, pus, su_count, noise_var, p_max)
}

/// Parse a config string. An empty string yields the full default spec.
pub fn parse_config(text: &str) -> Result<ExperimentSpec> {
    let spec: ExperimentSpec =
        toml::from_str(text).map_err(|e| Error::config(String::new(), e.to_string()))?;
    spec.validate()?;
    Ok(spec)
}

/// Load a config file; see [`parse_config`].
pub fn load_config(path: &std::path::Path) -> Result<ExperimentSpec> {
    let text = std::fs::read_to_string(path)?;
    parse_config(&text)
}

/// Serialize the fully resolved spec as canonical TOML.
pub fn dump_config(spec: &ExperimentSpec) -> Result<String> {
    let mut spec = spec.clone();
    spec.schema_version = SCHEMA_VERSION;
    toml::to_string_pretty(&spec).map_err(|e| Error::config(String::new(), e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_config_is_the_default_experiment() {
        let spec = parse_config("").unwrap();
        assert_eq!(spec, ExperimentSpec::default());
        assert_eq!(spec.sweep.axis, Axis::PMaxDbw);
        assert_eq!(spec.sweep.values.len(), 15);
        assert_eq!(spec.sweep.trials, 10);
        let scenario = spec.realize_scenario().unwrap();
        assert_eq!(scenario.grid.k_count, 32);
        assert_eq!(scenario.pus.len(), 2);
    }

    #[test]
    fn dump_load_round_trip_is_idempotent() {
        let once = parse_config("").unwrap();
        let dumped = dump_config(&once).unwrap();
        let twice = parse_config(&dumped).unwrap();
        assert_eq!(once.scenario, twice.scenario);
        assert_eq!(once.sweep, twice.sweep);
        let dumped_again = dump_config(&twice).unwrap();
        assert_eq!(dumped, dumped_again);
    }

    #[test]
    fn partial_config_overrides_only_named_keys() {
        let spec = parse_config("[scenario]\np_max_w = 2.0\n").unwrap();
        assert_eq!(spec.scenario.p_max_w, 2.0);
        assert_eq!(spec.scenario.k_count, 32);
    }

    #[test]
    fn semantic_error_names_the_key_path() {
        let err = parse_config("[scenario]\np_max_w = -1.0\n").unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("scenario.p_max_w"), "got: {msg}");
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let err = parse_config("[scenario]\nbogus_knob = 3\n").unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("bogus_knob"), "got: {msg}");
    }

    #[test]
    fn parse_error_carries_position() {
        let err = parse_config("[scenario\n").unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("line 1"), "got: {msg}");
    }

    #[test]
    fn trace_axis_constraints() {
        let err = parse_config("[sweep]\naxis = \"trace\"\nvalues = [5.0]\nmethods = [\"dual\"]\n")
            .unwrap_err();
        assert!(err.to_string().contains("sweep.methods"));
        let ok = parse_config("[sweep]\naxis = \"trace\"\nvalues = [5.0]\nmethods = [\"sa\"]\n");
        assert!(ok.is_ok());
    }

    #[test]
    fn count_axes_need_integers() {
        let err = parse_config("[sweep]\naxis = \"pu_count\"\nvalues = [1.5]\n").unwrap_err();
        assert!(err.to_string().contains("sweep.values"));
    }
}
