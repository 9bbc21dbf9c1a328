//! Sweep execution and CSV emission.

use std::io::Write;
use std::time::Instant;

use rayon::prelude::*;

use crate::dual::{brute_force, solve_dual};
use crate::error::{Error, Result};
use crate::harness::config::{Axis, ExperimentSpec, Method, SCHEMA_VERSION};
use crate::harness::dbw_to_watts;
use crate::model::{mix64, round_robin_assignment, sample_channels, Scenario};
use crate::result::AllocationResult;
use crate::sa::anneal;
use crate::spectral::TableGeometry;

/// Per-trial seed: mixes the master seed, the axis *value* and the trial
/// index, so a row's seed survives reordering of the axis values.
pub fn derive_seed(master_seed: u64, axis_value: f64, trial: u64) -> u64 {
    mix64(mix64(master_seed ^ mix64(axis_value.to_bits())) ^ trial)
}

/// FNV-1a hash of the canonical config dump; stamped into every manifest.
/// The output path is not part of the experiment's identity.
pub fn config_hash(spec: &ExperimentSpec) -> u64 {
    let mut spec = spec.clone();
    spec.sweep.out = String::new();
    let text = super::dump_config(&spec).unwrap_or_default();
    let mut h: u64 = 0xcbf29ce484222325;
    for b in text.as_bytes() {
        h ^= *b as u64;
        h = h.wrapping_mul(0x100000001b3);
    }
    h
}

/// One solver invocation inside a sweep.
#[derive(Debug, Clone)]
pub struct TrialRow {
    pub axis_value: f64,
    pub method: Method,
    pub seed: u64,
    pub capacity: f64,
    pub evals: u64,
    pub feasible: bool,
    /// Wall-clock duration; informational only, never serialized (CSV
    /// outputs must be byte-identical across reruns).
    pub wall_ms: f64,
    pub error: Option<String>,
}

/// Aggregate over the trials of one (axis value, method) point.
#[derive(Debug, Clone)]
pub struct PointSummary {
    pub axis_value: f64,
    pub method: Method,
    pub trials: usize,
    pub mean_capacity: f64,
    pub std_capacity: f64,
    pub mean_evals: f64,
    pub feasible_trials: usize,
    pub failed_trials: usize,
}

/// One row of a per-subcarrier snapshot.
#[derive(Debug, Clone)]
pub struct SnapshotRow {
    pub seed: u64,
    pub subcarrier: usize,
    pub power_w: f64,
}

/// What a run produced, ready for CSV serialization.
#[derive(Debug, Clone)]
pub enum ExperimentOutput {
    Sweep {
        axis: Axis,
        summary: Vec<PointSummary>,
        rows: Vec<TrialRow>,
    },
    Trace {
        seed: u64,
        result: AllocationResult,
    },
    Snapshot {
        rows: Vec<SnapshotRow>,
    },
}

/// Materialize the scenario of one axis point.
fn scenario_at(spec: &ExperimentSpec, axis: Axis, value: f64) -> Result<Scenario> {
    let mut scenario = spec.realize_scenario()?;
    match axis {
        Axis::PMaxDbw | Axis::Trace | Axis::Snapshot => {
            scenario.p_max = dbw_to_watts(value);
            scenario.validate()?;
            Ok(scenario)
        }
        Axis::PuCount => {
            let s = &spec.scenario;
            super::build_reference_layout(
                s.total_bw_hz,
                s.k_count,
                s.fft_size,
                s.base_freq_hz,
                value as usize,
                s.pu_tx_power_w,
                s.pu_interference_cap_w,
                s.su_count,
                s.noise_var_w,
                s.p_max_w,
            )
        }
        Axis::SuCount => {
            scenario.su_count = value as usize;
            scenario.su_assignment =
                round_robin_assignment(scenario.grid.k_count, scenario.su_count)?;
            scenario.validate()?;
            Ok(scenario)
        }
        Axis::KCount => {
            let s = &spec.scenario;
            let k = value as usize;
            let bs = s.total_bw_hz / s.k_count as f64;
            super::build_reference_layout(
                bs * k as f64,
                k,
                k,
                s.base_freq_hz,
                s.pu_count.min(k),
                s.pu_tx_power_w,
                s.pu_interference_cap_w,
                s.su_count,
                s.noise_var_w,
                s.p_max_w,
            )
        }
    }
}

/// Run one (scenario, method, seed) cell and return the solver result.
pub fn run_single(
    spec: &ExperimentSpec,
    scenario: &Scenario,
    geometry: &TableGeometry,
    method: Method,
    seed: u64,
) -> Result<AllocationResult> {
    let channels = sample_channels(scenario, seed);
    let tables = geometry.with_channels(&channels);
    match method {
        Method::Sa => anneal(scenario, &channels, &tables, &spec.sa.to_config(seed)),
        Method::Dual => solve_dual(scenario, &channels, &tables, &spec.dual.to_config()),
        Method::Brute => {
            let delta = scenario.p_max / spec.oracle.resolution_steps as f64;
            brute_force(scenario, &channels, &tables, delta)
        }
    }
}

fn run_cell(
    spec: &ExperimentSpec,
    scenario: &Scenario,
    geometry: &TableGeometry,
    method: Method,
    axis_value: f64,
    seed: u64,
) -> TrialRow {
    let start = Instant::now();
    match run_single(spec, scenario, geometry, method, seed) {
        Ok(result) => TrialRow {
            axis_value,
            method,
            seed,
            capacity: result.capacity,
            evals: result.evals,
            feasible: result.feasibility.feasible,
            wall_ms: start.elapsed().as_secs_f64() * 1e3,
            error: None,
        },
        Err(err) => TrialRow {
            axis_value,
            method,
            seed,
            capacity: f64::NAN,
            evals: 0,
            feasible: false,
            wall_ms: start.elapsed().as_secs_f64() * 1e3,
            error: Some(err.to_string()),
        },
    }
}

/// Execute an experiment. `jobs` bounds the worker pool (`None` = rayon's
/// default). Rows are produced in deterministic (axis, trial, method)
/// order regardless of scheduling; a solver failure is recorded in its row
/// and the run continues. Fails if every row failed.
pub fn run_experiment(spec: &ExperimentSpec, jobs: Option<usize>) -> Result<ExperimentOutput> {
    spec.validate()?;
    match spec.sweep.axis {
        Axis::Trace => return run_trace(spec),
        Axis::Snapshot => return run_snapshot(spec),
        _ => {}
    }

    let axis = spec.sweep.axis;
    // per-point scenarios and geometry caches, built once up front
    let mut points = Vec::with_capacity(spec.sweep.values.len());
    for &value in &spec.sweep.values {
        let scenario = scenario_at(spec, axis, value)?;
        let geometry = TableGeometry::build(&scenario)?;
        points.push((value, scenario, geometry));
    }

    let mut cells = Vec::new();
    for (value, scenario, geometry) in &points {
        for trial in 0..spec.sweep.trials {
            let seed = derive_seed(spec.sweep.master_seed, *value, trial as u64);
            for &method in &spec.sweep.methods {
                cells.push((*value, scenario, geometry, method, seed));
            }
        }
    }

    let run_all = || -> Vec<TrialRow> {
        cells
            .par_iter()
            .map(|(value, scenario, geometry, method, seed)| {
                run_cell(spec, scenario, geometry, *method, *value, *seed)
            })
            .collect()
    };
    let rows: Vec<TrialRow> = match jobs {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build()
            .map_err(|e| Error::numerical(format!("worker pool: {e}")))?
            .install(run_all),
        None => run_all(),
    };

    if rows.iter().all(|r| r.error.is_some()) {
        return Err(Error::numerical("every sweep cell failed"));
    }

    let mut summary = Vec::new();
    for &value in &spec.sweep.values {
        for &method in &spec.sweep.methods {
            let cell_rows: Vec<&TrialRow> = rows
                .iter()
                .filter(|r| r.axis_value == value && r.method == method)
                .collect();
            let ok: Vec<&&TrialRow> = cell_rows.iter().filter(|r| r.error.is_none()).collect();
            let n = ok.len();
            let mean = if n > 0 {
                ok.iter().map(|r| r.capacity).sum::<f64>() / n as f64
            } else {
                f64::NAN
            };
            let std = if n > 1 {
                let ss: f64 = ok.iter().map(|r| (r.capacity - mean).powi(2)).sum();
                (ss / (n as f64 - 1.0)).sqrt()
            } else {
                0.0
            };
            let mean_evals = if n > 0 {
                ok.iter().map(|r| r.evals as f64).sum::<f64>() / n as f64
            } else {
                f64::NAN
            };
            summary.push(PointSummary {
                axis_value: value,
                method,
                trials: cell_rows.len(),
                mean_capacity: mean,
                std_capacity: std,
                mean_evals,
                feasible_trials: ok.iter().filter(|r| r.feasible).count(),
                failed_trials: cell_rows.len() - n,
            });
        }
    }

    Ok(ExperimentOutput::Sweep {
        axis,
        summary,
        rows,
    })
}

fn run_trace(spec: &ExperimentSpec) -> Result<ExperimentOutput> {
    let value = spec.sweep.values[0];
    let scenario = scenario_at(spec, Axis::Trace, value)?;
    let geometry = TableGeometry::build(&scenario)?;
    let seed = derive_seed(spec.sweep.master_seed, value, 0);
    let result = run_single(spec, &scenario, &geometry, Method::Sa, seed)?;
    Ok(ExperimentOutput::Trace { seed, result })
}

fn run_snapshot(spec: &ExperimentSpec) -> Result<ExperimentOutput> {
    let value = spec.sweep.values[0];
    let scenario = scenario_at(spec, Axis::Snapshot, value)?;
    let geometry = TableGeometry::build(&scenario)?;
    let method = spec.sweep.methods.first().copied().unwrap_or(Method::Sa);
    let mut rows = Vec::new();
    for trial in 0..spec.sweep.trials {
        let seed = derive_seed(spec.sweep.master_seed, value, trial as u64);
        let result = run_single(spec, &scenario, &geometry, method, seed)?;
        for (k, &p) in result.powers.0.iter().enumerate() {
            rows.push(SnapshotRow {
                seed,
                subcarrier: k,
                power_w: p,
            });
        }
    }
    Ok(ExperimentOutput::Snapshot { rows })
}

// ---------------------------------------------------------------------------
// CSV serialization
// ---------------------------------------------------------------------------

fn write_manifest<W: Write>(w: &mut W, spec: &ExperimentSpec) -> Result<()> {
    writeln!(w, "# schema_version: {SCHEMA_VERSION}")?;
    writeln!(w, "# artifact_version: {}", env!("CARGO_PKG_VERSION"))?;
    writeln!(w, "# config_hash: {:016x}", config_hash(spec))?;
    writeln!(w, "# master_seed: {}", spec.sweep.master_seed)?;
    let seeds: Vec<String> = (0..spec.sweep.trials)
        .map(|t| derive_seed(spec.sweep.master_seed, spec.sweep.values[0], t as u64).to_string())
        .collect();
    writeln!(w, "# seeds_at_first_point: {}", seeds.join(","))?;
    Ok(())
}

impl ExperimentOutput {
    /// Serialize the primary CSV artifact of this run.
    pub fn write_csv<W: Write>(&self, w: &mut W, spec: &ExperimentSpec) -> Result<()> {
        write_manifest(w, spec)?;
        match self {
            ExperimentOutput::Sweep { axis, summary, .. } => {
                writeln!(
                    w,
                    "{},method,trials,mean_capacity,std_capacity,mean_evals,feasible_trials,failed_trials",
                    axis.name()
                )?;
                for p in summary {
                    writeln!(
                        w,
                        "{},{},{},{},{},{},{},{}",
                        p.axis_value,
                        p.method.name(),
                        p.trials,
                        p.mean_capacity,
                        p.std_capacity,
                        p.mean_evals,
                        p.feasible_trials,
                        p.failed_trials
                    )?;
                }
            }
            ExperimentOutput::Trace { seed, result } => {
                writeln!(w, "# seed: {seed}")?;
                let mut buf = Vec::new();
                result.write_trace_csv(&mut buf)?;
                w.write_all(&buf)?;
            }
            ExperimentOutput::Snapshot { rows } => {
                writeln!(w, "seed,subcarrier,power_w")?;
                for r in rows {
                    writeln!(w, "{},{},{}", r.seed, r.subcarrier, r.power_w)?;
                }
            }
        }
        Ok(())
    }

    /// Serialize the per-trial detail CSV (sweep runs only).
    pub fn write_trials_csv<W: Write>(&self, w: &mut W, spec: &ExperimentSpec) -> Result<()> {
        if let ExperimentOutput::Sweep { axis, rows, .. } = self {
            write_manifest(w, spec)?;
            writeln!(
                w,
                "{},method,seed,capacity,evals,feasible,error",
                axis.name()
            )?;
            for r in rows {
                writeln!(
                    w,
                    "{},{},{},{},{},{},{}",
                    r.axis_value,
                    r.method.name(),
                    r.seed,
                    r.capacity,
                    r.evals,
                    r.feasible as u8,
                    r.error.as_deref().unwrap_or("")
                )?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::parse_config;

    fn small_spec(extra: &str) -> ExperimentSpec {
        // a desk-size sweep that runs in well under a second
        let base = r#"
[scenario]
total_bw_hz = 1.6e6
k_count = 4
fft_size = 4
su_count = 2
pu_count = 1
p_max_w = 0.5

[sweep]
axis = "p_max_dbw"
values = [-10.0, 0.0]
methods = ["sa", "dual"]
trials = 3
master_seed = 7

[sa]
max_iters = 300
"#;
        parse_config(&format!("{base}\n{extra}")).unwrap()
    }

    #[test]
    fn seeds_survive_axis_reordering() {
        let a = derive_seed(1, -10.0, 0);
        let b = derive_seed(1, 0.0, 0);
        assert_ne!(a, b);
        // the seed is a function of the value, not its position
        assert_eq!(derive_seed(1, -10.0, 0), a);
        assert_ne!(derive_seed(2, -10.0, 0), a);
        assert_ne!(derive_seed(1, -10.0, 1), a);
    }

    #[test]
    fn sweep_produces_ordered_rows_and_consistent_means() {
        let spec = small_spec("");
        let out = run_experiment(&spec, Some(2)).unwrap();
        let (summary, rows) = match &out {
            ExperimentOutput::Sweep { summary, rows, .. } => (summary, rows),
            _ => panic!("expected sweep output"),
        };
        assert_eq!(rows.len(), 2 * 3 * 2);
        assert_eq!(summary.len(), 2 * 2);
        for p in summary {
            let manual: Vec<f64> = rows
                .iter()
                .filter(|r| r.axis_value == p.axis_value && r.method == p.method)
                .map(|r| r.capacity)
                .collect();
            let mean = manual.iter().sum::<f64>() / manual.len() as f64;
            assert!((mean - p.mean_capacity).abs() <= 1e-12);
            assert_eq!(p.feasible_trials, 3);
            assert_eq!(p.failed_trials, 0);
        }
    }

    #[test]
    fn reordering_axis_values_preserves_rows() {
        let spec = small_spec("");
        let mut reordered = spec.clone();
        reordered.sweep.values = vec![0.0, -10.0];
        let a = run_experiment(&spec, None).unwrap();
        let b = run_experiment(&reordered, None).unwrap();
        let rows = |o: &ExperimentOutput| match o {
            ExperimentOutput::Sweep { rows, .. } => rows.clone(),
            _ => unreachable!(),
        };
        let mut ra = rows(&a);
        let mut rb = rows(&b);
        let key = |r: &TrialRow| (r.axis_value.to_bits(), r.method.name(), r.seed);
        ra.sort_by_key(key);
        rb.sort_by_key(key);
        assert_eq!(ra.len(), rb.len());
        for (x, y) in ra.iter().zip(&rb) {
            assert_eq!(x.capacity.to_bits(), y.capacity.to_bits());
            assert_eq!(x.evals, y.evals);
        }
    }

    #[test]
    fn csv_output_is_deterministic() {
        let spec = small_spec("");
        let a = run_experiment(&spec, Some(2)).unwrap();
        let b = run_experiment(&spec, Some(4)).unwrap();
        let mut buf_a = Vec::new();
        let mut buf_b = Vec::new();
        a.write_csv(&mut buf_a, &spec).unwrap();
        b.write_csv(&mut buf_b, &spec).unwrap();
        assert_eq!(buf_a, buf_b);
        let header = String::from_utf8(buf_a).unwrap();
        assert!(header.contains("# schema_version: 1"));
        assert!(header.contains("# config_hash:"));
        assert!(header.contains("p_max_dbw,method,trials,mean_capacity,std_capacity"));
    }

    #[test]
    fn trace_run_emits_iteration_csv() {
        let spec = parse_config(
            "[sweep]\naxis = \"trace\"\nvalues = [5.0]\nmethods = [\"sa\"]\n[sa]\nmax_iters = 200\n[scenario]\nk_count = 4\nfft_size = 4\ntotal_bw_hz = 1.6e6\nsu_count = 2\npu_count = 1\n",
        )
        .unwrap();
        let out = run_experiment(&spec, None).unwrap();
        let mut buf = Vec::new();
        out.write_csv(&mut buf, &spec).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.contains("t,temperature,energy,capacity,accepted"));
        assert!(text.lines().count() > 10);
    }

    #[test]
    fn snapshot_run_emits_per_subcarrier_rows() {
        let spec = parse_config(
            "[sweep]\naxis = \"snapshot\"\nvalues = [5.0]\nmethods = [\"sa\"]\ntrials = 2\n[sa]\nmax_iters = 200\n[scenario]\nk_count = 4\nfft_size = 4\ntotal_bw_hz = 1.6e6\nsu_count = 2\npu_count = 1\n",
        )
        .unwrap();
        let out = run_experiment(&spec, None).unwrap();
        match &out {
            ExperimentOutput::Snapshot { rows } => assert_eq!(rows.len(), 2 * 4),
            _ => panic!("expected snapshot"),
        }
    }

    #[test]
    fn brute_method_guard_is_recorded_per_row() {
        // K = 8 with the brute method: every brute row fails, the sweep
        // still completes because dual rows succeed
        let spec = parse_config(
            "[scenario]\nk_count = 8\nfft_size = 8\ntotal_bw_hz = 3.2e6\nsu_count = 2\npu_count = 0\n[sweep]\naxis = \"p_max_dbw\"\nvalues = [0.0]\nmethods = [\"brute\", \"dual\"]\ntrials = 1\n",
        )
        .unwrap();
        let out = run_experiment(&spec, None).unwrap();
        match &out {
            ExperimentOutput::Sweep { rows, summary, .. } => {
                let brute = rows.iter().find(|r| r.method == Method::Brute).unwrap();
                assert!(brute.error.is_some());
                let s = summary.iter().find(|p| p.method == Method::Brute).unwrap();
                assert_eq!(s.failed_trials, 1);
            }
            _ => panic!("expected sweep"),
        }
    }
}
