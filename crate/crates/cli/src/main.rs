//! `crpower` — cognitive-radio power allocation experiments.
//!
//! Subcommands: `solve` (one scenario, one method), `sweep` (run an
//! experiment config), `oracle` (brute force on small grids), `trace`
//! (annealer iteration trace as CSV), `dump-config` (print the resolved
//! config). Exit codes: 0 success, 1 usage or config error, 2 runtime
//! failure.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use crpower_core::error::Error;
use crpower_core::harness::{
    config_hash, derive_seed, dump_config, parse_config, run_experiment, run_single, Axis,
    ExperimentOutput, ExperimentSpec, Method,
};
use crpower_core::model::sample_channels;
use crpower_core::spectral::TableGeometry;

/// Environment variable that redirects relative output paths.
const OUT_DIR_ENV: &str = "CRPOWER_OUT_DIR";

#[derive(Parser)]
#[command(
    name = "crpower",
    version,
    about = "Downlink power allocation for OFDM cognitive-radio networks"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Common {
    /// Experiment config file (TOML); defaults apply when omitted.
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Override the master seed.
    #[arg(long, value_name = "N")]
    seed: Option<u64>,
}

#[derive(Subcommand)]
enum Command {
    /// Solve one scenario with one method and print the allocation.
    Solve {
        #[command(flatten)]
        common: Common,
        /// Solver: sa, dual or brute.
        #[arg(long, default_value = "sa")]
        method: String,
        /// Dump the interference tables as CSV to this path.
        #[arg(long, value_name = "PATH")]
        tables_out: Option<PathBuf>,
    },
    /// Run the experiment described by the config and write CSV output.
    Sweep {
        #[command(flatten)]
        common: Common,
        /// Override the output path from the config.
        #[arg(long, value_name = "PATH")]
        out: Option<PathBuf>,
        /// Worker threads for sweep points (default: all cores).
        #[arg(long, value_name = "N")]
        jobs: Option<usize>,
    },
    /// Brute-force oracle on a small scenario (K <= 6).
    Oracle {
        #[command(flatten)]
        common: Common,
    },
    /// Annealer iteration trace as CSV.
    Trace {
        #[command(flatten)]
        common: Common,
        /// Output path (default: trace.csv).
        #[arg(long, value_name = "PATH")]
        out: Option<PathBuf>,
    },
    /// Print the fully resolved config.
    DumpConfig {
        #[command(flatten)]
        common: Common,
    },
}

fn load_spec(common: &Common) -> Result<ExperimentSpec, Error> {
    let mut spec = match &common.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)?;
            parse_config(&text)?
        }
        None => parse_config("")?,
    };
    if let Some(seed) = common.seed {
        spec.sweep.master_seed = seed;
    }
    Ok(spec)
}

fn resolve_out(path: &Path) -> PathBuf {
    if path.is_absolute() {
        return path.to_path_buf();
    }
    match std::env::var_os(OUT_DIR_ENV) {
        Some(dir) => PathBuf::from(dir).join(path),
        None => path.to_path_buf(),
    }
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<(), Error> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent)?;
        }
    }
    std::fs::write(path, bytes)?;
    Ok(())
}

fn print_result(method: Method, seed: u64, result: &crpower_core::result::AllocationResult) {
    println!("method: {}", method.name());
    println!("seed: {seed}");
    println!("capacity_bits_per_s_per_hz: {}", result.capacity);
    println!("feasible: {}", result.feasibility.feasible);
    println!("total_power_w: {}", result.feasibility.total_power);
    for (l, i) in result.feasibility.per_pu_interference.iter().enumerate() {
        println!("pu_{l}_interference_w: {i}");
    }
    println!("evals: {}", result.evals);
    if let Some((mu, lambda)) = result.multipliers {
        println!("mu: {mu}");
        println!("lambda: {lambda}");
    }
    let powers: Vec<String> = result.powers.0.iter().map(|p| p.to_string()).collect();
    println!("powers_w: {}", powers.join(" "));
}

fn cmd_solve(common: Common, method: String, tables_out: Option<PathBuf>) -> Result<(), Error> {
    let spec = load_spec(&common)?;
    let method: Method = method.parse()?;
    let scenario = spec.realize_scenario()?;
    let geometry = TableGeometry::build(&scenario)?;
    let seed = derive_seed(spec.sweep.master_seed, spec.scenario.p_max_w, 0);
    if let Some(path) = tables_out {
        let channels = sample_channels(&scenario, seed);
        let tables = geometry.with_channels(&channels);
        let mut buf = Vec::new();
        tables.write_csv(&mut buf)?;
        let path = resolve_out(&path);
        write_file(&path, &buf)?;
        eprintln!("tables: {}", path.display());
    }
    let result = run_single(&spec, &scenario, &geometry, method, seed)?;
    print_result(method, seed, &result);
    Ok(())
}

fn cmd_sweep(common: Common, out: Option<PathBuf>, jobs: Option<usize>) -> Result<(), Error> {
    let mut spec = load_spec(&common)?;
    if let Some(out) = out {
        spec.sweep.out = out.to_string_lossy().into_owned();
    }
    let output = run_experiment(&spec, jobs)?;
    let out_path = resolve_out(Path::new(&spec.sweep.out));

    let mut buf = Vec::new();
    output.write_csv(&mut buf, &spec)?;
    write_file(&out_path, &buf)?;
    eprintln!("wrote {}", out_path.display());

    if matches!(output, ExperimentOutput::Sweep { .. }) {
        let trials_path = out_path.with_extension("trials.csv");
        let mut buf = Vec::new();
        output.write_trials_csv(&mut buf, &spec)?;
        write_file(&trials_path, &buf)?;
        eprintln!("wrote {}", trials_path.display());
    }
    if let ExperimentOutput::Sweep { rows, .. } = &output {
        let failed = rows.iter().filter(|r| r.error.is_some()).count();
        let total_ms: f64 = rows.iter().map(|r| r.wall_ms).sum();
        eprintln!(
            "{} rows, {} failed, {:.1} ms solver time, config {:016x}",
            rows.len(),
            failed,
            total_ms,
            config_hash(&spec)
        );
    }
    Ok(())
}

fn cmd_oracle(common: Common) -> Result<(), Error> {
    let spec = load_spec(&common)?;
    let scenario = spec.realize_scenario()?;
    let geometry = TableGeometry::build(&scenario)?;
    let seed = derive_seed(spec.sweep.master_seed, spec.scenario.p_max_w, 0);
    let result = run_single(&spec, &scenario, &geometry, Method::Brute, seed)?;
    print_result(Method::Brute, seed, &result);
    Ok(())
}

fn cmd_trace(common: Common, out: Option<PathBuf>) -> Result<(), Error> {
    let mut spec = load_spec(&common)?;
    if spec.sweep.axis != Axis::Trace {
        // run a trace at the scenario's own budget
        let dbw = 10.0 * spec.scenario.p_max_w.log10();
        spec.sweep.axis = Axis::Trace;
        spec.sweep.values = vec![dbw];
        spec.sweep.methods = vec![Method::Sa];
        spec.validate()?;
    }
    let output = run_experiment(&spec, None)?;
    let mut buf = Vec::new();
    output.write_csv(&mut buf, &spec)?;
    let path = resolve_out(&out.unwrap_or_else(|| PathBuf::from("trace.csv")));
    write_file(&path, &buf)?;
    eprintln!("wrote {}", path.display());
    Ok(())
}

fn cmd_dump_config(common: Common) -> Result<(), Error> {
    let spec = load_spec(&common)?;
    let text = dump_config(&spec)?;
    let mut stdout = std::io::stdout().lock();
    stdout.write_all(text.as_bytes())?;
    Ok(())
}

fn exit_code_for(err: &Error) -> u8 {
    match err {
        Error::InvalidArgument(_) | Error::Config { .. } => 1,
        Error::Numerical(_) | Error::Io(_) => 2,
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // clap's help/version output is a success, bad usage is not
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match cli.command {
        Command::Solve {
            common,
            method,
            tables_out,
        } => cmd_solve(common, method, tables_out),
        Command::Sweep { common, out, jobs } => cmd_sweep(common, out, jobs),
        Command::Oracle { common } => cmd_oracle(common),
        Command::Trace { common, out } => cmd_trace(common, out),
        Command::DumpConfig { common } => cmd_dump_config(common),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(exit_code_for(&err))
        }
    }
}
