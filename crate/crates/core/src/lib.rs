//! Downlink power allocation for OFDM-based cognitive-radio networks.
//!
//! A secondary network shares spectrum with licensed primary users (PUs).
//! Secondary users (SUs) transmit on OFDM subcarriers whose sinc-shaped
//! sidelobes leak power into the PU bands, while the PU signal, seen through
//! the receiver FFT, smears back into the SU subcarriers. This crate models
//! that mutual interference and solves the resulting constrained capacity
//! maximization two ways:
//!
//! - [`sa`] — a simulated-annealing allocator with Metropolis acceptance,
//!   temperature-scaled perturbations and radial feasibility projection;
//! - [`dual`] — a Lagrange-dual water-filling baseline with exhaustive
//!   multiplier search and bisection refinement, plus a brute-force grid
//!   oracle for desk-scale verification.
//!
//! [`model`] holds the scenario types and Rayleigh channel sampling,
//! [`spectral`] the leakage integrals and precomputed interference tables,
//! [`capacity`] the objective and constraint evaluation, and [`harness`]
//! the experiment sweeps, config files and CSV emission behind the CLI.
//!
//! # Example
//!
//! ```rust
//! use crpower_core::harness::{reference_scenario, dbw_to_watts};
//! use crpower_core::model::sample_channels;
//! use crpower_core::spectral::InterferenceTables;
//! use crpower_core::sa::{anneal, SaConfig};
//!
//! let mut scenario = reference_scenario();
//! scenario.p_max = dbw_to_watts(5.0);
//! let channels = sample_channels(&scenario, 7);
//! let tables = InterferenceTables::build(&scenario, &channels).unwrap();
//! let result = anneal(&scenario, &channels, &tables, &SaConfig::default()).unwrap();
//! assert!(result.feasibility.feasible);
//! assert!(result.capacity > 0.0);
//! ```

pub mod capacity;
pub mod dual;
pub mod error;
pub mod harness;
pub mod model;
pub mod quad;
pub mod result;
pub mod sa;
pub mod spectral;

pub use capacity::{check_feasible, subcarrier_rate, total_capacity, FeasibilityReport};
pub use dual::{brute_force, solve_dual, waterfill_power, DualConfig};
pub use error::Error;
pub use model::{
    build_grid, sample_channels, ChannelSet, OfdmGrid, PowerVector, PrimaryUser, PsdShape, Scenario,
};
pub use result::{AllocationResult, TracePoint};
pub use sa::{accept, anneal, perturb, project_feasible, SaConfig};
pub use spectral::{leakage_factor, ofdm_psd, InterferenceTables};
