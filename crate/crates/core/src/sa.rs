//! Simulated-annealing power allocator.
//!
//! The annealer minimizes the energy `E = -C` (negated capacity) over the
//! feasible set. Each temperature step perturbs the current allocation
//! with zero-mean Gaussian jitter whose scale shrinks with temperature,
//! projects the candidate back into the feasible region by radial scaling
//! (the constraints are linear in the powers, so scaling preserves the
//! direction and restores feasibility exactly), and accepts or rejects by
//! the Metropolis rule. The best feasible point ever visited is returned.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use rand_distr::{Distribution, Normal};

use crate::capacity::{check_feasible, pu_interference_totals, total_capacity};
use crate::error::{Error, Result};
use crate::model::{mix64, ChannelSet, PowerVector, Scenario};
use crate::result::{AllocationResult, TracePoint};
use crate::spectral::InterferenceTables;

/// Annealing schedule and perturbation parameters.
///
/// The defaults mirror the reference experiment setup: initial control
/// temperature 100, exponential cooling by 0.95 per step and stopping
/// threshold 1e-6. The temperature is a dimensionless control; it is never
/// coupled to the wattage of the allocation.
#[derive(Debug, Clone, PartialEq)]
pub struct SaConfig {
    /// Initial temperature T0.
    pub initial_temp: f64,
    /// Multiplicative cooling factor per temperature step, in (0, 1).
    pub cooling_factor: f64,
    /// Convergence threshold on the L-inf move size of an accepted step.
    pub epsilon: f64,
    /// Hard cap on the number of candidate evaluations.
    pub max_iters: usize,
    /// Per-entry jitter scale as a fraction of `p_max` at T = T0.
    pub perturb_scale: f64,
    /// Candidates proposed per temperature step.
    pub inner_sweeps: usize,
    /// Temperature below which the convergence test may fire.
    /// `None` means `1e-6 * initial_temp`.
    pub temp_floor: Option<f64>,
    pub seed: u64,
}

impl Default for SaConfig {
    fn default() -> Self {
        SaConfig {
            initial_temp: 100.0,
            cooling_factor: 0.95,
            epsilon: 1e-6,
            max_iters: 2000,
            perturb_scale: 0.1,
            inner_sweeps: 1,
            temp_floor: None,
            seed: 0,
        }
    }
}

impl SaConfig {
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.cooling_factor > 0.0 && self.cooling_factor < 1.0) {
            return Err(Error::invalid("cooling_factor must be in (0, 1)"));
        }
        if !(self.epsilon > 0.0) {
            return Err(Error::invalid("epsilon must be > 0"));
        }
        if !(self.initial_temp > 0.0) {
            return Err(Error::invalid("initial_temp must be > 0"));
        }
        if !(self.perturb_scale > 0.0) {
            return Err(Error::invalid("perturb_scale must be > 0"));
        }
        if self.max_iters == 0 || self.inner_sweeps == 0 {
            return Err(Error::invalid("max_iters and inner_sweeps must be >= 1"));
        }
        Ok(())
    }

    fn floor(&self) -> f64 {
        self.temp_floor.unwrap_or(1e-6 * self.initial_temp)
    }
}

/// Metropolis acceptance: accept every non-worsening move, and a worsening
/// move with probability `exp(-delta / temperature)` (Boltzmann constant
/// taken as 1), decided against the uniform draw `r`.
pub fn accept(delta: f64, temperature: f64, r: f64) -> bool {
    if delta <= 0.0 {
        return true;
    }
    (-delta / temperature).exp() >= r
}

/// Jitter every entry of `p` by zero-mean Gaussian noise with standard
/// deviation `perturb_scale * p_max * (temperature / initial_temp)`,
/// clamping at zero.
pub fn perturb(
    p: &PowerVector,
    temperature: f64,
    p_max: f64,
    config: &SaConfig,
    rng: &mut ChaCha12Rng,
) -> PowerVector {
    let sd = config.perturb_scale * p_max * (temperature / config.initial_temp);
    let normal = Normal::new(0.0, sd.max(f64::MIN_POSITIVE)).expect("valid std dev");
    PowerVector(
        p.0.iter()
            .map(|&x| (x + normal.sample(rng)).max(0.0))
            .collect(),
    )
}

/// Scale an allocation back into the feasible region:
/// `p' = s * p` with `s = min(1, p_max/Σp, min_l I_th(l)/I_l(p))`.
///
/// Both the power budget and the interference caps are linear in `p`, so
/// one scaling restores all of them while preserving the direction. A point
/// that is already feasible is returned unchanged.
pub fn project_feasible(
    p: &PowerVector,
    scenario: &Scenario,
    channels: &ChannelSet,
    tables: &InterferenceTables,
) -> PowerVector {
    let mut s = 1.0f64;
    let total = p.total();
    if total > scenario.p_max {
        s = s.min(scenario.p_max / total);
    }
    let leaks = pu_interference_totals(p, channels, tables);
    for (leak, pu) in leaks.iter().zip(&scenario.pus) {
        if *leak > pu.interference_cap {
            s = s.min(pu.interference_cap / leak);
        }
    }
    if s >= 1.0 {
        return p.clone();
    }
    let mut out = PowerVector(p.0.iter().map(|&x| x * s).collect());
    // float rounding can leave the scaled point a few ulps outside; shave
    // until the exact comparisons hold (terminates in one or two rounds)
    for _ in 0..4 {
        let report = check_feasible(&out, scenario, channels, tables, 0.0);
        if report.feasible {
            break;
        }
        for x in &mut out.0 {
            *x *= 1.0 - 4.0 * f64::EPSILON;
        }
    }
    out
}

/// Run the annealer and return the best feasible allocation visited.
///
/// Steps: draw a random feasible start; evaluate `E = -C`; then per
/// temperature step propose `inner_sweeps` perturbed candidates, project
/// each to feasibility, and accept by [`accept`]. Cooling is exponential:
/// `T_t = T0 * cooling_factor^t`. The run stops when an accepted move is
/// smaller than `epsilon` in L-inf norm while the temperature is at or
/// below the floor, or after `max_iters` candidate evaluations.
pub fn anneal(
    scenario: &Scenario,
    channels: &ChannelSet,
    tables: &InterferenceTables,
    config: &SaConfig,
) -> Result<AllocationResult> {
    config.validate()?;
    scenario.validate()?;
    let k_count = scenario.k_count();
    let mut rng = ChaCha12Rng::seed_from_u64(mix64(config.seed ^ 0x5341_5f41_4e4e_4541));

    // random feasible start: uniform jitter around even loading, projected
    let raw = PowerVector(
        (0..k_count)
            .map(|_| rng.random::<f64>() * 2.0 * scenario.p_max / k_count as f64)
            .collect(),
    );
    let mut current = project_feasible(&raw, scenario, channels, tables);
    let mut energy = -total_capacity(&current, scenario, channels, tables);
    let mut evals: u64 = 1;
    if !energy.is_finite() {
        return Err(Error::numerical("objective not finite at the start point"));
    }

    let mut best = current.clone();
    let mut best_capacity = -energy;

    let mut trace: Vec<TracePoint> = Vec::new();
    let mut temperature = config.initial_temp;
    let floor = config.floor();

    'outer: for t in 0.. {
        for _ in 0..config.inner_sweeps {
            if evals as usize > config.max_iters {
                break 'outer;
            }
            let candidate = perturb(&current, temperature, scenario.p_max, config, &mut rng);
            let candidate = project_feasible(&candidate, scenario, channels, tables);
            let cand_energy = -total_capacity(&candidate, scenario, channels, tables);
            evals += 1;
            if !cand_energy.is_finite() {
                return Err(Error::numerical(format!(
                    "objective not finite at temperature step {t} (trace length {})",
                    trace.len()
                )));
            }
            let delta = cand_energy - energy;
            let r: f64 = rng.random();
            let accepted = accept(delta, temperature, r);
            let mut move_size = 0.0;
            if accepted {
                move_size = candidate.linf_distance(&current);
                current = candidate;
                energy = cand_energy;
                if -energy > best_capacity {
                    best_capacity = -energy;
                    best = current.clone();
                }
            }
            trace.push(TracePoint {
                iter: t,
                temperature,
                capacity: -energy,
                accepted,
            });
            if accepted && move_size < config.epsilon && temperature <= floor {
                break 'outer;
            }
        }
        temperature *= config.cooling_factor;
    }

    let feasibility = check_feasible(&best, scenario, channels, tables, 0.0);
    debug_assert!(feasibility.feasible);
    Ok(AllocationResult {
        capacity: total_capacity(&best, scenario, channels, tables),
        powers: best,
        feasibility,
        trace,
        evals,
        fixed_point_converged: None,
        multipliers: None,
    })
}
