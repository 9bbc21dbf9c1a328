//! Lagrange-dual water-filling baseline and the brute-force grid oracle.
//!
//! The dual method prices power with two multipliers: `mu` for the total
//! power budget and `lambda` for the PU interference caps. The stationarity
//! condition yields the closed-form per-subcarrier power of
//! [`waterfill_power`], in which the multipliers appear only through their
//! sum, so the exhaustive `(mu, lambda)` grid search is refined by
//! bisecting that single price towards the boundary of the active
//! constraint (complementary slackness: the multiplier of a slack
//! constraint is zero).
//!
//! The water-fill expression treats the SU↔SU interference as a constant
//! while it actually depends on the powers; the coupling is resolved by
//! Jacobi fixed-point iteration, and the convergence status is recorded in
//! the result.

use crate::capacity::{check_feasible, total_capacity};
use crate::error::{Error, Result};
use crate::model::{ChannelSet, PowerVector, Scenario};
use crate::result::AllocationResult;
use crate::spectral::{su_to_su_interference, InterferenceTables};

/// Feasibility tolerance used by the dual solver and the oracle.
pub const DUAL_FEAS_TOL: f64 = 1e-9;

/// Multiplier search space and inner-loop controls.
#[derive(Debug, Clone, PartialEq)]
pub struct DualConfig {
    /// Search interval for mu (log-spaced grid).
    pub mu_range: (f64, f64),
    /// Search interval for lambda (log-spaced grid).
    pub lambda_range: (f64, f64),
    /// Grid points per axis.
    pub grid_points: usize,
    /// Bisection rounds refining the binding-constraint boundary.
    pub refine_iters: usize,
    /// Jacobi iterations resolving the interference coupling.
    pub inner_fixed_point_iters: usize,
    /// Relative tolerance ending the Jacobi iteration early.
    pub inner_tol: f64,
}

impl Default for DualConfig {
    fn default() -> Self {
        DualConfig {
            mu_range: (1e-6, 1e3),
            lambda_range: (1e-6, 1e3),
            grid_points: 40,
            refine_iters: 30,
            inner_fixed_point_iters: 20,
            inner_tol: 1e-8,
        }
    }
}

impl DualConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.mu_range.0 > 0.0 && self.mu_range.1 >= self.mu_range.0) {
            return Err(Error::invalid("mu_range must be positive and ordered"));
        }
        if !(self.lambda_range.0 > 0.0 && self.lambda_range.1 >= self.lambda_range.0) {
            return Err(Error::invalid("lambda_range must be positive and ordered"));
        }
        if self.grid_points < 2 {
            return Err(Error::invalid("grid_points must be >= 2"));
        }
        if !(self.inner_tol > 0.0) {
            return Err(Error::invalid("inner_tol must be > 0"));
        }
        Ok(())
    }
}

/// Closed-form optimal power of subcarrier `k` at multipliers
/// `(mu, lambda)`, given the current estimate of the SU↔SU interference
/// hitting `k`:
///
/// `p_k = max(0, 1/((mu+lambda) ln 2) - (sigma^2 + sum_l J_k + IN_k)/|h_k^ss|^2)`.
///
/// A subcarrier with zero direct gain is unusable and gets zero.
pub fn waterfill_power(
    mu: f64,
    lambda: f64,
    k: usize,
    scenario: &Scenario,
    channels: &ChannelSet,
    tables: &InterferenceTables,
    interference_at_k: f64,
) -> Result<f64> {
    let price = mu + lambda;
    if !(price > 0.0) {
        return Err(Error::invalid("mu + lambda must be > 0"));
    }
    let gain = channels.gain_ss_direct[k];
    if gain == 0.0 {
        return Ok(0.0);
    }
    let level = 1.0 / (price * std::f64::consts::LN_2);
    let pu_part: f64 = tables.ps_interference.iter().map(|row| row[k]).sum();
    let floor = (scenario.noise_var + pu_part + interference_at_k) / gain;
    Ok((level - floor).max(0.0))
}

/// Resolve the water-fill/interference coupling at one multiplier pair by
/// Jacobi iteration from the empty allocation. Returns the allocation, the
/// convergence flag and the number of `waterfill_power` evaluations.
fn fixed_point_allocation(
    mu: f64,
    lambda: f64,
    scenario: &Scenario,
    channels: &ChannelSet,
    tables: &InterferenceTables,
    config: &DualConfig,
) -> Result<(PowerVector, bool, u64)> {
    let k_count = scenario.k_count();
    let mut p = PowerVector::zeros(k_count);
    let mut evals = 0u64;
    let mut converged = false;
    for _ in 0..config.inner_fixed_point_iters.max(1) {
        let mut next = PowerVector::zeros(k_count);
        for k in 0..k_count {
            let in_k = su_to_su_interference(&p, channels, tables, k);
            next.0[k] = waterfill_power(mu, lambda, k, scenario, channels, tables, in_k)?;
            evals += 1;
        }
        let scale = next.0.iter().cloned().fold(0.0, f64::max).max(1e-300);
        let change = next.linf_distance(&p) / scale;
        p = next;
        if change <= config.inner_tol {
            converged = true;
            break;
        }
    }
    Ok((p, converged, evals))
}

struct Candidate {
    powers: PowerVector,
    capacity: f64,
    price: f64,
    converged: bool,
}

/// `a` strictly better than `b` under (capacity, then lexicographically
/// smallest powers) ordering.
fn better(a: &Candidate, b: &Candidate) -> bool {
    if a.capacity != b.capacity {
        return a.capacity > b.capacity;
    }
    a.powers.0 < b.powers.0
}

/// Solve the dual problem: exhaustive log-grid search over
/// `(mu, lambda) >= 0`, Jacobi fixed point per pair, then bisection of the
/// combined price to the binding-constraint boundary. Returns the feasible
/// allocation of maximum capacity among everything evaluated.
///
/// When even the most expensive grid corner is infeasible (tiny budgets),
/// the bracket extends beyond the configured range by doubling: large
/// multipliers always drive the powers to zero, which is feasible.
pub fn solve_dual(
    scenario: &Scenario,
    channels: &ChannelSet,
    tables: &InterferenceTables,
    config: &DualConfig,
) -> Result<AllocationResult> {
    config.validate()?;
    scenario.validate()?;
    let mut evals = 0u64;
    let mut best: Option<Candidate> = None;

    let feasible =
        |p: &PowerVector| check_feasible(p, scenario, channels, tables, DUAL_FEAS_TOL).feasible;

    let consider = |cand: Candidate, best: &mut Option<Candidate>| {
        if best.as_ref().map_or(true, |b| better(&cand, b)) {
            *best = Some(cand);
        }
    };

    let probe =
        |mu: f64, lambda: f64, best: &mut Option<Candidate>, evals: &mut u64| -> Result<bool> {
            let (p, converged, e) =
                fixed_point_allocation(mu, lambda, scenario, channels, tables, config)?;
            *evals += e;
            let ok = feasible(&p);
            if ok {
                let capacity = total_capacity(&p, scenario, channels, tables);
                consider(
                    Candidate {
                        powers: p,
                        capacity,
                        price: mu + lambda,
                        converged,
                    },
                    best,
                );
            }
            Ok(ok)
        };

    // exhaustive multiplier grid
    let mus = log_grid(config.mu_range, config.grid_points);
    let lambdas = log_grid(config.lambda_range, config.grid_points);
    for &mu in &mus {
        for &lambda in &lambdas {
            probe(mu, lambda, &mut best, &mut evals)?;
        }
    }

    // Bracket the feasibility boundary in the combined price. The
    // allocation depends on the multipliers only through mu + lambda, so
    // the probes below pass the whole price as mu.
    let grid_min_price = mus[0] + lambdas[0];
    let grid_max_price = *mus.last().unwrap() + *lambdas.last().unwrap();
    let mut hi = match &best {
        Some(b) => b.price,
        None => {
            // nothing feasible on the grid: extend upward until feasible
            let mut s = grid_max_price;
            let mut found = false;
            for _ in 0..200 {
                s *= 2.0;
                if probe(s, 0.0, &mut best, &mut evals)? {
                    found = true;
                    break;
                }
            }
            if !found {
                return Err(Error::numerical(
                    "no feasible multiplier found; p -> 0 should always be feasible",
                ));
            }
            s
        }
    };
    let mut lo = grid_min_price.min(hi * 0.5);
    // make sure the lower end of the bracket is infeasible
    let mut lo_infeasible = false;
    for _ in 0..200 {
        if !probe(lo, 0.0, &mut best, &mut evals)? {
            lo_infeasible = true;
            break;
        }
        // everything feasible so far: cheaper prices mean more power and
        // more capacity, keep pushing down
        hi = lo;
        lo *= 0.5;
    }

    if lo_infeasible {
        for _ in 0..config.refine_iters {
            let mid = (lo * hi).sqrt();
            if probe(mid, 0.0, &mut best, &mut evals)? {
                hi = mid;
            } else {
                lo = mid;
            }
        }
    }

    let chosen = best.expect("at least one feasible candidate exists");

    // Complementary slackness: attribute the whole price to the binding
    // constraint; the slack constraint's multiplier is zero.
    let report = check_feasible(&chosen.powers, scenario, channels, tables, DUAL_FEAS_TOL);
    let power_ratio = report.total_power / scenario.p_max;
    let worst_pu_ratio = report
        .per_pu_interference
        .iter()
        .zip(&scenario.pus)
        .map(|(&i, pu)| i / pu.interference_cap)
        .fold(0.0, f64::max);
    let multipliers = if power_ratio >= worst_pu_ratio {
        (chosen.price, 0.0)
    } else {
        (0.0, chosen.price)
    };

    Ok(AllocationResult {
        capacity: chosen.capacity,
        powers: chosen.powers,
        feasibility: report,
        trace: Vec::new(),
        evals,
        fixed_point_converged: Some(chosen.converged),
        multipliers: Some(multipliers),
    })
}

fn log_grid(range: (f64, f64), points: usize) -> Vec<f64> {
    if range.0 == range.1 || points == 1 {
        return vec![range.0];
    }
    let ratio = range.1 / range.0;
    (0..points)
        .map(|i| range.0 * ratio.powf(i as f64 / (points - 1) as f64))
        .collect()
}

/// Exhaustively enumerate allocations on the lattice `{0, d, 2d, ...}^K`
/// subject to the power and interference constraints and return the
/// feasible maximizer. Capacity ties break to the lexicographically
/// smallest vector. Refused for `K > 6`.
pub fn brute_force(
    scenario: &Scenario,
    channels: &ChannelSet,
    tables: &InterferenceTables,
    grid_resolution: f64,
) -> Result<AllocationResult> {
    let k_count = scenario.k_count();
    if k_count > 6 {
        return Err(Error::invalid(format!(
            "brute force refused for K = {k_count} > 6"
        )));
    }
    if !(grid_resolution > 0.0) {
        return Err(Error::invalid("grid_resolution must be > 0"));
    }
    scenario.validate()?;

    let total_steps = (scenario.p_max / grid_resolution * (1.0 + 1e-12)).floor() as u64;
    let caps: Vec<f64> = scenario.pus.iter().map(|pu| pu.interference_cap).collect();

    struct Search<'a> {
        scenario: &'a Scenario,
        channels: &'a ChannelSet,
        tables: &'a InterferenceTables,
        delta: f64,
        caps: &'a [f64],
        best: Option<(f64, PowerVector)>,
        evals: u64,
    }

    impl Search<'_> {
        fn descend(&mut self, k: usize, p: &mut PowerVector, steps_left: u64, leak: &mut [f64]) {
            let k_count = self.scenario.k_count();
            if k == k_count {
                self.evals += 1;
                let capacity = total_capacity(p, self.scenario, self.channels, self.tables);
                let replace = match &self.best {
                    None => true,
                    Some((best_cap, _)) => capacity > *best_cap,
                };
                if replace {
                    self.best = Some((capacity, p.clone()));
                }
                return;
            }
            // enumerate in ascending lexicographic order so the first
            // maximizer found is the lexicographically smallest
            'steps: for m in 0..=steps_left {
                let pk = m as f64 * self.delta;
                p.0[k] = pk;
                let mut new_leak = leak.to_vec();
                for (l, nl) in new_leak.iter_mut().enumerate() {
                    *nl += pk * self.channels.gain_sp[l][k] * self.tables.sp_factor[l][k];
                    if *nl > self.caps[l] * (1.0 + DUAL_FEAS_TOL) {
                        // interference grows with m: every later step of
                        // this loop is infeasible too
                        break 'steps;
                    }
                }
                self.descend(k + 1, p, steps_left - m, &mut new_leak);
            }
            p.0[k] = 0.0;
        }
    }

    let mut search = Search {
        scenario,
        channels,
        tables,
        delta: grid_resolution,
        caps: &caps,
        best: None,
        evals: 0,
    };
    let mut scratch = PowerVector::zeros(k_count);
    let mut leak = vec![0.0; scenario.pus.len()];
    search.descend(0, &mut scratch, total_steps, &mut leak);

    let (capacity, powers) = search
        .best
        .expect("the zero allocation is always enumerated");
    let feasibility = check_feasible(&powers, scenario, channels, tables, DUAL_FEAS_TOL);
    Ok(AllocationResult {
        capacity,
        powers,
        feasibility,
        trace: Vec::new(),
        evals: search.evals,
        fixed_point_converged: None,
        multipliers: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{build_grid, sample_channels, PrimaryUser, PsdShape};

    fn free_scenario(k: usize, noise: f64, p_max: f64) -> Scenario {
        let grid = build_grid(0.4e6 * k as f64, k, k, 0.0).unwrap();
        Scenario::new(grid, vec![], k, noise, p_max).unwrap()
    }

    fn no_cross(ch: &mut ChannelSet) {
        for row in &mut ch.gain_ss_cross {
            for g in row {
                *g = 0.0;
            }
        }
    }

    fn scenario_with_pu(k: usize, p_max: f64, cap: f64) -> Scenario {
        let grid = build_grid(0.4e6 * k as f64, k, k, 0.0).unwrap();
        let pu = PrimaryUser {
            band_center: grid.center_freq(0),
            band_width: grid.subcarrier_bw,
            tx_power: 0.01,
            interference_cap: cap,
            psd_shape: PsdShape::Flat,
        };
        Scenario::new(grid, vec![pu], k, 1e-6, p_max).unwrap()
    }

    #[test]
    fn waterfill_clamps_below_the_floor() {
        let s = free_scenario(2, 1.0, 1.0);
        let mut ch = sample_channels(&s, 0);
        ch.gain_ss_direct = vec![1.0, 1.0];
        let t = InterferenceTables::build(&s, &ch).unwrap();
        // price so high the level sits under the noise floor
        let p = waterfill_power(1e6, 0.0, 0, &s, &ch, &t, 0.0).unwrap();
        assert_eq!(p, 0.0);
    }

    #[test]
    fn waterfill_classical_form_without_interference() {
        let s = free_scenario(2, 0.01, 1.0);
        let mut ch = sample_channels(&s, 0);
        ch.gain_ss_direct = vec![0.5, 0.5];
        let t = InterferenceTables::build(&s, &ch).unwrap();
        let mu = 2.0;
        let p = waterfill_power(mu, 0.0, 0, &s, &ch, &t, 0.0).unwrap();
        let expect = 1.0 / (mu * std::f64::consts::LN_2) - 0.01 / 0.5;
        assert!((p - expect).abs() < 1e-15);
        // symmetric inputs, symmetric outputs
        let q = waterfill_power(mu, 0.0, 1, &s, &ch, &t, 0.0).unwrap();
        assert_eq!(p, q);
    }

    #[test]
    fn waterfill_rejects_nonpositive_price_and_dead_gain() {
        let s = free_scenario(1, 1.0, 1.0);
        let mut ch = sample_channels(&s, 0);
        let t = InterferenceTables::build(&s, &ch).unwrap();
        assert!(waterfill_power(0.0, 0.0, 0, &s, &ch, &t, 0.0).is_err());
        ch.gain_ss_direct[0] = 0.0;
        let p = waterfill_power(1.0, 0.0, 0, &s, &ch, &t, 0.0).unwrap();
        assert_eq!(p, 0.0);
    }

    #[test]
    fn two_subcarrier_closed_form_oracle() {
        // gains (1, 1/4), sigma^2 = 0.1, p_max = 1: hand-solved KKT point
        // p* = (0.65, 0.35), C = 3.8137811912170371, mu* = 1.9235933878519512.
        let s = free_scenario(2, 0.1, 1.0);
        let mut ch = sample_channels(&s, 0);
        ch.gain_ss_direct = vec![1.0, 0.25];
        no_cross(&mut ch);
        let t = InterferenceTables::build(&s, &ch).unwrap();
        let r = solve_dual(&s, &ch, &t, &DualConfig::default()).unwrap();
        assert!(
            (r.powers.0[0] - 0.65).abs() < 1e-4,
            "p0 = {}",
            r.powers.0[0]
        );
        assert!(
            (r.powers.0[1] - 0.35).abs() < 1e-4,
            "p1 = {}",
            r.powers.0[1]
        );
        assert!(
            (r.capacity - 3.8137811912170371).abs() < 1e-6,
            "C = {}",
            r.capacity
        );
        let (mu, lambda) = r.multipliers.unwrap();
        assert!(lambda == 0.0, "no PU: lambda must be zero");
        assert!((mu - 1.9235933878519512).abs() < 1e-3, "mu = {mu}");
    }

    #[test]
    fn power_limited_regime_binds_the_budget() {
        // generous cap: lambda* -> 0 and the budget binds within 1e-6
        let s = scenario_with_pu(4, 0.5, 1e6);
        let ch = sample_channels(&s, 3);
        let t = InterferenceTables::build(&s, &ch).unwrap();
        let r = solve_dual(&s, &ch, &t, &DualConfig::default()).unwrap();
        let (mu, lambda) = r.multipliers.unwrap();
        assert_eq!(lambda, 0.0);
        assert!(mu > 0.0);
        let rel = (r.feasibility.total_power - s.p_max).abs() / s.p_max;
        assert!(rel < 1e-6, "total power off by {rel}");
    }

    #[test]
    fn interference_limited_regime_binds_the_cap() {
        // huge budget: mu* -> 0 and the PU cap binds within 1e-6
        let s = scenario_with_pu(4, 1e5, 1e-3);
        let ch = sample_channels(&s, 4);
        let t = InterferenceTables::build(&s, &ch).unwrap();
        let r = solve_dual(&s, &ch, &t, &DualConfig::default()).unwrap();
        let (mu, lambda) = r.multipliers.unwrap();
        assert_eq!(mu, 0.0);
        assert!(lambda > 0.0);
        let leak = r.feasibility.per_pu_interference[0];
        let rel = (leak - 1e-3).abs() / 1e-3;
        assert!(rel < 1e-6, "cap slack {rel}");
    }

    #[test]
    fn complementary_slackness_at_the_solution() {
        for seed in [1u64, 2, 3] {
            let s = scenario_with_pu(4, 1.0, 1e-3);
            let ch = sample_channels(&s, seed);
            let t = InterferenceTables::build(&s, &ch).unwrap();
            let r = solve_dual(&s, &ch, &t, &DualConfig::default()).unwrap();
            let (mu, lambda) = r.multipliers.unwrap();
            if mu > 1e-12 {
                let slack = (r.feasibility.total_power - s.p_max).abs();
                assert!(slack <= 1e-4 * s.p_max, "power slack {slack} with mu {mu}");
            }
            if lambda > 1e-12 {
                let worst: f64 = r
                    .feasibility
                    .per_pu_interference
                    .iter()
                    .zip(&s.pus)
                    .map(|(&i, pu)| (i - pu.interference_cap).abs() / pu.interference_cap)
                    .fold(f64::INFINITY, f64::min);
                assert!(worst <= 1e-4, "cap slack {worst} with lambda {lambda}");
            }
        }
    }

    #[test]
    fn dual_feasible_below_the_configured_range() {
        // budget so small every grid point is infeasible: the bracket
        // must extend beyond mu_range on its own
        let s = free_scenario(4, 1e-6, 1e-4);
        let ch = sample_channels(&s, 5);
        let t = InterferenceTables::build(&s, &ch).unwrap();
        let r = solve_dual(&s, &ch, &t, &DualConfig::default()).unwrap();
        assert!(r.feasibility.feasible);
        let rel = (r.feasibility.total_power - s.p_max).abs() / s.p_max;
        assert!(rel < 1e-6, "budget should bind, off by {rel}");
    }

    #[test]
    fn dual_capacity_monotone_in_budget_and_cap() {
        let seed = 11u64;
        let mut last = 0.0;
        for &p_max in &[0.05, 0.1, 0.5, 1.0, 2.0] {
            let s = scenario_with_pu(4, p_max, 1e-3);
            let ch = sample_channels(&s, seed);
            let t = InterferenceTables::build(&s, &ch).unwrap();
            let c = solve_dual(&s, &ch, &t, &DualConfig::default())
                .unwrap()
                .capacity;
            assert!(c >= last - 1e-12, "capacity fell: {c} after {last}");
            last = c;
        }
        last = 0.0;
        for &cap in &[1e-4, 1e-3, 1e-2] {
            let s = scenario_with_pu(4, 1.0, cap);
            let ch = sample_channels(&s, seed);
            let t = InterferenceTables::build(&s, &ch).unwrap();
            let c = solve_dual(&s, &ch, &t, &DualConfig::default())
                .unwrap()
                .capacity;
            assert!(c >= last - 1e-12, "capacity fell: {c} after {last}");
            last = c;
        }
    }

    #[test]
    fn waterfill_continuous_in_the_price() {
        let s = scenario_with_pu(3, 1.0, 1e-3);
        let ch = sample_channels(&s, 7);
        let t = InterferenceTables::build(&s, &ch).unwrap();
        // probe continuity away from the clamp boundary
        for &mu in &[0.5, 1.0, 5.0] {
            let h = mu * 1e-7;
            let a = waterfill_power(mu - h, 0.0, 1, &s, &ch, &t, 0.0).unwrap();
            let b = waterfill_power(mu + h, 0.0, 1, &s, &ch, &t, 0.0).unwrap();
            if a > 0.0 && b > 0.0 {
                let deriv = (a - b).abs() / (2.0 * h);
                let expect = 1.0 / (mu * mu * std::f64::consts::LN_2);
                assert!(
                    (deriv - expect).abs() / expect < 1e-3,
                    "finite difference {deriv} vs {expect}"
                );
            }
        }
    }

    #[test]
    fn brute_force_one_dimensional_scan() {
        let s = free_scenario(1, 1e-3, 1.0);
        let ch = sample_channels(&s, 2);
        let t = InterferenceTables::build(&s, &ch).unwrap();
        let r = brute_force(&s, &ch, &t, 0.25).unwrap();
        // monotone objective: the largest feasible multiple wins
        assert_eq!(r.powers.0[0], 1.0);
        assert_eq!(r.evals, 5);
    }

    #[test]
    fn brute_force_symmetric_tie_breaks_lexicographically() {
        let s = free_scenario(2, 1.0, 1.0);
        let mut ch = sample_channels(&s, 0);
        ch.gain_ss_direct = vec![1.0, 1.0];
        no_cross(&mut ch);
        let t = InterferenceTables::build(&s, &ch).unwrap();
        let r = brute_force(&s, &ch, &t, 0.5).unwrap();
        // (0.5, 0.5) is the unique symmetric optimum here
        assert_eq!(r.powers.0, vec![0.5, 0.5]);

        // with a coarse grid that forces an asymmetric split, the
        // lexicographically smallest of the tied optima is returned
        let r2 = brute_force(&s, &ch, &t, 1.0).unwrap();
        assert_eq!(r2.powers.0, vec![0.0, 1.0]);
    }

    #[test]
    fn brute_force_guards() {
        let s = free_scenario(7, 1e-3, 1.0);
        let ch = sample_channels(&s, 0);
        let t = InterferenceTables::build(&s, &ch).unwrap();
        assert!(brute_force(&s, &ch, &t, 0.1).is_err());
        let s2 = free_scenario(2, 1e-3, 1.0);
        let ch2 = sample_channels(&s2, 0);
        let t2 = InterferenceTables::build(&s2, &ch2).unwrap();
        assert!(brute_force(&s2, &ch2, &t2, 0.0).is_err());
    }

    #[test]
    fn dual_tracks_brute_force_as_the_grid_refines() {
        // uncoupled power-limited instance: the dual solution is the exact
        // water-filling optimum and the lattice closes in from below
        let seed = 8u64;
        let s = scenario_with_pu(3, 0.3, 1.0);
        let mut ch = sample_channels(&s, seed);
        no_cross(&mut ch);
        let t = InterferenceTables::build(&s, &ch).unwrap();
        let dual = solve_dual(&s, &ch, &t, &DualConfig::default()).unwrap();
        let coarse = brute_force(&s, &ch, &t, s.p_max / 20.0).unwrap();
        let fine = brute_force(&s, &ch, &t, s.p_max / 60.0).unwrap();
        // finer grid must do at least as well
        assert!(fine.capacity >= coarse.capacity - 1e-12);
        // and close in on the dual solution from below (allowing the
        // discretization slack of the lattice)
        assert!(
            (dual.capacity - fine.capacity).abs() <= (dual.capacity - coarse.capacity).abs() + 1e-9,
            "finer grid should be closer: dual {} coarse {} fine {}",
            dual.capacity,
            coarse.capacity,
            fine.capacity
        );
        assert!(dual.capacity >= fine.capacity - 0.02 * fine.capacity.abs());
    }

    #[test]
    fn dual_is_deterministic() {
        let s = scenario_with_pu(4, 1.0, 1e-3);
        let ch = sample_channels(&s, 13);
        let t = InterferenceTables::build(&s, &ch).unwrap();
        let a = solve_dual(&s, &ch, &t, &DualConfig::default()).unwrap();
        let b = solve_dual(&s, &ch, &t, &DualConfig::default()).unwrap();
        assert_eq!(a, b);
    }
}
