//! Objective and constraint evaluation.
//!
//! The optimized quantity is spectral efficiency in bits/s/Hz: the sum over
//! subcarriers of `log2(1 + SINR_k)` with no bandwidth prefactor. The
//! harness scales by `Bs` when a figure wants bits/s.

use crate::model::{ChannelSet, PowerVector, Scenario};
use crate::spectral::{su_to_su_interference, InterferenceTables};

/// Outcome of checking an allocation against the power budget, the
/// per-PU interference caps and nonnegativity.
#[derive(Debug, Clone, PartialEq)]
pub struct FeasibilityReport {
    /// Total transmit power of the allocation in watts.
    pub total_power: f64,
    /// `total_power <= p_max * (1 + tol)`.
    pub power_ok: bool,
    /// Aggregate SU→PU interference per PU in watts.
    pub per_pu_interference: Vec<f64>,
    /// Per-PU `interference <= cap * (1 + tol)`.
    pub interference_ok: Vec<bool>,
    /// Every power entry is `>= 0`.
    pub nonneg_ok: bool,
    /// Conjunction of all the flags above.
    pub feasible: bool,
}

/// Total leaked power into each PU, in watts: `Σ_k p_k |h^sp|² factor`.
pub fn pu_interference_totals(
    p: &PowerVector,
    channels: &ChannelSet,
    tables: &InterferenceTables,
) -> Vec<f64> {
    (0..tables.pu_count())
        .map(|l| {
            p.0.iter()
                .enumerate()
                .map(|(k, &pk)| pk * channels.gain_sp[l][k] * tables.sp_factor[l][k])
                .sum()
        })
        .collect()
}

/// Everything under the signal in the SINR of subcarrier `k`:
/// `σ² + Σ_l J_k^{(l)} + Σ_{i≠k} IN_{i→k}`, in watts.
pub fn interference_floor(
    p: &PowerVector,
    k: usize,
    scenario: &Scenario,
    channels: &ChannelSet,
    tables: &InterferenceTables,
) -> f64 {
    let pu_part: f64 = tables.ps_interference.iter().map(|row| row[k]).sum();
    scenario.noise_var + pu_part + su_to_su_interference(p, channels, tables, k)
}

/// Spectral efficiency of subcarrier `k` in bits/s/Hz:
/// `log2(1 + |h^ss|² p_k / floor_k)`. Zero iff `p_k` is zero.
pub fn subcarrier_rate(
    p: &PowerVector,
    k: usize,
    scenario: &Scenario,
    channels: &ChannelSet,
    tables: &InterferenceTables,
) -> f64 {
    let pk = p.0[k];
    if pk == 0.0 {
        return 0.0;
    }
    let floor = interference_floor(p, k, scenario, channels, tables);
    (1.0 + channels.gain_ss_direct[k] * pk / floor).log2()
}

/// Total spectral efficiency: the optimization objective C.
pub fn total_capacity(
    p: &PowerVector,
    scenario: &Scenario,
    channels: &ChannelSet,
    tables: &InterferenceTables,
) -> f64 {
    (0..p.len())
        .map(|k| subcarrier_rate(p, k, scenario, channels, tables))
        .sum()
}

/// Per-SU spectral efficiency, grouped by `su_assignment`. Report-time
/// bookkeeping; the optimizers act on the sum.
pub fn per_su_rates(
    p: &PowerVector,
    scenario: &Scenario,
    channels: &ChannelSet,
    tables: &InterferenceTables,
) -> Vec<f64> {
    let mut rates = vec![0.0; scenario.su_count];
    for k in 0..p.len() {
        rates[scenario.su_assignment[k]] += subcarrier_rate(p, k, scenario, channels, tables);
    }
    rates
}

/// Check an allocation against every constraint at relative tolerance
/// `tol` (`tol = 0` is exact comparison).
pub fn check_feasible(
    p: &PowerVector,
    scenario: &Scenario,
    channels: &ChannelSet,
    tables: &InterferenceTables,
    tol: f64,
) -> FeasibilityReport {
    let total_power = p.total();
    let power_ok = total_power <= scenario.p_max * (1.0 + tol);
    let per_pu_interference = pu_interference_totals(p, channels, tables);
    let interference_ok: Vec<bool> = per_pu_interference
        .iter()
        .zip(&scenario.pus)
        .map(|(&i, pu)| i <= pu.interference_cap * (1.0 + tol))
        .collect();
    let nonneg_ok = p.0.iter().all(|&x| x >= 0.0);
    let feasible = power_ok && nonneg_ok && interference_ok.iter().all(|&b| b);
    FeasibilityReport {
        total_power,
        power_ok,
        per_pu_interference,
        interference_ok,
        nonneg_ok,
        feasible,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{build_grid, sample_channels, PrimaryUser, PsdShape, Scenario};
    use crate::spectral::leakage_factor;

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

    #[test]
    fn zero_power_zero_rate() {
        let s = free_scenario(4, 1e-6, 1.0);
        let ch = sample_channels(&s, 0);
        let t = InterferenceTables::build(&s, &ch).unwrap();
        let p = PowerVector::zeros(4);
        for k in 0..4 {
            assert_eq!(subcarrier_rate(&p, k, &s, &ch, &t), 0.0);
        }
        assert_eq!(total_capacity(&p, &s, &ch, &t), 0.0);
    }

    #[test]
    fn single_subcarrier_closed_form() {
        let s = free_scenario(1, 1.0, 1.0);
        let mut ch = sample_channels(&s, 0);
        ch.gain_ss_direct = vec![1.0];
        let t = InterferenceTables::build(&s, &ch).unwrap();
        let p = PowerVector(vec![1.0]);
        let r = subcarrier_rate(&p, 0, &s, &ch, &t);
        assert!((r - 1.0).abs() < 1e-15, "log2(2) = 1, got {r}");
    }

    #[test]
    fn identical_independent_subcarriers_double_the_rate() {
        let s = free_scenario(2, 1e-3, 1.0);
        let mut ch = sample_channels(&s, 0);
        ch.gain_ss_direct = vec![0.8, 0.8];
        no_cross(&mut ch);
        let t = InterferenceTables::build(&s, &ch).unwrap();
        let p = PowerVector(vec![0.5, 0.5]);
        let single = subcarrier_rate(&p, 0, &s, &ch, &t);
        let total = total_capacity(&p, &s, &ch, &t);
        assert_eq!(total, 2.0 * single);
    }

    #[test]
    fn golden_rates_against_independent_reimplementation() {
        // Recompute every rate from scratch (fresh quadrature, no tables)
        // and compare with the cached path on the reference layout.
        let grid = build_grid(12.8e6, 32, 32, 0.0).unwrap();
        let pus: Vec<PrimaryUser> = (0..2)
            .map(|l| PrimaryUser {
                band_center: grid.center_freq(l),
                band_width: grid.subcarrier_bw,
                tx_power: 0.01,
                interference_cap: 1e-3,
                psd_shape: PsdShape::Flat,
            })
            .collect();
        let s = Scenario::new(grid, pus, 8, 1e-6, 3.1623).unwrap();
        let ch = sample_channels(&s, 17);
        let t = InterferenceTables::build(&s, &ch).unwrap();
        let p = PowerVector::uniform(32, s.p_max / 32.0);

        for k in 0..32 {
            let mut floor = s.noise_var;
            for l in 0..2 {
                floor += ch.gain_ps[l][k] * crate::spectral::unit_pu_to_su(&s, l, k).unwrap();
            }
            for i in 0..32 {
                if i != k {
                    let d = (i as f64 - k as f64).abs() * s.grid.subcarrier_bw;
                    let f = leakage_factor(s.grid.symbol_time, d, s.grid.subcarrier_bw).unwrap();
                    floor += p.0[i] * ch.gain_ss_cross[i][k] * f;
                }
            }
            let expect = (1.0 + ch.gain_ss_direct[k] * p.0[k] / floor).log2();
            let got = subcarrier_rate(&p, k, &s, &ch, &t);
            assert!(
                ((got - expect) / expect).abs() < 1e-9,
                "k={k}: {got} vs {expect}"
            );
        }
    }

    #[test]
    fn total_matches_sum_of_rates() {
        let s = free_scenario(8, 1e-6, 2.0);
        let ch = sample_channels(&s, 3);
        let t = InterferenceTables::build(&s, &ch).unwrap();
        let p = PowerVector::uniform(8, 0.25);
        let total = total_capacity(&p, &s, &ch, &t);
        let sum: f64 = (0..8).map(|k| subcarrier_rate(&p, k, &s, &ch, &t)).sum();
        assert!((total - sum).abs() <= 1e-12);
    }

    #[test]
    fn capacity_invariant_under_relabeling() {
        // Permute every per-subcarrier structure consistently; the sum
        // must not change beyond float reordering.
        let s = free_scenario(6, 1e-6, 1.0);
        let ch = sample_channels(&s, 8);
        let t = InterferenceTables::build(&s, &ch).unwrap();
        let p = PowerVector(vec![0.1, 0.2, 0.05, 0.3, 0.15, 0.2]);
        let base = total_capacity(&p, &s, &ch, &t);

        // reverse is an involution that preserves |i - k|, so the cached
        // distance table stays valid under it
        let perm: Vec<usize> = (0..6).rev().collect();
        let mut ch2 = ch.clone();
        ch2.gain_ss_direct = perm.iter().map(|&i| ch.gain_ss_direct[i]).collect();
        ch2.gain_ss_cross = perm
            .iter()
            .map(|&i| perm.iter().map(|&k| ch.gain_ss_cross[i][k]).collect())
            .collect();
        let mut s2 = s.clone();
        s2.su_assignment = perm.iter().map(|&i| s.su_assignment[i]).collect();
        let p2 = PowerVector(perm.iter().map(|&i| p.0[i]).collect());
        let permuted = total_capacity(&p2, &s2, &ch2, &t);
        assert!((base - permuted).abs() < 1e-12, "{base} vs {permuted}");
    }

    #[test]
    fn doubling_noise_reduces_every_nonzero_rate() {
        let s1 = free_scenario(4, 1e-4, 1.0);
        let mut s2 = s1.clone();
        s2.noise_var = 2e-4;
        let mut ch = sample_channels(&s1, 5);
        no_cross(&mut ch);
        let t1 = InterferenceTables::build(&s1, &ch).unwrap();
        let t2 = InterferenceTables::build(&s2, &ch).unwrap();
        let p = PowerVector(vec![0.25, 0.25, 0.0, 0.5]);
        for k in 0..4 {
            let a = subcarrier_rate(&p, k, &s1, &ch, &t1);
            let b = subcarrier_rate(&p, k, &s2, &ch, &t2);
            if p.0[k] > 0.0 {
                assert!(b < a, "k={k}: {b} !< {a}");
            } else {
                assert_eq!(a, 0.0);
                assert_eq!(b, 0.0);
            }
        }
    }

    #[test]
    fn feasibility_examples() {
        let grid = build_grid(1.6e6, 4, 4, 0.0).unwrap();
        let pu = PrimaryUser {
            band_center: grid.center_freq(0),
            band_width: grid.subcarrier_bw,
            tx_power: 0.01,
            interference_cap: 1e-3,
            psd_shape: PsdShape::Flat,
        };
        let s = Scenario::new(grid, vec![pu], 2, 1e-6, 1.0).unwrap();
        let mut ch = sample_channels(&s, 2);
        let t = InterferenceTables::build(&s, &ch).unwrap();

        let zeros = PowerVector::zeros(4);
        let r = check_feasible(&zeros, &s, &ch, &t, 0.0);
        assert!(r.feasible && r.power_ok && r.nonneg_ok);
        assert_eq!(r.total_power, 0.0);

        // uniform p_max/K with zero sp gains: power binds exactly, zero leak
        ch.gain_sp[0] = vec![0.0; 4];
        let t2 = InterferenceTables::build(&s, &ch).unwrap();
        let uniform = PowerVector::uniform(4, 0.25);
        let r2 = check_feasible(&uniform, &s, &ch, &t2, 0.0);
        assert!(r2.power_ok && r2.feasible);
        assert_eq!(r2.per_pu_interference[0], 0.0);

        let double = PowerVector::uniform(4, 0.5);
        let r3 = check_feasible(&double, &s, &ch, &t2, 0.0);
        assert!(!r3.power_ok && !r3.feasible);

        let negative = PowerVector(vec![-0.1, 0.0, 0.0, 0.0]);
        let r4 = check_feasible(&negative, &s, &ch, &t2, 0.0);
        assert!(!r4.nonneg_ok && !r4.feasible);
    }

    #[test]
    fn reports_are_reproducible() {
        let s = free_scenario(5, 1e-6, 1.0);
        let ch = sample_channels(&s, 6);
        let t = InterferenceTables::build(&s, &ch).unwrap();
        let p = PowerVector(vec![0.2, 0.0, 0.3, 0.1, 0.4]);
        let a = check_feasible(&p, &s, &ch, &t, 0.0);
        let b = check_feasible(&p, &s, &ch, &t, 0.0);
        assert_eq!(a, b);
    }

    #[test]
    fn per_su_rates_sum_to_capacity() {
        let s = free_scenario(8, 1e-6, 1.0);
        let ch = sample_channels(&s, 10);
        let t = InterferenceTables::build(&s, &ch).unwrap();
        let p = PowerVector::uniform(8, 0.125);
        let by_su = per_su_rates(&p, &s, &ch, &t);
        let total = total_capacity(&p, &s, &ch, &t);
        let sum: f64 = by_su.iter().sum();
        assert!((sum - total).abs() < 1e-12);
    }
}
