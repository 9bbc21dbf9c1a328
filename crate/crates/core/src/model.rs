//! Domain types, scenario construction and random channel generation.
//!
//! Subcarriers are indexed `0..K` throughout the crate; subcarrier `k`
//! is centred `(k + 1/2) * Bs` above the base frequency.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;

use crate::error::{Error, Result};

/// OFDM subcarrier layout.
///
/// The symbol time is tied to the subcarrier bandwidth by `Ts = 1/Bs`
/// (ideal Nyquist pulses, no cyclic prefix).
#[derive(Debug, Clone, PartialEq)]
pub struct OfdmGrid {
    /// Number of subcarriers K.
    pub k_count: usize,
    /// Subcarrier bandwidth B_s in Hz.
    pub subcarrier_bw: f64,
    /// OFDM symbol duration T_s in seconds (= 1/B_s).
    pub symbol_time: f64,
    /// FFT size N used by the PU-PSD smoothing model.
    pub fft_size: usize,
    /// Lower edge of the system band in Hz.
    pub base_freq: f64,
    center_freq: Vec<f64>,
}

impl OfdmGrid {
    /// Centre frequency of subcarrier `k` (0-based) in Hz.
    pub fn center_freq(&self, k: usize) -> f64 {
        self.center_freq[k]
    }

    /// All subcarrier centre frequencies in Hz, ascending.
    pub fn centers(&self) -> &[f64] {
        &self.center_freq
    }

    /// Total occupied bandwidth `K * Bs` in Hz.
    pub fn total_bw(&self) -> f64 {
        self.subcarrier_bw * self.k_count as f64
    }

    /// Centre of the system band in Hz.
    pub fn system_center(&self) -> f64 {
        self.base_freq + 0.5 * self.total_bw()
    }
}

/// Build a grid of `k_count` equal subcarriers over `total_bw` Hz.
///
/// `total_bw` must split into `k_count` equal bands; subcarrier `k`
/// (0-based) is centred at `base_freq + (k + 1/2) * Bs`.
pub fn build_grid(
    total_bw: f64,
    k_count: usize,
    fft_size: usize,
    base_freq: f64,
) -> Result<OfdmGrid> {
    if !(total_bw > 0.0) || !total_bw.is_finite() {
        return Err(Error::invalid("total_bw must be positive and finite"));
    }
    if k_count == 0 {
        return Err(Error::invalid("k_count must be >= 1"));
    }
    if fft_size == 0 {
        return Err(Error::invalid("fft_size must be >= 1"));
    }
    let bs = total_bw / k_count as f64;
    // Reject layouts where the division is not exact in f64, e.g. a
    // 12.8 MHz band over 33 subcarriers. The fused multiply-add captures
    // the exact residual of bs * k_count - total_bw in one rounding.
    if (-bs).mul_add(k_count as f64, total_bw) != 0.0 {
        return Err(Error::invalid(format!(
            "total_bw {total_bw} Hz does not divide into {k_count} equal bands"
        )));
    }
    let center_freq: Vec<f64> = (0..k_count)
        .map(|k| base_freq + (k as f64 + 0.5) * bs)
        .collect();
    Ok(OfdmGrid {
        k_count,
        subcarrier_bw: bs,
        symbol_time: 1.0 / bs,
        fft_size,
        base_freq,
        center_freq,
    })
}

/// Spectral shape of the PU transmit PSD.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PsdShape {
    /// Constant amplitude `tx_power` across the PU band.
    Flat,
}

/// A licensed primary user: its band, transmit power and the aggregate
/// interference it tolerates from the secondary network.
#[derive(Debug, Clone, PartialEq)]
pub struct PrimaryUser {
    /// Centre frequency of the PU band in Hz.
    pub band_center: f64,
    /// PU band width B_p in Hz.
    pub band_width: f64,
    /// PU transmit power (PSD amplitude) in watts.
    pub tx_power: f64,
    /// Interference threshold I_th in watts.
    pub interference_cap: f64,
    /// Transmit PSD shape.
    pub psd_shape: PsdShape,
}

impl PrimaryUser {
    pub fn validate(&self) -> Result<()> {
        if !(self.band_width > 0.0) {
            return Err(Error::invalid("PU band_width must be > 0"));
        }
        if self.tx_power < 0.0 {
            return Err(Error::invalid("PU tx_power must be >= 0"));
        }
        if !(self.interference_cap > 0.0) {
            return Err(Error::invalid("PU interference_cap must be > 0"));
        }
        Ok(())
    }
}

/// Squared channel gains for every link the model needs.
///
/// `gain_ss_cross[i][k]` is the gain from the transmitter serving
/// subcarrier `i` to the receiver of subcarrier `k`. Pairs carried by the
/// same SU do not interfere (one synchronized OFDM link), so those entries
/// are zero, as is the diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelSet {
    /// |h^sp|^2 per (PU l, subcarrier k).
    pub gain_sp: Vec<Vec<f64>>,
    /// |h^ps|^2 per (PU l, subcarrier k).
    pub gain_ps: Vec<Vec<f64>>,
    /// |h^ss|^2 of the desired link per subcarrier k.
    pub gain_ss_direct: Vec<f64>,
    /// |h^ss|^2 per ordered subcarrier pair (i, k), i != k.
    pub gain_ss_cross: Vec<Vec<f64>>,
}

impl ChannelSet {
    pub fn validate(&self, scenario: &Scenario) -> Result<()> {
        let k = scenario.grid.k_count;
        let l = scenario.pus.len();
        if self.gain_sp.len() != l || self.gain_ps.len() != l {
            return Err(Error::invalid("PU gain tables have wrong PU count"));
        }
        for row in self.gain_sp.iter().chain(self.gain_ps.iter()) {
            if row.len() != k {
                return Err(Error::invalid("PU gain tables have wrong subcarrier count"));
            }
        }
        if self.gain_ss_direct.len() != k || self.gain_ss_cross.len() != k {
            return Err(Error::invalid("SU gain tables have wrong subcarrier count"));
        }
        let all = self
            .gain_sp
            .iter()
            .flatten()
            .chain(self.gain_ps.iter().flatten())
            .chain(self.gain_ss_direct.iter())
            .chain(self.gain_ss_cross.iter().flatten());
        for &g in all {
            if !g.is_finite() || g < 0.0 {
                return Err(Error::invalid("channel gains must be finite and >= 0"));
            }
        }
        Ok(())
    }
}

/// A full spectrum-sharing scenario: the grid, the PUs, the secondary
/// network size, the noise floor and the power budget.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub grid: OfdmGrid,
    pub pus: Vec<PrimaryUser>,
    /// Number of secondary users M.
    pub su_count: usize,
    /// AWGN variance sigma^2 in watts.
    pub noise_var: f64,
    /// Total SU transmit power budget in watts.
    pub p_max: f64,
    /// Owning SU index per subcarrier, length K.
    pub su_assignment: Vec<usize>,
}

impl Scenario {
    /// Scenario with the default round-robin subcarrier-to-SU assignment.
    pub fn new(
        grid: OfdmGrid,
        pus: Vec<PrimaryUser>,
        su_count: usize,
        noise_var: f64,
        p_max: f64,
    ) -> Result<Self> {
        let su_assignment = round_robin_assignment(grid.k_count, su_count)?;
        let s = Scenario {
            grid,
            pus,
            su_count,
            noise_var,
            p_max,
            su_assignment,
        };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.noise_var > 0.0) {
            return Err(Error::invalid("noise_var must be > 0"));
        }
        if !(self.p_max > 0.0) {
            return Err(Error::invalid("p_max must be > 0"));
        }
        if self.su_count == 0 {
            return Err(Error::invalid("su_count must be >= 1"));
        }
        if self.su_assignment.len() != self.grid.k_count {
            return Err(Error::invalid("su_assignment must cover all subcarriers"));
        }
        if let Some(&bad) = self.su_assignment.iter().find(|&&m| m >= self.su_count) {
            return Err(Error::invalid(format!(
                "su_assignment references SU {bad} but su_count is {}",
                self.su_count
            )));
        }
        for pu in &self.pus {
            pu.validate()?;
        }
        Ok(())
    }

    /// Number of subcarriers K.
    pub fn k_count(&self) -> usize {
        self.grid.k_count
    }
}

/// Round-robin assignment of `k_count` subcarriers over `su_count` SUs.
pub fn round_robin_assignment(k_count: usize, su_count: usize) -> Result<Vec<usize>> {
    if su_count == 0 {
        return Err(Error::invalid("su_count must be >= 1"));
    }
    Ok((0..k_count).map(|k| k % su_count).collect())
}

/// Candidate power allocation, one entry per subcarrier, in watts.
#[derive(Debug, Clone, PartialEq)]
pub struct PowerVector(pub Vec<f64>);

impl PowerVector {
    pub fn zeros(k: usize) -> Self {
        PowerVector(vec![0.0; k])
    }

    pub fn uniform(k: usize, per_subcarrier: f64) -> Self {
        PowerVector(vec![per_subcarrier; k])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn total(&self) -> f64 {
        self.0.iter().sum()
    }

    pub fn validate(&self) -> Result<()> {
        for &p in &self.0 {
            if !p.is_finite() || p < 0.0 {
                return Err(Error::invalid("powers must be finite and >= 0"));
            }
        }
        Ok(())
    }

    /// Largest absolute per-entry difference to `other`.
    pub fn linf_distance(&self, other: &PowerVector) -> f64 {
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

/// Spectral distance between subcarrier `k` and the centre of PU `pu`.
pub fn spectral_distance(grid: &OfdmGrid, pu: &PrimaryUser, k: usize) -> Result<f64> {
    if k >= grid.k_count {
        return Err(Error::invalid(format!(
            "subcarrier index {k} out of range (K = {})",
            grid.k_count
        )));
    }
    Ok((grid.center_freq(k) - pu.band_center).abs())
}

// ---------------------------------------------------------------------------
// Channel sampling
// ---------------------------------------------------------------------------

/// splitmix64 finalizer; the seed-mixing primitive used everywhere the
/// crate derives one deterministic stream from another.
pub fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e3779b97f4a7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
    z ^ (z >> 31)
}

fn substream(seed: u64, tag: u64, a: u64, b: u64) -> ChaCha12Rng {
    let s = mix64(mix64(mix64(seed ^ tag.wrapping_mul(0xa076_1d64_78bd_642f)) ^ a) ^ b);
    ChaCha12Rng::seed_from_u64(s)
}

/// One draw of |h|^2 for a Rayleigh-amplitude channel with unit average
/// power: exponential with unit mean.
fn unit_exp(rng: &mut ChaCha12Rng) -> f64 {
    let u: f64 = rng.random();
    -(1.0 - u).ln()
}

const TAG_SP: u64 = 1;
const TAG_PS: u64 = 2;
const TAG_SS_DIRECT: u64 = 3;
const TAG_SS_CROSS: u64 = 4;

/// Draw every channel gain of a scenario from the Rayleigh fading model.
///
/// Each |h|^2 is exponential with unit mean, drawn from its own substream
/// keyed by `(seed, link kind, indices)`. The draw for a given link is
/// therefore independent of the scenario's PU/SU counts, so two scenarios
/// sharing a seed see identical gains on their common links (common random
/// numbers across sweeps).
///
/// Cross gains between subcarriers carried by the same SU are zeroed after
/// drawing: a single SU's own subcarriers stay orthogonal.
pub fn sample_channels(scenario: &Scenario, seed: u64) -> ChannelSet {
    let k_count = scenario.grid.k_count;
    let l_count = scenario.pus.len();

    let draw = |tag: u64, a: usize, b: usize| -> f64 {
        unit_exp(&mut substream(seed, tag, a as u64, b as u64))
    };

    let gain_sp = (0..l_count)
        .map(|l| (0..k_count).map(|k| draw(TAG_SP, l, k)).collect())
        .collect();
    let gain_ps = (0..l_count)
        .map(|l| (0..k_count).map(|k| draw(TAG_PS, l, k)).collect())
        .collect();
    let gain_ss_direct = (0..k_count).map(|k| draw(TAG_SS_DIRECT, k, 0)).collect();
    let gain_ss_cross = (0..k_count)
        .map(|i| {
            (0..k_count)
                .map(|k| {
                    if i == k || scenario.su_assignment[i] == scenario.su_assignment[k] {
                        0.0
                    } else {
                        draw(TAG_SS_CROSS, i, k)
                    }
                })
                .collect()
        })
        .collect();

    ChannelSet {
        gain_sp,
        gain_ps,
        gain_ss_direct,
        gain_ss_cross,
    }
}
