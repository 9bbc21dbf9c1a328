//! Spectral-leakage interference kernels.
//!
//! Three couplings, all driven by out-of-band energy:
//!
//! - **SU → PU**: the sinc²-shaped subcarrier PSD integrated over the PU
//!   band ([`leakage_factor`], [`su_to_pu_interference`]). Linear in the
//!   subcarrier power.
//! - **PU → SU**: the PU PSD as seen through the receiver's N-point FFT,
//!   i.e. convolved with the squared Dirichlet (Fejér) kernel, integrated
//!   over the victim subcarrier band ([`fejer_smoothed_psd`],
//!   [`pu_to_su_interference`]). Independent of the SU powers.
//! - **SU → SU**: sinc² leakage between subcarriers carried by different
//!   SUs ([`su_to_su_interference`]).
//!
//! [`InterferenceTables`] caches every integral once so the optimizers
//! evaluate capacity with plain arithmetic, no quadrature in the hot loop.
//!
//! Frequency convention for the FFT model: the digital axis `[-pi, pi]`
//! spans `N * Bs` Hz centred on the system band, so one subcarrier occupies
//! a `2*pi/N`-wide window. The Dirichlet kernel is 2π-periodic, which means
//! leakage wraps circularly at the band edges, as an FFT receiver sees it.

use std::io::Write;

use crate::error::{Error, Result};
use crate::model::{
    spectral_distance, ChannelSet, OfdmGrid, PowerVector, PrimaryUser, PsdShape, Scenario,
};
use crate::quad::{integrate_dirichlet_sq, integrate_sinc_sq, QUAD_REL_TOL};

/// Power spectral density of one OFDM subcarrier at offset `f` Hz from its
/// centre: `p_k * Ts * sinc^2(f * Ts)`, in W/Hz.
pub fn ofdm_psd(p_k: f64, ts: f64, f: f64) -> f64 {
    p_k * ts * crate::quad::sinc_sq(f * ts)
}

/// Fraction of a subcarrier's power leaking into a band of width `band` Hz
/// whose centre lies `d` Hz away: `Ts * ∫ sinc^2(f Ts) df` over the band.
///
/// Always in `[0, 1]`; computed by adaptive quadrature to a relative error
/// of 1e-9.
pub fn leakage_factor(ts: f64, d: f64, band: f64) -> Result<f64> {
    if !(ts > 0.0) || !ts.is_finite() {
        return Err(Error::invalid("symbol time must be positive and finite"));
    }
    if band < 0.0 || !band.is_finite() {
        return Err(Error::invalid("band width must be >= 0 and finite"));
    }
    if band == 0.0 {
        return Ok(0.0);
    }
    // substitute u = f * Ts; the Ts prefactor cancels the df scaling
    let u0 = (d - band / 2.0) * ts;
    let u1 = (d + band / 2.0) * ts;
    let v = integrate_sinc_sq(u0, u1, QUAD_REL_TOL)?;
    Ok(v.clamp(0.0, 1.0))
}

/// Interference a subcarrier at power `p_k` inflicts on a PU:
/// `p_k * |h^sp|^2 * factor`, in watts. Linear in `p_k`.
pub fn su_to_pu_interference(p_k: f64, gain_sp: f64, factor: f64) -> f64 {
    p_k * gain_sp * factor
}

/// The digital-frequency mapping of the N-point FFT model.
#[derive(Debug, Clone, Copy)]
pub struct DigitalAxis {
    /// Centre of the system band in Hz (maps to omega = 0).
    pub center_hz: f64,
    /// Bandwidth covered by `[-pi, pi]`: `N * Bs` in Hz.
    pub span_hz: f64,
}

impl DigitalAxis {
    pub fn from_grid(grid: &OfdmGrid) -> Self {
        DigitalAxis {
            center_hz: grid.system_center(),
            span_hz: grid.fft_size as f64 * grid.subcarrier_bw,
        }
    }

    /// Radians-per-sample frequency of an absolute frequency in Hz.
    pub fn to_omega(&self, f_hz: f64) -> f64 {
        2.0 * std::f64::consts::PI * (f_hz - self.center_hz) / self.span_hz
    }

    /// Width in radians of a band of `width_hz` Hz.
    pub fn width(&self, width_hz: f64) -> f64 {
        2.0 * std::f64::consts::PI * width_hz / self.span_hz
    }
}

/// PSD of a flat band after N-point FFT smoothing, evaluated at `omega`:
/// `(1/2πN) ∫ φ(e^{jφ}) * Dirichlet_N²(ω − φ) dφ` with `φ` flat at
/// `amplitude` over `[band_lo, band_hi]` radians.
pub fn fejer_smoothed_flat(
    amplitude: f64,
    band_lo: f64,
    band_hi: f64,
    n: u32,
    omega: f64,
) -> Result<f64> {
    if band_hi <= band_lo || amplitude == 0.0 {
        return Ok(0.0);
    }
    // ∫_{a}^{b} D²(ω−φ) dφ = ∫_{ω−b}^{ω−a} D²(x) dx
    let v = integrate_dirichlet_sq(omega - band_hi, omega - band_lo, n, 1e-13)?;
    Ok(amplitude * v / (2.0 * std::f64::consts::PI * n as f64))
}

/// PSD of the PU signal after N-point FFT smoothing, at digital frequency
/// `omega`. The PU band is mapped onto the digital axis of `axis`.
pub fn fejer_smoothed_psd(pu: &PrimaryUser, axis: &DigitalAxis, n: u32, omega: f64) -> Result<f64> {
    match pu.psd_shape {
        PsdShape::Flat => {
            let center = axis.to_omega(pu.band_center);
            let half = 0.5 * axis.width(pu.band_width);
            fejer_smoothed_flat(pu.tx_power, center - half, center + half, n, omega)
        }
    }
}

/// Interference PU `l` introduces onto subcarrier `k`, in watts:
/// the FFT-smoothed PU PSD integrated over the victim subcarrier band,
/// scaled by `|h^ps|^2`.
pub fn pu_to_su_interference(
    scenario: &Scenario,
    channels: &ChannelSet,
    l: usize,
    k: usize,
) -> Result<f64> {
    let gain = channels.gain_ps[l][k];
    Ok(gain * unit_pu_to_su(scenario, l, k)?)
}

/// [`pu_to_su_interference`] without the channel gain; depends only on the
/// grid geometry and the PU, so it can be cached across channel draws.
pub fn unit_pu_to_su(scenario: &Scenario, l: usize, k: usize) -> Result<f64> {
    let pu = &scenario.pus[l];
    if pu.tx_power == 0.0 {
        return Ok(0.0);
    }
    let grid = &scenario.grid;
    let axis = DigitalAxis::from_grid(grid);
    let n = grid.fft_size as u32;
    let omega_k = axis.to_omega(grid.center_freq(k));
    let half = 0.5 * axis.width(grid.subcarrier_bw);
    let f = |w: f64| fejer_smoothed_psd(pu, &axis, n, w).unwrap_or(f64::NAN);
    // size the target from a coarse pass; the inner quadrature noise sits
    // well below 1e-9 of the value
    let coarse =
        crate::quad::adaptive_simpson(&f, omega_k - half, omega_k + half, 1e-6 * pu.tx_power)?;
    let tol = (1e-9 * coarse.abs()).max(1e-16 * pu.tx_power);
    crate::quad::adaptive_simpson(&f, omega_k - half, omega_k + half, tol)
}

/// Aggregate sinc² leakage from every other subcarrier onto `k`:
/// `Σ_{i≠k} p_i * |h_{i→k}^ss|^2 * factor(i, k)`, in watts.
pub fn su_to_su_interference(
    p: &PowerVector,
    channels: &ChannelSet,
    tables: &InterferenceTables,
    k: usize,
) -> f64 {
    let mut sum = 0.0;
    for i in 0..p.len() {
        if i != k {
            sum += p.0[i] * channels.gain_ss_cross[i][k] * tables.ss_factor(i, k);
        }
    }
    sum
}

// ---------------------------------------------------------------------------
// InterferenceTables
// ---------------------------------------------------------------------------

/// Precomputed spectral-overlap factors.
///
/// `sp_factor[l][k]` and the SU↔SU factors are the leakage integrals at
/// unit power and unit gain (dimensionless, in `[0, 1]`);
/// `ps_interference[l][k]` is the fully evaluated PU→SU interference
/// `J_k^{(l)}` in watts. SU↔SU factors depend only on `|i − k|`, so they
/// are stored once per distance and served through [`ss_factor`].
///
/// [`ss_factor`]: InterferenceTables::ss_factor
#[derive(Debug, Clone, PartialEq)]
pub struct InterferenceTables {
    pub sp_factor: Vec<Vec<f64>>,
    pub ps_interference: Vec<Vec<f64>>,
    ss_by_distance: Vec<f64>,
    k_count: usize,
}

impl InterferenceTables {
    /// Evaluate every overlap integral for a scenario.
    pub fn build(scenario: &Scenario, channels: &ChannelSet) -> Result<Self> {
        let geometry = TableGeometry::build(scenario)?;
        Ok(geometry.with_channels(channels))
    }

    /// Leakage factor from subcarrier `i` onto subcarrier `k`.
    pub fn ss_factor(&self, i: usize, k: usize) -> f64 {
        self.ss_by_distance[i.abs_diff(k)]
    }

    pub fn k_count(&self) -> usize {
        self.k_count
    }

    pub fn pu_count(&self) -> usize {
        self.sp_factor.len()
    }

    /// CSV dump for inspection: one row per table cell with columns
    /// `table,l_or_i,k,factor_or_watts`. Indices are 0-based.
    pub fn write_csv<W: Write>(&self, w: &mut W) -> Result<()> {
        writeln!(w, "table,l_or_i,k,factor_or_watts")?;
        for (l, row) in self.sp_factor.iter().enumerate() {
            for (k, v) in row.iter().enumerate() {
                writeln!(w, "sp,{l},{k},{v}")?;
            }
        }
        for (l, row) in self.ps_interference.iter().enumerate() {
            for (k, v) in row.iter().enumerate() {
                writeln!(w, "ps,{l},{k},{v}")?;
            }
        }
        for i in 0..self.k_count {
            for k in 0..self.k_count {
                if i != k {
                    writeln!(w, "ss,{i},{k},{}", self.ss_factor(i, k))?;
                }
            }
        }
        Ok(())
    }
}

/// The channel-independent part of [`InterferenceTables`]: every quadrature
/// result at unit gain. Sweeps that redraw channels per trial reuse one
/// geometry and rescale.
#[derive(Debug, Clone)]
pub struct TableGeometry {
    sp_factor: Vec<Vec<f64>>,
    unit_ps: Vec<Vec<f64>>,
    ss_by_distance: Vec<f64>,
    k_count: usize,
}

impl TableGeometry {
    pub fn build(scenario: &Scenario) -> Result<Self> {
        let grid = &scenario.grid;
        let k_count = grid.k_count;
        let ts = grid.symbol_time;

        let mut sp_factor = Vec::with_capacity(scenario.pus.len());
        let mut unit_ps = Vec::with_capacity(scenario.pus.len());
        for (l, pu) in scenario.pus.iter().enumerate() {
            let mut sp_row = Vec::with_capacity(k_count);
            let mut ps_row = Vec::with_capacity(k_count);
            for k in 0..k_count {
                let d = spectral_distance(grid, pu, k)?;
                sp_row.push(leakage_factor(ts, d, pu.band_width)?);
                ps_row.push(unit_pu_to_su(scenario, l, k)?);
            }
            sp_factor.push(sp_row);
            unit_ps.push(ps_row);
        }

        let mut ss_by_distance = Vec::with_capacity(k_count);
        ss_by_distance.push(0.0); // distance 0 never used
        for dist in 1..k_count {
            let d = dist as f64 * grid.subcarrier_bw;
            ss_by_distance.push(leakage_factor(ts, d, grid.subcarrier_bw)?);
        }
        if k_count == 0 {
            ss_by_distance.clear();
        }

        Ok(TableGeometry {
            sp_factor,
            unit_ps,
            ss_by_distance,
            k_count,
        })
    }

    /// Scale the unit-gain integrals by a channel draw.
    pub fn with_channels(&self, channels: &ChannelSet) -> InterferenceTables {
        let ps_interference = self
            .unit_ps
            .iter()
            .enumerate()
            .map(|(l, row)| {
                row.iter()
                    .enumerate()
                    .map(|(k, v)| channels.gain_ps[l][k] * v)
                    .collect()
            })
            .collect();
        InterferenceTables {
            sp_factor: self.sp_factor.clone(),
            ps_interference,
            ss_by_distance: self.ss_by_distance.clone(),
            k_count: self.k_count,
        }
    }
}
