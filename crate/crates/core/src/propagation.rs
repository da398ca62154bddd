//! THz link budget: received power under spreading and molecular absorption,
//! average SNR, and the outage threshold.
//!
//! All quantities are linear SI units; dB conversions live at the boundary.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};

pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;
pub const BOLTZMANN: f64 = 1.380_649e-23;

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

pub fn linear_to_db(x: f64) -> f64 {
    10.0 * x.log10()
}

pub fn dbm_to_watts(dbm: f64) -> f64 {
    db_to_linear(dbm - 30.0)
}

pub fn watts_to_dbm(w: f64) -> f64 {
    linear_to_db(w) + 30.0
}

/// Thermal noise power `k_B T B` in watts.
pub fn thermal_noise(temperature_k: f64, bandwidth_hz: f64) -> f64 {
    BOLTZMANN * temperature_k * bandwidth_hz
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThzLink {
    pub tx_power_w: f64,
    pub tx_gain: f64,
    pub rx_gain: f64,
    pub freq_hz: f64,
    pub dist_2d_m: f64,
    pub tx_height_m: f64,
    pub rx_height_m: f64,
    /// Molecular absorption coefficient K(f) in 1/m.
    pub absorb_coeff: f64,
    pub noise_power_w: f64,
    pub bandwidth_hz: f64,
}

impl ThzLink {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("tx_power_w", self.tx_power_w),
            ("tx_gain", self.tx_gain),
            ("rx_gain", self.rx_gain),
            ("freq_hz", self.freq_hz),
            ("noise_power_w", self.noise_power_w),
            ("bandwidth_hz", self.bandwidth_hz),
        ];
        for (name, v) in positive {
            if !(v > 0.0) || !v.is_finite() {
                return Err(domain(format!("{name} must be positive, got {v}")));
            }
        }
        let nonneg = [
            ("dist_2d_m", self.dist_2d_m),
            ("tx_height_m", self.tx_height_m),
            ("rx_height_m", self.rx_height_m),
            ("absorb_coeff", self.absorb_coeff),
        ];
        for (name, v) in nonneg {
            if !(v >= 0.0) || !v.is_finite() {
                return Err(domain(format!("{name} must be non-negative, got {v}")));
            }
        }
        if !(self.distance_3d() > 0.0) {
            return Err(domain("transmitter and receiver coincide"));
        }
        Ok(())
    }

    pub fn distance_3d(&self) -> f64 {
        self.dist_2d_m.hypot(self.tx_height_m - self.rx_height_m)
    }
}

/// `P = P_t G_1 G_2 c² / (16 π² f² d₃² exp(K d₃))` with `d₃` the 3D distance.
pub fn received_power(link: &ThzLink) -> Result<f64> {
    link.validate()?;
    let d3 = link.distance_3d();
    let spreading = 16.0 * PI * PI * link.freq_hz * link.freq_hz * d3 * d3;
    Ok(
        link.tx_power_w * link.tx_gain * link.rx_gain * SPEED_OF_LIGHT * SPEED_OF_LIGHT
            / (spreading * (link.absorb_coeff * d3).exp()),
    )
}

/// `γ̄ = P / N₀`.
pub fn average_snr(link: &ThzLink) -> Result<f64> {
    Ok(received_power(link)? / link.noise_power_w)
}

/// How the outage event is specified.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum OutageQuery {
    /// Linear SNR threshold γ_th.
    SnrThreshold { snr_threshold: f64 },
    /// Target rate R in bit/s; the threshold is `2^{R/B} - 1`.
    RateTarget { target_rate_bps: f64 },
    /// Envelope-domain threshold x with SNR threshold `x^α`.
    EnvelopeThreshold { envelope_threshold: f64 },
}

/// Linear SNR threshold for `query`.
pub fn outage_threshold(query: &OutageQuery, link: &ThzLink, alpha: f64) -> Result<f64> {
    threshold_for_bandwidth(query, link.bandwidth_hz, alpha)
}

pub fn threshold_for_bandwidth(query: &OutageQuery, bandwidth_hz: f64, alpha: f64) -> Result<f64> {
    match *query {
        OutageQuery::SnrThreshold { snr_threshold } => {
            if !(snr_threshold >= 0.0) || !snr_threshold.is_finite() {
                return Err(domain(format!(
                    "SNR threshold must be finite and non-negative, got {snr_threshold}"
                )));
            }
            Ok(snr_threshold)
        }
        OutageQuery::RateTarget { target_rate_bps } => {
            if !(target_rate_bps > 0.0) || !target_rate_bps.is_finite() {
                return Err(domain(format!(
                    "target rate must be positive, got {target_rate_bps}"
                )));
            }
            if !(bandwidth_hz > 0.0) {
                return Err(domain(format!(
                    "bandwidth must be positive, got {bandwidth_hz}"
                )));
            }
            Ok((target_rate_bps / bandwidth_hz).exp2() - 1.0)
        }
        OutageQuery::EnvelopeThreshold { envelope_threshold } => {
            if !(envelope_threshold >= 0.0) || !envelope_threshold.is_finite() {
                return Err(domain(format!(
                    "envelope threshold must be finite and non-negative, got {envelope_threshold}"
                )));
            }
            Ok(envelope_threshold.powf(alpha))
        }
    }
}
