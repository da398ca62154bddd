//! JSON experiment configuration.
//!
//! Physical quantities carry their unit in the key name and are converted to
//! linear SI values once, in [`ExperimentConfig::link`] and friends.

use anyhow::{anyhow, bail, Context, Result};
use fas_thz_core::analytic::{DiversityConfig, Scenario, Scheme, SweepAxis};
use fas_thz_core::channel::AlphaMuParams;
use fas_thz_core::montecarlo::MCSettings;
use fas_thz_core::propagation::{
    average_snr, db_to_linear, dbm_to_watts, thermal_noise, OutageQuery, ThzLink,
};
use fas_thz_core::quadrature::QuadratureSpec;
use serde::{Deserialize, Serialize};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct LinkConfig {
    pub tx_power_dbm: f64,
    pub tx_gain_dbi: f64,
    pub rx_gain_dbi: f64,
    pub freq_ghz: f64,
    pub dist_2d_m: f64,
    pub tx_height_m: f64,
    pub rx_height_m: f64,
    pub absorb_coeff_per_m: f64,
    pub bandwidth_ghz: f64,
    /// Temperature of the thermal noise floor used when no noise power is given.
    pub noise_temp_k: f64,
    pub noise_power_dbm: Option<f64>,
    /// Replaces the link-budget SNR entirely when set.
    pub average_snr_db: Option<f64>,
}

impl Default for LinkConfig {
    fn default() -> Self {
        Self {
            tx_power_dbm: 20.0,
            tx_gain_dbi: 17.0,
            rx_gain_dbi: 14.0,
            freq_ghz: 1000.0,
            dist_2d_m: 10.0,
            tx_height_m: 4.0,
            rx_height_m: 1.0,
            absorb_coeff_per_m: 0.192,
            bandwidth_ghz: 10.0,
            noise_temp_k: 290.0,
            noise_power_dbm: None,
            average_snr_db: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ChannelConfig {
    pub alpha: f64,
    pub mu: u32,
    /// α-root mean value; `null` selects the unit-power normalization β^α = μ.
    pub beta: Option<f64>,
}

impl Default for ChannelConfig {
    fn default() -> Self {
        Self {
            alpha: 2.0,
            mu: 2,
            beta: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct LayoutConfig {
    pub num_ports: usize,
    pub size_coeff: f64,
}

impl Default for LayoutConfig {
    fn default() -> Self {
        Self {
            num_ports: 20,
            size_coeff: 0.5,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DiversityConfigFile {
    pub scheme: Scheme,
    pub order: usize,
}

impl Default for DiversityConfigFile {
    fn default() -> Self {
        Self {
            scheme: Scheme::None,
            order: 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case", deny_unknown_fields)]
pub enum QueryConfig {
    SnrThreshold { snr_threshold_db: f64 },
    RateTarget { target_rate_gbps: f64 },
    EnvelopeThreshold { envelope_threshold: f64 },
}

impl Default for QueryConfig {
    fn default() -> Self {
        QueryConfig::RateTarget {
            target_rate_gbps: 7.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct McConfig {
    pub trials: u64,
    pub seed: u64,
    pub confidence: f64,
}

impl Default for McConfig {
    fn default() -> Self {
        let d = MCSettings::default();
        Self {
            trials: d.trials,
            seed: d.seed,
            confidence: d.confidence,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct QuadratureConfig {
    pub nodes: usize,
    pub rel_tol: f64,
    pub max_doublings: u32,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        let d = QuadratureSpec::default();
        Self {
            nodes: d.nodes,
            rel_tol: d.rel_tol,
            max_doublings: d.max_doublings,
        }
    }
}

/// Swept parameter and grid. Units: ports and mu are counts, rate is Gbit/s,
/// snr is the average SNR in dB, alpha and W are dimensionless.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SweepConfig {
    pub axis: SweepAxis,
    pub grid: Vec<f64>,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            axis: SweepAxis::Ports,
            grid: vec![2.0, 5.0, 10.0, 20.0, 50.0, 100.0],
        }
    }
}

/// Grid inspected by the `corr` subcommand.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CorrGridConfig {
    pub ports: Vec<usize>,
    pub size_coeffs: Vec<f64>,
}

impl Default for CorrGridConfig {
    fn default() -> Self {
        Self {
            ports: vec![2, 5, 10, 20, 50, 100],
            size_coeffs: vec![0.5, 1.0, 1.5, 2.0],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExperimentConfig {
    pub schema_version: u32,
    pub link: LinkConfig,
    pub channel: ChannelConfig,
    pub layout: LayoutConfig,
    pub diversity: DiversityConfigFile,
    pub query: QueryConfig,
    pub mc: McConfig,
    pub quadrature: QuadratureConfig,
    pub sweep: SweepConfig,
    pub corr_grid: CorrGridConfig,
    pub output_path: Option<String>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            link: LinkConfig::default(),
            channel: ChannelConfig::default(),
            layout: LayoutConfig::default(),
            diversity: DiversityConfigFile::default(),
            query: QueryConfig::default(),
            mc: McConfig::default(),
            quadrature: QuadratureConfig::default(),
            sweep: SweepConfig::default(),
            corr_grid: CorrGridConfig::default(),
            output_path: None,
        }
    }
}

/// Line (1-based) of the first occurrence of `"key"` in the source text.
fn line_of(source: &str, key: &str) -> Option<usize> {
    let needle = format!("\"{key}\"");
    source
        .lines()
        .position(|l| l.contains(&needle))
        .map(|i| i + 1)
}

impl ExperimentConfig {
    /// Parses and validates a JSON document. Validation failures name the
    /// offending field and, when found in `source`, its line.
    pub fn from_json(source: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(source).context("invalid configuration")?;
        if let Err((field, msg)) = cfg.check() {
            let leaf = field.rsplit('.').next().unwrap_or(field);
            return Err(match line_of(source, leaf) {
                Some(line) => anyhow!("invalid configuration: {field} (line {line}): {msg}"),
                None => anyhow!("invalid configuration: {field}: {msg}"),
            });
        }
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        self.check()
            .map_err(|(field, msg)| anyhow!("invalid configuration: {field}: {msg}"))
    }

    /// Compact JSON echo, re-parseable by [`ExperimentConfig::from_json`].
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("configuration serializes")
    }

    fn check(&self) -> std::result::Result<(), (&'static str, String)> {
        if self.schema_version != SCHEMA_VERSION {
            return Err((
                "schema_version",
                format!("expected {SCHEMA_VERSION}, got {}", self.schema_version),
            ));
        }
        let l = &self.link;
        for (field, v) in [
            ("link.freq_ghz", l.freq_ghz),
            ("link.bandwidth_ghz", l.bandwidth_ghz),
            ("link.noise_temp_k", l.noise_temp_k),
        ] {
            if !(v > 0.0) || !v.is_finite() {
                return Err((field, format!("must be positive, got {v}")));
            }
        }
        if let Err(e) = self.link().and_then(|link| Ok(link.validate()?)) {
            return Err(("link", e.to_string()));
        }
        if let Err(e) = self.params() {
            return Err(("channel", e.to_string()));
        }
        if self.layout.num_ports == 0 {
            return Err(("layout.num_ports", "must be at least 1".into()));
        }
        if !(self.layout.size_coeff > 0.0) || !self.layout.size_coeff.is_finite() {
            return Err((
                "layout.size_coeff",
                format!("must be positive, got {}", self.layout.size_coeff),
            ));
        }
        if let Err(e) = self.diversity().validate(self.layout.num_ports) {
            return Err(("diversity.order", e.to_string()));
        }
        if let Err(e) = self.mc_settings().validate() {
            return Err(("mc", e.to_string()));
        }
        if let Err(e) = self.quad().validate() {
            return Err(("quadrature", e.to_string()));
        }
        let grid = &self.sweep.grid;
        if grid.is_empty() {
            return Err(("sweep.grid", "must not be empty".into()));
        }
        if grid.iter().any(|v| !v.is_finite()) || grid.windows(2).any(|w| w[1] <= w[0]) {
            return Err((
                "sweep.grid",
                "must be finite and strictly increasing".into(),
            ));
        }
        match self.query {
            QueryConfig::RateTarget { target_rate_gbps } if !(target_rate_gbps > 0.0) => {
                return Err((
                    "query.target_rate_gbps",
                    format!("must be positive, got {target_rate_gbps}"),
                ));
            }
            QueryConfig::EnvelopeThreshold { envelope_threshold }
                if !(envelope_threshold >= 0.0) =>
            {
                return Err((
                    "query.envelope_threshold",
                    format!("must be non-negative, got {envelope_threshold}"),
                ));
            }
            _ => {}
        }
        Ok(())
    }

    pub fn noise_power_w(&self) -> f64 {
        match self.link.noise_power_dbm {
            Some(dbm) => dbm_to_watts(dbm),
            None => thermal_noise(self.link.noise_temp_k, self.link.bandwidth_ghz * 1e9),
        }
    }

    pub fn link(&self) -> Result<ThzLink> {
        let l = &self.link;
        Ok(ThzLink {
            tx_power_w: dbm_to_watts(l.tx_power_dbm),
            tx_gain: db_to_linear(l.tx_gain_dbi),
            rx_gain: db_to_linear(l.rx_gain_dbi),
            freq_hz: l.freq_ghz * 1e9,
            dist_2d_m: l.dist_2d_m,
            tx_height_m: l.tx_height_m,
            rx_height_m: l.rx_height_m,
            absorb_coeff: l.absorb_coeff_per_m,
            noise_power_w: self.noise_power_w(),
            bandwidth_hz: l.bandwidth_ghz * 1e9,
        })
    }

    pub fn params(&self) -> Result<AlphaMuParams> {
        let c = &self.channel;
        Ok(match c.beta {
            Some(beta) => AlphaMuParams::with_beta(c.alpha, c.mu, beta)?,
            None => AlphaMuParams::new(c.alpha, c.mu)?,
        })
    }

    pub fn diversity(&self) -> DiversityConfig {
        DiversityConfig {
            scheme: self.diversity.scheme,
            order: self.diversity.order,
        }
    }

    pub fn query(&self) -> OutageQuery {
        match self.query {
            QueryConfig::SnrThreshold { snr_threshold_db } => OutageQuery::SnrThreshold {
                snr_threshold: db_to_linear(snr_threshold_db),
            },
            QueryConfig::RateTarget { target_rate_gbps } => OutageQuery::RateTarget {
                target_rate_bps: target_rate_gbps * 1e9,
            },
            QueryConfig::EnvelopeThreshold { envelope_threshold } => {
                OutageQuery::EnvelopeThreshold { envelope_threshold }
            }
        }
    }

    pub fn mc_settings(&self) -> MCSettings {
        MCSettings {
            trials: self.mc.trials,
            seed: self.mc.seed,
            confidence: self.mc.confidence,
        }
    }

    pub fn quad(&self) -> QuadratureSpec {
        QuadratureSpec {
            nodes: self.quadrature.nodes,
            rel_tol: self.quadrature.rel_tol,
            max_doublings: self.quadrature.max_doublings,
        }
    }

    /// Average SNR: the override when given, otherwise link budget over noise.
    pub fn gamma_bar(&self) -> Result<f64> {
        match self.link.average_snr_db {
            Some(db) => Ok(db_to_linear(db)),
            None => Ok(average_snr(&self.link()?)?),
        }
    }

    pub fn scenario(&self) -> Result<Scenario> {
        Ok(Scenario {
            params: self.params()?,
            num_ports: self.layout.num_ports,
            size_coeff: self.layout.size_coeff,
            diversity: self.diversity(),
            gamma_bar: self.gamma_bar()?,
            query: self.query(),
            bandwidth_hz: self.link.bandwidth_ghz * 1e9,
            quad: self.quad(),
        })
    }
}

/// Grid value in core units (rate: Gbit/s to bit/s).
pub fn core_grid_value(axis: SweepAxis, value: f64) -> f64 {
    match axis {
        SweepAxis::Rate => value * 1e9,
        _ => value,
    }
}

pub fn require_rate_axis(cfg: &ExperimentConfig) -> Result<()> {
    if cfg.sweep.axis != SweepAxis::Rate {
        bail!("rate-sweep needs sweep.axis = \"rate\" with a grid in Gbit/s");
    }
    Ok(())
}
