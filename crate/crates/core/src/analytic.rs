//! Quadrature outage probabilities for the single-tube FAS receiver and the
//! M-branch selection-combining receiver.
//!
//! Conditioned on the shared power u the L ports are independent, so
//!
//! ```text
//! OP(t) = ∫₀^∞ [1 - Q_μ(sqrt(2ru/(1-r)), sqrt(2t/(1-r)))]^L  u^{μ-1} e^{-u} / Γ(μ) du
//! ```
//!
//! with `t = γ_th / (β̄ γ̄)`. The SNR of port k is `γ̄ β̄ S_k` where
//! `S_k = H_k^α` is the port power, so the outage probability depends on the
//! SNRs only through their ratio.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channel::{conditional_port_cdf_pair, AlphaMuParams, MixingVariable, PortLayout};
use crate::error::{domain, Error, Result};
use crate::propagation::{db_to_linear, threshold_for_bandwidth, OutageQuery};
use crate::quadrature::{integrate_gamma, QuadratureSpec};
use crate::specfun::{reg_gamma_lower, Accuracy};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    None,
    Sc,
    Mgc,
}

/// Receiver diversity: the FAS tube is cut into `order` equal sub-tubes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DiversityConfig {
    pub scheme: Scheme,
    pub order: usize,
}

impl DiversityConfig {
    pub fn none() -> Self {
        Self {
            scheme: Scheme::None,
            order: 1,
        }
    }

    pub fn sc(order: usize) -> Self {
        Self {
            scheme: Scheme::Sc,
            order,
        }
    }

    pub fn mgc(order: usize) -> Self {
        Self {
            scheme: Scheme::Mgc,
            order,
        }
    }

    /// `none` needs M = 1; `sc`/`mgc` need M ≥ 2 dividing the port count.
    pub fn validate(&self, num_ports: usize) -> Result<()> {
        match self.scheme {
            Scheme::None if self.order != 1 => Err(Error::Config(format!(
                "scheme 'none' requires order 1, got {}",
                self.order
            ))),
            Scheme::None => Ok(()),
            Scheme::Sc | Scheme::Mgc => {
                if self.order < 2 {
                    return Err(Error::Config(format!(
                        "diversity order must be at least 2, got {}",
                        self.order
                    )));
                }
                if !num_ports.is_multiple_of(self.order) {
                    return Err(Error::Config(format!(
                        "diversity order {} must divide the port count {num_ports}",
                        self.order
                    )));
                }
                Ok(())
            }
        }
    }
}

fn check_snr(gamma_bar: f64, gamma_th: f64) -> Result<()> {
    if !(gamma_bar > 0.0) || !gamma_bar.is_finite() {
        return Err(domain(format!(
            "average SNR must be positive, got {gamma_bar}"
        )));
    }
    if gamma_th.is_nan() || gamma_th < 0.0 {
        return Err(domain(format!(
            "SNR threshold must be non-negative, got {gamma_th}"
        )));
    }
    Ok(())
}

/// `p^n` evaluated as `exp(n ln p)`, with `ln p = ln1p(-q)` when p is near one.
fn pow_probability(p: f64, q: f64, n: usize) -> f64 {
    if p <= 0.0 {
        return 0.0;
    }
    let ln_p = if q < 0.5 { (-q).ln_1p() } else { p.ln() };
    (n as f64 * ln_p).exp()
}

/// Outage probability of a single L-port FAS receiver.
pub fn op_fas(
    params: &AlphaMuParams,
    layout: &PortLayout,
    gamma_bar: f64,
    gamma_th: f64,
    quad: &QuadratureSpec,
) -> Result<f64> {
    check_snr(gamma_bar, gamma_th)?;
    quad.validate()?;
    if gamma_th == 0.0 {
        return Ok(0.0);
    }
    let t = gamma_th / (params.beta_bar() * gamma_bar);
    let ports = layout.num_ports();
    if layout.correlation() >= 1.0 {
        if ports == 1 {
            return reg_gamma_lower(params.mu() as f64, t);
        }
        return Err(Error::DegenerateCorrelation { ports });
    }
    let acc = Accuracy::default();
    let value = integrate_gamma(params.mu() as f64, quad, |u| {
        let (p, q) = conditional_port_cdf_pair(params, layout, MixingVariable(u), t, &acc)?;
        Ok(pow_probability(p, q, ports))
    })?;
    Ok(value.clamp(0.0, 1.0))
}

/// Outage probability of the M-branch selection-combining receiver: each
/// sub-tube has L/M ports over W/M wavelengths and the tubes are independent,
/// so the result is the single-tube outage raised to the M-th power.
pub fn op_sc_fas(
    params: &AlphaMuParams,
    layout: &PortLayout,
    div: &DiversityConfig,
    gamma_bar: f64,
    gamma_th: f64,
    quad: &QuadratureSpec,
) -> Result<f64> {
    match div.scheme {
        Scheme::None => {
            div.validate(layout.num_ports())?;
            op_fas(params, layout, gamma_bar, gamma_th, quad)
        }
        Scheme::Sc => {
            div.validate(layout.num_ports())?;
            let tube = layout.split(div.order)?;
            let per_tube = op_fas(params, &tube, gamma_bar, gamma_th, quad)?;
            Ok(pow_probability(per_tube, 1.0 - per_tube, div.order))
        }
        Scheme::Mgc => Err(Error::Config(
            "maximum-gain combining has no analytic outage; use the Monte Carlo estimator".into(),
        )),
    }
}

/// Everything needed to evaluate one outage point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Scenario {
    pub params: AlphaMuParams,
    pub num_ports: usize,
    pub size_coeff: f64,
    pub diversity: DiversityConfig,
    pub gamma_bar: f64,
    pub query: OutageQuery,
    pub bandwidth_hz: f64,
    pub quad: QuadratureSpec,
}

impl Scenario {
    pub fn layout(&self) -> Result<PortLayout> {
        PortLayout::new(self.num_ports, self.size_coeff)
    }

    /// Layout of one diversity branch (the whole FAS when there is no diversity).
    pub fn tube_layout(&self) -> Result<PortLayout> {
        self.diversity.validate(self.num_ports)?;
        self.layout()?.split(self.diversity.order)
    }

    pub fn gamma_th(&self) -> Result<f64> {
        threshold_for_bandwidth(&self.query, self.bandwidth_hz, self.params.alpha())
    }

    /// Analytic outage for `none` and `sc`; `mgc` is an error.
    pub fn analytic_op(&self) -> Result<f64> {
        let layout = self.layout()?;
        op_sc_fas(
            &self.params,
            &layout,
            &self.diversity,
            self.gamma_bar,
            self.gamma_th()?,
            &self.quad,
        )
    }
}

/// Parameter swept by [`op_curve`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepAxis {
    /// Total port count L.
    Ports,
    /// Target rate in bit/s (switches the query to rate mode).
    Rate,
    /// Average SNR in dB.
    Snr,
    Alpha,
    Mu,
    /// Size coefficient W.
    #[serde(rename = "W", alias = "w", alias = "size_coeff")]
    SizeCoeff,
}

fn as_count(value: f64, what: &str) -> Result<usize> {
    if value >= 1.0 && value.fract() == 0.0 && value.is_finite() {
        Ok(value as usize)
    } else {
        Err(domain(format!(
            "{what} must be a positive integer, got {value}"
        )))
    }
}

impl SweepAxis {
    /// `fixed` with the swept parameter replaced by `value`.
    pub fn apply(&self, fixed: &Scenario, value: f64) -> Result<Scenario> {
        let mut s = *fixed;
        match self {
            SweepAxis::Ports => s.num_ports = as_count(value, "port count")?,
            SweepAxis::Rate => {
                s.query = OutageQuery::RateTarget {
                    target_rate_bps: value,
                }
            }
            SweepAxis::Snr => s.gamma_bar = db_to_linear(value),
            SweepAxis::Alpha => s.params = fixed.params.with_alpha(value)?,
            SweepAxis::Mu => {
                let mu = as_count(value, "mu")?;
                let mu = u32::try_from(mu).map_err(|_| domain("mu out of range"))?;
                s.params = fixed.params.with_mu(mu)?;
            }
            SweepAxis::SizeCoeff => s.size_coeff = value,
        }
        Ok(s)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CurvePoint {
    pub value: f64,
    pub op: f64,
    /// Correlation of one diversity branch.
    pub r_used: f64,
}

fn check_grid(grid: &[f64]) -> Result<()> {
    if grid.is_empty() {
        return Err(domain("sweep grid is empty"));
    }
    if grid.iter().any(|v| !v.is_finite()) || grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(domain("sweep grid must be finite and strictly increasing"));
    }
    Ok(())
}

/// Per-point results of an analytic sweep, in grid order. Grid points are
/// evaluated in parallel; each error is tagged with its grid position.
pub fn op_curve_points(
    axis: SweepAxis,
    grid: &[f64],
    fixed: &Scenario,
) -> Result<Vec<Result<CurvePoint>>> {
    check_grid(grid)?;
    Ok(grid
        .par_iter()
        .enumerate()
        .map(|(index, &value)| {
            let point = || -> Result<CurvePoint> {
                let s = axis.apply(fixed, value)?;
                let r_used = s.tube_layout()?.correlation();
                Ok(CurvePoint {
                    value,
                    op: s.analytic_op()?,
                    r_used,
                })
            };
            point().map_err(|e| Error::AtGridPoint {
                index,
                value,
                source: Box::new(e),
            })
        })
        .collect())
}

/// Analytic outage along `axis`; fails on the first bad grid point.
pub fn op_curve(axis: SweepAxis, grid: &[f64], fixed: &Scenario) -> Result<Vec<CurvePoint>> {
    op_curve_points(axis, grid, fixed)?.into_iter().collect()
}
