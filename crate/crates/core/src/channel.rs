//! FAS port geometry and the equally-correlated α-μ channel law.
//!
//! Each port carries μ complex Gaussian components
//! `h_kj = sqrt(1-r)(X_kj + iY_kj) + sqrt(r)(X_0j + iY_0j)` with all real parts
//! N(0, 1/2). The port power `S_k = Σ_j |h_kj|²` equals `H_k^α`. Conditioned on
//! the shared power `u = Σ_j (X_0j² + Y_0j²)`, the ports are independent and
//! `2 S_k / (1-r)` is non-central chi-square with 2μ degrees of freedom and
//! non-centrality `2 r u / (1-r)`. Integrating `u ~ Gamma(μ, 1)` out recovers
//! the central `Gamma(μ, 1)` marginal.
//!
//! Note on the marginal CDF: the α-μ envelope CDF is the *lower* regularized
//! incomplete gamma `P(μ, μ x^α / β^α)`. Writing it as the upper ratio
//! `Γ(μ, ·)/Γ(μ)` gives the survival function instead.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::specfun::{bessel_j0, marcum_q_pair, reg_gamma_lower, Accuracy};

/// Result of evaluating the port-correlation sum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Correlation {
    /// Value used downstream, in [0, 1].
    pub value: f64,
    /// The sum as evaluated, before clamping.
    pub raw: f64,
    /// True when a negative sum was clamped to zero.
    pub clamped: bool,
}

/// Equal pairwise correlation of an L-port FAS of length W wavelengths:
///
/// ```text
/// r = 2 / (L (L-1)) Σ_{k=1}^{L-1} (L-k) J0(2π k W / (L-1))
/// ```
///
/// Negative sums are clamped to 0 (the construction takes sqrt(r)).
pub fn port_correlation(num_ports: usize, size_coeff: f64) -> Result<Correlation> {
    if num_ports < 2 {
        return Err(domain(format!(
            "port correlation needs at least 2 ports, got {num_ports}"
        )));
    }
    if !(size_coeff > 0.0) || !size_coeff.is_finite() {
        return Err(domain(format!(
            "size coefficient must be positive, got {size_coeff}"
        )));
    }
    let l = num_ports as f64;
    let spacing = 2.0 * PI * size_coeff / (l - 1.0);
    let mut sum = 0.0;
    for k in 1..num_ports {
        sum += (l - k as f64) * bessel_j0(spacing * k as f64)?;
    }
    let raw = 2.0 / (l * (l - 1.0)) * sum;
    let clamped = raw < 0.0;
    Ok(Correlation {
        value: raw.clamp(0.0, 1.0),
        raw,
        clamped,
    })
}

/// FAS geometry: port count, size coefficient and the derived correlation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PortLayout {
    num_ports: usize,
    size_coeff: f64,
    corr: Correlation,
}

impl PortLayout {
    /// Builds the layout and evaluates its correlation. A single port gets
    /// r = 1 by convention.
    pub fn new(num_ports: usize, size_coeff: f64) -> Result<Self> {
        if num_ports == 0 {
            return Err(domain("a FAS needs at least one port"));
        }
        if !(size_coeff > 0.0) || !size_coeff.is_finite() {
            return Err(domain(format!(
                "size coefficient must be positive, got {size_coeff}"
            )));
        }
        let corr = if num_ports == 1 {
            Correlation {
                value: 1.0,
                raw: 1.0,
                clamped: false,
            }
        } else {
            port_correlation(num_ports, size_coeff)?
        };
        Ok(Self {
            num_ports,
            size_coeff,
            corr,
        })
    }

    /// Layout with an explicitly chosen correlation, bypassing the geometry.
    pub fn with_correlation(num_ports: usize, size_coeff: f64, r: f64) -> Result<Self> {
        if num_ports == 0 {
            return Err(domain("a FAS needs at least one port"));
        }
        if !(0.0..=1.0).contains(&r) {
            return Err(domain(format!("correlation must lie in [0, 1], got {r}")));
        }
        Ok(Self {
            num_ports,
            size_coeff,
            corr: Correlation {
                value: r,
                raw: r,
                clamped: false,
            },
        })
    }

    pub fn num_ports(&self) -> usize {
        self.num_ports
    }

    pub fn size_coeff(&self) -> f64 {
        self.size_coeff
    }

    pub fn correlation(&self) -> f64 {
        self.corr.value
    }

    pub fn correlation_info(&self) -> Correlation {
        self.corr
    }

    /// Layout of one of `order` equal sub-tubes: `L/order` ports over `W/order`.
    pub fn split(&self, order: usize) -> Result<Self> {
        if order == 0 || !self.num_ports.is_multiple_of(order) {
            return Err(Error::Config(format!(
                "diversity order {order} must divide the port count {}",
                self.num_ports
            )));
        }
        if order == 1 {
            return Ok(*self);
        }
        Self::new(self.num_ports / order, self.size_coeff / order as f64)
    }
}

/// α-μ fading parameters with the derived scale `beta_bar = beta^alpha / mu`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AlphaMuParams {
    alpha: f64,
    mu: u32,
    beta: f64,
    beta_bar: f64,
}

impl AlphaMuParams {
    /// Unit-power normalization `beta^alpha = mu`, i.e. `beta_bar = 1`.
    pub fn new(alpha: f64, mu: u32) -> Result<Self> {
        Self::validate(alpha, mu)?;
        Ok(Self {
            alpha,
            mu,
            beta: (mu as f64).powf(1.0 / alpha),
            beta_bar: 1.0,
        })
    }

    pub fn with_beta(alpha: f64, mu: u32, beta: f64) -> Result<Self> {
        Self::validate(alpha, mu)?;
        if !(beta > 0.0) || !beta.is_finite() {
            return Err(domain(format!("beta must be positive, got {beta}")));
        }
        Ok(Self {
            alpha,
            mu,
            beta,
            beta_bar: beta.powf(alpha) / mu as f64,
        })
    }

    fn validate(alpha: f64, mu: u32) -> Result<()> {
        if !(alpha > 0.0) || !alpha.is_finite() {
            return Err(domain(format!("alpha must be positive, got {alpha}")));
        }
        if mu == 0 {
            return Err(domain("mu must be a positive integer"));
        }
        Ok(())
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn mu(&self) -> u32 {
        self.mu
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn beta_bar(&self) -> f64 {
        self.beta_bar
    }

    pub fn with_alpha(&self, alpha: f64) -> Result<Self> {
        if self.beta_bar == 1.0 {
            Self::new(alpha, self.mu)
        } else {
            Self::with_beta(alpha, self.mu, self.beta)
        }
    }

    pub fn with_mu(&self, mu: u32) -> Result<Self> {
        if self.beta_bar == 1.0 {
            Self::new(self.alpha, mu)
        } else {
            Self::with_beta(self.alpha, mu, self.beta)
        }
    }
}

/// Shared power of the common Gaussian components, `u ~ Gamma(μ, 1)`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct MixingVariable(pub f64);

/// CDF of the α-μ envelope, `P(μ, μ x^α / β^α)`.
pub fn marginal_cdf(params: &AlphaMuParams, x: f64) -> Result<f64> {
    if x.is_nan() || x < 0.0 {
        return Err(domain(format!("envelope must be non-negative, got {x}")));
    }
    let arg = x.powf(params.alpha) * params.mu as f64 / params.beta.powf(params.alpha);
    reg_gamma_lower(params.mu as f64, arg)
}

/// `Pr(S_k <= t | u)` for one port, returned as `(cdf, 1 - cdf)`.
///
/// `t` is a threshold on the port power `S_k = H_k^α` in units of `beta_bar`;
/// SNR scaling stays with the caller.
pub fn conditional_port_cdf_pair(
    params: &AlphaMuParams,
    layout: &PortLayout,
    u: MixingVariable,
    t: f64,
    acc: &Accuracy,
) -> Result<(f64, f64)> {
    let r = layout.correlation();
    if r >= 1.0 {
        return Err(Error::DegenerateCorrelation {
            ports: layout.num_ports(),
        });
    }
    if u.0.is_nan() || u.0 < 0.0 || t.is_nan() || t < 0.0 {
        return Err(domain(format!(
            "conditional CDF needs u >= 0 and t >= 0, got u = {}, t = {t}",
            u.0
        )));
    }
    let a = (2.0 * r * u.0 / (1.0 - r)).sqrt();
    let b = (2.0 * t / (1.0 - r)).sqrt();
    let (q, p) = marcum_q_pair(params.mu, a, b, acc)?;
    Ok((p, q))
}

/// `1 - Q_μ(sqrt(2ru/(1-r)), sqrt(2t/(1-r)))`.
pub fn conditional_port_cdf(
    params: &AlphaMuParams,
    layout: &PortLayout,
    u: MixingVariable,
    t: f64,
) -> Result<f64> {
    conditional_port_cdf_pair(params, layout, u, t, &Accuracy::default()).map(|(p, _)| p)
}
