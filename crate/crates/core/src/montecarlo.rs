//! Monte Carlo oracle built directly on the Gaussian port construction.
//!
//! Every trial draws its Gaussians from a ChaCha8 stream keyed by the seed
//! with the trial index as stream id, so a trial's draws do not depend on
//! which worker runs it or in what order. Outage counts are summed, which
//! makes the estimates independent of how trials are partitioned.
//!
//! Per trial and per diversity branch the draw order is: μ shared pairs
//! `(X_0j, Y_0j)`, then for each port the μ pairs `(X_kj, Y_kj)`. A branch
//! layout with M = 1 therefore reproduces the single-tube draws exactly.

use std::f64::consts::FRAC_1_SQRT_2;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

use crate::analytic::{DiversityConfig, Scheme};
use crate::channel::{AlphaMuParams, PortLayout};
use crate::error::{domain, Error, Result};

pub const MIN_TRIALS: u64 = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MCSettings {
    pub trials: u64,
    pub seed: u64,
    /// Two-sided confidence level of the reported interval.
    pub confidence: f64,
}

impl Default for MCSettings {
    fn default() -> Self {
        Self {
            trials: 100_000,
            seed: 1,
            confidence: 0.99,
        }
    }
}

impl MCSettings {
    pub fn validate(&self) -> Result<()> {
        if self.trials < MIN_TRIALS {
            return Err(domain(format!(
                "at least {MIN_TRIALS} trials are required, got {}",
                self.trials
            )));
        }
        if !(self.confidence > 0.0 && self.confidence < 1.0) {
            return Err(domain(format!(
                "confidence must lie in (0, 1), got {}",
                self.confidence
            )));
        }
        Ok(())
    }

    /// Standard-normal quantile for the two-sided interval.
    pub fn z_score(&self) -> f64 {
        let normal = Normal::new(0.0, 1.0).expect("standard normal");
        normal.inverse_cdf(0.5 + 0.5 * self.confidence)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Analytic,
    Mc,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OutageEstimate {
    pub value: f64,
    pub half_width: f64,
    pub method: Method,
    pub trials_used: u64,
}

impl OutageEstimate {
    /// Wald interval; an empty or full count falls back to the rule of three.
    pub fn from_count(outages: u64, settings: &MCSettings) -> Self {
        let n = settings.trials as f64;
        let p = outages as f64 / n;
        let half_width = if outages == 0 || outages == settings.trials {
            3.0 / n
        } else {
            settings.z_score() * (p * (1.0 - p) / n).sqrt()
        };
        Self {
            value: p,
            half_width,
            method: Method::Mc,
            trials_used: settings.trials,
        }
    }

    pub fn analytic(value: f64, rel_tol: f64) -> Self {
        Self {
            value,
            half_width: value * rel_tol,
            method: Method::Analytic,
            trials_used: 0,
        }
    }

    pub fn lower(&self) -> f64 {
        (self.value - self.half_width).max(0.0)
    }

    pub fn upper(&self) -> f64 {
        (self.value + self.half_width).min(1.0)
    }
}

/// Draws the correlated port powers of one or more independent branches.
#[derive(Debug, Clone)]
pub struct PortSampler {
    mu: usize,
    ports: usize,
    branches: usize,
    own_scale: f64,
    shared_scale: f64,
    key: ChaCha8Rng,
}

impl PortSampler {
    /// `tube` is the layout of a single branch; `branches` independent copies
    /// are drawn per trial.
    pub fn new(
        params: &AlphaMuParams,
        tube: &PortLayout,
        branches: usize,
        seed: u64,
    ) -> Result<Self> {
        let r = tube.correlation();
        if !(0.0..=1.0).contains(&r) {
            return Err(domain(format!("correlation must lie in [0, 1], got {r}")));
        }
        if branches == 0 {
            return Err(domain("at least one branch is required"));
        }
        Ok(Self {
            mu: params.mu() as usize,
            ports: tube.num_ports(),
            branches,
            // N(0, 1/2) components
            own_scale: (1.0 - r).sqrt() * FRAC_1_SQRT_2,
            shared_scale: r.sqrt() * FRAC_1_SQRT_2,
            key: ChaCha8Rng::seed_from_u64(seed),
        })
    }

    fn stream(&self, trial_index: u64) -> ChaCha8Rng {
        let mut rng = self.key.clone();
        rng.set_stream(trial_index);
        rng.set_word_pos(0);
        rng
    }

    /// Port powers of every branch for one trial, branch-major.
    pub fn powers(&self, trial_index: u64, out: &mut Vec<f64>) {
        out.clear();
        let mut rng = self.stream(trial_index);
        let mut shared = vec![(0.0, 0.0); self.mu];
        for _ in 0..self.branches {
            for s in shared.iter_mut() {
                let x: f64 = rng.sample(StandardNormal);
                let y: f64 = rng.sample(StandardNormal);
                *s = (self.shared_scale * x, self.shared_scale * y);
            }
            for _ in 0..self.ports {
                let mut power = 0.0;
                for &(x0, y0) in &shared {
                    let x: f64 = rng.sample(StandardNormal);
                    let y: f64 = rng.sample(StandardNormal);
                    let re = self.own_scale * x + x0;
                    let im = self.own_scale * y + y0;
                    power += re * re + im * im;
                }
                out.push(power);
            }
        }
    }

    /// Largest port power of each branch for one trial.
    pub fn branch_maxima(&self, trial_index: u64, scratch: &mut Vec<f64>, out: &mut Vec<f64>) {
        self.powers(trial_index, scratch);
        out.clear();
        out.extend(
            scratch
                .chunks(self.ports)
                .map(|c| c.iter().copied().fold(0.0, f64::max)),
        );
    }
}

/// Per-port powers `S_k = Σ_j |h_kj|²` of one trial (single branch).
pub fn sample_ports(
    params: &AlphaMuParams,
    layout: &PortLayout,
    trial_index: u64,
    seed: u64,
) -> Result<Vec<f64>> {
    let sampler = PortSampler::new(params, layout, 1, seed)?;
    let mut out = Vec::with_capacity(layout.num_ports());
    sampler.powers(trial_index, &mut out);
    Ok(out)
}

/// Outage counts of the SC and MGC events over the same draws.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct DiversityCounts {
    pub trials: u64,
    pub sc_outages: u64,
    pub mgc_outages: u64,
    /// Trials where MGC is in outage but SC is not (must stay zero).
    pub mgc_without_sc: u64,
}

impl std::ops::Add for DiversityCounts {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self {
            trials: self.trials + o.trials,
            sc_outages: self.sc_outages + o.sc_outages,
            mgc_outages: self.mgc_outages + o.mgc_outages,
            mgc_without_sc: self.mgc_without_sc + o.mgc_without_sc,
        }
    }
}

const CHUNK: u64 = 4096;

/// Runs every trial, classifying each by the best branch SNR (selection) and
/// the summed branch SNR (maximum-gain combining).
pub fn diversity_counts(
    params: &AlphaMuParams,
    tube: &PortLayout,
    branches: usize,
    gamma_bar: f64,
    gamma_th: f64,
    mc: &MCSettings,
) -> Result<DiversityCounts> {
    mc.validate()?;
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
    let sampler = PortSampler::new(params, tube, branches, mc.seed)?;
    let scale = gamma_bar * params.beta_bar();
    let chunks = mc.trials.div_ceil(CHUNK);
    let counts = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut scratch = Vec::new();
            let mut maxima = Vec::new();
            let mut counts = DiversityCounts::default();
            let end = ((c + 1) * CHUNK).min(mc.trials);
            for trial in c * CHUNK..end {
                sampler.branch_maxima(trial, &mut scratch, &mut maxima);
                let best = maxima.iter().copied().fold(0.0, f64::max);
                let total: f64 = maxima.iter().sum();
                let sc = scale * best <= gamma_th;
                let mgc = scale * total <= gamma_th;
                counts.trials += 1;
                counts.sc_outages += sc as u64;
                counts.mgc_outages += mgc as u64;
                counts.mgc_without_sc += (mgc && !sc) as u64;
            }
            counts
        })
        .reduce(DiversityCounts::default, |a, b| a + b);
    Ok(counts)
}

/// Empirical outage of the single-tube FAS: `γ̄ max_k S_k <= γ_th`.
pub fn mc_op_fas(
    params: &AlphaMuParams,
    layout: &PortLayout,
    gamma_bar: f64,
    gamma_th: f64,
    mc: &MCSettings,
) -> Result<OutageEstimate> {
    let counts = diversity_counts(params, layout, 1, gamma_bar, gamma_th, mc)?;
    Ok(OutageEstimate::from_count(counts.sc_outages, mc))
}

fn branch_layout(
    layout: &PortLayout,
    div: &DiversityConfig,
    expected: Scheme,
) -> Result<PortLayout> {
    if div.scheme != expected && div.scheme != Scheme::None {
        return Err(Error::Config(format!(
            "expected diversity scheme {expected:?}, got {:?}",
            div.scheme
        )));
    }
    div.validate(layout.num_ports())?;
    layout.split(div.order)
}

/// Empirical outage of M-branch selection combining: outage iff the best
/// branch is in outage.
pub fn mc_op_sc(
    params: &AlphaMuParams,
    layout: &PortLayout,
    div: &DiversityConfig,
    gamma_bar: f64,
    gamma_th: f64,
    mc: &MCSettings,
) -> Result<OutageEstimate> {
    let tube = branch_layout(layout, div, Scheme::Sc)?;
    let counts = diversity_counts(params, &tube, div.order, gamma_bar, gamma_th, mc)?;
    Ok(OutageEstimate::from_count(counts.sc_outages, mc))
}

/// Empirical outage of M-branch maximum-gain combining: outage iff the
/// unweighted sum of the branch SNRs is below the threshold.
pub fn mc_op_mgc(
    params: &AlphaMuParams,
    layout: &PortLayout,
    div: &DiversityConfig,
    gamma_bar: f64,
    gamma_th: f64,
    mc: &MCSettings,
) -> Result<OutageEstimate> {
    let tube = branch_layout(layout, div, Scheme::Mgc)?;
    let counts = diversity_counts(params, &tube, div.order, gamma_bar, gamma_th, mc)?;
    Ok(OutageEstimate::from_count(counts.mgc_outages, mc))
}
