//! Fitting the free SNR scalars against reference outage values.
//!
//! Outage depends on the SNRs only through the normalised power threshold
//! `t = γ_th / γ̄` (with β̄ = 1). [`solve_ratio`] inverts a monotone outage
//! curve for t. [`TwoPointFit`] pins an average SNR γ̄ and an
//! envelope-domain threshold x, with `γ_th = x^α`, from two reference points
//! taken at different α.

use crate::error::{domain, Error, Result};

const LOG_T_MIN: f64 = -60.0;
const LOG_T_MAX: f64 = 30.0;

/// Finds t with `op(t) = target` for an outage curve nondecreasing in t.
///
/// Bisection on ln t against ln op; works for step functions (fixed-seed
/// Monte Carlo) as well as smooth curves.
pub fn solve_ratio<F>(target: f64, op: F) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
{
    if !(target > 0.0 && target < 1.0) {
        return Err(domain(format!(
            "target outage must lie in (0, 1), got {target}"
        )));
    }
    let mut lo = 0.0f64;
    let mut hi = 0.0f64;
    while op(lo.exp())? >= target {
        lo -= 2.0;
        if lo < LOG_T_MIN {
            return Err(domain(format!(
                "no threshold reaches outage {target} from below"
            )));
        }
    }
    while op(hi.exp())? < target {
        hi += 2.0;
        if hi > LOG_T_MAX {
            return Err(domain(format!(
                "no threshold reaches outage {target} from above"
            )));
        }
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if op(mid.exp())? < target {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-13 {
            break;
        }
    }
    Ok((0.5 * (lo + hi)).exp())
}

/// γ̄ and x such that `t(α) = x^α / γ̄` reproduces two reference points.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoPointFit {
    pub gamma_bar: f64,
    pub envelope_threshold: f64,
}

impl TwoPointFit {
    /// From two `(α, t)` pairs with distinct α.
    pub fn from_ratios(first: (f64, f64), second: (f64, f64)) -> Result<Self> {
        let ((a1, t1), (a2, t2)) = (first, second);
        if a1 == a2 {
            return Err(domain("two-point fit needs distinct alpha values"));
        }
        if !(t1 > 0.0 && t2 > 0.0) {
            return Err(domain("two-point fit needs positive thresholds"));
        }
        let ln_x = (t2.ln() - t1.ln()) / (a2 - a1);
        let ln_gamma_bar = a1 * ln_x - t1.ln();
        Ok(Self {
            gamma_bar: ln_gamma_bar.exp(),
            envelope_threshold: ln_x.exp(),
        })
    }

    /// Solves both reference points on `op(alpha, t)` and fits.
    pub fn fit<F>(first: (f64, f64), second: (f64, f64), op: F) -> Result<Self>
    where
        F: Fn(f64, f64) -> Result<f64>,
    {
        let t1 = solve_ratio(first.1, |t| op(first.0, t))?;
        let t2 = solve_ratio(second.1, |t| op(second.0, t))?;
        Self::from_ratios((first.0, t1), (second.0, t2))
    }

    pub fn gamma_th(&self, alpha: f64) -> f64 {
        self.envelope_threshold.powf(alpha)
    }

    pub fn ratio(&self, alpha: f64) -> f64 {
        self.gamma_th(alpha) / self.gamma_bar
    }
}

/// Ratio between two positive values, always ≥ 1.
pub fn fold_factor(a: f64, b: f64) -> Result<f64> {
    if !(a > 0.0 && b > 0.0) {
        return Err(Error::Domain(format!(
            "fold factor needs positive values, got {a} and {b}"
        )));
    }
    Ok((a / b).max(b / a))
}
