//! Special-function kernels: Bessel J0, log-gamma, regularized incomplete
//! gamma, the generalized Marcum Q function of integer order and the
//! non-central chi-square CDF built on it.
//!
//! Everything here is a pure function of its arguments.

mod bessel;
mod gamma;
mod marcum;

pub use bessel::bessel_j0;
pub use gamma::{ln_gamma, reg_gamma_lower, reg_gamma_pq, reg_gamma_upper};
pub use marcum::{marcum_q, marcum_q_pair, marcum_q_with, ncx2_cdf};

use crate::error::{domain, Result};

/// Tolerance and iteration budget for the series evaluations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Accuracy {
    rel_tol: f64,
    max_terms: usize,
}

impl Accuracy {
    pub fn new(rel_tol: f64, max_terms: usize) -> Result<Self> {
        if !(rel_tol > 0.0 && rel_tol <= 1e-3) {
            return Err(domain(format!(
                "rel_tol must lie in (0, 1e-3], got {rel_tol}"
            )));
        }
        if max_terms < 100 {
            return Err(domain(format!(
                "max_terms must be at least 100, got {max_terms}"
            )));
        }
        Ok(Self { rel_tol, max_terms })
    }

    pub fn rel_tol(&self) -> f64 {
        self.rel_tol
    }

    pub fn max_terms(&self) -> usize {
        self.max_terms
    }
}

impl Default for Accuracy {
    fn default() -> Self {
        Self {
            rel_tol: 1e-12,
            max_terms: 10_000,
        }
    }
}
