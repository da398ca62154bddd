//! Outage analysis of fluid-antenna-system (FAS) receivers over
//! equally-correlated α-μ fading with a THz link budget.
//!
//! The crate is organised bottom-up:
//!
//! * [`specfun`] – Bessel J0, incomplete gamma, Marcum Q.
//! * [`channel`] – port geometry, correlation and the α-μ distribution kernels.
//! * [`propagation`] – received power with molecular absorption, SNR and thresholds.
//! * [`quadrature`] – generalized Gauss-Laguerre rules.
//! * [`analytic`] – outage of the single-tube and selection-combining receivers.
//! * [`montecarlo`] – the sampling oracle, including maximum-gain combining.
//! * [`calibration`] – threshold fitting against reference outage values.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analytic;
pub mod calibration;
pub mod channel;
pub mod error;
pub mod montecarlo;
pub mod propagation;
pub mod quadrature;
pub mod specfun;

pub use analytic::{
    op_curve, op_fas, op_sc_fas, CurvePoint, DiversityConfig, Scenario, Scheme, SweepAxis,
};
pub use channel::{AlphaMuParams, PortLayout};
pub use error::{Error, Result};
pub use montecarlo::{mc_op_fas, mc_op_mgc, mc_op_sc, MCSettings, Method, OutageEstimate};
pub use propagation::{average_snr, outage_threshold, received_power, OutageQuery, ThzLink};
pub use quadrature::QuadratureSpec;
