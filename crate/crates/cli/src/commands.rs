//! Subcommands. Each returns the complete CSV document.

use anyhow::Result;
use fas_thz_core::analytic::{Scenario, Scheme, SweepAxis};
use fas_thz_core::channel::port_correlation;
use fas_thz_core::montecarlo::{mc_op_mgc, mc_op_sc, MCSettings, OutageEstimate};
use fas_thz_core::propagation::{linear_to_db, received_power, thermal_noise, watts_to_dbm};
use rayon::prelude::*;

use crate::config::{core_grid_value, require_rate_axis, ExperimentConfig};
use crate::output::{float, header, opt_float, Table};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    OpCurve,
    RateSweep,
    McValidate,
    Corr,
    LinkBudget,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::OpCurve => "op-curve",
            Command::RateSweep => "rate-sweep",
            Command::McValidate => "mc-validate",
            Command::Corr => "corr",
            Command::LinkBudget => "link-budget",
        }
    }
}

pub fn run(command: Command, cfg: &ExperimentConfig) -> Result<String> {
    cfg.validate()?;
    match command {
        Command::OpCurve => sweep(cfg, false),
        Command::RateSweep => {
            require_rate_axis(cfg)?;
            sweep(cfg, false)
        }
        Command::McValidate => sweep(cfg, true),
        Command::Corr => corr(cfg),
        Command::LinkBudget => link_budget(cfg),
    }
}

const SWEEP_COLUMNS: [&str; 9] = [
    "sweep_value",
    "op_analytic",
    "op_mc",
    "mc_half_width",
    "method",
    "r_used",
    "gamma_bar_db",
    "gamma_th_db",
    "error",
];

#[derive(Debug, Default)]
struct Row {
    analytic: Option<f64>,
    mc: Option<OutageEstimate>,
    r_used: Option<f64>,
    gamma_bar: Option<f64>,
    gamma_th: Option<f64>,
    error: String,
}

impl Row {
    fn method(&self) -> &'static str {
        match (self.analytic.is_some(), self.mc.is_some()) {
            (true, true) => "analytic+mc",
            (true, false) => "analytic",
            (false, true) => "mc",
            (false, false) => "",
        }
    }

    fn agree(&self) -> &'static str {
        match (self.analytic, self.mc) {
            (Some(a), Some(m)) if (a - m.value).abs() <= 3.0 * m.half_width => "true",
            (Some(_), Some(_)) => "false",
            _ => "",
        }
    }
}

fn simulate(s: &Scenario, gamma_th: f64, mc: &MCSettings) -> Result<OutageEstimate> {
    let layout = s.layout()?;
    let est = match s.diversity.scheme {
        Scheme::Mgc => mc_op_mgc(&s.params, &layout, &s.diversity, s.gamma_bar, gamma_th, mc)?,
        Scheme::None | Scheme::Sc => {
            mc_op_sc(&s.params, &layout, &s.diversity, s.gamma_bar, gamma_th, mc)?
        }
    };
    Ok(est)
}

fn evaluate(base: &Scenario, axis: SweepAxis, value: f64, mc: &MCSettings, validate: bool) -> Row {
    let mut row = Row::default();
    let s = match axis.apply(base, value) {
        Ok(s) => s,
        Err(e) => {
            row.error = e.to_string();
            return row;
        }
    };
    row.gamma_bar = Some(s.gamma_bar);
    let gamma_th = match s.gamma_th() {
        Ok(g) => g,
        Err(e) => {
            row.error = e.to_string();
            return row;
        }
    };
    row.gamma_th = Some(gamma_th);
    match s.tube_layout() {
        Ok(tube) => row.r_used = Some(tube.correlation()),
        Err(e) => {
            row.error = e.to_string();
            return row;
        }
    }
    let mut errors = Vec::new();
    let want_mc = validate || s.diversity.scheme == Scheme::Mgc;
    if s.diversity.scheme != Scheme::Mgc {
        match s.analytic_op() {
            Ok(op) => row.analytic = Some(op),
            Err(e) => errors.push(e.to_string()),
        }
    }
    if want_mc {
        match simulate(&s, gamma_th, mc) {
            Ok(est) => row.mc = Some(est),
            Err(e) => errors.push(e.to_string()),
        }
    }
    row.error = errors.join("; ");
    row
}

fn db(x: Option<f64>) -> String {
    opt_float(x.map(linear_to_db))
}

fn sweep(cfg: &ExperimentConfig, validate: bool) -> Result<String> {
    let base = cfg.scenario()?;
    let mc = cfg.mc_settings();
    let axis = cfg.sweep.axis;
    // Grid points run in parallel; Monte Carlo inside a point is itself
    // chunked deterministically, so the output does not depend on scheduling.
    let rows: Vec<Row> = cfg
        .sweep
        .grid
        .par_iter()
        .map(|&v| evaluate(&base, axis, core_grid_value(axis, v), &mc, validate))
        .collect();

    let mut columns = SWEEP_COLUMNS.to_vec();
    if validate {
        columns.push("agree");
    }
    let name = if validate {
        "mc-validate"
    } else if axis == SweepAxis::Rate {
        "rate-sweep"
    } else {
        "op-curve"
    };
    let mut table = Table::new(header(name, cfg), &columns);
    for (value, row) in cfg.sweep.grid.iter().zip(&rows) {
        let mut cells = vec![
            float(*value),
            opt_float(row.analytic),
            opt_float(row.mc.map(|m| m.value)),
            opt_float(row.mc.map(|m| m.half_width)),
            row.method().to_owned(),
            opt_float(row.r_used),
            db(row.gamma_bar),
            db(row.gamma_th),
            row.error.clone(),
        ];
        if validate {
            cells.push(row.agree().to_owned());
        }
        table.row(cells);
    }
    Ok(table.finish())
}

fn corr(cfg: &ExperimentConfig) -> Result<String> {
    let mut table = Table::new(
        header("corr", cfg),
        &["num_ports", "size_coeff", "r", "r_raw", "clamped", "error"],
    );
    for &w in &cfg.corr_grid.size_coeffs {
        for &l in &cfg.corr_grid.ports {
            match port_correlation(l, w) {
                Ok(c) => table.row([
                    l.to_string(),
                    float(w),
                    float(c.value),
                    float(c.raw),
                    c.clamped.to_string(),
                    String::new(),
                ]),
                Err(e) => table.row([
                    l.to_string(),
                    float(w),
                    String::new(),
                    String::new(),
                    String::new(),
                    e.to_string(),
                ]),
            }
        }
    }
    Ok(table.finish())
}

fn link_budget(cfg: &ExperimentConfig) -> Result<String> {
    let link = cfg.link()?;
    let power = received_power(&link)?;
    let noise = link.noise_power_w;
    let gamma_bar = cfg.gamma_bar()?;
    let gamma_th = cfg.scenario()?.gamma_th()?;
    let mut table = Table::new(header("link-budget", cfg), &["quantity", "value", "unit"]);
    let rows: [(&str, f64, &str); 8] = [
        ("distance_3d", link.distance_3d(), "m"),
        ("received_power", power, "W"),
        ("received_power_dbm", watts_to_dbm(power), "dBm"),
        ("noise_power", noise, "W"),
        (
            "thermal_noise",
            thermal_noise(cfg.link.noise_temp_k, link.bandwidth_hz),
            "W",
        ),
        ("average_snr", gamma_bar, "1"),
        ("average_snr_db", linear_to_db(gamma_bar), "dB"),
        ("snr_threshold_db", linear_to_db(gamma_th), "dB"),
    ];
    for (q, v, unit) in rows {
        table.row([q.to_owned(), float(v), unit.to_owned()]);
    }
    table.row(["snr_threshold".to_owned(), float(gamma_th), "1".to_owned()]);
    Ok(table.finish())
}
