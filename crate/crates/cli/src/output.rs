//! CSV rendering. Floats use 17 significant digits so reruns compare
//! byte-for-byte; lines end in LF.

use std::fmt::Write;

use crate::config::ExperimentConfig;

pub fn float(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn opt_float(x: Option<f64>) -> String {
    x.map(float).unwrap_or_default()
}

/// Quotes a field when it contains a separator, quote or line break.
pub fn field(s: &str) -> String {
    if s.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_owned()
    }
}

/// `#`-prefixed run header: tool version, subcommand and the effective
/// configuration as one JSON line.
pub fn header(subcommand: &str, cfg: &ExperimentConfig) -> String {
    let mut out = String::new();
    writeln!(out, "# fas-thz {}", env!("CARGO_PKG_VERSION")).unwrap();
    writeln!(out, "# subcommand: {subcommand}").unwrap();
    writeln!(out, "# config: {}", cfg.to_json()).unwrap();
    out
}

pub struct Table {
    text: String,
}

impl Table {
    pub fn new(header: String, columns: &[&str]) -> Self {
        let mut text = header;
        text.push_str(&columns.join(","));
        text.push('\n');
        Self { text }
    }

    pub fn row<I, S>(&mut self, cells: I)
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let cells: Vec<String> = cells.into_iter().map(|c| field(c.as_ref())).collect();
        self.text.push_str(&cells.join(","));
        self.text.push('\n');
    }

    pub fn finish(self) -> String {
        self.text
    }
}

/// Extracts the configuration echoed in a run header.
pub fn echoed_config(csv: &str) -> Option<&str> {
    csv.lines()
        .take_while(|l| l.starts_with('#'))
        .find_map(|l| l.strip_prefix("# config: "))
}
