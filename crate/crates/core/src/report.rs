//! Versioned JSON records and CSV tables.

use std::io::Write;
use std::path::Path;

use serde::Serialize;

use crate::config::ExperimentConfig;
use crate::error::{Error, Result};
use crate::young::{log_grid, YoungFunction};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Serialize)]
pub struct Record<'a, T: Serialize> {
    pub schema_version: u32,
    pub command: &'a str,
    pub config: &'a ExperimentConfig,
    pub result: &'a T,
}

/// Pretty JSON record carrying the resolved configuration.
pub fn json_record<T: Serialize>(command: &str, config: &ExperimentConfig, result: &T) -> Result<String> {
    let record = Record { schema_version: SCHEMA_VERSION, command, config, result };
    let mut s = serde_json::to_string_pretty(&record).map_err(|e| Error::Config(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

/// Writes `text` to `out`, or to stdout when `out` is `None`.
pub fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(path) => std::fs::write(path, text).map_err(|e| Error::Config(format!("{}: {e}", path.display()))),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .and_then(|_| stdout.flush())
                .map_err(|e| Error::Config(e.to_string()))
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BarRow {
    pub t: f64,
    pub g: f64,
    pub g_bar: f64,
    pub ratio: f64,
}

/// `Ḡ` next to `G` on `points` log-spaced values of `t` in `[1e-3, 1e3]`.
pub fn bar_table(young: &YoungFunction, bar: &YoungFunction, points: usize) -> Vec<BarRow> {
    log_grid(1e-3, 1e3, points)
        .into_iter()
        .map(|t| {
            let (g, g_bar) = (young.big_g(t), bar.big_g(t));
            BarRow { t, g, g_bar, ratio: g_bar / g }
        })
        .collect()
}

/// `t,G,G_bar,ratio`.
pub fn bar_csv(rows: &[BarRow]) -> String {
    let mut out = String::from("t,G,G_bar,ratio\n");
    for r in rows {
        out.push_str(&format!("{},{},{},{}\n", r.t, r.g, r.g_bar, r.ratio));
    }
    out
}
