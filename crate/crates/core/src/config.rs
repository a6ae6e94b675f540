//! Experiment configuration: a flat `key = value` file merged with
//! command-line overrides and validated before any computation.

use std::path::PathBuf;

use serde::Serialize;

use crate::discretization::{Mesh1D, QuadratureSpec};
use crate::eigensolver::SolverConfig;
use crate::error::{Error, Result};
use crate::young::YoungFunction;

pub const DEFAULT_S_LIST: [f64; 7] = [0.5, 0.6, 0.7, 0.8, 0.9, 0.95, 0.99];

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentConfig {
    pub young: String,
    pub domain: (f64, f64),
    pub n: usize,
    pub s: f64,
    pub s_list: Vec<f64>,
    /// Luxemburg tolerance.
    pub tol: f64,
    pub seed: u64,
    pub gap_tol: f64,
    pub n_dim: usize,
    pub quadrature: QuadratureSpec,
    pub solver: SolverConfig,
    #[serde(skip)]
    pub out: Option<PathBuf>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            young: "power:2".into(),
            domain: (0.0, 1.0),
            n: 128,
            s: 0.5,
            s_list: DEFAULT_S_LIST.to_vec(),
            tol: 1e-12,
            seed: 0,
            gap_tol: 0.05,
            n_dim: 1,
            quadrature: QuadratureSpec::default(),
            solver: SolverConfig::default(),
            out: None,
        }
    }
}

fn parse_f64(key: &str, v: &str) -> Result<f64> {
    v.trim()
        .parse()
        .map_err(|_| Error::Config(format!("{key}: expected a number, got {v:?}")))
}

fn parse_usize(key: &str, v: &str) -> Result<usize> {
    v.trim()
        .parse()
        .map_err(|_| Error::Config(format!("{key}: expected a non-negative integer, got {v:?}")))
}

pub fn parse_list(key: &str, v: &str) -> Result<Vec<f64>> {
    v.split(',').map(|x| parse_f64(key, x)).collect()
}

pub fn parse_domain(v: &str) -> Result<(f64, f64)> {
    match parse_list("domain", v)?.as_slice() {
        &[a, b] => Ok((a, b)),
        _ => Err(Error::Config(format!("domain: expected a,b, got {v:?}"))),
    }
}

impl ExperimentConfig {
    /// Applies one `key = value` setting.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let v = value.trim();
        match key.trim() {
            "young" => self.young = v.to_string(),
            "domain" => self.domain = parse_domain(v)?,
            "n" => self.n = parse_usize(key, v)?,
            "s" => self.s = parse_f64(key, v)?,
            "s_list" => self.s_list = parse_list(key, v)?,
            "tol" => self.tol = parse_f64(key, v)?,
            "seed" => {
                let seed = v
                    .parse()
                    .map_err(|_| Error::Config(format!("seed: expected an integer, got {v:?}")))?;
                self.seed = seed;
                self.solver.seed = seed;
            }
            "gap_tol" => self.gap_tol = parse_f64(key, v)?,
            "n_dim" => self.n_dim = parse_usize(key, v)?,
            "out" => self.out = Some(PathBuf::from(v)),
            "gauss_order" => self.quadrature.gauss_order = parse_usize(key, v)?,
            "diagonal_grading" => self.quadrature.diagonal_grading = parse_usize(key, v)?,
            "exterior_tol" => self.quadrature.exterior_tol = parse_f64(key, v)?,
            "max_iters" => self.solver.max_iters = parse_usize(key, v)?,
            "step0" => self.solver.step0 = parse_f64(key, v)?,
            "backtrack" => self.solver.backtrack = parse_f64(key, v)?,
            "armijo" => self.solver.armijo = parse_f64(key, v)?,
            "residual_tol" => self.solver.residual_tol = parse_f64(key, v)?,
            other => return Err(Error::Config(format!("unknown key {other:?}"))),
        }
        Ok(())
    }

    /// Parses a flat configuration text: one `key = value` per line, `#`
    /// starts a comment.
    pub fn parse_str(text: &str) -> Result<Self> {
        let mut cfg = Self::default();
        cfg.merge_str(text)?;
        Ok(cfg)
    }

    pub fn merge_str(&mut self, text: &str) -> Result<()> {
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {}: expected key = value", lineno + 1)))?;
            self.set(k, v)?;
        }
        Ok(())
    }

    pub fn young_function(&self) -> Result<YoungFunction> {
        self.young.parse()
    }

    pub fn mesh(&self) -> Result<Mesh1D> {
        Mesh1D::new(self.domain.0, self.domain.1, self.n)
    }

    /// Checks every field against the preconditions of the modules.
    pub fn validate(&self) -> Result<()> {
        self.young_function()?;
        self.mesh()?;
        self.quadrature.validate()?;
        self.solver.validate()?;
        if !(self.tol > 0.0) {
            return Err(Error::Config(format!("tol must be positive, got {}", self.tol)));
        }
        if !(self.s > 0.0 && self.s <= 1.0) {
            return Err(Error::OrderOutOfRange(self.s));
        }
        if self.s_list.is_empty() {
            return Err(Error::Config("s_list is empty".into()));
        }
        if let Some(&s) = self.s_list.iter().find(|&&s| !(s > 0.0 && s < 1.0)) {
            return Err(Error::OrderOutOfRange(s));
        }
        if self.s_list.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Config("s_list must be strictly increasing".into()));
        }
        if !(self.gap_tol > 0.0) {
            return Err(Error::Config("gap_tol must be positive".into()));
        }
        if self.n_dim == 0 {
            return Err(Error::Config("n_dim must be >= 1".into()));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_flat_file() {
        let cfg = ExperimentConfig::parse_str(
            "# sweep\nyoung = power:3\ndomain = -1, 1\nn = 64\ns_list = 0.5,0.9\nresidual_tol = 1e-8 # tight\nseed = 9\n",
        )
        .unwrap();
        assert_eq!(cfg.young, "power:3");
        assert_eq!(cfg.domain, (-1.0, 1.0));
        assert_eq!(cfg.n, 64);
        assert_eq!(cfg.s_list, vec![0.5, 0.9]);
        assert_eq!(cfg.solver.residual_tol, 1e-8);
        assert_eq!(cfg.solver.seed, 9);
        cfg.validate().unwrap();
    }

    #[test]
    fn rejects_bad_input() {
        assert!(ExperimentConfig::parse_str("young power:2").unwrap_err().is_config());
        assert!(ExperimentConfig::parse_str("colour = red").unwrap_err().is_config());
        assert!(ExperimentConfig::parse_str("n = -3").unwrap_err().is_config());
        let mut c = ExperimentConfig::default();
        c.s_list = vec![0.9, 0.5];
        assert!(c.validate().unwrap_err().is_config());
        c = ExperimentConfig::default();
        c.young = "power:0.9".into();
        assert!(c.validate().unwrap_err().is_config());
        c = ExperimentConfig::default();
        c.s = 1.5;
        assert!(c.validate().unwrap_err().is_config());
    }
}
