//! Young functions: evaluation, complementary functions, growth exponents,
//! structural flags, the sampled inequality suite and the limit transform
//! `G -> Ḡ` used by the local limit problem.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::quadrature::AdaptiveGauss;

/// Log-spaced grid used for exponent estimation and sampled validation.
pub const EXPONENT_GRID_POINTS: usize = 2048;
pub const GRID_MIN: f64 = 1e-6;
pub const GRID_MAX: f64 = 1e6;
/// Number of nodes of the tabulated limit function.
pub const BAR_TABLE_POINTS: usize = 512;
/// Tolerance of the sampled second-difference tests.
pub const FLAG_TOL: f64 = 1e-10;

/// Growth exponents `p⁻ ≤ p⁺` bounding `t g'(t) / g(t) + 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExponentPair {
    pub p_minus: f64,
    pub p_plus: f64,
}

impl ExponentPair {
    pub fn new(p_minus: f64, p_plus: f64) -> Result<Self> {
        if !(p_minus > 1.0 && p_minus <= p_plus && p_plus.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "exponent pair must satisfy 1 < p- <= p+ < inf, got ({p_minus}, {p_plus})"
            )));
        }
        Ok(Self { p_minus, p_plus })
    }
}

/// The two structural conditions that make the homogeneous operator
/// uniformly monotone.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct StructuralFlags {
    /// `G(√t)` is convex.
    pub sqrt_convex: bool,
    /// `g'` is non-increasing.
    pub gprime_decreasing: bool,
}

impl StructuralFlags {
    /// Whether the pair `(G, s)` may be handed to the eigensolver.
    pub fn admits(&self, s: f64) -> std::result::Result<(), String> {
        if s >= 1.0 {
            if self.sqrt_convex {
                Ok(())
            } else {
                Err("s = 1 requires G(sqrt t) to be convex".into())
            }
        } else if self.sqrt_convex || self.gprime_decreasing {
            Ok(())
        } else {
            Err("G(sqrt t) is not convex and g' is not decreasing".into())
        }
    }
}

/// `(G(t), g(t), g'(t))`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct YoungValues {
    pub big_g: f64,
    pub g: f64,
    pub g_prime: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum PowerKind {
    Two,
    Three,
    General,
}

/// Monotone piecewise cubic Hermite interpolant on a uniform grid.
#[derive(Debug, Clone)]
struct Pchip {
    x0: f64,
    dx: f64,
    y: Vec<f64>,
    d: Vec<f64>,
}

impl Pchip {
    fn new(x0: f64, dx: f64, y: Vec<f64>) -> Self {
        let n = y.len();
        assert!(n >= 3);
        let delta: Vec<f64> = y.windows(2).map(|w| (w[1] - w[0]) / dx).collect();
        let mut d = vec![0.0; n];
        for i in 1..n - 1 {
            let (a, b) = (delta[i - 1], delta[i]);
            d[i] = if a * b <= 0.0 { 0.0 } else { 2.0 * a * b / (a + b) };
        }
        let end = |d0: f64, d1: f64| {
            let s = (3.0 * d0 - d1) / 2.0;
            if s * d0 <= 0.0 {
                0.0
            } else if d0 * d1 <= 0.0 && s.abs() > 3.0 * d0.abs() {
                3.0 * d0
            } else {
                s
            }
        };
        d[0] = end(delta[0], delta[1]);
        d[n - 1] = end(delta[n - 2], delta[n - 3]);
        Self { x0, dx, y, d }
    }

    fn x_max(&self) -> f64 {
        self.x0 + self.dx * (self.y.len() - 1) as f64
    }

    /// Value and derivative at `x`, which must lie inside the grid.
    fn eval(&self, x: f64) -> (f64, f64) {
        let n = self.y.len();
        let pos = ((x - self.x0) / self.dx).clamp(0.0, (n - 1) as f64);
        let i = (pos.floor() as usize).min(n - 2);
        let t = pos - i as f64;
        let (y0, y1, d0, d1) = (self.y[i], self.y[i + 1], self.d[i], self.d[i + 1]);
        let h = self.dx;
        let t2 = t * t;
        let t3 = t2 * t;
        let h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
        let h10 = t3 - 2.0 * t2 + t;
        let h01 = -2.0 * t3 + 3.0 * t2;
        let h11 = t3 - t2;
        let v = h00 * y0 + h10 * h * d0 + h01 * y1 + h11 * h * d1;
        let dh00 = 6.0 * t2 - 6.0 * t;
        let dh10 = 3.0 * t2 - 4.0 * t + 1.0;
        let dh01 = -6.0 * t2 + 6.0 * t;
        let dh11 = 3.0 * t2 - 2.0 * t;
        let dv = (dh00 * y0 + dh01 * y1) / h + dh10 * d0 + dh11 * d1;
        (v, dv)
    }
}

/// Tabulated Young function, interpolated in log-log coordinates.
#[derive(Debug, Clone)]
pub struct YoungTable {
    log_big_g: Pchip,
    log_g: Pchip,
    log_g_prime: Pchip,
    /// Power-law exponents used outside the table.
    slope_left: f64,
    slope_right: f64,
    label: String,
}

impl YoungTable {
    /// Builds a table from samples `(t_i, G_i, g_i, g'_i)` on a log-uniform grid.
    pub fn from_samples(
        t: &[f64],
        big_g: &[f64],
        g: &[f64],
        g_prime: &[f64],
        label: impl Into<String>,
    ) -> Result<Self> {
        let n = t.len();
        if n < 3 || big_g.len() != n || g.len() != n || g_prime.len() != n {
            return Err(Error::InvalidParameter("table needs >= 3 aligned samples".into()));
        }
        for i in 0..n {
            if !(t[i] > 0.0 && big_g[i] > 0.0 && g[i] > 0.0 && g_prime[i] > 0.0)
                || !(big_g[i].is_finite() && g[i].is_finite() && g_prime[i].is_finite())
            {
                return Err(Error::ValidationFailure(format!(
                    "table entry {i} is not positive and finite"
                )));
            }
        }
        let x0 = t[0].ln();
        let dx = (t[n - 1].ln() - x0) / (n - 1) as f64;
        for (i, ti) in t.iter().enumerate() {
            let expected = x0 + dx * i as f64;
            if (ti.ln() - expected).abs() > 1e-9 * (1.0 + expected.abs()) {
                return Err(Error::InvalidParameter("table grid is not log-uniform".into()));
            }
        }
        let logs = |v: &[f64]| v.iter().map(|x| x.ln()).collect::<Vec<_>>();
        let log_big_g = Pchip::new(x0, dx, logs(big_g));
        let slope_left = (log_big_g.y[1] - log_big_g.y[0]) / dx;
        let slope_right = (log_big_g.y[n - 1] - log_big_g.y[n - 2]) / dx;
        Ok(Self {
            log_big_g,
            log_g: Pchip::new(x0, dx, logs(g)),
            log_g_prime: Pchip::new(x0, dx, logs(g_prime)),
            slope_left,
            slope_right,
            label: label.into(),
        })
    }

    fn t_min(&self) -> f64 {
        self.log_big_g.x0.exp()
    }

    fn t_max(&self) -> f64 {
        self.log_big_g.x_max().exp()
    }

    fn extrapolate(&self, t: f64, anchor: f64, slope: f64) -> YoungValues {
        let (lg, _) = self.log_big_g.eval(anchor.ln());
        let big_g = lg.exp() * (t / anchor).powf(slope);
        YoungValues {
            big_g,
            g: slope * big_g / t,
            g_prime: slope * (slope - 1.0) * big_g / (t * t),
        }
    }

    fn evaluate(&self, t: f64) -> YoungValues {
        if t < self.t_min() {
            return self.extrapolate(t, self.t_min(), self.slope_left);
        }
        if t > self.t_max() {
            return self.extrapolate(t, self.t_max(), self.slope_right);
        }
        let x = t.ln();
        YoungValues {
            big_g: self.log_big_g.eval(x).0.exp(),
            g: self.log_g.eval(x).0.exp(),
            g_prime: self.log_g_prime.eval(x).0.exp(),
        }
    }

    fn big_g_and_g(&self, t: f64) -> (f64, f64) {
        if t < self.t_min() || t > self.t_max() {
            let v = self.evaluate(t);
            return (v.big_g, v.g);
        }
        let x = t.ln();
        (self.log_big_g.eval(x).0.exp(), self.log_g.eval(x).0.exp())
    }

    /// Exports `(t, G(t))` at the table nodes.
    pub fn nodes(&self) -> Vec<(f64, f64)> {
        let p = &self.log_big_g;
        (0..p.y.len())
            .map(|i| ((p.x0 + p.dx * i as f64).exp(), p.y[i].exp()))
            .collect()
    }

    /// Limits of `t g'/g` as `t -> 0` and `t -> inf`.
    fn tail_ratios(&self) -> [f64; 2] {
        [self.slope_left - 1.0, self.slope_right - 1.0]
    }
}

#[derive(Debug, Clone)]
pub enum Family {
    /// `G(t) = t^p / p`.
    Power { p: f64 },
    /// `G(t) = t^p log(1 + t)`.
    PowerLog { p: f64 },
    /// `G(t) = a t^p + b t^q`.
    PowerSum { p: f64, a: f64, q: f64, b: f64 },
    Tabulated(Arc<YoungTable>),
}

/// A Young function satisfying the growth condition with exponents
/// `1 < p⁻ ≤ p⁺ < ∞`. Values are immutable once constructed.
#[derive(Debug, Clone)]
pub struct YoungFunction {
    family: Family,
    power_kind: PowerKind,
    exponents: ExponentPair,
    flags: StructuralFlags,
}

fn positive(name: &str, v: f64, lower: f64) -> Result<()> {
    if v.is_finite() && v > lower {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("{name} must be finite and > {lower}, got {v}")))
    }
}

impl YoungFunction {
    pub fn power(p: f64) -> Result<Self> {
        Self::new(Family::Power { p })
    }

    pub fn power_log(p: f64) -> Result<Self> {
        Self::new(Family::PowerLog { p })
    }

    pub fn power_sum(p: f64, a: f64, q: f64, b: f64) -> Result<Self> {
        Self::new(Family::PowerSum { p, a, q, b })
    }

    pub fn tabulated(table: YoungTable) -> Result<Self> {
        Self::new(Family::Tabulated(Arc::new(table)))
    }

    /// Validates parameters, estimates exponents and structural flags and runs
    /// the sampled monotonicity checks.
    pub fn new(family: Family) -> Result<Self> {
        let mut power_kind = PowerKind::General;
        match &family {
            Family::Power { p } => {
                positive("p", *p, 1.0)?;
                power_kind = if *p == 2.0 {
                    PowerKind::Two
                } else if *p == 3.0 {
                    PowerKind::Three
                } else {
                    PowerKind::General
                };
            }
            Family::PowerLog { p } => positive("p", *p, 1.0)?,
            Family::PowerSum { p, a, q, b } => {
                positive("p", *p, 1.0)?;
                positive("q", *q, 1.0)?;
                positive("a", *a, 0.0)?;
                positive("b", *b, 0.0)?;
            }
            Family::Tabulated(_) => {}
        }
        let mut y = Self {
            family,
            power_kind,
            exponents: ExponentPair { p_minus: 2.0, p_plus: 2.0 },
            flags: StructuralFlags { sqrt_convex: false, gprime_decreasing: false },
        };
        y.exponents = estimate_exponents(&y, &log_grid(GRID_MIN, GRID_MAX, EXPONENT_GRID_POINTS))?;
        y.flags = structural_flags(&y);
        y.validate()?;
        Ok(y)
    }

    fn validate(&self) -> Result<()> {
        let grid = log_grid(GRID_MIN, GRID_MAX, EXPONENT_GRID_POINTS);
        let mut prev: Option<YoungValues> = None;
        for &t in &grid {
            let v = self.evaluate(t);
            if !(v.big_g > 0.0 && v.g > 0.0 && v.g_prime >= 0.0)
                || !(v.big_g.is_finite() && v.g.is_finite() && v.g_prime.is_finite())
            {
                return Err(Error::ValidationFailure(format!(
                    "G, g, g' must be positive and finite, failed at t = {t:e}"
                )));
            }
            if let Some(p) = prev {
                if v.big_g < p.big_g || v.g < p.g * (1.0 - 1e-12) {
                    return Err(Error::ValidationFailure(format!(
                        "G or g decreases near t = {t:e}"
                    )));
                }
            }
            prev = Some(v);
        }
        Ok(())
    }

    pub fn family(&self) -> &Family {
        &self.family
    }

    pub fn exponents(&self) -> ExponentPair {
        self.exponents
    }

    pub fn flags(&self) -> StructuralFlags {
        self.flags
    }

    pub fn is_power(&self, p: f64) -> bool {
        matches!(self.family, Family::Power { p: q } if q == p)
    }

    /// `(G(t), g(t), g'(t))`; `t = 0` yields `G = g = 0` and the one-sided
    /// limit of `g'`.
    pub fn evaluate(&self, t: f64) -> YoungValues {
        debug_assert!(t >= 0.0);
        if t == 0.0 {
            return YoungValues { big_g: 0.0, g: 0.0, g_prime: self.g_prime_at_zero() };
        }
        match &self.family {
            Family::Power { p } => {
                let g = t.powf(p - 1.0);
                YoungValues { big_g: t * g / p, g, g_prime: (p - 1.0) * g / t }
            }
            Family::PowerLog { p } => {
                let l = t.ln_1p();
                let tp = t.powf(*p);
                let tp1 = tp / t;
                let inv = 1.0 / (1.0 + t);
                YoungValues {
                    big_g: tp * l,
                    g: p * tp1 * l + tp * inv,
                    g_prime: p * (p - 1.0) * (tp1 / t) * l + 2.0 * p * tp1 * inv - tp * inv * inv,
                }
            }
            Family::PowerSum { p, a, q, b } => {
                let tp = t.powf(*p);
                let tq = t.powf(*q);
                YoungValues {
                    big_g: a * tp + b * tq,
                    g: (a * p * tp + b * q * tq) / t,
                    g_prime: (a * p * (p - 1.0) * tp + b * q * (q - 1.0) * tq) / (t * t),
                }
            }
            Family::Tabulated(table) => table.evaluate(t),
        }
    }

    fn g_prime_at_zero(&self) -> f64 {
        let by_exponent = |e: f64, c: f64| {
            if e < 2.0 {
                f64::INFINITY
            } else if e == 2.0 {
                c
            } else {
                0.0
            }
        };
        match &self.family {
            Family::Power { p } => by_exponent(*p, 1.0),
            Family::PowerLog { p } => by_exponent(p + 1.0, p * (p + 1.0)),
            Family::PowerSum { p, a, q, b } => {
                by_exponent(*p, 2.0 * a) + by_exponent(*q, 2.0 * b)
            }
            Family::Tabulated(table) => {
                let v = table.evaluate(table.t_min());
                let s = table.slope_left;
                by_exponent(s, s * (s - 1.0) * v.big_g / (table.t_min() * table.t_min()))
            }
        }
    }

    /// `G(t)`.
    #[inline]
    pub fn big_g(&self, t: f64) -> f64 {
        self.big_g_and_g(t).0
    }

    /// `g(t)`.
    #[inline]
    pub fn g(&self, t: f64) -> f64 {
        self.big_g_and_g(t).1
    }

    /// `(G(t), g(t))`, the hot path of every modular evaluation.
    #[inline]
    pub fn big_g_and_g(&self, t: f64) -> (f64, f64) {
        if t == 0.0 {
            return (0.0, 0.0);
        }
        match &self.family {
            Family::Power { p } => match self.power_kind {
                PowerKind::Two => (0.5 * t * t, t),
                PowerKind::Three => {
                    let t2 = t * t;
                    (t2 * t / 3.0, t2)
                }
                PowerKind::General => {
                    let g = t.powf(p - 1.0);
                    (t * g / p, g)
                }
            },
            Family::Tabulated(table) => table.big_g_and_g(t),
            _ => {
                let v = self.evaluate(t);
                (v.big_g, v.g)
            }
        }
    }

    /// Limits of `t g'(t) / g(t)` at `0` and `∞`.
    fn tail_ratios(&self) -> [f64; 2] {
        match &self.family {
            Family::Power { p } => [p - 1.0, p - 1.0],
            Family::PowerLog { p } => [*p, p - 1.0],
            Family::PowerSum { p, q, .. } => [p.min(*q) - 1.0, p.max(*q) - 1.0],
            Family::Tabulated(table) => table.tail_ratios(),
        }
    }

    /// Inverse of `g` by safeguarded Newton iteration in log coordinates.
    pub fn inverse_g(&self, t: f64) -> Result<f64> {
        if t == 0.0 {
            return Ok(0.0);
        }
        if let Family::Power { p } = self.family {
            return Ok(t.powf(1.0 / (p - 1.0)));
        }
        const LOG_BOUND: f64 = 690.0;
        let target = t.ln();
        let f = |sigma: f64| {
            let v = self.evaluate(sigma.exp());
            (v.g.ln() - target, sigma.exp() * v.g_prime / v.g)
        };
        // bracket [lo, hi] with f(lo) < 0 < f(hi)
        let mut lo = f64::NEG_INFINITY;
        let mut hi = f64::INFINITY;
        let mut sigma: f64 = 0.0;
        for _ in 0..200 {
            if sigma.abs() > LOG_BOUND {
                return Err(Error::RootBracketFailure(t));
            }
            let (val, slope) = f(sigma);
            if !val.is_finite() {
                return Err(Error::RootBracketFailure(t));
            }
            if val.abs() <= 4.0 * f64::EPSILON * target.abs().max(1.0) {
                return Ok(sigma.exp());
            }
            if val < 0.0 {
                lo = sigma;
            } else {
                hi = sigma;
            }
            let mut next = sigma - val / slope.max(1e-3);
            if !next.is_finite() || next <= lo || next >= hi {
                next = match (lo.is_finite(), hi.is_finite()) {
                    (true, true) => 0.5 * (lo + hi),
                    (true, false) => sigma + 2.0,
                    _ => sigma - 2.0,
                };
            }
            if lo.is_finite() && hi.is_finite() && hi - lo < 4.0 * f64::EPSILON * sigma.abs().max(1.0) {
                return Ok(next.exp());
            }
            sigma = next;
        }
        Err(Error::RootBracketFailure(t))
    }

    /// Complementary function `G̃(t) = t g⁻¹(t) − G(g⁻¹(t))`.
    pub fn conjugate(&self, t: f64) -> Result<f64> {
        if t == 0.0 {
            return Ok(0.0);
        }
        if let Family::Power { p } = self.family {
            let q = p / (p - 1.0);
            return Ok(t.powf(q) / q);
        }
        let w = self.inverse_g(t)?;
        Ok(t * w - self.big_g(w))
    }

    pub fn spec_string(&self) -> String {
        self.to_string()
    }
}

impl fmt::Display for YoungFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.family {
            Family::Power { p } => write!(f, "power:{p}"),
            Family::PowerLog { p } => write!(f, "powerlog:{p}"),
            Family::PowerSum { p, a, q, b } => write!(f, "powersum:{p},{a},{q},{b}"),
            Family::Tabulated(t) => write!(f, "{}", t.label),
        }
    }
}

impl FromStr for YoungFunction {
    type Err = Error;

    /// Parses `family:param[,param...]`, e.g. `power:2`, `powerlog:2.5`,
    /// `powersum:2,1,4,1`.
    fn from_str(s: &str) -> Result<Self> {
        let (name, params) = s
            .split_once(':')
            .ok_or_else(|| Error::InvalidParameter(format!("expected family:params, got {s:?}")))?;
        let values = params
            .split(',')
            .map(|v| {
                v.trim()
                    .parse::<f64>()
                    .map_err(|_| Error::InvalidParameter(format!("bad number {v:?} in {s:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        let arity = |n: usize| {
            if values.len() == n {
                Ok(())
            } else {
                Err(Error::InvalidParameter(format!(
                    "family {name} takes {n} parameter(s), got {}",
                    values.len()
                )))
            }
        };
        match name.trim().to_ascii_lowercase().as_str() {
            "power" => {
                arity(1)?;
                Self::power(values[0])
            }
            "powerlog" | "power-log" => {
                arity(1)?;
                Self::power_log(values[0])
            }
            "powersum" | "power-sum" => {
                arity(4)?;
                Self::power_sum(values[0], values[1], values[2], values[3])
            }
            other => Err(Error::InvalidParameter(format!("unknown family {other:?}"))),
        }
    }
}

pub fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let (a, b) = (lo.ln(), hi.ln());
    (0..n)
        .map(|i| match i {
            0 => lo,
            _ if i == n - 1 => hi,
            _ => (a + (b - a) * i as f64 / (n - 1) as f64).exp(),
        })
        .collect()
}

/// `p± = 1 + min/max of t g'(t)/g(t)` over the grid together with the
/// family's analytic tail limits. The power family returns `(p, p)` exactly.
pub fn estimate_exponents(y: &YoungFunction, grid: &[f64]) -> Result<ExponentPair> {
    if let Family::Power { p } = y.family {
        return ExponentPair::new(p, p);
    }
    let tails = y.tail_ratios();
    let mut lo = tails[0].min(tails[1]);
    let mut hi = tails[0].max(tails[1]);
    for &t in grid {
        let v = y.evaluate(t);
        let r = t * v.g_prime / v.g;
        if r.is_finite() {
            lo = lo.min(r);
            hi = hi.max(r);
        }
    }
    ExponentPair::new(1.0 + lo, 1.0 + hi)
}

/// Decides the structural conditions, analytically for powers and by
/// centered second differences on a log grid otherwise.
pub fn structural_flags(y: &YoungFunction) -> StructuralFlags {
    if let Family::Power { p } = y.family {
        return StructuralFlags { sqrt_convex: p >= 2.0, gprime_decreasing: p <= 2.0 };
    }
    const REL_STEP: f64 = 1e-3;
    let grid = log_grid(GRID_MIN, GRID_MAX, EXPONENT_GRID_POINTS);
    let mut sqrt_convex = true;
    let mut gprime_decreasing = true;
    for &r in &grid {
        // H(t) = G(√t) around t = r²
        let t = r * r;
        let h = |x: f64| y.big_g(x.sqrt());
        let (hm, h0, hp) = (h(t * (1.0 - REL_STEP)), h(t), h(t * (1.0 + REL_STEP)));
        if hp - 2.0 * h0 + hm < -FLAG_TOL * h0 {
            sqrt_convex = false;
        }
        let (gm, g0, gp) = (y.g(r * (1.0 - REL_STEP)), y.g(r), y.g(r * (1.0 + REL_STEP)));
        if gp - 2.0 * g0 + gm > FLAG_TOL * g0 {
            gprime_decreasing = false;
        }
    }
    StructuralFlags { sqrt_convex, gprime_decreasing }
}

/// Outcome of one sampled inequality.
#[derive(Debug, Clone, Serialize)]
pub struct InequalityCheck {
    pub name: &'static str,
    pub samples: usize,
    pub violations: usize,
    /// Smallest relative margin observed; negative beyond tolerance means a
    /// violation.
    pub worst_margin: f64,
    pub witness: Option<String>,
}

impl InequalityCheck {
    fn new(name: &'static str) -> Self {
        Self { name, samples: 0, violations: 0, worst_margin: f64::INFINITY, witness: None }
    }

    fn record(&mut self, margin: f64, tol: f64, witness: impl FnOnce() -> String) {
        self.samples += 1;
        if margin < self.worst_margin || margin.is_nan() {
            self.worst_margin = margin;
        }
        if !(margin >= -tol) {
            self.violations += 1;
            if self.witness.is_none() {
                self.witness = Some(witness());
            }
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct InequalityReport {
    pub young: String,
    pub exponents: ExponentPair,
    pub flags: StructuralFlags,
    pub checks: Vec<InequalityCheck>,
}

impl InequalityReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.violations == 0)
    }

    pub fn check(&self, name: &str) -> Option<&InequalityCheck> {
        self.checks.iter().find(|c| c.name == name)
    }
}

/// Roundoff allowance for the relative margins.
const INEQ_TOL: f64 = 1e-9;

/// `(g(|b|) sgn b − g(|a|) sgn a)(b − a)`.
pub fn monotonicity_product(y: &YoungFunction, a: f64, b: f64) -> f64 {
    let sg = |x: f64| if x == 0.0 { 0.0 } else { y.g(x.abs()) * x.signum() };
    (sg(b) - sg(a)) * (b - a)
}

/// Runs the sampled inequality suite with a deterministic seed.
pub fn check_inequalities(y: &YoungFunction, sample_count: usize, seed: u64) -> Result<InequalityReport> {
    if sample_count == 0 {
        return Err(Error::InvalidParameter("sample_count must be >= 1".into()));
    }
    let ExponentPair { p_minus, p_plus } = y.exponents;
    let flags = y.flags;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let log_lo = 1e-6f64.ln();
    let log_hi = 1e4f64.ln();
    let draw_t = |rng: &mut ChaCha8Rng| rng.gen_range(log_lo..log_hi).exp();

    let mut delta2 = InequalityCheck::new("delta2");
    let mut second_order = InequalityCheck::new("second_order_bounds");
    let mut conj_bound = InequalityCheck::new("conjugate_bound");
    let mut young_ineq = InequalityCheck::new("young_inequality");
    let mut young_eq = InequalityCheck::new("young_equality");
    let mut mono_pos = InequalityCheck::new("monotone_positive");
    let mut mono_sqrt = InequalityCheck::new("monotone_sqrt_convex");
    let mut mono_gp_zero = InequalityCheck::new("monotone_gprime_zero_branch");
    let mut mono_gp_same = InequalityCheck::new("monotone_gprime_same_sign");
    let sqrt_const = 2f64.powf(2.0 - p_plus);

    for _ in 0..sample_count {
        let t = draw_t(&mut rng);
        let v = y.evaluate(t);
        let ratio = t * v.g / v.big_g;
        delta2.record(
            ((ratio - p_minus) / p_minus).min((p_plus - ratio) / p_plus),
            INEQ_TOL,
            || format!("t = {t:e}, t g/G = {ratio}"),
        );
        let t2gp = t * t * v.g_prime;
        let lower = p_minus * (p_minus - 1.0) * v.big_g;
        let upper = p_plus * (p_plus - 1.0) * v.big_g;
        second_order.record(
            ((t2gp - lower) / lower).min((upper - t2gp) / upper),
            INEQ_TOL,
            || format!("t = {t:e}, t^2 g' = {t2gp:e}, bounds [{lower:e}, {upper:e}]"),
        );
        let conj = y.conjugate(v.g)?;
        let bound = (p_plus - 1.0) * v.big_g;
        conj_bound.record((bound - conj) / bound, INEQ_TOL, || {
            format!("t = {t:e}, conj(g(t)) = {conj:e} > {bound:e}")
        });
        // equality case at t = g(w) with w := t
        let gap = (v.big_g + conj - t * v.g).abs();
        young_eq.record(1e-6 * (1.0 + v.big_g) - gap, 0.0, || {
            format!("w = {t:e}, equality gap {gap:e}")
        });

        let w = draw_t(&mut rng);
        let tc = y.g(w) * rng.gen_range(0.1..10.0);
        let rhs = y.big_g(w) + y.conjugate(tc)?;
        young_ineq.record((rhs - tc * w) / rhs.max(f64::MIN_POSITIVE), INEQ_TOL, || {
            format!("t = {tc:e}, w = {w:e}: t w = {:e} > {rhs:e}", tc * w)
        });

        let a = rng.gen_range(-10.0..10.0);
        let b = rng.gen_range(-10.0..10.0);
        if a != b {
            let lhs = monotonicity_product(y, a, b);
            mono_pos.record(if lhs > 0.0 { 1.0 } else { -1.0 }, 0.0, || {
                format!("(a, b) = ({a}, {b}), product {lhs:e}")
            });
            if flags.sqrt_convex {
                let rhs = sqrt_const * y.big_g((b - a).abs());
                mono_sqrt.record((lhs - rhs) / rhs, INEQ_TOL, || {
                    format!("(a, b) = ({a}, {b}): {lhs:e} < {rhs:e}")
                });
            }
            if flags.gprime_decreasing {
                let rhs = b * b * y.evaluate(b.abs()).g_prime / (p_plus - 1.0);
                let lhs0 = monotonicity_product(y, 0.0, b);
                mono_gp_zero.record((lhs0 - rhs) / rhs, INEQ_TOL, || {
                    format!("(a, b) = (0, {b}): {lhs0:e} < {rhs:e}")
                });
                if a * b > 0.0 {
                    let rhs = (b - a) * (b - a) * y.evaluate(a.abs().max(b.abs())).g_prime;
                    mono_gp_same.record((lhs - rhs) / rhs, INEQ_TOL, || {
                        format!("(a, b) = ({a}, {b}): {lhs:e} < {rhs:e}")
                    });
                }
            }
        }
    }
    let mut checks = vec![delta2, second_order, conj_bound, young_ineq, young_eq, mono_pos];
    if flags.sqrt_convex {
        checks.push(mono_sqrt);
    }
    if flags.gprime_decreasing {
        checks.push(mono_gp_zero);
        checks.push(mono_gp_same);
    }
    Ok(InequalityReport {
        young: y.to_string(),
        exponents: y.exponents,
        flags,
        checks,
    })
}

/// Surface measure of the unit sphere `S^k ⊂ R^{k+1}`.
pub fn sphere_area(k: usize) -> f64 {
    match k {
        0 => 2.0,
        1 => 2.0 * std::f64::consts::PI,
        _ => 2.0 * std::f64::consts::PI / (k as f64 - 1.0) * sphere_area(k - 2),
    }
}

/// Integrates `f(|z_n|)` over `S^{n-1}`.
fn sphere_integral<F: Fn(f64) -> Result<f64>>(n: usize, quad: &AdaptiveGauss, f: F) -> Result<f64> {
    if n == 1 {
        return Ok(2.0 * f(1.0)?);
    }
    // ∫_S f(|z_n|) dS = 2 |S^{n-2}| ∫_0^{π/2} f(sin φ) cos^{n-2} φ dφ
    let err = std::cell::RefCell::new(None);
    let value = quad.integrate(0.0, std::f64::consts::FRAC_PI_2, |phi| {
        match f(phi.sin()) {
            Ok(v) => v * phi.cos().powi(n as i32 - 2),
            Err(e) => {
                err.borrow_mut().get_or_insert(e);
                0.0
            }
        }
    })?;
    if let Some(e) = err.into_inner() {
        return Err(e);
    }
    Ok(2.0 * sphere_area(n - 2) * value)
}

/// The limit Young function
/// `Ḡ(t) = ∫_{S^{n-1}} ∫_0^1 G(t |z_n| u) du/u dS_z`, tabulated on
/// [`BAR_TABLE_POINTS`] log-spaced nodes over `[1e-6, 1e6]` together with
/// `ḡ(t) = ∫∫ g(t|z_n|u) |z_n| du dS` and `ḡ'(t) = ∫∫ g'(t|z_n|u) |z_n|² u du dS`.
pub fn bar_transform(y: &YoungFunction, n: usize, quad_tol: f64) -> Result<YoungFunction> {
    if n == 0 {
        return Err(Error::InvalidParameter("dimension must be >= 1".into()));
    }
    if !(quad_tol > 0.0) {
        return Err(Error::InvalidParameter("quad_tol must be positive".into()));
    }
    let inner = AdaptiveGauss::new(quad_tol * 0.1);
    let outer = AdaptiveGauss::new(quad_tol);
    let grid = log_grid(GRID_MIN, GRID_MAX, BAR_TABLE_POINTS);
    let mut big_g = Vec::with_capacity(grid.len());
    let mut g = Vec::with_capacity(grid.len());
    let mut gp = Vec::with_capacity(grid.len());
    for &t in &grid {
        big_g.push(sphere_integral(n, &outer, |z| {
            inner.integrate(0.0, 1.0, |u| if u == 0.0 { 0.0 } else { y.big_g(t * z * u) / u })
        })?);
        g.push(sphere_integral(n, &outer, |z| {
            inner.integrate(0.0, 1.0, |u| y.g(t * z * u) * z)
        })?);
        gp.push(sphere_integral(n, &outer, |z| {
            inner.integrate(0.0, 1.0, |u| {
                let x = t * z * u;
                if x == 0.0 {
                    0.0
                } else {
                    y.evaluate(x).g_prime * z * z * u
                }
            })
        })?);
    }
    let label = format!("bar({y},n={n})");
    YoungFunction::tabulated(YoungTable::from_samples(&grid, &big_g, &g, &gp, label)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, rel: f64) -> bool {
        (a - b).abs() <= rel * b.abs().max(1e-300)
    }

    #[test]
    fn power_two_values() {
        let y = YoungFunction::power(2.0).unwrap();
        let v = y.evaluate(3.0);
        assert_eq!((v.big_g, v.g, v.g_prime), (4.5, 3.0, 1.0));
    }

    #[test]
    fn power_three_at_two() {
        let y = YoungFunction::power(3.0).unwrap();
        let v = y.evaluate(2.0);
        assert!(close(v.big_g, 8.0 / 3.0, 1e-15));
        assert!(close(v.g, 4.0, 1e-15));
        assert!(close(v.g_prime, 4.0, 1e-15));
    }

    #[test]
    fn zero_argument() {
        for spec in ["power:1.5", "power:2", "power:3", "powerlog:2", "powersum:2,1,4,1"] {
            let y: YoungFunction = spec.parse().unwrap();
            let v = y.evaluate(0.0);
            assert_eq!((v.big_g, v.g), (0.0, 0.0), "{spec}");
            assert_eq!(y.conjugate(0.0).unwrap(), 0.0);
        }
        assert_eq!(YoungFunction::power(1.5).unwrap().evaluate(0.0).g_prime, f64::INFINITY);
        assert_eq!(YoungFunction::power(2.0).unwrap().evaluate(0.0).g_prime, 1.0);
        assert_eq!(YoungFunction::power(3.0).unwrap().evaluate(0.0).g_prime, 0.0);
        assert_eq!("powersum:2,1,4,1".parse::<YoungFunction>().unwrap().evaluate(0.0).g_prime, 2.0);
    }

    #[test]
    fn invalid_parameters() {
        assert!(matches!(YoungFunction::power(0.5), Err(Error::InvalidParameter(_))));
        assert!(matches!(YoungFunction::power(1.0), Err(Error::InvalidParameter(_))));
        assert!(YoungFunction::power_sum(2.0, -1.0, 4.0, 1.0).is_err());
        assert!("power".parse::<YoungFunction>().is_err());
        assert!("power:2,3".parse::<YoungFunction>().is_err());
        assert!("cosh:2".parse::<YoungFunction>().is_err());
        assert!("power:abc".parse::<YoungFunction>().is_err());
    }

    #[test]
    fn power_log_closed_form_at_one() {
        let y = YoungFunction::power_log(2.0).unwrap();
        let v = y.evaluate(1.0);
        let l2 = 2f64.ln();
        assert!(close(v.big_g, l2, 1e-15));
        assert!(close(v.g, 2.0 * l2 + 0.5, 1e-15));
        // 2 log 2 + 2*2*1/2 - 1/4
        assert!(close(v.g_prime, 2.0 * l2 + 2.0 - 0.25, 1e-15));
    }

    /// Central differences of G and g reproduce g and g' for every family.
    #[test]
    fn derivatives_match_finite_differences() {
        for spec in ["power:1.5", "power:3", "powerlog:2", "powerlog:2.5", "powersum:2,1,4,1"] {
            let y: YoungFunction = spec.parse().unwrap();
            for &t in &[1e-3, 0.1, 0.7, 1.0, 3.0, 25.0] {
                let h = 1e-6 * t;
                let v = y.evaluate(t);
                let dg = (y.big_g(t + h) - y.big_g(t - h)) / (2.0 * h);
                let dgp = (y.g(t + h) - y.g(t - h)) / (2.0 * h);
                assert!(close(dg, v.g, 1e-7), "{spec} t={t}: {dg} vs {}", v.g);
                assert!(close(dgp, v.g_prime, 1e-6), "{spec} t={t}: {dgp} vs {}", v.g_prime);
            }
        }
    }

    #[test]
    fn conjugate_quadratic() {
        let y = YoungFunction::power(2.0).unwrap();
        assert!(close(y.conjugate(3.0).unwrap(), 4.5, 1e-15));
    }

    #[test]
    fn conjugate_by_root_finding_matches_sup() {
        let y = YoungFunction::power_log(2.0).unwrap();
        for &t in &[0.01, 1.0, 17.0, 400.0] {
            let c = y.conjugate(t).unwrap();
            // brute-force sup over a fine grid around the maximiser
            let w0 = y.inverse_g(t).unwrap();
            let best = (0..=20000)
                .map(|i| w0 * (0.5 + i as f64 / 20000.0))
                .map(|w| t * w - y.big_g(w))
                .fold(f64::NEG_INFINITY, f64::max);
            assert!(c >= best - 1e-12 * best.abs());
            assert!(close(c, best, 1e-7));
        }
    }

    #[test]
    fn conjugate_is_involution_on_powers() {
        for &p in &[1.5, 2.0, 3.0, 4.0] {
            let y = YoungFunction::power(p).unwrap();
            let dual = YoungFunction::power(p / (p - 1.0)).unwrap();
            for &t in &log_grid(1e-3, 1e3, 40) {
                let back = dual.conjugate(t).unwrap();
                assert!(close(back, y.big_g(t), 1e-8), "p={p} t={t}");
            }
        }
    }

    #[test]
    fn exponents() {
        let grid = log_grid(GRID_MIN, GRID_MAX, EXPONENT_GRID_POINTS);
        let e = estimate_exponents(&YoungFunction::power(3.0).unwrap(), &grid).unwrap();
        assert_eq!((e.p_minus, e.p_plus), (3.0, 3.0));
        let e = YoungFunction::power_log(2.0).unwrap().exponents();
        assert!((e.p_minus - 2.0).abs() < 1e-3 && (e.p_plus - 3.0).abs() < 1e-3, "{e:?}");
        let e = YoungFunction::power_sum(2.0, 1.0, 4.0, 1.0).unwrap().exponents();
        assert!((e.p_minus - 2.0).abs() < 1e-3 && (e.p_plus - 4.0).abs() < 1e-3, "{e:?}");
    }

    #[test]
    fn flags_for_powers() {
        let f = |p: f64| YoungFunction::power(p).unwrap().flags();
        assert_eq!(f(3.0), StructuralFlags { sqrt_convex: true, gprime_decreasing: false });
        assert_eq!(f(1.5), StructuralFlags { sqrt_convex: false, gprime_decreasing: true });
        assert_eq!(f(2.0), StructuralFlags { sqrt_convex: true, gprime_decreasing: true });
    }

    #[test]
    fn sampled_flags() {
        let f = |s: &str| s.parse::<YoungFunction>().unwrap().flags();
        assert_eq!(f("powersum:2,1,4,1"), StructuralFlags { sqrt_convex: true, gprime_decreasing: false });
        assert!(f("powerlog:2").sqrt_convex);
        assert!(!f("powerlog:2").gprime_decreasing);
        // t^1.5 + t^1.2 has g' decreasing and G(√t) concave
        assert_eq!(
            f("powersum:1.5,1,1.2,1"),
            StructuralFlags { sqrt_convex: false, gprime_decreasing: true }
        );
    }

    #[test]
    fn admission() {
        let y = YoungFunction::power(1.5).unwrap();
        assert!(y.flags().admits(0.5).is_ok());
        assert!(y.flags().admits(1.0).is_err());
        assert!(YoungFunction::power(3.0).unwrap().flags().admits(1.0).is_ok());
    }

    #[test]
    fn monotone_bound_hand_example() {
        let y = YoungFunction::power(3.0).unwrap();
        let lhs = monotonicity_product(&y, 1.0, -1.0);
        assert!(close(lhs, 4.0, 1e-15));
        let rhs = 2f64.powf(2.0 - 3.0) * y.big_g(2.0);
        assert!(close(rhs, 4.0 / 3.0, 1e-15));
    }

    #[test]
    fn inequality_suite_quadratic() {
        let r = check_inequalities(&YoungFunction::power(2.0).unwrap(), 2000, 7).unwrap();
        assert!(r.passed(), "{r:#?}");
        // t g / G ≡ 2 so the delta2 margin is zero up to roundoff
        assert!(r.check("delta2").unwrap().worst_margin.abs() < 1e-14);
    }

    #[test]
    fn inequality_suite_reports_witness() {
        // lying about p+ must surface violations, not panic
        let mut y = YoungFunction::power_log(2.0).unwrap();
        y.exponents = ExponentPair::new(2.0, 2.5).unwrap();
        let r = check_inequalities(&y, 500, 1).unwrap();
        assert!(!r.passed());
        let d = r.check("delta2").unwrap();
        assert!(d.violations > 0 && d.witness.is_some());
    }

    #[test]
    fn bar_of_power_two_is_identity() {
        let y = YoungFunction::power(2.0).unwrap();
        let bar = bar_transform(&y, 1, 1e-10).unwrap();
        for &t in &log_grid(1e-3, 1e3, 50) {
            assert!(close(bar.big_g(t), y.big_g(t), 1e-8), "t={t}");
            assert!(close(bar.g(t), y.g(t), 1e-8), "t={t}");
        }
        assert_eq!(bar.big_g(0.0), 0.0);
    }

    #[test]
    fn bar_in_two_dimensions_of_quadratic() {
        // Ḡ = (∫_{S^1} |z_2|² dS) G / 2 = π G / 2 for G = t²/2
        let y = YoungFunction::power(2.0).unwrap();
        let bar = bar_transform(&y, 2, 1e-9).unwrap();
        for &t in &[0.01, 1.0, 50.0] {
            assert!(close(bar.big_g(t), std::f64::consts::PI * 0.5 * y.big_g(t), 1e-7), "t={t}");
        }
    }

    #[test]
    fn sphere_areas() {
        assert!(close(sphere_area(2), 4.0 * std::f64::consts::PI, 1e-15));
        assert!(close(sphere_area(3), 2.0 * std::f64::consts::PI.powi(2), 1e-15));
    }
}
