//! Uniform interval meshes, continuous piecewise-linear fields vanishing
//! outside the interval, and the quadrature engines that turn every modular
//! into a weighted cloud of magnitude samples.
//!
//! Every quadrature node is stored as a [`Stencil`]: a linear functional of
//! the nodal values touching at most two elements. A field is sampled by
//! applying all stencils, so one geometric cloud serves every field, every
//! scale `τ` and the pairings against the hat basis.

use std::fmt::Write as _;
use std::sync::Arc;

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::quadrature::{graded_toward_zero, UnitRule};
use crate::young::YoungFunction;

const CHUNK: usize = 1 << 14;
/// Points per panel of the graded one-dimensional reductions.
const PANEL_ORDER: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Mesh1D {
    pub a: f64,
    pub b: f64,
    pub n_elements: usize,
}

impl Mesh1D {
    pub fn new(a: f64, b: f64, n_elements: usize) -> Result<Self> {
        if !(a.is_finite() && b.is_finite() && a < b) || n_elements < 2 {
            return Err(Error::InvalidInterval { a, b, n_elements });
        }
        Ok(Self { a, b, n_elements })
    }

    pub fn h(&self) -> f64 {
        (self.b - self.a) / self.n_elements as f64
    }

    pub fn node(&self, i: usize) -> f64 {
        if i == self.n_elements {
            self.b
        } else {
            self.a + self.h() * i as f64
        }
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..=self.n_elements).map(|i| self.node(i)).collect()
    }

    /// Number of interior nodes, i.e. of degrees of freedom.
    pub fn dofs(&self) -> usize {
        self.n_elements - 1
    }

    pub fn midpoint(&self) -> f64 {
        0.5 * (self.a + self.b)
    }
}

/// Continuous piecewise-linear function with values at the interior nodes;
/// zero at the endpoints and outside `(a, b)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NodalField {
    pub mesh: Mesh1D,
    pub coefficients: Vec<f64>,
}

impl NodalField {
    pub fn zeros(mesh: Mesh1D) -> Self {
        Self { mesh, coefficients: vec![0.0; mesh.dofs()] }
    }

    pub fn from_coefficients(mesh: Mesh1D, coefficients: Vec<f64>) -> Result<Self> {
        if coefficients.len() != mesh.dofs() {
            return Err(Error::InvalidParameter(format!(
                "expected {} coefficients, got {}",
                mesh.dofs(),
                coefficients.len()
            )));
        }
        if let Some((i, &v)) = coefficients.iter().enumerate().find(|(_, v)| !v.is_finite()) {
            return Err(Error::NonFiniteValue { node: i + 1, value: v });
        }
        Ok(Self { mesh, coefficients })
    }

    /// Nodal interpolant of `f`; boundary values are forced to zero.
    pub fn interpolate<F: Fn(f64) -> f64>(f: F, mesh: Mesh1D) -> Result<Self> {
        let coefficients = (1..mesh.n_elements).map(|i| f(mesh.node(i))).collect();
        Self::from_coefficients(mesh, coefficients)
    }

    /// All `n_elements + 1` nodal values including the zero endpoints.
    pub fn node_values(&self) -> Vec<f64> {
        let mut v = Vec::with_capacity(self.coefficients.len() + 2);
        v.push(0.0);
        v.extend_from_slice(&self.coefficients);
        v.push(0.0);
        v
    }

    pub fn value_at(&self, x: f64) -> f64 {
        let m = self.mesh;
        if x <= m.a || x >= m.b {
            return 0.0;
        }
        let pos = (x - m.a) / m.h();
        let e = (pos.floor() as usize).min(m.n_elements - 1);
        let xi = pos - e as f64;
        let node = |i: usize| if i == 0 || i == m.n_elements { 0.0 } else { self.coefficients[i - 1] };
        node(e) * (1.0 - xi) + node(e + 1) * xi
    }

    pub fn is_zero(&self) -> bool {
        self.coefficients.iter().all(|&c| c == 0.0)
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self {
            mesh: self.mesh,
            coefficients: self.coefficients.iter().map(|x| c * x).collect(),
        }
    }

    /// `self + c * other`.
    pub fn axpy(&self, c: f64, other: &NodalField) -> Self {
        Self {
            mesh: self.mesh,
            coefficients: self
                .coefficients
                .iter()
                .zip(&other.coefficients)
                .map(|(x, y)| x + c * y)
                .collect(),
        }
    }

    pub fn dot(&self, v: &[f64]) -> f64 {
        self.coefficients.iter().zip(v).map(|(a, b)| a * b).sum()
    }

    /// Two-column CSV `x,u(x)` at the mesh nodes.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("x,u\n");
        for (x, u) in self.mesh.nodes().iter().zip(self.node_values()) {
            let _ = writeln!(out, "{x},{u}");
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QuadratureSpec {
    /// Gauss points per element and per direction.
    pub gauss_order: usize,
    /// Geometric refinement levels toward the touching corner of adjacent
    /// element pairs and toward the diagonal endpoint of the same-element
    /// reduction.
    pub diagonal_grading: usize,
    /// Relative truncation tolerance of the graded one-dimensional reductions.
    pub exterior_tol: f64,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self { gauss_order: 4, diagonal_grading: 8, exterior_tol: 1e-10 }
    }
}

impl QuadratureSpec {
    pub fn validate(&self) -> Result<()> {
        if self.gauss_order < 2 || self.diagonal_grading < 2 || !(self.exterior_tol > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "quadrature spec needs gauss_order >= 2, diagonal_grading >= 2, exterior_tol > 0: {self:?}"
            )));
        }
        Ok(())
    }

    /// Panels toward 0 needed so that an integrand behaving like `w^{p-1}`
    /// loses at most `exterior_tol` of its mass.
    fn levels_for(&self, p_minus: f64) -> usize {
        ((1.0 / self.exterior_tol).log2() / p_minus).ceil() as usize + 2
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum SampleKind {
    Local,
    Gradient,
    Fractional(f64),
}

/// `cx[0] U[ex] + cx[1] U[ex+1] + cy[0] U[ey] + cy[1] U[ey+1]` on the full
/// nodal vector `U` (zero at both endpoints).
#[derive(Debug, Clone, Copy)]
struct Stencil {
    ex: u32,
    ey: u32,
    cx: [f64; 2],
    cy: [f64; 2],
}

impl Stencil {
    fn single(e: usize, cx: [f64; 2]) -> Self {
        Self { ex: e as u32, ey: e as u32, cx, cy: [0.0, 0.0] }
    }

    #[inline]
    fn apply(&self, u: &[f64]) -> f64 {
        let (x, y) = (self.ex as usize, self.ey as usize);
        self.cx[0] * u[x] + self.cx[1] * u[x + 1] + self.cy[0] * u[y] + self.cy[1] * u[y + 1]
    }

    #[inline]
    fn scatter(&self, c: f64, out: &mut [f64]) {
        let (x, y) = (self.ex as usize, self.ey as usize);
        out[x] += c * self.cx[0];
        out[x + 1] += c * self.cx[1];
        out[y] += c * self.cy[0];
        out[y + 1] += c * self.cy[1];
    }

    fn entries(&self) -> [(usize, f64); 4] {
        let (x, y) = (self.ex as usize, self.ey as usize);
        [(x, self.cx[0]), (x + 1, self.cx[1]), (y, self.cy[0]), (y + 1, self.cy[1])]
    }
}

/// Geometry of a quadrature: stencils and positive weights.
#[derive(Debug, Clone)]
pub struct SampleCloud {
    kind: SampleKind,
    mesh: Mesh1D,
    stencils: Vec<Stencil>,
    weights: Arc<[f64]>,
}

/// Signed sample values of one field together with the cloud weights; the
/// magnitudes are `|values|`.
#[derive(Debug, Clone)]
pub struct ModularSamples {
    pub kind: SampleKind,
    values: Vec<f64>,
    weights: Arc<[f64]>,
}

impl ModularSamples {
    /// Builds samples directly from `(magnitude, weight)` pairs.
    pub fn from_entries(kind: SampleKind, entries: &[(f64, f64)]) -> Result<Self> {
        for &(m, w) in entries {
            if !(m >= 0.0 && m.is_finite() && w > 0.0 && w.is_finite()) {
                return Err(Error::InvalidParameter(format!("bad sample ({m}, {w})")));
            }
        }
        Ok(Self {
            kind,
            values: entries.iter().map(|e| e.0).collect(),
            weights: entries.iter().map(|e| e.1).collect(),
        })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn magnitudes(&self) -> impl Iterator<Item = f64> + '_ {
        self.values.iter().map(|v| v.abs())
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|&v| v == 0.0)
    }

    pub fn max_magnitude(&self) -> f64 {
        self.magnitudes().fold(0.0, f64::max)
    }

    /// Deterministic chunked reduction of `Σ f(value, weight)`.
    pub(crate) fn reduce<F>(&self, f: F) -> (f64, f64)
    where
        F: Fn(f64, f64) -> (f64, f64) + Sync,
    {
        let partial: Vec<(f64, f64)> = self
            .values
            .par_chunks(CHUNK)
            .zip(self.weights.par_chunks(CHUNK))
            .map(|(v, w)| {
                v.iter().zip(w).fold((0.0, 0.0), |acc, (&v, &w)| {
                    let (a, b) = f(v, w);
                    (acc.0 + a, acc.1 + b)
                })
            })
            .collect();
        partial.iter().fold((0.0, 0.0), |acc, p| (acc.0 + p.0, acc.1 + p.1))
    }
}

/// `Σ wᵢ G(mᵢ / τ)`.
pub fn modular_value(samples: &ModularSamples, young: &YoungFunction, tau: f64) -> Result<f64> {
    Ok(modular_and_slope(samples, young, tau)?.0)
}

/// `(Σ w G(m/τ), Σ w g(m/τ) m/τ)`.
pub fn modular_and_slope(samples: &ModularSamples, young: &YoungFunction, tau: f64) -> Result<(f64, f64)> {
    if !(tau > 0.0) {
        return Err(Error::NonPositiveScale(tau));
    }
    let inv = 1.0 / tau;
    Ok(samples.reduce(|v, w| {
        let r = v.abs() * inv;
        let (big_g, g) = young.big_g_and_g(r);
        (w * big_g, w * g * r)
    }))
}

impl SampleCloud {
    pub fn kind(&self) -> SampleKind {
        self.kind
    }

    pub fn mesh(&self) -> Mesh1D {
        self.mesh
    }

    pub fn len(&self) -> usize {
        self.stencils.len()
    }

    pub fn is_empty(&self) -> bool {
        self.stencils.is_empty()
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    fn from_parts(kind: SampleKind, mesh: Mesh1D, parts: Vec<(Stencil, f64)>) -> Self {
        let (stencils, weights): (Vec<_>, Vec<_>) = parts.into_iter().unzip();
        Self { kind, mesh, stencils, weights: weights.into() }
    }

    /// Gauss samples of `|u|` on every element.
    pub fn local(mesh: Mesh1D, spec: &QuadratureSpec) -> Result<Self> {
        spec.validate()?;
        let rule = UnitRule::gauss(spec.gauss_order);
        let h = mesh.h();
        let mut parts = Vec::with_capacity(mesh.n_elements * rule.len());
        for e in 0..mesh.n_elements {
            for (xi, w) in rule.on(0.0, 1.0) {
                parts.push((Stencil::single(e, [1.0 - xi, xi]), h * w));
            }
        }
        Ok(Self::from_parts(SampleKind::Local, mesh, parts))
    }

    /// One sample of `|u'|` per element with weight `h`.
    pub fn gradient(mesh: Mesh1D) -> Self {
        let h = mesh.h();
        let parts = (0..mesh.n_elements)
            .map(|e| (Stencil::single(e, [-1.0 / h, 1.0 / h]), h))
            .collect();
        Self::from_parts(SampleKind::Gradient, mesh, parts)
    }

    /// Samples of `|D_s u|` for the `(1−s)`-normalized fractional modular over
    /// `R × R` with the measure `dx dy / |x − y|`.
    ///
    /// * same element: `u(x) − u(y) = u'_e (x − y)`, so the double integral
    ///   collapses onto `v = |x − y|^{1−s}`:
    ///   `(1−s) ∬_{e×e} G(|u'_e| r^{1−s}) dx dy / r = ∫_0^{h^{1−s}} 2 (h − v^{1/(1−s)}) G(|u'_e| v) dv / v`;
    /// * adjacent elements: tensor Gauss on cells graded toward the shared node;
    /// * other pairs: tensor Gauss, doubled order for pairs closer than three
    ///   elements;
    /// * exterior: for each interior point `x` and each side at distance `δ`,
    ///   `∫_δ^∞ G(|u(x)| d^{−s}) dd / d = (1/s) ∫_0^{δ^{−s}} G(|u(x)| w) dw / w`.
    ///
    /// `p_minus` is the lower growth exponent of the Young functions the cloud
    /// will be used with; it sizes the graded panels near zero magnitude.
    pub fn fractional(mesh: Mesh1D, s: f64, spec: &QuadratureSpec, p_minus: f64) -> Result<Self> {
        if !(s > 0.0 && s < 1.0) {
            return Err(Error::OrderOutOfRange(s));
        }
        spec.validate()?;
        let p_minus = p_minus.max(1.0);
        let n = mesh.n_elements;
        let h = mesh.h();
        let one_minus_s = 1.0 - s;
        let panel_rule = UnitRule::gauss(PANEL_ORDER);
        let far_rule = UnitRule::gauss(spec.gauss_order);
        let near_rule = UnitRule::gauss(2 * spec.gauss_order);
        let zero_levels = spec.levels_for(p_minus);
        let mut parts: Vec<(Stencil, f64)> = Vec::new();

        // same element
        {
            let k = 1.0 / one_minus_s;
            let v_max = h.powf(one_minus_s);
            let top_levels = spec.diagonal_grading + k.log2().ceil().max(0.0) as usize;
            let mut panels = graded_toward_zero(0.5 * v_max, zero_levels);
            panels.extend(
                graded_toward_zero(0.5 * v_max, top_levels)
                    .into_iter()
                    .map(|(lo, hi)| (v_max - hi, v_max - lo)),
            );
            let mut nodes = Vec::new();
            for &(lo, hi) in &panels {
                for (v, w) in panel_rule.on(lo, hi) {
                    // h - v^k computed as h (1 - (v / v_max)^k) to avoid cancellation
                    let weight = -2.0 * h * (k * (v / v_max).ln()).exp_m1() / v * w;
                    let weight = if v >= v_max { 0.0 } else { weight };
                    if weight > 0.0 {
                        nodes.push((v, weight));
                    }
                }
            }
            for e in 0..n {
                for &(v, weight) in &nodes {
                    parts.push((Stencil::single(e, [-v / h, v / h]), weight));
                }
            }
        }

        // adjacent elements e, e+1 sharing node e+1; a = x_{e+1} − x, b = y − x_{e+1}
        {
            let cells = corner_cells(h, spec.diagonal_grading);
            let mut nodes = Vec::new();
            for &(a0, a1, b0, b1) in &cells {
                for (a, wa) in near_rule.on(a0, a1) {
                    for (b, wb) in near_rule.on(b0, b1) {
                        nodes.push((a, b, wa * wb));
                    }
                }
            }
            for e in 0..n - 1 {
                for &(a, b, w) in &nodes {
                    let r = a + b;
                    let scale = r.powf(-s);
                    let xi = 1.0 - a / h;
                    let eta = b / h;
                    let st = Stencil {
                        ex: e as u32,
                        ey: (e + 1) as u32,
                        cx: [(1.0 - xi) * scale, xi * scale],
                        cy: [-(1.0 - eta) * scale, -eta * scale],
                    };
                    parts.push((st, 2.0 * one_minus_s * w / r));
                }
            }
        }

        // separated pairs e < f - 1
        for e in 0..n {
            for f in e + 2..n {
                let rule = if f - e <= 3 { &near_rule } else { &far_rule };
                let xe = mesh.node(e);
                let xf = mesh.node(f);
                for (xi, wx) in rule.on(0.0, 1.0) {
                    for (eta, wy) in rule.on(0.0, 1.0) {
                        let r = (xf + h * eta) - (xe + h * xi);
                        let scale = r.powf(-s);
                        let st = Stencil {
                            ex: e as u32,
                            ey: f as u32,
                            cx: [(1.0 - xi) * scale, xi * scale],
                            cy: [-(1.0 - eta) * scale, -eta * scale],
                        };
                        parts.push((st, 2.0 * one_minus_s * h * h * wx * wy / r));
                    }
                }
            }
        }

        // exterior strips
        {
            let ext_panels = graded_toward_zero(1.0, zero_levels);
            let mut w_nodes = Vec::new();
            for &(lo, hi) in &ext_panels {
                w_nodes.extend(panel_rule.on(lo, hi));
            }
            let boundary_panels = graded_toward_zero(1.0, spec.diagonal_grading);
            let prefactor = 2.0 * one_minus_s / s;
            for e in 0..n {
                let mut x_nodes: Vec<(f64, f64)> = Vec::new();
                if e == 0 || e == n - 1 {
                    for &(lo, hi) in &boundary_panels {
                        x_nodes.extend(far_rule.on(lo, hi));
                    }
                    if e == n - 1 {
                        for node in &mut x_nodes {
                            node.0 = 1.0 - node.0;
                        }
                    }
                } else {
                    x_nodes.extend(far_rule.on(0.0, 1.0));
                }
                for &(xi, wx) in &x_nodes {
                    let x = mesh.node(e) + h * xi;
                    for delta in [x - mesh.a, mesh.b - x] {
                        if delta <= 0.0 {
                            continue;
                        }
                        let w_max = delta.powf(-s);
                        for &(t, wt) in &w_nodes {
                            let w = w_max * t;
                            let weight = prefactor * h * wx * wt / t;
                            parts.push((Stencil::single(e, [(1.0 - xi) * w, xi * w]), weight));
                        }
                    }
                }
            }
        }
        Ok(Self::from_parts(SampleKind::Fractional(s), mesh, parts))
    }

    /// Applies every stencil to `u`.
    pub fn apply(&self, u: &NodalField) -> ModularSamples {
        debug_assert_eq!(u.mesh, self.mesh);
        let nodes = u.node_values();
        let values = self.stencils.par_iter().map(|st| st.apply(&nodes)).collect();
        ModularSamples { kind: self.kind, values, weights: Arc::clone(&self.weights) }
    }

    /// `Σ_k c_k ∂(value_k)/∂(coefficient_i)` for every interior node `i`.
    pub fn pull_back(&self, per_sample: &[f64]) -> Vec<f64> {
        let n_nodes = self.mesh.n_elements + 1;
        let partial: Vec<Vec<f64>> = self
            .stencils
            .par_chunks(CHUNK)
            .zip(per_sample.par_chunks(CHUNK))
            .map(|(st, c)| {
                let mut acc = vec![0.0; n_nodes];
                for (s, &c) in st.iter().zip(c) {
                    if c != 0.0 {
                        s.scatter(c, &mut acc);
                    }
                }
                acc
            })
            .collect();
        let mut total = vec![0.0; n_nodes];
        for p in &partial {
            for (t, v) in total.iter_mut().zip(p) {
                *t += v;
            }
        }
        total[1..n_nodes - 1].to_vec()
    }

    /// Matrix of the quadratic form `u ↦ Σ w value(u)²` on interior nodes.
    pub fn gram(&self) -> DMatrix<f64> {
        self.gram_scaled(None)
    }

    /// Matrix of `u ↦ Σ c w value(u)²` for per-sample factors `c`.
    pub fn gram_weighted(&self, factors: &[f64]) -> DMatrix<f64> {
        assert_eq!(factors.len(), self.len());
        self.gram_scaled(Some(factors))
    }

    fn gram_scaled(&self, factors: Option<&[f64]>) -> DMatrix<f64> {
        let n_nodes = self.mesh.n_elements + 1;
        let dofs = self.mesh.dofs();
        let mut m = DMatrix::zeros(dofs, dofs);
        for (k, (st, &w)) in self.stencils.iter().zip(self.weights.iter()).enumerate() {
            let w = match factors {
                Some(c) => w * c[k],
                None => w,
            };
            if w == 0.0 {
                continue;
            }
            let ent = st.entries();
            for &(i, ci) in &ent {
                if i == 0 || i == n_nodes - 1 || ci == 0.0 {
                    continue;
                }
                for &(j, cj) in &ent {
                    if j == 0 || j == n_nodes - 1 || cj == 0.0 {
                        continue;
                    }
                    m[(i - 1, j - 1)] += w * ci * cj;
                }
            }
        }
        m
    }
}

/// Cells of `[0, h]²` graded geometrically toward the corner `(0, 0)`.
fn corner_cells(h: f64, levels: usize) -> Vec<(f64, f64, f64, f64)> {
    let mut cells = Vec::with_capacity(3 * levels + 1);
    let mut side = h;
    for _ in 0..levels {
        let half = 0.5 * side;
        cells.push((half, side, 0.0, half));
        cells.push((0.0, half, half, side));
        cells.push((half, side, half, side));
        side = half;
    }
    cells.push((0.0, side, 0.0, side));
    cells
}

pub fn make_mesh(a: f64, b: f64, n_elements: usize) -> Result<Mesh1D> {
    Mesh1D::new(a, b, n_elements)
}

pub fn sample_local(u: &NodalField, spec: &QuadratureSpec) -> Result<ModularSamples> {
    Ok(SampleCloud::local(u.mesh, spec)?.apply(u))
}

pub fn sample_gradient(u: &NodalField) -> ModularSamples {
    SampleCloud::gradient(u.mesh).apply(u)
}

/// Fractional samples sized for Young functions with `p⁻ ≥ 1`.
pub fn sample_fractional(u: &NodalField, s: f64, spec: &QuadratureSpec) -> Result<ModularSamples> {
    Ok(SampleCloud::fractional(u.mesh, s, spec, 1.0)?.apply(u))
}
