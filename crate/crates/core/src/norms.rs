//! Luxemburg norms and seminorms of sample clouds.

use serde::Serialize;

use crate::discretization::{modular_and_slope, NodalField, QuadratureSpec, SampleCloud};
use crate::discretization::ModularSamples;
use crate::error::{Error, Result};
use crate::young::YoungFunction;

pub const DEFAULT_TOL: f64 = 1e-12;
const MAX_ITERATIONS: usize = 200;
/// Largest log-step taken before both sides of the root are bracketed.
const MAX_LOG_STEP: f64 = 30.0;
const POLISH_BELOW: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LuxemburgResult {
    pub tau: f64,
    /// `|Σ w G(m/τ) − 1|` at the returned `τ`.
    pub residual: f64,
    pub iterations: usize,
}

/// Solves `Σ w G(m/τ) = 1` for `τ`.
///
/// The map `σ = ln τ ↦ ln Φ(e^σ)` is strictly decreasing with slope
/// `−Σ w g(m/τ) m/τ / Φ ∈ [−p⁺, −p⁻]`, so Newton steps in `σ` are well scaled
/// (exact in one step for powers). Steps are clamped until a bracket exists and
/// replaced by bisection whenever they leave it.
pub fn luxemburg(samples: &ModularSamples, young: &YoungFunction, tol: f64) -> Result<LuxemburgResult> {
    if !(tol > 0.0) {
        return Err(Error::InvalidParameter(format!("tolerance must be positive, got {tol}")));
    }
    if samples.is_zero() {
        return Ok(LuxemburgResult { tau: 0.0, residual: 0.0, iterations: 0 });
    }
    let mut sigma = samples.max_magnitude().ln();
    let mut lo = f64::NEG_INFINITY; // Φ > 1 here
    let mut hi = f64::INFINITY; // Φ < 1 here
    let mut lo_val = f64::INFINITY;
    let mut hi_val = 0.0;
    for it in 1..=MAX_ITERATIONS {
        let tau = sigma.exp();
        let (phi, slope) = modular_and_slope(samples, young, tau)?;
        if !(phi.is_finite() && slope.is_finite()) {
            return Err(Error::LuxemburgNonconvergence(format!(
                "non-finite modular at tau = {tau:e}"
            )));
        }
        let residual = (phi - 1.0).abs();
        if residual <= tol {
            if residual <= POLISH_BELOW || !(slope > 0.0) {
                return Ok(LuxemburgResult { tau, residual, iterations: it });
            }
            // one more Newton step costs a single sweep and reaches rounding level
            let polished = (sigma + phi.ln() * phi / slope).exp();
            let (phi2, _) = modular_and_slope(samples, young, polished)?;
            let residual2 = (phi2 - 1.0).abs();
            return Ok(if residual2 < residual {
                LuxemburgResult { tau: polished, residual: residual2, iterations: it + 1 }
            } else {
                LuxemburgResult { tau, residual, iterations: it }
            });
        }
        if phi > 1.0 {
            if sigma > hi || phi > lo_val && sigma > lo {
                return Err(Error::LuxemburgNonconvergence(format!(
                    "modular is not decreasing near tau = {tau:e}"
                )));
            }
            lo = sigma;
            lo_val = phi;
        } else {
            if sigma < lo || phi < hi_val && sigma < hi {
                return Err(Error::LuxemburgNonconvergence(format!(
                    "modular is not decreasing near tau = {tau:e}"
                )));
            }
            hi = sigma;
            hi_val = phi;
        }
        let mut next = if phi > 0.0 && slope > 0.0 {
            sigma + phi.ln() * phi / slope
        } else {
            // every sample underflowed: shrink τ
            sigma - MAX_LOG_STEP
        };
        let bracketed = lo.is_finite() && hi.is_finite();
        if !bracketed {
            next = next.clamp(sigma - MAX_LOG_STEP, sigma + MAX_LOG_STEP);
        } else if !(next > lo && next < hi) {
            next = 0.5 * (lo + hi);
        }
        if bracketed && hi - lo <= 4.0 * f64::EPSILON * sigma.abs().max(1.0) {
            return Err(Error::LuxemburgNonconvergence(format!(
                "bracket collapsed at tau = {tau:e} with residual {residual:e}"
            )));
        }
        sigma = next;
    }
    Err(Error::LuxemburgNonconvergence(format!(
        "iteration budget {MAX_ITERATIONS} exhausted"
    )))
}

/// `‖u‖_G`.
pub fn norm_g(u: &NodalField, young: &YoungFunction, spec: &QuadratureSpec, tol: f64) -> Result<f64> {
    let cloud = SampleCloud::local(u.mesh, spec)?;
    Ok(luxemburg(&cloud.apply(u), young, tol)?.tau)
}

/// `[u]_{s,G}` for `s ∈ (0,1)` and `‖u'‖_G` for `s = 1`.
pub fn seminorm_sg(
    u: &NodalField,
    young: &YoungFunction,
    s: f64,
    spec: &QuadratureSpec,
    tol: f64,
) -> Result<f64> {
    let cloud = if s == 1.0 {
        SampleCloud::gradient(u.mesh)
    } else {
        SampleCloud::fractional(u.mesh, s, spec, young.exponents().p_minus)?
    };
    Ok(luxemburg(&cloud.apply(u), young, tol)?.tau)
}
