//! One-dimensional quadrature building blocks shared by the samplers and the
//! limit transform.

use std::num::NonZeroUsize;

use gauss_quad::legendre::GaussLegendre;

use crate::error::{Error, Result};

/// Gauss-Legendre rule mapped to the unit interval `[0, 1]`.
#[derive(Debug, Clone)]
pub struct UnitRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl UnitRule {
    pub fn gauss(order: usize) -> Self {
        let order = NonZeroUsize::new(order.max(1)).expect("order is positive");
        let rule = GaussLegendre::new(order);
        let mut pairs: Vec<(f64, f64)> = rule
            .as_node_weight_pairs()
            .iter()
            .map(|&(x, w)| (0.5 * (x + 1.0), 0.5 * w))
            .collect();
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        Self {
            nodes: pairs.iter().map(|p| p.0).collect(),
            weights: pairs.iter().map(|p| p.1).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Nodes and weights on `[lo, hi]`.
    pub fn on(&self, lo: f64, hi: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        let len = hi - lo;
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(move |(&x, &w)| (lo + len * x, len * w))
    }

    pub fn integrate<F: FnMut(f64) -> f64>(&self, lo: f64, hi: f64, mut f: F) -> f64 {
        self.on(lo, hi).map(|(x, w)| w * f(x)).sum()
    }
}

/// Panels `[lo, hi]` covering `[0, len]` geometrically refined toward 0:
/// `[len/2, len], [len/4, len/2], ...` and a final `[0, len 2^-levels]`.
pub fn graded_toward_zero(len: f64, levels: usize) -> Vec<(f64, f64)> {
    let mut panels = Vec::with_capacity(levels + 1);
    let mut hi = len;
    for _ in 0..levels {
        let lo = 0.5 * hi;
        panels.push((lo, hi));
        hi = lo;
    }
    panels.push((0.0, hi));
    panels
}

/// Panels on `[0, len]` refined geometrically toward both endpoints.
pub fn graded_both_ends(len: f64, levels_low: usize, levels_high: usize) -> Vec<(f64, f64)> {
    let half = 0.5 * len;
    let mut panels = graded_toward_zero(half, levels_low);
    panels.extend(
        graded_toward_zero(half, levels_high)
            .into_iter()
            .map(|(lo, hi)| (len - hi, len - lo)),
    );
    panels.sort_by(|a, b| a.0.total_cmp(&b.0));
    panels
}

/// Globally adaptive Gauss-Legendre integration by panel bisection.
///
/// Each panel is integrated with an `order`-point rule and with the same rule
/// on both halves; the difference is the error estimate. The panel with the
/// largest estimate is split until the total estimate falls below
/// `rel_tol * |I| + abs_tol`.
#[derive(Debug, Clone)]
pub struct AdaptiveGauss {
    rule: UnitRule,
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_panels: usize,
}

impl AdaptiveGauss {
    pub fn new(rel_tol: f64) -> Self {
        Self {
            rule: UnitRule::gauss(10),
            rel_tol,
            abs_tol: 0.0,
            max_panels: 4000,
        }
    }

    pub fn integrate<F: Fn(f64) -> f64>(&self, lo: f64, hi: f64, f: F) -> Result<f64> {
        if hi <= lo {
            return Ok(0.0);
        }
        struct Panel {
            lo: f64,
            hi: f64,
            value: f64,
            err: f64,
        }
        let eval = |lo: f64, hi: f64| {
            let mid = 0.5 * (lo + hi);
            let coarse = self.rule.integrate(lo, hi, &f);
            let fine = self.rule.integrate(lo, mid, &f) + self.rule.integrate(mid, hi, &f);
            Panel {
                lo,
                hi,
                value: fine,
                err: (fine - coarse).abs(),
            }
        };
        let mut panels = vec![eval(lo, hi)];
        loop {
            let total: f64 = panels.iter().map(|p| p.value).sum();
            let err: f64 = panels.iter().map(|p| p.err).sum();
            if !total.is_finite() {
                return Err(Error::QuadratureNonconvergence(format!(
                    "non-finite integrand on [{lo}, {hi}]"
                )));
            }
            if err <= self.rel_tol * total.abs() + self.abs_tol {
                return Ok(total);
            }
            if panels.len() >= self.max_panels {
                return Err(Error::QuadratureNonconvergence(format!(
                    "error estimate {err:e} after {} panels on [{lo}, {hi}]",
                    panels.len()
                )));
            }
            let (worst, _) = panels
                .iter()
                .enumerate()
                .max_by(|a, b| a.1.err.total_cmp(&b.1.err))
                .expect("non-empty");
            let p = panels.swap_remove(worst);
            if p.hi - p.lo <= f64::EPSILON * p.hi.abs().max(1e-300) {
                return Err(Error::QuadratureNonconvergence(format!(
                    "panel width underflow near {}",
                    p.lo
                )));
            }
            let mid = 0.5 * (p.lo + p.hi);
            panels.push(eval(p.lo, mid));
            panels.push(eval(mid, p.hi));
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_rule_is_exact_for_polynomials() {
        let rule = UnitRule::gauss(4);
        let v = rule.integrate(0.0, 2.0, |x| x.powi(7));
        assert!((v - 32.0).abs() < 1e-12);
        assert!((rule.weights.iter().sum::<f64>() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn graded_panels_cover_interval() {
        let p = graded_both_ends(3.0, 5, 7);
        assert_eq!(p.len(), 6 + 8);
        assert_eq!(p[0].0, 0.0);
        assert_eq!(p.last().unwrap().1, 3.0);
        for w in p.windows(2) {
            assert!((w[0].1 - w[1].0).abs() < 1e-15);
        }
    }

    #[test]
    fn adaptive_handles_endpoint_singularity() {
        let quad = AdaptiveGauss::new(1e-12);
        let v = quad.integrate(0.0, 1.0, |u| u.sqrt()).unwrap();
        assert!((v - 2.0 / 3.0).abs() < 1e-12);
    }
}
