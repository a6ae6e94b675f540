//! First eigenpair by preconditioned descent on the unit sphere of `‖·‖_G`,
//! a two-dimensional loop bound for the second eigenvalue, the quadratic
//! matrix oracle, the `s ↑ 1` sweep and the modular convergence table.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::discretization::{modular_value, Mesh1D, NodalField, QuadratureSpec, SampleCloud};
use crate::error::{Error, Result};
use crate::functionals::{residual_from, FunctionalContext};
use crate::norms::luxemburg;
use crate::young::{bar_transform, YoungFunction};

/// Smallest line-search step before the descent is declared stagnant.
pub const MIN_STEP: f64 = 1e-12;
/// Tolerance of the adaptive quadrature behind the tabulated limit function.
pub const BAR_QUAD_TOL: f64 = 1e-10;
/// Points on the half circle parametrizing a loop.
pub const LOOP_POINTS: usize = 64;
/// Range of `g'(r)` in the preconditioner relative to its value at the
/// largest sample.
const FACTOR_RANGE: (f64, f64) = (1e-3, 1e8);

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SolverConfig {
    pub max_iters: usize,
    pub step0: f64,
    pub backtrack: f64,
    pub armijo: f64,
    pub residual_tol: f64,
    pub seed: u64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self { max_iters: 2000, step0: 1.0, backtrack: 0.5, armijo: 1e-4, residual_tol: 1e-7, seed: 0 }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        let ok = self.max_iters > 0
            && self.step0 > 0.0
            && self.backtrack > 0.0
            && self.backtrack < 1.0
            && self.armijo > 0.0
            && self.armijo < 1.0
            && self.residual_tol > 0.0;
        if !ok {
            return Err(Error::InvalidParameter(format!("invalid solver config {self:?}")));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EigenPair {
    pub s: f64,
    pub lambda: f64,
    pub mu: f64,
    pub field: NodalField,
    pub residual_norm: f64,
    pub iterations: usize,
    pub converged: bool,
    /// Set when `lambda` is only an upper bound of the eigenvalue.
    pub upper_bound: bool,
    /// Quotient value at every accepted iterate.
    pub history: Vec<f64>,
}

/// Direction `d` with `J(u − η d)` decreasing: the coefficient gradient of
/// `J` preconditioned by the tangent Gram matrix `Σ w g'(r) ∂v ∂vᵀ`.
struct Preconditioner {
    chol: nalgebra::Cholesky<f64, nalgebra::Dyn>,
    scale: f64,
}

impl Preconditioner {
    fn at(ctx: &FunctionalContext, u: &NodalField, tau_h: f64, d_h: f64) -> Result<Self> {
        let samples = ctx.energy_samples(u)?;
        let young = ctx.energy_young();
        let inv = 1.0 / tau_h;
        let c_ref = young.evaluate(samples.max_magnitude() * inv).g_prime;
        let (lo, hi) = (FACTOR_RANGE.0 * c_ref, FACTOR_RANGE.1 * c_ref);
        let factors: Vec<f64> = samples
            .magnitudes()
            .map(|m| young.evaluate(m * inv).g_prime.clamp(lo, hi))
            .collect();
        let k = ctx.energy_cloud().gram_weighted(&factors);
        let chol = k
            .cholesky()
            .ok_or_else(|| Error::LinearAlgebra("preconditioner is not positive definite".into()))?;
        Ok(Self { chol, scale: tau_h * d_h })
    }

    fn apply(&self, grad: &[f64]) -> Vec<f64> {
        let x = self.chol.solve(&DVector::from_column_slice(grad));
        x.iter().map(|v| self.scale * v).collect()
    }
}

fn normalize(ctx: &FunctionalContext, u: &NodalField) -> Result<NodalField> {
    let i = ctx.i_value(u)?;
    if !(i > 0.0) {
        return Err(Error::ZeroField);
    }
    Ok(u.scaled(1.0 / i))
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// State of one iterate: pairings, quotient and coefficient gradient of `J`.
struct Point {
    j: f64,
    grad: Vec<f64>,
    tau_h: f64,
    d_h: f64,
    residual: f64,
    mu: f64,
}

fn evaluate_point(ctx: &FunctionalContext, u: &NodalField) -> Result<Point> {
    let pi = ctx.pairing_i(u)?;
    let ph = ctx.pairing_h(u)?;
    let j = ph.tau / pi.tau;
    let res = residual_from(&pi, &ph, j);
    let grad = ph
        .vector
        .iter()
        .zip(&pi.vector)
        .map(|(h, i)| (h / ph.denom - j * i / pi.denom) / pi.tau)
        .collect();
    Ok(Point { j, grad, tau_h: ph.tau, d_h: ph.denom, residual: res.norm, mu: res.mu })
}

/// Minimizes `J_s` over the unit sphere of `‖·‖_G` starting from `init`.
///
/// Each step moves along `d = τ_H D_H K⁻¹ ∇J` where `K` is the tangent Gram
/// matrix of the energy samples, which approximates the Hessian of `H_s` up
/// to the factor `τ_H D_H`. For `G = t²/2` the unit step is plain inverse
/// iteration.
/// The step is reduced until the Armijo condition on `J` holds.
pub fn minimize_first(ctx: &FunctionalContext, init: &NodalField, cfg: &SolverConfig) -> Result<EigenPair> {
    cfg.validate()?;
    if init.is_zero() {
        return Err(Error::ZeroField);
    }
    let mut u = normalize(ctx, init)?;
    let mut history = Vec::new();
    let mut point = evaluate_point(ctx, &u)?;
    history.push(point.j);
    let mut converged = point.residual <= cfg.residual_tol;
    let mut iterations = 0;
    while !converged && iterations < cfg.max_iters {
        let pre = Preconditioner::at(ctx, &u, point.tau_h, point.d_h)?;
        let d = NodalField { mesh: u.mesh, coefficients: pre.apply(&point.grad) };
        let slope = dot(&point.grad, &d.coefficients);
        if !(slope > 0.0) {
            break;
        }
        let mut eta = cfg.step0;
        let mut accepted = None;
        while eta >= MIN_STEP {
            let trial = u.axpy(-eta, &d);
            if !trial.is_zero() {
                if let Ok(jt) = ctx.j_value(&trial) {
                    if jt <= point.j - cfg.armijo * eta * slope {
                        accepted = Some(trial);
                        break;
                    }
                }
            }
            eta *= cfg.backtrack;
        }
        let Some(trial) = accepted else { break };
        u = normalize(ctx, &trial)?;
        point = evaluate_point(ctx, &u)?;
        iterations += 1;
        history.push(point.j);
        converged = point.residual <= cfg.residual_tol;
    }
    Ok(EigenPair {
        s: ctx.s(),
        lambda: point.j,
        mu: point.mu,
        field: u,
        residual_norm: point.residual,
        iterations,
        converged,
        upper_bound: false,
        history,
    })
}

/// Default starting field `(x − a)(b − x)`.
pub fn default_init(mesh: Mesh1D) -> NodalField {
    NodalField::interpolate(|x| (x - mesh.a) * (mesh.b - x), mesh).expect("finite polynomial")
}

/// Minimizes the loop value `max_θ J(cos θ a + sin θ b)` over pairs `(a, b)`.
///
/// Starts from `a = first.field` and `b = a · cos(π (x − x_a)/(x_b − x_a))`,
/// which changes sign at the midpoint. The maximum is smoothed by a soft-max
/// whose temperature decreases geometrically; each round takes one
/// preconditioned step in `a` and one in `b`, then restores the mass
/// orthogonality of `b` to `a`. The smallest hard loop maximum seen is
/// returned.
pub fn second_upper_bound(ctx: &FunctionalContext, first: &EigenPair, cfg: &SolverConfig) -> Result<EigenPair> {
    cfg.validate()?;
    let mesh = ctx.mesh();
    let mass = ctx.local_cloud().gram();
    let mut a = normalize(ctx, &first.field)?;
    let b0 = NodalField::from_coefficients(
        mesh,
        a.coefficients
            .iter()
            .enumerate()
            .map(|(i, &v)| {
                let x = mesh.node(i + 1);
                v * (std::f64::consts::PI * (x - mesh.a) / (mesh.b - mesh.a)).cos()
            })
            .collect(),
    )?;
    let mut b = normalize(ctx, &orthogonalize(&mass, &a, &b0)?)?;

    let p0 = evaluate_point(ctx, &a)?;
    let pre = Preconditioner::at(ctx, &a, p0.tau_h, p0.d_h)?;
    let thetas: Vec<f64> = (0..LOOP_POINTS)
        .map(|k| std::f64::consts::PI * k as f64 / LOOP_POINTS as f64)
        .collect();

    let (mut best, _) = loop_values(ctx, &a, &b, &thetas)?;
    let mut best_pair = (a.clone(), b.clone());
    let mut history = vec![best];
    let mut temperature = 0.05 * best;
    let t_min = 1e-6 * best;
    let mut eta_a = cfg.step0;
    let mut eta_b = cfg.step0;
    let mut iterations = 0;
    while iterations < cfg.max_iters && temperature > t_min {
        iterations += 1;
        let mut moved = false;
        for which in [0usize, 1] {
            let (f, grad) = softmax_and_gradient(ctx, &a, &b, &thetas, temperature, which)?;
            let d = NodalField { mesh, coefficients: pre.apply(&grad) };
            let slope = dot(&grad, &d.coefficients);
            if !(slope > 0.0) {
                continue;
            }
            let eta = if which == 0 { &mut eta_a } else { &mut eta_b };
            *eta = (*eta * 2.0).min(cfg.step0);
            while *eta >= MIN_STEP {
                let (ta, tb) = if which == 0 {
                    (a.axpy(-*eta, &d), b.clone())
                } else {
                    (a.clone(), b.axpy(-*eta, &d))
                };
                let candidate = normalize(ctx, &ta)
                    .and_then(|na| Ok((orthogonalize(&mass, &na, &tb)?, na)))
                    .and_then(|(ob, na)| Ok((na, normalize(ctx, &ob)?)));
                if let Ok((na, nb)) = candidate {
                    let ft = softmax(&loop_values(ctx, &na, &nb, &thetas)?.1, temperature);
                    if ft <= f - cfg.armijo * *eta * slope {
                        a = na;
                        b = nb;
                        moved = true;
                        break;
                    }
                }
                *eta *= cfg.backtrack;
            }
            if *eta < MIN_STEP {
                *eta = MIN_STEP;
            }
        }
        let (hard, _) = loop_values(ctx, &a, &b, &thetas)?;
        if hard < best {
            best = hard;
            best_pair = (a.clone(), b.clone());
        }
        history.push(hard);
        temperature *= if moved { 0.9 } else { 0.5 };
    }
    let converged = temperature <= t_min;
    let (a, b) = best_pair;
    let worst = worst_point(ctx, &a, &b, &thetas)?;
    let point = evaluate_point(ctx, &worst)?;
    if best < first.lambda - 1e-8 {
        return Err(Error::LinearAlgebra(format!(
            "loop value {best} fell below the first eigenvalue {}",
            first.lambda
        )));
    }
    Ok(EigenPair {
        s: ctx.s(),
        lambda: best,
        mu: point.mu,
        field: worst,
        residual_norm: point.residual,
        iterations,
        converged,
        upper_bound: true,
        history,
    })
}

/// `b − (aᵀMb / aᵀMa) a`.
fn orthogonalize(mass: &DMatrix<f64>, a: &NodalField, b: &NodalField) -> Result<NodalField> {
    let av = DVector::from_column_slice(&a.coefficients);
    let bv = DVector::from_column_slice(&b.coefficients);
    let ma = mass * &av;
    let c = ma.dot(&bv) / ma.dot(&av);
    let out = b.axpy(-c, a);
    if out.is_zero() {
        return Err(Error::ZeroField);
    }
    Ok(out)
}

fn loop_point(a: &NodalField, b: &NodalField, theta: f64) -> NodalField {
    a.scaled(theta.cos()).axpy(theta.sin(), b)
}

fn loop_values(ctx: &FunctionalContext, a: &NodalField, b: &NodalField, thetas: &[f64]) -> Result<(f64, Vec<f64>)> {
    let values = thetas
        .iter()
        .map(|&t| ctx.j_value(&loop_point(a, b, t)))
        .collect::<Result<Vec<f64>>>()?;
    Ok((values.iter().copied().fold(f64::NEG_INFINITY, f64::max), values))
}

fn worst_point(ctx: &FunctionalContext, a: &NodalField, b: &NodalField, thetas: &[f64]) -> Result<NodalField> {
    let (_, values) = loop_values(ctx, a, b, thetas)?;
    let k = values
        .iter()
        .enumerate()
        .max_by(|x, y| x.1.total_cmp(y.1))
        .map(|(k, _)| k)
        .unwrap_or(0);
    normalize(ctx, &loop_point(a, b, thetas[k]))
}

fn softmax_weights(values: &[f64], temperature: f64) -> (f64, Vec<f64>) {
    let top = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let e: Vec<f64> = values.iter().map(|v| ((v - top) / temperature).exp()).collect();
    let z: f64 = e.iter().sum();
    (top + temperature * z.ln(), e.into_iter().map(|x| x / z).collect())
}

fn softmax(values: &[f64], temperature: f64) -> f64 {
    softmax_weights(values, temperature).0
}

/// Soft-max of the loop and its gradient in `a` (`which = 0`) or `b`.
fn softmax_and_gradient(
    ctx: &FunctionalContext,
    a: &NodalField,
    b: &NodalField,
    thetas: &[f64],
    temperature: f64,
    which: usize,
) -> Result<(f64, Vec<f64>)> {
    let (_, values) = loop_values(ctx, a, b, thetas)?;
    let (f, weights) = softmax_weights(&values, temperature);
    let mut grad = vec![0.0; a.coefficients.len()];
    for (&t, &w) in thetas.iter().zip(&weights) {
        if w < 1e-14 {
            continue;
        }
        let coef = if which == 0 { t.cos() } else { t.sin() };
        if coef == 0.0 {
            continue;
        }
        let p = evaluate_point(ctx, &loop_point(a, b, t))?;
        for (g, v) in grad.iter_mut().zip(&p.grad) {
            *g += w * coef * v;
        }
    }
    Ok((f, grad))
}

/// Dense solution of the quadratic problem `G = t²/2`.
#[derive(Debug, Clone, Serialize)]
pub struct P2Oracle {
    pub lambda1: f64,
    pub lambda2: f64,
    /// Eigenvectors for `lambda1` and `lambda2`, normalized to `‖·‖_G = 1`
    /// and positive in the first nonzero coefficient.
    pub eigenvectors: Vec<NodalField>,
    #[serde(skip)]
    pub stiffness: DMatrix<f64>,
    #[serde(skip)]
    pub mass: DMatrix<f64>,
}

/// For `G = t²/2`, `H² = uᵀAu / 2` and `I² = uᵀBu / 2` with the Gram matrices
/// of the energy and local clouds, so `J² = uᵀAu / uᵀBu` and the eigenvalues
/// are the square roots of the generalized eigenvalues of `(A, B)`.
pub fn p2_matrix_oracle(ctx: &FunctionalContext) -> Result<P2Oracle> {
    if !(ctx.young().is_power(2.0) && ctx.energy_young().is_power(2.0)) {
        return Err(Error::WrongFamily);
    }
    let a = ctx.energy_cloud().gram();
    let b = ctx.local_cloud().gram();
    let chol = b
        .clone()
        .cholesky()
        .ok_or_else(|| Error::LinearAlgebra("mass matrix is not positive definite".into()))?;
    let l = chol.l();
    let linv = l
        .clone()
        .try_inverse()
        .ok_or_else(|| Error::LinearAlgebra("singular mass factor".into()))?;
    let c = &linv * &a * linv.transpose();
    let c = 0.5 * (&c + c.transpose());
    let eig = c.symmetric_eigen();
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    if order.len() < 2 {
        return Err(Error::LinearAlgebra("need at least two degrees of freedom".into()));
    }
    let mut vectors = Vec::new();
    for &k in &order[..2] {
        let y = eig.eigenvectors.column(k).into_owned();
        let x = linv.transpose() * y;
        let norm = (0.5 * x.dot(&(&b * &x))).sqrt();
        let sign = x.iter().find(|v| v.abs() > 1e-12 * x.amax()).map_or(1.0, |v| v.signum());
        let coeffs = x.iter().map(|v| sign * v / norm).collect();
        vectors.push(NodalField::from_coefficients(ctx.mesh(), coeffs)?);
    }
    Ok(P2Oracle {
        lambda1: eig.eigenvalues[order[0]].max(0.0).sqrt(),
        lambda2: eig.eigenvalues[order[1]].max(0.0).sqrt(),
        eigenvectors: vectors,
        stiffness: a,
        mass: b,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepPoint {
    pub s: f64,
    pub lambda: f64,
    pub mu: f64,
    pub residual: f64,
    pub iterations: usize,
    pub converged: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepResult {
    /// Converged points in increasing `s`.
    pub points: Vec<SweepPoint>,
    /// Orders whose solve failed or did not converge, with the reason.
    pub failures: Vec<(f64, String)>,
    pub extrapolated_limit: Option<f64>,
    /// Fitted exponent of `λ(s) = L + c (1 − s)^α`.
    pub alpha: Option<f64>,
    pub local_limit: f64,
    /// `|extrapolated − local|`.
    pub gap: Option<f64>,
    pub relative_gap: Option<f64>,
}

impl SweepResult {
    pub fn s_values(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.s).collect()
    }

    pub fn lambdas(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.lambda).collect()
    }

    /// `s,lambda,mu,residual,iterations`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("s,lambda,mu,residual,iterations\n");
        for p in &self.points {
            out.push_str(&format!("{},{},{},{},{}\n", p.s, p.lambda, p.mu, p.residual, p.iterations));
        }
        out
    }
}

fn validate_s_list(s_list: &[f64]) -> Result<()> {
    if s_list.is_empty() {
        return Err(Error::InvalidParameter("empty s list".into()));
    }
    for &s in s_list {
        if !(s > 0.0 && s < 1.0) {
            return Err(Error::OrderOutOfRange(s));
        }
    }
    if s_list.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidParameter("s list must be strictly increasing".into()));
    }
    Ok(())
}

/// Eigenvalue of the local limit problem `min ‖u'‖_Ḡ / ‖u‖_G`.
pub fn local_limit(
    young: &YoungFunction,
    mesh: Mesh1D,
    spec: QuadratureSpec,
    tol: f64,
    cfg: &SolverConfig,
) -> Result<EigenPair> {
    let bar = bar_transform(young, 1, BAR_QUAD_TOL)?;
    let ctx = FunctionalContext::for_limit_problem(young.clone(), bar, mesh, spec, tol)?;
    minimize_first(&ctx, &default_init(mesh), cfg)
}

/// Solves the first eigenproblem along `s_list`, warm-starting each order
/// from the previous eigenfunction, and compares the extrapolated limit with
/// the local limit problem.
pub fn stability_sweep(
    young: &YoungFunction,
    s_list: &[f64],
    mesh: Mesh1D,
    spec: QuadratureSpec,
    tol: f64,
    cfg: &SolverConfig,
) -> Result<SweepResult> {
    validate_s_list(s_list)?;
    for &s in s_list {
        young.flags().admits(s).map_err(|reason| Error::NotAdmitted { s, reason })?;
    }
    let mut points = Vec::new();
    let mut failures = Vec::new();
    let mut init = default_init(mesh);
    for &s in s_list {
        let ctx = FunctionalContext::new(young.clone(), s, mesh, spec, tol)?;
        match minimize_first(&ctx, &init, cfg) {
            Ok(pair) if pair.converged => {
                init = pair.field.clone();
                points.push(SweepPoint {
                    s,
                    lambda: pair.lambda,
                    mu: pair.mu,
                    residual: pair.residual_norm,
                    iterations: pair.iterations,
                    converged: true,
                });
            }
            Ok(pair) => failures.push((
                s,
                format!("no convergence after {} iterations, residual {:e}", pair.iterations, pair.residual_norm),
            )),
            Err(e) => failures.push((s, e.to_string())),
        }
    }
    let local = local_limit(young, mesh, spec, tol, cfg)?;
    let fit = extrapolate(&points.iter().map(|p| (p.s, p.lambda)).collect::<Vec<_>>());
    let (extrapolated_limit, alpha) = match fit {
        Some((l, a)) => (Some(l), Some(a)),
        None => (None, None),
    };
    let gap = extrapolated_limit.map(|l| (l - local.lambda).abs());
    Ok(SweepResult {
        points,
        failures,
        extrapolated_limit,
        alpha,
        local_limit: local.lambda,
        gap,
        relative_gap: gap.map(|g| g / local.lambda),
    })
}

/// Fits `λ = L + c (1 − s)^α` through the last three points (α by bisection)
/// or a line in `1 − s` through the last two; returns `(L, α)`.
pub fn extrapolate(points: &[(f64, f64)]) -> Option<(f64, f64)> {
    let n = points.len();
    if n < 2 {
        return None;
    }
    let linear = || {
        let (s1, l1) = points[n - 2];
        let (s2, l2) = points[n - 1];
        let (e1, e2) = (1.0 - s1, 1.0 - s2);
        let c = (l1 - l2) / (e1 - e2);
        Some((l2 - c * e2, 1.0))
    };
    if n < 3 {
        return linear();
    }
    let (e, l): (Vec<f64>, Vec<f64>) = points[n - 3..].iter().map(|&(s, l)| (1.0 - s, l)).unzip();
    let d12 = l[0] - l[1];
    let d23 = l[1] - l[2];
    if d23 == 0.0 || d12 / d23 <= 0.0 {
        return linear();
    }
    let target = d12 / d23;
    let ratio = |a: f64| (e[0].powf(a) - e[1].powf(a)) / (e[1].powf(a) - e[2].powf(a));
    let (mut lo, mut hi) = (1e-3, 8.0);
    let (flo, fhi) = (ratio(lo) - target, ratio(hi) - target);
    if flo * fhi > 0.0 {
        return linear();
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let fm = ratio(mid) - target;
        if fm * flo > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-14 {
            break;
        }
    }
    let alpha = 0.5 * (lo + hi);
    let c = d23 / (e[1].powf(alpha) - e[2].powf(alpha));
    Some((l[2] - c * e[2].powf(alpha), alpha))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BbmRow {
    pub s: f64,
    pub seminorm: f64,
    pub modular: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BbmTable {
    pub rows: Vec<BbmRow>,
    /// `‖u'‖_Ḡ`.
    pub target_seminorm: f64,
    /// `∫ Ḡ(|u'|)`.
    pub target_modular: f64,
    /// Relative seminorm gap at the largest `s`.
    pub gap: f64,
}

impl BbmTable {
    /// `s,seminorm,modular,target_seminorm,target_modular`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("s,seminorm,modular,target_seminorm,target_modular\n");
        for r in &self.rows {
            out.push_str(&format!(
                "{},{},{},{},{}\n",
                r.s, r.seminorm, r.modular, self.target_seminorm, self.target_modular
            ));
        }
        out
    }
}

/// Fractional seminorms and modulars of a fixed field along `s_list` next to
/// their local limits under `Ḡ`.
pub fn bbm_check(
    young: &YoungFunction,
    u: &NodalField,
    s_list: &[f64],
    spec: &QuadratureSpec,
    tol: f64,
) -> Result<BbmTable> {
    validate_s_list(s_list)?;
    let bar = bar_transform(young, 1, BAR_QUAD_TOL)?;
    let grad = SampleCloud::gradient(u.mesh).apply(u);
    let (target_seminorm, target_modular) = if grad.is_zero() {
        (0.0, 0.0)
    } else {
        (luxemburg(&grad, &bar, tol)?.tau, modular_value(&grad, &bar, 1.0)?)
    };
    let mut rows = Vec::new();
    for &s in s_list {
        let cloud = SampleCloud::fractional(u.mesh, s, spec, young.exponents().p_minus)?;
        let samples = cloud.apply(u);
        let (seminorm, modular) = if samples.is_zero() {
            (0.0, 0.0)
        } else {
            (luxemburg(&samples, young, tol)?.tau, modular_value(&samples, young, 1.0)?)
        };
        rows.push(BbmRow { s, seminorm, modular });
    }
    let last = rows.last().expect("non-empty s list");
    let gap = if target_seminorm > 0.0 {
        (last.seminorm - target_seminorm).abs() / target_seminorm
    } else {
        last.seminorm
    };
    Ok(BbmTable { rows, target_seminorm, target_modular, gap })
}
