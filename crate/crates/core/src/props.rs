//! Invariant suite: seeded measurements of the structural identities of the
//! functionals and the solvers, compared against fixed thresholds.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::discretization::{modular_value, Mesh1D, NodalField, QuadratureSpec};
use crate::eigensolver::{default_init, minimize_first, p2_matrix_oracle, second_upper_bound, SolverConfig};
use crate::error::Result;
use crate::functionals::FunctionalContext;
use crate::norms::luxemburg;
use crate::young::{bar_transform, check_inequalities, log_grid, YoungFunction};

pub const FAMILIES: [&str; 5] = ["power:1.5", "power:2", "power:3", "powerlog:2", "powersum:2,1,4,1"];
const FD_STEP: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PropCheck {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PropReport {
    pub checks: Vec<PropCheck>,
}

impl PropReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    fn push(&mut self, name: impl Into<String>, passed: bool, detail: impl Into<String>) {
        self.checks.push(PropCheck { name: name.into(), passed, detail: detail.into() });
    }
}

/// Smooth random field: a few sine modes plus a small nodal perturbation.
pub fn random_field(mesh: Mesh1D, rng: &mut ChaCha8Rng) -> NodalField {
    let modes: Vec<f64> = (0..4).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let len = mesh.b - mesh.a;
    let coefficients = (1..mesh.n_elements)
        .map(|i| {
            let x = (mesh.node(i) - mesh.a) / len;
            let smooth: f64 = modes
                .iter()
                .enumerate()
                .map(|(k, a)| a * (std::f64::consts::PI * (k + 1) as f64 * x).sin())
                .sum();
            smooth + 0.05 * rng.gen_range(-1.0..1.0)
        })
        .collect();
    NodalField { mesh, coefficients }
}

/// Worst deviations observed over seeded fields for one context.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Default)]
pub struct FieldStats {
    pub fields: usize,
    /// `|dI(u)[v] − central difference| / ‖v‖_G`.
    pub fd_i: f64,
    /// `|dH(u)[v] − central difference| / H(v)`.
    pub fd_h: f64,
    pub euler_i: f64,
    pub euler_h: f64,
    /// `|Φ(u/‖u‖) − 1|` over every norm computed.
    pub unit_modular: f64,
    /// `|J(cu)/J(u) − 1|` for `c ∈ {1e-3, 7, 1e3}`.
    pub homogeneity: f64,
    /// Largest excursion of `D_I`, `D_H` outside `[p⁻, p⁺]`.
    pub denominator_excursion: f64,
    /// Smallest normalized monotonicity product.
    pub monotonicity_min: f64,
    /// `|residual(cu) − residual(u)| / residual(u)`.
    pub residual_scale: f64,
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}

/// Measures the identities of [`FieldStats`] on `count` seeded field pairs.
pub fn field_stats(ctx: &FunctionalContext, count: usize, seed: u64) -> Result<FieldStats> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mesh = ctx.mesh();
    let e = ctx.young().exponents();
    let eh = ctx.energy_young().exponents();
    let mut st = FieldStats { fields: count, monotonicity_min: f64::INFINITY, ..Default::default() };
    for _ in 0..count {
        let u = random_field(mesh, &mut rng);
        let v = random_field(mesh, &mut rng);
        if u.is_zero() || v.is_zero() {
            continue;
        }
        let pi = ctx.pairing_i(&u)?;
        let ph = ctx.pairing_h(&u)?;
        let (iu, hu) = (pi.tau, ph.tau);
        let di: Vec<f64> = pi.vector.iter().map(|x| x / pi.denom).collect();
        let dh: Vec<f64> = ph.vector.iter().map(|x| x / ph.denom).collect();

        for (samples, young, tau) in [
            (ctx.local_samples(&u)?, ctx.young(), iu),
            (ctx.energy_samples(&u)?, ctx.energy_young(), hu),
        ] {
            st.unit_modular = st.unit_modular.max((modular_value(&samples, young, tau)? - 1.0).abs());
            let r = luxemburg(&samples, young, ctx.tol())?;
            st.unit_modular = st.unit_modular.max(r.residual);
        }
        st.euler_i = st.euler_i.max(rel(u.dot(&di), iu));
        st.euler_h = st.euler_h.max(rel(u.dot(&dh), hu));
        st.denominator_excursion = st
            .denominator_excursion
            .max(e.p_minus - pi.denom)
            .max(pi.denom - e.p_plus)
            .max(eh.p_minus - ph.denom)
            .max(ph.denom - eh.p_plus);

        let fd_i = (ctx.i_value(&u.axpy(FD_STEP, &v))? - ctx.i_value(&u.axpy(-FD_STEP, &v))?) / (2.0 * FD_STEP);
        let fd_h = (ctx.h_value(&u.axpy(FD_STEP, &v))? - ctx.h_value(&u.axpy(-FD_STEP, &v))?) / (2.0 * FD_STEP);
        st.fd_i = st.fd_i.max((v.dot(&di) - fd_i).abs() / ctx.i_value(&v)?);
        st.fd_h = st.fd_h.max((v.dot(&dh) - fd_h).abs() / ctx.h_value(&v)?);

        let j = hu / iu;
        for c in [1e-3, 7.0, 1e3] {
            st.homogeneity = st.homogeneity.max(rel(ctx.j_value(&u.scaled(c))?, j));
        }
        let r0 = ctx.el_residual(&u, j)?.norm;
        let r1 = ctx.el_residual(&u.scaled(-37.0), j)?.norm;
        st.residual_scale = st.residual_scale.max(rel(r1, r0));

        let dhv = ctx.frechet_dh(&v)?;
        let hv = ctx.h_value(&v)?;
        let diff: Vec<f64> = dh.iter().zip(&dhv).map(|(a, b)| a - b).collect();
        let w = u.scaled(1.0 / hu).axpy(-1.0 / hv, &v);
        let product = w.dot(&diff);
        st.monotonicity_min = st.monotonicity_min.min(product);
    }
    Ok(st)
}

/// Thresholds applied by [`run_suite`].
pub mod thresholds {
    pub const FD: f64 = 1e-5;
    pub const EULER: f64 = 1e-8;
    pub const UNIT_MODULAR: f64 = 1e-12;
    pub const HOMOGENEITY: f64 = 1e-10;
    pub const DENOMINATOR: f64 = 1e-9;
    pub const MONOTONICITY: f64 = -1e-10;
    pub const RESIDUAL_SCALE: f64 = 1e-9;
    pub const ORACLE: f64 = 1e-6;
    pub const BAR: f64 = 1e-6;
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SuiteOptions {
    pub n: usize,
    pub seed: u64,
    pub inequality_samples: usize,
    pub fields: usize,
}

impl Default for SuiteOptions {
    fn default() -> Self {
        Self { n: 24, seed: 0, inequality_samples: 20_000, fields: 5 }
    }
}

/// Runs every invariant on small meshes.
pub fn run_suite(opts: &SuiteOptions) -> Result<PropReport> {
    use thresholds::*;
    let mut report = PropReport { checks: Vec::new() };
    let spec = QuadratureSpec::default();
    let mesh = Mesh1D::new(0.0, 1.0, opts.n)?;

    for fam in FAMILIES {
        let y: YoungFunction = fam.parse()?;
        let r = check_inequalities(&y, opts.inequality_samples, opts.seed)?;
        let bad: Vec<String> = r
            .checks
            .iter()
            .filter(|c| c.violations > 0)
            .map(|c| format!("{}: {} violations", c.name, c.violations))
            .collect();
        report.push(format!("inequalities {fam}"), bad.is_empty(), bad.join("; "));
    }

    for p in [1.5, 2.0, 3.0, 4.0] {
        let y = YoungFunction::power(p)?;
        let bar = bar_transform(&y, 1, 1e-10)?;
        let worst = log_grid(1e-3, 1e3, 50)
            .into_iter()
            .map(|t| rel(bar.big_g(t), 2.0 / p * y.big_g(t)))
            .fold(0.0, f64::max);
        report.push(format!("bar transform power:{p}"), worst <= BAR, format!("max rel err {worst:.3e}"));
    }

    for fam in FAMILIES {
        for s in [0.5, 1.0] {
            let y: YoungFunction = fam.parse()?;
            if y.flags().admits(s).is_err() {
                continue;
            }
            let ctx = FunctionalContext::new(y, s, mesh, spec, 1e-13)?;
            let st = field_stats(&ctx, opts.fields, opts.seed)?;
            let label = format!("{fam} s={s}");
            report.push(
                format!("derivatives {label}"),
                st.fd_i <= FD && st.fd_h <= FD && st.euler_i <= EULER && st.euler_h <= EULER,
                format!("fd {:.2e}/{:.2e} euler {:.2e}/{:.2e}", st.fd_i, st.fd_h, st.euler_i, st.euler_h),
            );
            report.push(
                format!("homogeneity {label}"),
                st.homogeneity <= HOMOGENEITY && st.unit_modular <= UNIT_MODULAR && st.residual_scale <= RESIDUAL_SCALE,
                format!(
                    "J {:.2e} unit modular {:.2e} residual {:.2e}",
                    st.homogeneity, st.unit_modular, st.residual_scale
                ),
            );
            report.push(
                format!("denominators {label}"),
                st.denominator_excursion <= DENOMINATOR,
                format!("excursion {:.2e}", st.denominator_excursion),
            );
            report.push(
                format!("monotonicity {label}"),
                st.monotonicity_min >= MONOTONICITY,
                format!("min product {:.3e}", st.monotonicity_min),
            );
        }
    }

    let cfg = SolverConfig { seed: opts.seed, ..Default::default() };
    let y = YoungFunction::power(2.0)?;
    let mut first_s1 = None;
    for s in [0.25, 0.5, 0.75, 1.0] {
        let ctx = FunctionalContext::new(y.clone(), s, mesh, spec, 1e-12)?;
        let pair = minimize_first(&ctx, &default_init(mesh), &cfg)?;
        let oracle = p2_matrix_oracle(&ctx)?;
        let err = rel(pair.lambda, oracle.lambda1);
        report.push(
            format!("oracle agreement s={s}"),
            pair.converged && err <= ORACLE,
            format!("solver {:.12} oracle {:.12} rel {err:.2e}", pair.lambda, oracle.lambda1),
        );
        let descent = pair.history.windows(2).all(|w| w[1] <= w[0]);
        let unit = (ctx.i_value(&pair.field)? - 1.0).abs();
        report.push(
            format!("descent and normalization s={s}"),
            descent && unit <= 1e-10 && pair.lambda > 0.0,
            format!("iterations {} |I - 1| {unit:.2e}", pair.iterations),
        );
        if s == 1.0 {
            first_s1 = Some((ctx, pair));
        }
    }
    if let Some((ctx, pair)) = first_s1 {
        let second = second_upper_bound(&ctx, &pair, &cfg)?;
        report.push(
            "second bound dominance",
            second.lambda >= pair.lambda - 1e-8,
            format!("lambda1 {:.9} bound {:.9}", pair.lambda, second.lambda),
        );
    }
    Ok(report)
}
