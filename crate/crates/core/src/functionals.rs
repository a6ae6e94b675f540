//! The 1-homogeneous functionals `I(u) = ‖u‖_G`, `H_s(u) = [u]_{s,G}`, their
//! quotient `J_s = H_s / I`, derivatives and the Euler-Lagrange residual.

use serde::Serialize;

use crate::discretization::{Mesh1D, ModularSamples, NodalField, QuadratureSpec, SampleCloud};
use crate::error::{Error, Result};
use crate::norms::luxemburg;
use crate::young::YoungFunction;

/// Cached geometry and Young functions of one quotient `J_s`.
#[derive(Debug, Clone)]
pub struct FunctionalContext {
    young: YoungFunction,
    h_young: Option<YoungFunction>,
    s: f64,
    spec: QuadratureSpec,
    tol: f64,
    local: SampleCloud,
    energy: SampleCloud,
    verbose: bool,
}

/// Modular pairing of `u` against the hat basis.
///
/// `vector[i] = Σ w g(|v|/τ) sgn(v) ∂v/∂uᵢ` and `denom = Σ w g(|v|/τ) |v|/τ`,
/// so that `vector · u = τ · denom`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PairingResult {
    pub vector: Vec<f64>,
    pub denom: f64,
    pub tau: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ElResidual {
    pub vector: Vec<f64>,
    pub norm: f64,
    pub mu: f64,
}

/// One flat diagnostics record.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Diagnostics {
    pub s: f64,
    pub j: f64,
    pub d_i: f64,
    pub d_h: f64,
    pub mu: f64,
    pub residual: f64,
}

impl FunctionalContext {
    /// Context for `J_s` with `G` in numerator and denominator.
    pub fn new(young: YoungFunction, s: f64, mesh: Mesh1D, spec: QuadratureSpec, tol: f64) -> Result<Self> {
        if !(s > 0.0 && s <= 1.0) {
            return Err(Error::OrderOutOfRange(s));
        }
        young
            .flags()
            .admits(s)
            .map_err(|reason| Error::NotAdmitted { s, reason })?;
        Self::build(young, None, s, mesh, spec, tol)
    }

    /// Context of the local limit problem `‖u'‖_{h_young} / ‖u‖_G` at `s = 1`.
    ///
    /// Only the fractional problems are subject to the structural admission
    /// test here: the limit function is reached through them.
    pub fn for_limit_problem(
        young: YoungFunction,
        h_young: YoungFunction,
        mesh: Mesh1D,
        spec: QuadratureSpec,
        tol: f64,
    ) -> Result<Self> {
        let f = young.flags();
        if !(f.sqrt_convex || f.gprime_decreasing) {
            return Err(Error::NotAdmitted {
                s: 1.0,
                reason: "G(sqrt t) is not convex and g' is not decreasing".into(),
            });
        }
        Self::build(young, Some(h_young), 1.0, mesh, spec, tol)
    }

    fn build(
        young: YoungFunction,
        h_young: Option<YoungFunction>,
        s: f64,
        mesh: Mesh1D,
        spec: QuadratureSpec,
        tol: f64,
    ) -> Result<Self> {
        if !(tol > 0.0) {
            return Err(Error::InvalidParameter(format!("tolerance must be positive, got {tol}")));
        }
        let local = SampleCloud::local(mesh, &spec)?;
        let energy = if s == 1.0 {
            SampleCloud::gradient(mesh)
        } else {
            let p_minus = young.exponents().p_minus;
            SampleCloud::fractional(mesh, s, &spec, p_minus)?
        };
        Ok(Self { young, h_young, s, spec, tol, local, energy, verbose: false })
    }

    /// Emit a JSON [`Diagnostics`] line on stderr for every residual evaluation.
    pub fn set_verbose(&mut self, verbose: bool) {
        self.verbose = verbose;
    }

    pub fn young(&self) -> &YoungFunction {
        &self.young
    }

    /// Young function of the numerator.
    pub fn energy_young(&self) -> &YoungFunction {
        self.h_young.as_ref().unwrap_or(&self.young)
    }

    pub fn s(&self) -> f64 {
        self.s
    }

    pub fn mesh(&self) -> Mesh1D {
        self.local.mesh()
    }

    pub fn spec(&self) -> &QuadratureSpec {
        &self.spec
    }

    pub fn tol(&self) -> f64 {
        self.tol
    }

    pub fn local_cloud(&self) -> &SampleCloud {
        &self.local
    }

    pub fn energy_cloud(&self) -> &SampleCloud {
        &self.energy
    }

    pub fn local_samples(&self, u: &NodalField) -> Result<ModularSamples> {
        self.check_mesh(u)?;
        Ok(self.local.apply(u))
    }

    pub fn energy_samples(&self, u: &NodalField) -> Result<ModularSamples> {
        self.check_mesh(u)?;
        Ok(self.energy.apply(u))
    }

    fn check_mesh(&self, u: &NodalField) -> Result<()> {
        if u.mesh != self.mesh() {
            return Err(Error::InvalidParameter("field lives on a different mesh".into()));
        }
        Ok(())
    }

    pub fn i_value(&self, u: &NodalField) -> Result<f64> {
        Ok(luxemburg(&self.local_samples(u)?, &self.young, self.tol)?.tau)
    }

    pub fn h_value(&self, u: &NodalField) -> Result<f64> {
        Ok(luxemburg(&self.energy_samples(u)?, self.energy_young(), self.tol)?.tau)
    }

    pub fn j_value(&self, u: &NodalField) -> Result<f64> {
        if u.is_zero() {
            return Err(Error::ZeroField);
        }
        Ok(self.h_value(u)? / self.i_value(u)?)
    }

    pub fn pairing_i(&self, u: &NodalField) -> Result<PairingResult> {
        pairing(&self.local, &self.young, u, self.tol)
    }

    pub fn pairing_h(&self, u: &NodalField) -> Result<PairingResult> {
        pairing(&self.energy, self.energy_young(), u, self.tol)
    }

    /// Gradient of `I` with respect to the nodal coefficients.
    pub fn frechet_di(&self, u: &NodalField) -> Result<Vec<f64>> {
        Ok(derivative(self.pairing_i(u)?))
    }

    /// Gradient of `H_s` with respect to the nodal coefficients.
    pub fn frechet_dh(&self, u: &NodalField) -> Result<Vec<f64>> {
        Ok(derivative(self.pairing_h(u)?))
    }

    pub fn el_residual(&self, u: &NodalField, lambda: f64) -> Result<ElResidual> {
        if !(lambda > 0.0) {
            return Err(Error::InvalidParameter(format!("lambda must be positive, got {lambda}")));
        }
        let pi = self.pairing_i(u)?;
        let ph = self.pairing_h(u)?;
        let r = residual_from(&pi, &ph, lambda);
        if self.verbose {
            let d = Diagnostics {
                s: self.s,
                j: ph.tau / pi.tau,
                d_i: pi.denom,
                d_h: ph.denom,
                mu: r.mu,
                residual: r.norm,
            };
            if let Ok(line) = serde_json::to_string(&d) {
                eprintln!("{line}");
            }
        }
        Ok(r)
    }

    pub fn diagnostics(&self, u: &NodalField) -> Result<Diagnostics> {
        let pi = self.pairing_i(u)?;
        let ph = self.pairing_h(u)?;
        let j = ph.tau / pi.tau;
        let r = residual_from(&pi, &ph, j);
        Ok(Diagnostics { s: self.s, j, d_i: pi.denom, d_h: ph.denom, mu: r.mu, residual: r.norm })
    }
}

pub(crate) fn residual_from(pi: &PairingResult, ph: &PairingResult, lambda: f64) -> ElResidual {
    let mu = lambda * ph.denom / pi.denom;
    let vector: Vec<f64> = ph.vector.iter().zip(&pi.vector).map(|(h, i)| h - mu * i).collect();
    let scale = ph.vector.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let top = vector.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    ElResidual { vector, norm: top / (scale + f64::MIN_POSITIVE), mu }
}

fn derivative(p: PairingResult) -> Vec<f64> {
    let d = p.denom;
    p.vector.into_iter().map(|v| v / d).collect()
}

/// Pairing of `u` with the hat basis for the modular of `cloud` under `young`.
pub fn pairing(cloud: &SampleCloud, young: &YoungFunction, u: &NodalField, tol: f64) -> Result<PairingResult> {
    if u.is_zero() {
        return Err(Error::ZeroField);
    }
    let samples = cloud.apply(u);
    if samples.is_zero() {
        return Err(Error::ZeroField);
    }
    let tau = luxemburg(&samples, young, tol)?.tau;
    let inv = 1.0 / tau;
    let per_sample: Vec<f64> = samples
        .values()
        .iter()
        .zip(samples.weights())
        .map(|(&v, &w)| w * young.g(v.abs() * inv) * v.signum())
        .collect();
    let (denom, _) = samples.reduce(|v, w| {
        let r = v.abs() * inv;
        (w * young.g(r) * r, 0.0)
    });
    Ok(PairingResult { vector: cloud.pull_back(&per_sample), denom, tau })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::discretization::Mesh1D;

    fn field(n: usize) -> NodalField {
        let m = Mesh1D::new(0.0, 1.0, n).unwrap();
        NodalField::interpolate(|x| x * (1.0 - x) * (1.0 + x), m).unwrap()
    }

    fn ctx(young: &str, s: f64, n: usize) -> FunctionalContext {
        let m = Mesh1D::new(0.0, 1.0, n).unwrap();
        FunctionalContext::new(young.parse().unwrap(), s, m, QuadratureSpec::default(), 1e-13).unwrap()
    }

    #[test]
    fn admission_gate() {
        let m = Mesh1D::new(0.0, 1.0, 8).unwrap();
        let y = YoungFunction::power(1.5).unwrap();
        let e = FunctionalContext::new(y.clone(), 1.0, m, QuadratureSpec::default(), 1e-12).unwrap_err();
        assert!(matches!(e, Error::NotAdmitted { .. }));
        assert!(FunctionalContext::new(y.clone(), 0.5, m, QuadratureSpec::default(), 1e-12).is_ok());
        assert!(FunctionalContext::new(y, 1.2, m, QuadratureSpec::default(), 1e-12).is_err());
    }

    #[test]
    fn zero_field() {
        let c = ctx("power:2", 0.5, 8);
        let z = NodalField::zeros(c.mesh());
        assert_eq!(c.i_value(&z).unwrap(), 0.0);
        assert_eq!(c.h_value(&z).unwrap(), 0.0);
        assert_eq!(c.j_value(&z), Err(Error::ZeroField));
        assert_eq!(c.pairing_i(&z), Err(Error::ZeroField));
        assert!(c.el_residual(&z, 1.0).is_err());
    }

    #[test]
    fn euler_identities_and_denominators() {
        for (y, s) in [("power:2", 0.5), ("power:3", 1.0), ("powerlog:2", 0.3), ("powersum:2,1,4,1", 0.7)] {
            let c = ctx(y, s, 12);
            let u = field(12);
            let (pi, ph) = (c.pairing_i(&u).unwrap(), c.pairing_h(&u).unwrap());
            let e = c.young().exponents();
            for p in [&pi, &ph] {
                assert!((u.dot(&p.vector) / (p.tau * p.denom) - 1.0).abs() < 1e-12);
                assert!(p.denom >= e.p_minus - 1e-12 && p.denom <= e.p_plus + 1e-12, "{y}: {}", p.denom);
            }
            let di = c.frechet_di(&u).unwrap();
            let dh = c.frechet_dh(&u).unwrap();
            assert!((u.dot(&di) / c.i_value(&u).unwrap() - 1.0).abs() < 1e-10);
            assert!((u.dot(&dh) / c.h_value(&u).unwrap() - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn power_denominators_equal_p() {
        let c = ctx("power:3", 0.4, 10);
        let u = field(10);
        assert!((c.pairing_i(&u).unwrap().denom - 3.0).abs() < 1e-10);
        assert!((c.pairing_h(&u).unwrap().denom - 3.0).abs() < 1e-10);
        let r = c.el_residual(&u, 2.0).unwrap();
        assert!((r.mu - 2.0).abs() < 1e-10);
    }

    #[test]
    fn finite_differences() {
        let c = ctx("powersum:2,1,4,1", 0.5, 10);
        let u = field(10);
        let v = NodalField::interpolate(|x| (7.0 * x).cos(), u.mesh).unwrap();
        let eps = 1e-6;
        let dh = c.frechet_dh(&u).unwrap();
        let fd = (c.h_value(&u.axpy(eps, &v)).unwrap() - c.h_value(&u.axpy(-eps, &v)).unwrap()) / (2.0 * eps);
        assert!((v.dot(&dh) - fd).abs() < 1e-6 * fd.abs().max(1.0));
        let di = c.frechet_di(&u).unwrap();
        let fd = (c.i_value(&u.axpy(eps, &v)).unwrap() - c.i_value(&u.axpy(-eps, &v)).unwrap()) / (2.0 * eps);
        assert!((v.dot(&di) - fd).abs() < 1e-6 * fd.abs().max(1.0));
    }

    #[test]
    fn quadratic_pairing_is_linear() {
        let c = ctx("power:2", 0.5, 8);
        let u = field(8);
        let ph = c.pairing_h(&u).unwrap();
        let k = c.energy_cloud().gram();
        let ku = &k * nalgebra::DVector::from_vec(u.coefficients.clone());
        for i in 0..u.coefficients.len() {
            assert!((ph.vector[i] - ku[i] / ph.tau).abs() < 1e-10 * ku.amax() / ph.tau);
        }
    }

    #[test]
    fn residual_scale_invariant() {
        let c = ctx("power:3", 0.6, 10);
        let u = field(10);
        let j = c.j_value(&u).unwrap();
        let a = c.el_residual(&u, j).unwrap();
        let b = c.el_residual(&u.scaled(-250.0), j).unwrap();
        assert!((a.norm - b.norm).abs() < 1e-9 * a.norm);
        assert!((c.j_value(&u.scaled(1e-3)).unwrap() / j - 1.0).abs() < 1e-10);
    }
}
