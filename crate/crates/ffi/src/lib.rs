//! C ABI over `orlicz-eig`.
//!
//! Objects are opaque handles created by `*_new` functions and released by
//! the matching `*_free`. Every fallible call returns an [`OeStatus`]; the
//! message of the last failure on the calling thread is available through
//! [`oe_last_error_message`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use orlicz_eig::eigensolver::{default_init, minimize_first};
use orlicz_eig::norms::{norm_g, seminorm_sg};
use orlicz_eig::{EigenPair, Error, FunctionalContext, Mesh1D, NodalField, QuadratureSpec, SolverConfig, YoungFunction};

/// Status codes returned by every fallible function.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OeStatus {
    Ok = 0,
    /// Null pointer or malformed argument.
    InvalidArgument = 1,
    /// Parameters rejected before any computation.
    ConfigError = 2,
    /// A numerical method failed.
    NumericalError = 3,
    /// A Rust panic was caught at the boundary.
    Panic = 4,
}

/// Opaque Young function.
pub struct OeYoung(YoungFunction);

/// Opaque eigenpair.
pub struct OeEigenPair(EigenPair);

/// Solver and discretization parameters of [`oe_eig_first`].
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct OeSolveOptions {
    pub a: f64,
    pub b: f64,
    pub n_elements: usize,
    /// Luxemburg tolerance.
    pub tol: f64,
    pub residual_tol: f64,
    pub max_iters: usize,
}

thread_local! {
    static LAST_ERROR: RefCell<String> = const { RefCell::new(String::new()) };
}

fn set_error(msg: String) {
    LAST_ERROR.with(|e| *e.borrow_mut() = msg);
}

fn status_of(e: &Error) -> OeStatus {
    if e.is_config() {
        OeStatus::ConfigError
    } else {
        OeStatus::NumericalError
    }
}

fn guard<F: FnOnce() -> Result<(), (OeStatus, String)>>(f: F) -> OeStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => OeStatus::Ok,
        Ok(Err((status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("panic in orlicz-eig".into());
            OeStatus::Panic
        }
    }
}

fn lib<T>(r: orlicz_eig::Result<T>) -> Result<T, (OeStatus, String)> {
    r.map_err(|e| (status_of(&e), e.to_string()))
}

fn invalid(msg: &str) -> (OeStatus, String) {
    (OeStatus::InvalidArgument, msg.to_string())
}

unsafe fn young_ref<'a>(y: *const OeYoung) -> Result<&'a YoungFunction, (OeStatus, String)> {
    y.as_ref().map(|y| &y.0).ok_or_else(|| invalid("null young handle"))
}

unsafe fn field_from(
    a: f64,
    b: f64,
    n_elements: usize,
    coefficients: *const f64,
    len: usize,
) -> Result<NodalField, (OeStatus, String)> {
    if coefficients.is_null() {
        return Err(invalid("null coefficient buffer"));
    }
    let mesh = lib(Mesh1D::new(a, b, n_elements))?;
    let coeffs = std::slice::from_raw_parts(coefficients, len).to_vec();
    lib(NodalField::from_coefficients(mesh, coeffs))
}

/// Copies the last error message of this thread into `buf` (NUL-terminated,
/// truncated to `len`) and returns the full message length in bytes.
///
/// # Safety
/// `buf` must be null or point to `len` writable bytes.
#[no_mangle]
pub unsafe extern "C" fn oe_last_error_message(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| {
        let msg = e.borrow();
        if !buf.is_null() && len > 0 {
            let n = msg.len().min(len - 1);
            ptr::copy_nonoverlapping(msg.as_ptr() as *const c_char, buf, n);
            *buf.add(n) = 0;
        }
        msg.len()
    })
}

/// Parses a family string such as `power:2` or `powersum:2,1,4,1`.
///
/// # Safety
/// `spec` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn oe_young_new(spec: *const c_char, out: *mut *mut OeYoung) -> OeStatus {
    guard(|| {
        if spec.is_null() || out.is_null() {
            return Err(invalid("null argument"));
        }
        let text = CStr::from_ptr(spec).to_str().map_err(|_| invalid("spec is not UTF-8"))?;
        let y: YoungFunction = lib(text.parse())?;
        *out = Box::into_raw(Box::new(OeYoung(y)));
        Ok(())
    })
}

/// # Safety
/// `y` must be null or a handle from [`oe_young_new`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn oe_young_free(y: *mut OeYoung) {
    if !y.is_null() {
        drop(Box::from_raw(y));
    }
}

/// `G(t)`, `g(t)` and `g'(t)`.
///
/// # Safety
/// `y` must be a live handle and the output pointers valid.
#[no_mangle]
pub unsafe extern "C" fn oe_young_evaluate(
    y: *const OeYoung,
    t: f64,
    big_g: *mut f64,
    g: *mut f64,
    g_prime: *mut f64,
) -> OeStatus {
    guard(|| {
        let y = young_ref(y)?;
        if big_g.is_null() || g.is_null() || g_prime.is_null() {
            return Err(invalid("null output"));
        }
        if !(t >= 0.0 && t.is_finite()) {
            return Err(invalid("t must be finite and non-negative"));
        }
        let v = y.evaluate(t);
        *big_g = v.big_g;
        *g = v.g;
        *g_prime = v.g_prime;
        Ok(())
    })
}

/// Growth exponents `p⁻ ≤ p⁺`.
///
/// # Safety
/// `y` must be a live handle and the output pointers valid.
#[no_mangle]
pub unsafe extern "C" fn oe_young_exponents(y: *const OeYoung, p_minus: *mut f64, p_plus: *mut f64) -> OeStatus {
    guard(|| {
        let y = young_ref(y)?;
        if p_minus.is_null() || p_plus.is_null() {
            return Err(invalid("null output"));
        }
        let e = y.exponents();
        *p_minus = e.p_minus;
        *p_plus = e.p_plus;
        Ok(())
    })
}

/// Structural flags: `G(√t)` convex and `g'` non-increasing.
///
/// # Safety
/// `y` must be a live handle and the output pointers valid.
#[no_mangle]
pub unsafe extern "C" fn oe_young_flags(y: *const OeYoung, sqrt_convex: *mut bool, gprime_decreasing: *mut bool) -> OeStatus {
    guard(|| {
        let y = young_ref(y)?;
        if sqrt_convex.is_null() || gprime_decreasing.is_null() {
            return Err(invalid("null output"));
        }
        let f = y.flags();
        *sqrt_convex = f.sqrt_convex;
        *gprime_decreasing = f.gprime_decreasing;
        Ok(())
    })
}

/// Luxemburg norm `‖u‖_G` of the piecewise-linear field with interior nodal
/// values `coefficients[0..n_elements-1]` on `(a, b)`.
///
/// # Safety
/// `y` must be a live handle, `coefficients` must hold `len` values and
/// `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn oe_norm_g(
    y: *const OeYoung,
    a: f64,
    b: f64,
    n_elements: usize,
    coefficients: *const f64,
    len: usize,
    out: *mut f64,
) -> OeStatus {
    guard(|| {
        let y = young_ref(y)?;
        if out.is_null() {
            return Err(invalid("null output"));
        }
        let u = field_from(a, b, n_elements, coefficients, len)?;
        *out = lib(norm_g(&u, y, &QuadratureSpec::default(), 1e-12))?;
        Ok(())
    })
}

/// Seminorm `[u]_{s,G}` (or `‖u'‖_G` when `s = 1`) of the field described
/// as in [`oe_norm_g`].
///
/// # Safety
/// Same as [`oe_norm_g`].
#[no_mangle]
pub unsafe extern "C" fn oe_seminorm(
    y: *const OeYoung,
    s: f64,
    a: f64,
    b: f64,
    n_elements: usize,
    coefficients: *const f64,
    len: usize,
    out: *mut f64,
) -> OeStatus {
    guard(|| {
        let y = young_ref(y)?;
        if out.is_null() {
            return Err(invalid("null output"));
        }
        let u = field_from(a, b, n_elements, coefficients, len)?;
        *out = lib(seminorm_sg(&u, y, s, &QuadratureSpec::default(), 1e-12))?;
        Ok(())
    })
}

/// Default options: `(0, 1)`, 128 elements, Luxemburg tolerance `1e-12`,
/// residual tolerance `1e-7`, 2000 iterations.
#[no_mangle]
pub extern "C" fn oe_solve_options_default() -> OeSolveOptions {
    let cfg = SolverConfig::default();
    OeSolveOptions {
        a: 0.0,
        b: 1.0,
        n_elements: 128,
        tol: 1e-12,
        residual_tol: cfg.residual_tol,
        max_iters: cfg.max_iters,
    }
}

/// First eigenpair of order `s ∈ (0, 1]`. A non-converged run still returns
/// `OE_STATUS_OK`; query [`oe_eigenpair_converged`].
///
/// # Safety
/// `y` must be a live handle, `options` and `out` valid pointers.
#[no_mangle]
pub unsafe extern "C" fn oe_eig_first(
    y: *const OeYoung,
    s: f64,
    options: *const OeSolveOptions,
    out: *mut *mut OeEigenPair,
) -> OeStatus {
    guard(|| {
        let y = young_ref(y)?;
        let opts = options.as_ref().ok_or_else(|| invalid("null options"))?;
        if out.is_null() {
            return Err(invalid("null output"));
        }
        let mesh = lib(Mesh1D::new(opts.a, opts.b, opts.n_elements))?;
        let ctx = lib(FunctionalContext::new(y.clone(), s, mesh, QuadratureSpec::default(), opts.tol))?;
        let cfg = SolverConfig { residual_tol: opts.residual_tol, max_iters: opts.max_iters, ..Default::default() };
        let pair = lib(minimize_first(&ctx, &default_init(mesh), &cfg))?;
        *out = Box::into_raw(Box::new(OeEigenPair(pair)));
        Ok(())
    })
}

/// # Safety
/// `p` must be null or a handle from [`oe_eig_first`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn oe_eigenpair_free(p: *mut OeEigenPair) {
    if !p.is_null() {
        drop(Box::from_raw(p));
    }
}

/// Eigenvalue, or NaN for a null handle.
///
/// # Safety
/// `p` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn oe_eigenpair_lambda(p: *const OeEigenPair) -> f64 {
    p.as_ref().map_or(f64::NAN, |p| p.0.lambda)
}

/// Euler-Lagrange multiplier, or NaN for a null handle.
///
/// # Safety
/// `p` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn oe_eigenpair_mu(p: *const OeEigenPair) -> f64 {
    p.as_ref().map_or(f64::NAN, |p| p.0.mu)
}

/// Final residual norm, or NaN for a null handle.
///
/// # Safety
/// `p` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn oe_eigenpair_residual(p: *const OeEigenPair) -> f64 {
    p.as_ref().map_or(f64::NAN, |p| p.0.residual_norm)
}

/// # Safety
/// `p` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn oe_eigenpair_converged(p: *const OeEigenPair) -> bool {
    p.as_ref().is_some_and(|p| p.0.converged)
}

/// # Safety
/// `p` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn oe_eigenpair_iterations(p: *const OeEigenPair) -> usize {
    p.as_ref().map_or(0, |p| p.0.iterations)
}

/// Number of nodal values including both endpoints.
///
/// # Safety
/// `p` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn oe_eigenpair_len(p: *const OeEigenPair) -> usize {
    p.as_ref().map_or(0, |p| p.0.field.mesh.n_elements + 1)
}

/// Copies the nodal values of the eigenfunction, endpoints included.
///
/// # Safety
/// `p` must be a live handle and `buf` must hold `len` writable values.
#[no_mangle]
pub unsafe extern "C" fn oe_eigenpair_values(p: *const OeEigenPair, buf: *mut f64, len: usize) -> OeStatus {
    guard(|| {
        let p = p.as_ref().ok_or_else(|| invalid("null eigenpair handle"))?;
        if buf.is_null() {
            return Err(invalid("null buffer"));
        }
        let values = p.0.field.node_values();
        if len < values.len() {
            return Err(invalid("buffer too small"));
        }
        ptr::copy_nonoverlapping(values.as_ptr(), buf, values.len());
        Ok(())
    })
}
