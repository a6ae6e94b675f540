//! Numerical laboratory for the homogeneous eigenvalue problem of the
//! fractional g-Laplacian on an interval.
//!
//! The first eigenvalue is the minimum of the 1-homogeneous quotient
//! `J_s(u) = [u]_{s,G} / ‖u‖_G` of a Luxemburg-type Gagliardo seminorm
//! (or `‖u'‖_G` at `s = 1`) over the Luxemburg norm, computed on continuous
//! piecewise-linear fields that vanish outside the interval.

pub mod config;
pub mod discretization;
pub mod eigensolver;
pub mod error;
pub mod functionals;
pub mod norms;
pub mod props;
pub mod quadrature;
pub mod report;
pub mod young;

pub use discretization::{Mesh1D, ModularSamples, NodalField, QuadratureSpec, SampleCloud, SampleKind};
pub use eigensolver::{EigenPair, SolverConfig, SweepResult};
pub use error::{Error, Result};
pub use functionals::FunctionalContext;
pub use young::{ExponentPair, StructuralFlags, YoungFunction};

/// Caps the global rayon pool from `ORLICZ_EIG_THREADS`; a no-op when the
/// variable is unset or the pool is already initialised.
pub fn init_thread_pool() {
    if let Some(n) = std::env::var("ORLICZ_EIG_THREADS").ok().and_then(|v| v.parse::<usize>().ok()) {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global();
    }
}
