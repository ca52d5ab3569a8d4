//! Numerical lab: mollifiers, monotone interpolation to the identity, and
//! fiberwise rescaling with a prescribed Jacobian.
//!
//! Everything here is f64-based by design and shares no code path with the
//! exact rational core; tolerances are quadrature and grid tolerances, not
//! proofs.

pub mod fiber;
pub mod interpolate;
pub mod mollifier;
pub mod quad;

pub use fiber::FiberMap;
pub use interpolate::{family_max_increment, interpolate_family, interpolate_to_identity, Interpolant};
pub use mollifier::{convolve, make_mollifier, Mollifier};

use std::sync::Arc;
use thiserror::Error;

/// Absolute tolerance for the mollifier verification integrals.
pub const MOLLIFIER_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Error)]
pub enum LabError {
    #[error("mollifier scale must be positive, got {0}")]
    NonPositiveDelta(f64),
    #[error("interpolation radius must be positive, got {0}")]
    NonPositiveRadius(f64),
    #[error("function is not nondecreasing near x = {at}")]
    NotMonotone { at: f64 },
    #[error("function must vanish at 0, got {0}")]
    BadEndpoint(f64),
    #[error("density must be positive; got {value} at ({x}, {y})")]
    NonPositiveF { x: f64, y: f64, value: f64 },
    #[error("family has {functions} functions but {radii} radii")]
    MismatchedFamily { functions: usize, radii: usize },
}

/// A real function on a closed interval with declared monotonicity
/// metadata; evaluation outside the interval extends constantly.
#[derive(Clone)]
pub struct Fn1D {
    pub(crate) f: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    pub domain: (f64, f64),
    pub monotone: bool,
}

impl std::fmt::Debug for Fn1D {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Fn1D")
            .field("domain", &self.domain)
            .field("monotone", &self.monotone)
            .finish()
    }
}

impl Fn1D {
    pub fn new(domain: (f64, f64), monotone: bool, f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        Fn1D { f: Arc::new(f), domain, monotone }
    }

    pub fn identity(domain: (f64, f64)) -> Self {
        Fn1D::new(domain, true, |x| x)
    }

    pub fn eval(&self, x: f64) -> f64 {
        (self.f)(x.clamp(self.domain.0, self.domain.1))
    }
}
