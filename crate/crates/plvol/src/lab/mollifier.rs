//! The compactly supported bump mollifier and convolution against it.

use super::quad::adaptive_simpson;
use super::{Fn1D, LabError, MOLLIFIER_TOL};
use std::sync::{Arc, OnceLock};

/// The unnormalized bump: exp(-1/(1-x^2)) inside (-1, 1), zero outside.
/// The exponent blows up at the support boundary, so the evaluation is
/// clamped to zero within 1e-12 of |x| = 1.
pub fn bump(x: f64) -> f64 {
    if x.abs() >= 1.0 - 1e-12 {
        0.0
    } else {
        (-1.0 / (1.0 - x * x)).exp()
    }
}

/// Integral of the unnormalized bump over its support, computed once.
pub fn bump_mass() -> f64 {
    static MASS: OnceLock<f64> = OnceLock::new();
    *MASS.get_or_init(|| adaptive_simpson(&bump, -1.0, 1.0, 1e-13))
}

/// The rescaled unit-mass mollifier with support [-delta, delta].
#[derive(Debug, Clone)]
pub struct Mollifier {
    delta: f64,
    normalizer: f64,
}

impl Mollifier {
    pub fn delta(&self) -> f64 {
        self.delta
    }

    /// The normalizing constant: the mass of the unnormalized bump.
    pub fn normalizer(&self) -> f64 {
        self.normalizer
    }

    pub fn eval(&self, x: f64) -> f64 {
        bump(x / self.delta) / (self.normalizer * self.delta)
    }

    /// Quadrature check of the unit mass.
    pub fn integral(&self) -> f64 {
        adaptive_simpson(&|x| self.eval(x), -self.delta, self.delta, MOLLIFIER_TOL)
    }
}

pub fn make_mollifier(delta: f64) -> Result<Mollifier, LabError> {
    if !(delta > 0.0) || !delta.is_finite() {
        return Err(LabError::NonPositiveDelta(delta));
    }
    Ok(Mollifier { delta, normalizer: bump_mass() })
}

/// Convolution f * rho_delta as a new function on the same interval; f is
/// extended constantly outside its domain. Preserves monotonicity.
pub fn convolve(f: &Fn1D, mollifier: &Mollifier) -> Fn1D {
    let f = f.clone();
    let m = mollifier.clone();
    let delta = mollifier.delta();
    let domain = f.domain;
    let monotone = f.monotone;
    Fn1D {
        f: Arc::new(move |x: f64| {
            adaptive_simpson(&|y| f.eval(x - y) * m.eval(y), -delta, delta, MOLLIFIER_TOL)
        }),
        domain,
        monotone,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn support_boundary_is_zero_and_even() {
        let m = make_mollifier(1.0).unwrap();
        assert_eq!(m.eval(1.0), 0.0);
        assert_eq!(m.eval(-1.0), 0.0);
        for i in 0..101 {
            let x = -1.0 + 0.02 * i as f64;
            assert!((m.eval(x) - m.eval(-x)).abs() < 1e-15);
        }
    }

    #[test]
    fn unit_mass_at_all_scales() {
        for delta in [1.0, 0.5, 0.1] {
            let m = make_mollifier(delta).unwrap();
            assert!((m.integral() - 1.0).abs() < 1e-8, "delta = {delta}");
        }
    }

    #[test]
    fn rejects_nonpositive_delta() {
        assert!(matches!(make_mollifier(0.0), Err(LabError::NonPositiveDelta(_))));
        assert!(matches!(make_mollifier(-1.0), Err(LabError::NonPositiveDelta(_))));
    }

    #[test]
    fn convolving_a_constant_returns_it() {
        let f = Fn1D::new((-2.0, 2.0), true, |_| 3.25);
        let g = convolve(&f, &make_mollifier(0.25).unwrap());
        for i in 0..41 {
            let x = -2.0 + 0.1 * i as f64;
            assert!((g.eval(x) - 3.25).abs() < 1e-9);
        }
    }

    #[test]
    fn convolving_the_identity_cancels_odd_moments() {
        let f = Fn1D::new((-3.0, 3.0), true, |x| x);
        let g = convolve(&f, &make_mollifier(0.5).unwrap());
        for i in 0..21 {
            let x = -1.0 + 0.1 * i as f64;
            assert!((g.eval(x) - x).abs() < 1e-8, "x = {x}");
        }
    }

    #[test]
    fn piecewise_linear_kink_is_exact_off_the_window() {
        // f continuous, slope 1 then 3, kink at eps = 0.4.
        let eps = 0.4;
        let f = Fn1D::new((-4.0, 4.0), true, move |x| if x < eps { x } else { 3.0 * x - 2.0 * eps });
        let delta = 0.25;
        let g = convolve(&f, &make_mollifier(delta).unwrap());
        for i in 0..61 {
            let x = -1.5 + 0.05 * i as f64;
            if (x - eps).abs() >= delta {
                assert!((g.eval(x) - f.eval(x)).abs() < 1e-8, "x = {x}");
            }
        }
        // Inside the window the smoothing genuinely moves the value.
        assert!((g.eval(eps) - f.eval(eps)).abs() > 1e-4);
    }

    #[test]
    fn monotonicity_is_preserved() {
        let f = Fn1D::new((0.0, 1.0), true, |x| if x < 0.3 { 0.5 * x } else { 2.0 * x - 0.45 });
        let g = convolve(&f, &make_mollifier(0.0625).unwrap());
        let mut prev = f64::NEG_INFINITY;
        for i in 0..=400 {
            let x = i as f64 / 400.0;
            let y = g.eval(x);
            assert!(y >= prev - 1e-12, "x = {x}");
            prev = y;
        }
    }
}
