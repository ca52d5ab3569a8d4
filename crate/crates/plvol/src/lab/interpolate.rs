//! Monotone interpolation between a function and the identity.
//!
//! Given a smooth nondecreasing map on [0, R] vanishing at 0, the
//! interpolant agrees with it near 0, with the identity near R, and stays
//! nondecreasing. The construction is the explicit one: pick the abscissa
//! where the graph reaches distance R/4 from the origin, bridge affinely
//! to the identity at 3R/4, and smooth the two kinks with a mollifier
//! whose action near the origin is turned off by a cutoff so the original
//! function survives there untouched. Everything is parametric in the
//! inputs, which is what the family version exercises.

use super::mollifier::{bump, bump_mass};
use super::quad::gauss_legendre;
use super::{Fn1D, LabError};
use std::sync::Arc;

const GL_PANELS: usize = 24;
const GL_POINTS: usize = 16;

#[derive(Clone)]
pub struct Interpolant {
    phi: Fn1D,
    /// Right end of the domain [0, R].
    pub radius: f64,
    /// Abscissa where the graph of phi is R/4 away from the origin.
    pub epsilon: f64,
    /// Mollifier scale, epsilon/2.
    pub delta: f64,
    /// Agreement radius: the output equals phi on [0, r] and the identity
    /// on [R - r, R]. Reported as min(epsilon/3, R/4).
    pub r: f64,
    bridge_slope: f64,
    bridge_offset: f64,
    /// Quadrature nodes (y, w * rho_delta(y)) on [0, delta], and their
    /// total paired mass; self-normalizing so affine stretches are exact.
    nodes: Arc<Vec<(f64, f64)>>,
    mass: f64,
}

impl std::fmt::Debug for Interpolant {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Interpolant")
            .field("radius", &self.radius)
            .field("epsilon", &self.epsilon)
            .field("delta", &self.delta)
            .field("r", &self.r)
            .finish()
    }
}

impl Interpolant {
    pub fn eval_phi(&self, x: f64) -> f64 {
        self.phi.eval(x)
    }

    /// The piecewise hybrid before smoothing: phi, then the affine bridge,
    /// then the identity (extended as the identity beyond R).
    pub fn eval_h(&self, x: f64) -> f64 {
        if x <= self.epsilon {
            self.phi.eval(x.max(0.0))
        } else if x < 0.75 * self.radius {
            self.bridge_slope * x + self.bridge_offset
        } else {
            x
        }
    }

    /// The cutoff: 0 on [0, eps/3], 1 from 2*eps/3 on, quintic smoothstep
    /// in between (C^2 at both ends).
    pub fn cutoff(&self, x: f64) -> f64 {
        let lo = self.epsilon / 3.0;
        let hi = 2.0 * self.epsilon / 3.0;
        if x <= lo {
            0.0
        } else if x >= hi {
            1.0
        } else {
            let s = (x - lo) / (hi - lo);
            s * s * s * (s * (6.0 * s - 15.0) + 10.0)
        }
    }

    /// The interpolant: the cutoff-modified convolution of the hybrid.
    /// Paired symmetric quadrature with self-normalization keeps it exact
    /// (to rounding) wherever the hybrid is affine across the window.
    pub fn eval(&self, x: f64) -> f64 {
        let c = self.cutoff(x);
        if c == 0.0 {
            return self.eval_h(x);
        }
        let mut acc = 0.0;
        for &(y, w) in self.nodes.iter() {
            acc += w * (self.eval_h(x - c * y) + self.eval_h(x + c * y));
        }
        acc / self.mass
    }

    /// Sampled rows (x, phi(x), h(x), interpolant(x)) for CSV dumps.
    pub fn sample(&self, count: usize) -> Vec<(f64, f64, f64, f64)> {
        let n = count.max(2);
        (0..n)
            .map(|i| {
                let x = self.radius * i as f64 / (n - 1) as f64;
                (x, self.eval_phi(x), self.eval_h(x), self.eval(x))
            })
            .collect()
    }
}

/// Builds the interpolant for a smooth nondecreasing map with phi(0) = 0
/// on [0, radius].
pub fn interpolate_to_identity(phi: &Fn1D, radius: f64) -> Result<Interpolant, LabError> {
    if !(radius > 0.0) || !radius.is_finite() {
        return Err(LabError::NonPositiveRadius(radius));
    }
    if phi.eval(0.0).abs() > 1e-12 {
        return Err(LabError::BadEndpoint(phi.eval(0.0)));
    }
    // Monotonicity spot check on a grid.
    let samples = 4096;
    let mut prev = phi.eval(0.0);
    for i in 1..=samples {
        let x = radius * i as f64 / samples as f64;
        let y = phi.eval(x);
        if y < prev - 1e-12 * (1.0 + prev.abs()) {
            return Err(LabError::NotMonotone { at: x });
        }
        prev = y;
    }

    // epsilon solves eps^2 + phi(eps)^2 = (R/4)^2; the left side is
    // strictly increasing, negative at 0 and nonnegative at R/4.
    let target = (radius / 4.0) * (radius / 4.0);
    let mut lo = 0.0;
    let mut hi = radius / 4.0;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let val = mid * mid + phi.eval(mid) * phi.eval(mid);
        if val < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let epsilon = 0.5 * (lo + hi);
    let delta = 0.5 * epsilon;

    let anchor = phi.eval(epsilon);
    let bridge_slope = (0.75 * radius - anchor) / (0.75 * radius - epsilon);
    let bridge_offset = anchor - bridge_slope * epsilon;

    let base = gauss_legendre(GL_POINTS);
    let mut nodes = Vec::with_capacity(GL_PANELS * GL_POINTS);
    let h = delta / GL_PANELS as f64;
    for p in 0..GL_PANELS {
        let mid = (p as f64 + 0.5) * h;
        for &(t, w) in &base {
            let y = mid + 0.5 * h * t;
            nodes.push((y, 0.5 * h * w * bump(y / delta) / (bump_mass() * delta)));
        }
    }
    let mass: f64 = nodes.iter().map(|&(_, w)| 2.0 * w).sum();

    Ok(Interpolant {
        phi: phi.clone(),
        radius,
        epsilon,
        delta,
        r: (epsilon / 3.0).min(radius / 4.0),
        bridge_slope,
        bridge_offset,
        nodes: Arc::new(nodes),
        mass,
    })
}

/// The parametric version: one interpolant per family member. Members
/// that are the identity come out as the identity, so a family that is
/// the identity near its boundary stays glueable.
pub fn interpolate_family(phis: &[Fn1D], radii: &[f64]) -> Result<Vec<Interpolant>, LabError> {
    if phis.len() != radii.len() {
        return Err(LabError::MismatchedFamily { functions: phis.len(), radii: radii.len() });
    }
    phis.iter().zip(radii).map(|(phi, &r)| interpolate_to_identity(phi, r)).collect()
}

/// Largest parameter-direction increment of the family outputs over a
/// shared relative grid; a finite-difference continuity diagnostic.
pub fn family_max_increment(family: &[Interpolant], grid: usize) -> f64 {
    let mut worst = 0.0f64;
    for pair in family.windows(2) {
        for i in 0..=grid {
            let s = i as f64 / grid as f64;
            let a = pair[0].eval(s * pair[0].radius);
            let b = pair[1].eval(s * pair[1].radius);
            worst = worst.max((b - a).abs());
        }
    }
    worst
}
