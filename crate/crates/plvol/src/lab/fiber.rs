//! Fiberwise rescaling of a triangle with a prescribed Jacobian.
//!
//! Points of a triangle decompose as x = p + t d, where d points from a
//! chosen vertex to the barycenter and p lies on the two edges at that
//! vertex; the rescaling map stretches each fiber by the running integral
//! of a positive density, so its Jacobian determinant equals the density.
//! The decomposition switches edges across the chord through the vertex
//! and the barycenter, so the map is smooth off that chord; Jacobian
//! checks keep a margin away from it and from the boundary.

use super::quad::{composite_gl, gauss_legendre};
use super::LabError;
use std::sync::Arc;

#[derive(Clone)]
pub struct FiberMap {
    /// Triangle vertices; index 0 is the distinguished vertex.
    vertices: [[f64; 2]; 3],
    density: Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>,
    nodes: Vec<(f64, f64)>,
}

impl std::fmt::Debug for FiberMap {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("FiberMap").field("vertices", &self.vertices).finish()
    }
}

impl FiberMap {
    /// Builds the map for a positive density on the triangle; the vertex
    /// list is rotated so that `vertex` comes first.
    pub fn new(
        triangle: [[f64; 2]; 3],
        vertex: usize,
        density: impl Fn(f64, f64) -> f64 + Send + Sync + 'static,
    ) -> Result<Self, LabError> {
        let vertices = [
            triangle[vertex % 3],
            triangle[(vertex + 1) % 3],
            triangle[(vertex + 2) % 3],
        ];
        let map = FiberMap { vertices, density: Arc::new(density), nodes: gauss_legendre(12) };
        // Positivity spot check on a barycentric grid.
        let steps = 40;
        for i in 0..=steps {
            for j in 0..=steps - i {
                let k = steps - i - j;
                let p = map.from_barycentric([i as f64, j as f64, k as f64].map(|v| v / steps as f64));
                let value = (map.density)(p[0], p[1]);
                if !(value > 0.0) {
                    return Err(LabError::NonPositiveF { x: p[0], y: p[1], value });
                }
            }
        }
        Ok(map)
    }

    pub fn vertex(&self) -> [f64; 2] {
        self.vertices[0]
    }

    pub fn barycenter(&self) -> [f64; 2] {
        let mut b = [0.0; 2];
        for v in &self.vertices {
            b[0] += v[0] / 3.0;
            b[1] += v[1] / 3.0;
        }
        b
    }

    pub fn density_at(&self, x: f64, y: f64) -> f64 {
        (self.density)(x, y)
    }

    fn from_barycentric(&self, w: [f64; 3]) -> [f64; 2] {
        let mut p = [0.0; 2];
        for (wi, v) in w.iter().zip(&self.vertices) {
            p[0] += wi * v[0];
            p[1] += wi * v[1];
        }
        p
    }

    /// Barycentric coordinates (vertex first) of an ambient point.
    pub fn barycentric(&self, p: [f64; 2]) -> [f64; 3] {
        let [a, b, c] = self.vertices;
        let det = (b[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (b[1] - a[1]);
        let wb = ((p[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (p[1] - a[1])) / det;
        let wc = ((b[0] - a[0]) * (p[1] - a[1]) - (p[0] - a[0]) * (b[1] - a[1])) / det;
        [1.0 - wb - wc, wb, wc]
    }

    /// Splits x = p + t (b - v): the fiber foot p on one of the two edges
    /// at the vertex, and the parameter t >= 0 along the barycenter
    /// direction. The foot loses barycentric weight equally on the two
    /// non-vertex coordinates, so t is three times their minimum.
    pub fn decompose(&self, x: [f64; 2]) -> ([f64; 2], f64) {
        let w = self.barycentric(x);
        let t = 3.0 * w[1].min(w[2]);
        let foot = self.from_barycentric([w[0] + 2.0 * t / 3.0, w[1] - t / 3.0, w[2] - t / 3.0]);
        (foot, t)
    }

    /// The rescaled point: the fiber foot plus the integrated density
    /// along the fiber, in the barycenter direction.
    pub fn eval(&self, x: [f64; 2]) -> [f64; 2] {
        let (foot, t) = self.decompose(x);
        let v = self.vertex();
        let b = self.barycenter();
        let d = [b[0] - v[0], b[1] - v[1]];
        let stretched = composite_gl(
            &|s| (self.density)(foot[0] + s * d[0], foot[1] + s * d[1]),
            0.0,
            t,
            8,
            &self.nodes,
        );
        [foot[0] + stretched * d[0], foot[1] + stretched * d[1]]
    }

    /// Central-difference Jacobian determinant.
    pub fn jacobian_det(&self, x: [f64; 2], step: f64) -> f64 {
        let xp = self.eval([x[0] + step, x[1]]);
        let xm = self.eval([x[0] - step, x[1]]);
        let yp = self.eval([x[0], x[1] + step]);
        let ym = self.eval([x[0], x[1] - step]);
        let dxdx = (xp[0] - xm[0]) / (2.0 * step);
        let dydx = (xp[1] - xm[1]) / (2.0 * step);
        let dxdy = (yp[0] - ym[0]) / (2.0 * step);
        let dydy = (yp[1] - ym[1]) / (2.0 * step);
        dxdx * dydy - dxdy * dydx
    }

    /// Max |numeric Jacobian - density| over the lattice of the given
    /// spacing, skipping a margin around the boundary and around the
    /// vertex-barycenter chord where the map is only piecewise smooth.
    pub fn max_jacobian_deviation(&self, spacing: f64, margin: f64) -> f64 {
        let (lo, hi) = self.bounding_box();
        let mut worst = 0.0f64;
        let mut y = lo[1];
        while y <= hi[1] {
            let mut x = lo[0];
            while x <= hi[0] {
                let p = [x, y];
                if self.admissible(p, margin) {
                    let jac = self.jacobian_det(p, spacing);
                    let f = (self.density)(x, y);
                    worst = worst.max((jac.abs() - f).abs());
                }
                x += spacing;
            }
            y += spacing;
        }
        worst
    }

    fn bounding_box(&self) -> ([f64; 2], [f64; 2]) {
        let mut lo = [f64::INFINITY; 2];
        let mut hi = [f64::NEG_INFINITY; 2];
        for v in &self.vertices {
            for k in 0..2 {
                lo[k] = lo[k].min(v[k]);
                hi[k] = hi[k].max(v[k]);
            }
        }
        (lo, hi)
    }

    /// Interior, away from edges and from the vertex-barycenter chord.
    fn admissible(&self, p: [f64; 2], margin: f64) -> bool {
        let w = self.barycentric(p);
        // Barycentric margins scale roughly with the triangle diameter;
        // normalize by it so `margin` is an ambient distance.
        let (lo, hi) = self.bounding_box();
        let diameter = (hi[0] - lo[0]).hypot(hi[1] - lo[1]);
        let eps = margin / diameter * 3.0;
        if w.iter().any(|&wi| wi < eps) {
            return false;
        }
        (w[1] - w[2]).abs() >= eps
    }

    /// Area of the image region by the shoelace formula over a fine
    /// boundary polyline: the two edges at the vertex are fixed, the
    /// opposite edge maps to a curve.
    pub fn image_area(&self, samples: usize) -> f64 {
        let [v, a, b] = self.vertices;
        let mut polyline = vec![v, a];
        for i in 0..=samples {
            let s = i as f64 / samples as f64;
            let q = [a[0] + s * (b[0] - a[0]), a[1] + s * (b[1] - a[1])];
            polyline.push(self.eval(q));
        }
        polyline.push(b);
        let mut twice_area = 0.0;
        for i in 0..polyline.len() {
            let p = polyline[i];
            let q = polyline[(i + 1) % polyline.len()];
            twice_area += p[0] * q[1] - q[0] * p[1];
        }
        0.5 * twice_area.abs()
    }

    /// Integral of the density over the triangle by uniform refinement
    /// and centroid evaluation (exact for affine densities).
    pub fn density_integral(&self, refinement: usize) -> f64 {
        let n = refinement.max(1);
        let [v, a, b] = self.vertices;
        let area = 0.5 * ((a[0] - v[0]) * (b[1] - v[1]) - (b[0] - v[0]) * (a[1] - v[1])).abs();
        let cell_area = area / (n * n) as f64;
        let mut total = 0.0;
        for i in 0..n {
            for j in 0..n - i {
                // Upward sub-triangle (i, j) in barycentric lattice coords.
                let w = [
                    (n - i - j) as f64 - 2.0 / 3.0,
                    i as f64 + 1.0 / 3.0,
                    j as f64 + 1.0 / 3.0,
                ];
                let p = self.from_barycentric(w.map(|x| x / n as f64));
                total += (self.density)(p[0], p[1]) * cell_area;
                // Downward partner, when present.
                if i + j < n - 1 {
                    let w = [
                        (n - i - j) as f64 - 4.0 / 3.0,
                        i as f64 + 2.0 / 3.0,
                        j as f64 + 2.0 / 3.0,
                    ];
                    let p = self.from_barycentric(w.map(|x| x / n as f64));
                    total += (self.density)(p[0], p[1]) * cell_area;
                }
            }
        }
        total
    }
}
