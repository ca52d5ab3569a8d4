//! Test-instance generators: closed and bounded meshes with exact rational
//! coordinates, and seeded random cocycles with an exact prescribed total.

use super::MeshDocument;
use crate::scalar::Scalar;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum GenError {
    #[error("bad generator parameters: {0}")]
    BadParams(String),
}

#[derive(Debug, Clone, PartialEq)]
pub enum GenKind {
    /// Flat torus of revolution on an m-by-k vertex grid (2mk triangles
    /// in R^3). Grid sides below 3 are raised to 3: a simplicial torus
    /// needs at least 7 vertices, so a 2-wide grid cannot close up.
    GridTorus { m: usize, k: usize },
    /// Boundary of an (n+1)-simplex: an n-sphere with n+2 cells in
    /// R^(n+1).
    SimplexBoundary { n: usize },
    /// Unit square as an m-by-m grid, each square split along its
    /// anti-diagonal; a disk with boundary.
    SquareDisk { m: usize },
}

/// Effective grid-torus sides after the minimum-size clamp.
pub fn grid_torus_dims(m: usize, k: usize) -> (usize, usize) {
    (m.max(3), k.max(3))
}

pub fn generate(kind: &GenKind) -> Result<MeshDocument, GenError> {
    match *kind {
        GenKind::GridTorus { m, k } => {
            if m == 0 || k == 0 {
                return Err(GenError::BadParams("torus grid sides must be positive".into()));
            }
            let (m, k) = grid_torus_dims(m, k);
            grid_torus(m, k)
        }
        GenKind::SimplexBoundary { n } => {
            if n == 0 {
                return Err(GenError::BadParams("simplex boundary needs dimension >= 1".into()));
            }
            Ok(simplex_boundary(n))
        }
        GenKind::SquareDisk { m } => {
            if m == 0 {
                return Err(GenError::BadParams("square grid side must be positive".into()));
            }
            Ok(square_disk(m))
        }
    }
}

/// m approximately equally spaced exact rational points on the unit
/// circle, in cyclic order, via the tangent half-angle parametrization.
fn rational_circle(m: usize) -> Vec<(Scalar, Scalar)> {
    let denominator = 4096i64;
    let mut params = Vec::with_capacity(m);
    for i in 0..m {
        // Angles in (-pi, pi), offset so the excluded angle pi is never hit.
        let angle = 2.0 * std::f64::consts::PI * (i as f64 + 0.5) / m as f64 - std::f64::consts::PI;
        let u = (angle / 2.0).tan();
        params.push(BigRational::new(
            BigInt::from((u * denominator as f64).round() as i64),
            BigInt::from(denominator),
        ));
    }
    debug_assert!(params.windows(2).all(|w| w[0] < w[1]), "parameters must stay distinct");
    params
        .into_iter()
        .map(|u| {
            let u2 = &u * &u;
            let denom = &u2 + BigRational::one();
            let cos = (BigRational::one() - &u2) / &denom;
            let sin = (BigRational::from_integer(2.into()) * &u) / denom;
            (cos, sin)
        })
        .collect()
}

fn grid_torus(m: usize, k: usize) -> Result<MeshDocument, GenError> {
    let major = rational_circle(m);
    let minor = rational_circle(k);
    let big_radius = BigRational::from_integer(3.into());
    let mut vertices = Vec::with_capacity(m * k);
    for (c, s) in &major {
        for (a, b) in &minor {
            // Tube radius 1 around a radius-3 circle in the xy-plane.
            let ring = &big_radius + a;
            vertices.push(vec![&ring * c, &ring * s, b.clone()]);
        }
    }
    let index = |i: usize, j: usize| (i % m) * k + (j % k);
    let mut cells = Vec::with_capacity(2 * m * k);
    for i in 0..m {
        for j in 0..k {
            cells.push(vec![index(i, j), index(i + 1, j), index(i + 1, j + 1)]);
            cells.push(vec![index(i, j), index(i + 1, j + 1), index(i, j + 1)]);
        }
    }
    Ok(MeshDocument { ambient_dim: 3, dim: 2, vertices, cells, cocycles: BTreeMap::new() })
}

fn simplex_boundary(n: usize) -> MeshDocument {
    let ambient = n + 1;
    let mut vertices = vec![vec![Scalar::zero(); ambient]];
    for axis in 0..ambient {
        let mut v = vec![Scalar::zero(); ambient];
        v[axis] = Scalar::one();
        vertices.push(v);
    }
    // All (n+1)-subsets of the n+2 vertices.
    let ids: Vec<usize> = (0..n + 2).collect();
    let cells = crate::complex::subsets_of_size(&ids, n + 1);
    MeshDocument { ambient_dim: ambient, dim: n, vertices, cells, cocycles: BTreeMap::new() }
}

fn square_disk(m: usize) -> MeshDocument {
    let denom = BigInt::from(m as i64);
    let coord = |i: usize| BigRational::new(BigInt::from(i as i64), denom.clone());
    let mut vertices = Vec::with_capacity((m + 1) * (m + 1));
    for j in 0..=m {
        for i in 0..=m {
            vertices.push(vec![coord(i), coord(j)]);
        }
    }
    let index = |i: usize, j: usize| j * (m + 1) + i;
    let mut cells = Vec::with_capacity(2 * m * m);
    for j in 0..m {
        for i in 0..m {
            cells.push(vec![index(i, j), index(i + 1, j), index(i, j + 1)]);
            cells.push(vec![index(i + 1, j), index(i, j + 1), index(i + 1, j + 1)]);
        }
    }
    MeshDocument { ambient_dim: 2, dim: 2, vertices, cells, cocycles: BTreeMap::new() }
}

/// Strictly positive rationals with the exact prescribed total: integer
/// shares drawn from a seeded generator, scaled by total/sum.
pub fn random_cocycle_values(cells: usize, seed: u64, total: &Scalar) -> Result<Vec<Scalar>, GenError> {
    if cells == 0 {
        return Err(GenError::BadParams("cocycle needs at least one cell".into()));
    }
    if !total.is_positive() {
        return Err(GenError::BadParams("total volume must be positive".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let shares: Vec<i64> = (0..cells).map(|_| rng.gen_range(1..=1000)).collect();
    let sum: i64 = shares.iter().sum();
    Ok(shares
        .into_iter()
        .map(|s| total * BigRational::new(BigInt::from(s), BigInt::from(sum)))
        .collect())
}

/// Adds a seeded random cocycle with exact total to a mesh document.
pub fn add_random_cocycle(
    doc: &mut MeshDocument,
    name: &str,
    seed: u64,
    total: &Scalar,
) -> Result<(), GenError> {
    let values = random_cocycle_values(doc.cells.len(), seed, total)?;
    doc.cocycles.insert(name.to_string(), values.into_iter().enumerate().collect());
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::BuildOptions;
    use crate::scalar::scalar;

    fn euler_characteristic(doc: &MeshDocument) -> i64 {
        let (complex, _) = doc.build(&BuildOptions::default()).unwrap();
        (0..=complex.dim())
            .map(|k| {
                let count = complex.faces_of_dim(k).len() as i64;
                if k % 2 == 0 {
                    count
                } else {
                    -count
                }
            })
            .sum()
    }

    #[test]
    fn grid_torus_3x3_is_a_closed_orientable_torus() {
        let doc = generate(&GenKind::GridTorus { m: 3, k: 3 }).unwrap();
        assert_eq!(doc.vertices.len(), 9);
        assert_eq!(doc.cells.len(), 18);
        assert_eq!(euler_characteristic(&doc), 0);
        let (complex, _) = doc.build(&BuildOptions::default()).unwrap();
        assert_eq!(complex.pseudomanifold(), Some(crate::complex::Pseudomanifold::Closed));
        assert!(complex.orient().is_ok());
        assert_eq!(complex.num_components(), 1);
    }

    #[test]
    fn grid_torus_clamps_small_sides() {
        let doc = generate(&GenKind::GridTorus { m: 2, k: 2 }).unwrap();
        assert_eq!(doc.cells.len(), 18);
        assert_eq!(euler_characteristic(&doc), 0);
        let doc = generate(&GenKind::GridTorus { m: 5, k: 5 }).unwrap();
        assert_eq!(doc.cells.len(), 50);
        assert_eq!(euler_characteristic(&doc), 0);
    }

    #[test]
    fn simplex_boundary_2_is_a_two_sphere() {
        let doc = generate(&GenKind::SimplexBoundary { n: 2 }).unwrap();
        assert_eq!(doc.ambient_dim, 3);
        assert_eq!(doc.cells.len(), 4);
        assert_eq!(euler_characteristic(&doc), 2);
        let (complex, _) = doc.build(&BuildOptions::default()).unwrap();
        assert!(complex.orient().is_ok());
    }

    #[test]
    fn square_disk_1_is_the_worked_square() {
        let doc = generate(&GenKind::SquareDisk { m: 1 }).unwrap();
        assert_eq!(doc.cells, vec![vec![0, 1, 2], vec![1, 2, 3]]);
        assert_eq!(doc.vertices[3], vec![scalar(1), scalar(1)]);
        let (complex, _) = doc.build(&BuildOptions::default()).unwrap();
        assert!(complex.has_boundary());
    }

    #[test]
    fn square_disk_3_counts() {
        let doc = generate(&GenKind::SquareDisk { m: 3 }).unwrap();
        assert_eq!(doc.vertices.len(), 16);
        assert_eq!(doc.cells.len(), 18);
        assert_eq!(euler_characteristic(&doc), 1);
    }

    #[test]
    fn random_cocycle_total_is_exact_and_deterministic() {
        let total = scalar(3);
        let a = random_cocycle_values(18, 1, &total).unwrap();
        let b = random_cocycle_values(18, 1, &total).unwrap();
        let c = random_cocycle_values(18, 2, &total).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
        assert_eq!(a.iter().sum::<Scalar>(), total);
        assert!(a.iter().all(|v| v.is_positive()));
    }

    #[test]
    fn bad_params_are_rejected() {
        assert!(matches!(generate(&GenKind::GridTorus { m: 0, k: 3 }), Err(GenError::BadParams(_))));
        assert!(matches!(generate(&GenKind::SquareDisk { m: 0 }), Err(GenError::BadParams(_))));
        assert!(matches!(random_cocycle_values(4, 0, &scalar(0)), Err(GenError::BadParams(_))));
    }
}
