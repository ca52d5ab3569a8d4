//! Exact dense linear algebra over [`Scalar`].
//!
//! Plain fraction-based Gaussian elimination; matrices here are tiny
//! ((n+1) x (n+1) for n <= 4 in practice) and correctness beats constant
//! factors.

use crate::scalar::Scalar;
use num_traits::Zero;

/// Determinant by Gaussian elimination with exact pivoting.
pub fn determinant(matrix: &[Vec<Scalar>]) -> Scalar {
    let n = matrix.len();
    debug_assert!(matrix.iter().all(|row| row.len() == n));
    let mut m: Vec<Vec<Scalar>> = matrix.to_vec();
    let mut det = Scalar::from_integer(1.into());
    for col in 0..n {
        let pivot_row = match (col..n).find(|&r| !m[r][col].is_zero()) {
            Some(r) => r,
            None => return Scalar::zero(),
        };
        if pivot_row != col {
            m.swap(pivot_row, col);
            det = -det;
        }
        let pivot = m[col][col].clone();
        det *= pivot.clone();
        for row in col + 1..n {
            if m[row][col].is_zero() {
                continue;
            }
            let factor = &m[row][col] / &pivot;
            for k in col..n {
                let delta = &factor * &m[col][k];
                m[row][k] -= delta;
            }
        }
    }
    det
}

/// Rank of a rectangular matrix.
pub fn rank(matrix: &[Vec<Scalar>]) -> usize {
    if matrix.is_empty() {
        return 0;
    }
    let rows = matrix.len();
    let cols = matrix[0].len();
    let mut m: Vec<Vec<Scalar>> = matrix.to_vec();
    let mut rank = 0;
    for col in 0..cols {
        if rank == rows {
            break;
        }
        let pivot_row = match (rank..rows).find(|&r| !m[r][col].is_zero()) {
            Some(r) => r,
            None => continue,
        };
        m.swap(pivot_row, rank);
        let pivot = m[rank][col].clone();
        for row in 0..rows {
            if row == rank || m[row][col].is_zero() {
                continue;
            }
            let factor = &m[row][col] / &pivot;
            for k in col..cols {
                let delta = &factor * &m[rank][k];
                m[row][k] -= delta;
            }
        }
        rank += 1;
    }
    rank
}

/// Solves the (possibly overdetermined) system `A x = b` exactly.
///
/// Returns `None` when the system is inconsistent or the solution is not
/// unique; callers in this crate only solve systems whose columns are
/// affinely independent, so a unique solution exists whenever `b` lies in
/// the column span.
pub fn solve_unique(a: &[Vec<Scalar>], b: &[Scalar]) -> Option<Vec<Scalar>> {
    let rows = a.len();
    debug_assert_eq!(rows, b.len());
    let cols = if rows == 0 { return None } else { a[0].len() };
    // Augmented matrix reduction.
    let mut m: Vec<Vec<Scalar>> = a
        .iter()
        .zip(b)
        .map(|(row, rhs)| {
            let mut r = row.clone();
            r.push(rhs.clone());
            r
        })
        .collect();
    let mut pivot_cols = Vec::new();
    let mut rank = 0;
    for col in 0..cols {
        let pivot_row = match (rank..rows).find(|&r| !m[r][col].is_zero()) {
            Some(r) => r,
            None => continue,
        };
        m.swap(pivot_row, rank);
        let pivot = m[rank][col].clone();
        for k in col..=cols {
            m[rank][k] = &m[rank][k] / &pivot;
        }
        for row in 0..rows {
            if row == rank || m[row][col].is_zero() {
                continue;
            }
            let factor = m[row][col].clone();
            for k in col..=cols {
                let delta = &factor * &m[rank][k];
                m[row][k] -= delta;
            }
        }
        pivot_cols.push(col);
        rank += 1;
        if rank == rows {
            break;
        }
    }
    // Inconsistent if any zero row has a nonzero rhs.
    for row in rank..rows {
        if !m[row][cols].is_zero() {
            return None;
        }
    }
    if rank < cols {
        return None; // underdetermined
    }
    let mut x = vec![Scalar::zero(); cols];
    for (r, &col) in pivot_cols.iter().enumerate() {
        x[col] = m[r][cols].clone();
    }
    Some(x)
}

/// Parity of the permutation taking `from` to `to` (both sequences of the
/// same distinct elements): +1 even, -1 odd.
pub fn permutation_parity<T: Ord + Clone>(from: &[T], to: &[T]) -> i8 {
    debug_assert_eq!(from.len(), to.len());
    let mut perm: Vec<usize> = from
        .iter()
        .map(|x| to.iter().position(|y| y == x).expect("same elements"))
        .collect();
    let mut sign = 1i8;
    for i in 0..perm.len() {
        while perm[i] != i {
            let j = perm[i];
            perm.swap(i, j);
            sign = -sign;
        }
    }
    sign
}
