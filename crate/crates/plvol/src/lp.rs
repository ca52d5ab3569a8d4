//! A small exact linear program solver over [`Scalar`].
//!
//! Two-phase primal simplex with Bland's rule, used by the strict complex
//! validation to decide whether two simplices meet outside their shared
//! face. Problems here have a handful of variables, so no effort is spent
//! on sparsity or revised-simplex bookkeeping.

use crate::scalar::Scalar;
use num_traits::{One, Signed, Zero};

#[derive(Debug, Clone, PartialEq)]
pub enum LpOutcome {
    Infeasible,
    /// Maximum value of the objective over the feasible region.
    Optimal(Scalar),
    Unbounded,
}

/// Maximizes `objective . x` subject to `A x = b`, `x >= 0`.
pub fn maximize(objective: &[Scalar], a: &[Vec<Scalar>], b: &[Scalar]) -> LpOutcome {
    let n = objective.len();
    let m = a.len();
    debug_assert!(a.iter().all(|row| row.len() == n));
    debug_assert_eq!(b.len(), m);

    // Tableau with one artificial variable per row; phase one drives the
    // artificials to zero, phase two optimizes the real objective.
    // Columns: 0..n real, n..n+m artificial, last = rhs.
    let cols = n + m + 1;
    let mut t: Vec<Vec<Scalar>> = Vec::with_capacity(m);
    for (i, row) in a.iter().enumerate() {
        let mut r: Vec<Scalar> = Vec::with_capacity(cols);
        let flip = b[i].is_negative();
        for v in row {
            r.push(if flip { -v.clone() } else { v.clone() });
        }
        for j in 0..m {
            r.push(if j == i { Scalar::one() } else { Scalar::zero() });
        }
        r.push(if flip { -b[i].clone() } else { b[i].clone() });
        t.push(r);
    }
    let mut basis: Vec<usize> = (n..n + m).collect();

    // Phase one: minimize the sum of artificials == maximize its negation.
    // With the artificial basis, the reduced cost of a real column is its
    // column sum, and the objective row's rhs entry carries the negated
    // objective value (+sum of rhs here).
    let mut phase_obj = vec![Scalar::zero(); cols];
    for row in &t {
        for (j, v) in row.iter().enumerate() {
            phase_obj[j] += v;
        }
    }
    for j in n..n + m {
        phase_obj[j] = Scalar::zero();
    }
    if simplex(&mut t, &mut basis, &mut phase_obj, n) == Step::Unbounded {
        unreachable!("phase-one objective is bounded by zero");
    }
    if phase_obj[cols - 1].is_positive() {
        return LpOutcome::Infeasible;
    }
    // Pivot any artificial still in the basis out (degenerate rows), then
    // drop the artificial columns by forbidding them as entering variables.
    for i in 0..m {
        if basis[i] >= n {
            if let Some(col) = (0..n).find(|&j| !t[i][j].is_zero()) {
                pivot(&mut t, &mut basis, &mut phase_obj, i, col);
            }
            // A row with no real coefficients is redundant; leave it.
        }
    }

    let mut obj = vec![Scalar::zero(); cols];
    for (j, c) in objective.iter().enumerate() {
        obj[j] = c.clone();
    }
    // Express the objective in terms of the current basis.
    for (i, &bj) in basis.iter().enumerate() {
        if bj < n && !obj[bj].is_zero() {
            let factor = obj[bj].clone();
            for j in 0..cols {
                let delta = &factor * &t[i][j];
                obj[j] -= delta;
            }
        }
    }
    match simplex(&mut t, &mut basis, &mut obj, n) {
        Step::Unbounded => LpOutcome::Unbounded,
        Step::Optimal => LpOutcome::Optimal(-obj[cols - 1].clone()),
    }
}

#[derive(PartialEq)]
enum Step {
    Optimal,
    Unbounded,
}

fn simplex(t: &mut [Vec<Scalar>], basis: &mut [usize], obj: &mut [Scalar], usable_cols: usize) -> Step {
    loop {
        // Bland's rule: smallest improving column, smallest-index tie break
        // on the ratio test. Guarantees termination under degeneracy.
        let entering = match (0..usable_cols).find(|&j| obj[j].is_positive()) {
            Some(j) => j,
            None => return Step::Optimal,
        };
        let rhs = t[0].len() - 1;
        let mut leaving: Option<(usize, Scalar)> = None;
        for (i, row) in t.iter().enumerate() {
            if row[entering].is_positive() {
                let ratio = &row[rhs] / &row[entering];
                let better = match &leaving {
                    None => true,
                    Some((li, best)) => ratio < *best || (ratio == *best && basis[i] < basis[*li]),
                };
                if better {
                    leaving = Some((i, ratio));
                }
            }
        }
        let (leave_row, _) = match leaving {
            Some(l) => l,
            None => return Step::Unbounded,
        };
        pivot(t, basis, obj, leave_row, entering);
    }
}

fn pivot(t: &mut [Vec<Scalar>], basis: &mut [usize], obj: &mut [Scalar], row: usize, col: usize) {
    let cols = t[row].len();
    let pivot = t[row][col].clone();
    for v in t[row].iter_mut() {
        *v = &*v / &pivot;
    }
    for i in 0..t.len() {
        if i == row || t[i][col].is_zero() {
            continue;
        }
        let factor = t[i][col].clone();
        for j in 0..cols {
            let delta = &factor * &t[row][j];
            t[i][j] -= delta;
        }
    }
    if !obj[col].is_zero() {
        let factor = obj[col].clone();
        for j in 0..cols {
            let delta = &factor * &t[row][j];
            obj[j] -= delta;
        }
    }
    basis[row] = col;
}
