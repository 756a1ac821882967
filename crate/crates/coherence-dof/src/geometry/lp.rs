//! Exact-pivot linear algebra underneath the polytope operations: a dense
//! rational Gaussian solve and a phase-1 simplex feasibility test.
//!
//! Problem sizes here are tiny (dimension <= 4, at most a few hundred
//! columns), so exactness is worth far more than speed.

use crate::model::Rat;
use num::{Signed, Zero};

/// Solves the square system `a x = b` exactly.
///
/// Returns `None` when the matrix is singular.
pub fn solve_square(a: &[Vec<Rat>], b: &[Rat]) -> Option<Vec<Rat>> {
    let n = a.len();
    debug_assert!(a.iter().all(|row| row.len() == n) && b.len() == n);
    let mut m: Vec<Vec<Rat>> = a
        .iter()
        .zip(b)
        .map(|(row, rhs)| {
            let mut r = row.clone();
            r.push(rhs.clone());
            r
        })
        .collect();

    for col in 0..n {
        let pivot = (col..n).find(|&r| !m[r][col].is_zero())?;
        m.swap(col, pivot);
        let p = m[col][col].clone();
        for entry in m[col][col..].iter_mut() {
            *entry = &*entry / &p;
        }
        for row in 0..n {
            if row != col && !m[row][col].is_zero() {
                let f = m[row][col].clone();
                for c in col..=n {
                    let delta = &f * &m[col][c];
                    m[row][c] = &m[row][c] - delta;
                }
            }
        }
    }
    Some(m.into_iter().map(|row| row[n].clone()).collect())
}

/// Phase-1 simplex: is `{x >= 0 : a x = b}` nonempty?
///
/// Bland's rule on both the entering and leaving choices guarantees
/// termination; all pivots are exact.
pub fn feasible(a: &[Vec<Rat>], b: &[Rat]) -> bool {
    let m = a.len();
    if m == 0 {
        return true;
    }
    let n = a[0].len();

    // Normalize to b >= 0, then start from the all-artificial basis.
    let mut rows: Vec<Vec<Rat>> = Vec::with_capacity(m);
    let mut rhs: Vec<Rat> = Vec::with_capacity(m);
    for i in 0..m {
        if b[i].is_negative() {
            rows.push(a[i].iter().map(|x| -x).collect());
            rhs.push(-b[i].clone());
        } else {
            rows.push(a[i].clone());
            rhs.push(b[i].clone());
        }
    }

    // Reduced costs of the structural columns under the phase-1 objective
    // (artificial basis has cost 1 each): cost_j = -sum_i rows[i][j].
    let mut cost: Vec<Rat> = (0..n)
        .map(|j| -rows.iter().fold(Rat::zero(), |acc, r| acc + &r[j]))
        .collect();
    let mut obj: Rat = rhs.iter().fold(Rat::zero(), |acc, v| acc + v);
    // basis[i] = column index if structural, n + i sentinel for artificial i.
    let mut basis: Vec<usize> = (n..n + m).collect();

    loop {
        // Bland: smallest structural column with negative reduced cost.
        let Some(enter) = (0..n).find(|&j| cost[j].is_negative()) else {
            return obj.is_zero();
        };
        // Ratio test; ties resolved toward the smallest basis variable.
        let mut leave: Option<usize> = None;
        let mut best: Option<Rat> = None;
        for i in 0..m {
            if rows[i][enter].is_positive() {
                let ratio = &rhs[i] / &rows[i][enter];
                let better = match &best {
                    None => true,
                    Some(b) => ratio < *b || (ratio == *b && basis[i] < basis[leave.unwrap()]),
                };
                if better {
                    best = Some(ratio);
                    leave = Some(i);
                }
            }
        }
        let Some(leave) = leave else {
            // Phase-1 objective is bounded below by zero, so an unbounded
            // direction cannot occur; defensively report infeasible state.
            unreachable!("phase-1 simplex cannot be unbounded");
        };

        // Pivot on (leave, enter).
        let p = rows[leave][enter].clone();
        for v in rows[leave].iter_mut() {
            *v = &*v / &p;
        }
        rhs[leave] = &rhs[leave] / &p;
        for i in 0..m {
            if i != leave && !rows[i][enter].is_zero() {
                let f = rows[i][enter].clone();
                for j in 0..n {
                    let delta = &f * &rows[leave][j];
                    rows[i][j] = &rows[i][j] - delta;
                }
                let delta = &f * &rhs[leave];
                rhs[i] = &rhs[i] - delta;
            }
        }
        if !cost[enter].is_zero() {
            let f = cost[enter].clone();
            for j in 0..n {
                let delta = &f * &rows[leave][j];
                cost[j] = &cost[j] - delta;
            }
            // Dictionary form: w = w_bar + sum c_j x_j, so entering x_e at
            // value rhs[leave] moves the objective by c_e * rhs[leave].
            let delta = &f * &rhs[leave];
            obj = obj + delta;
        }
        basis[leave] = enter;
    }
}
