//! Dense tableau simplex for `max cᵀx` subject to `Ax ≤ b`, `x ≥ 0` with
//! `b ≥ 0`, so the slack basis is feasible and no phase-one is needed.
//!
//! The solver is generic over the scalar: with rationals every pivot is
//! exact and Bland's rule guarantees termination, which is what makes it
//! usable as an oracle. Entering and leaving variables are chosen by
//! smallest index, so runs are deterministic.

use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Clone, Debug)]
pub struct SimplexResult<T: Scalar> {
    pub objective: T,
    pub solution: Vec<T>,
}

/// Solves `max cᵀx : Ax ≤ b, x ≥ 0` for `b ≥ 0`.
pub fn maximize<T: Scalar>(a: &[Vec<T>], b: &[T], c: &[T]) -> Result<SimplexResult<T>> {
    let m = a.len();
    let n = c.len();
    if b.len() != m || a.iter().any(|row| row.len() != n) {
        return Err(Error::InvalidArgument("inconsistent program shape".into()));
    }
    if b.iter().any(|x| *x < T::zero()) {
        return Err(Error::InvalidArgument(
            "right-hand side must be non-negative".into(),
        ));
    }
    let tol = if T::EXACT {
        0.0
    } else {
        let scale = c
            .iter()
            .chain(b.iter())
            .map(|x| x.abs().to_f64())
            .fold(1.0f64, f64::max);
        1e-9 * scale
    };

    // Tableau: m rows of [A | I | rhs], plus the reduced-cost row
    // [-c | 0 | 0].
    let width = n + m + 1;
    let mut tab: Vec<Vec<T>> = Vec::with_capacity(m + 1);
    for i in 0..m {
        let mut row = Vec::with_capacity(width);
        row.extend(a[i].iter().cloned());
        for k in 0..m {
            row.push(if k == i { T::one() } else { T::zero() });
        }
        row.push(b[i].clone());
        tab.push(row);
    }
    let mut cost: Vec<T> = Vec::with_capacity(width);
    cost.extend(c.iter().map(|x| -x.clone()));
    cost.extend(std::iter::repeat_with(T::zero).take(m + 1));

    let mut basis: Vec<usize> = (n..n + m).collect();

    loop {
        // Bland: smallest-index column with a negative reduced cost.
        let entering = (0..n + m).find(|&j| cost[j].to_f64() < -tol);
        let Some(col) = entering else {
            break;
        };
        // Ratio test; ties resolved by the smallest basic-variable index.
        let mut pivot_row: Option<usize> = None;
        for i in 0..m {
            if tab[i][col].to_f64() > tol.max(1e-30) || (T::EXACT && tab[i][col] > T::zero()) {
                match pivot_row {
                    None => pivot_row = Some(i),
                    Some(r) => {
                        let lhs = tab[i][width - 1].clone() * tab[r][col].clone();
                        let rhs = tab[r][width - 1].clone() * tab[i][col].clone();
                        if lhs < rhs || (lhs == rhs && basis[i] < basis[r]) {
                            pivot_row = Some(i);
                        }
                    }
                }
            }
        }
        let Some(row) = pivot_row else {
            return Err(Error::Numerical("unbounded linear program".into()));
        };
        pivot(&mut tab, &mut cost, row, col);
        basis[row] = col;
    }

    let mut solution = vec![T::zero(); n];
    for (i, &bi) in basis.iter().enumerate() {
        if bi < n {
            solution[bi] = tab[i][width - 1].clone();
        }
    }
    Ok(SimplexResult {
        objective: cost[width - 1].clone(),
        solution,
    })
}

fn pivot<T: Scalar>(tab: &mut [Vec<T>], cost: &mut [T], row: usize, col: usize) {
    let p = tab[row][col].clone();
    for x in tab[row].iter_mut() {
        *x = x.clone() / p.clone();
    }
    let pivot_row: Vec<T> = tab[row].clone();
    for (i, current) in tab.iter_mut().enumerate() {
        if i == row {
            continue;
        }
        let f = current[col].clone();
        if f.is_zero() {
            continue;
        }
        for (slot, pj) in current.iter_mut().zip(&pivot_row) {
            let delta = f.clone() * pj.clone();
            *slot -= delta;
        }
    }
    let f = cost[col].clone();
    if !f.is_zero() {
        for (slot, pj) in cost.iter_mut().zip(&pivot_row) {
            let delta = f.clone() * pj.clone();
            *slot -= delta;
        }
    }
}
