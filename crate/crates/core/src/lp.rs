//! Exact linear feasibility: find `x >= 0` with `A x = b`.
//!
//! Dense phase-one simplex with Bland's rule, so it terminates without cycling.
//! Intended for the small systems that arise from convex-combination tests.

use crate::scalar::Scalar;

/// Returns a non-negative solution of `A x = b`, or `None` if there is none.
/// `a` is row-major with `b.len()` rows of equal length.
pub fn find_nonnegative_solution<T: Scalar>(a: &[Vec<T>], b: &[T]) -> Option<Vec<T>> {
    let m = b.len();
    let n = a.first().map_or(0, Vec::len);
    debug_assert!(a.iter().all(|row| row.len() == n));

    // Tableau columns: n structural, m artificial, then rhs.
    let width = n + m + 1;
    let mut tab: Vec<Vec<T>> = Vec::with_capacity(m + 1);
    for i in 0..m {
        let flip = b[i] < T::zero();
        let mut row = Vec::with_capacity(width);
        for j in 0..n {
            row.push(if flip { -a[i][j].clone() } else { a[i][j].clone() });
        }
        for k in 0..m {
            row.push(if k == i { T::one() } else { T::zero() });
        }
        row.push(if flip { -b[i].clone() } else { b[i].clone() });
        tab.push(row);
    }
    // Objective row: minimize the sum of artificials, expressed in reduced form.
    let mut obj = vec![T::zero(); width];
    for row in &tab {
        for j in 0..n {
            obj[j] = obj[j].clone() - row[j].clone();
        }
        obj[width - 1] = obj[width - 1].clone() - row[width - 1].clone();
    }
    tab.push(obj);
    let mut basis: Vec<usize> = (n..n + m).collect();

    let eps = T::resolution();
    loop {
        // Bland: smallest index with negative reduced cost.
        let Some(col) = (0..n + m).find(|&j| tab[m][j] < -eps.clone()) else {
            break;
        };
        let mut pivot: Option<(usize, T)> = None;
        for i in 0..m {
            if tab[i][col] > eps {
                let ratio = tab[i][width - 1].clone() / tab[i][col].clone();
                let better = match &pivot {
                    None => true,
                    Some((pi, pr)) => ratio < *pr || (ratio == *pr && basis[i] < basis[*pi]),
                };
                if better {
                    pivot = Some((i, ratio));
                }
            }
        }
        let Some((row, _)) = pivot else {
            // Phase-one objective is bounded below by zero, so this cannot happen.
            break;
        };
        pivot_on(&mut tab, row, col);
        basis[row] = col;
    }

    let residual = -tab[m][width - 1].clone();
    if residual > eps {
        return None;
    }
    let mut x = vec![T::zero(); n];
    for (i, &bv) in basis.iter().enumerate() {
        if bv < n {
            x[bv] = tab[i][width - 1].clone();
        }
    }
    Some(x)
}

fn pivot_on<T: Scalar>(tab: &mut [Vec<T>], row: usize, col: usize) {
    let p = tab[row][col].clone();
    for v in tab[row].iter_mut() {
        *v = v.clone() / p.clone();
    }
    let pivot_row = tab[row].clone();
    for (i, r) in tab.iter_mut().enumerate() {
        if i == row {
            continue;
        }
        let factor = r[col].clone();
        if factor == T::zero() {
            continue;
        }
        for (v, pv) in r.iter_mut().zip(&pivot_row) {
            *v = v.clone() - factor.clone() * pv.clone();
        }
    }
}
