//! Small dense linear-algebra kernels: LU solve with partial pivoting and a
//! numerical rank estimate. Sized for the saddle-point systems produced by
//! RBF fitting (a few hundred unknowns at most).

use crate::real::Real;

/// Row-major dense square solve `A x = b` by LU with partial pivoting.
///
/// `a` is consumed as scratch; the solution overwrites `b`. Returns `false`
/// when a pivot underflows the breakdown threshold.
pub fn lu_solve_in_place<T: Real>(a: &mut [T], b: &mut [T], n: usize) -> bool {
    debug_assert_eq!(a.len(), n * n);
    debug_assert_eq!(b.len(), n);
    let tiny = T::of(1e-300);

    for col in 0..n {
        // Pivot search over the remaining rows.
        let mut pivot_row = col;
        let mut pivot_mag = a[col * n + col].abs();
        for row in col + 1..n {
            let mag = a[row * n + col].abs();
            if mag > pivot_mag {
                pivot_mag = mag;
                pivot_row = row;
            }
        }
        if !(pivot_mag > tiny) {
            return false;
        }
        if pivot_row != col {
            for k in 0..n {
                a.swap(col * n + k, pivot_row * n + k);
            }
            b.swap(col, pivot_row);
        }
        let inv_pivot = T::one() / a[col * n + col];
        for row in col + 1..n {
            let factor = a[row * n + col] * inv_pivot;
            if factor == T::zero() {
                continue;
            }
            for k in col + 1..n {
                let update = a[col * n + k] * factor;
                a[row * n + k] = a[row * n + k] - update;
            }
            b[row] = b[row] - b[col] * factor;
            a[row * n + col] = T::zero();
        }
    }

    // Back substitution.
    for col in (0..n).rev() {
        let mut acc = b[col];
        for k in col + 1..n {
            acc = acc - a[col * n + k] * b[k];
        }
        b[col] = acc / a[col * n + col];
    }
    true
}

/// Numerical rank of an `rows x cols` row-major matrix by Gaussian
/// elimination with partial pivoting.
///
/// A pivot counts while its magnitude exceeds `tol * max(1, largest entry)`.
pub fn matrix_rank<T: Real>(data: &[T], rows: usize, cols: usize, tol: T) -> usize {
    debug_assert_eq!(data.len(), rows * cols);
    if rows == 0 || cols == 0 {
        return 0;
    }
    let mut m = data.to_vec();
    let max_entry = m.iter().fold(T::zero(), |acc, v| acc.max(v.abs()));
    let threshold = tol * T::one().max(max_entry);

    let mut rank = 0;
    let mut pivot_col = 0;
    while rank < rows && pivot_col < cols {
        let mut pivot_row = rank;
        let mut pivot_mag = m[rank * cols + pivot_col].abs();
        for row in rank + 1..rows {
            let mag = m[row * cols + pivot_col].abs();
            if mag > pivot_mag {
                pivot_mag = mag;
                pivot_row = row;
            }
        }
        if pivot_mag <= threshold {
            pivot_col += 1;
            continue;
        }
        if pivot_row != rank {
            for k in 0..cols {
                m.swap(rank * cols + k, pivot_row * cols + k);
            }
        }
        let inv_pivot = T::one() / m[rank * cols + pivot_col];
        for row in rank + 1..rows {
            let factor = m[row * cols + pivot_col] * inv_pivot;
            if factor == T::zero() {
                continue;
            }
            for k in pivot_col..cols {
                let update = m[rank * cols + k] * factor;
                m[row * cols + k] = m[row * cols + k] - update;
            }
        }
        rank += 1;
        pivot_col += 1;
    }
    rank
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn solves_known_system() {
        // [2 1; 1 3] x = [3; 5] -> x = (0.8, 1.4)
        let mut a = vec![2.0f64, 1.0, 1.0, 3.0];
        let mut b = vec![3.0, 5.0];
        assert!(lu_solve_in_place(&mut a, &mut b, 2));
        assert_relative_eq!(b[0], 0.8, max_relative = 1e-12);
        assert_relative_eq!(b[1], 1.4, max_relative = 1e-12);
    }

    #[test]
    fn solve_needs_pivoting() {
        // Zero on the diagonal forces a row swap.
        let mut a = vec![0.0f64, 1.0, 1.0, 0.0];
        let mut b = vec![2.0, 7.0];
        assert!(lu_solve_in_place(&mut a, &mut b, 2));
        assert_relative_eq!(b[0], 7.0);
        assert_relative_eq!(b[1], 2.0);
    }

    #[test]
    fn singular_reported() {
        let mut a = vec![1.0f64, 2.0, 2.0, 4.0];
        let mut b = vec![1.0, 2.0];
        assert!(!lu_solve_in_place(&mut a, &mut b, 2));
    }

    #[test]
    fn random_solve_residual() {
        // Deterministic pseudo-random matrix; residual must be tiny.
        let n = 40;
        let mut a = vec![0.0f64; n * n];
        let mut state = 0x9e3779b97f4a7c15u64;
        let mut next = || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            (state >> 11) as f64 / (1u64 << 53) as f64 - 0.5
        };
        for v in a.iter_mut() {
            *v = next();
        }
        for i in 0..n {
            a[i * n + i] += 4.0; // keep it comfortably nonsingular
        }
        let x_true: Vec<f64> = (0..n).map(|i| (i as f64) / 7.0 - 2.0).collect();
        let mut b = vec![0.0; n];
        for i in 0..n {
            b[i] = (0..n).map(|j| a[i * n + j] * x_true[j]).sum();
        }
        let mut a_work = a.clone();
        assert!(lu_solve_in_place(&mut a_work, &mut b, n));
        for i in 0..n {
            assert_relative_eq!(b[i], x_true[i], max_relative = 1e-9);
        }
    }

    #[test]
    fn rank_of_augmented_points() {
        // Three affinely independent 2-d points augmented with ones: rank 3.
        let full = vec![0.0f64, 0.0, 1.0, 1.0, 0.0, 1.0, 0.0, 1.0, 1.0];
        assert_eq!(matrix_rank(&full, 3, 3, 1e-8), 3);

        // Four collinear points: rank 2 even when augmented.
        let collinear = vec![
            0.0f64, 0.0, 1.0, //
            1.0, 1.0, 1.0, //
            2.0, 2.0, 1.0, //
            3.0, 3.0, 1.0,
        ];
        assert_eq!(matrix_rank(&collinear, 4, 3, 1e-8), 2);
    }

    #[test]
    fn rank_empty_and_zero() {
        assert_eq!(matrix_rank::<f64>(&[], 0, 3, 1e-8), 0);
        assert_eq!(matrix_rank(&[0.0f64; 6], 2, 3, 1e-8), 0);
    }
}
