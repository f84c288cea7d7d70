//! Dense Gaussian elimination for the small systems the transform solver builds.

use crate::scalar::Scalar;

/// Solves `a * x = rhs` in place with partial pivoting. `a` is row-major,
/// `dim x dim`. Returns `None` when a pivot vanishes.
pub(crate) fn solve<T: Scalar>(mut a: Vec<T>, mut rhs: Vec<T>) -> Option<Vec<T>> {
    let dim = rhs.len();
    debug_assert_eq!(a.len(), dim * dim);
    for col in 0..dim {
        let pivot_row = (col..dim).max_by(|&r, &s| {
            a[r * dim + col]
                .abs()
                .partial_cmp(&a[s * dim + col].abs())
                .unwrap_or(std::cmp::Ordering::Equal)
        })?;
        let pivot = a[pivot_row * dim + col];
        if pivot == T::zero() || !pivot.is_finite() {
            return None;
        }
        if pivot_row != col {
            for c in 0..dim {
                a.swap(pivot_row * dim + c, col * dim + c);
            }
            rhs.swap(pivot_row, col);
        }
        for r in (col + 1)..dim {
            let factor = a[r * dim + col] / pivot;
            if factor == T::zero() {
                continue;
            }
            for c in col..dim {
                let v = a[col * dim + c];
                a[r * dim + c] = a[r * dim + c] - factor * v;
            }
            let v = rhs[col];
            rhs[r] = rhs[r] - factor * v;
        }
    }
    let mut x = vec![T::zero(); dim];
    for row in (0..dim).rev() {
        let mut acc = rhs[row];
        for c in (row + 1)..dim {
            acc = acc - a[row * dim + c] * x[c];
        }
        x[row] = acc / a[row * dim + row];
    }
    Some(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solves_with_pivoting() {
        // first pivot is zero without row exchange
        let a = vec![0.0, 1.0, 2.0, 1.0];
        let x: Vec<f64> = solve(a, vec![3.0, 4.0]).unwrap();
        assert!((x[0] - 0.5).abs() < 1e-15 && (x[1] - 3.0).abs() < 1e-15);
    }

    #[test]
    fn singular_is_none() {
        assert!(solve(vec![1.0, 2.0, 2.0, 4.0], vec![1.0, 2.0]).is_none());
    }
}
