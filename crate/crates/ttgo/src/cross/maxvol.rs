//! Maxvol: iterative selection of a row subset of a tall matrix whose
//! square submatrix has locally maximal absolute determinant.
//!
//! The returned selection satisfies the certificate
//! `max |(A * A_sub^-1)_{ij}| <= 1 + delta`. Each swap multiplies the
//! submatrix volume by at least `1 + delta`, so termination is
//! guaranteed for any `delta > 0`.

use ndarray::Array2;

use crate::error::{Result, TtgoError};
use crate::linalg::{pivot_rows, solve_multi};
use crate::scalar::Scalar;

/// Upper bound on swap iterations; generously above anything observed.
const MAX_SWAPS: usize = 20_000;

/// Selects `r` rows of a tall `m x r` matrix (`m >= r`, full column
/// rank). Ties in pivot magnitude break toward the lowest row index.
pub fn maxvol<T: Scalar>(a: &Array2<T>, delta: T) -> Result<Vec<usize>> {
    let (m, r) = a.dim();
    if m < r {
        return Err(TtgoError::InvalidArgument(format!(
            "maxvol needs a tall matrix, got {m}x{r}"
        )));
    }
    if delta < T::zero() {
        return Err(TtgoError::InvalidArgument(
            "maxvol swap threshold must be nonnegative".into(),
        ));
    }
    if m == r {
        return Ok((0..m).collect());
    }

    // Seed with the partial-pivoting row choice, then iterate swaps on
    // B = A * A_sub^-1 via rank-1 updates.
    let mut selected = pivot_rows(a).map_err(|e| {
        let non_finite = a.iter().filter(|v| !v.is_finite()).count();
        TtgoError::PivotFailure(format!(
            "{e} (candidate matrix {m}x{r}, {non_finite} non-finite entries)"
        ))
    })?;
    let mut b = coefficient_matrix(a, &selected)?;
    let threshold = T::one() + delta;

    for _ in 0..MAX_SWAPS {
        let mut best = (0usize, 0usize);
        let mut best_mag = T::zero();
        for i in 0..m {
            for j in 0..r {
                let mag = b[[i, j]].abs();
                if mag > best_mag {
                    best_mag = mag;
                    best = (i, j);
                }
            }
        }
        if best_mag <= threshold {
            return Ok(selected);
        }
        let (i, j) = best;
        let pivot = b[[i, j]];
        // Swapping row i into selection slot j updates B by a rank-1
        // correction: B <- B - B[:, j] (B[i, :] - e_j^T) / B[i, j].
        let col_j: Vec<T> = (0..m).map(|p| b[[p, j]]).collect();
        let mut row_i: Vec<T> = (0..r).map(|q| b[[i, q]]).collect();
        row_i[j] -= T::one();
        for p in 0..m {
            let scale = col_j[p] / pivot;
            if scale == T::zero() {
                continue;
            }
            for q in 0..r {
                let upd = scale * row_i[q];
                b[[p, q]] -= upd;
            }
        }
        selected[j] = i;
    }
    Err(TtgoError::PivotFailure(
        "maxvol did not converge within the swap budget".into(),
    ))
}

/// `B = A * A_sub^-1` where `A_sub` is the selected row block.
fn coefficient_matrix<T: Scalar>(a: &Array2<T>, selected: &[usize]) -> Result<Array2<T>> {
    let r = selected.len();
    let mut sub_t = Array2::zeros((r, r));
    for (slot, &row) in selected.iter().enumerate() {
        for q in 0..r {
            // Transposed on the fly: solve A_sub^T X = A^T.
            sub_t[[q, slot]] = a[[row, q]];
        }
    }
    let bt = solve_multi(&sub_t, &a.t().to_owned())?;
    Ok(bt.t().to_owned())
}

/// Certificate value `max |(A * A_sub^-1)_{ij}|` for a selection.
pub fn certificate<T: Scalar>(a: &Array2<T>, selected: &[usize]) -> Result<T> {
    let b = coefficient_matrix(a, selected)?;
    Ok(b.iter().fold(T::zero(), |acc, v| acc.max(v.abs())))
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::arr2;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    #[test]
    fn picks_identity_rows() {
        // Exhaustive |det| over row pairs of this 3x2 matrix peaks at
        // rows {0, 1} (|det| = 1 vs 0.5 for the other two pairs).
        let a = arr2(&[[1.0, 0.0], [0.0, 1.0], [0.5, 0.5]]);
        let mut rows = maxvol(&a, 0.01).unwrap();
        rows.sort_unstable();
        assert_eq!(rows, vec![0, 1]);
    }

    #[test]
    fn square_input_returns_all_rows() {
        let a = arr2(&[[2.0, 1.0], [1.0, 3.0]]);
        assert_eq!(maxvol(&a, 0.01).unwrap(), vec![0, 1]);
    }

    #[test]
    fn certificate_holds_on_random_tall_matrices() {
        let mut rng = StdRng::seed_from_u64(42);
        for _ in 0..50 {
            let m = rng.gen_range(8..80);
            let r = rng.gen_range(1..=m.min(10));
            let a = Array2::from_shape_fn((m, r), |_| rng.gen_range(-1.0..1.0f64));
            let rows = maxvol(&a, 0.01).unwrap();
            assert_eq!(rows.len(), r);
            let mut dedup = rows.clone();
            dedup.sort_unstable();
            dedup.dedup();
            assert_eq!(dedup.len(), r, "selected rows must be distinct");
            let cert = certificate(&a, &rows).unwrap();
            assert!(cert <= 1.01 + 1e-9, "certificate {cert} exceeds 1.01");
        }
    }

    #[test]
    fn single_swap_local_optimality() {
        // The selection is a local volume maximum: replacing any single
        // selected row with any other row cannot grow |det| by more
        // than (1 + delta).
        let mut rng = StdRng::seed_from_u64(7);
        let delta = 1e-6;
        for _ in 0..20 {
            let a = Array2::from_shape_fn((6, 2), |_| rng.gen_range(-1.0..1.0f64));
            let rows = maxvol(&a, delta).unwrap();
            let det = |p: usize, q: usize| -> f64 {
                (a[[p, 0]] * a[[q, 1]] - a[[p, 1]] * a[[q, 0]]).abs()
            };
            let got = det(rows[0], rows[1]);
            for candidate in 0..6 {
                let swap0 = det(candidate, rows[1]);
                let swap1 = det(rows[0], candidate);
                assert!(swap0 <= got * (1.0 + delta) + 1e-12);
                assert!(swap1 <= got * (1.0 + delta) + 1e-12);
            }
        }
    }

    #[test]
    fn degenerate_matrix_fails_cleanly() {
        let a = arr2(&[[1.0, 2.0], [2.0, 4.0], [3.0, 6.0]]);
        assert!(matches!(
            maxvol(&a, 0.01),
            Err(TtgoError::PivotFailure(_))
        ));
    }
}
