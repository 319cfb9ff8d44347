//! Small dense linear-algebra kernels used by the cross-approximation
//! sweeps: column-pivoted Householder QR and LU solves with partial
//! pivoting. Everything here is generic over [`Scalar`] so the crate
//! stays free of external BLAS/LAPACK bindings; the matrices involved
//! are unfoldings of size at most (rank * nodes) x rank.

use ndarray::{s, Array1, Array2};

use crate::error::{Result, TtgoError};
use crate::scalar::Scalar;

/// Thin column-pivoted QR factorization.
///
/// `q` holds an orthonormal basis (m x rank) of the column space of the
/// first `rank` pivot columns; `piv` lists the column order chosen by the
/// pivoting, so `a[:, piv[..rank]]` are the numerically independent
/// columns.
pub(crate) struct QrCp<T> {
    pub q: Array2<T>,
    pub r: Array2<T>,
    pub piv: Vec<usize>,
    pub rank: usize,
}

pub(crate) fn qr_cp<T: Scalar>(a: &Array2<T>) -> QrCp<T> {
    qr_cp_with_floor(a, T::zero())
}

/// Column-pivoted QR with a relative noise floor: columns whose
/// original norm falls below `rel_floor` times the largest column norm
/// are treated as negligible and never pivoted. Orthonormalization
/// would otherwise amplify such columns to unit scale and hand their
/// noise to the interpolation at O(1).
pub(crate) fn qr_cp_with_floor<T: Scalar>(a: &Array2<T>, rel_floor: T) -> QrCp<T> {
    let (m, n) = a.dim();
    let kmax = m.min(n);
    let mut r = a.clone();
    let mut piv: Vec<usize> = (0..n).collect();
    // Householder reflectors stored as (start row, v, beta).
    let mut reflectors: Vec<(usize, Array1<T>, T)> = Vec::with_capacity(kmax);

    // Dependence is judged per column against its own original norm:
    // column magnitudes can legitimately span hundreds of orders of
    // magnitude (fibers of sharply concentrated densities), and a tiny
    // independent column must survive the dependence test. The global
    // floor is a separate, caller-chosen relevance cut.
    let eps_scale = T::from_usize(m.max(n)).unwrap() * T::epsilon();
    let original_norms: Vec<T> = (0..n).map(|j| col_norm(&r, 0, j)).collect();
    let global_max = original_norms
        .iter()
        .fold(T::zero(), |acc, &nrm| acc.max(nrm));
    let floor = rel_floor * global_max;
    let mut col_tols: Vec<T> = original_norms
        .iter()
        .map(|&nrm| (eps_scale * nrm).max(floor))
        .collect();

    let mut rank = 0usize;
    for k in 0..kmax {
        // Column pivot: the largest remaining residual among columns
        // still counted as independent.
        let mut best_j = None;
        let mut best_norm = T::zero();
        for j in k..n {
            let nrm = col_norm(&r, k, j);
            if nrm <= col_tols[j] || nrm == T::zero() {
                continue;
            }
            if best_j.is_none() || nrm > best_norm {
                best_norm = nrm;
                best_j = Some(j);
            }
        }
        let Some(best_j) = best_j else {
            break;
        };
        if best_j != k {
            swap_cols(&mut r, k, best_j);
            piv.swap(k, best_j);
            col_tols.swap(k, best_j);
        }

        // Householder vector for the trailing part of column k. The
        // reflector is invariant under scaling of v, so v is normalized
        // by its largest entry before forming v^T v: column magnitudes
        // down at the subnormal boundary would otherwise underflow the
        // norm and overflow beta.
        let x0 = r[[k, k]];
        let alpha = if x0 >= T::zero() {
            -best_norm
        } else {
            best_norm
        };
        let mut v = Array1::zeros(m - k);
        for i in k..m {
            v[i - k] = r[[i, k]];
        }
        v[0] -= alpha;
        let vmax = v.iter().fold(T::zero(), |acc, x| acc.max(x.abs()));
        if vmax > T::zero() {
            for x in v.iter_mut() {
                *x /= vmax;
            }
            let vtv = v.iter().map(|&x| x * x).sum::<T>();
            let beta = (T::one() + T::one()) / vtv;
            // Apply the reflector to the trailing block.
            for j in k..n {
                let mut dot = T::zero();
                for i in k..m {
                    dot += v[i - k] * r[[i, j]];
                }
                let scale = beta * dot;
                for i in k..m {
                    let upd = scale * v[i - k];
                    r[[i, j]] -= upd;
                }
            }
            reflectors.push((k, v, beta));
        } else {
            reflectors.push((k, v, T::zero()));
        }
        r[[k, k]] = alpha;
        for i in (k + 1)..m {
            r[[i, k]] = T::zero();
        }
        rank = k + 1;
    }

    // Thin Q: apply the reflectors in reverse to the leading identity columns.
    let mut q = Array2::zeros((m, rank));
    for j in 0..rank {
        q[[j, j]] = T::one();
    }
    for (k, v, beta) in reflectors.iter().take(rank).rev() {
        if *beta == T::zero() {
            continue;
        }
        for j in 0..rank {
            let mut dot = T::zero();
            for i in *k..m {
                dot += v[i - *k] * q[[i, j]];
            }
            let scale = *beta * dot;
            for i in *k..m {
                let upd = scale * v[i - *k];
                q[[i, j]] -= upd;
            }
        }
    }

    let r_trim = r.slice(s![..rank, ..]).to_owned();
    QrCp {
        q,
        r: r_trim,
        piv,
        rank,
    }
}

/// Overflow/underflow-safe column norm: scaled by the largest entry.
fn col_norm<T: Scalar>(a: &Array2<T>, row_start: usize, j: usize) -> T {
    let mut amax = T::zero();
    for i in row_start..a.nrows() {
        amax = amax.max(a[[i, j]].abs());
    }
    if amax == T::zero() || !amax.is_finite() {
        return amax;
    }
    let mut s = T::zero();
    for i in row_start..a.nrows() {
        let x = a[[i, j]] / amax;
        s += x * x;
    }
    amax * s.sqrt()
}

fn swap_cols<T: Scalar>(a: &mut Array2<T>, j1: usize, j2: usize) {
    for i in 0..a.nrows() {
        let tmp = a[[i, j1]];
        a[[i, j1]] = a[[i, j2]];
        a[[i, j2]] = tmp;
    }
}

/// LU factorization with partial pivoting, in place.
/// Returns the permutation as original-row indices per pivot step.
fn lu_factor<T: Scalar>(a: &mut Array2<T>) -> Result<Vec<usize>> {
    let n = a.nrows();
    if a.ncols() != n {
        return Err(TtgoError::InvalidArgument(format!(
            "lu_factor needs a square matrix, got {}x{}",
            n,
            a.ncols()
        )));
    }
    let mut perm: Vec<usize> = (0..n).collect();
    for k in 0..n {
        let mut best = k;
        let mut best_mag = a[[k, k]].abs();
        for i in (k + 1)..n {
            let mag = a[[i, k]].abs();
            if mag > best_mag {
                best_mag = mag;
                best = i;
            }
        }
        if best_mag == T::zero() || !best_mag.is_finite() {
            return Err(TtgoError::PivotFailure(format!(
                "singular matrix at elimination step {k}"
            )));
        }
        if best != k {
            swap_rows(a, k, best);
            perm.swap(k, best);
        }
        let pivot = a[[k, k]];
        for i in (k + 1)..n {
            let factor = a[[i, k]] / pivot;
            a[[i, k]] = factor;
            for j in (k + 1)..n {
                let upd = factor * a[[k, j]];
                a[[i, j]] -= upd;
            }
        }
    }
    Ok(perm)
}

fn swap_rows<T: Scalar>(a: &mut Array2<T>, i1: usize, i2: usize) {
    for j in 0..a.ncols() {
        let tmp = a[[i1, j]];
        a[[i1, j]] = a[[i2, j]];
        a[[i2, j]] = tmp;
    }
}

/// Solves `A X = B` for square `A` (n x n) and `B` (n x m).
pub(crate) fn solve_multi<T: Scalar>(a: &Array2<T>, b: &Array2<T>) -> Result<Array2<T>> {
    let n = a.nrows();
    if b.nrows() != n {
        return Err(TtgoError::InvalidArgument(format!(
            "solve_multi shape mismatch: A is {}x{}, B has {} rows",
            n,
            a.ncols(),
            b.nrows()
        )));
    }
    let mut lu = a.clone();
    let perm = lu_factor(&mut lu)?;
    let m = b.ncols();
    let mut x = Array2::zeros((n, m));
    for (k, &src) in perm.iter().enumerate() {
        for j in 0..m {
            x[[k, j]] = b[[src, j]];
        }
    }
    // Forward substitution (unit lower-triangular L).
    for k in 0..n {
        for i in (k + 1)..n {
            let factor = lu[[i, k]];
            for j in 0..m {
                let upd = factor * x[[k, j]];
                x[[i, j]] -= upd;
            }
        }
    }
    // Back substitution (U).
    for k in (0..n).rev() {
        let pivot = lu[[k, k]];
        for j in 0..m {
            x[[k, j]] /= pivot;
        }
        for i in 0..k {
            let factor = lu[[i, k]];
            for j in 0..m {
                let upd = factor * x[[k, j]];
                x[[i, j]] -= upd;
            }
        }
    }
    Ok(x)
}

/// Row indices chosen by Gaussian elimination with partial pivoting on a
/// tall matrix (m x r). Used to seed maxvol with independent rows.
pub(crate) fn pivot_rows<T: Scalar>(a: &Array2<T>) -> Result<Vec<usize>> {
    let (m, r) = a.dim();
    if m < r {
        return Err(TtgoError::InvalidArgument(format!(
            "pivot_rows needs a tall matrix, got {m}x{r}"
        )));
    }
    let mut work = a.clone();
    let mut rows: Vec<usize> = (0..m).collect();
    for k in 0..r {
        let mut best = k;
        let mut best_mag = work[[k, k]].abs();
        for i in (k + 1)..m {
            let mag = work[[i, k]].abs();
            if mag > best_mag {
                best_mag = mag;
                best = i;
            }
        }
        if best_mag == T::zero() || !best_mag.is_finite() {
            return Err(TtgoError::PivotFailure(format!(
                "rank-deficient candidate matrix at column {k}"
            )));
        }
        if best != k {
            swap_rows(&mut work, k, best);
            rows.swap(k, best);
        }
        let pivot = work[[k, k]];
        for i in (k + 1)..m {
            let factor = work[[i, k]] / pivot;
            for j in k..r {
                let upd = factor * work[[k, j]];
                work[[i, j]] -= upd;
            }
        }
    }
    rows.truncate(r);
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::arr2;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    fn random_matrix(m: usize, n: usize, seed: u64) -> Array2<f64> {
        let mut rng = StdRng::seed_from_u64(seed);
        Array2::from_shape_fn((m, n), |_| rng.gen_range(-1.0..1.0))
    }

    #[test]
    fn qr_reconstructs_full_rank() {
        let a = random_matrix(20, 6, 1);
        let qr = qr_cp(&a);
        assert_eq!(qr.rank, 6);
        // Q^T Q = I
        let qtq = qr.q.t().dot(&qr.q);
        for i in 0..6 {
            for j in 0..6 {
                let expect = if i == j { 1.0 } else { 0.0 };
                assert!((qtq[[i, j]] - expect).abs() < 1e-12);
            }
        }
        // Q R reproduces the permuted A.
        let qr_prod = qr.q.dot(&qr.r);
        for j in 0..6 {
            for i in 0..20 {
                assert!((qr_prod[[i, j]] - a[[i, qr.piv[j]]]).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn qr_detects_rank_deficiency() {
        let left = random_matrix(30, 3, 2);
        let right = random_matrix(3, 8, 3);
        let a = left.dot(&right);
        let qr = qr_cp(&a);
        assert_eq!(qr.rank, 3);
    }

    #[test]
    fn solve_multi_roundtrip() {
        let a = random_matrix(5, 5, 4);
        let x_true = random_matrix(5, 3, 5);
        let b = a.dot(&x_true);
        let x = solve_multi(&a, &b).unwrap();
        for (xi, ti) in x.iter().zip(x_true.iter()) {
            assert!((xi - ti).abs() < 1e-10);
        }
    }

    #[test]
    fn solve_multi_rejects_singular() {
        let a = arr2(&[[1.0, 2.0], [2.0, 4.0]]);
        let b = arr2(&[[1.0], [1.0]]);
        assert!(matches!(
            solve_multi(&a, &b),
            Err(TtgoError::PivotFailure(_))
        ));
    }

    #[test]
    fn pivot_rows_picks_independent_rows() {
        let a = arr2(&[[1.0f64, 0.0], [1.0, 0.0], [0.0, 1.0], [1.0, 1.0]]);
        let rows = pivot_rows(&a).unwrap();
        assert_eq!(rows.len(), 2);
        assert_ne!(rows[0], rows[1]);
        let sub = arr2(&[
            [a[[rows[0], 0]], a[[rows[0], 1]]],
            [a[[rows[1], 0]], a[[rows[1], 1]]],
        ]);
        let det = sub[[0, 0]] * sub[[1, 1]] - sub[[0, 1]] * sub[[1, 0]];
        assert!(det.abs() > 0.5);
    }
}
