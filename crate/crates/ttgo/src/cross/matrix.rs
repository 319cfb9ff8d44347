//! Matrix skeleton (cross) decomposition: reconstruct a low-rank matrix
//! from `r` of its columns, `r` of its rows, and the inverse of their
//! intersection, with the index sets located by alternating maxvol
//! passes over QR factors.

use ndarray::Array2;

use crate::cross::maxvol::maxvol;
use crate::cross::CrossOptions;
use crate::error::{Result, TtgoError};
use crate::linalg::{qr_cp_with_floor, solve_multi};
use crate::scalar::Scalar;

/// Skeleton factors `P ~= cols * pivot_inv * rows`.
///
/// In the QR-stabilized fallback (singular intersection submatrix),
/// `cols` holds an orthonormal basis of the selected columns instead of
/// raw matrix columns; the factored product is unchanged.
#[derive(Debug, Clone)]
pub struct Skeleton<T> {
    pub cols: Array2<T>,
    pub pivot_inv: Array2<T>,
    pub rows: Array2<T>,
    pub row_indices: Vec<usize>,
    pub col_indices: Vec<usize>,
    pub stabilized: bool,
}

impl<T: Scalar> Skeleton<T> {
    pub fn rank(&self) -> usize {
        self.pivot_inv.nrows()
    }

    pub fn eval(&self, i: usize, j: usize) -> T {
        let r = self.rank();
        let mut acc = T::zero();
        for a in 0..r {
            if self.cols[[i, a]] == T::zero() {
                continue;
            }
            let mut inner = T::zero();
            for b in 0..r {
                inner += self.pivot_inv[[a, b]] * self.rows[[b, j]];
            }
            acc += self.cols[[i, a]] * inner;
        }
        acc
    }

    pub fn reconstruct(&self) -> Array2<T> {
        self.cols.dot(&self.pivot_inv).dot(&self.rows)
    }
}

pub fn matrix_cross<T, F>(
    oracle: F,
    shape: (usize, usize),
    rank: usize,
    opts: &CrossOptions,
) -> Result<Skeleton<T>>
where
    T: Scalar,
    F: Fn(usize, usize) -> T + Sync,
{
    let (n1, n2) = shape;
    if rank == 0 || rank > n1.min(n2) {
        return Err(TtgoError::InvalidArgument(format!(
            "rank {rank} not in 1..=min({n1}, {n2})"
        )));
    }

    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(opts.seed);

    // Column init: multinomial over column weights estimated on a small
    // random row subset, without replacement.
    let probe_rows = sample_distinct(&mut rng, n1, (rank + 8).min(n1));
    let mut col_weights = vec![T::zero(); n2];
    for &i in &probe_rows {
        for (j, w) in col_weights.iter_mut().enumerate() {
            let v = oracle(i, j);
            if !v.is_finite() {
                return Err(TtgoError::PoisonedEvaluation { index: vec![i, j] });
            }
            *w += v * v;
        }
    }
    let mut col_set = multinomial_without_replacement(&mut rng, &col_weights, rank);
    let mut row_set: Vec<usize> = Vec::new();

    let max_iters = opts.n_sweeps.max(2);
    for _ in 0..max_iters {
        // Rows from the current columns.
        let col_block = eval_block(&oracle, n1, &col_set, true)?;
        let qr = qr_cp_with_floor(&col_block, T::from_f64_c(opts.column_floor));
        if qr.rank < col_set.len() {
            col_set = qr.piv[..qr.rank].iter().map(|&p| col_set[p]).collect();
        }
        let q = if qr.rank < col_set.len() {
            let block = eval_block(&oracle, n1, &col_set, true)?;
            qr_cp_with_floor(&block, T::from_f64_c(opts.column_floor)).q
        } else {
            qr.q
        };
        let new_rows = maxvol(&q, T::from_f64_c(opts.maxvol_delta))?;

        // Columns from the current rows.
        let row_block = eval_block(&oracle, n2, &new_rows, false)?;
        let qr2 = qr_cp_with_floor(&row_block, T::from_f64_c(opts.column_floor));
        let kept_rows: Vec<usize>;
        let q2;
        if qr2.rank < new_rows.len() {
            kept_rows = qr2.piv[..qr2.rank].iter().map(|&p| new_rows[p]).collect();
            let block = eval_block(&oracle, n2, &kept_rows, false)?;
            q2 = qr_cp_with_floor(&block, T::from_f64_c(opts.column_floor)).q;
        } else {
            kept_rows = new_rows;
            q2 = qr2.q;
        }
        let new_cols = maxvol(&q2, T::from_f64_c(opts.maxvol_delta))?;

        let converged = same_set(&kept_rows, &row_set) && same_set(&new_cols, &col_set);
        row_set = kept_rows;
        col_set = new_cols;
        if converged {
            break;
        }
    }

    // Assemble the skeleton from actual matrix data.
    let cols = eval_block(&oracle, n1, &col_set, true)?;
    let rows_block = eval_block(&oracle, n2, &row_set, false)?; // n2 x r, transposed below
    let r = row_set.len();
    let mut pivot = Array2::zeros((r, r));
    for (a, &i) in row_set.iter().enumerate() {
        for (b, &j) in col_set.iter().enumerate() {
            pivot[[a, b]] = oracle(i, j);
        }
    }
    let rows = rows_block.t().to_owned();
    let eye = Array2::from_shape_fn((r, r), |(i, j)| if i == j { T::one() } else { T::zero() });
    match solve_multi(&pivot, &eye) {
        Ok(pivot_inv) => Ok(Skeleton {
            cols,
            pivot_inv,
            rows,
            row_indices: row_set,
            col_indices: col_set,
            stabilized: false,
        }),
        Err(_) => {
            // Singular intersection: orthonormalize the column block and
            // interpolate through its selected rows instead.
            let q = qr_cp_with_floor(&cols, T::from_f64_c(opts.column_floor)).q;
            let mut q_sub = Array2::zeros((r.min(q.ncols()), q.ncols()));
            for (a, &i) in row_set.iter().enumerate().take(q_sub.nrows()) {
                for b in 0..q.ncols() {
                    q_sub[[a, b]] = q[[i, b]];
                }
            }
            let eye_q = Array2::from_shape_fn((q_sub.nrows(), q_sub.nrows()), |(i, j)| {
                if i == j {
                    T::one()
                } else {
                    T::zero()
                }
            });
            let pivot_inv = solve_multi(&q_sub, &eye_q)?;
            Ok(Skeleton {
                cols: q,
                pivot_inv,
                rows,
                row_indices: row_set,
                col_indices: col_set,
                stabilized: true,
            })
        }
    }
}

/// Evaluates a block of full fibers: columns (`n x picked`) when
/// `by_cols`, otherwise rows laid out as `n x picked`.
fn eval_block<T, F>(oracle: &F, n: usize, picked: &[usize], by_cols: bool) -> Result<Array2<T>>
where
    T: Scalar,
    F: Fn(usize, usize) -> T + Sync,
{
    let mut block = Array2::zeros((n, picked.len()));
    for (slot, &fixed) in picked.iter().enumerate() {
        for i in 0..n {
            let v = if by_cols {
                oracle(i, fixed)
            } else {
                oracle(fixed, i)
            };
            if !v.is_finite() {
                let index = if by_cols {
                    vec![i, fixed]
                } else {
                    vec![fixed, i]
                };
                return Err(TtgoError::PoisonedEvaluation { index });
            }
            block[[i, slot]] = v;
        }
    }
    Ok(block)
}

fn same_set(a: &[usize], b: &[usize]) -> bool {
    if a.len() != b.len() {
        return false;
    }
    let mut a2 = a.to_vec();
    let mut b2 = b.to_vec();
    a2.sort_unstable();
    b2.sort_unstable();
    a2 == b2
}

pub(crate) fn sample_distinct<R: rand::Rng>(rng: &mut R, n: usize, k: usize) -> Vec<usize> {
    use rand::seq::SliceRandom;
    let mut all: Vec<usize> = (0..n).collect();
    all.shuffle(rng);
    all.truncate(k);
    all
}

/// Draws `k` distinct indices with probability proportional to weights;
/// falls back to uniform over the remainder when the mass runs out.
pub(crate) fn multinomial_without_replacement<T: Scalar, R: rand::Rng>(
    rng: &mut R,
    weights: &[T],
    k: usize,
) -> Vec<usize> {
    let mut remaining: Vec<Option<T>> = weights.iter().map(|&w| Some(w.max(T::zero()))).collect();
    let mut picked = Vec::with_capacity(k);
    for _ in 0..k.min(weights.len()) {
        let total: T = remaining.iter().flatten().copied().sum();
        let choice = if total > T::zero() {
            let u = T::from_f64_c(rng.gen::<f64>()) * total;
            let mut acc = T::zero();
            let mut sel = None;
            for (j, w) in remaining.iter().enumerate() {
                let w = match w {
                    Some(w) if *w > T::zero() => *w,
                    _ => continue,
                };
                acc += w;
                if u <= acc {
                    sel = Some(j);
                    break;
                }
            }
            sel.unwrap_or_else(|| {
                remaining
                    .iter()
                    .enumerate()
                    .rev()
                    .find_map(|(j, w)| match w {
                        Some(w) if *w > T::zero() => Some(j),
                        _ => None,
                    })
                    .expect("positive total implies a positive weight")
            })
        } else {
            // No signal left: uniform over not-yet-picked indices.
            let open: Vec<usize> = remaining
                .iter()
                .enumerate()
                .filter(|(_, w)| w.is_some())
                .map(|(j, _)| j)
                .collect();
            open[rng.gen_range(0..open.len())]
        };
        picked.push(choice);
        remaining[choice] = None;
    }
    picked
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    fn opts(seed: u64) -> CrossOptions {
        CrossOptions {
            seed,
            ..CrossOptions::default()
        }
    }

    #[test]
    fn rank_one_exact() {
        let u = [1.0f64, 2.0];
        let v = [3.0f64, 4.0];
        let skel = matrix_cross(|i, j| u[i] * v[j], (2, 2), 1, &opts(3)).unwrap();
        let rec = skel.reconstruct();
        for i in 0..2 {
            for j in 0..2 {
                assert!((rec[[i, j]] - u[i] * v[j]).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn random_rank3_exact() {
        let mut rng = StdRng::seed_from_u64(5);
        let left = Array2::from_shape_fn((50, 3), |_| rng.gen_range(-1.0..1.0f64));
        let right = Array2::from_shape_fn((3, 40), |_| rng.gen_range(-1.0..1.0f64));
        let dense = left.dot(&right);
        let skel = matrix_cross(|i, j| dense[[i, j]], (50, 40), 3, &opts(11)).unwrap();
        let rec = skel.reconstruct();
        let mut max_err = 0.0f64;
        for i in 0..50 {
            for j in 0..40 {
                max_err = max_err.max((rec[[i, j]] - dense[[i, j]]).abs());
            }
        }
        assert!(max_err < 1e-10, "max abs error {max_err}");
    }

    #[test]
    fn quasi_optimal_under_noise() {
        let mut rng = StdRng::seed_from_u64(9);
        let left = Array2::from_shape_fn((50, 3), |_| rng.gen_range(-1.0..1.0f64));
        let right = Array2::from_shape_fn((3, 40), |_| rng.gen_range(-1.0..1.0f64));
        let mut dense = left.dot(&right);
        for v in dense.iter_mut() {
            *v += rng.gen_range(-1e-6..1e-6);
        }
        let skel = matrix_cross(|i, j| dense[[i, j]], (50, 40), 3, &opts(13)).unwrap();
        let err = &dense - &skel.reconstruct();
        let spectral_err = top_singular_values(&err, 1)[0];
        let sigma4 = top_singular_values(&dense, 4)[3];
        // Quasi-optimality bound (r + 1)^2 * sigma_{r+1}.
        assert!(
            spectral_err <= 16.0 * sigma4,
            "spectral error {spectral_err} vs bound {}",
            16.0 * sigma4
        );
    }

    #[test]
    fn rank_capped_on_degenerate_matrix() {
        // Rank-2 matrix asked for rank 3: intersection would be
        // singular; the trim/stabilize path must keep the product finite.
        let mut rng = StdRng::seed_from_u64(21);
        let left = Array2::from_shape_fn((20, 2), |_| rng.gen_range(-1.0..1.0f64));
        let right = Array2::from_shape_fn((2, 20), |_| rng.gen_range(-1.0..1.0f64));
        let dense = left.dot(&right);
        let skel = matrix_cross(|i, j| dense[[i, j]], (20, 20), 3, &opts(17)).unwrap();
        let rec = skel.reconstruct();
        for i in 0..20 {
            for j in 0..20 {
                assert!((rec[[i, j]] - dense[[i, j]]).abs() < 1e-9);
            }
        }
    }

    /// Test oracle: top singular values by subspace iteration.
    fn top_singular_values(a: &Array2<f64>, k: usize) -> Vec<f64> {
        let (m, n) = a.dim();
        let k = k.min(m).min(n);
        let mut rng = StdRng::seed_from_u64(999);
        let mut x = Array2::from_shape_fn((n, k), |_| rng.gen_range(-1.0..1.0));
        for _ in 0..300 {
            let y = a.t().dot(&a.dot(&x));
            x = crate::linalg::qr_cp(&y).q;
        }
        let bx = a.t().dot(&a.dot(&x));
        let rayleigh = x.t().dot(&bx);
        let mut vals: Vec<f64> = (0..k).map(|i| rayleigh[[i, i]].max(0.0).sqrt()).collect();
        vals.sort_by(|p, q| q.partial_cmp(p).unwrap());
        vals
    }
}
