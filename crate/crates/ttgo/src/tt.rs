//! Tensor-train storage, element and continuous evaluation, and
//! conditioning on leading variables.
//!
//! A d-dimensional tensor train is an ordered list of third-order cores,
//! core k shaped `(r_{k-1}, n_k, r_k)` with boundary ranks
//! `r_0 = r_d = 1`. An element is the product of one matrix slice per
//! core; a continuous value interpolates each core linearly between the
//! two slices bracketing the query coordinate.

use ndarray::{Array2, Array3, ArrayD};

use crate::error::{Result, TtgoError};
use crate::grid::{Grid, TaskSplit};
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq)]
pub struct TensorTrain<T> {
    cores: Vec<Array3<T>>,
}

impl<T: Scalar> TensorTrain<T> {
    /// Builds a tensor train, validating the rank chain and finiteness.
    pub fn new(cores: Vec<Array3<T>>) -> Result<Self> {
        if cores.is_empty() {
            return Err(TtgoError::MalformedModel("no cores".into()));
        }
        if cores[0].dim().0 != 1 {
            return Err(TtgoError::MalformedModel(format!(
                "first core has left rank {}, expected 1",
                cores[0].dim().0
            )));
        }
        if cores.last().unwrap().dim().2 != 1 {
            return Err(TtgoError::MalformedModel(format!(
                "last core has right rank {}, expected 1",
                cores.last().unwrap().dim().2
            )));
        }
        for k in 1..cores.len() {
            let prev = cores[k - 1].dim().2;
            let next = cores[k].dim().0;
            if prev != next {
                return Err(TtgoError::MalformedModel(format!(
                    "rank mismatch between cores {} and {}: {} vs {}",
                    k - 1,
                    k,
                    prev,
                    next
                )));
            }
        }
        for (k, core) in cores.iter().enumerate() {
            if core.dim().1 == 0 || core.dim().0 == 0 || core.dim().2 == 0 {
                return Err(TtgoError::MalformedModel(format!(
                    "core {k} has a zero-sized mode: {:?}",
                    core.dim()
                )));
            }
            if core.iter().any(|v| !v.is_finite()) {
                return Err(TtgoError::MalformedModel(format!(
                    "core {k} contains non-finite entries"
                )));
            }
        }
        Ok(Self { cores })
    }

    pub fn dim(&self) -> usize {
        self.cores.len()
    }

    pub fn cores(&self) -> &[Array3<T>] {
        &self.cores
    }

    /// Node counts per dimension.
    pub fn mode_sizes(&self) -> Vec<usize> {
        self.cores.iter().map(|c| c.dim().1).collect()
    }

    /// Rank chain `(r_0, ..., r_d)`, boundaries included.
    pub fn ranks(&self) -> Vec<usize> {
        let mut r = Vec::with_capacity(self.cores.len() + 1);
        r.push(1);
        r.extend(self.cores.iter().map(|c| c.dim().2));
        r
    }

    pub fn max_rank(&self) -> usize {
        self.cores.iter().map(|c| c.dim().2.max(c.dim().0)).max().unwrap_or(1)
    }

    /// Total number of stored parameters.
    pub fn num_params(&self) -> usize {
        self.cores.iter().map(|c| c.len()).sum()
    }

    /// Element at a multi-index: the left-to-right product of slices,
    /// accumulated as a row vector so intermediates stay rank-sized.
    pub fn eval_index(&self, index: &[usize]) -> Result<T> {
        if index.len() != self.dim() {
            return Err(TtgoError::IndexOutOfRange(format!(
                "index has {} components, model has {} dimensions",
                index.len(),
                self.dim()
            )));
        }
        let mut v = vec![T::one()];
        for (k, (&i, core)) in index.iter().zip(self.cores.iter()).enumerate() {
            let (rl, n, rr) = core.dim();
            if i >= n {
                return Err(TtgoError::IndexOutOfRange(format!(
                    "component {k} is {i}, mode has {n} nodes"
                )));
            }
            let mut next = vec![T::zero(); rr];
            for a in 0..rl {
                let va = v[a];
                if va == T::zero() {
                    continue;
                }
                for (b, slot) in next.iter_mut().enumerate() {
                    *slot += va * core[[a, i, b]];
                }
            }
            v = next;
        }
        Ok(v[0])
    }

    /// Continuous evaluation at a point: each core slice is interpolated
    /// linearly between the bracketing node slices. Points are clamped to
    /// the grid's bounding box.
    pub fn eval_continuous(&self, grid: &Grid<T>, point: &[T]) -> Result<T> {
        self.check_grid(grid)?;
        if point.len() != self.dim() {
            return Err(TtgoError::IndexOutOfRange(format!(
                "point has {} components, model has {} dimensions",
                point.len(),
                self.dim()
            )));
        }
        let mut v = vec![T::one()];
        for (k, (&x, core)) in point.iter().zip(self.cores.iter()).enumerate() {
            let (rl, _, rr) = core.dim();
            let (i, w) = grid.locate(k, x)?;
            let wl = T::one() - w;
            let mut next = vec![T::zero(); rr];
            for a in 0..rl {
                let va = v[a];
                if va == T::zero() {
                    continue;
                }
                for (b, slot) in next.iter_mut().enumerate() {
                    *slot += va * (wl * core[[a, i, b]] + w * core[[a, i + 1, b]]);
                }
            }
            v = next;
        }
        Ok(v[0])
    }

    /// Conditions the model on values for the leading `split.d1`
    /// dimensions. The sliced (interpolated) leading cores collapse into
    /// a boundary row that is folded into core `d1`, so the result is a
    /// valid tensor train over the trailing `split.d2` dimensions.
    pub fn condition(&self, grid: &Grid<T>, split: &TaskSplit, task_point: &[T]) -> Result<Self> {
        self.check_grid(grid)?;
        if split.total() != self.dim() {
            return Err(TtgoError::InvalidArgument(format!(
                "task split covers {} dimensions, model has {}",
                split.total(),
                self.dim()
            )));
        }
        if split.d1 >= self.dim() {
            return Err(TtgoError::EmptyConditionedModel(self.dim()));
        }
        if task_point.len() != split.d1 {
            return Err(TtgoError::InvalidArgument(format!(
                "task point has {} components, split.d1 is {}",
                task_point.len(),
                split.d1
            )));
        }
        if split.d1 == 0 {
            return Ok(self.clone());
        }

        // Boundary row accumulated through the sliced leading cores.
        let mut b = vec![T::one()];
        for (k, (&x, core)) in task_point.iter().zip(self.cores.iter()).enumerate() {
            let (rl, _, rr) = core.dim();
            let (i, w) = grid.locate(k, x)?;
            let wl = T::one() - w;
            let mut next = vec![T::zero(); rr];
            for a in 0..rl {
                let ba = b[a];
                if ba == T::zero() {
                    continue;
                }
                for (c, slot) in next.iter_mut().enumerate() {
                    *slot += ba * (wl * core[[a, i, c]] + w * core[[a, i + 1, c]]);
                }
            }
            b = next;
        }

        // Fold the boundary row into the first free core.
        let head = &self.cores[split.d1];
        let (rl, n, rr) = head.dim();
        let mut folded = Array3::zeros((1, n, rr));
        for x in 0..n {
            for c in 0..rr {
                let mut acc = T::zero();
                for a in 0..rl {
                    acc += b[a] * head[[a, x, c]];
                }
                folded[[0, x, c]] = acc;
            }
        }
        let mut cores = Vec::with_capacity(split.d2);
        cores.push(folded);
        cores.extend(self.cores[split.d1 + 1..].iter().cloned());
        TensorTrain::new(cores)
    }

    /// Exact tensor-train factorization of a small dense tensor via
    /// sequential QR. Intended for test oracles and diagnostics; the
    /// cost is proportional to the full tensor size.
    pub fn from_dense(dense: &ArrayD<T>) -> Result<Self> {
        let shape: Vec<usize> = dense.shape().to_vec();
        if shape.is_empty() || shape.iter().any(|&n| n == 0) {
            return Err(TtgoError::InvalidArgument(
                "dense tensor must have at least one element".into(),
            ));
        }
        let d = shape.len();
        let flat: Vec<T> = dense.iter().copied().collect();
        if flat.iter().any(|v| !v.is_finite()) {
            return Err(TtgoError::InvalidValue(
                "dense tensor contains non-finite entries".into(),
            ));
        }
        let total = flat.len();
        let mut work = Array2::from_shape_vec((shape[0], total / shape[0]), flat)
            .expect("shape product matches");
        let mut r_prev = 1usize;
        let mut cores = Vec::with_capacity(d);
        for k in 0..d - 1 {
            let (m, n) = work.dim();
            let qr = crate::linalg::qr_cp(&work);
            let (q, rank) = if qr.rank == 0 {
                // All-zero block: keep a single zero column so the chain
                // stays well-formed and the product is exactly zero.
                (Array2::zeros((m, 1)), 1)
            } else {
                (qr.q, qr.rank)
            };
            let mut r_unperm = Array2::zeros((rank, n));
            if qr.rank > 0 {
                for j in 0..n {
                    let dst = qr.piv[j];
                    for i in 0..rank {
                        r_unperm[[i, dst]] = qr.r[[i, j]];
                    }
                }
            }
            let core = reshape_matrix_to_core(&q, r_prev, shape[k], rank);
            cores.push(core);
            let next_n = n / shape[k + 1];
            work = Array2::from_shape_vec(
                (rank * shape[k + 1], next_n),
                r_unperm.iter().copied().collect(),
            )
            .expect("reshape preserves element count");
            r_prev = rank;
        }
        let (m, n) = work.dim();
        debug_assert_eq!(m, r_prev * shape[d - 1]);
        debug_assert_eq!(n, 1);
        cores.push(reshape_matrix_to_core(&work, r_prev, shape[d - 1], 1));
        TensorTrain::new(cores)
    }

    /// Dense materialization by evaluating every index. Test oracle and
    /// diagnostic for small mode sizes only.
    pub fn to_dense(&self) -> Result<ArrayD<T>> {
        let shape = self.mode_sizes();
        let mut out = ArrayD::zeros(shape.clone());
        for idx in index_iter(&shape) {
            let v = self.eval_index(&idx)?;
            out[idx.as_slice()] = v;
        }
        Ok(out)
    }

    fn check_grid(&self, grid: &Grid<T>) -> Result<()> {
        if grid.counts() != self.mode_sizes() {
            return Err(TtgoError::MalformedModel(format!(
                "grid counts {:?} do not match model mode sizes {:?}",
                grid.counts(),
                self.mode_sizes()
            )));
        }
        Ok(())
    }
}

fn reshape_matrix_to_core<T: Scalar>(
    mat: &Array2<T>,
    rl: usize,
    n: usize,
    rr: usize,
) -> Array3<T> {
    debug_assert_eq!(mat.dim(), (rl * n, rr));
    let mut core = Array3::zeros((rl, n, rr));
    for a in 0..rl {
        for x in 0..n {
            for b in 0..rr {
                core[[a, x, b]] = mat[[a * n + x, b]];
            }
        }
    }
    core
}

/// Row-major iterator over all multi-indices of a shape.
pub fn index_iter(shape: &[usize]) -> impl Iterator<Item = Vec<usize>> + '_ {
    let total: usize = shape.iter().product();
    let mut current = vec![0usize; shape.len()];
    let mut emitted = 0usize;
    std::iter::from_fn(move || {
        if emitted >= total {
            return None;
        }
        let out = current.clone();
        emitted += 1;
        for k in (0..shape.len()).rev() {
            current[k] += 1;
            if current[k] < shape[k] {
                break;
            }
            current[k] = 0;
        }
        Some(out)
    })
}
