//! Rectangular-domain discretization: per-dimension node arrays, the
//! index set they induce, and the bijection between multi-indices and
//! points. Indices are 0-based throughout.

use serde::{Deserialize, Serialize};

use crate::error::{Result, TtgoError};
use crate::scalar::Scalar;

/// Axis-aligned box `[lower_k, upper_k]` per dimension.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Domain<T> {
    lower: Vec<T>,
    upper: Vec<T>,
}

impl<T: Scalar> Domain<T> {
    pub fn new(lower: Vec<T>, upper: Vec<T>) -> Result<Self> {
        if lower.is_empty() || lower.len() != upper.len() {
            return Err(TtgoError::InvalidArgument(format!(
                "domain bounds must be non-empty and equal length, got {} and {}",
                lower.len(),
                upper.len()
            )));
        }
        for (k, (lo, hi)) in lower.iter().zip(upper.iter()).enumerate() {
            if !(lo.is_finite() && hi.is_finite()) || *lo >= *hi {
                return Err(TtgoError::InvalidArgument(format!(
                    "domain dimension {k} must satisfy lower < upper with finite bounds"
                )));
            }
        }
        Ok(Self { lower, upper })
    }

    /// Cube `[lo, hi]^d`.
    pub fn cube(lo: T, hi: T, d: usize) -> Result<Self> {
        Self::new(vec![lo; d], vec![hi; d])
    }

    /// Concatenation of two boxes (task box x decision box).
    pub fn concat(&self, other: &Domain<T>) -> Domain<T> {
        let mut lower = self.lower.clone();
        let mut upper = self.upper.clone();
        lower.extend_from_slice(&other.lower);
        upper.extend_from_slice(&other.upper);
        Domain { lower, upper }
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    pub fn lower(&self) -> &[T] {
        &self.lower
    }

    pub fn upper(&self) -> &[T] {
        &self.upper
    }

    /// Component-wise clamp of a point into the box.
    pub fn clamp(&self, x: &[T]) -> Vec<T> {
        x.iter()
            .zip(self.lower.iter().zip(self.upper.iter()))
            .map(|(&v, (&lo, &hi))| v.max(lo).min(hi))
            .collect()
    }

    pub fn contains(&self, x: &[T]) -> bool {
        x.len() == self.dim()
            && x.iter()
                .zip(self.lower.iter().zip(self.upper.iter()))
                .all(|(&v, (&lo, &hi))| v >= lo && v <= hi)
    }

    /// Box over dimensions `at..`.
    pub fn tail(&self, at: usize) -> Result<Domain<T>> {
        if at >= self.dim() {
            return Err(TtgoError::InvalidArgument(format!(
                "tail({at}) of a {}-dimensional domain",
                self.dim()
            )));
        }
        Domain::new(self.lower[at..].to_vec(), self.upper[at..].to_vec())
    }

    /// Box over dimensions `..at`.
    pub fn head(&self, at: usize) -> Result<Domain<T>> {
        if at == 0 || at > self.dim() {
            return Err(TtgoError::InvalidArgument(format!(
                "head({at}) of a {}-dimensional domain",
                self.dim()
            )));
        }
        Domain::new(self.lower[..at].to_vec(), self.upper[..at].to_vec())
    }
}

/// Split of the joint variables into `d1` leading task parameters and
/// `d2` trailing decision variables.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TaskSplit {
    pub d1: usize,
    pub d2: usize,
}

impl TaskSplit {
    pub fn new(d1: usize, d2: usize) -> Result<Self> {
        if d2 == 0 {
            return Err(TtgoError::InvalidArgument(
                "task split needs at least one decision dimension".into(),
            ));
        }
        Ok(Self { d1, d2 })
    }

    pub fn total(&self) -> usize {
        self.d1 + self.d2
    }
}

/// Per-dimension strictly increasing node arrays.
///
/// Immutable after construction; shared freely across threads.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Grid<T> {
    nodes: Vec<Vec<T>>,
}

impl<T: Scalar> Grid<T> {
    /// Uniform discretization of `domain` with `counts[k]` nodes per
    /// dimension, endpoints included.
    pub fn uniform(domain: &Domain<T>, counts: &[usize]) -> Result<Self> {
        if counts.len() != domain.dim() {
            return Err(TtgoError::InvalidGrid(format!(
                "got {} counts for a {}-dimensional domain",
                counts.len(),
                domain.dim()
            )));
        }
        let mut nodes = Vec::with_capacity(counts.len());
        for (k, &n) in counts.iter().enumerate() {
            if n < 2 {
                return Err(TtgoError::InvalidGrid(format!(
                    "dimension {k} needs at least 2 nodes, got {n}"
                )));
            }
            let lo = domain.lower()[k];
            let hi = domain.upper()[k];
            let step = (hi - lo) / T::from_usize(n - 1).unwrap();
            let mut col = Vec::with_capacity(n);
            for i in 0..n {
                let v = if i == n - 1 {
                    hi
                } else {
                    lo + T::from_usize(i).unwrap() * step
                };
                col.push(v);
            }
            nodes.push(col);
        }
        Ok(Self { nodes })
    }

    /// Grid from explicit node arrays (strictly increasing, length >= 2).
    pub fn from_nodes(nodes: Vec<Vec<T>>) -> Result<Self> {
        if nodes.is_empty() {
            return Err(TtgoError::InvalidGrid("no dimensions".into()));
        }
        for (k, col) in nodes.iter().enumerate() {
            if col.len() < 2 {
                return Err(TtgoError::InvalidGrid(format!(
                    "dimension {k} needs at least 2 nodes, got {}",
                    col.len()
                )));
            }
            for w in col.windows(2) {
                if !(w[0] < w[1]) {
                    return Err(TtgoError::InvalidGrid(format!(
                        "dimension {k} nodes must be strictly increasing"
                    )));
                }
            }
            if col.iter().any(|v| !v.is_finite()) {
                return Err(TtgoError::InvalidGrid(format!(
                    "dimension {k} has non-finite nodes"
                )));
            }
        }
        Ok(Self { nodes })
    }

    pub fn dim(&self) -> usize {
        self.nodes.len()
    }

    /// Node counts per dimension.
    pub fn counts(&self) -> Vec<usize> {
        self.nodes.iter().map(Vec::len).collect()
    }

    pub fn nodes(&self, dim: usize) -> &[T] {
        &self.nodes[dim]
    }

    /// Bounding box spanned by the nodes.
    pub fn domain(&self) -> Domain<T> {
        Domain {
            lower: self.nodes.iter().map(|c| c[0]).collect(),
            upper: self.nodes.iter().map(|c| *c.last().unwrap()).collect(),
        }
    }

    /// The point associated with a multi-index.
    pub fn point(&self, index: &[usize]) -> Result<Vec<T>> {
        if index.len() != self.dim() {
            return Err(TtgoError::IndexOutOfRange(format!(
                "index has {} components, grid has {} dimensions",
                index.len(),
                self.dim()
            )));
        }
        index
            .iter()
            .zip(self.nodes.iter())
            .enumerate()
            .map(|(k, (&i, col))| {
                col.get(i).copied().ok_or_else(|| {
                    TtgoError::IndexOutOfRange(format!(
                        "component {k} is {i}, dimension has {} nodes",
                        col.len()
                    ))
                })
            })
            .collect()
    }

    /// Bracketing interval and barycentric weight for a 1-D value.
    ///
    /// Out-of-domain values are clamped to the boundary first. A value
    /// sitting exactly on a node returns weight 0 at that node (left
    /// convention), except the last node which is (len-2, 1).
    pub fn locate(&self, dim: usize, value: T) -> Result<(usize, T)> {
        if value.is_nan() {
            return Err(TtgoError::InvalidValue(format!(
                "NaN query in dimension {dim}"
            )));
        }
        let col = &self.nodes[dim];
        let n = col.len();
        if value <= col[0] {
            return Ok((0, T::zero()));
        }
        if value >= col[n - 1] {
            return Ok((n - 2, T::one()));
        }
        // partition_point: first node strictly greater than value.
        let hi = col.partition_point(|&node| node <= value);
        let i = hi - 1;
        let w = (value - col[i]) / (col[i + 1] - col[i]);
        Ok((i, w.max(T::zero()).min(T::one())))
    }

    /// Nearest-node multi-index for a point (used to snap refined
    /// solutions back onto the grid for diagnostics).
    pub fn nearest_index(&self, point: &[T]) -> Result<Vec<usize>> {
        if point.len() != self.dim() {
            return Err(TtgoError::IndexOutOfRange(format!(
                "point has {} components, grid has {} dimensions",
                point.len(),
                self.dim()
            )));
        }
        let mut idx = Vec::with_capacity(self.dim());
        for (k, &v) in point.iter().enumerate() {
            let (i, w) = self.locate(k, v)?;
            idx.push(if w > T::from_f64_c(0.5) { i + 1 } else { i });
        }
        Ok(idx)
    }

    /// Grid over the trailing dimensions `at..`.
    pub fn tail(&self, at: usize) -> Result<Grid<T>> {
        if at >= self.dim() {
            return Err(TtgoError::InvalidArgument(format!(
                "tail({at}) of a {}-dimensional grid",
                self.dim()
            )));
        }
        Ok(Grid {
            nodes: self.nodes[at..].to_vec(),
        })
    }

    /// Total number of grid points (saturating; diagnostic only).
    pub fn total_points(&self) -> u128 {
        self.nodes
            .iter()
            .map(|c| c.len() as u128)
            .fold(1u128, |acc, n| acc.saturating_mul(n))
    }
}
