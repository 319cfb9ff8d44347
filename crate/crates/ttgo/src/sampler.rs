//! Exact and prioritized sampling from the unnormalized distribution
//! induced by a tensor train, without ever forming the normalization
//! constant.
//!
//! A backward pass reduces the marginalizing summations to per-core
//! column sums (the suffix vectors). Sampling then walks the dimensions
//! left to right: each sample keeps a running prefix row, forms the
//! one-dimensional conditional from the prefix and the suffix vector,
//! sharpens it by the priority exponent `1 / (1 - alpha + eps)`, and
//! draws a node by inverse CDF. `alpha = 0` draws exactly from the
//! distribution; `alpha -> 1` saturates toward the greedy mode path.

use ndarray::{Array2, Array3};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Result, TtgoError};
use crate::grid::Grid;
use crate::scalar::Scalar;
use crate::tt::TensorTrain;

const CHUNK: usize = 128;

/// Immutable sampling state: the model plus precomputed suffix vectors
/// and per-dimension conditional tables. Batches may be drawn from many
/// threads; each sample has its own counter-derived RNG stream, so
/// results do not depend on scheduling.
#[derive(Debug, Clone)]
pub struct TtSampler<T> {
    tt: TensorTrain<T>,
    /// suffix[k] has length r_k; suffix[d] = [1].
    suffix: Vec<Vec<T>>,
    /// pi_t[k] is (r_k x n_k): column x holds the core-times-suffix
    /// vector for node x of dimension k.
    pi_t: Vec<Array2<T>>,
    /// Node-major copies of the cores, (n_k, r_k, r_{k+1}): the prefix
    /// update reads one contiguous slice per drawn node instead of a
    /// strided gather.
    slices: Vec<Array3<T>>,
    alpha: T,
    epsilon: T,
    seed: u64,
}

/// A batch of samples: grid multi-indices, their points, and the
/// accumulated log of the per-dimension conditional probabilities
/// (diagnostic). `uniform_fallback` marks samples where a degenerate
/// all-zero conditional forced a uniform draw in some dimension.
#[derive(Debug, Clone, Serialize)]
pub struct SampleBatch<T> {
    pub indices: Vec<Vec<usize>>,
    pub points: Vec<Vec<T>>,
    pub log_weights: Vec<T>,
    pub uniform_fallback: Vec<bool>,
}

impl<T: Scalar> SampleBatch<T> {
    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    /// CSV with one row per sample: index tuple, point tuple, log weight.
    /// Floats use 17 significant digits so `f64` round-trips exactly.
    pub fn to_csv(&self) -> String {
        let d = self.indices.first().map_or(0, Vec::len);
        let mut out = String::new();
        for k in 0..d {
            out.push_str(&format!("i{k},"));
        }
        for k in 0..d {
            out.push_str(&format!("x{k},"));
        }
        out.push_str("log_weight\n");
        for l in 0..self.len() {
            for &i in &self.indices[l] {
                out.push_str(&format!("{i},"));
            }
            for &x in &self.points[l] {
                out.push_str(&format!("{:.16e},", x.to_f64_c()));
            }
            out.push_str(&format!("{:.16e}\n", self.log_weights[l].to_f64_c()));
        }
        out
    }

    pub fn to_json(&self) -> serde_json::Value
    where
        T: Serialize,
    {
        serde_json::to_value(self).expect("sample batch serializes")
    }
}

impl<T: Scalar> TtSampler<T> {
    /// Precomputes the suffix vectors by the right-to-left pass of
    /// one-dimensional core sums.
    pub fn build(tt: TensorTrain<T>, alpha: T, seed: u64) -> Result<Self> {
        Self::build_with_epsilon(tt, alpha, T::from_f64_c(1e-6), seed)
    }

    pub fn build_with_epsilon(tt: TensorTrain<T>, alpha: T, epsilon: T, seed: u64) -> Result<Self> {
        if !(alpha >= T::zero() && alpha <= T::one()) {
            return Err(TtgoError::InvalidArgument(format!(
                "alpha must lie in [0, 1], got {alpha}"
            )));
        }
        if !(epsilon > T::zero()) {
            return Err(TtgoError::InvalidArgument(
                "epsilon must be positive".into(),
            ));
        }
        let d = tt.dim();
        let ranks = tt.ranks();
        let mut suffix: Vec<Vec<T>> = vec![Vec::new(); d + 1];
        suffix[d] = vec![T::one()];
        for k in (0..d).rev() {
            let core = &tt.cores()[k];
            let (rl, n, rr) = core.dim();
            let next = &suffix[k + 1];
            let mut acc = vec![T::zero(); rl];
            for a in 0..rl {
                let mut s = T::zero();
                for x in 0..n {
                    for b in 0..rr {
                        s += core[[a, x, b]] * next[b];
                    }
                }
                acc[a] = s;
            }
            suffix[k] = acc;
        }
        let mut pi_t = Vec::with_capacity(d);
        let mut slices = Vec::with_capacity(d);
        for k in 0..d {
            let core = &tt.cores()[k];
            let (rl, n, rr) = core.dim();
            let next = &suffix[k + 1];
            let mut table = Array2::zeros((rl, n));
            let mut node_major = Array3::zeros((n, rl, rr));
            for a in 0..rl {
                for x in 0..n {
                    let mut s = T::zero();
                    for b in 0..rr {
                        s += core[[a, x, b]] * next[b];
                        node_major[[x, a, b]] = core[[a, x, b]];
                    }
                    table[[a, x]] = s;
                }
            }
            pi_t.push(table);
            slices.push(node_major);
        }
        let _ = ranks;
        Ok(Self {
            tt,
            suffix,
            pi_t,
            slices,
            alpha,
            epsilon,
            seed,
        })
    }

    pub fn model(&self) -> &TensorTrain<T> {
        &self.tt
    }

    pub fn alpha(&self) -> T {
        self.alpha
    }

    /// Signed total mass `sum_x P_x` (the zeroth suffix reduction).
    pub fn total_mass(&self) -> T {
        self.suffix[0][0]
    }

    /// Suffix vector at boundary `k` (diagnostic and test hook).
    pub fn suffix_vector(&self, k: usize) -> &[T] {
        &self.suffix[k]
    }

    /// Draws `n` prioritized samples; `grid` maps indices to points.
    pub fn sample(&self, n: usize, grid: &Grid<T>) -> Result<SampleBatch<T>> {
        if n == 0 {
            return Err(TtgoError::InvalidArgument(
                "sample count must be >= 1".into(),
            ));
        }
        if grid.counts() != self.tt.mode_sizes() {
            return Err(TtgoError::MalformedModel(
                "grid counts do not match sampler model".into(),
            ));
        }
        use rayon::prelude::*;
        let chunk_results: Vec<ChunkOut<T>> = (0..n.div_ceil(CHUNK))
            .into_par_iter()
            .map(|c| {
                let start = c * CHUNK;
                let len = CHUNK.min(n - start);
                self.sample_chunk(start, len)
            })
            .collect();
        let mut indices = Vec::with_capacity(n);
        let mut log_weights = Vec::with_capacity(n);
        let mut uniform_fallback = Vec::with_capacity(n);
        for mut chunk in chunk_results {
            indices.append(&mut chunk.indices);
            log_weights.append(&mut chunk.log_weights);
            uniform_fallback.append(&mut chunk.fallback);
        }
        let points = indices
            .iter()
            .map(|idx| grid.point(idx))
            .collect::<Result<Vec<_>>>()?;
        Ok(SampleBatch {
            indices,
            points,
            log_weights,
            uniform_fallback,
        })
    }

    fn sample_chunk(&self, first: usize, len: usize) -> ChunkOut<T> {
        let d = self.tt.dim();
        // alpha = 0 draws exactly from the distribution: the priority
        // exponent degenerates to the identity and the log-domain
        // transform is skipped entirely.
        let exponent = if self.alpha == T::zero() {
            None
        } else {
            Some(T::one() / (T::one() - self.alpha + self.epsilon))
        };
        let mut rngs: Vec<ChaCha8Rng> = (0..len)
            .map(|l| {
                let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
                rng.set_stream((first + l) as u64);
                rng
            })
            .collect();

        let max_rank = self.tt.ranks().iter().copied().max().unwrap_or(1);
        let max_n = self.tt.mode_sizes().iter().copied().max().unwrap_or(1);
        let mut phi = vec![T::zero(); len * max_rank];
        let mut next_phi = vec![T::zero(); len * max_rank];
        for l in 0..len {
            phi[l * max_rank] = T::one();
        }
        let mut indices = vec![Vec::with_capacity(d); len];
        let mut log_weights = vec![T::zero(); len];
        let mut fallback = vec![false; len];
        let mut weights = vec![T::zero(); max_n];
        let mut cond = vec![T::zero(); len * max_n];

        for k in 0..d {
            let node_major = &self.slices[k];
            let (n_k, rl, rr) = node_major.dim();
            let pi_t = &self.pi_t[k];
            let pi_flat = pi_t.as_slice().expect("standard layout");
            // Conditional weights for every sample of the chunk over the
            // nodes of dimension k, accumulated row by row so the inner
            // loops stream contiguously.
            for row in cond.iter_mut().take(len * n_k) {
                *row = T::zero();
            }
            for l in 0..len {
                let out = &mut cond[l * max_n..l * max_n + n_k];
                for a in 0..rl {
                    let scale = phi[l * max_rank + a];
                    if scale == T::zero() {
                        continue;
                    }
                    let table_row = &pi_flat[a * n_k..(a + 1) * n_k];
                    for (o, &t) in out.iter_mut().zip(table_row.iter()) {
                        *o += scale * t;
                    }
                }
            }
            let slice_flat = node_major.as_slice().expect("standard layout");
            for l in 0..len {
                let row = &cond[l * max_n..l * max_n + n_k];
                let mut max_w = T::zero();
                for (x, &c) in row.iter().enumerate() {
                    let w = c.abs();
                    weights[x] = w;
                    if w > max_w {
                        max_w = w;
                    }
                }
                let x_l = if max_w > T::zero() && max_w.is_finite() {
                    let mut total = T::zero();
                    match exponent {
                        // Priority exponent applied in the log domain,
                        // relative to the slice maximum.
                        Some(kappa) => {
                            let ln_max = max_w.ln();
                            for w in weights[..n_k].iter_mut() {
                                *w = if *w > T::zero() {
                                    ((w.ln() - ln_max) * kappa).exp()
                                } else {
                                    T::zero()
                                };
                                total += *w;
                            }
                        }
                        None => {
                            for &w in &weights[..n_k] {
                                total += w;
                            }
                        }
                    }
                    let x = draw_multinomial(&mut rngs[l], &weights[..n_k], total);
                    log_weights[l] += (weights[x] / total).ln();
                    x
                } else {
                    fallback[l] = true;
                    let x = rngs[l].gen_range(0..n_k);
                    log_weights[l] += (T::one() / T::from_usize(n_k).unwrap()).ln();
                    x
                };
                indices[l].push(x_l);
                // Prefix update against the contiguous node slice.
                let slice = &slice_flat[x_l * rl * rr..(x_l + 1) * rl * rr];
                let out = &mut next_phi[l * max_rank..l * max_rank + rr];
                for o in out.iter_mut() {
                    *o = T::zero();
                }
                for a in 0..rl {
                    let scale = phi[l * max_rank + a];
                    if scale == T::zero() {
                        continue;
                    }
                    let srow = &slice[a * rr..(a + 1) * rr];
                    for (o, &s) in out.iter_mut().zip(srow.iter()) {
                        *o += scale * s;
                    }
                }
            }
            std::mem::swap(&mut phi, &mut next_phi);
        }
        ChunkOut {
            indices,
            log_weights,
            fallback,
        }
    }

    /// Deterministic top-`k` variant: beam search over dimensions keeping
    /// the `beam` highest-probability partial paths scored by the product
    /// of per-dimension conditionals; returns the `k` best complete
    /// indices sorted by score descending.
    pub fn top_k_deterministic(
        &self,
        k: usize,
        beam: usize,
        grid: &Grid<T>,
    ) -> Result<SampleBatch<T>> {
        if k == 0 {
            return Err(TtgoError::InvalidArgument("k must be >= 1".into()));
        }
        if beam < k {
            return Err(TtgoError::InvalidArgument(format!(
                "beam width {beam} must be >= k = {k}"
            )));
        }
        if grid.counts() != self.tt.mode_sizes() {
            return Err(TtgoError::MalformedModel(
                "grid counts do not match sampler model".into(),
            ));
        }
        let d = self.tt.dim();
        struct Path<T> {
            index: Vec<usize>,
            phi: Vec<T>,
            log_score: T,
        }
        let mut paths = vec![Path {
            index: Vec::new(),
            phi: vec![T::one()],
            log_score: T::zero(),
        }];
        for k_dim in 0..d {
            let core = &self.tt.cores()[k_dim];
            let (rl, n_k, rr) = core.dim();
            let table = &self.pi_t[k_dim];
            let mut candidates: Vec<Path<T>> = Vec::with_capacity(paths.len() * n_k);
            for path in &paths {
                let mut weights = vec![T::zero(); n_k];
                let mut total = T::zero();
                for x in 0..n_k {
                    let mut v = T::zero();
                    for a in 0..rl {
                        v += path.phi[a] * table[[a, x]];
                    }
                    weights[x] = v.abs();
                    total += weights[x];
                }
                for x in 0..n_k {
                    let p = if total > T::zero() {
                        weights[x] / total
                    } else {
                        T::one() / T::from_usize(n_k).unwrap()
                    };
                    if p == T::zero() {
                        continue;
                    }
                    let mut index = path.index.clone();
                    index.push(x);
                    let mut phi = vec![T::zero(); rr];
                    for b in 0..rr {
                        let mut acc = T::zero();
                        for a in 0..rl {
                            acc += path.phi[a] * core[[a, x, b]];
                        }
                        phi[b] = acc;
                    }
                    candidates.push(Path {
                        index,
                        phi,
                        log_score: path.log_score + p.ln(),
                    });
                }
            }
            if candidates.is_empty() {
                return Err(TtgoError::MalformedModel(
                    "all beam paths hit zero-measure slices".into(),
                ));
            }
            // Highest score first; ties break lexicographically so the
            // search is deterministic.
            candidates.sort_by(|p, q| {
                q.log_score
                    .partial_cmp(&p.log_score)
                    .unwrap_or(std::cmp::Ordering::Equal)
                    .then_with(|| p.index.cmp(&q.index))
            });
            candidates.truncate(beam);
            paths = candidates;
        }
        let kept = paths.into_iter().take(k).collect::<Vec<_>>();
        let indices: Vec<Vec<usize>> = kept.iter().map(|p| p.index.clone()).collect();
        let points = indices
            .iter()
            .map(|idx| grid.point(idx))
            .collect::<Result<Vec<_>>>()?;
        let log_weights = kept.iter().map(|p| p.log_score).collect();
        let n = indices.len();
        Ok(SampleBatch {
            indices,
            points,
            log_weights,
            uniform_fallback: vec![false; n],
        })
    }
}

struct ChunkOut<T> {
    indices: Vec<Vec<usize>>,
    log_weights: Vec<T>,
    fallback: Vec<bool>,
}

/// Inverse-CDF multinomial draw with a single uniform variate; ties at
/// CDF boundaries resolve to the lower index.
fn draw_multinomial<T: Scalar, R: Rng>(rng: &mut R, weights: &[T], total: T) -> usize {
    debug_assert!(total > T::zero());
    // Open-interval uniform: u = 0 would select a zero-probability
    // leading bucket.
    let mut u64v = rng.gen::<f64>();
    while u64v <= 0.0 {
        u64v = rng.gen::<f64>();
    }
    let u = T::from_f64_c(u64v) * total;
    let mut acc = T::zero();
    for (x, &w) in weights.iter().enumerate() {
        if w <= T::zero() {
            continue;
        }
        acc += w;
        if u <= acc {
            return x;
        }
    }
    // Floating-point shortfall: return the last positive bucket.
    weights
        .iter()
        .rposition(|&w| w > T::zero())
        .expect("total > 0 implies a positive weight")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Domain;
    use crate::tt::index_iter;
    use ndarray::{arr2, Array3, ArrayD, IxDyn};
    use rand::rngs::StdRng;
    use rand::Rng;

    fn unit_grid(shape: &[usize]) -> Grid<f64> {
        Grid::uniform(&Domain::cube(0.0, 1.0, shape.len()).unwrap(), shape).unwrap()
    }

    fn tt_from_dense2(m: &ndarray::Array2<f64>) -> TensorTrain<f64> {
        let dyn_arr = m.clone().into_dyn();
        TensorTrain::from_dense(&dyn_arr).unwrap()
    }

    fn all_ones_2x2() -> TensorTrain<f64> {
        TensorTrain::new(vec![
            Array3::from_elem((1, 2, 2), 1.0),
            Array3::from_elem((2, 2, 1), 1.0),
        ])
        .unwrap()
    }

    #[test]
    fn suffix_vectors_of_all_ones() {
        let sampler = TtSampler::build(all_ones_2x2(), 0.0, 1).unwrap();
        assert_eq!(sampler.suffix_vector(1), &[2.0, 2.0]);
        assert_eq!(sampler.total_mass(), 8.0);
    }

    #[test]
    fn one_dimensional_model_samples_by_value() {
        let core = Array3::from_shape_vec((1, 4, 1), vec![0.0, 0.0, 3.0, 1.0]).unwrap();
        let tt = TensorTrain::new(vec![core]).unwrap();
        let sampler = TtSampler::build(tt, 0.0, 9).unwrap();
        assert_eq!(sampler.suffix_vector(1), &[1.0]);
        let grid = unit_grid(&[4]);
        let batch = sampler.sample(4000, &grid).unwrap();
        let mut counts = [0usize; 4];
        for idx in &batch.indices {
            counts[idx[0]] += 1;
        }
        assert_eq!(counts[0], 0);
        assert_eq!(counts[1], 0);
        let frac2 = counts[2] as f64 / 4000.0;
        assert!((frac2 - 0.75).abs() < 0.03, "frac {frac2}");
    }

    #[test]
    fn marginal_matches_dense_sum() {
        // sigma_1(x) from the suffix machinery equals the brute-force
        // marginal of a dense 4x4x4 tensor.
        let mut rng = StdRng::seed_from_u64(77);
        let dense = ArrayD::from_shape_fn(IxDyn(&[4, 4, 4]), |_| rng.gen_range(0.0..1.0));
        let tt = TensorTrain::from_dense(&dense).unwrap();
        let sampler = TtSampler::build(tt, 0.0, 1).unwrap();
        // phi = e_1 (first dimension): conditional table row.
        let table = &sampler.pi_t[0];
        for x1 in 0..4 {
            let mut brute = 0.0;
            for x2 in 0..4 {
                for x3 in 0..4 {
                    brute += dense[[x1, x2, x3]];
                }
            }
            let got: f64 = table[[0, x1]];
            assert!((got - brute).abs() < 1e-12);
        }
    }

    #[test]
    fn single_support_tensor_always_sampled() {
        let tt = tt_from_dense2(&arr2(&[[1.0, 0.0], [0.0, 0.0]]));
        let sampler = TtSampler::build(tt, 0.0, 3).unwrap();
        let grid = unit_grid(&[2, 2]);
        let batch = sampler.sample(500, &grid).unwrap();
        for idx in &batch.indices {
            assert_eq!(idx, &vec![0, 0]);
        }
        assert!(batch.uniform_fallback.iter().all(|&f| !f));
    }

    #[test]
    fn alpha_one_is_greedy_argmax_path() {
        let tt = tt_from_dense2(&arr2(&[[1.0, 3.0], [2.0, 4.0]]));
        let sampler = TtSampler::build(tt, 1.0, 5).unwrap();
        let grid = unit_grid(&[2, 2]);
        let batch = sampler.sample(64, &grid).unwrap();
        for idx in &batch.indices {
            // Row sums (4, 6) pick row 1; then (2, 4) picks column 1.
            assert_eq!(idx, &vec![1, 1]);
        }
        // Greedy path agrees with the deterministic beam-1 search.
        let top = sampler.top_k_deterministic(1, 1, &grid).unwrap();
        assert_eq!(top.indices[0], vec![1, 1]);
    }

    #[test]
    fn exact_sampling_total_variation_small_case() {
        let mut rng = StdRng::seed_from_u64(11);
        let dense = ArrayD::from_shape_fn(IxDyn(&[4, 4]), |_| rng.gen_range(0.0..1.0f64).powi(3));
        let tt = TensorTrain::from_dense(&dense).unwrap();
        let sampler = TtSampler::build(tt, 0.0, 1234).unwrap();
        let grid = unit_grid(&[4, 4]);
        let n = 60_000usize;
        let batch = sampler.sample(n, &grid).unwrap();
        let total: f64 = dense.iter().sum();
        let mut counts = vec![0usize; 16];
        for idx in &batch.indices {
            counts[idx[0] * 4 + idx[1]] += 1;
        }
        let mut tv = 0.0;
        for (cell, idx) in index_iter(&[4, 4]).enumerate() {
            let p = dense[idx.as_slice()] / total;
            let q = counts[cell] as f64 / n as f64;
            tv += (p - q).abs();
        }
        tv *= 0.5;
        assert!(tv < 0.02, "TV distance {tv}");
    }

    #[test]
    fn zero_slice_falls_back_to_uniform() {
        // First dimension has zero mass everywhere: conditional is 0/0.
        let tt = tt_from_dense2(&arr2(&[[0.0, 0.0], [0.0, 0.0]]));
        let sampler = TtSampler::build(tt, 0.0, 2).unwrap();
        let grid = unit_grid(&[2, 2]);
        let batch = sampler.sample(100, &grid).unwrap();
        assert!(batch.uniform_fallback.iter().all(|&f| f));
    }

    #[test]
    fn top_k_full_beam_matches_sorted_values() {
        let mut rng = StdRng::seed_from_u64(31);
        let dense = ArrayD::from_shape_fn(IxDyn(&[3, 3]), |_| rng.gen_range(0.1..1.0));
        let tt = TensorTrain::from_dense(&dense).unwrap();
        let sampler = TtSampler::build(tt, 0.0, 1).unwrap();
        let grid = unit_grid(&[3, 3]);
        let batch = sampler.top_k_deterministic(9, 9, &grid).unwrap();
        let mut expected: Vec<(f64, Vec<usize>)> = index_iter(&[3, 3])
            .map(|idx| (dense[idx.as_slice()], idx))
            .collect();
        expected.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap());
        let got: Vec<Vec<usize>> = batch.indices.clone();
        let want: Vec<Vec<usize>> = expected.into_iter().map(|(_, idx)| idx).collect();
        assert_eq!(got, want);
    }

    #[test]
    fn beam_smaller_than_k_rejected() {
        let sampler = TtSampler::build(all_ones_2x2(), 0.0, 1).unwrap();
        let grid = unit_grid(&[2, 2]);
        assert!(matches!(
            sampler.top_k_deterministic(4, 2, &grid),
            Err(TtgoError::InvalidArgument(_))
        ));
    }

    #[test]
    fn seed_determinism_and_stream_independence() {
        let mut rng = StdRng::seed_from_u64(55);
        let dense = ArrayD::from_shape_fn(IxDyn(&[5, 5, 5]), |_| rng.gen_range(0.0..1.0));
        let tt = TensorTrain::from_dense(&dense).unwrap();
        let grid = unit_grid(&[5, 5, 5]);
        let s1 = TtSampler::build(tt.clone(), 0.5, 77).unwrap();
        let s2 = TtSampler::build(tt, 0.5, 77).unwrap();
        let b1 = s1.sample(300, &grid).unwrap();
        let b2 = s2.sample(300, &grid).unwrap();
        assert_eq!(b1.indices, b2.indices);
        // Prefixes of a larger batch match the smaller batch: streams
        // are per-sample, not sequential.
        let b3 = s1.sample(100, &grid).unwrap();
        assert_eq!(&b1.indices[..100], &b3.indices[..]);
    }

    #[test]
    fn sample_csv_roundtrips_floats() {
        let sampler = TtSampler::build(all_ones_2x2(), 0.0, 1).unwrap();
        let grid = unit_grid(&[2, 2]);
        let batch = sampler.sample(3, &grid).unwrap();
        let csv = batch.to_csv();
        let mut lines = csv.lines();
        assert_eq!(lines.next().unwrap(), "i0,i1,x0,x1,log_weight");
        let row: Vec<&str> = lines.next().unwrap().split(',').collect();
        assert_eq!(row.len(), 5);
        let x0: f64 = row[2].parse().unwrap();
        assert_eq!(x0, batch.points[0][0]);
        let lw: f64 = row[4].parse().unwrap();
        assert_eq!(lw, batch.log_weights[0]);
    }

    #[test]
    fn invalid_alpha_rejected() {
        assert!(TtSampler::build(all_ones_2x2(), 1.5, 0).is_err());
        assert!(TtSampler::build(all_ones_2x2(), -0.1, 0).is_err());
    }
}
