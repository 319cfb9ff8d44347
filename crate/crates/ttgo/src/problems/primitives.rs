//! Radial-basis motion primitives and the trajectory-shaping transform
//! that pins boundary values, respects limits, and smooths the result.

use crate::error::{Result, TtgoError};
use crate::scalar::Scalar;

/// Radial basis layout on the unit phase interval plus the shaping
/// parameters shared by every joint.
#[derive(Debug, Clone)]
pub struct MotionPrimitive<T> {
    pub basis_count: usize,
    pub gamma: T,
    pub centers: Vec<T>,
    /// Number of phase intervals; curves carry `n_steps + 1` samples.
    pub n_steps: usize,
    /// Moving-average width; odd.
    pub window: usize,
}

impl<T: Scalar> MotionPrimitive<T> {
    /// Centers sit at cell midpoints `(2j - 1) / 2J`; the width
    /// `gamma = 4 J^2` puts adjacent-basis overlap near `e^-1` at the
    /// midpoint between centers.
    pub fn new(basis_count: usize, n_steps: usize) -> Result<Self> {
        let window = 2 * n_steps.div_ceil(40) + 1;
        Self::with_window(basis_count, n_steps, window)
    }

    pub fn with_window(basis_count: usize, n_steps: usize, window: usize) -> Result<Self> {
        if basis_count == 0 {
            return Err(TtgoError::InvalidArgument(
                "need at least one basis function".into(),
            ));
        }
        if n_steps < 2 {
            return Err(TtgoError::InvalidArgument(
                "need at least two phase steps".into(),
            ));
        }
        if window % 2 == 0 || window == 0 {
            return Err(TtgoError::InvalidArgument(
                "smoothing window must be odd and positive".into(),
            ));
        }
        let j = basis_count;
        let centers = (1..=j)
            .map(|idx| T::from_usize(2 * idx - 1).unwrap() / T::from_usize(2 * j).unwrap())
            .collect();
        Ok(Self {
            basis_count,
            gamma: T::from_usize(4 * j * j).unwrap(),
            centers,
            n_steps,
            window,
        })
    }

    /// Basis activations at a phase value.
    pub fn basis(&self, t: T) -> Vec<T> {
        self.centers
            .iter()
            .map(|&mu| (-(self.gamma) * (t - mu) * (t - mu)).exp())
            .collect()
    }

    /// Raw weighted curve on the uniform phase grid `t_i = i / N`.
    pub fn trajectory(&self, weights: &[T]) -> Vec<T> {
        debug_assert_eq!(weights.len(), self.basis_count);
        (0..=self.n_steps)
            .map(|i| {
                let t = T::from_usize(i).unwrap() / T::from_usize(self.n_steps).unwrap();
                self.basis(t)
                    .iter()
                    .zip(weights.iter())
                    .map(|(&phi, &w)| w * phi)
                    .sum()
            })
            .collect()
    }
}

/// Reshapes a raw curve so it starts at `tau0`, ends at `tau1`, stays
/// inside `limits`, and is smooth:
///
/// 1. shift by a linear ramp so the boundary values hold,
/// 2. clip into the limits,
/// 3. pad `(window - 1) / 2` boundary copies at each end and take the
///    centered moving average,
/// 4. subtract the filter's residual boundary ramp and re-clip, so the
///    endpoints are exact and the limits still hold.
pub fn shape_trajectory<T: Scalar>(
    tau_hat: &[T],
    tau0: T,
    tau1: T,
    limits: (T, T),
    window: usize,
) -> Result<Vec<T>> {
    let (lo, hi) = limits;
    if !(lo <= tau0 && tau0 <= hi && lo <= tau1 && tau1 <= hi) {
        return Err(TtgoError::InvalidArgument(
            "boundary values must lie within the limits".into(),
        ));
    }
    if window % 2 == 0 || window == 0 {
        return Err(TtgoError::InvalidArgument(
            "smoothing window must be odd and positive".into(),
        ));
    }
    let n = tau_hat.len().checked_sub(1).filter(|&n| n >= 1).ok_or_else(|| {
        TtgoError::InvalidArgument("curve needs at least two samples".into())
    })?;
    let n_t = T::from_usize(n).unwrap();

    // (1) boundary shift: z(0) = tau0 and z(1) = tau1 by construction.
    let first = tau_hat[0];
    let last = tau_hat[n];
    let slope = tau1 - tau0 + first - last;
    let shifted: Vec<T> = tau_hat
        .iter()
        .enumerate()
        .map(|(i, &v)| {
            let t = T::from_usize(i).unwrap() / n_t;
            v + tau0 - first + t * slope
        })
        .collect();

    // (2) clip into the limits.
    let clipped: Vec<T> = shifted.iter().map(|&v| v.max(lo).min(hi)).collect();

    // (3) constant-padded centered moving average.
    let pad = (window - 1) / 2;
    let mut padded = Vec::with_capacity(n + 1 + 2 * pad);
    padded.extend(std::iter::repeat(clipped[0]).take(pad));
    padded.extend_from_slice(&clipped);
    padded.extend(std::iter::repeat(clipped[n]).take(pad));
    let w_t = T::from_usize(window).unwrap();
    let mut smooth: Vec<T> = (0..=n)
        .map(|i| {
            let mut acc = T::zero();
            for k in 0..window {
                acc += padded[i + k];
            }
            acc / w_t
        })
        .collect();

    // (4) the filter drags the endpoints toward the interior; remove
    // that residual with one more boundary ramp, then re-clip. The
    // endpoints come out exact and inside the limits, and interior
    // values stay convex combinations of in-limit values after the clip.
    let e0 = smooth[0] - tau0;
    let e1 = smooth[n] - tau1;
    for (i, v) in smooth.iter_mut().enumerate() {
        let t = T::from_usize(i).unwrap() / n_t;
        *v = (*v - (e0 + t * (e1 - e0))).max(lo).min(hi);
    }
    smooth[0] = tau0;
    smooth[n] = tau1;
    Ok(smooth)
}
