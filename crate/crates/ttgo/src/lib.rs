//! Tensor-train surrogate models for global optimization.
//!
//! The library builds an unnormalized probability density from a cost
//! function, approximates it on a grid as a tensor train via cross
//! approximation, conditions the model on task parameters, draws
//! prioritized samples as near-optimal initializations, and refines them
//! with a bounded local search.
//!
//! The numeric kernels are generic over the scalar type through the
//! [`Scalar`] trait (`f32` or `f64`); concrete `f64` aliases are exported
//! at the crate root.

pub mod cross;
pub mod error;
pub mod grid;
mod linalg;
pub mod persist;
pub mod pipeline;
pub mod problems;
pub mod sampler;
pub mod scalar;
pub mod tt;

pub use error::{Result, TtgoError};
pub use scalar::Scalar;

/// `f64` grid over a rectangular domain.
pub type Grid64 = grid::Grid<f64>;
/// `f64` rectangular domain.
pub type Domain64 = grid::Domain<f64>;
/// `f64` tensor train.
pub type TensorTrain64 = tt::TensorTrain<f64>;
/// `f64` sampler state.
pub type TtSampler64 = sampler::TtSampler<f64>;
/// `f64` trained model (grid + tensor train + task split).
pub type TtgoModel64 = pipeline::TtgoModel<f64>;
/// `f64` problem definition.
pub type Problem64 = pipeline::Problem<f64>;
