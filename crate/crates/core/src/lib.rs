//! Binned multivariate kernel density estimation on regular grids.
//!
//! Samples are linearly binned onto a grid, and the binned estimate
//! `f̃_j = Σ_l c_{j−l} k_l` is evaluated either by direct summation or by FFT
//! convolution. Two FFT layouts are provided: the classic wrap-around
//! embedding ([`Embedding::Wand`]), exact only for diagonal bandwidth
//! matrices, and a zero-padded embedding ([`Embedding::Corrected`]) that is
//! exact for any symmetric positive-definite bandwidth matrix.
//!
//! Everything numeric is generic over [`Scalar`] (`f32` or `f64`); the
//! `*64`/`*32` aliases below fix the precision.

// `!(x > 0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bench;
pub mod error;
pub mod estimate;
pub mod fft;
pub mod grid;
pub mod kernel;
pub mod linalg;
pub mod pipeline;
pub mod scalar;

pub use error::{KdeError, Result};
pub use estimate::{
    binned_kde_direct, binned_kde_fft, calibrate_extraction_offset, embed_corrected, embed_wand, extract,
    naive_kde, naive_kde_on_grid, DensityGrid, Embedding, Method,
};
pub use fft::{choose_pad_sizes, circular_convolve, PaddedArray};
pub use grid::{default_extension, linear_binning, make_grid, GridCounts, GridSpec, SampleMatrix};
pub use kernel::{effective_support, full_support, gaussian_kernel, kernel_weights, KernelWeights, DEFAULT_TAU};
pub use linalg::{matrix_inv_sqrt, validate_spd, BandwidthMatrix};
pub use pipeline::{estimate, EstimateConfig, Prepared};
pub use scalar::Scalar;

pub type BandwidthMatrix64 = BandwidthMatrix<f64>;
pub type BandwidthMatrix32 = BandwidthMatrix<f32>;
pub type SampleMatrix64 = SampleMatrix<f64>;
pub type SampleMatrix32 = SampleMatrix<f32>;
pub type GridSpec64 = GridSpec<f64>;
pub type GridSpec32 = GridSpec<f32>;
pub type GridCounts64 = GridCounts<f64>;
pub type GridCounts32 = GridCounts<f32>;
pub type KernelWeights64 = KernelWeights<f64>;
pub type KernelWeights32 = KernelWeights<f32>;
pub type DensityGrid64 = DensityGrid<f64>;
pub type DensityGrid32 = DensityGrid<f32>;
pub type PaddedArray64 = PaddedArray<f64>;
pub type PaddedArray32 = PaddedArray<f32>;
