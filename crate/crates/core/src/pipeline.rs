//! End-to-end estimation: grid construction, binning, support selection and
//! evaluation by any [`Method`].

use crate::error::{KdeError, Result};
use crate::estimate::{binned_kde_direct, binned_kde_fft, naive_kde_on_grid, DensityGrid, Embedding, Method};
use crate::grid::{default_extension, linear_binning, make_grid, GridCounts, GridSpec, SampleMatrix};
use crate::kernel::{effective_support, full_support, kernel_weights, KernelWeights, DEFAULT_TAU};
use crate::linalg::BandwidthMatrix;
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq)]
pub struct EstimateConfig<T: Scalar> {
    /// Grid nodes per dimension.
    pub sizes: Vec<usize>,
    /// Effective-support factor; also sets the default grid extension.
    pub tau: T,
    /// Per-dimension widening of the data range; `tau·sqrt(H_kk)` when `None`.
    pub extension: Option<Vec<T>>,
    /// Use `L_k = M_k − 1` instead of the effective support.
    pub full_support: bool,
}

impl<T: Scalar> EstimateConfig<T> {
    pub fn new(sizes: Vec<usize>) -> Self {
        Self {
            sizes,
            tau: T::lit(DEFAULT_TAU),
            extension: None,
            full_support: false,
        }
    }
}

/// Grid, counts and kernel weights shared by every binned method.
#[derive(Debug, Clone)]
pub struct Prepared<T: Scalar> {
    pub grid: GridSpec<T>,
    pub counts: GridCounts<T>,
    pub kernel: KernelWeights<T>,
}

impl<T: Scalar> Prepared<T> {
    pub fn new(data: &SampleMatrix<T>, h: &BandwidthMatrix<T>, config: &EstimateConfig<T>) -> Result<Self> {
        if h.dim() != data.dim() {
            return Err(KdeError::DimensionMismatch {
                expected: data.dim(),
                found: h.dim(),
            });
        }
        if !(config.tau > T::zero()) {
            return Err(KdeError::InvalidParameter("tau must be positive".into()));
        }
        let extension = match &config.extension {
            Some(ext) => ext.clone(),
            None => default_extension(h, config.tau),
        };
        let grid = make_grid(data, &config.sizes, &extension)?;
        let counts = linear_binning(data, &grid)?;
        let support = if config.full_support {
            full_support(&grid)
        } else {
            effective_support(h, &grid, config.tau)
        };
        let kernel = kernel_weights(&grid, h, &support, data.n())?;
        Ok(Self { grid, counts, kernel })
    }

    /// Evaluates the binned estimate; the naive method needs the raw sample.
    pub fn run(&self, method: Method, data: &SampleMatrix<T>, h: &BandwidthMatrix<T>) -> Result<DensityGrid<T>> {
        match method {
            Method::Naive => naive_kde_on_grid(data, h, &self.grid),
            Method::BinnedDirect => binned_kde_direct(&self.grid, &self.counts, &self.kernel),
            Method::FftWand => binned_kde_fft(&self.grid, &self.counts, &self.kernel, Embedding::Wand),
            Method::FftCorrected => binned_kde_fft(&self.grid, &self.counts, &self.kernel, Embedding::Corrected),
        }
    }
}

pub fn estimate<T: Scalar>(
    data: &SampleMatrix<T>,
    h: &BandwidthMatrix<T>,
    config: &EstimateConfig<T>,
    method: Method,
) -> Result<DensityGrid<T>> {
    Prepared::new(data, h, config)?.run(method, data, h)
}
